#pragma once

// Data-parallel inner loops. Every kernel exists twice: a plain serial
// reference and an OpenMP version. Both use the same per-row / per-frame
// summation order, so their results are bitwise identical regardless of
// the thread count.

#include "mvd/types.hpp"

namespace mvd::kernels {

// Σ over cells of |z + step·dir|^p, laid out as `frames` rows of `bins`.
// dir may be null (step ignored). p = 1 uses sqrt(re²+im²) directly.
struct LpSumArgs {
    const cplx* z = nullptr;
    const cplx* dir = nullptr;
    cplx step{0.0, 0.0};
    Eigen::Index frames = 0;
    Eigen::Index bins = 0;
    double p = 1.0;
};

namespace serial {

// R(a,b) = Σ_i x(i,a)·conj(x(i,b)), symmetrized as (R + Rᴴ)/2.
CMatrix autocorrelation(const CMatrix& x);

// Row t holds the DFT of w(m)·x(t·hop + m), m = 0..Sw-1, zero past the end.
CMatrix stft_frames(const CVector& x, const RVector& window, int hop);

double lp_sum(const LpSumArgs& args);

}  // namespace serial

namespace omp {

CMatrix autocorrelation(const CMatrix& x);
CMatrix stft_frames(const CVector& x, const RVector& window, int hop);
double lp_sum(const LpSumArgs& args);

}  // namespace omp

// Number of frames stft_frames produces for a length-n signal.
inline Eigen::Index frame_count(Eigen::Index n, int hop) { return (n + hop - 1) / hop; }

}  // namespace mvd::kernels
