#pragma once

#include "mvd/signal.hpp"
#include "mvd/types.hpp"

namespace mvd {

// N×N Hermitian autocorrelation of the sensed channels over the time axis.
struct AutocorrMatrix {
    CMatrix values;
};

// Eigenvalues descending; eigenvectors are the matching columns.
struct EigenSystem {
    RVector eigenvalues;
    CMatrix eigenvectors;

    Eigen::Index size() const { return eigenvalues.size(); }
    // The first m eigenvectors as an N×m matrix.
    CMatrix leading(Eigen::Index m) const { return eigenvectors.leftCols(m); }
};

// R(n1,n2) = Σ_i x⁽ⁱ⁾(n1)·conj(x⁽ⁱ⁾(n2)) with exact conjugate symmetry.
AutocorrMatrix autocorrelation(const MultivariateSignal& x);

struct JacobiOptions {
    // Stop once ‖offdiag‖_F ≤ tol·‖R‖_F.
    double tol = 1e-12;
    int max_sweeps = 60;
};

// Full decomposition by cyclic complex Jacobi rotations. Each eigenvector is
// rotated so its largest-magnitude entry is real and positive. Throws
// InvalidArgument when R deviates from Hermitian by more than 1e-8·‖R‖.
EigenSystem hermitian_eig(const AutocorrMatrix& r, const JacobiOptions& opts = {});

// Number of eigenvalues ≥ rel_threshold·λ₁ (0 when λ₁ ≤ 0).
int significant_rank(const EigenSystem& es, double rel_threshold);

// Eigenvalues of the autocorrelation matrix, descending, length N, via the
// S×S Gram X·Xᴴ that shares its nonzero spectrum. Eigenvalue-only and much
// cheaper than hermitian_eig when S ≪ N.
RVector autocorrelation_spectrum(const MultivariateSignal& x);

}  // namespace mvd
