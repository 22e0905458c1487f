#include "mvd/kernels.hpp"

#include <cmath>
#include <vector>

#include <omp.h>
#include <unsupported/Eigen/FFT>

namespace mvd::kernels {

namespace {

void autocorr_column(const CMatrix& x, CMatrix& r, Eigen::Index b) {
    const Eigen::Index s = x.rows();
    const Eigen::Index n = x.cols();
    for (Eigen::Index a = 0; a < n; ++a) {
        cplx acc{0.0, 0.0};
        for (Eigen::Index i = 0; i < s; ++i) acc += x(i, a) * std::conj(x(i, b));
        r(a, b) = acc;
    }
}

void hermitize(CMatrix& r) {
    const Eigen::Index n = r.rows();
    for (Eigen::Index b = 0; b < n; ++b) {
        r(b, b) = cplx(r(b, b).real(), 0.0);
        for (Eigen::Index a = b + 1; a < n; ++a) {
            const cplx avg = 0.5 * (r(a, b) + std::conj(r(b, a)));
            r(a, b) = avg;
            r(b, a) = std::conj(avg);
        }
    }
}

void stft_frame(const CVector& x, const RVector& window, Eigen::Index start,
                Eigen::FFT<double>& fft, std::vector<cplx>& buf, std::vector<cplx>& spec,
                CMatrix& out, Eigen::Index row) {
    const Eigen::Index sw = window.size();
    const Eigen::Index n = x.size();
    for (Eigen::Index m = 0; m < sw; ++m) {
        const Eigen::Index idx = start + m;
        buf[m] = idx < n ? window[m] * x[idx] : cplx{0.0, 0.0};
    }
    fft.fwd(spec, buf);
    for (Eigen::Index k = 0; k < sw; ++k) out(row, k) = spec[k];
}

inline double cell_power(double re, double im, double p) {
    const double mag2 = re * re + im * im;
    if (p == 1.0) return std::sqrt(mag2);
    if (p == 2.0) return mag2;
    return mag2 > 0.0 ? std::pow(mag2, 0.5 * p) : 0.0;
}

double frame_lp_sum(const LpSumArgs& a, Eigen::Index t) {
    const cplx* z = a.z + t * a.bins;
    double acc = 0.0;
    if (a.dir == nullptr) {
        for (Eigen::Index k = 0; k < a.bins; ++k) acc += cell_power(z[k].real(), z[k].imag(), a.p);
        return acc;
    }
    const cplx* d = a.dir + t * a.bins;
    const double sr = a.step.real();
    const double si = a.step.imag();
    for (Eigen::Index k = 0; k < a.bins; ++k) {
        const double re = z[k].real() + sr * d[k].real() - si * d[k].imag();
        const double im = z[k].imag() + sr * d[k].imag() + si * d[k].real();
        acc += cell_power(re, im, a.p);
    }
    return acc;
}

void check_window(const RVector& window, int hop) {
    if (window.size() == 0) throw InvalidArgument("empty window");
    if (hop < 1) throw InvalidArgument("hop must be at least 1");
}

}  // namespace

namespace serial {

CMatrix autocorrelation(const CMatrix& x) {
    CMatrix r(x.cols(), x.cols());
    for (Eigen::Index b = 0; b < x.cols(); ++b) autocorr_column(x, r, b);
    hermitize(r);
    return r;
}

CMatrix stft_frames(const CVector& x, const RVector& window, int hop) {
    check_window(window, hop);
    const Eigen::Index frames = frame_count(x.size(), hop);
    CMatrix out(frames, window.size());
    Eigen::FFT<double> fft;
    std::vector<cplx> buf(window.size()), spec;
    for (Eigen::Index t = 0; t < frames; ++t) stft_frame(x, window, t * hop, fft, buf, spec, out, t);
    return out;
}

double lp_sum(const LpSumArgs& args) {
    double total = 0.0;
    for (Eigen::Index t = 0; t < args.frames; ++t) total += frame_lp_sum(args, t);
    return total;
}

}  // namespace serial

namespace omp {

CMatrix autocorrelation(const CMatrix& x) {
    const Eigen::Index n = x.cols();
    CMatrix r(n, n);
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < n; ++b) autocorr_column(x, r, b);
    hermitize(r);
    return r;
}

CMatrix stft_frames(const CVector& x, const RVector& window, int hop) {
    check_window(window, hop);
    const Eigen::Index frames = frame_count(x.size(), hop);
    CMatrix out(frames, window.size());
#pragma omp parallel
    {
        Eigen::FFT<double> fft;
        std::vector<cplx> buf(window.size()), spec;
#pragma omp for schedule(static)
        for (Eigen::Index t = 0; t < frames; ++t)
            stft_frame(x, window, t * hop, fft, buf, spec, out, t);
    }
    return out;
}

double lp_sum(const LpSumArgs& args) {
    // Small problems or nested calls (restarts already run in parallel) go
    // straight to the serial loop; the result is the same either way.
    if (args.frames < 64 || omp_in_parallel()) return serial::lp_sum(args);
    std::vector<double> partial(static_cast<std::size_t>(args.frames));
#pragma omp parallel for schedule(static)
    for (Eigen::Index t = 0; t < args.frames; ++t) partial[t] = frame_lp_sum(args, t);
    double total = 0.0;
    for (double v : partial) total += v;
    return total;
}

}  // namespace omp

}  // namespace mvd::kernels
