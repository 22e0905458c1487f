#include "mvd/tf.hpp"

#include <algorithm>
#include <cmath>

#include "mvd/kernels.hpp"

namespace mvd {

std::string to_string(TFKind kind) {
    switch (kind) {
        case TFKind::stft: return "stft";
        case TFKind::spectrogram: return "spec";
        case TFKind::pseudo_wd: return "wd";
    }
    return "unknown";
}

std::string to_string(WindowKind kind) {
    return kind == WindowKind::hann ? "hann" : "rectangular";
}

WindowKind parse_window_kind(const std::string& s) {
    if (s == "hann") return WindowKind::hann;
    if (s == "rectangular" || s == "rect") return WindowKind::rectangular;
    throw InvalidArgument("unknown window kind '" + s + "'");
}

void TFConfig::validate(Eigen::Index signal_length) const {
    if (window_length < 2 || window_length % 2 != 0)
        throw InvalidArgument("window length must be an even positive integer");
    if (hop < 1) throw InvalidArgument("hop must be at least 1");
    if (window_length > signal_length)
        throw InvalidArgument("window length " + std::to_string(window_length) +
                              " exceeds signal length " + std::to_string(signal_length));
}

Eigen::Index TFRepresentation::frames() const {
    return kind == TFKind::stft ? complex_values.rows() : real_values.rows();
}

Eigen::Index TFRepresentation::bins() const {
    return kind == TFKind::stft ? complex_values.cols() : real_values.cols();
}

RMatrix TFRepresentation::magnitude() const {
    if (kind == TFKind::stft) return complex_values.cwiseAbs();
    return real_values;
}

RVector make_window(const TFConfig& cfg) {
    RVector w(cfg.window_length);
    for (int m = 0; m < cfg.window_length; ++m) {
        w[m] = cfg.window == WindowKind::hann
                   ? 0.5 * (1.0 - std::cos(2.0 * kPi * m / cfg.window_length))
                   : 1.0;
    }
    return w;
}

namespace {

std::vector<int> positions(Eigen::Index n, int hop) {
    std::vector<int> pos;
    for (Eigen::Index t = 0; t < n; t += hop) pos.push_back(static_cast<int>(t));
    return pos;
}

// Window about its center: w(m) for m in [-Sw/2, Sw/2].
double centered_window(const TFConfig& cfg, int m) {
    if (std::abs(m) > cfg.window_length / 2) return 0.0;
    if (cfg.window == WindowKind::rectangular) return 1.0;
    return 0.5 * (1.0 + std::cos(2.0 * kPi * m / cfg.window_length));
}

}  // namespace

TFRepresentation stft(const CVector& x, const TFConfig& cfg) {
    cfg.validate(x.size());
    TFRepresentation out;
    out.kind = TFKind::stft;
    out.window_length = cfg.window_length;
    out.complex_values = kernels::omp::stft_frames(x, make_window(cfg), cfg.hop);
    out.time_positions = positions(x.size(), cfg.hop);
    return out;
}

TFRepresentation spectrogram(const CVector& x, const TFConfig& cfg) {
    TFRepresentation s = stft(x, cfg);
    TFRepresentation out;
    out.kind = TFKind::spectrogram;
    out.window_length = s.window_length;
    out.time_positions = std::move(s.time_positions);
    out.real_values = s.complex_values.cwiseAbs2();
    return out;
}

TFRepresentation pseudo_wd(const CVector& x, const TFConfig& cfg) {
    cfg.validate(x.size());
    const int sw = cfg.window_length;
    const int half = sw / 2;
    const Eigen::Index n = x.size();
    TFRepresentation out;
    out.kind = TFKind::pseudo_wd;
    out.window_length = sw;
    out.time_positions = positions(n, cfg.hop);
    const auto frames = static_cast<Eigen::Index>(out.time_positions.size());
    out.real_values.resize(frames, sw);

    std::vector<double> weight(sw);
    for (int m = -half; m < half; ++m)
        weight[m + half] = centered_window(cfg, m) * centered_window(cfg, -m);

    auto sample = [&](Eigen::Index i) { return (i >= 0 && i < n) ? x[i] : cplx{0.0, 0.0}; };

#pragma omp parallel for schedule(static)
    for (Eigen::Index t = 0; t < frames; ++t) {
        const Eigen::Index c = out.time_positions[t];
        std::vector<cplx> lag(sw);
        for (int m = -half; m < half; ++m)
            lag[m + half] = weight[m + half] * sample(c + m) * std::conj(sample(c - m));
        for (int k = 0; k < sw; ++k) {
            cplx acc{0.0, 0.0};
            for (int m = -half; m < half; ++m)
                acc += lag[m + half] * std::polar(1.0, -4.0 * kPi * m * k / sw);
            out.real_values(t, k) = acc.real();
        }
    }
    return out;
}

double concentration_measure(const TFRepresentation& tfr, double p, double tau) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("concentration exponent p must be in [0, 1]");
    if (tfr.kind == TFKind::pseudo_wd)
        throw InvalidArgument("concentration measure needs an stft or spectrogram");

    if (p == 0.0) {
        if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("support threshold must be in (0, 1)");
        const RMatrix mag = tfr.kind == TFKind::stft ? RMatrix(tfr.complex_values.cwiseAbs())
                                                      : RMatrix(tfr.real_values.cwiseSqrt());
        const double peak = mag.size() ? mag.maxCoeff() : 0.0;
        if (peak == 0.0) return 0.0;
        return static_cast<double>((mag.array() > tau * peak).count());
    }

    if (tfr.kind == TFKind::stft) {
        // Column-major: each contiguous run handed to the kernel is one bin.
        kernels::LpSumArgs args;
        args.z = tfr.complex_values.data();
        args.frames = tfr.complex_values.cols();
        args.bins = tfr.complex_values.rows();
        args.p = p;
        return kernels::omp::lp_sum(args);
    }
    double total = 0.0;
    for (Eigen::Index c = 0; c < tfr.real_values.cols(); ++c) {
        double acc = 0.0;
        for (Eigen::Index r = 0; r < tfr.real_values.rows(); ++r)
            acc += std::pow(std::max(tfr.real_values(r, c), 0.0), 0.5 * p);
        total += acc;
    }
    return total;
}

}  // namespace mvd
