#include "mvd/signal.hpp"

#include <cmath>
#include <limits>
#include <unsupported/Eigen/FFT>

namespace mvd {

double matching_score(const CVector& a, const CVector& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::abs(inner(a, b)) / (na * nb);
}

void ComponentSet::validate() const {
    if (data.rows() == 0 || data.cols() == 0) throw InvalidArgument("empty component set");
    for (Eigen::Index p = 0; p < data.rows(); ++p) {
        if (data.row(p).squaredNorm() == 0.0)
            throw InvalidArgument("component " + std::to_string(p) + " is all zero");
    }
}

void ComponentDescriptor::validate() const {
    if (family != "lfm" && family != "sinfm")
        throw InvalidArgument("unknown component family '" + family + "'");
    if (!(width > 0.0)) throw InvalidArgument("component width must be positive");
    if (amplitude == 0.0) throw InvalidArgument("component amplitude must be nonzero");
    if (family == "lfm" && (fm_depth != 0.0 || fm_rate != 0.0))
        throw InvalidArgument("lfm component cannot carry sinusoidal FM terms");
}

CVector analytic_signal(const RVector& x) {
    const auto n = x.size();
    if (n == 0) throw InvalidArgument("empty signal");
    if (n < 2) throw InvalidArgument("analytic signal needs at least 2 samples");

    Eigen::FFT<double> fft;
    std::vector<cplx> in(x.data(), x.data() + n);
    std::vector<cplx> spec;
    fft.fwd(spec, in);

    // Keep DC (and Nyquist for even n), double positive bins, zero the rest.
    const Eigen::Index half = n / 2;
    const Eigen::Index last_positive = (n % 2 == 0) ? half - 1 : half;
    for (Eigen::Index k = 1; k <= last_positive; ++k) spec[k] *= 2.0;
    for (Eigen::Index k = last_positive + 1 + (n % 2 == 0 ? 1 : 0); k < n; ++k) spec[k] = 0.0;

    std::vector<cplx> out;
    fft.inv(out, spec);
    CVector y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = out[i];
    return y;
}

MultivariateSignal mix(const ComponentSet& components, const MixingMatrix& a) {
    if (a.component_count() != components.component_count())
        throw InvalidArgument("mixing matrix has " + std::to_string(a.component_count()) +
                              " columns but there are " +
                              std::to_string(components.component_count()) + " components");
    MultivariateSignal out;
    out.data = a.entries * components.data;
    out.n0 = components.n0;
    return out;
}

MultivariateSignal add_noise(const MultivariateSignal& x, const NoiseSpec& spec) {
    if (spec.sigma < 0.0) throw InvalidArgument("noise sigma must be nonnegative");
    MultivariateSignal out = x;
    if (spec.sigma == 0.0) return out;
    Rng rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, spec.sigma / std::sqrt(2.0));
    for (Eigen::Index s = 0; s < out.data.rows(); ++s) {
        for (Eigen::Index n = 0; n < out.data.cols(); ++n) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            out.data(s, n) += cplx(re, im);
        }
    }
    return out;
}

ComponentSet example1_components() {
    constexpr int n_len = kExample1Length;
    ComponentSet c;
    c.n0 = -(n_len - 1) / 2;
    c.data.resize(2, n_len);
    for (int i = 0; i < n_len; ++i) {
        const double n = c.n0 + i;
        const double env = std::exp(-(n / 128.0) * (n / 128.0));
        const double fm = 2.0 * std::sin(5.0 * kPi * n / n_len);
        const double chirp = -2.0 * kPi * n * n / (16.0 * n_len);
        c.data(0, i) = env * std::polar(1.0, fm + chirp);
        c.data(1, i) = env * std::polar(1.0, -fm + chirp);
    }
    return c;
}

std::vector<double> default_example1_phases(int sensors) {
    std::vector<double> phases(static_cast<std::size_t>(std::max(sensors, 0)));
    for (int i = 0; i < sensors; ++i) phases[i] = i * kPi / (sensors + 1);
    return phases;
}

Example1 synth_example1(int sensors, std::span<const double> phases) {
    if (sensors < 1) throw InvalidArgument("example1 needs at least one sensor");
    if (static_cast<int>(phases.size()) != sensors)
        throw InvalidArgument("example1 needs one phase per sensor");
    Example1 ex;
    ex.components = example1_components();
    ex.mixing.entries.resize(sensors, 2);
    for (int i = 0; i < sensors; ++i) {
        ex.mixing.entries(i, 0) = 0.5 * std::polar(1.0, phases[i]);
        ex.mixing.entries(i, 1) = 0.5 * std::polar(1.0, -phases[i]);
    }
    ex.signal = mix(ex.components, ex.mixing);
    return ex;
}

ComponentSet synth_multicomponent(std::span<const ComponentDescriptor> descriptors, int n) {
    if (descriptors.empty()) throw InvalidArgument("no component descriptors");
    if (n < 1) throw InvalidArgument("sample count must be positive");
    ComponentSet c;
    c.n0 = -(n - 1) / 2;
    c.data.resize(static_cast<Eigen::Index>(descriptors.size()), n);
    for (std::size_t p = 0; p < descriptors.size(); ++p) {
        const auto& d = descriptors[p];
        d.validate();
        for (int i = 0; i < n; ++i) {
            const double t = c.n0 + i - d.center;
            const double env = d.amplitude * std::exp(-(t / d.width) * (t / d.width));
            const double phase = 2.0 * kPi * (d.freq * t + 0.5 * d.chirp_rate * t * t) +
                                 d.fm_depth * std::sin(2.0 * kPi * d.fm_rate * t + d.fm_phase);
            c.data(static_cast<Eigen::Index>(p), i) = env * std::polar(1.0, phase);
        }
    }
    c.validate();
    if (numerical_rank(c.data, 1e-10) < c.component_count())
        throw NumericalError("dependent components");
    return c;
}

namespace {

double condition_number(const CMatrix& m) {
    const Eigen::JacobiSVD<CMatrix> svd(m);
    const auto& sv = svd.singularValues();
    const double smallest = sv[sv.size() - 1];
    return smallest > 0.0 ? sv[0] / smallest : std::numeric_limits<double>::infinity();
}

}  // namespace

MixingMatrix random_mixing_matrix(int sensors, int components, Rng& rng,
                                  double amplitude_perturbation) {
    if (sensors < 1 || components < 1) throw InvalidArgument("mixing matrix dimensions must be positive");
    if (amplitude_perturbation < 0.0 || amplitude_perturbation >= 1.0)
        throw InvalidArgument("amplitude perturbation must be in [0, 1)");
    std::uniform_real_distribution<double> alpha(0.5, 1.5);
    std::uniform_real_distribution<double> phi(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> nu(-amplitude_perturbation, amplitude_perturbation);
    MixingMatrix a;
    a.entries.resize(sensors, components);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        for (int m = 0; m < sensors; ++m) {
            for (int p = 0; p < components; ++p) {
                double gain = alpha(rng);
                if (amplitude_perturbation > 0.0) gain *= 1.0 + nu(rng);
                a.entries(m, p) = std::polar(gain, phi(rng));
            }
        }
        if (condition_number(a.entries) <= 1e6) return a;
    }
    throw NumericalError("could not draw a well-conditioned mixing matrix");
}

int numerical_rank(const CMatrix& m, double rel_tol) {
    if (m.size() == 0) return 0;
    const Eigen::JacobiSVD<CMatrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv[0] == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] >= rel_tol * sv[0]) ++r;
    return r;
}

}  // namespace mvd
