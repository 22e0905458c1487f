#include "mvd/decomposer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mvd/kernels.hpp"
#include "mvd/rng.hpp"

namespace mvd {

void SearchConfig::validate() const {
    if (!(p_norm >= 0.0 && p_norm <= 1.0)) throw InvalidArgument("p-norm must be in [0, 1]");
    if (max_sweeps < 1) throw InvalidArgument("max_sweeps must be positive");
    if (!(tol > 0.0 && tol < 1.0)) throw InvalidArgument("tol must be in (0, 1)");
    if (!(step_init > 0.0)) throw InvalidArgument("step_init must be positive");
    if (!(step_min > 0.0 && step_min < step_init)) throw InvalidArgument("step_min must be in (0, step_init)");
    if (restarts < 0) throw InvalidArgument("restarts must be nonnegative");
}

CVector combine(const CMatrix& eigvecs, const CoefficientVector& beta) {
    if (beta.size() != eigvecs.cols())
        throw InvalidArgument("coefficient count does not match the number of vectors");
    if (beta.size() == 0 || beta.beta.squaredNorm() == 0.0) throw InvalidArgument("zero coefficient vector");
    CVector y = eigvecs * beta.beta;
    const double n = y.norm();
    if (n == 0.0) throw NumericalError("combination is the zero vector");
    return y / n;
}

double objective(const CMatrix& eigvecs, const CoefficientVector& beta, const SearchConfig& search,
                 const TFConfig& tf) {
    const CVector y = combine(eigvecs, beta);
    return concentration_measure(stft(y, tf), search.p_norm);
}

CMatrix deflate(const CMatrix& eigvecs, const CVector& found, Eigen::Index start_index) {
    if (found.size() != eigvecs.rows()) throw InvalidArgument("deflation vector has the wrong length");
    if (std::abs(found.norm() - 1.0) > 1e-8) throw InvalidArgument("deflation vector must have unit norm");
    std::vector<CVector> kept;
    for (Eigen::Index p = 0; p < eigvecs.cols(); ++p) {
        CVector q = eigvecs.col(p);
        if (p >= start_index) {
            const cplx proj = inner(found, q);
            if (std::abs(proj) >= 1.0 - 1e-12) continue;
            q -= proj * found;
            // A second pass keeps |foundᴴq| at rounding level when proj is large.
            q -= inner(found, q) * found;
            q /= q.norm();
        }
        kept.push_back(std::move(q));
    }
    CMatrix out(eigvecs.rows(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = kept[i];
    return out;
}

// ---------------------------------------------------------------------------

ConcentrationObjective::ConcentrationObjective(const CMatrix& basis, const TFConfig& tf,
                                               double p_norm)
    : p_(p_norm) {
    if (basis.cols() == 0) throw InvalidArgument("empty basis");
    tf.validate(basis.rows());
    const RVector window = make_window(tf);
    frames_ = kernels::frame_count(basis.rows(), tf.hop);
    bins_ = tf.window_length;
    transforms_.resize(frames_ * bins_, basis.cols());
    for (Eigen::Index a = 0; a < basis.cols(); ++a) {
        const CMatrix s = kernels::omp::stft_frames(basis.col(a), window, tf.hop);
        transforms_.col(a) = s.reshaped();
    }
    gram_ = basis.adjoint() * basis;
}

ConcentrationObjective ConcentrationObjective::reexpress(const CMatrix& coeffs) const {
    if (coeffs.rows() != dimension()) throw InvalidArgument("coefficient matrix has the wrong height");
    ConcentrationObjective out;
    out.transforms_ = transforms_ * coeffs;
    out.gram_ = coeffs.adjoint() * gram_ * coeffs;
    out.frames_ = frames_;
    out.bins_ = bins_;
    out.p_ = p_;
    return out;
}

double ConcentrationObjective::energy(const CVector& beta) const {
    return std::max((beta.adjoint() * gram_ * beta)(0, 0).real(), 0.0);
}

CVector ConcentrationObjective::transform(const CVector& beta) const { return transforms_ * beta; }

double ConcentrationObjective::lp(const CVector& z, const cplx* dir, cplx step) const {
    if (p_ == 0.0) {
        const Eigen::Index cells = z.size();
        RVector mag(cells);
        for (Eigen::Index i = 0; i < cells; ++i) mag[i] = std::abs(dir ? z[i] + step * dir[i] : z[i]);
        const double peak = mag.maxCoeff();
        if (peak == 0.0) return 0.0;
        return static_cast<double>((mag.array() > kDefaultSupportThreshold * peak).count());
    }
    kernels::LpSumArgs args;
    args.z = z.data();
    args.dir = dir;
    args.step = step;
    args.frames = bins_;   // column-major STFT: one contiguous run per bin
    args.bins = frames_;
    args.p = p_;
    return kernels::omp::lp_sum(args);
}

double ConcentrationObjective::evaluate(const CVector& beta) const {
    const double e = energy(beta);
    if (e <= 0.0) throw NumericalError("combination has zero energy");
    const double raw = lp(transform(beta), nullptr, {});
    return p_ == 0.0 ? raw : raw / std::pow(e, 0.5 * p_);
}

double ConcentrationObjective::evaluate_step(const CVector& z, Eigen::Index a, cplx step,
                                             double energy) const {
    const double raw = lp(z, transforms_.col(a).data(), step);
    return p_ == 0.0 ? raw : raw / std::pow(energy, 0.5 * p_);
}

// ---------------------------------------------------------------------------

namespace {

void canonicalize(CVector& beta) {
    Eigen::Index best = 0;
    beta.cwiseAbs().maxCoeff(&best);
    const double m = std::abs(beta[best]);
    if (m > 0.0) beta *= std::conj(beta[best]) / m;
}

}  // namespace

SearchOutcome coordinate_search(const ConcentrationObjective& obj, CVector beta,
                                const SearchConfig& search, double step_init,
                                const StepFilter& filter) {
    if (beta.size() != obj.dimension()) throw InvalidArgument("start vector has the wrong size");
    double e = obj.energy(beta);
    if (e <= 0.0) throw InvalidArgument("start vector has zero energy");
    beta /= std::sqrt(e);
    CVector z = obj.transform(beta);
    double f = obj.evaluate_step(z, 0, 0.0, 1.0);

    static const cplx kDirs[4] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
    SearchOutcome out;
    double delta = step_init;
    while (out.sweeps < search.max_sweeps && delta >= search.step_min) {
        ++out.sweeps;
        const double f_start = f;
        for (Eigen::Index a = 0; a < beta.size(); ++a) {
            double best_f = f;
            cplx best_step{0.0, 0.0};
            double best_e = 0.0;
            for (const cplx& d : kDirs) {
                const cplx step = delta * d;
                CVector cand = beta;
                cand[a] += step;
                if (filter && !filter(cand)) continue;
                const double ec = obj.energy(cand);
                if (ec <= 1e-24) continue;
                const double fc = obj.evaluate_step(z, a, step, ec);
                if (fc < best_f) {
                    best_f = fc;
                    best_step = step;
                    best_e = ec;
                }
            }
            if (best_f < f) {
                beta[a] += best_step;
                z += best_step * obj.transforms().col(a);
                f = best_f;
                e = best_e;
            }
        }
        // Keep unit energy so δ stays a relative step size.
        const double scale = 1.0 / std::sqrt(e > 0.0 ? e : obj.energy(beta));
        beta *= scale;
        z *= scale;
        e = 1.0;
        out.history.push_back(f);
        if (f_start - f <= search.tol * f_start) delta *= 0.5;
    }
    canonicalize(beta);
    out.measure = obj.evaluate(beta);
    out.beta = std::move(beta);
    return out;
}

SearchOutcome multistart_search(const ConcentrationObjective& obj, const SearchConfig& search) {
    search.validate();
    const Eigen::Index dim = obj.dimension();
    const int starts = static_cast<int>(dim) + search.restarts;
    std::vector<CVector> inits(static_cast<std::size_t>(starts));
    for (int s = 0; s < starts; ++s) {
        if (s < dim) {
            inits[s] = CVector::Unit(dim, s);
        } else {
            Rng rng(derive_seed(search.seed, static_cast<std::uint64_t>(s)));
            std::normal_distribution<double> g(0.0, 1.0);
            CVector v(dim);
            for (Eigen::Index i = 0; i < dim; ++i) {
                const double re = g(rng);
                const double im = g(rng);
                v[i] = cplx(re, im);
            }
            inits[s] = v;
        }
    }

    std::vector<SearchOutcome> results(static_cast<std::size_t>(starts));
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < starts; ++s)
        results[s] = coordinate_search(obj, inits[s], search, search.step_init);

    int best = 0;
    for (int s = 1; s < starts; ++s)
        if (results[s].measure < results[best].measure) best = s;
    return results[best];
}

CoefficientVector minimize_concentration(const CMatrix& eigvecs, const SearchConfig& search,
                                         const TFConfig& tf) {
    if (eigvecs.cols() == 0) throw InvalidArgument("no vectors to combine");
    const ConcentrationObjective obj(eigvecs, tf, search.p_norm);
    return {multistart_search(obj, search).beta};
}

// ---------------------------------------------------------------------------

DecompositionResult decompose(const MultivariateSignal& x, std::optional<int> component_hint,
                              const DecomposeConfig& cfg) {
    if (x.sensor_count() < 1) throw InvalidArgument("signal has no channels");
    cfg.search.validate();
    cfg.tf.validate(x.sample_count());
    if (cfg.max_passes < 0) throw InvalidArgument("max_passes must be nonnegative");

    DecompositionResult result;
    result.eigensystem = hermitian_eig(autocorrelation(x));
    const EigenSystem& es = result.eigensystem;

    int m = 0;
    if (component_hint) {
        if (*component_hint < 1 || *component_hint > es.size())
            throw InvalidArgument("component count out of range");
        if (es.eigenvalues[0] <= 0.0) throw NumericalError("no significant components");
        m = *component_hint;
    } else {
        m = significant_rank(es, cfg.rank_threshold);
    }
    if (m == 0) throw NumericalError("no significant components");

    const CMatrix q = es.leading(m);
    const ConcentrationObjective base(q, cfg.tf, cfg.search.p_norm);

    // Detection: search the span of the not-yet-detected vectors, replace the
    // vector that carries most of the result, deflate the others.
    std::vector<CVector> found;
    std::vector<double> measures;
    CMatrix active = CMatrix::Identity(m, m);
    for (int i = 0; active.cols() > 0; ++i) {
        SearchConfig sc = cfg.search;
        sc.seed = derive_seed(cfg.search.seed, static_cast<std::uint64_t>(i));
        const SearchOutcome out = multistart_search(base.reexpress(active), sc);
        CVector c = active * out.beta;
        c /= c.norm();

        Eigen::Index replaced = 0;
        (active.adjoint() * c).cwiseAbs().maxCoeff(&replaced);
        CMatrix rest(m, active.cols() - 1);
        for (Eigen::Index j = 0, k = 0; j < active.cols(); ++j)
            if (j != replaced) rest.col(k++) = active.col(j);
        active = deflate(rest, c, 0);

        found.push_back(c);
        measures.push_back(base.evaluate(c));
    }

    // Refinement over the full span. Each vector may only move while it stays
    // closer to its detected anchor than to any other current vector.
    const std::vector<CVector> anchors = found;
    std::vector<std::size_t> order(found.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const double refine_step = 0.1 * cfg.search.step_init;
    result.iterations_used = 0;
    for (int pass = 0; pass < cfg.max_passes; ++pass) {
        ++result.iterations_used;
        bool changed = false;
        for (std::size_t i : order) {
            const StepFilter guard = [&, i](const CVector& cand) {
                const double own = std::abs(inner(anchors[i], cand));
                for (std::size_t j = 0; j < found.size(); ++j)
                    if (j != i && std::abs(inner(found[j], cand)) >= own) return false;
                return true;
            };
            const SearchOutcome out = coordinate_search(base, found[i], cfg.search, refine_step, guard);
            if (measures[i] - out.measure > cfg.search.tol * measures[i]) {
                found[i] = out.beta / out.beta.norm();
                measures[i] = out.measure;
                changed = true;
            }
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return measures[a] < measures[b]; });
        if (!changed) break;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return measures[a] < measures[b]; });

    const auto p = static_cast<Eigen::Index>(found.size());
    result.components.n0 = x.n0;
    result.components.data.resize(p, x.sample_count());
    for (Eigen::Index r = 0; r < p; ++r) {
        CVector c = found[order[r]];
        canonicalize(c);
        result.components.data.row(r) = (q * c).transpose();
        result.measures.push_back(measures[order[r]]);
        result.coefficients.push_back({c});
    }
    return result;
}

}  // namespace mvd
