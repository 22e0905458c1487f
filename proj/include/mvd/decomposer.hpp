#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mvd/eigensystem.hpp"
#include "mvd/signal.hpp"
#include "mvd/tf.hpp"

namespace mvd {

// Weights β of a linear combination of basis vectors.
struct CoefficientVector {
    CVector beta;

    Eigen::Index size() const { return beta.size(); }
};

struct SearchConfig {
    double p_norm = 1.0;
    int max_sweeps = 200;
    double tol = 1e-6;
    double step_init = 0.5;
    double step_min = 1e-4;
    int restarts = 8;
    std::uint64_t seed = 1;

    void validate() const;
};

struct DecomposeConfig {
    SearchConfig search;
    TFConfig tf;
    double rank_threshold = 0.01;
    int max_passes = 10;
};

struct DecompositionResult {
    ComponentSet components;             // unit-energy rows, ascending measure
    std::vector<double> measures;        // ascending
    std::vector<CoefficientVector> coefficients;  // w.r.t. the leading eigenvectors
    EigenSystem eigensystem;
    int iterations_used = 0;             // refinement passes run after detection
};

// y = Σ β_p q_p scaled to unit energy. Throws on a zero result.
CVector combine(const CMatrix& eigvecs, const CoefficientVector& beta);

// Concentration measure of stft(combine(eigvecs, beta)).
double objective(const CMatrix& eigvecs, const CoefficientVector& beta,
                 const SearchConfig& search, const TFConfig& tf);

// Coordinate descent over complex β with step halving, started from the
// canonical basis vectors and `restarts` random unit vectors; the lowest
// measure wins (ties broken by start index).
CoefficientVector minimize_concentration(const CMatrix& eigvecs, const SearchConfig& search,
                                         const TFConfig& tf);

// Removes `found` from columns start_index.. of eigvecs and renormalizes
// them. Columns already parallel to `found` (|foundᴴq| ≥ 1-1e-12) are
// dropped, so the result can have fewer columns.
CMatrix deflate(const CMatrix& eigvecs, const CVector& found, Eigen::Index start_index);

// Full pipeline: autocorrelation, eigendecomposition, detection with
// deflation, then refinement passes until no measure moves by more than tol.
DecompositionResult decompose(const MultivariateSignal& x, std::optional<int> component_hint,
                              const DecomposeConfig& cfg = {});

// Precomputed STFTs of a basis, so trial combinations cost one pass over
// the time-frequency cells instead of a fresh transform.
class ConcentrationObjective {
public:
    ConcentrationObjective(const CMatrix& basis, const TFConfig& tf, double p_norm);

    // Same basis expressed as combinations (columns of `coeffs`) of this one.
    ConcentrationObjective reexpress(const CMatrix& coeffs) const;

    Eigen::Index dimension() const { return gram_.rows(); }
    Eigen::Index cell_count() const { return transforms_.rows(); }
    double p_norm() const { return p_; }

    // Measure of the unit-energy combination Σ β_a basis_a.
    double evaluate(const CVector& beta) const;
    double energy(const CVector& beta) const;
    CVector transform(const CVector& beta) const;
    // Measure of (z + step·transform_a) / sqrt(energy), for line moves.
    double evaluate_step(const CVector& z, Eigen::Index a, cplx step, double energy) const;
    const CMatrix& gram() const { return gram_; }
    const CMatrix& transforms() const { return transforms_; }

private:
    ConcentrationObjective() = default;
    double lp(const CVector& z, const cplx* dir, cplx step) const;

    CMatrix transforms_;  // cells × dimension; column a is vec(STFT(basis_a))
    CMatrix gram_;
    Eigen::Index frames_ = 0;
    Eigen::Index bins_ = 0;
    double p_ = 1.0;
};

// Admissibility test for a candidate during the search; null accepts all.
using StepFilter = std::function<bool(const CVector&)>;

struct SearchOutcome {
    CVector beta;
    double measure = 0.0;
    int sweeps = 0;
    std::vector<double> history;  // measure after each sweep
};

// One coordinate-descent run from `start`.
SearchOutcome coordinate_search(const ConcentrationObjective& obj, CVector start,
                                const SearchConfig& search, double step_init,
                                const StepFilter& filter = {});

// Multi-start search over obj's basis.
SearchOutcome multistart_search(const ConcentrationObjective& obj, const SearchConfig& search);

}  // namespace mvd
