#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mvd/rng.hpp"
#include "mvd/types.hpp"

namespace mvd {

// P×N component waveforms on the index grid n0, n0+1, ..., n0+N-1.
struct ComponentSet {
    CMatrix data;
    int n0 = 0;

    int component_count() const { return static_cast<int>(data.rows()); }
    int sample_count() const { return static_cast<int>(data.cols()); }

    // Throws InvalidArgument on an empty set or an all-zero row.
    void validate() const;
};

// S×P sensor gains a_mp = α_mp·e^{jφ_mp}.
struct MixingMatrix {
    CMatrix entries;

    int sensor_count() const { return static_cast<int>(entries.rows()); }
    int component_count() const { return static_cast<int>(entries.cols()); }
};

// S×N sensed channels on the index grid starting at n0.
struct MultivariateSignal {
    CMatrix data;
    int n0 = 0;

    int sensor_count() const { return static_cast<int>(data.rows()); }
    int sample_count() const { return static_cast<int>(data.cols()); }
    CVector channel(int i) const { return data.row(i).transpose(); }
};

struct NoiseSpec {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

// One synthesized component:
//   A·exp(-(t/width)²)·exp(j[2π(freq·t + chirp_rate·t²/2) + fm_depth·sin(2π·fm_rate·t + fm_phase)])
// with t = n - center. freq and chirp_rate are in cycles/sample and
// cycles/sample². family is "lfm" or "sinfm" and only gates which fields
// may be nonzero.
struct ComponentDescriptor {
    std::string family = "lfm";
    double amplitude = 1.0;
    double center = 0.0;
    double width = 32.0;
    double freq = 0.0;
    double chirp_rate = 0.0;
    double fm_depth = 0.0;
    double fm_rate = 0.0;
    double fm_phase = 0.0;

    void validate() const;
};

// x + jH{x} by the one-sided spectrum method.
CVector analytic_signal(const RVector& x);

MultivariateSignal mix(const ComponentSet& components, const MixingMatrix& a);

// Circular complex Gaussian noise, total per-sample variance sigma².
MultivariateSignal add_noise(const MultivariateSignal& x, const NoiseSpec& spec);

inline constexpr int kExample1Length = 257;

struct Example1 {
    MultivariateSignal signal;
    ComponentSet components;
    MixingMatrix mixing;
};

// Two-component sinusoidal-FM test signal on -128..128. Channel i is
// e^{-(n/128)²}·cos(2 sin(5πn/N) + φ_i)·e^{-j2πn²/(16N)}, i.e. the mixture
// (e^{jφ_i}x₁ + e^{-jφ_i}x₂)/2 of the two returned components.
Example1 synth_example1(int sensors, std::span<const double> phases);

// φ_i = iπ/(S+1); pairwise distinct mod π so the mixing keeps rank 2.
std::vector<double> default_example1_phases(int sensors);

// The two ground-truth components of synth_example1.
ComponentSet example1_components();

// Components on the symmetric grid n0 = -(N-1)/2. Throws NumericalError
// "dependent components" when the rows are not linearly independent.
ComponentSet synth_multicomponent(std::span<const ComponentDescriptor> descriptors, int n);

// α ~ U[0.5,1.5], φ ~ U[0,2π), optionally scaled by (1+ν), ν ~ U[-pert,pert].
// Redrawn while the condition number exceeds 1e6.
MixingMatrix random_mixing_matrix(int sensors, int components, Rng& rng,
                                  double amplitude_perturbation = 0.0);

// Singular values ≥ rel_tol·σ₁.
int numerical_rank(const CMatrix& m, double rel_tol);

}  // namespace mvd
