#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvd/decomposer.hpp"
#include "mvd/signal.hpp"

namespace mvd {

enum class Sensing {
    example1,  // a_i1 = e^{jφ_i}/2, a_i2 = e^{-jφ_i}/2 with default phases; two components only
    random,    // random_mixing_matrix
};

// Contents of a component config file (see docs/formats.md).
struct SignalConfig {
    int n = kExample1Length;
    std::string preset;  // "example1" or empty
    std::vector<ComponentDescriptor> components;
    Sensing sensing = Sensing::random;
    double amplitude_perturbation = 0.0;

    ComponentSet ground_truth() const;
    int component_count() const;
};

SignalConfig parse_signal_config(const nlohmann::json& j);
SignalConfig load_signal_config(const std::filesystem::path& path);

struct Synthesized {
    MultivariateSignal signal;
    ComponentSet components;
    MixingMatrix mixing;
};

// Mixing draws from derive_seed(seed, 0), noise from derive_seed(seed, 1).
Synthesized synthesize(const SignalConfig& cfg, int sensors, double sigma, std::uint64_t seed);

struct ScenarioSpec {
    std::string name;
    int sensors = 2;
    double sigma = 0.0;
    std::string component_config;  // path to a SignalConfig JSON
    int trials = 1;                // realizations used by the gap study
    std::uint64_t seed = 1;
    std::optional<double> amplitude_perturbation;  // overrides the file's value
    std::optional<int> components;                 // decomposition count; rank rule if empty

    void validate() const;
};

// example1 .. example5, plus "nine" as another name for example4.
std::vector<std::string> builtin_scenario_names();
ScenarioSpec builtin_scenario(const std::string& name);

struct ScenarioReport {
    ScenarioSpec spec;
    Synthesized input;
    DecompositionResult result;
    // scores[p]: matching score of ground-truth component p against the found
    // component assigned to it (assignment[p], -1 if none). The assignment
    // maximizes the total score.
    std::vector<double> scores;
    std::vector<int> assignment;
    int significant_rank = 0;  // at the default 0.01 threshold
    double gap_ratio = 0.0;    // λ_P/λ_{P+1} of this realization, capped
    double runtime_seconds = 0.0;
};

ScenarioReport run_scenario(const ScenarioSpec& spec, const DecomposeConfig& cfg = {});

// Best one-to-one assignment of found rows to truth rows by matching score.
std::vector<int> best_assignment(const ComponentSet& truth, const ComponentSet& found,
                                 std::vector<double>* scores = nullptr);

// signal.csv, ground_truth.csv, eigenvalues.csv, components.csv,
// measures.csv, coeffs.csv, scores.csv, stft/wd PGMs and summary.json.
void write_scenario_artifacts(const ScenarioReport& report, const std::filesystem::path& dir);

inline constexpr double kGapCap = 1e12;

// λ_P/λ_{P+1}; kGapCap when λ_{P+1} ≤ 1e-12·λ₁ or is out of range.
double gap_ratio(const RVector& eigenvalues, int p);

struct GapCell {
    int sensors = 1;
    double sigma2 = 0.0;
};

struct GapStatistics {
    GapCell cell;
    int trials = 0;
    RVector mean_eigenvalues;  // length N, descending
    double gap_ratio = 0.0;
};

// Each cell c and trial t draws from derive_seed(derive_seed(seed, c), t):
// fresh mixing matrix (with cfg's amplitude perturbation), phases and noise.
std::vector<GapStatistics> eigen_gap_study(const SignalConfig& cfg, const std::vector<GapCell>& cells,
                                           int trials, std::uint64_t seed);

}  // namespace mvd
