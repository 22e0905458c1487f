#include "mvd/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>

#include <omp.h>

#include "mvd/eigensystem.hpp"
#include "mvd/io.hpp"
#include "mvd/tf.hpp"

namespace mvd {

namespace {

MixingMatrix example1_mixing(int sensors) {
    const std::vector<double> phases = default_example1_phases(sensors);
    MixingMatrix a;
    a.entries.resize(sensors, 2);
    for (int i = 0; i < sensors; ++i) {
        a.entries(i, 0) = 0.5 * std::polar(1.0, phases[i]);
        a.entries(i, 1) = 0.5 * std::polar(1.0, -phases[i]);
    }
    return a;
}

std::string config_path(const std::string& file) { return std::string(MVD_CONFIG_DIR) + "/" + file; }

}  // namespace

ComponentSet SignalConfig::ground_truth() const {
    if (preset == "example1") {
        if (n != kExample1Length) throw InvalidArgument("the example1 preset has 257 samples");
        return example1_components();
    }
    return synth_multicomponent(components, n);
}

int SignalConfig::component_count() const {
    return preset == "example1" ? 2 : static_cast<int>(components.size());
}

SignalConfig parse_signal_config(const nlohmann::json& j) {
    static const std::vector<std::string> known = {"n", "preset", "components", "sensing",
                                                   "amplitude_perturbation", "note"};
    if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw InvalidArgument("unknown config field '" + key + "'");

    SignalConfig cfg;
    try {
        cfg.n = j.value("n", cfg.n);
        cfg.preset = j.value("preset", std::string{});
        const std::string sensing = j.value("sensing", std::string("random"));
        if (sensing == "random")
            cfg.sensing = Sensing::random;
        else if (sensing == "example1")
            cfg.sensing = Sensing::example1;
        else
            throw InvalidArgument("unknown sensing '" + sensing + "'");
        cfg.amplitude_perturbation = j.value("amplitude_perturbation", 0.0);
        if (j.contains("components")) {
            if (!j.at("components").is_array()) throw InvalidArgument("components must be an array");
            for (const auto& d : j.at("components")) cfg.components.push_back(io::descriptor_from_json(d));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad config: ") + e.what());
    }

    if (!cfg.preset.empty() && cfg.preset != "example1")
        throw InvalidArgument("unknown preset '" + cfg.preset + "'");
    if (cfg.preset.empty() == cfg.components.empty())
        throw InvalidArgument("config needs exactly one of 'preset' or 'components'");
    if (cfg.n < 2) throw InvalidArgument("n must be at least 2");
    if (cfg.sensing == Sensing::example1 && cfg.component_count() != 2)
        throw InvalidArgument("example1 sensing mixes exactly two components");
    if (cfg.amplitude_perturbation < 0.0 || cfg.amplitude_perturbation >= 1.0)
        throw InvalidArgument("amplitude_perturbation must be in [0, 1)");
    return cfg;
}

SignalConfig load_signal_config(const std::filesystem::path& path) {
    std::ifstream is = io::open_input(path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument(path.string() + ": " + e.what());
    }
    return parse_signal_config(j);
}

Synthesized synthesize(const SignalConfig& cfg, int sensors, double sigma, std::uint64_t seed) {
    if (sensors < 1) throw InvalidArgument("need at least one sensor");
    Synthesized out;
    out.components = cfg.ground_truth();
    if (cfg.sensing == Sensing::example1) {
        out.mixing = example1_mixing(sensors);
    } else {
        Rng rng(derive_seed(seed, 0));
        out.mixing = random_mixing_matrix(sensors, out.components.component_count(), rng,
                                          cfg.amplitude_perturbation);
    }
    out.signal = add_noise(mix(out.components, out.mixing), {sigma, derive_seed(seed, 1)});
    return out;
}

// ---------------------------------------------------------------------------

void ScenarioSpec::validate() const {
    if (sensors < 1) throw InvalidArgument("scenario needs S >= 1");
    if (trials < 1) throw InvalidArgument("scenario needs trials >= 1");
    if (sigma < 0.0) throw InvalidArgument("noise sigma must be nonnegative");
    if (components && *components < 1) throw InvalidArgument("component count must be positive");
}

std::vector<std::string> builtin_scenario_names() {
    return {"example1", "example2", "example3", "example4", "example5", "nine"};
}

ScenarioSpec builtin_scenario(const std::string& name) {
    ScenarioSpec s;
    s.name = name;
    if (name == "example1") {
        s.sensors = 2;
        s.sigma = 0.01;
        s.component_config = config_path("example1.json");
    } else if (name == "example2") {
        s.sensors = 16;
        s.sigma = 0.1;
        s.component_config = config_path("example1-random.json");
    } else if (name == "example3") {
        s.sensors = 128;
        s.sigma = 1.0;
        s.component_config = config_path("example1-random.json");
        // noise eigenvalues sit above 0.01·λ₁ here; the count is read off the spectrum
        s.components = 2;
    } else if (name == "example4" || name == "nine") {
        s.sensors = 12;
        s.sigma = 0.01;
        s.component_config = config_path("nine.json");
    } else if (name == "example5") {
        s.sensors = 128;
        s.sigma = 1.0;
        s.component_config = config_path("nine.json");
        s.amplitude_perturbation = 0.25;
        s.components = 9;
        s.trials = 200;
    } else {
        throw InvalidArgument("unknown scenario '" + name + "'");
    }
    return s;
}

std::vector<int> best_assignment(const ComponentSet& truth, const ComponentSet& found,
                                 std::vector<double>* scores) {
    const int p = truth.component_count();
    const int f = found.component_count();
    RMatrix score(p, f);
    for (int i = 0; i < p; ++i)
        for (int k = 0; k < f; ++k)
            score(i, k) = matching_score(found.data.row(k).transpose(), truth.data.row(i).transpose());

    // Depth-first over injective maps; P is small (≤ 9 in the shipped scenarios).
    std::vector<int> best(static_cast<std::size_t>(p), -1);
    std::vector<int> cur(static_cast<std::size_t>(p), -1);
    std::vector<char> used(static_cast<std::size_t>(f), 0);
    double best_total = -1.0;
    const int slots = std::min(p, f);
    auto dfs = [&](auto&& self, int i, int assigned, double total) -> void {
        if (i == p) {
            if (assigned == slots && total > best_total) {
                best_total = total;
                best = cur;
            }
            return;
        }
        if (p - i > slots - assigned) {  // this row may stay unmatched
            cur[i] = -1;
            self(self, i + 1, assigned, total);
        }
        for (int k = 0; k < f; ++k) {
            if (used[k]) continue;
            used[k] = 1;
            cur[i] = k;
            self(self, i + 1, assigned + 1, total + score(i, k));
            used[k] = 0;
            cur[i] = -1;
        }
    };
    dfs(dfs, 0, 0, 0.0);

    if (scores) {
        scores->assign(static_cast<std::size_t>(p), 0.0);
        for (int i = 0; i < p; ++i)
            if (best[i] >= 0) (*scores)[i] = score(i, best[i]);
    }
    return best;
}

double gap_ratio(const RVector& eigenvalues, int p) {
    if (p < 1 || p >= eigenvalues.size()) return kGapCap;
    const double floor = eigenvalues[p];
    if (floor <= 1e-12 * eigenvalues[0]) return kGapCap;
    return std::min(kGapCap, eigenvalues[p - 1] / floor);
}

ScenarioReport run_scenario(const ScenarioSpec& spec, const DecomposeConfig& cfg) {
    spec.validate();
    const auto t0 = std::chrono::steady_clock::now();

    SignalConfig sc = load_signal_config(spec.component_config);
    if (spec.amplitude_perturbation) sc.amplitude_perturbation = *spec.amplitude_perturbation;

    ScenarioReport rep;
    rep.spec = spec;
    rep.input = synthesize(sc, spec.sensors, spec.sigma, spec.seed);
    DecomposeConfig dc = cfg;
    dc.search.seed = derive_seed(spec.seed, 2);
    rep.result = decompose(rep.input.signal, spec.components, dc);
    rep.assignment = best_assignment(rep.input.components, rep.result.components, &rep.scores);
    rep.significant_rank = significant_rank(rep.result.eigensystem, 0.01);
    rep.gap_ratio = gap_ratio(rep.result.eigensystem.eigenvalues, rep.input.components.component_count());

    rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

void write_scenario_artifacts(const ScenarioReport& rep, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        auto os = io::open_output(dir / "signal.csv");
        io::write_signal_csv(os, rep.input.signal);
    }
    {
        auto os = io::open_output(dir / "ground_truth.csv");
        io::write_components_csv(os, rep.input.components);
    }
    {
        auto os = io::open_output(dir / "eigenvalues.csv");
        io::write_eigenvalues_csv(os, rep.result.eigensystem.eigenvalues);
    }
    {
        auto os = io::open_output(dir / "components.csv");
        io::write_components_csv(os, rep.result.components);
    }
    {
        auto os = io::open_output(dir / "measures.csv");
        io::write_measures_csv(os, rep.result.measures);
    }
    {
        auto os = io::open_output(dir / "coeffs.csv");
        io::write_coeffs_csv(os, rep.result.coefficients);
    }
    {
        auto os = io::open_output(dir / "scores.csv");
        os << "truth,found,score\n";
        for (std::size_t i = 0; i < rep.scores.size(); ++i)
            os << (i + 1) << ',' << (rep.assignment[i] + 1) << ',' << io::format_double(rep.scores[i]) << '\n';
    }

    const TFConfig tf;
    {
        auto os = io::open_output(dir / "signal_ch1_stft.pgm");
        io::write_pgm(os, stft(rep.input.signal.channel(0), tf));
    }
    for (int k = 0; k < rep.result.components.component_count(); ++k) {
        const CVector c = rep.result.components.data.row(k).transpose();
        const std::string stem = "component" + std::to_string(k + 1);
        auto a = io::open_output(dir / (stem + "_stft.pgm"));
        io::write_pgm(a, stft(c, tf));
        auto b = io::open_output(dir / (stem + "_wd.pgm"));
        io::write_pgm(b, pseudo_wd(c, tf));
    }

    nlohmann::json j;
    j["scenario"] = rep.spec.name;
    j["sensors"] = rep.spec.sensors;
    j["sigma"] = rep.spec.sigma;
    j["seed"] = rep.spec.seed;
    j["components_found"] = rep.result.components.component_count();
    j["significant_rank"] = rep.significant_rank;
    j["scores"] = rep.scores;
    j["measures"] = rep.result.measures;
    j["gap_ratio"] = rep.gap_ratio;
    j["refinement_passes"] = rep.result.iterations_used;
    j["runtime_seconds"] = rep.runtime_seconds;
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["timestamp"] = stamp;
    auto os = io::open_output(dir / "summary.json");
    os << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

std::vector<GapStatistics> eigen_gap_study(const SignalConfig& cfg, const std::vector<GapCell>& cells,
                                           int trials, std::uint64_t seed) {
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    const ComponentSet truth = cfg.ground_truth();
    const int p = truth.component_count();
    std::vector<GapStatistics> out;
    out.reserve(cells.size());

    for (std::size_t c = 0; c < cells.size(); ++c) {
        const GapCell cell = cells[c];
        if (cell.sensors < 1) throw InvalidArgument("gap study needs S >= 1");
        if (cell.sigma2 < 0.0) throw InvalidArgument("sigma2 must be nonnegative");
        const std::uint64_t cell_seed = derive_seed(seed, c);
        const double sigma = std::sqrt(cell.sigma2);

        std::vector<RVector> spectra(static_cast<std::size_t>(trials));
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < trials; ++t) {
            try {
                Rng rng(derive_seed(cell_seed, static_cast<std::uint64_t>(t)));
                const MixingMatrix a = random_mixing_matrix(cell.sensors, p, rng, cfg.amplitude_perturbation);
                const std::uint64_t noise_seed = rng();
                spectra[t] = autocorrelation_spectrum(add_noise(mix(truth, a), {sigma, noise_seed}));
            } catch (...) {
#pragma omp critical(mvd_gap_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);

        GapStatistics g;
        g.cell = cell;
        g.trials = trials;
        g.mean_eigenvalues = RVector::Zero(truth.sample_count());
        for (const RVector& s : spectra) g.mean_eigenvalues += s;
        g.mean_eigenvalues /= static_cast<double>(trials);
        g.gap_ratio = gap_ratio(g.mean_eigenvalues, p);
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace mvd
