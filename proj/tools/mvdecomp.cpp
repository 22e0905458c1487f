// mvdecomp: synthesis, decomposition, TF analysis and experiment driver.
//
// exit codes: 0 ok, 1 usage / input error, 2 numerical failure

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mvd/decomposer.hpp"
#include "mvd/eigensystem.hpp"
#include "mvd/experiments.hpp"
#include "mvd/io.hpp"
#include "mvd/tf.hpp"

namespace fs = std::filesystem;
using namespace mvd;

namespace {

MultivariateSignal load_signal(const std::string& path) {
    auto is = io::open_input(path);
    try {
        return io::read_signal_csv(is);
    } catch (const io::ParseError& e) {
        throw io::ParseError(path + ": " + e.what(), e.line());
    }
}

// "a:step:b" inclusive, or a single integer.
std::vector<int> parse_range(const std::string& s) {
    std::vector<int> parts;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ':')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size()) throw InvalidArgument("bad sensor range '" + s + "'");
        parts.push_back(v);
    }
    if (parts.size() == 1) return parts;
    if (parts.size() != 3 || parts[1] < 1 || parts[0] > parts[2] || parts[0] < 1)
        throw InvalidArgument("sensor range must be a:step:b with 1 <= a <= b, step >= 1");
    std::vector<int> out;
    for (int v = parts[0]; v <= parts[2]; v += parts[1]) out.push_back(v);
    return out;
}

struct SynthArgs {
    std::string config, out, truth;
    int sensors = 0;
    double sigma = 0.0;
    std::uint64_t seed = 1;
};

void run_synth(const SynthArgs& a) {
    const SignalConfig cfg = load_signal_config(a.config);
    const Synthesized s = synthesize(cfg, a.sensors, a.sigma, a.seed);
    auto os = io::open_output(a.out);
    io::write_signal_csv(os, s.signal);
    if (!a.truth.empty()) {
        auto ts = io::open_output(a.truth);
        io::write_components_csv(ts, s.components);
    }
}

struct DecomposeArgs {
    std::string in, out;
    std::optional<int> components;
    double p_norm = 1.0;
    int window = 64;
    int restarts = 8;
    std::uint64_t seed = 1;
};

void run_decompose(const DecomposeArgs& a) {
    const MultivariateSignal x = load_signal(a.in);
    DecomposeConfig cfg;
    cfg.search.p_norm = a.p_norm;
    cfg.search.restarts = a.restarts;
    cfg.search.seed = a.seed;
    cfg.tf.window_length = a.window;
    const DecompositionResult r = decompose(x, a.components, cfg);

    const fs::path dir(a.out);
    fs::create_directories(dir);
    auto c = io::open_output(dir / "components.csv");
    io::write_components_csv(c, r.components);
    auto m = io::open_output(dir / "measures.csv");
    io::write_measures_csv(m, r.measures);
    auto b = io::open_output(dir / "coeffs.csv");
    io::write_coeffs_csv(b, r.coefficients);
    auto e = io::open_output(dir / "eigenvalues.csv");
    io::write_eigenvalues_csv(e, r.eigensystem.eigenvalues);
}

struct TfrArgs {
    std::string in, out, pgm, kind = "stft", window = "hann";
    int channel = 1;
    int window_length = 64;
};

void run_tfr(const TfrArgs& a) {
    const MultivariateSignal x = load_signal(a.in);
    if (a.channel < 1 || a.channel > x.sensor_count())
        throw InvalidArgument("channel must be in 1.." + std::to_string(x.sensor_count()));
    TFConfig cfg;
    cfg.window_length = a.window_length;
    cfg.window = parse_window_kind(a.window);
    const CVector ch = x.channel(a.channel - 1);
    TFRepresentation t;
    if (a.kind == "stft")
        t = stft(ch, cfg);
    else if (a.kind == "spec")
        t = spectrogram(ch, cfg);
    else
        t = pseudo_wd(ch, cfg);
    auto os = io::open_output(a.out);
    io::write_tfr_csv(os, t);
    if (!a.pgm.empty()) {
        auto ps = io::open_output(a.pgm);
        io::write_pgm(ps, t);
    }
}

void run_eig(const std::string& in, const std::string& out) {
    const MultivariateSignal x = load_signal(in);
    const EigenSystem es = hermitian_eig(autocorrelation(x));
    auto os = io::open_output(out);
    io::write_eigenvalues_csv(os, es.eigenvalues);
}

struct ScenarioArgs {
    std::string name, out;
    std::optional<std::uint64_t> seed;
};

void run_scenario_cmd(const ScenarioArgs& a) {
    ScenarioSpec spec = builtin_scenario(a.name);
    if (a.seed) spec.seed = *a.seed;
    const ScenarioReport rep = run_scenario(spec);
    write_scenario_artifacts(rep, a.out);
    std::printf("%s: %d components, gap %.4g, %.2f s\n", spec.name.c_str(),
                rep.result.components.component_count(), rep.gap_ratio, rep.runtime_seconds);
    for (std::size_t i = 0; i < rep.scores.size(); ++i)
        std::printf("  truth %zu  score %.6f\n", i + 1, rep.scores[i]);
}

struct GapArgs {
    std::vector<double> sigma2{1.0};
    std::string sensors = "8:8:160", config, out;
    int trials = 200;
    bool full = false;
    std::uint64_t seed = 1;
    double perturbation = 0.25;
};

void run_gapstudy(const GapArgs& a) {
    SignalConfig cfg = load_signal_config(a.config);
    cfg.amplitude_perturbation = a.perturbation;
    std::vector<GapCell> cells;
    for (double s2 : a.sigma2)
        for (int s : parse_range(a.sensors)) cells.push_back({s, s2});
    const int trials = a.full ? 1000 : a.trials;
    const auto stats = eigen_gap_study(cfg, cells, trials, a.seed);
    const int p = cfg.component_count();

    auto os = io::open_output(a.out);
    os << "sensors,sigma2,trials,lambda_P,lambda_P1,gap_ratio\n";
    for (const auto& g : stats) {
        const auto& ev = g.mean_eigenvalues;
        const double lp = p <= ev.size() ? ev[p - 1] : 0.0;
        const double lp1 = p < ev.size() ? ev[p] : 0.0;
        os << g.cell.sensors << ',' << io::format_double(g.cell.sigma2) << ',' << g.trials << ','
           << io::format_double(lp) << ',' << io::format_double(lp1) << ',' << io::format_double(g.gap_ratio)
           << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multichannel signal decomposition by eigenvector concentration search"};
    app.require_subcommand(1);

    SynthArgs sa;
    auto* synth = app.add_subcommand("synth", "Synthesize a sensed signal from a component config");
    synth->add_option("--config", sa.config, "Component config JSON (docs/formats.md)")->required()
        ->check(CLI::ExistingFile);
    synth->add_option("--sensors", sa.sensors, "Number of sensors S")->required()->check(CLI::PositiveNumber);
    synth->add_option("--sigma", sa.sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", sa.seed, "Master seed");
    synth->add_option("-o,--output", sa.out, "Signal CSV to write")->required();
    synth->add_option("--truth", sa.truth, "Also write the ground-truth components CSV here");

    DecomposeArgs da;
    auto* dec = app.add_subcommand("decompose", "Decompose a signal CSV into components");
    dec->add_option("-i,--input", da.in, "Signal CSV")->required();
    dec->add_option("--components", da.components, "Number of components (default: eigenvalues >= 0.01*max)")
        ->check(CLI::PositiveNumber);
    dec->add_option("--p-norm", da.p_norm, "Concentration measure exponent p in [0,1]")->capture_default_str();
    dec->add_option("--window", da.window, "STFT window length (even)")->capture_default_str();
    dec->add_option("--restarts", da.restarts, "Random restarts per detection")->capture_default_str();
    dec->add_option("--seed", da.seed, "Search seed")->capture_default_str();
    dec->add_option("-o,--output", da.out, "Output directory")->required();

    TfrArgs ta;
    auto* tfr = app.add_subcommand("tfr", "Time-frequency representation of one channel");
    tfr->add_option("-i,--input", ta.in, "Signal CSV")->required();
    tfr->add_option("--kind", ta.kind, "stft | spec | wd")
        ->check(CLI::IsMember({"stft", "spec", "wd"}))->capture_default_str();
    tfr->add_option("--channel", ta.channel, "Channel, 1-based")->capture_default_str();
    tfr->add_option("--window", ta.window_length, "Window length (even)")->capture_default_str();
    tfr->add_option("--window-kind", ta.window, "hann | rectangular")
        ->check(CLI::IsMember({"hann", "rectangular"}))->capture_default_str();
    tfr->add_option("-o,--output", ta.out, "TFR CSV to write")->required();
    tfr->add_option("--pgm", ta.pgm, "Also write an 8-bit PGM image");

    std::string eig_in, eig_out;
    auto* eig = app.add_subcommand("eig", "Eigenvalues of the autocorrelation matrix");
    eig->add_option("-i,--input", eig_in, "Signal CSV")->required();
    eig->add_option("-o,--output", eig_out, "Eigenvalue CSV to write")->required();

    ScenarioArgs sca;
    auto* scen = app.add_subcommand("scenario", "Run a built-in scenario and write its artifacts");
    scen->add_option("--name", sca.name, "example1..example5 or nine")
        ->required()->check(CLI::IsMember(builtin_scenario_names()));
    scen->add_option("--seed", sca.seed, "Override the scenario seed");
    scen->add_option("-o,--output", sca.out, "Output directory")->required();

    GapArgs ga;
    ga.config = std::string(MVD_CONFIG_DIR) + "/nine.json";
    auto* gap = app.add_subcommand("gapstudy", "Monte Carlo eigenvalue gap study");
    gap->add_option("--sigma2", ga.sigma2, "Noise variance(s)")->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    gap->add_option("--sensors", ga.sensors, "Sensor counts as a:step:b")->capture_default_str();
    gap->add_option("--trials", ga.trials, "Realizations per cell")->capture_default_str()
        ->check(CLI::PositiveNumber);
    gap->add_flag("--full", ga.full, "Use 1000 trials");
    gap->add_option("--config", ga.config, "Component config JSON")->capture_default_str()
        ->check(CLI::ExistingFile);
    gap->add_option("--perturbation", ga.perturbation, "Mixing amplitude perturbation: gains scaled by 1+U[-v,v]")
        ->capture_default_str();
    gap->add_option("--seed", ga.seed, "Master seed")->capture_default_str();
    gap->add_option("-o,--output", ga.out, "Gap CSV to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*synth) run_synth(sa);
        else if (*dec) run_decompose(da);
        else if (*tfr) run_tfr(ta);
        else if (*eig) run_eig(eig_in, eig_out);
        else if (*scen) run_scenario_cmd(sca);
        else if (*gap) run_gapstudy(ga);
    } catch (const NumericalError& e) {
        std::cerr << "mvdecomp: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "mvdecomp: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
