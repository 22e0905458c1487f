#include "catch_amalgamated.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "mvd/experiments.hpp"
#include "oracles.hpp"

using namespace mvd;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const std::string kConfigs = MVD_CONFIG_DIR;

SignalConfig nine() { return load_signal_config(kConfigs + "/nine.json"); }

}  // namespace

TEST_CASE("shipped configs load", "[experiments]") {
    const SignalConfig e1 = load_signal_config(kConfigs + "/example1.json");
    CHECK(e1.preset == "example1");
    CHECK(e1.sensing == Sensing::example1);
    CHECK(e1.component_count() == 2);
    CHECK(e1.ground_truth().data == example1_components().data);

    const SignalConfig n9 = nine();
    CHECK(n9.component_count() == 9);
    const ComponentSet c = n9.ground_truth();
    CHECK(c.sample_count() == 257);
    CHECK(c.n0 == -128);
    CHECK(numerical_rank(c.data, 1e-10) == 9);
    for (int p = 0; p < 9; ++p) CHECK_THAT(c.data.row(p).cwiseAbs().maxCoeff(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("config validation", "[experiments]") {
    using nlohmann::json;
    CHECK_THROWS_AS(parse_signal_config(json::parse(R"({"preset":"example2"})")), InvalidArgument);
    CHECK_THROWS_AS(parse_signal_config(json::parse(R"({"n":257})")), InvalidArgument);
    CHECK_THROWS_AS(parse_signal_config(json::parse(R"({"preset":"example1","sensing":"magic"})")),
                    InvalidArgument);
    CHECK_THROWS_AS(parse_signal_config(json::parse(R"({"preset":"example1","extra":1})")), InvalidArgument);
    CHECK_THROWS_AS(
        parse_signal_config(json::parse(R"({"components":[{"width":10}],"sensing":"example1"})")),
        InvalidArgument);
    CHECK_THROWS_AS(parse_signal_config(json::parse(R"({"preset":"example1","n":"x"})")), InvalidArgument);
    const SignalConfig ok =
        parse_signal_config(json::parse(R"({"n":64,"components":[{"width":10,"freq":0.1}]})"));
    CHECK(ok.ground_truth().sample_count() == 64);
    CHECK_THROWS_AS(load_signal_config("/nonexistent/config.json"), InvalidArgument);
}

TEST_CASE("synthesize is deterministic and follows the model", "[experiments]") {
    const SignalConfig cfg = nine();
    const Synthesized a = synthesize(cfg, 12, 0.0, 5);
    const Synthesized b = synthesize(cfg, 12, 0.0, 5);
    CHECK(a.signal.data == b.signal.data);
    CHECK(a.mixing.entries == b.mixing.entries);
    CHECK(synthesize(cfg, 12, 0.0, 6).mixing.entries != a.mixing.entries);
    CHECK((a.signal.data - a.mixing.entries * a.components.data).norm() <= 1e-12 * a.signal.data.norm());

    const Synthesized noisy = synthesize(cfg, 12, 0.5, 5);
    CHECK(noisy.mixing.entries == a.mixing.entries);  // noise has its own stream
    const double var = (noisy.signal.data - a.signal.data).squaredNorm() / (12.0 * 257.0);
    CHECK(std::abs(var - 0.25) < 0.03);

    // example-1 sensing reproduces the direct example-1 synthesis
    const SignalConfig e1 = load_signal_config(kConfigs + "/example1.json");
    const Synthesized s = synthesize(e1, 4, 0.0, 1);
    const Example1 ref = synth_example1(4, default_example1_phases(4));
    CHECK((s.signal.data - ref.signal.data).norm() <= 1e-12);
}

TEST_CASE("gap ratio rule", "[experiments]") {
    RVector ev(4);
    ev << 10.0, 4.0, 1.0, 0.5;
    CHECK(gap_ratio(ev, 2) == 4.0);
    CHECK(gap_ratio(ev, 4) == kGapCap);
    ev << 10.0, 4.0, 1e-13, 0.0;
    CHECK(gap_ratio(ev, 2) == kGapCap);
}

TEST_CASE("best assignment matches an exhaustive permutation search", "[experiments]") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        const int p = 2 + trial % 4;
        ComponentSet truth{oracle::random_matrix(p, 30, rng), 0};
        // found: noisy, shuffled copies
        std::vector<int> perm(p);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        ComponentSet found{CMatrix(p, 30), 0};
        for (int i = 0; i < p; ++i)
            found.data.row(i) = truth.data.row(perm[i]) + 0.3 * oracle::random_matrix(1, 30, rng);

        std::vector<double> scores;
        const std::vector<int> got = best_assignment(truth, found, &scores);
        double got_total = 0.0;
        for (double s : scores) got_total += s;

        std::vector<int> idx(p);
        std::iota(idx.begin(), idx.end(), 0);
        double best = -1.0;
        do {
            double t = 0.0;
            for (int i = 0; i < p; ++i)
                t += matching_score(found.data.row(idx[i]).transpose(), truth.data.row(i).transpose());
            best = std::max(best, t);
        } while (std::next_permutation(idx.begin(), idx.end()));
        CHECK_THAT(got_total, WithinRel(best, 1e-12));
        for (int i = 0; i < p; ++i) CHECK(perm[got[i]] == i);
    }

    // fewer found rows than truth: one truth row stays unmatched
    ComponentSet truth{oracle::random_matrix(3, 20, rng), 0};
    ComponentSet found{truth.data.topRows(2), 0};
    std::vector<double> s;
    const auto a = best_assignment(truth, found, &s);
    CHECK(a[0] == 0);
    CHECK(a[1] == 1);
    CHECK(a[2] == -1);
    CHECK(s[2] == 0.0);
}

TEST_CASE("builtin scenarios", "[experiments]") {
    for (const auto& n : builtin_scenario_names()) {
        const ScenarioSpec s = builtin_scenario(n);
        CHECK_NOTHROW(s.validate());
        CHECK(std::filesystem::exists(s.component_config));
    }
    CHECK(builtin_scenario("example1").sensors == 2);
    CHECK(builtin_scenario("example3").sensors == 128);
    CHECK(builtin_scenario("nine").sensors == 12);
    CHECK_THROWS_AS(builtin_scenario("example9"), InvalidArgument);
    ScenarioSpec bad = builtin_scenario("example1");
    bad.trials = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("example1 scenario end to end with artifacts", "[experiments]") {
    const ScenarioReport r = run_scenario(builtin_scenario("example1"));
    REQUIRE(r.result.components.component_count() == 2);
    for (double s : r.scores) CHECK(s > 0.99);
    CHECK(r.significant_rank == 2);

    const auto dir = std::filesystem::temp_directory_path() / "mvd_test_example1";
    std::filesystem::remove_all(dir);
    write_scenario_artifacts(r, dir);
    for (const char* f : {"signal.csv", "ground_truth.csv", "eigenvalues.csv", "components.csv", "measures.csv",
                          "coeffs.csv", "scores.csv", "summary.json", "signal_ch1_stft.pgm",
                          "component1_wd.pgm", "component2_stft.pgm"})
        CHECK(std::filesystem::exists(dir / f));
    std::ifstream js(dir / "summary.json");
    const auto j = nlohmann::json::parse(js);
    CHECK(j["scenario"] == "example1");
    CHECK(j["scores"].size() == 2);
    CHECK(j.contains("gap_ratio"));
    CHECK(j.contains("runtime_seconds"));
    CHECK(j.contains("timestamp"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("gap study: noiseless cap, determinism, validation", "[experiments][gap]") {
    const SignalConfig cfg = nine();
    const auto z = eigen_gap_study(cfg, {{4, 0.0}, {16, 0.0}}, 1, 3);
    REQUIRE(z.size() == 2);
    for (const auto& g : z) CHECK(g.gap_ratio == kGapCap);

    const auto a = eigen_gap_study(cfg, {{16, 0.5}, {32, 1.0}}, 20, 9);
    const auto b = eigen_gap_study(cfg, {{16, 0.5}, {32, 1.0}}, 20, 9);
    for (int i = 0; i < 2; ++i) {
        CHECK(a[i].mean_eigenvalues == b[i].mean_eigenvalues);
        CHECK(a[i].gap_ratio == b[i].gap_ratio);
        CHECK(a[i].mean_eigenvalues.size() == 257);
        for (Eigen::Index k = 1; k < 257; ++k) CHECK(a[i].mean_eigenvalues[k] <= a[i].mean_eigenvalues[k - 1]);
    }
    CHECK(eigen_gap_study(cfg, {{16, 0.5}}, 20, 10)[0].mean_eigenvalues != a[0].mean_eigenvalues);
    CHECK_THROWS_AS(eigen_gap_study(cfg, {{16, 0.5}}, 0, 1), InvalidArgument);
    CHECK_THROWS_AS(eigen_gap_study(cfg, {{0, 0.5}}, 1, 1), InvalidArgument);
}

TEST_CASE("gap study: noise floor scales with sigma2", "[experiments][gap]") {
    SignalConfig cfg = nine();
    cfg.amplitude_perturbation = 0.25;
    const auto g = eigen_gap_study(cfg, {{32, 0.5}, {32, 1.0}}, 200, 4);
    // eigenvalues P+1..S are the noise floor
    const double f1 = g[0].mean_eigenvalues.segment(9, 32 - 9).mean();
    const double f2 = g[1].mean_eigenvalues.segment(9, 32 - 9).mean();
    CHECK(std::abs(f2 / f1 - 2.0) <= 0.2);
}

TEST_CASE("gap study: ratio grows with S", "[experiments][gap]") {
    SignalConfig cfg = nine();
    cfg.amplitude_perturbation = 0.25;
    std::vector<GapCell> cells;
    for (int s = 16; s <= 160; s += 16) cells.push_back({s, 1.0});
    const auto g = eigen_gap_study(cfg, cells, 100, 5);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i].gap_ratio >= 0.95 * g[i - 1].gap_ratio);
    CHECK(g.back().gap_ratio > g.front().gap_ratio);
}
