// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cli_util.hpp"
#include "mvd/decomposer.hpp"
#include "mvd/eigensystem.hpp"
#include "mvd/experiments.hpp"
#include "oracles.hpp"

using namespace mvd;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
    std::printf("%s  criterion %d  %s  %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string join_scores(const std::vector<double>& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? " " : "") + fmt("%.4f", s[i]);
    return out + "]";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::array<double, 2> phases{0.0, kPi / 3.0};
    const Example1 ex = synth_example1(2, phases);
    const MultivariateSignal x = add_noise(ex.signal, {0.01, 2024});
    const DecompositionResult r = decompose(x, std::nullopt);
    std::vector<double> scores;
    best_assignment(ex.components, r.components, &scores);
    const double t = seconds_since(t0);
    bool ok = r.components.component_count() == 2 && t < 60.0;
    for (double s : scores) ok = ok && s > 0.99;
    report(1, "example-1 S=2 sigma=0.01", ok,
           "found=" + std::to_string(r.components.component_count()) + " scores=" + join_scores(scores) +
               " runtime=" + fmt("%.2fs", t));
}

void criterion2() {
    std::string detail;
    bool ok = true;
    for (const char* name : {"example2", "example3"}) {
        const ScenarioReport r = run_scenario(builtin_scenario(name));
        bool this_ok = r.result.components.component_count() == 2;
        for (double s : r.scores) this_ok = this_ok && s > 0.95;
        ok = ok && this_ok;
        detail += std::string(name) + "(S=" + std::to_string(r.spec.sensors) + ",sigma=" +
                  fmt("%g", r.spec.sigma) + ") scores=" + join_scores(r.scores) + "  ";
    }
    // Not required: the minimum sensor count at sigma=1.
    ScenarioSpec low = builtin_scenario("example3");
    low.sensors = 2;
    low.components = 2;
    const ScenarioReport lr = run_scenario(low);
    detail += "(info: S=2 sigma=1 scores=" + join_scores(lr.scores) + ")";
    report(2, "noise scaling", ok, detail);
}

void criterion3() {
    const ScenarioReport r = run_scenario(builtin_scenario("nine"));
    bool ok = r.result.components.component_count() == 9 && r.significant_rank == 9;
    double worst = 1.0;
    for (double s : r.scores) {
        ok = ok && s > 0.90;
        worst = std::min(worst, s);
    }
    report(3, "nine components S=12 sigma=0.01", ok,
           "found=" + std::to_string(r.result.components.component_count()) +
               " rank=" + std::to_string(r.significant_rank) + " min score=" + fmt("%.4f", worst) +
               " scores=" + join_scores(r.scores) + " runtime=" + fmt("%.1fs", r.runtime_seconds));
}

void criterion4() {
    SignalConfig cfg = load_signal_config(std::string(MVD_CONFIG_DIR) + "/nine.json");
    cfg.amplitude_perturbation = 0.25;
    std::vector<GapCell> cells;
    const std::vector<int> sensors{16, 32, 48, 64, 80, 96, 112, 128, 144, 160};
    for (double s2 : {0.5, 1.0})
        for (int s : sensors) cells.push_back({s, s2});
    const auto g = eigen_gap_study(cfg, cells, 200, 1);
    auto ratio = [&](double s2, int s) {
        for (const auto& c : g)
            if (c.cell.sigma2 == s2 && c.cell.sensors == s) return c.gap_ratio;
        return 0.0;
    };
    bool monotone = true;
    for (std::size_t i = 1; i < g.size(); ++i)
        if (g[i].cell.sigma2 == g[i - 1].cell.sigma2 && g[i].gap_ratio < 0.95 * g[i - 1].gap_ratio)
            monotone = false;

    // Values from the first oracle run (seed 1, 200 trials), held to 5%.
    const std::array<std::array<double, 3>, 4> pinned{{
        {0.5, 16, 1.4732}, {0.5, 64, 5.2768}, {1.0, 32, 1.7591}, {1.0, 128, 4.5948}}};
    bool pins = true;
    for (const auto& p : pinned)
        if (std::abs(ratio(p[0], int(p[1])) / p[2] - 1.0) > 0.05) pins = false;

    const bool ok = ratio(0.5, 64) > 3.0 && ratio(0.5, 16) < 2.0 && ratio(1.0, 128) > 3.0 &&
                    ratio(1.0, 32) < 2.0 && monotone && pins;
    std::string detail = "sigma2=0.5: S16=" + fmt("%.4f", ratio(0.5, 16)) + " S64=" + fmt("%.4f", ratio(0.5, 64)) +
                         "  sigma2=1: S32=" + fmt("%.4f", ratio(1.0, 32)) + " S128=" + fmt("%.4f", ratio(1.0, 128)) +
                         (monotone ? "  monotone" : "  NOT monotone") + (pins ? "  pinned" : "  off pinned values");
    report(4, "eigenvalue gap study, 200 trials", ok, detail);
}

// ---------------------------------------------------------------------------

struct Suite {
    const char* name;
    std::function<bool(std::string&)> run;
};

bool remarks(std::string& d) {
    // components are rows; eigenvectors of the autocorrelation must lie in their row space
    std::mt19937_64 rng(101);
    double worst = 0.0;
    int bad_counts = 0, cases = 0;
    auto check = [&](const CMatrix& comps, int sensors, int expect_rank) {
        ++cases;
        ComponentSet c{comps, 0};
        MixingMatrix a{oracle::random_matrix(sensors, comps.rows(), rng)};
        const EigenSystem es = hermitian_eig(autocorrelation(mix(c, a)));
        int count = 0;
        for (Eigen::Index p = 0; p < es.size(); ++p) {
            if (es.eigenvalues[p] <= 1e-9 * es.eigenvalues[0]) continue;
            ++count;
            worst = std::max(worst, oracle::span_residual(es.eigenvectors.col(p), comps.transpose()));
        }
        if (count != expect_rank) ++bad_counts;
    };
    for (int t = 0; t < 150; ++t) {
        const int n = std::uniform_int_distribution<int>(9, 32)(rng);
        const int m = std::uniform_int_distribution<int>(1, 6)(rng);
        const CMatrix c = oracle::random_matrix(m, n, rng);
        check(c, m + t % 3, m);  // independent, S >= P
        CMatrix dep(m + 1, n);  // one component a combination of the others
        dep << c, oracle::random_matrix(1, m, rng) * c;
        check(dep, m + 1, m);
        if (m > 1) check(c, m - 1, m - 1);  // fewer sensors than components
    }
    d = std::to_string(cases) + " cases, max span residual " + fmt("%.2e", worst) + ", rank mismatches " +
        std::to_string(bad_counts);
    return worst <= 1e-8 && bad_counts == 0;
}

bool eigensolver(std::string& d) {
    std::mt19937_64 rng(202);
    double rec = 0.0, orth = 0.0;
    for (int t = 0; t < 500; ++t) {
        const int n = 1 + t % 64;
        const CMatrix r = oracle::random_hermitian(n, rng);
        const EigenSystem es = hermitian_eig({r});
        const CMatrix& q = es.eigenvectors;
        rec = std::max(rec, (q * es.eigenvalues.cast<cplx>().asDiagonal() * q.adjoint() - r).norm() / r.norm());
        orth = std::max(orth, oracle::max_abs(q.adjoint() * q - CMatrix::Identity(n, n)));
    }
    d = "500 matrices up to 64x64, reconstruction " + fmt("%.2e", rec) + " orthonormality " + fmt("%.2e", orth);
    return rec <= 1e-9 && orth <= 1e-10;
}

bool deflation(std::string& d) {
    std::mt19937_64 rng(303);
    double worst = 0.0, norm_err = 0.0;
    for (int t = 0; t < 500; ++t) {
        const int n = 8 + t % 57;
        const int m = 1 + t % std::min(8, n - 1);
        const CMatrix q = oracle::orthonormalize(oracle::random_matrix(n, m, rng));
        const CVector f = oracle::random_vector(n, rng).normalized();
        const CMatrix out = deflate(q, f, 0);
        for (Eigen::Index p = 0; p < out.cols(); ++p) {
            worst = std::max(worst, std::abs(inner(f, out.col(p))));
            norm_err = std::max(norm_err, std::abs(out.col(p).norm() - 1.0));
        }
    }
    d = "500 cases, max |f^H q| " + fmt("%.2e", worst) + ", max norm error " + fmt("%.2e", norm_err);
    return worst <= 1e-10 && norm_err <= 1e-12;
}

bool parseval_and_analytic(std::string& d) {
    std::mt19937_64 rng(404);
    TFConfig cfg;
    cfg.window = WindowKind::rectangular;
    cfg.window_length = 32;
    double rel = 0.0;
    for (int t = 0; t < 20; ++t) {
        const CVector x = oracle::random_vector(96, rng);
        const TFRepresentation s = stft(x, cfg);
        for (Eigen::Index n = 0; n < s.frames(); n += 7) {
            double direct = 0.0;
            for (Eigen::Index m = 0; m < 32 && n + m < 96; ++m) direct += std::norm(x[n + m]);
            rel = std::max(rel, std::abs(s.complex_values.row(n).squaredNorm() - 32.0 * direct) / (32.0 * direct));
        }
    }
    double neg = 0.0;
    std::normal_distribution<double> g;
    for (int n : {8, 33, 64, 257}) {
        RVector x(n);
        for (int i = 0; i < n; ++i) x[i] = g(rng);
        const CVector spec = oracle::dft(analytic_signal(x));
        for (int k = n / 2 + 1; k < n; ++k) neg = std::max(neg, std::abs(spec[k]));
    }
    d = "Parseval rel error " + fmt("%.2e", rel) + ", analytic negative bins " + fmt("%.2e", neg);
    return rel <= 1e-12 && neg <= 1e-10;
}

bool measure_properties(std::string& d) {
    std::mt19937_64 rng(505);
    TFConfig cfg;
    double rel = 0.0;
    for (int t = 0; t < 20; ++t) {
        const CVector x = oracle::random_vector(128, rng);
        const cplx c = oracle::random_vector(1, rng)[0];
        for (double p : {0.1, 0.5, 1.0}) {
            const double a = concentration_measure(stft(x, cfg), p);
            const double b = concentration_measure(stft(c * x, cfg), p);
            rel = std::max(rel, std::abs(b - std::pow(std::abs(c), p) * a) / b);
        }
    }
    // unit energy over two cells, split (cos a, sin a): measure rises toward the even split
    bool monotone = true;
    TFRepresentation two;
    two.kind = TFKind::stft;
    two.complex_values = CMatrix::Zero(1, 2);
    for (double p : {0.25, 0.5, 1.0}) {
        double prev = -1.0;
        for (int i = 0; i <= 16; ++i) {
            const double a = kPi / 4.0 * i / 16.0;
            two.complex_values(0, 0) = std::cos(a);
            two.complex_values(0, 1) = std::sin(a);
            const double m = concentration_measure(two, p);
            if (m <= prev) monotone = false;
            prev = m;
        }
    }
    d = "scale covariance rel error " + fmt("%.2e", rel) + (monotone ? ", spreading monotone" : ", NOT monotone");
    return rel <= 1e-12 && monotone;
}

bool non_overlapping(std::string& d) {
    // disjoint time supports, different energies, sensors with orthogonal gain columns
    const int n = 257;
    ComponentSet c{CMatrix::Zero(2, n), -128};
    for (int i = 0; i < n; ++i) {
        const double t = i - 128.0;
        c.data(0, i) = std::exp(-std::pow((t + 70.0) / 15.0, 2)) * std::polar(1.0, 2.0 * kPi * 0.1 * t);
        c.data(1, i) = 0.7 * std::exp(-std::pow((t - 70.0) / 15.0, 2)) * std::polar(1.0, -2.0 * kPi * 0.2 * t);
    }
    const std::array<double, 2> phases{0.0, kPi / 2.0};
    MixingMatrix a;
    a.entries.resize(2, 2);
    for (int i = 0; i < 2; ++i) {
        a.entries(i, 0) = 0.5 * std::polar(1.0, phases[i]);
        a.entries(i, 1) = 0.5 * std::polar(1.0, -phases[i]);
    }
    const EigenSystem es = hermitian_eig(autocorrelation(mix(c, a)));
    const double s1 = matching_score(es.eigenvectors.col(0), c.data.row(0).transpose());
    const double s2 = matching_score(es.eigenvectors.col(1), c.data.row(1).transpose());
    d = "eigenvector scores " + fmt("%.6f", s1) + " " + fmt("%.6f", s2);
    return s1 > 0.999 && s2 > 0.999;
}

void criterion5() {
    const std::vector<Suite> suites{{"remarks 1-4", remarks},
                                    {"hermitian eigensolver", eigensolver},
                                    {"deflation", deflation},
                                    {"stft parseval / analytic signal", parseval_and_analytic},
                                    {"concentration measure", measure_properties},
                                    {"non-overlapping special case", non_overlapping}};
    bool ok = true;
    std::string detail;
    for (const auto& s : suites) {
        std::string d;
        const bool r = s.run(d);
        ok = ok && r;
        detail += std::string("\n      ") + (r ? "ok   " : "bad  ") + s.name + ": " + d;
    }
    report(5, "property suites", ok, detail);
}

// ---------------------------------------------------------------------------

bool same_files(const fs::path& a, const fs::path& b, std::string& why) {
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file() || e.path().filename() == "summary.json" || e.path().filename() == "log")
            continue;
        const fs::path other = b / fs::relative(e.path(), a);
        if (cli::slurp(e.path()) != cli::slurp(other)) {
            why = fs::relative(e.path(), a).string();
            return false;
        }
    }
    return true;
}

void criterion6() {
    const fs::path root = cli::scratch("mvd_acceptance_determinism");
    const std::string cfg = std::string(MVD_CONFIG_DIR);
    bool ok = true;
    std::string bad;
    for (const char* run : {"a", "b"}) {
        const fs::path r = root / run;
        fs::create_directories(r);
        auto p = [&](const char* f) { return "'" + (r / f).string() + "'"; };
        const std::vector<std::string> cmds{
            "synth --config " + cfg + "/example1.json --sensors 2 --sigma 0.01 --seed 7 -o " + p("sig.csv"),
            "decompose -i " + p("sig.csv") + " --seed 3 -o " + p("dec"),
            "tfr -i " + p("sig.csv") + " --kind stft --channel 1 -o " + p("stft.csv") + " --pgm " + p("stft.pgm"),
            "tfr -i " + p("sig.csv") + " --kind spec --channel 2 -o " + p("spec.csv"),
            "tfr -i " + p("sig.csv") + " --kind wd --channel 1 -o " + p("wd.csv") + " --pgm " + p("wd.pgm"),
            "eig -i " + p("sig.csv") + " -o " + p("eig.csv"),
            "scenario --name example2 -o " + p("scenario"),
            "gapstudy --sigma2 0.5 --sensors 8:24:80 --trials 20 --seed 5 -o " + p("gaps.csv"),
        };
        for (const auto& c : cmds)
            if (cli::run(c, r / "log") != 0) {
                ok = false;
                bad = "command failed: " + c;
            }
    }
    std::string which;
    if (ok && !same_files(root / "a", root / "b", which)) {
        ok = false;
        bad = "differs: " + which;
    }
    report(6, "CLI determinism", ok, ok ? "synth, decompose, tfr x3, eig, scenario, gapstudy byte-identical" : bad);
    fs::remove_all(root);
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
