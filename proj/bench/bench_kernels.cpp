// serial vs OpenMP kernels at the sizes the decomposer actually hits

#include <benchmark/benchmark.h>

#include <random>

#include "mvd/kernels.hpp"
#include "mvd/tf.hpp"

using namespace mvd;
namespace k = mvd::kernels;

namespace {

CMatrix noise(Eigen::Index r, Eigen::Index c, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    CMatrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = cplx(g(rng), g(rng));
    return m;
}

template <bool Par>
void autocorr(benchmark::State& st) {
    const CMatrix x = noise(st.range(0), 257, 1);
    for (auto _ : st) {
        CMatrix r = Par ? k::omp::autocorrelation(x) : k::serial::autocorrelation(x);
        benchmark::DoNotOptimize(r.data());
    }
}

template <bool Par>
void stft_frames(benchmark::State& st) {
    const CVector x = noise(st.range(0), 1, 2);
    TFConfig cfg;
    const RVector w = make_window(cfg);
    for (auto _ : st) {
        CMatrix s = Par ? k::omp::stft_frames(x, w, 1) : k::serial::stft_frames(x, w, 1);
        benchmark::DoNotOptimize(s.data());
    }
}

template <bool Par>
void lp_sum(benchmark::State& st) {
    const Eigen::Index frames = st.range(0);
    const CVector z = noise(frames * 64, 1, 3);
    const CVector d = noise(frames * 64, 1, 4);
    k::LpSumArgs a;
    a.z = z.data();
    a.dir = d.data();
    a.step = cplx(0.05, 0.02);
    a.frames = frames;
    a.bins = 64;
    a.p = 1.0;
    for (auto _ : st) benchmark::DoNotOptimize(Par ? k::omp::lp_sum(a) : k::serial::lp_sum(a));
}

}  // namespace

BENCHMARK(autocorr<false>)->Arg(2)->Arg(16)->Arg(128);
BENCHMARK(autocorr<true>)->Arg(2)->Arg(16)->Arg(128);
BENCHMARK(stft_frames<false>)->Arg(257)->Arg(2048);
BENCHMARK(stft_frames<true>)->Arg(257)->Arg(2048);
BENCHMARK(lp_sum<false>)->Arg(257)->Arg(2048);
BENCHMARK(lp_sum<true>)->Arg(257)->Arg(2048);

BENCHMARK_MAIN();
