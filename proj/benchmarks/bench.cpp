#include "nodeid/diffusion.hpp"
#include "nodeid/geometry.hpp"
#include "nodeid/graph.hpp"
#include "nodeid/identify.hpp"
#include "nodeid/random.hpp"
#include "nodeid/randomwave.hpp"
#include "nodeid/spectral.hpp"
#include "nodeid/trilateration.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace nodeid;

static void BM_GenerateRegular(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(generate_random_regular(n, 3, seed++));
}
BENCHMARK(BM_GenerateRegular)->Arg(512)->Arg(2048);

static void BM_Eigendecompose(benchmark::State& state) {
    const Graph g = generate_random_regular(static_cast<std::size_t>(state.range(0)), 3, 1);
    const auto L = normalized_laplacian(g);
    for (auto _ : state) benchmark::DoNotOptimize(eigendecompose(L, g.node_count()));
}
BENCHMARK(BM_Eigendecompose)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_DistanceMatrix(benchmark::State& state) {
    const Graph g = generate_random_regular(static_cast<std::size_t>(state.range(0)), 3, 1);
    for (auto _ : state) benchmark::DoNotOptimize(DistanceMatrix(g));
}
BENCHMARK(BM_DistanceMatrix)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

static void BM_BuildBuckets(benchmark::State& state) {
    const Graph g = generate_random_regular(2048, 3, 1);
    const DistanceMatrix dist(g);
    Rng rng(2);
    std::uniform_int_distribution<Node> pick(0, 2047);
    std::vector<Node> anchors(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        for (auto& a : anchors) a = pick(rng);
        benchmark::DoNotOptimize(build_buckets(dist, anchors));
    }
}
BENCHMARK(BM_BuildBuckets)->Arg(2)->Arg(8);

static void BM_Trilaterate(benchmark::State& state) {
    const auto m = static_cast<Eigen::Index>(state.range(0));
    Rng rng(3);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd points(m + 1, m);
    for (Eigen::Index i = 0; i < points.size(); ++i) points.data()[i] = normal(rng);
    Eigen::VectorXd z(m);
    for (Eigen::Index i = 0; i < m; ++i) z[i] = normal(rng);
    std::vector<double> radii;
    for (Eigen::Index i = 0; i <= m; ++i) radii.push_back((points.row(i).transpose() - z).norm());
    const auto anchors = make_anchor_set(points);
    for (auto _ : state) benchmark::DoNotOptimize(trilaterate(anchors, radii));
}
BENCHMARK(BM_Trilaterate)->Arg(4)->Arg(8)->Arg(16);

static void BM_TreeKernel(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(tree_radial_kernel(3, 1.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_TreeKernel)->Arg(8)->Arg(22);

static void BM_ClosestPair(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto features = chi(sample_ensemble(n, wave_dimension(n, 1.0), 4));
    for (auto _ : state) benchmark::DoNotOptimize(closest_pair(features));
}
BENCHMARK(BM_ClosestPair)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
