#include "doctest.h"
#include "corpus.hpp"
#include "oracles.hpp"

#include "nodeid/diffusion.hpp"
#include "nodeid/graph.hpp"
#include "nodeid/identify.hpp"
#include "nodeid/random.hpp"
#include "nodeid/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

using namespace nodeid;
using doctest::Approx;


TEST_CASE("sample_context") {
    const Graph g = generate_random_regular(50, 3, 1);
    const auto empty = sample_context(g, 0, 7);
    CHECK(empty.k() == 0);
    CHECK(empty.observations.empty());
    CHECK(empty.hidden < 50);

    const auto a = sample_context(g, 12, 42);
    const auto b = sample_context(g, 12, 42);
    CHECK(a.anchors == b.anchors);
    CHECK(a.observations == b.observations);
    CHECK(a.hidden == b.hidden);

    const DistanceMatrix dist(g);
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto ctx = sample_context(dist, 8, rng);
        for (std::size_t i = 0; i < ctx.k(); ++i) {
            CHECK(ctx.observations[i] == dist(ctx.anchors[i], ctx.hidden));
            CHECK((ctx.observations[i] == 0) == (ctx.anchors[i] == ctx.hidden));
        }
    }
}

TEST_CASE("bucket examples") {
    const Graph c6 = cycle_graph(6);
    const auto none = build_buckets(c6, std::vector<Node>{});
    CHECK(none.bucket_count() == 1);
    CHECK(none.buckets[0].size() == 6);
    CHECK(none.expected_inverse_bucket() == Approx(1.0 / 6.0));

    const auto path = build_buckets(path_graph(3), std::vector<Node>{0});
    CHECK(path.bucket_count() == 3);
    CHECK(path.singleton_count == 3);
    CHECK(path.expected_inverse_bucket() == 1.0);

    const auto c6_buckets = build_buckets(c6, std::vector<Node>{0});
    const std::vector<std::vector<Node>> expected{{0}, {1, 5}, {2, 4}, {3}};
    CHECK(c6_buckets.buckets == expected);
    CHECK(c6_buckets.expected_inverse_bucket() == Approx(4.0 / 6.0));
    CHECK(c6_buckets.singleton_count == 2);
    const std::vector<std::uint32_t> key{2};
    CHECK(c6_buckets.find(key) == 2);
    const std::vector<std::uint32_t> missing{9};
    CHECK(c6_buckets.find(missing) == c6_buckets.bucket_count());
}

TEST_CASE("bucket partition invariants") {
    Rng rng(12);
    for (const Graph& g : corpus::small_graphs()) {
        const DistanceMatrix dist(g);
        const int diam = dist.max();
        std::uniform_int_distribution<Node> pick(0, static_cast<Node>(g.node_count() - 1));
        for (std::size_t k : {1u, 2u, 3u, 5u}) {
            std::vector<Node> anchors(k);
            for (auto& a : anchors) a = pick(rng);
            const auto part = build_buckets(g, anchors);
            const auto from_matrix = build_buckets(dist, anchors);
            CHECK(part.buckets == from_matrix.buckets);

            std::size_t total = 0;
            std::set<Node> seen;
            for (std::size_t b = 0; b < part.bucket_count(); ++b) {
                total += part.buckets[b].size();
                for (Node u : part.buckets[b]) {
                    seen.insert(u);
                    CHECK(part.bucket_of[u] == b);
                    for (std::size_t i = 0; i < k; ++i) CHECK(part.keys[b][i] == dist(u, anchors[i]));
                }
            }
            CHECK(total == g.node_count());
            CHECK(seen.size() == g.node_count());
            CHECK(std::is_sorted(part.keys.begin(), part.keys.end()));
            CHECK(double(part.bucket_count()) <= std::pow(double(diam + 1), double(k)));
            double inv = 0;
            for (const auto& b : part.buckets) inv += double(b.size()) * (1.0 / double(b.size())) / double(g.node_count());
            CHECK(part.expected_inverse_bucket() == Approx(inv).epsilon(1e-15));
        }
    }
}

TEST_CASE("exhaustive Bayes accuracy equals bucket count over n") {
    Rng rng(77);
    for (const Graph& g : corpus::small_graphs()) {
        std::uniform_int_distribution<Node> pick(0, static_cast<Node>(g.node_count() - 1));
        for (std::size_t k = 0; k <= 4; ++k) {
            std::vector<Node> anchors(k);
            for (auto& a : anchors) a = pick(rng);
            const double oracle = oracle::exhaustive_bayes_accuracy(g, anchors);
            const auto part = build_buckets(g, anchors);
            CHECK(std::abs(oracle - part.expected_inverse_bucket()) <= 1e-15);
        }
    }
}

TEST_CASE("wl trial examples") {
    const Graph c6 = cycle_graph(6);
    const auto buckets = build_buckets(c6, std::vector<Node>{0});
    Rng rng(3);

    ContextSet singleton{{0}, {3}, 3};
    for (int i = 0; i < 50; ++i) CHECK(wl_trial(buckets, singleton, rng).correct);

    ContextSet pair{{0}, {1}, 1};
    int correct = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto out = wl_trial(buckets, pair, rng);
        CHECK(out.bucket_size == 2);
        CHECK((out.guess == 1 || out.guess == 5));
        correct += out.correct;
    }
    CHECK(correct / 1000.0 == Approx(0.5).epsilon(0.1));

    ContextSet bogus{{0}, {7}, 1};
    CHECK_THROWS_AS(wl_trial(buckets, bogus, rng), std::logic_error);
    CHECK(wl_trial(c6, singleton, rng).correct);
}

TEST_CASE("wl accuracy stays under the bucket ceiling") {
    const Graph g = generate_random_regular(128, 3, 9);
    const DistanceMatrix dist(g);
    for (std::size_t k : {1u, 2u, 3u, 5u}) {
        const std::size_t trials = 4000;
        double correct = 0, ceiling = 0;
        for (std::size_t i = 0; i < trials; ++i) {
            Rng ctx_rng = make_stream(k, 2 * i);
            Rng wl_rng = make_stream(k, 2 * i + 1);
            const auto ctx = sample_context(dist, k, ctx_rng);
            const auto part = build_buckets(dist, ctx.anchors);
            correct += wl_trial(part, ctx, wl_rng).correct;
            ceiling += part.expected_inverse_bucket();
        }
        const double acc = correct / double(trials);
        const double se = std::sqrt(acc * (1 - acc) / double(trials));
        ceiling /= double(trials);
        INFO("k=" << k << " acc=" << acc << " ceiling=" << ceiling);
        CHECK(acc <= ceiling + 3 * se);
        CHECK(std::abs(acc - ceiling) <= 3 * se);
    }
}

TEST_CASE("singleton probability") {
    const Graph g = generate_random_regular(64, 3, 2);
    CHECK(singleton_probability(g, 0, 10, 1) == 0.0);
    std::vector<Node> all(64);
    std::iota(all.begin(), all.end(), Node{0});
    CHECK(build_buckets(g, all).singleton_fraction() == 1.0);
    CHECK_THROWS_AS(singleton_probability(g, 1, 0, 1), std::invalid_argument);

    const Graph big = generate_random_regular(2048, 3, 1);
    double prev = -1;
    for (std::size_t k = 1; k <= 8; ++k) {
        const double p = singleton_probability(big, k, 20, 5);
        CHECK(p >= prev);
        prev = p;
    }
    CHECK(prev > 0.5);
}

TEST_CASE("lap pipeline recovers the hidden node with exact radii in the full embedding") {
    // With m = n - 1 nothing is truncated, so exact radii pin z to the
    // hidden node's coordinates and decoding is exact.
    const Graph g = generate_random_regular(14, 3, 4);
    const auto dec = graph_spectrum(g);
    const auto table = tree_radial_kernel(3, 1.0, 8);
    LapOptions opts;
    opts.m = 13;
    opts.radii = RadiusSource::ExactFull;
    const LapPipeline pipeline(g, dec, table, opts);

    double min_sep = 1e300;
    for (Node u = 0; u < 14; ++u)
        for (Node v = u + 1; v < 14; ++v) min_sep = std::min(min_sep, pipeline.embedding().distance(u, v));
    REQUIRE(min_sep > 0);

    Rng rng(8);
    std::size_t correct = 0, used = 0;
    std::uniform_int_distribution<Node> pick(0, 13);
    for (int trial = 0; trial < 100; ++trial) {
        // All 14 nodes as anchors in random order: distinct, so never degenerate.
        ContextSet ctx;
        ctx.hidden = pick(rng);
        ctx.anchors.resize(14);
        std::iota(ctx.anchors.begin(), ctx.anchors.end(), Node{0});
        std::shuffle(ctx.anchors.begin(), ctx.anchors.end(), rng);
        const auto field = bfs_distances(g, ctx.hidden);
        for (Node a : ctx.anchors) ctx.observations.push_back(field.dist[a]);
        const auto out = pipeline.run(ctx, rng);
        if (out.degenerate) continue;
        ++used;
        correct += out.correct;
        CHECK(out.margin > 0);
    }
    CHECK(used == 100);
    CHECK(correct == used);

    // Hidden node sits on an anchor: zero radius, decode returns that anchor.
    std::vector<Node> anchors(14);
    std::iota(anchors.begin(), anchors.end(), Node{0});
    ContextSet on_anchor{anchors, {}, 6};
    const auto field = bfs_distances(g, 6);
    for (Node a : anchors) on_anchor.observations.push_back(field.dist[a]);
    const auto out = pipeline.run(on_anchor, rng);
    CHECK_FALSE(out.degenerate);
    CHECK(out.guess == 6);
}

TEST_CASE("lap pipeline degenerate anchors and preconditions") {
    const Graph g = generate_random_regular(40, 3, 1);
    const auto dec = graph_spectrum(g);
    const auto table = tree_radial_kernel(3, 1.0, default_tree_d_max(40, 3));
    LapOptions opts;
    opts.m = 3;
    const LapPipeline pipeline(g, dec, table, opts);
    Rng rng(2);

    const auto field = bfs_distances(g, 9);
    ContextSet dup{{4, 4, 4, 4}, {}, 9};
    for (Node a : dup.anchors) dup.observations.push_back(field.dist[a]);
    const auto resampled = pipeline.run(dup, rng);
    CHECK(resampled.resamples >= 1);
    CHECK_FALSE(resampled.degenerate);
    CHECK(resampled.sigma_min > kAffineTol);

    LapOptions no_retry = opts;
    no_retry.max_resamples = 0;
    const auto stuck = lap_trial(g, dec, table, dup, no_retry, rng);
    CHECK(stuck.degenerate);
    CHECK(stuck.resamples == 0);

    ContextSet too_few{{1, 2}, {field.dist[1], field.dist[2]}, 9};
    CHECK_THROWS_AS(pipeline.run(too_few, rng), std::invalid_argument);

    const auto other_time = tree_radial_kernel(3, 2.0, 8);
    CHECK_THROWS_AS(LapPipeline(g, dec, other_time, opts), std::invalid_argument);
    LapOptions exact = opts;
    exact.radii = RadiusSource::ExactFull;
    CHECK_THROWS_AS(LapPipeline(g, graph_spectrum(g, 10), table, exact), std::invalid_argument);
}

TEST_CASE("separation runner") {
    SeparationConfig config;
    config.n_values = {64, 128};
    config.k_values = {0, 2, 4, 5};
    config.trials = 300;
    config.m = 4;
    config.seed = 3;
    config.exact_ablation = true;
    const auto serial = run_separation(config);
    CHECK(serial.records.size() == 2 * 4 * 3);
    CHECK(serial.diameters.size() == 2);

    config.threads = 3;
    const auto parallel = run_separation(config);
    std::ostringstream a, b;
    write_separation_csv(a, serial.records);
    write_separation_csv(b, parallel.records);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("method,n,r,k,trials,accuracy,acc_stderr,exp_inv_bucket,singleton_prob,mean_margin,"
                        "degenerate_count,seed\n",
                        0) == 0);

    for (const auto& rec : serial.records) {
        INFO(rec.method << " n=" << rec.n << " k=" << rec.k);
        CHECK(rec.accuracy >= 0);
        CHECK(rec.accuracy <= 1);
        CHECK(rec.trials == 300);
        if (rec.method == "WL") {
            const double se = std::max(rec.acc_stderr, 1.0 / double(rec.trials));
            CHECK(std::abs(rec.accuracy - rec.exp_inv_bucket) <= 2 * se);
            if (rec.k == 0) CHECK(rec.exp_inv_bucket == Approx(1.0 / double(rec.n)));
        }
    }

    // Exact radii never do worse than the proxy beyond Monte Carlo noise.
    for (std::size_t i = 0; i + 2 < serial.records.size(); i += 3) {
        const auto& lap = serial.records[i + 1];
        const auto& ex = serial.records[i + 2];
        REQUIRE(lap.method == "LAP");
        REQUIRE(ex.method == "LAP_EXACT");
        CHECK(ex.accuracy >= lap.accuracy - 3 * std::max({lap.acc_stderr, ex.acc_stderr, 1.0 / 300}));
    }

    SeparationConfig bad;
    bad.n_values.clear();
    CHECK_THROWS_AS(run_separation(bad), std::invalid_argument);
}
