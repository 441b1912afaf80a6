#include "nodeid/identify.hpp"

#include "nodeid/csv.hpp"
#include "nodeid/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>

namespace nodeid {

ContextSet sample_context(const Graph& g, std::size_t k, std::uint64_t seed) {
    Rng rng(stream_seed(seed, 0));
    return sample_context(g, k, rng);
}

ContextSet sample_context(const Graph& g, std::size_t k, Rng& rng) {
    if (g.node_count() == 0) throw std::invalid_argument("empty graph");
    std::uniform_int_distribution<Node> pick(0, static_cast<Node>(g.node_count() - 1));
    ContextSet ctx;
    ctx.hidden = pick(rng);
    ctx.anchors.resize(k);
    for (auto& a : ctx.anchors) a = pick(rng);
    const auto field = bfs_distances(g, ctx.hidden);
    ctx.observations.reserve(k);
    for (Node a : ctx.anchors) ctx.observations.push_back(field.dist[a]);
    return ctx;
}

ContextSet sample_context(const DistanceMatrix& dist, std::size_t k, Rng& rng) {
    if (dist.size() == 0) throw std::invalid_argument("empty graph");
    std::uniform_int_distribution<Node> pick(0, static_cast<Node>(dist.size() - 1));
    ContextSet ctx;
    ctx.hidden = pick(rng);
    ctx.anchors.resize(k);
    for (auto& a : ctx.anchors) a = pick(rng);
    ctx.observations.reserve(k);
    for (Node a : ctx.anchors) ctx.observations.push_back(dist(a, ctx.hidden));
    return ctx;
}

std::size_t BucketPartition::find(std::span<const std::uint32_t> key) const {
    auto it = std::lower_bound(keys.begin(), keys.end(), key, [](const auto& a, std::span<const std::uint32_t> b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    });
    if (it != keys.end() && std::equal(it->begin(), it->end(), key.begin(), key.end()))
        return static_cast<std::size_t>(it - keys.begin());
    return bucket_count();
}

namespace {

// keys is node-major: keys[u * k + i] = SPD(u, a_i).
BucketPartition partition_by_keys(std::size_t n, std::size_t k, const std::vector<std::uint32_t>& keys) {
    std::vector<Node> order(n);
    std::iota(order.begin(), order.end(), Node{0});
    auto key_of = [&](Node u) { return keys.begin() + static_cast<std::ptrdiff_t>(std::size_t(u) * k); };
    std::stable_sort(order.begin(), order.end(), [&](Node a, Node b) {
        return std::lexicographical_compare(key_of(a), key_of(a) + static_cast<std::ptrdiff_t>(k), key_of(b),
                                            key_of(b) + static_cast<std::ptrdiff_t>(k));
    });
    BucketPartition part;
    part.k = k;
    part.bucket_of.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Node u = order[i];
        const bool fresh = i == 0 || !std::equal(key_of(u), key_of(u) + static_cast<std::ptrdiff_t>(k),
                                                 key_of(order[i - 1]));
        if (fresh) {
            part.buckets.emplace_back();
            part.keys.emplace_back(key_of(u), key_of(u) + static_cast<std::ptrdiff_t>(k));
        }
        part.buckets.back().push_back(u);
        part.bucket_of[u] = part.buckets.size() - 1;
    }
    for (const auto& b : part.buckets)
        if (b.size() == 1) ++part.singleton_count;
    return part;
}

}  // namespace

BucketPartition build_buckets(const Graph& g, std::span<const Node> anchors) {
    const std::size_t n = g.node_count(), k = anchors.size();
    std::vector<std::uint32_t> keys(n * k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto field = bfs_distances(g, anchors[i]);
        for (std::size_t u = 0; u < n; ++u) keys[u * k + i] = field.dist[u];
    }
    return partition_by_keys(n, k, keys);
}

BucketPartition build_buckets(const DistanceMatrix& dist, std::span<const Node> anchors) {
    const std::size_t n = dist.size(), k = anchors.size();
    std::vector<std::uint32_t> keys(n * k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto row = dist.row(anchors[i]);
        for (std::size_t u = 0; u < n; ++u) keys[u * k + i] = row[u];
    }
    return partition_by_keys(n, k, keys);
}

WlOutcome wl_trial(const Graph& g, const ContextSet& ctx, Rng& rng) {
    return wl_trial(build_buckets(g, ctx.anchors), ctx, rng);
}

WlOutcome wl_trial(const BucketPartition& buckets, const ContextSet& ctx, Rng& rng) {
    const std::size_t b = buckets.find(ctx.observations);
    if (b == buckets.bucket_count()) throw std::logic_error("observations do not match any bucket key");
    const auto& members = buckets.buckets[b];
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    WlOutcome out;
    out.guess = members[pick(rng)];
    out.correct = out.guess == ctx.hidden;
    out.bucket_size = members.size();
    return out;
}

LapPipeline::LapPipeline(const Graph& g, const SpectralDecomposition& dec, const TreeKernelTable& table,
                         LapOptions options)
    : graph_(g), dec_(dec), table_(table), options_(options),
      embedding_(diffusion_embedding(dec, options.t, options.m)) {
    if (dec.node_count() != g.node_count()) throw std::invalid_argument("decomposition does not match graph");
    if (options.radii == RadiusSource::ExactFull && dec.size() != dec.node_count())
        throw std::invalid_argument("exact radii need the full decomposition");
    if (std::abs(table.t - options.t) > 1e-15) throw std::invalid_argument("tree table time differs from t");
}

double LapPipeline::radius(Node anchor, std::uint32_t hops, Node hidden) const {
    if (options_.radii == RadiusSource::ExactFull) return diffusion_distance(dec_, options_.t, anchor, hidden);
    return psi_link(table_, static_cast<int>(hops));
}

LapOutcome LapPipeline::run(const ContextSet& ctx, Rng& rng) const {
    const std::size_t need = options_.m + 1;
    if (ctx.k() < need)
        throw std::invalid_argument("context has " + std::to_string(ctx.k()) + " observations; need m + 1 = " +
                                    std::to_string(need));
    std::vector<Node> anchors(ctx.anchors.begin(), ctx.anchors.begin() + static_cast<std::ptrdiff_t>(need));
    std::vector<std::uint32_t> hops(ctx.observations.begin(),
                                    ctx.observations.begin() + static_cast<std::ptrdiff_t>(need));
    LapOutcome out;
    std::optional<DistanceField> from_hidden;
    std::uniform_int_distribution<Node> pick(0, static_cast<Node>(graph_.node_count() - 1));
    for (;;) {
        try {
            const AnchorSet set = make_anchor_set(embedding_, anchors, options_.affine_tol);
            std::vector<double> radii(need);
            for (std::size_t i = 0; i < need; ++i) radii[i] = radius(anchors[i], hops[i], ctx.hidden);
            const auto sol = trilaterate(set, radii, options_.affine_tol);
            const auto decoded = decode_nearest(embedding_, sol.z);
            out.guess = decoded.node;
            out.correct = decoded.node == ctx.hidden;
            out.margin = decoded.margin;
            out.sigma_min = sol.sigma_min;
            out.tail = sol.tail;
            out.residuals = sol.residuals;
            return out;
        } catch (const AffineDependence& e) {
            out.sigma_min = e.sigma_min();
            if (out.resamples >= options_.max_resamples) {
                out.degenerate = true;
                return out;
            }
        }
        // Fresh i.i.d. anchors, observed against the hidden node like the
        // original context.
        ++out.resamples;
        if (!from_hidden) from_hidden = bfs_distances(graph_, ctx.hidden);
        for (std::size_t i = 0; i < need; ++i) {
            anchors[i] = pick(rng);
            hops[i] = from_hidden->dist[anchors[i]];
        }
    }
}

LapOutcome lap_trial(const Graph& g, const SpectralDecomposition& dec, const TreeKernelTable& table,
                     const ContextSet& ctx, const LapOptions& options, Rng& rng) {
    return LapPipeline(g, dec, table, options).run(ctx, rng);
}

double singleton_probability(const Graph& g, std::size_t k, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("trials must be positive");
    std::uniform_int_distribution<Node> pick(0, static_cast<Node>(g.node_count() - 1));
    double total = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng rng = make_stream(seed, trial);
        std::vector<Node> anchors(k);
        for (auto& a : anchors) a = pick(rng);
        total += build_buckets(g, anchors).singleton_fraction();
    }
    return total / double(trials);
}

namespace {

struct TrialRecord {
    bool wl_correct = false;
    double inv_bucket = 0;
    double singleton = 0;
    bool lap_correct = false;
    bool lap_degenerate = false;
    double lap_margin = 0;
    bool exact_correct = false;
    bool exact_degenerate = false;
    double exact_margin = 0;
};

SeparationRecord summarize(const std::string& method, std::size_t n, const SeparationConfig& config,
                           std::size_t k, const std::vector<TrialRecord>& trials, bool lap, bool exact) {
    SeparationRecord rec;
    rec.method = method;
    rec.n = n;
    rec.r = config.r;
    rec.k = k;
    rec.trials = trials.size();
    rec.seed = config.seed;
    std::size_t used = 0, correct = 0;
    double margin = 0;
    for (const auto& t : trials) {
        rec.exp_inv_bucket += t.inv_bucket;
        rec.singleton_prob += t.singleton;
        if (!lap) {
            ++used;
            correct += t.wl_correct;
            continue;
        }
        const bool degenerate = exact ? t.exact_degenerate : t.lap_degenerate;
        if (degenerate) {
            ++rec.degenerate_count;
            continue;
        }
        ++used;
        correct += exact ? t.exact_correct : t.lap_correct;
        margin += exact ? t.exact_margin : t.lap_margin;
    }
    const double total = double(trials.size());
    rec.exp_inv_bucket /= total;
    rec.singleton_prob /= total;
    if (used) {
        rec.accuracy = double(correct) / double(used);
        rec.acc_stderr = std::sqrt(rec.accuracy * (1 - rec.accuracy) / double(used));
        rec.mean_margin = margin / double(used);
    }
    return rec;
}

}  // namespace

SeparationResult run_separation(const SeparationConfig& config) {
    if (config.n_values.empty() || config.k_values.empty()) throw std::invalid_argument("empty experiment grid");
    if (config.trials == 0) throw std::invalid_argument("trials must be positive");
    SeparationResult result;
    for (std::size_t n : config.n_values) {
        const Graph g = generate_random_regular(n, config.r, stream_seed(config.seed, n));
        const DistanceMatrix dist(g);
        const int diam = dist.max();
        result.diameters.push_back(diam);
        const auto dec = graph_spectrum(g);
        const auto table = tree_radial_kernel(config.r, config.t, std::max(default_tree_d_max(n, config.r), diam),
                                              config.tail_eps);
        LapOptions proxy_opts;
        proxy_opts.m = config.m;
        proxy_opts.t = config.t;
        const LapPipeline proxy(g, dec, table, proxy_opts);
        LapOptions exact_opts = proxy_opts;
        exact_opts.radii = RadiusSource::ExactFull;
        const LapPipeline exact(g, dec, table, exact_opts);

        for (std::size_t k : config.k_values) {
            std::vector<TrialRecord> trials(config.trials);
            const std::uint64_t grid_seed = stream_seed(stream_seed(config.seed, n), k);
            parallel_for(config.trials, config.threads, [&](std::size_t i) {
                const std::uint64_t trial_seed = stream_seed(grid_seed, i);
                Rng ctx_rng(stream_seed(trial_seed, 0));
                Rng wl_rng(stream_seed(trial_seed, 1));
                Rng lap_rng(stream_seed(trial_seed, 2));
                Rng exact_rng(stream_seed(trial_seed, 3));
                const ContextSet ctx = sample_context(dist, k, ctx_rng);
                const auto buckets = build_buckets(dist, ctx.anchors);
                auto& rec = trials[i];
                rec.inv_bucket = buckets.expected_inverse_bucket();
                rec.singleton = buckets.singleton_fraction();
                rec.wl_correct = wl_trial(buckets, ctx, wl_rng).correct;
                if (k < config.m + 1) {
                    // Too few observations to trilaterate: uniform guess over V.
                    std::uniform_int_distribution<Node> pick(0, static_cast<Node>(n - 1));
                    rec.lap_correct = pick(lap_rng) == ctx.hidden;
                    rec.exact_correct = pick(exact_rng) == ctx.hidden;
                    return;
                }
                const auto lap = proxy.run(ctx, lap_rng);
                rec.lap_correct = lap.correct;
                rec.lap_degenerate = lap.degenerate;
                rec.lap_margin = lap.margin;
                if (config.exact_ablation) {
                    const auto ex = exact.run(ctx, exact_rng);
                    rec.exact_correct = ex.correct;
                    rec.exact_degenerate = ex.degenerate;
                    rec.exact_margin = ex.margin;
                }
            });
            result.records.push_back(summarize("WL", n, config, k, trials, false, false));
            result.records.push_back(summarize("LAP", n, config, k, trials, true, false));
            if (config.exact_ablation) result.records.push_back(summarize("LAP_EXACT", n, config, k, trials, true, true));
        }
    }
    return result;
}

void write_separation_csv(std::ostream& out, std::span<const SeparationRecord> records) {
    CsvWriter csv(out);
    for (const char* h : {"method", "n", "r", "k", "trials", "accuracy", "acc_stderr", "exp_inv_bucket",
                          "singleton_prob", "mean_margin", "degenerate_count", "seed"})
        csv.field(h);
    csv.end_row();
    for (const auto& rec : records) {
        csv.field(rec.method)
            .field(static_cast<std::uint64_t>(rec.n))
            .field(rec.r)
            .field(static_cast<std::uint64_t>(rec.k))
            .field(static_cast<std::uint64_t>(rec.trials))
            .field(rec.accuracy)
            .field(rec.acc_stderr)
            .field(rec.exp_inv_bucket)
            .field(rec.singleton_prob)
            .field(rec.mean_margin)
            .field(static_cast<std::uint64_t>(rec.degenerate_count))
            .field(rec.seed)
            .end_row();
    }
}

}  // namespace nodeid
