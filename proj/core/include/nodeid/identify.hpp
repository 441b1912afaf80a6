#pragma once

#include "nodeid/diffusion.hpp"
#include "nodeid/graph.hpp"
#include "nodeid/random.hpp"
#include "nodeid/spectral.hpp"
#include "nodeid/trilateration.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nodeid {

/// Hidden source v0 plus k i.i.d. uniform anchors and their hop distances to
/// v0. Decoders only read `anchors` and `observations`; `hidden` is for
/// scoring.
struct ContextSet {
    std::vector<Node> anchors;
    std::vector<std::uint32_t> observations;
    Node hidden = 0;

    std::size_t k() const { return anchors.size(); }
};

ContextSet sample_context(const Graph& g, std::size_t k, std::uint64_t seed);
ContextSet sample_context(const Graph& g, std::size_t k, Rng& rng);
ContextSet sample_context(const DistanceMatrix& dist, std::size_t k, Rng& rng);

/// Partition of V by context-distance key d(u) = (SPD(u, a_1), ..., SPD(u, a_k)).
/// Buckets are ordered by key, members by node index.
struct BucketPartition {
    std::size_t k = 0;
    std::vector<std::size_t> bucket_of;            // node -> bucket
    std::vector<std::vector<Node>> buckets;
    std::vector<std::vector<std::uint32_t>> keys;  // per bucket
    std::size_t singleton_count = 0;

    std::size_t node_count() const { return bucket_of.size(); }
    std::size_t bucket_count() const { return buckets.size(); }
    /// E[1/|bucket(v0)|] for uniform v0, which equals bucket_count / n.
    double expected_inverse_bucket() const { return double(bucket_count()) / double(node_count()); }
    double singleton_fraction() const { return double(singleton_count) / double(node_count()); }
    /// Bucket whose key equals `key`, or bucket_count() when none does.
    std::size_t find(std::span<const std::uint32_t> key) const;
};

BucketPartition build_buckets(const Graph& g, std::span<const Node> anchors);
BucketPartition build_buckets(const DistanceMatrix& dist, std::span<const Node> anchors);

struct WlOutcome {
    Node guess = 0;
    bool correct = false;
    std::size_t bucket_size = 0;
};

/// Bayes-optimal WL-bounded decoder: every member of v0's bucket has the same
/// posterior, so guess uniformly inside the bucket matching the observations.
WlOutcome wl_trial(const Graph& g, const ContextSet& ctx, Rng& rng);
WlOutcome wl_trial(const BucketPartition& buckets, const ContextSet& ctx, Rng& rng);

enum class RadiusSource {
    TreeProxy,   // psi(y_i) from the tree kernel table
    ExactFull,   // d_t(a_i, v0) in the full diffusion metric (ablation)
};

struct LapOptions {
    std::size_t m = 8;
    double t = 1.0;
    RadiusSource radii = RadiusSource::TreeProxy;
    std::size_t max_resamples = 20;
    double affine_tol = kAffineTol;
};

struct LapOutcome {
    Node guess = 0;
    bool correct = false;
    bool degenerate = false;  // anchors stayed affinely dependent
    double margin = 0;
    double sigma_min = 0;
    std::size_t resamples = 0;
    TailEnergy tail;
    std::vector<double> residuals;
};

/// Anchor trilateration decoder: proxy radii from hop counts, a
/// difference-of-spheres solve in the truncated diffusion embedding, then
/// nearest-node decoding. Construct once per (graph, decomposition, table).
class LapPipeline {
public:
    LapPipeline(const Graph& g, const SpectralDecomposition& dec, const TreeKernelTable& table,
                LapOptions options);

    /// Uses the first m + 1 context anchors. Degenerate anchor sets are
    /// replaced by fresh uniform draws from `rng` (observed against v0) up to
    /// `max_resamples` times.
    LapOutcome run(const ContextSet& ctx, Rng& rng) const;

    const DiffusionEmbedding& embedding() const { return embedding_; }
    const LapOptions& options() const { return options_; }

private:
    double radius(Node anchor, std::uint32_t hops, Node hidden) const;

    const Graph& graph_;
    const SpectralDecomposition& dec_;
    const TreeKernelTable& table_;
    LapOptions options_;
    DiffusionEmbedding embedding_;
};

LapOutcome lap_trial(const Graph& g, const SpectralDecomposition& dec, const TreeKernelTable& table,
                     const ContextSet& ctx, const LapOptions& options, Rng& rng);

/// Monte Carlo mean of S/n (singleton fraction) over random anchor sets.
double singleton_probability(const Graph& g, std::size_t k, std::size_t trials, std::uint64_t seed);

struct SeparationConfig {
    std::vector<std::size_t> n_values{512, 1024, 2048};
    int r = 3;
    std::vector<std::size_t> k_values{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::size_t trials = 500;
    std::uint64_t seed = 1;
    std::size_t m = 8;
    double t = 1.0;
    double tail_eps = 1e-12;
    bool exact_ablation = false;  // adds LAP_EXACT rows
    unsigned threads = 1;
};

struct SeparationRecord {
    std::string method;  // WL | LAP | LAP_EXACT
    std::size_t n = 0;
    int r = 0;
    std::size_t k = 0;
    std::size_t trials = 0;
    double accuracy = 0;
    double acc_stderr = 0;
    double exp_inv_bucket = 0;
    double singleton_prob = 0;
    double mean_margin = 0;
    std::size_t degenerate_count = 0;
    std::uint64_t seed = 0;
};

struct SeparationResult {
    std::vector<SeparationRecord> records;
    std::vector<int> diameters;  // per n value
};

/// Runs WL and LAP trials over the (n, k) grid on one random r-regular graph
/// per n. Trial contexts come from per-(n, k, trial) streams and are shared by
/// both methods, so results are independent of thread count.
SeparationResult run_separation(const SeparationConfig& config);

/// Header method,n,r,k,trials,accuracy,acc_stderr,exp_inv_bucket,
/// singleton_prob,mean_margin,degenerate_count,seed.
void write_separation_csv(std::ostream& out, std::span<const SeparationRecord> records);

}  // namespace nodeid
