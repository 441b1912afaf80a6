#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace nodeid {

/// Gaussian random-wave surrogate: per node, M i.i.d. N(0, 1) coordinates
/// standing in for (phi_1(v), ..., phi_M(v)) up to scale.
struct WaveEnsemble {
    std::size_t M = 0;
    std::uint64_t seed = 0;
    Eigen::MatrixXd g;  // n x M

    std::size_t node_count() const { return static_cast<std::size_t>(g.rows()); }
};

WaveEnsemble sample_ensemble(std::size_t n, std::size_t M, std::uint64_t seed);

/// Node-dependent PE part: (g_i^2)_{i<=M} then (|g_j g_k|)_{j<k}.
Eigen::VectorXd chi(std::span<const double> g);
/// Row-wise chi of every node, n x (M + M(M-1)/2).
Eigen::MatrixXd chi(const WaveEnsemble& ensemble);

struct SmallBallEstimate {
    std::size_t M = 0;
    double eps = 0;
    std::size_t trials = 0;
    std::size_t hits = 0;
    double collision_prob = 0;
    double std_error = 0;
};

/// Monte Carlo Pr(|chi(u) - chi(v)| <= eps) over independent node pairs.
std::vector<SmallBallEstimate> smallball_estimate(std::size_t M, std::span<const double> eps_grid,
                                                  std::size_t pair_trials, std::uint64_t seed,
                                                  unsigned threads = 1);

struct MinSeparationSample {
    std::size_t n = 0;
    std::size_t M = 0;
    std::size_t trial = 0;
    double min_sep = 0;
};

struct MinSeparationSummary {
    std::vector<MinSeparationSample> samples;
    std::vector<double> median_by_n;
    std::size_t exact_collisions = 0;
    /// -slope of log(median min separation) against log n; informational.
    double fitted_alpha = 0;
};

/// M = ceil(C log2 n).
std::size_t wave_dimension(std::size_t n, double C);

/// Exhaustive minimum chi separation for ensembles over `n_grid`.
MinSeparationSummary min_separation_scaling(std::span<const std::size_t> n_grid, double C, std::size_t trials,
                                            std::uint64_t seed, unsigned threads = 1);

/// CSV: M,eps,trials,collision_prob,stderr
void write_smallball_csv(std::ostream& out, std::span<const SmallBallEstimate> rows);
/// CSV: n,M,trial,min_sep
void write_min_separation_csv(std::ostream& out, std::span<const MinSeparationSample> rows);

}  // namespace nodeid
