#include "nodeid/randomwave.hpp"

#include "nodeid/csv.hpp"
#include "nodeid/geometry.hpp"
#include "nodeid/parallel.hpp"
#include "nodeid/random.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

namespace nodeid {

WaveEnsemble sample_ensemble(std::size_t n, std::size_t M, std::uint64_t seed) {
    if (n < 1 || M < 1) throw std::invalid_argument("ensemble needs n >= 1 and M >= 1");
    WaveEnsemble ens;
    ens.M = M;
    ens.seed = seed;
    ens.g.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(M));
    Rng rng(stream_seed(seed, 0x77617665ULL));
    std::normal_distribution<double> normal;
    for (Eigen::Index v = 0; v < ens.g.rows(); ++v)
        for (Eigen::Index i = 0; i < ens.g.cols(); ++i) ens.g(v, i) = normal(rng);
    return ens;
}

Eigen::VectorXd chi(std::span<const double> g) {
    const std::size_t M = g.size();
    Eigen::VectorXd out(static_cast<Eigen::Index>(M + M * (M - 1) / 2));
    Eigen::Index c = 0;
    for (double x : g) out[c++] = x * x;
    for (std::size_t j = 0; j < M; ++j)
        for (std::size_t k = j + 1; k < M; ++k) out[c++] = std::abs(g[j] * g[k]);
    return out;
}

Eigen::MatrixXd chi(const WaveEnsemble& ensemble) {
    const auto M = ensemble.M;
    Eigen::MatrixXd out(ensemble.g.rows(), static_cast<Eigen::Index>(M + M * (M - 1) / 2));
    std::vector<double> row(M);
    for (Eigen::Index v = 0; v < ensemble.g.rows(); ++v) {
        for (std::size_t i = 0; i < M; ++i) row[i] = ensemble.g(v, static_cast<Eigen::Index>(i));
        out.row(v) = chi(row).transpose();
    }
    return out;
}

std::vector<SmallBallEstimate> smallball_estimate(std::size_t M, std::span<const double> eps_grid,
                                                  std::size_t pair_trials, std::uint64_t seed, unsigned threads) {
    if (M < 1) throw std::invalid_argument("M must be at least 1");
    if (pair_trials == 0) throw std::invalid_argument("pair_trials must be positive");
    for (double eps : eps_grid)
        if (!(eps >= 0)) throw std::invalid_argument("eps must be non-negative");

    constexpr std::size_t kChunk = 1 << 14;
    const std::size_t chunks = (pair_trials + kChunk - 1) / kChunk;
    std::vector<std::vector<std::size_t>> hits(chunks, std::vector<std::size_t>(eps_grid.size(), 0));
    const std::uint64_t base = stream_seed(seed, M);
    parallel_for(chunks, threads, [&](std::size_t c) {
        Rng rng = make_stream(base, c);
        std::normal_distribution<double> normal;
        std::vector<double> gu(M), gv(M);
        const std::size_t last = std::min(pair_trials, (c + 1) * kChunk);
        for (std::size_t trial = c * kChunk; trial < last; ++trial) {
            for (auto& x : gu) x = normal(rng);
            for (auto& x : gv) x = normal(rng);
            const double dist = (chi(gu) - chi(gv)).norm();
            for (std::size_t e = 0; e < eps_grid.size(); ++e)
                if (dist <= eps_grid[e]) ++hits[c][e];
        }
    });

    std::vector<SmallBallEstimate> out;
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        SmallBallEstimate est;
        est.M = M;
        est.eps = eps_grid[e];
        est.trials = pair_trials;
        for (const auto& h : hits) est.hits += h[e];
        const double p = double(est.hits) / double(pair_trials);
        est.collision_prob = p;
        est.std_error = std::sqrt(p * (1 - p) / double(pair_trials));
        out.push_back(est);
    }
    return out;
}

std::size_t wave_dimension(std::size_t n, double C) {
    if (n < 2 || !(C > 0)) throw std::invalid_argument("wave dimension needs n >= 2 and C > 0");
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(C * std::log2(double(n)))));
}

MinSeparationSummary min_separation_scaling(std::span<const std::size_t> n_grid, double C, std::size_t trials,
                                            std::uint64_t seed, unsigned threads) {
    if (n_grid.empty() || trials == 0) throw std::invalid_argument("empty n grid or zero trials");
    if (!std::is_sorted(n_grid.begin(), n_grid.end())) throw std::invalid_argument("n grid must be ascending");
    MinSeparationSummary summary;
    for (std::size_t n : n_grid) {
        const std::size_t M = wave_dimension(n, C);
        std::vector<MinSeparationSample> rows(trials);
        parallel_for(trials, threads, [&](std::size_t trial) {
            const auto ens = sample_ensemble(n, M, stream_seed(stream_seed(seed, n), trial));
            rows[trial] = {n, M, trial, closest_pair(chi(ens)).distance};
        });
        std::vector<double> seps;
        for (const auto& row : rows) {
            if (row.min_sep == 0) ++summary.exact_collisions;
            seps.push_back(row.min_sep);
            summary.samples.push_back(row);
        }
        std::sort(seps.begin(), seps.end());
        const std::size_t mid = seps.size() / 2;
        summary.median_by_n.push_back(seps.size() % 2 ? seps[mid] : 0.5 * (seps[mid - 1] + seps[mid]));
    }
    if (n_grid.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double count = double(n_grid.size());
        for (std::size_t i = 0; i < n_grid.size(); ++i) {
            const double x = std::log(double(n_grid[i]));
            const double y = std::log(summary.median_by_n[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double denom = count * sxx - sx * sx;
        if (denom > 0) summary.fitted_alpha = -(count * sxy - sx * sy) / denom;
    }
    return summary;
}

void write_smallball_csv(std::ostream& out, std::span<const SmallBallEstimate> rows) {
    CsvWriter csv(out);
    csv.field("M").field("eps").field("trials").field("collision_prob").field("stderr").end_row();
    for (const auto& r : rows)
        csv.field(static_cast<std::uint64_t>(r.M))
            .field(r.eps)
            .field(static_cast<std::uint64_t>(r.trials))
            .field(r.collision_prob)
            .field(r.std_error)
            .end_row();
}

void write_min_separation_csv(std::ostream& out, std::span<const MinSeparationSample> rows) {
    CsvWriter csv(out);
    csv.field("n").field("M").field("trial").field("min_sep").end_row();
    for (const auto& r : rows)
        csv.field(static_cast<std::uint64_t>(r.n))
            .field(static_cast<std::uint64_t>(r.M))
            .field(static_cast<std::uint64_t>(r.trial))
            .field(r.min_sep)
            .end_row();
}

}  // namespace nodeid
