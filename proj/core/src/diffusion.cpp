#include "nodeid/diffusion.hpp"

#include "nodeid/csv.hpp"
#include "nodeid/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>

namespace nodeid {

namespace {

void require_positive_time(double t) {
    if (!(t > 0) || !std::isfinite(t)) throw std::invalid_argument("diffusion time t must be positive");
}

void require_full(const SpectralDecomposition& dec) {
    if (dec.size() != dec.node_count())
        throw std::invalid_argument("operation needs the full decomposition (" + std::to_string(dec.node_count()) +
                                    " eigenpairs, have " + std::to_string(dec.size()) + ")");
}

}  // namespace

HeatKernel heat_kernel(const SpectralDecomposition& dec, double t) {
    require_positive_time(t);
    require_full(dec);
    const Eigen::VectorXd decay = (-t * dec.eigenvalues.array()).exp();
    HeatKernel K{t, dec.eigenvectors * decay.asDiagonal() * dec.eigenvectors.transpose()};
    // Symmetric by construction up to rounding; make it exact.
    K.values = 0.5 * (K.values + K.values.transpose()).eval();
    return K;
}

double diffusion_distance(const SpectralDecomposition& dec, double t, Node u, Node v) {
    require_positive_time(t);
    require_full(dec);
    if (u >= dec.node_count() || v >= dec.node_count()) throw std::out_of_range("node out of range");
    double sum = 0;
    for (std::size_t j = 1; j < dec.size(); ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        const double diff = dec.eigenvectors(u, col) - dec.eigenvectors(v, col);
        sum += std::exp(-2.0 * t * dec.eigenvalue(j)) * diff * diff;
    }
    return std::sqrt(sum);
}

DiffusionEmbedding diffusion_embedding(const SpectralDecomposition& dec, double t, std::size_t m) {
    require_positive_time(t);
    if (m < 1 || m + 1 > dec.node_count())
        throw std::invalid_argument("embedding dimension m=" + std::to_string(m) + " outside [1, n-1]");
    if (m + 1 > dec.size())
        throw std::invalid_argument("decomposition holds too few eigenpairs for m=" + std::to_string(m));
    DiffusionEmbedding emb;
    emb.t = t;
    emb.m = m;
    const auto cols = static_cast<Eigen::Index>(m);
    const Eigen::VectorXd decay = (-t * dec.eigenvalues.segment(1, cols).array()).exp();
    emb.coords = dec.eigenvectors.middleCols(1, cols) * decay.asDiagonal();
    return emb;
}

Eigen::SparseMatrix<double> sparse_normalized_laplacian(const Graph& g) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(g.node_count() + 2 * g.edge_count());
    for (Node u = 0; u < g.node_count(); ++u) {
        if (g.degree(u) == 0) throw std::domain_error("normalized Laplacian undefined for isolated node");
        entries.emplace_back(u, u, 1.0);
        for (Node v : g.neighbors(u))
            entries.emplace_back(u, v, -1.0 / std::sqrt(double(g.degree(u)) * double(g.degree(v))));
    }
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(entries.begin(), entries.end());
    return L;
}

Eigen::SparseMatrix<double> regular_laplacian(const Graph& g, int r) {
    if (r < 1) throw std::invalid_argument("degree must be positive");
    const auto n = static_cast<Eigen::Index>(g.node_count());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(g.node_count() + 2 * g.edge_count());
    for (Node u = 0; u < g.node_count(); ++u) {
        entries.emplace_back(u, u, 1.0);
        for (Node v : g.neighbors(u)) entries.emplace_back(u, v, -1.0 / r);
    }
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(entries.begin(), entries.end());
    return L;
}

Eigen::VectorXd heat_action(const Eigen::SparseMatrix<double>& L, double t, const Eigen::VectorXd& x) {
    require_positive_time(t);
    // ||L||_1 bounds the spectral radius; pick substeps with h ||L||_1 <= 1 so
    // each Taylor series converges fast with little cancellation.
    double norm1 = 0;
    for (Eigen::Index c = 0; c < L.outerSize(); ++c) {
        double col = 0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(L, c); it; ++it) col += std::abs(it.value());
        norm1 = std::max(norm1, col);
    }
    const auto steps = std::max<long>(1, static_cast<long>(std::ceil(t * norm1)));
    const double h = t / static_cast<double>(steps);
    Eigen::VectorXd y = x;
    for (long s = 0; s < steps; ++s) {
        Eigen::VectorXd term = y;
        Eigen::VectorXd acc = y;
        for (int k = 1; k < 200; ++k) {
            term = (-h / k) * (L * term);
            acc += term;
            if (term.lpNorm<Eigen::Infinity>() <= 1e-18 * acc.lpNorm<Eigen::Infinity>()) break;
        }
        y = std::move(acc);
    }
    return y;
}

double shell_size(int r, int d) {
    if (d < 0) throw std::invalid_argument("negative distance");
    return d == 0 ? 1.0 : r * std::pow(double(r - 1), d - 1);
}

std::vector<std::vector<double>> radial_walk_laws(int r, std::size_t steps) {
    if (r < 2) throw std::invalid_argument("radial walk needs r >= 2");
    const std::size_t len = steps + 2;
    const double down = 1.0 / r, up = double(r - 1) / r;
    std::vector<std::vector<double>> laws;
    laws.reserve(steps + 1);
    std::vector<double> q(len, 0.0);
    q[0] = 1.0;
    laws.push_back(q);
    for (std::size_t m = 0; m < steps; ++m) {
        std::vector<double> next(len, 0.0);
        // From 0 every neighbor is one step out; from d >= 1 one neighbor is
        // closer and r - 1 are farther.
        next[0] = down * q[1];
        next[1] = q[0] + (len > 2 ? down * q[2] : 0.0);
        for (std::size_t d = 2; d < len; ++d)
            next[d] = up * q[d - 1] + (d + 1 < len ? down * q[d + 1] : 0.0);
        q = std::move(next);
        laws.push_back(q);
    }
    return laws;
}

int default_tree_d_max(std::size_t n, int r) {
    if (r < 3 || n < 2) throw std::invalid_argument("default d_max needs r >= 3 and n >= 2");
    return 2 * static_cast<int>(std::ceil(std::log(double(n)) / std::log(double(r - 1))));
}

TreeKernelTable tree_radial_kernel(int r, double t, int d_max, double tail_eps) {
    if (r < 3) throw std::invalid_argument("tree degree r must be at least 3");
    require_positive_time(t);
    if (d_max < 1) throw std::invalid_argument("d_max must be at least 1");
    if (!(tail_eps > 0 && tail_eps <= 1e-3)) throw std::invalid_argument("tail_eps must lie in (0, 1e-3]");

    // Truncate where the Poisson(2t) tail drops below tail_eps; the t series
    // has a lighter tail. Keep at least d_max + 2 terms so every tabulated
    // distance (and d_max + 1) receives positive mass.
    const double T = 2 * t;
    std::size_t m_star = 0;
    double cumulative = std::exp(-T);
    double weight = cumulative;
    while (1.0 - cumulative >= tail_eps) {
        ++m_star;
        weight *= T / double(m_star);
        cumulative += weight;
        if (m_star > 100000) throw std::runtime_error("Poisson truncation did not converge");
    }
    const std::size_t steps = std::max<std::size_t>(m_star, static_cast<std::size_t>(d_max) + 1);
    const auto laws = radial_walk_laws(r, steps);
    const std::size_t len = steps + 2;

    std::vector<double> radial_t(len, 0.0), radial_2t(len, 0.0);
    for (std::size_t m = 0; m <= steps; ++m) {
        const double lm = std::lgamma(double(m) + 1.0);
        const double w1 = std::exp(-t + double(m) * std::log(t) - lm);
        const double w2 = std::exp(-T + double(m) * std::log(T) - lm);
        for (std::size_t d = 0; d <= m && d < len; ++d) {
            radial_t[d] += w1 * laws[m][d];
            radial_2t[d] += w2 * laws[m][d];
        }
    }

    TreeKernelTable table;
    table.r = r;
    table.t = t;
    table.d_max = d_max;
    table.tail_eps = tail_eps;
    table.series_terms = steps + 1;
    for (double x : radial_t) table.total_mass_t += x;
    const auto rows = static_cast<std::size_t>(d_max) + 1;
    table.radial_t.assign(radial_t.begin(), radial_t.begin() + static_cast<std::ptrdiff_t>(rows));
    table.p.resize(rows);
    table.p2.resize(rows);
    table.psi.resize(rows);
    for (std::size_t d = 0; d < rows; ++d) {
        const double shell = shell_size(r, static_cast<int>(d));
        table.p[d] = radial_t[d] / shell;
        table.p2[d] = radial_2t[d] / shell;
    }
    table.kappa = table.p2[0];
    for (std::size_t d = 0; d < rows; ++d)
        table.psi[d] = std::sqrt(std::max(0.0, 2.0 * (table.kappa - table.p2[d])));

    table.strict_limit = d_max;
    for (std::size_t d = 1; d < rows; ++d) {
        const bool ok = table.p[d] < table.p[d - 1] && table.p2[d] < table.p2[d - 1] &&
                        table.psi[d] > table.psi[d - 1];
        if (!ok) {
            table.strict_limit = static_cast<int>(d) - 1;
            break;
        }
    }
    return table;
}

double psi_link(const TreeKernelTable& table, int d) {
    if (d < 0 || d > table.d_max)
        throw std::out_of_range("psi_link: distance " + std::to_string(d) + " outside [0, " +
                                std::to_string(table.d_max) + "]");
    return table.psi[static_cast<std::size_t>(d)];
}

namespace {

struct SampledPair {
    Node u, v;
    int hops;
};

std::vector<SampledPair> sample_close_pairs(const Graph& g, int R, std::size_t samples, std::uint64_t seed) {
    if (R < 0) throw std::invalid_argument("radius R must be non-negative");
    Rng rng = make_stream(seed, 0);
    std::uniform_int_distribution<Node> pick(0, static_cast<Node>(g.node_count() - 1));
    std::vector<SampledPair> pairs;
    pairs.reserve(samples);
    std::vector<std::uint32_t> dist(g.node_count(), kUnreachable);
    for (std::size_t s = 0; s < samples; ++s) {
        const Node u = pick(rng);
        std::vector<Node> ball{u};
        dist[u] = 0;
        for (std::size_t head = 0; head < ball.size(); ++head) {
            const Node x = ball[head];
            if (dist[x] == static_cast<std::uint32_t>(R)) continue;
            for (Node w : g.neighbors(x))
                if (dist[w] == kUnreachable) {
                    dist[w] = dist[x] + 1;
                    ball.push_back(w);
                }
        }
        std::uniform_int_distribution<std::size_t> pick_ball(0, ball.size() - 1);
        const Node v = ball[pick_ball(rng)];
        pairs.push_back({u, v, static_cast<int>(dist[v])});
        for (Node x : ball) dist[x] = kUnreachable;
    }
    return pairs;
}

template <typename DistanceFn>
StabilityReport summarize_stability(const Graph& g, double t, int R, std::size_t samples, std::uint64_t seed,
                                    DistanceFn&& distance) {
    const auto r = g.regular_degree();
    if (!r || *r < 3) throw std::invalid_argument("tree stability check needs a regular graph with r >= 3");
    const auto table = tree_radial_kernel(*r, t, std::max(R, 1));
    StabilityReport report;
    report.R = R;
    for (const auto& pair : sample_close_pairs(g, R, samples, seed)) {
        const double dev = std::abs(distance(pair.u, pair.v) - psi_link(table, pair.hops));
        report.max_deviation = std::max(report.max_deviation, dev);
        report.mean_deviation += dev;
        ++report.pairs;
    }
    if (report.pairs) report.mean_deviation /= double(report.pairs);
    return report;
}

}  // namespace

StabilityReport tree_stability_check(const Graph& g, const SpectralDecomposition& dec, double t, int R,
                                     std::size_t samples, std::uint64_t seed) {
    require_full(dec);
    return summarize_stability(g, t, R, samples, seed,
                               [&](Node u, Node v) { return diffusion_distance(dec, t, u, v); });
}

StabilityReport tree_stability_check(const Graph& g, double t, int R, std::size_t samples, std::uint64_t seed) {
    require_positive_time(t);
    const auto L = sparse_normalized_laplacian(g);
    std::map<Node, Eigen::VectorXd> columns;
    auto column = [&](Node u) -> const Eigen::VectorXd& {
        auto it = columns.find(u);
        if (it == columns.end()) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.node_count()));
            e[u] = 1.0;
            it = columns.emplace(u, heat_action(L, 2 * t, e)).first;
        }
        return it->second;
    };
    // d_t^2 = k_2t(u,u) + k_2t(v,v) - 2 k_2t(u,v); the constant mode cancels
    // on regular graphs, so this matches the sum over nonzero eigenpairs.
    return summarize_stability(g, t, R, samples, seed, [&](Node u, Node v) {
        if (u == v) return 0.0;
        const double kuu = column(u)[u];
        const double kuv = column(u)[v];
        const double kvv = column(v)[v];
        return std::sqrt(std::max(0.0, kuu + kvv - 2 * kuv));
    });
}

void write_tree_kernel_csv(std::ostream& out, const TreeKernelTable& table) {
    CsvWriter csv(out);
    csv.field("d").field("p_t").field("p_2t").field("psi").end_row();
    for (std::size_t d = 0; d < table.p.size(); ++d)
        csv.field(static_cast<std::int64_t>(d)).field(table.p[d]).field(table.p2[d]).field(table.psi[d]).end_row();
}

}  // namespace nodeid
