#pragma once

#include "nodeid/graph.hpp"
#include "nodeid/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace nodeid {

/// K_t = exp(-tL) assembled from a full spectral expansion.
struct HeatKernel {
    double t = 0;
    Eigen::MatrixXd values;
    double operator()(Node u, Node v) const { return values(u, v); }
};

/// Requires all n eigenpairs. Throws std::invalid_argument for t <= 0.
HeatKernel heat_kernel(const SpectralDecomposition& dec, double t);

/// d_t(u,v) = sqrt(sum_{j>=1} e^{-2 t lambda_j} (phi_j(u) - phi_j(v))^2).
/// Requires all n eigenpairs; use diffusion_embedding for truncations.
double diffusion_distance(const SpectralDecomposition& dec, double t, Node u, Node v);

/// Truncated diffusion coordinates (e^{-t lambda_j} phi_j(v))_{j=1..m}.
struct DiffusionEmbedding {
    double t = 0;
    std::size_t m = 0;
    Eigen::MatrixXd coords;  // n x m

    std::size_t node_count() const { return static_cast<std::size_t>(coords.rows()); }
    Eigen::VectorXd point(Node v) const { return coords.row(v).transpose(); }
    double distance(Node u, Node v) const { return (coords.row(u) - coords.row(v)).norm(); }
};

DiffusionEmbedding diffusion_embedding(const SpectralDecomposition& dec, double t, std::size_t m);

// Sparse operators and the heat action exp(-tL) x by scaled Taylor series.
// Used where a dense eigendecomposition is too expensive and as an
// independent route to the spectral formulas.
Eigen::SparseMatrix<double> sparse_normalized_laplacian(const Graph& g);
/// I - A/r for a graph whose interior degree is r (leaves keep the same 1/r
/// off-diagonal weight, as on a truncated regular tree).
Eigen::SparseMatrix<double> regular_laplacian(const Graph& g, int r);
Eigen::VectorXd heat_action(const Eigen::SparseMatrix<double>& L, double t, const Eigen::VectorXd& x);

/// Radial heat kernel of the infinite r-regular tree.
///
/// `radial_t[d]` is the probability that the continuous-time walk started at
/// the root sits at distance d at time t; `p[d] = radial_t[d] / shell_size(d)`
/// is the kernel value k_t(root, y) for any y at distance d. `p2` is the same
/// at time 2t, `kappa = p2[0]`, and `psi[d] = sqrt(2 (kappa - p2[d]))`.
struct TreeKernelTable {
    int r = 3;
    double t = 1;
    int d_max = 0;
    double tail_eps = 1e-12;
    std::size_t series_terms = 0;  // Poisson terms summed (m* + 1)
    std::vector<double> radial_t;
    std::vector<double> p;
    std::vector<double> p2;
    std::vector<double> psi;
    double kappa = 0;
    /// Radial mass at time t over every computed distance (not just d_max).
    double total_mass_t = 0;
    /// Largest d <= d_max such that p, p2 decrease and psi increases strictly
    /// on [0, d] in double precision.
    int strict_limit = 0;
};

double shell_size(int r, int d);

/// q_0 .. q_steps of the discrete radial walk, each of length steps + 2.
std::vector<std::vector<double>> radial_walk_laws(int r, std::size_t steps);

TreeKernelTable tree_radial_kernel(int r, double t, int d_max, double tail_eps = 1e-12);

/// 2 * ceil(log n / log(r - 1)).
int default_tree_d_max(std::size_t n, int r);

/// psi(d) from the table; throws std::out_of_range outside [0, d_max].
double psi_link(const TreeKernelTable& table, int d);

struct StabilityReport {
    int R = 0;
    std::size_t pairs = 0;
    double max_deviation = 0;
    double mean_deviation = 0;
};

/// Samples `samples` pairs (u, v) with SPD(u, v) <= R and reports
/// |d_t^G(u, v) - psi(SPD(u, v))|. This overload reads d_t from a full
/// decomposition.
StabilityReport tree_stability_check(const Graph& g, const SpectralDecomposition& dec, double t, int R,
                                     std::size_t samples, std::uint64_t seed);

/// Same check with d_t from heat-kernel columns (kernel identity), for graphs
/// too large for a dense eigendecomposition. Same seed gives the same pairs.
StabilityReport tree_stability_check(const Graph& g, double t, int R, std::size_t samples,
                                     std::uint64_t seed);

/// Tree-kernel dump: header d,p_t,p_2t,psi; 17 significant digits.
void write_tree_kernel_csv(std::ostream& out, const TreeKernelTable& table);

}  // namespace nodeid
