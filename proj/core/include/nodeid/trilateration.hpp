#pragma once

#include "nodeid/diffusion.hpp"
#include "nodeid/graph.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace nodeid {

inline constexpr double kAffineTol = 1e-10;

/// Raised when anchor points are (numerically) affinely dependent.
class AffineDependence : public std::runtime_error {
public:
    explicit AffineDependence(double sigma_min);
    double sigma_min() const { return sigma_min_; }

private:
    double sigma_min_;
};

/// Difference-of-spheres system A z = b. Row i of A is 2 (p_i - p_last) and
/// b_i = |p_i|^2 - |p_last|^2 + r_last^2 - r_i^2.
struct LinearSystem {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
};

/// `points` holds the m + 1 anchor coordinates as rows (m columns).
LinearSystem build_system(const Eigen::MatrixXd& points, std::span<const double> radii);

double smallest_singular_value(const Eigen::MatrixXd& A);

/// Unique solution of A z = b via SVD. Throws AffineDependence when
/// sigma_min(A) <= affine_tol.
Eigen::VectorXd solve(const LinearSystem& system, double affine_tol = kAffineTol);

struct AnchorSet {
    std::vector<Node> anchors;  // empty for synthetic point sets
    Eigen::MatrixXd points;     // (m + 1) x m
    double sigma_min = 0;

    std::size_t dimension() const { return static_cast<std::size_t>(points.cols()); }
};

/// Anchor set from explicit points; throws AffineDependence if degenerate.
AnchorSet make_anchor_set(Eigen::MatrixXd points, double affine_tol = kAffineTol);
/// Anchor set from graph nodes; needs exactly m + 1 distinct nodes.
AnchorSet make_anchor_set(const DiffusionEmbedding& embedding, std::span<const Node> anchors,
                          double affine_tol = kAffineTol);

struct TailEnergy {
    double value = 0;  // clamped at 0
    double raw = 0;
    bool clamped = false;
};

/// r_i^2 - |z - p_i|^2: squared norm of the coordinates beyond m.
TailEnergy tail_energy(const Eigen::VectorXd& z, const Eigen::VectorXd& point, double radius);

struct TrilaterationSolution {
    Eigen::VectorXd z;
    TailEnergy tail;                // averaged over anchors
    std::vector<double> residuals;  // | |z - p_i|^2 + tail - r_i^2 |
    double sigma_min = 0;
};

TrilaterationSolution trilaterate(const AnchorSet& anchors, std::span<const double> radii,
                                  double affine_tol = kAffineTol);

struct Decoded {
    Node node = 0;
    double distance = 0;
    double margin = 0;  // second-best distance minus best
};

/// Nearest embedded node to z; ties go to the smallest node index.
Decoded decode_nearest(const DiffusionEmbedding& embedding, const Eigen::VectorXd& z);

struct PerturbationReport {
    double max_error = 0;
    double ratio = 0;        // max_error / delta (0 when delta = 0)
    double bound_ratio = 0;  // sqrt(m) (2 (r_last + r_max) + 2 delta) / sigma_min
    double sigma_min = 0;
};

/// Perturbs every exact radius by U[-delta, delta], re-solves, and reports
/// the worst coordinate error over `trials`.
PerturbationReport perturbation_bound_check(const AnchorSet& anchors, const Eigen::VectorXd& z_true,
                                            double delta, std::size_t trials, std::uint64_t seed);

}  // namespace nodeid
