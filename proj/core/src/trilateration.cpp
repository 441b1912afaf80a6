#include "nodeid/trilateration.hpp"

#include "nodeid/csv.hpp"
#include "nodeid/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace nodeid {

AffineDependence::AffineDependence(double sigma_min)
    : std::runtime_error("anchors are affinely dependent (sigma_min = " + format_real(sigma_min) + ")"),
      sigma_min_(sigma_min) {}

LinearSystem build_system(const Eigen::MatrixXd& points, std::span<const double> radii) {
    const Eigen::Index m = points.cols();
    if (m < 1) throw std::invalid_argument("trilateration needs dimension m >= 1");
    if (points.rows() != m + 1 || static_cast<Eigen::Index>(radii.size()) != m + 1)
        throw std::invalid_argument("trilateration needs exactly m + 1 points and radii");
    const Eigen::RowVectorXd last = points.row(m);
    const double last_sq = last.squaredNorm();
    const double r_last = radii[static_cast<std::size_t>(m)];
    LinearSystem sys{Eigen::MatrixXd(m, m), Eigen::VectorXd(m)};
    for (Eigen::Index i = 0; i < m; ++i) {
        const double r_i = radii[static_cast<std::size_t>(i)];
        sys.A.row(i) = 2.0 * (points.row(i) - last);
        sys.b[i] = points.row(i).squaredNorm() - last_sq + r_last * r_last - r_i * r_i;
    }
    return sys;
}

double smallest_singular_value(const Eigen::MatrixXd& A) {
    if (A.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    return svd.singularValues().minCoeff();
}

Eigen::VectorXd solve(const LinearSystem& system, double affine_tol) {
    if (system.A.rows() != system.A.cols() || system.A.rows() != system.b.size())
        throw std::invalid_argument("system shape mismatch");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(system.A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double sigma_min = svd.singularValues().minCoeff();
    if (!(sigma_min > affine_tol)) throw AffineDependence(sigma_min);
    return svd.solve(system.b);
}

AnchorSet make_anchor_set(Eigen::MatrixXd points, double affine_tol) {
    const Eigen::Index m = points.cols();
    if (m < 1 || points.rows() != m + 1) throw std::invalid_argument("anchor set needs m + 1 points in R^m");
    AnchorSet set;
    Eigen::MatrixXd diffs(m, m);
    for (Eigen::Index i = 0; i < m; ++i) diffs.row(i) = 2.0 * (points.row(i) - points.row(m));
    set.sigma_min = smallest_singular_value(diffs);
    if (!(set.sigma_min > affine_tol)) throw AffineDependence(set.sigma_min);
    set.points = std::move(points);
    return set;
}

AnchorSet make_anchor_set(const DiffusionEmbedding& embedding, std::span<const Node> anchors, double affine_tol) {
    if (anchors.size() != embedding.m + 1)
        throw std::invalid_argument("need exactly m + 1 = " + std::to_string(embedding.m + 1) + " anchors");
    std::vector<Node> sorted(anchors.begin(), anchors.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw AffineDependence(0.0);
    Eigen::MatrixXd points(static_cast<Eigen::Index>(anchors.size()), static_cast<Eigen::Index>(embedding.m));
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        if (anchors[i] >= embedding.node_count()) throw std::out_of_range("anchor node out of range");
        points.row(static_cast<Eigen::Index>(i)) = embedding.coords.row(anchors[i]);
    }
    AnchorSet set = make_anchor_set(std::move(points), affine_tol);
    set.anchors.assign(anchors.begin(), anchors.end());
    return set;
}

TailEnergy tail_energy(const Eigen::VectorXd& z, const Eigen::VectorXd& point, double radius) {
    if (z.size() != point.size()) throw std::invalid_argument("dimension mismatch");
    TailEnergy e;
    e.raw = radius * radius - (z - point).squaredNorm();
    e.clamped = e.raw < 0;
    e.value = std::max(0.0, e.raw);
    return e;
}

TrilaterationSolution trilaterate(const AnchorSet& anchors, std::span<const double> radii, double affine_tol) {
    TrilaterationSolution sol;
    sol.z = solve(build_system(anchors.points, radii), affine_tol);
    sol.sigma_min = anchors.sigma_min;
    const auto count = static_cast<std::size_t>(anchors.points.rows());
    double raw_sum = 0;
    for (std::size_t i = 0; i < count; ++i)
        raw_sum += tail_energy(sol.z, anchors.points.row(static_cast<Eigen::Index>(i)).transpose(), radii[i]).raw;
    sol.tail.raw = raw_sum / double(count);
    sol.tail.clamped = sol.tail.raw < 0;
    sol.tail.value = std::max(0.0, sol.tail.raw);
    sol.residuals.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double sq = (sol.z - anchors.points.row(static_cast<Eigen::Index>(i)).transpose()).squaredNorm();
        sol.residuals[i] = std::abs(sq + sol.tail.value - radii[i] * radii[i]);
    }
    return sol;
}

Decoded decode_nearest(const DiffusionEmbedding& embedding, const Eigen::VectorXd& z) {
    const std::size_t n = embedding.node_count();
    if (n == 0) throw std::invalid_argument("cannot decode against an empty embedding");
    if (static_cast<std::size_t>(z.size()) != embedding.m) throw std::invalid_argument("dimension mismatch");
    double best = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    Node arg = 0;
    for (Node w = 0; w < n; ++w) {
        const double d = (embedding.coords.row(w).transpose() - z).squaredNorm();
        // Strict comparison keeps the smallest index on ties.
        if (d < best) {
            second = best;
            best = d;
            arg = w;
        } else if (d < second) {
            second = d;
        }
    }
    Decoded out{arg, std::sqrt(best), 0.0};
    out.margin = n > 1 ? std::sqrt(second) - out.distance : std::numeric_limits<double>::infinity();
    return out;
}

PerturbationReport perturbation_bound_check(const AnchorSet& anchors, const Eigen::VectorXd& z_true, double delta,
                                            std::size_t trials, std::uint64_t seed) {
    if (delta < 0) throw std::invalid_argument("delta must be non-negative");
    const auto count = static_cast<std::size_t>(anchors.points.rows());
    const Eigen::Index m = anchors.points.cols();
    if (z_true.size() != m) throw std::invalid_argument("dimension mismatch");
    std::vector<double> exact(count);
    for (std::size_t i = 0; i < count; ++i)
        exact[i] = (z_true - anchors.points.row(static_cast<Eigen::Index>(i)).transpose()).norm();

    PerturbationReport report;
    report.sigma_min = anchors.sigma_min;
    const double r_last = exact.back();
    const double r_max = *std::max_element(exact.begin(), exact.end());
    report.bound_ratio =
        std::sqrt(double(m)) * (2.0 * (r_last + r_max) + 2.0 * delta) / anchors.sigma_min;

    // Errors are measured against the exact-radius solution z*, so the
    // report isolates the effect of the radius noise.
    const Eigen::VectorXd z_star = solve(build_system(anchors.points, exact), 0.0);
    std::vector<double> noisy(count);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        // Unit noise per trial, scaled by delta, so different deltas share one
        // noise pattern.
        Rng rng = make_stream(seed, trial);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (std::size_t i = 0; i < count; ++i) noisy[i] = exact[i] + delta * unit(rng);
        const Eigen::VectorXd z = solve(build_system(anchors.points, noisy), 0.0);
        report.max_error = std::max(report.max_error, (z - z_star).norm());
    }
    report.ratio = delta > 0 ? report.max_error / delta : 0.0;
    return report;
}

}  // namespace nodeid
