#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>

namespace nodeid {

struct ClosestPair {
    double distance = std::numeric_limits<double>::infinity();
    std::size_t first = 0;
    std::size_t second = 0;
};

/// Exhaustive O(n^2 d) closest pair among the rows of `points`.
inline ClosestPair closest_pair(const Eigen::MatrixXd& points) {
    ClosestPair best;
    const Eigen::Index n = points.rows();
    // Column-major rows are strided; transpose once so each point is contiguous.
    const Eigen::MatrixXd cols = points.transpose();
    double best_sq = std::numeric_limits<double>::infinity();
    for (Eigen::Index u = 0; u < n; ++u) {
        for (Eigen::Index v = u + 1; v < n; ++v) {
            const double sq = (cols.col(u) - cols.col(v)).squaredNorm();
            if (sq < best_sq) {
                best_sq = sq;
                best.first = static_cast<std::size_t>(u);
                best.second = static_cast<std::size_t>(v);
            }
        }
    }
    if (n >= 2) best.distance = std::sqrt(best_sq);
    return best;
}

}  // namespace nodeid
