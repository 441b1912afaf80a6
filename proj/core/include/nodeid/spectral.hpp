#pragma once

#include "nodeid/graph.hpp"
#include "nodeid/random.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace nodeid {

/// Half-open index range [begin, end) of eigenpairs sharing one eigenvalue.
struct EigenGroup {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
    friend bool operator==(const EigenGroup&, const EigenGroup&) = default;
};

/// Smallest eigenpairs of a symmetric matrix in ascending order.
///
/// Column j of `eigenvectors` is the unit eigenvector for `eigenvalues[j]`.
/// `groups` partitions the retained indices into numerically equal
/// eigenvalues; inside a group the basis carries no ordering contract.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    std::vector<EigenGroup> groups;
    double group_tol = 1e-8;        // relative to the spectral range
    double group_threshold = 1e-8;  // absolute gap used for grouping
    /// Set when the last retained group continues past the retained count.
    bool last_group_partial = false;

    std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
    std::size_t node_count() const { return static_cast<std::size_t>(eigenvectors.rows()); }
    double eigenvalue(std::size_t j) const { return eigenvalues[static_cast<Eigen::Index>(j)]; }
    auto eigenvector(std::size_t j) const { return eigenvectors.col(static_cast<Eigen::Index>(j)); }
    /// Group containing index j.
    const EigenGroup& group_of(std::size_t j) const;
};

/// I - D^{-1/2} A D^{-1/2}. Throws std::domain_error on isolated nodes.
Eigen::MatrixXd normalized_laplacian(const Graph& g);

/// Dense symmetric eigensolver; keeps the `count` smallest eigenpairs.
/// Throws std::invalid_argument for non-symmetric input or bad count and
/// std::runtime_error if the solver does not converge.
SpectralDecomposition eigendecompose(const Eigen::MatrixXd& laplacian, std::size_t count,
                                     double group_tol = 1e-8);

/// Convenience: eigendecompose(normalized_laplacian(g), count or n).
SpectralDecomposition graph_spectrum(const Graph& g, std::optional<std::size_t> count = std::nullopt);

/// Sign- and basis-invariant node features built from the first M nonzero
/// eigenpairs: per node (lambda_1..lambda_M, s(v), u(v)) with
/// s_i = phi_i(v)^2 and u_{jk} = |phi_j(v) phi_k(v)| for j < k.
struct PositionalEncoding {
    std::size_t M = 0;
    Eigen::MatrixXd values;  // one row per node, dim() columns
    /// Requested M when it was clamped to n - 1.
    std::optional<std::size_t> requested_M;

    static std::size_t dim_for(std::size_t M) { return 2 * M + M * (M - 1) / 2; }
    std::size_t dim() const { return dim_for(M); }
    std::size_t node_count() const { return static_cast<std::size_t>(values.rows()); }

    std::size_t lambda_offset() const { return 0; }
    std::size_t s_offset() const { return M; }
    std::size_t u_offset() const { return 2 * M; }
    /// Column of u_{j,k} with 1 <= j < k <= M.
    std::size_t u_index(std::size_t j, std::size_t k) const;
};

PositionalEncoding build_psi(const SpectralDecomposition& dec, std::size_t M);

/// Copy with eigenvector j multiplied by signs[j] (each +1 or -1).
SpectralDecomposition apply_sign_flips(const SpectralDecomposition& dec, std::span<const int> signs);

/// Copy with the eigenvectors of `group` replaced by V_group * Q.
/// Q must be orthogonal within 1e-10 and the group must not straddle
/// distinct eigenvalues.
SpectralDecomposition apply_subspace_rotation(const SpectralDecomposition& dec, EigenGroup group,
                                              const Eigen::MatrixXd& Q);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Eigen::MatrixXd random_orthogonal(std::size_t size, Rng& rng);

/// Minimum Euclidean distance between the PE vectors of distinct nodes.
double min_pairwise_separation(const PositionalEncoding& pe);

/// PE dump: header node,lambda_1..,s_1..,u_1_2..; 17 significant digits.
void write_pe_csv(std::ostream& out, const PositionalEncoding& pe);

}  // namespace nodeid
