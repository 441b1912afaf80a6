#include "nodeid/spectral.hpp"

#include "nodeid/csv.hpp"
#include "nodeid/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace nodeid {

const EigenGroup& SpectralDecomposition::group_of(std::size_t j) const {
    for (const auto& g : groups)
        if (j >= g.begin && j < g.end) return g;
    throw std::out_of_range("eigenpair index " + std::to_string(j) + " not retained");
}

Eigen::MatrixXd normalized_laplacian(const Graph& g) {
    const auto n = static_cast<Eigen::Index>(g.node_count());
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n);
    for (Node u = 0; u < g.node_count(); ++u) {
        if (g.degree(u) == 0)
            throw std::domain_error("normalized Laplacian undefined: node " + std::to_string(u) +
                                    " is isolated");
        for (Node v : g.neighbors(u)) {
            // sqrt of an exact square is exact, so regular graphs get exactly -1/r.
            L(u, v) = -1.0 / std::sqrt(static_cast<double>(g.degree(u)) * static_cast<double>(g.degree(v)));
        }
    }
    return L;
}

namespace {

std::vector<EigenGroup> group_eigenvalues(const Eigen::VectorXd& values, double threshold) {
    std::vector<EigenGroup> groups;
    const auto count = static_cast<std::size_t>(values.size());
    std::size_t begin = 0;
    for (std::size_t j = 1; j <= count; ++j) {
        if (j == count || values[static_cast<Eigen::Index>(j)] - values[static_cast<Eigen::Index>(j - 1)] > threshold) {
            groups.push_back({begin, j});
            begin = j;
        }
    }
    return groups;
}

}  // namespace

SpectralDecomposition eigendecompose(const Eigen::MatrixXd& laplacian, std::size_t count, double group_tol) {
    const auto n = static_cast<std::size_t>(laplacian.rows());
    if (laplacian.rows() != laplacian.cols()) throw std::invalid_argument("matrix is not square");
    if (count < 1 || count > n)
        throw std::invalid_argument("eigenpair count " + std::to_string(count) + " outside [1, " +
                                    std::to_string(n) + "]");
    if (!(group_tol > 0)) throw std::invalid_argument("group_tol must be positive");
    const double asym = (laplacian - laplacian.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12)
        throw std::invalid_argument("matrix is not symmetric (max asymmetry " + format_real(asym) + ")");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolver did not converge");

    const auto& all = solver.eigenvalues();
    const double range = all[all.size() - 1] - all[0];

    SpectralDecomposition dec;
    dec.group_tol = group_tol;
    dec.group_threshold = group_tol * (range > 0 ? range : 1.0);
    const auto k = static_cast<Eigen::Index>(count);
    dec.eigenvalues = all.head(k);
    dec.eigenvectors = solver.eigenvectors().leftCols(k);
    dec.groups = group_eigenvalues(dec.eigenvalues, dec.group_threshold);
    dec.last_group_partial = count < n && all[k] - all[k - 1] <= dec.group_threshold;
    return dec;
}

SpectralDecomposition graph_spectrum(const Graph& g, std::optional<std::size_t> count) {
    return eigendecompose(normalized_laplacian(g), count.value_or(g.node_count()));
}

std::size_t PositionalEncoding::u_index(std::size_t j, std::size_t k) const {
    if (j < 1 || j >= k || k > M) throw std::out_of_range("cross-term index out of range");
    // Pairs (a, b) with a < j come first: sum_{a=1}^{j-1} (M - a) of them.
    const std::size_t before = (j - 1) * M - (j - 1) * j / 2;
    return u_offset() + before + (k - j - 1);
}

PositionalEncoding build_psi(const SpectralDecomposition& dec, std::size_t M) {
    if (M < 1) throw std::invalid_argument("PE dimension M must be at least 1");
    const std::size_t n = dec.node_count();
    PositionalEncoding pe;
    if (n >= 1 && M > n - 1) {
        pe.requested_M = M;
        M = n - 1;
        if (M < 1) throw std::invalid_argument("graph has no nonzero eigenpairs");
    }
    if (dec.size() < M + 1)
        throw std::invalid_argument("decomposition holds " + std::to_string(dec.size()) +
                                    " eigenpairs; PE with M=" + std::to_string(M) + " needs " +
                                    std::to_string(M + 1));
    pe.M = M;
    pe.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(pe.dim()));
    for (std::size_t v = 0; v < n; ++v) {
        const auto row = static_cast<Eigen::Index>(v);
        std::size_t col = pe.u_offset();
        for (std::size_t i = 1; i <= M; ++i) {
            const double phi = dec.eigenvectors(row, static_cast<Eigen::Index>(i));
            pe.values(row, static_cast<Eigen::Index>(i - 1)) = dec.eigenvalue(i);
            pe.values(row, static_cast<Eigen::Index>(M + i - 1)) = phi * phi;
        }
        for (std::size_t j = 1; j <= M; ++j) {
            const double pj = dec.eigenvectors(row, static_cast<Eigen::Index>(j));
            for (std::size_t k = j + 1; k <= M; ++k) {
                const double pk = dec.eigenvectors(row, static_cast<Eigen::Index>(k));
                pe.values(row, static_cast<Eigen::Index>(col++)) = std::abs(pj * pk);
            }
        }
    }
    return pe;
}

SpectralDecomposition apply_sign_flips(const SpectralDecomposition& dec, std::span<const int> signs) {
    if (signs.size() != dec.size())
        throw std::invalid_argument("sign vector length does not match eigenpair count");
    SpectralDecomposition out = dec;
    for (std::size_t j = 0; j < signs.size(); ++j) {
        if (signs[j] != 1 && signs[j] != -1) throw std::invalid_argument("signs must be +1 or -1");
        if (signs[j] == -1) out.eigenvectors.col(static_cast<Eigen::Index>(j)) *= -1.0;
    }
    return out;
}

SpectralDecomposition apply_subspace_rotation(const SpectralDecomposition& dec, EigenGroup group,
                                              const Eigen::MatrixXd& Q) {
    if (group.begin >= group.end || group.end > dec.size())
        throw std::invalid_argument("eigen group out of range");
    const auto size = static_cast<Eigen::Index>(group.size());
    if (Q.rows() != size || Q.cols() != size)
        throw std::invalid_argument("rotation size does not match group size");
    const double orth = (Q.transpose() * Q - Eigen::MatrixXd::Identity(size, size)).cwiseAbs().maxCoeff();
    if (orth > 1e-10) throw std::invalid_argument("Q is not orthogonal (deviation " + format_real(orth) + ")");
    const double spread = dec.eigenvalue(group.end - 1) - dec.eigenvalue(group.begin);
    if (spread > dec.group_threshold)
        throw std::invalid_argument("group spans distinct eigenvalues (spread " + format_real(spread) + ")");

    SpectralDecomposition out = dec;
    const auto first = static_cast<Eigen::Index>(group.begin);
    out.eigenvectors.middleCols(first, size) = dec.eigenvectors.middleCols(first, size) * Q;
    return out;
}

Eigen::MatrixXd random_orthogonal(std::size_t size, Rng& rng) {
    std::normal_distribution<double> normal;
    const auto s = static_cast<Eigen::Index>(size);
    Eigen::MatrixXd G(s, s);
    for (Eigen::Index j = 0; j < s; ++j)
        for (Eigen::Index i = 0; i < s; ++i) G(i, j) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(s, s);
    const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < s; ++j)
        if (R(j, j) < 0) Q.col(j) *= -1.0;
    return Q;
}

double min_pairwise_separation(const PositionalEncoding& pe) {
    if (pe.node_count() < 2) throw std::invalid_argument("separation needs at least two nodes");
    return closest_pair(pe.values).distance;
}

void write_pe_csv(std::ostream& out, const PositionalEncoding& pe) {
    CsvWriter csv(out);
    csv.field("node");
    for (std::size_t i = 1; i <= pe.M; ++i) csv.field("lambda_" + std::to_string(i));
    for (std::size_t i = 1; i <= pe.M; ++i) csv.field("s_" + std::to_string(i));
    for (std::size_t j = 1; j <= pe.M; ++j)
        for (std::size_t k = j + 1; k <= pe.M; ++k)
            csv.field("u_" + std::to_string(j) + "_" + std::to_string(k));
    csv.end_row();
    for (Eigen::Index v = 0; v < pe.values.rows(); ++v) {
        csv.field(static_cast<std::int64_t>(v));
        for (Eigen::Index c = 0; c < pe.values.cols(); ++c) csv.field(pe.values(v, c));
        csv.end_row();
    }
}

}  // namespace nodeid
