#include "doctest.h"

#include "nodeid/diffusion.hpp"
#include "nodeid/graph.hpp"
#include "nodeid/random.hpp"
#include "nodeid/spectral.hpp"
#include "nodeid/trilateration.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace nodeid;
using doctest::Approx;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = normal(rng);
    return out;
}

std::vector<double> exact_radii(const Eigen::MatrixXd& points, const Eigen::VectorXd& z) {
    std::vector<double> radii;
    for (Eigen::Index i = 0; i < points.rows(); ++i) radii.push_back((points.row(i).transpose() - z).norm());
    return radii;
}

// Both intersections of two circles, by the textbook construction.
std::vector<Eigen::Vector2d> circle_intersections(Eigen::Vector2d c0, double r0, Eigen::Vector2d c1, double r1) {
    const double d = (c1 - c0).norm();
    const double a = (r0 * r0 - r1 * r1 + d * d) / (2 * d);
    const double h = std::sqrt(std::max(0.0, r0 * r0 - a * a));
    const Eigen::Vector2d mid = c0 + a * (c1 - c0) / d;
    const Eigen::Vector2d perp(-(c1 - c0).y() / d, (c1 - c0).x() / d);
    return {mid + h * perp, mid - h * perp};
}

}  // namespace

TEST_CASE("one-dimensional system") {
    Eigen::MatrixXd points(2, 1);
    points << 0, 1;
    const std::vector<double> radii{0.5, 0.5};
    const auto sys = build_system(points, radii);
    CHECK(sys.A(0, 0) == -2.0);
    CHECK(sys.b[0] == -1.0);
    CHECK(solve(sys)[0] == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("two-dimensional example and trivial systems") {
    Eigen::MatrixXd points(3, 2);
    points << 0, 0, 1, 0, 0, 1;
    const double r = std::sqrt(0.5);
    const std::vector<double> radii{r, r, r};
    const auto z = solve(build_system(points, radii));
    CHECK(std::abs(z[0] - 0.5) <= 1e-12);
    CHECK(std::abs(z[1] - 0.5) <= 1e-12);

    const LinearSystem diag{2.0 * Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3)};
    CHECK(solve(diag).norm() == 0.0);
}

TEST_CASE("size mismatches and degenerate anchors are rejected") {
    Eigen::MatrixXd points(3, 2);
    points << 0, 0, 1, 0, 0, 1;
    const std::vector<double> two{1, 1};
    CHECK_THROWS_AS(build_system(points, two), std::invalid_argument);
    CHECK_THROWS_AS(build_system(Eigen::MatrixXd(2, 2), two), std::invalid_argument);

    Eigen::MatrixXd collinear(3, 2);
    collinear << 0, 0, 1, 1, 2, 2;
    const std::vector<double> radii{1, 1, 1};
    CHECK_THROWS_AS(solve(build_system(collinear, radii)), AffineDependence);
    try {
        make_anchor_set(collinear);
        FAIL("expected AffineDependence");
    } catch (const AffineDependence& e) {
        CHECK(e.sigma_min() <= kAffineTol);
    }
}

TEST_CASE("translation covariance") {
    Rng rng(3);
    const Eigen::MatrixXd points = gaussian(4, 3, rng);
    const Eigen::VectorXd z = gaussian(3, 1, rng);
    const Eigen::VectorXd w = gaussian(3, 1, rng);
    const auto base = solve(build_system(points, exact_radii(points, z)));
    const Eigen::MatrixXd shifted = points.rowwise() + w.transpose();
    const auto moved = solve(build_system(shifted, exact_radii(shifted, z + w)));
    CHECK((moved - (base + w)).norm() <= 1e-10);
}

TEST_CASE("plant and recover") {
    Rng rng(11);
    int instances = 0;
    for (int m : {2, 3, 5, 8})
        for (int trial = 0; trial < 50; ++trial) {
            const Eigen::MatrixXd points = gaussian(m + 1, m, rng);
            const Eigen::VectorXd z = gaussian(m, 1, rng);
            const auto anchors = make_anchor_set(points);
            const auto radii = exact_radii(points, z);
            const auto sol = trilaterate(anchors, radii);
            CHECK((sol.z - z).norm() <= 1e-9);
            CHECK(std::abs(sol.tail.raw) <= 1e-9);
            for (double res : sol.residuals) CHECK(res <= 1e-9);
            ++instances;
        }
    CHECK(instances == 200);
}

TEST_CASE("two-circle oracle agrees with the linear solve") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::MatrixXd points = gaussian(3, 2, rng);
        const Eigen::VectorXd z = gaussian(2, 1, rng);
        const auto radii = exact_radii(points, z);
        const auto candidates = circle_intersections(points.row(0).transpose(), radii[0],
                                                     points.row(1).transpose(), radii[1]);
        // The third anchor picks the right intersection.
        const auto third = [&](const Eigen::Vector2d& c) {
            return std::abs((c - points.row(2).transpose()).norm() - radii[2]);
        };
        const Eigen::Vector2d oracle = third(candidates[0]) < third(candidates[1]) ? candidates[0] : candidates[1];
        const auto z_hat = solve(build_system(points, radii));
        CHECK((z_hat - oracle).norm() <= 1e-9);
    }
}

TEST_CASE("tail energy on synthetic instances with hidden tail coordinates") {
    // Anchors live in the first m coordinates; the hidden point has T extra
    // coordinates, so every sphere carries the same tail energy.
    Rng rng(8);
    for (int m : {2, 4, 6}) {
        const int T = 5;
        const Eigen::MatrixXd points = gaussian(m + 1, m, rng);
        const Eigen::VectorXd x = gaussian(m + T, 1, rng);
        std::vector<double> radii;
        for (Eigen::Index i = 0; i <= m; ++i) {
            Eigen::VectorXd padded = Eigen::VectorXd::Zero(m + T);
            padded.head(m) = points.row(i).transpose();
            radii.push_back((x - padded).norm());
        }
        const auto sol = trilaterate(make_anchor_set(points), radii);
        CHECK((sol.z - x.head(m)).norm() <= 1e-9);
        double lo = 1e300, hi = -1e300;
        for (Eigen::Index i = 0; i <= m; ++i) {
            const auto e = tail_energy(sol.z, points.row(i).transpose(), radii[i]);
            CHECK_FALSE(e.clamped);
            lo = std::min(lo, e.raw);
            hi = std::max(hi, e.raw);
        }
        CHECK(hi - lo <= 1e-8);
        CHECK(sol.tail.value == Approx(x.tail(T).squaredNorm()).epsilon(1e-9));
    }
}

TEST_CASE("tail energy in a graph diffusion embedding") {
    const Graph g = generate_random_regular(40, 3, 2);
    const auto dec = graph_spectrum(g);
    const double t = 0.7;
    const std::size_t m = 5;
    const auto emb = diffusion_embedding(dec, t, m);
    const std::vector<Node> anchors{1, 7, 13, 22, 30, 38};
    const auto set = make_anchor_set(emb, anchors);

    const Node x = 17;
    // Radii from the truncated metric: no tail.
    std::vector<double> truncated;
    for (Node a : anchors) truncated.push_back(emb.distance(a, x));
    const auto sol = trilaterate(set, truncated);
    CHECK((sol.z - emb.point(x)).norm() <= 1e-9);
    CHECK(std::abs(sol.tail.raw) <= 1e-9);

    // Full-metric radii: with z fixed at the true truncated point, the tail
    // energy equals the spectral sum over the dropped modes.
    for (Node a : anchors) {
        const double r = diffusion_distance(dec, t, a, x);
        double spectral = 0;
        for (std::size_t j = m + 1; j < dec.size(); ++j) {
            const double diff = dec.eigenvectors(x, Eigen::Index(j)) - dec.eigenvectors(a, Eigen::Index(j));
            spectral += std::exp(-2 * t * dec.eigenvalue(j)) * diff * diff;
        }
        const auto e = tail_energy(emb.point(x), emb.point(a), r);
        CHECK(std::abs(e.raw - spectral) <= 1e-8);
        CHECK(e.raw >= -1e-9);
    }

    const auto negative = tail_energy(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2), 0.5);
    CHECK(negative.clamped);
    CHECK(negative.value == 0.0);
    CHECK(negative.raw < 0);
}

TEST_CASE("hidden node at an anchor decodes to that anchor in the full embedding") {
    const Graph g = generate_random_regular(12, 3, 5);
    const auto dec = graph_spectrum(g);
    const auto emb = diffusion_embedding(dec, 1.0, 11);
    std::vector<Node> anchors(12);
    for (Node v = 0; v < 12; ++v) anchors[v] = v;
    const auto set = make_anchor_set(emb, anchors);
    for (Node x : {0u, 4u, 11u}) {
        std::vector<double> radii;
        for (Node a : anchors) radii.push_back(diffusion_distance(dec, 1.0, a, x));
        CHECK(radii[x] == 0.0);
        const auto sol = trilaterate(set, radii);
        CHECK((sol.z - emb.point(x)).norm() <= 1e-9);
        CHECK(decode_nearest(emb, sol.z).node == x);
    }
}

TEST_CASE("anchor sets from graph nodes") {
    const auto dec = graph_spectrum(generate_random_regular(20, 3, 1));
    const auto emb = diffusion_embedding(dec, 1.0, 3);
    const std::vector<Node> ok{0, 5, 9, 14};
    const auto set = make_anchor_set(emb, ok);
    CHECK(set.anchors == ok);
    CHECK(set.dimension() == 3);
    CHECK(set.sigma_min > kAffineTol);
    const std::vector<Node> dup{0, 5, 5, 14};
    CHECK_THROWS_AS(make_anchor_set(emb, dup), AffineDependence);
    const std::vector<Node> short_list{0, 5, 9};
    CHECK_THROWS_AS(make_anchor_set(emb, short_list), std::invalid_argument);
    const std::vector<Node> bad{0, 5, 9, 20};
    CHECK_THROWS_AS(make_anchor_set(emb, bad), std::out_of_range);
}

TEST_CASE("nearest-node decoding") {
    const auto dec = graph_spectrum(generate_random_regular(64, 3, 3), 7);
    const auto emb = diffusion_embedding(dec, 0.5, 6);
    double min_sep = 1e300;
    for (Node u = 0; u < 64; ++u)
        for (Node v = u + 1; v < 64; ++v) min_sep = std::min(min_sep, emb.distance(u, v));
    REQUIRE(min_sep > 0);

    Rng rng(4);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (Node v = 0; v < 64; ++v) {
        const auto exact = decode_nearest(emb, emb.point(v));
        CHECK(exact.node == v);
        CHECK(exact.distance == 0.0);
        CHECK(exact.margin >= min_sep - 1e-15);
        // Any point strictly inside half the minimum separation decodes to v.
        Eigen::VectorXd dir(6);
        for (auto& x : dir) x = normal(rng);
        const Eigen::VectorXd z = emb.point(v) + dir.normalized() * (0.499 * min_sep * unit(rng));
        CHECK(decode_nearest(emb, z).node == v);
    }

    DiffusionEmbedding twins;
    twins.m = 2;
    twins.coords = Eigen::MatrixXd(3, 2);
    twins.coords << 5, 5, 1, 1, 1, 1;
    const auto tie = decode_nearest(twins, Eigen::Vector2d(1, 1));
    CHECK(tie.node == 1);
    CHECK(tie.margin == 0.0);
    CHECK_THROWS_AS(decode_nearest(twins, Eigen::Vector3d(1, 1, 1)), std::invalid_argument);
}

TEST_CASE("perturbation bound check") {
    Rng rng(31);
    const int m = 4;
    const Eigen::MatrixXd points = gaussian(m + 1, m, rng);
    const Eigen::VectorXd z = gaussian(m, 1, rng);
    const auto anchors = make_anchor_set(points);

    const auto zero = perturbation_bound_check(anchors, z, 0.0, 20, 1);
    CHECK(zero.max_error == 0.0);
    CHECK(zero.ratio == 0.0);

    const auto big = perturbation_bound_check(anchors, z, 1e-3, 200, 1);
    const auto mid = perturbation_bound_check(anchors, z, 5e-4, 200, 1);
    const auto small = perturbation_bound_check(anchors, z, 2.5e-4, 200, 1);
    for (const auto* rep : {&big, &mid, &small}) {
        CHECK(rep->max_error > 0);
        CHECK(rep->ratio <= rep->bound_ratio);
    }
    CHECK(mid.max_error <= big.max_error / 2 * 3);
    CHECK(mid.max_error >= big.max_error / 2 / 3);
    CHECK(small.max_error <= mid.max_error / 2 * 3);
    CHECK(small.max_error >= mid.max_error / 2 / 3);
    CHECK_THROWS_AS(perturbation_bound_check(anchors, z, -1.0, 1, 1), std::invalid_argument);
}

TEST_CASE("perturbation ratio grows like 1/sigma_min") {
    const Eigen::Vector2d z(0.3, 0.4);
    std::vector<double> scaled;
    for (double eps : {1.0, 0.1, 0.01, 0.001}) {
        Eigen::MatrixXd points(3, 2);
        points << 0, 0, 1, 0, 0.5, eps;
        const auto anchors = make_anchor_set(points);
        const auto rep = perturbation_bound_check(anchors, z, 1e-6, 200, 2);
        scaled.push_back(rep.ratio * rep.sigma_min);
        CHECK(rep.ratio <= rep.bound_ratio);
    }
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    CHECK(*hi / *lo <= 10.0);
}
