#include "doctest.h"

#include "nodeid/geometry.hpp"
#include "nodeid/randomwave.hpp"

#include <cmath>
#include <limits>
#include <sstream>

using namespace nodeid;
using doctest::Approx;

TEST_CASE("ensembles are reproducible") {
    const auto a = sample_ensemble(100, 4, 9);
    const auto b = sample_ensemble(100, 4, 9);
    CHECK(a.g == b.g);
    CHECK(sample_ensemble(100, 4, 10).g != a.g);
    CHECK_THROWS_AS(sample_ensemble(0, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_ensemble(4, 0, 1), std::invalid_argument);
}

TEST_CASE("ensemble sanity band") {
    const std::size_t n = 100000;
    const auto ens = sample_ensemble(n, 8, 1);
    for (Eigen::Index i = 0; i < 8; ++i) {
        const auto col = ens.g.col(i);
        const double mean = col.mean();
        const double var = (col.array() - mean).square().sum() / double(n - 1);
        CHECK(std::abs(mean) <= 4 / std::sqrt(double(n)));
        CHECK(std::abs(var - 1) <= 4 * std::sqrt(2.0 / double(n)));
    }
}

TEST_CASE("chi feature") {
    const std::vector<double> g{1, 2};
    const auto x = chi(g);
    REQUIRE(x.size() == 3);
    CHECK(x[0] == 1);
    CHECK(x[1] == 4);
    CHECK(x[2] == 2);

    const std::vector<double> zero(5, 0.0);
    CHECK(chi(zero).isZero());

    const std::vector<double> flipped{-1, 2};
    CHECK(chi(flipped) == x);

    const auto one = sample_ensemble(10, 1, 3);
    const auto c = chi(one);
    CHECK(c.cols() == 1);
    CHECK(c(4, 0) == one.g(4, 0) * one.g(4, 0));

    const auto ens = sample_ensemble(50, 6, 2);
    const auto features = chi(ens);
    CHECK(features.cols() == 6 + 15);
    CHECK(features.minCoeff() >= 0);
    for (Eigen::Index v = 0; v < 50; ++v) {
        Eigen::Index col = 6;
        for (Eigen::Index j = 0; j < 6; ++j)
            for (Eigen::Index k = j + 1; k < 6; ++k, ++col)
                CHECK(std::abs(features(v, col) * features(v, col) - features(v, j) * features(v, k)) <= 1e-12);
    }
}

TEST_CASE("small-ball extremes") {
    const std::vector<double> eps{0.0, 10.0};
    const auto est = smallball_estimate(2, eps, 20000, 4);
    REQUIRE(est.size() == 2);
    CHECK(est[0].hits == 0);
    CHECK(est[0].collision_prob == 0.0);
    CHECK(est[1].collision_prob > 0.97);
    CHECK_THROWS_AS(smallball_estimate(0, eps, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(smallball_estimate(2, eps, 0, 1), std::invalid_argument);
    const std::vector<double> negative{-0.1};
    CHECK_THROWS_AS(smallball_estimate(2, negative, 10, 1), std::invalid_argument);
}

TEST_CASE("small-ball estimate is thread-count independent") {
    const std::vector<double> eps{0.3, 1.0};
    const auto one = smallball_estimate(4, eps, 50000, 11, 1);
    const auto four = smallball_estimate(4, eps, 50000, 11, 4);
    for (std::size_t i = 0; i < eps.size(); ++i) CHECK(one[i].hits == four[i].hits);
}

TEST_CASE("collision probability decreases with M") {
    const std::vector<double> eps{0.3};
    std::vector<SmallBallEstimate> rows;
    for (std::size_t M : {2u, 4u, 8u}) rows.push_back(smallball_estimate(M, eps, 200000, 7)[0]);
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const double gap = rows[i].collision_prob - rows[i + 1].collision_prob;
        const double se = std::hypot(rows[i].std_error, rows[i + 1].std_error);
        INFO("M=" << rows[i].M << " p=" << rows[i].collision_prob << " vs M=" << rows[i + 1].M
                  << " p=" << rows[i + 1].collision_prob);
        CHECK(gap > 3 * se);
    }
}

TEST_CASE("closest pair matches brute force") {
    const auto ens = sample_ensemble(60, 3, 5);
    const auto features = chi(ens);
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < features.rows(); ++i)
        for (Eigen::Index j = 0; j < i; ++j) best = std::min(best, (features.row(i) - features.row(j)).norm());
    const auto pair = closest_pair(features);
    CHECK(pair.distance == best);
    CHECK(pair.first < pair.second);
    CHECK((features.row(pair.first) - features.row(pair.second)).norm() == best);
}

TEST_CASE("min separation scaling") {
    CHECK(wave_dimension(1024, 1.0) == 10);
    CHECK(wave_dimension(2, 1.0) == 1);
    CHECK(wave_dimension(1000, 1.5) == 15);
    CHECK_THROWS_AS(wave_dimension(1, 1.0), std::invalid_argument);

    const std::vector<std::size_t> two{2};
    const auto pair = min_separation_scaling(two, 1.0, 5, 3);
    for (const auto& s : pair.samples) CHECK(s.min_sep > 0);

    const std::vector<std::size_t> grid{64, 128, 256};
    const auto summary = min_separation_scaling(grid, 1.0, 6, 2);
    CHECK(summary.samples.size() == 18);
    CHECK(summary.median_by_n.size() == 3);
    CHECK(summary.exact_collisions == 0);
    CHECK(std::isfinite(summary.fitted_alpha));
    const auto again = min_separation_scaling(grid, 1.0, 6, 2, 3);
    for (std::size_t i = 0; i < summary.samples.size(); ++i)
        CHECK(summary.samples[i].min_sep == again.samples[i].min_sep);

    const std::vector<std::size_t> descending{128, 64};
    CHECK_THROWS_AS(min_separation_scaling(descending, 1.0, 1, 1), std::invalid_argument);
}

TEST_CASE("random-wave csv layouts") {
    const std::vector<double> eps{0.5};
    std::ostringstream sb;
    write_smallball_csv(sb, smallball_estimate(2, eps, 100, 1));
    CHECK(sb.str().rfind("M,eps,trials,collision_prob,stderr\n2,0.5,100,", 0) == 0);

    const std::vector<std::size_t> grid{8};
    std::ostringstream ms;
    write_min_separation_csv(ms, min_separation_scaling(grid, 1.0, 2, 1).samples);
    CHECK(ms.str().rfind("n,M,trial,min_sep\n8,3,0,", 0) == 0);
}
