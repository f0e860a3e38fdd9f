#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "remlab/experiments.hpp"

using namespace remlab;

TEST_CASE("ks_distance on constructed samples") {
    // perfect-fit construction: quantiles of the target law
    const int n = 1000;
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) s[i] = gauss_quantile((i + 0.5) / n);
    CHECK(ks_distance(s, 1.0) <= 0.5 / n + 1e-9);

    CHECK(ks_distance({0.0}, 1.0) == Catch::Approx(0.5));
    CHECK_THROWS_AS(ks_distance({}, 1.0), std::domain_error);
    CHECK_THROWS_AS(ks_distance({0.0}, 0.0), std::domain_error);
}

TEST_CASE("ks_distance of a seeded Gaussian sample stays under the critical value") {
    std::mt19937_64 gen(421);  // fixed seed, statistical oracle
    std::normal_distribution<double> nd(0.0, 1.0);
    const int n = 100000;
    std::vector<double> s(n);
    for (auto& v : s) v = nd(gen);
    CHECK(ks_distance(s, 1.0) < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("wilson_interval") {
    auto [lo0, hi0] = wilson_interval(0, 50);
    CHECK(lo0 == 0.0);
    auto [lo1, hi1] = wilson_interval(50, 50);
    CHECK(hi1 == 1.0);
    auto [lo, hi] = wilson_interval(50, 100);
    const double z = 1.959963984540054;
    double center = (0.5 + z * z / 200.0) / (1.0 + z * z / 100.0);
    CHECK(lo < 0.5);
    CHECK(hi > 0.5);
    CHECK(0.5 * (lo + hi) == Catch::Approx(center).epsilon(1e-12));
    CHECK_THROWS_AS(wilson_interval(0, 0), std::domain_error);
    CHECK_THROWS_AS(wilson_interval(5, 4), std::domain_error);
}

TEST_CASE("studies are deterministic in (config, seed)") {
    auto a = lln_study({0.3}, {8}, 50, 7, 2);
    auto b = lln_study({0.3}, {8}, 50, 7, 1);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) REQUIRE(a.rows[i] == b.rows[i]);
}

TEST_CASE("lln study: beta = 0 cell is exact") {
    auto rep = lln_study({0.0}, {6}, 20, 3, 1);
    REQUIRE(rep.rows.size() == 1);
    CHECK(std::get<double>(rep.rows[0][4]) == kLog2);  // mean_f
    CHECK(std::get<double>(rep.rows[0][7]) == 0.0);    // gap
}

TEST_CASE("clt study smoke run emits the expected cells") {
    auto rep = clt_study(0.3, Regime::Subcritical, 10, 2000, 11, 2);
    REQUIRE(rep.rows.size() == 1);
    double var = std::get<double>(rep.rows[0][4]);
    double s2 = std::get<double>(rep.rows[0][5]);
    CHECK(s2 == Catch::Approx(-std::expm1(-0.9)).epsilon(1e-12));
    CHECK(var > 0.2);
    CHECK(var < 1.5);
    CHECK_FALSE(std::get<bool>(rep.rows[0][8]));
    CHECK_THROWS_AS(clt_study(1.0, Regime::Subcritical, 8, 10, 1, 1), std::domain_error);
}

TEST_CASE("tail study: x = 0 cell sits near one half") {
    auto rep = tail_study(0.3, {10}, 2.0, {0.0}, 20000, 17, 2);
    REQUIRE(rep.rows.size() == 2);
    for (const auto& row : rep.rows) {
        double lo = std::get<double>(row[8]), hi = std::get<double>(row[9]);
        REQUIRE(lo <= 0.52);
        REQUIRE(hi >= 0.45);
    }
}

TEST_CASE("equivalence study reports no lemma violations") {
    auto rep = equivalence_study(0.3, {12}, 2.0, 5000, 23, 2);
    REQUIRE(rep.rows.size() == 1);
    CHECK(std::get<long long>(rep.rows[0][7]) == 0);   // lemma1_violations
    CHECK(std::get<long long>(rep.rows[0][9]) == 0);   // wtrunc_mismatch
    // empirical truncation frequency consistent with the exact comparator
    double wl = std::get<double>(rep.rows[0][12]);
    double wh = std::get<double>(rep.rows[0][13]);
    double exact = std::get<double>(rep.rows[0][14]);
    CHECK(wl <= exact);
    CHECK(exact <= wh);
}

TEST_CASE("overscaling study: sanity anchor at x = 0") {
    auto rep = overscaling_study(0.3, {9}, 20000, 29, 2);
    REQUIRE(rep.rows.size() == 3);
    CHECK(std::get<double>(rep.rows[0][7]) == Catch::Approx(0.5).margin(0.02));
    CHECK_THROWS_AS(overscaling_study(1.0, {9}, 10, 1, 1), std::domain_error);
}

TEST_CASE("ldp spot check emits both sides") {
    auto rep = ldp_spot_check(1.0, 10, 0.3, 20000, 31, 2);
    REQUIRE(rep.rows.size() == 2);
    CHECK_THROWS_AS(ldp_spot_check(1.0, 10, -0.1, 10, 1, 1), std::domain_error);
    CHECK_THROWS_AS(ldp_spot_check(1.0, 20, 0.1, 10, 1, 1), std::domain_error);
}
