#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "xeb/rng.hpp"
#include "xeb/stats.hpp"

using namespace xeb;

TEST_CASE("moment estimates on a hand-computed sample") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0, 5.0};
    const Moments m = estimate_stats(v);
    REQUIRE(m.count == 5);
    REQUIRE(std::abs(m.mean - 3.0) < 1e-15);
    REQUIRE(std::abs(m.variance - 2.5) < 1e-15);  // unbiased
    REQUIRE(std::abs(m.se_mean - std::sqrt(2.5 / 5.0)) < 1e-15);
    // fourth central moment 6.8; Var(s^2) = (mu4 - sigma^4 (m-3)/(m-1))/m = 0.735
    REQUIRE(std::abs(m.se_variance - std::sqrt(0.735)) < 1e-12);
}

TEST_CASE("moment estimation rejects tiny samples") {
    const std::vector<double> one{1.0};
    REQUIRE_THROWS(estimate_stats(one));
    REQUIRE_THROWS(estimate_stats(std::vector<double>{}));
}

TEST_CASE("variance error bar covers the truth for normal draws") {
    Rng rng(5);
    std::vector<double> v(4000);
    for (double& x : v) x = rng.normal();
    const Moments m = estimate_stats(v);
    REQUIRE(std::abs(m.variance - 1.0) < 5.0 * m.se_variance);
    REQUIRE(std::abs(m.mean) < 5.0 * m.se_mean);
}

TEST_CASE("weighted fit recovers an exact line") {
    std::vector<FitPoint> pts;
    for (int x = 1; x <= 5; ++x)
        pts.push_back({static_cast<double>(x), 2.0 * x + 1.0, 1.0});
    const RegressionFit f = fit_linear(pts);
    REQUIRE(std::abs(f.slope - 2.0) < 1e-12);
    REQUIRE(std::abs(f.intercept - 1.0) < 1e-12);
    REQUIRE(f.residual_variance < 1e-12);
}

TEST_CASE("fit requires three distinct abscissae and positive weights") {
    std::vector<FitPoint> two{{1.0, 1.0, 1.0}, {2.0, 2.0, 1.0}};
    REQUIRE_THROWS(fit_linear(two));
    std::vector<FitPoint> dup{{1.0, 1.0, 1.0}, {1.0, 2.0, 1.0}, {1.0, 3.0, 1.0}};
    REQUIRE_THROWS(fit_linear(dup));
    std::vector<FitPoint> bad{{1.0, 1.0, 1.0}, {2.0, 2.0, 0.0}, {3.0, 3.0, 1.0}};
    REQUIRE_THROWS(fit_linear(bad));
}

TEST_CASE("heavier points dominate the weighted fit") {
    // Outlier at x=3 with negligible weight barely moves the line y = x.
    std::vector<FitPoint> pts{
        {1.0, 1.0, 1e6}, {2.0, 2.0, 1e6}, {3.0, 10.0, 1e-6}, {4.0, 4.0, 1e6}};
    const RegressionFit f = fit_linear(pts);
    REQUIRE(std::abs(f.slope - 1.0) < 1e-3);
    REQUIRE(std::abs(f.intercept) < 1e-2);
}

TEST_CASE("fit standard errors cover a noisy truth") {
    Rng rng(77);
    const double slope = 0.7, intercept = -0.4;
    std::vector<FitPoint> pts;
    for (int x = 4; x <= 20; x += 2) {
        const double se = 0.05;
        pts.push_back({static_cast<double>(x), slope * x + intercept + se * rng.normal(),
                       1.0 / (se * se)});
    }
    const RegressionFit f = fit_linear(pts);
    REQUIRE(std::abs(f.slope - slope) < 5.0 * f.se_slope);
    REQUIRE(std::abs(f.intercept - intercept) < 5.0 * f.se_intercept);
}

TEST_CASE("ks statistic on a tiny hand case") {
    // Sample {0.1, 0.2, 0.3} against U[0,1]: D = |1 - 0.3| = 0.7.
    const double d = ks_statistic({0.1, 0.2, 0.3}, [](double x) { return x; });
    REQUIRE(std::abs(d - 0.7) < 1e-15);
}

TEST_CASE("ks distance separates exponential from uniform samples") {
    Rng rng(101);
    std::vector<double> expo(4000), unif(4000);
    for (double& z : expo) z = rng.exponential();
    for (double& z : unif) z = rng.uniform01();
    REQUIRE(ks_to_unit_exponential(expo) < 0.04);
    REQUIRE(ks_to_unit_exponential(unif) > 0.3);
}

TEST_CASE("ks statistic rejects empty samples") {
    REQUIRE_THROWS(ks_to_unit_exponential(std::vector<double>{}));
}
