#pragma once

// Sample statistics, weighted linear regression, and empirical-CDF distances.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace xeb {

struct Moments {
    double mean = 0.0;
    double variance = 0.0;      // unbiased (m-1 denominator)
    double se_mean = 0.0;
    double se_variance = 0.0;   // fourth-moment formula
    std::size_t count = 0;
};

// Mean, unbiased variance, and their standard errors.
// se(variance) uses Var(s^2) = (mu4 - sigma^4 (m-3)/(m-1)) / m.
inline Moments estimate_stats(std::span<const double> values) {
    const std::size_t m = values.size();
    if (m < 2) throw std::invalid_argument("estimate_stats: need at least 2 values");
    long double sum = 0.0L;
    for (double v : values) sum += v;
    const double mean = static_cast<double>(sum / m);
    long double m2 = 0.0L, m4 = 0.0L;
    for (double v : values) {
        const long double d = v - mean;
        const long double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    const double variance = static_cast<double>(m2 / (m - 1));
    const double mu4 = static_cast<double>(m4 / m);
    const double var_of_var =
        (mu4 - variance * variance * (static_cast<double>(m) - 3.0) / (static_cast<double>(m) - 1.0)) /
        static_cast<double>(m);
    Moments out;
    out.mean = mean;
    out.variance = variance;
    out.se_mean = std::sqrt(variance / static_cast<double>(m));
    out.se_variance = std::sqrt(std::max(0.0, var_of_var));
    out.count = m;
    return out;
}

struct FitPoint {
    double x = 0.0;
    double y = 0.0;
    double weight = 1.0;  // typically 1/se^2
};

struct RegressionFit {
    double slope = 0.0;
    double intercept = 0.0;
    double se_slope = 0.0;
    double se_intercept = 0.0;
    double cov_slope_intercept = 0.0;
    double residual_variance = 0.0;  // weighted SSR / (N - 2); ~1 when weights are true 1/se^2
};

// Weighted least squares via the closed-form normal equations.
// Parameter errors come from the curvature matrix with the supplied weights
// taken at face value (weights = 1/se^2), not rescaled by the residuals.
inline RegressionFit fit_linear(std::span<const FitPoint> points) {
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool seen = false;
        for (std::size_t j = 0; j < i; ++j)
            if (points[j].x == points[i].x) { seen = true; break; }
        if (!seen) ++distinct;
    }
    if (distinct < 3) throw std::invalid_argument("fit_linear: need >= 3 distinct x values");

    long double sw = 0, swx = 0, swxx = 0, swy = 0, swxy = 0;
    for (const auto& p : points) {
        if (!(p.weight > 0)) throw std::invalid_argument("fit_linear: weights must be positive");
        sw += p.weight;
        swx += p.weight * p.x;
        swxx += p.weight * p.x * p.x;
        swy += p.weight * p.y;
        swxy += p.weight * p.x * p.y;
    }
    const long double det = sw * swxx - swx * swx;
    if (!(det > 0)) throw std::invalid_argument("fit_linear: rank-deficient design");

    RegressionFit fit;
    fit.slope = static_cast<double>((sw * swxy - swx * swy) / det);
    fit.intercept = static_cast<double>((swxx * swy - swx * swxy) / det);
    fit.se_slope = std::sqrt(static_cast<double>(sw / det));
    fit.se_intercept = std::sqrt(static_cast<double>(swxx / det));
    fit.cov_slope_intercept = static_cast<double>(-swx / det);

    long double ssr = 0;
    for (const auto& p : points) {
        const long double r = p.y - (fit.slope * p.x + fit.intercept);
        ssr += p.weight * r * r;
    }
    fit.residual_variance =
        points.size() > 2 ? static_cast<double>(ssr / (points.size() - 2)) : 0.0;
    return fit;
}

// Kolmogorov-Smirnov statistic of a sample against a reference CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(sample.begin(), sample.end());
    const double m = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, f - static_cast<double>(i) / m);
        d = std::max(d, static_cast<double>(i + 1) / m - f);
    }
    return d;
}

// KS distance to the unit exponential 1 - e^{-z}.
inline double ks_to_unit_exponential(std::vector<double> sample) {
    return ks_statistic(std::move(sample),
                        [](double z) { return -std::expm1(-std::max(z, 0.0)); });
}

}  // namespace xeb
