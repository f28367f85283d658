#pragma once

// Closed-form benchmark analytics for shallow all-to-all random circuits.
//
// Everything is parameterized by the depth parameter a = e^{-12 betaJ} and the
// noise signal s (s=1 noiseless, s=0 uniform/spoofer limit). All Hamming-weight
// sums run in natural-log space with max-subtraction; C(1000,500) overflows
// every fixed-width float, log C(n,x) via lgamma does not.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>

namespace xeb {

// Euler-Mascheroni constant, 20 significant digits.
inline constexpr double kGammaEuler = 0.57721566490153286061;

// pi^2/6 derived from a high-precision pi literal.
inline constexpr long double kPiLong = 3.14159265358979323846264338327950288L;
inline constexpr double kPiSqOver6 = static_cast<double>(kPiLong * kPiLong / 6.0L);

// Binary entropy in nats, convention 0*log 0 = 0.
inline double entropy_nats(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("entropy_nats: p outside [0,1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

// Log-odds log(p/(1-p)).
inline double logit(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("logit: p outside (0,1)");
    return std::log(p) - std::log1p(-p);
}

// Depth/noise operating point. The (c, r) scaling form (a = n^-c, s = a^r) is
// kept alongside when the point was built that way; all formulas use (a, s).
struct DepthNoiseParams {
    int n = 0;
    double a = 0.0;       // e^{-12 betaJ}; a -> 0 is infinite depth
    double signal = 1.0;  // s; multiplicative noise certificate
    std::optional<double> c;
    std::optional<double> r;

    static DepthNoiseParams from_scaling(int n, double c, double r) {
        DepthNoiseParams p;
        p.n = n;
        p.a = std::pow(static_cast<double>(n), -c);
        p.signal = std::pow(p.a, r);
        p.c = c;
        p.r = r;
        return p;
    }

    // The closed forms are trusted for a <= 1/4 only; callers surface this as
    // a soft warning, never an error.
    bool regime_warning() const { return a > 0.25; }
};

// log b_x with b_x^{-1} = (1-a)^x (1+a)^{n-x}.
inline double log_weight_factor(int n, int x, double a) {
    if (x < 0 || x > n) throw std::domain_error("log_weight_factor: x outside [0,n]");
    return -(static_cast<double>(x) * std::log1p(-a) +
             static_cast<double>(n - x) * std::log1p(a));
}

inline double weight_factor(int n, int x, double a) {
    return std::exp(log_weight_factor(n, x, a));
}

// log of the fixed-weight moment m^{(k)}_{a,x} = k! / (d b_x)^k, d = 2^n.
inline double log_probability_moment(int n, int x, double a, int k) {
    if (k < 1) throw std::domain_error("log_probability_moment: k >= 1 required");
    return std::lgamma(static_cast<double>(k) + 1.0) -
           static_cast<double>(k) *
               (static_cast<double>(n) * std::log(2.0) + log_weight_factor(n, x, a));
}

inline double probability_moment(int n, int x, double a, int k) {
    return std::exp(log_probability_moment(n, x, a, k));
}

// log of the summed noisy moment
//   <q^k> = k!/2^{n(k+1)} * [(1-a)^{k+1} + (1+a)^{k+1}]^n * (1 + k s).
inline double log_summed_moment(const DepthNoiseParams& p, int k) {
    if (k < 1) throw std::domain_error("log_summed_moment: k >= 1 required");
    const double kp1 = static_cast<double>(k) + 1.0;
    const double bracket =
        std::pow(1.0 - p.a, kp1) + std::pow(1.0 + p.a, kp1);
    return std::lgamma(static_cast<double>(k) + 1.0) -
           static_cast<double>(p.n) * kp1 * std::log(2.0) +
           static_cast<double>(p.n) * std::log(bracket) +
           std::log1p(static_cast<double>(k) * p.signal);
}

inline double summed_moment(const DepthNoiseParams& p, int k) {
    return std::exp(log_summed_moment(p, k));
}

// Mean of the nonlinear score X = -log q: n H((1+a)/2) + gamma_e - s.
inline double logxeb_mean(const DepthNoiseParams& p) {
    return static_cast<double>(p.n) * entropy_nats((1.0 + p.a) / 2.0) + kGammaEuler -
           p.signal;
}

// Variance: pi^2/6 - s^2 + n (1-a^2)/4 * logit^2((1+a)/2).
inline double logxeb_var(const DepthNoiseParams& p) {
    const double l = logit((1.0 + p.a) / 2.0);
    return kPiSqOver6 - p.signal * p.signal +
           static_cast<double>(p.n) * ((1.0 - p.a * p.a) / 4.0) * l * l;
}

inline double standard_error(double variance, std::uint64_t m) {
    if (m == 0) throw std::domain_error("standard_error: m >= 1 required");
    return std::sqrt(variance / static_cast<double>(m));
}

struct SampleBudget {
    double variance = 0.0;
    double signal = 0.0;
    double m_exact = 0.0;          // sigma^2 / s^2 before rounding
    std::uint64_t m = 0;           // ceil, clamped at uint64 range
    double asymptotic = 0.0;       // paper scaling form (needs the (c,r) tag)
    bool regime_warning = false;
};

// Samples needed so the standard error does not swamp the signal:
// m = ceil(sigma^2 / s^2). The asymptotic column reports the scaling form
// n^{1+2c(r-1)} for c < 1/2 and (pi^2/6) n^{2cr} for c >= 1/2.
inline SampleBudget required_samples(const DepthNoiseParams& p) {
    if (p.signal <= 0.0)
        throw std::domain_error("required_samples: signal must be positive");
    SampleBudget out;
    out.variance = logxeb_var(p);
    out.signal = p.signal;
    out.m_exact = out.variance / (p.signal * p.signal);
    const double m_ceil = std::ceil(out.m_exact);
    out.m = m_ceil >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max()
                             : static_cast<std::uint64_t>(std::max(1.0, m_ceil));
    if (p.c && p.r) {
        const double c = *p.c, r = *p.r, n = static_cast<double>(p.n);
        out.asymptotic = c < 0.5 ? std::pow(n, 1.0 + 2.0 * c * (r - 1.0))
                                 : kPiSqOver6 * std::pow(n, 2.0 * c * r);
    }
    out.regime_warning = p.regime_warning();
    return out;
}

struct LinearXeb {
    double log_mean = 0.0;           // log <q> = -n log2 + n log(1+a^2) + log(1+s)
    double log_second_moment = 0.0;  // log <q^2>
    double mean = 0.0;               // underflows to 0 for large n; logs are authoritative
    double second_moment = 0.0;
    double ratio = 0.0;              // <q^2>/<q>^2, grows exponentially in n
    double snr = 0.0;                // per-sample <q>/sqrt(Var q) = 1/sqrt(ratio-1)
};

inline LinearXeb linear_xeb(const DepthNoiseParams& p) {
    const double n = static_cast<double>(p.n);
    LinearXeb out;
    out.log_mean = -n * std::log(2.0) + n * std::log1p(p.a * p.a) + std::log1p(p.signal);
    out.log_second_moment = std::log(2.0) - 2.0 * n * std::log(2.0) +
                            n * std::log1p(3.0 * p.a * p.a) +
                            std::log1p(2.0 * p.signal);
    out.mean = std::exp(out.log_mean);
    out.second_moment = std::exp(out.log_second_moment);
    const double log_ratio = out.log_second_moment - 2.0 * out.log_mean;
    out.ratio = std::exp(log_ratio);
    out.snr = 1.0 / std::sqrt(std::expm1(log_ratio));
    return out;
}

// Invert slope = H((1+a)/2) for a in [0,1); bisection to 1e-12.
inline double depth_from_slope(double slope) {
    const double log2 = std::log(2.0);
    if (!(slope > 0.0 && slope <= log2))
        throw std::domain_error("depth_from_slope: slope outside (0, log 2]");
    double lo = 0.0, hi = 1.0;  // H((1+a)/2) decreases from log2 to 0 on [0,1)
    if (entropy_nats((1.0 + lo) / 2.0) <= slope) return lo;
    for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (entropy_nats((1.0 + mid) / 2.0) > slope)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Glossary map a = e^{-12 betaJ} used by the Brownian validation path.
inline double depth_a_from_beta_j(double beta_j) { return std::exp(-12.0 * beta_j); }

}  // namespace xeb
