#pragma once

// Finite-depth output/score distributions and the classifier boundary.
//
// Densities are Hamming-weight mixtures whose terms span hundreds of orders of
// magnitude at n ~ 100, so every sum is a (signed) log-sum-exp over weights.
// Tail integrals have term-wise closed forms; quadrature exists only in tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "xeb/analytics.hpp"
#include "xeb/rng.hpp"

namespace xeb {

inline double log_choose(int n, int x) {
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(x) + 1.0) -
           std::lgamma(static_cast<double>(n - x) + 1.0);
}

// Signed log-space accumulator: keeps a running maximum exponent and a signed
// mantissa sum, so cancellations near a root keep full relative precision.
class SignedLse {
  public:
    void add(double sign, double log_abs) {
        if (sign == 0.0 || log_abs == -std::numeric_limits<double>::infinity()) return;
        if (log_abs > max_log_) {
            mantissa_ *= std::exp(max_log_ - log_abs);
            max_log_ = log_abs;
        }
        mantissa_ += sign * std::exp(log_abs - max_log_);
    }
    // Sign of the accumulated value (0 when it vanished).
    int sign() const { return mantissa_ > 0 ? 1 : (mantissa_ < 0 ? -1 : 0); }
    double log_abs() const {
        return mantissa_ == 0.0 ? -std::numeric_limits<double>::infinity()
                                : max_log_ + std::log(std::abs(mantissa_));
    }
    double value() const { return mantissa_ == 0.0 ? 0.0 : mantissa_ * std::exp(max_log_); }

  private:
    double max_log_ = -std::numeric_limits<double>::infinity();
    double mantissa_ = 0.0;
};

// Output probability density at fixed Hamming weight: d b_x exp(-d b_x q).
inline double pdf_fixed_weight(double q, int n, int x, double a) {
    if (q < 0.0) throw std::domain_error("pdf_fixed_weight: q >= 0 required");
    const double log_db = static_cast<double>(n) * std::log(2.0) + log_weight_factor(n, x, a);
    const double dbq = q > 0.0 ? std::exp(log_db + std::log(q)) : 0.0;
    return std::exp(log_db - dbq);
}

// Score distribution S(z) = (1/d) sum_x C(n,x) [1 + s (b_x z - 1)] e^{-b_x z}
// for the rescaled score z = d q of a sampled bitstring, plus its exact tails
// and an exact sampler. Per-weight coefficients are cached once.
class ScoreDistribution {
  public:
    ScoreDistribution(int n, double a, double signal)
        : n_(n), a_(a), signal_(signal) {
        if (n < 1) throw std::domain_error("ScoreDistribution: n >= 1 required");
        if (!(a >= 0.0 && a < 1.0)) throw std::domain_error("ScoreDistribution: a outside [0,1)");
        if (!(signal >= 0.0 && signal <= 1.0))
            throw std::domain_error("ScoreDistribution: signal outside [0,1]");
        log_coef_.resize(n + 1);
        log_b_.resize(n + 1);
        cum_weight_.resize(n + 1);
        const double nlog2 = static_cast<double>(n) * std::log(2.0);
        double cum = 0.0;
        for (int x = 0; x <= n; ++x) {
            log_b_[x] = log_weight_factor(n, x, a);
            log_coef_[x] = log_choose(n, x) - nlog2;
            // Mixture weight w_x = C(n,x)/(d b_x): the Binomial(n, (1-a)/2) pmf.
            cum += std::exp(log_coef_[x] - log_b_[x]);
            cum_weight_[x] = cum;
        }
        cum_weight_[n] = 1.0;  // absorb rounding in the last bin
    }

    int n() const { return n_; }
    double a() const { return a_; }
    double signal() const { return signal_; }

    double pdf(double z) const { return pdf_at(z, signal_); }

    // Affine decomposition S_s = (1-s) S_0 + s S_1 with both parts positive.
    double pdf_at(double z, double s) const {
        if (z < 0.0) return 0.0;
        const double s0 = std::exp(log_spoof_part(z));
        const double s1 = z > 0.0 ? std::exp(log_clean_part(z)) : 0.0;
        return (1.0 - s) * s0 + s * s1;
    }

    // P(z > z0) via the term-wise closed form (1/d) C e^{-b z0} (1/b + s z0).
    double tail(double z0) const { return tail_at(z0, signal_); }
    double tail_at(double z0, double s) const {
        if (z0 <= 0.0) return 1.0;
        SignedLse acc;
        for (int x = 0; x <= n_; ++x) {
            const double inner = std::exp(-log_b_[x]) + s * z0;
            acc.add(1.0, log_coef_[x] - std::exp(log_b_[x]) * z0 + std::log(inner));
        }
        return std::min(1.0, acc.value());
    }

    // Exact draw: weight x ~ Binomial(n,(1-a)/2); then z ~ Gamma(2, b_x) with
    // probability s (sampled-from-the-circuit branch) else z ~ Exp(b_x).
    double sample(Rng& rng) const {
        const double u = rng.uniform01();
        const int x = static_cast<int>(
            std::lower_bound(cum_weight_.begin(), cum_weight_.end(), u) -
            cum_weight_.begin());
        const double b = std::exp(log_b_[std::min(x, n_)]);
        double g = rng.exponential();
        if (rng.bernoulli(signal_)) g += rng.exponential();
        return g / b;
    }

    // Signed density difference Delta(z) = S|_{s=1} - S|_{s=0}
    //                                    = (1/d) sum C(n,x) (b_x z - 1) e^{-b_x z}.
    SignedLse delta_signed(double z) const {
        SignedLse acc;
        for (int x = 0; x <= n_; ++x) {
            const double b = std::exp(log_b_[x]);
            const double arg = b * z - 1.0;
            if (arg == 0.0) continue;
            acc.add(arg > 0 ? 1.0 : -1.0,
                    log_coef_[x] + std::log(std::abs(arg)) - b * z);
        }
        return acc;
    }

    double delta(double z) const { return delta_signed(z).value(); }

    // log S_0(z) = log (1/d) sum C e^{-b z}  (the s=0 member).
    double log_spoof_part(double z) const {
        SignedLse acc;
        for (int x = 0; x <= n_; ++x)
            acc.add(1.0, log_coef_[x] - std::exp(log_b_[x]) * z);
        return acc.log_abs();
    }

    // log S_1(z) = log (1/d) sum C b z e^{-b z}  (the s=1 member), z > 0.
    double log_clean_part(double z) const {
        SignedLse acc;
        for (int x = 0; x <= n_; ++x)
            acc.add(1.0, log_coef_[x] + log_b_[x] + std::log(z) - std::exp(log_b_[x]) * z);
        return acc.log_abs();
    }

  private:
    int n_;
    double a_;
    double signal_;
    std::vector<double> log_coef_;   // log C(n,x) - n log 2
    std::vector<double> log_b_;
    std::vector<double> cum_weight_;
};

// Bitstring-averaged output density P_a(z) = (1/d) sum_x C(n,x) b_x e^{-b_x z}.
inline double pdf_averaged(double z, int n, double a) {
    if (z < 0.0) return 0.0;
    const double nlog2 = static_cast<double>(n) * std::log(2.0);
    SignedLse acc;
    for (int x = 0; x <= n; ++x) {
        const double lb = log_weight_factor(n, x, a);
        acc.add(1.0, log_choose(n, x) - nlog2 + lb - std::exp(lb) * z);
    }
    return acc.value();
}

inline double score_pdf(double z, const DepthNoiseParams& p) {
    return ScoreDistribution(p.n, p.a, p.signal).pdf(z);
}

inline double score_delta(double z, int n, double a) {
    return ScoreDistribution(n, a, 0.0).delta(z);
}

inline double score_tail(double z0, const DepthNoiseParams& p) {
    return ScoreDistribution(p.n, p.a, p.signal).tail(z0);
}

struct ClassifierBoundary {
    double z_star = 0.0;
    double gap = 0.0;      // integral of Delta over (z*, inf) = z* S_0(z*)
    double p_clean = 0.0;  // P(z > z* | s=1)
    double p_spoof = 0.0;  // P(z > z* | s=0)
    bool multi_root = false;
    std::vector<double> roots;  // every bracketed sign change, ascending
};

namespace detail {

// All sign changes of Delta on a 400-point log grid over [1e-4, 10 n],
// each bisected to 1e-10 relative width.
inline std::vector<double> delta_roots(const ScoreDistribution& dist) {
    const int n = dist.n();
    const double lo = 1e-4, hi = 10.0 * static_cast<double>(n);
    const int grid_points = 400;
    std::vector<double> zs(grid_points), signs(grid_points);
    const double step = std::log(hi / lo) / (grid_points - 1);
    for (int i = 0; i < grid_points; ++i) {
        zs[i] = lo * std::exp(step * i);
        signs[i] = dist.delta_signed(zs[i]).sign();
    }
    std::vector<double> roots;
    for (int i = 0; i + 1 < grid_points; ++i) {
        if (signs[i] == 0 || signs[i] * signs[i + 1] >= 0) continue;
        double zl = zs[i], zr = zs[i + 1];
        const int sl = static_cast<int>(signs[i]);
        while (zr - zl > 1e-10 * zl) {
            const double mid = 0.5 * (zl + zr);
            const int sm = dist.delta_signed(mid).sign();
            if (sm == sl)
                zl = mid;
            else
                zr = mid;
        }
        roots.push_back(0.5 * (zl + zr));
    }
    if (roots.empty()) {
        std::ostringstream msg;
        msg << "threshold_score: no sign change of Delta on [1e-4, " << hi
            << "] (n=" << n << ", a=" << dist.a() << "); grid signs:";
        for (int i = 0; i < grid_points; i += grid_points / 16)
            msg << " Delta(" << zs[i] << ")~" << signs[i];
        throw std::runtime_error(msg.str());
    }
    return roots;
}

}  // namespace detail

// Decision boundary z* and the probability gap Delta(z > z*).
// With multiple sign changes, the root carrying the largest |Delta| mass on
// either side (z0 * S_0(z0), the same quantity as the gap) is reported and the
// multi_root diagnostic is set.
inline ClassifierBoundary probability_gap(int n, double a) {
    const ScoreDistribution dist(n, a, 0.0);
    ClassifierBoundary out;
    out.roots = detail::delta_roots(dist);
    out.multi_root = out.roots.size() > 1;
    double best_mass = -1.0;
    for (double z0 : out.roots) {
        const double mass = z0 * std::exp(dist.log_spoof_part(z0));
        if (mass > best_mass) {
            best_mass = mass;
            out.z_star = z0;
        }
    }
    out.gap = best_mass;
    out.p_clean = dist.tail_at(out.z_star, 1.0);
    out.p_spoof = dist.tail_at(out.z_star, 0.0);
    return out;
}

inline double threshold_score(int n, double a) { return probability_gap(n, a).z_star; }

// sup_z |P_a(z) - e^{-z}| on a dense grid (plot ordering and convergence checks).
inline double sup_norm_to_exponential(int n, double a) {
    double worst = 0.0;
    for (int i = 0; i <= 2400; ++i) {
        const double z = i <= 2000 ? 12.0 * i / 2000.0 : 12.0 + 48.0 * (i - 2000) / 400.0;
        worst = std::max(worst, std::abs(pdf_averaged(z, n, a) - std::exp(-z)));
    }
    return worst;
}

// Adaptive Simpson quadrature (test oracle; not used by production paths).
namespace detail {
inline double simpson_step(const std::function<double(double)>& f, double a, double b,
                           double fa, double fm, double fb, double whole, double tol,
                           int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Upper cutoff Z with P(z > Z) below `tail_mass` for either signal extreme.
inline double integration_cutoff(int n, double a, double tail_mass = 1e-12) {
    const ScoreDistribution dist(n, a, 1.0);
    double z = 8.0 * std::exp(static_cast<double>(n) * std::log1p(a));  // ~8 E[z|x=0]
    while (dist.tail_at(z, 1.0) > tail_mass) z *= 2.0;
    return z;
}

}  // namespace xeb
