#pragma once

// Betting-game decision layer: picks which of two biased coins (samplers with
// heads = "score above threshold") generated a run of flips.
//
// Game per round: the house secretly plays coin A (heads prob p_A) or coin B
// (heads prob p_B < p_A); on heads the player bets A with probability x and B
// otherwise, on tails the player always bets B; payoff is +1/-1.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>

#include "xeb/dists.hpp"
#include "xeb/rng.hpp"

namespace xeb {

struct CoinModel {
    double p_heads = 0.0;
    std::string label;
};

enum class StrategyKind { pure, mixed, robust };

struct BettingStrategy {
    StrategyKind kind = StrategyKind::mixed;
    double x = 1.0;              // P(bet A | heads); tails always bets B
    double expected_value = 0.0; // guaranteed per-round EV (floor for robust)
    double delta = 0.0;          // robust only: assumed minimum p_A - p_B
    // Populated when p_A > 1/2 > p_B, where the pure strategy (x = 1) already
    // wins against either house choice: EVs 2 p_A - 1 and 1 - 2 p_B.
    std::optional<double> pure_ev_house_a;
    std::optional<double> pure_ev_house_b;
};

namespace detail {
inline void check_coin_pair(double p_a, double p_b) {
    if (!(p_a > p_b)) throw std::domain_error("coin ordering violated: need p_A > p_B");
    if (!(p_a < 1.0 + 1e-15) || !(p_b >= 0.0))
        throw std::domain_error("coin probabilities outside [0,1]");
}
}  // namespace detail

// Equalizing mixed strategy: x = 1/(p_A+p_B) makes the EV house-independent,
// EV = (p_A-p_B)/(p_A+p_B). Requires p_A+p_B >= 1 so x is a probability; for
// heads-poor coins apply the reflection p -> 1-p (swap heads/tails) first.
inline BettingStrategy mixed_strategy(double p_a, double p_b) {
    detail::check_coin_pair(p_a, p_b);
    if (p_a + p_b < 1.0)
        throw std::domain_error(
            "mixed_strategy: p_A + p_B < 1; reflect the coins (p -> 1-p, swap labels)");
    BettingStrategy s;
    s.kind = StrategyKind::mixed;
    s.x = 1.0 / (p_a + p_b);
    s.expected_value = (p_a - p_b) / (p_a + p_b);
    if (p_a > 0.5 && p_b < 0.5) {
        s.pure_ev_house_a = 2.0 * p_a - 1.0;
        s.pure_ev_house_b = 1.0 - 2.0 * p_b;
    }
    return s;
}

// Strategy that only assumes p_A >= p_B + delta: x = 1/(2 p_B + delta),
// guaranteed EV >= delta/(2 p_B + delta) whatever the house plays.
inline BettingStrategy robust_strategy(double p_b, double delta) {
    if (!(delta > 0.0)) throw std::domain_error("robust_strategy: delta > 0 required");
    if (p_b + delta > 1.0) throw std::domain_error("robust_strategy: p_B + delta > 1");
    const double denom = 2.0 * p_b + delta;
    if (denom < 1.0)
        throw std::domain_error(
            "robust_strategy: 2 p_B + delta < 1; reflect the coins (p -> 1-p) first");
    BettingStrategy s;
    s.kind = StrategyKind::robust;
    s.x = 1.0 / denom;
    s.expected_value = delta / denom;
    s.delta = delta;
    return s;
}

namespace detail {
// Exact Binomial(m, p) CDF by pmf summation (used only for small m).
inline double binom_cdf(int t, int m, double p) {
    if (t < 0) return 0.0;
    if (t >= m) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    double acc = 0.0;
    for (int h = 0; h <= t; ++h)
        acc += std::exp(log_choose(m, h) + h * std::log(p) + (m - h) * std::log1p(-p));
    return std::min(1.0, acc);
}
}  // namespace detail

// Decision threshold on the head count: verdict A iff h > h*.
// Large m: h* = m (p_A sigma_B + p_B sigma_A)/(sigma_A + sigma_B) with
// sigma = sqrt(m p (1-p)), the equal-error crossing of the two normal
// approximations. A degenerate coin (p in {0,1}) has sigma = 0 and the formula
// limit puts h* at that coin's deterministic head count m*p; when both are
// degenerate the midpoint m (p_A+p_B)/2 separates them exactly.
// Small m (< 25): the normal approximation is poor, so h* is the integer
// minimizing |P(h > t | A) - P(h <= t | B)| over exact binomial tails.
inline double heads_threshold(std::uint64_t m, double p_a, double p_b) {
    if (m < 1) throw std::domain_error("heads_threshold: m >= 1 required");
    detail::check_coin_pair(p_a, p_b);
    const auto md = static_cast<double>(m);
    if (m < 25) {
        const int mi = static_cast<int>(m);
        int best_t = 0;
        double best_err = std::numeric_limits<double>::infinity();
        for (int t = 0; t <= mi; ++t) {
            const double err_a = 1.0 - detail::binom_cdf(t, mi, p_a);  // P(h > t | A)
            const double err_b = detail::binom_cdf(t, mi, p_b);       // P(h <= t | B)
            const double gap = std::abs(err_a - err_b);
            if (gap < best_err) {
                best_err = gap;
                best_t = t;
            }
        }
        return static_cast<double>(best_t);
    }
    const double sigma_a = std::sqrt(md * p_a * (1.0 - p_a));
    const double sigma_b = std::sqrt(md * p_b * (1.0 - p_b));
    if (sigma_a + sigma_b == 0.0) return md * 0.5 * (p_a + p_b);
    return md * (p_a * sigma_b + p_b * sigma_a) / (sigma_a + sigma_b);
}

// Predicted classification success Phi(sqrt(m) x) with separation
// x = (p_A - p_B) / (sqrt(p_A(1-p_A)) + sqrt(p_B(1-p_B))).
inline double coin_separation(double p_a, double p_b) {
    detail::check_coin_pair(p_a, p_b);
    const double denom = std::sqrt(p_a * (1.0 - p_a)) + std::sqrt(p_b * (1.0 - p_b));
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    return (p_a - p_b) / denom;
}

inline double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

inline double success_probability(std::uint64_t m, double p_a, double p_b) {
    if (m < 1) throw std::domain_error("success_probability: m >= 1 required");
    const double x = coin_separation(p_a, p_b);
    if (std::isinf(x)) return 1.0;
    return normal_cdf(std::sqrt(static_cast<double>(m)) * x);
}

enum class Verdict { A, B };

inline const char* to_string(Verdict v) { return v == Verdict::A ? "A" : "B"; }

struct HogDecision {
    std::uint64_t m = 0;
    std::uint64_t h = 0;
    double h_star = 0.0;
    Verdict verdict = Verdict::B;
    double predicted_success = 0.0;
};

// m-sample decision: count scores above z*, compare against h*.
// Ties h = h* resolve to B.
inline HogDecision classify(std::span<const double> scores, double z_star, std::uint64_t m,
                            double p_a, double p_b) {
    if (scores.empty()) throw std::invalid_argument("classify: scores must be nonempty");
    if (scores.size() != m)
        throw std::invalid_argument("classify: m must equal the number of scores");
    HogDecision d;
    d.m = m;
    for (double z : scores)
        if (z > z_star) ++d.h;
    d.h_star = heads_threshold(m, p_a, p_b);
    d.verdict = static_cast<double>(d.h) > d.h_star ? Verdict::A : Verdict::B;
    d.predicted_success = success_probability(m, p_a, p_b);
    return d;
}

// Heads-prob pair of the reflected game (heads/tails and coin labels swapped).
inline std::pair<double, double> reflect_pair(double p_a, double p_b) {
    return {1.0 - p_b, 1.0 - p_a};
}

inline std::string decision_json(const HogDecision& d) {
    std::ostringstream out;
    out.precision(17);
    out << "{\"m\":" << d.m << ",\"h\":" << d.h << ",\"h_star\":" << d.h_star
        << ",\"verdict\":\"" << to_string(d.verdict) << "\",\"predicted_success\":"
        << d.predicted_success << "}";
    return out.str();
}

enum class HousePolicy { uniform, always_a, always_b, adversarial_worst };

struct BettingOutcome {
    double mean_payoff = 0.0;
    double se_payoff = 0.0;
    double accuracy = 0.0;  // fraction of rounds the bet named the house coin
    std::uint64_t rounds = 0;
};

// Monte-Carlo play of the single-flip game under a fixed house policy.
// adversarial_worst lets the house pick the EV-minimizing coin against the
// player's actual x each round (ties broken by a fair coin).
inline BettingOutcome simulate_betting(double p_a, double p_b, const BettingStrategy& strategy,
                                       std::uint64_t rounds, Rng& rng,
                                       HousePolicy policy = HousePolicy::uniform) {
    if (rounds < 1) throw std::domain_error("simulate_betting: rounds >= 1 required");
    const double x = strategy.x;
    const double ev_house_a = 2.0 * p_a * x - 1.0;
    const double ev_house_b = 1.0 - 2.0 * p_b * x;
    double sum = 0.0;
    std::uint64_t correct = 0;
    for (std::uint64_t r = 0; r < rounds; ++r) {
        bool house_a;
        switch (policy) {
            case HousePolicy::uniform: house_a = rng.bernoulli(0.5); break;
            case HousePolicy::always_a: house_a = true; break;
            case HousePolicy::always_b: house_a = false; break;
            default:
                house_a = ev_house_a < ev_house_b ||
                          (ev_house_a == ev_house_b && rng.bernoulli(0.5));
        }
        const bool heads = rng.bernoulli(house_a ? p_a : p_b);
        const bool bet_a = heads && rng.bernoulli(x);
        const bool right = bet_a == house_a;
        sum += right ? 1.0 : -1.0;
        correct += right ? 1 : 0;
    }
    BettingOutcome out;
    out.rounds = rounds;
    out.mean_payoff = sum / static_cast<double>(rounds);
    const double var = rounds > 1 ? (1.0 - out.mean_payoff * out.mean_payoff) *
                                        static_cast<double>(rounds) /
                                        static_cast<double>(rounds - 1)
                                  : 0.0;
    out.se_payoff = std::sqrt(std::max(0.0, var) / static_cast<double>(rounds));
    out.accuracy = static_cast<double>(correct) / static_cast<double>(rounds);
    return out;
}

}  // namespace xeb
