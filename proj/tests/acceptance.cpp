// Release gate: runs every shipped guarantee end to end and prints one
// PASS/FAIL line per criterion. Exits nonzero if anything fails.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "xeb/analytics.hpp"
#include "xeb/brownian.hpp"
#include "xeb/config.hpp"
#include "xeb/dists.hpp"
#include "xeb/experiment.hpp"
#include "xeb/hog.hpp"
#include "xeb/rng.hpp"
#include "xeb/samplers.hpp"
#include "xeb/statevector.hpp"
#include "xeb/stats.hpp"

#ifndef XEBENCH_BINARY
#define XEBENCH_BINARY ""
#endif

using namespace xeb;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("ACCEPTANCE %02d %s -- %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int pool_jobs() {
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(8u, hw == 0 ? 4u : hw));
}

// Deterministic parallel map: slot i is a pure function of (salt, i).
std::vector<double> collect(std::uint64_t count, std::uint64_t salt,
                            const std::function<double(Rng&)>& f) {
    std::vector<double> out(count);
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= count) return;
            Rng rng = Rng::stream(salt, i);
            out[i] = f(rng);
        }
    };
    std::vector<std::thread> threads;
    for (int t = 0; t < pool_jobs(); ++t) threads.emplace_back(work);
    for (std::thread& th : threads) th.join();
    return out;
}

std::vector<double> sampler_scores(SamplerKind kind, int n, int depth, double gamma,
                                   std::uint64_t count, std::uint64_t salt) {
    return collect(count, salt, [&](Rng& rng) {
        SamplerSpec spec;
        spec.kind = kind;
        spec.n = n;
        spec.depth = depth;
        spec.gamma = gamma;
        return draw_sample(spec, rng).neg_log_q;
    });
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "<unreadable:" + path + ">";
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// 1. Threshold score and gap at the a = n^{-1/2} working point converge to
//    their asymptotic constants; the final size sits inside the stated band.
void criterion_1() {
    const double z_ref = 1.29045, gap_ref = 0.26263, tol = 0.005;
    std::ostringstream det;
    bool z_dev_decreasing = true, final_in_band = true, gaps_in_band = true;
    double prev_dev = 1e9;
    for (int n : {100, 400, 1600}) {
        const ClassifierBoundary b = probability_gap(n, std::pow(n, -0.5));
        const double dz = std::abs(b.z_star - z_ref);
        const double dg = std::abs(b.gap - gap_ref);
        if (dz >= prev_dev) z_dev_decreasing = false;
        prev_dev = dz;
        if (dg > tol) gaps_in_band = false;
        if (n == 1600) final_in_band = dz <= tol;
        det << " n=" << n << " z*=" << fmt(b.z_star) << " gap=" << fmt(b.gap);
    }
    report(1, z_dev_decreasing && final_in_band && gaps_in_band,
           "z* -> 1.29045, gap -> 0.26263 (+-0.005 at n=1600, deviation shrinking):" +
               det.str());
}

// 2. Infinite-depth noiseless closed forms are exact.
void criterion_2() {
    bool ok = true;
    std::ostringstream det;
    for (int n : {4, 10, 50, 100}) {
        const DepthNoiseParams p{n, 0.0, 1.0};
        const double dm = std::abs(logxeb_mean(p) - (n * std::log(2.0) + kGammaEuler - 1.0));
        const double dv = std::abs(logxeb_var(p) - (kPiSqOver6 - 1.0));
        if (dm > 1e-12 || dv > 1e-12) ok = false;
        det << " n=" << n << " dmean=" << fmt(dm) << " dvar=" << fmt(dv);
    }
    report(2, ok, "closed forms at a=0, s=1 vs n log2 + g - 1 and pi^2/6 - 1:" + det.str());
}

// 3. The closed-form summed score moments match the brute-force
//    Hamming-weight sums.
void criterion_3() {
    bool ok = true;
    double worst = 0.0;
    for (int n : {4, 12, 20})
        for (double a : {0.0, 0.1, 0.25})
            for (double s : {0.0, 0.5, 1.0})
                for (int k = 1; k <= 6; ++k) {
                    long double kfact = 1.0L;
                    for (int i = 2; i <= k; ++i) kfact *= i;
                    long double sum = 0.0L;
                    long double choose = 1.0L;
                    for (int x = 0; x <= n; ++x) {
                        const long double comp =
                            std::pow(1.0L - static_cast<long double>(a),
                                     static_cast<long double>(x) * (k + 1)) *
                            std::pow(1.0L + static_cast<long double>(a),
                                     static_cast<long double>(n - x) * (k + 1));
                        sum += choose * comp;
                        choose = choose * (n - x) / (x + 1);
                    }
                    sum *= kfact * (1.0L + static_cast<long double>(k) * s);
                    const long double brute = std::ldexp(sum, -n * (k + 1));
                    const double closed = summed_moment({n, a, s}, k);
                    const double rel =
                        std::abs(closed - static_cast<double>(brute)) /
                        static_cast<double>(brute);
                    worst = std::max(worst, rel);
                    if (rel > 1e-10) ok = false;
                }
    report(3, ok, "moment identities, n<=20 k<=6, worst relative error " + fmt(worst) +
                      " (tol 1e-10)");
}

// 4. The finite-depth score density normalizes and reproduces its mean.
void criterion_4() {
    bool ok = true;
    std::ostringstream det;
    const int n = 50;
    const double a = 0.1;
    const double zmax = integration_cutoff(n, a, 1e-13);
    for (double s : {0.0, 0.5, 1.0}) {
        const ScoreDistribution sd(n, a, s);
        const double mass = integrate([&](double z) { return sd.pdf(z); }, 0.0, zmax, 1e-11);
        const double mean = integrate([&](double z) { return z * sd.pdf(z); }, 0.0, zmax, 1e-11);
        const double mean_ref = std::pow(1.0 + a * a, n) * (1.0 + s);
        const double dm = std::abs(mass - 1.0);
        const double dr = std::abs(mean - mean_ref) / mean_ref;
        if (dm > 1e-8 || dr > 1e-6) ok = false;
        det << " s=" << fmt(s) << " |mass-1|=" << fmt(dm) << " relmean=" << fmt(dr);
    }
    report(4, ok, "n=50 a=0.1 density: mass within 1e-8, mean within 1e-6 relative:" +
                      det.str());
}

// 5. The standard simulation preset reproduces the analytic slope, with a
//    noise-independent slope and noise-monotone intercept.
void criterion_5() {
    ExperimentConfig cfg = preset("appendixA-alltoall-d6");
    cfg.output_dir = (fs::temp_directory_path() / "xeb_acceptance_c5").string();
    fs::remove_all(cfg.output_dir);
    const ResultSet rs = run_experiment(cfg, 4);
    CheckOptions opt;
    opt.overlay_agreement = false;
    opt.slope_band = {{0.67, 0.70}};
    opt.independence_sigmas = 2.0;
    const std::vector<CheckResult> checks = consistency_checks(rs, opt);
    bool ok = true;
    for (const CheckResult& c : checks) ok = ok && c.pass;
    std::ostringstream det;
    for (const GammaFit& f : rs.fits)
        det << " gamma=" << fmt(f.gamma) << ": slope=" << fmt(f.fit.slope) << "+-"
            << fmt(f.fit.se_slope) << " intercept=" << fmt(f.fit.intercept);
    fs::remove_all(cfg.output_dir);
    report(5, ok, "preset slopes in [0.67,0.70], gamma-independent (2 sigma), "
                  "intercepts increasing:" + det.str());
}

// 6 and 7 share one set of deep-circuit runs at n=14, depth 7.
void criteria_6_and_7() {
    const int n = 14, depth = 7;
    const std::uint64_t m = 10000;
    const std::vector<double> clean = sampler_scores(SamplerKind::clean, n, depth, 0.0, m, 601);
    const std::vector<double> unif = sampler_scores(SamplerKind::uniform, n, depth, 0.0, m, 602);
    const std::vector<double> noisy = sampler_scores(SamplerKind::noisy, n, depth, 0.3, m, 603);
    const Moments mc = estimate_stats(clean);
    const Moments mu = estimate_stats(unif);
    const Moments mn = estimate_stats(noisy);

    const double offset = mu.mean - mc.mean;
    const bool ok6 = std::abs(offset - 1.0) <= 0.10;
    report(6, ok6, "uniform-minus-ideal mean offset " + fmt(offset) + " vs 1.00 +- 0.10 (se " +
                       fmt(std::sqrt(mu.se_mean * mu.se_mean + mc.se_mean * mc.se_mean)) + ")");

    const double s_noisy = std::clamp(1.0 - (mn.mean - mc.mean), 0.0, 1.0);
    const double s_unif = std::clamp(1.0 - offset, 0.0, 1.0);
    const double want_clean = 0.645;
    const double want_noisy = kPiSqOver6 - s_noisy * s_noisy;
    const double want_unif = kPiSqOver6 - s_unif * s_unif;
    const bool ok7 = std::abs(mc.variance - want_clean) <= 0.10 &&
                     std::abs(mn.variance - want_noisy) <= 0.15 &&
                     std::abs(mu.variance - want_unif) <= 0.15;
    report(7, ok7, "variances: ideal " + fmt(mc.variance) + " vs 0.645+-0.10; noisy " +
                       fmt(mn.variance) + " vs " + fmt(want_noisy) + "+-0.15 (s=" +
                       fmt(s_noisy) + "); uniform " + fmt(mu.variance) + " vs " +
                       fmt(want_unif) + "+-0.15");
}

// 8. The m-sample threshold classifier achieves its predicted accuracy with
//    equal error rates on both sides.
void criterion_8() {
    const int n = 50;
    const double a = std::pow(static_cast<double>(n), -0.6);
    const ClassifierBoundary b = probability_gap(n, a);
    const ScoreDistribution clean(n, a, 1.0), spoof(n, a, 0.0);
    const std::uint64_t m = 25, trials = 10000;
    const double predicted = success_probability(m, b.p_clean, b.p_spoof);
    Rng rng(811);
    std::vector<double> scores(m);
    std::uint64_t right_a = 0, right_b = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        for (double& z : scores) z = clean.sample(rng);
        if (classify(scores, b.z_star, m, b.p_clean, b.p_spoof).verdict == Verdict::A)
            ++right_a;
        for (double& z : scores) z = spoof.sample(rng);
        if (classify(scores, b.z_star, m, b.p_clean, b.p_spoof).verdict == Verdict::B)
            ++right_b;
    }
    const double acc_a = static_cast<double>(right_a) / static_cast<double>(trials);
    const double acc_b = static_cast<double>(right_b) / static_cast<double>(trials);
    const double accuracy = 0.5 * (acc_a + acc_b);
    const double se_diff = std::sqrt(acc_a * (1.0 - acc_a) / static_cast<double>(trials) +
                                     acc_b * (1.0 - acc_b) / static_cast<double>(trials));
    const bool acc_ok = std::abs(accuracy - predicted) <= 0.02;
    const bool eq_ok = std::abs(acc_a - acc_b) <= 3.0 * se_diff;
    report(8, acc_ok && eq_ok,
           "classifier accuracy " + fmt(accuracy) + " vs predicted " + fmt(predicted) +
               " (+-0.02); per-side errors " + fmt(1.0 - acc_a) + "/" + fmt(1.0 - acc_b) +
               " equal within 3 sigma (" + fmt(3.0 * se_diff) + ")");
}

// 9. Betting strategies deliver their guaranteed per-round value against
//    every house policy.
void criterion_9() {
    const BettingStrategy mixed = mixed_strategy(0.75, 0.5);
    const std::uint64_t rounds = 1000000;
    bool ok = true;
    std::ostringstream det;
    det << "mixed EV vs 0.2:";
    Rng rng(909);
    for (HousePolicy policy : {HousePolicy::uniform, HousePolicy::always_a,
                               HousePolicy::always_b, HousePolicy::adversarial_worst}) {
        const BettingOutcome o = simulate_betting(0.75, 0.5, mixed, rounds, rng, policy);
        if (std::abs(o.mean_payoff - mixed.expected_value) > 3.0 * o.se_payoff) ok = false;
        det << " " << fmt(o.mean_payoff);
    }
    const BettingStrategy robust = robust_strategy(0.5, 0.1);
    const BettingOutcome worst =
        simulate_betting(0.6, 0.5, robust, rounds, rng, HousePolicy::adversarial_worst);
    if (worst.mean_payoff < robust.expected_value - 3.0 * worst.se_payoff) ok = false;
    det << "; robust floor " << fmt(robust.expected_value) << " got " << fmt(worst.mean_payoff);
    report(9, ok, det.str());
}

// 10. The block spoofer scores like the uniform baseline on deep circuits.
void criterion_10() {
    const int n = 12, depth = 7;
    const std::uint64_t m = 2500;
    const std::vector<double> sp = collect(m, 1001, [&](Rng& rng) {
        SamplerSpec spec;
        spec.kind = SamplerKind::spoofer;
        spec.n = n;
        spec.depth = depth;
        spec.block_size = 4;
        return draw_sample(spec, rng).neg_log_q;
    });
    const std::vector<double> un = sampler_scores(SamplerKind::uniform, n, depth, 0.0, m, 1002);
    const Moments ms = estimate_stats(sp);
    const Moments mn = estimate_stats(un);
    const double diff = std::abs(ms.mean - mn.mean);
    const double sigma = std::sqrt(ms.se_mean * ms.se_mean + mn.se_mean * mn.se_mean);
    report(10, diff <= 3.0 * sigma,
           "spoofer mean " + fmt(ms.mean) + " vs uniform " + fmt(mn.mean) + ", diff " +
               fmt(diff) + " <= 3 sigma = " + fmt(3.0 * sigma));
}

// 11. The continuous-time integrator's output statistics approach the
//     exponential law monotonically in evolution time.
void criterion_11() {
    const int n = 6, trials = 1000;
    const std::vector<double> targets{2.0 / 12.0, 3.0 / 12.0, 4.0 / 12.0, 6.0 / 12.0};
    std::vector<std::vector<double>> pools(targets.size());
    for (auto& p : pools) p.resize(static_cast<std::size_t>(trials) << n);
    std::atomic<int> next{0};
    auto work = [&] {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= trials) return;
            Rng rng = Rng::stream(20260822, static_cast<std::uint64_t>(t));
            const std::vector<StateVector> snaps = brownian_snapshots(n, targets, 5e-3, rng);
            for (std::size_t k = 0; k < targets.size(); ++k)
                for (std::uint64_t x = 0; x < snaps[k].dim(); ++x)
                    pools[k][(static_cast<std::size_t>(t) << n) + x] =
                        std::ldexp(snaps[k].probability(x), n);
        }
    };
    std::vector<std::thread> threads;
    for (int i = 0; i < pool_jobs(); ++i) threads.emplace_back(work);
    for (std::thread& th : threads) th.join();
    std::ostringstream det;
    det << "KS to e^-z over increasing time:";
    bool ok = true;
    double prev = 1e9;
    for (std::size_t k = 0; k < pools.size(); ++k) {
        const double ks = ks_to_unit_exponential(pools[k]);
        if (ks >= prev) ok = false;
        prev = ks;
        det << " " << fmt(ks);
    }
    report(11, ok, det.str());
}

// 12. Worker count never changes the bytes a run produces.
void criterion_12() {
    const std::string bin = XEBENCH_BINARY;
    if (bin.empty()) {
        report(12, false, "driver binary path not provided at build time");
        return;
    }
    const fs::path base = fs::temp_directory_path();
    const std::string dir1 = (base / "xeb_acceptance_c12_j1").string();
    const std::string dir4 = (base / "xeb_acceptance_c12_j4").string();
    fs::remove_all(dir1);
    fs::remove_all(dir4);
    auto run = [&](int jobs, const std::string& dir) {
        std::ostringstream cmd;
        cmd << '"' << bin << "\" simulate --preset appendixA-alltoall-d6 --samples 500"
            << " --jobs " << jobs << " --out \"" << dir << "\" > /dev/null 2>&1";
        return std::system(cmd.str().c_str());
    };
    const int rc1 = run(1, dir1);
    const int rc4 = run(4, dir4);
    if (rc1 != 0 || rc4 != 0) {
        report(12, false, "driver runs exited with " + std::to_string(rc1) + " and " +
                              std::to_string(rc4));
        return;
    }
    const bool samples_same = slurp(dir1 + "/samples.csv") == slurp(dir4 + "/samples.csv");
    const bool results_same = slurp(dir1 + "/results.csv") == slurp(dir4 + "/results.csv");
    fs::remove_all(dir1);
    fs::remove_all(dir4);
    report(12, samples_same && results_same,
           std::string("preset at 500 samples, --jobs 1 vs 4: samples.csv ") +
               (samples_same ? "identical" : "DIFFER") + ", results.csv " +
               (results_same ? "identical" : "DIFFER"));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criteria_6_and_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    if (g_failures == 0) {
        std::printf("ACCEPTANCE OVERALL PASS (12/12)\n");
        return 0;
    }
    std::printf("ACCEPTANCE OVERALL FAIL (%d criterion(s) failed)\n", g_failures);
    return 1;
}
