// xebench: command-line front end for the shallow-circuit benchmarking kit.
//
//   analytic  - evaluate closed-form predictions (tables, optional SVG)
//   simulate  - run a sampling experiment from a config or preset
//   classify  - betting-game verdict on a batch of scores
//   spoof     - emit a block-spoofed circuit and its samples
//   compare   - run an experiment and grade it against the analytics
//
// Exit codes: 0 success, 1 error/bad arguments, 2 a comparison check failed.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "xeb/analytics.hpp"
#include "xeb/config.hpp"
#include "xeb/dists.hpp"
#include "xeb/emit.hpp"
#include "xeb/experiment.hpp"
#include "xeb/hog.hpp"
#include "xeb/samplers.hpp"

namespace {

struct AnalyticArgs {
    std::string quantity;
    std::vector<int> n_list;
    double a = -1.0;  // negative: derive from the (c, r) scaling
    double c = -1.0;
    double r = 1.0;
    double signal = 1.0;
    int k = 1;
    std::vector<double> z_list;
    double slope = 0.0;
    std::string out;
    std::string svg;
};

xeb::DepthNoiseParams params_for(const AnalyticArgs& args, int n) {
    if (args.a >= 0.0) {
        xeb::DepthNoiseParams p;
        p.n = n;
        p.a = args.a;
        p.signal = args.signal;
        return p;
    }
    if (args.c >= 0.0) return xeb::DepthNoiseParams::from_scaling(n, args.c, args.r);
    throw std::invalid_argument("analytic: provide --a or --c");
}

void write_table(const AnalyticArgs& args, const std::string& header,
                 const std::vector<std::string>& rows,
                 const std::vector<std::array<double, 2>>& plot_points) {
    std::ostringstream table;
    table << header << "\n";
    for (const std::string& row : rows) table << row << "\n";
    if (args.out.empty())
        std::cout << table.str();
    else
        xeb::write_text_file(args.out, table.str());
    if (!args.svg.empty()) {
        if (plot_points.size() < 2)
            throw std::invalid_argument("analytic --svg: need at least two n values to plot");
        xeb::PlotSeries series;
        series.label = args.quantity;
        series.points = plot_points;
        xeb::write_text_file(args.svg, xeb::render_svg_plot(args.quantity + " vs n", "n",
                                                            args.quantity, {series}));
    }
}

int run_analytic(const AnalyticArgs& args) {
    using xeb::format_double;
    std::vector<std::string> rows;
    std::vector<std::array<double, 2>> plot;
    bool warned = false;
    auto warn_if_needed = [&](const xeb::DepthNoiseParams& p) {
        if (p.regime_warning() && !warned) {
            std::cerr << "note: a > 0.25 is outside the regime where the closed forms are"
                      << " trusted; values are reported anyway\n";
            warned = true;
        }
    };

    if (args.quantity == "depth_from_slope") {
        rows.push_back(format_double(args.slope) + "\t" +
                       format_double(xeb::depth_from_slope(args.slope)));
        write_table(args, "slope\ta", rows, plot);
        return 0;
    }
    if (args.n_list.empty()) throw std::invalid_argument("analytic: --n is required");

    const bool per_z = args.quantity == "score_pdf" || args.quantity == "score_tail" ||
                       args.quantity == "pdf_averaged";
    if (per_z) {
        if (args.n_list.size() != 1)
            throw std::invalid_argument("analytic: " + args.quantity + " takes exactly one --n");
        if (args.z_list.empty())
            throw std::invalid_argument("analytic: " + args.quantity + " needs --z");
        const xeb::DepthNoiseParams p = params_for(args, args.n_list.front());
        warn_if_needed(p);
        for (double z : args.z_list) {
            double v;
            if (args.quantity == "score_pdf")
                v = xeb::score_pdf(z, p);
            else if (args.quantity == "score_tail")
                v = xeb::score_tail(z, p);
            else
                v = xeb::pdf_averaged(z, p.n, p.a);
            rows.push_back(format_double(z) + "\t" + format_double(v));
            plot.push_back({z, v});
        }
        write_table(args, "z\t" + args.quantity, rows, plot);
        return 0;
    }

    std::string header;
    for (int n : args.n_list) {
        const xeb::DepthNoiseParams p = params_for(args, n);
        warn_if_needed(p);
        std::ostringstream row;
        row << n << "\t" << format_double(p.a) << "\t" << format_double(p.signal) << "\t";
        double value = 0.0;
        if (args.quantity == "logxeb_mean") {
            header = "n\ta\tsignal\tmean";
            value = xeb::logxeb_mean(p);
            row << format_double(value);
        } else if (args.quantity == "logxeb_var") {
            header = "n\ta\tsignal\tvariance";
            value = xeb::logxeb_var(p);
            row << format_double(value);
        } else if (args.quantity == "summed_moment") {
            header = "n\ta\tsignal\tk\tmoment";
            value = xeb::summed_moment(p, args.k);
            row << args.k << "\t" << format_double(value);
        } else if (args.quantity == "required_samples") {
            header = "n\ta\tsignal\tvariance\tm_exact\tm\tasymptotic";
            const xeb::SampleBudget b = xeb::required_samples(p);
            value = static_cast<double>(b.m);
            row << format_double(b.variance) << "\t" << format_double(b.m_exact) << "\t" << b.m
                << "\t" << format_double(b.asymptotic);
        } else if (args.quantity == "linear_ratio") {
            header = "n\ta\tsignal\tratio";
            value = xeb::linear_xeb(p).ratio;
            row << format_double(value);
        } else if (args.quantity == "linear_snr") {
            header = "n\ta\tsignal\tsnr";
            value = xeb::linear_xeb(p).snr;
            row << format_double(value);
        } else if (args.quantity == "threshold_score") {
            header = "n\ta\tsignal\tz_star";
            value = xeb::threshold_score(p.n, p.a);
            row << format_double(value);
        } else if (args.quantity == "probability_gap") {
            header = "n\ta\tsignal\tz_star\tgap\tp_clean\tp_spoof";
            const xeb::ClassifierBoundary b = xeb::probability_gap(p.n, p.a);
            value = b.gap;
            row << format_double(b.z_star) << "\t" << format_double(b.gap) << "\t"
                << format_double(b.p_clean) << "\t" << format_double(b.p_spoof);
        } else if (args.quantity == "sup_norm") {
            header = "n\ta\tsignal\tsup_norm";
            value = xeb::sup_norm_to_exponential(p.n, p.a);
            row << format_double(value);
        } else {
            throw std::invalid_argument("analytic: unknown quantity " + args.quantity);
        }
        rows.push_back(row.str());
        plot.push_back({static_cast<double>(n), value});
    }
    write_table(args, header, rows, plot);
    return 0;
}

struct RunArgs {
    std::string config_path;
    std::string preset_name;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::optional<std::string> out_dir;
    int jobs = 1;
    bool resume = false;
    std::vector<std::string> formats{"csv"};
};

xeb::ExperimentConfig load_config(const RunArgs& args) {
    xeb::ExperimentConfig cfg;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw std::runtime_error("cannot read config: " + args.config_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        cfg = xeb::config_from_json(buf.str());
    } else if (!args.preset_name.empty()) {
        cfg = xeb::preset(args.preset_name);
    } else {
        throw std::invalid_argument("provide --config or --preset");
    }
    if (args.seed) cfg.seed = *args.seed;
    if (args.samples) cfg.samples = *args.samples;
    if (args.out_dir) cfg.output_dir = *args.out_dir;
    cfg.validate();
    return cfg;
}

void print_result_summary(const xeb::ResultSet& rs) {
    using xeb::format_double;
    for (const xeb::PointStats& p : rs.points)
        std::cout << "point n=" << p.n << " gamma=" << format_double(p.gamma) << " sampler="
                  << xeb::to_string(p.kind) << " m=" << p.samples << " mean="
                  << format_double(p.stats.mean) << " se=" << format_double(p.stats.se_mean)
                  << " var=" << format_double(p.stats.variance) << "\n";
    for (const xeb::GammaFit& f : rs.fits) {
        if (!f.has_fit) continue;
        std::cout << "fit gamma=" << format_double(f.gamma) << " slope="
                  << format_double(f.fit.slope) << " se_slope=" << format_double(f.fit.se_slope)
                  << " intercept=" << format_double(f.fit.intercept);
        if (f.has_overlay)
            std::cout << " a_hat=" << format_double(f.a_hat) << " s_hat="
                      << format_double(f.s_hat);
        std::cout << "\n";
    }
}

int run_simulate(const RunArgs& args) {
    const xeb::ExperimentConfig cfg = load_config(args);
    const xeb::ResultSet rs = xeb::run_experiment(cfg, args.jobs, args.resume);
    const std::vector<xeb::CheckResult> checks = xeb::consistency_checks(rs);
    const std::vector<std::string> paths =
        xeb::emit_result_set(rs, cfg.output_dir, args.formats, checks);
    print_result_summary(rs);
    for (const std::string& p : paths) std::cout << "wrote " << p << "\n";
    return 0;
}

struct CompareArgs {
    RunArgs run;
    std::vector<double> slope_band;
    double agreement_sigmas = 4.0;
    double independence_sigmas = 2.0;
    bool no_overlay = false;
    bool no_gamma = false;
    bool no_intercept = false;
};

int run_compare(const CompareArgs& args) {
    const xeb::ExperimentConfig cfg = load_config(args.run);
    const xeb::ResultSet rs = xeb::run_experiment(cfg, args.run.jobs, args.run.resume);
    xeb::CheckOptions opt;
    opt.overlay_agreement = !args.no_overlay;
    opt.gamma_independence = !args.no_gamma;
    opt.intercept_monotone = !args.no_intercept;
    opt.agreement_sigmas = args.agreement_sigmas;
    opt.independence_sigmas = args.independence_sigmas;
    if (!args.slope_band.empty()) {
        if (args.slope_band.size() != 2)
            throw std::invalid_argument("--slope-band takes exactly two values: lo hi");
        opt.slope_band = {args.slope_band[0], args.slope_band[1]};
    }
    const std::vector<xeb::CheckResult> checks = xeb::consistency_checks(rs, opt);
    xeb::emit_result_set(rs, cfg.output_dir, args.run.formats, checks);
    print_result_summary(rs);
    bool all_pass = true;
    for (const xeb::CheckResult& c : checks) {
        std::cout << "CHECK " << c.name << " " << (c.pass ? "PASS" : "FAIL") << " -- "
                  << c.detail << "\n";
        all_pass = all_pass && c.pass;
    }
    if (checks.empty()) std::cout << "CHECK none-applicable PASS -- no checks requested\n";
    return all_pass ? 0 : 2;
}

struct ClassifyArgs {
    std::string scores_path;
    std::string sampler = "clean";
    int n = 0;
    int depth = 6;
    double gamma = 0.0;
    std::uint64_t m = 0;
    std::uint64_t seed = 1;
    double a = -1.0;
    double z_star = -1.0;
    double p_a = -1.0;
    double p_b = -1.0;
    std::string out;
    std::uint64_t bet_rounds = 0;
    std::string policy = "uniform";
    std::string strategy = "mixed";
    double delta = 0.05;
};

int run_classify(const ClassifyArgs& args) {
    std::vector<double> scores;
    if (!args.scores_path.empty()) {
        std::ifstream in(args.scores_path);
        if (!in) throw std::runtime_error("cannot read scores: " + args.scores_path);
        double z;
        while (in >> z) scores.push_back(z);
        if (scores.empty()) throw std::runtime_error("no scores in " + args.scores_path);
    } else {
        if (args.n < 2 || args.m < 1)
            throw std::invalid_argument("classify: live mode needs --n and --m");
        xeb::SamplerSpec spec;
        spec.kind = xeb::sampler_kind_from_string(args.sampler);
        spec.n = args.n;
        spec.depth = args.depth;
        spec.gamma = args.gamma;
        for (std::uint64_t i = 0; i < args.m; ++i) {
            xeb::Rng rng = xeb::Rng::stream(args.seed, i);
            scores.push_back(xeb::draw_sample(spec, rng).z);
        }
    }
    const std::uint64_t m = args.m > 0 ? args.m : scores.size();

    double z_star = args.z_star, p_a = args.p_a, p_b = args.p_b;
    if (z_star < 0.0 || p_a < 0.0 || p_b < 0.0) {
        if (args.a < 0.0 || args.n < 1)
            throw std::invalid_argument(
                "classify: provide --z-star/--p-a/--p-b or --n and --a to derive them");
        const xeb::ClassifierBoundary b = xeb::probability_gap(args.n, args.a);
        if (z_star < 0.0) z_star = b.z_star;
        if (p_a < 0.0) p_a = b.p_clean;
        if (p_b < 0.0) p_b = b.p_spoof;
    }

    const xeb::HogDecision d = xeb::classify(scores, z_star, m, p_a, p_b);
    const std::string json = xeb::decision_json(d);
    std::cout << json;
    if (!args.out.empty()) xeb::write_text_file(args.out, json);

    if (args.bet_rounds > 0) {
        const xeb::BettingStrategy strat = args.strategy == "robust"
                                               ? xeb::robust_strategy(p_b, args.delta)
                                               : xeb::mixed_strategy(p_a, p_b);
        xeb::HousePolicy policy = xeb::HousePolicy::uniform;
        if (args.policy == "always_a") policy = xeb::HousePolicy::always_a;
        else if (args.policy == "always_b") policy = xeb::HousePolicy::always_b;
        else if (args.policy == "adversarial_worst") policy = xeb::HousePolicy::adversarial_worst;
        else if (args.policy != "uniform")
            throw std::invalid_argument("classify: unknown --policy " + args.policy);
        xeb::Rng rng(args.seed);
        const xeb::BettingOutcome o =
            xeb::simulate_betting(p_a, p_b, strat, args.bet_rounds, rng, policy);
        std::cout << "betting strategy=" << args.strategy << " x=" << xeb::format_double(strat.x)
                  << " ev_guarantee=" << xeb::format_double(strat.expected_value)
                  << " mean_payoff=" << xeb::format_double(o.mean_payoff) << " se="
                  << xeb::format_double(o.se_payoff) << " accuracy="
                  << xeb::format_double(o.accuracy) << "\n";
    }
    return 0;
}

struct SpoofArgs {
    int n = 0;
    int depth = 6;
    std::string topology = "all_to_all";
    int block_size = 0;
    int depth_boost = 0;
    std::uint64_t seed = 1;
    std::uint64_t samples = 0;
    std::string out = ".";
};

int run_spoof(const SpoofArgs& args) {
    namespace fs = std::filesystem;
    if (args.n < 2) throw std::invalid_argument("spoof: --n >= 2 required");
    const int block = args.block_size > 0 ? args.block_size : xeb::default_block_size(args.n);
    const int boost = args.depth_boost > 0
                          ? args.depth_boost
                          : xeb::default_depth_boost(args.n, block, args.depth);
    xeb::Rng rng(args.seed);
    const xeb::Circuit u =
        xeb::draw_circuit(args.n, args.depth, xeb::topology_from_string(args.topology), rng);
    const xeb::Partition partition = xeb::partition_qubits(args.n, block);
    const xeb::Circuit spoofed = xeb::spoof_circuit(u, partition, boost, rng);
    fs::create_directories(args.out);
    const std::string upath = (fs::path(args.out) / "circuit.json").string();
    const std::string spath = (fs::path(args.out) / "spoofed_circuit.json").string();
    xeb::write_text_file(upath, xeb::circuit_to_json(u));
    xeb::write_text_file(spath, xeb::circuit_to_json(spoofed));
    std::cout << "n=" << args.n << " depth=" << args.depth << " block_size=" << block
              << " depth_boost=" << boost << " ideal_gates=" << u.gate_count()
              << " spoof_gates=" << spoofed.gate_count() << "\n";
    std::cout << "wrote " << upath << "\n" << "wrote " << spath << "\n";

    if (args.samples > 0) {
        const xeb::StateVector ideal = xeb::evolve(u);
        std::string csv = xeb::sample_csv_header();
        double sum_nlq = 0.0;
        for (std::uint64_t i = 0; i < args.samples; ++i) {
            xeb::Rng row_rng = xeb::Rng::stream(args.seed, i);
            const std::uint64_t x = xeb::sample_block_product(spoofed, partition, row_rng);
            xeb::SampleRecord rec;
            rec.sampler = "spoofer";
            rec.n = args.n;
            rec.depth = args.depth;
            rec.gamma = 0.0;
            rec.seed = row_rng.seed();
            rec.circuit_seed = u.seed;
            rec.bitstring = x;
            rec.q = ideal.probability(x);
            rec.z = std::ldexp(rec.q, args.n);
            rec.neg_log_q = ideal.neg_log_probability(x);
            rec.underflow = rec.q < 1e-300;
            csv += xeb::sample_csv_row(rec);
            sum_nlq += rec.neg_log_q;
        }
        const std::string cpath = (fs::path(args.out) / "samples.csv").string();
        xeb::write_text_file(cpath, csv);
        std::cout << "wrote " << cpath << " mean_neg_log_q="
                  << xeb::format_double(sum_nlq / static_cast<double>(args.samples)) << "\n";
    }
    return 0;
}

void add_run_options(CLI::App* cmd, RunArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config JSON");
    cmd->add_option("--preset", args.preset_name, "named built-in config");
    cmd->add_option("--seed", [&args](const CLI::results_t& r) {
        args.seed = std::stoull(r[0]);
        return true;
    }, "master seed override");
    cmd->add_option("--samples", [&args](const CLI::results_t& r) {
        args.samples = std::stoull(r[0]);
        return true;
    }, "samples-per-point override");
    cmd->add_option("--out", [&args](const CLI::results_t& r) {
        args.out_dir = r[0];
        return true;
    }, "output directory override");
    cmd->add_option("--jobs", args.jobs, "worker threads")->check(CLI::Range(1, 256));
    cmd->add_flag("--resume", args.resume, "extend an existing samples.csv");
    cmd->add_option("--format", args.formats, "outputs: csv, json, svg")
        ->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"benchmarking toolkit for shallow random circuits"};
    app.require_subcommand(1);

    AnalyticArgs analytic_args;
    CLI::App* analytic = app.add_subcommand("analytic", "evaluate closed-form predictions");
    analytic->add_option("--quantity", analytic_args.quantity, "what to compute")
        ->required()
        ->check(CLI::IsMember({"logxeb_mean", "logxeb_var", "summed_moment", "required_samples",
                               "linear_ratio", "linear_snr", "threshold_score", "probability_gap",
                               "score_pdf", "score_tail", "pdf_averaged", "depth_from_slope",
                               "sup_norm"}));
    analytic->add_option("--n", analytic_args.n_list, "qubit counts")->delimiter(',');
    analytic->add_option("--a", analytic_args.a, "depth scale a");
    analytic->add_option("--c", analytic_args.c, "depth exponent: a = n^-c");
    analytic->add_option("--r", analytic_args.r, "signal exponent: s = a^r");
    analytic->add_option("--signal", analytic_args.signal, "signal s (with --a)");
    analytic->add_option("--k", analytic_args.k, "moment order");
    analytic->add_option("--z", analytic_args.z_list, "score evaluation points")->delimiter(',');
    analytic->add_option("--slope", analytic_args.slope, "fitted slope to invert");
    analytic->add_option("--out", analytic_args.out, "write the table here");
    analytic->add_option("--svg", analytic_args.svg, "write a value-vs-n plot here");

    RunArgs simulate_args;
    CLI::App* simulate = app.add_subcommand("simulate", "run a sampling experiment");
    add_run_options(simulate, simulate_args);

    CompareArgs compare_args;
    compare_args.run.formats = {"csv", "json"};
    CLI::App* compare = app.add_subcommand("compare", "run and grade against the analytics");
    add_run_options(compare, compare_args.run);
    compare->add_option("--slope-band", compare_args.slope_band,
                        "required slope interval: lo hi")
        ->expected(2);
    compare->add_option("--agreement-sigmas", compare_args.agreement_sigmas,
                        "overlay tolerance in standard errors");
    compare->add_option("--independence-sigmas", compare_args.independence_sigmas,
                        "slope-equality tolerance in standard errors");
    compare->add_flag("--no-overlay-check", compare_args.no_overlay, "skip overlay agreement");
    compare->add_flag("--no-gamma-check", compare_args.no_gamma, "skip slope equality");
    compare->add_flag("--no-intercept-check", compare_args.no_intercept,
                      "skip intercept monotonicity");

    ClassifyArgs classify_args;
    CLI::App* classify = app.add_subcommand("classify", "betting-game verdict on scores");
    classify->add_option("--scores", classify_args.scores_path, "file with one z per line");
    classify->add_option("--sampler", classify_args.sampler, "live mode: score source")
        ->check(CLI::IsMember({"clean", "noisy", "uniform", "spoofer"}));
    classify->add_option("--n", classify_args.n, "qubits");
    classify->add_option("--depth", classify_args.depth, "circuit depth (live mode)");
    classify->add_option("--gamma", classify_args.gamma, "total noise rate (live mode)");
    classify->add_option("--m", classify_args.m, "scores per decision");
    classify->add_option("--seed", classify_args.seed, "rng seed");
    classify->add_option("--a", classify_args.a, "depth scale for the analytic boundary");
    classify->add_option("--z-star", classify_args.z_star, "explicit decision threshold");
    classify->add_option("--p-a", classify_args.p_a, "explicit heads probability, coin A");
    classify->add_option("--p-b", classify_args.p_b, "explicit heads probability, coin B");
    classify->add_option("--out", classify_args.out, "write the decision JSON here");
    classify->add_option("--bet-rounds", classify_args.bet_rounds,
                         "also Monte-Carlo the betting game");
    classify->add_option("--policy", classify_args.policy,
                         "house policy: uniform, always_a, always_b, adversarial_worst");
    classify->add_option("--strategy", classify_args.strategy, "mixed or robust")
        ->check(CLI::IsMember({"mixed", "robust"}));
    classify->add_option("--delta", classify_args.delta, "robust strategy margin");

    SpoofArgs spoof_args;
    CLI::App* spoof = app.add_subcommand("spoof", "emit a block-spoofed circuit");
    spoof->add_option("--n", spoof_args.n, "qubits")->required();
    spoof->add_option("--depth", spoof_args.depth, "circuit depth");
    spoof->add_option("--topology", spoof_args.topology, "all_to_all or brickwork_1d");
    spoof->add_option("--block-size", spoof_args.block_size, "block width (0 = default)");
    spoof->add_option("--depth-boost", spoof_args.depth_boost, "extra layers (0 = default)");
    spoof->add_option("--seed", spoof_args.seed, "rng seed");
    spoof->add_option("--samples", spoof_args.samples, "spoofer samples to draw");
    spoof->add_option("--out", spoof_args.out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analytic->parsed()) return run_analytic(analytic_args);
        if (simulate->parsed()) return run_simulate(simulate_args);
        if (compare->parsed()) return run_compare(compare_args);
        if (classify->parsed()) return run_classify(classify_args);
        if (spoof->parsed()) return run_spoof(spoof_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
