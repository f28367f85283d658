#pragma once

// Experiment orchestration: deterministic row-indexed sample generation
// (optionally job-parallel), incremental resumable CSV persistence, per-point
// statistics, weighted regression over n, and analytic overlays derived from
// the fitted slope alone.
//
// Determinism contract: row r of samples.csv is a pure function of (config,
// master seed, r) — each row draws from Rng::stream(seed, r) — and rows are
// written in ascending r regardless of worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "xeb/analytics.hpp"
#include "xeb/config.hpp"
#include "xeb/dists.hpp"
#include "xeb/emit.hpp"
#include "xeb/samplers.hpp"
#include "xeb/stats.hpp"

namespace xeb {

struct PointStats {
    int n = 0;
    double gamma = 0.0;
    SamplerKind kind = SamplerKind::clean;
    Moments stats;  // over neg_log_q
    std::uint64_t samples = 0;
    std::vector<double> scores;  // z values, capped, for plotting
};

struct OverlayPoint {
    int n = 0;
    double mean_pred = 0.0;
    double var_pred = 0.0;
};

struct GammaFit {
    double gamma = 0.0;
    SamplerKind kind = SamplerKind::clean;
    bool has_fit = false;
    RegressionFit fit;
    bool has_overlay = false;
    double a_hat = 0.0;  // depth scale recovered from the fitted slope
    double s_hat = 0.0;  // signal recovered from the fitted intercept
    std::vector<OverlayPoint> overlay;
};

struct ResultSet {
    ExperimentConfig config;
    std::vector<PointStats> points;  // gamma-major, n-minor grid order
    std::vector<GammaFit> fits;
};

namespace detail {

struct GridPoint {
    double gamma = 0.0;
    int n = 0;
    SamplerKind kind = SamplerKind::clean;
};

inline std::vector<GridPoint> grid_of(const ExperimentConfig& c) {
    std::vector<GridPoint> grid;
    for (double gamma : c.gamma_list)
        for (int n : c.n_list) {
            SamplerKind kind = c.sampler;
            if (kind == SamplerKind::noisy && gamma == 0.0) kind = SamplerKind::clean;
            grid.push_back({gamma, n, kind});
        }
    return grid;
}

inline SampleRecord compute_row(const ExperimentConfig& c, const GridPoint& gp,
                                std::uint64_t row) {
    Rng rng = Rng::stream(c.seed, row);
    SamplerSpec spec;
    spec.kind = gp.kind;
    spec.n = gp.n;
    spec.depth = c.depth;
    spec.topology = c.topology;
    spec.gamma = gp.kind == SamplerKind::noisy ? gp.gamma : 0.0;
    spec.block_size = c.block_size;
    spec.depth_boost = c.depth_boost;
    spec.stream_id = row;
    return draw_sample(spec, rng);
}

struct ResumeState {
    std::uint64_t rows = 0;
    std::string kept_bytes;                     // header + complete rows
    std::vector<std::pair<double, double>> values;  // (neg_log_q, z) per row
};

// Replays a partially written samples.csv: keeps the header and every
// complete line, drops a torn trailing line, and recovers the per-row values
// needed for aggregation (doubles round-trip exactly through the CSV).
inline ResumeState parse_existing_samples(const std::string& path) {
    ResumeState st;
    std::ifstream in(path, std::ios::binary);
    if (!in) return st;
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string content = buf.str();
    const std::string header = sample_csv_header();
    if (content.size() < header.size() || content.compare(0, header.size(), header) != 0)
        throw std::runtime_error("existing samples.csv has an unexpected header: " + path);
    std::size_t pos = header.size();
    std::size_t kept_end = pos;
    while (pos < content.size()) {
        const std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) break;  // torn trailing line: drop it
        const std::string line = content.substr(pos, eol - pos);
        std::vector<std::size_t> commas;
        for (std::size_t i = 0; i < line.size(); ++i)
            if (line[i] == ',') commas.push_back(i);
        if (commas.size() != 8)
            throw std::runtime_error("existing samples.csv has a malformed row: " + path);
        const std::string nlq = line.substr(commas[6] + 1, commas[7] - commas[6] - 1);
        const std::string z = line.substr(commas[7] + 1);
        st.values.emplace_back(std::stod(nlq), std::stod(z));
        ++st.rows;
        pos = eol + 1;
        kept_end = pos;
    }
    st.kept_bytes = content.substr(0, kept_end);
    return st;
}

}  // namespace detail

// Generates samples.csv under config.output_dir and aggregates statistics,
// fits, and analytic overlays. `jobs` workers compute fixed-size row chunks
// concurrently; a single writer appends them in row order. With resume=true
// an existing samples.csv is extended instead of recomputed. A row that
// throws is retried once; a second failure aborts after writing manifest.json
// with the completed-row count.
inline ResultSet run_experiment(const ExperimentConfig& config, int jobs = 1,
                                bool resume = false) {
    config.validate();
    const std::vector<detail::GridPoint> grid = detail::grid_of(config);
    const std::uint64_t total = grid.size() * config.samples;
    namespace fs = std::filesystem;
    fs::create_directories(config.output_dir);
    const std::string samples_path = (fs::path(config.output_dir) / "samples.csv").string();

    std::vector<std::vector<double>> nlq(grid.size()), zs(grid.size());
    std::uint64_t start_row = 0;
    std::string prefix = sample_csv_header();
    if (resume && fs::exists(samples_path)) {
        detail::ResumeState st = detail::parse_existing_samples(samples_path);
        if (st.rows > total)
            throw std::runtime_error("existing samples.csv has more rows than the config asks for");
        for (std::uint64_t r = 0; r < st.rows; ++r) {
            nlq[r / config.samples].push_back(st.values[r].first);
            zs[r / config.samples].push_back(st.values[r].second);
        }
        start_row = st.rows;
        prefix = std::move(st.kept_bytes);
    }
    std::ofstream out(samples_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + samples_path);
    out << prefix;
    out.flush();

    std::uint64_t written = start_row;
    auto absorb = [&](const SampleRecord& rec, std::uint64_t row) {
        out << sample_csv_row(rec);
        const std::size_t p = row / config.samples;
        nlq[p].push_back(rec.neg_log_q);
        if (zs[p].size() < 20000) zs[p].push_back(rec.z);
        ++written;
    };
    auto fail_with_manifest = [&](const std::string& why) -> void {
        out.flush();
        nlohmann::ordered_json m;
        m["completed_rows"] = written;
        m["total_rows"] = total;
        m["error"] = why;
        write_text_file((fs::path(config.output_dir) / "manifest.json").string(),
                        m.dump(2) + "\n");
        throw std::runtime_error("experiment aborted after " + std::to_string(written) + "/" +
                                 std::to_string(total) + " rows (" + why +
                                 "); manifest.json written, resume with --resume");
    };
    auto compute_with_retry = [&](std::uint64_t row) {
        const detail::GridPoint& gp = grid[row / config.samples];
        try {
            return detail::compute_row(config, gp, row);
        } catch (const std::exception&) {
            return detail::compute_row(config, gp, row);  // one retry, then abort
        }
    };

    if (jobs <= 1) {
        for (std::uint64_t row = start_row; row < total; ++row) {
            try {
                absorb(compute_with_retry(row), row);
            } catch (const std::exception& e) {
                fail_with_manifest(e.what());
            }
        }
    } else {
        const std::uint64_t chunk = 64;
        std::deque<std::pair<std::uint64_t, std::future<std::vector<SampleRecord>>>> inflight;
        std::uint64_t next = start_row;
        auto submit_one = [&]() {
            if (next >= total) return;
            const std::uint64_t begin = next;
            const std::uint64_t end = std::min(total, begin + chunk);
            next = end;
            inflight.emplace_back(begin, std::async(std::launch::async, [&, begin, end]() {
                std::vector<SampleRecord> recs;
                recs.reserve(end - begin);
                for (std::uint64_t r = begin; r < end; ++r)
                    recs.push_back(compute_with_retry(r));
                return recs;
            }));
        };
        const std::size_t window = static_cast<std::size_t>(jobs) * 2;
        while (inflight.size() < window && next < total) submit_one();
        while (!inflight.empty()) {
            auto [begin, fut] = std::move(inflight.front());
            inflight.pop_front();
            try {
                const std::vector<SampleRecord> recs = fut.get();
                for (std::size_t i = 0; i < recs.size(); ++i)
                    absorb(recs[i], begin + i);
            } catch (const std::exception& e) {
                fail_with_manifest(e.what());
            }
            out.flush();
            submit_one();
        }
    }
    out.flush();
    if (!out) fail_with_manifest("write failure on samples.csv");

    ResultSet rs;
    rs.config = config;
    rs.points.reserve(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) {
        PointStats ps;
        ps.n = grid[p].n;
        ps.gamma = grid[p].gamma;
        ps.kind = grid[p].kind;
        ps.samples = nlq[p].size();
        if (nlq[p].size() >= 2) {
            ps.stats = estimate_stats(nlq[p]);
        } else {
            ps.stats = Moments{nlq[p].empty() ? 0.0 : nlq[p][0], 0.0, 0.0, 0.0, nlq[p].size()};
        }
        ps.scores = std::move(zs[p]);
        rs.points.push_back(std::move(ps));
    }

    if (config.fit_slope) {
        const std::size_t nn = config.n_list.size();
        for (std::size_t gi = 0; gi < config.gamma_list.size(); ++gi) {
            GammaFit gf;
            gf.gamma = config.gamma_list[gi];
            gf.kind = rs.points[gi * nn].kind;
            std::vector<FitPoint> pts;
            for (std::size_t ni = 0; ni < nn; ++ni) {
                const PointStats& ps = rs.points[gi * nn + ni];
                const double se = std::max(ps.stats.se_mean, 1e-12);
                pts.push_back({static_cast<double>(ps.n), ps.stats.mean, 1.0 / (se * se)});
            }
            try {
                gf.fit = fit_linear(pts);
                gf.has_fit = true;
            } catch (const std::exception&) {
                gf.has_fit = false;  // fewer than 3 distinct n values
            }
            if (gf.has_fit && config.overlay_analytic && gf.fit.slope > 0.0) {
                gf.a_hat = gf.fit.slope >= std::log(2.0) ? 0.0 : depth_from_slope(gf.fit.slope);
                gf.s_hat = std::clamp(kGammaEuler - gf.fit.intercept, 0.0, 1.0);
                for (int n : config.n_list) {
                    DepthNoiseParams p{n, gf.a_hat, gf.s_hat};
                    gf.overlay.push_back({n, logxeb_mean(p), logxeb_var(p)});
                }
                gf.has_overlay = true;
            }
            rs.fits.push_back(std::move(gf));
        }
    }
    return rs;
}

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CheckOptions {
    bool overlay_agreement = true;   // honest samplers only (clean/noisy)
    bool gamma_independence = true;  // slopes equal within k sigma
    bool intercept_monotone = true;  // intercept strictly increasing in gamma
    std::optional<std::pair<double, double>> slope_band;
    double agreement_sigmas = 4.0;
    double independence_sigmas = 2.0;
};

// Pass/fail comparison of empirical results against the analytic overlays.
inline std::vector<CheckResult> consistency_checks(const ResultSet& rs,
                                                   const CheckOptions& opt = {}) {
    std::vector<CheckResult> checks;
    const std::size_t nn = rs.config.n_list.size();
    auto fmt = [](double v) { return format_double(v); };
    for (std::size_t gi = 0; gi < rs.fits.size(); ++gi) {
        const GammaFit& gf = rs.fits[gi];
        const std::string tag = "[gamma=" + fmt(gf.gamma) + "]";
        if (opt.overlay_agreement && gf.has_overlay &&
            (gf.kind == SamplerKind::clean || gf.kind == SamplerKind::noisy)) {
            bool mean_ok = true, var_ok = true;
            std::ostringstream det;
            for (std::size_t ni = 0; ni < nn; ++ni) {
                const PointStats& ps = rs.points[gi * nn + ni];
                const OverlayPoint& ov = gf.overlay[ni];
                const double dm = std::abs(ps.stats.mean - ov.mean_pred);
                const double dv = std::abs(ps.stats.variance - ov.var_pred);
                if (dm > opt.agreement_sigmas * std::max(ps.stats.se_mean, 1e-12))
                    mean_ok = false;
                if (dv > opt.agreement_sigmas * std::max(ps.stats.se_variance, 1e-12))
                    var_ok = false;
                det << " n=" << ps.n << " dmean=" << fmt(dm) << " dvar=" << fmt(dv);
            }
            checks.push_back({"mean_matches_theory" + tag, mean_ok,
                              "|mean - overlay| vs " + fmt(opt.agreement_sigmas) + "*se:" +
                                  det.str()});
            checks.push_back({"variance_matches_theory" + tag, var_ok,
                              "|var - overlay| vs " + fmt(opt.agreement_sigmas) + "*se:" +
                                  det.str()});
        }
        if (opt.slope_band && gf.has_fit) {
            const bool ok =
                gf.fit.slope >= opt.slope_band->first && gf.fit.slope <= opt.slope_band->second;
            checks.push_back({"slope_in_band" + tag, ok,
                              "slope=" + fmt(gf.fit.slope) + " band=[" +
                                  fmt(opt.slope_band->first) + "," +
                                  fmt(opt.slope_band->second) + "]"});
        }
    }
    if (opt.gamma_independence) {
        for (std::size_t i = 0; i < rs.fits.size(); ++i)
            for (std::size_t j = i + 1; j < rs.fits.size(); ++j) {
                if (!rs.fits[i].has_fit || !rs.fits[j].has_fit) continue;
                const double diff = std::abs(rs.fits[i].fit.slope - rs.fits[j].fit.slope);
                const double sigma = std::sqrt(rs.fits[i].fit.se_slope * rs.fits[i].fit.se_slope +
                                               rs.fits[j].fit.se_slope * rs.fits[j].fit.se_slope);
                checks.push_back(
                    {"slopes_gamma_independent[" + fmt(rs.fits[i].gamma) + " vs " +
                         fmt(rs.fits[j].gamma) + "]",
                     diff <= opt.independence_sigmas * sigma,
                     "slope diff=" + fmt(diff) + " allowed=" +
                         fmt(opt.independence_sigmas * sigma)});
            }
    }
    if (opt.intercept_monotone && rs.fits.size() >= 2) {
        bool ok = true;
        std::ostringstream det;
        for (std::size_t i = 0; i + 1 < rs.fits.size(); ++i) {
            if (!rs.fits[i].has_fit || !rs.fits[i + 1].has_fit) continue;
            if (!(rs.fits[i + 1].fit.intercept > rs.fits[i].fit.intercept)) ok = false;
            det << " " << fmt(rs.fits[i].fit.intercept) << "<" << fmt(rs.fits[i + 1].fit.intercept);
        }
        checks.push_back({"intercepts_increase_with_gamma", ok, det.str()});
    }
    return checks;
}

inline nlohmann::ordered_json result_set_json(const ResultSet& rs,
                                              const std::vector<CheckResult>& checks = {}) {
    nlohmann::ordered_json j;
    j["config"] = config_to_json_value(rs.config);
    auto pts = nlohmann::ordered_json::array();
    for (const PointStats& p : rs.points) {
        nlohmann::ordered_json jp;
        jp["n"] = p.n;
        jp["gamma"] = p.gamma;
        jp["sampler"] = to_string(p.kind);
        jp["mean"] = p.stats.mean;
        jp["se_mean"] = p.stats.se_mean;
        jp["variance"] = p.stats.variance;
        jp["se_variance"] = p.stats.se_variance;
        jp["m"] = p.samples;
        pts.push_back(std::move(jp));
    }
    j["points"] = std::move(pts);
    auto fits = nlohmann::ordered_json::array();
    for (const GammaFit& f : rs.fits) {
        nlohmann::ordered_json jf;
        jf["gamma"] = f.gamma;
        jf["sampler"] = to_string(f.kind);
        jf["has_fit"] = f.has_fit;
        if (f.has_fit) {
            jf["slope"] = f.fit.slope;
            jf["se_slope"] = f.fit.se_slope;
            jf["intercept"] = f.fit.intercept;
            jf["se_intercept"] = f.fit.se_intercept;
            jf["residual_variance"] = f.fit.residual_variance;
        }
        if (f.has_overlay) {
            jf["a_hat"] = f.a_hat;
            jf["s_hat"] = f.s_hat;
            auto ov = nlohmann::ordered_json::array();
            for (const OverlayPoint& o : f.overlay)
                ov.push_back({{"n", o.n}, {"mean_pred", o.mean_pred}, {"var_pred", o.var_pred}});
            jf["overlay"] = std::move(ov);
        }
        fits.push_back(std::move(jf));
    }
    j["fits"] = std::move(fits);
    auto jc = nlohmann::ordered_json::array();
    for (const CheckResult& c : checks)
        jc.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = std::move(jc);
    return j;
}

// Writes results.csv (always), summary.json ("json"), and plots ("svg") into
// `dir`; returns the paths written. samples.csv is already streamed by
// run_experiment.
inline std::vector<std::string> emit_result_set(const ResultSet& rs, const std::string& dir,
                                                const std::vector<std::string>& formats,
                                                const std::vector<CheckResult>& checks = {}) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> paths;
    auto want = [&](const char* f) {
        return std::find(formats.begin(), formats.end(), f) != formats.end();
    };

    std::string csv = results_csv_header();
    for (const PointStats& p : rs.points)
        csv += results_csv_row(p.n, p.gamma, to_string(p.kind), p.stats, p.samples);
    const std::string results_path = (fs::path(dir) / "results.csv").string();
    write_text_file(results_path, csv);
    paths.push_back(results_path);

    if (want("json")) {
        const std::string path = (fs::path(dir) / "summary.json").string();
        write_text_file(path, result_set_json(rs, checks).dump(2) + "\n");
        paths.push_back(path);
    }

    if (want("svg")) {
        const std::size_t nn = rs.config.n_list.size();
        std::vector<PlotSeries> mean_series, var_series;
        for (std::size_t gi = 0; gi < rs.config.gamma_list.size(); ++gi) {
            PlotSeries ms, vs;
            ms.label = "gamma=" + format_double(rs.config.gamma_list[gi]);
            vs.label = ms.label;
            for (std::size_t ni = 0; ni < nn && gi * nn + ni < rs.points.size(); ++ni) {
                const PointStats& p = rs.points[gi * nn + ni];
                ms.points.push_back({static_cast<double>(p.n), p.stats.mean});
                vs.points.push_back({static_cast<double>(p.n), p.stats.variance});
            }
            mean_series.push_back(ms);
            var_series.push_back(vs);
            if (gi < rs.fits.size() && rs.fits[gi].has_fit) {
                PlotSeries fit;
                fit.label = "fit " + ms.label;
                fit.dashed = true;
                fit.markers = false;
                const double n0 = rs.config.n_list.front(), n1 = rs.config.n_list.back();
                fit.points = {{n0, rs.fits[gi].fit.slope * n0 + rs.fits[gi].fit.intercept},
                              {n1, rs.fits[gi].fit.slope * n1 + rs.fits[gi].fit.intercept}};
                mean_series.push_back(std::move(fit));
            }
        }
        const std::string mean_path = (fs::path(dir) / "mean_vs_n.svg").string();
        write_text_file(mean_path, render_svg_plot("mean score vs system size", "n",
                                                   "mean -log q", mean_series));
        paths.push_back(mean_path);
        const std::string var_path = (fs::path(dir) / "variance_vs_n.svg").string();
        write_text_file(var_path, render_svg_plot("score variance vs system size", "n",
                                                  "var -log q", var_series));
        paths.push_back(var_path);

        // Score-density overlay at the largest n, per gamma, when a fit exists.
        std::vector<PlotSeries> dist_series;
        for (std::size_t gi = 0; gi < rs.fits.size(); ++gi) {
            if (!rs.fits[gi].has_overlay) continue;
            const PointStats& p = rs.points[gi * nn + (nn - 1)];
            if (p.scores.size() < 100) continue;
            std::vector<double> sorted = p.scores;
            std::sort(sorted.begin(), sorted.end());
            const double zmax = 1.2 * sorted[static_cast<std::size_t>(0.99 * (sorted.size() - 1))];
            const int bins = 30;
            PlotSeries hist;
            hist.label = "empirical gamma=" + format_double(rs.fits[gi].gamma);
            hist.markers = false;
            std::vector<double> counts(bins, 0.0);
            for (double z : p.scores)
                if (z < zmax) counts[static_cast<int>(z / zmax * bins)] += 1.0;
            for (int b = 0; b < bins; ++b)
                hist.points.push_back(
                    {(b + 0.5) * zmax / bins,
                     counts[b] / (static_cast<double>(p.scores.size()) * zmax / bins)});
            dist_series.push_back(std::move(hist));
            PlotSeries theory;
            theory.label = "theory gamma=" + format_double(rs.fits[gi].gamma);
            theory.dashed = true;
            theory.markers = false;
            const ScoreDistribution sd(p.n, rs.fits[gi].a_hat, rs.fits[gi].s_hat);
            for (int i = 0; i <= 160; ++i) {
                const double z = zmax * i / 160.0;
                theory.points.push_back({z, sd.pdf(z)});
            }
            dist_series.push_back(std::move(theory));
        }
        if (!dist_series.empty()) {
            const std::string path = (fs::path(dir) / "score_dist.svg").string();
            write_text_file(path, render_svg_plot("score distribution (largest n)", "z = 2^n q",
                                                  "density", dist_series));
            paths.push_back(path);
        }

        // Classifier gap vs n: at the recovered a_hat and at the c=1/2 scaling.
        const GammaFit* af = nullptr;
        for (const GammaFit& f : rs.fits)
            if (f.has_overlay && f.a_hat > 0.0) { af = &f; break; }
        if (af != nullptr) {
            PlotSeries fixed_a, scaling;
            fixed_a.label = "gap at a_hat=" + format_double(af->a_hat);
            scaling.label = "gap at a=n^-1/2";
            scaling.dashed = true;
            for (int n = 4; n <= 32; n += 2) {
                fixed_a.points.push_back({static_cast<double>(n),
                                          probability_gap(n, af->a_hat).gap});
                scaling.points.push_back(
                    {static_cast<double>(n),
                     probability_gap(n, std::pow(static_cast<double>(n), -0.5)).gap});
            }
            const std::string path = (fs::path(dir) / "gap_vs_n.svg").string();
            write_text_file(path, render_svg_plot("classifier probability gap vs n", "n",
                                                  "gap", {fixed_a, scaling}));
            paths.push_back(path);
        }
    }
    return paths;
}

}  // namespace xeb
