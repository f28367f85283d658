#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "xeb/dists.hpp"
#include "xeb/emit.hpp"
#include "xeb/experiment.hpp"
#include "xeb/rng.hpp"

using namespace xeb;
namespace fs = std::filesystem;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}
}  // namespace

TEST_CASE("doubles format to the shortest exact representation") {
    REQUIRE(format_double(0.0) == "0");
    REQUIRE(format_double(6.0) == "6");
    REQUIRE(format_double(0.1) == "0.1");
    REQUIRE(format_double(-2.5) == "-2.5");
    REQUIRE(format_double(1.0 / 3.0) == "0.3333333333333333");
    for (double v : {0.1, 1.0 / 3.0, 3.141592653589793, 1e300, 5e-324, -7.25,
                     6.02214076e23, 0.30000000000000004}) {
        const std::string s = format_double(v);
        double back = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
        REQUIRE(res.ec == std::errc());
        REQUIRE(back == v);
    }
}

TEST_CASE("bitstrings render as zero-padded lowercase hex") {
    REQUIRE(format_hex_bitstring(0xabc, 12) == "abc");
    REQUIRE(format_hex_bitstring(5, 3) == "5");
    REQUIRE(format_hex_bitstring(255, 8) == "ff");
    REQUIRE(format_hex_bitstring(1, 16) == "0001");
    REQUIRE(format_hex_bitstring(0x2a, 6) == "2a");
    REQUIRE(format_hex_bitstring(0, 20) == "00000");
}

TEST_CASE("sample csv rows are byte-stable") {
    REQUIRE(std::string(sample_csv_header()) ==
            "sampler,n,depth,gamma,seed,bitstring,q,neg_log_q,z\n");
    SampleRecord r;
    r.sampler = "clean";
    r.n = 8;
    r.depth = 6;
    r.gamma = 0.25;
    r.seed = 42;
    r.bitstring = 0xab;
    r.q = 0.001953125;  // 2^-9, exact
    r.neg_log_q = 6.0;
    r.z = 0.5;
    REQUIRE(sample_csv_row(r) == "clean,8,6,0.25,42,ab,0.001953125,6,0.5\n");
}

TEST_CASE("results csv rows are byte-stable") {
    REQUIRE(std::string(results_csv_header()) ==
            "n,gamma,sampler,mean,se_mean,variance,se_variance,m\n");
    Moments s;
    s.mean = 7.5;
    s.variance = 1.25;
    s.se_mean = 0.125;
    s.se_variance = 0.25;
    s.count = 100;
    REQUIRE(results_csv_row(10, 0.0, "noisy", s, 100) == "10,0,noisy,7.5,0.125,1.25,0.25,100\n");
}

TEST_CASE("text files write exactly and report failures") {
    const std::string path = (fs::temp_directory_path() / "xeb_emit_probe.txt").string();
    write_text_file(path, "alpha\nbeta");
    REQUIRE(slurp(path) == "alpha\nbeta");
    write_text_file(path, "re");  // truncates
    REQUIRE(slurp(path) == "re");
    fs::remove(path);
    REQUIRE_THROWS(write_text_file("/nonexistent_dir_xyz/f.txt", "x"));
}

TEST_CASE("svg plots carry axes, legend, dashes, and markers") {
    PlotSeries a;
    a.label = "empirical";
    a.points = {{1, 2}, {2, 3}, {3, 5}};
    PlotSeries b;
    b.label = "reference";
    b.dashed = true;
    b.markers = false;
    b.points = {{1, 2.1}, {3, 4.9}};
    const std::string svg = render_svg_plot("calibration", "size", "score", {a, b});
    REQUIRE(svg.rfind("<svg", 0) == 0);
    REQUIRE(svg.find("calibration") != std::string::npos);
    REQUIRE(svg.find("size") != std::string::npos);
    REQUIRE(svg.find("score") != std::string::npos);
    REQUIRE(svg.find("empirical") != std::string::npos);
    REQUIRE(svg.find("reference") != std::string::npos);
    REQUIRE(svg.find("polyline") != std::string::npos);
    REQUIRE(svg.find("stroke-dasharray") != std::string::npos);
    REQUIRE(svg.find("<circle") != std::string::npos);
    REQUIRE(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("svg plots survive degenerate inputs") {
    REQUIRE(render_svg_plot("empty", "x", "y", {}).find("<svg") != std::string::npos);
    PlotSeries single;
    single.label = "dot";
    single.points = {{2.0, 7.0}};
    REQUIRE(render_svg_plot("one", "x", "y", {single}).find("<svg") != std::string::npos);
    PlotSeries with_nan;
    with_nan.label = "holes";
    with_nan.points = {{0, 0}, {1, std::numeric_limits<double>::quiet_NaN()}, {2, 4}};
    const std::string svg = render_svg_plot("holes", "x", "y", {with_nan});
    REQUIRE(svg.find("nan") == std::string::npos);
    PlotSeries no_marks;
    no_marks.label = "line";
    no_marks.markers = false;
    no_marks.points = {{0, 0}, {1, 1}};
    REQUIRE(render_svg_plot("line", "x", "y", {no_marks}).find("<circle") == std::string::npos);
}

TEST_CASE("emission writes the requested artifact set") {
    ResultSet rs;
    rs.config.n_list = {4, 6, 8};
    rs.config.gamma_list = {0.0};
    rs.config.sampler = SamplerKind::clean;
    Rng rng(5);
    for (int ni = 0; ni < 3; ++ni) {
        PointStats p;
        p.n = rs.config.n_list[ni];
        p.kind = SamplerKind::clean;
        p.stats = Moments{3.0 + ni, 1.5, 0.02, 0.04, 400};
        p.samples = 400;
        if (ni == 2)
            for (int i = 0; i < 150; ++i) p.scores.push_back(rng.exponential());
        rs.points.push_back(std::move(p));
    }
    GammaFit f;
    f.gamma = 0.0;
    f.kind = SamplerKind::clean;
    f.has_fit = true;
    f.fit.slope = 0.68;
    f.fit.intercept = 0.4;
    f.has_overlay = true;
    f.a_hat = 0.1;
    f.s_hat = 0.8;
    for (int ni = 0; ni < 3; ++ni) f.overlay.push_back({rs.config.n_list[ni], 3.0 + ni, 1.5});
    rs.fits.push_back(f);

    const ScoreDistribution sd(8, f.a_hat, f.s_hat);
    for (double z : {0.0, 0.5, 1.0, 2.0}) REQUIRE(std::isfinite(sd.pdf(z)));

    const std::string dir = (fs::temp_directory_path() / "xeb_emit_set").string();
    fs::remove_all(dir);

    SECTION("csv only") {
        const auto paths = emit_result_set(rs, dir, {});
        REQUIRE(paths.size() == 1);
        const std::string csv = slurp(dir + "/results.csv");
        REQUIRE(csv.rfind(results_csv_header(), 0) == 0);
        std::size_t lines = 0;
        for (char ch : csv)
            if (ch == '\n') ++lines;
        REQUIRE(lines == 4);
    }

    SECTION("json adds a summary that parses back at full precision") {
        const auto paths = emit_result_set(rs, dir, {"json"});
        REQUIRE(paths.size() == 2);
        const auto j = nlohmann::ordered_json::parse(slurp(dir + "/summary.json"));
        REQUIRE(j["points"][0]["mean"].get<double>() == 3.0);
        REQUIRE(j["fits"][0]["slope"].get<double>() == 0.68);
        REQUIRE(j["config"]["n_list"].size() == 3);
    }

    SECTION("svg adds the four plots when scores and fits are present") {
        const auto paths = emit_result_set(rs, dir, {"svg"});
        std::set<std::string> names;
        for (const std::string& p : paths) names.insert(fs::path(p).filename().string());
        REQUIRE(names.count("results.csv") == 1);
        REQUIRE(names.count("mean_vs_n.svg") == 1);
        REQUIRE(names.count("variance_vs_n.svg") == 1);
        REQUIRE(names.count("score_dist.svg") == 1);
        REQUIRE(names.count("gap_vs_n.svg") == 1);
        REQUIRE(slurp(dir + "/mean_vs_n.svg").find("gamma=0") != std::string::npos);
    }

    SECTION("score histogram needs enough plotted scores") {
        ResultSet sparse = rs;
        sparse.points[2].scores.resize(50);
        const auto paths = emit_result_set(sparse, dir, {"svg"});
        for (const std::string& p : paths)
            REQUIRE(fs::path(p).filename().string() != "score_dist.svg");
    }

    SECTION("an empty result set still yields a header-only table") {
        ResultSet empty;
        empty.config.n_list = {4};
        const auto paths = emit_result_set(empty, dir, {"svg"});
        REQUIRE(slurp(dir + "/results.csv") == results_csv_header());
        for (const std::string& p : paths) {
            const std::string name = fs::path(p).filename().string();
            REQUIRE(name != "score_dist.svg");
            REQUIRE(name != "gap_vs_n.svg");
        }
    }

    fs::remove_all(dir);
}
