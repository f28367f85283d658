#pragma once

// Output formatting: CSV rows with shortest round-trip doubles (byte-stable
// across runs and worker counts), hex bitstrings, and small self-contained
// SVG polyline plots (no plotting dependency).

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "xeb/samplers.hpp"
#include "xeb/stats.hpp"

namespace xeb {

// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
    std::array<char, 40> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

// Lowercase hex, zero-padded to ceil(n/4) nibbles.
inline std::string format_hex_bitstring(std::uint64_t bits, int n) {
    const int nibbles = (n + 3) / 4;
    std::string out(nibbles, '0');
    for (int i = 0; i < nibbles; ++i) {
        const auto nib = static_cast<int>((bits >> (4 * (nibbles - 1 - i))) & 0xf);
        out[i] = static_cast<char>(nib < 10 ? '0' + nib : 'a' + nib - 10);
    }
    return out;
}

inline const char* sample_csv_header() {
    return "sampler,n,depth,gamma,seed,bitstring,q,neg_log_q,z\n";
}

inline std::string sample_csv_row(const SampleRecord& r) {
    std::string out;
    out.reserve(96);
    out += r.sampler;
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += std::to_string(r.depth);
    out += ',';
    out += format_double(r.gamma);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += format_hex_bitstring(r.bitstring, r.n);
    out += ',';
    out += format_double(r.q);
    out += ',';
    out += format_double(r.neg_log_q);
    out += ',';
    out += format_double(r.z);
    out += '\n';
    return out;
}

inline const char* results_csv_header() {
    return "n,gamma,sampler,mean,se_mean,variance,se_variance,m\n";
}

inline std::string results_csv_row(int n, double gamma, const std::string& sampler,
                                   const Moments& s, std::uint64_t m) {
    std::string out;
    out.reserve(96);
    out += std::to_string(n);
    out += ',';
    out += format_double(gamma);
    out += ',';
    out += sampler;
    out += ',';
    out += format_double(s.mean);
    out += ',';
    out += format_double(s.se_mean);
    out += ',';
    out += format_double(s.variance);
    out += ',';
    out += format_double(s.se_variance);
    out += ',';
    out += std::to_string(m);
    out += '\n';
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// ---- SVG plots -------------------------------------------------------------

struct PlotSeries {
    std::string label;
    std::string color;  // empty = palette by index
    std::vector<std::array<double, 2>> points;
    bool dashed = false;
    bool markers = true;
};

namespace detail {

inline double nice_step(double range) {
    if (!(range > 0.0)) return 1.0;
    const double raw = range / 5.0;
    const double k = std::pow(10.0, std::floor(std::log10(raw)));
    const double m = raw / k;
    if (m < 1.5) return k;
    if (m < 3.5) return 2.0 * k;
    if (m < 7.5) return 5.0 * k;
    return 10.0 * k;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace detail

// Minimal line plot: axes with nice ticks, optional point markers, legend.
inline std::string render_svg_plot(const std::string& title, const std::string& xlabel,
                                   const std::string& ylabel,
                                   const std::vector<PlotSeries>& series, int width = 760,
                                   int height = 520) {
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                     "#ff7f0e", "#8c564b", "#17becf", "#555555"};
    const double margin_l = 72, margin_r = 24, margin_t = 44, margin_b = 58;
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    for (const PlotSeries& s : series)
        for (const auto& p : s.points) {
            if (!std::isfinite(p[0]) || !std::isfinite(p[1])) continue;
            xlo = std::min(xlo, p[0]);
            xhi = std::max(xhi, p[0]);
            ylo = std::min(ylo, p[1]);
            yhi = std::max(yhi, p[1]);
        }
    if (!(xlo <= xhi)) { xlo = 0; xhi = 1; ylo = 0; yhi = 1; }
    if (xlo == xhi) { xlo -= 1; xhi += 1; }
    if (ylo == yhi) { ylo -= 1; yhi += 1; }
    const double xpad = 0.04 * (xhi - xlo), ypad = 0.06 * (yhi - ylo);
    xlo -= xpad; xhi += xpad; ylo -= ypad; yhi += ypad;
    const double pw = width - margin_l - margin_r, ph = height - margin_t - margin_b;
    auto px = [&](double x) { return margin_l + (x - xlo) / (xhi - xlo) * pw; };
    auto py = [&](double y) { return margin_t + ph - (y - ylo) / (yhi - ylo) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"monospace\" font-size=\"15\">" << title << "</text>\n";

    const double xstep = detail::nice_step(xhi - xlo);
    for (double t = std::ceil(xlo / xstep) * xstep; t <= xhi + 1e-12 * xstep; t += xstep) {
        svg << "<line x1=\"" << px(t) << "\" y1=\"" << margin_t << "\" x2=\"" << px(t)
            << "\" y2=\"" << margin_t + ph << "\" stroke=\"#eeeeee\"/>\n"
            << "<text x=\"" << px(t) << "\" y=\"" << margin_t + ph + 18
            << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">"
            << detail::tick_label(t) << "</text>\n";
    }
    const double ystep = detail::nice_step(yhi - ylo);
    for (double t = std::ceil(ylo / ystep) * ystep; t <= yhi + 1e-12 * ystep; t += ystep) {
        svg << "<line x1=\"" << margin_l << "\" y1=\"" << py(t) << "\" x2=\"" << margin_l + pw
            << "\" y2=\"" << py(t) << "\" stroke=\"#eeeeee\"/>\n"
            << "<text x=\"" << margin_l - 8 << "\" y=\"" << py(t) + 4
            << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">"
            << detail::tick_label(t) << "</text>\n";
    }
    svg << "<rect x=\"" << margin_l << "\" y=\"" << margin_t << "\" width=\"" << pw
        << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#333333\"/>\n"
        << "<text x=\"" << margin_l + pw / 2 << "\" y=\"" << height - 14
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">" << xlabel
        << "</text>\n"
        << "<text x=\"18\" y=\"" << margin_t + ph / 2
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\" "
           "transform=\"rotate(-90 18 " << margin_t + ph / 2 << ")\">" << ylabel
        << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const PlotSeries& s = series[si];
        const std::string color =
            s.color.empty() ? kPalette[si % (sizeof kPalette / sizeof *kPalette)] : s.color;
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\"";
        if (s.dashed) svg << " stroke-dasharray=\"6 4\"";
        svg << " points=\"";
        for (const auto& p : s.points)
            if (std::isfinite(p[0]) && std::isfinite(p[1]))
                svg << px(p[0]) << ',' << py(p[1]) << ' ';
        svg << "\"/>\n";
        if (s.markers && s.points.size() <= 48)
            for (const auto& p : s.points)
                if (std::isfinite(p[0]) && std::isfinite(p[1]))
                    svg << "<circle cx=\"" << px(p[0]) << "\" cy=\"" << py(p[1])
                        << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        const double ly = margin_t + 16 + 16 * static_cast<double>(si);
        svg << "<line x1=\"" << margin_l + pw - 150 << "\" y1=\"" << ly << "\" x2=\""
            << margin_l + pw - 122 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
            << "/>\n"
            << "<text x=\"" << margin_l + pw - 116 << "\" y=\"" << ly + 4
            << "\" font-family=\"monospace\" font-size=\"11\">" << s.label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace xeb
