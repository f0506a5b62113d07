/// @file svg_plot.hpp
/// @brief Self-contained SVG convergence plots: relative residuals on a
/// log-scale left axis (solid), problematic fractions on a linear right
/// axis (dashed).

#pragma once

#include "unigrid/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace unigrid {

struct PlotSeries {
    std::string label;
    /// Point k is drawn at x = k + 1.
    std::vector<double> residuals;
    std::vector<double> fractions;
};

namespace detail {

inline std::string fmt(const char* f, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

inline constexpr const char* plot_colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

/// Smallest value in {1, 2, 5} x 10^k that is >= v.
inline double nice_ceiling(double v) {
    if (!(v > 0.0)) return 1.0;
    const double e = std::pow(10.0, std::floor(std::log10(v)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * e >= v * (1.0 - 1e-12)) return m * e;
    }
    return 10.0 * e;
}

}  // namespace detail

/// Renders the series into one SVG document.
inline std::string render_convergence_svg(std::span<const PlotSeries> series, const std::string& title,
                                          const std::string& x_label = "iteration") {
    if (series.empty()) throw std::invalid_argument("render_convergence_svg: no series");
    constexpr double W = 760, H = 460, left = 80, right = 80, top = 40, bottom = 60;
    const double pw = W - left - right;
    const double ph = H - top - bottom;

    std::size_t max_len = 1;
    double rmin = 1.0, rmax = 1.0, fmax = 0.0;
    for (const auto& s : series) {
        max_len = std::max({max_len, s.residuals.size(), s.fractions.size()});
        for (double r : s.residuals) {
            if (r > 0.0 && std::isfinite(r)) {
                rmin = std::min(rmin, r);
                rmax = std::max(rmax, r);
            }
        }
        for (double f : s.fractions) {
            if (std::isfinite(f)) fmax = std::max(fmax, f);
        }
    }
    const int dlo = static_cast<int>(std::floor(std::log10(rmin)));
    const int dhi = std::max(0, static_cast<int>(std::ceil(std::log10(rmax))));
    const int dspan = std::max(1, dhi - dlo);
    const double ftop = detail::nice_ceiling(fmax);
    const double xmax = static_cast<double>(max_len);

    auto px = [&](double k) { return left + pw * (max_len > 1 ? (k - 1.0) / (xmax - 1.0) : 0.5); };
    auto py_log = [&](double r) {
        const double lr = std::clamp(std::log10(r), static_cast<double>(dlo), static_cast<double>(dhi));
        return top + ph * (static_cast<double>(dhi) - lr) / dspan;
    };
    auto py_lin = [&](double f) { return top + ph * (1.0 - std::clamp(f / ftop, 0.0, 1.0)); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Left axis: one tick per decade, thinned once more than 20 decades show.
    const int step = std::max(1, (dspan + 19) / 20);
    for (int d = dhi; d >= dlo; d -= step) {
        const double y = py_log(std::pow(10.0, d));
        o << "<line class=\"tick-left\" x1=\"" << left - 5 << "\" y1=\"" << detail::fmt("%.2f", y) << "\" x2=\""
          << left << "\" y2=\"" << detail::fmt("%.2f", y) << "\" stroke=\"black\"/>\n";
        o << "<text class=\"label-left\" x=\"" << left - 8 << "\" y=\"" << detail::fmt("%.2f", y + 4)
          << "\" text-anchor=\"end\">" << detail::fmt("%.0e", std::pow(10.0, d)) << "</text>\n";
    }
    // Right axis: five linear intervals.
    for (int q = 0; q <= 5; ++q) {
        const double f = ftop * q / 5.0;
        const double y = py_lin(f);
        o << "<line class=\"tick-right\" x1=\"" << left + pw << "\" y1=\"" << detail::fmt("%.2f", y) << "\" x2=\""
          << left + pw + 5 << "\" y2=\"" << detail::fmt("%.2f", y) << "\" stroke=\"black\"/>\n";
        o << "<text class=\"label-right\" x=\"" << left + pw + 8 << "\" y=\"" << detail::fmt("%.2f", y + 4) << "\">"
          << detail::fmt("%.3g", f) << "</text>\n";
    }
    // Bottom axis.
    const std::size_t xstep = std::max<std::size_t>(1, max_len / 10);
    for (std::size_t k = 1; k <= max_len; k += xstep) {
        const double x = px(static_cast<double>(k));
        o << "<text x=\"" << detail::fmt("%.2f", x) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << k
          << "</text>\n";
    }
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << x_label
      << "</text>\n";
    o << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + ph / 2 << ")\">relative residual</text>\n";
    o << "<text x=\"" << W - 14 << "\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(90 "
      << W - 14 << ' ' << top + ph / 2 << ")\">problematic fraction</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* color = detail::plot_colors[i % std::size(detail::plot_colors)];
        o << "<polyline class=\"residual\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < s.residuals.size(); ++k) {
            if (!(s.residuals[k] > 0.0) || !std::isfinite(s.residuals[k])) continue;
            o << detail::fmt("%.2f", px(static_cast<double>(k + 1))) << ','
              << detail::fmt("%.2f", py_log(s.residuals[k])) << ' ';
        }
        o << "\"/>\n";
        o << "<polyline class=\"fraction\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.2\" stroke-dasharray=\"5,4\" points=\"";
        for (std::size_t k = 0; k < s.fractions.size(); ++k) {
            o << detail::fmt("%.2f", px(static_cast<double>(k + 1))) << ','
              << detail::fmt("%.2f", py_lin(s.fractions[k])) << ' ';
        }
        o << "\"/>\n";
        const double ly = top + 16.0 + 18.0 * static_cast<double>(i);
        o << "<g class=\"legend-entry\"><line x1=\"" << left + pw - 150 << "\" y1=\"" << ly << "\" x2=\""
          << left + pw - 125 << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/><text x=\""
          << left + pw - 118 << "\" y=\"" << ly + 4 << "\">" << s.label << "</text></g>\n";
    }
    o << "</svg>\n";
    return o.str();
}

inline PlotSeries to_series(const RunResult& r) {
    PlotSeries s;
    s.label = std::string(to_string(r.spec.method));
    if (r.spec.experiment == Experiment::meshgen_1d) {
        s.residuals = r.picard.nonlinear_residuals;
        s.fractions = r.picard.problematic_fractions;
    } else {
        s.residuals = r.linear.rel_residuals;
        s.fractions = r.linear.problematic_fractions;
    }
    return s;
}

inline std::string render_plot(std::span<const RunResult> results) {
    if (results.empty()) throw std::invalid_argument("render_plot: no results");
    std::vector<PlotSeries> series;
    for (const auto& r : results) series.push_back(to_series(r));
    const ExperimentSpec& s = results.front().spec;
    const bool picard = s.experiment == Experiment::meshgen_1d;
    return render_convergence_svg(series, std::string(to_string(s.experiment)) + ", N = " + std::to_string(s.n),
                                  picard ? "Picard iteration" : "iteration");
}

inline void render_plot(std::span<const RunResult> results, const std::filesystem::path& path) {
    const std::string svg = render_plot(results);
    std::ofstream os(path);
    if (!os) throw std::runtime_error("render_plot: cannot open " + path.string());
    os << svg;
    if (!os) throw std::runtime_error("render_plot: write failed for " + path.string());
}

}  // namespace unigrid
