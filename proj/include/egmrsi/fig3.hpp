#ifndef EGMRSI_FIG3_HPP
#define EGMRSI_FIG3_HPP

// Information-gain trajectory over a short default run: first crossing of
// the activation threshold, persistence of activation afterwards, and an
// SVG line plot of I_t with the threshold drawn dashed.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egmrsi/config.hpp"
#include "egmrsi/errors.hpp"
#include "egmrsi/runner.hpp"
#include "egmrsi/trace.hpp"

namespace egmrsi {

inline constexpr std::size_t kFig3Steps = 150;

struct Fig3Result {
    std::optional<std::size_t> crossing_step;  // first t with i_pred > Gamma
    double activity_rate = 0.0;                // fired fraction over t > crossing
    std::size_t post_crossing_steps = 0;
    double gamma = 0.0;
    std::vector<TraceRow> rows;
};

/// Crossing and persistence from an existing trace.
inline Fig3Result analyze_fig3(std::span<const TraceRow> rows, double gamma) {
    Fig3Result r;
    r.gamma = gamma;
    r.rows.assign(rows.begin(), rows.end());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].i_pred > gamma) {
            r.crossing_step = static_cast<std::size_t>(rows[i].t);
            std::size_t fired = 0;
            for (std::size_t j = i + 1; j < rows.size(); ++j) fired += rows[j].fired != 0 ? 1 : 0;
            r.post_crossing_steps = rows.size() - i - 1;
            r.activity_rate = r.post_crossing_steps ? static_cast<double>(fired) / static_cast<double>(r.post_crossing_steps) : 0.0;
            break;
        }
    }
    return r;
}

/// Runs the first 150 steps of `cfg` (which must allow at least that many).
inline Fig3Result fig3(const RunConfig& cfg) {
    if (cfg.steps < kFig3Steps) {
        throw PreconditionError("fig3 needs run.steps >= " + std::to_string(kFig3Steps) + ", got " +
                                std::to_string(cfg.steps));
    }
    RunConfig short_cfg = cfg;
    short_cfg.steps = kFig3Steps;
    Simulation sim(short_cfg);
    while (!sim.done()) sim.step();
    return analyze_fig3(sim.rows(), cfg.gamma);
}

/// Standalone SVG: I_t polyline, dashed Gamma level, crossing marker.
inline std::string fig3_svg(const Fig3Result& r) {
    constexpr double width = 720.0, height = 400.0;
    constexpr double left = 70.0, right = 20.0, top = 40.0, bottom = 50.0;
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    const std::size_t n = r.rows.size();
    double y_max = std::max(r.gamma, 1e-3);
    for (const TraceRow& row : r.rows) y_max = std::max(y_max, row.i_pred);
    y_max *= 1.1;
    double y_min = 0.0;
    for (const TraceRow& row : r.rows) y_min = std::min(y_min, row.i_pred);
    const double x_span = n > 1 ? static_cast<double>(n - 1) : 1.0;
    const auto sx = [&](double t) { return left + pw * t / x_span; };
    const auto sy = [&](double v) { return top + ph * (1.0 - (v - y_min) / (y_max - y_min)); };
    char buf[256];
    std::string s;
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                  width, height, width, height);
    s += buf;
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">"
                  "Intrinsic information gain I_t over %zu steps</text>\n",
                  left + pw / 2.0, n);
    s += buf;
    // Axes.
    std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", left,
                  top + ph, left + pw, top + ph);
    s += buf;
    std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", left, top,
                  left, top + ph);
    s += buf;
    for (int i = 0; i <= 5; ++i) {
        const double t = x_span * i / 5.0;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" "
                      "text-anchor=\"middle\">%.0f</text>\n",
                      sx(t), top + ph + 16.0, t);
        s += buf;
        const double v = y_min + (y_max - y_min) * i / 5.0;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" "
                      "text-anchor=\"end\">%.3g</text>\n",
                      left - 6.0, sy(v) + 4.0, v);
        s += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">step t</text>\n",
                  left + pw / 2.0, height - 12.0);
    s += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"18\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
                  "transform=\"rotate(-90 18 %.1f)\">I_t (nats)</text>\n",
                  top + ph / 2.0, top + ph / 2.0);
    s += buf;
    // Threshold.
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.2f\" x2=\"%.1f\" y2=\"%.2f\" stroke=\"firebrick\" stroke-dasharray=\"6 4\"/>\n",
                  left, sy(r.gamma), left + pw, sy(r.gamma));
    s += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"11\" fill=\"firebrick\" "
                  "text-anchor=\"end\">Gamma = %.3g</text>\n",
                  left + pw - 4.0, sy(r.gamma) - 5.0, r.gamma);
    s += buf;
    // Trajectory.
    if (n > 0) {
        s += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.6\" points=\"";
        for (std::size_t i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i ? " " : "", sx(static_cast<double>(i)), sy(r.rows[i].i_pred));
            s += buf;
        }
        s += "\"/>\n";
    }
    if (r.crossing_step && *r.crossing_step < n) {
        const double cx = sx(static_cast<double>(*r.crossing_step));
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%.1f\" x2=\"%.2f\" y2=\"%.1f\" stroke=\"gray\" stroke-dasharray=\"2 3\"/>\n",
                      cx, top, cx, top + ph);
        s += buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.2f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" fill=\"gray\">"
                      "t* = %zu, active %.1f%% after</text>\n",
                      cx + 4.0, top + 12.0, *r.crossing_step, 100.0 * r.activity_rate);
        s += buf;
    }
    s += "</svg>\n";
    return s;
}

inline void write_fig3_svg(const std::string& path, const Fig3Result& r) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open plot file for writing: " + path);
    os << fig3_svg(r);
    if (!os) throw Error("failed writing plot file: " + path);
}

inline KeyValueReport fig3_report(const Fig3Result& r) {
    KeyValueReport rep;
    rep.set("gamma", r.gamma);
    rep.set("steps", r.rows.size());
    rep.set("crossing_step", r.crossing_step ? std::to_string(*r.crossing_step) : std::string("none"));
    rep.set("post_crossing_steps", r.post_crossing_steps);
    rep.set("post_crossing_activity_rate", r.activity_rate);
    return rep;
}

}  // namespace egmrsi

#endif
