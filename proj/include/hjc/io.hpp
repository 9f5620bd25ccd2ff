#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hjc/config.hpp"
#include "hjc/diagnostics.hpp"
#include "hjc/error.hpp"
#include "hjc/limit.hpp"
#include "hjc/model.hpp"
#include "hjc/trajectories.hpp"
#include "hjc/viscous.hpp"

namespace hjc {

using nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Files

inline void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        fail(ErrorCode::IoError, "cannot create output directory " + dir.string());
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) fail(ErrorCode::IoError, "write to " + path.string() + " failed");
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest text that reads back to the same double.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
    out += '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + fmt(columns[c][r]);
        out += '\n';
    }
    return out;
}

inline std::string limit_series_csv(const LimitSolution& s) {
    return csv({"t", "I", "x_argmax", "x_zero_level", "max_u", "semiconvexity_min"},
               {s.times, s.I, s.x_argmax, s.x_zero, s.max_u, s.semiconvexity_min});
}

inline std::string viscous_series_csv(const ViscousSolution& s) {
    return csv({"t", "I_eps", "x_max", "u_max"}, {s.times, s.I, s.x_max, s.u_max});
}

inline std::string trajectory_csv(const Trajectory& traj) {
    return csv({"s", "gamma", "gamma_dot"}, {traj.times, traj.positions, traj.velocities});
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::vector<double> eps, eI, eu, ratio;
    for (const auto& r : rows) {
        eps.push_back(r.epsilon);
        eI.push_back(r.e_I);
        eu.push_back(r.e_u);
        ratio.push_back(r.ratio);
    }
    return csv({"eps", "e_I", "e_u", "ratio"}, {eps, eI, eu, ratio});
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    [[nodiscard]] const std::vector<double>& column(const std::string& name) const {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) return columns[c];
        fail(ErrorCode::InputMismatch, "csv has no column '" + name + "'");
    }
};

inline CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::InputMismatch, "csv is empty");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) t.header.push_back(cell);
    }
    t.columns.resize(t.header.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(ss, cell, ',')) {
            if (c >= t.columns.size()) fail(ErrorCode::InputMismatch, "csv row wider than its header");
            t.columns[c++].push_back(std::strtod(cell.c_str(), nullptr));
        }
        if (c != t.columns.size()) fail(ErrorCode::InputMismatch, "csv row narrower than its header");
    }
    return t;
}

// ---------------------------------------------------------------------------
// NDJSON snapshots

inline std::string snapshots_ndjson(const std::vector<double>& times, const std::vector<SampledFunction>& snaps) {
    std::string out;
    for (std::size_t s = 0; s < snaps.size(); ++s) {
        const Grid1D& g = snaps[s].grid;
        json j{{"t", times[s]},
               {"x_min", g.x_min()},
               {"x_max", g.x_max()},
               {"n_points", g.size()},
               {"u", snaps[s].values}};
        out += j.dump() + '\n';
    }
    return out;
}

inline std::pair<std::vector<double>, std::vector<SampledFunction>> parse_snapshots(const std::string& text) {
    std::pair<std::vector<double>, std::vector<SampledFunction>> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        const Grid1D g(j.at("x_min").get<double>(), j.at("x_max").get<double>(), j.at("n_points").get<std::size_t>());
        out.first.push_back(j.at("t").get<double>());
        out.second.emplace_back(g, j.at("u").get<std::vector<double>>());
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON documents

inline json to_json(const AssumptionReport& rep) {
    json out = json::object();
    for (const auto& e : rep.entries) {
        json entry{{"status", std::string(to_string(e.status))}};
        json witness = nullptr;
        if (e.witness) {
            witness = json::object();
            witness["x"] = e.witness->x ? json(*e.witness->x) : json(nullptr);
            witness["I"] = e.witness->I ? json(*e.witness->I) : json(nullptr);
        }
        entry["witness"] = witness;
        entry["sampled_bound"] = std::isfinite(e.sampled_bound) ? json(e.sampled_bound) : json(nullptr);
        if (!e.note.empty()) entry["note"] = e.note;
        out[e.id] = entry;
    }
    return out;
}

inline json to_json(const DiagnosticsReport& rep) {
    json entries = json::object();
    for (const auto& e : rep.entries) {
        json extras = json::object();
        for (const auto& [k, v] : e.extras) extras[k] = std::isfinite(v) ? json(v) : json(fmt(v));
        entries[e.name] = {{"measured", e.measured},
                           {"tolerance", e.tolerance},
                           {"verdict", std::string(to_string(e.verdict))},
                           {"provenance", e.provenance},
                           {"extras", extras},
                           {"note", e.note}};
    }
    return {{"summary", rep.pass() ? "pass" : "fail"}, {"entries", entries}};
}

inline json manifest(const std::string& mode, const RunConfig& rc, double wall_seconds, const json& extra = json::object()) {
    json cfg = json::object();
    for (const auto& [k, v] : rc.echo) cfg[k] = v;
    json m{{"mode", mode},
           {"config", cfg},
           {"versions", {{"hjc", kVersion}, {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                                   std::to_string(NLOHMANN_JSON_VERSION_MINOR)}}},
           {"wall_time_seconds", wall_seconds}};
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    return m;
}

/// Flat key set stored in a manifest, usable as a config file again.
inline KeyValues manifest_config(const std::filesystem::path& manifest_path) {
    const json m = json::parse(read_text(manifest_path));
    KeyValues kv;
    for (auto it = m.at("config").begin(); it != m.at("config").end(); ++it) kv[it.key()] = it.value().get<std::string>();
    return kv;
}

/// Rebuilds a stored limit run (config, series, snapshots) from its directory.
inline LimitSolution load_limit_run(const std::filesystem::path& dir) {
    const json m = json::parse(read_text(dir / "manifest.json"));
    if (m.at("mode").get<std::string>() != "limit")
        fail(ErrorCode::InputMismatch, dir.string() + " does not hold a limit run");
    KeyValues kv;
    for (auto it = m.at("config").begin(); it != m.at("config").end(); ++it) kv[it.key()] = it.value().get<std::string>();
    const RunConfig rc = build_run_config(std::nullopt, kv);

    LimitSolution sol;
    sol.config = rc.limit_config();
    const CsvTable t = parse_csv(read_text(dir / "series.csv"));
    sol.times = t.column("t");
    sol.I = t.column("I");
    sol.x_argmax = t.column("x_argmax");
    sol.x_zero = t.column("x_zero_level");
    sol.max_u = t.column("max_u");
    sol.semiconvexity_min = t.column("semiconvexity_min");
    auto snaps = parse_snapshots(read_text(dir / "snapshots.ndjson"));
    sol.snapshot_times = std::move(snaps.first);
    sol.snapshots = std::move(snaps.second);
    const double dx = sol.config.grid.dx();
    for (std::size_t k = 0; k < sol.times.size(); ++k)
        if (!(std::abs(sol.x_argmax[k] - sol.x_zero[k]) <= kMaxPointFlagCells * dx)) sol.flagged.push_back(k);
    return sol;
}

// ---------------------------------------------------------------------------
// SVG line charts

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

inline std::string svg_chart(const std::string& title, const std::vector<Series>& series, const std::string& x_label,
                             const std::string& y_label) {
    constexpr double W = 640, H = 400, L = 60, R = 20, T = 36, B = 48;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!(x1 > x0)) x1 = x0 + 1;
    if (!(y1 > y0)) y1 = y0 + 1;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\">\n", W, H);
    out += buf;
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"22\" font-size=\"15\">%s</text>\n", L, title.c_str());
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"#444\"/>\n", L, T,
                  W - L - R, H - T - B);
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" font-size=\"11\">%.4g</text><text x=\"%g\" y=\"%g\" font-size=\"11\" "
                  "text-anchor=\"end\">%.4g</text>\n",
                  L, H - B + 16, x0, W - R, H - B + 16, x1);
    out += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" font-size=\"11\" text-anchor=\"end\">%.4g</text><text x=\"%g\" y=\"%g\" "
                  "font-size=\"11\" text-anchor=\"end\">%.4g</text>\n",
                  L - 4, H - B, y0, L - 4, T + 10, y1);
    out += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"12\">%s</text>\n", (W - R + L) / 2, H - 12,
                  x_label.c_str());
    out += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"12\" y=\"%g\" font-size=\"12\">%s</text>\n", T - 6, y_label.c_str());
    out += buf;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = colors[k % 6];
        out += std::string("<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"") + color + "\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
            out += buf;
        }
        out += "\"/>\n";
        std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"11\" fill=\"%s\">%s</text>\n", W - R - 150,
                      T + 16 + 14.0 * static_cast<double>(k), color, s.label.c_str());
        out += buf;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace hjc
