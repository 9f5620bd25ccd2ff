#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hjc/error.hpp"
#include "hjc/hamiltonian.hpp"
#include "hjc/limit.hpp"
#include "hjc/model.hpp"
#include "hjc/numerics.hpp"
#include "hjc/viscous.hpp"

namespace hjc {

/// Flat configuration: dotted keys mapped to raw text values.
using KeyValues = std::map<std::string, std::string>;

struct TrajSettings {
    std::optional<double> x;  ///< endpoint; empty means the max point xbar(t)
    double t = 1.0;
    std::size_t n_steps = 400;
    std::string from;         ///< run directory of a stored limit solution
};

struct RunConfig {
    ModelSpec model;
    Grid1D grid{-5.0, 15.0, 2001};
    TimeGrid time{2.0, 500};
    double epsilon = 0.1;
    double cfl = 0.9;
    int picard_iters = 2;
    RouteParams limit{};
    std::vector<double> sweep_eps{0.25, 0.1, 0.05};
    double concentration_eps = 0.025;  ///< extra viscous run used by the concentration check
    TrajSettings traj{};
    std::string output_dir = "out";
    std::size_t snapshot_stride = 25;
    bool svg = false;
    KeyValues echo;  ///< the effective key set, written to the manifest

    [[nodiscard]] ViscousConfig viscous_config() const {
        ViscousConfig c;
        c.model = model;
        c.grid = grid;
        c.time = time;
        c.epsilon = epsilon;
        c.cfl = cfl;
        c.picard_iters = picard_iters;
        c.snapshot_stride = snapshot_stride;
        return c;
    }
    [[nodiscard]] LimitConfig limit_config(std::optional<Route> route = {}) const {
        LimitConfig c{model, grid, time, limit, snapshot_stride};
        if (route) c.params.route = *route;
        return c;
    }
};

/// Keys a configuration file must set; flags alone may rely on defaults.
inline const std::vector<std::string>& required_keys() {
    static const std::vector<std::string> keys{"model.family", "grid.x_min",   "grid.x_max",
                                               "grid.n_points", "time.t_final", "time.n_steps"};
    return keys;
}

inline KeyValues default_key_values() {
    return {{"model.family", "satexp"},
            {"grid.x_min", "-5"},
            {"grid.x_max", "15"},
            {"grid.n_points", "2001"},
            {"time.t_final", "2"},
            {"time.n_steps", "500"},
            {"viscous.epsilon", "0.1"},
            {"viscous.cfl", "0.9"},
            {"viscous.picard_iters", "2"},
            {"limit.route", "fd_monotone"},
            {"limit.constraint_tol", "1e-10"},
            {"limit.flux", "godunov"},
            {"limit.lf_dissipation", "auto"},
            {"sweep.eps", "0.25,0.1,0.05"},
            {"verify.concentration_eps", "0.025"},
            {"traj.t", "1"},
            {"traj.n_steps", "400"},
            {"output.dir", "out"},
            {"output.snapshot_stride", "25"},
            {"output.svg", "false"}};
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline bool key_allowed(const std::string& key) {
    static const std::set<std::string> fixed{
        "model.family", "model.I_max", "grid.x_min", "grid.x_max", "grid.n_points", "time.t_final",
        "time.n_steps", "viscous.epsilon", "viscous.cfl", "viscous.picard_iters", "limit.route",
        "limit.constraint_tol", "limit.flux", "limit.lf_dissipation", "sweep.eps", "verify.concentration_eps", "traj.x", "traj.t",
        "traj.n_steps", "traj.from", "output.dir", "output.snapshot_stride", "output.svg"};
    return fixed.contains(key) || key.starts_with("model.params.");
}

inline double to_real(const KeyValues& kv, const std::string& key) {
    const std::string& text = kv.at(key);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size() || !std::isfinite(v))
        fail(ErrorCode::ConfigInvalid, key + ": expected a real number, got '" + text + "'");
    return v;
}

inline std::size_t to_count(const KeyValues& kv, const std::string& key) {
    const std::string& text = kv.at(key);
    unsigned long long v = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        fail(ErrorCode::ConfigInvalid, key + ": expected a nonnegative integer, got '" + text + "'");
    return static_cast<std::size_t>(v);
}

inline bool to_bool(const KeyValues& kv, const std::string& key) {
    const std::string& text = kv.at(key);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    fail(ErrorCode::ConfigInvalid, key + ": expected true or false, got '" + text + "'");
}

inline std::vector<double> to_real_list(const KeyValues& kv, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(kv.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
        KeyValues one{{key, trim(item)}};
        out.push_back(to_real(one, key));
    }
    if (out.empty()) fail(ErrorCode::ConfigInvalid, key + ": empty list");
    return out;
}

/// Re-tags solver argument errors with the configuration key that caused them.
template <class F>
auto with_key(const std::string& key, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigInvalid && std::string_view(e.what()).find(key) != std::string_view::npos) throw;
        std::string what = e.what();
        if (const auto colon = what.find(": "); colon != std::string::npos) what.erase(0, colon + 2);
        fail(ErrorCode::ConfigInvalid, key + ": " + what);
    }
}

}  // namespace detail

/// Parses `key = value` lines; '#' starts a comment.
inline KeyValues parse_key_values(std::string_view text) {
    KeyValues out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = detail::trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::ConfigInvalid, "line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(std::string_view(body).substr(0, eq));
        const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) fail(ErrorCode::ConfigInvalid, "line " + std::to_string(lineno) + ": empty key");
        if (out.contains(key)) fail(ErrorCode::ConfigInvalid, key + ": set twice");
        out[key] = value;
    }
    return out;
}

inline KeyValues read_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str());
}

inline std::string format_key_values(const KeyValues& kv) {
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

/// Builds a RunConfig from file values and flag overrides. With a file, every
/// required key must be present in the file or the overrides.
inline RunConfig build_run_config(const std::optional<KeyValues>& file, const KeyValues& overrides) {
    KeyValues kv = default_key_values();
    if (file) {
        for (const auto& key : required_keys())
            if (!file->contains(key) && !overrides.contains(key))
                fail(ErrorCode::ConfigInvalid, key + ": missing from the configuration");
        for (const auto& [k, v] : *file) kv[k] = v;
    }
    for (const auto& [k, v] : overrides) kv[k] = v;
    for (const auto& [k, v] : kv)
        if (!detail::key_allowed(k)) fail(ErrorCode::ConfigInvalid, k + ": unknown key");

    using detail::to_count;
    using detail::to_real;
    using detail::with_key;
    RunConfig rc;
    rc.echo = kv;

    std::map<std::string, double> params;
    for (const auto& [k, v] : kv)
        if (k.starts_with("model.params.")) params[k.substr(13)] = to_real(kv, k);
    if (kv.contains("model.I_max")) params["I_max"] = to_real(kv, "model.I_max");
    rc.model = with_key("model.family", [&] { return resolve_model(kv.at("model.family"), params); });

    const double x_min = to_real(kv, "grid.x_min");
    const double x_max = to_real(kv, "grid.x_max");
    const std::size_t n_points = to_count(kv, "grid.n_points");
    if (!(x_min < x_max)) fail(ErrorCode::ConfigInvalid, "grid.x_max: must exceed grid.x_min");
    if (n_points < 3) fail(ErrorCode::ConfigInvalid, "grid.n_points: must be at least 3");
    rc.grid = Grid1D(x_min, x_max, n_points);
    const double t_final = to_real(kv, "time.t_final");
    const std::size_t n_steps = to_count(kv, "time.n_steps");
    if (!(t_final > 0.0)) fail(ErrorCode::ConfigInvalid, "time.t_final: must be positive");
    if (n_steps < 1) fail(ErrorCode::ConfigInvalid, "time.n_steps: must be at least 1");
    rc.time = TimeGrid(t_final, n_steps);

    rc.epsilon = to_real(kv, "viscous.epsilon");
    if (!(rc.epsilon > 0.0)) fail(ErrorCode::ConfigInvalid, "viscous.epsilon: must be positive");
    rc.cfl = to_real(kv, "viscous.cfl");
    if (!(rc.cfl > 0.0 && rc.cfl < 1.0)) fail(ErrorCode::ConfigInvalid, "viscous.cfl: must lie in (0, 1)");
    rc.picard_iters = static_cast<int>(to_count(kv, "viscous.picard_iters"));

    rc.limit.route = with_key("limit.route", [&] { return parse_route(kv.at("limit.route")); });
    rc.limit.constraint_tol = to_real(kv, "limit.constraint_tol");
    if (!(rc.limit.constraint_tol > 0.0)) fail(ErrorCode::ConfigInvalid, "limit.constraint_tol: must be positive");
    rc.limit.flux = with_key("limit.flux", [&] { return parse_flux(kv.at("limit.flux")); });
    if (kv.at("limit.lf_dissipation") != "auto") {
        const double a = to_real(kv, "limit.lf_dissipation");
        if (!(a > 0.0)) fail(ErrorCode::ConfigInvalid, "limit.lf_dissipation: must be positive or auto");
        rc.limit.lf_dissipation = a;
    }

    rc.sweep_eps = detail::to_real_list(kv, "sweep.eps");
    for (double e : rc.sweep_eps)
        if (!(e > 0.0)) fail(ErrorCode::ConfigInvalid, "sweep.eps: values must be positive");
    rc.concentration_eps = to_real(kv, "verify.concentration_eps");
    if (!(rc.concentration_eps > 0.0)) fail(ErrorCode::ConfigInvalid, "verify.concentration_eps: must be positive");
    if (kv.contains("traj.x")) rc.traj.x = to_real(kv, "traj.x");
    rc.traj.t = to_real(kv, "traj.t");
    rc.traj.n_steps = to_count(kv, "traj.n_steps");
    if (kv.contains("traj.from")) rc.traj.from = kv.at("traj.from");

    rc.output_dir = kv.at("output.dir");
    if (rc.output_dir.empty()) fail(ErrorCode::ConfigInvalid, "output.dir: must not be empty");
    rc.snapshot_stride = to_count(kv, "output.snapshot_stride");
    if (rc.snapshot_stride == 0) fail(ErrorCode::ConfigInvalid, "output.snapshot_stride: must be positive");
    rc.svg = detail::to_bool(kv, "output.svg");
    return rc;
}

}  // namespace hjc
