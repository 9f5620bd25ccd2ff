// hjc: solver and verification driver for the constrained HJ problem.
//
// Exit codes: 0 success / all checks pass, 1 execution or configuration
// error, 2 a check failed.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hjc/hjc.hpp"

namespace fs = std::filesystem;
using namespace hjc;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;

const std::vector<std::string> kFlagKeys{
    "model.family",    "model.I_max",          "grid.x_min",     "grid.x_max",          "grid.n_points",
    "time.t_final",    "time.n_steps",         "viscous.epsilon", "viscous.cfl",        "viscous.picard_iters",
    "limit.route",     "limit.constraint_tol", "limit.flux",     "limit.lf_dissipation", "sweep.eps",
    "verify.concentration_eps", "traj.n_steps", "output.dir",    "output.snapshot_stride", "output.svg"};

struct CommonArgs {
    std::string config_path;
    std::map<std::string, std::string> flags;
    std::vector<std::string> params;  // name=value, mapped to model.params.<name>
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "flat key = value file, or a manifest.json to re-run");
    for (const auto& key : kFlagKeys) sub->add_option("--" + key, args.flags[key], "overrides " + key);
    sub->add_option("--param", args.params, "model parameter as name=value (repeatable)");
}

RunConfig resolve_config(const CommonArgs& args, const KeyValues& extra = {}) {
    KeyValues overrides;
    for (const auto& [k, v] : args.flags)
        if (!v.empty()) overrides[k] = v;
    for (const auto& p : args.params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos) fail(ErrorCode::ConfigInvalid, "--param expects name=value, got '" + p + "'");
        overrides["model.params." + p.substr(0, eq)] = p.substr(eq + 1);
    }
    for (const auto& [k, v] : extra) overrides[k] = v;
    std::optional<KeyValues> file;
    if (!args.config_path.empty()) {
        if (fs::path(args.config_path).extension() == ".json") file = manifest_config(args.config_path);
        else file = read_key_value_file(args.config_path);
    }
    return build_run_config(file, overrides);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_limit_run(const fs::path& dir, const RunConfig& rc, const LimitSolution& s, double wall) {
    ensure_directory(dir);
    RunConfig echo = rc;
    echo.echo["limit.route"] = std::string(to_string(s.config.params.route));
    json extra{{"valid", s.valid}, {"flagged_steps", s.flagged}};
    if (s.failure) extra["failure"] = {{"code", std::string(to_string(s.failure->code))}, {"message", s.failure->message}, {"step", s.failure->step}};
    write_text(dir / "manifest.json", manifest("limit", echo, wall, extra).dump(2) + "\n");
    write_text(dir / "series.csv", limit_series_csv(s));
    write_text(dir / "snapshots.ndjson", snapshots_ndjson(s.snapshot_times, s.snapshots));
    if (rc.svg) {
        write_text(dir / "I.svg", svg_chart("multiplier I(t)", {{"I", s.times, s.I}}, "t", "I"));
        write_text(dir / "xbar.svg", svg_chart("maximum point", {{"argmax", s.times, s.x_argmax}, {"zero level", s.times, s.x_zero}}, "t", "x"));
        std::vector<Series> snaps;
        const std::size_t step = std::max<std::size_t>(1, s.snapshots.size() / 5);
        for (std::size_t i = 0; i < s.snapshots.size(); i += step) {
            char label[32];
            std::snprintf(label, sizeof label, "t=%.3g", s.snapshot_times[i]);
            snaps.push_back({label, s.snapshots[i].grid.nodes(), s.snapshots[i].values});
        }
        write_text(dir / "u.svg", svg_chart("u(., t)", snaps, "x", "u"));
    }
}

void write_viscous_run(const fs::path& dir, const RunConfig& rc, const ViscousSolution& s, double wall) {
    ensure_directory(dir);
    RunConfig echo = rc;
    char eps[32];
    std::snprintf(eps, sizeof eps, "%.17g", s.config.epsilon);
    echo.echo["viscous.epsilon"] = eps;
    json extra{{"valid", s.valid}};
    if (s.failure) extra["failure"] = {{"code", std::string(to_string(s.failure->code))}, {"message", s.failure->message}, {"step", s.failure->step}};
    write_text(dir / "manifest.json", manifest("viscous", echo, wall, extra).dump(2) + "\n");
    write_text(dir / "series.csv", viscous_series_csv(s));
    write_text(dir / "snapshots.ndjson", snapshots_ndjson(s.snapshot_times, s.snapshots));
    if (rc.svg) {
        write_text(dir / "I.svg", svg_chart("I_eps(t)", {{"I_eps", s.times, s.I}}, "t", "I"));
        write_text(dir / "xbar.svg", svg_chart("argmax of u_eps", {{"x_max", s.times, s.x_max}}, "t", "x"));
    }
}

std::string eps_dir(double eps) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "eps_%g", eps);
    return buf;
}

void print_report(const DiagnosticsReport& rep) {
    for (const auto& e : rep.entries)
        std::printf("%-24s %-15s measured=%-12.5g tolerance=%.5g\n", e.name.c_str(), std::string(to_string(e.verdict)).c_str(),
                    e.measured, e.tolerance);
    std::printf("summary: %s\n", rep.pass() ? "pass" : "fail");
}

// ---------------------------------------------------------------------------

int cmd_check_model(const RunConfig& rc) {
    const auto t0 = std::chrono::steady_clock::now();
    const AssumptionReport rep = check_assumptions_default(rc.model, rc.grid);
    const json doc = to_json(rep);
    ensure_directory(rc.output_dir);
    write_text(fs::path(rc.output_dir) / "report.json", doc.dump(2) + "\n");
    write_text(fs::path(rc.output_dir) / "manifest.json", manifest("check-model", rc, seconds_since(t0)).dump(2) + "\n");
    std::cout << doc.dump(2) << "\n";
    return rep.all_pass() ? kExitPass : kExitCheckFailed;
}

int cmd_viscous(const RunConfig& rc) {
    ensure_directory(rc.output_dir);
    const auto t0 = std::chrono::steady_clock::now();
    const ViscousSolution s = run_viscous(rc.viscous_config());
    write_viscous_run(rc.output_dir, rc, s, seconds_since(t0));
    if (!s.valid) {
        std::cerr << "run stopped at step " << s.failure->step << ": " << s.failure->message << "\n";
        return kExitError;
    }
    std::printf("viscous eps=%g: I_eps(T)=%.6g x_max(T)=%.6g\n", rc.epsilon, s.I.back(), s.x_max.back());
    return kExitPass;
}

int cmd_limit(const RunConfig& rc) {
    ensure_directory(rc.output_dir);
    const auto t0 = std::chrono::steady_clock::now();
    const LimitSolution s = run_limit(rc.limit_config());
    write_limit_run(rc.output_dir, rc, s, seconds_since(t0));
    if (!s.valid) {
        std::cerr << "run stopped at step " << s.failure->step << ": " << s.failure->message << "\n";
        return kExitError;
    }
    std::printf("limit %s: I(T)=%.6g xbar(T)=%.6g flagged steps=%zu\n", std::string(to_string(rc.limit.route)).c_str(),
                s.I.back(), s.x_argmax.back(), s.flagged.size());
    return kExitPass;
}

int cmd_traj(const RunConfig& rc) {
    ensure_directory(rc.output_dir);
    const auto t0 = std::chrono::steady_clock::now();
    LimitSolution sol = rc.traj.from.empty() ? run_limit(rc.limit_config()) : load_limit_run(rc.traj.from);
    if (!sol.valid) fail(ErrorCode::PreconditionFailed, "limit solution is flagged invalid");
    const ModelSpec& model = sol.config.model;
    json extra{{"t", rc.traj.t}};
    Trajectory traj;
    if (rc.traj.x) {
        const auto scan = default_scan(sol.config.grid);
        ShootingOptions opts;
        opts.n_steps = rc.traj.n_steps;
        const auto opt = optimize_endpoint(*rc.traj.x, rc.traj.t, multiplier_path(sol), model, scan, opts,
                                           std::make_pair(sol.config.grid.x_min(), sol.config.grid.x_max()));
        traj = opt.trajectory;
        json branches = json::array();
        for (const auto& b : opt.branches) branches.push_back({{"initial_point", b.initial_point}, {"action", b.action}});
        extra["kind"] = "optimize_endpoint";
        extra["x"] = *rc.traj.x;
        extra["branches"] = branches;
        extra["tie"] = opt.tie;
        if (const SampledFunction* u = sol.snapshot_at(rc.traj.t)) extra["grid_u"] = interp_linear(*u, *rc.traj.x);
    } else {
        const auto mp = max_point_trajectory(sol, model, rc.traj.t, rc.traj.n_steps);
        traj = mp.trajectory;
        const auto margin = check_path_above_zero_level(traj, sol);
        extra["kind"] = "max_point";
        extra["transversality_residual"] = mp.transversality_residual;
        extra["zero_level_margin"] = margin.margin;
        extra["zero_level_pass"] = margin.pass;
    }
    extra["action"] = traj.action;
    extra["initial_point"] = traj.initial_point();
    extra["endpoint"] = traj.endpoint();
    write_text(fs::path(rc.output_dir) / "series.csv", trajectory_csv(traj));
    write_text(fs::path(rc.output_dir) / "manifest.json", manifest("traj", rc, seconds_since(t0), extra).dump(2) + "\n");
    if (rc.svg)
        write_text(fs::path(rc.output_dir) / "gamma.svg", svg_chart("trajectory", {{"gamma", traj.times, traj.positions}}, "s", "gamma"));
    std::printf("trajectory: gamma(0)=%.6g gamma(t)=%.6g action=%.6g\n", traj.initial_point(), traj.endpoint(), traj.action);
    return kExitPass;
}

int cmd_verify(const RunConfig& rc) {
    ensure_directory(rc.output_dir);
    const auto t0 = std::chrono::steady_clock::now();
    auto fd = std::async(std::launch::async, [&] { return run_limit(rc.limit_config(Route::fd_monotone)); });
    auto lax = std::async(std::launch::async, [&] { return run_limit(rc.limit_config(Route::lax_oleinik)); });
    std::vector<std::future<ViscousSolution>> jobs;
    std::vector<double> eps_all = rc.sweep_eps;
    eps_all.push_back(rc.concentration_eps);
    for (double eps : eps_all) {
        ViscousConfig c = rc.viscous_config();
        c.epsilon = eps;
        jobs.push_back(std::async(std::launch::async, [c] { return run_viscous(c); }));
    }
    std::vector<LimitSolution> limits{fd.get(), lax.get()};
    std::vector<ViscousSolution> ladder;
    for (auto& j : jobs) ladder.push_back(j.get());
    const ViscousSolution conc = ladder.back();
    ladder.pop_back();

    const fs::path out(rc.output_dir);
    write_limit_run(out / "limit_fd", rc, limits[0], 0.0);
    write_limit_run(out / "limit_lax", rc, limits[1], 0.0);
    for (const auto& v : ladder) write_viscous_run(out / eps_dir(v.config.epsilon), rc, v, 0.0);
    write_viscous_run(out / ("concentration_" + eps_dir(conc.config.epsilon)), rc, conc, 0.0);
    for (const auto& s : limits)
        if (!s.valid) fail(s.failure->code, describe(s) + ": " + s.failure->message);
    for (const auto& v : ladder)
        if (!v.valid) fail(v.failure->code, describe(v) + ": " + v.failure->message);
    if (!conc.valid) fail(conc.failure->code, describe(conc) + ": " + conc.failure->message);

    const DiagnosticsReport rep = diag_suite(ladder, limits, rc.model, {}, &conc);
    write_text(out / "report.json", to_json(rep).dump(2) + "\n");
    write_text(out / "manifest.json", manifest("verify", rc, seconds_since(t0)).dump(2) + "\n");
    print_report(rep);
    return rep.pass() ? kExitPass : kExitCheckFailed;
}

int cmd_sweep(const RunConfig& rc) {
    ensure_directory(rc.output_dir);
    const auto t0 = std::chrono::steady_clock::now();
    const SweepResult res = sweep_eps(rc.viscous_config(), rc.sweep_eps, rc.limit_config());
    const fs::path out(rc.output_dir);
    for (const auto& v : res.runs) write_viscous_run(out / eps_dir(v.config.epsilon), rc, v, 0.0);
    write_text(out / "series.csv", sweep_csv(res.rows));

    bool ok = true;
    for (std::size_t i = 1; i < res.rows.size(); ++i)
        ok = ok && res.rows[i].e_I < res.rows[i - 1].e_I && res.rows[i].ratio <= ToleranceProfile{}.eps_ratio;
    json rows = json::array();
    for (const auto& r : res.rows) {
        std::printf("eps=%-8g e_I=%-12.5g e_u=%-12.5g ratio=%.4g\n", r.epsilon, r.e_I, r.e_u, r.ratio);
        rows.push_back({{"eps", r.epsilon}, {"e_I", r.e_I}, {"e_u", r.e_u}, {"ratio", std::isfinite(r.ratio) ? json(r.ratio) : json(nullptr)}});
    }
    write_text(out / "report.json", json{{"summary", ok ? "pass" : "fail"}, {"rows", rows}}.dump(2) + "\n");
    write_text(out / "manifest.json", manifest("sweep-eps", rc, seconds_since(t0)).dump(2) + "\n");
    return ok ? kExitPass : kExitCheckFailed;
}

int cmd_compare(const RunConfig& rc) {
    ensure_directory(rc.output_dir);
    const auto t0 = std::chrono::steady_clock::now();
    auto fd = std::async(std::launch::async, [&] { return run_limit(rc.limit_config(Route::fd_monotone)); });
    auto lax = std::async(std::launch::async, [&] { return run_limit(rc.limit_config(Route::lax_oleinik)); });
    const LimitSolution a = fd.get(), b = lax.get();
    const fs::path out(rc.output_dir);
    write_limit_run(out / "limit_fd", rc, a, 0.0);
    write_limit_run(out / "limit_lax", rc, b, 0.0);
    if (!a.valid) fail(a.failure->code, describe(a) + ": " + a.failure->message);
    if (!b.valid) fail(b.failure->code, describe(b) + ": " + b.failure->message);

    const ToleranceProfile tol;
    const RouteComparison c = compare_routes(a, b, tol.q_window);
    const double dx = rc.grid.dx();
    const bool unique_ok = c.I_gap <= tol.cross_route_I_cells * dx && c.u_gap <= tol.cross_route_u_cells * dx;
    const bool q_ok = c.q_worst_window <= tol.q_identity_cells * dx;
    const json report{{"summary", unique_ok && q_ok ? "pass" : "fail"},
                      {"I_gap", c.I_gap},
                      {"I_gap_time", c.I_gap_time},
                      {"I_gap_tolerance", tol.cross_route_I_cells * dx},
                      {"u_gap", c.u_gap},
                      {"u_gap_tolerance", tol.cross_route_u_cells * dx},
                      {"q_worst_window", c.q_worst_window},
                      {"q_worst_window_start", c.q_worst_window_start},
                      {"q_full_horizon", c.q_full},
                      {"q_tolerance", tol.q_identity_cells * dx}};
    write_text(out / "report.json", report.dump(2) + "\n");
    write_text(out / "manifest.json", manifest("compare", rc, seconds_since(t0)).dump(2) + "\n");
    if (rc.svg)
        write_text(out / "I.svg", svg_chart("I(t) by route", {{"fd_monotone", a.times, a.I}, {"lax_oleinik", b.times, b.I}}, "t", "I"));
    std::printf("sup|I_fd - I_lax| = %.5g (tol %.3g), sup|u_fd - u_lax| = %.5g (tol %.3g), worst Q window = %.5g (tol %.3g)\n",
                c.I_gap, tol.cross_route_I_cells * dx, c.u_gap, tol.cross_route_u_cells * dx, c.q_worst_window,
                tol.q_identity_cells * dx);
    return unique_ok && q_ok ? kExitPass : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained Hamilton-Jacobi solver and verification driver"};
    app.require_subcommand(1);

    struct Command {
        std::string name;
        std::string help;
        std::function<int(const RunConfig&)> run;
    };
    const std::vector<Command> commands{
        {"check-model", "check assumptions A1..A8 for the selected model", cmd_check_model},
        {"viscous", "solve the epsilon-regularized problem", cmd_viscous},
        {"limit", "solve the constrained limit problem on one route", cmd_limit},
        {"traj", "reconstruct an optimizing trajectory", cmd_traj},
        {"verify", "run both routes and the epsilon ladder, then every diagnostic", cmd_verify},
        {"sweep-eps", "tabulate the distance of I_eps to the limit multiplier", cmd_sweep},
        {"compare", "cross-route comparison of the two limit solvers", cmd_compare},
    };

    std::vector<CommonArgs> args(commands.size());
    std::vector<CLI::App*> subs;
    std::optional<double> traj_x;
    std::string traj_t, traj_from;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        CLI::App* sub = app.add_subcommand(commands[i].name, commands[i].help);
        add_common(sub, args[i]);
        if (commands[i].name == "traj") {
            sub->add_option("--x", traj_x, "endpoint x; omit for the maximum point");
            sub->add_option("--t", traj_t, "horizon t");
            sub->add_option("--from", traj_from, "directory of a stored limit run");
        }
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitError;
    }

    for (std::size_t i = 0; i < commands.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        try {
            KeyValues extra;
            if (traj_x) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", *traj_x);
                extra["traj.x"] = buf;
            }
            if (!traj_t.empty()) extra["traj.t"] = traj_t;
            if (!traj_from.empty()) extra["traj.from"] = traj_from;
            const RunConfig rc = resolve_config(args[i], extra);
            return commands[i].run(rc);
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitError;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitError;
        }
    }
    return kExitError;
}
