#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <future>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hjc/error.hpp"
#include "hjc/limit.hpp"
#include "hjc/model.hpp"
#include "hjc/numerics.hpp"
#include "hjc/trajectories.hpp"
#include "hjc/viscous.hpp"

namespace hjc {

/// Tolerances of the diagnostics suite. Grid-tied entries are multiples of dx.
struct ToleranceProfile {
    double burn_in = 0.1;               ///< checks on xbar start here
    double zero_reaction_cells = 10.0;
    double maxpoint_cells = 10.0;
    double multiplier_start = 0.05;
    double multiplier_upper_slack = 1e-8;
    double multiplier_monotone = 1e-6;
    double semiconvexity_slack = 0.1;
    double derivative_cells = 10.0;
    double transversality = 0.05;
    double cross_route_I_cells = 5.0;
    double cross_route_u_cells = 20.0;
    double q_identity_cells = 10.0;
    double q_window = 0.25;
    double variational_cells = 20.0;
    double zero_level_cells = 1.0;
    double eps_ratio = 0.9;
    double concentration_fraction = 0.95;
    double concentration_radius = 0.5;
    std::pair<double, double> concentration_window{0.5, 2.0};
    double rho_factor = 2.0;
    std::vector<double> path_times{0.5, 1.0, 2.0};
};

struct DiagnosticEntry {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    CheckStatus verdict = CheckStatus::not_applicable;
    std::string provenance;
    std::map<std::string, double> extras;
    std::string note;
};

struct DiagnosticsReport {
    std::vector<DiagnosticEntry> entries;

    [[nodiscard]] bool pass() const {
        return std::none_of(entries.begin(), entries.end(),
                            [](const DiagnosticEntry& e) { return e.verdict == CheckStatus::fail; });
    }
    [[nodiscard]] const DiagnosticEntry& at(std::string_view name) const {
        for (const auto& e : entries)
            if (e.name == name) return e;
        fail(ErrorCode::InvalidArgument, "no diagnostic named '" + std::string(name) + "'");
    }
};

inline constexpr std::array<std::string_view, 15> kDiagnosticNames{
    "constraint_max",      "zero_reaction",          "multiplier_bounds",     "multiplier_start",
    "multiplier_monotone", "maxpoint_consistency",   "semiconvexity",         "derivative_at_max",
    "cross_route_uniqueness", "q_integral_identity", "variational_agreement", "path_above_zero_level",
    "eps_convergence",     "dirac_concentration",    "rho_consistency"};

// ---------------------------------------------------------------------------
// Building blocks shared with the CLI and the acceptance runner

inline std::string describe(const LimitSolution& s) {
    return std::string("limit:") + std::string(to_string(s.config.params.route)) + " n=" +
           std::to_string(s.config.grid.size()) + " steps=" + std::to_string(s.config.time.n_steps());
}

inline std::string describe(const ViscousSolution& s) {
    char eps[32];
    std::snprintf(eps, sizeof eps, "%g", s.config.epsilon);
    return std::string("viscous:eps=") + eps + " n=" + std::to_string(s.config.grid.size()) +
           " steps=" + std::to_string(s.config.time.n_steps());
}

/// Snapshot whose time is closest to t.
inline const SampledFunction& nearest_snapshot(const std::vector<double>& times,
                                               const std::vector<SampledFunction>& snaps, double t,
                                               double* at_time = nullptr) {
    if (snaps.empty()) fail(ErrorCode::InvalidArgument, "no snapshots recorded");
    std::size_t best = 0;
    for (std::size_t s = 1; s < times.size(); ++s)
        if (std::abs(times[s] - t) < std::abs(times[best] - t)) best = s;
    if (at_time) *at_time = times[best];
    return snaps[best];
}

/// Semiconvexity constant: ||u0''|| + t sup_I ||R_xx||.
inline double semiconvexity_bound(const ModelSpec& m, double t) {
    return initial_curvature_bound(m) + t * reaction_curvature_bound(m);
}

struct RouteComparison {
    double I_gap = 0.0;             ///< sup_t |I_a - I_b|
    double I_gap_time = 0.0;
    double u_gap = 0.0;             ///< sup over common snapshots and nodes
    double q_full = 0.0;            ///< |int (Q(I_a) - Q(I_b))| / T
    double q_worst_window = 0.0;    ///< worst normalized sliding window
    double q_worst_window_start = 0.0;
};

/// Fields are compared on common snapshot times; I is held constant over each step.
inline RouteComparison compare_routes(const LimitSolution& a, const LimitSolution& b, double window_length) {
    if (!(a.config.grid == b.config.grid) || !(a.config.time == b.config.time))
        fail(ErrorCode::InputMismatch, "route comparison needs identical space and time grids");
    if (!(a.config.model == b.config.model)) fail(ErrorCode::InputMismatch, "route comparison needs one model");
    const ModelSpec& m = a.config.model;
    const std::size_t n = std::min(a.I.size(), b.I.size());
    RouteComparison out;
    for (std::size_t k = 0; k < n; ++k) {
        const double d = std::abs(a.I[k] - b.I[k]);
        if (d > out.I_gap) {
            out.I_gap = d;
            out.I_gap_time = a.times[k];
        }
    }
    for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
        const SampledFunction* other = b.snapshot_at(a.snapshot_times[s]);
        if (!other) continue;
        for (std::size_t j = 0; j < other->size(); ++j)
            out.u_gap = std::max(out.u_gap, std::abs(a.snapshots[s].values[j] - other->values[j]));
    }

    const double dt = a.config.time.dt();
    const std::size_t steps = n > 0 ? n - 1 : 0;  // intervals [t_k, t_k+1] with a recorded I_k
    std::vector<double> prefix(steps + 1, 0.0);
    for (std::size_t k = 0; k < steps; ++k)
        prefix[k + 1] = prefix[k] + dt * (eval_Q(m, a.I[k]) - eval_Q(m, b.I[k]));
    const double horizon = dt * static_cast<double>(steps);
    if (steps == 0) return out;
    out.q_full = std::abs(prefix[steps]) / horizon;
    auto width = static_cast<std::size_t>(std::llround(window_length / dt));
    width = std::clamp<std::size_t>(width, 1, steps);
    for (std::size_t k = 0; k + width <= steps; ++k) {
        const double v = std::abs(prefix[k + width] - prefix[k]) / (dt * static_cast<double>(width));
        if (v > out.q_worst_window) {
            out.q_worst_window = v;
            out.q_worst_window_start = a.times[k];
        }
    }
    out.q_worst_window = std::max(out.q_worst_window, out.q_full);
    return out;
}

struct ViscousErrors {
    double e_I = 0.0;  ///< sup_t |I^eps - I|
    double e_I_time = 0.0;
    double e_u = 0.0;  ///< sup over common snapshots and nodes of |u^eps - u|
};

inline ViscousErrors viscous_errors(const ViscousSolution& v, const LimitSolution& lim) {
    ViscousErrors out;
    for (std::size_t k = 0; k < v.I.size(); ++k) {
        const double d = std::abs(v.I[k] - interp_table(lim.times, lim.I, v.times[k]));
        if (d > out.e_I) {
            out.e_I = d;
            out.e_I_time = v.times[k];
        }
    }
    const double half = 0.5 * lim.config.time.dt();
    for (std::size_t s = 0; s < v.snapshots.size(); ++s) {
        double t_lim = 0.0;
        if (lim.snapshots.empty()) break;
        const SampledFunction& u = nearest_snapshot(lim.snapshot_times, lim.snapshots, v.snapshot_times[s], &t_lim);
        if (std::abs(t_lim - v.snapshot_times[s]) > half) continue;
        const SampledFunction& ue = v.snapshots[s];
        for (std::size_t j = 0; j < ue.size(); ++j) {
            const double x = ue.grid.node(j);
            if (!u.grid.contains(x)) continue;
            out.e_u = std::max(out.e_u, std::abs(ue.values[j] - interp_linear(u, x)));
        }
    }
    return out;
}

/// Share of int psi n^eps within |x - center| <= radius.
inline double mass_fraction(const SampledFunction& u, double epsilon, const ModelSpec& m, double center, double radius) {
    const SampledFunction n = hopf_cole_density(u, epsilon);
    std::vector<double> all(n.size()), near(n.size());
    for (std::size_t j = 0; j < n.size(); ++j) {
        const double x = u.grid.node(j);
        all[j] = eval_psi(m, x) * n.values[j];
        near[j] = std::abs(x - center) <= radius ? all[j] : 0.0;
    }
    const double total = trapezoid(all, u.dx());
    return total > 0.0 ? trapezoid(near, u.dx()) / total : 0.0;
}

/// Sample points (t, x) of the variational check: offsets from xbar(t).
inline std::vector<std::pair<double, double>> variational_points(const LimitSolution& s) {
    const std::vector<std::pair<double, std::vector<double>>> plan{
        {0.5, {-1.0, 0.0, 0.75}}, {1.0, {-1.0, 0.0, 0.75}}, {2.0, {-1.0, -0.25, 0.0, 0.75}}};
    std::vector<std::pair<double, double>> out;
    const double T = s.times.back();
    for (const auto& [t, offsets] : plan) {
        if (t > T + kHorizonSlack) continue;
        const double xbar = interp_table(s.times, s.x_argmax, t);
        for (double o : offsets) out.emplace_back(t, xbar + o);
    }
    return out;
}

inline std::vector<double> default_scan(const Grid1D& g, std::size_t n = 1000) {
    const double margin = 0.1;
    const double lo = g.x_min() + margin, hi = g.x_max() - margin;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

// ---------------------------------------------------------------------------
// The suite

namespace detail {

inline DiagnosticEntry make_entry(std::string_view name, double measured, double tolerance, bool ok,
                                  std::string provenance) {
    DiagnosticEntry e;
    e.name = std::string(name);
    e.measured = measured;
    e.tolerance = tolerance;
    e.verdict = ok ? CheckStatus::pass : CheckStatus::fail;
    e.provenance = std::move(provenance);
    return e;
}

inline DiagnosticEntry not_applicable(std::string_view name, std::string note) {
    DiagnosticEntry e;
    e.name = std::string(name);
    e.note = std::move(note);
    return e;
}

inline std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
    return out;
}

}  // namespace detail

/// Runs the named checks. The first limit run is the primary solution; a
/// second run on the other route enables the cross-route entries.
/// `concentration_run`, when given, replaces the smallest-epsilon ladder member
/// in the concentration check.
inline DiagnosticsReport diag_suite(const std::vector<ViscousSolution>& viscous_runs,
                                    const std::vector<LimitSolution>& limit_runs, const ModelSpec& model,
                                    const ToleranceProfile& tol = {},
                                    const ViscousSolution* concentration_run = nullptr) {
    if (limit_runs.empty()) fail(ErrorCode::PreconditionFailed, "diag_suite needs at least one limit run");
    const double horizon = limit_runs.front().config.time.t_final();
    for (const auto& s : limit_runs) {
        if (!(s.config.model == model)) fail(ErrorCode::InputMismatch, describe(s) + " uses a different model");
        if (std::abs(s.config.time.t_final() - horizon) > kHorizonSlack)
            fail(ErrorCode::InputMismatch, describe(s) + " uses a different horizon");
        if (!s.valid) fail(ErrorCode::InputMismatch, describe(s) + " is flagged invalid");
    }
    std::vector<const ViscousSolution*> all_viscous;
    for (const auto& v : viscous_runs) all_viscous.push_back(&v);
    if (concentration_run) all_viscous.push_back(concentration_run);
    for (const auto* vp : all_viscous) {
        const ViscousSolution& v = *vp;
        if (!(v.config.model == model)) fail(ErrorCode::InputMismatch, describe(v) + " uses a different model");
        if (std::abs(v.config.time.t_final() - horizon) > kHorizonSlack)
            fail(ErrorCode::InputMismatch, describe(v) + " uses a different horizon");
        if (!v.valid) fail(ErrorCode::InputMismatch, describe(v) + " is flagged invalid");
    }

    const LimitSolution& primary = limit_runs.front();
    const double dx = primary.dx();
    std::vector<std::string> all_limit;
    for (const auto& s : limit_runs) all_limit.push_back(describe(s));
    DiagnosticsReport rep;

    {  // constraint_max over every limit run
        double worst = 0.0;
        double tol_c = 0.0;
        for (const auto& s : limit_runs) {
            for (double v : s.max_u) worst = std::max(worst, std::abs(v));
            tol_c = std::max(tol_c, s.config.params.constraint_tol);
        }
        rep.entries.push_back(detail::make_entry("constraint_max", worst, tol_c, worst <= tol_c, detail::join(all_limit)));
    }
    {
        double worst = 0.0, at = 0.0;
        for (std::size_t k = 0; k < primary.times.size(); ++k) {
            if (primary.times[k] < tol.burn_in) continue;
            const double r = std::abs(eval_R(model, primary.x_argmax[k], primary.I[k]));
            if (r > worst) {
                worst = r;
                at = primary.times[k];
            }
        }
        auto e = detail::make_entry("zero_reaction", worst, tol.zero_reaction_cells * dx,
                                    worst <= tol.zero_reaction_cells * dx, describe(primary));
        e.extras["worst_time"] = at;
        rep.entries.push_back(std::move(e));
    }
    {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& s : limit_runs)
            for (double I : s.I) {
                lo = std::min(lo, I);
                hi = std::max(hi, I);
            }
        const double cap = model.I_max() + tol.multiplier_upper_slack;
        auto e = detail::make_entry("multiplier_bounds", hi, cap, lo >= 0.0 && hi <= cap, detail::join(all_limit));
        e.extras["min_I"] = lo;
        rep.entries.push_back(std::move(e));
    }
    {
        double worst = 0.0;
        for (const auto& s : limit_runs) worst = std::max(worst, s.I.front());
        rep.entries.push_back(detail::make_entry("multiplier_start", worst, tol.multiplier_start,
                                                 worst <= tol.multiplier_start, detail::join(all_limit)));
    }
    {
        double worst = 0.0;
        for (const auto& s : limit_runs)
            for (std::size_t k = 1; k < s.I.size(); ++k) worst = std::max(worst, s.I[k - 1] - s.I[k]);
        rep.entries.push_back(detail::make_entry("multiplier_monotone", worst, tol.multiplier_monotone,
                                                 worst <= tol.multiplier_monotone, detail::join(all_limit)));
    }
    {
        double worst = 0.0, at = 0.0;
        for (std::size_t k = 0; k < primary.times.size(); ++k) {
            if (primary.times[k] < tol.burn_in) continue;
            const double xz = primary.x_zero[k];
            const double d = std::isnan(xz) ? std::numeric_limits<double>::infinity() : std::abs(primary.x_argmax[k] - xz);
            if (d > worst) {
                worst = d;
                at = primary.times[k];
            }
        }
        auto e = detail::make_entry("maxpoint_consistency", worst, tol.maxpoint_cells * dx,
                                    worst <= tol.maxpoint_cells * dx, describe(primary));
        e.extras["worst_time"] = at;
        e.extras["flagged_steps"] = static_cast<double>(primary.flagged.size());
        rep.entries.push_back(std::move(e));
    }
    {  // margin = min second difference + bound(t); must stay >= -slack
        const double c0 = initial_curvature_bound(model);
        const double c1 = reaction_curvature_bound(model);
        double worst = std::numeric_limits<double>::infinity();
        std::vector<std::string> prov = all_limit;
        for (const auto& s : limit_runs)
            for (std::size_t k = 0; k < s.times.size(); ++k)
                worst = std::min(worst, s.semiconvexity_min[k] + c0 + s.times[k] * c1);
        for (const auto* v : all_viscous) {
            prov.push_back(describe(*v));
            for (std::size_t k = 0; k < v->times.size(); ++k)
                worst = std::min(worst, v->semiconvexity_min[k] + c0 + v->times[k] * c1);
        }
        auto e = detail::make_entry("semiconvexity", worst, -tol.semiconvexity_slack, worst >= -tol.semiconvexity_slack,
                                    detail::join(prov));
        e.extras["u0_curvature_bound"] = c0;
        e.extras["reaction_curvature_bound"] = c1;
        e.note = "measured = min_t [min D2 u(t) + C(t)]";
        rep.entries.push_back(std::move(e));
    }
    {
        double worst_slope = 0.0, worst_trans = 0.0;
        std::size_t paths = 0;
        for (double t : tol.path_times) {
            if (t > horizon + kHorizonSlack) continue;
            const SampledFunction& u = nearest_snapshot(primary.snapshot_times, primary.snapshots, t);
            const auto am = argmax_refined(u);
            worst_slope = std::max(worst_slope, std::abs(centered_slope(u.values, u.dx(), am.index)));
            const auto mp = max_point_trajectory(primary, model, t);
            worst_trans = std::max(worst_trans, mp.transversality_residual);
            ++paths;
        }
        const bool ok = worst_slope <= tol.derivative_cells * dx && worst_trans <= tol.transversality;
        auto e = detail::make_entry("derivative_at_max", worst_slope, tol.derivative_cells * dx, ok, describe(primary));
        e.extras["transversality_residual"] = worst_trans;
        e.extras["transversality_tolerance"] = tol.transversality;
        e.extras["paths"] = static_cast<double>(paths);
        rep.entries.push_back(std::move(e));
    }

    const LimitSolution* other = nullptr;
    for (std::size_t i = 1; i < limit_runs.size() && !other; ++i)
        if (limit_runs[i].config.params.route != primary.config.params.route && limit_runs[i].config.grid == primary.config.grid &&
            limit_runs[i].config.time == primary.config.time)
            other = &limit_runs[i];
    if (other) {
        const RouteComparison c = compare_routes(primary, *other, tol.q_window);
        const std::string prov = describe(primary) + "; " + describe(*other);
        const bool ok = c.I_gap <= tol.cross_route_I_cells * dx && c.u_gap <= tol.cross_route_u_cells * dx;
        auto e = detail::make_entry("cross_route_uniqueness", c.I_gap, tol.cross_route_I_cells * dx, ok, prov);
        e.extras["I_gap_time"] = c.I_gap_time;
        e.extras["u_gap"] = c.u_gap;
        e.extras["u_gap_tolerance"] = tol.cross_route_u_cells * dx;
        rep.entries.push_back(std::move(e));
        auto q = detail::make_entry("q_integral_identity", c.q_worst_window, tol.q_identity_cells * dx,
                                    c.q_worst_window <= tol.q_identity_cells * dx, prov);
        q.extras["full_horizon"] = c.q_full;
        q.extras["worst_window_start"] = c.q_worst_window_start;
        q.extras["window_length"] = tol.q_window;
        q.note = "measured = |int (Q(I_a) - Q(I_b)) ds| / window length";
        rep.entries.push_back(std::move(q));
    } else {
        rep.entries.push_back(detail::not_applicable("cross_route_uniqueness", "needs a second limit route"));
        rep.entries.push_back(detail::not_applicable("q_integral_identity", "needs a second limit route"));
    }

    {
        const MultiplierPath I_path = multiplier_path(primary);
        const auto scan = default_scan(primary.config.grid);
        const auto window = std::make_pair(primary.config.grid.x_min(), primary.config.grid.x_max());
        double worst = 0.0;
        std::size_t count = 0;
        for (const auto& [t, x] : variational_points(primary)) {
            const auto opt = optimize_endpoint(x, t, I_path, model, scan, {}, window);
            const double grid_u = interp_linear(nearest_snapshot(primary.snapshot_times, primary.snapshots, t), x);
            worst = std::max(worst, std::abs(opt.trajectory.action - grid_u));
            ++count;
        }
        auto e = detail::make_entry("variational_agreement", worst, tol.variational_cells * dx,
                                    worst <= tol.variational_cells * dx, describe(primary));
        e.extras["points"] = static_cast<double>(count);
        rep.entries.push_back(std::move(e));
    }
    {
        double worst = std::numeric_limits<double>::infinity();
        for (double t : tol.path_times) {
            if (t > horizon + kHorizonSlack) continue;
            const auto mp = max_point_trajectory(primary, model, t);
            worst = std::min(worst, check_path_above_zero_level(mp.trajectory, primary).margin);
        }
        rep.entries.push_back(detail::make_entry("path_above_zero_level", worst, -tol.zero_level_cells * dx,
                                                 worst >= -tol.zero_level_cells * dx, describe(primary)));
    }

    if (all_viscous.empty()) {
        for (auto name : {"eps_convergence", "dirac_concentration", "rho_consistency"})
            rep.entries.push_back(detail::not_applicable(name, "no viscous runs supplied"));
        return rep;
    }

    std::vector<const ViscousSolution*> ladder;
    for (const auto& v : viscous_runs) ladder.push_back(&v);
    std::sort(ladder.begin(), ladder.end(),
              [](const ViscousSolution* a, const ViscousSolution* b) { return a->config.epsilon > b->config.epsilon; });
    std::vector<ViscousErrors> errs;
    std::vector<std::string> prov;
    for (const auto* v : ladder) {
        errs.push_back(viscous_errors(*v, primary));
        prov.push_back(describe(*v));
    }

    if (ladder.size() >= 2) {
        double worst_ratio = 0.0;
        bool strictly = true;
        for (std::size_t i = 1; i < ladder.size(); ++i) {
            strictly = strictly && errs[i].e_I < errs[i - 1].e_I;
            const double r = errs[i - 1].e_I > 0.0 ? errs[i].e_I / errs[i - 1].e_I : std::numeric_limits<double>::infinity();
            worst_ratio = std::max(worst_ratio, r);
        }
        auto e = detail::make_entry("eps_convergence", worst_ratio, tol.eps_ratio, strictly && worst_ratio <= tol.eps_ratio,
                                    detail::join(prov));
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            char key[48];
            std::snprintf(key, sizeof key, "e_I@eps=%g", ladder[i]->config.epsilon);
            e.extras[key] = errs[i].e_I;
        }
        rep.entries.push_back(std::move(e));
    } else {
        rep.entries.push_back(detail::not_applicable("eps_convergence", "needs at least two epsilon values"));
    }

    {
        const ViscousSolution& finest = concentration_run ? *concentration_run : *ladder.back();
        const double t0 = tol.concentration_window.first;
        const double t1 = std::min(tol.concentration_window.second, horizon);
        double worst = 1.0, at = 0.0;
        for (std::size_t s = 0; s < finest.snapshots.size(); ++s) {
            const double t = finest.snapshot_times[s];
            if (t < t0 - kHorizonSlack || t > t1 + kHorizonSlack) continue;
            const double xbar = interp_table(primary.times, primary.x_argmax, t);
            const double f = mass_fraction(finest.snapshots[s], finest.config.epsilon, model, xbar, tol.concentration_radius);
            if (f < worst) {
                worst = f;
                at = t;
            }
        }
        auto e = detail::make_entry("dirac_concentration", worst, tol.concentration_fraction,
                                    worst >= tol.concentration_fraction, describe(finest) + "; " + describe(primary));
        e.extras["worst_time"] = at;
        e.extras["radius"] = tol.concentration_radius;
        e.extras["epsilon"] = finest.config.epsilon;
        rep.entries.push_back(std::move(e));
    }
    if (ladder.empty()) {
        rep.entries.push_back(detail::not_applicable("rho_consistency", "no epsilon ladder supplied"));
        return rep;
    }
    {  // ratio sup_t |I^eps/psi(xbar^eps) - I| / e(eps), worst over the ladder
        double worst = 0.0;
        const auto [p_lo, p_hi] = psi_plateau;
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            const ViscousSolution& v = *ladder[i];
            double sup = 0.0;
            for (std::size_t k = 0; k < v.times.size(); ++k) {
                const double xe = v.x_max[k];
                if (xe < p_lo || xe > p_hi) continue;
                const double rho = v.I[k] / eval_psi(model, xe);
                sup = std::max(sup, std::abs(rho - interp_table(primary.times, primary.I, v.times[k])));
            }
            const double r = errs[i].e_I > 0.0 ? sup / errs[i].e_I : (sup > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
            worst = std::max(worst, r);
        }
        rep.entries.push_back(
            detail::make_entry("rho_consistency", worst, tol.rho_factor, worst <= tol.rho_factor, detail::join(prov)));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Epsilon sweep

struct SweepRow {
    double epsilon = 0.0;
    double e_I = 0.0;
    double e_u = 0.0;
    double ratio = std::numeric_limits<double>::quiet_NaN();  ///< e_I / e_I of the previous epsilon
};

struct SweepResult {
    LimitSolution limit;
    std::vector<ViscousSolution> runs;
    std::vector<SweepRow> rows;
};

/// Runs one viscous solve per epsilon concurrently and tabulates the distance
/// to the limit solution obtained with `limit_cfg`.
inline SweepResult sweep_eps(const ViscousConfig& base, const std::vector<double>& eps_list, const LimitConfig& limit_cfg) {
    if (eps_list.size() < 2) fail(ErrorCode::PreconditionFailed, "sweep_eps needs at least two epsilon values");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]))
            fail(ErrorCode::PreconditionFailed, "sweep_eps needs a strictly decreasing epsilon list");

    auto limit_job = std::async(std::launch::async, [&] { return run_limit(limit_cfg); });
    std::vector<std::future<ViscousSolution>> jobs;
    for (double eps : eps_list) {
        ViscousConfig cfg = base;
        cfg.epsilon = eps;
        jobs.push_back(std::async(std::launch::async, [cfg] { return run_viscous(cfg); }));
    }
    SweepResult out;
    out.limit = limit_job.get();
    for (auto& j : jobs) out.runs.push_back(j.get());
    if (!out.limit.valid) fail(out.limit.failure->code, "limit run failed: " + out.limit.failure->message);
    for (const auto& v : out.runs)
        if (!v.valid) fail(v.failure->code, describe(v) + " failed: " + v.failure->message);

    for (std::size_t i = 0; i < out.runs.size(); ++i) {
        const ViscousErrors e = viscous_errors(out.runs[i], out.limit);
        SweepRow row{eps_list[i], e.e_I, e.e_u};
        if (i > 0 && out.rows[i - 1].e_I > 0.0) row.ratio = e.e_I / out.rows[i - 1].e_I;
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace hjc
