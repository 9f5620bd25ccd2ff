#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hjc/error.hpp"
#include "hjc/hamiltonian.hpp"
#include "hjc/model.hpp"
#include "hjc/numerics.hpp"

namespace hjc {

enum class Route { fd_monotone, lax_oleinik };

inline std::string_view to_string(Route r) { return r == Route::fd_monotone ? "fd_monotone" : "lax_oleinik"; }

inline Route parse_route(std::string_view s) {
    if (s == "fd_monotone" || s == "fd") return Route::fd_monotone;
    if (s == "lax_oleinik" || s == "lax") return Route::lax_oleinik;
    fail(ErrorCode::ConfigInvalid, "unknown limit.route '" + std::string(s) + "'");
}

struct RouteParams {
    Route route = Route::fd_monotone;
    double constraint_tol = 1e-10;
    Flux flux = Flux::godunov;
    std::optional<double> lf_dissipation;  ///< nullopt: 2 max|u_x| + 0.5
};

struct LimitConfig {
    ModelSpec model;
    Grid1D grid;
    TimeGrid time;
    RouteParams params{};
    std::size_t snapshot_stride = 1;
};

/// Tolerance, in cells, for the argmax / zero-level agreement flag.
inline constexpr double kMaxPointFlagCells = 10.0;

struct LimitSolution {
    LimitConfig config;
    std::vector<double> times;             ///< t_0 .. t_N
    std::vector<double> I;                 ///< multiplier held over [t_k, t_k+1]; I_N probes one more step
    std::vector<double> x_argmax;          ///< refined argmax of u^k
    std::vector<double> x_zero;            ///< b^{-1}(Q(I_k)); NaN when saturated
    std::vector<double> max_u;
    std::vector<double> semiconvexity_min; ///< min second difference of u^k
    std::vector<std::size_t> flagged;      ///< steps where argmax and zero level disagree by > 10 dx
    std::vector<double> snapshot_times;
    std::vector<SampledFunction> snapshots;
    bool valid = true;
    std::optional<RunFailure> failure;

    [[nodiscard]] double dx() const { return config.grid.dx(); }

    /// Snapshot recorded at time t (within half a step); nullptr when absent.
    [[nodiscard]] const SampledFunction* snapshot_at(double t) const {
        const double half = 0.5 * config.time.dt();
        for (std::size_t s = 0; s < snapshot_times.size(); ++s)
            if (std::abs(snapshot_times[s] - t) <= half) return &snapshots[s];
        return nullptr;
    }
};

// ---------------------------------------------------------------------------
// Single-step operators

/// I-independent part of the explicit monotone step: u + dt * H_num(u).
inline std::vector<double> fd_kinetic_step(const SampledFunction& u, double dt, Flux flux,
                                           std::optional<double> lf_dissipation) {
    const double dx = u.dx();
    auto k = numerical_hamiltonian(u.values, dx, flux, lf_dissipation);
    require_monotone(k, u.values, dx, dt, flux, ErrorCode::MonotonicityViolated);
    std::vector<double> out(u.values);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += dt * k.h[j];
    return out;
}

inline SampledFunction advance_field_fd(const SampledFunction& u, double I, const ModelSpec& model, double dt,
                                        Flux flux = Flux::godunov, std::optional<double> lf_dissipation = std::nullopt) {
    std::vector<double> v = fd_kinetic_step(u, dt, flux, lf_dissipation);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += dt * eval_R(model, u.grid.node(j), I);
    return {u.grid, std::move(v)};
}

/// Dynamic-programming hop over one step: half the source at the departure
/// point, the exact sup over the piecewise-linear interpolant of
/// [u(y) - (x - y)^2 / (4 dt)], then half the source at the arrival node.
inline SampledFunction advance_field_lax(const SampledFunction& u, double I, const ModelSpec& model, double dt) {
    if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "advance_field_lax: dt must be positive");
    std::vector<double> w(u.values);
    std::vector<double> half_source(u.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        half_source[j] = 0.5 * dt * eval_R(model, u.grid.node(j), I);
        w[j] += half_source[j];
    }
    std::vector<double> v = upper_envelope_p1(w, u.grid, 1.0 / (4.0 * dt));
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += half_source[j];
    return {u.grid, std::move(v)};
}

// ---------------------------------------------------------------------------
// Constraint enforcement

struct ConstrainedStep {
    SampledFunction next;
    double I = 0.0;
    double max_u = 0.0;
    std::size_t evaluations = 0;
};

namespace detail {

inline double max_of(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    return m;
}

/// g(I) = max_j advance(u, I)_j for one route, built on the separable
/// reaction R(x_j, I) = profile_j - Q(I) shared by every registered family.
class ConstraintMap {
public:
    ConstraintMap(const SampledFunction& u, const ModelSpec& model, double dt, const RouteParams& p)
        : u_(u), model_(model), dt_(dt), params_(p), profile_(reaction_profile(model, u.grid)) {
        if (p.route == Route::fd_monotone) base_ = fd_kinetic_step(u, dt, p.flux, p.lf_dissipation);
    }

    [[nodiscard]] std::vector<double> field(double I) const {
        const double q = eval_Q(model_, I);
        std::vector<double> v;
        if (params_.route == Route::fd_monotone) {
            v = base_;
            for (std::size_t j = 0; j < v.size(); ++j) v[j] += dt_ * (profile_[j] - q);
            return v;
        }
        std::vector<double> w(u_.values);
        for (std::size_t j = 0; j < w.size(); ++j) w[j] += 0.5 * dt_ * (profile_[j] - q);
        v = upper_envelope_p1(w, u_.grid, 1.0 / (4.0 * dt_));
        for (std::size_t j = 0; j < v.size(); ++j) v[j] += 0.5 * dt_ * (profile_[j] - q);
        return v;
    }

    double operator()(double I) const { return max_of(field(I)); }

private:
    const SampledFunction& u_;
    const ModelSpec& model_;
    double dt_;
    RouteParams params_;
    std::vector<double> profile_;
    std::vector<double> base_;
};

}  // namespace detail

/// Chooses I_k in [0, I_max] by bisection on the nonincreasing map
/// I -> max_j advance(u^k, I)_j so that the next field has maximum 0.
inline ConstrainedStep enforce_constraint(const SampledFunction& u, const ModelSpec& model, double dt,
                                          const RouteParams& params) {
    if (!(params.constraint_tol > 0.0)) fail(ErrorCode::InvalidArgument, "constraint_tol must be positive");
    const detail::ConstraintMap g(u, model, dt, params);
    const double tol = params.constraint_tol;

    const double g_low = g(0.0);
    if (g_low < -tol)
        fail(ErrorCode::InfeasibleLow, "max advance(u, 0) = " + std::to_string(g_low) + " < 0");
    if (g_low <= 0.0) {
        auto v = g.field(0.0);
        const double m = detail::max_of(v);
        return {SampledFunction(u.grid, std::move(v)), 0.0, m, 1};
    }
    const double g_high = g(model.I_max());
    if (g_high > tol)
        fail(ErrorCode::SaturatedHigh, "max advance(u, I_max) = " + std::to_string(g_high) + " > 0");
    if (g_high >= 0.0) {
        auto v = g.field(model.I_max());
        const double m = detail::max_of(v);
        return {SampledFunction(u.grid, std::move(v)), model.I_max(), m, 2};
    }
    // |dg/dI| <= dt Q' <= 1 for the registered families, so an I-bracket of
    // width tol pins max u to within tol.
    const Bracket br = bisect_monotone(g, 0.0, model.I_max(), tol);
    auto v = g.field(br.lo);
    const double m = detail::max_of(v);
    if (std::abs(m) > tol)
        fail(ErrorCode::MonotonicityViolated, "bisection ended with max u = " + std::to_string(m));
    return {SampledFunction(u.grid, std::move(v)), br.lo, m, br.evaluations + 2};
}

// ---------------------------------------------------------------------------
// Full runs

inline double zero_level_or_nan(const ModelSpec& model, double I) {
    try {
        return zero_level_x(model, I);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Saturated) return std::numeric_limits<double>::quiet_NaN();
        throw;
    }
}

inline LimitSolution run_limit(const LimitConfig& cfg) {
    if (cfg.snapshot_stride == 0) fail(ErrorCode::InvalidArgument, "run_limit: snapshot_stride must be positive");
    if (const auto report = check_assumptions_default(cfg.model, cfg.grid); !report.all_pass())
        fail(ErrorCode::PreconditionFailed, "model " + std::string(cfg.model.family_id()) + " fails its assumption check");
    SampledFunction u = SampledFunction::sample(cfg.grid, [&](double x) { return eval_u0(cfg.model, x); });
    if (const auto am = argmax_refined(u); std::abs(am.f_star) > 1e-8)
        fail(ErrorCode::PreconditionFailed, "max u0 on the grid is " + std::to_string(am.f_star) + ", not 0");

    LimitSolution sol;
    sol.config = cfg;
    const double dt = cfg.time.dt();
    const double dx = cfg.grid.dx();
    const std::size_t n_steps = cfg.time.n_steps();

    for (std::size_t k = 0; k <= n_steps; ++k) {
        ConstrainedStep step;
        try {
            step = enforce_constraint(u, cfg.model, dt, cfg.params);
        } catch (const Error& e) {
            sol.valid = false;
            sol.failure = RunFailure{e.code(), e.what(), k};
            return sol;
        }
        const auto am = argmax_refined(u);
        const double xz = zero_level_or_nan(cfg.model, step.I);
        sol.times.push_back(cfg.time.time(k));
        sol.I.push_back(step.I);
        sol.x_argmax.push_back(am.x_star);
        sol.x_zero.push_back(xz);
        sol.max_u.push_back(detail::max_of(u.values));
        sol.semiconvexity_min.push_back(min_second_difference(u.values, dx));
        if (!(std::abs(am.x_star - xz) <= kMaxPointFlagCells * dx)) sol.flagged.push_back(k);
        if (k % cfg.snapshot_stride == 0 || k == n_steps) {
            sol.snapshot_times.push_back(cfg.time.time(k));
            sol.snapshots.push_back(u);
        }
        if (k < n_steps) u = std::move(step.next);
    }
    return sol;
}

/// |R(xbar(t_k), I_k)| at every recorded time.
inline std::vector<std::pair<double, double>> zero_reaction_residual(const LimitSolution& sol, const ModelSpec& model) {
    std::vector<std::pair<double, double>> out;
    out.reserve(sol.times.size());
    for (std::size_t k = 0; k < sol.times.size(); ++k)
        out.emplace_back(sol.times[k], std::abs(eval_R(model, sol.x_argmax[k], sol.I[k])));
    return out;
}

}  // namespace hjc
