#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hjc/error.hpp"
#include "hjc/limit.hpp"
#include "hjc/model.hpp"
#include "hjc/numerics.hpp"

namespace hjc {

/// I(s) as a piecewise-linear function of time.
class MultiplierPath {
public:
    MultiplierPath() = default;
    MultiplierPath(std::vector<double> times, std::vector<double> values)
        : times_(std::move(times)), values_(std::move(values)) {
        if (times_.empty() || times_.size() != values_.size())
            fail(ErrorCode::InvalidArgument, "multiplier path needs matching, non-empty times and values");
        for (std::size_t k = 1; k < times_.size(); ++k)
            if (!(times_[k] > times_[k - 1])) fail(ErrorCode::InvalidArgument, "multiplier times must increase");
        for (double v : values_)
            if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorCode::NegativeI, "multiplier path has a negative value");
    }

    static MultiplierPath constant(double I, double horizon) { return {{0.0, horizon}, {I, I}}; }

    [[nodiscard]] double operator()(double s) const { return interp_table(times_, values_, s); }
    [[nodiscard]] double start() const { return times_.front(); }
    [[nodiscard]] double horizon() const { return times_.back(); }
    [[nodiscard]] std::span<const double> times() const { return times_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }

private:
    std::vector<double> times_;
    std::vector<double> values_;
};

inline MultiplierPath multiplier_path(const LimitSolution& sol) { return {sol.times, sol.I}; }

struct Trajectory {
    std::vector<double> times;
    std::vector<double> positions;
    std::vector<double> velocities;
    double action = std::numeric_limits<double>::quiet_NaN();

    [[nodiscard]] double horizon() const { return times.back(); }
    [[nodiscard]] double endpoint() const { return positions.back(); }
    [[nodiscard]] double initial_point() const { return positions.front(); }
    [[nodiscard]] std::size_t size() const { return times.size(); }
};

/// Slack allowed between the trajectory horizon and the multiplier record.
inline constexpr double kHorizonSlack = 1e-9;

/// F(gamma) = u0(gamma(0)) + int_0^t ( -gamma'^2/4 + R(gamma, I) ) ds, trapezoid in s.
inline double action(const Trajectory& traj, const MultiplierPath& I_path, const ModelSpec& model) {
    if (traj.times.empty() || traj.positions.size() != traj.times.size() || traj.velocities.size() != traj.times.size())
        fail(ErrorCode::InvalidArgument, "action: malformed trajectory");
    if (std::abs(traj.times.front()) > kHorizonSlack || I_path.start() > kHorizonSlack ||
        I_path.horizon() < traj.horizon() - kHorizonSlack)
        fail(ErrorCode::HorizonMismatch, "trajectory horizon " + std::to_string(traj.horizon()) +
                                             " is not covered by the multiplier record ending at " +
                                             std::to_string(I_path.horizon()));
    std::vector<double> lagrangian(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double v = traj.velocities[k];
        lagrangian[k] = -0.25 * v * v + eval_R(model, traj.positions[k], I_path(traj.times[k]));
    }
    return eval_u0(model, traj.positions.front()) + trapezoid(traj.times, lagrangian);
}

// ---------------------------------------------------------------------------
// Euler-Lagrange integration: gamma'' = -2 R_x(gamma, I(s))

namespace detail {

struct PhasePoint {
    double x;
    double v;
};

/// Classical RK4 from (s0, state) with n steps of signed size h; every state
/// is kept. Leaving [lo, hi] throws LeftDomain.
inline std::vector<PhasePoint> integrate_el(PhasePoint state, double s0, double h, std::size_t n,
                                            const MultiplierPath& I_path, const ModelSpec& model,
                                            std::pair<double, double> window) {
    auto accel = [&](double s, double x) { return -2.0 * eval_R_x(model, x, I_path(s)); };
    auto inside = [&](double x) { return std::isfinite(x) && x >= window.first && x <= window.second; };

    std::vector<PhasePoint> out;
    out.reserve(n + 1);
    out.push_back(state);
    double s = s0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto [x, v] = state;
        const double k1x = v, k1v = accel(s, x);
        const double k2x = v + 0.5 * h * k1v, k2v = accel(s + 0.5 * h, x + 0.5 * h * k1x);
        const double k3x = v + 0.5 * h * k2v, k3v = accel(s + 0.5 * h, x + 0.5 * h * k2x);
        const double k4x = v + h * k3v, k4v = accel(s + h, x + h * k3x);
        state.x = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        state.v = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        s = s0 + static_cast<double>(k + 1) * h;
        if (!inside(state.x))
            fail(ErrorCode::LeftDomain, "path reached x = " + std::to_string(state.x) + " at s = " + std::to_string(s));
        out.push_back(state);
    }
    return out;
}

}  // namespace detail

/// Forward shot from gamma(0) = y with the transversality velocity -2 u0'(y).
inline Trajectory shoot_from_initial(double y, const MultiplierPath& I_path, const ModelSpec& model, double t,
                                     std::size_t n_steps, std::optional<std::pair<double, double>> window = {}) {
    if (n_steps < 10) fail(ErrorCode::InvalidArgument, "shoot_from_initial: n_steps must be at least 10");
    if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "shoot_from_initial: horizon must be positive");
    const auto box = window.value_or(model.domain_hint());
    if (!(y >= box.first && y <= box.second))
        fail(ErrorCode::LeftDomain, "initial point " + std::to_string(y) + " outside the window");
    if (I_path.horizon() < t - kHorizonSlack) fail(ErrorCode::HorizonMismatch, "multiplier record shorter than t");

    const double h = t / static_cast<double>(n_steps);
    const auto states = detail::integrate_el({y, -2.0 * eval_u0_prime(model, y)}, 0.0, h, n_steps, I_path, model, box);
    Trajectory traj;
    traj.times.resize(states.size());
    traj.positions.resize(states.size());
    traj.velocities.resize(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) {
        traj.times[k] = k == n_steps ? t : static_cast<double>(k) * h;
        traj.positions[k] = states[k].x;
        traj.velocities[k] = states[k].v;
    }
    traj.action = action(traj, I_path, model);
    return traj;
}

struct Branch {
    double initial_point;
    double action;
};

struct EndpointOptimum {
    Trajectory trajectory;
    std::vector<Branch> branches;  ///< every hit found, in scan order
    bool tie = false;              ///< best action shared within kTieTol; smaller gamma(0) kept
};

struct ShootingOptions {
    std::size_t n_steps = 400;
    double hit_tol = 1e-12;  ///< bisection width on gamma(0)
};

inline constexpr double kTieTol = 1e-10;

/// sup over EL shots ending at x: scan gamma(0), bracket sign changes of the
/// terminal miss, bisect each bracket, keep the branch of largest action.
inline EndpointOptimum optimize_endpoint(double x, double t, const MultiplierPath& I_path, const ModelSpec& model,
                                         std::span<const double> scan, ShootingOptions opts = {},
                                         std::optional<std::pair<double, double>> window = {}) {
    if (scan.size() < 2) fail(ErrorCode::InvalidArgument, "optimize_endpoint: scan needs at least two points");

    auto miss = [&](double y) -> std::optional<double> {
        try {
            return shoot_from_initial(y, I_path, model, t, opts.n_steps, window).endpoint() - x;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::LeftDomain) return std::nullopt;
            throw;
        }
    };

    std::vector<std::optional<double>> m(scan.size());
    for (std::size_t i = 0; i < scan.size(); ++i) m[i] = miss(scan[i]);

    std::vector<double> roots;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        if (m[i] && *m[i] == 0.0) {
            roots.push_back(scan[i]);
            continue;
        }
        if (i + 1 == scan.size() || !m[i] || !m[i + 1] || *m[i + 1] == 0.0) continue;
        if ((*m[i] < 0.0) == (*m[i + 1] < 0.0)) continue;
        double lo = scan[i], hi = scan[i + 1];
        const bool rising = *m[i] < 0.0;
        while (hi - lo > opts.hit_tol) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const auto mm = miss(mid);
            if (!mm) break;
            if ((*mm < 0.0) == rising) lo = mid;
            else hi = mid;
        }
        roots.push_back(0.5 * (lo + hi));
    }
    if (roots.empty()) fail(ErrorCode::NoHit, "no EL shot reaches x = " + std::to_string(x));

    EndpointOptimum out;
    std::optional<Trajectory> best;
    for (double y : roots) {
        Trajectory traj = shoot_from_initial(y, I_path, model, t, opts.n_steps, window);
        out.branches.push_back({y, traj.action});
        if (!best || traj.action > best->action + kTieTol) {
            best = std::move(traj);
            out.tie = false;
        } else if (std::abs(traj.action - best->action) <= kTieTol) {
            out.tie = true;  // roots are ordered, so the earlier (smaller) start is kept
        }
    }
    out.trajectory = std::move(*best);
    return out;
}

// ---------------------------------------------------------------------------
// Maximum-point paths

struct MaxPointPath {
    Trajectory trajectory;
    double transversality_residual = 0.0;  ///< |gamma'(0) + 2 u0'(gamma(0))|
};

/// Backward EL integration from gamma(t) = xbar(t), gamma'(t) = 0.
inline MaxPointPath max_point_trajectory(const LimitSolution& sol, const ModelSpec& model, double t,
                                         std::size_t n_steps = 1000) {
    if (sol.times.empty()) fail(ErrorCode::InvalidArgument, "max_point_trajectory: empty solution");
    if (t < 0.0 || t > sol.times.back() + kHorizonSlack)
        fail(ErrorCode::HorizonMismatch, "t = " + std::to_string(t) + " outside the solution horizon");
    const MultiplierPath I_path = multiplier_path(sol);
    const double xbar = interp_table(sol.times, sol.x_argmax, t);
    if (xbar < -sol.dx()) fail(ErrorCode::InvalidArgument, "max point lies left of the origin");

    MaxPointPath out;
    Trajectory& traj = out.trajectory;
    if (t <= 0.0) {
        traj.times = {0.0};
        traj.positions = {xbar};
        traj.velocities = {0.0};
        traj.action = eval_u0(model, xbar);
        out.transversality_residual = 2.0 * std::abs(eval_u0_prime(model, xbar));
        return out;
    }
    if (n_steps < 10) fail(ErrorCode::InvalidArgument, "max_point_trajectory: n_steps must be at least 10");
    const auto box = std::make_pair(sol.config.grid.x_min(), sol.config.grid.x_max());
    const double h = t / static_cast<double>(n_steps);
    const auto states = detail::integrate_el({xbar, 0.0}, t, -h, n_steps, I_path, model, box);

    const std::size_t n = states.size();
    traj.times.resize(n);
    traj.positions.resize(n);
    traj.velocities.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t back = n - 1 - k;  // states run from s = t down to s = 0
        traj.times[k] = k == 0 ? 0.0 : (k + 1 == n ? t : static_cast<double>(k) * h);
        traj.positions[k] = states[back].x;
        traj.velocities[k] = states[back].v;
    }
    traj.action = action(traj, I_path, model);
    out.transversality_residual = std::abs(traj.velocities.front() + 2.0 * eval_u0_prime(model, traj.positions.front()));
    return out;
}

/// gamma+ = max(gamma, 0), with zero velocity where clipped.
inline Trajectory truncate_plus(const Trajectory& traj, const MultiplierPath& I_path, const ModelSpec& model) {
    Trajectory out = traj;
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (out.positions[k] <= 0.0) {
            out.positions[k] = 0.0;
            out.velocities[k] = 0.0;
        }
    }
    out.action = action(out, I_path, model);
    return out;
}

struct ZeroLevelMargin {
    double margin = 0.0;        ///< min over the window of gamma(s) - x(s)
    double at_time = 0.0;
    double tolerance = 0.0;     ///< dx
    bool pass = false;
    bool boundary = false;      ///< margin in [-dx, 0]: equality case, not a strict separation
};

/// min over s in [0.05 t, 0.95 t] of gamma(s) - b^{-1}(Q(I(s))).
inline ZeroLevelMargin check_path_above_zero_level(const Trajectory& traj, const MultiplierPath& I_path,
                                                   const ModelSpec& model, double dx) {
    const double t = traj.horizon();
    ZeroLevelMargin out;
    out.tolerance = dx;
    out.margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double s = traj.times[k];
        if (s < 0.05 * t || s > 0.95 * t) continue;
        const double xz = zero_level_or_nan(model, I_path(s));
        const double gap = std::isnan(xz) ? -std::numeric_limits<double>::infinity() : traj.positions[k] - xz;
        if (gap < out.margin) {
            out.margin = gap;
            out.at_time = s;
        }
    }
    out.pass = out.margin >= -dx;
    out.boundary = out.pass && out.margin <= 0.0;
    return out;
}

inline ZeroLevelMargin check_path_above_zero_level(const Trajectory& traj, const LimitSolution& sol) {
    return check_path_above_zero_level(traj, multiplier_path(sol), sol.config.model, sol.dx());
}

}  // namespace hjc
