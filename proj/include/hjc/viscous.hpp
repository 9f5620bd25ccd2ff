#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hjc/error.hpp"
#include "hjc/hamiltonian.hpp"
#include "hjc/model.hpp"
#include "hjc/numerics.hpp"

namespace hjc {

/// Switches for isolating the three parts of the viscous update in tests.
struct ViscousTerms {
    bool hamiltonian = true;
    bool reaction = true;
    bool diffusion = true;
};

struct ViscousConfig {
    ModelSpec model;
    Grid1D grid;
    TimeGrid time;
    double epsilon = 0.1;
    double cfl = 0.9;
    int picard_iters = 2;
    std::size_t snapshot_stride = 1;
    ViscousTerms terms{};
};

struct ViscousSolution {
    ViscousConfig config;
    std::vector<double> times;  ///< every step, t_0 .. t_N
    std::vector<double> I;      ///< I^eps(t_k) = int psi exp(u^k / eps)
    std::vector<double> x_max;  ///< refined argmax of u^k
    std::vector<double> u_max;
    std::vector<double> semiconvexity_min;  ///< min second difference of u^k
    std::vector<double> snapshot_times;
    std::vector<SampledFunction> snapshots;
    bool valid = true;
    std::optional<RunFailure> failure;
};

/// Largest u/eps accepted before exp() is considered to overflow.
inline constexpr double kMaxExponent = 700.0;

inline SampledFunction hopf_cole_density(const SampledFunction& u, double epsilon) {
    if (!(epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "hopf_cole_density: epsilon must be positive");
    std::vector<double> n(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double e = u.values[j] / epsilon;
        if (e > kMaxExponent)
            fail(ErrorCode::OverflowDetected, "u/eps = " + std::to_string(e) + " at node " + std::to_string(j));
        n[j] = std::exp(e);
    }
    return {u.grid, std::move(n)};
}

inline double compute_I_eps(const SampledFunction& u, double epsilon, const ModelSpec& model) {
    const SampledFunction n = hopf_cole_density(u, epsilon);
    std::vector<double> weighted(n.size());
    for (std::size_t j = 0; j < n.size(); ++j) weighted[j] = eval_psi(model, u.grid.node(j)) * n.values[j];
    return trapezoid(weighted, u.dx());
}

struct ViscousStep {
    SampledFunction next;
    double I_at_start = 0.0;  ///< I^eps(t_k)
    double I_used = 0.0;      ///< multiplier after the self-consistency sweeps
};

namespace detail {

/// Backward Euler for u_t = eps u_xx with reflecting (homogeneous Neumann) ends.
inline std::vector<double> implicit_diffusion(std::span<const double> v, double r) {
    const std::size_t n = v.size();
    std::vector<double> lower(n, -r), diag(n, 1.0 + 2.0 * r), upper(n, -r);
    upper[0] = -2.0 * r;
    lower[n - 1] = -2.0 * r;
    lower[0] = 0.0;
    upper[n - 1] = 0.0;
    return solve_tridiagonal(lower, diag, upper, v);
}

}  // namespace detail

/// One splitting step of u_t = eps u_xx + u_x^2 + R(x, I^eps(t)).
inline ViscousStep step_viscous(const SampledFunction& u, const ViscousConfig& cfg) {
    const double dt = cfg.time.dt();
    const double dx = u.dx();
    const auto& terms = cfg.terms;
    if (cfg.epsilon < 0.0 || (terms.reaction && !(cfg.epsilon > 0.0)))
        fail(ErrorCode::InvalidArgument, "step_viscous: epsilon must be positive when the reaction is on");

    std::vector<double> kinetic(u.size(), 0.0);
    if (terms.hamiltonian) {
        auto k = numerical_hamiltonian(u.values, dx, Flux::godunov);
        require_monotone(k, u.values, dx, dt, Flux::godunov, ErrorCode::CflViolation, cfg.cfl);
        kinetic = std::move(k.h);
    }
    const std::vector<double> profile = terms.reaction ? reaction_profile(cfg.model, u.grid) : std::vector<double>{};

    auto substep = [&](double I) {
        std::vector<double> v(u.values);
        const double q = terms.reaction ? eval_Q(cfg.model, I) : 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            v[j] += dt * kinetic[j];
            if (terms.reaction) v[j] += dt * (profile[j] - q);
        }
        if (terms.diffusion && cfg.epsilon > 0.0) v = detail::implicit_diffusion(v, cfg.epsilon * dt / (dx * dx));
        return SampledFunction(u.grid, std::move(v));
    };

    ViscousStep out{u, 0.0, 0.0};
    if (terms.reaction) out.I_at_start = compute_I_eps(u, cfg.epsilon, cfg.model);
    out.I_used = out.I_at_start;
    out.next = substep(out.I_used);
    if (terms.reaction) {
        for (int sweep = 0; sweep < cfg.picard_iters; ++sweep) {
            out.I_used = 0.5 * (out.I_at_start + compute_I_eps(out.next, cfg.epsilon, cfg.model));
            out.next = substep(out.I_used);
        }
    }
    return out;
}

inline ViscousSolution run_viscous(const ViscousConfig& cfg) {
    if (!(cfg.epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "run_viscous: epsilon must be positive");
    if (!(cfg.cfl > 0.0 && cfg.cfl < 1.0)) fail(ErrorCode::InvalidArgument, "run_viscous: cfl must lie in (0, 1)");
    if (cfg.snapshot_stride == 0) fail(ErrorCode::InvalidArgument, "run_viscous: snapshot_stride must be positive");
    if (const auto report = check_assumptions_default(cfg.model, cfg.grid); !report.all_pass())
        fail(ErrorCode::PreconditionFailed, "model " + std::string(cfg.model.family_id()) + " fails its assumption check");

    ViscousSolution sol;
    sol.config = cfg;
    SampledFunction u = SampledFunction::sample(cfg.grid, [&](double x) { return eval_u0(cfg.model, x); });
    const std::size_t n_steps = cfg.time.n_steps();

    auto record = [&](std::size_t k, double I) {
        const auto am = argmax_refined(u);
        sol.times.push_back(cfg.time.time(k));
        sol.I.push_back(I);
        sol.x_max.push_back(am.x_star);
        sol.u_max.push_back(am.f_star);
        sol.semiconvexity_min.push_back(min_second_difference(u.values, u.dx()));
        if (k % cfg.snapshot_stride == 0 || k == n_steps) {
            sol.snapshot_times.push_back(cfg.time.time(k));
            sol.snapshots.push_back(u);
        }
    };

    for (std::size_t k = 0; k < n_steps; ++k) {
        try {
            ViscousStep step = step_viscous(u, cfg);
            record(k, step.I_at_start);
            u = std::move(step.next);
        } catch (const Error& e) {
            sol.valid = false;
            sol.failure = RunFailure{e.code(), e.what(), k};
            return sol;
        }
    }
    try {
        record(n_steps, compute_I_eps(u, cfg.epsilon, cfg.model));
    } catch (const Error& e) {
        sol.valid = false;
        sol.failure = RunFailure{e.code(), e.what(), n_steps};
    }
    return sol;
}

}  // namespace hjc
