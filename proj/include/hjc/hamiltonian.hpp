#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hjc/error.hpp"
#include "hjc/model.hpp"
#include "hjc/numerics.hpp"

namespace hjc {

/// Numerical Hamiltonians for H(p) = p^2 in u_t = H(u_x) + R.
enum class Flux { godunov, lax_friedrichs };

inline std::string_view to_string(Flux f) { return f == Flux::godunov ? "godunov" : "lax_friedrichs"; }

inline Flux parse_flux(std::string_view s) {
    if (s == "godunov") return Flux::godunov;
    if (s == "lax_friedrichs") return Flux::lax_friedrichs;
    fail(ErrorCode::ConfigInvalid, "unknown flux '" + std::string(s) + "'");
}

/// Godunov flux for p^2 from the backward slope a and forward slope c.
inline double godunov_p2(double a, double c) {
    if (a <= c) return std::max(a * a, c * c);
    if (c <= 0.0 && a >= 0.0) return 0.0;
    return std::min(a * a, c * c);
}

struct KineticIncrement {
    std::vector<double> h;       ///< numerical Hamiltonian per node
    double max_slope = 0.0;      ///< max one-sided |u_x|
    double dissipation = 0.0;    ///< Lax-Friedrichs coefficient actually used (0 for Godunov)
};

/// One-sided differences with copied slopes at the two boundary nodes.
inline KineticIncrement numerical_hamiltonian(std::span<const double> u, double dx, Flux flux,
                                              std::optional<double> lf_dissipation = std::nullopt) {
    const std::size_t n = u.size();
    KineticIncrement out;
    out.h.resize(n);
    std::vector<double> slope(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        slope[j] = (u[j + 1] - u[j]) / dx;
        out.max_slope = std::max(out.max_slope, std::abs(slope[j]));
    }
    if (flux == Flux::lax_friedrichs)
        out.dissipation = lf_dissipation ? *lf_dissipation : 2.0 * out.max_slope + 0.5;
    for (std::size_t j = 0; j < n; ++j) {
        const double back = j == 0 ? slope[0] : slope[j - 1];
        const double fwd = j + 1 == n ? slope[n - 2] : slope[j];
        if (flux == Flux::godunov) {
            out.h[j] = godunov_p2(back, fwd);
        } else {
            const double mean = 0.5 * (back + fwd);
            out.h[j] = mean * mean + 0.5 * out.dissipation * (fwd - back);
        }
    }
    return out;
}

/// Stencil-weight check: throws when the explicit update is not monotone.
inline void require_monotone(const KineticIncrement& k, std::span<const double> u, double dx, double dt, Flux flux,
                             ErrorCode code, double bound = 1.0) {
    if (flux == Flux::godunov) {
        const double ratio = 2.0 * k.max_slope * dt / dx;
        if (ratio > bound)
            fail(code, "2 max|u_x| dt/dx = " + std::to_string(ratio) + " exceeds " + std::to_string(bound));
        return;
    }
    const double ratio = k.dissipation * dt / dx;
    if (ratio > bound)
        fail(code, "lf_dissipation dt/dx = " + std::to_string(ratio) + " exceeds " + std::to_string(bound));
    for (std::size_t j = 1; j + 1 < u.size(); ++j) {
        const double centered = (u[j + 1] - u[j - 1]) / (2.0 * dx);
        if (k.dissipation < 2.0 * std::abs(centered))
            fail(code, "lf_dissipation below 2|u_x| at node " + std::to_string(j));
    }
}

/// b-part of the reaction on the grid: R(x_j, I) = profile_j - Q(I) for every
/// registered family.
inline std::vector<double> reaction_profile(const ModelSpec& m, const Grid1D& g) {
    std::vector<double> out(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) out[j] = eval_R(m, g.node(j), 0.0);
    return out;
}

}  // namespace hjc
