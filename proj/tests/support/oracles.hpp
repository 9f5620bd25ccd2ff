#pragma once

// Reference computations used only by the tests. Each one is written
// independently of the library routine it checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "hjc/numerics.hpp"

namespace oracle {

/// O(N^2) scan of max_i [v_i - kappa (x_j - x_i)^2], through the library's
/// own hop_value so that both sides round identically.
inline std::vector<double> brute_envelope(const std::vector<double>& v, const hjc::Grid1D& g, double kappa) {
    const double c = kappa * g.dx() * g.dx();
    std::vector<double> out(v.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < v.size(); ++j)
        for (std::size_t i = 0; i < v.size(); ++i)
            out[j] = std::max(out[j], hjc::hop_value(v[i], c, static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i)));
    return out;
}

/// Exact sup over y in [x_0, x_{n-1}] of P1(v)(y) - kappa (x_j - y)^2: on each
/// segment the objective is a concave quadratic, maximized at its vertex or an end.
inline std::vector<double> brute_p1_hop(const std::vector<double>& v, const hjc::Grid1D& g, double kappa) {
    std::vector<double> out(v.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double xj = g.node(j);
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            const double a = g.node(i), b = g.node(i + 1);
            const double m = (v[i + 1] - v[i]) / (b - a);
            auto f = [&](double y) { return v[i] + m * (y - a) - kappa * (xj - y) * (xj - y); };
            // f'(y) = m + 2 kappa (xj - y) = 0
            const double vertex = xj + m / (2.0 * kappa);
            double best = std::max(f(a), f(b));
            if (vertex > a && vertex < b) best = std::max(best, f(vertex));
            out[j] = std::max(out[j], best);
        }
    }
    return out;
}

/// Solution of u_t = eps u_xx on the line for u(x, 0) = exp(-x^2 / (2 s0^2)).
inline double heat_gaussian(double x, double t, double eps, double s0) {
    const double s2 = s0 * s0 + 2.0 * eps * t;
    return std::sqrt(s0 * s0 / s2) * std::exp(-x * x / (2.0 * s2));
}

/// Tridiagonal matrix-vector product for residual checks.
inline std::vector<double> tri_multiply(const std::vector<double>& lower, const std::vector<double>& diag,
                                        const std::vector<double>& upper, const std::vector<double>& x) {
    const std::size_t n = diag.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = diag[i] * x[i];
        if (i > 0) out[i] += lower[i] * x[i - 1];
        if (i + 1 < n) out[i] += upper[i] * x[i + 1];
    }
    return out;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Frozen values, computed once with 30-digit arithmetic from the textbook
// definitions (Godunov flux by extremizing -p^2 over [min(a,c), max(a,c)]).

/// u = (0, 0.1, 0.15, 0.1, -0.05), dx = 0.1, dt = 0.01, R = 0, copied end slopes.
inline constexpr std::array<double, 5> kFiveNodeInput{0.0, 0.1, 0.15, 0.1, -0.05};
inline constexpr std::array<double, 5> kFiveNodeGodunov{0.01, 0.1025, 0.15, 0.1025, -0.0275};
/// Same data, Lax-Friedrichs with dissipation 3.
inline constexpr std::array<double, 5> kFiveNodeLF{0.01, 0.098125, 0.135, 0.095, -0.0275};
/// satexp u0 on x = -0.02..0.02, dx = 0.01, dt = 1e-3, I = 0, Godunov.
inline constexpr std::array<double, 5> kFiveNodeSatexp{-0.00039894096337175206, -9.989002099690041e-5, 0.0,
                                                       -9.988902099740041e-5, -0.00039893296340375197};

// Closed forms from a 30-digit calculator.
inline constexpr double kOneMinusInvE = 0.63212055882855768;       // 1 - e^-1
inline constexpr double kR_1_half = 0.13212055882855768;           // 1 - e^-1 - 0.5
inline constexpr double kZeroLevelHalf = 0.88499704450051772;      // (ln 2)^(1/3)
inline constexpr double kExpMinus2 = 0.13533528323661269;

/// Hopf-Lax optimum for R = 0, u0 = -a x^2: y* = x / (1 + 4 a t), u = -a x^2 / (1 + 4 a t).
inline double hopf_lax_start(double x, double t, double a) { return x / (1.0 + 4.0 * a * t); }
inline double hopf_lax_value(double x, double t, double a) { return -a * x * x / (1.0 + 4.0 * a * t); }

}  // namespace oracle
