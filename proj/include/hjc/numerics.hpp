#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hjc/error.hpp"

namespace hjc {

/// Uniform truncation of the trait axis.
class Grid1D {
public:
    Grid1D() = default;
    Grid1D(double x_min, double x_max, std::size_t n_points)
        : x_min_(x_min), x_max_(x_max), n_points_(n_points) {
        if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max))
            fail(ErrorCode::InvalidArgument, "grid requires finite x_min < x_max");
        if (n_points < 3) fail(ErrorCode::InvalidArgument, "grid requires at least 3 nodes");
    }

    [[nodiscard]] double x_min() const noexcept { return x_min_; }
    [[nodiscard]] double x_max() const noexcept { return x_max_; }
    [[nodiscard]] std::size_t size() const noexcept { return n_points_; }
    [[nodiscard]] double dx() const noexcept {
        return (x_max_ - x_min_) / static_cast<double>(n_points_ - 1);
    }
    [[nodiscard]] double node(std::size_t i) const noexcept {
        // the last node is pinned so the window end is exact
        if (i + 1 == n_points_) return x_max_;
        return x_min_ + static_cast<double>(i) * dx();
    }
    [[nodiscard]] std::vector<double> nodes() const {
        std::vector<double> out(n_points_);
        for (std::size_t i = 0; i < n_points_; ++i) out[i] = node(i);
        return out;
    }
    [[nodiscard]] bool contains(double x) const noexcept { return x >= x_min_ && x <= x_max_; }

    /// Same window, spacing halved.
    [[nodiscard]] Grid1D refined() const { return {x_min_, x_max_, 2 * n_points_ - 1}; }

    friend bool operator==(const Grid1D&, const Grid1D&) = default;

private:
    double x_min_ = 0.0;
    double x_max_ = 1.0;
    std::size_t n_points_ = 3;
};

class TimeGrid {
public:
    TimeGrid() = default;
    TimeGrid(double t_final, std::size_t n_steps) : t_final_(t_final), n_steps_(n_steps) {
        if (!(t_final > 0.0) || !std::isfinite(t_final))
            fail(ErrorCode::InvalidArgument, "time grid requires t_final > 0");
        if (n_steps < 1) fail(ErrorCode::InvalidArgument, "time grid requires n_steps >= 1");
    }

    [[nodiscard]] double t_final() const noexcept { return t_final_; }
    [[nodiscard]] std::size_t n_steps() const noexcept { return n_steps_; }
    [[nodiscard]] double dt() const noexcept { return t_final_ / static_cast<double>(n_steps_); }
    [[nodiscard]] double time(std::size_t k) const noexcept {
        if (k == n_steps_) return t_final_;
        return static_cast<double>(k) * dt();
    }
    [[nodiscard]] TimeGrid refined() const { return {t_final_, 2 * n_steps_}; }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double t_final_ = 1.0;
    std::size_t n_steps_ = 1;
};

/// Node values of a function on a Grid1D.
struct SampledFunction {
    Grid1D grid;
    std::vector<double> values;

    SampledFunction() = default;
    SampledFunction(Grid1D g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size())
            fail(ErrorCode::InvalidArgument, "sampled function length does not match grid");
        for (double value : values)
            if (!std::isfinite(value)) fail(ErrorCode::InvalidArgument, "sampled function has a non-finite value");
    }

    template <class F>
    static SampledFunction sample(const Grid1D& g, F&& f) {
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.node(i));
        return {g, std::move(v)};
    }

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    [[nodiscard]] double dx() const noexcept { return grid.dx(); }
};

// ---------------------------------------------------------------------------
// Quadrature and interpolation

inline double trapezoid(std::span<const double> values, double dx) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    sum -= 0.5 * (values.front() + values.back());
    return sum * dx;
}

inline double trapezoid(const SampledFunction& f) { return trapezoid(f.values, f.dx()); }

/// Trapezoid rule on nonuniform abscissae.
inline double trapezoid(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) fail(ErrorCode::InvalidArgument, "trapezoid: abscissa/ordinate length mismatch");
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return sum;
}

inline double interp_linear(const SampledFunction& f, double x) {
    const Grid1D& g = f.grid;
    if (!(x >= g.x_min() && x <= g.x_max()))
        fail(ErrorCode::OutOfDomain, "interp_linear: x = " + std::to_string(x) + " outside grid");
    const double pos = (x - g.x_min()) / g.dx();
    auto i = static_cast<std::size_t>(std::floor(pos));
    if (i >= g.size() - 1) i = g.size() - 2;
    const double w = pos - static_cast<double>(i);
    if (w == 0.0) return f.values[i];
    if (w == 1.0) return f.values[i + 1];
    return (1.0 - w) * f.values[i] + w * f.values[i + 1];
}

/// Linear interpolation through increasing abscissae; clamps outside the table.
inline double interp_table(std::span<const double> x, std::span<const double> y, double at) {
    if (x.empty()) fail(ErrorCode::InvalidArgument, "interp_table: empty table");
    if (at <= x.front()) return y.front();
    if (at >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), at);
    const auto i = static_cast<std::size_t>(it - x.begin());
    const double w = (at - x[i - 1]) / (x[i] - x[i - 1]);
    return (1.0 - w) * y[i - 1] + w * y[i];
}

// ---------------------------------------------------------------------------
// Maximum location

struct ArgmaxResult {
    double x_star = 0.0;
    double f_star = 0.0;
    std::size_t index = 0;
    bool refined = false;
    bool tie = false;  ///< another node shares the maximal value; the smaller x was kept
};

inline ArgmaxResult argmax_refined(std::span<const double> values, const Grid1D& grid) {
    if (values.size() < 3) fail(ErrorCode::InvalidArgument, "argmax_refined needs at least 3 nodes");
    std::size_t best = 0;
    bool tie = false;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
            tie = false;
        } else if (values[i] == values[best]) {
            tie = true;
        }
    }
    ArgmaxResult out{grid.node(best), values[best], best, false, tie};
    if (best == 0 || best + 1 == values.size()) return out;

    const double left = values[best - 1];
    const double mid = values[best];
    const double right = values[best + 1];
    const double curvature = left - 2.0 * mid + right;
    if (curvature < 0.0) {
        const double offset = 0.5 * (left - right) / curvature;  // in cells
        if (std::abs(offset) <= 1.0) {
            out.x_star = grid.node(best) + offset * grid.dx();
            out.f_star = mid - 0.25 * (left - right) * offset;
            out.refined = true;
        }
    }
    return out;
}

inline ArgmaxResult argmax_refined(const SampledFunction& f) { return argmax_refined(f.values, f.grid); }

// ---------------------------------------------------------------------------
// Linear algebra

/// Thomas algorithm. lower[i] couples row i to unknown i-1 (lower[0] ignored);
/// upper[i] couples row i to unknown i+1 (upper[n-1] ignored).
inline std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                             std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (n == 0 || lower.size() != n || upper.size() != n || rhs.size() != n)
        fail(ErrorCode::InvalidArgument, "solve_tridiagonal: band lengths must match");
    for (std::size_t i = 0; i < n; ++i)
        if (diag[i] == 0.0) fail(ErrorCode::SingularPivot, "zero diagonal entry at row " + std::to_string(i));

    bool strict_somewhere = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double off = (i > 0 ? std::abs(lower[i]) : 0.0) + (i + 1 < n ? std::abs(upper[i]) : 0.0);
        if (std::abs(diag[i]) < off)
            fail(ErrorCode::NotDiagonallyDominant, "row " + std::to_string(i) + " is not diagonally dominant");
        if (std::abs(diag[i]) > off) strict_somewhere = true;
    }
    if (!strict_somewhere) fail(ErrorCode::NotDiagonallyDominant, "no row is strictly dominant");

    std::vector<double> c(n, 0.0);
    std::vector<double> d(n, 0.0);
    double pivot = diag[0];
    c[0] = n > 1 ? upper[0] / pivot : 0.0;
    d[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - lower[i] * c[i - 1];
        if (pivot == 0.0) fail(ErrorCode::SingularPivot, "zero pivot at row " + std::to_string(i));
        c[i] = i + 1 < n ? upper[i] / pivot : 0.0;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

// ---------------------------------------------------------------------------
// Root finding

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t evaluations = 0;  ///< interior evaluations, endpoints excluded

    [[nodiscard]] double root() const noexcept { return 0.5 * (lo + hi); }
    [[nodiscard]] double width() const noexcept { return hi - lo; }
};

/// Bisection for a nonincreasing g with g(lo) >= 0 >= g(hi). The returned
/// bracket keeps g(lo) >= 0 and g(hi) <= 0.
template <class G>
Bracket bisect_monotone(G&& g, double lo, double hi, double tol) {
    if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "bisect_monotone: tol must be positive");
    if (!(lo <= hi)) fail(ErrorCode::BracketInvalid, "bisect_monotone: lo > hi");
    const double g_lo = g(lo);
    const double g_hi = g(hi);
    if (!(g_lo >= 0.0) || !(g_hi <= 0.0))
        fail(ErrorCode::BracketInvalid, "g(lo) = " + std::to_string(g_lo) + ", g(hi) = " + std::to_string(g_hi));
    Bracket b{lo, hi, 0};
    if (g_lo == 0.0) {
        b.hi = lo;
        return b;
    }
    if (g_hi == 0.0) {
        b.lo = hi;
        return b;
    }
    while (b.hi - b.lo > tol) {
        const double mid = 0.5 * (b.lo + b.hi);
        if (mid <= b.lo || mid >= b.hi) break;  // floating-point resolution reached
        const double g_mid = g(mid);
        ++b.evaluations;
        if (g_mid >= 0.0) {
            b.lo = mid;
            if (g_mid == 0.0) {
                b.hi = mid;
                break;
            }
        } else {
            b.hi = mid;
        }
    }
    return b;
}

// ---------------------------------------------------------------------------
// Lax-Oleinik kernels

/// Value of one node-to-node hop; shared by the envelope and its reference scans.
inline double hop_value(double source, double curvature_per_cell2, std::ptrdiff_t cells) {
    const double d = static_cast<double>(cells);
    return source - curvature_per_cell2 * (d * d);
}

/// out_j = max_i [ values_i - curvature * (x_j - x_i)^2 ] in O(N), via the
/// lower envelope of the parabolas -values_i + curvature*(x - x_i)^2.
inline std::vector<double> upper_envelope_quadratic(std::span<const double> values, const Grid1D& grid,
                                                    double curvature) {
    if (!(curvature > 0.0)) fail(ErrorCode::InvalidArgument, "upper_envelope_quadratic: curvature must be positive");
    const std::size_t n = values.size();
    if (n != grid.size()) fail(ErrorCode::InvalidArgument, "upper_envelope_quadratic: size mismatch");
    const double c = curvature * grid.dx() * grid.dx();
    constexpr double inf = std::numeric_limits<double>::infinity();

    // parabola i in index units: f_i + c (j - i)^2 with f_i = -values_i
    auto key = [&](std::size_t i) {
        const double di = static_cast<double>(i);
        return -values[i] + c * di * di;
    };
    auto intersect = [&](std::size_t p, std::size_t q) {
        return (key(q) - key(p)) / (2.0 * c * static_cast<double>(q - p));
    };

    std::vector<std::size_t> apex(n);
    std::vector<double> bound(n + 1);
    std::size_t k = 0;
    apex[0] = 0;
    bound[0] = -inf;
    bound[1] = inf;
    for (std::size_t q = 1; q < n; ++q) {
        double s = intersect(apex[k], q);
        while (s <= bound[k]) {
            --k;
            s = intersect(apex[k], q);
        }
        ++k;
        apex[k] = q;
        bound[k] = s;
        bound[k + 1] = inf;
    }
    const std::size_t envelope_size = k + 1;

    std::vector<double> out(n);
    k = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const double dj = static_cast<double>(j);
        while (bound[k + 1] < dj) ++k;
        auto eval = [&](std::size_t slot) {
            const std::size_t i = apex[slot];
            return hop_value(values[i], c, static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i));
        };
        // rounding in the breakpoints can misassign a node sitting on one
        double best = eval(k);
        if (k > 0) best = std::max(best, eval(k - 1));
        if (k + 1 < envelope_size) best = std::max(best, eval(k + 1));
        out[j] = best;
    }
    return out;
}

/// out_j = sup over y in the window of [P1(values)(y) - curvature * (x_j - y)^2],
/// where P1 is the piecewise-linear interpolant. Node candidates come from
/// upper_envelope_quadratic; each segment contributes its interior critical
/// point to the (at most three) targets whose optimum falls inside it.
inline std::vector<double> upper_envelope_p1(std::span<const double> values, const Grid1D& grid, double curvature) {
    std::vector<double> out = upper_envelope_quadratic(values, grid, curvature);
    const std::size_t n = values.size();
    const double dx = grid.dx();
    const double shift_per_slope = 1.0 / (2.0 * curvature);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double slope = (values[i + 1] - values[i]) / dx;
        const double xi = grid.node(i);
        const double xi1 = grid.node(i + 1);
        // target x has its critical point y = x + slope/(2 curvature) in [xi, xi1]
        const double x_lo = xi - slope * shift_per_slope;
        const double x_hi = xi1 - slope * shift_per_slope;
        const double j_lo = std::ceil((x_lo - grid.x_min()) / dx) - 1.0;
        const double j_hi = std::floor((x_hi - grid.x_min()) / dx) + 1.0;
        if (j_hi < 0.0 || j_lo > static_cast<double>(n - 1)) continue;
        const auto first = static_cast<std::size_t>(std::max(j_lo, 0.0));
        const auto last = static_cast<std::size_t>(std::min(j_hi, static_cast<double>(n - 1)));
        for (std::size_t j = first; j <= last; ++j) {
            const double xj = grid.node(j);
            const double y = std::clamp(xj + slope * shift_per_slope, xi, xi1);
            const double gap = xj - y;
            const double candidate = values[i] + slope * (y - xi) - curvature * gap * gap;
            if (candidate > out[j]) out[j] = candidate;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Finite differences

/// Minimum of (v_{j+1} - 2 v_j + v_{j-1}) / dx^2 over interior nodes.
inline double min_second_difference(std::span<const double> values, double dx) {
    double out = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j + 1 < values.size(); ++j)
        out = std::min(out, (values[j + 1] - 2.0 * values[j] + values[j - 1]) / (dx * dx));
    return out;
}

inline double max_second_difference(std::span<const double> values, double dx) {
    double out = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j + 1 < values.size(); ++j)
        out = std::max(out, (values[j + 1] - 2.0 * values[j] + values[j - 1]) / (dx * dx));
    return out;
}

inline double max_abs_slope(std::span<const double> values, double dx) {
    double out = 0.0;
    for (std::size_t j = 1; j < values.size(); ++j) out = std::max(out, std::abs(values[j] - values[j - 1]) / dx);
    return out;
}

/// Centered difference at an interior node, one-sided at the ends.
inline double centered_slope(std::span<const double> values, double dx, std::size_t j) {
    if (j == 0) return (values[1] - values[0]) / dx;
    if (j + 1 == values.size()) return (values[j] - values[j - 1]) / dx;
    return (values[j + 1] - values[j - 1]) / (2.0 * dx);
}

}  // namespace hjc
