#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hjc/error.hpp"
#include "hjc/numerics.hpp"

namespace hjc {

/// Registered reaction families. `freequad` (R = 0, quadratic initial datum)
/// exists only as a closed-form oracle for the variational machinery and
/// deliberately fails the structural assumptions.
enum class Family { satexp, cubicsat, freequad };

inline std::string_view to_string(Family f) {
    switch (f) {
        case Family::satexp: return "satexp";
        case Family::cubicsat: return "cubicsat";
        case Family::freequad: return "freequad";
    }
    return "unknown";
}

struct ParamRange {
    std::string name;
    double default_value;
    double lo;
    double hi;
    bool lo_open;
};

inline std::vector<ParamRange> family_params(Family f) {
    std::vector<ParamRange> out{
        {"I_max", 1.0, 0.0, 100.0, true},
        {"u0_shift", 0.0, -1.0, 1.0, false},
    };
    if (f == Family::freequad) out.push_back({"curvature", 1.0, 0.0, 100.0, true});
    return out;
}

/// Immutable reaction-model instance. Default-constructed, it is satexp with
/// default parameters; every other instance comes from resolve_model.
class ModelSpec {
public:
    ModelSpec() = default;

    [[nodiscard]] Family family() const noexcept { return family_; }
    [[nodiscard]] std::string_view family_id() const noexcept { return to_string(family_); }
    [[nodiscard]] const std::map<std::string, double>& params() const noexcept { return params_; }
    [[nodiscard]] double param(const std::string& name) const { return params_.at(name); }
    [[nodiscard]] double I_max() const noexcept { return I_max_; }
    [[nodiscard]] std::pair<double, double> domain_hint() const noexcept { return domain_hint_; }
    [[nodiscard]] double u0_shift() const noexcept { return u0_shift_; }
    [[nodiscard]] double quad_curvature() const noexcept { return quad_curvature_; }

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

private:
    friend ModelSpec resolve_model(std::string_view family_id, const std::map<std::string, double>& params);

    Family family_ = Family::satexp;
    std::map<std::string, double> params_{{"I_max", 1.0}, {"u0_shift", 0.0}};
    double I_max_ = 1.0;
    std::pair<double, double> domain_hint_{-5.0, 15.0};
    double u0_shift_ = 0.0;
    double quad_curvature_ = 1.0;
};

inline Family parse_family(std::string_view id) {
    if (id == "satexp") return Family::satexp;
    if (id == "cubicsat") return Family::cubicsat;
    if (id == "freequad") return Family::freequad;
    fail(ErrorCode::UnknownFamily, "no registered family named '" + std::string(id) + "'");
}

inline ModelSpec resolve_model(std::string_view family_id, const std::map<std::string, double>& params = {}) {
    const Family family = parse_family(family_id);
    const auto ranges = family_params(family);
    for (const auto& [name, value] : params) {
        (void)value;
        bool known = false;
        for (const auto& r : ranges) known = known || r.name == name;
        if (!known)
            fail(ErrorCode::ParamOutOfRange,
                 "unknown parameter '" + name + "' for family " + std::string(family_id));
    }
    ModelSpec m;
    m.family_ = family;
    for (const auto& r : ranges) {
        const auto it = params.find(r.name);
        const double v = it == params.end() ? r.default_value : it->second;
        const bool above_lo = r.lo_open ? v > r.lo : v >= r.lo;
        if (!std::isfinite(v) || !above_lo || v > r.hi)
            fail(ErrorCode::ParamOutOfRange, "parameter '" + r.name + "' = " + std::to_string(v) + " outside " +
                                                 (r.lo_open ? "(" : "[") + std::to_string(r.lo) + ", " +
                                                 std::to_string(r.hi) + "]");
        m.params_[r.name] = v;
    }
    m.I_max_ = m.params_.at("I_max");
    m.u0_shift_ = m.params_.at("u0_shift");
    if (family == Family::freequad) {
        m.quad_curvature_ = m.params_.at("curvature");
        m.domain_hint_ = {-5.0, 5.0};
    }
    return m;
}

// ---------------------------------------------------------------------------
// Component evaluations

inline double eval_Q(const ModelSpec& m, double I) {
    if (I < 0.0) fail(ErrorCode::NegativeI, "I = " + std::to_string(I));
    if (m.family() == Family::freequad) return 0.0;
    return I;
}

inline double eval_Q_prime(const ModelSpec& m, double I) {
    if (I < 0.0) fail(ErrorCode::NegativeI, "I = " + std::to_string(I));
    return m.family() == Family::freequad ? 0.0 : 1.0;
}

inline double eval_b(const ModelSpec& m, double x) {
    if (x <= 0.0) return 0.0;
    const double x3 = x * x * x;
    switch (m.family()) {
        case Family::satexp: return -std::expm1(-x3);
        case Family::cubicsat: return x3 / (1.0 + x3);
        case Family::freequad: return 0.0;
    }
    return 0.0;
}

inline double eval_b_prime(const ModelSpec& m, double x) {
    if (x <= 0.0) return 0.0;
    const double x2 = x * x;
    const double x3 = x2 * x;
    switch (m.family()) {
        case Family::satexp: return 3.0 * x2 * std::exp(-x3);
        case Family::cubicsat: return 3.0 * x2 / ((1.0 + x3) * (1.0 + x3));
        case Family::freequad: return 0.0;
    }
    return 0.0;
}

inline double eval_b_second(const ModelSpec& m, double x) {
    if (x <= 0.0) return 0.0;
    const double x3 = x * x * x;
    switch (m.family()) {
        case Family::satexp: return (6.0 * x - 9.0 * x3 * x) * std::exp(-x3);
        case Family::cubicsat: return (6.0 * x - 12.0 * x3 * x) / ((1.0 + x3) * (1.0 + x3) * (1.0 + x3));
        case Family::freequad: return 0.0;
    }
    return 0.0;
}

/// sup of b over [0, inf); b approaches it without attaining it.
inline double sup_b(const ModelSpec& m) { return m.family() == Family::freequad ? 0.0 : 1.0; }

/// R(x, I) = b(x) - Q(I) on x >= 0, left branch -Q(I) on x < 0.
inline double eval_R(const ModelSpec& m, double x, double I) {
    const double q = eval_Q(m, I);
    return (x >= 0.0 ? eval_b(m, x) : 0.0) - q;
}

inline double eval_R_x(const ModelSpec& m, double x, double I) {
    if (I < 0.0) fail(ErrorCode::NegativeI, "I = " + std::to_string(I));
    return eval_b_prime(m, x);
}

inline double eval_R_xx(const ModelSpec& m, double x, double I) {
    if (I < 0.0) fail(ErrorCode::NegativeI, "I = " + std::to_string(I));
    return eval_b_second(m, x);
}

inline double eval_u0(const ModelSpec& m, double x) {
    const double x2 = x * x;
    if (m.family() == Family::freequad) return -m.quad_curvature() * x2 + m.u0_shift();
    return -x2 / (1.0 + x2) + m.u0_shift();
}

inline double eval_u0_prime(const ModelSpec& m, double x) {
    if (m.family() == Family::freequad) return -2.0 * m.quad_curvature() * x;
    const double s = 1.0 + x * x;
    return -2.0 * x / (s * s);
}

inline double eval_u0_second(const ModelSpec& m, double x) {
    if (m.family() == Family::freequad) return -2.0 * m.quad_curvature();
    const double x2 = x * x;
    const double s = 1.0 + x2;
    return (6.0 * x2 - 2.0) / (s * s * s);
}

namespace detail {
// C^2 quintic smoothstep on [0, 1]
inline double smoothstep5(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}
}  // namespace detail

/// Consumption weight: 1 on [-2, 8], C^2 collars of unit width, 0 outside [-3, 9].
inline double eval_psi(const ModelSpec&, double x) {
    if (x < -2.0) return detail::smoothstep5(x + 3.0);
    if (x > 8.0) return detail::smoothstep5(9.0 - x);
    return 1.0;
}

inline constexpr std::pair<double, double> psi_plateau{-2.0, 8.0};

/// sup_I ||R_xx(., I)||_inf, by dense sampling of b'' over [0, 20].
inline double reaction_curvature_bound(const ModelSpec& m) {
    double out = 0.0;
    constexpr int n = 200000;
    for (int i = 0; i <= n; ++i) out = std::max(out, std::abs(eval_b_second(m, 20.0 * i / n)));
    return out;
}

/// ||u0''||_inf, by dense sampling over [-50, 50].
inline double initial_curvature_bound(const ModelSpec& m) {
    double out = std::abs(eval_u0_second(m, 0.0));
    constexpr int n = 200000;
    for (int i = 0; i <= n; ++i) out = std::max(out, std::abs(eval_u0_second(m, -50.0 + 100.0 * i / n)));
    return out;
}

/// The unique x >= 0 with b(x) = Q(I).
inline double zero_level_x(const ModelSpec& m, double I) {
    const double q = eval_Q(m, I);
    if (q == 0.0) return 0.0;
    if (q >= sup_b(m)) fail(ErrorCode::Saturated, "Q(I) = " + std::to_string(q) + " has no finite preimage under b");
    double hi = 1.0;
    while (eval_b(m, hi) <= q) {
        hi *= 2.0;
        if (hi > 1e6) fail(ErrorCode::Saturated, "b does not reach Q(I) = " + std::to_string(q) + " on a finite bracket");
    }
    const auto bracket = bisect_monotone([&](double x) { return q - eval_b(m, x); }, 0.0, hi, 1e-10);
    return bracket.root();
}

// ---------------------------------------------------------------------------
// Assumption checks

enum class CheckStatus { pass, fail, not_applicable };

inline std::string_view to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::not_applicable: return "not-applicable";
    }
    return "unknown";
}

struct Witness {
    std::optional<double> x;
    std::optional<double> I;
};

struct AssumptionEntry {
    std::string id;
    CheckStatus status = CheckStatus::pass;
    std::optional<Witness> witness;
    double sampled_bound = 0.0;
    std::string note;
};

struct AssumptionReport {
    std::array<AssumptionEntry, 8> entries;

    [[nodiscard]] bool all_pass() const {
        for (const auto& e : entries)
            if (e.status == CheckStatus::fail) return false;
        return true;
    }
    [[nodiscard]] const AssumptionEntry& at(std::string_view id) const {
        for (const auto& e : entries)
            if (e.id == id) return e;
        fail(ErrorCode::InvalidArgument, "no assumption " + std::string(id));
    }
};

/// Divided-difference bounds above this count as unbounded.
inline constexpr double kSampledBoundCap = 1e6;
/// A4: the sampled sup of R(., I_max) must be within this of 0 from below.
inline constexpr double kSupApproachTol = 1e-3;
inline constexpr double kZeroTol = 1e-12;

namespace detail {

inline std::vector<double> sorted_unique(std::span<const double> v) {
    std::vector<double> out(v.begin(), v.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline void set_fail(AssumptionEntry& e, std::optional<double> x, std::optional<double> I, std::string note) {
    if (e.status == CheckStatus::fail) return;  // keep the first witness
    e.status = CheckStatus::fail;
    e.witness = Witness{x, I};
    e.note = std::move(note);
}

/// sup over the sampled x grid of |f|, |first| and |second| divided differences.
template <class F>
double divided_difference_bound(std::span<const double> xs, F&& f, int order) {
    double out = 0.0;
    for (std::size_t i = 0; i + 2 < xs.size(); ++i) {
        const double f0 = f(xs[i]), f1 = f(xs[i + 1]), f2 = f(xs[i + 2]);
        const double d01 = (f1 - f0) / (xs[i + 1] - xs[i]);
        const double d12 = (f2 - f1) / (xs[i + 2] - xs[i + 1]);
        if (order == 1) out = std::max(out, std::abs(d01));
        if (order == 2) out = std::max(out, std::abs(2.0 * (d12 - d01) / (xs[i + 2] - xs[i])));
    }
    return out;
}

}  // namespace detail

inline AssumptionReport check_assumptions(const ModelSpec& m, std::span<const double> x_grid,
                                          std::span<const double> I_samples) {
    if (x_grid.empty() || I_samples.empty()) fail(ErrorCode::InvalidArgument, "check_assumptions: empty grid");
    const auto xs = detail::sorted_unique(x_grid);
    const auto Is = detail::sorted_unique(I_samples);
    for (double I : Is)
        if (I < 0.0) fail(ErrorCode::NegativeI, "check_assumptions: negative multiplier sample");

    AssumptionReport rep;
    for (std::size_t k = 0; k < 8; ++k) rep.entries[k].id = "A" + std::to_string(k + 1);
    auto& a1 = rep.entries[0];
    auto& a2 = rep.entries[1];
    auto& a3 = rep.entries[2];
    auto& a4 = rep.entries[3];
    auto& a5 = rep.entries[4];
    auto& a6 = rep.entries[5];
    auto& a7 = rep.entries[6];
    auto& a8 = rep.entries[7];

    // A1: left branch negative for positive multipliers
    {
        bool any = false;
        double worst = -std::numeric_limits<double>::infinity();
        for (double x : xs) {
            if (x >= 0.0) break;
            for (double I : Is) {
                if (I <= 0.0) continue;
                any = true;
                const double r = eval_R(m, x, I);
                worst = std::max(worst, r);
                if (!(r < 0.0)) detail::set_fail(a1, x, I, "R(x, I) >= 0 on x < 0");
            }
        }
        if (!any) a1.status = CheckStatus::not_applicable;
        else a1.sampled_bound = worst;
    }

    // A2: strictly decreasing in I, W^{2,inf} bound uniform over sampled I
    {
        for (double x : xs)
            for (std::size_t k = 1; k < Is.size(); ++k)
                if (!(eval_R(m, x, Is[k]) < eval_R(m, x, Is[k - 1])))
                    detail::set_fail(a2, x, Is[k], "R not strictly decreasing in I");
        double bound = 0.0;
        for (double I : Is) {
            auto r = [&](double x) { return eval_R(m, x, I); };
            for (double x : xs) bound = std::max(bound, std::abs(r(x)));
            bound = std::max({bound, detail::divided_difference_bound(xs, r, 1), detail::divided_difference_bound(xs, r, 2)});
        }
        a2.sampled_bound = bound;
        if (!(bound <= kSampledBoundCap)) detail::set_fail(a2, std::nullopt, std::nullopt, "W^{2,inf} bound exceeded");
    }

    // A3: Q(0) = 0, Q >= 0, strictly increasing
    {
        if (eval_Q(m, 0.0) != 0.0) detail::set_fail(a3, std::nullopt, 0.0, "Q(0) != 0");
        for (std::size_t k = 0; k < Is.size(); ++k) {
            if (eval_Q(m, Is[k]) < 0.0) detail::set_fail(a3, std::nullopt, Is[k], "Q < 0");
            if (k > 0 && !(eval_Q(m, Is[k]) > eval_Q(m, Is[k - 1])))
                detail::set_fail(a3, std::nullopt, Is[k], "Q not strictly increasing");
        }
        a3.sampled_bound = eval_Q(m, Is.back());
    }

    // A4: sup_x R(., I_max) = 0
    {
        double best = -std::numeric_limits<double>::infinity();
        double at = xs.front();
        for (double x : xs) {
            const double r = eval_R(m, x, m.I_max());
            if (r > best) {
                best = r;
                at = x;
            }
        }
        a4.sampled_bound = best;
        if (best > kZeroTol) detail::set_fail(a4, at, m.I_max(), "R(., I_max) > 0");
        else if (best < -kSupApproachTol) detail::set_fail(a4, at, m.I_max(), "sup R(., I_max) stays below 0");
    }

    // A5: min_x R(., 0) = 0
    {
        double worst = std::numeric_limits<double>::infinity();
        double at = xs.front();
        for (double x : xs) {
            const double r = eval_R(m, x, 0.0);
            if (r < worst) {
                worst = r;
                at = x;
            }
        }
        a5.sampled_bound = worst;
        if (std::abs(worst) > kZeroTol) detail::set_fail(a5, at, 0.0, "min R(., 0) != 0");
    }

    // A6: b(0) = 0 and b strictly increasing on x >= 0. Equal samples are
    // accepted only as rounding ties: b' > 0 at both ends of the pair, or both
    // at the floating-point saturation of sup b.
    {
        if (eval_b(m, 0.0) != 0.0) detail::set_fail(a6, 0.0, std::nullopt, "b(0) != 0");
        const double top = sup_b(m);
        const double saturation = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(top));
        double prev_b = eval_b(m, 0.0);
        double prev_x = 0.0;
        bool started = false;
        std::size_t rounding_ties = 0;
        for (double x : xs) {
            if (x < 0.0) continue;
            const double bx = eval_b(m, x);
            if (started) {
                if (bx < prev_b) detail::set_fail(a6, x, std::nullopt, "b decreases");
                else if (bx == prev_b) {
                    const bool rising = eval_b_prime(m, prev_x) > 0.0 && eval_b_prime(m, x) > 0.0;
                    const bool saturated = top > 0.0 && std::abs(bx - top) <= saturation;
                    if (rising || saturated) ++rounding_ties;
                    else detail::set_fail(a6, x, std::nullopt, "b not strictly increasing");
                }
            } else if (x > 0.0 && !(bx > prev_b)) {
                detail::set_fail(a6, x, std::nullopt, "b not strictly increasing at the origin");
            }
            started = true;
            prev_b = bx;
            prev_x = x;
        }
        a6.sampled_bound = static_cast<double>(rounding_ties);
        if (rounding_ties > 0 && a6.status == CheckStatus::pass)
            a6.note = std::to_string(rounding_ties) + " equal samples from floating-point rounding";
    }

    // A7: b' Lipschitz and nonnegative
    {
        std::vector<double> pos;
        for (double x : xs)
            if (x >= 0.0) pos.push_back(x);
        for (double x : pos)
            if (eval_b_prime(m, x) < 0.0) detail::set_fail(a7, x, std::nullopt, "b' < 0");
        const double lip = detail::divided_difference_bound(std::span<const double>(pos), [&](double x) { return eval_b_prime(m, x); }, 1);
        a7.sampled_bound = lip;
        if (!(lip <= kSampledBoundCap)) detail::set_fail(a7, std::nullopt, std::nullopt, "b' not Lipschitz on samples");
        if (pos.size() < 3) a7.status = a7.status == CheckStatus::fail ? a7.status : CheckStatus::not_applicable;
    }

    // A8: u0 in C^2, max u0 = u0(0) = 0, u0 < 0 elsewhere
    {
        if (std::abs(eval_u0(m, 0.0)) > kZeroTol) detail::set_fail(a8, 0.0, std::nullopt, "u0(0) != 0");
        for (double x : xs)
            if (x != 0.0 && !(eval_u0(m, x) < 0.0)) detail::set_fail(a8, x, std::nullopt, "u0 >= 0 away from the origin");
        const double c2 = detail::divided_difference_bound(xs, [&](double x) { return eval_u0(m, x); }, 2);
        a8.sampled_bound = c2;
        if (!(c2 <= kSampledBoundCap)) detail::set_fail(a8, std::nullopt, std::nullopt, "u0'' unbounded on samples");
    }
    return rep;
}

/// Default sampling used by the solvers' precondition gates.
inline AssumptionReport check_assumptions_default(const ModelSpec& m, const Grid1D& grid) {
    const auto xs = grid.nodes();
    std::vector<double> Is;
    for (int k = 0; k <= 4; ++k) Is.push_back(m.I_max() * k / 4.0);
    return check_assumptions(m, xs, Is);
}

}  // namespace hjc
