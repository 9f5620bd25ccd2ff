#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hjc/limit.hpp"
#include "oracles.hpp"

using namespace hjc;

namespace {

template <class F>
void expect_error(ErrorCode code, F&& f) {
    try {
        f();
        ADD_FAILURE() << "expected " << to_string(code);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

const ModelSpec kFree = resolve_model("freequad");

SampledFunction five_node() {
    return {Grid1D(0.0, 0.4, 5), std::vector<double>(oracle::kFiveNodeInput.begin(), oracle::kFiveNodeInput.end())};
}

LimitConfig default_limit(Route r, std::size_t n_points = 2001, std::size_t n_steps = 500) {
    LimitConfig c;
    c.grid = Grid1D(-5.0, 15.0, n_points);
    c.time = TimeGrid(2.0, n_steps);
    c.params.route = r;
    c.snapshot_stride = 50;
    return c;
}

SampledFunction initial(const ModelSpec& m, const Grid1D& g) {
    return SampledFunction::sample(g, [&](double x) { return eval_u0(m, x); });
}

}  // namespace

TEST(Route, ParseAliases) {
    EXPECT_EQ(parse_route("fd"), Route::fd_monotone);
    EXPECT_EQ(parse_route("fd_monotone"), Route::fd_monotone);
    EXPECT_EQ(parse_route("lax"), Route::lax_oleinik);
    EXPECT_EQ(parse_route("lax_oleinik"), Route::lax_oleinik);
    expect_error(ErrorCode::ConfigInvalid, [] { parse_route("spectral"); });
}

TEST(AdvanceFd, FiveNodeGodunov) {
    const auto out = advance_field_fd(five_node(), 0.0, kFree, 0.01);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(out.values[j], oracle::kFiveNodeGodunov[j], 1e-15) << j;
}

TEST(AdvanceFd, FiveNodeLaxFriedrichs) {
    const auto out = advance_field_fd(five_node(), 0.0, kFree, 0.01, Flux::lax_friedrichs, 3.0);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(out.values[j], oracle::kFiveNodeLF[j], 1e-15) << j;
}

TEST(AdvanceFd, FiveNodeSatexpInitialDatum) {
    const ModelSpec m;
    const auto u = initial(m, Grid1D(-0.02, 0.02, 5));
    const auto out = advance_field_fd(u, 0.0, m, 1e-3);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(out.values[j], oracle::kFiveNodeSatexp[j], 1e-17) << j;
}

TEST(AdvanceFd, RejectsNonMonotoneStep) {
    expect_error(ErrorCode::MonotonicityViolated, [] { advance_field_fd(five_node(), 0.0, kFree, 0.05); });
    expect_error(ErrorCode::MonotonicityViolated,
                 [] { advance_field_fd(five_node(), 0.0, kFree, 0.01, Flux::lax_friedrichs, 1.0); });
}

TEST(AdvanceLax, MatchesSegmentwiseBruteForce) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const ModelSpec m;
    for (int trial = 0; trial < 50; ++trial) {
        const Grid1D g(-2.0, 3.0, 20 + rng() % 100);
        const double dt = 0.001 + 0.05 * std::abs(U(rng));
        const double I = 0.5 * (1.0 + U(rng));
        std::vector<double> v(g.size());
        for (double& x : v) x = 0.3 * U(rng);
        const SampledFunction u(g, v);
        std::vector<double> w(v), half(v.size());
        for (std::size_t j = 0; j < v.size(); ++j) {
            half[j] = 0.5 * dt * eval_R(m, g.node(j), I);
            w[j] += half[j];
        }
        const auto expected = oracle::brute_p1_hop(w, g, 1.0 / (4.0 * dt));
        const auto got = advance_field_lax(u, I, m, dt);
        for (std::size_t j = 0; j < v.size(); ++j) EXPECT_NEAR(got.values[j], expected[j] + half[j], 1e-13) << trial;
    }
}

TEST(AdvanceLax, QuadraticHopIsNearClosedForm) {
    const Grid1D g(-3.0, 3.0, 1201);
    const double a = 1.0, dt = 0.05;
    const auto u = SampledFunction::sample(g, [&](double x) { return -a * x * x; });
    const auto out = advance_field_lax(u, 0.0, kFree, dt);
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double x = g.node(j);
        if (std::abs(x) > 2.0) continue;
        EXPECT_NEAR(out.values[j], oracle::hopf_lax_value(x, dt, a), g.dx() * g.dx());
    }
}

TEST(Comparison, BothRoutesAreOrderPreserving) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const ModelSpec m;
    const Grid1D g(-5.0, 15.0, 801);
    const double dt = 0.004;
    const auto u = initial(m, g);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> bumped(u.values);
        for (double& x : bumped) x += 1e-3 * U(rng);
        const SampledFunction v(g, bumped);
        const double I = U(rng) * m.I_max();
        const auto fu = advance_field_fd(u, I, m, dt), fv = advance_field_fd(v, I, m, dt);
        const auto lu = advance_field_lax(u, I, m, dt), lv = advance_field_lax(v, I, m, dt);
        for (std::size_t j = 0; j < g.size(); ++j) {
            EXPECT_LE(fu.values[j], fv.values[j] + 1e-15);
            EXPECT_LE(lu.values[j], lv.values[j] + 1e-15);
        }
    }
}

TEST(Comparison, ConstraintMapIsNonincreasing) {
    const ModelSpec m;
    const Grid1D g(-5.0, 15.0, 801);
    const auto u = initial(m, g);
    for (Route r : {Route::fd_monotone, Route::lax_oleinik}) {
        RouteParams p;
        p.route = r;
        const detail::ConstraintMap map(u, m, 0.004, p);
        double prev = map(0.0);
        for (int k = 1; k <= 20; ++k) {
            const double cur = map(k / 20.0);
            EXPECT_LE(cur, prev);
            prev = cur;
        }
    }
}

TEST(Enforce, InfeasibleAndSaturated) {
    const ModelSpec m;
    const Grid1D g(-5.0, 15.0, 801);
    for (Route r : {Route::fd_monotone, Route::lax_oleinik}) {
        RouteParams p;
        p.route = r;
        const SampledFunction low(g, std::vector<double>(g.size(), -1.0));
        expect_error(ErrorCode::InfeasibleLow, [&] { enforce_constraint(low, m, 0.004, p); });
        const SampledFunction high(g, std::vector<double>(g.size(), 0.5));
        expect_error(ErrorCode::SaturatedHigh, [&] { enforce_constraint(high, m, 0.004, p); });
    }
}

TEST(Enforce, HitsTheConstraint) {
    const ModelSpec m;
    const Grid1D g(-1.0, 3.5, 901);
    // a datum whose max sits where b > 0, so the step needs a positive multiplier
    const auto u = SampledFunction::sample(g, [](double x) { return -(x - 1.2) * (x - 1.2); });
    for (Route r : {Route::fd_monotone, Route::lax_oleinik}) {
        RouteParams p;
        p.route = r;
        const auto step = enforce_constraint(u, m, 2e-4, p);
        EXPECT_GT(step.I, 0.0);
        EXPECT_LT(step.I, m.I_max());
        EXPECT_LE(std::abs(step.max_u), p.constraint_tol);
        EXPECT_LE(step.evaluations, 2u + static_cast<std::size_t>(std::ceil(std::log2(m.I_max() / p.constraint_tol))));
        // b(1.2) = Q(I) up to the kinetic and grid effects
        EXPECT_NEAR(step.I, eval_b(m, 1.2), 0.02);
    }
}

TEST(RunLimit, RejectsShiftedDatum) {
    auto c = default_limit(Route::fd_monotone, 401, 100);
    c.model = resolve_model("satexp", {{"u0_shift", -0.1}});
    expect_error(ErrorCode::PreconditionFailed, [&] { run_limit(c); });
    c.model = resolve_model("satexp", {{"I_max", 0.5}});
    expect_error(ErrorCode::PreconditionFailed, [&] { run_limit(c); });
}

TEST(RunLimit, FdRouteInvariants) {
    const auto c = default_limit(Route::fd_monotone);
    const auto s = run_limit(c);
    ASSERT_TRUE(s.valid);
    ASSERT_EQ(s.times.size(), 501u);
    EXPECT_EQ(s.I[0], 0.0);
    for (std::size_t k = 0; k < s.I.size(); ++k) {
        EXPECT_GE(s.I[k], 0.0);
        EXPECT_LE(s.I[k], c.model.I_max());
        EXPECT_LE(std::abs(s.max_u[k]), 1e-8) << k;
        if (k > 0) {
            EXPECT_GE(s.I[k], s.I[k - 1] - 1e-6) << k;
        }
    }
    EXPECT_EQ(zero_reaction_residual(s, c.model).size(), s.times.size());
    ASSERT_NE(s.snapshot_at(1.0), nullptr);
    EXPECT_EQ(s.snapshot_at(1.001), s.snapshot_at(1.0));
    EXPECT_EQ(s.snapshot_at(1.01), nullptr);
}

TEST(RunLimit, LaxRouteInvariants) {
    const auto c = default_limit(Route::lax_oleinik, 801, 250);
    const auto s = run_limit(c);
    ASSERT_TRUE(s.valid);
    EXPECT_EQ(s.I[0], 0.0);
    for (std::size_t k = 0; k < s.I.size(); ++k) {
        EXPECT_LE(std::abs(s.max_u[k]), 1e-8) << k;
        if (k > 0) {
            EXPECT_GE(s.I[k], s.I[k - 1] - 1e-6) << k;
        }
    }
    EXPECT_GT(s.I.back(), 0.5);
}

TEST(RunLimit, PartialOutputOnFailure) {
    auto c = default_limit(Route::fd_monotone, 2001, 20);
    const auto s = run_limit(c);
    EXPECT_FALSE(s.valid);
    ASSERT_TRUE(s.failure.has_value());
    EXPECT_EQ(s.failure->code, ErrorCode::MonotonicityViolated);
    EXPECT_EQ(s.times.size(), s.failure->step);
}
