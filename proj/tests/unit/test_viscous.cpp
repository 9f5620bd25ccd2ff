#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hjc/hamiltonian.hpp"
#include "hjc/viscous.hpp"
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

ViscousConfig default_config(double eps = 0.1) {
    ViscousConfig c;
    c.grid = Grid1D(-5.0, 15.0, 2001);
    c.time = TimeGrid(2.0, 500);
    c.epsilon = eps;
    c.snapshot_stride = 50;
    return c;
}

}  // namespace

TEST(GodunovFlux, Cases) {
    EXPECT_EQ(godunov_p2(-1.0, 2.0), 4.0);   // a <= c: max
    EXPECT_EQ(godunov_p2(1.0, -0.5), 0.0);   // sonic point inside
    EXPECT_EQ(godunov_p2(2.0, 1.0), 1.0);    // a > c > 0: min
    EXPECT_EQ(godunov_p2(-1.0, -3.0), 1.0);  // 0 > a > c: min
    EXPECT_EQ(godunov_p2(0.5, 0.5), 0.25);   // consistency
}

TEST(GodunovFlux, MonotoneInEachArgument) {
    // H(p) = p^2 is maximized: nonincreasing in a, nondecreasing in c
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int i = 0; i < 2000; ++i) {
        const double a = U(rng), c = U(rng), d = std::abs(U(rng)) * 0.1;
        EXPECT_GE(godunov_p2(a, c), godunov_p2(a + d, c));
        EXPECT_LE(godunov_p2(a, c), godunov_p2(a, c + d));
    }
}

TEST(NumericalHamiltonian, FiveNodeGodunov) {
    const std::vector<double> u(oracle::kFiveNodeInput.begin(), oracle::kFiveNodeInput.end());
    const auto k = numerical_hamiltonian(u, 0.1, Flux::godunov);
    EXPECT_NEAR(k.max_slope, 1.5, 1e-14);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(u[j] + 0.01 * k.h[j], oracle::kFiveNodeGodunov[j], 1e-15) << j;
}

TEST(NumericalHamiltonian, MonotonicityGuard) {
    const std::vector<double> u(oracle::kFiveNodeInput.begin(), oracle::kFiveNodeInput.end());
    const auto k = numerical_hamiltonian(u, 0.1, Flux::godunov);
    EXPECT_NO_THROW(require_monotone(k, u, 0.1, 0.01, Flux::godunov, ErrorCode::CflViolation));
    expect_error(ErrorCode::CflViolation, [&] { require_monotone(k, u, 0.1, 0.05, Flux::godunov, ErrorCode::CflViolation); });
    const auto lf = numerical_hamiltonian(u, 0.1, Flux::lax_friedrichs, 1.0);
    expect_error(ErrorCode::MonotonicityViolated,
                 [&] { require_monotone(lf, u, 0.1, 0.01, Flux::lax_friedrichs, ErrorCode::MonotonicityViolated); });
}

TEST(HopfCole, DensityAndOverflow) {
    const Grid1D g(-1.0, 1.0, 5);
    const SampledFunction zero(g, std::vector<double>(5, 0.0));
    for (double v : hopf_cole_density(zero, 0.1).values) EXPECT_EQ(v, 1.0);
    const SampledFunction big(g, {0.0, 0.0, 71.0, 0.0, 0.0});
    expect_error(ErrorCode::OverflowDetected, [&] { hopf_cole_density(big, 0.1); });
    expect_error(ErrorCode::InvalidArgument, [&] { hopf_cole_density(zero, 0.0); });
}

TEST(HopfCole, IEpsOfFlatDatumIsPlateauLength) {
    const Grid1D g(-1.0, 1.0, 201);
    const SampledFunction zero(g, std::vector<double>(201, 0.0));
    EXPECT_NEAR(compute_I_eps(zero, 0.05, ModelSpec{}), 2.0, 1e-12);
}

TEST(HopfCole, IEpsOfGaussianProfile) {
    // int exp(-x^2 / eps) dx = sqrt(pi eps) when the mass sits inside the plateau
    const Grid1D g(-1.5, 1.5, 6001);
    for (double eps : {0.01, 0.05, 0.1}) {
        const auto u = SampledFunction::sample(g, [](double x) { return -x * x; });
        EXPECT_NEAR(compute_I_eps(u, eps, ModelSpec{}), std::sqrt(std::numbers::pi * eps), 1e-8) << eps;
    }
}

TEST(HopfCole, DensityOfUniformNegativeDatum) {
    const Grid1D g(-1.0, 1.0, 5);
    const SampledFunction minus_one(g, std::vector<double>(5, -1.0));
    for (double v : hopf_cole_density(minus_one, 0.5).values) EXPECT_NEAR(v, 0.1353352832366127, 1e-15);
    const SampledFunction huge(g, std::vector<double>(5, 1000.0));
    expect_error(ErrorCode::OverflowDetected, [&] { hopf_cole_density(huge, 0.1); });
}

TEST(HopfCole, IEpsVanishesForVeryNegativeData) {
    const Grid1D g(-5.0, 15.0, 2001);
    const SampledFunction low(g, std::vector<double>(g.size(), -50.0));
    for (double eps : {0.25, 0.1, 0.05}) EXPECT_NEAR(compute_I_eps(low, eps, ModelSpec{}), 0.0, 1e-12);
}

TEST(HopfCole, IEpsOfZeroDatumIsTheWeightIntegral) {
    // u = 0 gives n = 1, so I_eps is the integral of psi: the plateau plus the collars
    const ModelSpec m;
    const Grid1D g(-5.0, 15.0, 2001);
    const SampledFunction zero(g, std::vector<double>(g.size(), 0.0));
    const std::size_t fine = 400001;
    const double h = 20.0 / (fine - 1);
    double ref = 0.0;
    for (std::size_t i = 0; i < fine; ++i) {
        const double w = (i == 0 || i + 1 == fine) ? 0.5 : 1.0;
        ref += w * eval_psi(m, -5.0 + h * static_cast<double>(i));
    }
    ref *= h;
    EXPECT_GT(ref, 10.0);
    EXPECT_NEAR(compute_I_eps(zero, 0.1, m), ref, 1e-4);
}

TEST(HopfCole, IEpsOfInitialDatumShrinksWithEpsilon) {
    const ModelSpec m;
    const Grid1D g(-5.0, 15.0, 2001);
    const auto u0 = SampledFunction::sample(g, [&](double x) { return eval_u0(m, x); });
    double prev = compute_I_eps(u0, 0.1, m);
    EXPECT_GT(prev, 0.0);
    EXPECT_LT(prev, 1.0);
    for (double eps : {0.05, 0.025, 0.0125}) {
        const double cur = compute_I_eps(u0, eps, m);
        EXPECT_LT(cur, prev) << eps;
        prev = cur;
    }
}

TEST(ImplicitDiffusion, ConservesTrapezoidMassAndPreservesConstants) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> v(300);
    for (double& x : v) x = U(rng);
    const auto out = detail::implicit_diffusion(v, 2.5);
    EXPECT_NEAR(trapezoid(out, 0.1), trapezoid(v, 0.1), 1e-12);
    const std::vector<double> c(50, -0.7);
    for (double x : detail::implicit_diffusion(c, 10.0)) EXPECT_NEAR(x, -0.7, 1e-14);
}

TEST(StepViscous, InviscidFiveNodeMatchesGodunov) {
    ViscousConfig c;
    c.grid = Grid1D(0.0, 0.4, 5);
    c.time = TimeGrid(0.01, 1);
    c.epsilon = 0.0;
    c.terms = {true, false, false};
    const SampledFunction u(c.grid, std::vector<double>(oracle::kFiveNodeInput.begin(), oracle::kFiveNodeInput.end()));
    const auto step = step_viscous(u, c);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(step.next.values[j], oracle::kFiveNodeGodunov[j], 1e-15) << j;
}

TEST(StepViscous, ConstantIsSteadyWithoutReaction) {
    ViscousConfig c = default_config();
    c.terms = {true, false, true};
    const SampledFunction u(c.grid, std::vector<double>(c.grid.size(), -0.3));
    const auto step = step_viscous(u, c);
    for (double v : step.next.values) EXPECT_NEAR(v, -0.3, 1e-14);
}

TEST(StepViscous, HeatKernel) {
    ViscousConfig c;
    c.grid = Grid1D(-10.0, 10.0, 2001);
    c.time = TimeGrid(1.0, 2000);
    c.epsilon = 0.5;
    c.terms = {false, false, true};
    auto u = SampledFunction::sample(c.grid, [](double x) { return oracle::heat_gaussian(x, 0.0, 0.5, 1.0); });
    for (std::size_t k = 0; k < c.time.n_steps(); ++k) u = step_viscous(u, c).next;
    double err = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j)
        err = std::max(err, std::abs(u.values[j] - oracle::heat_gaussian(c.grid.node(j), 1.0, 0.5, 1.0)));
    EXPECT_LT(err, 2e-4);
}

TEST(RunViscous, RejectsBadInputs) {
    ViscousConfig c = default_config();
    c.model = resolve_model("satexp", {{"u0_shift", 0.1}});
    expect_error(ErrorCode::PreconditionFailed, [&] { run_viscous(c); });
    c = default_config(0.0);
    expect_error(ErrorCode::InvalidArgument, [&] { run_viscous(c); });
    c = default_config();
    c.cfl = 1.5;
    expect_error(ErrorCode::InvalidArgument, [&] { run_viscous(c); });
}

TEST(RunViscous, CflViolationStopsWithPartialOutput) {
    ViscousConfig c = default_config();
    c.time = TimeGrid(2.0, 10);
    const auto s = run_viscous(c);
    EXPECT_FALSE(s.valid);
    ASSERT_TRUE(s.failure.has_value());
    EXPECT_EQ(s.failure->code, ErrorCode::CflViolation);
    EXPECT_EQ(s.failure->step, 0u);
}

TEST(RunViscous, DefaultRunShape) {
    const auto c = default_config();
    const auto s = run_viscous(c);
    ASSERT_TRUE(s.valid);
    EXPECT_EQ(s.times.size(), 501u);
    EXPECT_EQ(s.I.size(), 501u);
    EXPECT_EQ(s.snapshot_times.size(), 11u);
    EXPECT_DOUBLE_EQ(s.times.back(), 2.0);
    const auto u0 = SampledFunction::sample(c.grid, [&](double x) { return eval_u0(c.model, x); });
    EXPECT_DOUBLE_EQ(s.I[0], compute_I_eps(u0, c.epsilon, c.model));
    for (std::size_t k = 0; k < s.I.size(); ++k) {
        ASSERT_TRUE(std::isfinite(s.I[k]));
        EXPECT_GT(s.I[k], 0.0);
        EXPECT_LE(s.I[k], 1.0 + 0.5);
    }
    // the maximum point moves to the right
    EXPECT_GT(s.x_max.back(), 0.5);
}

TEST(RunViscous, DeterministicAcrossRuns) {
    const auto c = default_config(0.05);
    const auto a = run_viscous(c), b = run_viscous(c);
    EXPECT_EQ(a.I, b.I);
    EXPECT_EQ(a.x_max, b.x_max);
}
