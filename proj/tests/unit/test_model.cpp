#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hjc/model.hpp"
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

const Grid1D kGrid(-5.0, 15.0, 2001);

}  // namespace

TEST(Model, ResolveDefaults) {
    const ModelSpec m = resolve_model("satexp");
    EXPECT_EQ(m.family(), Family::satexp);
    EXPECT_EQ(m.I_max(), 1.0);
    EXPECT_EQ(m.u0_shift(), 0.0);
    EXPECT_EQ(m, ModelSpec{});
    EXPECT_EQ(m.domain_hint(), std::make_pair(-5.0, 15.0));
}

TEST(Model, ResolveRejectsUnknownsAndRanges) {
    expect_error(ErrorCode::UnknownFamily, [] { resolve_model("logistic"); });
    expect_error(ErrorCode::ParamOutOfRange, [] { resolve_model("satexp", {{"speed", 1.0}}); });
    expect_error(ErrorCode::ParamOutOfRange, [] { resolve_model("satexp", {{"I_max", 0.0}}); });
    expect_error(ErrorCode::ParamOutOfRange, [] { resolve_model("satexp", {{"I_max", NAN}}); });
    expect_error(ErrorCode::ParamOutOfRange, [] { resolve_model("cubicsat", {{"u0_shift", 2.0}}); });
}

TEST(Model, SatexpValues) {
    const ModelSpec m = resolve_model("satexp");
    EXPECT_NEAR(eval_b(m, 1.0), oracle::kOneMinusInvE, 1e-15);
    EXPECT_NEAR(eval_R(m, 1.0, 0.5), oracle::kR_1_half, 1e-15);
    EXPECT_EQ(eval_R(m, -1.0, 0.5), -0.5);
    EXPECT_EQ(eval_R(m, 3.0, 0.0), eval_b(m, 3.0));
    EXPECT_NEAR(eval_u0(m, 1.0), -0.5, 1e-15);
    EXPECT_EQ(eval_u0(m, 0.0), 0.0);
    EXPECT_NEAR(eval_b(m, std::cbrt(2.0)), 1.0 - oracle::kExpMinus2, 1e-15);
}

TEST(Model, CubicsatValues) {
    const ModelSpec m = resolve_model("cubicsat");
    EXPECT_NEAR(eval_b(m, 1.0), 0.5, 1e-15);
    EXPECT_NEAR(eval_b_prime(m, 1.0), 0.75, 1e-15);
    EXPECT_NEAR(eval_R(m, 1.0, 0.25), 0.25, 1e-15);
}

TEST(Model, NegativeMultiplierRejected) {
    const ModelSpec m;
    expect_error(ErrorCode::NegativeI, [&] { eval_R(m, 1.0, -0.1); });
    expect_error(ErrorCode::NegativeI, [&] { eval_Q(m, -1e-12); });
    expect_error(ErrorCode::NegativeI, [&] { eval_R_x(m, 1.0, -1.0); });
}

TEST(Model, DerivativesMatchFiniteDifferences) {
    for (const char* family : {"satexp", "cubicsat"}) {
        const ModelSpec m = resolve_model(family);
        const double h = 1e-5;
        for (double x : {0.3, 0.9, 1.4, 2.5, 4.0}) {
            EXPECT_NEAR(eval_b_prime(m, x), (eval_b(m, x + h) - eval_b(m, x - h)) / (2 * h), 1e-8) << family << " x=" << x;
            EXPECT_NEAR(eval_b_second(m, x), (eval_b_prime(m, x + h) - eval_b_prime(m, x - h)) / (2 * h), 1e-7)
                << family << " x=" << x;
        }
        for (double x : {-2.0, -0.5, 0.1, 0.7, 3.0}) {
            EXPECT_NEAR(eval_u0_prime(m, x), (eval_u0(m, x + h) - eval_u0(m, x - h)) / (2 * h), 1e-8);
            EXPECT_NEAR(eval_u0_second(m, x), (eval_u0_prime(m, x + h) - eval_u0_prime(m, x - h)) / (2 * h), 1e-7);
        }
    }
}

TEST(Model, ZeroLevel) {
    const ModelSpec m;
    EXPECT_EQ(zero_level_x(m, 0.0), 0.0);
    EXPECT_NEAR(zero_level_x(m, 0.5), oracle::kZeroLevelHalf, 1e-9);
    EXPECT_NEAR(zero_level_x(resolve_model("cubicsat"), 0.5), 1.0, 1e-9);
    expect_error(ErrorCode::Saturated, [&] { zero_level_x(m, 1.0); });
}

TEST(Model, PsiIsOneOnPlateauAndZeroFarAway) {
    const ModelSpec m;
    EXPECT_EQ(eval_psi(m, psi_plateau.first), 1.0);
    EXPECT_EQ(eval_psi(m, psi_plateau.second), 1.0);
    EXPECT_EQ(eval_psi(m, 3.0), 1.0);
    EXPECT_EQ(eval_psi(m, -3.5), 0.0);
    EXPECT_EQ(eval_psi(m, 9.5), 0.0);
    const double mid = eval_psi(m, -2.5);
    EXPECT_GT(mid, 0.0);
    EXPECT_LT(mid, 1.0);
}

TEST(Assumptions, DefaultFamiliesPass) {
    for (const char* family : {"satexp", "cubicsat"}) {
        const auto rep = check_assumptions_default(resolve_model(family), kGrid);
        for (const auto& e : rep.entries) EXPECT_NE(e.status, CheckStatus::fail) << family << " " << e.id << ": " << e.note;
        EXPECT_TRUE(rep.all_pass());
    }
}

TEST(Assumptions, ReportHasEightIds) {
    const auto rep = check_assumptions_default(ModelSpec{}, kGrid);
    for (int k = 1; k <= 8; ++k) EXPECT_EQ(rep.entries[k - 1].id, "A" + std::to_string(k));
}

TEST(Assumptions, SmallIMaxFailsA4) {
    const auto rep = check_assumptions_default(resolve_model("satexp", {{"I_max", 0.5}}), kGrid);
    EXPECT_FALSE(rep.all_pass());
    const auto& a4 = rep.at("A4");
    EXPECT_EQ(a4.status, CheckStatus::fail);
    ASSERT_TRUE(a4.witness.has_value());
    EXPECT_EQ(a4.witness->I, 0.5);
    EXPECT_GT(a4.sampled_bound, 0.4);
}

TEST(Assumptions, ShiftedInitialDatumFailsA8AtOrigin) {
    const auto rep = check_assumptions_default(resolve_model("satexp", {{"u0_shift", 0.1}}), kGrid);
    const auto& a8 = rep.at("A8");
    EXPECT_EQ(a8.status, CheckStatus::fail);
    ASSERT_TRUE(a8.witness.has_value());
    ASSERT_TRUE(a8.witness->x.has_value());
    EXPECT_EQ(*a8.witness->x, 0.0);
    for (const char* id : {"A1", "A2", "A3", "A4", "A5", "A6", "A7"}) EXPECT_EQ(rep.at(id).status, CheckStatus::pass) << id;
}

TEST(Assumptions, OracleFamilyFails) {
    const auto rep = check_assumptions_default(resolve_model("freequad"), Grid1D(-5.0, 5.0, 401));
    EXPECT_FALSE(rep.all_pass());
    EXPECT_EQ(rep.at("A3").status, CheckStatus::fail);
}

TEST(Assumptions, LeftBranchNotApplicableWithoutNegativeSamples) {
    const ModelSpec m;
    const std::vector<double> xs{0.0, 0.5, 1.0, 2.0};
    const std::vector<double> Is{0.0, 0.5, 1.0};
    const auto rep = check_assumptions(m, xs, Is);
    EXPECT_EQ(rep.at("A1").status, CheckStatus::not_applicable);
}

TEST(Assumptions, NegativeSampleRejected) {
    const std::vector<double> xs{0.0, 1.0};
    const std::vector<double> Is{-0.1, 0.5};
    expect_error(ErrorCode::NegativeI, [&] { check_assumptions(ModelSpec{}, xs, Is); });
}

TEST(Assumptions, CurvatureBounds) {
    const ModelSpec m;
    // u0'' peaks in magnitude at the origin, where it equals -2
    EXPECT_NEAR(initial_curvature_bound(m), 2.0, 1e-12);
    const double c1 = reaction_curvature_bound(m);
    EXPECT_GT(c1, 2.0);
    EXPECT_LT(c1, 4.0);
}
