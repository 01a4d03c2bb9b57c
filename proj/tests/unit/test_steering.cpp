#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "safeplan/steering.hpp"

using namespace safeplan;

namespace {

std::vector<BarrierFunction> circle(double r)
{
    BarrierFunction bf;
    bf.beta[feature_slot(0, 0)] = -r * r;
    bf.beta[feature_slot(2, 0)] = 1.0;
    bf.beta[feature_slot(0, 2)] = 1.0;
    bf.window = {-r - 1, -r - 1, r + 1, r + 1};
    return {bf};
}

}  // namespace

TEST(Extend, Examples)
{
    const auto a = extend({0, 0}, 0.0, 0.2);
    EXPECT_NEAR(a.x, 0.2, 1e-15);
    EXPECT_NEAR(a.y, 0.0, 1e-15);
    const auto b = extend({1, 1}, std::numbers::pi / 2, 0.2);
    EXPECT_NEAR(b.x, 1.0, 1e-15);
    EXPECT_NEAR(b.y, 1.2, 1e-15);
    for (double th = -3.0; th < 3.2; th += 0.37)
        EXPECT_NEAR(distance(extend({0.3, -2}, th, 0.7), {0.3, -2}), 0.7, 1e-12);
}

TEST(AngleUpdate, Examples)
{
    EXPECT_EQ(angle_update(0.0, 1.3, 1.0), 1.3);
    EXPECT_NEAR(angle_update(0.2, std::numbers::pi, 1.0), -std::numbers::pi + 0.2, 1e-12);
    EXPECT_NEAR(angle_update(0.5, 0.0, 1.0), 0.5, 1e-15);
    const double w = angle_update(2 * std::numbers::pi, 0.1, 3.0);
    EXPECT_GT(w, -std::numbers::pi);
    EXPECT_LE(w, std::numbers::pi);
    EXPECT_NEAR(w, 0.1, 1e-9);
}

TEST(CbfSteer, FreeSpaceIsStraight)
{
    const SafetyFilter f{{}, {}, {}, 1.0};
    const auto out = cbf_steer(f, {0, 0, 0}, 0.0, {4, 1.0, 0.2}, 0.0);
    ASSERT_TRUE(out.feasible);
    ASSERT_EQ(out.chain.size(), 4u);
    EXPECT_EQ(out.steps_completed, 4);
    EXPECT_EQ(out.stop, SteerStop::Completed);
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(out.chain[k].x1, 0.2 * (k + 1), 1e-12);
        EXPECT_EQ(out.chain[k].x2, 0.0);
        EXPECT_EQ(out.chain[k].theta, 0.0);
    }
}

TEST(CbfSteer, SteeringHeadingOverridesAnchorHeading)
{
    const SafetyFilter f{{}, {}, {}, 1.0};
    const auto out = cbf_steer(f, {1, 1, 2.0}, std::numbers::pi / 2, {2, 0.5, 0.4}, 0.0);
    ASSERT_EQ(out.chain.size(), 2u);
    EXPECT_NEAR(out.chain[1].x1, 1.0, 1e-12);
    EXPECT_NEAR(out.chain[1].x2, 1.4, 1e-12);
}

TEST(CbfSteer, DeflectsAroundCircle)
{
    // critically damped gains; underdamped ones let h overshoot below zero
    const auto set = circle(1.0);
    const SafetyFilter f{set, {1.0, 2.0}, {-1.0, 1.0}, 1.0};
    const SteerParams p{4, 0.25, 0.2};
    RobotState s{-1.9, 0.6, 0.0};
    double min_h = INFINITY;
    bool deflected = false;
    for (int big = 0; big < 12; ++big) {
        const auto out = cbf_steer(f, s, s.theta, p, 0.0);
        ASSERT_TRUE(out.feasible) << "big step " << big;
        RobotState prev = s;
        for (const auto& c : out.chain) {
            EXPECT_NEAR(distance(c.position(), prev.position()), p.step_length(), 1e-12);
            min_h = std::min(min_h, eval_h(set[0], c.x1, c.x2));
            deflected = deflected || std::abs(c.theta) > 0.05;
            prev = c;
        }
        s = out.chain.back();
    }
    EXPECT_TRUE(deflected);
    EXPECT_GE(min_h, 0.0);
    EXPECT_GT(s.x1, 0.0);  // got past the obstacle
}

TEST(CbfSteer, TightBoundsTruncate)
{
    const auto set = circle(1.0);
    const SafetyFilter f{set, {4.0, 2.0}, {-0.01, 0.01}, 1.0};
    const auto out = cbf_steer(f, {-1.15, 0.0, 0.0}, 0.0, {4, 1.0, 0.2}, 0.0);
    EXPECT_FALSE(out.feasible);
    EXPECT_LT(out.steps_completed, 4);
    EXPECT_EQ(out.chain.size(), static_cast<std::size_t>(out.steps_completed));
    EXPECT_EQ(out.stop, SteerStop::QpInfeasible);
}

TEST(CbfSteer, AuditTruncatesUnsafeDiscreteStep)
{
    // loose gains let a coarse step land inside the obstacle; the audit cuts it
    const auto set = circle(1.0);
    const SafetyFilter f{set, {40.0, 0.5}, {-1.0, 1.0}, 1.0};
    const auto out = cbf_steer(f, {-1.5, 0.0, 0.0}, 0.0, {4, 1.0, 0.3}, 0.0);
    for (const auto& c : out.chain)
        EXPECT_GE(min_active_h(set, c.position(), 1.0), -kSafetyAuditTolerance);
    if (!out.feasible)
        EXPECT_LT(out.steps_completed, 4);
}

TEST(CbfSteer, Deterministic)
{
    const auto set = circle(1.0);
    const SafetyFilter f{set, {4.0, 2.0}, {-1.0, 1.0}, 1.0};
    const auto a = cbf_steer(f, {-1.8, 0.3, 0.1}, -0.2, {4, 0.5, 0.2}, 0.1);
    const auto b = cbf_steer(f, {-1.8, 0.3, 0.1}, -0.2, {4, 0.5, 0.2}, 0.1);
    EXPECT_EQ(a.chain, b.chain);
    EXPECT_EQ(a.feasible, b.feasible);
}
