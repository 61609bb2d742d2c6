#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <cobrah/model.hpp>

#include "support.hpp"

using namespace cobrah;

namespace {

DynamicsSpec example_dynamics() { return DynamicsSpec::from_primitives(0.6, 0.6, 0.5, 0.5, 0.3, 0.3); }

}  // namespace

TEST(MeanReward, LogisticOfZero) { EXPECT_DOUBLE_EQ(mean_reward({}, 0.0, {0.0, 0.0}), 0.5); }

TEST(MeanReward, HandEvaluated) {
    // 1 / (1 + exp(-1.5))
    EXPECT_NEAR(mean_reward({}, 0.5, {1.0, 0.0}), 0.8175744761936437, 1e-12);
}

TEST(MeanReward, ThetaCancelsAdverse) { EXPECT_DOUBLE_EQ(mean_reward({}, 1.0, {0.0, 1.0}), 0.5); }

TEST(MeanReward, MonotoneInDefaultModel) {
    const RewardModelSpec m;
    EXPECT_LT(mean_reward(m, 0.2, {0.5, 0.5}), mean_reward(m, 0.3, {0.5, 0.5}));
    EXPECT_LT(mean_reward(m, 0.2, {0.4, 0.5}), mean_reward(m, 0.2, {0.5, 0.5}));
    EXPECT_GT(mean_reward(m, 0.2, {0.5, 0.4}), mean_reward(m, 0.2, {0.5, 0.5}));
}

TEST(MeanReward, LipschitzBoundHoldsByFiniteDifferences) {
    const RewardModelSpec m;
    const double bound = m.lipschitz_bound();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        const double t = u(rng), b = u(rng), a = u(rng);
        const double gt = (mean_reward(m, t + h, {b, a}) - mean_reward(m, t - h, {b, a})) / (2 * h);
        const double gb = (mean_reward(m, t, {b + h, a}) - mean_reward(m, t, {b - h, a})) / (2 * h);
        const double ga = (mean_reward(m, t, {b, a + h}) - mean_reward(m, t, {b, a - h})) / (2 * h);
        EXPECT_LE(std::sqrt(gt * gt + gb * gb + ga * ga), bound + 1e-6);
    }
}

TEST(Dynamics, PrimitivesMapToSignedCoefficients) {
    const auto d = example_dynamics();
    EXPECT_DOUBLE_EQ(d.q1, -0.8);
    EXPECT_NEAR(d.q2, 0.2, 1e-15);
}

TEST(Dynamics, VisitClampsBeneficialFactor) {
    const auto x = step_dynamics(example_dynamics(), {0.5, 0.5}, 1);
    EXPECT_DOUBLE_EQ(x.b, 0.0);
    EXPECT_NEAR(x.a, 0.8, 1e-12);
}

TEST(Dynamics, RestingDrift) {
    const auto x = step_dynamics(example_dynamics(), {0.5, 0.5}, 0);
    EXPECT_NEAR(x.b, 0.6, 1e-12);
    EXPECT_NEAR(x.a, 0.6, 1e-12);
}

TEST(Dynamics, IdentityLeavesStateUnchanged) {
    const StateVec x{0.3, 0.7};
    EXPECT_EQ(step_dynamics(DynamicsSpec::identity(), x, 0), x);
}

TEST(Dynamics, StabilityCheck) {
    EXPECT_TRUE(example_dynamics().is_stable());
    DynamicsSpec d;
    d.d2 = 1.2;
    EXPECT_FALSE(d.is_stable());
}

TEST(Dynamics, StaysInBoxAndClampIsIdempotent) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const auto dyn = testing_support::random_primitive_dynamics(rng);
        const StateVec x{u(rng), u(rng)};
        const auto next = step_dynamics(dyn, x, static_cast<Action>(i % 2));
        EXPECT_TRUE(next.in_box());
        EXPECT_EQ(clamp_state(next), next);
    }
}

TEST(Dynamics, NonExpansiveForContractingDecay) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const auto dyn = testing_support::random_primitive_dynamics(rng);
        const StateVec x{u(rng), u(rng)}, xp{u(rng), u(rng)};
        const Action y = static_cast<Action>(i % 2);
        const auto fx = step_dynamics(dyn, x, y), fxp = step_dynamics(dyn, xp, y);
        const double before = std::hypot(x.b - xp.b, x.a - xp.a);
        const double after = std::hypot(fx.b - fxp.b, fx.a - fxp.a);
        EXPECT_LE(after, before + 1e-15);
    }
}

TEST(Rollout, EmptyActionsRejected) {
    ArmSpec arm;
    EXPECT_THROW(rollout(arm, {}), Error);
    try {
        rollout(arm, {});
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyHistory);
    }
}

TEST(Rollout, IdentityDynamicsIsConstant) {
    ArmSpec arm;
    arm.x0 = {0.25, 0.75};
    const std::vector<Action> y{1, 0, 1, 1};
    for (const auto& x : rollout(arm, y)) EXPECT_EQ(x, arm.x0);
}

TEST(Rollout, SingleStepAndRecomposition) {
    ArmSpec arm;
    arm.dynamics = example_dynamics();
    arm.x0 = {0.9, 0.1};
    const std::vector<Action> one{1};
    EXPECT_EQ(rollout(arm, one).front(), step_dynamics(arm.dynamics, arm.x0, 1));

    const std::vector<Action> three{0, 1, 0};
    const auto states = rollout(arm, three);
    ASSERT_EQ(states.size(), 3u);
    // Round k+2 is scored at the state after the first k+1 actions.
    const std::vector<Action> four{0, 1, 0, 1};
    const auto oracle = testing_support::oracle::means(arm.dynamics, arm.reward_model,
                                                       {arm.theta, arm.x0.b, arm.x0.a}, four);
    StateVec x = arm.x0;
    for (std::size_t k = 0; k < 3; ++k) {
        x = step_dynamics(arm.dynamics, x, three[k]);
        EXPECT_EQ(states[k], x);
        EXPECT_NEAR(mean_reward(arm.reward_model, arm.theta, states[k]), oracle[k + 1], 1e-15);
    }
}

TEST(SampleReward, DegenerateMeans) {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_EQ(sample_reward(rng, 0.0), 0);
        EXPECT_EQ(sample_reward(rng, 1.0), 1);
    }
}

TEST(SampleReward, InvalidMeanRejected) {
    Rng rng(1);
    EXPECT_THROW(sample_reward(rng, 1.5), Error);
    EXPECT_THROW(sample_reward(rng, -0.1), Error);
    EXPECT_THROW(sample_reward(rng, std::nan("")), Error);
}

TEST(SampleReward, LawOfLargeNumbers) {
    Rng rng(2024);
    int sum = 0;
    for (int i = 0; i < 10000; ++i) sum += sample_reward(rng, 0.5);
    EXPECT_NEAR(sum / 10000.0, 0.5, 0.02);
}

TEST(SampleReward, SameSeedSameDraws) {
    Rng a(make_stream(7, 1, 2, StreamPurpose::Reward)), b(make_stream(7, 1, 2, StreamPurpose::Reward));
    for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_reward(a, 0.3), sample_reward(b, 0.3));
}

TEST(SuperArm, SortedUniqueAndCapacity) {
    SuperArm s{3, 1, 3};
    EXPECT_EQ(s.members(), (std::vector<std::size_t>{1, 3}));
    EXPECT_TRUE(s.fits(4, 2));
    EXPECT_FALSE(s.fits(3, 2));
    EXPECT_FALSE(s.fits(4, 1));
    EXPECT_EQ(s.actions(4), (std::vector<Action>{0, 1, 0, 1}));
}
