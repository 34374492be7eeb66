#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "egmrsi/environment.hpp"
#include "egmrsi/errors.hpp"
#include "egmrsi/rng.hpp"
#include "egmrsi/self_modification.hpp"

using namespace egmrsi;

TEST(Trigger, FiresOnPositiveDriveAboveThreshold) {
    EXPECT_TRUE(rsi_trigger(0.5, 0.2, 0.1).fired);
    EXPECT_FALSE(rsi_trigger(-0.1, 0.2, 0.1).fired);
    EXPECT_FALSE(rsi_trigger(0.5, 0.05, 0.1).fired);
    EXPECT_FALSE(rsi_trigger(0.0, 0.2, 0.1).fired);
    EXPECT_FALSE(rsi_trigger(0.5, 0.1, 0.1).fired);
    EXPECT_THROW(rsi_trigger(0.5, 0.2, -1.0), PreconditionError);
}

TEST(Trigger, FiredIsExactlyTheConjunction) {
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double eps = rng.normal(), info = rng.uniform(-0.5, 1.5), gamma = rng.uniform(0.0, 1.0);
        const TriggerDecision d = rsi_trigger(eps, info, gamma, rng.below(3));
        ASSERT_EQ(d.fired, eps > 0.0 && info > gamma);
        ASSERT_TRUE(!d.phase_shift || d.fired);
    }
}

TEST(PhaseShift, ThresholdShrinksWithDrive) {
    EXPECT_NEAR(phase_shift_threshold(0.1, 1.0), 0.025, 1e-15);
    EXPECT_NEAR(phase_shift_threshold(0.1, 0.5), 0.1 / 2.25, 1e-15);
    EXPECT_NEAR(phase_shift_threshold(0.1, 0.5), 0.044444, 1e-6);
    EXPECT_EQ(phase_shift_threshold(0.1, -3.0), 0.1);
}

TEST(PhaseShift, BlockedByCooldown) {
    EXPECT_TRUE(rsi_trigger(0.5, 0.2, 0.1, 0).phase_shift);
    EXPECT_FALSE(rsi_trigger(0.5, 0.2, 0.1, 3).phase_shift);
    EXPECT_TRUE(rsi_trigger(0.5, 0.2, 0.1, 3).fired);
}

TEST(ApplyModification, StepsAlongUnitDirection) {
    std::vector<double> h{0.0, 0.0, 0.0};
    const std::vector<double> d{1.0, 0.0, 0.0};
    ModState mod;
    mod.step_scale = 0.1;
    mod.lipschitz_cap = 4.0;  // cap 0.2 at eps 0.5
    const ModResult r = apply_modification(h, d, 0.5, ModMode::plain, mod);
    ASSERT_TRUE(r.applied);
    EXPECT_NEAR(r.step_cap, 0.2, 1e-15);
    EXPECT_NEAR(h[0], 0.05, 1e-15);
    EXPECT_EQ(h[1], 0.0);
    EXPECT_EQ(mod.update_rule_id, 0u);
}

TEST(ApplyModification, StepNormNeverExceedsLipschitzCap) {
    Rng rng(2);
    for (int i = 0; i < 2000; ++i) {
        std::vector<double> h(8), d(8);
        for (double& x : d) x = rng.normal(0.0, 10.0);
        ModState mod;
        mod.step_scale = rng.uniform(0.01, 2.0);
        mod.lipschitz_cap = rng.uniform(1e-4, 1.0);
        mod.update_rule_id = rng.below(3);
        const double eps = std::exp(rng.uniform(-5.0, 5.0));
        const ModResult r = apply_modification(h, d, eps, ModMode::plain, mod);
        ASSERT_TRUE(r.applied);
        ASSERT_LE(l2_norm(h), mod.lipschitz_cap * mod.step_scale * eps);
        ASSERT_DOUBLE_EQ(r.step_norm, l2_norm(h));
    }
}

TEST(ApplyModification, NonPositiveDriveIsNoOp) {
    std::vector<double> h{0.3, -0.2};
    const std::vector<double> d{1.0, 1.0};
    ModState mod;
    for (double eps : {0.0, -0.5}) {
        const ModResult r = apply_modification(h, d, eps, ModMode::phase_shift, mod);
        EXPECT_FALSE(r.applied);
        EXPECT_FALSE(r.diagnostic.empty());
    }
    EXPECT_EQ(h, (std::vector<double>{0.3, -0.2}));
    EXPECT_EQ(mod.cooldown, 0u);
}

TEST(ApplyModification, DegenerateDirectionIsSkipped) {
    std::vector<double> h{0.0, 0.0};
    ModState mod;
    EXPECT_FALSE(apply_modification(h, std::vector<double>{0.0, 0.0}, 1.0, ModMode::plain, mod).applied);
    EXPECT_FALSE(apply_modification(h, std::vector<double>{std::nan(""), 1.0}, 1.0, ModMode::plain, mod).applied);
    EXPECT_THROW(apply_modification(h, std::vector<double>{1.0}, 1.0, ModMode::plain, mod), PreconditionError);
}

TEST(ApplyModification, PhaseShiftCyclesRuleAndStartsCooldown) {
    std::vector<double> h{0.0};
    const std::vector<double> d{1.0};
    ModState mod;
    mod.update_rule_id = 2;
    apply_modification(h, d, 0.5, ModMode::phase_shift, mod);
    EXPECT_EQ(mod.update_rule_id, 0u);
    EXPECT_EQ(mod.cooldown, kPhaseShiftCooldown);
    apply_modification(h, d, 0.5, ModMode::phase_shift, mod);
    EXPECT_EQ(mod.rule(), UpdateRule::momentum);
}

TEST(RuleDirection, IsUnitNorm) {
    Rng rng(3);
    ModState mod;
    for (std::size_t rule = 0; rule < kRuleCount; ++rule) {
        mod.update_rule_id = rule;
        for (int i = 0; i < 50; ++i) {
            std::vector<double> a(5);
            for (double& x : a) x = rng.normal();
            EXPECT_NEAR(l2_norm(rule_direction(a, mod)), 1.0, 1e-12);
        }
    }
}

TEST(Capability, CountsCorrectPredictions) {
    std::vector<Sample> probe;
    for (std::size_t i = 0; i < 256; ++i) probe.push_back({{static_cast<double>(i % 4)}, i % 4});
    EXPECT_DOUBLE_EQ(capability([](std::span<const double> o) { return static_cast<std::size_t>(o[0]); }, probe), 1.0);
    EXPECT_DOUBLE_EQ(capability([](std::span<const double>) { return std::size_t{2}; }, probe), 0.25);
    EXPECT_DOUBLE_EQ(capability([](std::span<const double>) { return std::size_t{0}; }, std::span<const Sample>{}), 0.0);
}

TEST(Capability, RandomGuesserNearChance) {
    Rng rng(4);
    std::vector<Sample> probe;
    for (std::size_t i = 0; i < 256; ++i) probe.push_back({{0.0}, i % 4});
    const double c = capability([&](std::span<const double>) { return rng.below(4); }, probe);
    EXPECT_NEAR(c, 0.25, 3.0 * std::sqrt(0.25 * 0.75 / 256.0));
}

TEST(AbilityGain, ComparesAgainstLowerBound) {
    EXPECT_TRUE(ability_gain_check(0.5, 0.6, 0.5, 0.1));
    EXPECT_TRUE(ability_gain_check(0.5, 0.5, 0.0, 1.0));
    EXPECT_FALSE(ability_gain_check(0.6, 0.5, 0.1, 0.1));
    EXPECT_TRUE(ability_gain_check(0.5, 0.49, 0.0, 1.0));
}

TEST(GammaEstimate, ZeroWeightModelIsFlat) {
    const Predictor p(3, 4, 2);
    CapabilityProbe probe;
    for (int i = 0; i < 10; ++i) probe.samples.push_back({{1.0, 2.0, 3.0}, static_cast<std::size_t>(i % 2)});
    Rng rng(5);
    const std::vector<double> h(4, 0.0);
    const GammaEstimate g = estimate_gamma(p, probe, h, 0.001, 0.5, 20, rng);
    EXPECT_EQ(g.beta_hat, 0.0);
    EXPECT_EQ(g.gamma, 0.0);
    EXPECT_THROW(estimate_gamma(p, probe, h, 0.0, 0.5, 20, rng), PreconditionError);
}

TEST(GammaEstimate, BoundsObservedSoftAccuracyChange) {
    Rng rng(6);
    const Predictor p = Predictor::random(4, 6, 3, rng);
    CapabilityProbe probe;
    for (int i = 0; i < 64; ++i) {
        Sample s;
        for (int j = 0; j < 4; ++j) s.obs.push_back(rng.normal());
        s.label = rng.below(3);
        probe.samples.push_back(s);
    }
    const std::vector<double> h(6, 0.0);
    const GammaEstimate g = estimate_gamma(p, probe, h, 0.01, 0.5, 100, rng);
    EXPECT_GT(g.beta_hat, 0.0);
    EXPECT_NEAR(g.gamma, g.beta_hat / 0.01, 1e-12);
}
