#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "egmrsi/emotion.hpp"
#include "egmrsi/errors.hpp"
#include "egmrsi/rng.hpp"

using namespace egmrsi;

namespace {

// Independent oracle: exp(exp(u)) - 1 in extended precision.
double potential_oracle(const Vec4& v, const Vec4& w) {
    long double u = 0;
    for (int i = 0; i < 4; ++i) u += static_cast<long double>(v[i]) * w[i];
    return static_cast<double>(std::exp(std::exp(u)) - 1.0L);
}

MetaVector random_box_point(Rng& rng, double s_cap = kDefaultSuccessCap) {
    return {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(0.0, s_cap)};
}

}  // namespace

TEST(EmotionPotential, MatchesClosedFormAtDefaultState) {
    const EmotionWeights w(1.2, -0.8, 0.6, 0.0);
    const MetaVector v{0.5, 1.0, 0.0, 0.0};
    EXPECT_NEAR(potential(v, w), 1.267620, 1e-6);
    EXPECT_NEAR(potential(v, w), potential_oracle(v.as_array(), w.as_array()), 1e-12);
}

TEST(EmotionPotential, ZeroArgumentGivesEMinusOne) {
    const EmotionWeights w;
    EXPECT_NEAR(potential(MetaVector{0, 0, 0, 0}, w), std::exp(1.0) - 1.0, 1e-15);
}

TEST(EmotionPotential, LargeArgumentThrowsButLogDomainStaysFinite) {
    const EmotionWeights w;
    const MetaVector v{0.0, 0.0, 0.0, 25.0};  // u = 10
    EXPECT_THROW(potential(v, w), OverflowError);
    EXPECT_NEAR(log_potential(v, w), 22026.4658, 1e-4);
}

TEST(EmotionPotential, PositiveAcrossTheBox) {
    Rng rng(7);
    const EmotionWeights w;
    for (int i = 0; i < 1000; ++i) {
        const MetaVector v = random_box_point(rng);
        const double u = w.dot(v);
        if (u + std::exp(u) >= kMaxInnerExp) continue;
        EXPECT_GT(potential(v, w), 0.0);
    }
}

TEST(EmotionWeights, RejectsWeightsOutsideStabilityRegion) {
    EXPECT_THROW(EmotionWeights(0.0, -0.8, 0.6, 0.4), ConfigError);
    EXPECT_THROW(EmotionWeights(1.2, 0.1, 0.6, 0.4), ConfigError);
    EXPECT_THROW(EmotionWeights(1.2, -0.8, -0.1, 0.4), ConfigError);
    EXPECT_THROW(EmotionWeights(1.2, -0.8, 0.6, 0.5), ConfigError);
    EXPECT_NO_THROW(EmotionWeights(1.2, -0.8, 0.6, 0.4));
}

TEST(EmotionGradient, MatchesClosedFormAtDefaultState) {
    const EmotionWeights w(1.2, -0.8, 0.6, 0.0);
    const Vec4 g = gradient(MetaVector{0.5, 1.0, 0.0, 0.0}, w);
    EXPECT_NEAR(g[0], 2.227884, 1e-6);
    EXPECT_NEAR(g[1], -1.485256, 1e-6);
    EXPECT_NEAR(g[2], 1.113942, 1e-6);
    EXPECT_EQ(g[3], 0.0);
    EXPECT_NEAR(l2_norm(g), 2.900055, 1e-6);
}

TEST(EmotionGradient, AgreesWithCentralFiniteDifferences) {
    Rng rng(11);
    const EmotionWeights w;
    const double h = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
        // Keep u moderate so the potential stays well conditioned.
        const MetaVector v = random_box_point(rng, 2.0);
        const Vec4 g = gradient(v, w);
        for (int i = 0; i < 4; ++i) {
            Vec4 plus = v.as_array(), minus = v.as_array();
            plus[i] += h;
            minus[i] -= h;
            const double fd =
                (potential_oracle(plus, w.as_array()) - potential_oracle(minus, w.as_array())) / (2.0 * h);
            EXPECT_NEAR(g[i], fd, 1e-6 * std::max(1.0, std::abs(fd))) << "trial " << trial << " coord " << i;
        }
    }
}

TEST(EmotionGradient, SignsFollowWeightSigns) {
    Rng rng(3);
    const EmotionWeights w;
    for (int i = 0; i < 200; ++i) {
        const Vec4 g = gradient(random_box_point(rng, 1.0), w);
        EXPECT_GT(g[0], 0.0);
        EXPECT_LT(g[1], 0.0);
        EXPECT_GT(g[2], 0.0);
        EXPECT_GT(g[3], 0.0);
    }
}

TEST(Clip, RescalesOntoBall) {
    const std::array<double, 2> g{3.0, 4.0};
    const auto c = clip(g, 1.0);
    EXPECT_NEAR(c[0], 0.6, 1e-15);
    EXPECT_NEAR(c[1], 0.8, 1e-15);
}

TEST(Clip, IdentityInsideBall) {
    const std::array<double, 2> g{0.3, 0.4};
    EXPECT_EQ(clip(g, 1.0), g);
    const std::vector<double> v{0.3, 0.4};
    EXPECT_EQ(clip(std::span<const double>(v), 1.0), v);
}

TEST(Clip, NormNeverExceedsThresholdAndDirectionIsKept) {
    Rng rng(5);
    for (int i = 0; i < 5000; ++i) {
        std::vector<double> g(1 + rng.below(16));
        for (double& x : g) x = rng.normal(0.0, std::exp(rng.uniform(-5.0, 10.0)));
        const double k = std::exp(rng.uniform(-6.0, 6.0));
        const auto c = clip(std::span<const double>(g), k);
        ASSERT_LE(l2_norm(c), k);
        const double ng = l2_norm(g), nc = l2_norm(c);
        if (ng > 0 && nc > 0) {
            double cosine = 0;
            for (std::size_t j = 0; j < g.size(); ++j) cosine += g[j] * c[j];
            EXPECT_NEAR(cosine / (ng * nc), 1.0, 1e-9);
        }
    }
}

TEST(ScalarDrive, IsInnerProduct) {
    EXPECT_NEAR(scalar_drive({1.0, 0, 0, 0}, {0.1, 0, 0, 0}), 0.1, 1e-15);
    EXPECT_NEAR(scalar_drive({0, -1.0, 0, 0}, {0, 0.1, 0, 0}), -0.1, 1e-15);
    EXPECT_EQ(scalar_drive({1, 2, 3, 4}, {0, 0, 0, 0}), 0.0);
}

TEST(CalibrateKmax, MedianPlusThreeMad) {
    const std::vector<double> a{1, 2, 3, 4, 100};
    EXPECT_DOUBLE_EQ(calibrate_kmax(a), 6.0);
    const std::vector<double> b{5, 5, 5, 5};
    EXPECT_DOUBLE_EQ(calibrate_kmax(b), 5.03);
    const std::vector<double> c{0.0};
    EXPECT_DOUBLE_EQ(calibrate_kmax(c), 0.03);
    EXPECT_THROW(calibrate_kmax(std::vector<double>{}), PreconditionError);
}

TEST(CalibrateKmax, EvenLengthMedianAveragesCentralPair) {
    EXPECT_DOUBLE_EQ(median({4, 1, 3, 2}), 2.5);
}

TEST(ClipState, CalibratesOnceWarmupIsFull) {
    ClipState s;
    s.warmup_len = 5;
    for (double x : {1.0, 2.0, 3.0, 4.0}) s.observe(x);
    EXPECT_FALSE(s.calibrated);
    EXPECT_DOUBLE_EQ(s.k_max, 10.0);
    s.observe(100.0);
    EXPECT_TRUE(s.calibrated);
    EXPECT_DOUBLE_EQ(s.k_max, 6.0);
    s.observe(1e6);
    EXPECT_DOUBLE_EQ(s.k_max, 6.0);
}

TEST(MetaVector, ClampedStaysInBox) {
    const MetaVector v = MetaVector{-1.0, 2.0, 0.5, 42.0}.clamped(10.0);
    EXPECT_EQ(v, (MetaVector{0.0, 1.0, 0.5, 10.0}));
}
