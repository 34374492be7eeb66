#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "egmrsi/errors.hpp"
#include "egmrsi/meaning.hpp"
#include "egmrsi/rng.hpp"

using namespace egmrsi;

namespace {

std::vector<LabeledPrediction> binary_batch(double q_true, std::size_t n) {
    std::vector<LabeledPrediction> out;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t y = i % 2;
        std::vector<double> d(2, 1.0 - q_true);
        d[y] = q_true;
        out.push_back({d, y});
    }
    return out;
}

}  // namespace

TEST(MiPlugin, PredictorEqualToMarginalGivesZero) {
    const std::vector<double> marginal{0.5, 0.5};
    const auto batch = binary_batch(0.5, 100);
    EXPECT_NEAR(mi_plugin(batch, marginal).value, 0.0, 1e-12);
}

TEST(MiPlugin, ConstantTrueLabelProbability) {
    const std::vector<double> marginal{0.5, 0.5};
    const auto batch = binary_batch(0.8, 100);
    const MiEstimate est = mi_plugin(batch, marginal);
    EXPECT_NEAR(est.value, std::log(0.8 / 0.5), 1e-9);
    EXPECT_NEAR(est.value, 0.470004, 1e-6);
    EXPECT_EQ(est.n_samples, 100u);
    EXPECT_NEAR(est.std_error, 0.0, 1e-9);
}

TEST(MiPlugin, PerfectPredictorReachesLogK) {
    const std::vector<double> marginal{0.5, 0.5};
    EXPECT_NEAR(mi_plugin(binary_batch(1.0, 10), marginal).value, std::log(2.0), 1e-8);
}

TEST(MiPlugin, NeverExceedsLogOfInverseMarginalFloor) {
    Rng rng(4);
    const std::vector<double> marginal{0.25, 0.25, 0.25, 0.25};
    std::vector<double> q;
    std::vector<std::size_t> labels;
    for (int i = 0; i < 500; ++i) {
        q.push_back(rng.uniform());
        labels.push_back(rng.below(4));
    }
    EXPECT_LE(mi_plugin_from_probs(q, labels, marginal).value, std::log(4.0) + 1e-12);
}

TEST(MiPlugin, RejectsEmptyOrMismatched) {
    const std::vector<double> marginal{0.5, 0.5};
    EXPECT_THROW(mi_plugin(std::vector<LabeledPrediction>{}, marginal), PreconditionError);
    const std::vector<double> q{0.5};
    const std::vector<std::size_t> y{0, 1};
    EXPECT_THROW(mi_plugin_from_probs(q, y, marginal), PreconditionError);
}

TEST(MiDifferential, GaussianPairMatchesClosedForm) {
    Rng rng(123);
    const double rho = 0.6;
    std::vector<std::vector<double>> h;
    std::vector<double> y;
    for (int i = 0; i < 10000; ++i) {
        const double a = rng.normal();
        h.push_back({a, rng.normal()});
        y.push_back(rho * a + std::sqrt(1.0 - rho * rho) * rng.normal());
    }
    const double truth = -0.5 * std::log(1.0 - rho * rho);
    EXPECT_NEAR(truth, 0.223144, 1e-6);
    // Estimator sd is about 0.01 at this N.
    EXPECT_NEAR(mi_differential(h, y).value, truth, 0.03);
}

TEST(MiDifferential, DeterministicTargetHitsCap) {
    Rng rng(1);
    std::vector<std::vector<double>> h;
    std::vector<double> y;
    for (int i = 0; i < 64; ++i) {
        h.push_back({rng.normal(), rng.normal()});
        y.push_back(h.back()[0]);
    }
    EXPECT_NEAR(mi_differential(h, y).value, kMiCap, 1e-9);
}

TEST(MiDifferential, NeedsEightPairs) {
    std::vector<std::vector<double>> h(7, std::vector<double>{1.0});
    std::vector<double> y(7, 0.0);
    EXPECT_THROW(mi_differential(h, y), PreconditionError);
}

TEST(Mdl, ConstantInputHasZeroDataCost) {
    const std::vector<double> zeros(64, 0.0);
    const ComplexityEstimate k = mdl_complexity(zeros);
    EXPECT_EQ(k.data_cost_bits, 0.0);
    EXPECT_FALSE(k.uniform_model);
    EXPECT_LT(k.bits, 64.0);
}

TEST(Mdl, UniformBytesCostAboutEightBitsEach) {
    Rng rng(8);
    std::vector<double> h(64);
    for (double& x : h) x = rng.uniform(-1.0, 1.0);
    const ComplexityEstimate k = mdl_complexity(h);
    EXPECT_NEAR(k.bits, 512.0, 51.2);
}

TEST(Mdl, EmptyInputIsRejected) {
    EXPECT_THROW(mdl_complexity(std::vector<double>{}), PreconditionError);
    EXPECT_THROW(mdl_code_length(std::vector<std::uint8_t>{}), PreconditionError);
}

TEST(Mdl, ChosenCodeIsNeverLongerThanUniform) {
    Rng rng(10);
    for (int i = 0; i < 200; ++i) {
        std::vector<std::uint8_t> b(1 + rng.below(300));
        const std::uint64_t alphabet = 1 + rng.below(256);
        for (auto& x : b) x = static_cast<std::uint8_t>(rng.below(alphabet));
        const ComplexityEstimate k = mdl_code_length(b);
        EXPECT_LE(k.bits, 1.0 + 8.0 * static_cast<double>(b.size()));
        EXPECT_DOUBLE_EQ(k.bits, k.model_cost_bits + k.data_cost_bits);
    }
}

TEST(Mdl, Order0CodeSatisfiesKraft) {
    Rng rng(12);
    for (int i = 0; i < 500; ++i) {
        std::vector<std::uint8_t> b(1 + rng.below(500));
        const std::uint64_t alphabet = 1 + rng.below(256);
        for (auto& x : b) x = static_cast<std::uint8_t>(rng.below(alphabet));
        ASSERT_LE(kraft_sum(order0_code_lengths(b)), 1.0 + 1e-12);
    }
}

TEST(Novelty, CountsDistinctUnseenFourGrams) {
    NoveltyCounter counter;
    const std::vector<std::uint8_t> obs{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    EXPECT_DOUBLE_EQ(novelty_bits(obs, counter), 56.0);
    EXPECT_DOUBLE_EQ(novelty_bits(obs, counter), 0.0);
    EXPECT_DOUBLE_EQ(counter.s_max, 56.0);
    const std::vector<std::uint8_t> repeated(10, 3);
    NoveltyCounter fresh;
    EXPECT_DOUBLE_EQ(novelty_bits(repeated, fresh), 8.0);
    const std::vector<std::uint8_t> short_obs{1, 2, 3};
    EXPECT_DOUBLE_EQ(novelty_bits(short_obs, fresh), 0.0);
}

TEST(MeaningDensity, WorkedExamples) {
    ComplexityEstimate k;
    k.bits = 9.0;
    EXPECT_NEAR(meaning_density(0.6931, k), 0.6931 / (9.0 * std::log(2.0) + 1.0), 1e-15);
    EXPECT_NEAR(meaning_density(0.6931, k), 0.095754, 1e-6);
    EXPECT_EQ(meaning_density(0.0, k), 0.0);
    EXPECT_EQ(meaning_density(-0.3, k), 0.0);
}

TEST(MeaningDensity, BelowLogKWheneverMiIsWithinItsBound) {
    Rng rng(13);
    for (int i = 0; i < 5000; ++i) {
        const double log_k = std::log(2.0 + static_cast<double>(rng.below(20)));
        ComplexityEstimate k;
        k.bits = rng.uniform(0.0, 1000.0);
        const double md = meaning_density(rng.uniform(-log_k, log_k), k);
        ASSERT_GE(md, 0.0);
        ASSERT_LT(md, log_k);
    }
}

TEST(Mce, WorkedExamples) {
    EXPECT_EQ(mce(0.4, 0.4, 10.0), 0.0);
    EXPECT_NEAR(mce(0.3, 0.2, 0.0), 0.1, 1e-12);
    EXPECT_NEAR(mce(0.5, 0.0, 56.0), 0.012558, 1e-6);
}

TEST(InformationBottleneck, IdentityChainHasZeroResidual) {
    std::vector<DiscreteTriple> s;
    for (std::size_t i = 0; i < 100; ++i) s.push_back({i % 2, i % 2, i % 2});
    EXPECT_LT(ib_residual(s, 2, 2, 2), 1e-9);
}

TEST(InformationBottleneck, ParityChainHasZeroResidual) {
    Rng rng(14);
    std::vector<DiscreteTriple> s;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t x = rng.below(4);
        s.push_back({x, x % 2, x % 2});
    }
    const IbTerms t = ib_terms(s, 4, 2, 2);
    EXPECT_LT(t.residual, 1e-9);
    EXPECT_NEAR(t.i_xy, t.i_xh, 1e-9);
}

TEST(InformationBottleneck, IndependentVariablesHaveSmallTerms) {
    Rng rng(15);
    std::vector<DiscreteTriple> s;
    for (int i = 0; i < 20000; ++i) s.push_back({rng.below(3), rng.below(3), rng.below(3)});
    const IbTerms t = ib_terms(s, 3, 3, 3);
    // Plug-in bias is about (cells - 1) / (2N) per term.
    EXPECT_LT(t.i_xy, 0.002);
    EXPECT_LT(t.i_xh, 0.002);
    EXPECT_LT(t.residual, 0.005);
}

TEST(InformationBottleneck, RejectsOversizedAlphabet) {
    const std::vector<DiscreteTriple> s{{0, 0, 0}};
    EXPECT_THROW(ib_terms(s, 17, 16, 16), PreconditionError);
}
