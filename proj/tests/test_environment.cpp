#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "egmrsi/environment.hpp"
#include "egmrsi/errors.hpp"
#include "egmrsi/rng.hpp"

using namespace egmrsi;

namespace {

std::vector<Sample> two_blob_batch(Rng& rng, std::size_t n, std::size_t d) {
    std::vector<Sample> out;
    for (std::size_t i = 0; i < n; ++i) {
        Sample s;
        s.label = i % 2;
        const double sign = s.label ? 1.0 : -1.0;
        for (std::size_t j = 0; j < d; ++j) s.obs.push_back(sign + rng.normal(0.0, 0.3));
        out.push_back(s);
    }
    return out;
}

double accuracy(const Predictor& p, const std::vector<Sample>& xs) {
    std::size_t hits = 0;
    for (const Sample& s : xs) hits += p.argmax(s.obs) == s.label ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(xs.size());
}

double mean_loss(const Predictor& p, const std::vector<Sample>& batch, const std::vector<double>& h) {
    double loss = 0;
    for (const Sample& s : batch) loss -= std::log(p.forward(s.obs, h).probs[s.label]);
    return loss / static_cast<double>(batch.size());
}

}  // namespace

TEST(Predictor, ZeroWeightsGiveUniformOutput) {
    const Predictor p(4, 3, 5);
    const std::vector<double> obs{1.0, -2.0, 0.5, 3.0};
    for (double q : p.forward(obs).probs) EXPECT_NEAR(q, 0.2, 1e-12);
}

TEST(Predictor, ForwardIsDeterministic) {
    Rng rng(1);
    const Predictor p = Predictor::random(6, 8, 3, rng);
    const std::vector<double> obs{0.1, 0.2, -0.3, 0.4, 0.5, -0.6};
    const Forward a = p.forward(obs), b = p.forward(obs);
    EXPECT_EQ(a.hidden, b.hidden);
    EXPECT_EQ(a.probs, b.probs);
}

TEST(Predictor, OutputIsFlooredDistribution) {
    Rng rng(2);
    Predictor p = Predictor::random(3, 4, 4, rng);
    for (double& x : p.parameters()) x *= 100.0;
    const std::vector<double> obs{5.0, -5.0, 5.0};
    double total = 0;
    for (double q : p.forward(obs).probs) {
        EXPECT_GE(q, kDistFloor * 0.5);
        total += q;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Predictor, LossGradientAgreesWithFiniteDifferences) {
    Rng rng(3);
    Predictor p = Predictor::random(4, 5, 3, rng);
    std::vector<Sample> batch;
    for (int i = 0; i < 6; ++i) {
        Sample s;
        for (int j = 0; j < 4; ++j) s.obs.push_back(rng.normal());
        s.label = rng.below(3);
        batch.push_back(s);
    }
    std::vector<double> h(5);
    for (double& x : h) x = rng.normal(0.0, 0.3);
    std::vector<double> grad;
    p.loss_gradient(batch, h, grad);
    const double eps = 1e-6;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double saved = p.parameters()[i];
        p.parameters()[i] = saved + eps;
        const double up = mean_loss(p, batch, h);
        p.parameters()[i] = saved - eps;
        const double down = mean_loss(p, batch, h);
        p.parameters()[i] = saved;
        EXPECT_NEAR(grad[i], (up - down) / (2 * eps), 1e-6) << "parameter " << i;
    }
}

TEST(Predictor, SoftAccuracyGradientAgreesWithFiniteDifferences) {
    Rng rng(4);
    const Predictor p = Predictor::random(4, 6, 3, rng);
    std::vector<Sample> probe;
    for (int i = 0; i < 20; ++i) {
        Sample s;
        for (int j = 0; j < 4; ++j) s.obs.push_back(rng.normal());
        s.label = rng.below(3);
        probe.push_back(s);
    }
    std::vector<double> h(6);
    for (double& x : h) x = rng.normal(0.0, 0.3);
    const std::vector<double> g = p.soft_accuracy_gradient(probe, h);
    const double eps = 1e-6;
    for (std::size_t j = 0; j < h.size(); ++j) {
        std::vector<double> up = h, down = h;
        up[j] += eps;
        down[j] -= eps;
        EXPECT_NEAR(g[j], (p.soft_accuracy(probe, up) - p.soft_accuracy(probe, down)) / (2 * eps), 1e-8);
    }
}

TEST(TrainStep, ZeroLearningRateLeavesParametersUnchanged) {
    Rng rng(5);
    Predictor p = Predictor::random(4, 4, 2, rng);
    const Predictor before = p;
    const auto batch = two_blob_batch(rng, 8, 4);
    TrainConfig cfg;
    cfg.lr = 0.0;
    const TrainResult r = train_step(p, batch, UpdateRule::plain_gradient, cfg);
    EXPECT_TRUE(r.applied);
    EXPECT_TRUE(std::equal(p.parameters().begin(), p.parameters().end(), before.parameters().begin()));
}

TEST(TrainStep, LearnsSeparableProblemUnderEveryRule) {
    for (std::size_t rule = 0; rule < kRuleCount; ++rule) {
        Rng rng(6);
        Predictor p = Predictor::random(4, 8, 2, rng);
        const TrainConfig cfg;
        for (int step = 0; step < 500; ++step) {
            const auto batch = two_blob_batch(rng, 8, 4);
            train_step(p, batch, static_cast<UpdateRule>(rule), cfg);
        }
        EXPECT_GE(accuracy(p, two_blob_batch(rng, 400, 4)), 0.95) << rule_name(static_cast<UpdateRule>(rule));
    }
}

TEST(TrainStep, RejectsEmptyBatch) {
    Predictor p(2, 2, 2);
    EXPECT_THROW(train_step(p, std::vector<Sample>{}, UpdateRule::plain_gradient, TrainConfig{}), PreconditionError);
}

TEST(TrainStep, NonFiniteInputLeavesPredictorUntouched) {
    Rng rng(7);
    Predictor p = Predictor::random(2, 3, 2, rng);
    const Predictor before = p;
    const std::vector<Sample> batch{{{std::nan(""), 1.0}, 0}};
    const TrainResult r = train_step(p, batch, UpdateRule::plain_gradient, TrainConfig{});
    EXPECT_FALSE(r.applied);
    EXPECT_TRUE(p == before);
}

TEST(Environment, SameSeedGivesIdenticalStreams) {
    EnvConfig cfg;
    Environment a = Environment::reset(cfg), b = Environment::reset(cfg);
    EXPECT_EQ(a.boot_bytes(), b.boot_bytes());
    EXPECT_EQ(a.boot_bytes(), boot_record(cfg.seed));
    for (std::size_t t = 0; t < 200; ++t) {
        const Observation x = a.step(t), y = b.step(t);
        ASSERT_EQ(x.obs, y.obs);
        ASSERT_EQ(x.label, y.label);
        ASSERT_EQ(x.transmission_event, y.transmission_event);
    }
    cfg.seed = 43;
    Environment c = Environment::reset(cfg);
    EXPECT_NE(c.boot_bytes(), a.boot_bytes());
    EXPECT_NE(c.step(0).obs, Environment::reset(EnvConfig{}).step(0).obs);
}

TEST(Environment, FamiliesFollowSchedule) {
    Environment env = Environment::reset(EnvConfig{});
    EXPECT_EQ(env.active_families(0), (std::vector<std::size_t>{0}));
    EXPECT_EQ(env.active_families(1500), (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(env.active_families(5000).size(), 4u);
    for (std::size_t t = 0; t < 1000; ++t) ASSERT_EQ(env.step(t).family, 0u);
}

TEST(Environment, ExternalRewardIsBoundedWithBoundedMean) {
    EnvConfig cfg;
    cfg.reward_noise = 0.5;
    Environment env = Environment::reset(cfg);
    double sum = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double r = env.external_reward(i % 2 == 0);
        ASSERT_LE(std::abs(r), cfg.r_max);
        sum += r;
    }
    EXPECT_LE(std::abs(sum / n), cfg.delta_bias);
}

TEST(Environment, RenderedBytesUseSixteenLevels) {
    Environment env = Environment::reset(EnvConfig{});
    for (std::size_t t = 0; t < 100; ++t) {
        const Observation o = env.step(t);
        ASSERT_EQ(o.bytes.size(), o.obs.size());
        for (auto b : o.bytes) ASSERT_LE(b, 15);
    }
}

TEST(Environment, RejectsInvalidConfig) {
    EnvConfig cfg;
    cfg.num_classes = 1;
    EXPECT_THROW(Environment::reset(cfg), ConfigError);
    cfg = EnvConfig{};
    cfg.r_max = 0.01;
    EXPECT_THROW(Environment::reset(cfg), ConfigError);
    cfg = EnvConfig{};
    cfg.task_schedule = {{0, 5}};
    EXPECT_THROW(Environment::reset(cfg), ConfigError);
}

TEST(Environment, BalancedDrawsCycleLabels) {
    Environment env = Environment::reset(EnvConfig{});
    Rng rng(8);
    const auto xs = env.balanced_draws(0, 12, rng);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(xs[i].label, i % 4);
}
