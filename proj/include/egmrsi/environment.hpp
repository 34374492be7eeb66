#ifndef EGMRSI_ENVIRONMENT_HPP
#define EGMRSI_ENVIRONMENT_HPP

// Toy substrate: Gaussian class clusters per task family with scheduled
// distribution shifts, a two-layer tanh MLP predictor whose hidden
// pre-activation is offset by the agent's self-model vector h, and the
// bounded-bias external reward.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egmrsi/errors.hpp"
#include "egmrsi/metacognition.hpp"
#include "egmrsi/rng.hpp"

namespace egmrsi {

struct ScheduleEntry {
    std::size_t family = 0;
    std::size_t start_step = 0;

    friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

struct EnvConfig {
    std::size_t num_classes = 4;
    std::size_t d_h = 32;
    std::size_t d_o = 16;
    double r_max = 1.0;
    double delta_bias = 0.05;
    double reward_noise = 0.0;  // half-width of zero-mean uniform noise on r_ext
    std::vector<ScheduleEntry> task_schedule{{0, 0}, {1, 1000}, {2, 2000}, {3, 3000}};
    std::uint64_t seed = 42;
    double cluster_scale = 1.5;  // std of class-mean coordinates
    double shift_scale = 0.75;   // std of the per-family shift
    double noise_sd = 1.0;
    double novelty_bin = 1.5;  // byte-rendering bin width for novelty counting
    double rate_transmission = 0.05;
    double rate_cocreation = 0.02;

    std::size_t num_families() const {
        std::size_t f = 0;
        for (const auto& e : task_schedule) f = std::max(f, e.family + 1);
        return f;
    }

    /// Empty when valid, otherwise one reason per line.
    std::string violations() const {
        std::string out;
        if (num_classes < 2) out += "env.num_classes must be >= 2\n";
        if (num_classes > 255) out += "env.num_classes must be <= 255\n";
        if (d_h == 0 || d_o == 0) out += "env.d_h and env.d_o must be positive\n";
        if (!(delta_bias >= 0.0)) out += "env.delta_bias must be >= 0\n";
        if (!(r_max > delta_bias)) out += "env.r_max must exceed env.delta_bias\n";
        if (!(reward_noise >= 0.0) || !(delta_bias + reward_noise <= r_max)) {
            out += "env.reward_noise must be >= 0 with delta_bias + reward_noise <= r_max\n";
        }
        if (task_schedule.empty()) out += "env.schedule must list at least one family\n";
        else if (task_schedule.front().start_step != 0) out += "env.schedule must start at step 0\n";
        for (std::size_t i = 1; i < task_schedule.size(); ++i) {
            if (task_schedule[i].start_step < task_schedule[i - 1].start_step) {
                out += "env.schedule start steps must be non-decreasing\n";
            }
        }
        if (!(noise_sd > 0.0)) out += "env.noise_sd must be > 0\n";
        if (!(novelty_bin > 0.0)) out += "env.novelty_bin must be > 0\n";
        for (double r : {rate_transmission, rate_cocreation}) {
            if (!(r >= 0.0 && r <= 1.0)) out += "env event rates must lie in [0, 1]\n";
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Predictor

enum class UpdateRule : std::size_t { plain_gradient = 0, momentum = 1, adaptive_diagonal = 2 };
inline constexpr std::size_t kRuleCount = 3;

inline const char* rule_name(UpdateRule r) {
    switch (r) {
        case UpdateRule::plain_gradient: return "plain-gradient";
        case UpdateRule::momentum: return "momentum";
        case UpdateRule::adaptive_diagonal: return "adaptive-diagonal";
    }
    return "?";
}

struct TrainConfig {
    double lr = 0.3;
    double momentum = 0.9;
    double adaptive_decay = 0.99;
    double adaptive_lr = 0.01;
};

struct Forward {
    std::vector<double> hidden;  // tanh activations
    std::vector<double> probs;   // floored softmax
};

struct Sample {
    std::vector<double> obs;
    std::size_t label = 0;
};

/// obs (d_o) -> tanh(W1 obs + b1 + h) (d_h) -> softmax(W2 . + b2) (|Y|).
/// All parameters live in one flat vector [W1 | b1 | W2 | b2] so the update
/// rules can treat them uniformly.
class Predictor {
public:
    Predictor() = default;

    Predictor(std::size_t d_o, std::size_t d_h, std::size_t k) : d_o_(d_o), d_h_(d_h), k_(k) {
        theta_.assign(size(), 0.0);
        velocity_.assign(size(), 0.0);
        second_moment_.assign(size(), 0.0);
    }

    /// Small Gaussian initialization (std 1/sqrt(fan_in)) with zero biases.
    static Predictor random(std::size_t d_o, std::size_t d_h, std::size_t k, Rng& rng) {
        Predictor p(d_o, d_h, k);
        const double s1 = 1.0 / std::sqrt(static_cast<double>(d_o));
        const double s2 = 1.0 / std::sqrt(static_cast<double>(d_h));
        for (std::size_t i = 0; i < d_h * d_o; ++i) p.theta_[i] = rng.normal(0.0, s1);
        for (std::size_t i = 0; i < k * d_h; ++i) p.theta_[p.w2_offset() + i] = rng.normal(0.0, s2);
        return p;
    }

    std::size_t d_o() const noexcept { return d_o_; }
    std::size_t d_h() const noexcept { return d_h_; }
    std::size_t num_classes() const noexcept { return k_; }
    std::size_t size() const noexcept { return d_h_ * d_o_ + d_h_ + k_ * d_h_ + k_; }

    std::span<double> parameters() noexcept { return theta_; }
    std::span<const double> parameters() const noexcept { return theta_; }

    std::size_t b1_offset() const noexcept { return d_h_ * d_o_; }
    std::size_t w2_offset() const noexcept { return b1_offset() + d_h_; }
    std::size_t b2_offset() const noexcept { return w2_offset() + k_ * d_h_; }

    /// Pre-softmax pass; `h` may be empty (treated as zero).
    void hidden_into(std::span<const double> obs, std::span<const double> h, std::vector<double>& out) const {
        out.resize(d_h_);
        const double* w1 = theta_.data();
        const double* b1 = theta_.data() + b1_offset();
        for (std::size_t j = 0; j < d_h_; ++j) {
            double a = b1[j] + (h.empty() ? 0.0 : h[j]);
            const double* row = w1 + j * d_o_;
            for (std::size_t i = 0; i < d_o_; ++i) a += row[i] * obs[i];
            out[j] = std::tanh(a);
        }
    }

    void probs_into(std::span<const double> hidden, std::vector<double>& out) const {
        out.resize(k_);
        const double* w2 = theta_.data() + w2_offset();
        const double* b2 = theta_.data() + b2_offset();
        double max_logit = -1e300;
        for (std::size_t c = 0; c < k_; ++c) {
            double z = b2[c];
            const double* row = w2 + c * d_h_;
            for (std::size_t j = 0; j < d_h_; ++j) z += row[j] * hidden[j];
            out[c] = z;
            max_logit = std::max(max_logit, z);
        }
        double total = 0.0;
        for (double& z : out) {
            z = std::exp(z - max_logit);
            total += z;
        }
        double floored_total = 0.0;
        for (double& z : out) {
            z = std::max(z / total, kDistFloor);
            floored_total += z;
        }
        for (double& z : out) z /= floored_total;
    }

    Forward forward(std::span<const double> obs, std::span<const double> h = {}) const {
        Forward f;
        hidden_into(obs, h, f.hidden);
        probs_into(f.hidden, f.probs);
        return f;
    }

    /// Hot path of every capability evaluation; reuses per-thread buffers.
    std::size_t argmax(std::span<const double> obs, std::span<const double> h = {}) const {
        thread_local std::vector<double> hid, probs;
        hidden_into(obs, h, hid);
        probs_into(hid, probs);
        return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    }

    /// Mean cross-entropy over the batch; accumulates its parameter gradient
    /// into `grad` (resized and zeroed here).
    double loss_gradient(std::span<const Sample> batch, std::span<const double> h,
                         std::vector<double>& grad) const {
        grad.assign(size(), 0.0);
        double loss = 0.0;
        std::vector<double> hid, probs, dhid(d_h_);
        const double inv_n = 1.0 / static_cast<double>(batch.size());
        for (const Sample& s : batch) {
            hidden_into(s.obs, h, hid);
            probs_into(hid, probs);
            loss -= std::log(probs[s.label]);
            std::fill(dhid.begin(), dhid.end(), 0.0);
            for (std::size_t c = 0; c < k_; ++c) {
                const double dz = (probs[c] - (c == s.label ? 1.0 : 0.0)) * inv_n;
                const double* row = theta_.data() + w2_offset() + c * d_h_;
                double* grow = grad.data() + w2_offset() + c * d_h_;
                for (std::size_t j = 0; j < d_h_; ++j) {
                    grow[j] += dz * hid[j];
                    dhid[j] += dz * row[j];
                }
                grad[b2_offset() + c] += dz;
            }
            for (std::size_t j = 0; j < d_h_; ++j) {
                const double da = dhid[j] * (1.0 - hid[j] * hid[j]);
                double* grow = grad.data() + j * d_o_;
                for (std::size_t i = 0; i < d_o_; ++i) grow[i] += da * s.obs[i];
                grad[b1_offset() + j] += da;
            }
        }
        return loss * inv_n;
    }

    /// Gradient with respect to h of the mean probability assigned to the
    /// true label (a smooth surrogate of probe accuracy).
    std::vector<double> soft_accuracy_gradient(std::span<const Sample> probe, std::span<const double> h) const {
        std::vector<double> g(d_h_, 0.0), hid, probs;
        if (probe.empty()) return g;
        const double inv_n = 1.0 / static_cast<double>(probe.size());
        for (const Sample& s : probe) {
            hidden_into(s.obs, h, hid);
            probs_into(hid, probs);
            const double py = probs[s.label];
            for (std::size_t j = 0; j < d_h_; ++j) {
                // d p_y / d z_c = p_y (1[c=y] - p_c); back through W2 and tanh.
                double acc = 0.0;
                for (std::size_t c = 0; c < k_; ++c) {
                    const double dz = py * ((c == s.label ? 1.0 : 0.0) - probs[c]);
                    acc += dz * theta_[w2_offset() + c * d_h_ + j];
                }
                g[j] += acc * (1.0 - hid[j] * hid[j]) * inv_n;
            }
        }
        return g;
    }

    /// Mean probability of the true label over `probe`.
    double soft_accuracy(std::span<const Sample> probe, std::span<const double> h) const {
        double acc = 0.0;
        std::vector<double> hid, probs;
        for (const Sample& s : probe) {
            hidden_into(s.obs, h, hid);
            probs_into(hid, probs);
            acc += probs[s.label];
        }
        return probe.empty() ? 0.0 : acc / static_cast<double>(probe.size());
    }

    /// Optimizer slots are kept per rule; a rule swap continues from the
    /// current parameters without resetting anything.
    std::vector<double>& velocity() noexcept { return velocity_; }
    std::vector<double>& second_moment() noexcept { return second_moment_; }

    friend bool operator==(const Predictor&, const Predictor&) = default;

private:
    std::size_t d_o_ = 0;
    std::size_t d_h_ = 0;
    std::size_t k_ = 0;
    std::vector<double> theta_;
    std::vector<double> velocity_;
    std::vector<double> second_moment_;
};

struct TrainResult {
    bool applied = false;
    double loss = 0.0;
    std::string diagnostic;
};

/// One cross-entropy update under the selected rule. A non-finite loss or
/// gradient leaves the predictor untouched.
inline TrainResult train_step(Predictor& p, std::span<const Sample> batch, UpdateRule rule,
                              const TrainConfig& cfg, std::span<const double> h = {}) {
    if (batch.empty()) throw PreconditionError("train_step: empty batch");
    TrainResult r;
    std::vector<double> grad;
    r.loss = p.loss_gradient(batch, h, grad);
    bool finite = std::isfinite(r.loss);
    for (double g : grad) finite = finite && std::isfinite(g);
    if (!finite) {
        r.diagnostic = "non-finite loss or gradient; step skipped";
        return r;
    }
    std::span<double> theta = p.parameters();
    switch (rule) {
        case UpdateRule::plain_gradient:
            for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= cfg.lr * grad[i];
            break;
        case UpdateRule::momentum: {
            auto& vel = p.velocity();
            for (std::size_t i = 0; i < theta.size(); ++i) {
                vel[i] = cfg.momentum * vel[i] + grad[i];
                theta[i] -= cfg.lr * (1.0 - cfg.momentum) * vel[i];
            }
            break;
        }
        case UpdateRule::adaptive_diagonal: {
            auto& sq = p.second_moment();
            for (std::size_t i = 0; i < theta.size(); ++i) {
                sq[i] = cfg.adaptive_decay * sq[i] + (1.0 - cfg.adaptive_decay) * grad[i] * grad[i];
                theta[i] -= cfg.adaptive_lr * grad[i] / (std::sqrt(sq[i]) + 1e-8);
            }
            break;
        }
    }
    r.applied = true;
    return r;
}

// ---------------------------------------------------------------------------
// Environment

struct Observation {
    std::vector<double> obs;
    std::vector<std::uint8_t> bytes;  // coarse rendering used for novelty bits
    std::size_t label = 0;
    std::size_t family = 0;
    bool transmission_event = false;
    bool cocreation_event = false;
};

inline std::vector<std::uint8_t> boot_record(std::uint64_t seed) {
    const std::string s = "SYSTEM_BOOT|seed=" + std::to_string(seed) + "|prompt=<SELF_QUERY>";
    return {s.begin(), s.end()};
}

class Environment {
public:
    Environment() = default;

    /// Draws class means for every family and seeds the sampling streams.
    static Environment reset(const EnvConfig& cfg) {
        const std::string bad = cfg.violations();
        if (!bad.empty()) throw ConfigError(bad);
        Environment env;
        env.cfg_ = cfg;
        env.boot_ = boot_record(cfg.seed);
        env.sample_rng_ = Rng(cfg.seed, Stream::environment);
        env.event_rng_ = Rng(cfg.seed, Stream::scripted_events);
        Rng layout(cfg.seed, Stream::init);
        const std::size_t nf = cfg.num_families();
        std::vector<std::vector<double>> base(cfg.num_classes, std::vector<double>(cfg.d_o));
        for (auto& m : base)
            for (double& x : m) x = layout.normal(0.0, cfg.cluster_scale);
        env.means_.assign(nf, std::vector<std::vector<double>>(cfg.num_classes));
        for (std::size_t f = 0; f < nf; ++f) {
            std::vector<double> shift(cfg.d_o, 0.0);
            if (f > 0) {
                for (double& x : shift) x = layout.normal(0.0, cfg.shift_scale);
            }
            for (std::size_t k = 0; k < cfg.num_classes; ++k) {
                env.means_[f][k].resize(cfg.d_o);
                for (std::size_t i = 0; i < cfg.d_o; ++i) env.means_[f][k][i] = base[k][i] + shift[i];
            }
        }
        return env;
    }

    const EnvConfig& config() const noexcept { return cfg_; }
    const std::vector<std::uint8_t>& boot_bytes() const noexcept { return boot_; }
    std::size_t num_families() const noexcept { return means_.size(); }

    /// Families introduced at or before step t.
    std::vector<std::size_t> active_families(std::size_t t) const {
        std::vector<std::size_t> out;
        for (const auto& e : cfg_.task_schedule) {
            if (e.start_step <= t && std::find(out.begin(), out.end(), e.family) == out.end()) {
                out.push_back(e.family);
            }
        }
        return out;
    }

    /// One draw of class `label` from `family`.
    Sample draw_labeled(std::size_t family, std::size_t label, Rng& rng) const {
        Sample s;
        s.label = label;
        s.obs.resize(cfg_.d_o);
        const auto& mean = means_.at(family).at(label);
        for (std::size_t i = 0; i < cfg_.d_o; ++i) s.obs[i] = mean[i] + rng.normal(0.0, cfg_.noise_sd);
        return s;
    }

    /// One draw of class `label` from `family` displaced by `shift`.
    Sample draw_shifted(std::size_t family, std::size_t label, std::span<const double> shift, Rng& rng) const {
        Sample s = draw_labeled(family, label, rng);
        for (std::size_t i = 0; i < s.obs.size() && i < shift.size(); ++i) s.obs[i] += shift[i];
        return s;
    }

    /// One labeled draw from `family` with a uniform label.
    Sample draw(std::size_t family, Rng& rng) const {
        const auto label = static_cast<std::size_t>(rng.below(cfg_.num_classes));
        return draw_labeled(family, label, rng);
    }

    /// `n` draws balanced over classes (round-robin labels).
    std::vector<Sample> balanced_draws(std::size_t family, std::size_t n, Rng& rng) const {
        std::vector<Sample> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(draw_labeled(family, i % cfg_.num_classes, rng));
        return out;
    }

    std::vector<std::uint8_t> render_bytes(std::span<const double> obs) const {
        std::vector<std::uint8_t> out;
        out.reserve(obs.size());
        for (double x : obs) {
            const double level = std::floor(x / cfg_.novelty_bin) + 8.0;
            out.push_back(static_cast<std::uint8_t>(std::clamp(level, 0.0, 15.0)));
        }
        return out;
    }

    /// Observation for step t: a uniformly chosen introduced family, its
    /// class-cluster draw, and the scripted channel events.
    Observation step(std::size_t t) {
        const std::vector<std::size_t> fams = active_families(t);
        Observation o;
        o.family = fams[static_cast<std::size_t>(sample_rng_.below(fams.size()))];
        Sample s = draw(o.family, sample_rng_);
        o.obs = std::move(s.obs);
        o.label = s.label;
        o.bytes = render_bytes(o.obs);
        o.transmission_event = event_rng_.bernoulli(cfg_.rate_transmission);
        o.cocreation_event = event_rng_.bernoulli(cfg_.rate_cocreation);
        return o;
    }

    /// +delta for a correct prediction, -delta otherwise, plus optional
    /// zero-mean noise; clamped to [-r_max, r_max]. The conditional mean is
    /// therefore bounded by delta_bias.
    double external_reward(bool correct) {
        double r = correct ? cfg_.delta_bias : -cfg_.delta_bias;
        if (cfg_.reward_noise > 0.0) r += sample_rng_.uniform(-cfg_.reward_noise, cfg_.reward_noise);
        return std::clamp(r, -cfg_.r_max, cfg_.r_max);
    }

private:
    EnvConfig cfg_;
    std::vector<std::uint8_t> boot_;
    std::vector<std::vector<std::vector<double>>> means_;
    Rng sample_rng_{0};
    Rng event_rng_{0};
};

/// (hidden, floored predictive distribution) for one observation.
inline Forward predict(const Predictor& p, std::span<const double> obs, std::span<const double> h = {}) {
    return p.forward(obs, h);
}

}  // namespace egmrsi

#endif
