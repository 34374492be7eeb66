#ifndef EGMRSI_SELF_MODIFICATION_HPP
#define EGMRSI_SELF_MODIFICATION_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "egmrsi/emotion.hpp"
#include "egmrsi/environment.hpp"
#include "egmrsi/errors.hpp"
#include "egmrsi/rng.hpp"

namespace egmrsi {

inline constexpr std::size_t kPhaseShiftCooldown = 50;
inline constexpr double kDefaultGainTolerance = 0.02;

/// Gamma_alg = gamma / (1 + eps)^2; a negative drive counts as 0.
inline double phase_shift_threshold(double gamma, double epsilon_t) {
    const double e = std::max(epsilon_t, 0.0);
    return gamma / ((1.0 + e) * (1.0 + e));
}

struct TriggerDecision {
    double epsilon_t = 0.0;
    double i_pred = 0.0;
    double gamma = 0.0;
    double gamma_alg = 0.0;
    bool fired = false;
    bool phase_shift = false;
};

/// fired iff eps > 0 and I_pred > gamma. A phase shift additionally needs
/// I_pred > gamma_alg and an expired cooldown; since gamma_alg <= gamma for
/// eps >= 0 it is gated behind the full trigger.
inline TriggerDecision rsi_trigger(double epsilon_t, double i_pred, double gamma, std::size_t cooldown = 0) {
    if (!(gamma >= 0.0)) throw PreconditionError("rsi_trigger: gamma must be >= 0");
    TriggerDecision d;
    d.epsilon_t = epsilon_t;
    d.i_pred = i_pred;
    d.gamma = gamma;
    d.gamma_alg = phase_shift_threshold(gamma, epsilon_t);
    d.fired = epsilon_t > 0.0 && i_pred > gamma;
    d.phase_shift = d.fired && i_pred > d.gamma_alg && cooldown == 0;
    return d;
}

enum class ModMode { plain, phase_shift };

/// State of the self-modification operator. The direction slots mirror the
/// predictor's update rules but act on h.
struct ModState {
    double step_scale = 0.1;     // eta_M
    double lipschitz_cap = 0.2;  // L_M
    std::size_t update_rule_id = 0;
    std::size_t cooldown = 0;
    std::vector<double> direction_velocity;
    std::vector<double> direction_second_moment;

    UpdateRule rule() const noexcept { return static_cast<UpdateRule>(update_rule_id % kRuleCount); }

    std::string violations() const {
        std::string out;
        if (!(step_scale > 0.0)) out += "mod.eta_m must be > 0\n";
        if (!(lipschitz_cap > 0.0)) out += "mod.lipschitz_cap must be > 0\n";
        return out;
    }
};

struct ModResult {
    bool applied = false;
    double step_norm = 0.0;
    double step_cap = 0.0;
    std::string diagnostic;
};

/// Turns the raw surrogate gradient into the active rule's ascent direction
/// (unit norm). Returns an empty vector when the direction is undefined.
inline std::vector<double> rule_direction(std::span<const double> ascent, ModState& mod) {
    const std::size_t n = ascent.size();
    std::vector<double> d(ascent.begin(), ascent.end());
    switch (mod.rule()) {
        case UpdateRule::plain_gradient:
            break;
        case UpdateRule::momentum:
            mod.direction_velocity.resize(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                mod.direction_velocity[i] = 0.9 * mod.direction_velocity[i] + ascent[i];
                d[i] = mod.direction_velocity[i];
            }
            break;
        case UpdateRule::adaptive_diagonal:
            mod.direction_second_moment.resize(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                auto& sq = mod.direction_second_moment[i];
                sq = 0.9 * sq + 0.1 * ascent[i] * ascent[i];
                d[i] = ascent[i] / (std::sqrt(sq) + 1e-12);
            }
            break;
    }
    const double norm = l2_norm(d);
    if (!std::isfinite(norm) || norm == 0.0) return {};
    for (double& x : d) x /= norm;
    return d;
}

/// h' = h + clip(eta_M * eps * d(h), L_M * eta_M * eps). Phase-shift mode
/// also advances the update rule cyclically and starts the cooldown.
/// eps <= 0 or a non-finite direction leaves h and `mod` untouched.
inline ModResult apply_modification(std::vector<double>& h, std::span<const double> ascent, double epsilon_t,
                                    ModMode mode, ModState& mod) {
    ModResult r;
    if (!(epsilon_t > 0.0)) {
        r.diagnostic = "precondition: epsilon_t must be > 0; no-op";
        return r;
    }
    if (ascent.size() != h.size()) throw PreconditionError("apply_modification: direction size mismatch");
    for (double x : ascent) {
        if (!std::isfinite(x)) {
            r.diagnostic = "non-finite direction; step skipped";
            return r;
        }
    }
    ModState trial = mod;
    const std::vector<double> d = rule_direction(ascent, trial);
    if (d.empty()) {
        r.diagnostic = "zero or non-finite direction; step skipped";
        return r;
    }
    std::vector<double> delta(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) delta[i] = mod.step_scale * epsilon_t * d[i];
    r.step_cap = mod.lipschitz_cap * mod.step_scale * epsilon_t;
    delta = clip(delta, r.step_cap);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] += delta[i];
    r.step_norm = l2_norm(delta);
    r.applied = true;
    if (mode == ModMode::phase_shift) {
        trial.update_rule_id = (trial.update_rule_id + 1) % kRuleCount;
        trial.cooldown = kPhaseShiftCooldown;
    }
    mod = std::move(trial);
    return r;
}

/// Frozen labeled probe set.
struct CapabilityProbe {
    std::vector<Sample> samples;
    double beta_cap = 0.0;
};

/// Fraction of probe samples whose predicted label matches. `predict_label`
/// maps an observation to a class index.
template <class PredictLabel>
double capability(PredictLabel&& predict_label, std::span<const Sample> probe) {
    if (probe.empty()) return 0.0;
    std::size_t hits = 0;
    for (const Sample& s : probe) {
        if (static_cast<std::size_t>(predict_label(std::span<const double>(s.obs))) == s.label) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(probe.size());
}

inline double capability(const Predictor& p, const CapabilityProbe& probe, std::span<const double> h = {}) {
    return capability([&](std::span<const double> obs) { return p.argmax(obs, h); },
                      std::span<const Sample>(probe.samples));
}

/// c_after - c_before >= gamma_lb * eps - tol.
inline bool ability_gain_check(double c_before, double c_after, double epsilon_t, double gamma_lb,
                               double tol = kDefaultGainTolerance) {
    return c_after - c_before >= gamma_lb * epsilon_t - tol;
}

struct GammaEstimate {
    double beta_hat = 0.0;
    double gamma = 0.0;
};

/// beta_hat = max over `trials` random perturbations of radius r of
/// |C(h + delta) - C(h)| / r on the soft-accuracy surrogate; gamma = beta_hat / L_M.
inline GammaEstimate estimate_gamma(const Predictor& p, const CapabilityProbe& probe, std::span<const double> h,
                                    double lipschitz_cap, double radius, std::size_t trials, Rng& rng) {
    if (!(radius > 0.0) || !(lipschitz_cap > 0.0) || trials == 0) {
        throw PreconditionError("estimate_gamma: radius, L_M and trial count must be positive");
    }
    const std::span<const Sample> samples(probe.samples);
    const double base = p.soft_accuracy(samples, h);
    GammaEstimate g;
    std::vector<double> pert(h.begin(), h.end());
    std::vector<double> dir(h.size());
    for (std::size_t k = 0; k < trials; ++k) {
        for (double& x : dir) x = rng.normal();
        const double norm = l2_norm(dir);
        if (norm == 0.0) continue;
        for (std::size_t i = 0; i < h.size(); ++i) pert[i] = h[i] + radius * dir[i] / norm;
        const double moved = p.soft_accuracy(samples, pert);
        g.beta_hat = std::max(g.beta_hat, std::abs(moved - base) / radius);
    }
    g.gamma = g.beta_hat / lipschitz_cap;
    return g;
}

}  // namespace egmrsi

#endif
