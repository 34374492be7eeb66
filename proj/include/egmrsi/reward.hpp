#ifndef EGMRSI_REWARD_HPP
#define EGMRSI_REWARD_HPP

#include <array>
#include <cmath>
#include <string>

#include "egmrsi/errors.hpp"

namespace egmrsi {

inline constexpr std::size_t kSpikeChannels = 5;

/// Indices of the five pleasure channels.
enum class Channel : std::size_t {
    transmission_success = 0,
    misunderstanding_repair = 1,
    self_error_recognition = 2,
    semantic_discovery = 3,
    co_creation = 4,
};

struct EventFlags {
    std::array<bool, kSpikeChannels> channel{};
    bool misinformation = false;

    bool& operator[](Channel c) { return channel[static_cast<std::size_t>(c)]; }
    bool operator[](Channel c) const { return channel[static_cast<std::size_t>(c)]; }
};

struct ChannelWeights {
    std::array<double, kSpikeChannels> xi_spike{0.2, 0.2, 0.2, 0.2, 0.2};
    double xi_penalty = 0.5;
    double xi_dg = 0.1;
    double xi_bl = 0.3;
    double xi_md = 0.7;
    double xi_mce = 1.0;
    double alpha = 0.1;
    double p_b = 0.05;
    double lambda_dg = 0.8;
};

/// Itemized per-step reward. `total` is the left-to-right sum of the parts
/// in declaration order, so re-adding them reproduces it bit for bit.
struct RewardBreakdown {
    double base_f = 0.0;
    double spikes = 0.0;
    double penalty = 0.0;
    double dg_bonus = 0.0;
    double baseline_bonus = 0.0;
    double md_bonus = 0.0;
    double mce_bonus = 0.0;
    double external_mixed = 0.0;
    double total = 0.0;

    double sum_of_parts() const noexcept {
        return base_f + spikes + penalty + dg_bonus + baseline_bonus + md_bonus + mce_bonus + external_mixed;
    }
};

struct EligibilityTrace {
    double z = 0.0;
    double z_prev = 0.0;
};

struct SpikeResult {
    double spikes = 0.0;
    double penalty = 0.0;
};

inline SpikeResult event_spikes(const EventFlags& flags, const ChannelWeights& w) {
    SpikeResult r;
    for (std::size_t k = 0; k < kSpikeChannels; ++k) {
        if (flags.channel[k]) r.spikes += w.xi_spike[k];
    }
    if (flags.misinformation) r.penalty = -w.xi_penalty;
    return r;
}

struct DgResult {
    EligibilityTrace trace;
    double bonus = 0.0;
};

/// z' = lambda_dg * z + f_now; bonus = xi_dg * (z' - z).
inline DgResult dg_update(const EligibilityTrace& trace, double f_now, const ChannelWeights& w) {
    if (!(w.lambda_dg >= 0.0 && w.lambda_dg < 1.0)) {
        throw PreconditionError("dg_update: lambda_dg must lie in [0, 1)");
    }
    DgResult r;
    r.trace.z_prev = trace.z;
    r.trace.z = w.lambda_dg * trace.z + f_now;
    r.bonus = w.xi_dg * (r.trace.z - trace.z);
    return r;
}

/// xi_bl when the Bernoulli(p_b) draw succeeds.
inline double baseline_bonus(double rng_draw, const ChannelWeights& w) {
    return rng_draw < w.p_b ? w.xi_bl : 0.0;
}

struct MeaningBonus {
    double md_bonus = 0.0;
    double mce_bonus = 0.0;
};

inline MeaningBonus md_mce_bonus(double md, double mce, const ChannelWeights& w) {
    return {w.xi_md * std::tanh(md), w.xi_mce * std::tanh(mce)};
}

struct RewardParts {
    double spikes = 0.0;
    double penalty = 0.0;
    double dg_bonus = 0.0;
    double baseline_bonus = 0.0;
    double md_bonus = 0.0;
    double mce_bonus = 0.0;
};

/// R~ = f + bonuses + alpha * r_ext. Rejects |r_ext| > r_max.
inline RewardBreakdown compose(double base_f, const RewardParts& parts, double r_ext,
                               const ChannelWeights& w, double r_max) {
    if (!(std::abs(r_ext) <= r_max)) {
        throw BoundsViolation("external reward " + std::to_string(r_ext) + " exceeds R_max = " +
                              std::to_string(r_max));
    }
    RewardBreakdown b;
    b.base_f = base_f;
    b.spikes = parts.spikes;
    b.penalty = parts.penalty;
    b.dg_bonus = parts.dg_bonus;
    b.baseline_bonus = parts.baseline_bonus;
    b.md_bonus = parts.md_bonus;
    b.mce_bonus = parts.mce_bonus;
    b.external_mixed = w.alpha * r_ext;
    b.total = b.sum_of_parts();
    return b;
}

}  // namespace egmrsi

#endif
