#ifndef EGMRSI_GOALS_HPP
#define EGMRSI_GOALS_HPP

// Goal ledger: Bernoulli-gated generation of fresh goals, Monte-Carlo
// improvement scoring, utility veto, NOISE buffering and replay after each
// self-modification. Ordered containers keep iteration deterministic.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "egmrsi/errors.hpp"

namespace egmrsi {

struct Goal {
    std::size_t family = 0;
    std::size_t difficulty = 0;
    std::uint32_t params = 0;

    friend auto operator<=>(const Goal&, const Goal&) = default;
};

inline std::string to_string(const Goal& g) {
    return "(" + std::to_string(g.family) + "," + std::to_string(g.difficulty) + "," + std::to_string(g.params) + ")";
}

struct GoalConfig {
    double p_gen = 0.1;
    double gamma_goal = 0.01;
    std::size_t k_rollouts = 4;
    std::size_t max_batch = 3;
    /// NOISE goals re-scored per replay, least recently replayed first.
    std::size_t replay_budget = 4;
    /// Utility per family id; the last entry is the forbidden family by default.
    std::vector<double> utility;

    std::string violations() const {
        std::string out;
        if (!(p_gen > 0.0 && p_gen <= 1.0)) out += "goals.p_gen must lie in (0, 1]\n";
        if (k_rollouts == 0) out += "goals.k_rollouts must be >= 1\n";
        if (max_batch == 0) out += "goals.max_batch must be >= 1\n";
        if (replay_budget == 0) out += "goals.replay_budget must be >= 1\n";
        if (!std::isfinite(gamma_goal)) out += "goals.gamma_goal must be finite\n";
        return out;
    }
};

struct NoiseEntry {
    std::size_t rejected_at = 0;
    double last_score = 0.0;
    std::size_t last_replayed = 0;
};

/// One non-empty candidate event.
struct InjectionBatch {
    std::size_t step = 0;
    std::vector<Goal> goals;
    bool admissible = false;  // holds at least one non-negative-utility goal
};

struct GoalLedger {
    GoalConfig cfg;
    std::set<Goal> active;
    std::map<Goal, NoiseEntry> noise;
    std::set<Goal> discarded;
    std::vector<InjectionBatch> batches;
    std::size_t sampled = 0;  // goals ever emitted by generate()
    std::size_t promotions = 0;

    double utility(std::size_t family) const {
        if (family >= cfg.utility.size()) {
            throw PreconditionError("goal utility table has no entry for family " + std::to_string(family));
        }
        return cfg.utility[family];
    }

    /// Never proposed before: in none of active, noise, discarded.
    bool fresh(const Goal& g) const { return !active.contains(g) && !noise.contains(g) && !discarded.contains(g); }

    /// Every sampled goal sits in exactly one of active, noise, discarded.
    bool conserved() const { return sampled == active.size() + noise.size() + discarded.size(); }

    /// Admissible batches with at least one goal now active.
    std::size_t batches_with_acceptance() const {
        std::size_t n = 0;
        for (const auto& b : batches) {
            if (!b.admissible) continue;
            for (const Goal& g : b.goals) {
                if (active.contains(g)) {
                    ++n;
                    break;
                }
            }
        }
        return n;
    }

    std::size_t admissible_batches() const {
        std::size_t n = 0;
        for (const auto& b : batches) n += b.admissible ? 1 : 0;
        return n;
    }
};

/// Empty unless rng_draw < p_gen; otherwise the fresh, de-duplicated subset
/// of what `propose()` returns (a std::vector<Goal>).
template <class Propose>
std::vector<Goal> generate(double rng_draw, const GoalLedger& ledger, Propose&& propose) {
    const std::string bad = ledger.cfg.violations();
    if (!bad.empty()) throw PreconditionError(bad);
    if (!(rng_draw < ledger.cfg.p_gen)) return {};
    std::vector<Goal> out;
    std::set<Goal> seen;
    for (const Goal& g : propose()) {
        if (ledger.fresh(g) && seen.insert(g).second) out.push_back(g);
    }
    return out;
}

struct ScoreResult {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t rollouts = 0;
};

/// Mean of `rollout_gain(k)` for k in [0, k_rollouts), with its standard
/// error. Each call must return C_after(tau) - C_before(tau) for one preview.
template <class RolloutGain>
ScoreResult score(std::size_t k_rollouts, RolloutGain&& rollout_gain) {
    if (k_rollouts == 0) throw PreconditionError("score: k_rollouts must be >= 1");
    std::vector<double> gains;
    gains.reserve(k_rollouts);
    for (std::size_t k = 0; k < k_rollouts; ++k) gains.push_back(static_cast<double>(rollout_gain(k)));
    ScoreResult r;
    r.rollouts = k_rollouts;
    for (double g : gains) r.mean += g;
    r.mean /= static_cast<double>(k_rollouts);
    if (k_rollouts > 1) {
        double ss = 0.0;
        for (double g : gains) ss += (g - r.mean) * (g - r.mean);
        r.std_error = std::sqrt(ss / static_cast<double>(k_rollouts - 1) / static_cast<double>(k_rollouts));
    }
    return r;
}

struct FilterResult {
    std::vector<Goal> accepted;
    std::vector<Goal> noised;
    std::vector<Goal> discarded;
};

/// Accept when g >= gamma_goal and U >= 0. Negative utility discards
/// permanently whatever the score; a low score with U >= 0 buffers as NOISE.
/// Records the candidate set as one injection batch.
inline FilterResult filter_accept(const std::vector<Goal>& cands, const std::vector<double>& scores,
                                  GoalLedger& ledger, std::size_t step) {
    if (cands.size() != scores.size()) throw PreconditionError("filter_accept: one score per candidate required");
    for (const Goal& g : cands) (void)ledger.utility(g.family);
    FilterResult r;
    if (cands.empty()) return r;
    InjectionBatch batch;
    batch.step = step;
    batch.goals = cands;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        const Goal& g = cands[i];
        ++ledger.sampled;
        if (ledger.utility(g.family) < 0.0) {
            ledger.discarded.insert(g);
            r.discarded.push_back(g);
            continue;
        }
        batch.admissible = true;
        if (scores[i] >= ledger.cfg.gamma_goal) {
            ledger.active.insert(g);
            r.accepted.push_back(g);
        } else {
            ledger.noise[g] = NoiseEntry{step, scores[i], step};
            r.noised.push_back(g);
        }
    }
    ledger.batches.push_back(std::move(batch));
    return r;
}

/// Re-scores up to replay_budget NOISE goals with `rescore(goal)`, least
/// recently replayed first (ties by goal order), so every buffered goal is
/// revisited within ceil(|noise| / budget) replays. Promotes those at or
/// above gamma_goal; refreshes last_score and last_replayed for the rest.
template <class Rescore>
std::vector<Goal> replay_noise(GoalLedger& ledger, std::size_t step, Rescore&& rescore) {
    std::vector<std::pair<std::size_t, Goal>> order;
    order.reserve(ledger.noise.size());
    for (const auto& [g, entry] : ledger.noise) order.emplace_back(entry.last_replayed, g);
    const std::size_t n = std::min(order.size(), ledger.cfg.replay_budget);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end());
    std::vector<Goal> promoted;
    for (std::size_t i = 0; i < n; ++i) {
        const Goal& goal = order[i].second;
        const double g = static_cast<double>(rescore(goal));
        if (g >= ledger.cfg.gamma_goal) {
            ledger.active.insert(goal);
            ledger.noise.erase(goal);
            promoted.push_back(goal);
        } else {
            NoiseEntry& e = ledger.noise.at(goal);
            e.last_score = g;
            e.last_replayed = step;
        }
    }
    ledger.promotions += promoted.size();
    return promoted;
}

}  // namespace egmrsi

#endif
