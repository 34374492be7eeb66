#ifndef EGMRSI_GOAL_WORLD_HPP
#define EGMRSI_GOAL_WORLD_HPP

// Binds the goal ledger to the toy environment. A goal (family, difficulty,
// params) is a variant of an environment family: `params` seeds a unit
// displacement direction, `difficulty` indexes its magnitude. The goal's
// probe set is a frozen balanced draw from that variant; its capability is
// argmax accuracy on it.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "egmrsi/config.hpp"
#include "egmrsi/emotion.hpp"
#include "egmrsi/environment.hpp"
#include "egmrsi/goals.hpp"
#include "egmrsi/rng.hpp"
#include "egmrsi/self_modification.hpp"

namespace egmrsi {

/// Everything a preview needs to know about the live agent.
struct AgentView {
    const Predictor* predictor = nullptr;
    std::span<const double> h;
    const ModState* mod = nullptr;
    double epsilon = 0.0;  // drive already capped at k_max
    std::size_t step = 0;
};

class GoalWorld {
public:
    GoalWorld() = default;

    GoalWorld(const Environment& env, const RunConfig& cfg)
        : env_(&env), cfg_(cfg.goal_world), train_(cfg.train), seed_(cfg.seed),
          num_goal_families_(cfg.utility_table().size()) {}

    std::size_t num_families() const noexcept { return num_goal_families_; }
    std::size_t levels() const noexcept { return cfg_.shift_levels.size(); }

    /// Environment family that generates goal family `family`. Families past
    /// the environment's (e.g. the forbidden one) wrap around.
    std::size_t generator(std::size_t family) const {
        if (family >= num_goal_families_) {
            throw ConfigError("goal family " + std::to_string(family) + " has no probe generator");
        }
        return family % env_->num_families();
    }

    std::vector<double> displacement(const Goal& g) const {
        const double magnitude = cfg_.shift_levels.at(std::min(g.difficulty, levels() - 1));
        Rng rng(mix_seed(static_cast<std::uint64_t>(g.params) ^ (static_cast<std::uint64_t>(g.family) << 40)));
        std::vector<double> dir(env_->config().d_o);
        for (double& x : dir) x = rng.normal();
        const double norm = l2_norm(dir);
        for (double& x : dir) x = norm > 0.0 ? magnitude * x / norm : 0.0;
        return dir;
    }

    /// Frozen probe set of the goal (cached).
    const std::vector<Sample>& probe(const Goal& g) {
        auto it = probes_.find(g);
        if (it != probes_.end()) return it->second;
        const std::vector<double> shift = displacement(g);
        Rng rng(mix_seed(seed_ ^ mix_seed(static_cast<std::uint64_t>(g.params) + 0x51ULL * (g.family + 1) +
                                          0x9E37ULL * (g.difficulty + 1))),
                Stream::probe);
        std::vector<Sample> s;
        s.reserve(cfg_.subset_size);
        const std::size_t k = env_->config().num_classes;
        for (std::size_t i = 0; i < cfg_.subset_size; ++i) {
            s.push_back(env_->draw_shifted(generator(g.family), i % k, shift, rng));
        }
        return probes_.emplace(g, std::move(s)).first->second;
    }

    double capability(const Predictor& p, std::span<const double> h, const Goal& g) {
        const auto& samples = probe(g);
        return egmrsi::capability([&](std::span<const double> obs) { return p.argmax(obs, h); },
                                  std::span<const Sample>(samples));
    }

    /// Easiest difficulty whose capability is below the target; nullopt when
    /// every level already clears it (no headroom to score).
    std::optional<std::size_t> pick_difficulty(const Predictor& p, std::span<const double> h, std::size_t family,
                                               std::uint32_t params) {
        for (std::size_t d = 0; d < levels(); ++d) {
            const Goal g{family, d, params};
            if (capability(p, h, g) < cfg_.target) return d;
            forget(g);
        }
        return std::nullopt;
    }

    /// Preview k: a capped self-modification step on h along the goal's
    /// soft-accuracy ascent direction, then one update of the current
    /// learning rule, both on fresh draws from the goal's variant. Returns
    /// the previewed capability; live state is never touched. epsilon <= 0
    /// previews the unchanged state.
    double preview(const AgentView& a, const Goal& g, std::size_t k) {
        if (!(a.epsilon > 0.0)) return capability(*a.predictor, a.h, g);
        Predictor p = *a.predictor;
        std::vector<double> h(a.h.begin(), a.h.end());
        Rng rng(mix_seed(seed_ ^ mix_seed(a.step * 977 + k * 31 + g.params)), Stream::modification);
        const std::vector<double> shift = displacement(g);
        std::vector<Sample> batch;
        const std::size_t n_cls = env_->config().num_classes;
        for (std::size_t i = 0; i < cfg_.practice_batch; ++i) {
            batch.push_back(env_->draw_shifted(generator(g.family), i % n_cls, shift, rng));
        }
        ModState mod = *a.mod;
        const std::vector<double> dir = p.soft_accuracy_gradient(batch, h);
        apply_modification(h, dir, a.epsilon, ModMode::plain, mod);
        train_step(p, batch, mod.rule(), train_, h);
        return capability(p, h, g);
    }

    /// Monte-Carlo improvement score of each goal against its reference
    /// capability `ref[i]`.
    std::vector<ScoreResult> score_all(const AgentView& a, const std::vector<Goal>& goals,
                                       const std::vector<double>& ref, std::size_t k_rollouts) {
        std::vector<ScoreResult> out;
        out.reserve(goals.size());
        for (std::size_t i = 0; i < goals.size(); ++i) {
            out.push_back(score(k_rollouts, [&](std::size_t k) { return preview(a, goals[i], k) - ref[i]; }));
        }
        return out;
    }

    /// Drops the cached probe set of a goal that will never be scored again.
    void forget(const Goal& g) { probes_.erase(g); }

private:
    const Environment* env_ = nullptr;
    GoalWorldConfig cfg_;
    TrainConfig train_;
    std::uint64_t seed_ = 0;
    std::size_t num_goal_families_ = 0;
    std::map<Goal, std::vector<Sample>> probes_;
};

}  // namespace egmrsi

#endif
