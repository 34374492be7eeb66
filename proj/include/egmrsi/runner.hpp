#ifndef EGMRSI_RUNNER_HPP
#define EGMRSI_RUNNER_HPP

// The step loop. Per step t:
//   observe -> predict -> metacognitive reading -> potential, gradient, clip
//   -> scalar drive -> MI / MD / MCE -> reward -> trigger -> (fired)
//   modification + NOISE replay -> goals -> training -> capability -> state
//   update -> toll -> periodic audit -> trace row.
// Row t records v_t; the state advances to v_{t+1} at the end of the step.

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "egmrsi/config.hpp"
#include "egmrsi/emotion.hpp"
#include "egmrsi/environment.hpp"
#include "egmrsi/errors.hpp"
#include "egmrsi/goal_world.hpp"
#include "egmrsi/goals.hpp"
#include "egmrsi/meaning.hpp"
#include "egmrsi/metacognition.hpp"
#include "egmrsi/reward.hpp"
#include "egmrsi/rng.hpp"
#include "egmrsi/safety.hpp"
#include "egmrsi/self_modification.hpp"
#include "egmrsi/trace.hpp"

namespace egmrsi {

inline constexpr double kNegativeIncrementBudget = 2.0;
inline constexpr double kMisinformationConfidence = 0.9;
inline constexpr std::size_t kDirectionRedraws = 8;

struct RunResult {
    std::vector<TraceRow> rows;
    KeyValueReport report;
    std::vector<std::string> warnings;
};

/// Frozen capability probe balanced over every scheduled family and class.
inline CapabilityProbe make_probe(const Environment& env, std::size_t size, std::uint64_t seed) {
    std::vector<std::size_t> families;
    for (const auto& e : env.config().task_schedule) {
        if (std::find(families.begin(), families.end(), e.family) == families.end()) families.push_back(e.family);
    }
    const std::size_t k = env.config().num_classes;
    Rng rng(seed, Stream::probe);
    CapabilityProbe probe;
    probe.samples.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        probe.samples.push_back(env.draw_labeled(families[(i / k) % families.size()], i % k, rng));
    }
    return probe;
}

class Simulation {
public:
    explicit Simulation(const RunConfig& cfg) : cfg_(cfg), weights_(cfg.emotion_weights()) {
        cfg_.validate();
        env_ = std::make_unique<Environment>(Environment::reset(cfg_.env));
        const std::size_t k = cfg_.env.num_classes;
        log_k_ = std::log(static_cast<double>(k));

        Rng init(cfg_.seed, Stream::predictor);
        predictor_ = Predictor::random(cfg_.env.d_o, cfg_.env.d_h, k, init);
        prev_model_ = predictor_;
        Rng hinit(cfg_.seed, Stream::self_model);
        h_.resize(cfg_.env.d_h);
        for (double& x : h_) x = hinit.normal(0.0, cfg_.mod.h0_scale);
        h0_norm_ = l2_norm(h_);

        probe_ = make_probe(*env_, cfg_.probe_size, cfg_.seed);
        mod_.step_scale = cfg_.mod.eta_m;
        mod_.lipschitz_cap = cfg_.mod.lipschitz_cap;

        Rng beta_rng(cfg_.seed, Stream::modification);
        gamma_est_ = estimate_gamma(predictor_, probe_, h_, cfg_.mod.lipschitz_cap, cfg_.mod.beta_radius,
                                    cfg_.mod.beta_trials, beta_rng);
        probe_.beta_cap = gamma_est_.beta_hat;

        clip_.k_max = cfg_.provisional_kmax;
        clip_.warmup_len = cfg_.warmup_t0;
        clip_.mad_floor = cfg_.mad_floor;

        channels_ = cfg_.channels;
        safety_.alpha = channels_.alpha;
        safety_.gamma = gamma_est_.gamma;
        apply_safety_caps(clip_.k_max, 0);

        toll_ = TollVector::seeded(cfg_.safety.thresholds, cfg_.safety.eta_max);
        m0_l1_ = toll_.l1();

        ledger_.cfg = cfg_.goals;
        ledger_.cfg.utility = cfg_.utility_table();
        goal_world_ = GoalWorld(*env_, cfg_);

        baseline_rng_ = Rng(cfg_.seed, Stream::baseline);
        goal_rng_ = Rng(cfg_.seed, Stream::goals);
        (void)novelty_bits(env_->boot_bytes(), novelty_);

        capability_initial_ = capability(predictor_, probe_, h_);
        capability_ = capability_initial_;
    }

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    bool done() const noexcept { return t_ >= cfg_.steps; }
    std::size_t steps_taken() const noexcept { return t_; }
    const std::vector<TraceRow>& rows() const noexcept { return rows_; }
    const GoalLedger& ledger() const noexcept { return ledger_; }
    const Environment& environment() const noexcept { return *env_; }
    const Predictor& predictor() const noexcept { return predictor_; }
    std::span<const double> hidden_bias() const noexcept { return h_; }
    const SafetyState& safety() const noexcept { return safety_; }
    const ChannelWeights& channels() const noexcept { return channels_; }
    const MetaVector& meta() const noexcept { return v_; }
    double gamma_estimate() const noexcept { return gamma_est_.gamma; }
    double h0_norm() const noexcept { return h0_norm_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    /// Executes one step and returns its row. Module errors are rethrown as
    /// RunError carrying the step index.
    const TraceRow& step() {
        if (done()) throw PreconditionError("simulation already finished");
        try {
            rows_.push_back(advance());
        } catch (const RunError&) {
            throw;
        } catch (const std::exception& e) {
            throw RunError(e.what(), static_cast<long>(t_));
        }
        ++t_;
        return rows_.back();
    }

    RunResult finish() {
        while (!done()) step();
        RunResult r;
        r.rows = rows_;
        r.report = report();
        r.warnings = warnings_;
        return r;
    }

    KeyValueReport report() const {
        KeyValueReport rep;
        rep.set("seed", std::to_string(cfg_.seed));
        rep.set("steps", t_);
        rep.set("warmup_t0", cfg_.warmup_t0);
        rep.set("gamma", cfg_.gamma);
        rep.set("num_classes", cfg_.env.num_classes);
        rep.set("log_num_classes", log_k_);
        rep.set("gamma_est", gamma_est_.gamma);
        rep.set("beta_hat", gamma_est_.beta_hat);
        rep.set("alpha", safety_.alpha);
        rep.set("alpha_star", safety_.alpha_star);
        rep.set("xi_dg", channels_.xi_dg);
        rep.set("xi_bl", channels_.xi_bl);
        rep.set("cap_dg", safety_.cap_dg);
        rep.set("cap_bl", safety_.cap_bl);
        rep.set("l0_ext", safety_.l0_ext);
        rep.set("k_max", clip_.k_max);
        rep.set("k_max_calibrated", clip_.calibrated);
        rep.set("eta_max", toll_.eta_max);
        rep.set("d_toll", toll_.dim());
        rep.set("m0_l1", m0_l1_);
        rep.set("toll_l1", toll_.l1());
        rep.set("neg_budget", kNegativeIncrementBudget);
        rep.set("r_max", cfg_.env.r_max);
        rep.set("delta_bias", cfg_.env.delta_bias);
        rep.set("p_gen", cfg_.goals.p_gen);
        rep.set("h0_norm", h0_norm_);
        rep.set("lipschitz_cap", cfg_.mod.lipschitz_cap);
        rep.set("eta_m", cfg_.mod.eta_m);
        rep.set("capability_initial", capability_initial_);
        rep.set("capability_final", capability_);
        rep.set("negative_increments", negative_increments_);
        rep.set_exact("cumulative_reward", cumulative_reward_);
        rep.set("rsi_count", rsi_count_);
        rep.set("phase_shifts", phase_shifts_);
        rep.set("modifications_skipped", mod_skipped_);
        rep.set("train_steps_skipped", train_skipped_);
        rep.set("gain_checks", gain_checks_);
        rep.set("gain_violations", gain_violations_);
        rep.set("gain_violation_rate",
                gain_checks_ ? static_cast<double>(gain_violations_) / static_cast<double>(gain_checks_) : 0.0);
        rep.set("injection_events", injections_);
        rep.set("admissible_batches", ledger_.admissible_batches());
        rep.set("batches_with_acceptance", ledger_.batches_with_acceptance());
        rep.set("goals_sampled", ledger_.sampled);
        rep.set("goals_active", ledger_.active.size());
        rep.set("goals_noise", ledger_.noise.size());
        rep.set("goals_discarded", ledger_.discarded.size());
        rep.set("goal_promotions", ledger_.promotions);
        rep.set("ledger_conserved", ledger_.conserved());
        rep.set("audits", audits_);
        rep.set("audit_failures", audit_failures_);
        rep.set("in_region_all", audit_failures_ == 0);
        rep.set("warnings", warnings_.size());
        for (std::size_t i = 0; i < warnings_.size(); ++i) rep.set("warning." + std::to_string(i), warnings_[i]);
        return rep;
    }

private:
    /// alpha* and the buffer caps for threshold k. alpha >= alpha* is a
    /// configuration error; xi_DG / xi_BL above their caps are clamped.
    void apply_safety_caps(double k, std::size_t step) {
        if (!(safety_.gamma > 0.0)) {
            throw ConfigError("run-start capability Lipschitz estimate is zero; mixing radius undefined");
        }
        safety_.k_max = k;
        safety_.alpha_star = safe_alpha(safety_.gamma, k);
        const BufferCaps caps = buffer_caps(safety_.gamma, k);
        safety_.cap_dg = caps.cap_dg;
        safety_.cap_bl = caps.cap_bl;
        if (!(safety_.alpha < safety_.alpha_star)) {
            throw ConfigError("reward.alpha = " + format_real(safety_.alpha) + " must be < alpha* = gamma/(2 k_max) = " +
                              format_real(safety_.alpha_star) + " (gamma = " + format_real(safety_.gamma) +
                              ", k_max = " + format_real(k) + ")");
        }
        if (channels_.xi_dg > caps.cap_dg) {
            warnings_.push_back("step " + std::to_string(step) + ": xi_dg clamped from " + format_real(channels_.xi_dg) +
                                " to " + format_real(caps.cap_dg));
            channels_.xi_dg = caps.cap_dg;
        }
        if (channels_.xi_bl > caps.cap_bl) {
            warnings_.push_back("step " + std::to_string(step) + ": xi_bl clamped from " + format_real(channels_.xi_bl) +
                                " to " + format_real(caps.cap_bl));
            channels_.xi_bl = caps.cap_bl;
        }
        safety_.xi_dg = channels_.xi_dg;
        safety_.xi_bl = channels_.xi_bl;
    }

    MiEstimate window_mi() const {
        const std::size_t k = cfg_.env.num_classes;
        std::vector<double> q;
        std::vector<std::size_t> labels;
        std::vector<double> marginal(k, 0.0);
        q.reserve(window_.size());
        labels.reserve(window_.size());
        std::vector<double> hid, probs;
        for (const Sample& s : window_) {
            predictor_.hidden_into(s.obs, h_, hid);
            predictor_.probs_into(hid, probs);
            q.push_back(probs[s.label]);
            labels.push_back(s.label);
            marginal[s.label] += 1.0;
        }
        for (double& m : marginal) m /= static_cast<double>(window_.size());
        return mi_plugin_from_probs(q, labels, marginal);
    }

    AgentView view(double epsilon) const {
        AgentView a;
        a.predictor = &predictor_;
        a.h = h_;
        a.mod = &mod_;
        a.epsilon = epsilon;
        a.step = t_;
        return a;
    }

    /// Re-scores part of the NOISE buffer against the post-modification state.
    void replay(double epsilon) {
        if (ledger_.noise.empty()) return;
        const AgentView a = view(epsilon);
        const auto rescore = [&](const Goal& g) {
            const double ref = reference_.at(g);
            return score(cfg_.goals.k_rollouts, [&](std::size_t k) { return goal_world_.preview(a, g, k) - ref; }).mean;
        };
        for (const Goal& g : replay_noise(ledger_, t_, rescore)) forget(g);
    }

    /// Generation, scoring and filtering for this step. Returns whether a
    /// non-empty candidate set was injected.
    bool run_goals(double epsilon) {
        const double draw = goal_rng_.uniform();
        const std::vector<Goal> cands = generate(draw, ledger_, [&] {
            std::vector<Goal> out;
            const std::size_t n = 1 + static_cast<std::size_t>(goal_rng_.below(cfg_.goals.max_batch));
            for (std::size_t i = 0; i < n; ++i) {
                const auto family = static_cast<std::size_t>(goal_rng_.below(goal_world_.num_families()));
                // Redraw directions the agent already masters at every level.
                Goal g{family, goal_world_.levels() - 1, 0};
                for (std::size_t attempt = 0; attempt < kDirectionRedraws; ++attempt) {
                    g.params = static_cast<std::uint32_t>(goal_rng_.next_u64() >> 32);
                    if (const auto d = goal_world_.pick_difficulty(predictor_, h_, family, g.params)) {
                        g.difficulty = *d;
                        break;
                    }
                }
                out.push_back(g);
            }
            return out;
        });
        if (cands.empty()) return false;
        std::vector<Goal> to_score;
        std::vector<double> refs;
        for (const Goal& g : cands) {
            if (ledger_.utility(g.family) < 0.0) continue;
            to_score.push_back(g);
            refs.push_back(goal_world_.capability(predictor_, h_, g));
        }
        const std::vector<ScoreResult> scored =
            goal_world_.score_all(view(epsilon), to_score, refs, cfg_.goals.k_rollouts);
        std::map<Goal, double> score_of;
        for (std::size_t i = 0; i < to_score.size(); ++i) {
            score_of[to_score[i]] = scored[i].mean;
            reference_[to_score[i]] = refs[i];
        }
        std::vector<double> scores;
        for (const Goal& g : cands) scores.push_back(score_of.contains(g) ? score_of[g] : 0.0);
        const FilterResult fr = filter_accept(cands, scores, ledger_, t_);
        for (const Goal& g : fr.accepted) forget(g);
        for (const Goal& g : fr.discarded) forget(g);
        return true;
    }

    /// Active and discarded goals are never scored again.
    void forget(const Goal& g) {
        goal_world_.forget(g);
        reference_.erase(g);
    }

    TraceRow advance() {
        TraceRow row;
        row.t = static_cast<std::int64_t>(t_);

        // Observation and prediction.
        const Observation o = env_->step(t_);
        const Forward fwd = predictor_.forward(o.obs, h_);
        const auto y_hat =
            static_cast<std::size_t>(std::max_element(fwd.probs.begin(), fwd.probs.end()) - fwd.probs.begin());
        const bool correct = y_hat == o.label;
        const Forward prior = prev_model_.forward(o.obs, h_);
        const MetaVector reading =
            lambda_map(PredictionRecord{fwd.probs, o.label, prior.probs}, v_, cfg_.confidence, cfg_.s_cap);
        const double r_ext = env_->external_reward(correct);

        // Emotion potential at v_t and the scalar drive.
        const double f = potential(v_, weights_);
        const Vec4 grad = gradient(v_, weights_);
        const double k_used = clip_.k_max;
        const Vec4 gc = clip(grad, k_used);
        row.grad_norm_pre = l2_norm(grad);
        row.grad_norm_post = l2_norm(gc);
        row.k_max = k_used;
        if (!clip_.calibrated) {
            clip_.observe(row.grad_norm_pre);
            if (clip_.calibrated) apply_safety_caps(clip_.k_max, t_);
        }
        const Vec4 va = v_.as_array();
        const Vec4 vp = v_prev_.as_array();
        const double eps = scalar_drive(gc, {va[0] - vp[0], va[1] - vp[1], va[2] - vp[2], va[3] - vp[3]});

        // Information measures over the sliding window.
        window_.push_back(Sample{o.obs, o.label});
        if (window_.size() > cfg_.mi_window) window_.pop_front();
        const double i_pred = window_.size() >= cfg_.mi_min ? window_mi().value : 0.0;
        const ComplexityEstimate kh = mdl_complexity(fwd.hidden);
        const double md = meaning_density(i_pred, kh, cfg_.eps_den);
        const double ds = novelty_bits(o.bytes, novelty_);
        const auto clamp_i = [&](double x) { return std::clamp(x, 0.0, log_k_); };
        const double mce_t = mce(clamp_i(i_pred), clamp_i(i_prev_), ds, cfg_.eps_den);
        i_prev_ = i_pred;

        // Event channels and the composed reward.
        EventFlags flags;
        flags[Channel::transmission_success] = o.transmission_event && correct;
        flags[Channel::misunderstanding_repair] = prev_wrong_ && correct;
        if (prev_wrong_) {
            const Forward again = predictor_.forward(prev_sample_.obs, h_);
            flags[Channel::self_error_recognition] = again.probs[prev_sample_.label] > prev_p_true_;
        }
        flags[Channel::semantic_discovery] = mce_t > 0.0;
        flags[Channel::co_creation] = o.cocreation_event;
        flags.misinformation = !correct && fwd.probs[y_hat] > kMisinformationConfidence;
        prev_wrong_ = !correct;
        prev_sample_ = Sample{o.obs, o.label};
        prev_p_true_ = fwd.probs[o.label];

        const SpikeResult sp = event_spikes(flags, channels_);
        const DgResult dg = dg_update(trace_, f, channels_);
        trace_ = dg.trace;
        const MeaningBonus mb = md_mce_bonus(md, mce_t, channels_);
        RewardParts parts;
        parts.spikes = sp.spikes;
        parts.penalty = sp.penalty;
        parts.dg_bonus = dg.bonus;
        parts.baseline_bonus = baseline_bonus(baseline_rng_.uniform(), channels_);
        parts.md_bonus = mb.md_bonus;
        parts.mce_bonus = mb.mce_bonus;
        const RewardBreakdown rb = compose(f, parts, r_ext, channels_, cfg_.env.r_max);
        cumulative_reward_ += serialized(rb.total);

        // Trigger and self-modification.
        if (mod_.cooldown > 0) --mod_.cooldown;
        const TriggerDecision d = rsi_trigger(eps, i_pred, cfg_.gamma, mod_.cooldown);
        const double eps_eff = std::min(eps, k_used);
        if (d.fired) {
            const std::vector<Sample> recent(window_.begin(), window_.end());
            const std::vector<double> dir = predictor_.soft_accuracy_gradient(recent, h_);
            const ModResult mr =
                apply_modification(h_, dir, eps_eff, d.phase_shift ? ModMode::phase_shift : ModMode::plain, mod_);
            if (mr.applied) {
                ++rsi_count_;
                if (d.phase_shift) ++phase_shifts_;
                row.h_step = mr.step_norm;
                const double c_after = capability(predictor_, probe_, h_);
                const bool ok = ability_gain_check(capability_, c_after, eps_eff, gamma_est_.gamma, cfg_.mod.gain_tol);
                row.gain_ok = ok ? 1 : 0;
                ++gain_checks_;
                if (!ok) ++gain_violations_;
                replay(eps_eff);
            } else {
                ++mod_skipped_;
                warnings_.push_back("step " + std::to_string(t_) + ": " + mr.diagnostic);
            }
        }

        // Goals.
        const bool injected = run_goals(eps_eff);
        if (injected) ++injections_;

        // Learning.
        recent_.push_back(Sample{o.obs, o.label});
        if (recent_.size() > cfg_.train_batch) recent_.pop_front();
        prev_model_ = predictor_;
        const std::vector<Sample> batch(recent_.begin(), recent_.end());
        const TrainResult tr = train_step(predictor_, batch, mod_.rule(), cfg_.train, h_);
        if (!tr.applied) {
            ++train_skipped_;
            warnings_.push_back("step " + std::to_string(t_) + ": " + tr.diagnostic);
        }

        const double cap = capability(predictor_, probe_, h_);
        negative_increments_ += std::max(0.0, capability_ - cap);
        capability_ = cap;

        // Toll: increments only on hard breaches.
        std::vector<double> eta(toll_.dim(), 0.0);
        const bool breaches[4] = {row.grad_norm_post > k_used, !(safety_.alpha < safety_.alpha_star),
                                  channels_.xi_dg > safety_.cap_dg || channels_.xi_bl > safety_.cap_bl,
                                  std::abs(r_ext) > cfg_.env.r_max};
        for (std::size_t i = 0; i < 4; ++i) {
            if (breaches[i]) eta[i % eta.size()] = toll_.eta_max;
        }
        toll_ = toll_update(toll_, eta);

        // Row.
        row.c = v_.c;
        row.e = v_.e;
        row.n = v_.n;
        row.S = v_.s;
        row.f_base = f;
        row.eps_t = eps;
        row.i_pred = i_pred;
        row.md = md;
        row.mce = mce_t;
        row.delta_s = ds;
        row.fired = d.fired;
        row.phase_shift = d.fired && d.phase_shift;
        row.base_f = rb.base_f;
        row.spikes = rb.spikes;
        row.penalty = rb.penalty;
        row.dg_bonus = rb.dg_bonus;
        row.baseline_bonus = rb.baseline_bonus;
        row.md_bonus = rb.md_bonus;
        row.mce_bonus = rb.mce_bonus;
        row.external_mixed = rb.external_mixed;
        row.total = rb.total;
        row.capability = cap;
        row.goals_active = static_cast<std::int64_t>(ledger_.active.size());
        row.goals_noise = static_cast<std::int64_t>(ledger_.noise.size());
        row.toll_l1 = toll_.l1();
        row.h_norm = l2_norm(h_);
        row.r_ext = r_ext;
        row.update_rule = static_cast<std::int64_t>(mod_.update_rule_id);
        row.rsi_count = static_cast<std::int64_t>(rsi_count_);
        row.viable = eps > 0.0 && i_pred > cfg_.gamma;
        row.goal_injected = injected;
        row.batches_pending =
            static_cast<std::int64_t>(ledger_.admissible_batches() - ledger_.batches_with_acceptance());
        row.promotions = static_cast<std::int64_t>(ledger_.promotions);

        // Metacognitive state for the next step.
        MetaVector next = integrate_reading(v_, reading, cfg_.meta_rate);
        next.s = success_update(v_.s, r_ext, cfg_.lambda_decay, cfg_.s_cap);
        v_prev_ = v_;
        v_ = next.clamped(cfg_.s_cap);

        // Periodic audit over the rows since the previous one.
        if ((t_ + 1) % cfg_.safety.audit_every == 0 || t_ + 1 == cfg_.steps) {
            std::vector<TraceRow> window(rows_.begin() + static_cast<std::ptrdiff_t>(audit_from_), rows_.end());
            window.push_back(row);
            const InvariantReport rep = audit(window, safety_, toll_, t_ + 1, m0_l1_);
            safety_.in_region = rep.in_region;
            ++audits_;
            if (!rep.in_region) {
                ++audit_failures_;
                warnings_.push_back("step " + std::to_string(t_) + ": audit failed: " + rep.summary());
            }
            audit_from_ = rows_.size() + 1;
        }
        row.in_region = safety_.in_region;
        return row;
    }

    RunConfig cfg_;
    EmotionWeights weights_;
    std::unique_ptr<Environment> env_;
    double log_k_ = 0.0;
    Predictor predictor_;
    Predictor prev_model_;
    std::vector<double> h_;
    double h0_norm_ = 0.0;
    CapabilityProbe probe_;
    ModState mod_;
    GammaEstimate gamma_est_;
    ClipState clip_;
    ChannelWeights channels_;
    SafetyState safety_;
    TollVector toll_;
    double m0_l1_ = 0.0;
    GoalLedger ledger_;
    GoalWorld goal_world_;
    std::map<Goal, double> reference_;
    Rng baseline_rng_{0};
    Rng goal_rng_{0};
    NoveltyCounter novelty_;
    EligibilityTrace trace_;

    MetaVector v_;
    MetaVector v_prev_;
    std::deque<Sample> window_;
    std::deque<Sample> recent_;
    double i_prev_ = 0.0;
    bool prev_wrong_ = false;
    Sample prev_sample_;
    double prev_p_true_ = 0.0;

    std::size_t t_ = 0;
    std::vector<TraceRow> rows_;
    std::vector<std::string> warnings_;
    double capability_initial_ = 0.0;
    double capability_ = 0.0;
    double negative_increments_ = 0.0;
    double cumulative_reward_ = 0.0;
    std::size_t rsi_count_ = 0;
    std::size_t phase_shifts_ = 0;
    std::size_t mod_skipped_ = 0;
    std::size_t train_skipped_ = 0;
    std::size_t gain_checks_ = 0;
    std::size_t gain_violations_ = 0;
    std::size_t injections_ = 0;
    std::size_t audits_ = 0;
    std::size_t audit_failures_ = 0;
    std::size_t audit_from_ = 0;
};

/// Runs cfg.steps steps from scratch.
inline RunResult run(const RunConfig& cfg) {
    Simulation sim(cfg);
    return sim.finish();
}

/// Writes the trace to `path` and the report to `path + ".report"`.
inline void write_run(const RunResult& r, const std::string& path) {
    write_trace_file(path, r.rows);
    std::ofstream os(path + ".report");
    if (!os) throw Error("cannot open report file for writing: " + path + ".report");
    os << r.report.str();
}

}  // namespace egmrsi

#endif
