#ifndef EGMRSI_CONFIG_HPP
#define EGMRSI_CONFIG_HPP

// Run configuration and its flat text format:
//
//   # comment
//   section.key = value
//   list.key = 1, 2, 3
//   env.schedule = 0:0, 1:1000
//
// Unknown or repeated keys are errors.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "egmrsi/emotion.hpp"
#include "egmrsi/environment.hpp"
#include "egmrsi/errors.hpp"
#include "egmrsi/goals.hpp"
#include "egmrsi/metacognition.hpp"
#include "egmrsi/reward.hpp"
#include "egmrsi/trace.hpp"

namespace egmrsi {

struct ModConfig {
    double eta_m = 1.0;
    double lipschitz_cap = 0.001;
    double beta_radius = 0.5;
    std::size_t beta_trials = 100;
    double h0_scale = 0.05;
    double gain_tol = 0.02;
};

struct GoalWorldConfig {
    std::size_t subset_size = 32;
    std::size_t practice_batch = 16;
    /// Displacement magnitude of a goal variant per difficulty level.
    std::vector<double> shift_levels{0.0, 2.0, 4.0, 6.0, 8.0, 11.0, 14.0, 18.0};
    /// New goals take the easiest level whose capability is below this.
    double target = 0.9;
};

struct SafetyConfig {
    double eta_max = 0.01;
    std::vector<double> thresholds{1.0, 1.0, 1.0, 1.0};
    std::size_t audit_every = 100;
};

struct RunConfig {
    std::size_t steps = 10000;
    std::uint64_t seed = 42;
    std::size_t warmup_t0 = 16;
    double gamma = 0.1;
    double provisional_kmax = 10.0;
    double mad_floor = kDefaultMadFloor;
    std::size_t mi_window = 64;
    std::size_t mi_min = 8;
    double meta_rate = 0.05;
    double lambda_decay = 0.995;
    double s_cap = kDefaultSuccessCap;
    double eps_den = 1.0;
    ConfidenceMode confidence = ConfidenceMode::entropy;
    std::size_t train_batch = 8;
    std::size_t probe_size = 256;
    std::string output_path;

    Vec4 emotion_w{1.2, -0.8, 0.6, 0.4};
    ChannelWeights channels;
    EnvConfig env;
    TrainConfig train;
    ModConfig mod;
    GoalConfig goals;
    GoalWorldConfig goal_world;
    SafetyConfig safety;

    EmotionWeights emotion_weights() const { return {emotion_w[0], emotion_w[1], emotion_w[2], emotion_w[3]}; }

    /// Utility table with the forbidden family appended when none is given.
    std::vector<double> utility_table() const {
        if (!goals.utility.empty()) return goals.utility;
        std::vector<double> u(env.num_families(), 1.0);
        u.push_back(-1.0);
        return u;
    }

    /// Itemized static violations; empty when valid. The caps that depend on
    /// the run-start estimate of gamma are checked by the runner.
    std::string violations() const {
        std::string out = env.violations() + goals.violations();
        const std::string w = EmotionWeights::violation(emotion_w[0], emotion_w[1], emotion_w[2], emotion_w[3]);
        if (!w.empty()) out += "emotion weights: " + w + "\n";
        if (warmup_t0 == 0) out += "run.warmup_t0 must be >= 1\n";
        if (!(gamma >= 0.0)) out += "run.gamma must be >= 0\n";
        if (!(provisional_kmax > 0.0)) out += "run.provisional_kmax must be > 0\n";
        if (!(mad_floor > 0.0)) out += "run.mad_floor must be > 0\n";
        if (mi_window < 2) out += "run.mi_window must be >= 2\n";
        if (mi_min < 2 || mi_min > mi_window) out += "run.mi_min must lie in [2, run.mi_window]\n";
        if (!(meta_rate > 0.0 && meta_rate <= 1.0)) out += "run.meta_rate must lie in (0, 1]\n";
        if (!(lambda_decay >= 0.0 && lambda_decay < 1.0)) out += "run.lambda_decay must lie in [0, 1)\n";
        if (!(s_cap > 0.0)) out += "run.s_cap must be > 0\n";
        if (!(eps_den > 0.0)) out += "run.eps_den must be > 0\n";
        if (train_batch == 0) out += "run.train_batch must be >= 1\n";
        if (probe_size == 0) out += "run.probe_size must be >= 1\n";
        // Largest reachable u over the box must keep exp(exp(u)) finite.
        const double u_max = std::max(emotion_w[0], 0.0) + std::max(emotion_w[1], 0.0) +
                             std::max(emotion_w[2], 0.0) + std::max(emotion_w[3] * s_cap, 0.0);
        if (!(u_max < std::log(kMaxInnerExp))) {
            out += "emotion weights with run.s_cap reach u = " + format_real(u_max) +
                   "; exp(exp(u)) would overflow\n";
        }
        if (!(channels.lambda_dg >= 0.0 && channels.lambda_dg < 1.0)) out += "reward.lambda_dg must lie in [0, 1)\n";
        if (!(channels.p_b >= 0.0 && channels.p_b <= 1.0)) out += "reward.p_b must lie in [0, 1]\n";
        if (!(channels.alpha >= 0.0)) out += "reward.alpha must be >= 0\n";
        for (double x : channels.xi_spike) {
            if (!(x >= 0.0)) out += "reward.xi_spike entries must be >= 0\n";
        }
        if (!(channels.xi_dg >= 0.0 && channels.xi_bl >= 0.0)) out += "reward.xi_dg and reward.xi_bl must be >= 0\n";
        if (!(train.lr >= 0.0 && train.adaptive_lr >= 0.0)) out += "train learning rates must be >= 0\n";
        if (!(train.momentum >= 0.0 && train.momentum < 1.0)) out += "train.momentum must lie in [0, 1)\n";
        if (!(train.adaptive_decay >= 0.0 && train.adaptive_decay < 1.0)) {
            out += "train.adaptive_decay must lie in [0, 1)\n";
        }
        if (!(mod.eta_m > 0.0)) out += "mod.eta_m must be > 0\n";
        if (!(mod.lipschitz_cap > 0.0)) out += "mod.lipschitz_cap must be > 0\n";
        if (!(mod.beta_radius > 0.0) || mod.beta_trials == 0) {
            out += "mod.beta_radius and mod.beta_trials must be positive\n";
        }
        if (!(mod.h0_scale > 0.0)) out += "mod.h0_scale must be > 0\n";
        if (!(mod.gain_tol >= 0.0)) out += "mod.gain_tol must be >= 0\n";
        const auto u = utility_table();
        if (u.size() < env.num_families()) out += "goals.utility must cover every environment family\n";
        if (goal_world.subset_size == 0) out += "goal_world.subset_size must be >= 1\n";
        if (goal_world.practice_batch == 0) out += "goal_world.practice_batch must be >= 1\n";
        if (!(goal_world.target > 0.0 && goal_world.target <= 1.0)) out += "goal_world.target must lie in (0, 1]\n";
        if (goal_world.shift_levels.empty()) out += "goal_world.shift_levels must list at least one level\n";
        for (double m : goal_world.shift_levels) {
            if (!(m >= 0.0) || !std::isfinite(m)) out += "goal_world.shift_levels entries must be finite and >= 0\n";
        }
        if (!(safety.eta_max > 0.0)) out += "safety.eta_max must be > 0\n";
        if (safety.thresholds.empty()) out += "safety.thresholds must list at least one component\n";
        if (safety.audit_every == 0) out += "safety.audit_every must be >= 1\n";
        return out;
    }

    void validate() const {
        const std::string bad = violations();
        if (!bad.empty()) throw ConfigError("invalid configuration:\n" + bad);
    }
};

namespace config_detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double to_real(const std::string& s) {
    double x = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || p != s.data() + s.size()) throw Error("not a number: '" + s + "'");
    return x;
}

template <class Int>
Int to_int(const std::string& s) {
    Int x = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || p != s.data() + s.size()) throw Error("not a non-negative integer: '" + s + "'");
    return x;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline std::vector<double> to_reals(const std::string& s) {
    std::vector<double> out;
    for (const auto& x : split_list(s)) out.push_back(to_real(x));
    return out;
}

inline std::string join_reals(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + format_real(xs[i]);
    return out;
}

struct Field {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field real_field(T RunConfig::*sect, double T::*member) {
    return {[=](RunConfig& c, const std::string& v) { (c.*sect).*member = to_real(v); },
            [=](const RunConfig& c) { return format_real((c.*sect).*member); }};
}

inline Field real_field(double RunConfig::*member) {
    return {[=](RunConfig& c, const std::string& v) { c.*member = to_real(v); },
            [=](const RunConfig& c) { return format_real(c.*member); }};
}

template <class T>
Field size_field(T RunConfig::*sect, std::size_t T::*member) {
    return {[=](RunConfig& c, const std::string& v) { (c.*sect).*member = to_int<std::size_t>(v); },
            [=](const RunConfig& c) { return std::to_string((c.*sect).*member); }};
}

inline Field size_field(std::size_t RunConfig::*member) {
    return {[=](RunConfig& c, const std::string& v) { c.*member = to_int<std::size_t>(v); },
            [=](const RunConfig& c) { return std::to_string(c.*member); }};
}

template <class T>
Field reals_field(T RunConfig::*sect, std::vector<double> T::*member) {
    return {[=](RunConfig& c, const std::string& v) { (c.*sect).*member = to_reals(v); },
            [=](const RunConfig& c) { return join_reals((c.*sect).*member); }};
}

inline Field emotion_field(std::size_t i) {
    return {[=](RunConfig& c, const std::string& v) { c.emotion_w[i] = to_real(v); },
            [=](const RunConfig& c) { return format_real(c.emotion_w[i]); }};
}

/// Every accepted key, in the order it is written out.
inline const std::vector<std::pair<std::string, Field>>& registry() {
    static const std::vector<std::pair<std::string, Field>> fields = [] {
        using C = RunConfig;
        std::vector<std::pair<std::string, Field>> f;
        f.emplace_back("run.steps", size_field(&C::steps));
        f.emplace_back("run.seed", Field{[](C& c, const std::string& v) { c.seed = to_int<std::uint64_t>(v); },
                                         [](const C& c) { return std::to_string(c.seed); }});
        f.emplace_back("run.warmup_t0", size_field(&C::warmup_t0));
        f.emplace_back("run.gamma", real_field(&C::gamma));
        f.emplace_back("run.provisional_kmax", real_field(&C::provisional_kmax));
        f.emplace_back("run.mad_floor", real_field(&C::mad_floor));
        f.emplace_back("run.mi_window", size_field(&C::mi_window));
        f.emplace_back("run.mi_min", size_field(&C::mi_min));
        f.emplace_back("run.meta_rate", real_field(&C::meta_rate));
        f.emplace_back("run.lambda_decay", real_field(&C::lambda_decay));
        f.emplace_back("run.s_cap", real_field(&C::s_cap));
        f.emplace_back("run.eps_den", real_field(&C::eps_den));
        f.emplace_back("run.confidence",
                       Field{[](C& c, const std::string& v) {
                                 if (v == "entropy") c.confidence = ConfidenceMode::entropy;
                                 else if (v == "margin") c.confidence = ConfidenceMode::margin;
                                 else throw Error("expected 'entropy' or 'margin', got '" + v + "'");
                             },
                             [](const C& c) {
                                 return std::string(c.confidence == ConfidenceMode::entropy ? "entropy" : "margin");
                             }});
        f.emplace_back("run.train_batch", size_field(&C::train_batch));
        f.emplace_back("run.probe_size", size_field(&C::probe_size));
        f.emplace_back("run.output_path", Field{[](C& c, const std::string& v) { c.output_path = v; },
                                                [](const C& c) { return c.output_path; }});

        f.emplace_back("emotion.w_c", emotion_field(0));
        f.emplace_back("emotion.w_e", emotion_field(1));
        f.emplace_back("emotion.w_n", emotion_field(2));
        f.emplace_back("emotion.w_s", emotion_field(3));

        f.emplace_back("reward.xi_spike",
                       Field{[](C& c, const std::string& v) {
                                 const auto xs = to_reals(v);
                                 if (xs.size() != kSpikeChannels) throw Error("expected 5 spike weights");
                                 std::copy(xs.begin(), xs.end(), c.channels.xi_spike.begin());
                             },
                             [](const C& c) {
                                 return join_reals({c.channels.xi_spike.begin(), c.channels.xi_spike.end()});
                             }});
        f.emplace_back("reward.xi_penalty", real_field(&C::channels, &ChannelWeights::xi_penalty));
        f.emplace_back("reward.xi_dg", real_field(&C::channels, &ChannelWeights::xi_dg));
        f.emplace_back("reward.xi_bl", real_field(&C::channels, &ChannelWeights::xi_bl));
        f.emplace_back("reward.xi_md", real_field(&C::channels, &ChannelWeights::xi_md));
        f.emplace_back("reward.xi_mce", real_field(&C::channels, &ChannelWeights::xi_mce));
        f.emplace_back("reward.alpha", real_field(&C::channels, &ChannelWeights::alpha));
        f.emplace_back("reward.p_b", real_field(&C::channels, &ChannelWeights::p_b));
        f.emplace_back("reward.lambda_dg", real_field(&C::channels, &ChannelWeights::lambda_dg));

        f.emplace_back("env.num_classes", size_field(&C::env, &EnvConfig::num_classes));
        f.emplace_back("env.d_h", size_field(&C::env, &EnvConfig::d_h));
        f.emplace_back("env.d_o", size_field(&C::env, &EnvConfig::d_o));
        f.emplace_back("env.r_max", real_field(&C::env, &EnvConfig::r_max));
        f.emplace_back("env.delta_bias", real_field(&C::env, &EnvConfig::delta_bias));
        f.emplace_back("env.reward_noise", real_field(&C::env, &EnvConfig::reward_noise));
        f.emplace_back("env.schedule",
                       Field{[](C& c, const std::string& v) {
                                 c.env.task_schedule.clear();
                                 for (const auto& item : split_list(v)) {
                                     const auto colon = item.find(':');
                                     if (colon == std::string::npos) throw Error("expected family:start, got '" + item + "'");
                                     c.env.task_schedule.push_back(
                                         {to_int<std::size_t>(trim(item.substr(0, colon))),
                                          to_int<std::size_t>(trim(item.substr(colon + 1)))});
                                 }
                             },
                             [](const C& c) {
                                 std::string out;
                                 for (std::size_t i = 0; i < c.env.task_schedule.size(); ++i) {
                                     const auto& e = c.env.task_schedule[i];
                                     out += (i ? ", " : "") + std::to_string(e.family) + ":" +
                                            std::to_string(e.start_step);
                                 }
                                 return out;
                             }});
        f.emplace_back("env.cluster_scale", real_field(&C::env, &EnvConfig::cluster_scale));
        f.emplace_back("env.shift_scale", real_field(&C::env, &EnvConfig::shift_scale));
        f.emplace_back("env.noise_sd", real_field(&C::env, &EnvConfig::noise_sd));
        f.emplace_back("env.novelty_bin", real_field(&C::env, &EnvConfig::novelty_bin));
        f.emplace_back("env.rate_transmission", real_field(&C::env, &EnvConfig::rate_transmission));
        f.emplace_back("env.rate_cocreation", real_field(&C::env, &EnvConfig::rate_cocreation));

        f.emplace_back("train.lr", real_field(&C::train, &TrainConfig::lr));
        f.emplace_back("train.momentum", real_field(&C::train, &TrainConfig::momentum));
        f.emplace_back("train.adaptive_decay", real_field(&C::train, &TrainConfig::adaptive_decay));
        f.emplace_back("train.adaptive_lr", real_field(&C::train, &TrainConfig::adaptive_lr));

        f.emplace_back("mod.eta_m", real_field(&C::mod, &ModConfig::eta_m));
        f.emplace_back("mod.lipschitz_cap", real_field(&C::mod, &ModConfig::lipschitz_cap));
        f.emplace_back("mod.beta_radius", real_field(&C::mod, &ModConfig::beta_radius));
        f.emplace_back("mod.beta_trials", size_field(&C::mod, &ModConfig::beta_trials));
        f.emplace_back("mod.h0_scale", real_field(&C::mod, &ModConfig::h0_scale));
        f.emplace_back("mod.gain_tol", real_field(&C::mod, &ModConfig::gain_tol));

        f.emplace_back("goals.p_gen", real_field(&C::goals, &GoalConfig::p_gen));
        f.emplace_back("goals.gamma_goal", real_field(&C::goals, &GoalConfig::gamma_goal));
        f.emplace_back("goals.k_rollouts", size_field(&C::goals, &GoalConfig::k_rollouts));
        f.emplace_back("goals.max_batch", size_field(&C::goals, &GoalConfig::max_batch));
        f.emplace_back("goals.replay_budget", size_field(&C::goals, &GoalConfig::replay_budget));
        f.emplace_back("goals.utility", reals_field(&C::goals, &GoalConfig::utility));

        f.emplace_back("goal_world.subset_size", size_field(&C::goal_world, &GoalWorldConfig::subset_size));
        f.emplace_back("goal_world.practice_batch", size_field(&C::goal_world, &GoalWorldConfig::practice_batch));
        f.emplace_back("goal_world.target", real_field(&C::goal_world, &GoalWorldConfig::target));
        f.emplace_back("goal_world.shift_levels", reals_field(&C::goal_world, &GoalWorldConfig::shift_levels));

        f.emplace_back("safety.eta_max", real_field(&C::safety, &SafetyConfig::eta_max));
        f.emplace_back("safety.thresholds", reals_field(&C::safety, &SafetyConfig::thresholds));
        f.emplace_back("safety.audit_every", size_field(&C::safety, &SafetyConfig::audit_every));
        return f;
    }();
    return fields;
}

}  // namespace config_detail

/// Applies `key = value` lines on top of the defaults. Does not validate.
inline RunConfig parse_config(std::istream& is) {
    const auto& reg = config_detail::registry();
    std::map<std::string, const config_detail::Field*> by_key;
    for (const auto& [k, f] : reg) by_key[k] = &f;
    RunConfig cfg;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = config_detail::trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
        const std::string key = config_detail::trim(std::string_view(body).substr(0, eq));
        const std::string value = config_detail::trim(std::string_view(body).substr(eq + 1));
        auto it = by_key.find(key);
        if (it == by_key.end()) throw ParseError("unknown key '" + key + "'", lineno);
        if (!seen.insert(key).second) throw ParseError("duplicate key '" + key + "'", lineno);
        try {
            it->second->set(cfg, value);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(key + ": " + e.what(), lineno);
        }
    }
    return cfg;
}

inline RunConfig parse_config_string(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    RunConfig cfg = parse_config(is);
    cfg.validate();
    return cfg;
}

/// Every key with its current value; parse_config() reads it back unchanged.
inline std::string to_string(const RunConfig& cfg) {
    std::string out;
    for (const auto& [k, f] : config_detail::registry()) out += k + " = " + f.get(cfg) + "\n";
    return out;
}

}  // namespace egmrsi

#endif
