#ifndef EGMRSI_VERIFY_HPP
#define EGMRSI_VERIFY_HPP

// Statistical verification registry. Trace checks read a recorded run (CSV
// plus its `<trace>.report` summary); synthetic checks draw their own
// Monte-Carlo samples. The registry is the single list the CLI, the sweep
// and the acceptance binary select from.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "egmrsi/emotion.hpp"
#include "egmrsi/errors.hpp"
#include "egmrsi/meaning.hpp"
#include "egmrsi/rng.hpp"
#include "egmrsi/safety.hpp"
#include "egmrsi/trace.hpp"

namespace egmrsi {

inline constexpr double kRecurrenceNormFloor = 0.3;      // v_min
inline constexpr double kRecurrenceFrequencyFloor = 0.05;  // p_grad_floor
inline constexpr double kStabilityNormFactor = 10.0;
inline constexpr double kCapabilityRunQuorum = 0.8;  // 4 of 5 seeds
inline constexpr std::size_t kEventualAcceptanceMinSteps = 5000;
// Relative width around Gamma inside which a 9-digit trace cannot decide
// the strict comparison i_pred > Gamma.
inline constexpr double kThresholdAmbiguity = 1e-8;
// Rounding allowance for re-deriving one serialized column from others.
inline constexpr double kSerializationTolerance = 1e-8;

enum class CheckStatus { pass, fail, not_applicable };

inline const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::not_applicable: return "n/a";
    }
    return "?";
}

struct CheckResult {
    std::string name;
    double statistic = 0.0;
    double bound = 0.0;
    CheckStatus status = CheckStatus::pass;
    std::size_t n_samples = 0;
    std::string note;

    bool failed() const noexcept { return status == CheckStatus::fail; }
};

/// One recorded run: its rows and, when present, its summary report.
struct RunArtifacts {
    std::string path;
    std::vector<TraceRow> rows;
    std::optional<KeyValueReport> report;
};

inline std::string report_path_for(const std::string& trace_path) { return trace_path + ".report"; }

inline RunArtifacts load_run(const std::string& trace_path) {
    RunArtifacts a;
    a.path = trace_path;
    a.rows = read_trace_file(trace_path);
    const std::string rp = report_path_for(trace_path);
    if (std::filesystem::exists(rp)) a.report = KeyValueReport::read_file(rp);
    return a;
}

struct StatReport {
    std::vector<CheckResult> checks;

    std::size_t failures() const {
        return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.failed(); }));
    }
    bool all_pass() const { return failures() == 0; }

    const CheckResult* find(const std::string& name) const {
        for (const auto& c : checks) {
            if (c.name == name) return &c;
        }
        return nullptr;
    }

    KeyValueReport to_report() const {
        KeyValueReport r;
        for (const auto& c : checks) {
            const std::string p = "check." + c.name + ".";
            r.set(p + "status", to_string(c.status));
            r.set(p + "statistic", c.statistic);
            r.set(p + "bound", c.bound);
            r.set(p + "n_samples", c.n_samples);
            if (!c.note.empty()) r.set(p + "note", c.note);
        }
        r.set("checks_run", checks.size());
        r.set("checks_failed", failures());
        r.set("overall", all_pass() ? "pass" : "fail");
        return r;
    }
};

// ---------------------------------------------------------------------------
// Synthetic Monte-Carlo experiments

struct TailPoint {
    double threshold = 0.0;
    double frequency = 0.0;
    double std_error = 0.0;
    double envelope = 0.0;
    bool ok = false;
};

/// Half-normal gradient norms |N(0, sigma^2)|: k_max is calibrated on
/// `warmup` draws, then P(norm > k_max (1 + delta)) is estimated on `samples`
/// fresh draws and compared with exp(-c delta^2 k_max^2 / sigma^2) + 3 SE.
inline std::vector<TailPoint> gradient_tail_experiment(std::size_t samples, double sigma,
                                                       std::span<const double> deltas, Rng& rng,
                                                       std::size_t warmup = 1000, double c = 0.1) {
    if (samples == 0 || warmup == 0 || !(sigma > 0.0)) throw PreconditionError("gradient_tail: invalid parameters");
    std::vector<double> cal(warmup);
    for (double& x : cal) x = std::abs(rng.normal(0.0, sigma));
    const double k = calibrate_kmax(cal);
    std::vector<double> draws(samples);
    for (double& x : draws) x = std::abs(rng.normal(0.0, sigma));
    std::vector<TailPoint> out;
    const double n = static_cast<double>(samples);
    for (double delta : deltas) {
        TailPoint p;
        p.threshold = k * (1.0 + delta);
        p.frequency = static_cast<double>(std::count_if(draws.begin(), draws.end(),
                                                        [&](double x) { return x > p.threshold; })) / n;
        p.std_error = std::sqrt(p.frequency * (1.0 - p.frequency) / n);
        p.envelope = std::exp(-c * delta * delta * k * k / (sigma * sigma));
        p.ok = p.frequency <= p.envelope + 3.0 * p.std_error;
        out.push_back(p);
    }
    return out;
}

/// Z = exp(exp(xi)), xi ~ N(0, sigma^2); P(Z > z) against
/// exp(-(log log z)^2 / (2 sigma^2)) + 3 SE. Compared in the log domain
/// (log Z = e^xi) so large draws never overflow.
inline std::vector<TailPoint> double_exp_tail_experiment(std::size_t samples, double sigma,
                                                         std::span<const double> log_z, Rng& rng) {
    if (samples == 0 || !(sigma > 0.0)) throw PreconditionError("double_exp_tail: invalid parameters");
    std::vector<double> log_draws(samples);
    for (double& x : log_draws) x = std::exp(rng.normal(0.0, sigma));
    std::vector<TailPoint> out;
    const double n = static_cast<double>(samples);
    for (double lz : log_z) {
        if (!(lz > 0.0)) throw PreconditionError("double_exp_tail: thresholds must exceed 1");
        TailPoint p;
        p.threshold = lz;
        p.frequency = static_cast<double>(std::count_if(log_draws.begin(), log_draws.end(),
                                                        [&](double x) { return x > lz; })) / n;
        p.std_error = std::sqrt(p.frequency * (1.0 - p.frequency) / n);
        const double ll = std::log(lz);
        p.envelope = std::exp(-0.5 * ll * ll / (sigma * sigma));
        p.ok = p.frequency <= p.envelope + 3.0 * p.std_error;
        out.push_back(p);
    }
    return out;
}

struct TollPoint {
    double epsilon = 0.0;
    double exceedance = 0.0;
    double azuma = 0.0;         // exp(-2 eps^2 / (d eta^2))
    double azuma_steps = 0.0;   // exp(-2 eps^2 / (T d eta^2)), for reference
    bool ok = false;            // exceedance <= factor * azuma
};

/// `trials` toll trajectories of `steps` i.i.d. U[0, eta_max] increments per
/// component; exceedance of ||m_T - E m_T||_1 > eps.
inline std::vector<TollPoint> toll_concentration_experiment(std::size_t trials, std::size_t steps, std::size_t d,
                                                            double eta_max, std::span<const double> epsilons,
                                                            Rng& rng, double factor = 3.0) {
    if (trials == 0 || steps == 0 || d == 0) throw PreconditionError("toll_concentration: invalid parameters");
    const double mean_total = static_cast<double>(steps) * eta_max / 2.0;
    std::vector<double> l1(trials);
    std::vector<double> eta(d);
    for (std::size_t k = 0; k < trials; ++k) {
        TollVector m = TollVector::seeded(std::vector<double>(d, 0.0), eta_max);
        for (std::size_t t = 0; t < steps; ++t) {
            for (double& x : eta) x = rng.uniform(0.0, eta_max);
            for (std::size_t i = 0; i < d; ++i) m.m[i] += eta[i];
        }
        double dev = 0.0;
        for (double x : m.m) dev += std::abs(x - mean_total);
        l1[k] = dev;
    }
    std::vector<TollPoint> out;
    const double dd = static_cast<double>(d);
    for (double eps : epsilons) {
        TollPoint p;
        p.epsilon = eps;
        p.exceedance = static_cast<double>(std::count_if(l1.begin(), l1.end(), [&](double x) { return x > eps; })) /
                       static_cast<double>(trials);
        p.azuma = std::exp(-2.0 * eps * eps / (dd * eta_max * eta_max));
        p.azuma_steps = std::exp(-2.0 * eps * eps / (static_cast<double>(steps) * dd * eta_max * eta_max));
        p.ok = p.exceedance <= factor * p.azuma;
        out.push_back(p);
    }
    return out;
}

struct ChannelMiResult {
    double truth = 0.0;
    MiEstimate matched;  // decoder uses the true crossover
    MiEstimate blurred;  // decoder assumes a noisier channel
};

inline double binary_entropy_nats(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

/// Binary symmetric channel with uniform input. I(X;Y) = log 2 - H(crossover).
inline ChannelMiResult binary_channel_mi(std::size_t samples, double crossover, double blurred_crossover, Rng& rng) {
    if (samples < 2) throw PreconditionError("binary_channel_mi: need at least two samples");
    std::vector<double> q_true, q_blur;
    std::vector<std::size_t> labels;
    q_true.reserve(samples);
    q_blur.reserve(samples);
    labels.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const std::size_t x = rng.below(2);
        const bool flip = rng.bernoulli(crossover);
        const std::size_t y = flip ? 1 - x : x;
        q_true.push_back(flip ? crossover : 1.0 - crossover);
        q_blur.push_back(flip ? blurred_crossover : 1.0 - blurred_crossover);
        labels.push_back(y);
    }
    const std::vector<double> marginal{0.5, 0.5};
    ChannelMiResult r;
    r.truth = std::log(2.0) - binary_entropy_nats(crossover);
    r.matched = mi_plugin_from_probs(q_true, labels, marginal);
    r.blurred = mi_plugin_from_probs(q_blur, labels, marginal);
    return r;
}

// ---------------------------------------------------------------------------
// Registry

enum class CheckKind { trace, synthetic };

struct VerifyOptions {
    std::uint64_t seed = 20240601;
    std::size_t tail_samples = 100000;
    std::size_t toll_trials = 1000;
    std::size_t toll_steps = 10000;
    std::size_t mi_samples = 50000;
};

struct CheckSpec {
    std::string name;
    CheckKind kind;
    std::string description;
    std::function<CheckResult(std::span<const RunArtifacts>, const VerifyOptions&)> run;
};

namespace verify_detail {

/// Per-run outcome; `slack` >= 0 passes and picks the reported run.
struct RunOutcome {
    double statistic = 0.0;
    double bound = 0.0;
    double slack = 0.0;
    std::size_t n = 0;
    std::string note;
    bool applicable = true;
};

inline double constant(const RunArtifacts& a, const std::string& key) {
    if (!a.report) throw Error(a.path + ": no run summary (" + report_path_for(a.path) + ")");
    return a.report->get_real(key);
}

/// Worst applicable run decides; a run that throws (missing summary) fails.
template <class PerRun>
CheckResult per_run(const std::string& name, std::span<const RunArtifacts> runs, PerRun&& fn) {
    CheckResult r;
    r.name = name;
    if (runs.empty()) {
        r.status = CheckStatus::not_applicable;
        r.note = "no traces";
        return r;
    }
    std::optional<RunOutcome> worst;
    std::string worst_path;
    std::size_t total = 0;
    for (const RunArtifacts& a : runs) {
        RunOutcome o;
        try {
            o = fn(a);
        } catch (const std::exception& e) {
            r.status = CheckStatus::fail;
            r.note = e.what();
            return r;
        }
        if (!o.applicable) continue;
        total += o.n;
        if (!worst || o.slack < worst->slack) {
            worst = o;
            worst_path = a.path;
        }
    }
    if (!worst) {
        r.status = CheckStatus::not_applicable;
        r.note = "not applicable to the selected traces";
        return r;
    }
    r.statistic = worst->statistic;
    r.bound = worst->bound;
    r.n_samples = total;
    r.status = worst->slack >= 0.0 ? CheckStatus::pass : CheckStatus::fail;
    r.note = worst->note;
    if (runs.size() > 1) r.note = (r.note.empty() ? "" : r.note + "; ") + "worst run " + worst_path;
    return r;
}

/// Counts offending rows; statistic = offenders, bound = 0.
template <class Bad>
RunOutcome count_rows(const RunArtifacts& a, Bad&& bad) {
    RunOutcome o;
    std::optional<std::int64_t> first;
    for (const TraceRow& row : a.rows) {
        if (bad(row)) {
            o.statistic += 1.0;
            if (!first) first = row.t;
        }
    }
    o.n = a.rows.size();
    o.slack = -o.statistic;
    if (first) o.note = "first offending step " + std::to_string(*first);
    return o;
}

inline double sample_mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

inline double sample_sd(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = sample_mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

inline CheckResult synthetic(const std::string& name, double stat, double bound, bool ok, std::size_t n,
                             std::string note) {
    CheckResult r;
    r.name = name;
    r.statistic = stat;
    r.bound = bound;
    r.status = ok ? CheckStatus::pass : CheckStatus::fail;
    r.n_samples = n;
    r.note = std::move(note);
    return r;
}

inline std::vector<CheckSpec> build_registry() {
    std::vector<CheckSpec> reg;
    const auto trace_check = [&](std::string name, std::string what, auto fn) {
        reg.push_back({name, CheckKind::trace, std::move(what),
                       [name, fn](std::span<const RunArtifacts> runs, const VerifyOptions&) {
                           return per_run(name, runs, fn);
                       }});
    };

    trace_check("clip_bound", "post-clip gradient norm <= k_max on every row", [](const RunArtifacts& a) {
        return count_rows(a, [](const TraceRow& r) { return !(r.grad_norm_post <= r.k_max); });
    });

    trace_check("trigger_biconditional", "fired <=> (eps_t > 0 and i_pred > Gamma) on every row",
                [](const RunArtifacts& a) {
                    const double gamma = constant(a, "gamma");
                    const double width = kThresholdAmbiguity * std::max(1.0, std::abs(gamma));
                    std::size_t ambiguous = 0;
                    RunOutcome o = count_rows(a, [&](const TraceRow& r) {
                        if (std::abs(r.i_pred - gamma) <= width) {
                            ++ambiguous;
                            return false;
                        }
                        const bool viable = r.eps_t > 0.0 && r.i_pred > gamma;
                        return (r.fired != 0) != viable;
                    });
                    o.note += (o.note.empty() ? "" : "; ") + std::to_string(ambiguous) + " rows within rounding of Gamma";
                    return o;
                });

    trace_check("md_mce_bounds", "0 <= MD < log|Y| and |MCE| <= log|Y| on every row", [](const RunArtifacts& a) {
        const double log_k = std::log(constant(a, "num_classes"));
        return count_rows(a, [&](const TraceRow& r) {
            return !(r.md >= 0.0 && r.md < log_k && std::abs(r.mce) <= log_k);
        });
    });

    trace_check("mi_entropy_bound", "window MI estimate <= log|Y| on every row", [](const RunArtifacts& a) {
        const double log_k = std::log(constant(a, "num_classes"));
        return count_rows(a, [&](const TraceRow& r) { return !(r.i_pred <= log_k * (1.0 + kSerializationTolerance)); });
    });

    trace_check("external_reward_bound", "|r_ext| <= r_max on every row", [](const RunArtifacts& a) {
        const double r_max = constant(a, "r_max");
        return count_rows(a, [&](const TraceRow& r) { return !(std::abs(r.r_ext) <= r_max); });
    });

    trace_check("submartingale_drift", "mean per-step reward >= -3 sd / sqrt(N)", [](const RunArtifacts& a) {
        RunOutcome o;
        std::vector<double> x;
        x.reserve(a.rows.size());
        for (const TraceRow& r : a.rows) x.push_back(r.total);
        o.n = x.size();
        if (x.size() < 2) {
            o.applicable = false;
            return o;
        }
        o.statistic = sample_mean(x);
        o.bound = -3.0 * sample_sd(x) / std::sqrt(static_cast<double>(x.size()));
        o.slack = o.statistic - o.bound;
        return o;
    });

    trace_check("recurrence_frequency", "fraction of rows with ||v_t|| >= 0.3 is >= 0.05", [](const RunArtifacts& a) {
        RunOutcome o;
        o.n = a.rows.size();
        if (a.rows.empty()) {
            o.applicable = false;
            return o;
        }
        std::size_t hits = 0;
        for (const TraceRow& r : a.rows) {
            const double norm = std::sqrt(r.c * r.c + r.e * r.e + r.n * r.n + r.S * r.S);
            if (norm >= kRecurrenceNormFloor) ++hits;
        }
        o.statistic = static_cast<double>(hits) / static_cast<double>(a.rows.size());
        o.bound = kRecurrenceFrequencyFloor;
        o.slack = o.statistic - o.bound;
        return o;
    });

    trace_check("toll_envelope", "||m_t||_1 <= ||m_0||_1 + 3 sqrt(d eta^2 log t / 2) on every row",
                [](const RunArtifacts& a) {
                    const double m0 = constant(a, "m0_l1");
                    const auto d = static_cast<std::size_t>(constant(a, "d_toll"));
                    const double eta = constant(a, "eta_max");
                    return count_rows(a, [&](const TraceRow& r) {
                        const double bound = m0 + toll_envelope(d, eta, static_cast<std::size_t>(r.t) + 1);
                        return !(r.toll_l1 <= bound + kSerializationTolerance);
                    });
                });

    trace_check("safety_region", "in_region holds at every audit checkpoint", [](const RunArtifacts& a) {
        return count_rows(a, [](const TraceRow& r) { return r.in_region != 1; });
    });

    trace_check("lipschitz_step", "||h_{t+1} - h_t|| <= L_M eta_M min(eps_t, k_max); zero when not fired",
                [](const RunArtifacts& a) {
                    const double scale = constant(a, "lipschitz_cap") * constant(a, "eta_m");
                    return count_rows(a, [&](const TraceRow& r) {
                        if (r.fired == 0) return r.h_step != 0.0;
                        const double cap = scale * std::min(std::max(r.eps_t, 0.0), r.k_max);
                        return !(r.h_step <= cap * (1.0 + kSerializationTolerance) + 1e-15);
                    });
                });

    trace_check("stability_radius", "||h_t|| <= ||h_0|| + L_M k_max N_rsi eta_M and <= 10 ||h_0||",
                [](const RunArtifacts& a) {
                    const double h0 = constant(a, "h0_norm");
                    const double scale = constant(a, "lipschitz_cap") * constant(a, "eta_m");
                    double k_seen = 0.0;
                    double worst_ratio = 0.0;
                    RunOutcome o = count_rows(a, [&](const TraceRow& r) {
                        k_seen = std::max(k_seen, r.k_max);
                        worst_ratio = std::max(worst_ratio, h0 > 0.0 ? r.h_norm / h0 : 0.0);
                        const double radius = h0 + scale * k_seen * static_cast<double>(r.rsi_count);
                        return !(r.h_norm <= radius * (1.0 + kSerializationTolerance)) ||
                               !(r.h_norm <= kStabilityNormFactor * h0);
                    });
                    o.note += (o.note.empty() ? "" : "; ") + std::string("max ||h_t||/||h_0|| = ") + format_real(worst_ratio);
                    return o;
                });

    trace_check("reward_accounting", "parts sum to the total per row; summary total equals the column sum exactly",
                [](const RunArtifacts& a) {
                    const double reported = constant(a, "cumulative_reward");
                    double column = 0.0;
                    RunOutcome o = count_rows(a, [&](const TraceRow& r) {
                        column += r.total;
                        const double parts = r.base_f + r.spikes + r.penalty + r.dg_bonus + r.baseline_bonus +
                                             r.md_bonus + r.mce_bonus + r.external_mixed;
                        const double scale = 1.0 + std::abs(r.base_f) + std::abs(r.spikes) + std::abs(r.penalty) +
                                             std::abs(r.dg_bonus) + std::abs(r.baseline_bonus) + std::abs(r.md_bonus) +
                                             std::abs(r.mce_bonus) + std::abs(r.external_mixed);
                        return !(std::abs(parts - r.total) <= kSerializationTolerance * scale);
                    });
                    if (column != reported) {
                        o.statistic += 1.0;
                        o.slack = -o.statistic;
                        o.note += (o.note.empty() ? "" : "; ") + std::string("summary ") + format_exact(reported) +
                                  " != column sum " + format_exact(column);
                    }
                    return o;
                });

    trace_check("goal_monotone", "|G_t| (active goals) never decreases", [](const RunArtifacts& a) {
        std::int64_t prev = 0;
        return count_rows(a, [&](const TraceRow& r) {
            const bool bad = r.goals_active < prev;
            prev = r.goals_active;
            return bad;
        });
    });

    trace_check("goal_injection_rate", "injection count within 3 sigma of T p_gen", [](const RunArtifacts& a) {
        RunOutcome o;
        const double p = constant(a, "p_gen");
        const auto steps = static_cast<double>(a.rows.size());
        o.n = a.rows.size();
        if (a.rows.empty()) {
            o.applicable = false;
            return o;
        }
        double count = 0.0;
        for (const TraceRow& r : a.rows) count += r.goal_injected != 0 ? 1.0 : 0.0;
        o.statistic = std::abs(count - steps * p);
        o.bound = 3.0 * std::sqrt(steps * p * (1.0 - p));
        o.slack = o.bound - o.statistic;
        o.note = "injections " + format_real(count) + ", expected " + format_real(steps * p);
        return o;
    });

    trace_check("goal_eventual_acceptance", "every admissible injection batch has an active goal by run end",
                [](const RunArtifacts& a) {
                    RunOutcome o;
                    o.n = a.rows.size();
                    if (a.rows.size() < kEventualAcceptanceMinSteps) {
                        o.applicable = false;
                        return o;
                    }
                    o.statistic = static_cast<double>(a.rows.back().batches_pending);
                    o.slack = -o.statistic;
                    return o;
                });

    reg.push_back({"capability_quasi_monotone", CheckKind::trace,
                   "negative capability increments <= 2 per run; >= 80% of runs end at or above the initial capability",
                   [](std::span<const RunArtifacts> runs, const VerifyOptions&) {
                       CheckResult r;
                       r.name = "capability_quasi_monotone";
                       if (runs.empty()) {
                           r.status = CheckStatus::not_applicable;
                           r.note = "no traces";
                           return r;
                       }
                       std::size_t ending_ok = 0;
                       double worst_negative = 0.0;
                       double budget = 0.0;
                       try {
                           for (const RunArtifacts& a : runs) {
                               double prev = constant(a, "capability_initial");
                               budget = constant(a, "neg_budget");
                               const double initial = prev;
                               double negative = 0.0;
                               for (const TraceRow& row : a.rows) {
                                   negative += std::max(0.0, prev - row.capability);
                                   prev = row.capability;
                               }
                               worst_negative = std::max(worst_negative, negative);
                               if (prev >= initial) ++ending_ok;
                               r.n_samples += a.rows.size();
                           }
                       } catch (const std::exception& e) {
                           r.status = CheckStatus::fail;
                           r.note = e.what();
                           return r;
                       }
                       const auto needed = static_cast<std::size_t>(
                           std::ceil(kCapabilityRunQuorum * static_cast<double>(runs.size()) - 1e-12));
                       r.statistic = worst_negative;
                       r.bound = budget;
                       const bool ok = worst_negative <= budget && ending_ok >= needed;
                       r.status = ok ? CheckStatus::pass : CheckStatus::fail;
                       r.note = std::to_string(ending_ok) + "/" + std::to_string(runs.size()) +
                                " runs end at or above the initial capability (need " + std::to_string(needed) + ")";
                       return r;
                   }});

    reg.push_back({"gradient_tail", CheckKind::synthetic,
                   "half-normal norms: P(norm > k_max (1+delta)) <= exp(-0.1 delta^2 k_max^2 / sigma^2) + 3 SE",
                   [](std::span<const RunArtifacts>, const VerifyOptions& opt) {
                       Rng rng(opt.seed, Stream::verification);
                       const std::vector<double> deltas{0.1, 0.5, 1.0};
                       const auto pts = gradient_tail_experiment(opt.tail_samples, 1.0, deltas, rng);
                       bool ok = true;
                       double stat = 0.0, bound = 0.0, margin = std::numeric_limits<double>::infinity();
                       std::string note;
                       for (std::size_t i = 0; i < pts.size(); ++i) {
                           ok = ok && pts[i].ok;
                           const double m = pts[i].envelope + 3.0 * pts[i].std_error - pts[i].frequency;
                           if (m < margin) {
                               margin = m;
                               stat = pts[i].frequency;
                               bound = pts[i].envelope + 3.0 * pts[i].std_error;
                           }
                           note += (i ? "; " : "") + std::string("delta=") + format_real(deltas[i]) + ": " +
                                   format_real(pts[i].frequency) + " vs " + format_real(pts[i].envelope);
                       }
                       return synthetic("gradient_tail", stat, bound, ok, opt.tail_samples, note);
                   }});

    reg.push_back({"double_exp_tail", CheckKind::synthetic,
                   "Z = exp(exp(xi)): P(Z > z) <= exp(-(log log z)^2 / (2 sigma^2)) + 3 SE at z in {e, e^2, e^4}",
                   [](std::span<const RunArtifacts>, const VerifyOptions& opt) {
                       Rng rng(mix_seed(opt.seed) ^ 0x7A11ULL, Stream::verification);
                       const std::vector<double> log_z{1.0, 2.0, 4.0};
                       const auto pts = double_exp_tail_experiment(opt.tail_samples, 1.0, log_z, rng);
                       bool ok = true;
                       double stat = 0.0, bound = 0.0, margin = std::numeric_limits<double>::infinity();
                       std::string note;
                       for (std::size_t i = 0; i < pts.size(); ++i) {
                           ok = ok && pts[i].ok;
                           const double m = pts[i].envelope + 3.0 * pts[i].std_error - pts[i].frequency;
                           if (m < margin) {
                               margin = m;
                               stat = pts[i].frequency;
                               bound = pts[i].envelope + 3.0 * pts[i].std_error;
                           }
                           note += (i ? "; " : "") + std::string("log z=") + format_real(log_z[i]) + ": " +
                                   format_real(pts[i].frequency) + " vs " + format_real(pts[i].envelope);
                       }
                       return synthetic("double_exp_tail", stat, bound, ok, opt.tail_samples, note);
                   }});

    reg.push_back({"toll_concentration", CheckKind::synthetic,
                   "U[0, eta_max] tolls, d=4, T steps: P(||m_T - E m_T||_1 > eps) <= 3 exp(-2 eps^2 / (d eta^2))",
                   [](std::span<const RunArtifacts>, const VerifyOptions& opt) {
                       Rng rng(mix_seed(opt.seed) ^ 0x7011ULL, Stream::verification);
                       const std::vector<double> eps{0.5, 1.0};
                       const auto pts = toll_concentration_experiment(opt.toll_trials, opt.toll_steps, 4, 0.01, eps, rng);
                       bool ok = true;
                       double stat = 0.0, bound = 0.0, margin = std::numeric_limits<double>::infinity();
                       std::string note;
                       for (std::size_t i = 0; i < pts.size(); ++i) {
                           ok = ok && pts[i].ok;
                           const double m = 3.0 * pts[i].azuma - pts[i].exceedance;
                           if (m < margin) {
                               margin = m;
                               stat = pts[i].exceedance;
                               bound = 3.0 * pts[i].azuma;
                           }
                           note += (i ? "; " : "") + std::string("eps=") + format_real(pts[i].epsilon) +
                                   ": exceedance " + format_real(pts[i].exceedance) + ", bound " +
                                   format_real(pts[i].azuma) + ", T-scaled bound " + format_real(pts[i].azuma_steps);
                       }
                       return synthetic("toll_concentration", stat, bound, ok, opt.toll_trials, note);
                   }});

    reg.push_back({"mi_lower_bound", CheckKind::synthetic,
                   "binary channel (crossover 0.1): matched decoder within 3 SE of the true MI; blurred decoder "
                   "below MI + 3 SE",
                   [](std::span<const RunArtifacts>, const VerifyOptions& opt) {
                       Rng rng(mix_seed(opt.seed) ^ 0x3111ULL, Stream::verification);
                       const ChannelMiResult r = binary_channel_mi(opt.mi_samples, 0.1, 0.25, rng);
                       const double dev = std::abs(r.matched.value - r.truth);
                       const bool matched_ok = dev <= 3.0 * r.matched.std_error;
                       const bool blurred_ok = r.blurred.value < r.truth + 3.0 * r.blurred.std_error;
                       return synthetic("mi_lower_bound", dev, 3.0 * r.matched.std_error, matched_ok && blurred_ok,
                                        opt.mi_samples,
                                        "true MI " + format_real(r.truth) + ", matched " + format_real(r.matched.value) +
                                            ", blurred " + format_real(r.blurred.value));
                   }});
    return reg;
}

}  // namespace verify_detail

inline const std::vector<CheckSpec>& registry() {
    static const std::vector<CheckSpec> reg = verify_detail::build_registry();
    return reg;
}

inline const CheckSpec& find_check(const std::string& name) {
    for (const CheckSpec& c : registry()) {
        if (c.name == name) return c;
    }
    throw PreconditionError("unknown check '" + name + "'");
}

inline std::vector<std::string> checks_of_kind(CheckKind kind) {
    std::vector<std::string> out;
    for (const CheckSpec& c : registry()) {
        if (c.kind == kind) out.push_back(c.name);
    }
    return out;
}

inline std::vector<std::string> all_checks() {
    std::vector<std::string> out;
    for (const CheckSpec& c : registry()) out.push_back(c.name);
    return out;
}

/// Runs each selected check once, in registry order. Unknown names throw
/// before anything runs; an empty selection yields an empty report.
inline StatReport verify(std::span<const RunArtifacts> runs, std::span<const std::string> selection,
                         const VerifyOptions& opt = {}) {
    std::set<std::string> wanted;
    for (const std::string& s : selection) {
        (void)find_check(s);
        wanted.insert(s);
    }
    StatReport rep;
    for (const CheckSpec& c : registry()) {
        if (wanted.contains(c.name)) rep.checks.push_back(c.run(runs, opt));
    }
    return rep;
}

inline StatReport verify_files(std::span<const std::string> trace_paths, std::span<const std::string> selection,
                               const VerifyOptions& opt = {}) {
    std::vector<RunArtifacts> runs;
    for (const std::string& p : trace_paths) runs.push_back(load_run(p));
    return verify(runs, selection, opt);
}

}  // namespace egmrsi

#endif
