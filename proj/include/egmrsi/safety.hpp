#ifndef EGMRSI_SAFETY_HPP
#define EGMRSI_SAFETY_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "egmrsi/errors.hpp"
#include "egmrsi/trace.hpp"

namespace egmrsi {

inline constexpr double kInitialOversightRate = 0.02;
inline constexpr double kTollSeedFraction = 0.05;
inline constexpr double kEnvelopeConstant = 3.0;

/// Nonnegative regulatory counters with capped per-step increments.
struct TollVector {
    std::vector<double> m;
    double eta_max = 0.01;
    std::vector<double> thresholds;

    /// m_0 = 5% of the critical thresholds.
    static TollVector seeded(std::vector<double> thresholds, double eta_max) {
        if (thresholds.empty()) throw ConfigError("toll vector needs at least one component");
        if (!(eta_max > 0.0)) throw ConfigError("safety.eta_max must be > 0");
        TollVector t;
        t.eta_max = eta_max;
        t.m.reserve(thresholds.size());
        for (double x : thresholds) {
            if (!(x >= 0.0)) throw ConfigError("toll thresholds must be >= 0");
            t.m.push_back(kTollSeedFraction * x);
        }
        t.thresholds = std::move(thresholds);
        return t;
    }

    std::size_t dim() const noexcept { return m.size(); }

    double l1() const noexcept {
        double s = 0.0;
        for (double x : m) s += x;
        return s;
    }
};

/// m' = m + eta; every increment component must lie in [0, eta_max].
inline TollVector toll_update(const TollVector& t, std::span<const double> eta) {
    if (eta.size() != t.m.size()) throw PreconditionError("toll_update: increment dimension mismatch");
    TollVector out = t;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        if (!(eta[i] >= 0.0 && eta[i] <= t.eta_max)) {
            throw BoundsViolation("toll increment " + std::to_string(eta[i]) + " outside [0, " +
                                  std::to_string(t.eta_max) + "]");
        }
        out.m[i] += eta[i];
    }
    return out;
}

/// alpha* = gamma / (2 k_max).
inline double safe_alpha(double gamma_est, double k_max) {
    if (!(gamma_est > 0.0) || !(k_max > 0.0)) throw PreconditionError("safe_alpha: inputs must be positive");
    return gamma_est / (2.0 * k_max);
}

struct BufferCaps {
    double cap_dg = 0.0;
    double cap_bl = 0.0;
};

/// Both caps equal gamma * k_max / 4.
inline BufferCaps buffer_caps(double gamma_est, double k_max) {
    if (!(gamma_est >= 0.0) || !(k_max > 0.0)) throw PreconditionError("buffer_caps: invalid inputs");
    const double cap = gamma_est * k_max / 4.0;
    return {cap, cap};
}

/// Azuma-style envelope on the toll L1 growth: 3 * sqrt(d * eta_max^2 * log(T) / 2).
inline double toll_envelope(std::size_t d_toll, double eta_max, std::size_t steps) {
    const double log_t = steps > 1 ? std::log(static_cast<double>(steps)) : 0.0;
    return kEnvelopeConstant * std::sqrt(static_cast<double>(d_toll) * eta_max * eta_max * log_t / 2.0);
}

struct SafetyState {
    double k_max = 10.0;
    double alpha = 0.1;
    double alpha_star = 0.0;
    double l0_ext = kInitialOversightRate;
    double xi_dg = 0.0;
    double xi_bl = 0.0;
    double cap_dg = 0.0;
    double cap_bl = 0.0;
    double gamma = 0.0;
    bool in_region = true;
};

struct InvariantReport {
    bool clip_ok = true;
    bool toll_ok = true;
    bool alpha_ok = true;
    bool caps_ok = true;
    bool in_region = true;
    double max_post_norm = 0.0;
    double toll_l1 = 0.0;
    double toll_bound = 0.0;
    std::size_t first_clip_violation = 0;  // row t of the first offending row

    std::string summary() const {
        std::string s;
        if (!clip_ok) s += "clip ";
        if (!toll_ok) s += "toll ";
        if (!alpha_ok) s += "alpha ";
        if (!caps_ok) s += "caps ";
        return s.empty() ? "ok" : s;
    }
};

/// (a) post-clip norms <= k_max over the window, (b) toll within the
/// envelope after `steps` steps, (c) alpha < alpha*, (d) xi weights within
/// their caps. in_region is the conjunction.
inline InvariantReport audit(std::span<const TraceRow> window, const SafetyState& s, const TollVector& toll,
                             std::size_t steps, double m0_l1) {
    InvariantReport r;
    for (const TraceRow& row : window) {
        r.max_post_norm = std::max(r.max_post_norm, row.grad_norm_post);
        if (!(row.grad_norm_post <= row.k_max) && r.clip_ok) {
            r.clip_ok = false;
            r.first_clip_violation = static_cast<std::size_t>(row.t);
        }
    }
    r.toll_l1 = toll.l1();
    r.toll_bound = m0_l1 + toll_envelope(toll.dim(), toll.eta_max, steps);
    r.toll_ok = r.toll_l1 <= r.toll_bound + 1e-12;
    r.alpha_ok = s.alpha < s.alpha_star;
    r.caps_ok = s.xi_dg <= s.cap_dg && s.xi_bl <= s.cap_bl;
    r.in_region = r.clip_ok && r.toll_ok && r.alpha_ok && r.caps_ok;
    return r;
}

}  // namespace egmrsi

#endif
