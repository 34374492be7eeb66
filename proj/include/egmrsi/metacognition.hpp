#ifndef EGMRSI_METACOGNITION_HPP
#define EGMRSI_METACOGNITION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "egmrsi/emotion.hpp"
#include "egmrsi/errors.hpp"

namespace egmrsi {

inline constexpr double kDistFloor = 1e-9;

/// Floors every entry at `floor` and renormalizes, so log() is always finite.
inline std::vector<double> floor_normalize(std::span<const double> p, double floor = kDistFloor) {
    std::vector<double> out(p.begin(), p.end());
    double total = 0.0;
    for (double& x : out) {
        x = std::max(x, floor);
        total += x;
    }
    for (double& x : out) x /= total;
    return out;
}

inline double entropy(std::span<const double> p) {
    double h = 0.0;
    for (double x : p) {
        if (x > 0.0) h -= x * std::log(x);
    }
    return h;
}

/// KL(p || q) in nats; both inputs must already be floored.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) d += p[i] * (std::log(p[i]) - std::log(q[i]));
    }
    return std::max(d, 0.0);
}

inline void check_distribution(std::span<const double> p, const char* name) {
    double total = 0.0;
    for (double x : p) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw PreconditionError(std::string(name) + " has a negative or non-finite entry");
        }
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-6) {
        throw PreconditionError(std::string(name) + " does not sum to 1 (sum = " +
                                std::to_string(total) + ")");
    }
}

struct PredictionRecord {
    std::vector<double> predictive;  // current predictive distribution over Y
    std::size_t true_label = 0;
    std::vector<double> prior;  // previous model's predictive distribution for the same input
};

enum class ConfidenceMode { entropy, margin };

/// Raw metacognitive reading of one prediction: (c, e, n). The success
/// memory is carried over from `prev` unchanged; it has its own recursion.
///
///   c = 1 - H(p)/log|Y|          (or top1 - top2 in margin mode)
///   e = 1 - p(true label)
///   n = 1 - exp(-KL(p || prior))
inline MetaVector lambda_map(const PredictionRecord& rec, const MetaVector& prev,
                             ConfidenceMode mode = ConfidenceMode::entropy,
                             double s_cap = kDefaultSuccessCap) {
    const std::size_t k = rec.predictive.size();
    if (k < 2) throw PreconditionError("lambda_map: label space needs at least 2 classes");
    if (rec.prior.size() != k) {
        throw PreconditionError("lambda_map: prior has " + std::to_string(rec.prior.size()) +
                                " entries, predictive has " + std::to_string(k));
    }
    if (rec.true_label >= k) throw PreconditionError("lambda_map: true label outside Y");
    check_distribution(rec.predictive, "predictive distribution");
    check_distribution(rec.prior, "prior distribution");

    const std::vector<double> p = floor_normalize(rec.predictive);
    const std::vector<double> q = floor_normalize(rec.prior);

    MetaVector v;
    if (mode == ConfidenceMode::entropy) {
        v.c = 1.0 - entropy(p) / std::log(static_cast<double>(k));
    } else {
        std::vector<double> sorted = p;
        std::partial_sort(sorted.begin(), sorted.begin() + 2, sorted.end(), std::greater<>());
        v.c = sorted[0] - sorted[1];
    }
    v.e = 1.0 - p[rec.true_label];
    v.n = -std::expm1(-kl_divergence(p, q));
    v.s = prev.s;
    return v.clamped(s_cap);
}

/// S' = clamp(lambda * S + r_ext, 0, s_cap).
inline double success_update(double s, double r_ext, double lambda_decay,
                             double s_cap = kDefaultSuccessCap) {
    if (!(lambda_decay >= 0.0 && lambda_decay < 1.0)) {
        throw PreconditionError("success_update: lambda_decay must lie in [0, 1)");
    }
    return std::clamp(lambda_decay * s + r_ext, 0.0, s_cap);
}

/// Moves the (c, e, n) part of `state` a fraction `rate` toward `reading`.
/// rate = 1 makes the state equal the latest reading.
inline MetaVector integrate_reading(const MetaVector& state, const MetaVector& reading,
                                    double rate) {
    MetaVector out = state;
    out.c += rate * (reading.c - state.c);
    out.e += rate * (reading.e - state.e);
    out.n += rate * (reading.n - state.n);
    return out;
}

}  // namespace egmrsi

#endif
