#ifndef EGMRSI_EMOTION_HPP
#define EGMRSI_EMOTION_HPP

// Double-exponential emotion potential f(v) = exp(exp(w.v)) - 1, its
// closed-form gradient, norm clipping and the robust clip-threshold
// calibration (median + 3 MAD).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "egmrsi/errors.hpp"

namespace egmrsi {

using Vec4 = std::array<double, 4>;

inline constexpr double kDefaultSuccessCap = 10.0;
inline constexpr double kDefaultMadFloor = 0.01;

/// Largest exp(u) for which exp(exp(u)) is still a finite double.
inline const double kMaxInnerExp = std::log(std::numeric_limits<double>::max());

struct MetaVector {
    double c = 0.5;  // confidence
    double e = 1.0;  // predicted absolute error
    double n = 0.0;  // novelty expectation
    double s = 0.0;  // success memory

    Vec4 as_array() const noexcept { return {c, e, n, s}; }

    static MetaVector from_array(const Vec4& a) noexcept { return {a[0], a[1], a[2], a[3]}; }

    /// Box invariant: c, e, n in [0,1]; s in [0, s_cap].
    MetaVector clamped(double s_cap = kDefaultSuccessCap) const noexcept {
        return {std::clamp(c, 0.0, 1.0), std::clamp(e, 0.0, 1.0), std::clamp(n, 0.0, 1.0),
                std::clamp(s, 0.0, s_cap)};
    }

    double norm() const noexcept { return std::sqrt(c * c + e * e + n * n + s * s); }

    friend bool operator==(const MetaVector&, const MetaVector&) = default;
};

/// Weights of the linear argument u = w.v. Construction enforces the
/// stability region w_c > 0, w_n > 0, w_e < 0, ||w||_1 <= 3.
class EmotionWeights {
public:
    /// (1.2, -0.8, 0.6) extended with w_s = 0.4 so that ||w||_1 = 3.
    EmotionWeights() : EmotionWeights(1.2, -0.8, 0.6, 0.4) {}

    EmotionWeights(double w_c, double w_e, double w_n, double w_s) : w_{w_c, w_e, w_n, w_s} {
        const std::string reason = violation(w_c, w_e, w_n, w_s);
        if (!reason.empty()) throw ConfigError("emotion weights outside stability region: " + reason);
    }

    /// Empty string when admissible, else a human-readable reason.
    static std::string violation(double w_c, double w_e, double w_n, double w_s) {
        if (!(w_c > 0.0)) return "w_c must be > 0";
        if (!(w_n > 0.0)) return "w_n must be > 0";
        if (!(w_e < 0.0)) return "w_e must be < 0";
        const double l1 = std::abs(w_c) + std::abs(w_e) + std::abs(w_n) + std::abs(w_s);
        if (!(l1 <= 3.0 + 1e-12)) return "||w||_1 = " + std::to_string(l1) + " exceeds 3";
        return {};
    }

    double c() const noexcept { return w_[0]; }
    double e() const noexcept { return w_[1]; }
    double n() const noexcept { return w_[2]; }
    double s() const noexcept { return w_[3]; }
    const Vec4& as_array() const noexcept { return w_; }

    double dot(const MetaVector& v) const noexcept {
        return w_[0] * v.c + w_[1] * v.e + w_[2] * v.n + w_[3] * v.s;
    }

private:
    Vec4 w_;
};

/// log(f(v) + 1) = exp(w.v). Finite for any u below ~709.
inline double log_potential(const MetaVector& v, const EmotionWeights& w) {
    return std::exp(w.dot(v));
}

/// f(v) = exp(exp(u)) - 1 evaluated as expm1 of the log-domain value.
/// Throws OverflowError when the linear value is not representable; use
/// log_potential() in that regime.
inline double potential(const MetaVector& v, const EmotionWeights& w) {
    const double inner = log_potential(v, w);
    if (!(inner <= kMaxInnerExp)) {
        throw OverflowError("emotion potential overflows for u = " + std::to_string(w.dot(v)) +
                            "; request the log-domain value");
    }
    return std::expm1(inner);
}

/// Unclipped analytic gradient exp(u + e^u) * w.
inline Vec4 gradient(const MetaVector& v, const EmotionWeights& w) {
    const double u = w.dot(v);
    const double log_scale = u + std::exp(u);
    if (!(log_scale <= kMaxInnerExp)) {
        throw OverflowError("emotion gradient overflows for u = " + std::to_string(u));
    }
    const double scale = std::exp(log_scale);
    const Vec4& a = w.as_array();
    return {scale * a[0], scale * a[1], scale * a[2], scale * a[3]};
}

template <std::size_t N>
double l2_norm(const std::array<double, N>& x) noexcept {
    double acc = 0.0;
    for (double xi : x) acc += xi * xi;
    return std::sqrt(acc);
}

inline double l2_norm(std::span<const double> x) noexcept {
    double acc = 0.0;
    for (double xi : x) acc += xi * xi;
    return std::sqrt(acc);
}

/// Rescale g onto the k_max ball when it lies outside; identity otherwise.
/// The result's norm never exceeds k_max.
template <std::size_t N>
std::array<double, N> clip(const std::array<double, N>& g, double k_max) {
    const double norm = l2_norm(g);
    if (norm <= k_max) return g;
    std::array<double, N> out{};
    const double scale = k_max / norm;
    for (std::size_t i = 0; i < N; ++i) out[i] = g[i] * scale;
    // Rounding can leave the rescaled norm one ulp above k_max.
    while (l2_norm(out) > k_max) {
        for (double& x : out) x = std::nextafter(x, 0.0);
    }
    return out;
}

inline std::vector<double> clip(std::span<const double> g, double k_max) {
    std::vector<double> out(g.begin(), g.end());
    const double norm = l2_norm(g);
    if (norm <= k_max) return out;
    const double scale = k_max / norm;
    for (double& x : out) x *= scale;
    while (l2_norm(out) > k_max) {
        for (double& x : out) x = std::nextafter(x, 0.0);
    }
    return out;
}

/// Directional derivative of f along the realized metacognitive motion:
/// eps_t = <clipped grad f(v_t), v_t - v_{t-1}>.
inline double scalar_drive(const Vec4& grad_clipped, const Vec4& delta_v) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < 4; ++i) acc += grad_clipped[i] * delta_v[i];
    return acc;
}

/// Median; even-length inputs average the two central order statistics.
inline double median(std::vector<double> xs) {
    if (xs.empty()) throw PreconditionError("median of an empty sample");
    const std::size_t mid = xs.size() / 2;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
    const double upper = xs[mid];
    if (xs.size() % 2 == 1) return upper;
    const double lower = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

/// Median absolute deviation around the median (unscaled).
inline double median_absolute_deviation(std::span<const double> xs) {
    const double m = median(std::vector<double>(xs.begin(), xs.end()));
    std::vector<double> dev;
    dev.reserve(xs.size());
    for (double x : xs) dev.push_back(std::abs(x - m));
    return median(std::move(dev));
}

/// k_max = median + 3 * max(MAD, mad_floor) over the warm-up gradient norms.
inline double calibrate_kmax(std::span<const double> warmup_norms,
                             double mad_floor = kDefaultMadFloor) {
    if (warmup_norms.empty()) throw PreconditionError("calibrate_kmax: empty warm-up window");
    const double m = median(std::vector<double>(warmup_norms.begin(), warmup_norms.end()));
    const double mad = median_absolute_deviation(warmup_norms);
    return m + 3.0 * std::max(mad, mad_floor);
}

/// Clip threshold plus the warm-up window that defines it. Before
/// calibration a provisional threshold applies.
struct ClipState {
    double k_max = 10.0;
    std::vector<double> warmup_norms;
    std::size_t warmup_len = 16;
    double mad_floor = kDefaultMadFloor;
    bool calibrated = false;

    /// Records one pre-clip norm during warm-up; calibrates once the window is full.
    void observe(double norm) {
        if (calibrated) return;
        warmup_norms.push_back(norm);
        if (warmup_norms.size() >= warmup_len) {
            k_max = calibrate_kmax(warmup_norms, mad_floor);
            calibrated = true;
        }
    }
};

}  // namespace egmrsi

#endif
