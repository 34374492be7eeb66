#ifndef EGMRSI_MEANING_HPP
#define EGMRSI_MEANING_HPP

// Meaning metrics: plug-in variational MI lower bound, Gaussian differential
// MI, two-part MDL code length, n-gram novelty bits, meaning density (MD),
// meaning-conversion efficiency (MCE) and the information-bottleneck
// self-test. Internal unit is the nat; MDL lengths are bits.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "egmrsi/errors.hpp"
#include "egmrsi/metacognition.hpp"

namespace egmrsi {

inline constexpr double kDefaultEpsDen = 1.0;
inline constexpr double kMiCap = 10.0;
inline const double kLn2 = std::numbers::ln2;

enum class MiMode { discrete_plugin, continuous_gaussian };

struct MiEstimate {
    double value = 0.0;  // nats
    std::size_t n_samples = 0;
    MiMode mode = MiMode::discrete_plugin;
    double std_error = 0.0;   // of the per-sample mean (plug-in mode)
    bool degenerate = false;  // continuous mode: constant input
};

struct LabeledPrediction {
    std::vector<double> dist;  // Q(. | h_i)
    std::size_t label = 0;     // observed y_i
};

/// Plug-in estimate of E[log Q(y|h) - log p(y)] from the probabilities that
/// the predictor assigned to the observed labels. A lower bound on I(h;y);
/// negative for a miscalibrated Q.
inline MiEstimate mi_plugin_from_probs(std::span<const double> q_true,
                                       std::span<const std::size_t> labels,
                                       std::span<const double> marginal) {
    if (q_true.empty()) throw PreconditionError("mi_plugin: empty batch");
    if (q_true.size() != labels.size()) throw PreconditionError("mi_plugin: size mismatch");
    const std::vector<double> p = floor_normalize(marginal);
    const double limit = -std::log(kDistFloor);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < q_true.size(); ++i) {
        if (labels[i] >= p.size()) throw PreconditionError("mi_plugin: label outside marginal");
        const double q = std::max(q_true[i], kDistFloor);
        const double term = std::clamp(std::log(q) - std::log(p[labels[i]]), -limit, limit);
        sum += term;
        sum_sq += term * term;
    }
    const double n = static_cast<double>(q_true.size());
    MiEstimate est;
    est.value = sum / n;
    est.n_samples = q_true.size();
    est.mode = MiMode::discrete_plugin;
    if (q_true.size() > 1) {
        const double var = std::max(sum_sq / n - est.value * est.value, 0.0) * n / (n - 1.0);
        est.std_error = std::sqrt(var / n);
    }
    return est;
}

inline MiEstimate mi_plugin(std::span<const LabeledPrediction> batch, std::span<const double> marginal) {
    if (batch.empty()) throw PreconditionError("mi_plugin: empty batch");
    std::vector<double> q;
    std::vector<std::size_t> labels;
    q.reserve(batch.size());
    labels.reserve(batch.size());
    for (const auto& item : batch) {
        if (item.label >= item.dist.size()) throw PreconditionError("mi_plugin: label outside Y");
        const std::vector<double> d = floor_normalize(item.dist);
        q.push_back(d[item.label]);
        labels.push_back(item.label);
    }
    return mi_plugin_from_probs(q, labels, marginal);
}

namespace detail {

/// In-place Cholesky solve of (A) x = b for a symmetric positive-definite A
/// stored row-major. Returns false when A is not numerically SPD.
inline bool cholesky_solve(std::vector<double> a, std::vector<double>& b, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
        if (!(d > 0.0)) return false;
        const double ljj = std::sqrt(d);
        a[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / ljj;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
        b[i] = s / a[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= a[k * n + ii] * b[k];
        b[ii] = s / a[ii * n + ii];
    }
    return true;
}

}  // namespace detail

/// Gaussian plug-in differential MI between a vector h and a scalar y:
/// -1/2 log(1 - rho^2) where rho is the canonical (multiple) correlation.
/// rho^2 is taken as the explained-variance fraction of a ridge regression of
/// y on h (ridge 1e-6), capped at kMiCap nats.
inline MiEstimate mi_differential(std::span<const std::vector<double>> h, std::span<const double> y,
                                  double ridge = 1e-6) {
    if (h.size() != y.size()) throw PreconditionError("mi_differential: size mismatch");
    if (h.size() < 8) throw PreconditionError("mi_differential: needs at least 8 pairs");
    const std::size_t n = h.size();
    const std::size_t d = h.front().size();
    for (const auto& row : h) {
        if (row.size() != d) throw PreconditionError("mi_differential: ragged h");
    }

    MiEstimate est;
    est.mode = MiMode::continuous_gaussian;
    est.n_samples = n;

    std::vector<double> mean_h(d, 0.0);
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) mean_h[j] += h[i][j];
        mean_y += y[i];
    }
    for (double& m : mean_h) m /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    std::vector<double> cov_hh(d * d, 0.0);
    std::vector<double> cov_hy(d, 0.0);
    double var_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dy = y[i] - mean_y;
        var_y += dy * dy;
        for (std::size_t j = 0; j < d; ++j) {
            const double dj = h[i][j] - mean_h[j];
            cov_hy[j] += dj * dy;
            for (std::size_t k = 0; k <= j; ++k) cov_hh[j * d + k] += dj * (h[i][k] - mean_h[k]);
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    var_y *= inv_n;
    double trace_h = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        cov_hy[j] *= inv_n;
        for (std::size_t k = 0; k <= j; ++k) {
            cov_hh[j * d + k] *= inv_n;
            cov_hh[k * d + j] = cov_hh[j * d + k];
        }
        trace_h += cov_hh[j * d + j];
    }
    if (!(var_y > 1e-300) || !(trace_h > 1e-300)) {
        est.degenerate = true;
        return est;
    }
    for (std::size_t j = 0; j < d; ++j) cov_hh[j * d + j] += ridge;

    std::vector<double> beta = cov_hy;
    if (!detail::cholesky_solve(cov_hh, beta, d)) {
        est.degenerate = true;
        return est;
    }
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t j = 0; j < d; ++j) fit += beta[j] * (h[i][j] - mean_h[j]);
        const double r = (y[i] - mean_y) - fit;
        residual += r * r;
    }
    residual *= inv_n;
    const double unexplained = std::clamp(residual / var_y, 0.0, 1.0);
    est.value = unexplained <= 0.0 ? kMiCap : std::min(-0.5 * std::log(unexplained), kMiCap);
    return est;
}

// ---------------------------------------------------------------------------
// MDL surrogate for K(h)

struct ComplexityEstimate {
    double bits = 0.0;
    std::size_t quantizer_levels = 256;
    double model_cost_bits = 0.0;
    double data_cost_bits = 0.0;
    bool uniform_model = false;  // which member of the model class won
};

/// Bits needed for an unsigned integer in [0, n].
inline double uint_code_bits(std::size_t n) {
    return std::ceil(std::log2(static_cast<double>(n) + 1.0));
}

/// Sum of 2^-l over code lengths; a prefix code exists iff this is <= 1.
inline double kraft_sum(std::span<const double> lengths) {
    double s = 0.0;
    for (double l : lengths) s += std::exp2(-l);
    return s;
}

/// Uniform 8-bit quantization of each coordinate over [-clip_range, clip_range].
inline std::vector<std::uint8_t> quantize_bytes(std::span<const double> h, double clip_range = 1.0) {
    std::vector<std::uint8_t> out;
    out.reserve(h.size());
    for (double x : h) {
        if (!std::isfinite(x)) throw PreconditionError("quantize: non-finite entry");
        const double t = (std::clamp(x, -clip_range, clip_range) + clip_range) / (2.0 * clip_range);
        out.push_back(static_cast<std::uint8_t>(std::min(255.0, std::floor(t * 256.0))));
    }
    return out;
}

/// Two-part code length of a byte string. The model class has two members,
/// chosen by a one-bit index:
///   uniform: no parameters, 8 bits per symbol;
///   order-0: alphabet size, then (symbol, count) per present symbol, then
///              the block Shannon code ceil(sum -log2 p_hat) of the data.
/// The cheaper total wins.
inline ComplexityEstimate mdl_code_length(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw PreconditionError("mdl_complexity: empty input");
    const std::size_t n = bytes.size();
    std::array<std::size_t, 256> counts{};
    for (std::uint8_t b : bytes) ++counts[b];

    double table_bits = 1.0 + 8.0;  // model index + (alphabet size - 1)
    double ideal = 0.0;
    const double count_bits = uint_code_bits(n);
    for (std::size_t s = 0; s < 256; ++s) {
        if (counts[s] == 0) continue;
        table_bits += 8.0 + count_bits;
        const double p = static_cast<double>(counts[s]) / static_cast<double>(n);
        ideal += -static_cast<double>(counts[s]) * std::log2(p);
    }
    // Guard against -0.0 and rounding below an integer.
    const double table_data = std::max(0.0, std::ceil(ideal - 1e-9));

    ComplexityEstimate uniform{1.0 + 8.0 * static_cast<double>(n), 256, 1.0,
                               8.0 * static_cast<double>(n), true};
    ComplexityEstimate table{table_bits + table_data, 256, table_bits, table_data, false};
    return table.bits <= uniform.bits ? table : uniform;
}

inline ComplexityEstimate mdl_complexity(std::span<const double> h, double clip_range = 1.0) {
    if (h.empty()) throw PreconditionError("mdl_complexity: empty hidden vector");
    return mdl_code_length(quantize_bytes(h, clip_range));
}

/// Per-symbol Shannon lengths ceil(-log2 p_hat) of the order-0 table; used
/// to audit the Kraft inequality.
inline std::vector<double> order0_code_lengths(std::span<const std::uint8_t> bytes) {
    std::array<std::size_t, 256> counts{};
    for (std::uint8_t b : bytes) ++counts[b];
    std::vector<double> lengths;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(bytes.size());
        lengths.push_back(std::max(0.0, std::ceil(-std::log2(p) - 1e-12)));
    }
    return lengths;
}

// ---------------------------------------------------------------------------
// Novelty bits

inline constexpr std::size_t kNgram = 4;

struct NoveltyCounter {
    std::unordered_set<std::uint32_t> dictionary;
    double delta_s = 0.0;
    double s_max = 0.0;
};

/// 8 bits per distinct 4-gram of `obs` not yet in the dictionary; the
/// dictionary absorbs every 4-gram of `obs`.
inline double novelty_bits(std::span<const std::uint8_t> obs, NoveltyCounter& counter) {
    std::size_t fresh = 0;
    if (obs.size() >= kNgram) {
        for (std::size_t i = 0; i + kNgram <= obs.size(); ++i) {
            const std::uint32_t key = (std::uint32_t{obs[i]} << 24) | (std::uint32_t{obs[i + 1]} << 16) |
                                      (std::uint32_t{obs[i + 2]} << 8) | std::uint32_t{obs[i + 3]};
            if (counter.dictionary.insert(key).second) ++fresh;
        }
    }
    counter.delta_s = 8.0 * static_cast<double>(fresh);
    counter.s_max = std::max(counter.s_max, counter.delta_s);
    return counter.delta_s;
}

// ---------------------------------------------------------------------------
// MD and MCE

/// MD = max(I, 0) / (K * ln 2 + eps_den); K converted from bits to nats.
inline double meaning_density(double mi_nats, const ComplexityEstimate& k,
                              double eps_den = kDefaultEpsDen) {
    return std::max(mi_nats, 0.0) / (k.bits * kLn2 + eps_den);
}

inline double meaning_density(const MiEstimate& i, const ComplexityEstimate& k,
                              double eps_den = kDefaultEpsDen) {
    return meaning_density(i.value, k, eps_den);
}

/// MCE = (I_next - I_prev) / (delta_s * ln 2 + eps_den).
inline double mce(double mi_next, double mi_prev, double delta_s_bits, double eps_den = kDefaultEpsDen) {
    return (mi_next - mi_prev) / (delta_s_bits * kLn2 + eps_den);
}

inline double mce(const MiEstimate& next, const MiEstimate& prev, double delta_s_bits,
                  double eps_den = kDefaultEpsDen) {
    return mce(next.value, prev.value, delta_s_bits, eps_den);
}

// ---------------------------------------------------------------------------
// Exhaustive plug-in information measures over small discrete alphabets

struct DiscreteTriple {
    std::size_t x = 0;
    std::size_t h = 0;
    std::size_t y = 0;
};

inline constexpr std::size_t kMaxJointCells = 16 * 16 * 16;

struct IbTerms {
    double i_xy = 0.0;
    double i_xh = 0.0;
    double i_xh_given_y = 0.0;
    double residual = 0.0;  // |I(X;Y) - I(X;H) + I(X;H|Y)|
};

/// Plug-in I(X;Y), I(X;H) and I(X;H|Y) from the empirical joint of the
/// samples, and the information-bottleneck identity residual.
inline IbTerms ib_terms(std::span<const DiscreteTriple> samples, std::size_t nx, std::size_t nh,
                        std::size_t ny) {
    if (samples.empty()) throw PreconditionError("ib_residual: no samples");
    if (nx * nh * ny > kMaxJointCells) {
        throw PreconditionError("ib_residual: joint alphabet exceeds " + std::to_string(kMaxJointCells) +
                                " cells");
    }
    std::vector<double> joint(nx * nh * ny, 0.0);
    for (const auto& s : samples) {
        if (s.x >= nx || s.h >= nh || s.y >= ny) throw PreconditionError("ib_residual: symbol out of range");
        joint[(s.x * nh + s.h) * ny + s.y] += 1.0;
    }
    const double n = static_cast<double>(samples.size());
    for (double& p : joint) p /= n;

    std::vector<double> pxh(nx * nh, 0.0), pxy(nx * ny, 0.0), phy(nh * ny, 0.0);
    std::vector<double> px(nx, 0.0), ph(nh, 0.0), py(ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t h = 0; h < nh; ++h)
            for (std::size_t y = 0; y < ny; ++y) {
                const double p = joint[(x * nh + h) * ny + y];
                pxh[x * nh + h] += p;
                pxy[x * ny + y] += p;
                phy[h * ny + y] += p;
                px[x] += p;
                ph[h] += p;
                py[y] += p;
            }

    IbTerms t;
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t y = 0; y < ny; ++y) {
            const double p = pxy[x * ny + y];
            if (p > 0.0) t.i_xy += p * std::log(p / (px[x] * py[y]));
        }
        for (std::size_t h = 0; h < nh; ++h) {
            const double p = pxh[x * nh + h];
            if (p > 0.0) t.i_xh += p * std::log(p / (px[x] * ph[h]));
        }
    }
    // I(X;H|Y) = sum p(x,h,y) log[p(x,h,y) p(y) / (p(x,y) p(h,y))]
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t h = 0; h < nh; ++h)
            for (std::size_t y = 0; y < ny; ++y) {
                const double p = joint[(x * nh + h) * ny + y];
                if (p > 0.0) t.i_xh_given_y += p * std::log(p * py[y] / (pxy[x * ny + y] * phy[h * ny + y]));
            }
    t.residual = std::abs(t.i_xy - t.i_xh + t.i_xh_given_y);
    return t;
}

inline double ib_residual(std::span<const DiscreteTriple> samples, std::size_t nx, std::size_t nh,
                          std::size_t ny) {
    return ib_terms(samples, nx, nh, ny).residual;
}

}  // namespace egmrsi

#endif
