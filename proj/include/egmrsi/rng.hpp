#ifndef EGMRSI_RNG_HPP
#define EGMRSI_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace egmrsi {

/// splitmix64 finalizer; used to derive independent stream seeds from one run seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Named RNG streams. Each consumer owns one so that adding draws in one
/// module never shifts another module's sequence.
enum class Stream : std::uint64_t {
    init = 1,
    environment = 2,
    baseline = 3,
    goals = 4,
    modification = 5,
    probe = 6,
    scripted_events = 7,
    predictor = 8,
    self_model = 9,
    verification = 10,
};

/// mt19937_64 wrapper with platform-independent conversions. The standard
/// distributions are implementation-defined, so uniform/normal are derived
/// by hand to keep traces byte-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}
    Rng(std::uint64_t seed, Stream stream)
        : engine_(mix_seed(seed ^ mix_seed(static_cast<std::uint64_t>(stream)))) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection keeps the draw unbiased.
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    /// Standard normal via Box-Muller (no cached second variate).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace egmrsi

#endif
