#pragma once

#include <cmath>
#include <cstdint>

namespace siolab {

/// SplitMix64: state += 0x9E3779B97F4A7C15, then the output mix
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z =  z ^ (z >> 31)
/// Pure integer arithmetic, so streams are identical on every platform.
/// Doubles take the top 53 bits. No std:: distributions are used anywhere,
/// since their algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Log-uniform in [lo, hi], lo > 0.
    double log_uniform(double lo, double hi) { return lo * std::exp(std::log(hi / lo) * uniform()); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
    /// Standard normal via Box-Muller.
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Independent child stream; used to give each work item its own generator
    /// so results do not depend on scheduling.
    Rng fork(std::uint64_t salt) const { return Rng(state_ ^ (salt * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL)); }

private:
    std::uint64_t state_;
};

}  // namespace siolab
