#ifndef RI_RNG_HPP
#define RI_RNG_HPP

#include <cmath>
#include <cstdint>

namespace ri {

/// Counter-based splitmix64 stream.  Streams derived from (seed, index) are
/// independent and reproducible regardless of scheduling, so harness trials
/// can run in any order or concurrently.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed * 0x9E3779B97F4A7C15ULL + 0x1ULL) {}

    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        Rng r(seed);
        r.state_ ^= (index + 1) * 0xBF58476D1CE4E5B9ULL;
        r.next();
        r.next();
        return r;
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// uniform in [0,1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    int uniform_int(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

    double sign() { return (next() & 1) ? 1.0 : -1.0; }

private:
    std::uint64_t state_;
};

}  // namespace ri

#endif
