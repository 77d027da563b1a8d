#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace usvr {

/// Seedable random generator used by every stochastic component.
///
/// Built on std::mt19937_64, whose output sequence is fully specified by
/// the standard, with the uniform/normal mappings implemented here so that
/// streams do not depend on the standard library's unspecified
/// distribution algorithms. Substreams are derived with derive_seed():
/// experiment trial k draws from derive_seed(master, k, stream_id), one
/// stream id per purpose (train/val/test/universum), so trials are
/// reproducible and independent of execution order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw in [0, 1) using the top 53 bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Integer in [0, n), n >= 1. Rejection-free modulo bias is negligible
    /// for the small n used here, but we reject anyway to keep draws exact.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

    /// Normal draw via the Marsaglia polar method (no trig calls).
    /// One accepted pair yields one variate; the second is discarded so a
    /// call consumes a deterministic amount of state per accepted pair.
    double normal(double mean, double stddev) {
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        return mean + stddev * u * std::sqrt(-2.0 * std::log(s) / s);
    }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; bijective 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive the seed of substream (trial, stream) from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                                 std::uint64_t stream = 0) {
    return mix64(mix64(master ^ mix64(trial + 1)) ^ mix64(stream + 0x51ed2701ULL));
}

}  // namespace usvr
