#pragma once

#include <cstdint>

namespace breakfront {

// SplitMix64: tiny, fast, and good enough for resampling and simulation.
// Streams are derived from (seed, stream id) so replicate b always sees the
// same draws no matter how work is split across threads.
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n); n must be positive.
    uint64_t below(uint64_t n) {
        // Rejection-free multiply-shift; bias is ~n/2^64, immaterial here,
        // and keeps the draw count per call fixed (one) for determinism.
        return static_cast<uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

  private:
    uint64_t state_;
};

inline uint64_t stream_seed(uint64_t seed, uint64_t stream) {
    // One extra mixing round so adjacent streams do not correlate.
    SplitMix64 mix(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    mix.next();
    return mix.next();
}

}  // namespace breakfront
