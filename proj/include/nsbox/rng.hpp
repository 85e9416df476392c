#pragma once

#include <cstdint>

namespace nsbox {

// SplitMix64 generator (Steele, Lea & Flood's mixing function, as used by
// java.util.SplittableRandom). Chosen over std:: engines because every step
// is exact 64-bit integer arithmetic: count tables sampled from a given seed
// are bit-identical on every platform and toolchain.
//
//   state' = state + 0x9E3779B97F4A7C15
//   output = mix(state')   with  mix(z): z ^= z>>30; z *= 0xBF58476D1CE4E5B9;
//                                        z ^= z>>27; z *= 0x94D049BB133111EB;
//                                        z ^= z>>31
//
// Independent child streams are derived with derive_seed(seed, k)
// = mix(seed + (k+1) * 0x9E3779B97F4A7C15), one per task index k.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix(state_);
    }

    // Uniform double in [0, 1) with 53 random bits; exact IEEE arithmetic.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t task_index) {
        return mix(seed + (task_index + 1) * kGamma);
    }

    SplitMix64 split(std::uint64_t task_index) const {
        return SplitMix64(derive_seed(state_, task_index));
    }

  private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
    std::uint64_t state_;
};

}  // namespace nsbox
