#pragma once

#include <cstdint>
#include <random>

namespace qkdmem {

/// Identifier of the randomness scheme, embedded in report headers so results
/// stay attributable if the scheme ever changes.
inline constexpr const char* kRngStreamId = "splitmix64+mt19937_64";

/// splitmix64 step; used to derive per-trial seeds from (seed XOR trial).
std::uint64_t splitmix64(std::uint64_t x);

/// Seeded uniform randomness handle. All stochastic operations take an Rng&
/// explicitly; nothing in the library draws from ambient entropy. The mapping
/// from engine output to doubles/bits is fixed here (not delegated to
/// std::uniform_real_distribution) so byte-identical reproducibility holds
/// across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : mt_(seed) {}

    std::uint64_t next_u64() {
        ++draws_;
        return mt_();
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    int next_bit() { return static_cast<int>(next_u64() >> 63); }

    /// Uniform index in [0, n) by rejection.
    std::size_t next_index(std::size_t n);

    std::uint64_t draw_count() const { return draws_; }

  private:
    std::mt19937_64 mt_;
    std::uint64_t draws_ = 0;
};

/// The documented per-trial splitter: trial i of an experiment with master
/// seed s uses stream seed splitmix64(s XOR i).
Rng trial_rng(std::uint64_t master_seed, std::uint64_t trial_index);

}  // namespace qkdmem
