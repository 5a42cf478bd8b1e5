#include "qkdmem/rng.hpp"

namespace qkdmem {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::size_t Rng::next_index(std::size_t n) {
    if (n <= 1) return 0;
    // Rejection sampling keeps the index exactly uniform.
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v > limit);
    return static_cast<std::size_t>(v % n);
}

Rng trial_rng(std::uint64_t master_seed, std::uint64_t trial_index) {
    return Rng(splitmix64(master_seed ^ trial_index));
}

}  // namespace qkdmem
