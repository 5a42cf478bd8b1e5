#include <doctest.h>

#include <cmath>
#include <vector>

#include "qkdmem/privacy.hpp"
#include "qkdmem/rng.hpp"
#include "qkdmem/state.hpp"

using namespace qkdmem;

namespace {

std::vector<int> random_bits(std::size_t n, Rng& rng) {
    std::vector<int> v(n);
    for (auto& b : v) b = rng.next_bit();
    return v;
}

}  // namespace

TEST_CASE("seed length bookkeeping") {
    CHECK(toeplitz_seed_bits(10, 4) == 13);
    CHECK(toeplitz_seed_bits(1, 1) == 1);
    CHECK(toeplitz_seed_bits(10, 0) == 0);
}

TEST_CASE("hashing is deterministic and input sensitive") {
    Rng rng(61);
    const std::vector<int> key = random_bits(32, rng);
    const std::vector<int> seed = random_bits(toeplitz_seed_bits(32, 12), rng);
    const std::vector<int> out = privacy_amplify(key, 12, seed);
    REQUIRE(out.size() == 12);
    CHECK(privacy_amplify(key, 12, seed) == out);

    std::vector<int> flipped = key;
    flipped[5] ^= 1;
    CHECK(privacy_amplify(flipped, 12, seed) != out);
}

TEST_CASE("invalid lengths are rejected") {
    Rng rng(62);
    const std::vector<int> key = random_bits(8, rng);
    // Stretching beyond the input length.
    CHECK_THROWS_AS(privacy_amplify(key, 9, random_bits(16, rng)), QkdError);
    // Seed of the wrong size.
    CHECK_THROWS_AS(privacy_amplify(key, 4, random_bits(10, rng)), QkdError);
    // Zero output needs no seed at all.
    CHECK(privacy_amplify(key, 0, {}).empty());
}

TEST_CASE("the map is linear over GF(2)") {
    Rng rng(63);
    const std::size_t k = 24, m = 10;
    const std::vector<int> seed = random_bits(toeplitz_seed_bits(k, m), rng);
    const std::vector<int> k1 = random_bits(k, rng);
    const std::vector<int> k2 = random_bits(k, rng);
    std::vector<int> sum(k);
    for (std::size_t i = 0; i < k; ++i) sum[i] = k1[i] ^ k2[i];
    const std::vector<int> h1 = privacy_amplify(k1, m, seed);
    const std::vector<int> h2 = privacy_amplify(k2, m, seed);
    const std::vector<int> hs = privacy_amplify(sum, m, seed);
    for (std::size_t i = 0; i < m; ++i) CHECK(hs[i] == (h1[i] ^ h2[i]));
}

TEST_CASE("toeplitz structure: entry (i, j) depends only on i - j") {
    // Probe the matrix with unit vectors: column j is seed[i - j + k - 1].
    const std::size_t k = 6, m = 4;
    std::vector<int> seed(toeplitz_seed_bits(k, m), 0);
    Rng rng(64);
    for (auto& b : seed) b = rng.next_bit();
    std::vector<std::vector<int>> matrix(m, std::vector<int>(k));
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<int> unit(k, 0);
        unit[j] = 1;
        const std::vector<int> col = privacy_amplify(unit, m, seed);
        for (std::size_t i = 0; i < m; ++i) matrix[i][j] = col[i];
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j)
            CHECK(matrix[i][j] == seed[i - j + k - 1]);
    for (std::size_t i = 1; i < m; ++i)
        for (std::size_t j = 1; j < k; ++j) CHECK(matrix[i][j] == matrix[i - 1][j - 1]);
}

TEST_CASE("collision rate matches two-universality") {
    // Over random seeds, distinct keys collide with probability <= 2^-m.
    Rng rng(65);
    const std::size_t k = 16, m = 8, trials = 4000;
    std::size_t collisions = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::vector<int> k1 = random_bits(k, rng);
        std::vector<int> k2 = random_bits(k, rng);
        if (k1 == k2) k2[0] ^= 1;
        const std::vector<int> seed = random_bits(toeplitz_seed_bits(k, m), rng);
        if (privacy_amplify(k1, m, seed) == privacy_amplify(k2, m, seed)) ++collisions;
    }
    const double rate = static_cast<double>(collisions) / static_cast<double>(trials);
    const double p = 1.0 / 256.0;
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    CHECK(rate <= p + 3.0 * sigma);
}
