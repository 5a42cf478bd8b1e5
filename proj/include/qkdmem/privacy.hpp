#pragma once

#include <cstddef>
#include <vector>

namespace qkdmem {

// Seed bits consumed when hashing input_length key bits to output_length:
// one bit per Toeplitz diagonal, m + k - 1 in total (0 when no output).
std::size_t toeplitz_seed_bits(std::size_t input_length, std::size_t output_length);

// Two-universal Toeplitz hash over GF(2): out[i] = XOR_j T[i][j]*key[j] with
// T[i][j] = seed[i - j + k - 1]. Deterministic given (key, seed).
std::vector<int> privacy_amplify(const std::vector<int>& key, std::size_t output_length,
                                 const std::vector<int>& seed);

}  // namespace qkdmem
