#include "qkdmem/privacy.hpp"

#include "qkdmem/state.hpp"

namespace qkdmem {

std::size_t toeplitz_seed_bits(std::size_t input_length, std::size_t output_length) {
    if (output_length == 0) return 0;
    return output_length + input_length - 1;
}

std::vector<int> privacy_amplify(const std::vector<int>& key, std::size_t output_length,
                                 const std::vector<int>& seed) {
    const std::size_t k = key.size();
    if (output_length > k)
        throw QkdError("privacy amplification cannot stretch the key: " +
                       std::to_string(output_length) + " > " + std::to_string(k));
    if (seed.size() != toeplitz_seed_bits(k, output_length))
        throw QkdError("privacy amplification seed has " + std::to_string(seed.size()) +
                       " bits, expected " +
                       std::to_string(toeplitz_seed_bits(k, output_length)));
    std::vector<int> out(output_length, 0);
    for (std::size_t i = 0; i < output_length; ++i) {
        int bit = 0;
        for (std::size_t j = 0; j < k; ++j)
            bit ^= (key[j] & seed[i - j + k - 1]) & 1;
        out[i] = bit;
    }
    return out;
}

}  // namespace qkdmem
