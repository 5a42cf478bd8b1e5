#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "qkdmem/instrument.hpp"

namespace qkdmem {

enum class Party { A, B };

std::string to_string(Party p);

struct InputPair {
    Basis a = Basis::Z;
    Basis b = Basis::Z;
};
using InputSeq = std::vector<InputPair>;

// Packing convention for sequences: two bits per round, round j (1-based)
// occupies bit 2(j-1) for Alice and 2(j-1)+1 for Bob. Bases pack as X=0, Z=1.
// 64 bits cap packed sequences at 32 rounds, beyond every enumeration budget.
inline constexpr std::size_t kMaxPackedRounds = 32;

int basis_bit(Basis b);
Basis bit_basis(int bit);
std::uint64_t pack_inputs(const InputSeq& inputs);
InputSeq unpack_inputs(std::uint64_t key, std::size_t n);
std::uint64_t pack_outputs(const std::vector<std::array<int, 2>>& ab);
int output_of(std::uint64_t key, std::size_t round, Party p);

// Exhaustively enumerated joint distribution over the packed (a, b) output
// sequences for one fixed input sequence.
struct ExactDist {
    std::size_t n_rounds = 0;
    std::map<std::uint64_t, double> prob;

    void add(std::uint64_t key, double p);
    double total() const;
    // Distribution of the (a_j, b_j) pair of one round, indexed a + 2b.
    std::array<double, 4> round_pair_marginal(std::size_t round) const;
    std::array<double, 2> round_party_marginal(std::size_t round, Party p) const;
    // Joint distribution of the selected rounds' (a, b) pairs, rounds repacked
    // in the order given.
    std::map<std::uint64_t, double> rounds_marginal(const std::vector<std::size_t>& rounds) const;
    // Distribution of one party's full output string (bit j-1 = round j).
    std::map<std::uint64_t, double> party_marginal(Party p) const;
};

double total_variation(const std::map<std::uint64_t, double>& p,
                       const std::map<std::uint64_t, double>& q);
double total_variation(const ExactDist& p, const ExactDist& q);

template <std::size_t N>
double total_variation(const std::array<double, N>& p, const std::array<double, N>& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

// Sampled (input sequence, output sequence) counts.
struct EmpiricalDistribution {
    std::size_t n_rounds = 0;
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> support;
    std::uint64_t total_trials = 0;

    void add(std::uint64_t inputs_key, std::uint64_t outputs_key);
    // Observed conditional distribution of outputs given one input setting;
    // count_out receives the number of matching trials.
    std::map<std::uint64_t, double> conditional(std::uint64_t inputs_key,
                                                std::uint64_t* count_out = nullptr) const;
};

}  // namespace qkdmem
