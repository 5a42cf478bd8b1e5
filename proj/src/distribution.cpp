#include "qkdmem/distribution.hpp"

#include <cmath>

namespace qkdmem {

std::string to_string(Party p) { return p == Party::A ? "A" : "B"; }

int basis_bit(Basis b) { return b == Basis::X ? 0 : 1; }

Basis bit_basis(int bit) { return bit == 0 ? Basis::X : Basis::Z; }

std::uint64_t pack_inputs(const InputSeq& inputs) {
    if (inputs.size() > kMaxPackedRounds) throw QkdError("input sequence too long to pack");
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < inputs.size(); ++j) {
        key |= static_cast<std::uint64_t>(basis_bit(inputs[j].a)) << (2 * j);
        key |= static_cast<std::uint64_t>(basis_bit(inputs[j].b)) << (2 * j + 1);
    }
    return key;
}

InputSeq unpack_inputs(std::uint64_t key, std::size_t n) {
    InputSeq inputs(n);
    for (std::size_t j = 0; j < n; ++j) {
        inputs[j].a = bit_basis(static_cast<int>((key >> (2 * j)) & 1u));
        inputs[j].b = bit_basis(static_cast<int>((key >> (2 * j + 1)) & 1u));
    }
    return inputs;
}

std::uint64_t pack_outputs(const std::vector<std::array<int, 2>>& ab) {
    if (ab.size() > kMaxPackedRounds) throw QkdError("output sequence too long to pack");
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < ab.size(); ++j) {
        key |= static_cast<std::uint64_t>(ab[j][0] & 1) << (2 * j);
        key |= static_cast<std::uint64_t>(ab[j][1] & 1) << (2 * j + 1);
    }
    return key;
}

int output_of(std::uint64_t key, std::size_t round, Party p) {
    std::size_t shift = 2 * (round - 1) + (p == Party::B ? 1 : 0);
    return static_cast<int>((key >> shift) & 1u);
}

void ExactDist::add(std::uint64_t key, double p) { prob[key] += p; }

double ExactDist::total() const {
    double s = 0.0;
    for (const auto& [k, p] : prob) s += p;
    return s;
}

std::array<double, 4> ExactDist::round_pair_marginal(std::size_t round) const {
    std::array<double, 4> m{};
    for (const auto& [k, p] : prob)
        m[static_cast<std::size_t>(output_of(k, round, Party::A) +
                                   2 * output_of(k, round, Party::B))] += p;
    return m;
}

std::array<double, 2> ExactDist::round_party_marginal(std::size_t round, Party p) const {
    std::array<double, 2> m{};
    for (const auto& [k, pr] : prob)
        m[static_cast<std::size_t>(output_of(k, round, p))] += pr;
    return m;
}

std::map<std::uint64_t, double> ExactDist::rounds_marginal(
    const std::vector<std::size_t>& rounds) const {
    std::map<std::uint64_t, double> m;
    for (const auto& [k, p] : prob) {
        std::uint64_t sub = 0;
        for (std::size_t i = 0; i < rounds.size(); ++i) {
            sub |= static_cast<std::uint64_t>(output_of(k, rounds[i], Party::A)) << (2 * i);
            sub |= static_cast<std::uint64_t>(output_of(k, rounds[i], Party::B)) << (2 * i + 1);
        }
        m[sub] += p;
    }
    return m;
}

std::map<std::uint64_t, double> ExactDist::party_marginal(Party p) const {
    std::map<std::uint64_t, double> m;
    for (const auto& [k, pr] : prob) {
        std::uint64_t s = 0;
        for (std::size_t j = 1; j <= n_rounds; ++j)
            s |= static_cast<std::uint64_t>(output_of(k, j, p)) << (j - 1);
        m[s] += pr;
    }
    return m;
}

double total_variation(const std::map<std::uint64_t, double>& p,
                       const std::map<std::uint64_t, double>& q) {
    double s = 0.0;
    auto ip = p.begin();
    auto iq = q.begin();
    while (ip != p.end() || iq != q.end()) {
        if (iq == q.end() || (ip != p.end() && ip->first < iq->first)) {
            s += std::abs(ip->second);
            ++ip;
        } else if (ip == p.end() || iq->first < ip->first) {
            s += std::abs(iq->second);
            ++iq;
        } else {
            s += std::abs(ip->second - iq->second);
            ++ip;
            ++iq;
        }
    }
    return 0.5 * s;
}

double total_variation(const ExactDist& p, const ExactDist& q) {
    return total_variation(p.prob, q.prob);
}

void EmpiricalDistribution::add(std::uint64_t inputs_key, std::uint64_t outputs_key) {
    ++support[{inputs_key, outputs_key}];
    ++total_trials;
}

std::map<std::uint64_t, double> EmpiricalDistribution::conditional(std::uint64_t inputs_key,
                                                                   std::uint64_t* count_out) const {
    std::uint64_t total = 0;
    std::map<std::uint64_t, std::uint64_t> counts;
    for (const auto& [key, c] : support) {
        if (key.first != inputs_key) continue;
        counts[key.second] += c;
        total += c;
    }
    if (count_out) *count_out = total;
    std::map<std::uint64_t, double> m;
    if (total == 0) return m;
    for (const auto& [k, c] : counts) m[k] = static_cast<double>(c) / static_cast<double>(total);
    return m;
}

}  // namespace qkdmem
