#pragma once

#include "qkdmem/protocol.hpp"
#include "qkdmem/stats.hpp"

namespace qkdmem {

// h(p) = -p log2 p - (1-p) log2(1-p), with h(0) = h(1) = 0 by continuity.
double binary_entropy(double p);

// ---------------------------------------------------------------------------
// Cross-round signalling: how much can earlier inputs shift a later round's
// output statistics when all inputs from that round on are held fixed?
// ---------------------------------------------------------------------------

struct RoundSignalling {
    std::size_t round = 0;  // 1-based; reported for rounds 2..n
    // Max over (past-input assignment pairs, fixed suffix) of the total
    // variation between the round's joint (a, b) output distributions.
    double max_tv = 0.0;
    double max_tv_a = 0.0;  // same maximization for Alice's marginal alone
    double max_tv_b = 0.0;
    InputSeq witness_lo;  // full input sequences achieving max_tv
    InputSeq witness_hi;
    // Empirical mode: some input setting needed for this round's comparison
    // was never sampled, so max_tv is a lower bound over observed settings.
    bool insufficient_support = false;
};

struct SignallingReport {
    std::size_t n_rounds = 0;
    bool exact = true;
    std::uint64_t total_trials = 0;  // empirical mode only
    std::vector<RoundSignalling> rounds;

    double max_tv() const;
    const RoundSignalling& at_round(std::size_t j) const;
};

// Exact mode: enumerates all 4^n input settings (n <= 6).
SignallingReport signalling_measure(const Device& dev, std::size_t n,
                                    std::size_t budget = kDefaultEnumerationBudget);
SignallingReport signalling_measure(const EmpiricalDistribution& dist);

// Samples `trials` runs with fresh uniform per-round inputs.
EmpiricalDistribution sample_behaviour_distribution(const Device& dev, std::size_t n,
                                                    std::uint64_t trials, Rng& rng);

// ---------------------------------------------------------------------------
// Exact output-string entropies at small n.
// ---------------------------------------------------------------------------

enum class EntropyMode { Shannon, Min };

// Exact entropy (bits) of one party's output string under the fixed input
// sequence, by exhaustive branch enumeration. Requires n <= 12.
double string_entropy(const Device& dev, const InputSeq& inputs, EntropyMode mode,
                      Party party = Party::A,
                      std::size_t budget = kDefaultEnumerationBudget);

// ---------------------------------------------------------------------------
// Eve guessing from the public transcript.
// ---------------------------------------------------------------------------

struct GuessingResult {
    std::string strategy;
    std::size_t trials = 0;
    std::size_t matches = 0;  // trials whose sifted key Eve reproduced exactly
    double success_rate = 1.0;
    stats::WilsonInterval ci99{1.0, 1.0};
    std::size_t pa_trials = 0;   // trials carrying a PA record
    std::size_t pa_matches = 0;  // Eve's hash of her guess equals the PA key
    std::vector<int> per_trial;  // 1 = exact sifted-key match
};

// strategy "copy_decoder": read each announced paired-round output into the
// corresponding key position (the announcement-copy attack). strategy
// "map_decoder": exhaustive best-a-posteriori decoder built by enumerating
// the protocol under the transcript's device (example protocol, n_pairs <= 4).
GuessingResult eve_guessing(const std::vector<Transcript>& batch,
                            const std::string& strategy);

struct MapDecoderExact {
    double overall_success = 0.0;  // best decoder's total success probability
    // Conditional success given the sifted key length, and the length's
    // probability weight.
    std::map<std::size_t, double> success_by_length;
    std::map<std::size_t, double> prob_by_length;
};

// Exact best-guess analysis of the example protocol under `dev` by full
// branch enumeration (bases x device branches x test coins).
MapDecoderExact map_decoder_exact(const Device& dev, std::size_t n_pairs, double gamma);

// ---------------------------------------------------------------------------
// Naive claim vs actual entropy.
// ---------------------------------------------------------------------------

struct ContradictionReport {
    std::string device_id;
    std::size_t n_rounds = 0;
    KeyClaim naive_claim;       // delta_ph from trusted all-X enumeration
    double actual_shannon = 0.0;    // all-Z output string, real instruments
    double actual_minentropy = 0.0;
    double gap = 0.0;  // claimed_length - actual_minentropy
    std::size_t ebit_budget = 0;
};

ContradictionReport contradiction_report(const Device& dev, std::size_t n,
                                         std::size_t budget = kDefaultEnumerationBudget);

// ---------------------------------------------------------------------------
// Test-subset consistency: does the test-round output distribution move when
// only non-test inputs change? (Identically zero for fixed-state devices.)
// ---------------------------------------------------------------------------

struct SubsetInvarianceResult {
    double max_tv = 0.0;
    std::vector<std::size_t> test_rounds;  // subset achieving max_tv
    InputSeq witness_lo;
    InputSeq witness_hi;
};

// Maximizes over all nonempty test subsets and all pairs of non-test input
// assignments; test rounds are measured (test_basis, test_basis).
SubsetInvarianceResult test_subset_invariance(const Device& dev, std::size_t n,
                                              Basis test_basis = Basis::X,
                                              std::size_t budget = kDefaultEnumerationBudget);

// ---------------------------------------------------------------------------
// Report serialization.
// ---------------------------------------------------------------------------

ordered_json to_json(const SignallingReport& r);
ordered_json to_json(const GuessingResult& r);
ordered_json to_json(const MapDecoderExact& r);
ordered_json to_json(const ContradictionReport& r);
ordered_json to_json(const SubsetInvarianceResult& r);
ordered_json to_json(const KeyClaim& c);

// Flattens a report tree to (metric path, value) rows, one per leaf;
// metrics_csv renders them as "metric,value" lines.
std::vector<std::pair<std::string, std::string>> flatten_metrics(const ordered_json& report);
std::string metrics_csv(const ordered_json& report);

}  // namespace qkdmem
