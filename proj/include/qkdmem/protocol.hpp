#pragma once

#include <optional>

#include "qkdmem/devices.hpp"
#include "qkdmem/transcript.hpp"

namespace qkdmem {

struct TestSelection {
    enum class Mode { SpotCheck, FixedSubset };

    Mode mode = Mode::SpotCheck;
    double gamma = 0.25;          // SpotCheck: per-round inclusion probability
    std::size_t subset_size = 0;  // FixedSubset: exact number of test rounds

    static TestSelection spot_check(double gamma);
    static TestSelection fixed_subset(std::size_t k);
};

struct ProtocolConfig {
    std::size_t n_rounds = 0;
    Basis key_basis = Basis::Z;
    TestSelection test_selection = TestSelection::spot_check(0.25);
    // Probability that a key round is measured in key_basis (per party,
    // independent); 1.0 means every key round uses key_basis.
    double basis_bias = 1.0;
    // Privacy amplification output length; absent means the naive-claim
    // length floor(n_key * (1 - h(delta_ph))).
    std::optional<std::size_t> pa_output_length;

    void check() const;
    ordered_json to_json() const;
};

// 1-based round indices, ascending. SpotCheck includes each round
// independently with probability gamma; FixedSubset draws a uniform
// k-subset. Standalone form accepts the degenerate gamma/k extremes.
std::vector<std::size_t> select_test_rounds(const TestSelection& sel, std::size_t n,
                                            Rng& rng);

// Entanglement-based BB84: test rounds measured X-X, key rounds in the
// (biased) key basis; bases announced after all measurements, then test
// indices and test outputs; transparent error correction; Toeplitz PA.
Transcript run_bb84(const ProtocolConfig& config, const Device& dev, Rng& rng);

// 2*n_pairs rounds. Odd rounds draw fresh uniform bases per party; even
// rounds repeat the preceding round's bases and both outputs are announced
// immediately. Postprocessing ignores even-round data and runs BB84-style
// sifting + spot-check parameter estimation (rate gamma) on the odd rounds.
Transcript run_example_protocol(std::size_t n_pairs, const Device& dev, Rng& rng,
                                double gamma = 0.25);

struct KeyClaim {
    double delta_ph = 0.0;
    double claimed_length = 0.0;
    std::string formula_id = "naive_cpa";
};

// claimed_length = n_key * (1 - h(delta_ph)) with delta_ph the observed X-X
// test-round error fraction. Sound only for devices measuring a fixed state
// factor by factor; the point of the toolkit is exhibiting its failure.
KeyClaim naive_key_claim(const Transcript& t);

}  // namespace qkdmem
