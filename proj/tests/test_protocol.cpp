#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "qkdmem/protocol.hpp"
#include "qkdmem/rng.hpp"

using namespace qkdmem;

TEST_CASE("protocol config validation") {
    ProtocolConfig cfg;
    cfg.n_rounds = 10;
    cfg.check();

    ProtocolConfig bad = cfg;
    bad.n_rounds = 0;
    CHECK_THROWS_AS(bad.check(), QkdError);

    bad = cfg;
    bad.test_selection = TestSelection::spot_check(0.0);
    CHECK_THROWS_AS(bad.check(), QkdError);
    bad.test_selection = TestSelection::spot_check(1.0);
    CHECK_THROWS_AS(bad.check(), QkdError);

    bad = cfg;
    bad.test_selection = TestSelection::fixed_subset(10);  // k == n: no key rounds
    CHECK_THROWS_AS(bad.check(), QkdError);
    bad.test_selection = TestSelection::fixed_subset(9);
    bad.check();

    bad = cfg;
    bad.basis_bias = 1.5;
    CHECK_THROWS_AS(bad.check(), QkdError);
}

TEST_CASE("test-round selection") {
    Rng rng(51);

    // Degenerate extremes are legal for the standalone selector.
    CHECK(select_test_rounds(TestSelection::spot_check(0.0), 20, rng).empty());
    const auto all = select_test_rounds(TestSelection::fixed_subset(20), 20, rng);
    CHECK(all.size() == 20);
    CHECK(all.front() == 1);
    CHECK(all.back() == 20);

    // Fixed subsets have the exact requested size, sorted and unique.
    for (int rep = 0; rep < 20; ++rep) {
        const auto sub = select_test_rounds(TestSelection::fixed_subset(7), 30, rng);
        CHECK(sub.size() == 7);
        CHECK(std::is_sorted(sub.begin(), sub.end()));
        CHECK(std::set<std::size_t>(sub.begin(), sub.end()).size() == 7);
        CHECK(sub.front() >= 1);
        CHECK(sub.back() <= 30);
    }
    CHECK_THROWS_AS(select_test_rounds(TestSelection::fixed_subset(31), 30, rng), QkdError);

    // Spot-check inclusion rate concentrates around gamma.
    const auto spot = select_test_rounds(TestSelection::spot_check(0.25), 10000, rng);
    const double frac = static_cast<double>(spot.size()) / 10000.0;
    CHECK(frac > 0.25 - 0.022);
    CHECK(frac < 0.25 + 0.022);
}

TEST_CASE("bb84 on the memoryless bell device is noiseless") {
    ProtocolConfig cfg;
    cfg.n_rounds = 200;
    Rng rng(52);
    const Transcript t = run_bb84(cfg, make_device("iid_bell", 200), rng);

    CHECK(t.protocol_id == "bb84");
    CHECK(t.device_id == "iid_bell");
    CHECK(t.rounds.size() == 200);
    t.validate();

    REQUIRE(t.test_stats.count("X"));
    CHECK(t.test_stats.at("X").rounds > 0);
    CHECK(t.test_stats.at("X").errors == 0);
    CHECK(t.test_stats.at("X").qber() == doctest::Approx(0.0));

    CHECK(t.sifted_key_a == t.sifted_key_b);
    CHECK(t.sifted_key_a.size() == t.sifted_rounds.size());
    CHECK(t.ec_leakage_bits == 0);

    // Zero observed error: PA keeps the full sifted length.
    CHECK(t.pa.present);
    CHECK(t.pa.input_length == t.sifted_key_a.size());
    CHECK(t.pa.output_length == t.pa.input_length);
    CHECK(t.pa.key_a == t.pa.key_b);

    // Test rounds are measured X-X; key rounds (bias 1) in the key basis.
    for (const auto& r : t.rounds) {
        if (r.is_test) {
            CHECK(r.input_a == Basis::X);
            CHECK(r.input_b == Basis::X);
        } else {
            CHECK(r.input_a == Basis::Z);
            CHECK(r.input_b == Basis::Z);
        }
    }
    // Every key round lands in the sifted set.
    const std::size_t n_test = t.test_stats.at("X").rounds;
    CHECK(t.sifted_rounds.size() == 200 - n_test);
}

TEST_CASE("bb84 announcements happen after all measurements") {
    ProtocolConfig cfg;
    cfg.n_rounds = 40;
    Rng rng(53);
    const Transcript t = run_bb84(cfg, make_device("iid_bell", 40), rng);

    // The public log opens with the full block of basis announcements: no
    // output or test-round reveal may precede them.
    std::size_t basis_entries = 0;
    bool seen_non_basis = false;
    for (const auto& entry : t.public_log) {
        if (entry.at("type") == "basis") {
            CHECK_FALSE(seen_non_basis);
            ++basis_entries;
        } else {
            seen_non_basis = true;
        }
    }
    CHECK(basis_entries == 40);

    // All round inputs are flagged announced; key outputs stay private.
    for (const auto& r : t.rounds) {
        CHECK(r.ann_input_a);
        CHECK(r.ann_input_b);
        if (!r.is_test) {
            CHECK_FALSE(r.ann_output_a);
            CHECK_FALSE(r.ann_output_b);
        }
    }
}

TEST_CASE("retained-qubit device aces X tests yet degenerates Z key rounds") {
    // Fixed pattern: rounds 1-2 test (X-X), rounds 3-4 key (Z-Z). Exhaustive
    // branch enumeration: test rounds always agree, and each party's later
    // key bits merely repeat its first one.
    const Device dev = make_device("retain_remeasure", 4);
    const InputSeq in{{Basis::X, Basis::X}, {Basis::X, Basis::X},
                      {Basis::Z, Basis::Z}, {Basis::Z, Basis::Z}};
    const ExactDist dist = enumerate_outputs(dev, in);
    for (const auto& [key, p] : dist.prob) {
        CHECK(p > 0.0);
        const int a1 = output_of(key, 1, Party::A);
        CHECK(output_of(key, 1, Party::B) == a1);
        CHECK(output_of(key, 2, Party::A) == a1);
        CHECK(output_of(key, 2, Party::B) == a1);
        CHECK(output_of(key, 4, Party::A) == output_of(key, 3, Party::A));
        CHECK(output_of(key, 4, Party::B) == output_of(key, 3, Party::B));
    }
}

TEST_CASE("echo device fails tests exactly when the previous inputs differed") {
    const Device dev = make_device("echo", 2);
    const ExactDist differ =
        enumerate_outputs(dev, {{Basis::X, Basis::Z}, {Basis::X, Basis::X}});
    // Round 2 replays (X, Z) = (0, 1): guaranteed disagreement.
    CHECK(differ.round_pair_marginal(2)[0 + 2 * 1] == doctest::Approx(1.0).epsilon(1e-12));

    const ExactDist agree =
        enumerate_outputs(dev, {{Basis::Z, Basis::Z}, {Basis::X, Basis::X}});
    CHECK(agree.round_pair_marginal(2)[1 + 2 * 1] == doctest::Approx(1.0).epsilon(1e-12));

    // End to end: with unbiased key bases a run shows substantial test QBER.
    ProtocolConfig cfg;
    cfg.n_rounds = 400;
    cfg.basis_bias = 0.5;
    Rng rng(54);
    const Transcript t = run_bb84(cfg, make_device("echo", 400), rng);
    const double q = t.test_stats.at("X").qber();
    CHECK(q > 0.2);
    CHECK(q < 0.55);
}

TEST_CASE("fixed-round devices reject mismatched protocol lengths") {
    ProtocolConfig cfg;
    cfg.n_rounds = 5;
    Rng rng(55);
    CHECK_THROWS_AS(run_bb84(cfg, Device(iid_bell_spec(6)), rng), InvalidStateError);
    CHECK_THROWS_AS(run_example_protocol(4, Device(iid_bell_spec(6)), rng),
                    InvalidStateError);
}

TEST_CASE("example protocol structure on the copier device") {
    Rng rng(56);
    const Transcript t = run_example_protocol(5, make_device("even_copier", 10), rng);
    CHECK(t.protocol_id == "example_protocol");
    REQUIRE(t.rounds.size() == 10);
    t.validate();

    for (std::size_t k = 0; k < 5; ++k) {
        const auto& odd = t.rounds[2 * k];
        const auto& even = t.rounds[2 * k + 1];
        // Even rounds repeat the preceding bases and announce their outputs.
        CHECK(even.input_a == odd.input_a);
        CHECK(even.input_b == odd.input_b);
        CHECK(even.ann_output_a);
        CHECK(even.ann_output_b);
        CHECK_FALSE(odd.ann_output_a);
        CHECK_FALSE(even.ann_input_a);
        CHECK(odd.ann_input_a);
        CHECK(odd.ann_input_b);
        // The copier means those announcements equal the odd-round outcomes.
        CHECK(even.output_a == odd.output_a);
        CHECK(even.output_b == odd.output_b);
    }

    // Live announcements: every even-round output entry precedes the basis
    // block in the public log.
    bool seen_basis = false;
    std::size_t live_outputs = 0;
    for (const auto& entry : t.public_log) {
        const std::string type = entry.at("type");
        if (type == "basis") seen_basis = true;
        if (type == "output" && !seen_basis) ++live_outputs;
    }
    CHECK(live_outputs >= 5);

    // Sifting uses odd rounds only.
    for (std::size_t j : t.sifted_rounds) CHECK(j % 2 == 1);
}

TEST_CASE("example protocol on an honest fixed-state device yields equal keys") {
    Rng rng(57);
    for (int rep = 0; rep < 5; ++rep) {
        const Transcript t = run_example_protocol(3, Device(iid_bell_spec(6)), rng);
        CHECK(t.sifted_key_a == t.sifted_key_b);
        if (t.pa.present) CHECK(t.pa.key_a == t.pa.key_b);
    }
    CHECK_THROWS_AS(run_example_protocol(0, make_device("iid_bell", 0), rng), QkdError);
    CHECK_THROWS_AS(run_example_protocol(3, make_device("iid_bell", 6), rng, 0.0), QkdError);
}

TEST_CASE("naive key claim") {
    // Noiseless run: full sifted length is claimed.
    ProtocolConfig cfg;
    cfg.n_rounds = 120;
    Rng rng(58);
    const Transcript clean = run_bb84(cfg, make_device("iid_bell", 120), rng);
    const KeyClaim claim = naive_key_claim(clean);
    CHECK(claim.delta_ph == doctest::Approx(0.0));
    CHECK(claim.claimed_length ==
          doctest::Approx(static_cast<double>(clean.sifted_key_a.size())));
    CHECK(claim.formula_id == "naive_cpa");

    // Synthetic 11% phase error over 1000 sifted bits.
    Transcript t;
    t.test_stats["X"] = TestStats{100, 11};
    t.sifted_key_a.assign(1000, 0);
    t.sifted_key_b.assign(1000, 0);
    const KeyClaim synth = naive_key_claim(t);
    CHECK(synth.delta_ph == doctest::Approx(0.11).epsilon(1e-15));
    CHECK(synth.claimed_length == doctest::Approx(500.08404183547200436).epsilon(1e-12));

    // No X-basis test data: the formula is undefined.
    Transcript empty;
    empty.sifted_key_a.assign(10, 0);
    CHECK_THROWS_AS(naive_key_claim(empty), QkdError);
    Transcript zero;
    zero.test_stats["X"] = TestStats{0, 0};
    CHECK_THROWS_AS(naive_key_claim(zero), QkdError);
}

TEST_CASE("explicit privacy-amplification length is honoured") {
    ProtocolConfig cfg;
    cfg.n_rounds = 100;
    cfg.pa_output_length = 10;
    Rng rng(59);
    const Transcript t = run_bb84(cfg, make_device("iid_bell", 100), rng);
    CHECK(t.pa.present);
    CHECK(t.pa.output_length == 10);
    CHECK(t.pa.key_a.size() == 10);
}
