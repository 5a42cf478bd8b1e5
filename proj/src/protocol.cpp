#include "qkdmem/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "qkdmem/analysis.hpp"
#include "qkdmem/privacy.hpp"

namespace qkdmem {

TestSelection TestSelection::spot_check(double gamma) {
    TestSelection s;
    s.mode = Mode::SpotCheck;
    s.gamma = gamma;
    return s;
}

TestSelection TestSelection::fixed_subset(std::size_t k) {
    TestSelection s;
    s.mode = Mode::FixedSubset;
    s.subset_size = k;
    return s;
}

void ProtocolConfig::check() const {
    if (n_rounds == 0) throw QkdError("protocol config: n_rounds must be positive");
    if (test_selection.mode == TestSelection::Mode::SpotCheck) {
        const double g = test_selection.gamma;
        if (!(g > 0.0 && g < 1.0))
            throw QkdError("protocol config: spot-check gamma must lie in (0, 1)");
    } else if (test_selection.subset_size >= n_rounds) {
        throw QkdError("protocol config: fixed test subset must leave key rounds");
    }
    if (!(basis_bias >= 0.0 && basis_bias <= 1.0))
        throw QkdError("protocol config: basis_bias must lie in [0, 1]");
}

ordered_json ProtocolConfig::to_json() const {
    ordered_json j;
    j["n_rounds"] = n_rounds;
    j["key_basis"] = to_string(key_basis);
    ordered_json sel;
    if (test_selection.mode == TestSelection::Mode::SpotCheck) {
        sel["mode"] = "spot_check";
        sel["gamma"] = test_selection.gamma;
    } else {
        sel["mode"] = "fixed_subset";
        sel["size"] = test_selection.subset_size;
    }
    j["test_selection"] = std::move(sel);
    j["basis_bias"] = basis_bias;
    if (pa_output_length)
        j["pa_output_length"] = *pa_output_length;
    else
        j["pa_output_length"] = "auto";
    return j;
}

std::vector<std::size_t> select_test_rounds(const TestSelection& sel, std::size_t n,
                                            Rng& rng) {
    std::vector<std::size_t> out;
    if (sel.mode == TestSelection::Mode::SpotCheck) {
        for (std::size_t j = 1; j <= n; ++j)
            if (rng.next_double() < sel.gamma) out.push_back(j);
        return out;
    }
    if (sel.subset_size > n) throw QkdError("fixed test subset larger than the round count");
    std::vector<std::size_t> all(n);
    for (std::size_t j = 0; j < n; ++j) all[j] = j + 1;
    for (std::size_t i = 0; i < sel.subset_size; ++i) {
        const std::size_t pick = i + rng.next_index(n - i);
        std::swap(all[i], all[pick]);
    }
    out.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(sel.subset_size));
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

void check_round_count(const Device& dev, std::size_t n) {
    if (auto fixed = dev.fixed_rounds(); fixed && *fixed != n)
        throw InvalidStateError("device is specified for " + std::to_string(*fixed) +
                                " rounds, protocol runs " + std::to_string(n));
}

void announce_bases(Transcript& t, bool odd_rounds_only) {
    for (auto& r : t.rounds) {
        if (odd_rounds_only && r.round_index % 2 == 0) continue;
        r.ann_input_a = r.ann_input_b = true;
        ordered_json d;
        d["round"] = r.round_index;
        d["xa"] = to_string(r.input_a);
        d["xb"] = to_string(r.input_b);
        t.add_log("basis", std::move(d));
    }
}

void announce_round_outputs(Transcript& t, RoundRecord& r) {
    r.ann_output_a = r.ann_output_b = true;
    ordered_json d;
    d["round"] = r.round_index;
    d["a"] = r.output_a;
    d["b"] = r.output_b;
    t.add_log("output", std::move(d));
}

// Transparent oracle: Bob ends up holding Alice's sifted key; only the
// leakage accounting (Shannon-rate syndrome estimate) is recorded.
void transparent_error_correction(Transcript& t) {
    const std::size_t k = t.sifted_key_a.size();
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < k; ++i)
        if (t.sifted_key_a[i] != t.sifted_key_b[i]) ++mismatches;
    if (k == 0 || mismatches == 0) {
        t.ec_leakage_bits = 0;
        return;
    }
    const double d = static_cast<double>(mismatches) / static_cast<double>(k);
    t.ec_leakage_bits =
        static_cast<std::size_t>(std::ceil(static_cast<double>(k) * binary_entropy(d)));
}

void apply_privacy_amplification(Transcript& t, std::optional<std::size_t> requested,
                                 Rng& rng) {
    const std::size_t k = t.sifted_key_a.size();
    if (k == 0) {
        t.pa.present = false;
        return;
    }
    std::size_t m = 0;
    if (requested) {
        m = std::min(*requested, k);
    } else {
        double delta_ph = 0.0;
        if (auto it = t.test_stats.find(to_string(Basis::X));
            it != t.test_stats.end() && it->second.rounds > 0)
            delta_ph = it->second.qber();
        const double claimed = static_cast<double>(k) * (1.0 - binary_entropy(delta_ph));
        m = claimed <= 0.0 ? 0 : std::min(k, static_cast<std::size_t>(std::floor(claimed)));
    }
    std::vector<int> seed(toeplitz_seed_bits(k, m));
    for (auto& s : seed) s = static_cast<int>(rng.next_bit());
    ordered_json d;
    d["bits"] = seed.size();
    d["hex"] = bits_to_hex(seed);
    d["output_length"] = m;
    t.add_log("pa_seed", std::move(d));
    t.pa.present = true;
    t.pa.input_length = k;
    t.pa.output_length = m;
    t.pa.seed = seed;
    t.pa.key_a = privacy_amplify(t.sifted_key_a, m, seed);
    t.pa.key_b = t.pa.key_a;  // after transparent EC both hold Alice's key
}

// Announces test indices and outputs, accumulates per-basis QBER, sifts the
// key rounds, then runs EC accounting and PA. Test and key rounds must have
// matching bases.
void finish_postprocessing(Transcript& t, const std::vector<std::size_t>& tests,
                           const std::vector<std::size_t>& keys,
                           std::optional<std::size_t> pa_len, Rng& rng) {
    ordered_json d;
    d["rounds"] = tests;
    t.add_log("test_rounds", std::move(d));
    for (std::size_t j : tests) {
        auto& r = t.rounds.at(j - 1);
        announce_round_outputs(t, r);
        auto& s = t.test_stats[to_string(r.input_a)];
        s.rounds += 1;
        s.errors += r.output_a != r.output_b ? 1 : 0;
    }
    for (std::size_t j : keys) {
        const auto& r = t.rounds.at(j - 1);
        t.sifted_rounds.push_back(j);
        t.sifted_key_a.push_back(r.output_a);
        t.sifted_key_b.push_back(r.output_b);
    }
    transparent_error_correction(t);
    apply_privacy_amplification(t, pa_len, rng);
}

}  // namespace

Transcript run_bb84(const ProtocolConfig& config, const Device& dev, Rng& rng) {
    config.check();
    check_round_count(dev, config.n_rounds);
    const std::size_t n = config.n_rounds;

    // Fixed subsets commit before execution; spot checks decide per round.
    std::vector<char> pre_test(n + 1, 0);
    if (config.test_selection.mode == TestSelection::Mode::FixedSubset)
        for (std::size_t j : select_test_rounds(config.test_selection, n, rng))
            pre_test[j] = 1;

    Transcript t;
    t.device_id = dev.id();
    t.protocol_id = "bb84";
    t.rng_stream = kRngStreamId;
    t.config = config.to_json();
    t.config_hash = content_hash(t.config.dump());

    DeviceState st = dev.sample_initial(rng);
    for (std::size_t j = 1; j <= n; ++j) {
        const bool is_test = config.test_selection.mode == TestSelection::Mode::SpotCheck
                                 ? rng.next_double() < config.test_selection.gamma
                                 : pre_test[j] != 0;
        Basis xa = Basis::X;
        Basis xb = Basis::X;
        if (!is_test) {
            xa = rng.next_double() < config.basis_bias ? config.key_basis
                                                       : other(config.key_basis);
            xb = rng.next_double() < config.basis_bias ? config.key_basis
                                                       : other(config.key_basis);
        }
        auto [outs, next] = dev.sample_step(st, j, xa, xb, rng);
        st = std::move(next);
        RoundRecord r;
        r.round_index = j;
        r.input_a = xa;
        r.input_b = xb;
        r.output_a = outs[0];
        r.output_b = outs[1];
        r.is_test = is_test;
        t.rounds.push_back(r);
    }

    announce_bases(t, false);
    std::vector<std::size_t> tests;
    std::vector<std::size_t> keys;
    for (const auto& r : t.rounds) {
        if (r.is_test)
            tests.push_back(r.round_index);
        else if (r.input_a == config.key_basis && r.input_b == config.key_basis)
            keys.push_back(r.round_index);
    }
    finish_postprocessing(t, tests, keys, config.pa_output_length, rng);
    t.validate();
    return t;
}

Transcript run_example_protocol(std::size_t n_pairs, const Device& dev, Rng& rng,
                                double gamma) {
    if (n_pairs == 0) throw QkdError("example protocol needs at least one round pair");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw QkdError("example protocol: spot-check gamma must lie in (0, 1)");
    const std::size_t n = 2 * n_pairs;
    check_round_count(dev, n);

    Transcript t;
    t.device_id = dev.id();
    t.protocol_id = "example_protocol";
    t.rng_stream = kRngStreamId;
    ordered_json cfg;
    cfg["n_pairs"] = n_pairs;
    cfg["gamma"] = gamma;
    t.config = std::move(cfg);
    t.config_hash = content_hash(t.config.dump());

    DeviceState st = dev.sample_initial(rng);
    Basis xa = Basis::Z;
    Basis xb = Basis::Z;
    for (std::size_t j = 1; j <= n; ++j) {
        if (j % 2 == 1) {
            xa = bit_basis(static_cast<int>(rng.next_bit()));
            xb = bit_basis(static_cast<int>(rng.next_bit()));
        }
        auto [outs, next] = dev.sample_step(st, j, xa, xb, rng);
        st = std::move(next);
        RoundRecord r;
        r.round_index = j;
        r.input_a = xa;
        r.input_b = xb;
        r.output_a = outs[0];
        r.output_b = outs[1];
        t.rounds.push_back(r);
        if (j % 2 == 0) announce_round_outputs(t, t.rounds.back());
    }

    // Even-round bases are never announced; the repetition rule makes them
    // inferable from the odd-round announcements anyway.
    announce_bases(t, true);
    std::vector<std::size_t> tests;
    std::vector<std::size_t> keys;
    for (std::size_t j = 1; j <= n; j += 2) {
        auto& r = t.rounds[j - 1];
        if (r.input_a != r.input_b) continue;
        if (rng.next_double() < gamma) {
            r.is_test = true;
            tests.push_back(j);
        } else {
            keys.push_back(j);
        }
    }
    finish_postprocessing(t, tests, keys, std::nullopt, rng);
    t.validate();
    return t;
}

KeyClaim naive_key_claim(const Transcript& t) {
    auto it = t.test_stats.find(to_string(Basis::X));
    if (it == t.test_stats.end() || it->second.rounds == 0)
        throw QkdError("naive key claim needs X-basis test rounds");
    KeyClaim c;
    c.delta_ph = it->second.qber();
    c.claimed_length =
        static_cast<double>(t.sifted_key_a.size()) * (1.0 - binary_entropy(c.delta_ph));
    c.formula_id = "naive_cpa";
    return c;
}

}  // namespace qkdmem
