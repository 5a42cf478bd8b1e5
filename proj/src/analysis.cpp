#include "qkdmem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "qkdmem/privacy.hpp"

namespace qkdmem {

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw QkdError("binary entropy needs p in [0, 1], got " + std::to_string(p));
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

// ---------------------------------------------------------------------------
// Signalling.
// ---------------------------------------------------------------------------

double SignallingReport::max_tv() const {
    double m = 0.0;
    for (const auto& r : rounds) m = std::max(m, r.max_tv);
    return m;
}

const RoundSignalling& SignallingReport::at_round(std::size_t j) const {
    for (const auto& r : rounds)
        if (r.round == j) return r;
    throw QkdError("no signalling entry for round " + std::to_string(j));
}

namespace {

std::array<double, 2> party_of_pair(const std::array<double, 4>& m, Party p) {
    if (p == Party::A) return {m[0] + m[2], m[1] + m[3]};
    return {m[0] + m[1], m[2] + m[3]};
}

}  // namespace

SignallingReport signalling_measure(const Device& dev, std::size_t n, std::size_t budget) {
    if (n < 2) throw QkdError("signalling needs at least 2 rounds");
    if (n > 6) throw QkdError("exact signalling enumerates 4^n input settings; n <= 6");
    const std::uint64_t n_settings = std::uint64_t{1} << (2 * n);
    std::vector<ExactDist> dists;
    dists.reserve(n_settings);
    for (std::uint64_t key = 0; key < n_settings; ++key)
        dists.push_back(enumerate_outputs(dev, unpack_inputs(key, n), budget));

    SignallingReport rep;
    rep.n_rounds = n;
    rep.exact = true;
    for (std::size_t j = 2; j <= n; ++j) {
        RoundSignalling rs;
        rs.round = j;
        std::vector<std::array<double, 4>> marg(n_settings);
        for (std::uint64_t key = 0; key < n_settings; ++key)
            marg[key] = dists[key].round_pair_marginal(j);
        const std::uint64_t past_bits = 2 * (j - 1);
        const std::uint64_t past_count = std::uint64_t{1} << past_bits;
        const std::uint64_t suffix_count = n_settings >> past_bits;
        for (std::uint64_t suffix = 0; suffix < suffix_count; ++suffix) {
            for (std::uint64_t p1 = 0; p1 < past_count; ++p1) {
                const std::uint64_t k1 = (suffix << past_bits) | p1;
                for (std::uint64_t p2 = p1 + 1; p2 < past_count; ++p2) {
                    const std::uint64_t k2 = (suffix << past_bits) | p2;
                    const double tv = total_variation(marg[k1], marg[k2]);
                    if (tv > rs.max_tv) {
                        rs.max_tv = tv;
                        rs.witness_lo = unpack_inputs(k1, n);
                        rs.witness_hi = unpack_inputs(k2, n);
                    }
                    rs.max_tv_a = std::max(
                        rs.max_tv_a, total_variation(party_of_pair(marg[k1], Party::A),
                                                     party_of_pair(marg[k2], Party::A)));
                    rs.max_tv_b = std::max(
                        rs.max_tv_b, total_variation(party_of_pair(marg[k1], Party::B),
                                                     party_of_pair(marg[k2], Party::B)));
                }
            }
        }
        rep.rounds.push_back(std::move(rs));
    }
    return rep;
}

SignallingReport signalling_measure(const EmpiricalDistribution& dist) {
    const std::size_t n = dist.n_rounds;
    if (n < 2) throw QkdError("signalling needs at least 2 rounds");
    SignallingReport rep;
    rep.n_rounds = n;
    rep.exact = false;
    rep.total_trials = dist.total_trials;

    struct SettingStats {
        std::uint64_t trials = 0;
        std::vector<std::array<double, 4>> pair_counts;
    };
    std::map<std::uint64_t, SettingStats> per_setting;
    for (const auto& [key, cnt] : dist.support) {
        auto& s = per_setting[key.first];
        if (s.pair_counts.empty()) s.pair_counts.assign(n, {0.0, 0.0, 0.0, 0.0});
        s.trials += cnt;
        for (std::size_t j = 1; j <= n; ++j) {
            const auto idx = static_cast<std::size_t>(output_of(key.second, j, Party::A) +
                                                      2 * output_of(key.second, j, Party::B));
            s.pair_counts[j - 1][idx] += static_cast<double>(cnt);
        }
    }

    for (std::size_t j = 2; j <= n; ++j) {
        RoundSignalling rs;
        rs.round = j;
        const std::uint64_t past_bits = 2 * (j - 1);
        const std::uint64_t past_count = std::uint64_t{1} << past_bits;
        // Group observed settings by their inputs from round j on.
        std::map<std::uint64_t, std::vector<const std::pair<const std::uint64_t, SettingStats>*>>
            groups;
        for (const auto& entry : per_setting)
            groups[entry.first >> past_bits].push_back(&entry);
        for (const auto& [suffix, members] : groups) {
            (void)suffix;
            if (members.size() < past_count) rs.insufficient_support = true;
            for (std::size_t i = 0; i < members.size(); ++i) {
                std::array<double, 4> mi = members[i]->second.pair_counts[j - 1];
                for (auto& v : mi) v /= static_cast<double>(members[i]->second.trials);
                for (std::size_t l = i + 1; l < members.size(); ++l) {
                    std::array<double, 4> ml = members[l]->second.pair_counts[j - 1];
                    for (auto& v : ml) v /= static_cast<double>(members[l]->second.trials);
                    const double tv = total_variation(mi, ml);
                    if (tv > rs.max_tv) {
                        rs.max_tv = tv;
                        rs.witness_lo = unpack_inputs(members[i]->first, n);
                        rs.witness_hi = unpack_inputs(members[l]->first, n);
                    }
                    rs.max_tv_a =
                        std::max(rs.max_tv_a, total_variation(party_of_pair(mi, Party::A),
                                                              party_of_pair(ml, Party::A)));
                    rs.max_tv_b =
                        std::max(rs.max_tv_b, total_variation(party_of_pair(mi, Party::B),
                                                              party_of_pair(ml, Party::B)));
                }
            }
        }
        rep.rounds.push_back(std::move(rs));
    }
    return rep;
}

EmpiricalDistribution sample_behaviour_distribution(const Device& dev, std::size_t n,
                                                    std::uint64_t trials, Rng& rng) {
    EmpiricalDistribution d;
    d.n_rounds = n;
    for (std::uint64_t t = 0; t < trials; ++t) {
        InputSeq inputs(n);
        for (auto& ip : inputs) {
            ip.a = bit_basis(static_cast<int>(rng.next_bit()));
            ip.b = bit_basis(static_cast<int>(rng.next_bit()));
        }
        const DeviceTrace tr = run_device(dev, inputs, rng);
        d.add(pack_inputs(inputs), tr.packed_outputs());
    }
    return d;
}

// ---------------------------------------------------------------------------
// Entropies.
// ---------------------------------------------------------------------------

double string_entropy(const Device& dev, const InputSeq& inputs, EntropyMode mode,
                      Party party, std::size_t budget) {
    if (inputs.size() > 12)
        throw EnumerationBudgetError("string_entropy enumerates exactly; n <= 12");
    const ExactDist dist = enumerate_outputs(dev, inputs, budget);
    const auto marg = dist.party_marginal(party);
    if (mode == EntropyMode::Shannon) {
        double h = 0.0;
        for (const auto& [k, p] : marg)
            if (p > 0.0) h -= p * std::log2(p);
        return h;
    }
    double pmax = 0.0;
    for (const auto& [k, p] : marg) pmax = std::max(pmax, p);
    return pmax > 0.0 ? -std::log2(pmax) : 0.0;
}

// ---------------------------------------------------------------------------
// Eve guessing.
// ---------------------------------------------------------------------------

namespace {

// Eve's view of one example-protocol run: announced even-round outputs,
// announced odd-round bases, the test set, and the announced test outputs.
std::string view_string_from_parts(const InputSeq& inputs,
                                   const std::vector<std::array<int, 2>>& outs,
                                   const std::vector<std::size_t>& tests) {
    const std::size_t n = inputs.size();
    std::string v;
    for (std::size_t j = 2; j <= n; j += 2)
        v += "E" + std::to_string(j) + ":" + std::to_string(outs[j - 1][0]) +
             std::to_string(outs[j - 1][1]) + ";";
    for (std::size_t j = 1; j <= n; j += 2)
        v += "B" + std::to_string(j) + ":" + to_string(inputs[j - 1].a) +
             to_string(inputs[j - 1].b) + ";";
    v += "T:";
    for (std::size_t j : tests) v += std::to_string(j) + ",";
    v += ";";
    for (std::size_t j : tests)
        v += "O" + std::to_string(j) + ":" + std::to_string(outs[j - 1][0]) +
             std::to_string(outs[j - 1][1]) + ";";
    return v;
}

std::string view_string(const Transcript& t) {
    InputSeq inputs;
    std::vector<std::array<int, 2>> outs;
    std::vector<std::size_t> tests;
    for (const auto& r : t.rounds) {
        inputs.push_back({r.input_a, r.input_b});
        outs.push_back({r.output_a, r.output_b});
        if (r.is_test) tests.push_back(r.round_index);
    }
    return view_string_from_parts(inputs, outs, tests);
}

struct ProtoLeaf {
    const InputSeq* inputs = nullptr;
    std::vector<std::array<int, 2>> outs;
    double weight = 0.0;
};

// Enumerates every (basis choice, device branch) path of the example
// protocol before the test-selection coins.
void enumerate_example_paths(const Device& dev, std::size_t n_pairs,
                             const std::function<void(const ProtoLeaf&)>& emit) {
    const std::size_t n = 2 * n_pairs;
    const std::uint64_t combos = std::uint64_t{1} << (2 * n_pairs);
    const double combo_w = 1.0 / static_cast<double>(combos);
    for (std::uint64_t c = 0; c < combos; ++c) {
        InputSeq inputs(n);
        for (std::size_t p = 0; p < n_pairs; ++p) {
            const Basis xa = bit_basis(static_cast<int>((c >> (2 * p)) & 1u));
            const Basis xb = bit_basis(static_cast<int>((c >> (2 * p + 1)) & 1u));
            inputs[2 * p] = {xa, xb};
            inputs[2 * p + 1] = {xa, xb};
        }
        struct Node {
            DeviceState st;
            double w = 0.0;
            std::size_t round = 1;
            std::vector<std::array<int, 2>> outs;
        };
        std::vector<Node> stack;
        for (const auto& ib : dev.initial()) stack.push_back({ib.state, ib.weight * combo_w, 1, {}});
        while (!stack.empty()) {
            Node nd = std::move(stack.back());
            stack.pop_back();
            if (nd.round > n) {
                emit({&inputs, nd.outs, nd.w});
                continue;
            }
            for (auto& br :
                 dev.step(nd.st, nd.round, inputs[nd.round - 1].a, inputs[nd.round - 1].b)) {
                Node nx;
                nx.st = std::move(br.next);
                nx.w = nd.w * br.prob;
                nx.round = nd.round + 1;
                nx.outs = nd.outs;
                nx.outs.push_back({br.a, br.b});
                stack.push_back(std::move(nx));
            }
        }
    }
}

// key = (sifted length, packed Alice key bits)
using KeyId = std::pair<std::size_t, std::uint64_t>;
using JointDist = std::map<std::string, std::map<KeyId, double>>;

JointDist build_joint(const Device& dev, std::size_t n_pairs, double gamma) {
    JointDist joint;
    enumerate_example_paths(dev, n_pairs, [&](const ProtoLeaf& leaf) {
        std::vector<std::size_t> cands;
        for (std::size_t j = 1; j <= 2 * n_pairs; j += 2)
            if ((*leaf.inputs)[j - 1].a == (*leaf.inputs)[j - 1].b) cands.push_back(j);
        const std::size_t nc = cands.size();
        const std::uint64_t subsets = std::uint64_t{1} << nc;
        for (std::uint64_t s = 0; s < subsets; ++s) {
            double w = leaf.weight;
            std::vector<std::size_t> tests;
            std::uint64_t key_bits = 0;
            std::size_t key_len = 0;
            for (std::size_t i = 0; i < nc; ++i) {
                if ((s >> i) & 1u) {
                    w *= gamma;
                    tests.push_back(cands[i]);
                } else {
                    w *= 1.0 - gamma;
                    key_bits |= static_cast<std::uint64_t>(leaf.outs[cands[i] - 1][0] & 1)
                                << key_len;
                    ++key_len;
                }
            }
            joint[view_string_from_parts(*leaf.inputs, leaf.outs, tests)]
                 [{key_len, key_bits}] += w;
        }
    });
    return joint;
}

std::vector<int> unpack_key(const KeyId& id) {
    std::vector<int> bits(id.first);
    for (std::size_t i = 0; i < id.first; ++i)
        bits[i] = static_cast<int>((id.second >> i) & 1u);
    return bits;
}

std::pair<std::size_t, double> read_example_params(const Transcript& t) {
    if (t.protocol_id != "example_protocol")
        throw QkdError("map_decoder needs example-protocol transcripts");
    if (!t.config.contains("n_pairs") || !t.config.contains("gamma"))
        throw QkdError("transcript config lacks n_pairs/gamma");
    return {t.config.at("n_pairs").get<std::size_t>(), t.config.at("gamma").get<double>()};
}

std::vector<int> copy_guess(const Transcript& t) {
    std::vector<int> guess;
    for (std::size_t j : t.sifted_rounds) {
        // The paired announcement lives in round j+1 (0-based index j).
        if (j >= t.rounds.size() || !t.rounds[j].ann_output_a)
            throw QkdError("copy decoder needs announced outputs in round " +
                           std::to_string(j + 1));
        guess.push_back(t.rounds[j].output_a);
    }
    return guess;
}

}  // namespace

MapDecoderExact map_decoder_exact(const Device& dev, std::size_t n_pairs, double gamma) {
    if (n_pairs == 0 || n_pairs > 4)
        throw QkdError("map decoder enumeration supports 1 <= n_pairs <= 4");
    const JointDist joint = build_joint(dev, n_pairs, gamma);
    MapDecoderExact res;
    std::map<std::size_t, double> succ;
    std::map<std::size_t, double> mass;
    for (const auto& [view, keys] : joint) {
        (void)view;
        double best = 0.0;
        double tot = 0.0;
        const std::size_t len = keys.begin()->first.first;
        for (const auto& [key, p] : keys) {
            best = std::max(best, p);
            tot += p;
        }
        res.overall_success += best;
        succ[len] += best;
        mass[len] += tot;
    }
    for (const auto& [len, p] : mass) {
        res.prob_by_length[len] = p;
        res.success_by_length[len] = p > 0.0 ? succ[len] / p : 1.0;
    }
    return res;
}

GuessingResult eve_guessing(const std::vector<Transcript>& batch, const std::string& strategy) {
    if (batch.empty()) throw QkdError("eve_guessing needs at least one transcript");
    for (const auto& t : batch)
        if (t.schema_version != batch.front().schema_version ||
            t.config_hash != batch.front().config_hash)
            throw QkdError("transcript batch mixes schemas or configs");

    std::function<std::vector<int>(const Transcript&)> guess_fn;
    if (strategy == "copy_decoder") {
        guess_fn = [](const Transcript& t) { return copy_guess(t); };
    } else if (strategy == "map_decoder") {
        const auto [n_pairs, gamma] = read_example_params(batch.front());
        if (n_pairs == 0 || n_pairs > 4)
            throw QkdError("map decoder enumeration supports 1 <= n_pairs <= 4");
        const Device dev = make_device(batch.front().device_id, 2 * n_pairs);
        // Best a-posteriori decoder: argmax key per view, smallest key on ties.
        auto decoder = std::make_shared<std::map<std::string, KeyId>>();
        for (const auto& [view, keys] : build_joint(dev, n_pairs, gamma)) {
            KeyId best_key = keys.begin()->first;
            double best_p = keys.begin()->second;
            for (const auto& [key, p] : keys)
                if (p > best_p) {
                    best_p = p;
                    best_key = key;
                }
            (*decoder)[view] = best_key;
        }
        guess_fn = [decoder](const Transcript& t) -> std::vector<int> {
            auto it = decoder->find(view_string(t));
            if (it == decoder->end())
                throw QkdError("transcript view absent from the decoder enumeration");
            return unpack_key(it->second);
        };
    } else {
        throw QkdError("unknown guessing strategy: " + strategy);
    }

    GuessingResult res;
    res.strategy = strategy;
    for (const auto& t : batch) {
        const std::vector<int> guess = guess_fn(t);
        const bool ok = guess == t.sifted_key_a;
        res.per_trial.push_back(ok ? 1 : 0);
        if (ok) ++res.matches;
        if (t.pa.present) {
            ++res.pa_trials;
            if (guess.size() == t.pa.input_length &&
                privacy_amplify(guess, t.pa.output_length, t.pa.seed) == t.pa.key_a)
                ++res.pa_matches;
        }
    }
    res.trials = batch.size();
    res.success_rate = static_cast<double>(res.matches) / static_cast<double>(res.trials);
    res.ci99 = stats::wilson_interval(res.matches, res.trials, stats::kWilson99Z);
    return res;
}

// ---------------------------------------------------------------------------
// Contradiction report.
// ---------------------------------------------------------------------------

ContradictionReport contradiction_report(const Device& dev, std::size_t n,
                                         std::size_t budget) {
    if (n == 0 || n > 12)
        throw QkdError("contradiction report enumerates exactly; 1 <= n <= 12");
    ContradictionReport rep;
    rep.device_id = dev.id();
    rep.n_rounds = n;
    rep.ebit_budget = dev.ebit_budget(n);

    // Phase-error rate: what honest all-X measurements would have seen.
    const InputSeq all_x(n, InputPair{Basis::X, Basis::X});
    const ExactDist dx = enumerate_outputs(dev.trusted(), all_x, budget);
    double dph = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        const auto m = dx.round_pair_marginal(j);
        dph += m[1] + m[2];
    }
    dph /= static_cast<double>(n);
    rep.naive_claim.delta_ph = dph;
    rep.naive_claim.claimed_length = static_cast<double>(n) * (1.0 - binary_entropy(dph));
    rep.naive_claim.formula_id = "naive_cpa";

    // Actual key-generation statistics use the device's real instruments.
    const InputSeq all_z(n, InputPair{Basis::Z, Basis::Z});
    rep.actual_shannon = string_entropy(dev, all_z, EntropyMode::Shannon, Party::A, budget);
    rep.actual_minentropy = string_entropy(dev, all_z, EntropyMode::Min, Party::A, budget);
    rep.gap = rep.naive_claim.claimed_length - rep.actual_minentropy;
    return rep;
}

// ---------------------------------------------------------------------------
// Test-subset invariance.
// ---------------------------------------------------------------------------

SubsetInvarianceResult test_subset_invariance(const Device& dev, std::size_t n,
                                              Basis test_basis, std::size_t budget) {
    if (n < 2 || n > 4)
        throw QkdError("subset invariance enumerates 4^n settings; 2 <= n <= 4");
    SubsetInvarianceResult best;
    std::map<std::uint64_t, ExactDist> cache;
    const auto dist_for = [&](const InputSeq& in) -> const ExactDist& {
        const std::uint64_t k = pack_inputs(in);
        auto it = cache.find(k);
        if (it == cache.end()) it = cache.emplace(k, enumerate_outputs(dev, in, budget)).first;
        return it->second;
    };
    for (std::uint64_t subset = 1; subset < (std::uint64_t{1} << n); ++subset) {
        std::vector<std::size_t> tests;
        std::vector<std::size_t> free_rounds;
        for (std::size_t j = 1; j <= n; ++j)
            ((subset >> (j - 1)) & 1u ? tests : free_rounds).push_back(j);
        const std::size_t nf = free_rounds.size();
        const std::uint64_t assigns = std::uint64_t{1} << (2 * nf);
        std::vector<InputSeq> seqs;
        std::vector<std::map<std::uint64_t, double>> margs;
        seqs.reserve(assigns);
        margs.reserve(assigns);
        for (std::uint64_t a = 0; a < assigns; ++a) {
            InputSeq in(n, InputPair{test_basis, test_basis});
            for (std::size_t i = 0; i < nf; ++i) {
                in[free_rounds[i] - 1].a = bit_basis(static_cast<int>((a >> (2 * i)) & 1u));
                in[free_rounds[i] - 1].b =
                    bit_basis(static_cast<int>((a >> (2 * i + 1)) & 1u));
            }
            margs.push_back(dist_for(in).rounds_marginal(tests));
            seqs.push_back(std::move(in));
        }
        for (std::size_t i = 0; i < seqs.size(); ++i) {
            for (std::size_t l = i + 1; l < seqs.size(); ++l) {
                const double tv = total_variation(margs[i], margs[l]);
                if (tv > best.max_tv) {
                    best.max_tv = tv;
                    best.test_rounds = tests;
                    best.witness_lo = seqs[i];
                    best.witness_hi = seqs[l];
                }
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Serialization.
// ---------------------------------------------------------------------------

namespace {

ordered_json inputs_json(const InputSeq& in) {
    ordered_json arr = ordered_json::array();
    for (const auto& ip : in) arr.push_back(to_string(ip.a) + to_string(ip.b));
    return arr;
}

}  // namespace

ordered_json to_json(const SignallingReport& r) {
    ordered_json j;
    j["n_rounds"] = r.n_rounds;
    j["exact"] = r.exact;
    if (!r.exact) j["total_trials"] = r.total_trials;
    j["max_tv"] = r.max_tv();
    ordered_json rounds = ordered_json::array();
    for (const auto& rs : r.rounds) {
        ordered_json e;
        e["round"] = rs.round;
        e["max_tv"] = rs.max_tv;
        e["max_tv_a"] = rs.max_tv_a;
        e["max_tv_b"] = rs.max_tv_b;
        e["witness_lo"] = inputs_json(rs.witness_lo);
        e["witness_hi"] = inputs_json(rs.witness_hi);
        e["insufficient_support"] = rs.insufficient_support;
        rounds.push_back(std::move(e));
    }
    j["rounds"] = std::move(rounds);
    return j;
}

ordered_json to_json(const GuessingResult& r) {
    ordered_json j;
    j["strategy"] = r.strategy;
    j["trials"] = r.trials;
    j["matches"] = r.matches;
    j["success_rate"] = r.success_rate;
    j["ci99_low"] = r.ci99.low;
    j["ci99_high"] = r.ci99.high;
    j["pa_trials"] = r.pa_trials;
    j["pa_matches"] = r.pa_matches;
    return j;
}

ordered_json to_json(const MapDecoderExact& r) {
    ordered_json j;
    j["overall_success"] = r.overall_success;
    ordered_json rows = ordered_json::array();
    for (const auto& [len, p] : r.prob_by_length) {
        ordered_json e;
        e["sifted_length"] = len;
        e["probability"] = p;
        e["success"] = r.success_by_length.at(len);
        rows.push_back(std::move(e));
    }
    j["by_length"] = std::move(rows);
    return j;
}

ordered_json to_json(const KeyClaim& c) {
    ordered_json j;
    j["delta_ph"] = c.delta_ph;
    j["claimed_length"] = c.claimed_length;
    j["formula_id"] = c.formula_id;
    return j;
}

ordered_json to_json(const ContradictionReport& r) {
    ordered_json j;
    j["device_id"] = r.device_id;
    j["n_rounds"] = r.n_rounds;
    j["naive_claim"] = to_json(r.naive_claim);
    j["actual_shannon_bits"] = r.actual_shannon;
    j["actual_minentropy_bits"] = r.actual_minentropy;
    j["gap_bits"] = r.gap;
    j["ebit_budget"] = r.ebit_budget;
    return j;
}

ordered_json to_json(const SubsetInvarianceResult& r) {
    ordered_json j;
    j["max_tv"] = r.max_tv;
    j["test_rounds"] = r.test_rounds;
    j["witness_lo"] = inputs_json(r.witness_lo);
    j["witness_hi"] = inputs_json(r.witness_hi);
    return j;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void flatten_into(const ordered_json& j, const std::string& prefix,
                  std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            flatten_into(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten_into(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else if (j.is_string()) {
        out.emplace_back(prefix, j.get<std::string>());
    } else {
        out.emplace_back(prefix, j.dump());
    }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> flatten_metrics(const ordered_json& report) {
    std::vector<std::pair<std::string, std::string>> rows;
    flatten_into(report, "", rows);
    return rows;
}

std::string metrics_csv(const ordered_json& report) {
    std::string out = "metric,value\n";
    for (const auto& [k, v] : flatten_metrics(report))
        out += csv_escape(k) + "," + csv_escape(v) + "\n";
    return out;
}

}  // namespace qkdmem
