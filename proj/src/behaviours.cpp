#include <cmath>

#include "qkdmem/devices.hpp"
#include "qkdmem/random_states.hpp"

namespace qkdmem {

namespace {

// Kraus template for feeding the memory register into the measurement slot;
// labels are rebound per round by the executor.
std::shared_ptr<const Channel> swap_in_memory() {
    static const auto ch = std::make_shared<const Channel>(
        Channel::replace_with_memory("m", "q_in", "q_out"));
    return ch;
}

StateVector plus_pair(const Label& la, const Label& lb) {
    const double r = 1.0 / std::sqrt(2.0);
    return tensor(StateVector::single(la, r, r), StateVector::single(lb, r, r));
}

StateVector zero_pair(const Label& la, const Label& lb) {
    return StateVector::computational({la, lb}, 0);
}

}  // namespace

Process2Behaviour iid_bell() {
    Process2Behaviour b;
    b.id = "iid_bell";
    b.eve_prepare = [](std::size_t, EveMemory&, const Label& la, const Label& lb) {
        return bell_state(la, lb);
    };
    b.program = [](Party, std::size_t) { return PartyRoundProgram{}; };
    b.ebit_budget = [](std::size_t n) { return n; };
    return b;
}

Process2Behaviour echo_signalling() {
    Process2Behaviour b;
    b.id = "echo";
    b.eve_prepare = [](std::size_t round, EveMemory&, const Label& la, const Label& lb) {
        // Round 1 has no previous input to echo; |+>|+> measured in Z gives
        // the uniform bits. Later deliveries are discarded by the swap.
        return round == 1 ? plus_pair(la, lb) : zero_pair(la, lb);
    };
    b.program = [](Party, std::size_t round) {
        PartyRoundProgram p;
        if (round > 1) p.memory_channel = swap_in_memory();
        p.memory_out = MemoryOut::RecordInput;
        p.fixed_instrument = Instrument::standard(Basis::Z);
        return p;
    };
    b.ebit_budget = [](std::size_t) { return std::size_t{0}; };
    return b;
}

Process2Behaviour retain_remeasure() {
    Process2Behaviour b;
    b.id = "retain_remeasure";
    b.eve_prepare = [](std::size_t round, EveMemory&, const Label& la, const Label& lb) {
        return round == 1 ? bell_state(la, lb) : zero_pair(la, lb);
    };
    b.program = [](Party, std::size_t round) {
        PartyRoundProgram p;
        if (round > 1) p.memory_channel = swap_in_memory();
        p.memory_out = MemoryOut::RetainQubit;
        return p;
    };
    b.ebit_budget = [](std::size_t) { return std::size_t{1}; };
    return b;
}

Process2Behaviour even_round_copier() {
    Process2Behaviour b;
    b.id = "even_copier";
    b.eve_prepare = [](std::size_t round, EveMemory&, const Label& la, const Label& lb) {
        return round % 2 == 1 ? bell_state(la, lb) : zero_pair(la, lb);
    };
    b.program = [](Party, std::size_t round) {
        PartyRoundProgram p;
        if (round % 2 == 1) {
            p.memory_out = MemoryOut::RecordOutcome;
        } else {
            p.memory_channel = swap_in_memory();
            p.fixed_instrument = Instrument::standard(Basis::Z);
        }
        return p;
    };
    b.ebit_budget = [](std::size_t n) { return (n + 1) / 2; };
    return b;
}

Process2Behaviour random_trivial_behaviour(Rng& rng) {
    const std::uint64_t seed = rng.next_u64();

    // One random two-operator mixed-unitary channel per party, fixed at
    // construction. The with-memory form discards the memory register, so the
    // channel output never depends on it.
    auto make_residual = [&](Party) {
        Rng local(rng.next_u64());
        double w = 0.25 + 0.5 * local.next_double();
        std::vector<CMat> ops;
        ops.push_back(std::sqrt(w) * random_unitary2(local));
        ops.push_back(std::sqrt(1.0 - w) * random_unitary2(local));
        return ops;
    };
    auto residual_a = make_residual(Party::A);
    auto residual_b = make_residual(Party::B);

    auto first_round = [](const std::vector<CMat>& ops) {
        Channel ch;
        ch.kraus = ops;
        ch.input_labels = {"q"};
        ch.output_labels = {"q"};
        ch.check();
        return std::make_shared<const Channel>(std::move(ch));
    };
    auto with_memory = [](const std::vector<CMat>& ops) {
        Channel ch;
        for (int m = 0; m < 2; ++m) {
            for (const auto& op : ops) {
                CMat k(2, 4);  // maps |m',q> -> delta_{m,m'} op|q>
                for (std::size_t r = 0; r < 2; ++r)
                    for (std::size_t q = 0; q < 2; ++q)
                        k.at(r, static_cast<std::size_t>(2 * m) + q) = op.at(r, q);
                ch.kraus.push_back(std::move(k));
            }
        }
        ch.input_labels = {"m", "q_in"};
        ch.output_labels = {"q_out"};
        ch.check();
        return std::make_shared<const Channel>(std::move(ch));
    };

    struct Channels {
        std::shared_ptr<const Channel> first;
        std::shared_ptr<const Channel> later;
    };
    auto chans = std::make_shared<const std::array<Channels, 2>>(std::array<Channels, 2>{
        Channels{first_round(residual_a), with_memory(residual_a)},
        Channels{first_round(residual_b), with_memory(residual_b)}});

    Process2Behaviour b;
    b.id = "random_trivial";
    b.eve_prepare = [seed](std::size_t round, EveMemory&, const Label& la, const Label& lb) {
        // Input-independent preparation, deterministic per round.
        Rng prep_rng(splitmix64(seed ^ round));
        return random_pure_state({la, lb}, prep_rng);
    };
    b.program = [chans](Party party, std::size_t round) {
        const auto& c = (*chans)[party == Party::A ? 0 : 1];
        PartyRoundProgram p;
        p.memory_channel = round == 1 ? c.first : c.later;
        p.memory_out = MemoryOut::RecordOutcome;
        return p;
    };
    b.ebit_budget = [](std::size_t n) { return n; };
    return b;
}

Process1Spec iid_bell_spec(std::size_t n) {
    Process1Spec spec;
    spec.n_rounds = n;
    P1Component comp;
    comp.weight = 1.0;
    for (std::size_t j = 1; j <= n; ++j) {
        P1Block block;
        block.ensemble.push_back(
            {1.0, bell_state(p1_label(Party::A, j), p1_label(Party::B, j))});
        comp.blocks.push_back(std::move(block));
    }
    spec.components.push_back(std::move(comp));
    spec.ebits = n;
    return spec;
}

Process1Spec classical_copy(std::size_t n) {
    Process1Spec spec;
    spec.id = "classical_copy";
    spec.n_rounds = n;
    for (int bit = 0; bit < 2; ++bit) {
        P1Component comp;
        comp.weight = 0.5;
        for (std::size_t j = 1; j <= n; ++j) {
            for (Party p : {Party::A, Party::B}) {
                P1Block block;
                block.ensemble.push_back(
                    {1.0, StateVector::computational({p1_label(p, j)},
                                                     static_cast<std::uint64_t>(bit))});
                comp.blocks.push_back(std::move(block));
            }
        }
        spec.components.push_back(std::move(comp));
    }
    spec.instrument_map = [](Party, std::size_t, Basis) {
        return Instrument::standard(Basis::Z);
    };
    spec.ebits = 0;
    return spec;
}

Process1Spec random_process1_spec(std::size_t n, Rng& rng) {
    Process1Spec spec;
    spec.n_rounds = n;
    std::vector<Label> labels;
    for (std::size_t j = 1; j <= n; ++j) {
        labels.push_back(p1_label(Party::A, j));
        labels.push_back(p1_label(Party::B, j));
    }
    // Half the draws are pure joint states, half are two-component mixtures.
    std::size_t n_comp = rng.next_bit() ? 2 : 1;
    std::vector<double> weights;
    if (n_comp == 1) {
        weights = {1.0};
    } else {
        double w = 0.2 + 0.6 * rng.next_double();
        weights = {w, 1.0 - w};
    }
    for (double w : weights) {
        P1Component comp;
        comp.weight = w;
        P1Block block;
        block.ensemble.push_back({1.0, random_pure_state(labels, rng)});
        comp.blocks.push_back(std::move(block));
        spec.components.push_back(std::move(comp));
    }
    spec.ebits = n;
    return spec;
}

std::vector<std::string> known_device_ids() {
    return {"iid_bell", "echo", "retain_remeasure", "even_copier", "classical_copy"};
}

Device make_device(const std::string& id, std::size_t n_rounds) {
    if (id == "iid_bell") return Device(iid_bell());
    if (id == "echo") return Device(echo_signalling());
    if (id == "retain_remeasure") return Device(retain_remeasure());
    if (id == "even_copier") return Device(even_round_copier());
    if (id == "classical_copy") return Device(classical_copy(n_rounds));
    throw QkdError("unknown device id: " + id);
}

}  // namespace qkdmem
