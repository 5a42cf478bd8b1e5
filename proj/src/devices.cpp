#include "qkdmem/devices.hpp"

#include <algorithm>
#include <cmath>

namespace qkdmem {

Label p1_label(Party p, std::size_t round) {
    return (p == Party::A ? "A" : "B") + std::to_string(round);
}

const std::vector<Label>& P1Block::labels() const {
    if (ensemble.empty()) throw InvalidStateError("block has an empty ensemble");
    return ensemble.front().state.labels;
}

Instrument Process1Spec::instrument_for(Party p, std::size_t round, Basis b) const {
    if (instrument_map) return instrument_map(p, round, b);
    return Instrument::standard(b);
}

void Process1Spec::check(double tol) const {
    if (n_rounds == 0) throw InvalidStateError("spec has zero rounds");
    if (components.empty()) throw InvalidStateError("spec has no components");
    double wsum = 0.0;
    for (const auto& comp : components) {
        wsum += comp.weight;
        std::vector<Label> seen;
        for (const auto& block : comp.blocks) {
            double bsum = 0.0;
            for (const auto& m : block.ensemble) {
                bsum += m.weight;
                m.state.check(tol);
                if (m.state.labels != block.labels())
                    throw InvalidStateError("block ensemble members disagree on registers");
            }
            if (std::abs(bsum - 1.0) > tol)
                throw InvalidStateError("block ensemble weights do not sum to 1");
            seen.insert(seen.end(), block.labels().begin(), block.labels().end());
        }
        std::sort(seen.begin(), seen.end());
        std::vector<Label> expected;
        for (std::size_t j = 1; j <= n_rounds; ++j) {
            expected.push_back(p1_label(Party::A, j));
            expected.push_back(p1_label(Party::B, j));
        }
        std::sort(expected.begin(), expected.end());
        if (seen != expected)
            throw InvalidStateError("component does not cover each round register exactly once");
    }
    if (std::abs(wsum - 1.0) > tol)
        throw InvalidStateError("component weights do not sum to 1");
}

DensityOperator Process1Spec::joint_density() const {
    if (2 * n_rounds > 12) throw EnumerationBudgetError("joint density limited to 12 registers");
    std::vector<Label> order;
    for (std::size_t j = 1; j <= n_rounds; ++j) order.push_back(p1_label(Party::A, j));
    for (std::size_t j = 1; j <= n_rounds; ++j) order.push_back(p1_label(Party::B, j));

    CMat sum(std::size_t{1} << order.size(), std::size_t{1} << order.size());
    for (const auto& comp : components) {
        DensityOperator acc({}, CMat::identity(1));
        for (const auto& block : comp.blocks) {
            MixedState m;
            for (const auto& w : block.ensemble) m.components.push_back({w.weight, w.state});
            acc = tensor(acc, m.to_density());
        }
        sum = sum + comp.weight * acc.permuted(order).mat;
    }
    return DensityOperator(order, std::move(sum));
}

// ---------------------------------------------------------------------------
// Device
// ---------------------------------------------------------------------------

namespace {

std::vector<std::map<Label, std::size_t>> build_block_index(const Process1Spec& spec) {
    std::vector<std::map<Label, std::size_t>> idx;
    idx.reserve(spec.components.size());
    for (const auto& comp : spec.components) {
        std::map<Label, std::size_t> m;
        for (std::size_t b = 0; b < comp.blocks.size(); ++b)
            for (const auto& l : comp.blocks[b].labels()) m[l] = b;
        idx.push_back(std::move(m));
    }
    return idx;
}

StateVector scalar_state() { return StateVector::computational({}, 0); }

StateVector classical_bit_state(const Label& l, int bit) {
    return StateVector::computational({l}, static_cast<std::uint64_t>(bit & 1));
}

Label delivered_label(Party p, std::size_t round) {
    return (p == Party::A ? "qA" : "qB") + std::to_string(round);
}

Label record_label(Party p, std::size_t round) {
    return (p == Party::A ? "mA" : "mB") + std::to_string(round);
}

}  // namespace

Device::Device(Process1Spec spec) {
    spec.check();
    id_ = spec.id.empty() ? "process1_spec" : spec.id;
    spec_ = std::make_shared<const Process1Spec>(std::move(spec));
    block_of_ = std::make_shared<const std::vector<std::map<Label, std::size_t>>>(
        build_block_index(*spec_));
}

Device::Device(Process2Behaviour behaviour) {
    if (!behaviour.eve_prepare || !behaviour.program)
        throw InvalidStateError("behaviour is missing its preparation or program");
    id_ = behaviour.id.empty() ? "process2_behaviour" : behaviour.id;
    behaviour_ = std::make_shared<const Process2Behaviour>(std::move(behaviour));
}

std::optional<std::size_t> Device::fixed_rounds() const {
    if (spec_) return spec_->n_rounds;
    return std::nullopt;
}

std::size_t Device::ebit_budget(std::size_t n) const {
    if (spec_) return spec_->ebits;
    return behaviour_->ebit_budget ? behaviour_->ebit_budget(n) : 0;
}

Device Device::trusted() const {
    Device d = *this;
    d.trust_instruments_ = true;
    return d;
}

Instrument Device::instrument_for_p1(Party p, std::size_t round, Basis b) const {
    if (trust_instruments_) return Instrument::standard(b);
    return spec_->instrument_for(p, round, b);
}

std::vector<InitBranch> Device::initial() const {
    std::vector<InitBranch> out;
    if (spec_) {
        for (std::size_t c = 0; c < spec_->components.size(); ++c)
            out.push_back({spec_->components[c].weight, P1RunState{c, {}}});
    } else {
        out.push_back({1.0, P2RunState{scalar_state(), std::nullopt, std::nullopt, 0}});
    }
    return out;
}

DeviceState Device::sample_initial(Rng& rng) const {
    auto branches = initial();
    if (branches.size() == 1) return branches.front().state;
    double u = rng.next_double();
    double acc = 0.0;
    for (auto& br : branches) {
        acc += br.weight;
        if (u < acc) return std::move(br.state);
    }
    return std::move(branches.back().state);
}

// --------------------------- Process 1 stepping ----------------------------

namespace {

// Weighted intermediate states while a step's branching unfolds.
struct P1Partial {
    double prob = 1.0;
    P1RunState st;
    int a = 0;
};

}  // namespace

std::vector<StepBranch> Device::step_p1(const P1RunState& s, std::size_t round, Basis xa,
                                        Basis xb) const {
    if (round == 0 || round > spec_->n_rounds)
        throw QkdError("round index out of range for this spec");
    const auto& comp = spec_->components[s.component];
    const auto& blk_of = (*block_of_)[s.component];

    auto materialize = [&](std::vector<P1Partial>& work, std::size_t blk) {
        std::vector<P1Partial> out;
        for (auto& w : work) {
            if (w.st.touched.count(blk)) {
                out.push_back(std::move(w));
                continue;
            }
            for (const auto& member : comp.blocks[blk].ensemble) {
                P1Partial nxt = w;
                nxt.prob *= member.weight;
                nxt.st.touched[blk] = member.state;
                out.push_back(std::move(nxt));
            }
        }
        work = std::move(out);
    };
    const Label la = p1_label(Party::A, round);
    const Label lb = p1_label(Party::B, round);
    const std::size_t blk_a = blk_of.at(la);
    const std::size_t blk_b = blk_of.at(lb);
    const Instrument ia = instrument_for_p1(Party::A, round, xa);
    const Instrument ib = instrument_for_p1(Party::B, round, xb);

    std::vector<P1Partial> work{{1.0, s, 0}};
    materialize(work, blk_a);
    {
        std::vector<P1Partial> out;
        for (auto& w : work) {
            for (auto& br : measure_all_branches(w.st.touched.at(blk_a), la, ia)) {
                if (!br.post) continue;
                P1Partial nxt = w;
                nxt.prob *= br.probability;
                nxt.a = br.outcome;
                nxt.st.touched[blk_a] = std::move(*br.post);
                out.push_back(std::move(nxt));
            }
        }
        work = std::move(out);
    }
    materialize(work, blk_b);
    std::vector<StepBranch> result;
    for (auto& w : work) {
        for (auto& br : measure_all_branches(w.st.touched.at(blk_b), lb, ib)) {
            if (!br.post) continue;
            StepBranch sb;
            sb.prob = w.prob * br.probability;
            sb.a = w.a;
            sb.b = br.outcome;
            P1RunState nxt = w.st;
            nxt.touched[blk_b] = std::move(*br.post);
            sb.next = std::move(nxt);
            result.push_back(std::move(sb));
        }
    }
    return result;
}

// --------------------------- Process 2 stepping ----------------------------

namespace {

struct P2Partial {
    double prob = 1.0;
    P2RunState st;
    int a = 0;
    int b = 0;
};

Channel bind_memory_channel(const Channel& proto, const std::optional<Label>& mem,
                            const Label& q) {
    if (proto.input_labels.size() == 2) {
        if (!mem)
            throw InvalidStateError("round program consumes memory, but none was emitted");
        return proto.rebind({*mem, q}, {q});
    }
    if (proto.input_labels.size() == 1) return proto.rebind({q}, {q});
    throw InvalidStateError("memory channel must take one or two registers");
}

// Traces a register out of a pure state by branching over a forgotten Z
// measurement (exact for all later observations since the register is dead).
template <typename Fn>
void discard_register(const P2Partial& w, const Label& l, Fn&& emit) {
    auto branches = measure_all_branches(w.st.live, l, Basis::Z);
    for (auto& br : branches) {
        if (!br.post) continue;
        P2Partial nxt = w;
        nxt.prob *= br.probability;
        nxt.st.live = br.post->contract_qubit(
            l, {cplx{br.outcome == 0 ? 1.0 : 0.0}, cplx{br.outcome == 1 ? 1.0 : 0.0}});
        emit(std::move(nxt));
    }
}

// Post-measurement bookkeeping: drop or retain the measured register and
// emit the next memory register according to the round program.
void emit_memory(P2RunState& st, std::optional<Label>& m, const PartyRoundProgram& prog,
                 const Instrument& ins, int outcome, Basis input, Party party,
                 std::size_t round, const Label& q) {
    const auto& e = ins.eigvec[static_cast<std::size_t>(outcome)];
    switch (prog.memory_out) {
        case MemoryOut::RetainQubit:
            m = q;
            break;
        case MemoryOut::None:
            st.live = st.live.contract_qubit(q, {e[0], e[1]});
            break;
        case MemoryOut::RecordOutcome: {
            st.live = st.live.contract_qubit(q, {e[0], e[1]});
            Label rl = record_label(party, round);
            st.live = tensor(st.live, classical_bit_state(rl, outcome));
            m = rl;
            break;
        }
        case MemoryOut::RecordInput: {
            st.live = st.live.contract_qubit(q, {e[0], e[1]});
            Label rl = record_label(party, round);
            st.live = tensor(st.live, classical_bit_state(rl, basis_bit(input)));
            m = rl;
            break;
        }
    }
}

}  // namespace

std::vector<StepBranch> Device::step_p2(const P2RunState& s, std::size_t round, Basis xa,
                                        Basis xb) const {
    if (round == 0) throw QkdError("rounds are 1-based");
    const Label la = delivered_label(Party::A, round);
    const Label lb = delivered_label(Party::B, round);

    P2RunState start = s;
    StateVector prep = behaviour_->eve_prepare(round, start.eve_mem, la, lb);
    if (prep.labels != std::vector<Label>{la, lb})
        throw InvalidStateError("preparation must emit the two requested registers");
    start.live = tensor(start.live, prep);

    std::vector<P2Partial> work{{1.0, std::move(start), 0, 0}};

    auto run_party = [&](Party party, Basis input, const Label& q, bool into_a) {
        const PartyRoundProgram prog = behaviour_->program(party, round);
        auto mem = [party](P2RunState& st) -> std::optional<Label>& {
            return party == Party::A ? st.mem_a : st.mem_b;
        };

        // 1. Memory channel (or explicit discard of an unconsumed register).
        const bool consumes_memory =
            prog.memory_channel && prog.memory_channel->input_labels.size() == 2;
        std::vector<P2Partial> staged;
        for (auto& w : work) {
            std::optional<Label>& m = mem(w.st);
            if (consumes_memory) {
                Channel bound = bind_memory_channel(*prog.memory_channel, m, q);
                m.reset();
                for (auto& br : apply_channel_branches(bound, w.st.live)) {
                    P2Partial nxt = w;
                    nxt.prob *= br.weight;
                    nxt.st.live = std::move(br.state);
                    staged.push_back(std::move(nxt));
                }
                continue;
            }
            std::vector<P2Partial> local;
            if (m) {
                // Memory exists but this round ignores it: dispose of it.
                Label dead = *m;
                m.reset();
                discard_register(w, dead,
                                 [&](P2Partial&& nxt) { local.push_back(std::move(nxt)); });
            } else {
                local.push_back(std::move(w));
            }
            if (prog.memory_channel) {
                Channel bound = bind_memory_channel(*prog.memory_channel, std::nullopt, q);
                for (auto& w2 : local) {
                    for (auto& br : apply_channel_branches(bound, w2.st.live)) {
                        P2Partial nxt = w2;
                        nxt.prob *= br.weight;
                        nxt.st.live = std::move(br.state);
                        staged.push_back(std::move(nxt));
                    }
                }
            } else {
                for (auto& w2 : local) staged.push_back(std::move(w2));
            }
        }

        // 2. Measure, 3. emit memory.
        const Instrument ins = (!trust_instruments_ && prog.fixed_instrument)
                                   ? *prog.fixed_instrument
                                   : Instrument::standard(input);
        std::vector<P2Partial> done;
        for (auto& w : staged) {
            for (auto& br : measure_all_branches(w.st.live, q, ins)) {
                if (!br.post) continue;
                P2Partial nxt = w;
                nxt.prob *= br.probability;
                nxt.st.live = std::move(*br.post);
                if (into_a)
                    nxt.a = br.outcome;
                else
                    nxt.b = br.outcome;
                emit_memory(nxt.st, mem(nxt.st), prog, ins, br.outcome, input, party, round, q);
                done.push_back(std::move(nxt));
            }
        }
        work = std::move(done);
    };

    run_party(Party::A, xa, la, true);
    run_party(Party::B, xb, lb, false);

    std::vector<StepBranch> result;
    result.reserve(work.size());
    for (auto& w : work)
        result.push_back({w.prob, w.a, w.b, std::move(w.st)});
    return result;
}

std::vector<StepBranch> Device::step(const DeviceState& s, std::size_t round, Basis xa,
                                     Basis xb) const {
    if (spec_) return step_p1(std::get<P1RunState>(s), round, xa, xb);
    return step_p2(std::get<P2RunState>(s), round, xa, xb);
}

namespace {

StateVector sample_channel(const Channel& ch, const StateVector& psi, Rng& rng) {
    auto branches = apply_channel_branches(ch, psi);
    if (branches.empty()) throw ZeroProbabilityError("channel produced no surviving branch");
    if (branches.size() == 1) return std::move(branches.front().state);
    double u = rng.next_double();
    double acc = 0.0;
    for (auto& br : branches) {
        acc += br.weight;
        if (u < acc) return std::move(br.state);
    }
    return std::move(branches.back().state);
}

}  // namespace

std::pair<std::array<int, 2>, DeviceState> Device::sample_step(const DeviceState& s,
                                                               std::size_t round, Basis xa,
                                                               Basis xb, Rng& rng) const {
    if (spec_) {
        if (round == 0 || round > spec_->n_rounds)
            throw QkdError("round index out of range for this spec");
        P1RunState cur = std::get<P1RunState>(s);
        const auto& comp = spec_->components[cur.component];
        const auto& blk_of = (*block_of_)[cur.component];
        std::array<int, 2> ab{};
        for (Party party : {Party::A, Party::B}) {
            Basis basis = party == Party::A ? xa : xb;
            Label l = p1_label(party, round);
            std::size_t blk = blk_of.at(l);
            if (!cur.touched.count(blk)) {
                const auto& ensemble = comp.blocks[blk].ensemble;
                std::size_t pick = ensemble.size() - 1;
                if (ensemble.size() > 1) {
                    double u = rng.next_double();
                    double acc = 0.0;
                    for (std::size_t m = 0; m < ensemble.size(); ++m) {
                        acc += ensemble[m].weight;
                        if (u < acc) {
                            pick = m;
                            break;
                        }
                    }
                }
                cur.touched[blk] = ensemble[pick].state;
            }
            MeasureResult r = measure(cur.touched.at(blk), l,
                                      instrument_for_p1(party, round, basis),
                                      rng.next_double());
            cur.touched[blk] = std::move(r.post);
            ab[party == Party::A ? 0 : 1] = r.outcome;
        }
        return {ab, std::move(cur)};
    }

    P2RunState cur = std::get<P2RunState>(s);
    const Label la = delivered_label(Party::A, round);
    const Label lb = delivered_label(Party::B, round);
    StateVector prep = behaviour_->eve_prepare(round, cur.eve_mem, la, lb);
    if (prep.labels != std::vector<Label>{la, lb})
        throw InvalidStateError("preparation must emit the two requested registers");
    cur.live = tensor(cur.live, prep);

    std::array<int, 2> ab{};
    for (Party party : {Party::A, Party::B}) {
        const Basis input = party == Party::A ? xa : xb;
        const Label& q = party == Party::A ? la : lb;
        const PartyRoundProgram prog = behaviour_->program(party, round);
        std::optional<Label>& m = party == Party::A ? cur.mem_a : cur.mem_b;

        const bool consumes_memory =
            prog.memory_channel && prog.memory_channel->input_labels.size() == 2;
        if (consumes_memory) {
            Channel bound = bind_memory_channel(*prog.memory_channel, m, q);
            m.reset();
            cur.live = sample_channel(bound, cur.live, rng);
        } else {
            if (m) {
                MeasureResult dead = measure(cur.live, *m, Basis::Z, rng.next_double());
                cur.live = dead.post.contract_qubit(
                    *m, {cplx{dead.outcome == 0 ? 1.0 : 0.0},
                         cplx{dead.outcome == 1 ? 1.0 : 0.0}});
                m.reset();
            }
            if (prog.memory_channel) {
                Channel bound = bind_memory_channel(*prog.memory_channel, std::nullopt, q);
                cur.live = sample_channel(bound, cur.live, rng);
            }
        }

        const Instrument ins = (!trust_instruments_ && prog.fixed_instrument)
                                   ? *prog.fixed_instrument
                                   : Instrument::standard(input);
        MeasureResult r = measure(cur.live, q, ins, rng.next_double());
        cur.live = std::move(r.post);
        ab[party == Party::A ? 0 : 1] = r.outcome;
        emit_memory(cur, m, prog, ins, r.outcome, input, party, round, q);
    }
    return {ab, std::move(cur)};
}

// ------------------------------- Execution ---------------------------------

std::uint64_t DeviceTrace::packed_inputs() const {
    InputSeq in;
    in.reserve(rounds.size());
    for (const auto& r : rounds) in.push_back({r.input_a, r.input_b});
    return pack_inputs(in);
}

std::uint64_t DeviceTrace::packed_outputs() const {
    std::vector<std::array<int, 2>> ab;
    ab.reserve(rounds.size());
    for (const auto& r : rounds) ab.push_back({r.output_a, r.output_b});
    return pack_outputs(ab);
}

DeviceTrace run_device(const Device& dev, std::size_t n,
                       const std::function<InputPair(std::size_t round)>& next_input, Rng& rng) {
    if (n == 0) throw QkdError("round count must be positive");
    if (auto fixed = dev.fixed_rounds(); fixed && *fixed != n)
        throw QkdError("device round count mismatch: spec has " + std::to_string(*fixed) +
                       " rounds, requested " + std::to_string(n));
    DeviceState st = dev.sample_initial(rng);
    DeviceTrace trace;
    trace.rounds.reserve(n);
    for (std::size_t j = 1; j <= n; ++j) {
        InputPair in = next_input(j);
        auto [ab, next] = dev.sample_step(st, j, in.a, in.b, rng);
        RoundRecord rec;
        rec.round_index = j;
        rec.input_a = in.a;
        rec.input_b = in.b;
        rec.output_a = ab[0];
        rec.output_b = ab[1];
        trace.rounds.push_back(rec);
        st = std::move(next);
    }
    return trace;
}

DeviceTrace run_device(const Device& dev, const InputSeq& inputs, Rng& rng) {
    return run_device(dev, inputs.size(),
                      [&](std::size_t j) { return inputs[j - 1]; }, rng);
}

DeviceTrace run_process2(const Process2Behaviour& b, const InputSeq& inputs, Rng& rng) {
    return run_device(Device(b), inputs, rng);
}

DeviceTrace run_process1(const Process1Spec& spec, const InputSeq& inputs, Rng& rng) {
    return run_device(Device(spec), inputs, rng);
}

// ------------------------------ Enumeration --------------------------------

namespace {

struct OutputEnumerator {
    const Device& dev;
    const InputSeq& inputs;
    std::size_t budget;
    std::size_t visited = 0;
    ExactDist dist = {};
    std::vector<std::array<int, 2>> outs = {};

    void walk(const DeviceState& st, std::size_t round, double prob) {
        if (round > inputs.size()) {
            dist.add(pack_outputs(outs), prob);
            return;
        }
        for (auto& br : dev.step(st, round, inputs[round - 1].a, inputs[round - 1].b)) {
            if (br.prob <= kZeroProbTol) continue;
            if (++visited > budget)
                throw EnumerationBudgetError("enumeration budget exceeded");
            outs.push_back({br.a, br.b});
            walk(br.next, round + 1, prob * br.prob);
            outs.pop_back();
        }
    }
};

}  // namespace

ExactDist enumerate_outputs(const Device& dev, const InputSeq& inputs, std::size_t budget) {
    if (inputs.empty()) throw QkdError("round count must be positive");
    if (auto fixed = dev.fixed_rounds(); fixed && *fixed != inputs.size())
        throw QkdError("device round count mismatch");
    OutputEnumerator e{dev, inputs, budget};
    e.dist.n_rounds = inputs.size();
    for (auto& init : dev.initial()) e.walk(init.state, 1, init.weight);
    return e.dist;
}

// ------------------------- Ordered Process 1 runs --------------------------

MeasureOrder natural_order(std::size_t n) {
    MeasureOrder order;
    for (std::size_t j = 1; j <= n; ++j) {
        order.push_back({Party::A, j});
        order.push_back({Party::B, j});
    }
    return order;
}

namespace {

void check_order(const MeasureOrder& order, std::size_t n) {
    if (order.size() != 2 * n) throw QkdError("measurement order must list all 2n registers");
    MeasureOrder sorted = order;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw QkdError("measurement order repeats a register");
}

struct OrderedEnumerator {
    const Process1Spec& spec;
    const std::vector<std::map<Label, std::size_t>>& block_of;
    const InputSeq& inputs;
    const MeasureOrder& order;
    std::size_t budget;
    std::size_t visited = 0;
    ExactDist dist = {};
    std::vector<std::array<int, 2>> outs = {};

    void walk(std::size_t comp, std::map<std::size_t, StateVector> touched, std::size_t pos,
              double prob) {
        if (pos == order.size()) {
            dist.add(pack_outputs(outs), prob);
            return;
        }
        auto [party, round] = order[pos];
        Basis basis = party == Party::A ? inputs[round - 1].a : inputs[round - 1].b;
        Instrument ins = spec.instrument_for(party, round, basis);
        Label l = p1_label(party, round);
        std::size_t blk = block_of[comp].at(l);

        std::vector<std::pair<double, StateVector>> states;
        if (touched.count(blk)) {
            states.push_back({1.0, touched.at(blk)});
        } else {
            for (const auto& member : spec.components[comp].blocks[blk].ensemble)
                states.push_back({member.weight, member.state});
        }
        for (auto& [w, st] : states) {
            for (auto& br : measure_all_branches(st, l, ins)) {
                if (!br.post) continue;
                if (++visited > budget)
                    throw EnumerationBudgetError("enumeration budget exceeded");
                outs[round - 1][party == Party::A ? 0 : 1] = br.outcome;
                auto next = touched;
                next[blk] = std::move(*br.post);
                walk(comp, std::move(next), pos + 1, prob * w * br.probability);
            }
        }
    }
};

}  // namespace

ExactDist enumerate_process1_ordered(const Process1Spec& spec, const InputSeq& inputs,
                                     const MeasureOrder& order, std::size_t budget) {
    spec.check();
    if (inputs.size() != spec.n_rounds) throw QkdError("device round count mismatch");
    check_order(order, spec.n_rounds);
    auto block_of = build_block_index(spec);
    OrderedEnumerator e{spec, block_of, inputs, order, budget};
    e.dist.n_rounds = spec.n_rounds;
    e.outs.assign(spec.n_rounds, {0, 0});
    for (std::size_t c = 0; c < spec.components.size(); ++c)
        e.walk(c, {}, 0, spec.components[c].weight);
    return e.dist;
}

DeviceTrace run_process1_ordered(const Process1Spec& spec, const InputSeq& inputs,
                                 const MeasureOrder& order, Rng& rng) {
    spec.check();
    if (inputs.size() != spec.n_rounds) throw QkdError("device round count mismatch");
    check_order(order, spec.n_rounds);
    auto block_of = build_block_index(spec);

    // Pick a component, then walk registers in the requested order.
    std::size_t comp = 0;
    if (spec.components.size() > 1) {
        double u = rng.next_double();
        double acc = 0.0;
        for (std::size_t c = 0; c < spec.components.size(); ++c) {
            acc += spec.components[c].weight;
            if (u < acc) {
                comp = c;
                break;
            }
            comp = c;
        }
    }
    std::map<std::size_t, StateVector> touched;
    DeviceTrace trace;
    trace.rounds.resize(spec.n_rounds);
    for (std::size_t j = 1; j <= spec.n_rounds; ++j) {
        trace.rounds[j - 1].round_index = j;
        trace.rounds[j - 1].input_a = inputs[j - 1].a;
        trace.rounds[j - 1].input_b = inputs[j - 1].b;
    }
    for (const auto& [party, round] : order) {
        Basis basis = party == Party::A ? inputs[round - 1].a : inputs[round - 1].b;
        Instrument ins = spec.instrument_for(party, round, basis);
        Label l = p1_label(party, round);
        std::size_t blk = block_of[comp].at(l);
        if (!touched.count(blk)) {
            const auto& ensemble = spec.components[comp].blocks[blk].ensemble;
            std::size_t pick = ensemble.size() - 1;
            if (ensemble.size() > 1) {
                double u = rng.next_double();
                double acc = 0.0;
                for (std::size_t m = 0; m < ensemble.size(); ++m) {
                    acc += ensemble[m].weight;
                    if (u < acc) {
                        pick = m;
                        break;
                    }
                }
            }
            touched[blk] = ensemble[pick].state;
        }
        MeasureResult r = measure(touched.at(blk), l, ins, rng.next_double());
        touched[blk] = std::move(r.post);
        if (party == Party::A)
            trace.rounds[round - 1].output_a = r.outcome;
        else
            trace.rounds[round - 1].output_b = r.outcome;
    }
    return trace;
}

}  // namespace qkdmem
