#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qkdmem/channel.hpp"
#include "qkdmem/distribution.hpp"
#include "qkdmem/instrument.hpp"
#include "qkdmem/rng.hpp"

namespace qkdmem {

// ---------------------------------------------------------------------------
// Process 1: a fixed joint state across all rounds, measured factor by factor.
// ---------------------------------------------------------------------------

// Register naming for round j: Alice "A<j>", Bob "B<j>" (1-based).
Label p1_label(Party p, std::size_t round);

// A block groups registers whose joint state is independent of every other
// block in the same component; its state is a classical mixture of pure
// states. Keeping |Φ+⟩^⊗n as n two-qubit blocks (instead of one 2n-qubit
// state) is what makes large round counts tractable.
struct P1Block {
    std::vector<WeightedState> ensemble;  // weights sum to 1, equal label sets
    const std::vector<Label>& labels() const;
};

// One term of a global classical mixture; blocks are independent within it.
struct P1Component {
    double weight = 1.0;
    std::vector<P1Block> blocks;
};

struct Process1Spec {
    std::string id = "process1_spec";
    std::size_t n_rounds = 0;
    std::vector<P1Component> components;
    // (party, round, requested basis) -> instrument actually applied.
    // Null means honest: the standard instrument of the requested basis.
    std::function<Instrument(Party, std::size_t, Basis)> instrument_map;
    std::size_t ebits = 0;  // maximally entangled pairs the state contains

    Instrument instrument_for(Party p, std::size_t round, Basis b) const;
    // Component weights sum to 1; every component covers each of the 2n
    // round registers exactly once.
    void check(double tol = kStructuralTol) const;
    // Dense form for small systems (≤ 12 registers); test/debug only.
    DensityOperator joint_density() const;
};

Process1Spec iid_bell_spec(std::size_t n);
// The always-measure-Z behaviour on (|0...0><0...0| + |1...1><1...1|)/2.
Process1Spec classical_copy(std::size_t n);
// Haar-random pure joint state with honest instruments (keeps n ≤ 4 small).
Process1Spec random_process1_spec(std::size_t n, Rng& rng);

// ---------------------------------------------------------------------------
// Process 2: sequential rounds with device-side memory registers.
// ---------------------------------------------------------------------------

enum class MemoryOut {
    None,           // discard everything after measuring
    RetainQubit,    // keep the post-measurement qubit as next round's memory
    RecordOutcome,  // store the measured bit as a Z-eigenstate memory register
    RecordInput,    // store the encoded input basis (X=0, Z=1) the same way
};

struct PartyRoundProgram {
    // Kraus template rebound each round. Arity 2 consumes (memory, delivered
    // qubit) -> qubit; arity 1 transforms the delivered qubit alone; absent
    // means measure the delivered qubit directly.
    std::shared_ptr<const Channel> memory_channel;
    MemoryOut memory_out = MemoryOut::None;
    // If set, this instrument is applied regardless of the input basis.
    std::optional<Instrument> fixed_instrument;
};

// Opaque classical scratch for Eve's preparation strategy (0 at round 1).
using EveMemory = std::uint64_t;

struct Process2Behaviour {
    std::string id;
    // Pure state Eve delivers for round j on the two given registers; may
    // read and update her classical memory deterministically.
    std::function<StateVector(std::size_t round, EveMemory& mem, const Label& la,
                              const Label& lb)>
        eve_prepare;
    std::function<PartyRoundProgram(Party, std::size_t round)> program;
    std::function<std::size_t(std::size_t n_rounds)> ebit_budget;
};

Process2Behaviour iid_bell();
Process2Behaviour echo_signalling();
Process2Behaviour retain_remeasure();
Process2Behaviour even_round_copier();
// Input-independent random preparations plus a random memory-ignoring
// channel per party: exercises the nontrivial-looking but compilable case.
Process2Behaviour random_trivial_behaviour(Rng& rng);

// ---------------------------------------------------------------------------
// Unified executor: one branching step function drives sampling, exhaustive
// enumeration, and protocol-level adaptive analyses for both process models.
// ---------------------------------------------------------------------------

struct RoundRecord {
    std::size_t round_index = 0;  // 1-based
    Basis input_a = Basis::Z;
    Basis input_b = Basis::Z;
    int output_a = 0;
    int output_b = 0;
    bool is_test = false;
    bool ann_input_a = false;
    bool ann_input_b = false;
    bool ann_output_a = false;
    bool ann_output_b = false;
};

struct DeviceTrace {
    std::vector<RoundRecord> rounds;

    std::uint64_t packed_inputs() const;
    std::uint64_t packed_outputs() const;
};

struct P1RunState {
    std::size_t component = 0;
    // Block index -> current state; a block enters the map (choosing one
    // ensemble member) the first time one of its registers is measured.
    std::map<std::size_t, StateVector> touched;
};

struct P2RunState {
    StateVector live;  // joint pure state of all live registers
    std::optional<Label> mem_a;
    std::optional<Label> mem_b;
    EveMemory eve_mem = 0;
};

using DeviceState = std::variant<P1RunState, P2RunState>;

struct InitBranch {
    double weight = 1.0;
    DeviceState state;
};

struct StepBranch {
    double prob = 0.0;
    int a = 0;
    int b = 0;
    DeviceState next;
};

inline constexpr std::size_t kDefaultEnumerationBudget = std::size_t{1} << 22;

class Device {
  public:
    explicit Device(Process1Spec spec);
    explicit Device(Process2Behaviour behaviour);

    bool is_process1() const { return spec_ != nullptr; }
    const std::string& id() const { return id_; }
    // Process 1 specs fix the round count; Process 2 behaviours accept any.
    std::optional<std::size_t> fixed_rounds() const;
    std::size_t ebit_budget(std::size_t n) const;

    std::vector<InitBranch> initial() const;
    // All branches of executing round `round` with the given inputs;
    // probabilities sum to 1 across the returned list.
    std::vector<StepBranch> step(const DeviceState& s, std::size_t round, Basis xa,
                                 Basis xb) const;
    // Sampling path: draws one branch without materializing the fan-out.
    DeviceState sample_initial(Rng& rng) const;
    std::pair<std::array<int, 2>, DeviceState> sample_step(const DeviceState& s,
                                                           std::size_t round, Basis xa, Basis xb,
                                                           Rng& rng) const;

    // Same device with every instrument replaced by the honest standard
    // instrument of the requested basis (trusted-measurement view).
    Device trusted() const;

    const Process1Spec* process1() const { return spec_.get(); }
    const Process2Behaviour* process2() const { return behaviour_.get(); }

  private:
    std::shared_ptr<const Process1Spec> spec_;
    std::shared_ptr<const Process2Behaviour> behaviour_;
    // Per component: register label -> block index (Process 1 only).
    std::shared_ptr<const std::vector<std::map<Label, std::size_t>>> block_of_;
    bool trust_instruments_ = false;
    std::string id_;

    Instrument instrument_for_p1(Party p, std::size_t round, Basis b) const;
    std::vector<StepBranch> step_p1(const P1RunState& s, std::size_t round, Basis xa,
                                    Basis xb) const;
    std::vector<StepBranch> step_p2(const P2RunState& s, std::size_t round, Basis xa,
                                    Basis xb) const;
};

// Sequential execution. The input callback is consulted exactly once per
// round, after the previous round has completed (devices cannot peek ahead).
DeviceTrace run_device(const Device& dev, std::size_t n,
                       const std::function<InputPair(std::size_t round)>& next_input, Rng& rng);
DeviceTrace run_device(const Device& dev, const InputSeq& inputs, Rng& rng);
DeviceTrace run_process2(const Process2Behaviour& b, const InputSeq& inputs, Rng& rng);
DeviceTrace run_process1(const Process1Spec& spec, const InputSeq& inputs, Rng& rng);

// Exact output distribution for a fixed input sequence by exhaustive branch
// enumeration; throws EnumerationBudgetError past `budget` visited branches.
ExactDist enumerate_outputs(const Device& dev, const InputSeq& inputs,
                            std::size_t budget = kDefaultEnumerationBudget);

// Measurement-order generalization for the commutation property: measures
// the 2n registers one at a time in the given (party, round) order.
using MeasureOrder = std::vector<std::pair<Party, std::size_t>>;
MeasureOrder natural_order(std::size_t n);
ExactDist enumerate_process1_ordered(const Process1Spec& spec, const InputSeq& inputs,
                                     const MeasureOrder& order,
                                     std::size_t budget = kDefaultEnumerationBudget);
DeviceTrace run_process1_ordered(const Process1Spec& spec, const InputSeq& inputs,
                                 const MeasureOrder& order, Rng& rng);

// Behaviours addressable by string id in experiment configs; classical_copy
// is round-count dependent, hence the n parameter.
std::vector<std::string> known_device_ids();
Device make_device(const std::string& id, std::size_t n_rounds);

}  // namespace qkdmem
