#pragma once

#include <vector>

#include "qkdmem/linalg.hpp"
#include "qkdmem/state.hpp"

namespace qkdmem {

// A CPTP map given by Kraus operators. Input registers are consumed, output
// registers appended; input and output dimension may differ (e.g. a channel
// that merges a memory register and a delivered qubit into a single qubit).
struct Channel {
    std::vector<CMat> kraus;
    std::vector<Label> input_labels;
    std::vector<Label> output_labels;

    std::size_t dim_in() const { return std::size_t{1} << input_labels.size(); }
    std::size_t dim_out() const { return std::size_t{1} << output_labels.size(); }

    // Completeness: sum of K†K equals the identity within tol.
    void check(double tol = kStructuralTol) const;

    // Applies the map to a raw dim_in x dim_in matrix (sum of K rho K†).
    CMat apply_matrix(const CMat& rho_in) const;

    // Same Kraus set rebound to different register names.
    Channel rebind(std::vector<Label> in, std::vector<Label> out) const;

    static Channel identity(Label l);
    static Channel depolarizing(Label l, double strength);
    // Discards the input qubit and replaces it with the memory register's
    // content: Kraus { I_M (x) <t|_Q }. This is how a device feeds a retained
    // qubit (or a recorded classical bit) back into the measurement slot.
    static Channel replace_with_memory(Label mem, Label q_in, Label q_out);
};

struct WeightedState {
    double weight = 0.0;
    StateVector state;
};

// One branch per Kraus operator; zero-weight branches are pruned and the
// surviving states are normalized.
std::vector<WeightedState> apply_channel_branches(const Channel& ch, const StateVector& psi);

MixedState apply_channel(const Channel& ch, const StateVector& psi);
MixedState apply_channel(const Channel& ch, const MixedState& m);
DensityOperator apply_channel(const Channel& ch, const DensityOperator& rho);

}  // namespace qkdmem
