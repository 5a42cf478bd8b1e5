#pragma once

#include "qkdmem/linalg.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qkdmem {

/// Tolerance for structural invariants (normalization, completeness, trace).
inline constexpr double kStructuralTol = 1e-9;
/// Tolerance for analytically exact identities.
inline constexpr double kExactTol = 1e-12;
/// Branch probabilities at or below this are treated as exactly zero.
inline constexpr double kZeroProbTol = 1e-14;

struct QkdError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownLabelError : QkdError {
    using QkdError::QkdError;
};
struct InvalidStateError : QkdError {
    using QkdError::QkdError;
};
struct ZeroProbabilityError : QkdError {
    using QkdError::QkdError;
};
struct EnumerationBudgetError : QkdError {
    using QkdError::QkdError;
};

using Label = std::string;

std::size_t find_label(const std::vector<Label>& labels, const Label& l);
bool labels_unique(const std::vector<Label>& labels);

/// Pure state over named qubit registers. The label at position k owns bit
/// (n-1-k) of the amplitude index, i.e. reading labels left to right matches
/// reading a ket left to right: with labels {a,b}, amps[0b01] is |a=0,b=1>.
struct StateVector {
    std::vector<Label> labels;
    std::vector<cplx> amps;

    StateVector() = default;
    StateVector(std::vector<Label> ls, std::vector<cplx> as);

    static StateVector computational(std::vector<Label> ls, std::uint64_t bits);
    static StateVector single(Label l, cplx a0, cplx a1);

    std::size_t num_qubits() const { return labels.size(); }
    std::size_t dim() const { return amps.size(); }
    std::size_t label_index(const Label& l) const { return find_label(labels, l); }
    /// Bit shift of the label at position pos.
    std::size_t shift_of(std::size_t pos) const { return labels.size() - 1 - pos; }

    double norm_squared() const;
    void normalize();
    /// Throws InvalidStateError if normalization or label uniqueness fails.
    void check(double tol = kStructuralTol) const;

    /// Same state with registers listed in new_order (a permutation of labels).
    StateVector permuted(const std::vector<Label>& new_order) const;

    /// Contract out a register known to hold exactly the given single-qubit
    /// state (e.g. after a projective collapse): <e| applied on that qubit.
    /// Preserves the norm when the register really is in product state e.
    StateVector contract_qubit(const Label& l, const cplx (&e)[2]) const;

    /// Apply a 2x2 operator to one register.
    StateVector apply_1q(const Label& l, const CMat& op) const;

    /// Apply a general operator taking registers in_labels (2^k columns) to
    /// fresh registers out_labels (2^j rows). Consumed labels disappear from
    /// the result; output labels are appended at the end.
    StateVector apply_op(const std::vector<Label>& in_labels,
                         const std::vector<Label>& out_labels, const CMat& op) const;

    double max_abs_diff(const StateVector& other) const;
};

StateVector tensor(const StateVector& a, const StateVector& b);

/// |Phi+> = (|00> + |11>)/sqrt(2) on the two given labels.
StateVector bell_state(const Label& a = "q0", const Label& b = "q1");

struct DensityOperator {
    std::vector<Label> labels;
    CMat mat;

    DensityOperator() = default;
    DensityOperator(std::vector<Label> ls, CMat m);

    static DensityOperator from_pure(const StateVector& psi);

    std::size_t num_qubits() const { return labels.size(); }
    std::size_t dim() const { return mat.rows; }
    std::size_t label_index(const Label& l) const { return find_label(labels, l); }

    /// Hermiticity, unit trace and positivity within tol; throws on failure.
    void check(double tol = kStructuralTol) const;

    DensityOperator permuted(const std::vector<Label>& new_order) const;
};

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<Label>& keep);

/// Classical ensemble of pure states over one register set: the mixed-state
/// representation used throughout. Measurements, channels and enumeration act
/// componentwise, which keeps globally correlated states (ensembles of
/// products) cheap at any round count.
struct MixedState {
    struct Component {
        double weight;
        StateVector state;
    };
    std::vector<Component> components;

    static MixedState pure(StateVector psi);
    /// Eigendecomposition ensemble of a density operator.
    static MixedState from_density(const DensityOperator& rho, double tol = kStructuralTol);

    bool empty() const { return components.empty(); }
    const std::vector<Label>& labels() const;
    double total_weight() const;
    DensityOperator to_density() const;

    /// Drop components whose weight is at most tol.
    void prune(double tol = 1e-15);
    /// Align every component's register order with the first component's.
    void align_labels();
};

MixedState tensor(const MixedState& a, const MixedState& b);

}  // namespace qkdmem
