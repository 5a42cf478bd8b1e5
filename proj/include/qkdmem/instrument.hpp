#pragma once

#include <array>
#include <optional>
#include <string>

#include "qkdmem/linalg.hpp"
#include "qkdmem/state.hpp"

namespace qkdmem {

enum class Basis { X, Z };

Basis other(Basis b);
std::string to_string(Basis b);
Basis parse_basis(const std::string& s);

// A two-outcome projective qubit measurement given by its eigenvectors.
// `basis` records which basis the instrument actually measures, which need
// not match the basis a party *asked* for (devices may cheat).
struct Instrument {
    Basis basis;
    std::array<std::array<cplx, 2>, 2> eigvec;  // eigvec[outcome] = unit vector

    static Instrument standard(Basis b);

    CMat projector(int outcome) const;
    // Orthonormality, completeness (sum of projectors = I) and idempotence.
    void check(double tol = kStructuralTol) const;
};

struct MeasureResult {
    int outcome = 0;
    StateVector post;  // measured label retained, collapsed to the eigenstate
    double probability = 0.0;
};

struct MeasureBranch {
    int outcome = 0;
    double probability = 0.0;
    std::optional<StateVector> post;  // nullopt for zero-probability branches
};

// Born-rule sampling driven by a caller-supplied uniform real u in [0,1).
MeasureResult measure(const StateVector& psi, const Label& l, const Instrument& ins, double u);
MeasureResult measure(const StateVector& psi, const Label& l, Basis b, double u);

// Deterministic variant: request a specific branch. Throws
// ZeroProbabilityError if that branch has probability <= kZeroProbTol.
MeasureResult measure_branch(const StateVector& psi, const Label& l, const Instrument& ins,
                             int outcome);

std::array<MeasureBranch, 2> measure_all_branches(const StateVector& psi, const Label& l,
                                                  const Instrument& ins);
std::array<MeasureBranch, 2> measure_all_branches(const StateVector& psi, const Label& l, Basis b);

struct MeasureResultD {
    int outcome = 0;
    DensityOperator post;
    double probability = 0.0;
};

struct MeasureBranchD {
    int outcome = 0;
    double probability = 0.0;
    std::optional<DensityOperator> post;
};

MeasureResultD measure(const DensityOperator& rho, const Label& l, const Instrument& ins, double u);
MeasureResultD measure(const DensityOperator& rho, const Label& l, Basis b, double u);
std::array<MeasureBranchD, 2> measure_all_branches(const DensityOperator& rho, const Label& l,
                                                   const Instrument& ins);

// Embeds a single-qubit operator at register position `pos` of an n-register
// system (identity elsewhere), matching the label-order bit convention.
CMat embed_1q(const CMat& op, std::size_t n, std::size_t pos);

}  // namespace qkdmem
