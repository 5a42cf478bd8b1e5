#pragma once

#include "qkdmem/devices.hpp"

namespace qkdmem {

// Raised when a behaviour's memory channels genuinely read their memory
// register: such behaviours have no fixed-joint-state description, and the
// rejection is the model boundary, not a defect.
struct MemoryNotTrivialError : QkdError {
    using QkdError::QkdError;
};

// Verifies that every round's memory channel ignores the memory register
// (numerically: C(|i><j|_M ⊗ E) = δ_ij R(E) within tol) and folds the
// sequential behaviour into an equivalent fixed-joint-state spec by deferring
// all measurements to the end.
Process1Spec compile_trivial_memory(const Process2Behaviour& behaviour, std::size_t n_rounds,
                                    double tol = kStructuralTol);

}  // namespace qkdmem
