#pragma once

#include "qkdmem/channel.hpp"
#include "qkdmem/linalg.hpp"
#include "qkdmem/rng.hpp"
#include "qkdmem/state.hpp"

namespace qkdmem {

// Standard-normal draw (Box-Muller over the generator's uniform doubles).
double random_gaussian(Rng& rng);

// Haar-ish random pure state: normalized vector of complex Gaussians.
StateVector random_pure_state(std::vector<Label> labels, Rng& rng);

// Haar-random 2x2 unitary.
CMat random_unitary2(Rng& rng);

// Random complete Kraus set on one qubit: n_kraus random matrices, then the
// whole set is renormalized through M^(-1/2) with M = sum K†K.
Channel random_channel(const Label& l, std::size_t n_kraus, Rng& rng);

}  // namespace qkdmem
