#pragma once

#include "pblock/dressed_jumps.hpp"

namespace pblock {

// Algebraic steady state of the master equation in the frame rotating at
// n_j * omega_l for dressed state j (n_j = excitation manifold), keeping only
// the drive terms that connect neighbouring manifolds. Dissipators are
// invariant under this frame change, so the generator is time independent.
struct RwaSteadyState {
  Matrix rotating;        // steady state in the rotating frame
  Matrix period_average;  // lab-frame drive-period average (inter-manifold coherences removed)
  double residual = 0.0;  // max |L rho| of the solution
};

RwaSteadyState rwa_steady_state(const Generator& gen);

// Dense superoperator of the rotating-frame generator (column-major vec).
Matrix rwa_superoperator(const Generator& gen);

}  // namespace pblock
