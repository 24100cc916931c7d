#pragma once

#include <optional>
#include <vector>

#include "pblock/hilbert.hpp"

namespace pblock {

// Physical constants, all frequencies in units of the cavity frequency.
struct SystemParams {
  double omega_c = 1.0;
  double omega_g = 1.0;
  double g = 0.0;
  double theta = 0.3 * kPi;
  double gamma_a = 1e-2;
  double gamma_sigma = 1e-2;
  double Omega = 1e-3;
  double omega_l = 1.0;
  double omega_0 = 1.0;  // normalization frequency of the relaxation rates

  // Throws std::invalid_argument on the first violated constraint.
  void validate() const;

  // omega_g = omega_c, gamma = 1e-2 omega_c, Omega = 0.1 gamma, theta = 0.3 pi.
  static SystemParams operating_point(double g);
};

// H0 = wc a^dag a + wg sp sm + g (a + a^dag)(cos(theta) sz - sin(theta) sx)
Operator build_static_hamiltonian(const SystemParams& p, const HilbertSpace& space);

// Quadrature a + a^dag on the full space.
Operator cavity_quadrature(const HilbertSpace& space);

// Coupling phase from the flux-qubit bias: cos(theta) = 2 Ip dpsi / sqrt(Delta^2 + (2 Ip dpsi)^2).
double theta_from_flux(double persistent_current, double flux_offset, double gap);

struct EigenSystem {
  RealVector energies;  // ascending
  Matrix vectors;       // columns are |psi_j> in the product basis
  HilbertSpace space;
  SystemParams params;

  int size() const { return static_cast<int>(energies.size()); }
};

inline constexpr double kDegeneracyTol = 1e-10;

// Ascending eigenpairs of a Hermitian H. Inside a degenerate cluster the basis
// is made canonical: aligned with `previous` when given (sweeps), else the
// eigenbasis of the coupling (a + a^dag)(cos(theta) sz - sin(theta) sx) on the
// cluster, i.e. the g -> 0+ limit, else Gram-Schmidt of the projected
// product-basis vectors in index order. Each vector's largest-magnitude
// component is made real positive.
EigenSystem diagonalize(const Operator& H, const SystemParams& params,
                        const EigenSystem* previous = nullptr);

EigenSystem solve_dressed_states(const SystemParams& params, const HilbertSpace& space,
                                 const EigenSystem* previous = nullptr);

// Named low-lying dressed states.
inline constexpr int kGround = 0;
inline constexpr int kLowerPolariton = 1;  // |psi_1->
inline constexpr int kUpperPolariton = 2;  // |psi_1+>

// omega_k - omega_j, requires k > j.
double transition_energy(const EigenSystem& eig, int j, int k);

// Excitation-number parity exp(i pi (a^dag a + sp sm)) on the full space.
Operator parity_operator(const HilbertSpace& space);

// <psi_j|Pi|psi_j> per eigenstate.
std::vector<double> parity_diagnostic(const EigenSystem& eig);

// Label assignment between two sweep points: result[i] is the index in `next`
// whose eigenvector overlaps most with state i of `previous`.
std::vector<int> track_by_overlap(const EigenSystem& previous, const EigenSystem& next);

}  // namespace pblock
