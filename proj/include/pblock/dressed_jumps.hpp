#pragma once

#include <span>
#include <vector>

#include "pblock/rabi_model.hpp"

namespace pblock {

enum class Channel { cavity, atom };

// Dressed-state decay data for one loss channel. Entries are meaningful for
// j < k only (k decays into j); everything on or below the diagonal is zero.
struct JumpSet {
  Channel channel;
  Matrix amplitudes;  // C_jk = -i <psi_j|(c - c^dag)|psi_k>
  RealMatrix rates;   // Gamma^{jk} = gamma_c (Delta_kj / omega_0) |C_jk|^2
};

Matrix transition_amplitudes(const EigenSystem& eig, Channel channel);

RealMatrix relaxation_rates(const EigenSystem& eig, Channel channel, double gamma_c,
                            double omega_0);

// Both loss channels with the rates from `eig.params`.
std::vector<JumpSet> standard_jump_sets(const EigenSystem& eig);

// How the coherent drive Omega cos(omega_l t)(a + a^dag) enters the evolution.
//  lab:           the full operator, counter-rotating parts included.
//  rotating_wave: only the parts that raise the excitation manifold by one
//                 (with e^{-i omega_l t}) and their adjoints are kept.
// Manifold of dressed state j is (j + 1) / 2: ground alone, then pairs.
enum class DriveModel { lab, rotating_wave };

int excitation_manifold(int level);

// Master-equation generator in the dressed basis, restricted to the lowest
// `levels` dressed states:
//   L(t) rho = i[rho, H0] + sum_{j<k} Gamma^{jk} D[|psi_j><psi_k|] rho - i[H_drive(t), rho]
// with Gamma^{jk} summed over channels. Immutable; safe to share across threads.
class Generator {
 public:
  Generator(const EigenSystem& eig, std::span<const JumpSet> jumps, const SystemParams& params,
            int levels = 0, DriveModel drive = DriveModel::lab);

  int dim() const { return dim_; }
  const RealVector& energies() const { return energies_; }  // measured from the ground state
  const RealMatrix& rates() const { return rates_; }
  const RealVector& decay_out() const { return decay_out_; }
  const Operator& drive_operator() const { return drive_; }
  double Omega() const { return Omega_; }
  double omega_l() const { return omega_l_; }
  DriveModel drive_model() const { return drive_model_; }
  double period() const { return 2.0 * kPi / omega_l_; }

  // L0 rho (no drive).
  void apply_static(const Matrix& rho, Matrix& out) const;
  Matrix apply_static(const Matrix& rho) const;

  struct Scratch {
    Matrix hamiltonian;
    Matrix product;
  };

  // L(t) rho, allocation-free once `scratch` has been sized.
  void apply(double t, const Matrix& rho, Matrix& out, Scratch& scratch) const;
  Matrix apply(double t, const Matrix& rho) const;

  // Heisenberg-picture adjoint of L0.
  Matrix apply_static_adjoint(const Matrix& A) const;

  // Drive Hamiltonian at time t in the dressed basis.
  Matrix drive_hamiltonian(double t) const;

  // Dense dim^2 x dim^2 matrix of L0 acting on column-major vec(rho).
  Matrix static_superoperator() const;

 private:
  int dim_;
  RealVector energies_;
  RealMatrix rates_;
  RealVector decay_out_;
  Matrix coherence_rate_;  // i(w_n - w_m) - (G_m + G_n)/2
  Operator drive_;         // (a + a^dag) in the dressed basis
  Matrix drive_lowering_;  // manifold-lowering part of drive_
  double Omega_;
  double omega_l_;
  DriveModel drive_model_;
};

}  // namespace pblock
