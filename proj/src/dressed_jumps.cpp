#include "pblock/dressed_jumps.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pblock {

namespace {

Matrix channel_operator(const HilbertSpace& space, Channel channel) {
  if (channel == Channel::cavity) {
    return embed(fock_annihilation(space), Subsystem::cavity, space).matrix();
  }
  return embed(pauli(Pauli::sm), Subsystem::atom, space).matrix();
}

}  // namespace

Matrix transition_amplitudes(const EigenSystem& eig, Channel channel) {
  const Matrix c = channel_operator(eig.space, channel);
  const Matrix full = cplx(0.0, -1.0) * (eig.vectors.adjoint() * (c - c.adjoint()) * eig.vectors);
  return full.triangularView<Eigen::StrictlyUpper>();
}

RealMatrix relaxation_rates(const EigenSystem& eig, Channel channel, double gamma_c,
                            double omega_0) {
  if (gamma_c < 0.0) throw std::invalid_argument("relaxation_rates: gamma_c must be >= 0");
  if (!(omega_0 > 0.0)) throw std::invalid_argument("relaxation_rates: omega_0 must be > 0");
  const Matrix amps = transition_amplitudes(eig, channel);
  const int n = eig.size();
  RealMatrix rates = RealMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < k; ++j) {
      const double gap = eig.energies(k) - eig.energies(j);
      rates(j, k) = gamma_c * (gap / omega_0) * std::norm(amps(j, k));
    }
  }
  return rates;
}

std::vector<JumpSet> standard_jump_sets(const EigenSystem& eig) {
  const SystemParams& p = eig.params;
  std::vector<JumpSet> out;
  out.push_back({Channel::cavity, transition_amplitudes(eig, Channel::cavity),
                 relaxation_rates(eig, Channel::cavity, p.gamma_a, p.omega_0)});
  out.push_back({Channel::atom, transition_amplitudes(eig, Channel::atom),
                 relaxation_rates(eig, Channel::atom, p.gamma_sigma, p.omega_0)});
  return out;
}

int excitation_manifold(int level) { return (level + 1) / 2; }

Generator::Generator(const EigenSystem& eig, std::span<const JumpSet> jumps,
                     const SystemParams& params, int levels, DriveModel drive)
    : dim_(levels > 0 ? levels : eig.size()),
      drive_(SpaceTag::dressed(levels > 0 ? levels : eig.size()),
             Matrix::Zero(levels > 0 ? levels : eig.size(), levels > 0 ? levels : eig.size()),
             true),
      Omega_(params.Omega),
      omega_l_(params.omega_l),
      drive_model_(drive) {
  params.validate();
  if (dim_ > eig.size()) {
    throw DimensionError("Generator: " + std::to_string(dim_) + " dressed levels requested but only " +
                         std::to_string(eig.size()) + " available");
  }
  const int n = dim_;
  energies_ = (eig.energies.head(n).array() - eig.energies(0)).matrix();

  rates_ = RealMatrix::Zero(n, n);
  for (const JumpSet& js : jumps) {
    if (js.rates.rows() != eig.size() || js.rates.cols() != eig.size()) {
      throw DimensionError("Generator: jump set does not match the eigensystem dimension");
    }
    rates_ += js.rates.topLeftCorner(n, n);
  }
  for (int k = 0; k < n; ++k)
    for (int j = k; j < n; ++j)
      if (rates_(j, k) != 0.0) throw std::invalid_argument("Generator: rates must be strictly upper triangular");
  if ((rates_.array() < 0.0).any()) throw std::invalid_argument("Generator: negative relaxation rate");

  decay_out_ = rates_.colwise().sum().transpose();
  coherence_rate_.resize(n, n);
  for (int m = 0; m < n; ++m)
    for (int c = 0; c < n; ++c)
      coherence_rate_(m, c) =
          cplx(-0.5 * (decay_out_(m) + decay_out_(c)), energies_(c) - energies_(m));

  const Matrix x = eig.vectors.leftCols(n).adjoint() * cavity_quadrature(eig.space).matrix() *
                   eig.vectors.leftCols(n);
  drive_ = Operator(SpaceTag::dressed(n), 0.5 * (x + x.adjoint()), true);

  drive_lowering_ = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (excitation_manifold(k) == excitation_manifold(j) + 1) drive_lowering_(j, k) = x(j, k);
}

void Generator::apply_static(const Matrix& rho, Matrix& out) const {
  out = coherence_rate_.cwiseProduct(rho);
  out.diagonal() += rates_ * rho.diagonal();
}

Matrix Generator::apply_static(const Matrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) throw DimensionError("Generator: state shape mismatch");
  Matrix out;
  apply_static(rho, out);
  return out;
}

Matrix Generator::drive_hamiltonian(double t) const {
  if (drive_model_ == DriveModel::lab) return (Omega_ * std::cos(omega_l_ * t)) * drive_.matrix();
  const cplx c = 0.5 * Omega_ * std::polar(1.0, omega_l_ * t);
  return c * drive_lowering_ + std::conj(c) * drive_lowering_.adjoint();
}

void Generator::apply(double t, const Matrix& rho, Matrix& out, Scratch& scratch) const {
  apply_static(rho, out);
  if (Omega_ == 0.0) return;
  const Matrix* h = &drive_.matrix();
  cplx scale(0.0, -Omega_ * std::cos(omega_l_ * t));
  if (drive_model_ == DriveModel::rotating_wave) {
    const cplx c = 0.5 * Omega_ * std::polar(1.0, omega_l_ * t);
    scratch.hamiltonian.noalias() = c * drive_lowering_;
    scratch.hamiltonian.noalias() += std::conj(c) * drive_lowering_.adjoint();
    h = &scratch.hamiltonian;
    scale = cplx(0.0, -1.0);
  }
  // out += scale * (H rho - rho H)
  scratch.product.noalias() = *h * rho;
  scratch.product.noalias() -= rho * *h;
  out += scale * scratch.product;
}

Matrix Generator::apply(double t, const Matrix& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_) throw DimensionError("Generator: state shape mismatch");
  Matrix out;
  Scratch scratch;
  apply(t, rho, out, scratch);
  return out;
}

Matrix Generator::apply_static_adjoint(const Matrix& A) const {
  if (A.rows() != dim_ || A.cols() != dim_) throw DimensionError("Generator: operator shape mismatch");
  // Heisenberg picture: i(w_m - w_n) A_mn - (G_m + G_n)/2 A_mn, diag k += sum_j G^{jk} A_jj.
  Matrix out = coherence_rate_.conjugate().cwiseProduct(A);
  out.diagonal() += rates_.transpose() * A.diagonal();
  return out;
}

Matrix Generator::static_superoperator() const {
  const int n = dim_;
  Matrix sup = Matrix::Zero(n * n, n * n);
  Matrix basis = Matrix::Zero(n, n);
  Matrix image;
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) {
      basis(r, c) = 1.0;
      apply_static(basis, image);
      sup.col(r + c * n) = Eigen::Map<const Eigen::VectorXcd>(image.data(), n * n);
      basis(r, c) = 0.0;
    }
  }
  return sup;
}

}  // namespace pblock
