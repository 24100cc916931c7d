#include "pblock/rwa_steady_state.hpp"

#include <Eigen/LU>

namespace pblock {

namespace {

Matrix rotating_hamiltonian(const Generator& gen) {
  const int n = gen.dim();
  const Matrix& x = gen.drive_operator().matrix();
  Matrix h = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    h(j, j) = gen.energies()(j) - excitation_manifold(j) * gen.omega_l();
    for (int k = 0; k < n; ++k) {
      const int dn = excitation_manifold(k) - excitation_manifold(j);
      if (dn == 1 || dn == -1) h(j, k) += 0.5 * gen.Omega() * x(j, k);
    }
  }
  return h;
}

}  // namespace

Matrix rwa_superoperator(const Generator& gen) {
  const int n = gen.dim();
  const Matrix h = rotating_hamiltonian(gen);
  Matrix sup = Matrix::Zero(n * n, n * n);
  Matrix basis = Matrix::Zero(n, n);
  Matrix image;
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) {
      basis(r, c) = 1.0;
      // Dissipative part only: static generator minus its bare Hamiltonian part.
      gen.apply_static(basis, image);
      image(r, c) -= cplx(0.0, gen.energies()(c) - gen.energies()(r));
      image += cplx(0.0, -1.0) * (h * basis - basis * h);
      sup.col(r + c * n) = Eigen::Map<const Eigen::VectorXcd>(image.data(), n * n);
      basis(r, c) = 0.0;
    }
  }
  return sup;
}

RwaSteadyState rwa_steady_state(const Generator& gen) {
  const int n = gen.dim();
  const Matrix sup = rwa_superoperator(gen);
  Matrix system = sup;
  // Replace the first equation by the trace condition.
  system.row(0).setZero();
  for (int m = 0; m < n; ++m) system(0, m + m * n) = 1.0;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n * n);
  rhs(0) = 1.0;
  const Eigen::VectorXcd sol = system.partialPivLu().solve(rhs);

  RwaSteadyState out;
  Matrix rho = Eigen::Map<const Matrix>(sol.data(), n, n);
  out.rotating = 0.5 * (rho + rho.adjoint());
  const Eigen::VectorXcd flat = Eigen::Map<const Eigen::VectorXcd>(out.rotating.data(), n * n);
  out.residual = (sup * flat).cwiseAbs().maxCoeff();

  out.period_average = out.rotating;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (excitation_manifold(j) != excitation_manifold(k)) out.period_average(j, k) = 0.0;
  return out;
}

}  // namespace pblock
