#include "pblock/rabi_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

#include <Eigen/Eigenvalues>

namespace pblock {

void SystemParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(name) + " must be > 0, got " + std::to_string(v));
    }
  };
  positive(omega_c, "omega_c");
  positive(omega_g, "omega_g");
  positive(gamma_a, "gamma_a");
  positive(gamma_sigma, "gamma_sigma");
  positive(omega_l, "omega_l");
  positive(omega_0, "omega_0");
  if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("g must be >= 0");
  if (!(Omega >= 0.0) || !std::isfinite(Omega)) throw std::invalid_argument("Omega must be >= 0");
  if (!(theta >= 0.0 && theta < kPi)) {
    throw std::invalid_argument("theta must lie in [0, pi), got " + std::to_string(theta));
  }
}

SystemParams SystemParams::operating_point(double g) {
  SystemParams p;
  p.g = g;
  return p;
}

Operator cavity_quadrature(const HilbertSpace& space) {
  const Operator a = fock_annihilation(space);
  return embed(Operator(a.tag(), a.matrix() + a.matrix().adjoint(), true), Subsystem::cavity,
               space);
}

Operator build_static_hamiltonian(const SystemParams& p, const HilbertSpace& space) {
  const Operator a = fock_annihilation(space);
  const Matrix n_photon = a.matrix().adjoint() * a.matrix();
  const Matrix excited = (pauli(Pauli::sp) * pauli(Pauli::sm)).matrix();
  const Matrix coupling_atom = std::cos(p.theta) * pauli(Pauli::sz).matrix() -
                               std::sin(p.theta) * pauli(Pauli::sx).matrix();

  const auto full = [&](const Matrix& m, Subsystem s) {
    const SpaceTag tag = s == Subsystem::cavity ? SpaceTag::cavity(space) : SpaceTag::atom();
    return embed(Operator(tag, m), s, space).matrix();
  };
  Matrix h = p.omega_c * full(n_photon, Subsystem::cavity) +
             p.omega_g * full(excited, Subsystem::atom) +
             p.g * cavity_quadrature(space).matrix() * full(coupling_atom, Subsystem::atom);
  // Products of real symmetric factors that commute; symmetrize away rounding.
  h = 0.5 * (h + h.adjoint()).eval();
  return Operator(SpaceTag::full(space), std::move(h), true);
}

double theta_from_flux(double persistent_current, double flux_offset, double gap) {
  if (gap < 0.0) throw std::invalid_argument("theta_from_flux: gap Delta must be >= 0");
  const double bias = 2.0 * persistent_current * flux_offset;
  if (gap == 0.0 && bias == 0.0) {
    throw std::invalid_argument("theta_from_flux: undefined for Delta = 0 and zero flux offset");
  }
  if (std::isinf(bias)) return bias > 0 ? 0.0 : kPi;
  const double c = bias / std::hypot(gap, bias);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

namespace {

void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  Eigen::Index best = 0;
  double best_mag = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > best_mag + 1e-12) {
      best_mag = mag;
      best = i;
    }
  }
  if (best_mag > 0.0) v *= std::conj(v(best)) / best_mag;
}

// Replace the columns [first, first + count) of `vectors` by an orthonormal
// basis of the same subspace built from `seeds` projected onto it.
bool canonicalize_cluster(Matrix& vectors, Eigen::Index first, Eigen::Index count,
                          const Matrix& seeds) {
  const Matrix block = vectors.middleCols(first, count);
  Matrix chosen(vectors.rows(), count);
  Eigen::Index found = 0;
  for (Eigen::Index s = 0; s < seeds.cols() && found < count; ++s) {
    Eigen::VectorXcd v = block * (block.adjoint() * seeds.col(s));
    for (Eigen::Index q = 0; q < found; ++q) v -= chosen.col(q) * chosen.col(q).dot(v);
    const double norm = v.norm();
    if (norm > 1e-6) chosen.col(found++) = v / norm;
  }
  if (found < count) return false;
  vectors.middleCols(first, count) = chosen;
  return true;
}

// Rotate a degenerate block onto the eigenbasis of `op` restricted to it,
// ascending in op's eigenvalues. Fails when op does not lift the degeneracy.
bool split_by_operator(Matrix& vectors, Eigen::Index first, Eigen::Index count, const Matrix& op) {
  const Matrix block = vectors.middleCols(first, count);
  Matrix m = block.adjoint() * op * block;
  m = (0.5 * (m + m.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  for (Eigen::Index i = 1; i < count; ++i) {
    if (solver.eigenvalues()(i) - solver.eigenvalues()(i - 1) < 1e-8) return false;
  }
  vectors.middleCols(first, count) = block * solver.eigenvectors();
  return true;
}

Matrix coupling_shape(const SystemParams& p, const HilbertSpace& space) {
  const Matrix atom = std::cos(p.theta) * pauli(Pauli::sz).matrix() - std::sin(p.theta) * pauli(Pauli::sx).matrix();
  return cavity_quadrature(space).matrix() *
         embed(Operator(SpaceTag::atom(), atom), Subsystem::atom, space).matrix();
}

}  // namespace

EigenSystem diagonalize(const Operator& H, const SystemParams& params,
                        const EigenSystem* previous) {
  if (!H.hermitian()) throw std::invalid_argument("diagonalize: operator is not Hermitian-flagged");
  if (H.tag().kind != SpaceKind::full) {
    throw DimensionError("diagonalize: expects an operator on the full cavity-atom space");
  }
  const HilbertSpace space(H.dim() / HilbertSpace::n_atom);

  Eigen::SelfAdjointEigenSolver<Matrix> solver(H.matrix());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("diagonalize: eigensolver failed to converge (dim " +
                             std::to_string(H.dim()) + ")");
  }
  RealVector energies = solver.eigenvalues();
  Matrix vectors = solver.eigenvectors();

  const Eigen::Index n = energies.size();
  const Matrix product_basis = Matrix::Identity(n, n);
  const double tol = kDegeneracyTol * params.omega_c;
  Matrix coupling;
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i + 1;
    while (j < n && energies(j) - energies(j - 1) < tol) ++j;
    const Eigen::Index count = j - i;
    if (count > 1) {
      bool done = false;
      if (previous != nullptr && previous->vectors.rows() == n) {
        done = canonicalize_cluster(vectors, i, count, previous->vectors.middleCols(i, count));
      }
      if (!done) {
        if (coupling.size() == 0) coupling = coupling_shape(params, space);
        done = split_by_operator(vectors, i, count, coupling);
      }
      if (!done) canonicalize_cluster(vectors, i, count, product_basis);
    }
    i = j;
  }
  for (Eigen::Index c = 0; c < n; ++c) fix_phase(vectors.col(c));

  return EigenSystem{std::move(energies), std::move(vectors), space, params};
}

EigenSystem solve_dressed_states(const SystemParams& params, const HilbertSpace& space,
                                 const EigenSystem* previous) {
  params.validate();
  return diagonalize(build_static_hamiltonian(params, space), params, previous);
}

double transition_energy(const EigenSystem& eig, int j, int k) {
  if (j < 0 || k >= eig.size() || k <= j) {
    throw std::invalid_argument("transition_energy: need 0 <= j < k < " +
                                std::to_string(eig.size()) + ", got j=" + std::to_string(j) +
                                " k=" + std::to_string(k));
  }
  return eig.energies(k) - eig.energies(j);
}

Operator parity_operator(const HilbertSpace& space) {
  Matrix p = Matrix::Zero(space.dim(), space.dim());
  for (int m = 0; m < space.n_cavity(); ++m) {
    const double photon_sign = (m % 2 == 0) ? 1.0 : -1.0;
    p(space.index(m, 0), space.index(m, 0)) = photon_sign;
    p(space.index(m, 1), space.index(m, 1)) = -photon_sign;
  }
  return Operator(SpaceTag::full(space), std::move(p), true);
}

std::vector<double> parity_diagnostic(const EigenSystem& eig) {
  const Matrix pi = parity_operator(eig.space).matrix();
  std::vector<double> out(eig.size());
  for (int j = 0; j < eig.size(); ++j) {
    out[j] = eig.vectors.col(j).dot(pi * eig.vectors.col(j)).real();
  }
  return out;
}

std::vector<int> track_by_overlap(const EigenSystem& previous, const EigenSystem& next) {
  if (previous.vectors.rows() != next.vectors.rows()) {
    throw DimensionError("track_by_overlap: eigensystems live on different spaces");
  }
  const int n = next.size();
  const RealMatrix overlap = (previous.vectors.adjoint() * next.vectors).cwiseAbs();
  std::vector<int> assignment(n, -1);
  std::vector<bool> taken(n, false);
  std::vector<std::tuple<double, int, int>> pairs;
  pairs.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pairs.emplace_back(overlap(i, j), i, j);
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
  for (const auto& [ov, i, j] : pairs) {
    if (assignment[i] >= 0 || taken[j]) continue;
    assignment[i] = j;
    taken[j] = true;
  }
  return assignment;
}

}  // namespace pblock
