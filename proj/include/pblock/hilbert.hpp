#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pblock {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Cavity (Fock, truncated) tensor a two-level atom. Product basis index is
// 2*m + s where m is the photon number and s = 0 for |g>, 1 for |e>, i.e. the
// cavity index varies slower than the atom index.
class HilbertSpace {
 public:
  static constexpr int n_atom = 2;

  explicit HilbertSpace(int n_cavity);

  int n_cavity() const { return n_cavity_; }
  int dim() const { return n_cavity_ * n_atom; }
  int index(int photons, int atom) const { return photons * n_atom + atom; }

  bool operator==(const HilbertSpace&) const = default;

 private:
  int n_cavity_;
};

enum class SpaceKind { cavity, atom, full, dressed };

// Which space an operator's matrix lives on. `dim` is the matrix size.
struct SpaceTag {
  SpaceKind kind;
  int dim;

  static SpaceTag cavity(const HilbertSpace& s) { return {SpaceKind::cavity, s.n_cavity()}; }
  static SpaceTag atom() { return {SpaceKind::atom, HilbertSpace::n_atom}; }
  static SpaceTag full(const HilbertSpace& s) { return {SpaceKind::full, s.dim()}; }
  static SpaceTag dressed(int levels) { return {SpaceKind::dressed, levels}; }

  bool operator==(const SpaceTag&) const = default;
};

std::string to_string(SpaceKind kind);

// Dense operator tagged with the space it acts on. Immutable once built.
class Operator {
 public:
  static constexpr double kHermitianTol = 1e-12;

  Operator(SpaceTag tag, Matrix matrix, bool hermitian = false);

  const SpaceTag& tag() const { return tag_; }
  const Matrix& matrix() const { return matrix_; }
  bool hermitian() const { return hermitian_; }
  int dim() const { return tag_.dim; }

  Operator adjoint() const;

  // Entry-wise max |M - M^dagger|.
  double hermiticity_error() const;

 private:
  SpaceTag tag_;
  Matrix matrix_;
  bool hermitian_;
};

Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(cplx s, const Operator& a);

Operator identity(SpaceTag tag);

// Bare cavity annihilation operator, <m|a|m+1> = sqrt(m+1).
Operator fock_annihilation(const HilbertSpace& space);

enum class Pauli { sx, sz, sp, sm };

// Atomic operators in (|g>, |e>) ordering: sp = |e><g|, sx = sp + sm,
// sz = sp sm - sm sp = diag(-1, +1).
Operator pauli(Pauli which);

enum class Subsystem { cavity, atom };

// op (x) 1 for the cavity, 1 (x) op for the atom.
Operator embed(const Operator& op, Subsystem which, const HilbertSpace& space);

}  // namespace pblock
