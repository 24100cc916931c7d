#include "pblock/hilbert.hpp"

#include <cmath>

namespace pblock {

HilbertSpace::HilbertSpace(int n_cavity) : n_cavity_(n_cavity) {
  if (n_cavity < 2) {
    throw DimensionError("n_cavity must be >= 2, got " + std::to_string(n_cavity));
  }
}

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::cavity: return "cavity";
    case SpaceKind::atom: return "atom";
    case SpaceKind::full: return "full";
    case SpaceKind::dressed: return "dressed";
  }
  return "unknown";
}

Operator::Operator(SpaceTag tag, Matrix matrix, bool hermitian)
    : tag_(tag), matrix_(std::move(matrix)), hermitian_(hermitian) {
  if (matrix_.rows() != tag_.dim || matrix_.cols() != tag_.dim) {
    throw DimensionError("operator on " + to_string(tag_.kind) + " space expects " +
                         std::to_string(tag_.dim) + "x" + std::to_string(tag_.dim) +
                         " matrix, got " + std::to_string(matrix_.rows()) + "x" +
                         std::to_string(matrix_.cols()));
  }
  if (hermitian_ && hermiticity_error() > kHermitianTol) {
    throw std::invalid_argument("operator flagged Hermitian but max|M - M^dagger| = " +
                                std::to_string(hermiticity_error()));
  }
}

Operator Operator::adjoint() const { return Operator(tag_, matrix_.adjoint(), hermitian_); }

double Operator::hermiticity_error() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

void require_same_space(const Operator& a, const Operator& b, const char* what) {
  if (!(a.tag() == b.tag())) {
    throw DimensionError(std::string(what) + ": operands live on different spaces (" +
                         to_string(a.tag().kind) + "/" + std::to_string(a.dim()) + " vs " +
                         to_string(b.tag().kind) + "/" + std::to_string(b.dim()) + ")");
  }
}

}  // namespace

Operator operator+(const Operator& a, const Operator& b) {
  require_same_space(a, b, "operator+");
  return Operator(a.tag(), a.matrix() + b.matrix(), a.hermitian() && b.hermitian());
}

Operator operator-(const Operator& a, const Operator& b) {
  require_same_space(a, b, "operator-");
  return Operator(a.tag(), a.matrix() - b.matrix(), a.hermitian() && b.hermitian());
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_space(a, b, "operator*");
  return Operator(a.tag(), a.matrix() * b.matrix());
}

Operator operator*(cplx s, const Operator& a) {
  return Operator(a.tag(), s * a.matrix(), a.hermitian() && s.imag() == 0.0);
}

Operator identity(SpaceTag tag) {
  return Operator(tag, Matrix::Identity(tag.dim, tag.dim), true);
}

Operator fock_annihilation(const HilbertSpace& space) {
  const int n = space.n_cavity();
  Matrix a = Matrix::Zero(n, n);
  for (int m = 0; m + 1 < n; ++m) a(m, m + 1) = std::sqrt(static_cast<double>(m + 1));
  return Operator(SpaceTag::cavity(space), std::move(a));
}

Operator pauli(Pauli which) {
  Matrix m = Matrix::Zero(2, 2);
  switch (which) {
    case Pauli::sp: m(1, 0) = 1.0; return Operator(SpaceTag::atom(), m);
    case Pauli::sm: m(0, 1) = 1.0; return Operator(SpaceTag::atom(), m);
    case Pauli::sx:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      return Operator(SpaceTag::atom(), m, true);
    case Pauli::sz:
      m(0, 0) = -1.0;
      m(1, 1) = 1.0;
      return Operator(SpaceTag::atom(), m, true);
  }
  throw std::invalid_argument("unknown Pauli operator");
}

Operator embed(const Operator& op, Subsystem which, const HilbertSpace& space) {
  const int nc = space.n_cavity();
  const int na = HilbertSpace::n_atom;
  Matrix out = Matrix::Zero(space.dim(), space.dim());
  if (which == Subsystem::cavity) {
    if (op.tag() != SpaceTag::cavity(space)) {
      throw DimensionError("embed: operator is not a " + std::to_string(nc) +
                           "-level cavity operator");
    }
    for (int m = 0; m < nc; ++m)
      for (int n = 0; n < nc; ++n)
        for (int s = 0; s < na; ++s) out(space.index(m, s), space.index(n, s)) = op.matrix()(m, n);
  } else {
    if (op.tag() != SpaceTag::atom()) {
      throw DimensionError("embed: operator is not a two-level atom operator");
    }
    for (int m = 0; m < nc; ++m)
      for (int s = 0; s < na; ++s)
        for (int r = 0; r < na; ++r) out(space.index(m, s), space.index(m, r)) = op.matrix()(s, r);
  }
  return Operator(SpaceTag::full(space), std::move(out), op.hermitian());
}

}  // namespace pblock
