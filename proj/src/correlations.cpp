#include "pblock/correlations.hpp"

#include <cmath>

namespace pblock {

PolaritonOutput xdot_plus(const EigenSystem& eig, int levels) {
  const int n = levels > 0 ? levels : eig.size();
  if (n > eig.size()) throw DimensionError("xdot_plus: more levels requested than available");
  const Matrix v = eig.vectors.leftCols(n);
  const Matrix x = v.adjoint() * cavity_quadrature(eig.space).matrix() * v;
  Matrix plus = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < k; ++j)
      plus(j, k) = cplx(0.0, -1.0) * (eig.energies(k) - eig.energies(j)) * x(j, k);
  Operator p(SpaceTag::dressed(n), plus);
  Operator m = p.adjoint();
  Matrix intensity = m.matrix() * p.matrix();
  return PolaritonOutput{std::move(p), std::move(m), std::move(intensity)};
}

std::string to_string(CorrelationKind kind) {
  switch (kind) {
    case CorrelationKind::g2_equal: return "g2_equal";
    case CorrelationKind::g3_equal: return "g3_equal";
    case CorrelationKind::g2_delay: return "g2_delay";
    case CorrelationKind::g3_delay_diag: return "g3_delay_diag";
    case CorrelationKind::g3_delay_slice: return "g3_delay_slice";
  }
  return "unknown";
}

std::string to_string(Blockade b) {
  switch (b) {
    case Blockade::one_polariton: return "1PB";
    case Blockade::two_polariton: return "2PB";
    case Blockade::none: return "none";
  }
  return "unknown";
}

namespace {

Matrix power(const Matrix& m, int n) {
  Matrix out = m;
  for (int i = 1; i < n; ++i) out = out * m;
  return out;
}

double checked_denominator(const Matrix& rho, const PolaritonOutput& out, double floor) {
  if (rho.rows() != out.dim()) throw DimensionError("correlation: state and output operator differ in size");
  const double den = (out.intensity * rho).trace().real();
  if (!(den > floor)) {
    throw UndrivenOutputError("undriven/vacuum output: <Xdot- Xdot+> = " + std::to_string(den) +
                              " is below the floor " + std::to_string(floor));
  }
  return den;
}

double real_normalized(cplx value, double norm) {
  const cplx g = value / norm;
  if (std::abs(g.imag()) > kImaginaryTol * std::max(1.0, std::abs(g.real()))) {
    throw std::runtime_error("correlation has a non-negligible imaginary part: " +
                             std::to_string(g.imag()));
  }
  return g.real();
}

}  // namespace

double normalized_moment(int n, const Matrix& rho, const PolaritonOutput& out, double floor) {
  if (n < 1) throw std::invalid_argument("normalized_moment: order must be >= 1");
  const double den = checked_denominator(rho, out, floor);
  const Matrix up = power(out.plus.matrix(), n);
  const cplx num = (up.adjoint() * up * rho).trace();
  return real_normalized(num, std::pow(den, n));
}

CorrelationResult g_equal_time(int n, const PeriodicState& cycle, const PolaritonOutput& out,
                               double floor) {
  if (n != 2 && n != 3) throw std::invalid_argument("g_equal_time: order must be 2 or 3");
  if (!cycle.converged) throw std::invalid_argument("g_equal_time: limit cycle has not converged");
  CorrelationResult r{n == 2 ? CorrelationKind::g2_equal : CorrelationKind::g3_equal, {}, {}, {}, 0.0};
  r.denominator = checked_denominator(cycle.average, out, floor);
  r.values = {normalized_moment(n, cycle.average, out, floor)};
  return r;
}

CorrelationResult g2_delay(const Generator& gen, const PeriodicState& cycle,
                           const PolaritonOutput& out, const std::vector<double>& tau_grid,
                           const DelayOptions& opts) {
  CorrelationResult r{CorrelationKind::g2_delay, tau_grid, {}, {}, 0.0};
  r.denominator = checked_denominator(cycle.average, out, opts.floor);
  const auto raw = regression_correlate(gen, cycle, out.plus.matrix(), out.minus.matrix(),
                                        out.intensity, tau_grid, opts.phases, opts.threads);
  const double norm = r.denominator * r.denominator;
  for (const cplx& v : raw) r.values.push_back(real_normalized(v, norm));
  return r;
}

CorrelationResult g3_delay(const Generator& gen, const PeriodicState& cycle,
                           const PolaritonOutput& out, const std::vector<double>& tau_grid,
                           const std::vector<double>& tau_prime_grid, G3Cut cut,
                           const DelayOptions& opts) {
  const double den = checked_denominator(cycle.average, out, opts.floor);
  const double norm = den * den * den;
  CorrelationResult r{cut == G3Cut::diagonal ? CorrelationKind::g3_delay_diag
                                             : CorrelationKind::g3_delay_slice,
                      {}, {}, {}, den};
  if (cut == G3Cut::slice) {
    const Matrix up2 = out.plus.matrix() * out.plus.matrix();
    const auto raw = regression_correlate(gen, cycle, up2, up2.adjoint(), out.intensity,
                                          tau_prime_grid, opts.phases, opts.threads);
    r.tau.assign(tau_prime_grid.size(), 0.0);
    r.tau_prime = tau_prime_grid;
    for (const cplx& v : raw) r.values.push_back(real_normalized(v, norm));
    return r;
  }
  const NestedInsertions ins{out.plus.matrix(), out.minus.matrix(), out.plus.matrix(),
                             out.minus.matrix(), out.intensity};
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < static_cast<int>(tau_grid.size()); ++i) pairs.emplace_back(i, i);
  const auto raw = nested_regression(gen, cycle, ins, tau_grid, tau_grid, pairs, opts.phases,
                                     opts.threads);
  r.tau = tau_grid;
  r.tau_prime = tau_grid;
  for (const cplx& v : raw) r.values.push_back(real_normalized(v, norm));
  return r;
}

CorrelationResult g3_delay_map(const Generator& gen, const PeriodicState& cycle,
                               const PolaritonOutput& out, const std::vector<double>& tau_grid,
                               const std::vector<double>& tau_prime_grid,
                               const DelayOptions& opts) {
  const double den = checked_denominator(cycle.average, out, opts.floor);
  const NestedInsertions ins{out.plus.matrix(), out.minus.matrix(), out.plus.matrix(),
                             out.minus.matrix(), out.intensity};
  std::vector<std::pair<int, int>> pairs;
  CorrelationResult r{CorrelationKind::g3_delay_diag, {}, {}, {}, den};
  for (int i = 0; i < static_cast<int>(tau_grid.size()); ++i) {
    for (int j = 0; j < static_cast<int>(tau_prime_grid.size()); ++j) {
      pairs.emplace_back(i, j);
      r.tau.push_back(tau_grid[i]);
      r.tau_prime.push_back(tau_prime_grid[j]);
    }
  }
  const auto raw = nested_regression(gen, cycle, ins, tau_grid, tau_prime_grid, pairs,
                                     opts.phases, opts.threads);
  for (const cplx& v : raw) r.values.push_back(real_normalized(v, den * den * den));
  return r;
}

DelayChecks evaluate_delay_checks(const CorrelationResult& g2, const CorrelationResult& g3_diag,
                                  const CorrelationResult& g3_slice) {
  const auto holds = [](const std::vector<double>& v, bool below) {
    if (v.size() < 2) return false;
    for (size_t i = 1; i < v.size(); ++i) {
      if (below ? !(v[i] < v[0]) : !(v[i] > v[0])) return false;
    }
    return true;
  };
  DelayChecks c;
  c.g2_below_zero_delay = holds(g2.values, true);
  c.g3_diagonal_above_zero_delay = holds(g3_diag.values, false);
  c.g3_slice_above_zero_delay = holds(g3_slice.values, false);
  return c;
}

Blockade classify_blockade(double g2_0, double g3_0, const std::optional<DelayChecks>& delay) {
  if (g2_0 < 1.0 && g3_0 < 1.0) return Blockade::one_polariton;
  if (g2_0 > 1.0 && g3_0 < 1.0 && (!delay || delay->all())) return Blockade::two_polariton;
  return Blockade::none;
}

}  // namespace pblock
