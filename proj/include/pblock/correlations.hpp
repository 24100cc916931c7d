#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pblock/dynamics.hpp"

namespace pblock {

// Polaritonic output operator
//   Xdot+ = -i sum_{j<k} (w_k - w_j) X_jk |psi_j><psi_k|,  X = a + a^dag,
// and its adjoint, on the lowest `levels` dressed states.
struct PolaritonOutput {
  Operator plus;
  Operator minus;
  Matrix intensity;  // Xdot- Xdot+

  int dim() const { return plus.dim(); }
};

PolaritonOutput xdot_plus(const EigenSystem& eig, int levels = 0);

class UndrivenOutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDenominatorFloor = 1e-18;
inline constexpr double kImaginaryTol = 1e-10;

enum class CorrelationKind { g2_equal, g3_equal, g2_delay, g3_delay_diag, g3_delay_slice };

std::string to_string(CorrelationKind kind);

struct CorrelationResult {
  CorrelationKind kind;
  std::vector<double> tau;        // first delay (g2_delay, g3_delay_diag, g3_delay_slice)
  std::vector<double> tau_prime;  // second delay where applicable
  std::vector<double> values;
  double denominator = 0.0;  // <Xdot- Xdot+>
};

// Normalized <Xdot-^n Xdot+^n> / <Xdot- Xdot+>^n on a density matrix.
double normalized_moment(int n, const Matrix& rho, const PolaritonOutput& out,
                         double floor = kDenominatorFloor);

// Equal-time g^(n)(0), n = 2 or 3, on the period-averaged state.
CorrelationResult g_equal_time(int n, const PeriodicState& cycle, const PolaritonOutput& out,
                               double floor = kDenominatorFloor);

struct DelayOptions {
  int phases = 16;
  int threads = 1;
  double floor = kDenominatorFloor;
};

// g2(tau) = <Xdot-(0) Xdot-(tau) Xdot+(tau) Xdot+(0)> / <Xdot- Xdot+>^2.
CorrelationResult g2_delay(const Generator& gen, const PeriodicState& cycle,
                           const PolaritonOutput& out, const std::vector<double>& tau_grid,
                           const DelayOptions& opts = {});

enum class G3Cut { diagonal, slice };

// g3(tau, tau') with emissions at 0, tau and tau + tau', normalized by
// <Xdot- Xdot+>^3. diagonal: tau' = tau along `tau_grid`; slice: tau = 0
// along `tau_prime_grid` (two emissions at 0, one at tau').
CorrelationResult g3_delay(const Generator& gen, const PeriodicState& cycle,
                           const PolaritonOutput& out, const std::vector<double>& tau_grid,
                           const std::vector<double>& tau_prime_grid, G3Cut cut,
                           const DelayOptions& opts = {});

// Full g3(tau_i, tau'_j) map, row-major in (i, j).
CorrelationResult g3_delay_map(const Generator& gen, const PeriodicState& cycle,
                               const PolaritonOutput& out, const std::vector<double>& tau_grid,
                               const std::vector<double>& tau_prime_grid,
                               const DelayOptions& opts = {});

// Outcome of the delay-time inequalities
//   g2(tau) < g2(0),  g3(tau, tau') > g3(0, 0),  g3(0, tau') > g3(0, 0)
// over all strictly positive delays of the checked grids.
struct DelayChecks {
  bool g2_below_zero_delay = false;
  bool g3_diagonal_above_zero_delay = false;
  bool g3_slice_above_zero_delay = false;

  bool all() const {
    return g2_below_zero_delay && g3_diagonal_above_zero_delay && g3_slice_above_zero_delay;
  }
};

DelayChecks evaluate_delay_checks(const CorrelationResult& g2, const CorrelationResult& g3_diag,
                                  const CorrelationResult& g3_slice);

enum class Blockade { one_polariton, two_polariton, none };

std::string to_string(Blockade b);

// 1PB: g2(0) < 1 and g3(0) < 1. 2PB: g2(0) > 1, g3(0) < 1 and every delay
// inequality holds on the checked grids; with no delay grids checked
// (nullopt) the equal-time conditions decide alone.
Blockade classify_blockade(double g2_0, double g3_0, const std::optional<DelayChecks>& delay);

}  // namespace pblock
