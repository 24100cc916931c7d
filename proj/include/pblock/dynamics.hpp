#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "pblock/dressed_jumps.hpp"

namespace pblock {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_drift)
      : std::runtime_error(what), last_drift_(last_drift) {}
  double last_drift() const { return last_drift_; }

 private:
  double last_drift_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Matrix> states;
};

inline constexpr int kStepsPerPeriod = 256;
inline constexpr double kTraceDriftLimit = 1e-6;

// Default fixed step, one 256th of the drive period.
double default_time_step(const Generator& gen);

// Classical RK4 on a dense matrix under L(t). The same stepper serves density
// matrices and operator-modified states of the regression theorem.
class Stepper {
 public:
  explicit Stepper(const Generator& gen);

  // One step of size h starting at time t.
  void step(double t, double h, Matrix& state);

  // Integrate from t0 to t1 with equal steps no larger than dt.
  void advance(double t0, double t1, double dt, Matrix& state);

 private:
  const Generator& gen_;
  Matrix k1_, k2_, k3_, k4_, tmp_;
  Generator::Scratch scratch_;
};

// Density-matrix trajectory from t0 to t1, recording every step (times[0] = t0).
// The trace is not renormalized; a drift above 1e-6 raises IntegrationError.
Trajectory propagate(const Generator& gen, const Matrix& rho0, double t0, double t1, double dt);

// Driven limit cycle sampled over one drive period.
struct PeriodicState {
  std::vector<Matrix> samples;       // rho(t_s), s = 0..S-1
  std::vector<double> sample_times;  // absolute times t_s = t_start + s T / S
  Matrix average;
  double period = 0.0;
  double t_converged = 0.0;  // end of the last simulated period
  double last_drift = 0.0;
  int periods = 0;
  bool converged = false;

  int size() const { return static_cast<int>(samples.size()); }
};

struct LimitCycleOptions {
  double tol = 1e-9;
  int max_periods = 20000;
  int samples = 64;
  int steps_per_period = kStepsPerPeriod;
};

// Evolve from `initial` (default |psi_0><psi_0|) period by period until the
// period-averaged state moves by less than tol (entry-wise max). With Omega = 0
// the dressed vacuum is returned as a single sample.
PeriodicState limit_cycle(const Generator& gen, const LimitCycleOptions& opts = {},
                          const Matrix* initial = nullptr);

Matrix dressed_vacuum(int dim);

// Quantum-regression evaluation, averaged over `phases` equally spaced starting
// points of the cycle:
//   C(tau) = < tr(observable * E_{t0 + tau <- t0}(pre * rho(t0) * post)) >_{t0}
// Returns one value per tau (tau_grid increasing from 0).
std::vector<cplx> regression_correlate(const Generator& gen, const PeriodicState& cycle,
                                       const Matrix& pre, const Matrix& post,
                                       const Matrix& observable, const std::vector<double>& tau_grid,
                                       int phases = 16, int threads = 1);

// Two-stage regression. After the first insertion the state is propagated by
// tau, the second insertion is applied, then it is propagated by tau' and
// traced against `observable`. `pairs` lists (tau index, tau' index) to
// evaluate; values come back in the same order.
struct NestedInsertions {
  Matrix first_pre, first_post;
  Matrix second_pre, second_post;
  Matrix observable;
};

std::vector<cplx> nested_regression(const Generator& gen, const PeriodicState& cycle,
                                    const NestedInsertions& ins, const std::vector<double>& tau_grid,
                                    const std::vector<double>& tau_prime_grid,
                                    const std::vector<std::pair<int, int>>& pairs,
                                    int phases = 16, int threads = 1);

// Run fn(i) for i in [0, count) over `threads` workers.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace pblock
