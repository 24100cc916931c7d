#include "pblock/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

namespace pblock {

double default_time_step(const Generator& gen) { return gen.period() / kStepsPerPeriod; }

Stepper::Stepper(const Generator& gen) : gen_(gen) {
  const int n = gen.dim();
  for (Matrix* m : {&k1_, &k2_, &k3_, &k4_, &tmp_, &scratch_.hamiltonian, &scratch_.product}) {
    m->resize(n, n);
  }
}

void Stepper::step(double t, double h, Matrix& state) {
  gen_.apply(t, state, k1_, scratch_);
  tmp_ = state + (0.5 * h) * k1_;
  gen_.apply(t + 0.5 * h, tmp_, k2_, scratch_);
  tmp_ = state + (0.5 * h) * k2_;
  gen_.apply(t + 0.5 * h, tmp_, k3_, scratch_);
  tmp_ = state + h * k3_;
  gen_.apply(t + h, tmp_, k4_, scratch_);
  state += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
}

void Stepper::advance(double t0, double t1, double dt, Matrix& state) {
  if (!(dt > 0.0)) throw std::invalid_argument("Stepper: dt must be > 0");
  if (t1 <= t0) return;
  const auto steps = static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9));
  const double h = (t1 - t0) / static_cast<double>(steps);
  for (long i = 0; i < steps; ++i) step(t0 + static_cast<double>(i) * h, h, state);
}

Matrix dressed_vacuum(int dim) {
  Matrix rho = Matrix::Zero(dim, dim);
  rho(0, 0) = 1.0;
  return rho;
}

namespace {

void check_density_matrix(const Matrix& rho, int dim) {
  if (rho.rows() != dim || rho.cols() != dim) {
    throw DimensionError("density matrix must be " + std::to_string(dim) + "x" + std::to_string(dim));
  }
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(rho.trace() - 1.0) > 1e-8) throw std::invalid_argument("density matrix trace != 1");
}

void check_trace(const Matrix& rho, double t) {
  const double drift = std::abs(rho.trace() - 1.0);
  if (!(drift <= kTraceDriftLimit)) {
    throw IntegrationError("trace drift " + std::to_string(drift) + " at t = " + std::to_string(t) +
                           " exceeds 1e-6; the time step is too large for this generator");
  }
}

}  // namespace

Trajectory propagate(const Generator& gen, const Matrix& rho0, double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("propagate: dt must be > 0");
  if (!(t1 >= t0)) throw std::invalid_argument("propagate: t1 must be >= t0");
  check_density_matrix(rho0, gen.dim());

  Trajectory traj;
  const auto steps = static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9));
  const double h = steps > 0 ? (t1 - t0) / static_cast<double>(steps) : 0.0;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(t0);
  traj.states.push_back(rho0);

  Stepper stepper(gen);
  Matrix rho = rho0;
  for (long i = 0; i < steps; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    stepper.step(t, h, rho);
    check_trace(rho, t + h);
    traj.times.push_back(i + 1 == steps ? t1 : t + h);
    traj.states.push_back(rho);
  }
  return traj;
}

PeriodicState limit_cycle(const Generator& gen, const LimitCycleOptions& opts,
                          const Matrix* initial) {
  const int n = gen.dim();
  PeriodicState out;
  out.period = gen.period();
  if (gen.Omega() == 0.0) {
    out.samples = {dressed_vacuum(n)};
    out.sample_times = {0.0};
    out.average = out.samples.front();
    out.converged = true;
    return out;
  }
  if (opts.samples <= 0 || opts.steps_per_period % opts.samples != 0) {
    throw std::invalid_argument("limit_cycle: samples must divide steps_per_period");
  }
  if (!(opts.tol > 0.0)) throw std::invalid_argument("limit_cycle: tol must be > 0");

  Matrix rho = initial != nullptr ? *initial : dressed_vacuum(n);
  check_density_matrix(rho, n);

  const double period = gen.period();
  const double h = period / opts.steps_per_period;
  const int stride = opts.steps_per_period / opts.samples;
  Stepper stepper(gen);

  std::vector<Matrix> samples(opts.samples, Matrix(n, n));
  std::vector<double> times(opts.samples);
  Matrix previous_average;
  double drift = std::numeric_limits<double>::infinity();

  for (int p = 0; p < opts.max_periods; ++p) {
    const double t_start = period * p;
    Matrix average = Matrix::Zero(n, n);
    for (int i = 0; i < opts.steps_per_period; ++i) {
      const double t = t_start + h * i;
      if (i % stride == 0) {
        samples[i / stride] = rho;
        times[i / stride] = t;
        average += rho;
      }
      stepper.step(t, h, rho);
    }
    check_trace(rho, t_start + period);
    average /= static_cast<double>(opts.samples);

    if (p > 0) {
      drift = (average - previous_average).cwiseAbs().maxCoeff();
      if (drift < opts.tol) {
        out.samples = std::move(samples);
        out.sample_times = std::move(times);
        out.average = std::move(average);
        out.t_converged = t_start + period;
        out.last_drift = drift;
        out.periods = p + 1;
        out.converged = true;
        return out;
      }
    }
    previous_average = std::move(average);
  }
  throw ConvergenceError("limit cycle not reached after " + std::to_string(opts.max_periods) +
                             " periods; last period-to-period drift " + std::to_string(drift),
                         drift);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

void require_converged(const PeriodicState& cycle, int phases) {
  if (!cycle.converged) throw std::invalid_argument("regression: limit cycle has not converged");
  if (phases <= 0) throw std::invalid_argument("regression: phases must be > 0");
  if (cycle.size() % phases != 0 && cycle.size() != 1) {
    throw std::invalid_argument("regression: phases must divide the number of cycle samples");
  }
}

void require_grid(const std::vector<double>& grid) {
  if (grid.empty() || grid.front() != 0.0) {
    throw std::invalid_argument("regression: delay grid must start at 0");
  }
  for (size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("regression: delay grid must increase");
  }
}

std::vector<int> phase_indices(const PeriodicState& cycle, int phases) {
  if (cycle.size() == 1) return {0};
  std::vector<int> idx(phases);
  const int stride = cycle.size() / phases;
  for (int s = 0; s < phases; ++s) idx[s] = s * stride;
  return idx;
}

// Time used for the generator at phase sample s. With Omega = 0 the generator
// is time independent.
double phase_time(const PeriodicState& cycle, int s) { return cycle.sample_times[s]; }

}  // namespace

std::vector<cplx> regression_correlate(const Generator& gen, const PeriodicState& cycle,
                                       const Matrix& pre, const Matrix& post,
                                       const Matrix& observable, const std::vector<double>& tau_grid,
                                       int phases, int threads) {
  require_converged(cycle, phases);
  require_grid(tau_grid);
  const std::vector<int> idx = phase_indices(cycle, phases);
  const double dt = default_time_step(gen);

  std::vector<std::vector<cplx>> per_phase(idx.size(), std::vector<cplx>(tau_grid.size()));
  parallel_for(static_cast<int>(idx.size()), threads, [&](int p) {
    const double t0 = phase_time(cycle, idx[p]);
    Matrix state = pre * cycle.samples[idx[p]] * post;
    Stepper stepper(gen);
    for (size_t i = 0; i < tau_grid.size(); ++i) {
      if (i > 0) stepper.advance(t0 + tau_grid[i - 1], t0 + tau_grid[i], dt, state);
      per_phase[p][i] = (observable * state).trace();
    }
  });

  std::vector<cplx> out(tau_grid.size(), cplx(0.0));
  for (const auto& row : per_phase)
    for (size_t i = 0; i < out.size(); ++i) out[i] += row[i];
  for (auto& v : out) v /= static_cast<double>(idx.size());
  return out;
}

std::vector<cplx> nested_regression(const Generator& gen, const PeriodicState& cycle,
                                    const NestedInsertions& ins, const std::vector<double>& tau_grid,
                                    const std::vector<double>& tau_prime_grid,
                                    const std::vector<std::pair<int, int>>& pairs, int phases,
                                    int threads) {
  require_converged(cycle, phases);
  require_grid(tau_grid);
  require_grid(tau_prime_grid);
  const int n_tau = static_cast<int>(tau_grid.size());
  const int n_prime = static_cast<int>(tau_prime_grid.size());

  // For each first-stage delay, the largest second-stage index requested.
  std::vector<int> reach(n_tau, -1);
  for (const auto& [i, j] : pairs) {
    if (i < 0 || i >= n_tau || j < 0 || j >= n_prime) {
      throw std::out_of_range("nested_regression: pair index outside the delay grids");
    }
    reach[i] = std::max(reach[i], j);
  }

  const std::vector<int> idx = phase_indices(cycle, phases);
  const double dt = default_time_step(gen);

  // per_phase[p][i * n_prime + j]
  std::vector<std::vector<cplx>> per_phase(idx.size(),
                                           std::vector<cplx>(static_cast<size_t>(n_tau) * n_prime));
  parallel_for(static_cast<int>(idx.size()), threads, [&](int p) {
    const double t0 = phase_time(cycle, idx[p]);
    Matrix first = ins.first_pre * cycle.samples[idx[p]] * ins.first_post;
    Stepper stepper(gen);
    const int last_needed = static_cast<int>(
        std::distance(reach.begin(), std::find_if(reach.rbegin(), reach.rend(),
                                                  [](int r) { return r >= 0; }).base()) - 1);
    for (int i = 0; i <= last_needed; ++i) {
      if (i > 0) stepper.advance(t0 + tau_grid[i - 1], t0 + tau_grid[i], dt, first);
      if (reach[i] < 0) continue;
      const double t1 = t0 + tau_grid[i];
      Matrix second = ins.second_pre * first * ins.second_post;
      for (int j = 0; j <= reach[i]; ++j) {
        if (j > 0) stepper.advance(t1 + tau_prime_grid[j - 1], t1 + tau_prime_grid[j], dt, second);
        per_phase[p][static_cast<size_t>(i) * n_prime + j] = (ins.observable * second).trace();
      }
    }
  });

  std::vector<cplx> out;
  out.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    cplx sum(0.0);
    for (const auto& row : per_phase) sum += row[static_cast<size_t>(i) * n_prime + j];
    out.push_back(sum / static_cast<double>(idx.size()));
  }
  return out;
}

}  // namespace pblock
