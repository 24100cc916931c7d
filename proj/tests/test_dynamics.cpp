#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "pblock/dynamics.hpp"
#include "pblock/rwa_steady_state.hpp"

using namespace pblock;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Small, strongly damped model so that limit cycles take a few hundred periods.
struct Small {
  SystemParams p;
  EigenSystem eig;
  std::vector<JumpSet> jumps;

  explicit Small(double g = 0.3, double Omega_over_gamma = 0.1, double theta = 0.3 * kPi, int n_cavity = 6)
      : p(SystemParams::operating_point(g)),
        eig(solve_dressed_states(init(p, g, theta), HilbertSpace(n_cavity))) {
    p = eig.params;
    p.Omega = Omega_over_gamma * p.gamma_a;
    p.omega_l = transition_energy(eig, kGround, kUpperPolariton);
    eig.params = p;
    jumps = standard_jump_sets(eig);
  }
  static const SystemParams& init(SystemParams& q, double g, double theta) {
    q = SystemParams::operating_point(g);
    q.theta = theta;
    q.gamma_a = q.gamma_sigma = 0.05;
    return q;
  }
  Generator gen(int levels = 8, DriveModel d = DriveModel::lab) const { return Generator(eig, jumps, p, levels, d); }
};

LimitCycleOptions quick() {
  LimitCycleOptions o;
  o.tol = 1e-10;
  o.max_periods = 5000;
  return o;
}

}  // namespace

TEST_CASE("undriven propagation") {
  Small s;
  s.p.Omega = 0.0;
  const Generator gen(s.eig, s.jumps, s.p, 8);
  SUBCASE("dressed vacuum is stationary") {
    const Trajectory tr = propagate(gen, dressed_vacuum(8), 0.0, 200.0, default_time_step(gen));
    for (const Matrix& r : tr.states) CHECK(max_abs(r - dressed_vacuum(8)) < 1e-10);
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.times.back() == 200.0);
    for (size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
  }
  SUBCASE("single excitation decays at gamma_a in the bare limit") {
    Small bare(0.0, 0.0, 0.0);
    SystemParams p = bare.p;
    p.Omega = 0.0;
    const Generator g0(bare.eig, bare.jumps, p, 8);
    Matrix rho = Matrix::Zero(8, 8);
    rho(2, 2) = 1.0;  // |1,g>
    const double tmax = 3.0 / p.gamma_a;
    const Trajectory tr = propagate(g0, rho, 0.0, tmax, 0.05);
    const double fit = -std::log(tr.states.back()(2, 2).real()) / tmax;
    CHECK(std::abs(fit - p.gamma_a) / p.gamma_a < 1e-2);
    CHECK(std::abs(tr.states.back()(0, 0).real() - (1.0 - std::exp(-3.0))) < 1e-6);
  }
}

TEST_CASE("propagate errors") {
  const Small s;
  const Generator gen = s.gen();
  CHECK_THROWS_AS(propagate(gen, dressed_vacuum(8), 0.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(propagate(gen, dressed_vacuum(8), 1.0, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(propagate(gen, dressed_vacuum(7), 0.0, 1.0, 0.1), DimensionError);
  Matrix bad = dressed_vacuum(8);
  bad(0, 1) = 0.3;
  CHECK_THROWS_AS(propagate(gen, bad, 0.0, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(propagate(gen, 2.0 * dressed_vacuum(8), 0.0, 1.0, 0.1), std::invalid_argument);
  // An unstable step is caught by the trace monitor.
  Matrix mixed = Matrix::Identity(8, 8) / 8.0;
  CHECK_THROWS_AS(propagate(gen, mixed, 0.0, 100.0, 2.0), IntegrationError);
}

TEST_CASE("time-step self-consistency and trace drift") {
  const Small s;
  const Generator gen = s.gen();
  Matrix rho = Matrix::Identity(8, 8) / 8.0;
  rho(1, 2) = rho(2, 1) = 0.05;
  const double dt = default_time_step(gen);
  const double tmax = 20.0 * gen.period();
  const Matrix a = propagate(gen, rho, 0.0, tmax, dt).states.back();
  const Matrix b = propagate(gen, rho, 0.0, tmax, 0.5 * dt).states.back();
  CHECK(max_abs(a - b) < 1e-8);

  const double per_lifetime = std::abs(a.trace() - 1.0) / (tmax * s.p.gamma_a);
  CHECK(per_lifetime < 1e-8);
}

TEST_CASE("limit cycle") {
  const Small s;
  const Generator gen = s.gen();
  const PeriodicState cycle = limit_cycle(gen, quick());
  REQUIRE(cycle.converged);
  CHECK(cycle.size() == 64);
  CHECK(cycle.last_drift < 1e-10);
  CHECK(cycle.period == doctest::Approx(2.0 * kPi / s.p.omega_l));
  CHECK(cycle.t_converged == doctest::Approx(cycle.periods * cycle.period));
  for (int i = 1; i < cycle.size(); ++i) {
    CHECK(cycle.sample_times[i] - cycle.sample_times[i - 1] == doctest::Approx(cycle.period / 64));
  }

  Matrix mean = Matrix::Zero(8, 8);
  for (const Matrix& r : cycle.samples) {
    CHECK(max_abs(r - r.adjoint()) < 1e-10);
    CHECK(std::abs(r.trace() - 1.0) < 1e-8);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (r + r.adjoint()));
    CHECK(es.eigenvalues().minCoeff() >= -1e-7);
    mean += r;
  }
  CHECK(max_abs(mean / 64.0 - cycle.average) < 1e-14);
  CHECK(cycle.average(kUpperPolariton, kUpperPolariton).real() > 0.0);

  SUBCASE("independent of the initial state") {
    const Matrix mixed = Matrix::Identity(8, 8) / 8.0;
    const PeriodicState other = limit_cycle(gen, quick(), &mixed);
    CHECK(max_abs(other.average - cycle.average) < 10 * quick().tol);
  }
  SUBCASE("populations scale with Omega^2") {
    const Small half(0.3, 0.05);
    const PeriodicState h = limit_cycle(half.gen(), quick());
    for (int j : {kLowerPolariton, kUpperPolariton}) {
      const double ratio = cycle.average(j, j).real() / h.average(j, j).real();
      CHECK(std::abs(ratio / 4.0 - 1.0) < 0.05);
    }
  }
  SUBCASE("agrees with the rotating-wave algebraic solution") {
    const RwaSteadyState ss = rwa_steady_state(gen);
    CHECK(ss.residual < 1e-12);
    const double p1 = cycle.average(kUpperPolariton, kUpperPolariton).real();
    CHECK(std::abs(ss.period_average(kUpperPolariton, kUpperPolariton).real() - p1) / p1 < 1e-2);
    const PeriodicState rwa = limit_cycle(s.gen(8, DriveModel::rotating_wave), quick());
    CHECK(max_abs(rwa.average - ss.period_average) < 1e-9);
  }
}

TEST_CASE("limit cycle edge cases") {
  Small s;
  s.p.Omega = 0.0;
  const Generator undriven(s.eig, s.jumps, s.p, 8);
  const PeriodicState vac = limit_cycle(undriven);
  CHECK(vac.size() == 1);
  CHECK(vac.converged);
  CHECK(max_abs(vac.average - dressed_vacuum(8)) == 0.0);

  const Small d;
  LimitCycleOptions o = quick();
  o.max_periods = 3;
  try {
    limit_cycle(d.gen(), o);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_drift() > o.tol);
    CHECK(std::string(e.what()).find("3 periods") != std::string::npos);
  }
  o = quick();
  o.samples = 60;
  CHECK_THROWS_AS(limit_cycle(d.gen(), o), std::invalid_argument);
}

TEST_CASE("regression primitives") {
  const Small s;
  const Generator gen = s.gen();
  const PeriodicState cycle = limit_cycle(gen, quick());
  const Matrix id = Matrix::Identity(8, 8);
  const std::vector<double> tau = {0.0, 3.0, 10.0, 40.0};

  SUBCASE("identity insertions preserve the trace") {
    const std::vector<cplx> c = regression_correlate(gen, cycle, id, id, id, tau);
    for (const cplx& v : c) CHECK(std::abs(v - 1.0) < 1e-9);
  }
  SUBCASE("zero delay matches the equal-time moment") {
    Matrix lower = Matrix::Zero(8, 8);
    lower(0, 2) = 1.0;
    lower(1, 2) = 0.3;
    const Matrix obs = lower * lower.adjoint();
    const std::vector<cplx> c = regression_correlate(gen, cycle, lower, lower.adjoint(), obs, tau);
    // Averages over the 16 phases used by the regression.
    cplx direct = 0.0;
    for (int k = 0; k < 64; k += 4) direct += (obs * lower * cycle.samples[k] * lower.adjoint()).trace();
    direct /= 16.0;
    CHECK(std::abs(c[0] - direct) < 1e-8 * std::abs(direct));
    const cplx on_average = (obs * lower * cycle.average * lower.adjoint()).trace();
    CHECK(std::abs(c[0] - on_average) / std::abs(on_average) < 1e-6);
  }
  SUBCASE("threads do not change results") {
    const std::vector<cplx> a = regression_correlate(gen, cycle, id, id, id, tau, 16, 1);
    const std::vector<cplx> b = regression_correlate(gen, cycle, id, id, id, tau, 16, 3);
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
  SUBCASE("nested regression composes two single-stage propagations") {
    NestedInsertions ins{id, id, id, id, id};
    const std::vector<cplx> c = nested_regression(gen, cycle, ins, tau, tau, {{0, 0}, {1, 2}, {3, 3}});
    for (const cplx& v : c) CHECK(std::abs(v - 1.0) < 1e-9);
  }
  SUBCASE("errors") {
    PeriodicState raw = cycle;
    raw.converged = false;
    CHECK_THROWS_AS(regression_correlate(gen, raw, id, id, id, tau), std::invalid_argument);
    CHECK_THROWS_AS(regression_correlate(gen, cycle, id, id, id, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(regression_correlate(gen, cycle, id, id, id, {0.0, 2.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(regression_correlate(gen, cycle, id, id, id, tau, 7), std::invalid_argument);
    NestedInsertions ins{id, id, id, id, id};
    CHECK_THROWS_AS(nested_regression(gen, cycle, ins, tau, tau, {{0, 9}}), std::out_of_range);
  }
}

TEST_CASE("parallel_for") {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](int i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](int i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  int count = 0;
  parallel_for(0, 4, [&](int) { ++count; });
  CHECK(count == 0);
}
