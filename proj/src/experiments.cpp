#include "pblock/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace pblock {

namespace {

std::string num(double v) { return format_number(v); }

std::vector<std::string> standard_comments(const RunConfig& cfg, const std::string& what) {
  return {what, "parameters: " + parameter_line(cfg)};
}

}  // namespace

std::vector<double> linspace(double start, double stop, int points) {
  if (points < 2) throw std::invalid_argument("linspace: need at least 2 points");
  std::vector<double> v(points);
  for (int i = 0; i < points; ++i) {
    v[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  v.back() = stop;
  return v;
}

PointModel build_point(const RunConfig& cfg, double g, std::optional<double> omega_l) {
  SystemParams p = cfg.params;
  p.g = g;
  const HilbertSpace space(cfg.n_cavity);
  EigenSystem eig = solve_dressed_states(p, space);
  if (omega_l) {
    p.omega_l = *omega_l;
  } else if (cfg.lock_drive) {
    p.omega_l = transition_energy(eig, kGround, kUpperPolariton);
  }
  eig.params = p;
  std::vector<JumpSet> jumps = standard_jump_sets(eig);
  const int levels =
      cfg.dressed_levels > 0 ? std::min(cfg.dressed_levels, eig.size()) : eig.size();
  Generator gen(eig, jumps, p, levels, cfg.drive);
  PolaritonOutput out = xdot_plus(eig, levels);
  return PointModel{p, std::move(eig), std::move(jumps), std::move(gen), std::move(out)};
}

LimitCycleOptions cycle_options(const RunConfig& cfg) {
  LimitCycleOptions o;
  o.tol = cfg.tol;
  o.max_periods = cfg.max_periods;
  o.samples = cfg.samples;
  o.steps_per_period = cfg.steps_per_period;
  return o;
}

PointResult solve_point(const RunConfig& cfg, double g, std::optional<double> omega_l) {
  PointResult r;
  r.g = g;
  try {
    const PointModel m = build_point(cfg, g, omega_l);
    r.omega_l = m.params.omega_l;
    RealMatrix rates = RealMatrix::Zero(m.eig.size(), m.eig.size());
    for (const auto& js : m.jumps) rates += js.rates;
    r.rate_1p_0 = rates(kGround, kUpperPolariton);
    r.rate_1m_0 = rates(kGround, kLowerPolariton);
    r.rate_1p_1m = rates(kLowerPolariton, kUpperPolariton);

    const PeriodicState cycle = limit_cycle(m.gen, cycle_options(cfg));
    r.periods = cycle.periods;
    r.pop_0 = cycle.average(kGround, kGround).real();
    r.pop_1m = cycle.average(kLowerPolariton, kLowerPolariton).real();
    r.pop_1p = cycle.average(kUpperPolariton, kUpperPolariton).real();
    const CorrelationResult g2 = g_equal_time(2, cycle, m.out);
    const CorrelationResult g3 = g_equal_time(3, cycle, m.out);
    r.g2 = g2.values.front();
    r.g3 = g3.values.front();
    r.denominator = g2.denominator;
    r.blockade = classify_blockade(r.g2, r.g3, std::nullopt);
    r.valid = true;
  } catch (const std::exception& e) {
    r.valid = false;
    r.error = e.what();
  }
  return r;
}

void SweepSpec::validate() const {
  if (points < 2) throw std::invalid_argument("sweep needs at least 2 points");
  if (!(start < stop)) throw std::invalid_argument("sweep start must be below stop");
  if (axis == SweepAxis::coupling_strength && start < 0.0) {
    throw std::invalid_argument("coupling sweep must start at g >= 0");
  }
  if (axis == SweepAxis::drive_frequency && !(start > 0.0)) {
    throw std::invalid_argument("drive sweep must start at omega_l > 0");
  }
}

std::vector<double> SweepSpec::values() const { return linspace(start, stop, points); }

SweepSpec drive_sweep_spec(const RunConfig& cfg) {
  return {SweepAxis::drive_frequency, cfg.drive_start, cfg.drive_stop, cfg.drive_points, cfg, false};
}

SweepSpec coupling_sweep_spec(const RunConfig& cfg) {
  return {SweepAxis::coupling_strength, cfg.coupling_start, cfg.coupling_stop, cfg.coupling_points,
          cfg, true};
}

RunOutput run_spectrum(const RunConfig& cfg) {
  const std::vector<double> gs = linspace(cfg.spectrum_g_start, cfg.spectrum_g_stop, cfg.spectrum_points);
  const int levels = cfg.spectrum_levels;

  // Truncation check at the strongest coupling.
  {
    SystemParams p = cfg.params;
    p.g = gs.back();
    const EigenSystem a = solve_dressed_states(p, HilbertSpace(cfg.n_cavity));
    const EigenSystem b = solve_dressed_states(p, HilbertSpace(cfg.n_cavity + 5));
    const int checked = std::min(6, levels);
    double worst = 0.0;
    for (int j = 0; j < checked; ++j) worst = std::max(worst, std::abs(a.energies(j) - b.energies(j)));
    if (worst > 1e-6 * cfg.params.omega_c) {
      throw ConvergenceError("spectrum: lowest " + std::to_string(checked) + " energies at g = " +
                                 num(p.g) + " move by " + num(worst) + " when n_cavity " +
                                 std::to_string(cfg.n_cavity) + " -> " + std::to_string(cfg.n_cavity + 5) +
                                 "; raise --truncation",
                             worst);
    }
  }

  CsvTable t;
  t.comments = standard_comments(cfg, "dressed energies omega_j/omega_c versus g/omega_c; "
                                      "curve_k is the ascending index of the level tracked by overlap from level k at the first g");
  t.header.push_back("g");
  for (int j = 0; j < levels; ++j) t.header.push_back("E" + std::to_string(j));
  for (int j = 0; j < levels; ++j) t.header.push_back("curve" + std::to_string(j));

  std::optional<EigenSystem> prev;
  std::vector<int> curve(levels);
  for (int j = 0; j < levels; ++j) curve[j] = j;
  for (double g : gs) {
    SystemParams p = cfg.params;
    p.g = g;
    EigenSystem eig = solve_dressed_states(p, HilbertSpace(cfg.n_cavity), prev ? &*prev : nullptr);
    if (prev) {
      const std::vector<int> assign = track_by_overlap(*prev, eig);
      for (int& c : curve) c = assign[c];
    }
    std::vector<std::string> row{num(g)};
    for (int j = 0; j < levels; ++j) row.push_back(num(eig.energies(j)));
    for (int j = 0; j < levels; ++j) row.push_back(std::to_string(curve[j]));
    t.add_row(std::move(row));
    prev = std::move(eig);
  }
  RunOutput out;
  out.files.emplace_back("spectrum.csv", std::move(t));
  out.notes.push_back("truncation check passed at g=" + num(gs.back()));
  return out;
}

namespace {

std::vector<PointResult> solve_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::vector<double> xs = spec.values();
  std::vector<PointResult> results(xs.size());
  parallel_for(static_cast<int>(xs.size()), spec.fixed.threads, [&](int i) {
    if (spec.axis == SweepAxis::drive_frequency) {
      results[i] = solve_point(spec.fixed, spec.fixed.params.g, xs[i]);
    } else if (spec.resonance_lock) {
      RunConfig locked = spec.fixed;
      locked.lock_drive = true;
      results[i] = solve_point(locked, xs[i]);
    } else {
      results[i] = solve_point(spec.fixed, xs[i], spec.fixed.params.omega_l);
    }
  });
  return results;
}

void add_sweep_notes(RunOutput& out, const std::vector<PointResult>& rs) {
  int invalid = 0;
  int max_periods = 0;
  for (const auto& r : rs) {
    if (!r.valid) {
      ++invalid;
      out.notes.push_back("point g=" + num(r.g) + " omega_l=" + num(r.omega_l) + " failed: " + r.error);
    }
    max_periods = std::max(max_periods, r.periods);
  }
  out.notes.push_back("limit cycles: " + std::to_string(rs.size() - invalid) + "/" +
                      std::to_string(rs.size()) + " converged, at most " +
                      std::to_string(max_periods) + " drive periods");
  if (invalid > 0) out.ok = false;
}

}  // namespace

RunOutput run_drive_sweep(const SweepSpec& spec) {
  if (spec.axis != SweepAxis::drive_frequency) throw std::invalid_argument("run_drive_sweep: axis must be drive_frequency");
  const std::vector<PointResult> rs = solve_sweep(spec);
  CsvTable t;
  t.comments = standard_comments(spec.fixed, "equal-time g2(0), g3(0) versus drive frequency; "
                                             "classification uses the equal-time criteria only");
  t.header = {"omega_l", "g2_0", "g3_0", "denominator", "classification", "valid"};
  for (const auto& r : rs) {
    if (r.valid) {
      t.add_row({num(r.omega_l), num(r.g2), num(r.g3), num(r.denominator), to_string(r.blockade), "1"});
    } else {
      t.add_row({num(r.omega_l), "nan", "nan", "nan", "invalid", "0"});
    }
  }
  RunOutput out;
  out.files.emplace_back("drive_sweep.csv", std::move(t));
  add_sweep_notes(out, rs);
  return out;
}

RunOutput run_coupling_sweep(const SweepSpec& spec) {
  if (spec.axis != SweepAxis::coupling_strength) throw std::invalid_argument("run_coupling_sweep: axis must be coupling_strength");
  const std::vector<PointResult> rs = solve_sweep(spec);
  CsvTable t;
  t.comments = standard_comments(spec.fixed, "rates (both channels), period-averaged populations and equal-time "
                                             "correlations versus g with omega_l locked to E_{1+,0}");
  t.header = {"g", "omega_l", "Gamma_1p_0", "Gamma_1m_0", "Gamma_1p_1m", "pop_0", "pop_1m", "pop_1p",
              "g2_0", "g3_0", "classification", "valid"};
  for (const auto& r : rs) {
    if (r.valid) {
      t.add_row({num(r.g), num(r.omega_l), num(r.rate_1p_0), num(r.rate_1m_0), num(r.rate_1p_1m),
                 num(r.pop_0), num(r.pop_1m), num(r.pop_1p), num(r.g2), num(r.g3),
                 to_string(r.blockade), "1"});
    } else {
      t.add_row({num(r.g), num(r.omega_l), "nan", "nan", "nan", "nan", "nan", "nan", "nan", "nan",
                 "invalid", "0"});
    }
  }
  RunOutput out;
  out.files.emplace_back("coupling_sweep.csv", std::move(t));
  add_sweep_notes(out, rs);
  return out;
}

DelayPoint compute_delay_point(const RunConfig& cfg, const std::string& label, double g) {
  const PointModel m = build_point(cfg, g);
  const PeriodicState cycle = limit_cycle(m.gen, cycle_options(cfg));

  DelayPoint d;
  d.label = label;
  d.equal_time.g = g;
  d.equal_time.omega_l = m.params.omega_l;
  d.equal_time.periods = cycle.periods;
  const CorrelationResult g2_0 = g_equal_time(2, cycle, m.out);
  d.equal_time.g2 = g2_0.values.front();
  d.equal_time.g3 = g_equal_time(3, cycle, m.out).values.front();
  d.equal_time.denominator = g2_0.denominator;
  d.equal_time.valid = true;

  const std::vector<double> tau = linspace(0.0, cfg.tau_max / cfg.params.gamma_a, cfg.tau_points);
  const DelayOptions opts{cfg.phases, cfg.threads, kDenominatorFloor};
  d.g2 = g2_delay(m.gen, cycle, m.out, tau, opts);
  d.g3_diag = g3_delay(m.gen, cycle, m.out, tau, tau, G3Cut::diagonal, opts);
  d.g3_slice = g3_delay(m.gen, cycle, m.out, tau, tau, G3Cut::slice, opts);
  if (cfg.g3_map) d.g3_map = g3_delay_map(m.gen, cycle, m.out, tau, tau, opts);
  d.checks = evaluate_delay_checks(d.g2, d.g3_diag, d.g3_slice);
  d.blockade = classify_blockade(d.equal_time.g2, d.equal_time.g3, d.checks);
  d.equal_time.blockade = d.blockade;
  return d;
}

RunOutput run_delay_maps(const RunConfig& cfg) {
  RunOutput out;
  CsvTable summary;
  summary.comments = standard_comments(cfg, "delay-time criteria g2(tau)<g2(0), g3(tau,tau)>g3(0,0), "
                                            "g3(0,tau')>g3(0,0) over all tau>0 of the grid");
  summary.header = {"point", "g", "omega_l", "g2_0", "g3_0", "g2_tau_below", "g3_diag_above",
                    "g3_slice_above", "classification"};
  const double gamma = cfg.params.gamma_a;
  for (const auto& [label, g] : {std::pair<std::string, double>{"sc", cfg.sc_g}, {"usc", cfg.usc_g}}) {
    const DelayPoint d = compute_delay_point(cfg, label, g);
    const auto comments = standard_comments(cfg, label + " point g=" + num(g) + " omega_l=" + num(d.equal_time.omega_l));

    CsvTable g2;
    g2.comments = comments;
    g2.header = {"tau", "tau_gamma", "g2"};
    for (size_t i = 0; i < d.g2.values.size(); ++i) {
      g2.add_row({num(d.g2.tau[i]), num(d.g2.tau[i] * gamma), num(d.g2.values[i])});
    }
    CsvTable diag;
    diag.comments = comments;
    diag.header = {"tau", "tau_gamma", "g3_tau_tau"};
    for (size_t i = 0; i < d.g3_diag.values.size(); ++i) {
      diag.add_row({num(d.g3_diag.tau[i]), num(d.g3_diag.tau[i] * gamma), num(d.g3_diag.values[i])});
    }
    CsvTable slice;
    slice.comments = comments;
    slice.header = {"tau_prime", "tau_prime_gamma", "g3_0_tau_prime"};
    for (size_t i = 0; i < d.g3_slice.values.size(); ++i) {
      slice.add_row({num(d.g3_slice.tau_prime[i]), num(d.g3_slice.tau_prime[i] * gamma),
                     num(d.g3_slice.values[i])});
    }
    out.files.emplace_back("delay_" + label + "_g2.csv", std::move(g2));
    out.files.emplace_back("delay_" + label + "_g3_diag.csv", std::move(diag));
    out.files.emplace_back("delay_" + label + "_g3_slice.csv", std::move(slice));
    if (d.g3_map) {
      CsvTable map;
      map.comments = comments;
      map.header = {"tau", "tau_prime", "g3"};
      for (size_t i = 0; i < d.g3_map->values.size(); ++i) {
        map.add_row({num(d.g3_map->tau[i]), num(d.g3_map->tau_prime[i]), num(d.g3_map->values[i])});
      }
      out.files.emplace_back("delay_" + label + "_g3_map.csv", std::move(map));
    }
    summary.add_row({label, num(g), num(d.equal_time.omega_l), num(d.equal_time.g2), num(d.equal_time.g3),
                     d.checks.g2_below_zero_delay ? "1" : "0",
                     d.checks.g3_diagonal_above_zero_delay ? "1" : "0",
                     d.checks.g3_slice_above_zero_delay ? "1" : "0", to_string(d.blockade)});
    out.notes.push_back(label + ": limit cycle after " + std::to_string(d.equal_time.periods) + " periods");
  }
  out.files.emplace_back("delay_summary.csv", std::move(summary));
  return out;
}

ConvergenceReport convergence_report(const RunConfig& cfg) {
  ConvergenceReport rep;
  rep.limit = cfg.convergence_limit;

  const auto g2_at = [&](int n_cavity, int levels, int steps) {
    RunConfig c = cfg;
    c.n_cavity = n_cavity;
    c.dressed_levels = levels;
    c.steps_per_period = steps;
    c.lock_drive = cfg.lock_drive;
    const PointModel m = build_point(c, cfg.convergence_g);
    const PeriodicState cycle = limit_cycle(m.gen, cycle_options(c));
    return g_equal_time(2, cycle, m.out).values.front();
  };
  const auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };

  std::vector<int> truncations = cfg.convergence_truncations;
  std::sort(truncations.begin(), truncations.end());
  const int levels = cfg.dressed_levels;
  const int steps = cfg.steps_per_period;

  std::vector<double> values(truncations.size());
  parallel_for(static_cast<int>(truncations.size()), cfg.threads, [&](int i) {
    values[i] = g2_at(truncations[i], levels, steps);
  });
  const double reference = values.back();
  double baseline = std::numeric_limits<double>::quiet_NaN();
  for (size_t i = 0; i < truncations.size(); ++i) {
    ConvergenceEntry e;
    e.label = "n_cavity=" + std::to_string(truncations[i]);
    e.n_cavity = truncations[i];
    e.dressed_levels = levels;
    e.steps_per_period = steps;
    e.value = values[i];
    e.relative_deviation = rel(values[i], reference);
    e.checked = truncations[i] == cfg.n_cavity;
    if (truncations[i] == cfg.n_cavity) baseline = values[i];
    rep.entries.push_back(e);
  }
  if (std::isnan(baseline)) baseline = g2_at(cfg.n_cavity, levels, steps);

  const int more_levels = levels == 0 ? 0 : std::min(levels + 8, 2 * cfg.n_cavity);
  std::vector<std::pair<std::string, std::pair<int, int>>> extra = {
      {"steps_per_period=" + std::to_string(2 * steps), {levels, 2 * steps}}};
  if (levels != 0 && more_levels != levels) {
    extra.push_back({"dressed_levels=" + std::to_string(more_levels), {more_levels, steps}});
  }
  std::vector<double> extra_values(extra.size());
  parallel_for(static_cast<int>(extra.size()), cfg.threads, [&](int i) {
    extra_values[i] = g2_at(cfg.n_cavity, extra[i].second.first, extra[i].second.second);
  });
  for (size_t i = 0; i < extra.size(); ++i) {
    ConvergenceEntry e;
    e.label = extra[i].first;
    e.n_cavity = cfg.n_cavity;
    e.dressed_levels = extra[i].second.first;
    e.steps_per_period = extra[i].second.second;
    e.value = extra_values[i];
    e.relative_deviation = rel(extra_values[i], baseline);
    e.checked = true;
    rep.entries.push_back(e);
  }
  for (const auto& e : rep.entries) {
    if (e.checked && !(e.relative_deviation < rep.limit)) rep.passed = false;
  }
  return rep;
}

RunOutput run_convergence(const RunConfig& cfg) {
  const ConvergenceReport rep = convergence_report(cfg);
  CsvTable t;
  t.comments = standard_comments(cfg, "g2(0) at g=" + num(cfg.convergence_g) +
                                          "; truncation rows compare with the largest truncation, "
                                          "the other rows with n_cavity=" + std::to_string(cfg.n_cavity) +
                                          "; limit " + num(rep.limit));
  t.header = {"label", "n_cavity", "dressed_levels", "steps_per_period", "g2_0", "relative_deviation", "checked"};
  for (const auto& e : rep.entries) {
    t.add_row({e.label, std::to_string(e.n_cavity), std::to_string(e.dressed_levels),
               std::to_string(e.steps_per_period), num(e.value), num(e.relative_deviation),
               e.checked ? "1" : "0"});
  }
  RunOutput out;
  out.files.emplace_back("convergence.csv", std::move(t));
  out.ok = rep.passed;
  out.notes.push_back(rep.passed ? "convergence checks passed" : "convergence checks FAILED");
  return out;
}

namespace {

std::string plot_script(const std::vector<std::string>& csvs) {
  std::string s =
      "\"\"\"Quick-look plots for the CSV files of this run.\"\"\"\n"
      "import sys\n"
      "import numpy as np\n"
      "import matplotlib\n"
      "matplotlib.use('Agg')\n"
      "import matplotlib.pyplot as plt\n\n"
      "FILES = [\n";
  for (const auto& f : csvs) s += "    '" + f + "',\n";
  s +=
      "]\n\n"
      "for name in FILES:\n"
      "    with open(name) as fh:\n"
      "        lines = [l for l in fh if not l.startswith('#')]\n"
      "    header = lines[0].strip().split(',')\n"
      "    rows = [l.strip().split(',') for l in lines[1:]]\n"
      "    cols = []\n"
      "    for j in range(len(header)):\n"
      "        try:\n"
      "            cols.append(np.array([float(r[j]) for r in rows]))\n"
      "        except ValueError:\n"
      "            cols.append(None)\n"
      "    fig, ax = plt.subplots()\n"
      "    for j in range(1, len(header)):\n"
      "        if cols[j] is not None and not header[j].startswith('curve'):\n"
      "            ax.plot(cols[0], cols[j], label=header[j])\n"
      "    ax.set_xlabel(header[0])\n"
      "    ax.legend(fontsize='small')\n"
      "    fig.savefig(name.replace('.csv', '.png'), dpi=120)\n"
      "    plt.close(fig)\n";
  return s;
}

}  // namespace

void write_run(const std::filesystem::path& dir, const RunConfig& cfg, const RunOutput& run,
               const ManifestInfo& info) {
  nlohmann::json manifest;
  manifest["command"] = info.command;
  manifest["version"] = info.version;
  manifest["config"] = to_text(cfg);
  manifest["truncation"] = {{"n_cavity", cfg.n_cavity}, {"dressed_levels", cfg.dressed_levels}};
  manifest["convergence"] = run.notes;
  manifest["ok"] = run.ok;
  manifest["wall_clock_seconds"] = info.wall_seconds;

  std::vector<std::string> names;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& [name, table] : run.files) {
    const WrittenFile w = write_text_file(dir, name, render(table));
    files.push_back({{"file", w.name}, {"checksum_fnv1a64", w.checksum}});
    names.push_back(name);
  }
  const std::string script_name = "plot_" + info.command + ".py";
  const WrittenFile script = write_text_file(dir, script_name, plot_script(names));
  files.push_back({{"file", script.name}, {"checksum_fnv1a64", script.checksum}});
  manifest["outputs"] = files;
  write_text_file(dir, "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace pblock
