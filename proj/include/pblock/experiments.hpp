#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pblock/config.hpp"
#include "pblock/correlations.hpp"
#include "pblock/csv.hpp"
#include "pblock/rwa_steady_state.hpp"

namespace pblock {

// Everything needed to simulate one (g, omega_l) operating point.
struct PointModel {
  SystemParams params;  // omega_l already locked when requested
  EigenSystem eig;
  std::vector<JumpSet> jumps;
  Generator gen;
  PolaritonOutput out;
};

// Builds the model at coupling g. omega_l: explicit value, else the config's
// omega_l, else (lock) E_{1+,0}(g).
PointModel build_point(const RunConfig& cfg, double g, std::optional<double> omega_l = std::nullopt);

LimitCycleOptions cycle_options(const RunConfig& cfg);

struct PointResult {
  double g = 0.0;
  double omega_l = 0.0;
  double rate_1p_0 = 0.0;   // Gamma_{1+,0}, both channels
  double rate_1m_0 = 0.0;   // Gamma_{1-,0}
  double rate_1p_1m = 0.0;  // Gamma_{1+,1-}
  double pop_0 = 0.0, pop_1m = 0.0, pop_1p = 0.0;
  double g2 = 0.0, g3 = 0.0, denominator = 0.0;
  int periods = 0;
  Blockade blockade = Blockade::none;
  bool valid = false;
  std::string error;
};

// Limit cycle plus equal-time statistics. Solver failures are captured in
// `error` with valid = false.
PointResult solve_point(const RunConfig& cfg, double g, std::optional<double> omega_l = std::nullopt);

enum class SweepAxis { drive_frequency, coupling_strength };

struct SweepSpec {
  SweepAxis axis;
  double start;
  double stop;
  int points;
  RunConfig fixed;
  bool resonance_lock;

  void validate() const;
  std::vector<double> values() const;
};

SweepSpec drive_sweep_spec(const RunConfig& cfg);
SweepSpec coupling_sweep_spec(const RunConfig& cfg);

struct RunOutput {
  std::vector<std::pair<std::string, CsvTable>> files;
  std::vector<std::string> notes;
  bool ok = true;
};

std::vector<double> linspace(double start, double stop, int points);

RunOutput run_spectrum(const RunConfig& cfg);
RunOutput run_drive_sweep(const SweepSpec& spec);
RunOutput run_coupling_sweep(const SweepSpec& spec);

struct DelayPoint {
  std::string label;
  PointResult equal_time;
  CorrelationResult g2, g3_diag, g3_slice;
  std::optional<CorrelationResult> g3_map;
  DelayChecks checks;
  Blockade blockade = Blockade::none;
};

// Equal-time and delay statistics at one coupling on the default delay grid.
DelayPoint compute_delay_point(const RunConfig& cfg, const std::string& label, double g);

RunOutput run_delay_maps(const RunConfig& cfg);

struct ConvergenceEntry {
  std::string label;
  int n_cavity = 0;
  int dressed_levels = 0;
  int steps_per_period = 0;
  double value = 0.0;
  double relative_deviation = 0.0;  // against the reference entry
  bool checked = false;             // counts toward pass/fail
};

struct ConvergenceReport {
  std::vector<ConvergenceEntry> entries;
  double limit = 0.0;
  bool passed = true;
};

// g2(0) at cfg.convergence_g across truncations, dressed-level cutoffs and a
// halved time step. The reference is the largest truncation.
ConvergenceReport convergence_report(const RunConfig& cfg);

RunOutput run_convergence(const RunConfig& cfg);

struct ManifestInfo {
  std::string command;
  std::string version;
  double wall_seconds = 0.0;
};

// Writes every CSV, a plotting helper script and manifest.json under `dir`.
void write_run(const std::filesystem::path& dir, const RunConfig& cfg, const RunOutput& run,
               const ManifestInfo& info);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pblock
