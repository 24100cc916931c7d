#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pblock/dressed_jumps.hpp"

namespace pblock {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything a run needs. Text form is one `key = value` per line, `#`
// comments, frequencies in units of omega_c, angles in units of pi, delays in
// units of 1/gamma_a. Unknown keys are errors.
struct RunConfig {
  SystemParams params = SystemParams::operating_point(0.08);  // g drives the drive sweep
  bool lock_drive = true;  // omega_l = E_{1+,0} unless omega_l is given

  int n_cavity = 14;
  int dressed_levels = 12;  // 0 keeps every dressed state
  DriveModel drive = DriveModel::lab;

  double tol = 1e-9;
  int max_periods = 20000;
  int samples = 64;
  int steps_per_period = 256;
  int phases = 16;

  // spectrum
  double spectrum_g_start = 0.0;
  double spectrum_g_stop = 0.8;
  int spectrum_points = 161;
  int spectrum_levels = 8;

  // drive-frequency sweep
  double drive_start = 0.5;
  double drive_stop = 1.5;
  int drive_points = 241;

  // coupling sweep (resonance locked)
  double coupling_start = 0.0;
  double coupling_stop = 0.8;
  int coupling_points = 81;

  // delay maps
  double sc_g = 0.08;
  double usc_g = 0.6;
  double tau_max = 8.0;  // in units of 1/gamma_a
  int tau_points = 64;
  bool g3_map = false;

  // convergence
  std::vector<int> convergence_truncations = {10, 14, 19};
  double convergence_g = 0.6;
  double convergence_limit = 1e-3;

  int threads = 1;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const RunConfig& c);

// Single-line `key=value;...` summary of the physical parameters.
std::string parameter_line(const RunConfig& c);

std::string to_string(DriveModel d);

}  // namespace pblock
