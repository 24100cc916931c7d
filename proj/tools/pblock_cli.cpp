#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pblock/experiments.hpp"

namespace {

struct Common {
  std::string config;
  std::string out = "out";
  int threads = 0;
  int truncation = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "config file (key = value lines)");
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--threads", c.threads, "worker threads (default: PBLOCK_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--truncation", c.truncation, "cavity Fock truncation n_cavity")
      ->check(CLI::Range(2, 1000));
}

pblock::RunConfig resolve(const Common& c) {
  pblock::RunConfig cfg = c.config.empty() ? pblock::parse_config("") : pblock::load_config(c.config);
  if (const char* env = std::getenv("PBLOCK_THREADS")) {
    try {
      cfg.threads = std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw pblock::ConfigError(std::string("PBLOCK_THREADS: '") + env + "' is not an integer");
    }
  }
  if (c.threads > 0) cfg.threads = c.threads;
  if (c.truncation > 0) {
    cfg.n_cavity = c.truncation;
    if (cfg.dressed_levels > 2 * cfg.n_cavity) cfg.dressed_levels = 2 * cfg.n_cavity;
    if (cfg.spectrum_levels > 2 * cfg.n_cavity) cfg.spectrum_levels = 2 * cfg.n_cavity;
  }
  return pblock::parse_config(pblock::to_text(cfg));
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const pblock::ConfigError*>(&e)) return "config";
  if (dynamic_cast<const pblock::ConvergenceError*>(&e)) return "convergence";
  if (dynamic_cast<const pblock::IntegrationError*>(&e)) return "integration";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid_argument";
  return "runtime";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polariton blockade simulations in the generalized Rabi model"};
  app.set_version_flag("--version", pblock::kVersion);
  app.require_subcommand(1);

  Common common;
  auto* spectrum = app.add_subcommand("spectrum", "dressed energies versus g");
  auto* drive = app.add_subcommand("drive-sweep", "equal-time g2, g3 versus drive frequency");
  auto* coupling = app.add_subcommand("coupling-sweep", "rates, populations and g2, g3 versus g");
  auto* delay = app.add_subcommand("delay-maps", "delay-time correlations at the SC and USC points");
  auto* converge = app.add_subcommand("converge", "truncation and time-step convergence report");
  for (auto* cmd : {spectrum, drive, coupling, delay, converge}) add_common(cmd, common);

  CLI11_PARSE(app, argc, argv);

  std::string command;
  try {
    const auto start = std::chrono::steady_clock::now();
    const pblock::RunConfig cfg = resolve(common);
    pblock::RunOutput run;
    if (*spectrum) {
      command = "spectrum";
      run = pblock::run_spectrum(cfg);
    } else if (*drive) {
      command = "drive-sweep";
      run = pblock::run_drive_sweep(pblock::drive_sweep_spec(cfg));
    } else if (*coupling) {
      command = "coupling-sweep";
      run = pblock::run_coupling_sweep(pblock::coupling_sweep_spec(cfg));
    } else if (*delay) {
      command = "delay-maps";
      run = pblock::run_delay_maps(cfg);
    } else {
      command = "converge";
      run = pblock::run_convergence(cfg);
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    pblock::write_run(common.out, cfg, run, {command, pblock::kVersion, wall});
    for (const auto& n : run.notes) std::cerr << n << "\n";
    for (const auto& [name, table] : run.files) {
      std::cout << (std::filesystem::path(common.out) / name).string() << "\n";
    }
    if (!run.ok) {
      std::cerr << "error: kind=check_failed command=" << command << " message=\"see manifest.json\"\n";
      return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: kind=" << error_kind(e) << " command=" << command << " message=\"" << e.what()
              << "\"\n";
    return 2;
  }
  return 0;
}
