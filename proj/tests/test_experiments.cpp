#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pblock/experiments.hpp"

using namespace pblock;

namespace {

RunConfig small_config(const std::string& extra = "") {
  return parse_config(
      "n_cavity = 6\n"
      "dressed_levels = 8\n"
      "gamma_a = 0.05\n"
      "gamma_sigma = 0.05\n"
      "Omega = 0.005\n"
      "tol = 1e-10\n"
      "spectrum_points = 11\n"
      "spectrum_g_stop = 0.1\n"
      "drive_start = 0.9\n"
      "drive_stop = 1.1\n"
      "drive_points = 3\n"
      "coupling_start = 0.1\n"
      "coupling_stop = 0.5\n"
      "coupling_points = 3\n"
      "tau_max = 2\n"
      "tau_points = 3\n"
      "convergence_g = 0.3\n"
      "convergence_truncations = 6,8\n" +
      extra);
}

double cell(const CsvTable& t, size_t row, const std::string& column) {
  for (size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == column) return std::stod(t.rows.at(row).at(i));
  FAIL("missing column " << column);
  return 0.0;
}

const CsvTable& file(const RunOutput& out, const std::string& name) {
  for (const auto& [n, t] : out.files)
    if (n == name) return t;
  throw std::runtime_error("missing output " + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("linspace and sweep specs") {
  const std::vector<double> v = linspace(0.0, 1.0, 5);
  CHECK(v.size() == 5);
  CHECK(v.front() == 0.0);
  CHECK(v.back() == 1.0);
  CHECK(v[2] == doctest::Approx(0.5));
  CHECK_THROWS_AS(linspace(0.0, 1.0, 1), std::invalid_argument);

  const RunConfig cfg = small_config();
  const SweepSpec d = drive_sweep_spec(cfg);
  CHECK(d.axis == SweepAxis::drive_frequency);
  CHECK_FALSE(d.resonance_lock);
  CHECK(d.values().size() == 3);
  const SweepSpec c = coupling_sweep_spec(cfg);
  CHECK(c.axis == SweepAxis::coupling_strength);
  CHECK(c.resonance_lock);

  SweepSpec bad = c;
  bad.start = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = d;
  bad.start = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = d;
  bad.points = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = d;
  bad.stop = bad.start;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(run_drive_sweep(c), std::invalid_argument);
  CHECK_THROWS_AS(run_coupling_sweep(d), std::invalid_argument);
}

TEST_CASE("operating point") {
  const RunConfig cfg = small_config();
  const PointModel m = build_point(cfg, 0.3);
  CHECK(m.params.omega_l == transition_energy(m.eig, kGround, kUpperPolariton));
  CHECK(m.gen.dim() == 8);
  CHECK(m.out.dim() == 8);
  CHECK(build_point(cfg, 0.3, 0.95).params.omega_l == 0.95);
  CHECK(build_point(small_config("dressed_levels = 0\n"), 0.3).out.dim() == 12);

  const PointResult r = solve_point(cfg, 0.3);
  CHECK(r.valid);
  CHECK(r.error.empty());
  CHECK(r.periods > 0);
  CHECK(r.pop_0 + r.pop_1m + r.pop_1p <= 1.0 + 1e-12);
  CHECK(r.pop_0 > 0.9);
  CHECK(r.rate_1p_0 > 0.0);
  CHECK(r.g2 > 0.0);
  CHECK(r.blockade == classify_blockade(r.g2, r.g3, std::nullopt));

  const PointResult failed = solve_point(small_config("max_periods = 2\n"), 0.3);
  CHECK_FALSE(failed.valid);
  CHECK(failed.error.find("periods") != std::string::npos);
}

TEST_CASE("spectrum") {
  const RunOutput out = run_spectrum(small_config("n_cavity = 10\n"));
  const CsvTable& t = file(out, "spectrum.csv");
  CHECK(t.rows.size() == 11);
  CHECK(t.header.front() == "g");
  CHECK(t.header[1] == "E0");
  CHECK_FALSE(t.comments.empty());
  // bare ladder at g = 0
  CHECK(cell(t, 0, "E0") == doctest::Approx(0.0));
  CHECK(cell(t, 0, "E1") == doctest::Approx(1.0));
  CHECK(cell(t, 0, "E2") == doctest::Approx(1.0));
  CHECK(cell(t, 0, "E3") == doctest::Approx(2.0));
  // vacuum Rabi splitting at weak coupling
  const double g = cell(t, 1, "g");
  const double split = cell(t, 1, "E2") - cell(t, 1, "E1");
  CHECK(std::abs(split / (2.0 * g * std::sin(0.3 * kPi)) - 1.0) < 0.1);
  for (size_t r = 0; r < t.rows.size(); ++r)
    for (int j = 1; j < 8; ++j)
      CHECK(cell(t, r, "E" + std::to_string(j)) >= cell(t, r, "E" + std::to_string(j - 1)));

  CHECK_THROWS_AS(run_spectrum(small_config("n_cavity = 3\ndressed_levels = 6\nspectrum_levels = 6\nspectrum_g_stop = 0.8\n")),
                  ConvergenceError);
}

TEST_CASE("sweeps") {
  const RunConfig cfg = small_config();
  const RunOutput drive = run_drive_sweep(drive_sweep_spec(cfg));
  const CsvTable& d = file(drive, "drive_sweep.csv");
  CHECK(d.rows.size() == 3);
  CHECK(cell(d, 1, "omega_l") == doctest::Approx(1.0));
  for (size_t r = 0; r < d.rows.size(); ++r) CHECK(cell(d, r, "valid") == 1.0);
  CHECK(drive.ok);

  const RunOutput coupling = run_coupling_sweep(coupling_sweep_spec(cfg));
  const CsvTable& c = file(coupling, "coupling_sweep.csv");
  CHECK(c.rows.size() == 3);
  for (size_t r = 0; r < c.rows.size(); ++r) {
    const PointModel m = build_point(cfg, cell(c, r, "g"));
    CHECK(cell(c, r, "omega_l") == doctest::Approx(m.params.omega_l).epsilon(1e-11));
  }
  CHECK(cell(c, 2, "Gamma_1p_1m") > cell(c, 0, "Gamma_1p_1m"));

  const RunOutput broken = run_coupling_sweep(coupling_sweep_spec(small_config("max_periods = 2\n")));
  const CsvTable& b = file(broken, "coupling_sweep.csv");
  CHECK(b.rows.size() == 3);
  for (size_t r = 0; r < b.rows.size(); ++r) {
    CHECK(cell(b, r, "valid") == 0.0);
    CHECK(b.rows[r][10] == "invalid");
  }
  CHECK_FALSE(broken.ok);
}

TEST_CASE("delay maps") {
  const RunOutput out = run_delay_maps(small_config("sc_g = 0.1\nusc_g = 0.4\n"));
  const CsvTable& summary = file(out, "delay_summary.csv");
  CHECK(summary.rows.size() == 2);
  for (const std::string label : {"sc", "usc"}) {
    const size_t row = label == "sc" ? 0 : 1;
    CHECK(summary.rows[row][0] == label);
    const CsvTable& g2 = file(out, "delay_" + label + "_g2.csv");
    const CsvTable& diag = file(out, "delay_" + label + "_g3_diag.csv");
    const CsvTable& slice = file(out, "delay_" + label + "_g3_slice.csv");
    CHECK(g2.rows.size() == 3);
    CHECK(cell(g2, 0, "tau") == 0.0);
    CHECK(cell(g2, 2, "tau_gamma") == doctest::Approx(2.0));
    const double g2_0 = cell(summary, row, "g2_0");
    const double g3_0 = cell(summary, row, "g3_0");
    CHECK(std::abs(cell(g2, 0, "g2") / g2_0 - 1.0) < 1e-6);
    CHECK(std::abs(cell(diag, 0, "g3_tau_tau") / g3_0 - 1.0) < 1e-6);
    CHECK(std::abs(cell(slice, 0, "g3_0_tau_prime") / g3_0 - 1.0) < 1e-6);
  }
  bool has_map = false;
  for (const auto& [name, t] : out.files) has_map |= name.find("g3_map") != std::string::npos;
  CHECK_FALSE(has_map);
}

TEST_CASE("convergence report") {
  const ConvergenceReport rep = convergence_report(small_config());
  CHECK(rep.limit == 1e-3);
  CHECK(rep.entries.size() >= 3);
  bool dt_entry = false;
  for (const ConvergenceEntry& e : rep.entries) {
    CHECK(e.value > 0.0);
    CHECK(e.relative_deviation >= 0.0);
    if (e.steps_per_period == 512) {
      dt_entry = true;
      CHECK(e.relative_deviation < 1e-4);
    }
  }
  CHECK(dt_entry);
  CHECK(rep.entries[0].n_cavity == 6);
  CHECK(rep.entries[0].checked);
  CHECK(rep.entries[1].n_cavity == 8);
  CHECK(rep.entries[1].relative_deviation == 0.0);
  CHECK(rep.passed);

  const ConvergenceReport bare = convergence_report(small_config("convergence_g = 0\n"));
  for (const ConvergenceEntry& e : bare.entries)
    if (e.label.rfind("n_cavity", 0) == 0) CHECK(e.relative_deviation < 1e-9);
}

TEST_CASE("written runs are deterministic and checksummed") {
  const RunConfig cfg = small_config();
  const auto root = std::filesystem::temp_directory_path() / "pblock_experiments_test";
  std::filesystem::remove_all(root);
  const ManifestInfo info{"coupling-sweep", kVersion, 1.5};
  write_run(root / "a", cfg, run_coupling_sweep(coupling_sweep_spec(cfg)), info);
  write_run(root / "b", cfg, run_coupling_sweep(coupling_sweep_spec(cfg)), info);

  const std::string csv_a = slurp(root / "a" / "coupling_sweep.csv");
  CHECK_FALSE(csv_a.empty());
  CHECK(csv_a == slurp(root / "b" / "coupling_sweep.csv"));
  CHECK(std::filesystem::exists(root / "a" / "plot_coupling-sweep.py"));

  const nlohmann::json manifest = nlohmann::json::parse(slurp(root / "a" / "manifest.json"));
  CHECK(manifest["command"] == "coupling-sweep");
  CHECK(manifest["version"] == kVersion);
  CHECK(manifest["ok"] == true);
  CHECK(manifest["wall_clock_seconds"] == 1.5);
  CHECK(manifest["truncation"]["n_cavity"] == 6);
  CHECK(parse_config(manifest["config"].get<std::string>()).n_cavity == 6);
  CHECK(manifest["outputs"].size() == 2);
  for (const auto& o : manifest["outputs"]) {
    const std::string name = o["file"];
    CHECK(o["checksum_fnv1a64"] == checksum_hex(slurp(root / "a" / name)));
  }
  std::filesystem::remove_all(root);
}
