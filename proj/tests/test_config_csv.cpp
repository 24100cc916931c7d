#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pblock/config.hpp"
#include "pblock/csv.hpp"

using namespace pblock;

TEST_CASE("config defaults") {
  const RunConfig c = parse_config("");
  CHECK(c.params.g == 0.08);
  CHECK(c.params.theta == doctest::Approx(0.3 * kPi));
  CHECK(c.params.gamma_a == 1e-2);
  CHECK(c.params.Omega == doctest::Approx(1e-3));
  CHECK(c.lock_drive);
  CHECK(c.drive == DriveModel::lab);
  CHECK(c.n_cavity == 14);
  CHECK(c.tau_points == 64);
  CHECK(c.tau_max == 8.0);
}

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(
      "# comment\n"
      "g = 0.6   # trailing\n"
      "\n"
      "theta=0.5\n"
      "omega_l = 1.25\n"
      "drive_model = rwa\n"
      "convergence_truncations = 8, 12\n"
      "g3_map = yes\n"
      "threads = 3\n");
  CHECK(c.params.g == 0.6);
  CHECK(c.params.theta == doctest::Approx(0.5 * kPi));
  CHECK(c.params.omega_l == 1.25);
  CHECK_FALSE(c.lock_drive);
  CHECK(c.drive == DriveModel::rotating_wave);
  CHECK(c.convergence_truncations == std::vector<int>{8, 12});
  CHECK(c.g3_map);
  CHECK(c.threads == 3);
  CHECK(parse_config("omega_l = lock").lock_drive);
}

TEST_CASE("config errors") {
  const auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("g = 0.1\nbogus_key = 2\n").find("line 2: unknown key 'bogus_key'") != std::string::npos);
  CHECK(message("g 0.1").find("expected 'key = value'") != std::string::npos);
  CHECK(message("g = ").find("empty value") != std::string::npos);
  CHECK(message("g = abc").find("not a number") != std::string::npos);
  CHECK(message("n_cavity = 3.5").find("not an integer") != std::string::npos);
  CHECK(message("g3_map = maybe").find("not a boolean") != std::string::npos);
  CHECK(message("drive_model = exact").find("expected 'rwa' or 'lab'") != std::string::npos);
  CHECK_FALSE(message("theta = 1.0").empty());
  CHECK_FALSE(message("gamma_a = 0").empty());
  CHECK_FALSE(message("g = -0.1").empty());
  CHECK_FALSE(message("samples = 60").empty());
  CHECK_FALSE(message("phases = 5").empty());
  CHECK_FALSE(message("n_cavity = 4\ndressed_levels = 12").empty());
  CHECK_FALSE(message("dressed_levels = 2").empty());
  CHECK_FALSE(message("tau_points = 1").empty());
  CHECK_FALSE(message("drive_start = 2\ndrive_stop = 1").empty());
  CHECK_FALSE(message("threads = 0").empty());
  CHECK_FALSE(message("convergence_truncations = ,").empty());
  CHECK(message("dressed_levels = 0").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), ConfigError);
}

TEST_CASE("config text round trip") {
  RunConfig c = parse_config("g = 0.37\ntheta = 0.3\nomega_l = 0.987654321\nn_cavity = 9\ndressed_levels = 0\n");
  const std::string text = to_text(c);
  const RunConfig back = parse_config(text);
  CHECK(to_text(back) == text);
  CHECK(back.params.g == c.params.g);
  CHECK(back.params.omega_l == c.params.omega_l);
  CHECK(back.params.theta == doctest::Approx(c.params.theta).epsilon(1e-15));
  CHECK(back.n_cavity == 9);
  CHECK(back.dressed_levels == 0);
  CHECK(parameter_line(c).find("g=0.37;") != std::string::npos);
  CHECK(parameter_line(c).find('\n') == std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "pblock_config_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "run.cfg") << text;
  CHECK(to_text(load_config((dir / "run.cfg").string())) == text);
  std::filesystem::remove_all(dir);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(2.0 / 3.0 * 1e-7) == "6.66666666667e-08");
  CHECK(format_number(123456789012345.0) == "1.23456789012e+14");
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-2.5) == "-2.5");
}

TEST_CASE("csv render and parse") {
  CsvTable t;
  t.comments = {"params g=0.1", "second"};
  t.header = {"x", "y", "label"};
  t.add_row({"1", "2.5", "1PB"});
  t.add_row({"3", "", "none"});
  CHECK_THROWS_AS(t.add_row({"1"}), std::invalid_argument);
  const std::string text = render(t);
  CHECK(text == "# params g=0.1\n# second\nx,y,label\n1,2.5,1PB\n3,,none\n");
  const CsvTable back = parse_csv(text);
  CHECK(back.comments == t.comments);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);

  CsvTable trailing;
  trailing.header = {"a", "b"};
  trailing.add_row({"1", ""});
  CHECK(parse_csv(render(trailing)).rows == trailing.rows);
}

TEST_CASE("checksums and file output") {
  // FNV-1a 64 reference values
  CHECK(checksum_hex("") == "cbf29ce484222325");
  CHECK(checksum_hex("a") == "af63dc4c8601ec8c");
  CHECK(checksum_hex("foobar") == "85944171f73967e8");

  const auto dir = std::filesystem::temp_directory_path() / "pblock_csv_test" / "nested";
  const WrittenFile f = write_text_file(dir, "t.csv", "x\n1\n");
  CHECK(f.name == "t.csv");
  CHECK(f.checksum == checksum_hex("x\n1\n"));
  std::ifstream in(dir / "t.csv", std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "x\n1\n");
  std::filesystem::remove_all(dir.parent_path());
}
