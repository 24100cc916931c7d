#include "pblock/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace pblock {

std::string to_string(DriveModel d) { return d == DriveModel::lab ? "lab" : "rwa"; }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not an integer");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean");
}

// shortest text that reads back to the same double
std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  Setter set;
  Getter get;
};

template <typename T>
Field real_field(T RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = to_double(k, v); },
          [member](const RunConfig& c) { return fmt(c.*member); }};
}

template <typename T>
Field int_field(T RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) { c.*member = to_int(k, v); },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

Field param_field(double SystemParams::*member) {
  return {[member](RunConfig& c, const std::string& k, const std::string& v) {
            c.params.*member = to_double(k, v);
          },
          [member](const RunConfig& c) { return fmt(c.params.*member); }};
}

// Ordered so to_text is stable.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"omega_c", param_field(&SystemParams::omega_c)},
      {"omega_g", param_field(&SystemParams::omega_g)},
      {"g", param_field(&SystemParams::g)},
      {"theta",
       {[](RunConfig& c, const std::string& k, const std::string& v) { c.params.theta = to_double(k, v) * kPi; },
        [](const RunConfig& c) { return fmt(c.params.theta / kPi); }}},
      {"gamma_a", param_field(&SystemParams::gamma_a)},
      {"gamma_sigma", param_field(&SystemParams::gamma_sigma)},
      {"Omega", param_field(&SystemParams::Omega)},
      {"omega_l",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v == "lock") {
            c.lock_drive = true;
          } else {
            c.params.omega_l = to_double(k, v);
            c.lock_drive = false;
          }
        },
        [](const RunConfig& c) { return c.lock_drive ? std::string("lock") : fmt(c.params.omega_l); }}},
      {"omega_0", param_field(&SystemParams::omega_0)},
      {"n_cavity", int_field(&RunConfig::n_cavity)},
      {"dressed_levels", int_field(&RunConfig::dressed_levels)},
      {"drive_model",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v == "lab") c.drive = DriveModel::lab;
          else if (v == "rwa") c.drive = DriveModel::rotating_wave;
          else throw ConfigError("config key '" + k + "': expected 'rwa' or 'lab', got '" + v + "'");
        },
        [](const RunConfig& c) { return to_string(c.drive); }}},
      {"tol", real_field(&RunConfig::tol)},
      {"max_periods", int_field(&RunConfig::max_periods)},
      {"samples", int_field(&RunConfig::samples)},
      {"steps_per_period", int_field(&RunConfig::steps_per_period)},
      {"phases", int_field(&RunConfig::phases)},
      {"spectrum_g_start", real_field(&RunConfig::spectrum_g_start)},
      {"spectrum_g_stop", real_field(&RunConfig::spectrum_g_stop)},
      {"spectrum_points", int_field(&RunConfig::spectrum_points)},
      {"spectrum_levels", int_field(&RunConfig::spectrum_levels)},
      {"drive_start", real_field(&RunConfig::drive_start)},
      {"drive_stop", real_field(&RunConfig::drive_stop)},
      {"drive_points", int_field(&RunConfig::drive_points)},
      {"coupling_start", real_field(&RunConfig::coupling_start)},
      {"coupling_stop", real_field(&RunConfig::coupling_stop)},
      {"coupling_points", int_field(&RunConfig::coupling_points)},
      {"sc_g", real_field(&RunConfig::sc_g)},
      {"usc_g", real_field(&RunConfig::usc_g)},
      {"tau_max", real_field(&RunConfig::tau_max)},
      {"tau_points", int_field(&RunConfig::tau_points)},
      {"g3_map",
       {[](RunConfig& c, const std::string& k, const std::string& v) { c.g3_map = to_bool(k, v); },
        [](const RunConfig& c) { return std::string(c.g3_map ? "true" : "false"); }}},
      {"convergence_truncations",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.convergence_truncations.clear();
          std::stringstream ss(v);
          std::string item;
          while (std::getline(ss, item, ',')) c.convergence_truncations.push_back(to_int(k, trim(item)));
          if (c.convergence_truncations.empty()) throw ConfigError("config key '" + k + "' is empty");
        },
        [](const RunConfig& c) {
          std::string s;
          for (size_t i = 0; i < c.convergence_truncations.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(c.convergence_truncations[i]);
          }
          return s;
        }}},
      {"convergence_g", real_field(&RunConfig::convergence_g)},
      {"convergence_limit", real_field(&RunConfig::convergence_limit)},
      {"threads", int_field(&RunConfig::threads)},
  };
  return table;
}

void validate(const RunConfig& c) {
  try {
    c.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.n_cavity < 2) throw ConfigError("n_cavity must be >= 2");
  if (c.dressed_levels < 0 || c.dressed_levels > 2 * c.n_cavity) {
    throw ConfigError("dressed_levels must lie in [0, 2 n_cavity]");
  }
  if (c.dressed_levels != 0 && c.dressed_levels < 3) throw ConfigError("dressed_levels must be >= 3");
  if (c.samples <= 0 || c.steps_per_period <= 0 || c.steps_per_period % c.samples != 0) {
    throw ConfigError("samples must divide steps_per_period");
  }
  if (c.phases <= 0 || c.samples % c.phases != 0) throw ConfigError("phases must divide samples");
  if (c.spectrum_points < 2 || c.drive_points < 2 || c.coupling_points < 2 || c.tau_points < 2) {
    throw ConfigError("sweeps need at least 2 points");
  }
  if (!(c.spectrum_g_start < c.spectrum_g_stop) || !(c.drive_start < c.drive_stop) ||
      !(c.coupling_start < c.coupling_stop)) {
    throw ConfigError("sweep start must be below stop");
  }
  if (!(c.drive_start > 0.0)) throw ConfigError("drive_start must be > 0");
  if (!(c.tau_max > 0.0)) throw ConfigError("tau_max must be > 0");
  if (!(c.tol > 0.0)) throw ConfigError("tol must be > 0");
  if (c.max_periods < 2) throw ConfigError("max_periods must be >= 2");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (c.spectrum_levels < 1 || c.spectrum_levels > 2 * c.n_cavity) {
    throw ConfigError("spectrum_levels must lie in [1, 2 n_cavity]");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::map<std::string, const Field*> lookup;
  for (const auto& [name, field] : fields()) lookup[name] = &field;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = lookup.find(key);
    if (it == lookup.end()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (value.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty value");
    it->second->set(c, key, value);
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const RunConfig& c) {
  std::string out;
  for (const auto& [name, field] : fields()) out += name + " = " + field.get(c) + "\n";
  return out;
}

std::string parameter_line(const RunConfig& c) {
  std::string out;
  for (const auto& [name, field] : fields()) {
    if (!out.empty()) out += ";";
    out += name + "=" + field.get(c);
  }
  return out;
}

}  // namespace pblock
