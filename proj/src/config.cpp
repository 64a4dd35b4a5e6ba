#include "tdks/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "tdks/potentials.hpp"

namespace tdks {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_real(const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError("expected a real number, got '" + text + "'");
  }
  return value;
}

long long parse_integer(const std::string& text) {
  long long value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("expected an integer, got '" + text + "'");
  }
  return value;
}

int parse_int(const std::string& text) {
  const long long v = parse_integer(text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError("integer out of range: '" + text + "'");
  }
  return static_cast<int>(v);
}

bool parse_bool(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError("expected true or false, got '" + text + "'");
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, Parse parse) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty entry in list '" + text + "'");
    out.push_back(parse(item));
  }
  return out;
}

// Shortest representation that parses back to the same double.
std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T, typename Format>
std::string format_list(const std::vector<T>& values, Format format) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += format(values[i]);
  }
  return out;
}

std::string format_int(long long v) { return std::to_string(v); }

struct Entry {
  std::string section;  // empty for top level
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;

  std::string name() const { return section.empty() ? key : section + "." + key; }
};

#define TDKS_REAL(sec, key, member)                                          \
  Entry{sec, key, [](ExperimentConfig& c, const std::string& v) { c.member = parse_real(v); }, \
        [](const ExperimentConfig& c) { return format_real(c.member); }}
#define TDKS_INT(sec, key, member)                                           \
  Entry{sec, key, [](ExperimentConfig& c, const std::string& v) { c.member = parse_int(v); }, \
        [](const ExperimentConfig& c) { return format_int(c.member); }}
#define TDKS_BOOL(sec, key, member)                                          \
  Entry{sec, key, [](ExperimentConfig& c, const std::string& v) { c.member = parse_bool(v); }, \
        [](const ExperimentConfig& c) { return std::string(c.member ? "true" : "false"); }}
#define TDKS_STRING(sec, key, member)                                        \
  Entry{sec, key, [](ExperimentConfig& c, const std::string& v) { c.member = v; }, \
        [](const ExperimentConfig& c) { return c.member; }}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      TDKS_STRING("", "experiment", experiment),

      TDKS_INT("grid", "dim", grid.dim),
      TDKS_REAL("grid", "L", grid.extent),
      TDKS_INT("grid", "M", grid.points),

      TDKS_REAL("time", "T", time.horizon),
      TDKS_INT("time", "K", time.steps),

      TDKS_REAL("weights", "beta", weights.beta),
      TDKS_REAL("weights", "eta", weights.eta),
      TDKS_REAL("weights", "nu", weights.nu),
      TDKS_REAL("weights", "a", weights.h1_weight),

      TDKS_STRING("model", "potential", model.potential),
      TDKS_STRING("model", "control", model.control),
      TDKS_BOOL("model", "hartree", model.hartree),
      TDKS_STRING("model", "hartree_quadrature", model.hartree_quadrature),
      TDKS_BOOL("model", "exchange", model.exchange),
      TDKS_BOOL("model", "correlation", model.correlation),
      TDKS_REAL("model", "exchange_cutoff", model.exchange_cutoff),
      TDKS_REAL("model", "correlation_limit", model.correlation_limit),
      TDKS_REAL("model", "correlation_scale", model.correlation_scale),
      TDKS_INT("model", "electrons", model.electrons),
      TDKS_STRING("model", "occupation", model.occupation),
      TDKS_STRING("model", "initial_state", model.initial_state),
      TDKS_REAL("model", "ground_tolerance", model.ground_tolerance),
      Entry{"model", "coherent_x1",
            [](ExperimentConfig& c, const std::string& v) {
              c.model.coherent_x1 = parse_list<double>(v, parse_real);
            },
            [](const ExperimentConfig& c) { return format_list(c.model.coherent_x1, format_real); }},
      Entry{"model", "coherent_x2",
            [](ExperimentConfig& c, const std::string& v) {
              c.model.coherent_x2 = parse_list<double>(v, parse_real);
            },
            [](const ExperimentConfig& c) { return format_list(c.model.coherent_x2, format_real); }},

      TDKS_REAL("target", "amplitude", target.amplitude),

      TDKS_INT("optimizer", "max_iterations", optimizer.max_iterations),
      TDKS_REAL("optimizer", "tolerance", optimizer.gradient_tolerance),
      TDKS_REAL("optimizer", "c1", optimizer.c1),
      TDKS_REAL("optimizer", "c2", optimizer.c2),
      TDKS_INT("optimizer", "line_search_trials", optimizer.max_line_search_trials),
      TDKS_REAL("optimizer", "hz_eta", optimizer.hz_eta),
      TDKS_REAL("optimizer", "initial_step", optimizer.initial_step),
      TDKS_BOOL("optimizer", "steepest_descent", optimizer.steepest_descent),
      TDKS_REAL("optimizer", "value_noise", optimizer.value_noise),
      TDKS_REAL("optimizer", "secant_refinement", optimizer.secant_refinement),

      TDKS_REAL("convergence", "T", convergence.horizon),
      TDKS_REAL("convergence", "amplitude", convergence.amplitude),
      TDKS_REAL("convergence", "dt0", convergence.dt0),
      TDKS_INT("convergence", "rungs", convergence.rungs),
      TDKS_INT("convergence", "reference_factor", convergence.reference_factor),
      TDKS_INT("convergence", "temporal_M", convergence.temporal_points),
      Entry{"convergence", "spatial_M",
            [](ExperimentConfig& c, const std::string& v) {
              c.convergence.spatial_points = parse_list<int>(v, parse_int);
            },
            [](const ExperimentConfig& c) {
              return format_list(c.convergence.spatial_points, format_int);
            }},
      TDKS_INT("convergence", "spatial_reference_M", convergence.spatial_reference_points),
      TDKS_REAL("convergence", "spatial_dt", convergence.spatial_dt),
      TDKS_REAL("convergence", "floor", convergence.floor),
      TDKS_STRING("convergence", "cache_dir", convergence.cache_dir),

      Entry{"sweep", "nu",
            [](ExperimentConfig& c, const std::string& v) {
              c.sweep.nus = parse_list<double>(v, parse_real);
            },
            [](const ExperimentConfig& c) { return format_list(c.sweep.nus, format_real); }},

      TDKS_INT("gradcheck", "samples", gradcheck.samples),
      TDKS_REAL("gradcheck", "epsilon", gradcheck.epsilon),
      TDKS_INT("gradcheck", "modes", gradcheck.modes),
      Entry{"gradcheck", "seed",
            [](ExperimentConfig& c, const std::string& v) {
              const long long s = parse_integer(v);
              if (s < 0 || s > 0xffffffffLL) throw ConfigError("seed out of range");
              c.gradcheck.seed = static_cast<unsigned>(s);
            },
            [](const ExperimentConfig& c) { return format_int(c.gradcheck.seed); }},
      TDKS_REAL("gradcheck", "base_amplitude", gradcheck.base_amplitude),
      TDKS_REAL("gradcheck", "tolerance", gradcheck.tolerance),

      TDKS_INT("output", "snapshot_stride", output.snapshot_stride),
  };
  return table;
}

#undef TDKS_REAL
#undef TDKS_INT
#undef TDKS_BOOL
#undef TDKS_STRING

const Entry* find_entry(const std::string& name) {
  for (const auto& e : entries()) {
    if (e.name() == name) return &e;
  }
  return nullptr;
}

struct Assignment {
  std::string name;
  std::string value;
  std::string origin;  // "line N" or "override"
};

std::vector<Assignment> read_assignments(std::string_view text) {
  std::vector<Assignment> out;
  std::map<std::string, int> seen;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": missing key");
    const std::string name = section.empty() ? key : section + "." + key;
    if (find_entry(name) == nullptr) {
      throw ConfigError(where + ": unknown key '" + name + "'");
    }
    if (auto it = seen.find(name); it != seen.end()) {
      throw ConfigError(where + ": duplicate key '" + name + "' (first set on line " +
                        std::to_string(it->second) + ")");
    }
    seen[name] = line_no;
    out.push_back({name, value, where});
  }
  return out;
}

Assignment read_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + text + "': expected section.key=value");
  }
  Assignment a{trim(std::string_view(text).substr(0, eq)),
               trim(std::string_view(text).substr(eq + 1)), "override"};
  if (find_entry(a.name) == nullptr) {
    throw ConfigError("override: unknown key '" + a.name + "'");
  }
  return a;
}

void apply(ExperimentConfig& config, const Assignment& a) {
  try {
    find_entry(a.name)->set(config, a.value);
  } catch (const ConfigError& e) {
    throw ConfigError(a.origin + ": " + a.name + ": " + e.what());
  }
}

void require(bool ok, const std::string& constraint) {
  if (!ok) throw ConfigError("constraint violated: " + constraint);
}

}  // namespace

ExperimentConfig preset_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "tracking" || experiment == "custom") return c;
  if (experiment == "convergence") {
    // Displaced coherent states give a state that actually moves.
    c.model.initial_state = "coherent";
    return c;
  }
  if (experiment == "doublewell") {
    // The quartic's minima sit at x1 = -3.68 and 2.18, so the box must be
    // wider than the one of the harmonic experiments.
    c.grid.extent = 16.0;
    c.model.potential = "doublewell";
    c.model.control = "dipole(1,0)";
    c.model.occupation = "paired";
    c.weights.beta = 0.0;
    c.weights.eta = 1.0;
    c.weights.nu = 1e-7;
    c.optimizer.gradient_tolerance = 5e-5;
    return c;
  }
  throw ConfigError("unknown experiment '" + experiment +
                    "' (expected tracking, doublewell, convergence or custom)");
}

void ExperimentConfig::validate() const {
  preset_config(experiment);
  require(grid.dim == 1 || grid.dim == 2, "grid.dim in {1,2}");
  require(grid.extent > 0.0, "grid.L>0");
  require(grid.points >= 8 && grid.points % 2 == 0, "grid.M even and >=8");
  require(time.horizon > 0.0, "time.T>0");
  require(time.steps >= 1, "time.K>=1");
  try {
    weights.validate();
    optimizer.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("constraint violated: ") + e.what());
  }
  try {
    Confinement::parse(model.potential);
    ControlShape::parse(model.control);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  require(!model.exchange || grid.dim == 2, "model.exchange requires grid.dim=2");
  require(model.exchange_cutoff > 0.0, "model.exchange_cutoff>0");
  require(model.correlation_limit <= 0.0, "model.correlation_limit<=0");
  require(model.correlation_scale > 0.0, "model.correlation_scale>0");
  require(model.electrons >= 1, "model.electrons>=1");
  require(model.occupation == "distinct" || model.occupation == "paired",
          "model.occupation in {distinct,paired}");
  require(model.hartree_quadrature == "split" || model.hartree_quadrature == "cell_average",
          "model.hartree_quadrature in {split,cell_average}");
  require(model.initial_state == "ground" || model.initial_state == "coherent",
          "model.initial_state in {ground,coherent}");
  require(model.ground_tolerance > 0.0, "model.ground_tolerance>0");
  require(model.coherent_x1.size() == static_cast<std::size_t>(model.electrons) &&
              model.coherent_x2.size() == model.coherent_x1.size(),
          "model.coherent_x1/x2 have one entry per electron");

  require(convergence.horizon > 0.0, "convergence.T>0");
  require(convergence.dt0 > 0.0, "convergence.dt0>0");
  require(convergence.rungs >= 3, "convergence.rungs>=3");
  require(convergence.reference_factor >= 2, "convergence.reference_factor>=2");
  require(convergence.temporal_points >= 8 && convergence.temporal_points % 2 == 0,
          "convergence.temporal_M even and >=8");
  require(convergence.spatial_points.size() >= 2, "convergence.spatial_M has >=2 entries");
  for (std::size_t i = 0; i < convergence.spatial_points.size(); ++i) {
    const int m = convergence.spatial_points[i];
    require(m >= 8 && m % 2 == 0, "convergence.spatial_M entries even and >=8");
    require(i == 0 || m > convergence.spatial_points[i - 1],
            "convergence.spatial_M increasing");
    require(convergence.spatial_reference_points % m == 0,
            "convergence.spatial_reference_M divisible by every spatial_M");
  }
  require(convergence.spatial_reference_points > convergence.spatial_points.back(),
          "convergence.spatial_reference_M > max(spatial_M)");
  require(convergence.spatial_dt > 0.0 && convergence.spatial_dt <= convergence.horizon,
          "0<convergence.spatial_dt<=convergence.T");
  require(convergence.floor >= 0.0, "convergence.floor>=0");

  require(!sweep.nus.empty(), "sweep.nu non-empty");
  for (double nu : sweep.nus) require(nu > 0.0, "sweep.nu entries >0");
  require(gradcheck.samples >= 1, "gradcheck.samples>=1");
  require(gradcheck.epsilon > 0.0, "gradcheck.epsilon>0");
  require(gradcheck.modes >= 1, "gradcheck.modes>=1");
  require(gradcheck.tolerance > 0.0, "gradcheck.tolerance>0");
  require(output.snapshot_stride >= 0, "output.snapshot_stride>=0");
}

ExperimentConfig parse_config(std::string_view text, const std::string& fallback_experiment,
                              const std::vector<std::string>& overrides) {
  std::vector<Assignment> assignments = read_assignments(text);
  for (const auto& o : overrides) assignments.push_back(read_override(o));

  // The preset decides the defaults, so it is resolved first. Later
  // assignments win, which lets an override change the preset too.
  std::string experiment = fallback_experiment;
  for (const auto& a : assignments) {
    if (a.name == "experiment") experiment = a.value;
  }
  ExperimentConfig config;
  try {
    config = preset_config(experiment);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("experiment: ") + e.what());
  }
  for (const auto& a : assignments) apply(config, a);
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::string& fallback_experiment,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str(), fallback_experiment, overrides);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string echo_config(const ExperimentConfig& config) {
  std::string out;
  std::string section;
  for (const auto& e : entries()) {
    if (e.section != section) {
      section = e.section;
      out += "\n[" + section + "]\n";
    }
    out += e.key + " = " + e.get(config) + "\n";
  }
  return out;
}

}  // namespace tdks
