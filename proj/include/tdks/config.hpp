#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tdks/control.hpp"
#include "tdks/ncg.hpp"

namespace tdks {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridConfig {
  int dim = 2;
  double extent = 7.0;
  int points = 64;
};

struct TimeConfig {
  double horizon = 1.0;
  int steps = 1000;
};

struct ModelConfig {
  std::string potential = "harmonic50";
  std::string control = "quadratic";
  bool hartree = true;
  std::string hartree_quadrature = "split";  // split | cell_average
  bool exchange = true;
  bool correlation = true;
  double exchange_cutoff = 1e6;
  double correlation_limit = -0.1925;
  double correlation_scale = 1.0;
  int electrons = 2;
  std::string occupation = "distinct";  // distinct | paired
  std::string initial_state = "ground";  // ground | coherent
  double ground_tolerance = 1e-10;
  // Centers of the coherent initial states, one entry per electron.
  std::vector<double> coherent_x1{0.5, -0.5};
  std::vector<double> coherent_x2{0.0, 0.25};
};

struct TargetConfig {
  double amplitude = 10.0;  // u_d(t) = amplitude * sin^2(pi t / T)
};

struct ConvergenceConfig {
  double horizon = 0.1;
  double amplitude = 10.0;  // control forcing during the study
  double dt0 = 1e-3;
  int rungs = 5;
  int reference_factor = 64;
  int temporal_points = 60;
  std::vector<int> spatial_points{16, 32, 64};
  int spatial_reference_points = 128;
  double spatial_dt = 5e-6;
  double floor = 1e-11;  // errors below this count as the round-off floor
  std::string cache_dir;  // empty: <out>/reference_cache
};

struct SweepConfig {
  std::vector<double> nus{1e-5, 1e-6, 1e-7};
};

struct GradcheckConfig {
  int samples = 5;
  double epsilon = 1e-4;
  int modes = 4;
  unsigned seed = 1;
  double base_amplitude = 3.0;  // gradient taken at u = base * sin(pi t / T)
  double tolerance = 1e-3;
};

struct OutputConfig {
  int snapshot_stride = 100;
};

/// Everything a CLI run needs. Defaults depend on the experiment preset.
struct ExperimentConfig {
  std::string experiment = "tracking";  // tracking | doublewell | convergence | custom
  GridConfig grid;
  TimeConfig time;
  CostWeights weights;
  ModelConfig model;
  TargetConfig target;
  OptimizerConfig optimizer;
  ConvergenceConfig convergence;
  SweepConfig sweep;
  GradcheckConfig gradcheck;
  OutputConfig output;

  /// Throws ConfigError naming the violated constraint.
  void validate() const;
};

ExperimentConfig preset_config(const std::string& experiment);

/// Parses "key = value" lines grouped under "[section]" headers. '#' starts
/// a comment. The optional top-level key `experiment` selects the preset
/// whose defaults are filled in; `fallback_experiment` is used otherwise.
/// Overrides are "section.key=value" strings applied after the file.
ExperimentConfig parse_config(std::string_view text,
                              const std::string& fallback_experiment,
                              const std::vector<std::string>& overrides = {});

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::string& fallback_experiment,
                             const std::vector<std::string>& overrides = {});

/// Fully resolved config in the input format, one key per line in a fixed
/// order. Parsing the echo gives back the same config.
std::string echo_config(const ExperimentConfig& config);

}  // namespace tdks
