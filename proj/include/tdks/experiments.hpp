#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "tdks/config.hpp"
#include "tdks/problem.hpp"

namespace tdks {

namespace fs = std::filesystem;

std::shared_ptr<const KohnShamModel> build_model(const ExperimentConfig& config,
                                                 const GridPtr& grid);

/// Ground state (matched to the real-time step `dt`) or coherent states,
/// depending on model.initial_state.
Orbitals initial_state(const ExperimentConfig& config, const KohnShamModel& model,
                       double dt);

/// u_d(t) = amplitude * sin^2(pi t / T); vanishes at both ends.
ControlSignal forcing_signal(const TimeGrid& grid, double amplitude);

/// h^dim * sum over {x1 < 0} of rho.
double left_occupation(const Orbitals& psi);
/// Density-weighted mean of the centered x1 coordinate.
double centroid_x1(const Orbitals& psi);

struct ControlSetup {
  ControlProblem problem;
  ControlSignal u_d;  // forcing that produced rho_d, zero when beta == 0
};

/// Model, initial state and targets for a tracking, double-well or custom run.
/// rho_d is synthesized by a forward solve under u_d when beta > 0 and
/// chi_A = {x1 < 0} when eta > 0.
ControlSetup prepare_control_problem(const ExperimentConfig& config);

struct ControlRunResult {
  OptimizerStatus status = OptimizerStatus::max_iter;
  std::string message;
  ControlSignal u;
  ControlSignal u_d;
  CostBreakdown initial_cost;
  CostBreakdown final_cost;
  std::vector<IterationRecord> history;
  double initial_left_occupation = 0.0;
  double final_left_occupation = 0.0;
  double initial_centroid_x1 = 0.0;
  double control_distance = 0.0;  // ||u - u_d||_L2

  int iterations() const { return static_cast<int>(history.size()) - 1; }
};

/// Optimizes from u0 = 0 and writes config.resolved, iterations.csv,
/// control.csv, target_control.csv, observables.csv, snapshots/ and status.txt
/// under `out`. Failures of the optimizer are reported in the result, not
/// thrown.
ControlRunResult run_control_experiment(const ExperimentConfig& config, const fs::path& out);
ControlRunResult run_tracking_experiment(const ExperimentConfig& config, const fs::path& out);
ControlRunResult run_doublewell_experiment(const ExperimentConfig& config, const fs::path& out);

/// One optimization per nu in config.sweep, each in out/nu_<i>, plus sweep.csv.
std::vector<ControlRunResult> run_nu_sweep(const ExperimentConfig& config, const fs::path& out);

struct GradcheckRow {
  int sample = 0;
  double adjoint = 0.0;            // <grad J, du>_H1
  double finite_difference = 0.0;  // (J(u + eps du) - J(u - eps du)) / (2 eps)
  double relative_error = 0.0;
};

/// Central finite-difference check of the adjoint gradient along random
/// endpoint-pinned sine combinations. Writes gradcheck.csv.
std::vector<GradcheckRow> run_gradcheck(const ExperimentConfig& config, const fs::path& out);

struct ConvergenceRow {
  double dt = 0.0;
  int points = 0;
  double error = 0.0;
  double ratio = 0.0;  // previous error / this error, 0 for the first row
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> temporal;
  std::vector<ConvergenceRow> spatial;
  double temporal_slope = 0.0;
  /// Every mesh doubling above the floor reduced the error by more than 30.
  bool spatial_spectral = false;
  int reference_cache_hits = 0;
};

/// Least-squares slope of log(error) against log(dt).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

ConvergenceReport run_temporal_study(const ExperimentConfig& config, const fs::path& out);
ConvergenceReport run_spatial_study(const ExperimentConfig& config, const fs::path& out);
/// Both studies; writes temporal.csv, spatial.csv and convergence_report.txt.
ConvergenceReport run_convergence_study(const ExperimentConfig& config, const fs::path& out);

}  // namespace tdks
