// Command-line front end: one experiment per invocation.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>

#include "tdks/experiments.hpp"

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitMaxIter = 2;
constexpr int kExitFailure = 3;

struct CommonOptions {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out, "output directory");
  cmd->add_option("--override", opts.overrides, "section.key=value, repeatable")
      ->allow_extra_args(false);
}

tdks::ExperimentConfig resolve(const CommonOptions& opts, const std::string& experiment) {
  if (opts.config.empty()) return tdks::parse_config("", experiment, opts.overrides);
  return tdks::load_config(opts.config, experiment, opts.overrides);
}

int exit_code(tdks::OptimizerStatus status) {
  switch (status) {
    case tdks::OptimizerStatus::converged: return kExitConverged;
    case tdks::OptimizerStatus::max_iter: return kExitMaxIter;
    case tdks::OptimizerStatus::line_search_failed: return kExitFailure;
  }
  return kExitFailure;
}

void print_run(const tdks::ControlRunResult& r) {
  std::printf("status=%s iterations=%d J0=%.6e J=%.6e (beta %.3e, eta %.3e, nu %.3e)\n",
              tdks::to_string(r.status).c_str(), r.iterations(), r.initial_cost.total(),
              r.final_cost.total(), r.final_cost.tracking, r.final_cost.terminal,
              r.final_cost.regularization);
  std::printf("left_occupation %.6e -> %.6e, centroid_x1(0)=%.4f, |u-u_d|=%.6e\n",
              r.initial_left_occupation, r.final_left_occupation, r.initial_centroid_x1,
              r.control_distance);
  if (!r.message.empty()) std::printf("%s\n", r.message.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal control of the time-dependent Kohn-Sham equations"};
  app.require_subcommand(1);

  CommonOptions converge_opts, tracking_opts, doublewell_opts, sweep_opts, grad_opts;
  auto* converge = app.add_subcommand("converge", "temporal and spatial convergence study");
  auto* tracking = app.add_subcommand("tracking", "density tracking experiment");
  auto* doublewell = app.add_subcommand("doublewell", "double-well transfer experiment");
  auto* sweep = app.add_subcommand("sweep-nu", "repeat an experiment for several nu");
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  add_common(converge, converge_opts);
  add_common(tracking, tracking_opts);
  add_common(doublewell, doublewell_opts);
  add_common(sweep, sweep_opts);
  add_common(gradcheck, grad_opts);

  CLI11_PARSE(app, argc, argv);

  auto out_dir = [](const CommonOptions& o, const char* fallback) {
    return std::filesystem::path(o.out.empty() ? std::string("out/") + fallback : o.out);
  };

  try {
    if (converge->parsed()) {
      const auto config = resolve(converge_opts, "convergence");
      const auto report = tdks::run_convergence_study(config, out_dir(converge_opts, "converge"));
      std::printf("dt,error,ratio\n");
      for (const auto& r : report.temporal) std::printf("%.6e,%.6e,%.3f\n", r.dt, r.error, r.ratio);
      std::printf("temporal slope %.4f\nM,error,ratio\n", report.temporal_slope);
      for (const auto& r : report.spatial) std::printf("%d,%.6e,%.3f\n", r.points, r.error, r.ratio);
      const bool ok = report.temporal_slope >= 1.9 && report.temporal_slope <= 2.1 &&
                      report.spatial_spectral;
      return ok ? kExitConverged : kExitFailure;
    }
    if (tracking->parsed()) {
      const auto config = resolve(tracking_opts, "tracking");
      const auto r = tdks::run_tracking_experiment(config, out_dir(tracking_opts, "tracking"));
      print_run(r);
      return exit_code(r.status);
    }
    if (doublewell->parsed()) {
      const auto config = resolve(doublewell_opts, "doublewell");
      const auto r =
          tdks::run_doublewell_experiment(config, out_dir(doublewell_opts, "doublewell"));
      print_run(r);
      return exit_code(r.status);
    }
    if (sweep->parsed()) {
      const auto config = resolve(sweep_opts, "tracking");
      const auto runs = tdks::run_nu_sweep(config, out_dir(sweep_opts, "sweep-nu"));
      int code = kExitConverged;
      for (std::size_t i = 0; i < runs.size(); ++i) {
        std::printf("nu=%g: ", config.sweep.nus[i]);
        print_run(runs[i]);
        code = std::max(code, exit_code(runs[i].status));
      }
      return code;
    }
    if (gradcheck->parsed()) {
      const auto config = resolve(grad_opts, "tracking");
      const auto rows = tdks::run_gradcheck(config, out_dir(grad_opts, "gradcheck"));
      std::printf("%-7s %-22s %-22s %s\n", "sample", "adjoint", "finite_difference", "rel_error");
      bool ok = true;
      for (const auto& r : rows) {
        std::printf("%-7d %-22.14e %-22.14e %.3e\n", r.sample, r.adjoint, r.finite_difference,
                    r.relative_error);
        ok = ok && r.relative_error < config.gradcheck.tolerance;
      }
      return ok ? kExitConverged : kExitFailure;
    }
  } catch (const tdks::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}
