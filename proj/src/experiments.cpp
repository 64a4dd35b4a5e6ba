#include "tdks/experiments.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "tdks/field_io.hpp"
#include "tdks/ground_state.hpp"

namespace tdks {

namespace {

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void prepare_output(const ExperimentConfig& config, const fs::path& out) {
  fs::create_directories(out);
  write_text(out / "config.resolved", echo_config(config));
}

void write_status(const fs::path& out, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string text;
  for (const auto& [k, v] : kv) text += k + " = " + v + "\n";
  write_text(out / "status.txt", text);
}

TimeGrid time_grid(const ExperimentConfig& config) {
  return TimeGrid::make(config.time.horizon, config.time.steps);
}

double observable_weighted(const Orbitals& psi, const std::function<double(std::size_t)>& f) {
  const Grid& grid = *psi.grid();
  std::vector<double> rho(grid.size());
  density_into(psi, rho);
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) s += f(i) * rho[i];
  return grid.cell_volume() * s;
}

// Streams the trajectory of u once more to record observables and density
// snapshots.
void write_trajectory_outputs(const ControlProblem& problem, const ControlSignal& u,
                              int stride, const fs::path& out) {
  const Grid& grid = *problem.model->grid;
  const int n = problem.psi0.count();
  std::ofstream obs(out / "observables.csv", std::ios::binary);
  obs << "t";
  for (int j = 1; j <= n; ++j) obs << ",norm_" << j;
  obs << ",x1_mean,x2_mean,left_occupation\n";
  if (stride > 0) fs::create_directories(out / "snapshots");
  propagate_forward(problem.psi0, u, *problem.model, [&](int k, const Orbitals& psi) {
    obs << real(u.grid.time(k));
    for (int j = 0; j < n; ++j) obs << ',' << real(psi.norm(j));
    const double x1 = observable_weighted(psi, [&](std::size_t i) { return grid.centered(i, 0); }) / n;
    const double x2 =
        grid.dim() == 2
            ? observable_weighted(psi, [&](std::size_t i) { return grid.centered(i, 1); }) / n
            : 0.0;
    obs << ',' << real(x1) << ',' << real(x2) << ',' << real(left_occupation(psi)) << '\n';
    if (stride > 0 && (k % stride == 0 || k == u.grid.steps)) {
      char name[32];
      std::snprintf(name, sizeof name, "rho_%06d.tdks", k);
      std::ofstream snap(out / "snapshots" / name, std::ios::binary);
      write_field(snap, density(psi));
    }
  });
}

std::string nu_directory(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "nu_%zu", index);
  return buf;
}

// ---------------------------------------------------------------------------
// Convergence study helpers

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Snapshots of a run at every `stride`-th node.
using Snapshots = std::vector<Orbitals>;

Snapshots run_sampled(const Orbitals& psi0, const ControlSignal& u, const KohnShamModel& model,
                      int stride) {
  Snapshots out;
  propagate_forward(psi0, u, model, [&](int k, const Orbitals& psi) {
    if (k % stride == 0) out.push_back(psi);
  });
  return out;
}

struct ReferenceCache {
  fs::path dir;
  int hits = 0;

  // Runs `compute` unless a file for `key` exists with the same key line.
  Snapshots fetch(const std::string& key, const GridPtr& grid, int count,
                  const std::function<Snapshots()>& compute) {
    char name[40];
    std::snprintf(name, sizeof name, "ref_%016" PRIx64 ".bin", fnv1a(key));
    const fs::path path = dir / name;
    const std::string key_line = "TDKSREF " + key;
    if (std::ifstream in{path, std::ios::binary}) {
      std::string first;
      std::getline(in, first);
      if (first == key_line) {
        try {
          Snapshots snaps;
          std::string count_line;
          std::getline(in, count_line);
          const int nodes = std::stoi(count_line);
          for (int k = 0; k < nodes; ++k) {
            Orbitals psi(grid, count);
            for (int j = 0; j < count; ++j) psi.set(j, read_field(in, grid));
            snaps.push_back(std::move(psi));
          }
          ++hits;
          return snaps;
        } catch (const std::exception&) {
          // Truncated or corrupt cache entry: recompute below.
        }
      }
    }
    Snapshots snaps = compute();
    fs::create_directories(dir);
    const fs::path tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      out << key_line << '\n' << snaps.size() << '\n';
      for (const auto& psi : snaps) {
        for (int j = 0; j < psi.count(); ++j) write_field(out, psi.field(j));
      }
    }
    fs::rename(tmp, path);
    return snaps;
  }
};

std::string model_key(const ExperimentConfig& c) {
  std::ostringstream key;
  key << "potential=" << c.model.potential << " control=" << c.model.control
      << " hxc=" << c.model.hartree << c.model.exchange << c.model.correlation
      << " hq=" << c.model.hartree_quadrature
      << " cutoff=" << real(c.model.exchange_cutoff)
      << " corr=" << real(c.model.correlation_limit) << ',' << real(c.model.correlation_scale)
      << " N=" << c.model.electrons << " init=" << c.model.initial_state
      << " occ=" << c.model.occupation << " gtol=" << real(c.model.ground_tolerance);
  for (std::size_t i = 0; i < c.model.coherent_x1.size(); ++i) {
    key << " c" << i << '=' << real(c.model.coherent_x1[i]) << ','
        << real(c.model.coherent_x2[i]);
  }
  return key.str();
}

// Y-norm distance sqrt(sum_k w_k dt sum_j h^d |psi - ref|^2) over sampled
// nodes. `ref` may live on a finer grid whose points include the coarse ones.
double space_time_error(const Snapshots& a, const Snapshots& ref, double dt_sample) {
  if (a.size() != ref.size()) throw std::logic_error("snapshot count mismatch");
  const Grid& coarse = *a.front().grid();
  const Grid& fine = *ref.front().grid();
  const int factor = fine.points() / coarse.points();
  const int m = coarse.points();
  const int mf = fine.points();
  auto fine_index = [&](std::size_t i) -> std::size_t {
    if (coarse.dim() == 1) return i * factor;
    const std::size_t row = i / m;
    const std::size_t col = i % m;
    return row * factor * mf + col * factor;
  };
  double total = 0.0;
  const std::size_t last = a.size() - 1;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double s = 0.0;
    for (int j = 0; j < a[k].count(); ++j) {
      auto x = a[k].orbital(j);
      auto y = ref[k].orbital(j);
      for (std::size_t i = 0; i < x.size(); ++i) s += std::norm(x[i] - y[fine_index(i)]);
    }
    const double w = (k == 0 || k == last) ? 0.5 : 1.0;
    total += w * s;
  }
  return std::sqrt(total * dt_sample * coarse.cell_volume());
}

int steps_for(double horizon, double dt) {
  const double k = horizon / dt;
  const long long rounded = std::llround(k);
  if (rounded < 1 || std::abs(k - rounded) > 1e-9 * k) {
    throw std::invalid_argument("step " + real(dt) + " does not divide the horizon " +
                                real(horizon));
  }
  return static_cast<int>(rounded);
}

fs::path cache_dir(const ExperimentConfig& c, const fs::path& out) {
  return c.convergence.cache_dir.empty() ? out / "reference_cache"
                                         : fs::path(c.convergence.cache_dir);
}

ExperimentConfig with_grid_points(ExperimentConfig c, int points) {
  c.grid.points = points;
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------

std::shared_ptr<const KohnShamModel> build_model(const ExperimentConfig& config,
                                                 const GridPtr& grid) {
  Interaction interaction{config.model.hartree, config.model.exchange,
                          config.model.correlation,
                          parse_hartree_quadrature(config.model.hartree_quadrature)};
  CorrelationFit fit{config.model.correlation_limit, config.model.correlation_scale};
  return std::make_shared<const KohnShamModel>(make_model(
      grid, Confinement::parse(config.model.potential),
      ControlShape::parse(config.model.control), interaction,
      config.model.exchange_cutoff, fit));
}

Orbitals initial_state(const ExperimentConfig& config, const KohnShamModel& model, double dt) {
  if (config.model.initial_state == "coherent") {
    if (model.confinement.kind != Confinement::Kind::harmonic) {
      throw std::invalid_argument("coherent initial states need a harmonic confinement");
    }
    std::vector<std::pair<double, double>> centers;
    for (std::size_t i = 0; i < config.model.coherent_x1.size(); ++i) {
      centers.emplace_back(config.model.coherent_x1[i], config.model.coherent_x2[i]);
    }
    return coherent_states(model.grid, model.confinement.kappa, centers);
  }
  GroundStateOptions options;
  options.occupation =
      config.model.occupation == "paired" ? Occupation::paired : Occupation::distinct;
  options.propagation_step = dt;
  return ground_state(model, config.model.electrons, config.model.ground_tolerance, options)
      .orbitals;
}

ControlSignal forcing_signal(const TimeGrid& grid, double amplitude) {
  ControlSignal u = ControlSignal::sample(grid, [&](double t) {
    const double s = std::sin(std::numbers::pi * t / grid.horizon);
    return amplitude * s * s;
  });
  u[0] = 0.0;
  u[grid.steps] = 0.0;
  return u;
}

double left_occupation(const Orbitals& psi) {
  const Grid& grid = *psi.grid();
  return observable_weighted(psi, [&](std::size_t i) { return grid.centered(i, 0) < 0.0 ? 1.0 : 0.0; });
}

double centroid_x1(const Orbitals& psi) {
  const Grid& grid = *psi.grid();
  return observable_weighted(psi, [&](std::size_t i) { return grid.centered(i, 0); }) /
         psi.count();
}

ControlSetup prepare_control_problem(const ExperimentConfig& config) {
  config.validate();
  const GridPtr grid = make_grid(config.grid.dim, config.grid.extent, config.grid.points);
  const TimeGrid tg = time_grid(config);
  ControlSetup setup;
  ControlProblem& p = setup.problem;
  p.model = build_model(config, grid);
  p.psi0 = initial_state(config, *p.model, tg.dt());
  p.time = tg;
  p.weights = config.weights;
  setup.u_d = ControlSignal(tg);
  if (p.weights.beta != 0.0) {
    setup.u_d = forcing_signal(tg, config.target.amplitude);
    p.targets.rho_d.reserve(tg.nodes());
    propagate_forward(p.psi0, setup.u_d, *p.model,
                      [&](int, const Orbitals& psi) { p.targets.rho_d.push_back(density(psi)); });
  }
  if (p.weights.eta != 0.0) p.targets.chi_a = left_half_indicator(grid);
  return setup;
}

ControlRunResult run_control_experiment(const ExperimentConfig& config, const fs::path& out) {
  prepare_output(config, out);
  const ControlSetup setup = prepare_control_problem(config);
  const ControlProblem& problem = setup.problem;
  const TimeGrid& tg = problem.time;

  ControlRunResult result;
  result.u_d = setup.u_d;
  result.initial_left_occupation = left_occupation(problem.psi0);
  result.initial_centroid_x1 = centroid_x1(problem.psi0);

  std::ofstream log(out / "iterations.csv", std::ios::binary);
  log << iteration_log_header() << '\n';
  const Vector u0(tg.nodes(), 0.0);
  OptimizerResult opt =
      minimize(u0, make_objective(problem), make_inner_product(problem), config.optimizer,
               [&](const IterationRecord& r) { log << iteration_log_line(r) << '\n' << std::flush; });

  result.status = opt.status;
  result.message = opt.message;
  result.history = opt.history;
  result.u = ControlSignal(tg, opt.u);
  result.initial_cost = opt.history.front().breakdown;
  result.final_cost = opt.final.breakdown;

  // Gradient and source of the final control for the export.
  const GradientEvaluation final_eval = compute_gradient(problem, result.u);
  {
    std::ofstream csv(out / "control.csv", std::ios::binary);
    csv << "t,u,grad,f\n";
    for (int k = 0; k < tg.nodes(); ++k) {
      csv << real(tg.time(k)) << ',' << real(result.u[k]) << ','
          << real(final_eval.gradient.gradient[k]) << ',' << real(final_eval.gradient.source[k])
          << '\n';
    }
  }
  {
    std::ofstream csv(out / "target_control.csv", std::ios::binary);
    csv << "t,u_d,u\n";
    for (int k = 0; k < tg.nodes(); ++k) {
      csv << real(tg.time(k)) << ',' << real(result.u_d[k]) << ',' << real(result.u[k]) << '\n';
    }
  }
  ControlSignal diff(tg);
  for (int k = 0; k < tg.nodes(); ++k) diff[k] = result.u[k] - result.u_d[k];
  result.control_distance = std::sqrt(l2_inner(diff, diff));

  const Orbitals final_state = propagate_forward(problem.psi0, result.u, *problem.model);
  result.final_left_occupation = left_occupation(final_state);
  write_trajectory_outputs(problem, result.u, config.output.snapshot_stride, out);

  write_status(out, {{"status", to_string(result.status)},
                     {"message", result.message},
                     {"iterations", std::to_string(result.iterations())},
                     {"J_initial", real(result.initial_cost.total())},
                     {"J_final", real(result.final_cost.total())},
                     {"J_beta", real(result.final_cost.tracking)},
                     {"J_eta", real(result.final_cost.terminal)},
                     {"J_nu", real(result.final_cost.regularization)},
                     {"grad_norm", real(opt.history.back().gradient_norm)},
                     {"control_distance", real(result.control_distance)},
                     {"initial_centroid_x1", real(result.initial_centroid_x1)},
                     {"initial_left_occupation", real(result.initial_left_occupation)},
                     {"final_left_occupation", real(result.final_left_occupation)}});
  return result;
}

ControlRunResult run_tracking_experiment(const ExperimentConfig& config, const fs::path& out) {
  if (!(config.weights.beta > 0.0)) {
    throw std::invalid_argument("tracking experiment needs beta > 0");
  }
  return run_control_experiment(config, out);
}

ControlRunResult run_doublewell_experiment(const ExperimentConfig& config, const fs::path& out) {
  if (!(config.weights.eta > 0.0)) {
    throw std::invalid_argument("double-well experiment needs eta > 0");
  }
  return run_control_experiment(config, out);
}

std::vector<ControlRunResult> run_nu_sweep(const ExperimentConfig& config, const fs::path& out) {
  prepare_output(config, out);
  std::vector<ControlRunResult> results;
  std::ofstream csv(out / "sweep.csv", std::ios::binary);
  csv << "nu,J_initial,J_final,J_beta,J_eta,J_nu,iterations,status,control_distance,"
         "final_left_occupation\n";
  for (std::size_t i = 0; i < config.sweep.nus.size(); ++i) {
    ExperimentConfig c = config;
    c.weights.nu = config.sweep.nus[i];
    ControlRunResult r = run_control_experiment(c, out / nu_directory(i));
    csv << real(c.weights.nu) << ',' << real(r.initial_cost.total()) << ','
        << real(r.final_cost.total()) << ',' << real(r.final_cost.tracking) << ','
        << real(r.final_cost.terminal) << ',' << real(r.final_cost.regularization) << ','
        << r.iterations() << ',' << to_string(r.status) << ',' << real(r.control_distance)
        << ',' << real(r.final_left_occupation) << '\n' << std::flush;
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<GradcheckRow> run_gradcheck(const ExperimentConfig& config, const fs::path& out) {
  prepare_output(config, out);
  const ControlSetup setup = prepare_control_problem(config);
  const ControlProblem& problem = setup.problem;
  const TimeGrid& tg = problem.time;
  const double period = tg.horizon;
  const ControlSignal u = ControlSignal::sample(tg, [&](double t) {
    return config.gradcheck.base_amplitude * std::sin(std::numbers::pi * t / period);
  });
  const GradientEvaluation at_u = compute_gradient(problem, u);

  std::mt19937 rng(config.gradcheck.seed);
  std::normal_distribution<double> normal;
  const double eps = config.gradcheck.epsilon;
  std::vector<GradcheckRow> rows;
  std::ofstream csv(out / "gradcheck.csv", std::ios::binary);
  csv << "sample,adjoint,finite_difference,rel_error\n";
  for (int s = 0; s < config.gradcheck.samples; ++s) {
    std::vector<double> c(config.gradcheck.modes);
    for (auto& x : c) x = normal(rng);
    ControlSignal du = ControlSignal::sample(tg, [&](double t) {
      double v = 0.0;
      for (std::size_t m = 0; m < c.size(); ++m) {
        v += c[m] * std::sin(static_cast<double>(m + 1) * std::numbers::pi * t / period);
      }
      return v;
    });
    du[0] = 0.0;
    du[tg.steps] = 0.0;
    ControlSignal plus = u;
    ControlSignal minus = u;
    for (int k = 0; k < tg.nodes(); ++k) {
      plus[k] += eps * du[k];
      minus[k] -= eps * du[k];
    }
    GradcheckRow row;
    row.sample = s;
    row.adjoint = h1_inner(at_u.gradient.gradient, du, problem.weights.h1_weight);
    row.finite_difference =
        (reduced_cost(problem, plus).total() - reduced_cost(problem, minus).total()) / (2.0 * eps);
    row.relative_error = std::abs(row.adjoint - row.finite_difference) / std::abs(row.adjoint);
    csv << row.sample << ',' << real(row.adjoint) << ',' << real(row.finite_difference) << ','
        << real(row.relative_error) << '\n';
    rows.push_back(row);
  }
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.relative_error < config.gradcheck.tolerance;
  write_status(out, {{"status", ok ? "passed" : "failed"},
                     {"tolerance", real(config.gradcheck.tolerance)}});
  return rows;
}

// ---------------------------------------------------------------------------

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("slope fit needs at least two points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceReport run_temporal_study(const ExperimentConfig& config, const fs::path& out) {
  const ConvergenceConfig& cc = config.convergence;
  if (cc.rungs < 3) throw std::invalid_argument("convergence study needs at least 3 rungs");
  fs::create_directories(out);
  const GridPtr grid = make_grid(config.grid.dim, config.grid.extent, cc.temporal_points);
  const auto model = build_model(config, grid);
  const int coarse_steps = steps_for(cc.horizon, cc.dt0);
  const TimeGrid coarse = TimeGrid::make(cc.horizon, coarse_steps);
  const Orbitals psi0 = initial_state(config, *model, cc.dt0);

  const int finest = 1 << (cc.rungs - 1);
  const int ref_factor = finest * cc.reference_factor;
  ReferenceCache cache{cache_dir(config, out)};
  std::ostringstream key;
  key << "temporal L=" << real(config.grid.extent) << " M=" << cc.temporal_points
      << " dim=" << config.grid.dim << " T=" << real(cc.horizon) << " K=" << coarse_steps
      << " factor=" << ref_factor << " A=" << real(cc.amplitude) << ' ' << model_key(config);
  const Snapshots reference = cache.fetch(key.str(), grid, psi0.count(), [&] {
    const TimeGrid tg = TimeGrid::make(cc.horizon, coarse_steps * ref_factor);
    return run_sampled(psi0, forcing_signal(tg, cc.amplitude), *model, ref_factor);
  });

  ConvergenceReport report;
  report.reference_cache_hits = cache.hits;
  std::vector<double> dts;
  std::vector<double> errors;
  for (int r = 0; r < cc.rungs; ++r) {
    const int factor = 1 << r;
    const TimeGrid tg = TimeGrid::make(cc.horizon, coarse_steps * factor);
    const Snapshots snaps =
        run_sampled(psi0, forcing_signal(tg, cc.amplitude), *model, factor);
    ConvergenceRow row;
    row.dt = tg.dt();
    row.points = cc.temporal_points;
    row.error = space_time_error(snaps, reference, coarse.dt());
    row.ratio = report.temporal.empty() ? 0.0 : report.temporal.back().error / row.error;
    report.temporal.push_back(row);
    dts.push_back(row.dt);
    errors.push_back(row.error);
  }
  report.temporal_slope = fit_loglog_slope(dts, errors);

  std::ofstream csv(out / "temporal.csv", std::ios::binary);
  csv << "dt,error,ratio\n";
  for (const auto& r : report.temporal) {
    csv << real(r.dt) << ',' << real(r.error) << ',' << real(r.ratio) << '\n';
  }
  return report;
}

ConvergenceReport run_spatial_study(const ExperimentConfig& config, const fs::path& out) {
  const ConvergenceConfig& cc = config.convergence;
  fs::create_directories(out);
  const int steps = steps_for(cc.horizon, cc.spatial_dt);
  // Compare on about 20 equally spaced nodes.
  int stride = std::max(1, steps / 20);
  while (steps % stride != 0) --stride;
  const double dt_sample = cc.spatial_dt * stride;
  const TimeGrid tg = TimeGrid::make(cc.horizon, steps);
  const ControlSignal u = forcing_signal(tg, cc.amplitude);

  auto solve_on = [&](int points) {
    const GridPtr grid = make_grid(config.grid.dim, config.grid.extent, points);
    const auto model = build_model(with_grid_points(config, points), grid);
    const Orbitals psi0 = initial_state(config, *model, cc.spatial_dt);
    return run_sampled(psi0, u, *model, stride);
  };

  ReferenceCache cache{cache_dir(config, out)};
  std::ostringstream key;
  key << "spatial L=" << real(config.grid.extent) << " M=" << cc.spatial_reference_points
      << " dim=" << config.grid.dim << " T=" << real(cc.horizon) << " K=" << steps
      << " stride=" << stride << " A=" << real(cc.amplitude) << ' ' << model_key(config);
  const GridPtr ref_grid =
      make_grid(config.grid.dim, config.grid.extent, cc.spatial_reference_points);
  const Snapshots reference = cache.fetch(key.str(), ref_grid, config.model.electrons,
                                          [&] { return solve_on(cc.spatial_reference_points); });

  ConvergenceReport report;
  report.reference_cache_hits = cache.hits;
  report.spatial_spectral = true;
  for (int points : cc.spatial_points) {
    ConvergenceRow row;
    row.dt = cc.spatial_dt;
    row.points = points;
    row.error = space_time_error(solve_on(points), reference, dt_sample);
    if (!report.spatial.empty()) {
      row.ratio = report.spatial.back().error / row.error;
      // Doublings that end below the floor are not held to the ratio.
      if (row.error > cc.floor && !(row.ratio > 30.0)) report.spatial_spectral = false;
    }
    report.spatial.push_back(row);
  }

  std::ofstream csv(out / "spatial.csv", std::ios::binary);
  csv << "M,error,ratio\n";
  for (const auto& r : report.spatial) {
    csv << r.points << ',' << real(r.error) << ',' << real(r.ratio) << '\n';
  }
  return report;
}

ConvergenceReport run_convergence_study(const ExperimentConfig& config, const fs::path& out) {
  config.validate();
  prepare_output(config, out);
  ConvergenceReport report = run_temporal_study(config, out);
  const ConvergenceReport spatial = run_spatial_study(config, out);
  report.spatial = spatial.spatial;
  report.spatial_spectral = spatial.spatial_spectral;
  report.reference_cache_hits += spatial.reference_cache_hits;

  const bool slope_ok = report.temporal_slope >= 1.9 && report.temporal_slope <= 2.1;
  std::ostringstream text;
  text << "temporal_slope = " << real(report.temporal_slope) << '\n'
       << "temporal_slope_in_window = " << (slope_ok ? "true" : "false") << '\n'
       << "spatial_ratio_above_30 = " << (report.spatial_spectral ? "true" : "false") << '\n'
       << "reference_cache_hits = " << report.reference_cache_hits << '\n';
  write_text(out / "convergence_report.txt", text.str());
  write_status(out, {{"status", slope_ok && report.spatial_spectral ? "passed" : "failed"},
                     {"temporal_slope", real(report.temporal_slope)}});
  return report;
}

}  // namespace tdks
