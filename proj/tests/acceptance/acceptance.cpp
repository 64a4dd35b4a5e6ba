// Runs the acceptance checks and prints one PASS/FAIL line per criterion.
// Usage: acceptance [--out DIR] [--only 1,3,...]

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tdks/experiments.hpp"
#include "tdks/ground_state.hpp"

namespace {

using namespace tdks;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

fs::path root;

Outcome temporal_and_spatial(bool spatial) {
  // both criteria come from one study; run it once
  static std::optional<ConvergenceReport> report;
  if (!report) {
    auto config = preset_config("convergence");
    config.convergence.cache_dir = (root / "reference_cache").string();
    report = run_convergence_study(config, root / "converge");
  }
  if (!spatial) {
    std::ostringstream s;
    s << format("slope %.4f in [1.9, 2.1]; errors", report->temporal_slope);
    for (const auto& r : report->temporal) s << format(" %.2e", r.error);
    const double k = report->temporal_slope;
    return {k >= 1.9 && k <= 2.1, s.str()};
  }
  std::ostringstream s;
  s << "ratios per doubling";
  for (const auto& r : report->spatial) {
    if (r.ratio > 0.0) s << format(" M=%d:%.1f", r.points, r.ratio);
  }
  s << " (need > 30 until the floor)";
  return {report->spatial_spectral, s.str()};
}

Outcome norm_conservation() {
  auto config = preset_config("tracking");
  auto model = build_model(config, make_grid(2, config.grid.extent, config.grid.points));
  auto tg = TimeGrid::make(config.time.horizon, config.time.steps);
  const auto psi0 = initial_state(config, *model, tg.dt());
  const auto u = forcing_signal(tg, config.target.amplitude);
  double drift = 0.0;
  propagate_forward(psi0, u, *model, [&](int, const Orbitals& s) {
    for (int j = 0; j < s.count(); ++j) drift = std::max(drift, std::abs(s.norm(j) - psi0.norm(j)));
  });
  return {drift < 1e-9, format("max drift %.2e over %d steps (need < 1e-9)", drift, tg.steps)};
}

Outcome gradient_consistency() {
  bool pass = true;
  std::string detail;
  for (const char* preset : {"tracking", "doublewell"}) {
    auto config = preset_config(preset);
    config.gradcheck.samples = 5;
    const auto rows = run_gradcheck(config, root / (std::string("gradcheck_") + preset));
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.relative_error);
    pass = pass && rows.size() == 5 && worst < 1e-3;
    detail += format("%s%s worst %.2e", detail.empty() ? "" : ", ", preset, worst);
  }
  return {pass, detail + " (need < 1e-3)"};
}

Outcome riesz_solver() {
  constexpr double pi = std::numbers::pi;
  const double T = 1.0;
  auto constant = [&](double t) { return 1.0 - std::cosh(t - T / 2) / std::cosh(T / 2); };
  auto sine = [&](double t) { return std::sin(pi * t / T) / (1.0 + pi * pi / (T * T)); };
  std::vector<double> errors;
  for (int steps : {100, 200, 400, 800}) {
    auto tg = TimeGrid::make(T, steps);
    auto mc = riesz_h1(ControlSignal::sample(tg, [](double) { return 1.0; }));
    auto ms = riesz_h1(ControlSignal::sample(tg, [&](double t) { return std::sin(pi * t / T); }));
    double e = 0.0;
    for (int k = 0; k <= steps; ++k) {
      e = std::max({e, std::abs(mc[k] - constant(tg.time(k))), std::abs(ms[k] - sine(tg.time(k)))});
    }
    errors.push_back(e);
  }
  bool pass = true;
  std::string detail = "halving ratios";
  for (std::size_t i = 1; i < errors.size(); ++i) {
    const double ratio = errors[i - 1] / errors[i];
    pass = pass && std::abs(ratio - 4.0) < 0.2;
    detail += format(" %.3f", ratio);
  }
  return {pass, detail + format(" (need 4 +- 0.2), finest error %.2e", errors.back())};
}

Outcome exchange_smoothness() {
  double worst = 0.0;
  for (int n : {2, 3}) {
    for (double r : {1.0, 50.0, 1e6}) {
      const auto p = exchange_params(n, r);
      const double e = 1.0 / n;
      const double root_branch[3] = {std::pow(r, e), e * std::pow(r, e - 1),
                                     e * (e - 1) * std::pow(r, e - 2)};
      for (int order = 0; order < 3; ++order) {
        const double scale = std::abs(root_branch[order]);
        worst = std::max(worst, std::abs(exchange_blend(r, p, order) - root_branch[order]) / scale);
        // beyond 2R the function is constant
        if (order > 0) worst = std::max(worst, std::abs(exchange_blend(2 * r, p, order)) / scale);
      }
    }
  }
  return {worst < 1e-10, format("worst relative seam mismatch %.2e (need < 1e-10)", worst)};
}

Outcome tracking_trend() {
  auto config = preset_config("tracking");
  config.sweep.nus = {1e-5, 1e-6, 1e-7};
  const auto runs = run_nu_sweep(config, root / "sweep");
  const double j0 = runs.front().initial_cost.total();
  std::vector<double> finals;
  for (const auto& r : runs) finals.push_back(r.final_cost.total());
  const bool monotone = finals[0] > finals[1] && finals[1] > finals[2];
  const double reduction = j0 / finals[0];
  return {monotone && reduction >= 100.0,
          format("J(0)=%.3e final J %.3e > %.3e > %.3e (%s); reduction at nu=1e-5 %.1fx (need >= 100)",
                 j0, finals[0], finals[1], finals[2], monotone ? "monotone" : "not monotone",
                 reduction)};
}

Outcome double_well() {
  auto config = preset_config("doublewell");
  config.weights.nu = 1e-7;
  const auto r = run_doublewell_experiment(config, root / "doublewell");
  const double reduction = r.initial_cost.total() / r.final_cost.total();
  return {reduction >= 1000.0 && r.final_left_occupation <= 1e-2,
          format("status %s, J %.3e -> %.3e (%.0fx, need >= 1000), left occupation %.3e -> %.3e "
                 "(need <= 1e-2), initial centroid x1 %.3f",
                 to_string(r.status).c_str(), r.initial_cost.total(), r.final_cost.total(),
                 reduction, r.initial_left_occupation, r.final_left_occupation,
                 r.initial_centroid_x1)};
}

Outcome ground_state_oracle() {
  auto g1 = make_grid(1, 20.0, 128);
  auto ho = make_model(g1, Confinement::parse("harmonic(1)"), ControlShape::parse("none"),
                       Interaction::none());
  // -d2/dx2 + x^2 has ground energy 1
  const double energy_error = std::abs(ground_state(ho, 1, 1e-12).energies[0] - 1.0);

  auto config = preset_config("tracking");
  auto model = build_model(config, make_grid(2, config.grid.extent, config.grid.points));
  auto tg = TimeGrid::make(0.1, 100);
  const auto psi0 = initial_state(config, *model, tg.dt());
  const auto rho0 = density(psi0);
  double drift = 0.0;
  propagate_forward(psi0, ControlSignal(tg), *model, [&](int, const Orbitals& s) {
    const auto rho = density(s);
    for (std::size_t i = 0; i < rho.values.size(); ++i) {
      drift = std::max(drift, std::abs(rho.values[i] - rho0.values[i]));
    }
  });
  return {energy_error < 1e-4 && drift < 1e-4,
          format("1D energy error %.2e (need < 1e-4), 2D density drift %.2e (need < 1e-4)",
                 energy_error, drift)};
}

Outcome quadratic_ncg() {
  const double a[3][3] = {{5.0, -1.0, 0.3}, {-1.0, 2.0, 0.7}, {0.3, 0.7, 1.5}};
  const double b[3] = {0.4, 1.0, -2.0};
  Objective f = [&](const Vector& x) {
    Evaluation e;
    e.gradient.assign(3, 0.0);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) e.gradient[i] += a[i][j] * x[j];
      e.value += 0.5 * x[i] * e.gradient[i] - b[i] * x[i];
      e.gradient[i] -= b[i];
    }
    return e;
  };
  InnerProduct dot = [](const Vector& x, const Vector& y) {
    return x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
  };
  OptimizerConfig config;
  config.gradient_tolerance = 1e-10;
  const auto r = minimize(Vector(3, 0.0), f, dot, config);
  const double g = std::sqrt(dot(r.final.gradient, r.final.gradient));
  return {r.status == OptimizerStatus::converged && r.iterations() <= 4,
          format("%s after %d iterations, |g| = %.2e (need <= 4 iterations)",
                 to_string(r.status).c_str(), r.iterations(), g)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string out = (fs::temp_directory_path() / "tdks_acceptance").string();
  std::vector<int> only;
  app.add_option("--out", out, "scratch directory for experiment outputs");
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  root = out;
  fs::create_directories(root);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"temporal convergence", [] { return temporal_and_spatial(false); }},
      {"spatial convergence", [] { return temporal_and_spatial(true); }},
      {"norm conservation", norm_conservation},
      {"adjoint gradient", gradient_consistency},
      {"Riesz solver", riesz_solver},
      {"exchange cutoff smoothness", exchange_smoothness},
      {"tracking trend", tracking_trend},
      {"double-well transfer", double_well},
      {"ground state", ground_state_oracle},
      {"quadratic NCG", quadratic_ncg},
  };
  const std::set<int> selected(only.begin(), only.end());

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %s: %s [%.0f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first,
                o.detail.c_str(), seconds);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
