#include "tdks/control.hpp"

#include <cmath>
#include <stdexcept>

#include "tdks/kernels.hpp"

namespace tdks {

TimeGrid TimeGrid::make(double horizon, int steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("time horizon must be positive");
  }
  if (steps < 1) throw std::invalid_argument("time step count must be >= 1");
  return TimeGrid{horizon, steps};
}

ControlSignal::ControlSignal(const TimeGrid& g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
  if (values.size() != static_cast<std::size_t>(grid.nodes())) {
    throw std::invalid_argument("ControlSignal: length must be K + 1");
  }
}

ControlSignal ControlSignal::sample(const TimeGrid& g,
                                   const std::function<double(double)>& f) {
  ControlSignal s(g);
  for (int k = 0; k < g.nodes(); ++k) s.values[k] = f(g.time(k));
  return s;
}

double h1_inner(std::span<const double> u, std::span<const double> v, double dt,
                double a) {
  if (u.size() != v.size() || u.size() < 2) {
    throw std::invalid_argument("h1_inner: signals must share a grid");
  }
  const std::size_t last = u.size() - 1;
  double stiffness = 0.0;
  for (std::size_t k = 0; k < last; ++k) {
    stiffness += (u[k + 1] - u[k]) * (v[k + 1] - v[k]);
  }
  double mass = 0.5 * (u[0] * v[0] + u[last] * v[last]);
  for (std::size_t k = 1; k < last; ++k) mass += u[k] * v[k];
  return stiffness / dt + a * dt * mass;
}

double h1_inner(const ControlSignal& u, const ControlSignal& v, double a) {
  if (!(u.grid == v.grid)) throw std::invalid_argument("h1_inner: grid mismatch");
  return h1_inner(u.values, v.values, u.grid.dt(), a);
}

double h1_norm(const ControlSignal& u, double a) { return std::sqrt(h1_inner(u, u, a)); }

double l2_inner(const ControlSignal& u, const ControlSignal& v) {
  if (!(u.grid == v.grid)) throw std::invalid_argument("l2_inner: grid mismatch");
  const int last = u.grid.steps;
  double s = 0.5 * (u[0] * v[0] + u[last] * v[last]);
  for (int k = 1; k < last; ++k) s += u[k] * v[k];
  return s * u.grid.dt();
}

ControlSignal riesz_h1(const ControlSignal& f, double a) {
  const TimeGrid& g = f.grid;
  const int interior = g.steps - 1;
  ControlSignal mu(g);
  if (interior <= 0) return mu;
  const double dt = g.dt();
  const double off = -1.0 / (dt * dt);
  const double diag = 2.0 / (dt * dt) + a;
  // Thomas algorithm on the constant-coefficient tridiagonal system.
  std::vector<double> c(interior);
  std::vector<double> d(interior);
  double denom = diag;
  if (denom == 0.0) throw std::logic_error("riesz_h1: singular system");
  c[0] = off / denom;
  d[0] = f[1] / denom;
  for (int i = 1; i < interior; ++i) {
    denom = diag - off * c[i - 1];
    if (denom == 0.0) throw std::logic_error("riesz_h1: singular system");
    c[i] = off / denom;
    d[i] = (f[i + 1] - off * d[i - 1]) / denom;
  }
  mu[interior] = d[interior - 1];
  for (int i = interior - 2; i >= 0; --i) mu[i + 1] = d[i] - c[i] * mu[i + 2];
  return mu;
}

void CostWeights::validate() const {
  if (beta < 0.0) throw std::invalid_argument("weights: beta>=0 violated");
  if (eta < 0.0) throw std::invalid_argument("weights: eta>=0 violated");
  if (!(beta + eta > 0.0)) throw std::invalid_argument("weights: beta+eta>0 violated");
  if (!(nu > 0.0)) throw std::invalid_argument("weights: nu>0 violated");
  if (!(h1_weight > 0.0)) throw std::invalid_argument("weights: a>0 violated");
}

CostBreakdown evaluate_cost(const Trajectory& psi, const ControlSignal& u,
                            const CostWeights& weights, const TargetSpec& targets) {
  const TimeGrid& tg = psi.time;
  if (!(u.grid == tg)) throw std::invalid_argument("evaluate_cost: time grid mismatch");
  if (psi.nodes.size() != static_cast<std::size_t>(tg.nodes())) {
    throw std::invalid_argument("evaluate_cost: incomplete trajectory");
  }
  const GridPtr& grid = psi.at(0).grid();
  const double cell = grid->cell_volume();
  std::vector<double> rho(grid->size());

  CostBreakdown cost;
  if (weights.beta != 0.0) {
    if (targets.rho_d.size() != static_cast<std::size_t>(tg.nodes())) {
      throw std::invalid_argument("evaluate_cost: rho_d must have one density per node");
    }
    double integral = 0.0;
    for (int k = 0; k < tg.nodes(); ++k) {
      require_same_grid(*grid, *targets.rho_d[k].grid, "evaluate_cost");
      density_into(psi.at(k), rho);
      const double w = (k == 0 || k == tg.steps) ? 0.5 : 1.0;
      integral += w * cell * kernels::omp::squared_distance(rho, targets.rho_d[k].values);
    }
    cost.tracking = 0.5 * weights.beta * tg.dt() * integral;
  }
  if (weights.eta != 0.0) {
    require_same_grid(*grid, *targets.chi_a.grid, "evaluate_cost");
    density_into(psi.at(tg.steps), rho);
    cost.terminal = 0.5 * weights.eta * cell *
                    kernels::omp::weighted_sum(targets.chi_a.values, rho);
  }
  cost.regularization = 0.5 * weights.nu * h1_inner(u, u, weights.h1_weight);
  return cost;
}

RealField left_half_indicator(const GridPtr& grid) {
  RealField chi(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    chi.values[i] = grid->centered(i, 0) < 0.0 ? 1.0 : 0.0;
  }
  return chi;
}

ReducedGradient reduced_gradient(const ControlSignal& u, const Trajectory& psi,
                                 const Trajectory& lambda,
                                 const KohnShamModel& model,
                                 const CostWeights& weights) {
  const TimeGrid& tg = u.grid;
  if (!(psi.time == tg) || !(lambda.time == tg) ||
      psi.nodes.size() != static_cast<std::size_t>(tg.nodes()) ||
      lambda.nodes.size() != psi.nodes.size()) {
    throw std::invalid_argument("reduced_gradient: trajectory mismatch");
  }
  ReducedGradient out;
  out.source = ControlSignal(tg);
  const double cell = model.grid->cell_volume();
  for (int k = 0; k < tg.nodes(); ++k) {
    const Orbitals& p = psi.at(k);
    const Orbitals& l = lambda.at(k);
    require_compatible(p, l, "reduced_gradient");
    double s = 0.0;
    for (int m = 0; m < p.count(); ++m) {
      s += kernels::omp::weighted_real_dot(model.vu.values, l.orbital(m), p.orbital(m));
    }
    out.source[k] = -cell * s;
  }
  const ControlSignal mu = riesz_h1(out.source, weights.h1_weight);
  out.gradient = ControlSignal(tg);
  for (int k = 0; k < tg.nodes(); ++k) out.gradient[k] = weights.nu * u[k] + mu[k];
  return out;
}

}  // namespace tdks
