#include "tdks/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tdks/kernels.hpp"

namespace tdks {

namespace {

namespace k = kernels::omp;

// Exponents (a, b) of x1^a x2^b in the initial guesses, lowest first.
std::vector<std::pair<int, int>> guess_exponents(int count, int dim) {
  std::vector<std::pair<int, int>> out;
  for (int total = 0; static_cast<int>(out.size()) < count; ++total) {
    if (dim == 1) {
      out.emplace_back(total, 0);
      continue;
    }
    for (int a = total; a >= 0 && static_cast<int>(out.size()) < count; --a) {
      out.emplace_back(a, total - a);
    }
  }
  return out;
}

// Gaussian guesses centered on the minimum of V_0 with a width matched to the
// local curvature there.
Orbitals initial_guess(const KohnShamModel& model, int count) {
  const Grid& grid = *model.grid;
  const auto& v0 = model.v0.values;
  const std::size_t imin = static_cast<std::size_t>(
      std::min_element(v0.begin(), v0.end()) - v0.begin());
  const double c1 = grid.centered(imin, 0);
  const double c2 = grid.dim() == 2 ? grid.centered(imin, 1) : 0.0;

  const double h = grid.spacing();
  const int m = grid.points();
  auto at = [&](int row, int col) {
    row = (row + m) % m;
    col = (col + m) % m;
    return grid.dim() == 1 ? v0[row] : v0[static_cast<std::size_t>(row) * m + col];
  };
  const int row = grid.dim() == 1 ? static_cast<int>(imin) : static_cast<int>(imin / m);
  const int col = grid.dim() == 1 ? 0 : static_cast<int>(imin % m);
  double curvature =
      grid.dim() == 1
          ? (at(row + 1, 0) - 2 * at(row, 0) + at(row - 1, 0)) / (h * h)
          : 0.5 * ((at(row + 1, col) - 2 * at(row, col) + at(row - 1, col)) +
                   (at(row, col + 1) - 2 * at(row, col) + at(row, col - 1))) /
                (h * h);
  // V ~ (curvature / 2) x^2 has ground state exp(-sqrt(curvature/2) x^2 / 2).
  curvature = std::max(curvature, 1e-2);
  const double inv_width2 = std::sqrt(0.5 * curvature);

  Orbitals psi(model.grid, count);
  const auto exps = guess_exponents(count, grid.dim());
  for (int j = 0; j < count; ++j) {
    auto o = psi.orbital(j);
    for (std::size_t i = 0; i < o.size(); ++i) {
      const double x1 = grid.centered(i, 0) - c1;
      const double x2 = grid.dim() == 2 ? grid.centered(i, 1) - c2 : 0.0;
      o[i] = std::pow(x1, exps[j].first) * std::pow(x2, exps[j].second) *
             std::exp(-0.5 * inv_width2 * (x1 * x1 + x2 * x2));
    }
  }
  orthonormalize(psi);
  return psi;
}

}  // namespace

std::vector<double> orbital_energies(const KohnShamModel& model,
                                     const Orbitals& orbitals) {
  const Grid& grid = *model.grid;
  const std::size_t n = grid.size();
  std::vector<double> rho(n);
  std::vector<double> v(n);
  density_into(orbitals, rho);
  total_potential_into(rho, 0.0, model, v);
  std::vector<double> energies;
  std::vector<cplx> h_psi(n);
  for (int j = 0; j < orbitals.count(); ++j) {
    auto psi = orbitals.orbital(j);
    std::copy(psi.begin(), psi.end(), h_psi.begin());
    grid.forward(h_psi);
    for (std::size_t i = 0; i < n; ++i) h_psi[i] *= grid.k_squared()[i];
    grid.inverse(h_psi);
    for (std::size_t i = 0; i < n; ++i) h_psi[i] += v[i] * psi[i];
    energies.push_back(grid.cell_volume() * k::dot(psi, h_psi).real());
  }
  return energies;
}

GroundState ground_state(const KohnShamModel& model, int count, double tol,
                         const GroundStateOptions& options) {
  if (count < 1) throw std::invalid_argument("ground_state: count must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("ground_state: tol must be positive");
  if (options.imaginary_steps.empty()) {
    throw std::invalid_argument("ground_state: empty imaginary-time ladder");
  }
  const bool paired = options.occupation == Occupation::paired;
  const int spatial = paired ? (count + 1) / 2 : count;
  // Occupation weight of each spatial orbital in the density.
  std::vector<double> weight(spatial, 1.0);
  if (paired) {
    for (int j = 0; j < spatial; ++j) weight[j] = (2 * j + 1 < count) ? 2.0 : 1.0;
  }

  const Grid& grid = *model.grid;
  const std::size_t n = grid.size();
  Orbitals psi = initial_guess(model, spatial);

  std::vector<double> rho(n, 0.0);
  std::vector<double> rho_prev(n, 0.0);
  std::vector<double> v(n);
  std::vector<double> decay(n);
  std::vector<double> kinetic(n);
  auto compute_density = [&](std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 0; j < spatial; ++j) k::add_density(psi.orbital(j), weight[j], out);
  };
  compute_density(rho);

  GroundState result;
  const double last_step = options.imaginary_steps.back();
  int iterations = 0;
  double change = std::numeric_limits<double>::infinity();
  auto run_stage = [&](double tau) {
    const double stage_tol = tol * tau / last_step;
    for (std::size_t i = 0; i < n; ++i) kinetic[i] = std::exp(-tau * grid.k_squared()[i]);
    change = std::numeric_limits<double>::infinity();
    while (change >= stage_tol) {
      if (++iterations > options.max_iterations) {
        throw GroundStateError("ground_state: no convergence after " +
                               std::to_string(options.max_iterations) +
                               " iterations (density change " +
                               std::to_string(change) + ")");
      }
      total_potential_into(rho, 0.0, model, v);
      const double vmin = *std::min_element(v.begin(), v.end());
      // The shift only rescales the orbitals, which Gram-Schmidt undoes.
      for (std::size_t i = 0; i < n; ++i) decay[i] = std::exp(-0.5 * tau * (v[i] - vmin));
      for (int j = 0; j < spatial; ++j) {
        auto o = psi.orbital(j);
        k::multiply_real(decay, o);
        grid.forward(o);
        k::multiply_real(kinetic, o);
        grid.inverse(o);
        k::multiply_real(decay, o);
      }
      orthonormalize(psi);
      rho_prev.swap(rho);
      compute_density(rho);
      change = 0.0;
      for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(rho[i] - rho_prev[i]));
    }
  };
  for (double tau : options.imaginary_steps) run_stage(tau);

  if (options.propagation_step > 0.0) {
    const double dt = options.propagation_step;
    const double tau_b = last_step;
    const double tau_a = std::max(dt, 2.0 * tau_b);
    const Orbitals fine = psi;
    const double fine_change = change;
    run_stage(tau_a);
    const double c = (-dt * dt - tau_b * tau_b) / (tau_a * tau_a - tau_b * tau_b);
    auto out = psi.data();
    auto b = fine.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = b[i] + c * (out[i] - b[i]);
    orthonormalize(psi);
    compute_density(rho);
    change = fine_change;
  }

  Orbitals full(model.grid, count);
  for (int j = 0; j < count; ++j) {
    const int src = paired ? j / 2 : j;
    auto from = psi.orbital(src);
    std::copy(from.begin(), from.end(), full.orbital(j).begin());
  }
  result.orbitals = std::move(full);
  result.energies = orbital_energies(model, result.orbitals);
  result.iterations = iterations;
  result.density_change = change;
  return result;
}

Orbitals coherent_states(const GridPtr& grid, double kappa,
                         const std::vector<std::pair<double, double>>& centers) {
  if (centers.empty()) throw std::invalid_argument("coherent_states: no centers");
  if (!(kappa > 0.0)) throw std::invalid_argument("coherent_states: kappa must be positive");
  const double s = std::sqrt(kappa);  // -Lap + kappa x^2 -> exp(-s x^2 / 2)
  const double norm1d = std::pow(s / std::numbers::pi, 0.25);
  const double norm = grid->dim() == 2 ? norm1d * norm1d : norm1d;
  Orbitals psi(grid, static_cast<int>(centers.size()));
  for (int j = 0; j < psi.count(); ++j) {
    auto o = psi.orbital(j);
    for (std::size_t i = 0; i < o.size(); ++i) {
      const double x1 = grid->centered(i, 0) - centers[j].first;
      const double x2 = grid->dim() == 2 ? grid->centered(i, 1) - centers[j].second : 0.0;
      o[i] = norm * std::exp(-0.5 * s * (x1 * x1 + x2 * x2));
    }
  }
  return psi;
}

}  // namespace tdks
