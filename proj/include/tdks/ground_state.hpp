#pragma once

#include <stdexcept>
#include <vector>

#include "tdks/orbitals.hpp"
#include "tdks/potentials.hpp"

namespace tdks {

/// How N electrons are placed in orbitals.
enum class Occupation {
  distinct,  // N orthonormal orbitals, one electron each
  paired,    // ceil(N/2) orbitals, each doubly occupied (closed shell)
};

struct GroundStateOptions {
  /// Imaginary-time step ladder; each stage runs until the per-step density
  /// change drops below tol scaled by (stage step / last step).
  std::vector<double> imaginary_steps{1e-2, 1e-3, 2.5e-4};
  int max_iterations = 200000;
  Occupation occupation = Occupation::distinct;
  /// Real-time step the state will be propagated with, or 0. The imaginary
  /// splitting at step tau converges to the ground state of H + tau^2 E while
  /// the real-time splitting at step dt evolves under H - dt^2 E (same E).
  /// With a nonzero value the fixed points of two imaginary steps are
  /// extrapolated in tau^2 to -dt^2, which makes the result stationary under
  /// the discrete dynamics rather than only under the exact one.
  double propagation_step = 0.0;
};

struct GroundState {
  Orbitals orbitals;            // N entries; paired orbitals appear twice
  std::vector<double> energies; // <psi_j, H[rho] psi_j> per entry
  int iterations = 0;
  double density_change = 0.0;  // max |rho_n - rho_{n-1}| at exit
};

class GroundStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Self-consistent Kohn-Sham ground state (u = 0) by normalized
/// imaginary-time Strang steps with Gram-Schmidt after every step.
/// Converged when max |rho_n - rho_{n-1}| < tol on the last stage.
GroundState ground_state(const KohnShamModel& model, int count, double tol,
                         const GroundStateOptions& options = {});

/// <psi_j, (-Lap + V[rho(psi)]) psi_j> with u = 0.
std::vector<double> orbital_energies(const KohnShamModel& model,
                                     const Orbitals& orbitals);

/// Displaced harmonic-oscillator ground states of -Lap + kappa r^2, one per
/// center (centered coordinates, x2 ignored in 1D).
Orbitals coherent_states(const GridPtr& grid, double kappa,
                         const std::vector<std::pair<double, double>>& centers);

}  // namespace tdks
