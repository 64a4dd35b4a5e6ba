#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "tdks/orbitals.hpp"
#include "tdks/potentials.hpp"
#include "tdks/time_grid.hpp"

namespace tdks {

/// Raised when a propagation produces non-finite values or exceeds the
/// modulus guard.
class PropagationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Abort threshold on max |psi| during propagation.
inline constexpr double kBlowUpModulus = 1e6;

struct Trajectory {
  enum class Direction { forward, adjoint };

  TimeGrid time;
  Direction direction = Direction::forward;
  std::vector<Orbitals> nodes;  // nodes[k] holds the state at t_k

  const Orbitals& at(int k) const { return nodes.at(k); }
};

/// One Strang step of the Kohn-Sham system from t to t + dt:
///   psi' = exp(i dt Lap) exp(-i dt/2 V(Psi(t), t)) psi(t)
///   psi(t + dt) = exp(-i dt/2 V(Psi', t + dt)) psi'
/// with V = V_0 + u V_u + V_H + V_x + V_c.
Orbitals strang_step_forward(const Orbitals& psi, double u_now, double u_next,
                             double dt, const KohnShamModel& model);

/// Called with (node index, state) for every node, k = 0 included.
using NodeObserver = std::function<void(int, const Orbitals&)>;

/// Propagates psi0 across the control's time grid without storing the
/// trajectory; every node is handed to `observer`.
Orbitals propagate_forward(const Orbitals& psi0, const ControlSignal& u,
                           const KohnShamModel& model,
                           const NodeObserver& observer = {});

Trajectory solve_forward(const Orbitals& psi0, const ControlSignal& u,
                         const KohnShamModel& model);

/// Off-diagonal adjoint source g_m = [V_H(2w) + 2 dVxc/drho w
///   - 2 beta (rho - rho_d)] psi_m with w = sum_j Re(psi_j conj(lambda_j)).
/// The diagonal terms V_H(rho) lambda and V_xc(rho) lambda are part of the
/// adjoint potential half-steps. `rho_d` may be null when beta == 0.
Orbitals adjoint_source(const Orbitals& psi, const Orbitals& lambda,
                        const Density* rho_d, double beta,
                        const KohnShamModel& model, const PotentialStack& stack);

/// Inputs of the adjoint solve that come from the cost functional.
struct AdjointTargets {
  double beta = 0.0;
  double eta = 0.0;
  const std::vector<Density>* rho_d = nullptr;  // one per node, needed if beta > 0
  const RealField* chi_a = nullptr;             // needed if eta > 0
};

/// One backward step of the inhomogeneous adjoint system from t_{k+1} to t_k:
///   lam' = exp(-i dt/2 Lap) ( exp(-i dt/2 Lap) exp(i dt/2 V_{k+1}) lam(t_{k+1})
///                             + i dt g(t_{k+1/2}) )
///   lam(t_k) = exp(i dt/2 V_k) lam'
/// V is evaluated on the forward density. The source g uses the averaged
/// forward snapshots and the half-propagated adjoint state as midpoint values.
Orbitals strang_step_adjoint(const Orbitals& lambda_next, int k,
                             const Trajectory& psi, const ControlSignal& u,
                             const KohnShamModel& model,
                             const AdjointTargets& targets);

/// lambda(T) = -i eta chi_A psi(T), then backward steps down to t = 0.
Trajectory solve_adjoint(const Trajectory& psi, const ControlSignal& u,
                         const KohnShamModel& model,
                         const AdjointTargets& targets);

}  // namespace tdks
