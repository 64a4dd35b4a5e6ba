#pragma once

#include <span>
#include <vector>

#include "tdks/potentials.hpp"
#include "tdks/propagation.hpp"
#include "tdks/time_grid.hpp"

namespace tdks {

// Discrete H1(0,T) calculus. Derivatives are the difference quotients of the
// piecewise-linear interpolant and the L2 part uses the trapezoidal rule:
//   <u, v>_H1 = sum_k (u_{k+1}-u_k)(v_{k+1}-v_k)/dt + a * trapz(u v).
// With these choices riesz_h1() is the exact Riesz map of the trapezoidal L2
// pairing on endpoint-vanishing signals.

double h1_inner(std::span<const double> u, std::span<const double> v, double dt,
                double a = 1.0);
double h1_inner(const ControlSignal& u, const ControlSignal& v, double a = 1.0);
double h1_norm(const ControlSignal& u, double a = 1.0);

/// Trapezoidal integral of u * v.
double l2_inner(const ControlSignal& u, const ControlSignal& v);

/// Solves (-d^2/dt^2 + a) mu = f, mu(0) = mu(T) = 0, with the three-point
/// stencil.
ControlSignal riesz_h1(const ControlSignal& f, double a = 1.0);

struct CostWeights {
  double beta = 1.0;  // trajectory tracking
  double eta = 0.0;   // terminal occupation of A
  double nu = 1e-5;   // H1 regularization
  double h1_weight = 1.0;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

struct TargetSpec {
  std::vector<Density> rho_d;  // one density per time node, empty if beta == 0
  RealField chi_a;             // 0/1 indicator of A, empty if eta == 0
};

struct CostBreakdown {
  double tracking = 0.0;        // J_beta
  double terminal = 0.0;        // J_eta
  double regularization = 0.0;  // J_nu

  double total() const { return tracking + terminal + regularization; }
};

CostBreakdown evaluate_cost(const Trajectory& psi, const ControlSignal& u,
                            const CostWeights& weights, const TargetSpec& targets);

/// Indicator of {x1 < 0} in centered coordinates.
RealField left_half_indicator(const GridPtr& grid);

struct ReducedGradient {
  ControlSignal gradient;  // nu u + mu
  ControlSignal source;    // f(t_k) = -Re sum_m <lambda_m, V_u psi_m>
};

ReducedGradient reduced_gradient(const ControlSignal& u, const Trajectory& psi,
                                 const Trajectory& lambda,
                                 const KohnShamModel& model,
                                 const CostWeights& weights);

}  // namespace tdks
