#pragma once

#include <memory>

#include "tdks/control.hpp"
#include "tdks/ncg.hpp"
#include "tdks/propagation.hpp"

namespace tdks {

/// Reduced control problem u -> J(Psi(u), u) on a fixed model, initial state
/// and time grid.
struct ControlProblem {
  std::shared_ptr<const KohnShamModel> model;
  Orbitals psi0;
  TimeGrid time;
  CostWeights weights;
  TargetSpec targets;
};

struct GradientEvaluation {
  CostBreakdown cost;
  ReducedGradient gradient;

  double value() const { return cost.total(); }
};

/// Forward solve and cost only.
CostBreakdown reduced_cost(const ControlProblem& problem, const ControlSignal& u);

/// Forward solve, adjoint solve and reduced gradient from a single forward
/// trajectory.
GradientEvaluation compute_gradient(const ControlProblem& problem,
                                    const ControlSignal& u);

/// Optimizer hooks: the objective evaluates compute_gradient, the inner product
/// is the discrete H1 product of the problem's time grid.
Objective make_objective(const ControlProblem& problem);
InnerProduct make_inner_product(const ControlProblem& problem);

}  // namespace tdks
