#include "tdks/problem.hpp"

#include <limits>
#include <stdexcept>

namespace tdks {

namespace {

AdjointTargets adjoint_targets(const ControlProblem& p) {
  AdjointTargets t;
  t.beta = p.weights.beta;
  t.eta = p.weights.eta;
  if (t.beta != 0.0) t.rho_d = &p.targets.rho_d;
  if (t.eta != 0.0) t.chi_a = &p.targets.chi_a;
  return t;
}

void check(const ControlProblem& p, const ControlSignal& u) {
  if (!p.model) throw std::invalid_argument("control problem has no model");
  if (!(u.grid == p.time)) throw std::invalid_argument("control is on the wrong time grid");
}

}  // namespace

CostBreakdown reduced_cost(const ControlProblem& problem, const ControlSignal& u) {
  check(problem, u);
  const Trajectory psi = solve_forward(problem.psi0, u, *problem.model);
  return evaluate_cost(psi, u, problem.weights, problem.targets);
}

GradientEvaluation compute_gradient(const ControlProblem& problem,
                                    const ControlSignal& u) {
  check(problem, u);
  GradientEvaluation out;
  const Trajectory psi = solve_forward(problem.psi0, u, *problem.model);
  out.cost = evaluate_cost(psi, u, problem.weights, problem.targets);
  const Trajectory lambda =
      solve_adjoint(psi, u, *problem.model, adjoint_targets(problem));
  out.gradient = reduced_gradient(u, psi, lambda, *problem.model, problem.weights);
  return out;
}

Objective make_objective(const ControlProblem& problem) {
  return [&problem](const Vector& values) {
    Evaluation e;
    try {
      GradientEvaluation g = compute_gradient(problem, ControlSignal(problem.time, values));
      e.value = g.value();
      e.breakdown = g.cost;
      e.gradient = std::move(g.gradient.gradient.values);
    } catch (const PropagationError&) {
      // A blown-up trial is treated as an infinitely bad point so the line
      // search backs off instead of aborting the run.
      e.value = std::numeric_limits<double>::infinity();
      e.gradient.assign(values.size(), 0.0);
    }
    return e;
  };
}

InnerProduct make_inner_product(const ControlProblem& problem) {
  const double dt = problem.time.dt();
  const double a = problem.weights.h1_weight;
  return [dt, a](const Vector& x, const Vector& y) { return h1_inner(x, y, dt, a); };
}

}  // namespace tdks
