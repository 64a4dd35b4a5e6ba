#include "tdks/propagation.hpp"

#include <cmath>
#include <string>

#include "tdks/kernels.hpp"

namespace tdks {

namespace {

namespace k = kernels::omp;

constexpr cplx kI{0.0, 1.0};

void check_finite(const Orbitals& psi, const char* what, int step) {
  const double m = psi.max_modulus();
  if (std::isnan(m) || m > kBlowUpModulus) {
    throw PropagationError(std::string(what) + ": blow-up at step " +
                           std::to_string(step) + " (max |psi| = " +
                           std::to_string(m) + ")");
  }
}

// Shared machinery of the forward and adjoint splittings for one dt.
class SplitStepper {
 public:
  SplitStepper(const KohnShamModel& model, double dt)
      : model_(model), dt_(dt), size_(model.grid->size()) {
    full_.resize(size_);
    half_back_.resize(size_);
    k::fill_phase(model.grid->k_squared(), dt, full_);
    k::fill_phase(model.grid->k_squared(), -0.5 * dt, half_back_);
  }

  double dt() const { return dt_; }
  const KohnShamModel& model() const { return model_; }
  std::size_t size() const { return size_; }

  static void apply(Orbitals& psi, std::span<const cplx> phase) {
    for (int j = 0; j < psi.count(); ++j) k::multiply(phase, psi.orbital(j));
  }

  void kinetic(Orbitals& psi, std::span<const cplx> table) const {
    const Grid& grid = *model_.grid;
    for (int j = 0; j < psi.count(); ++j) {
      auto o = psi.orbital(j);
      grid.forward(o);
      k::multiply(table, o);
      grid.inverse(o);
    }
  }

  std::span<const cplx> full() const { return full_; }
  std::span<const cplx> half_back() const { return half_back_; }

 private:
  const KohnShamModel& model_;
  double dt_;
  std::size_t size_;
  std::vector<cplx> full_;
  std::vector<cplx> half_back_;
};

// State carried between forward steps: the density and the half-step phase
// exp(-i dt/2 V) of the current node. The phase at the end of one step is the
// phase at the start of the next, so each node's phase is computed once.
struct ForwardCarry {
  std::vector<double> rho;
  std::vector<double> potential;
  std::vector<cplx> phase;

  void prepare(const Orbitals& psi, double u, const SplitStepper& stepper) {
    rho.resize(stepper.size());
    potential.resize(stepper.size());
    phase.resize(stepper.size());
    density_into(psi, rho);
    refresh(u, stepper);
  }
  void refresh(double u, const SplitStepper& stepper) {
    total_potential_into(rho, u, stepper.model(), potential);
    k::fill_phase(potential, 0.5 * stepper.dt(), phase);
  }
};

void forward_step(SplitStepper& stepper, Orbitals& psi, double u_next,
                  ForwardCarry& carry) {
  SplitStepper::apply(psi, carry.phase);
  stepper.kinetic(psi, stepper.full());
  density_into(psi, carry.rho);
  carry.refresh(u_next, stepper);
  SplitStepper::apply(psi, carry.phase);
}

// out += scale * g, g the off-diagonal adjoint source. `w` and `s` are
// scratch arrays of the orbital size.
void accumulate_source(const Orbitals& psi, const Orbitals& lambda,
                       std::span<const double> rho,
                       std::span<const double> rho_d, double beta,
                       const KohnShamModel& model,
                       std::span<const double> dvxc, cplx scale,
                       Orbitals& out, std::vector<double>& w,
                       std::vector<double>& s) {
  const std::size_t n = psi.orbital_size();
  w.assign(n, 0.0);
  for (int j = 0; j < psi.count(); ++j) {
    k::add_real_overlap(psi.orbital(j), lambda.orbital(j), w);
  }
  s.assign(n, 0.0);
  if (model.interaction.hartree) {
    for (std::size_t i = 0; i < n; ++i) w[i] *= 2.0;
    hartree_into(w, model.kernel, s);
    for (std::size_t i = 0; i < n; ++i) w[i] *= 0.5;
  }
  if (!dvxc.empty()) {
    for (std::size_t i = 0; i < n; ++i) s[i] += 2.0 * dvxc[i] * w[i];
  }
  if (beta != 0.0) {
    for (std::size_t i = 0; i < n; ++i) s[i] -= 2.0 * beta * (rho[i] - rho_d[i]);
  }
  for (int m = 0; m < psi.count(); ++m) {
    k::add_scaled_product(s, scale, psi.orbital(m), out.orbital(m));
  }
}

// Node data of the forward trajectory used by the adjoint splitting.
struct ForwardNode {
  std::vector<double> rho;
  std::vector<cplx> phase;  // exp(+i dt/2 V(Psi(t_k), t_k))
};

ForwardNode forward_node(const Orbitals& psi, double u, const SplitStepper& stepper) {
  ForwardNode node;
  const std::size_t n = psi.orbital_size();
  node.rho.resize(n);
  node.phase.resize(n);
  std::vector<double> potential(n);
  density_into(psi, node.rho);
  total_potential_into(node.rho, u, stepper.model(), potential);
  k::fill_phase(potential, -0.5 * stepper.dt(), node.phase);
  return node;
}

bool has_xc(const KohnShamModel& model) {
  return model.interaction.exchange || model.interaction.correlation;
}

// Scratch reused across adjoint steps.
struct AdjointWork {
  Orbitals psi_mid;
  Orbitals source;
  std::vector<double> rho_mid;
  std::vector<double> rho_d_mid;
  std::vector<double> dvxc;
  std::vector<double> w;
  std::vector<double> s;

  explicit AdjointWork(const Orbitals& like)
      : psi_mid(like.grid(), like.count()), source(like.grid(), like.count()) {}
};

// lambda holds lambda(t_{k+1}) on entry and lambda(t_k) on return.
void adjoint_step(SplitStepper& stepper, Orbitals& lambda, const Orbitals& psi_k,
                  const Orbitals& psi_next, const ForwardNode& node_k,
                  const ForwardNode& node_next, const AdjointTargets& targets,
                  int k, AdjointWork& work) {
  const KohnShamModel& model = stepper.model();
  const double dt = stepper.dt();
  const std::size_t n = psi_k.orbital_size();

  SplitStepper::apply(lambda, node_next.phase);
  stepper.kinetic(lambda, stepper.half_back());

  {
    auto mid = work.psi_mid.data();
    auto a = psi_k.data();
    auto b = psi_next.data();
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (a[i] + b[i]);
  }
  work.rho_mid.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    work.rho_mid[i] = 0.5 * (node_k.rho[i] + node_next.rho[i]);
  }
  if (targets.beta != 0.0) {
    const auto& d0 = (*targets.rho_d)[k].values;
    const auto& d1 = (*targets.rho_d)[k + 1].values;
    work.rho_d_mid.resize(n);
    for (std::size_t i = 0; i < n; ++i) work.rho_d_mid[i] = 0.5 * (d0[i] + d1[i]);
  }
  std::span<const double> dvxc;
  if (has_xc(model)) {
    work.dvxc.resize(n);
    xc_derivative_into(work.rho_mid, model, work.dvxc);
    dvxc = work.dvxc;
  }
  std::fill(work.source.data().begin(), work.source.data().end(), cplx{});
  accumulate_source(work.psi_mid, lambda, work.rho_mid, work.rho_d_mid, targets.beta,
                    model, dvxc, 1.0, work.source, work.w, work.s);
  k::axpy(kI * dt, work.source.data(), lambda.data());

  stepper.kinetic(lambda, stepper.half_back());
  SplitStepper::apply(lambda, node_k.phase);
}

void validate_targets(const Trajectory& psi, const AdjointTargets& targets) {
  if (targets.beta < 0.0 || targets.eta < 0.0) {
    throw std::invalid_argument("solve_adjoint: weights must be non-negative");
  }
  if (targets.beta != 0.0 &&
      (targets.rho_d == nullptr ||
       targets.rho_d->size() != static_cast<std::size_t>(psi.time.nodes()))) {
    throw std::invalid_argument("solve_adjoint: rho_d must have one density per node");
  }
  if (targets.eta != 0.0 && targets.chi_a == nullptr) {
    throw std::invalid_argument("solve_adjoint: chi_A required when eta > 0");
  }
}

}  // namespace

Orbitals strang_step_forward(const Orbitals& psi, double u_now, double u_next,
                             double dt, const KohnShamModel& model) {
  require_same_grid(*psi.grid(), *model.grid, "strang_step_forward");
  if (dt == 0.0) return psi;
  SplitStepper stepper(model, dt);
  Orbitals out = psi;
  ForwardCarry carry;
  carry.prepare(out, u_now, stepper);
  forward_step(stepper, out, u_next, carry);
  check_finite(out, "strang_step_forward", 1);
  return out;
}

Orbitals propagate_forward(const Orbitals& psi0, const ControlSignal& u,
                           const KohnShamModel& model,
                           const NodeObserver& observer) {
  require_same_grid(*psi0.grid(), *model.grid, "propagate_forward");
  const TimeGrid& tg = u.grid;
  SplitStepper stepper(model, tg.dt());
  Orbitals psi = psi0;
  ForwardCarry carry;
  carry.prepare(psi, u[0], stepper);
  if (observer) observer(0, psi);
  for (int step = 1; step <= tg.steps; ++step) {
    forward_step(stepper, psi, u[step], carry);
    check_finite(psi, "solve_forward", step);
    if (observer) observer(step, psi);
  }
  return psi;
}

Trajectory solve_forward(const Orbitals& psi0, const ControlSignal& u,
                         const KohnShamModel& model) {
  Trajectory traj;
  traj.time = u.grid;
  traj.direction = Trajectory::Direction::forward;
  traj.nodes.reserve(u.grid.nodes());
  propagate_forward(psi0, u, model,
                    [&](int, const Orbitals& psi) { traj.nodes.push_back(psi); });
  return traj;
}

Orbitals adjoint_source(const Orbitals& psi, const Orbitals& lambda,
                        const Density* rho_d, double beta,
                        const KohnShamModel& model, const PotentialStack& stack) {
  require_compatible(psi, lambda, "adjoint_source");
  require_same_grid(*psi.grid(), *model.grid, "adjoint_source");
  if (beta != 0.0 && rho_d == nullptr) {
    throw std::invalid_argument("adjoint_source: rho_d required when beta > 0");
  }
  const Density rho = density(psi);
  Orbitals out(psi.grid(), psi.count());
  std::span<const double> target;
  if (beta != 0.0) target = rho_d->values;
  std::vector<double> w;
  std::vector<double> s;
  accumulate_source(psi, lambda, rho.values, target, beta, model,
                    stack.dvxc_drho.values, 1.0, out, w, s);
  return out;
}

Orbitals strang_step_adjoint(const Orbitals& lambda_next, int k,
                             const Trajectory& psi, const ControlSignal& u,
                             const KohnShamModel& model,
                             const AdjointTargets& targets) {
  if (k < 0 || k + 1 >= static_cast<int>(psi.nodes.size())) {
    throw std::out_of_range("strang_step_adjoint: missing forward snapshot for step " +
                            std::to_string(k));
  }
  validate_targets(psi, targets);
  SplitStepper stepper(model, psi.time.dt());
  const ForwardNode node_k = forward_node(psi.at(k), u[k], stepper);
  const ForwardNode node_next = forward_node(psi.at(k + 1), u[k + 1], stepper);
  Orbitals lambda = lambda_next;
  AdjointWork work(lambda);
  adjoint_step(stepper, lambda, psi.at(k), psi.at(k + 1), node_k, node_next, targets, k,
               work);
  return lambda;
}

Trajectory solve_adjoint(const Trajectory& psi, const ControlSignal& u,
                         const KohnShamModel& model,
                         const AdjointTargets& targets) {
  const TimeGrid& tg = psi.time;
  if (psi.nodes.size() != static_cast<std::size_t>(tg.nodes())) {
    throw std::invalid_argument("solve_adjoint: incomplete forward trajectory");
  }
  if (!(u.grid == tg)) throw std::invalid_argument("solve_adjoint: time grid mismatch");
  validate_targets(psi, targets);

  const Orbitals& final_state = psi.at(tg.steps);
  Trajectory out;
  out.time = tg;
  out.direction = Trajectory::Direction::adjoint;
  out.nodes.assign(tg.nodes(), Orbitals(final_state.grid(), final_state.count()));

  if (targets.beta == 0.0 && targets.eta == 0.0) return out;

  Orbitals lambda(final_state.grid(), final_state.count());
  if (targets.eta != 0.0) {
    const auto& chi = targets.chi_a->values;
    for (int m = 0; m < lambda.count(); ++m) {
      auto dst = lambda.orbital(m);
      auto src = final_state.orbital(m);
      for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = -kI * targets.eta * chi[i] * src[i];
      }
    }
  }
  out.nodes[tg.steps] = lambda;

  SplitStepper stepper(model, tg.dt());
  AdjointWork work(lambda);
  ForwardNode node_next = forward_node(psi.at(tg.steps), u[tg.steps], stepper);
  for (int k = tg.steps - 1; k >= 0; --k) {
    ForwardNode node_k = forward_node(psi.at(k), u[k], stepper);
    adjoint_step(stepper, lambda, psi.at(k), psi.at(k + 1), node_k, node_next, targets, k,
                 work);
    check_finite(lambda, "solve_adjoint", tg.steps - k);
    out.nodes[k] = lambda;
    node_next = std::move(node_k);
  }
  return out;
}

}  // namespace tdks
