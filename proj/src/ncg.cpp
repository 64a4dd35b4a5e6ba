#include "tdks/ncg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

namespace tdks {

namespace {

Vector axpy(const Vector& x, double a, const Vector& d) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * d[i];
  return out;
}

Vector negated(const Vector& g) {
  Vector out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = -g[i];
  return out;
}

// Minimizer of the cubic matching values and slopes at a and b, or nullopt if
// the interpolant has no usable minimum.
std::optional<double> cubic_minimizer(double a, double fa, double da, double b,
                                      double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (!(disc >= 0.0)) return std::nullopt;
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double denom = db - da + 2.0 * d2;
  if (denom == 0.0) return std::nullopt;
  const double x = b - (b - a) * (db + d2 - d1) / denom;
  if (!std::isfinite(x)) return std::nullopt;
  return x;
}

struct Trial {
  double alpha = 0.0;
  double value = 0.0;
  double slope = 0.0;
  Evaluation eval;
};

}  // namespace

void OptimizerConfig::validate() const {
  if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0)) {
    throw std::invalid_argument("optimizer: 0<c1<c2<1 violated");
  }
  if (!(gradient_tolerance > 0.0)) {
    throw std::invalid_argument("optimizer: tolerance>0 violated");
  }
  if (max_iterations < 0) throw std::invalid_argument("optimizer: max_iterations>=0 violated");
  if (max_line_search_trials < 1) {
    throw std::invalid_argument("optimizer: line_search_trials>=1 violated");
  }
  if (!(hz_eta > 0.0)) throw std::invalid_argument("optimizer: hz_eta>0 violated");
  if (!(value_noise >= 0.0)) throw std::invalid_argument("optimizer: value_noise>=0 violated");
  if (!(secant_refinement >= 0.0)) {
    throw std::invalid_argument("optimizer: secant_refinement>=0 violated");
  }
}

DirectionUpdate hager_zhang_direction(const Vector& g_new, const Vector& g_old,
                                      const Vector& d_old, const InnerProduct& inner,
                                      double hz_eta) {
  DirectionUpdate out;
  out.direction = negated(g_new);
  Vector y(g_new.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = g_new[i] - g_old[i];

  const double dy = inner(d_old, y);
  const double yy = inner(y, y);
  const double dd = inner(d_old, d_old);
  // Relative degeneracy test; <d, y> > 0 holds under strong Wolfe.
  if (!(std::abs(dy) > 1e-14 * std::sqrt(dd * yy)) || dy == 0.0) {
    out.restarted = true;
    return out;
  }
  const double beta_hz = (inner(y, g_new) - 2.0 * yy / dy * inner(d_old, g_new)) / dy;
  const double g_old_norm = std::sqrt(inner(g_old, g_old));
  const double floor_ = -1.0 / (std::sqrt(dd) * std::min(hz_eta, g_old_norm));
  out.beta = std::max(beta_hz, floor_);
  for (std::size_t i = 0; i < y.size(); ++i) out.direction[i] += out.beta * d_old[i];

  if (!(inner(out.direction, g_new) < 0.0)) {
    out.direction = negated(g_new);
    out.beta = 0.0;
    out.restarted = true;
  }
  return out;
}

LineSearchResult wolfe_line_search(const Vector& u, const Vector& d,
                                   const Evaluation& at_u, const Objective& objective,
                                   const InnerProduct& inner,
                                   const OptimizerConfig& config, double alpha0) {
  const double phi0 = at_u.value;
  const double slope0 = inner(at_u.gradient, d);
  if (!(slope0 < 0.0)) {
    throw std::invalid_argument("line search: direction is not a descent direction");
  }
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) alpha0 = 1.0;

  LineSearchResult result;
  std::optional<Trial> best;  // lowest value among Armijo points

  // Near a minimizer the decrease c1 alpha <g, d> drops below the rounding
  // error of J. A point whose value is within `noise` of J(0) then passes on the slope
  // form of the Armijo test, which is exact for quadratics (approximate
  // Wolfe conditions), and values within `noise` are interpolated by slope.
  const double noise = config.value_noise * std::abs(phi0);
  auto armijo = [&](const Trial& t) { return t.value <= phi0 + config.c1 * t.alpha * slope0; };
  auto approximate = [&](const Trial& t) {
    return std::abs(t.value - phi0) <= noise && t.slope <= (2.0 * config.c1 - 1.0) * slope0;
  };
  auto sufficient = [&](const Trial& t) {
    return std::isfinite(t.value) && (armijo(t) || approximate(t));
  };
  auto curvature = [&](const Trial& t) { return std::abs(t.slope) <= -config.c2 * slope0; };
  auto evaluate = [&](double alpha) {
    Trial t;
    t.alpha = alpha;
    t.eval = objective(axpy(u, alpha, d));
    t.value = t.eval.value;
    t.slope = inner(t.eval.gradient, d);
    ++result.evaluations;
    if (sufficient(t) && (!best || t.value < best->value)) best = t;
    return t;
  };
  auto refine = [&](Trial t) {
    if (config.secant_refinement <= 0.0 || result.evaluations >= config.max_line_search_trials ||
        std::abs(t.slope) <= -config.secant_refinement * slope0 || !(t.slope > slope0)) {
      return t;
    }
    const double alpha = t.alpha * slope0 / (slope0 - t.slope);
    if (!(alpha > 0.0) || !std::isfinite(alpha)) return t;
    Trial r = evaluate(alpha);
    return sufficient(r) && curvature(r) && r.value <= t.value ? r : t;
  };
  auto accept = [&](Trial t, bool wolfe) {
    if (wolfe) t = refine(std::move(t));
    result.alpha = t.alpha;
    result.at = std::move(t.eval);
    result.strong_wolfe = wolfe;
    return result;
  };
  auto exhausted = [&]() {
    if (best) return accept(*best, false);
    throw LineSearchError("line search failed: no sufficient decrease");
  };

  auto zoom = [&](Trial lo, Trial hi) {
    // bracket widths of the last two trials; interpolation that fails to
    // halve the bracket over two trials is replaced by bisection
    double widths[2] = {std::numeric_limits<double>::infinity(),
                        std::numeric_limits<double>::infinity()};
    while (result.evaluations < config.max_line_search_trials) {
      const double width = std::abs(hi.alpha - lo.alpha);
      if (width <= 1e-12 * std::max(1.0, std::abs(lo.alpha))) break;
      const bool stalled = width > 0.5 * widths[0];
      widths[0] = widths[1];
      widths[1] = width;
      const double left = std::min(lo.alpha, hi.alpha);
      const double right = std::max(lo.alpha, hi.alpha);
      // a wide safeguard would spoil exact minimizers near an endpoint
      const double margin = 0.01 * (right - left);
      double alpha = 0.5 * (lo.alpha + hi.alpha);
      if (stalled) {
        // keep the midpoint
      } else if (std::isfinite(hi.value) && std::abs(hi.value - lo.value) <= noise &&
          hi.slope != lo.slope) {
        // values carry no information here, interpolate the slope
        const double secant = lo.alpha - lo.slope * (hi.alpha - lo.alpha) / (hi.slope - lo.slope);
        if (std::isfinite(secant)) alpha = std::clamp(secant, left + margin, right - margin);
      } else if (std::isfinite(hi.value)) {
        if (auto c = cubic_minimizer(lo.alpha, lo.value, lo.slope, hi.alpha, hi.value,
                                     hi.slope)) {
          alpha = std::clamp(*c, left + margin, right - margin);
        }
      }
      Trial t = evaluate(alpha);
      if (!sufficient(t) || (t.value >= lo.value && !approximate(t))) {
        hi = std::move(t);
        continue;
      }
      if (curvature(t)) return accept(std::move(t), true);
      if (t.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
      lo = std::move(t);
    }
    return exhausted();
  };

  Trial prev;
  prev.alpha = 0.0;
  prev.value = phi0;
  prev.slope = slope0;
  double alpha = alpha0;
  for (int i = 1;; ++i) {
    if (result.evaluations >= config.max_line_search_trials) return exhausted();
    Trial t = evaluate(alpha);
    if (!sufficient(t) || (i > 1 && t.value >= prev.value && !approximate(t))) {
      return zoom(std::move(prev), std::move(t));
    }
    if (curvature(t)) return accept(std::move(t), true);
    if (t.slope >= 0.0) return zoom(std::move(t), std::move(prev));
    prev = std::move(t);
    alpha *= 4.0;
  }
}

std::string to_string(OptimizerStatus status) {
  switch (status) {
    case OptimizerStatus::converged: return "converged";
    case OptimizerStatus::max_iter: return "max_iter";
    case OptimizerStatus::line_search_failed: return "line_search_failed";
  }
  return "unknown";
}

std::string iteration_log_header() {
  return "iter,J,J_beta,J_eta,J_nu,grad_norm,alpha,ls_evals";
}

std::string iteration_log_line(const IterationRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d",
                r.iteration, r.value, r.breakdown.tracking, r.breakdown.terminal,
                r.breakdown.regularization, r.gradient_norm, r.alpha,
                r.line_search_evaluations);
  return buf;
}

OptimizerResult minimize(const Vector& u0, const Objective& objective,
                         const InnerProduct& inner, const OptimizerConfig& config,
                         const IterationCallback& on_iteration) {
  config.validate();
  OptimizerResult result;
  result.u = u0;
  Evaluation current = objective(result.u);

  auto record = [&](double alpha, int evals) {
    IterationRecord r;
    r.iteration = static_cast<int>(result.history.size());
    r.value = current.value;
    r.breakdown = current.breakdown;
    r.gradient_norm = std::sqrt(inner(current.gradient, current.gradient));
    r.alpha = alpha;
    r.line_search_evaluations = evals;
    result.history.push_back(r);
    if (on_iteration) on_iteration(r);
    return r.gradient_norm;
  };

  double grad_norm = record(0.0, 0);
  Vector direction;
  Vector previous_gradient;
  double previous_value = std::numeric_limits<double>::quiet_NaN();
  double previous_alpha = 0.0;

  for (int n = 0;; ++n) {
    if (grad_norm < config.gradient_tolerance) {
      result.status = OptimizerStatus::converged;
      break;
    }
    if (n >= config.max_iterations) {
      result.status = OptimizerStatus::max_iter;
      break;
    }
    if (n == 0 || config.steepest_descent) {
      direction = negated(current.gradient);
    } else {
      direction = hager_zhang_direction(current.gradient, previous_gradient, direction,
                                        inner, config.hz_eta)
                      .direction;
    }
    const double slope = inner(current.gradient, direction);

    double alpha0;
    if (n == 0) {
      // Hager and Zhang's starting guess: a small fraction of the step that
      // would drive a linear model of J to zero.
      alpha0 = config.initial_step > 0.0 ? config.initial_step
                                         : 0.01 * std::abs(current.value) / -slope;
    } else {
      // Assume the decrease of the last step repeats.
      alpha0 = 2.0 * (current.value - previous_value) / slope;
      if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) alpha0 = previous_alpha;
    }
    if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) alpha0 = 1.0;

    LineSearchResult step;
    try {
      step = wolfe_line_search(result.u, direction, current, objective, inner, config,
                               alpha0);
    } catch (const LineSearchError& e) {
      result.status = OptimizerStatus::line_search_failed;
      result.message = e.what();
      break;
    }
    for (std::size_t i = 0; i < result.u.size(); ++i) {
      result.u[i] += step.alpha * direction[i];
    }
    previous_gradient = std::move(current.gradient);
    previous_value = current.value;
    previous_alpha = step.alpha;
    current = std::move(step.at);
    grad_norm = record(step.alpha, step.evaluations);
  }
  result.final = std::move(current);
  return result;
}

}  // namespace tdks
