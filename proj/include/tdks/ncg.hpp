#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdks/control.hpp"

namespace tdks {

// Nonlinear conjugate gradients with Hager-Zhang directions and a strong-Wolfe
// line search. The optimizer is written against plain vectors and an inner
// product so it can be exercised on small model problems; the control problem
// plugs in the discrete H1 product.

using Vector = std::vector<double>;
using InnerProduct = std::function<double(const Vector&, const Vector&)>;

struct Evaluation {
  double value = 0.0;
  Vector gradient;
  CostBreakdown breakdown;  // optional detail, left zero by model problems
};

using Objective = std::function<Evaluation(const Vector&)>;

struct OptimizerConfig {
  int max_iterations = 200;
  double gradient_tolerance = 5e-7;
  double c1 = 1e-4;
  double c2 = 0.1;
  int max_line_search_trials = 30;
  double hz_eta = 0.01;       // lower-bound parameter of the HZ truncation
  double initial_step = 1.0;  // first trial step; <= 0 picks 0.01 J0 / |<g, d>|
  bool steepest_descent = false;
  /// Relative rounding level of J below which decreases are judged from slopes.
  double value_noise = 1e-12;
  /// An accepted step whose slope still exceeds this fraction of the initial
  /// slope gets one extra trial at the slope secant minimizer, which is the
  /// exact line minimizer on quadratics. 0 turns it off.
  double secant_refinement = 1e-3;

  void validate() const;
};

struct DirectionUpdate {
  Vector direction;
  double beta = 0.0;
  bool restarted = false;
};

/// d_new = -g_new + beta+ d_old with the truncated Hager-Zhang beta. Restarts
/// with -g_new when <d_old, y> is degenerate or the result is not a descent
/// direction.
DirectionUpdate hager_zhang_direction(const Vector& g_new, const Vector& g_old,
                                      const Vector& d_old, const InnerProduct& inner,
                                      double hz_eta = 0.01);

class LineSearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LineSearchResult {
  double alpha = 0.0;
  Evaluation at;
  int evaluations = 0;
  bool strong_wolfe = false;  // false when the best Armijo point was returned
};

/// Strong-Wolfe search along d from u (bracketing phase followed by a zoom with
/// safeguarded cubic interpolation). Throws std::invalid_argument when d is not
/// a descent direction, before evaluating anything, and LineSearchError when
/// no sufficient decrease is found.
LineSearchResult wolfe_line_search(const Vector& u, const Vector& d,
                                   const Evaluation& at_u, const Objective& objective,
                                   const InnerProduct& inner,
                                   const OptimizerConfig& config, double alpha0);

enum class OptimizerStatus { converged, max_iter, line_search_failed };

std::string to_string(OptimizerStatus status);

struct IterationRecord {
  int iteration = 0;
  double value = 0.0;
  CostBreakdown breakdown;
  double gradient_norm = 0.0;
  double alpha = 0.0;  // step that produced this iterate, 0 for the start
  int line_search_evaluations = 0;
};

/// "iter,J,J_beta,J_eta,J_nu,grad_norm,alpha,ls_evals"
std::string iteration_log_header();
std::string iteration_log_line(const IterationRecord& record);

struct OptimizerResult {
  OptimizerStatus status = OptimizerStatus::max_iter;
  Vector u;
  Evaluation final;
  std::vector<IterationRecord> history;  // entry 0 is the starting point
  std::string message;

  int iterations() const { return static_cast<int>(history.size()) - 1; }
};

using IterationCallback = std::function<void(const IterationRecord&)>;

OptimizerResult minimize(const Vector& u0, const Objective& objective,
                         const InnerProduct& inner, const OptimizerConfig& config,
                         const IterationCallback& on_iteration = {});

}  // namespace tdks
