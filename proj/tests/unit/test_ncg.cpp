#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tdks/ncg.hpp"

using namespace tdks;

namespace {

double euclid(const Vector& a, const Vector& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// J(x) = 1/2 x^T A x - b^T x with a fixed SPD matrix.
struct Quadratic {
  double a[3][3] = {{4.0, 1.0, 0.5}, {1.0, 3.0, -0.2}, {0.5, -0.2, 2.0}};
  double b[3] = {1.0, -2.0, 0.5};
  int calls = 0;

  Evaluation operator()(const Vector& x) {
    ++calls;
    Evaluation e;
    e.gradient.assign(3, 0.0);
    double quad = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) e.gradient[i] += a[i][j] * x[j];
      quad += x[i] * e.gradient[i];
      e.gradient[i] -= b[i];
    }
    e.value = 0.5 * quad - euclid(Vector(b, b + 3), x);
    return e;
  }
};

// Independent solve of A x = b by Cramer's rule.
Vector quadratic_minimizer(const Quadratic& q) {
  auto det = [](const double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double d = det(q.a);
  Vector x(3);
  for (int c = 0; c < 3; ++c) {
    double m[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] = j == c ? q.b[i] : q.a[i][j];
    }
    x[c] = det(m) / d;
  }
  return x;
}

}  // namespace

TEST_CASE("optimizer config validation") {
  OptimizerConfig c;
  CHECK_NOTHROW(c.validate());
  c.c1 = 0.5;
  c.c2 = 0.4;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = OptimizerConfig{};
  c.gradient_tolerance = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("NCG terminates on a three-dof quadratic") {
  Quadratic q;
  OptimizerConfig config;
  config.gradient_tolerance = 1e-10;
  auto result = minimize(Vector(3, 0.0), std::ref(q), euclid, config);
  CHECK(result.status == OptimizerStatus::converged);
  CHECK(result.iterations() <= 4);
  const auto x = quadratic_minimizer(q);
  for (int i = 0; i < 3; ++i) CHECK(result.u[i] == doctest::Approx(x[i]).epsilon(1e-9));
  for (std::size_t k = 1; k < result.history.size(); ++k) {
    CHECK(result.history[k].value <= result.history[k - 1].value);
  }
}

TEST_CASE("steepest descent mode still converges on the quadratic") {
  Quadratic q;
  OptimizerConfig config;
  config.gradient_tolerance = 1e-8;
  config.steepest_descent = true;
  config.max_iterations = 500;
  auto result = minimize(Vector(3, 0.0), std::ref(q), euclid, config);
  CHECK(result.status == OptimizerStatus::converged);
  const auto x = quadratic_minimizer(q);
  for (int i = 0; i < 3; ++i) CHECK(result.u[i] == doctest::Approx(x[i]).epsilon(1e-6));
}

TEST_CASE("a stationary start returns immediately") {
  Quadratic q;
  int seen = 0;
  auto result = minimize(quadratic_minimizer(q), std::ref(q), euclid, OptimizerConfig{},
                         [&](const IterationRecord&) { ++seen; });
  CHECK(result.status == OptimizerStatus::converged);
  CHECK(result.iterations() == 0);
  CHECK(seen == 1);
  CHECK(q.calls == 1);
}

TEST_CASE("iteration limit is reported") {
  Quadratic q;
  OptimizerConfig config;
  config.gradient_tolerance = 1e-14;
  config.max_iterations = 1;
  auto result = minimize(Vector(3, 0.0), std::ref(q), euclid, config);
  CHECK(result.status == OptimizerStatus::max_iter);
  CHECK(result.iterations() == 1);
}

TEST_CASE("runs are deterministic") {
  Quadratic q1, q2;
  OptimizerConfig config;
  config.gradient_tolerance = 1e-12;
  auto a = minimize(Vector{0.3, -1.0, 2.0}, std::ref(q1), euclid, config);
  auto b = minimize(Vector{0.3, -1.0, 2.0}, std::ref(q2), euclid, config);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t k = 0; k < a.history.size(); ++k) {
    CHECK(iteration_log_line(a.history[k]) == iteration_log_line(b.history[k]));
  }
}

TEST_CASE("Hager-Zhang direction") {
  SUBCASE("degenerate curvature restarts with -g") {
    Vector g_new{1.0, 2.0}, g_old{1.0, 2.0}, d{-1.0, 0.5};
    auto up = hager_zhang_direction(g_new, g_old, d, euclid);
    CHECK(up.restarted);
    CHECK(up.direction == Vector{-1.0, -2.0});
  }
  SUBCASE("matches the closed-form beta") {
    Vector g_new{0.2, -0.1}, g_old{1.0, 0.5}, d{-1.0, -0.4};
    Vector y{g_new[0] - g_old[0], g_new[1] - g_old[1]};
    const double dy = euclid(d, y);
    const double beta = (euclid(y, g_new) - 2.0 * euclid(y, y) / dy * euclid(d, g_new)) / dy;
    auto up = hager_zhang_direction(g_new, g_old, d, euclid);
    CHECK_FALSE(up.restarted);
    CHECK(up.beta == doctest::Approx(std::max(beta, -1.0 / (std::sqrt(euclid(d, d)) * 0.01))));
    CHECK(up.direction[0] == doctest::Approx(-g_new[0] + up.beta * d[0]));
    CHECK(euclid(up.direction, g_new) < 0.0);
  }
  SUBCASE("truncation bounds beta from below") {
    Vector g_new{0.0, 1.0}, g_old{0.001, 0.0}, d{-50.0, 0.0};
    auto up = hager_zhang_direction(g_new, g_old, d, euclid, 0.01);
    const double floor_ = -1.0 / (50.0 * std::min(0.01, 0.001));
    CHECK(up.beta >= floor_ - 1e-12);
  }
}

TEST_CASE("line search on a one-dimensional quadratic") {
  for (double target : {0.5, 3.0, 40.0}) {
    for (double alpha0 : {0.01, 1.0, 100.0}) {
      CAPTURE(target);
      CAPTURE(alpha0);
      Objective f = [target](const Vector& x) {
        Evaluation e;
        e.value = (x[0] - target) * (x[0] - target);
        e.gradient = {2.0 * (x[0] - target)};
        return e;
      };
      Vector u{0.0}, d{1.0};
      auto at = f(u);
      auto r = wolfe_line_search(u, d, at, f, euclid, OptimizerConfig{}, alpha0);
      CHECK(r.alpha >= 0.5 * target);
      CHECK(r.alpha <= 1.5 * target);
      CHECK(r.at.value <= at.value + 1e-4 * r.alpha * euclid(at.gradient, d));
      CHECK(r.strong_wolfe);
    }
  }
}

TEST_CASE("secant refinement lands on the quadratic line minimizer") {
  Objective f = [](const Vector& x) {
    return Evaluation{(x[0] - 3.0) * (x[0] - 3.0), {2.0 * (x[0] - 3.0)}, {}};
  };
  OptimizerConfig config;
  // 2.8 already satisfies the strong Wolfe conditions
  auto refined = wolfe_line_search({0.0}, {1.0}, f({0.0}), f, euclid, config, 2.8);
  CHECK(refined.alpha == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(refined.evaluations == 2);
  config.secant_refinement = 0.0;
  auto plain = wolfe_line_search({0.0}, {1.0}, f({0.0}), f, euclid, config, 2.8);
  CHECK(plain.alpha == 2.8);
  CHECK(plain.evaluations == 1);
}

TEST_CASE("line search rejects ascent directions before evaluating") {
  int calls = 0;
  Objective f = [&](const Vector& x) {
    ++calls;
    return Evaluation{x[0] * x[0], {2 * x[0]}, {}};
  };
  Vector u{1.0};
  auto at = Evaluation{1.0, {2.0}, {}};
  CHECK_THROWS_AS(wolfe_line_search(u, {1.0}, at, f, euclid, OptimizerConfig{}, 1.0),
                  std::invalid_argument);
  CHECK(calls == 0);
}

TEST_CASE("line search treats infinite values as too long a step") {
  Objective f = [](const Vector& x) {
    Evaluation e;
    if (x[0] > 2.0) {
      e.value = std::numeric_limits<double>::infinity();
      e.gradient = {0.0};
    } else {
      e.value = (x[0] - 1.0) * (x[0] - 1.0);
      e.gradient = {2.0 * (x[0] - 1.0)};
    }
    return e;
  };
  Vector u{0.0};
  auto at = f(u);
  auto r = wolfe_line_search(u, {1.0}, at, f, euclid, OptimizerConfig{}, 50.0);
  CHECK(r.alpha <= 2.0);
  CHECK(r.at.value < at.value);
}

TEST_CASE("line search failure is reported by minimize") {
  // the reported gradient points the wrong way and every step raises J by
  // more than its rounding level
  Objective f = [](const Vector& x) {
    return Evaluation{x[0] == 0.0 ? 1.0 : 1.001 + x[0] * x[0], {-1.0}, {}};
  };
  OptimizerConfig config;
  config.max_line_search_trials = 8;
  CHECK_THROWS_AS(wolfe_line_search({0.0}, {1.0}, f({0.0}), f, euclid, config, 1.0),
                  LineSearchError);
  auto result = minimize({0.0}, f, euclid, config);
  CHECK(result.status == OptimizerStatus::line_search_failed);
  CHECK(result.message.find("line search failed") != std::string::npos);
}

TEST_CASE("increases below the value noise are not held against a step") {
  // J rises by 1e-13 relative for every step while the slope stays negative
  Objective f = [](const Vector& x) {
    return Evaluation{x[0] == 0.0 ? 1.0 : 1.0 + 1e-13, {-1.0}, {}};
  };
  OptimizerConfig config;
  auto r = wolfe_line_search({0.0}, {1.0}, f({0.0}), f, euclid, config, 1.0);
  CHECK(r.alpha > 0.0);
  config.value_noise = 0.0;
  CHECK_THROWS_AS(wolfe_line_search({0.0}, {1.0}, f({0.0}), f, euclid, config, 1.0),
                  LineSearchError);
}

TEST_CASE("status strings and log format") {
  CHECK(to_string(OptimizerStatus::converged) == "converged");
  CHECK(to_string(OptimizerStatus::max_iter) == "max_iter");
  CHECK(to_string(OptimizerStatus::line_search_failed) == "line_search_failed");
  CHECK(iteration_log_header() == "iter,J,J_beta,J_eta,J_nu,grad_norm,alpha,ls_evals");
  IterationRecord r;
  r.iteration = 3;
  r.value = 0.5;
  r.line_search_evaluations = 2;
  CHECK(iteration_log_line(r) == "3,0.5,0,0,0,0,0,2");
}
