#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tdks/orbitals.hpp"
#include "tdks/potentials.hpp"

using namespace tdks;

namespace {

Orbitals two_gaussians(const GridPtr& g) {
  Orbitals psi(g, 2);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->centered(i, 0);
    const double y = g->dim() == 2 ? g->centered(i, 1) : 0.0;
    const double r2 = x * x + y * y;
    psi.orbital(0)[i] = std::exp(-2.0 * r2);
    psi.orbital(1)[i] = x * std::exp(-2.0 * r2) * cplx(0.6, 0.8);
  }
  orthonormalize(psi);
  return psi;
}

}  // namespace

TEST_CASE("density of a constant orbital") {
  auto g = make_grid(2, 4.0, 8);
  Orbitals psi(g, 1);
  for (auto& z : psi.orbital(0)) z = cplx(0.3, -0.4);
  auto rho = density(psi);
  for (double v : rho.values) CHECK(v == doctest::Approx(0.25));
}

TEST_CASE("density of normalized orbitals integrates to N") {
  auto g = make_grid(2, 7.0, 32);
  auto psi = two_gaussians(g);
  auto rho = density(psi);
  double total = 0.0;
  for (double v : rho.values) total += v;
  CHECK(total * g->cell_volume() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("density ignores orbital phases") {
  auto g = make_grid(1, 5.0, 16);
  Orbitals psi(g, 2);
  for (int m = 0; m < 16; ++m) {
    const double f = std::sin(0.4 * m) + 0.1 * m;
    psi.orbital(0)[m] = f;
    psi.orbital(1)[m] = cplx(0.0, f);
  }
  auto rho = density(psi);
  for (int m = 0; m < 16; ++m) {
    const double f = std::sin(0.4 * m) + 0.1 * m;
    CHECK(rho.values[m] == doctest::Approx(2.0 * f * f));
  }
}

TEST_CASE("Hartree potential of zero density vanishes") {
  auto g = make_grid(2, 7.0, 16);
  auto kernel = build_hartree_kernel(g);
  auto v = hartree(Density(g), kernel);
  for (double x : v.values) CHECK(x == 0.0);
}

TEST_CASE("Hartree potential of a point mass is the Coulomb potential") {
  auto g = make_grid(2, 7.0, 64);
  auto kernel = build_hartree_kernel(g);
  const double h = g->spacing();
  Density rho(g);
  const std::size_t center = 32 * 64 + 32;
  rho.values[center] = 1.0 / g->cell_volume();
  auto v = hartree(rho, kernel);
  int checked = 0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double r = std::hypot(g->centered(i, 0), g->centered(i, 1));
    if (r < 3 * h || r > g->extent() / 4) continue;
    CHECK(std::abs(v.values[i] * r - 1.0) < 0.02);
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("split Hartree quadrature is spectrally accurate on a Gaussian") {
  // rho = exp(-r^2/s^2)/(pi s^2) has V(r) = sqrt(pi)/s exp(-q) I0(q), q = r^2/(2 s^2)
  const double s = 0.5;
  auto error = [&](int points, HartreeQuadrature q) {
    auto g = make_grid(2, 12.0, points);
    Density rho(g);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double r2 = std::pow(g->centered(i, 0), 2) + std::pow(g->centered(i, 1), 2);
      rho.values[i] = std::exp(-r2 / (s * s)) / (std::numbers::pi * s * s);
    }
    auto v = hartree(rho, build_hartree_kernel(g, q));
    double worst = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double r2 = std::pow(g->centered(i, 0), 2) + std::pow(g->centered(i, 1), 2);
      if (r2 > 1.5 * 1.5) continue;
      const double a = r2 / (2 * s * s);
      const double exact = std::sqrt(std::numbers::pi) / s * std::exp(-a) * std::cyl_bessel_i(0.0, a);
      worst = std::max(worst, std::abs(v.values[i] - exact));
    }
    return worst;
  };
  CHECK(error(64, HartreeQuadrature::split) < 1e-9);
  CHECK(error(128, HartreeQuadrature::split) < 1e-13);
  // the cell average converges only to first order here
  CHECK(error(128, HartreeQuadrature::cell_average) > 1e-2);
}

TEST_CASE("split Hartree kernel falls back to the cell average in 1D") {
  auto g = make_grid(1, 7.0, 32);
  auto split = build_hartree_kernel(g, HartreeQuadrature::split);
  auto cell = build_hartree_kernel(g);
  CHECK(split.split_width == 0.0);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(split.samples[i] == cell.samples[i]);
}

TEST_CASE("Hartree quadrature names round-trip") {
  for (auto q : {HartreeQuadrature::split, HartreeQuadrature::cell_average}) {
    CHECK(parse_hartree_quadrature(to_string(q)) == q);
  }
  CHECK_THROWS_AS(parse_hartree_quadrature("fmm"), std::invalid_argument);
}

TEST_CASE("Hartree potential is linear and nonnegative for nonnegative density") {
  auto g = make_grid(2, 7.0, 32);
  auto kernel = build_hartree_kernel(g);
  auto psi = two_gaussians(g);
  Density a = density(psi);
  Density b(g);
  for (std::size_t i = 0; i < g->size(); ++i) b.values[i] = std::exp(-g->centered(i, 1) * g->centered(i, 1));
  Density mix(g);
  for (std::size_t i = 0; i < g->size(); ++i) mix.values[i] = 2.5 * a.values[i] - 0.75 * b.values[i];
  auto va = hartree(a, kernel);
  auto vb = hartree(b, kernel);
  auto vm = hartree(mix, kernel);
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(vm.values[i] == doctest::Approx(2.5 * va.values[i] - 0.75 * vb.values[i]).epsilon(1e-12));
    CHECK(va.values[i] >= 0.0);
  }
}

TEST_CASE("exchange constants and values") {
  auto p2 = exchange_params(2);
  auto p3 = exchange_params(3);
  CHECK(p2.alpha == doctest::Approx(-std::sqrt(8.0 / std::numbers::pi)));
  CHECK(p3.alpha == doctest::Approx(-std::cbrt(3.0 / std::numbers::pi)));
  CHECK(exchange_value(0.0, p2) == 0.0);
  CHECK(exchange_value(1.0, p2) == doctest::Approx(-1.595769).epsilon(1e-6));
  CHECK(exchange_value(8.0, p3) == doctest::Approx(2.0 * p3.alpha));
  CHECK_THROWS_AS(exchange_params(1), std::invalid_argument);
  CHECK_THROWS_AS(exchange_params(2, -1.0), std::invalid_argument);
}

TEST_CASE("exchange rejects negative densities") {
  auto g = make_grid(1, 1.0, 8);
  Density rho(g);
  rho.values[2] = -1e-3;
  CHECK_THROWS_AS(exchange(rho, exchange_params(2)), std::invalid_argument);
}

TEST_CASE("quartic blend matches the root branch and flattens at 2R") {
  for (int n : {2, 3}) {
    for (double r : {1.0, 50.0, 1e6}) {
      CAPTURE(n);
      CAPTURE(r);
      auto p = exchange_params(n, r);
      const double e = 1.0 / n;
      const double f0 = std::pow(r, e);
      const double f1 = e * std::pow(r, e - 1.0);
      const double f2 = e * (e - 1.0) * std::pow(r, e - 2.0);
      CHECK(exchange_blend(r, p, 0) == doctest::Approx(f0).epsilon(1e-10));
      CHECK(exchange_blend(r, p, 1) == doctest::Approx(f1).epsilon(1e-10));
      CHECK(exchange_blend(r, p, 2) == doctest::Approx(f2).epsilon(1e-10));
      // at 2R only the scale of the value is available for a relative check
      CHECK(std::abs(exchange_blend(2 * r, p, 1)) < 1e-10 * std::abs(f1));
      CHECK(std::abs(exchange_blend(2 * r, p, 2)) < 1e-10 * std::abs(f2));
      CHECK(exchange_value(3 * r, p) == doctest::Approx(p.alpha * exchange_blend(2 * r, p)));
      CHECK(exchange_derivative(3 * r, p) == 0.0);
    }
  }
  CHECK_THROWS_AS(exchange_blend(1.0, exchange_params(2), 3), std::invalid_argument);
}

TEST_CASE("exchange derivative agrees with finite differences on every branch") {
  for (int n : {2, 3}) {
    auto p = exchange_params(n, 10.0);
    for (double rho : {0.05, 1.0, 7.0, 10.0 - 1e-3, 12.0, 15.0, 19.0}) {
      CAPTURE(n);
      CAPTURE(rho);
      const double d = 1e-5 * rho;
      const double fd = (exchange_value(rho + d, p) - exchange_value(rho - d, p)) / (2 * d);
      CHECK(exchange_derivative(rho, p) == doctest::Approx(fd).epsilon(1e-7));
    }
    // across the seams the derivative is continuous
    for (double seam : {10.0, 20.0}) {
      const double below = exchange_derivative(seam * (1 - 1e-9), p);
      const double above = exchange_derivative(seam * (1 + 1e-9), p);
      CHECK(std::abs(below - above) < 1e-7);
    }
  }
}

TEST_CASE("exchange is nonpositive") {
  auto p = exchange_params(2, 5.0);
  for (double rho = 0.0; rho < 30.0; rho += 0.37) CHECK(exchange_value(rho, p) <= 0.0);
}

TEST_CASE("correlation fit limits and shape") {
  CorrelationFit fit;
  CHECK(fit.value(0.0) == 0.0);
  CHECK(fit.value(1e9) == doctest::Approx(-0.1925).epsilon(1e-4 / 0.1925));
  auto p = exchange_params(2);
  for (double rho : {0.1, 1.0, 10.0}) {
    CHECK(std::abs(fit.value(rho)) < std::abs(exchange_value(rho, p)));
  }
  for (double rho = 0.0; rho < 50.0; rho += 0.5) {
    CHECK(fit.derivative(rho) <= 0.0);
    CHECK(fit.value(rho) >= -0.1925);
    const double d = 1e-6;
    const double fd = (fit.value(rho + d) - fit.value(std::max(0.0, rho - d))) /
                      (rho + d - std::max(0.0, rho - d));
    CHECK(fit.derivative(rho) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("presets parse and print") {
  CHECK(Confinement::parse("harmonic50").kappa == 50.0);
  CHECK(Confinement::parse("harmonic(2.5)").kappa == 2.5);
  CHECK(Confinement::parse("harmonic(2.5)").name() == "harmonic(2.5)");
  CHECK(Confinement::parse("doublewell").kind == Confinement::Kind::double_well);
  CHECK_THROWS_AS(Confinement::parse("harmonic(x)"), std::invalid_argument);
  CHECK_THROWS_AS(Confinement::parse("box"), std::invalid_argument);
  auto dip = ControlShape::parse("dipole(1, 0.5)");
  CHECK(dip.kind == ControlShape::Kind::dipole);
  CHECK(dip.py == 0.5);
  CHECK(ControlShape::parse(dip.name()).px == 1.0);
  CHECK_THROWS_AS(ControlShape::parse("dipole(1)"), std::invalid_argument);
}

TEST_CASE("empty stack on the harmonic preset is the confinement alone") {
  auto g = make_grid(2, 7.0, 32);
  auto model = make_model(g, Confinement::parse("harmonic50"), ControlShape::parse("quadratic"));
  auto stack = assemble_stack(Density(g), 0.0, model);
  auto total = stack.total();
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double r2 = std::pow(g->centered(i, 0), 2) + std::pow(g->centered(i, 1), 2);
    CHECK(total.values[i] == doctest::Approx(50.0 * r2).epsilon(1e-14));
  }
  CHECK(total.values[16 * 32 + 16] == 0.0);
}

TEST_CASE("stack combines the terms and the fast path agrees") {
  auto g = make_grid(2, 7.0, 32);
  auto model = make_model(g, Confinement::parse("harmonic50"), ControlShape::parse("quadratic"));
  auto rho = density(two_gaussians(g));
  const double u = 3.5;
  auto stack = assemble_stack(rho, u, model);
  auto total = stack.total();
  auto vh = hartree(rho, model.kernel);
  std::vector<double> fast(g->size()), dfast(g->size());
  total_potential_into(rho.values, u, model, fast, dfast);
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double r = rho.values[i];
    const double expected = model.v0.values[i] + u * model.vu.values[i] + vh.values[i] +
                            exchange_value(r, model.exchange) + model.correlation.value(r);
    CHECK(total.values[i] == doctest::Approx(expected).epsilon(1e-13));
    CHECK(fast[i] == doctest::Approx(expected).epsilon(1e-13));
    CHECK(stack.v_c.values[i] >= -0.1925);
    CHECK(stack.v_x.values[i] <= 0.0);
    const double d = exchange_derivative(r, model.exchange) + model.correlation.derivative(r);
    CHECK(stack.dvxc_drho.values[i] == doctest::Approx(d));
    CHECK(dfast[i] == doctest::Approx(d));
  }
}

TEST_CASE("double-well minimum along x2 = 0") {
  // golden-section search on the quartic, independent of the grid
  double a = -6.0, b = -1.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double c = b - phi * (b - a);
    const double d = a + phi * (b - a);
    if (double_well_value(c, 0.0) < double_well_value(d, 0.0)) b = d; else a = c;
  }
  const double xmin = 0.5 * (a + b);
  CHECK(xmin == doctest::Approx(-3.676).epsilon(1e-3));
  CHECK(std::abs(xmin + 3.6) < 0.1);
  // the other minimum is shallower
  CHECK(double_well_value(2.18, 0.0) > double_well_value(xmin, 0.0));

  auto g = make_grid(2, 16.0, 64);
  auto model = make_model(g, Confinement::parse("doublewell"), ControlShape::parse("dipole(1,0)"),
                          Interaction::none());
  std::size_t best = 0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    if (model.v0.values[i] < model.v0.values[best]) best = i;
  }
  CHECK(std::abs(g->centered(best, 0) - xmin) <= g->spacing());
  CHECK(std::abs(g->centered(best, 1)) < 1e-12);
}
