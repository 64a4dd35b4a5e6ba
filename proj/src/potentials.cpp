#include "tdks/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "tdks/kernels.hpp"

namespace tdks {

Density density(const Orbitals& orbitals) {
  Density rho(orbitals.grid());
  density_into(orbitals, rho.values);
  return rho;
}

void density_into(const Orbitals& orbitals, std::span<double> rho) {
  std::fill(rho.begin(), rho.end(), 0.0);
  for (int j = 0; j < orbitals.count(); ++j) {
    kernels::omp::add_density(orbitals.orbital(j), 1.0, rho);
  }
}

void hartree_into(std::span<const double> rho, const HartreeKernel& kernel,
                  std::span<double> out) {
  const Grid& grid = *kernel.grid;
  thread_local AlignedComplexVector work;
  work.assign(rho.begin(), rho.end());
  grid.forward(work);
  kernels::omp::multiply(kernel.coefficients, work);
  grid.inverse(work);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = work[i].real();
}

RealField hartree(const Density& rho, const HartreeKernel& kernel) {
  require_same_grid(*rho.grid, *kernel.grid, "hartree");
  RealField out(rho.grid);
  hartree_into(rho.values, kernel, out.values);
  return out;
}

// ---------------------------------------------------------------------------

ExchangeParams exchange_params(int dim, double cutoff) {
  if (!(cutoff > 0.0)) throw std::invalid_argument("exchange cutoff must be positive");
  ExchangeParams p;
  p.dim = dim;
  p.cutoff = cutoff;
  if (dim == 2) {
    p.alpha = -std::sqrt(8.0 / std::numbers::pi);
  } else if (dim == 3) {
    p.alpha = -std::cbrt(3.0 / std::numbers::pi);
  } else {
    throw std::invalid_argument("LDA exchange is defined for dimension 2 or 3");
  }
  return p;
}

double exchange_blend(double rho, const ExchangeParams& params, int order) {
  const double n = params.dim;
  const double r = params.cutoff;
  const double n2 = n * n;
  // p(rho) = R^(1/n) * q(s) with s = rho / R
  const double c4 = (n + 1.0) / (4.0 * n2);
  const double c3 = -(4.0 * n + 5.0) / (3.0 * n2);
  const double c2 = 2.0 * (n + 2.0) / n2;
  const double c1 = -4.0 / n2;
  const double c0 = (12.0 * n2 - 11.0 * n + 17.0) / (12.0 * n2);
  const double s = rho / r;
  const double scale = std::pow(r, 1.0 / n);
  switch (order) {
    case 0:
      return scale * ((((c4 * s + c3) * s + c2) * s + c1) * s + c0);
    case 1:
      return scale / r * (((4.0 * c4 * s + 3.0 * c3) * s + 2.0 * c2) * s + c1);
    case 2:
      return scale / (r * r) * ((12.0 * c4 * s + 6.0 * c3) * s + 2.0 * c2);
    default:
      throw std::invalid_argument("exchange_blend: order must be 0, 1 or 2");
  }
}

namespace {

double nth_root(double rho, int n) { return n == 2 ? std::sqrt(rho) : std::cbrt(rho); }

}  // namespace

double exchange_value(double rho, const ExchangeParams& params) {
  const double r = params.cutoff;
  if (rho <= r) return params.alpha * nth_root(rho, params.dim);
  if (rho < 2.0 * r) return params.alpha * exchange_blend(rho, params);
  return params.alpha * exchange_blend(2.0 * r, params);
}

double exchange_derivative(double rho, const ExchangeParams& params) {
  const double r = params.cutoff;
  // rho^(1/n - 1) diverges at zero. It only enters the adjoint source as
  // dV/drho * Re(psi conj(lambda)) * psi, which vanishes with psi, so the
  // value at exactly zero density is irrelevant and set to 0.
  if (rho <= 0.0) return 0.0;
  if (rho <= r) return params.alpha / params.dim * nth_root(rho, params.dim) / rho;
  if (rho < 2.0 * r) return params.alpha * exchange_blend(rho, params, 1);
  return 0.0;
}

std::pair<RealField, RealField> exchange(const Density& rho,
                                         const ExchangeParams& params) {
  RealField v(rho.grid);
  RealField dv(rho.grid);
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    const double value = rho.values[i];
    if (value < 0.0) throw std::invalid_argument("exchange: negative density");
    v.values[i] = exchange_value(value, params);
    dv.values[i] = exchange_derivative(value, params);
  }
  return {std::move(v), std::move(dv)};
}

std::pair<RealField, RealField> correlation(const Density& rho,
                                            const CorrelationFit& fit) {
  RealField v(rho.grid);
  RealField dv(rho.grid);
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    v.values[i] = fit.value(rho.values[i]);
    dv.values[i] = fit.derivative(rho.values[i]);
  }
  return {std::move(v), std::move(dv)};
}

// ---------------------------------------------------------------------------

namespace {

double parse_number(const std::string& text, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) {
    throw std::invalid_argument("bad number '" + text + "' in " + context);
  }
  return v;
}

std::string number_text(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

Confinement Confinement::parse(const std::string& name) {
  Confinement c;
  if (name == "harmonic50") {
    c.kind = Kind::harmonic;
    c.kappa = 50.0;
    return c;
  }
  if (name == "doublewell") {
    c.kind = Kind::double_well;
    return c;
  }
  if (name == "zero") {
    c.kind = Kind::zero;
    return c;
  }
  static const std::regex harmonic(R"(harmonic\(\s*([^)\s]+)\s*\))");
  std::smatch m;
  if (std::regex_match(name, m, harmonic)) {
    c.kind = Kind::harmonic;
    c.kappa = parse_number(m[1], "harmonic(kappa)");
    return c;
  }
  throw std::invalid_argument("unknown confinement preset '" + name + "'");
}

std::string Confinement::name() const {
  switch (kind) {
    case Kind::zero:
      return "zero";
    case Kind::double_well:
      return "doublewell";
    case Kind::harmonic:
      return kappa == 50.0 ? "harmonic50" : "harmonic(" + number_text(kappa) + ")";
  }
  return {};
}

ControlShape ControlShape::parse(const std::string& name) {
  ControlShape s;
  if (name == "quadratic") {
    s.kind = Kind::quadratic;
    return s;
  }
  if (name == "none") {
    s.kind = Kind::none;
    return s;
  }
  static const std::regex dipole(R"(dipole\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\))");
  std::smatch m;
  if (std::regex_match(name, m, dipole)) {
    s.kind = Kind::dipole;
    s.px = parse_number(m[1], "dipole(px,py)");
    s.py = parse_number(m[2], "dipole(px,py)");
    return s;
  }
  throw std::invalid_argument("unknown control shape '" + name + "'");
}

std::string ControlShape::name() const {
  switch (kind) {
    case Kind::none:
      return "none";
    case Kind::quadratic:
      return "quadratic";
    case Kind::dipole:
      return "dipole(" + number_text(px) + "," + number_text(py) + ")";
  }
  return {};
}

double double_well_value(double x1, double x2) {
  const double x1sq = x1 * x1;
  return x1sq * x1sq / 64.0 - x1sq / 4.0 + x1sq * x1 / 32.0 + 0.5 * x2 * x2;
}

RealField confinement_field(const GridPtr& grid, const Confinement& c) {
  RealField v(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double x1 = grid->centered(i, 0);
    const double x2 = grid->dim() == 2 ? grid->centered(i, 1) : 0.0;
    switch (c.kind) {
      case Confinement::Kind::zero:
        v.values[i] = 0.0;
        break;
      case Confinement::Kind::harmonic:
        v.values[i] = c.kappa * (x1 * x1 + x2 * x2);
        break;
      case Confinement::Kind::double_well:
        v.values[i] = double_well_value(x1, x2);
        break;
    }
  }
  return v;
}

RealField control_shape_field(const GridPtr& grid, const ControlShape& s) {
  RealField v(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double x1 = grid->centered(i, 0);
    const double x2 = grid->dim() == 2 ? grid->centered(i, 1) : 0.0;
    switch (s.kind) {
      case ControlShape::Kind::none:
        v.values[i] = 0.0;
        break;
      case ControlShape::Kind::quadratic:
        v.values[i] = x1 * x1 + x2 * x2;
        break;
      case ControlShape::Kind::dipole:
        v.values[i] = s.px * x1 + s.py * x2;
        break;
    }
  }
  return v;
}

// ---------------------------------------------------------------------------

KohnShamModel make_model(const GridPtr& grid, const Confinement& confinement,
                         const ControlShape& shape,
                         const Interaction& interaction, double exchange_cutoff,
                         const CorrelationFit& fit) {
  KohnShamModel model;
  model.grid = grid;
  model.confinement = confinement;
  model.control_shape = shape;
  model.v0 = confinement_field(grid, confinement);
  model.vu = control_shape_field(grid, shape);
  model.interaction = interaction;
  if (interaction.hartree) model.kernel = build_hartree_kernel(grid, interaction.quadrature);
  if (interaction.exchange) {
    model.exchange = exchange_params(grid->dim(), exchange_cutoff);
  } else {
    model.exchange.cutoff = exchange_cutoff;
  }
  model.correlation = fit;
  return model;
}

RealField PotentialStack::total() const {
  const double u = control;
  RealField t(v0.grid);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    t.values[i] = v0.values[i] + u * vu.values[i] + v_hartree.values[i] +
                  v_x.values[i] + v_c.values[i];
  }
  return t;
}

PotentialStack assemble_stack(const Density& rho, double u,
                              const KohnShamModel& model) {
  require_same_grid(*rho.grid, *model.grid, "assemble_stack");
  PotentialStack stack;
  stack.control = u;
  stack.v0 = model.v0;
  stack.vu = model.vu;
  stack.v_hartree = model.interaction.hartree ? hartree(rho, model.kernel)
                                              : RealField(rho.grid);
  if (model.interaction.exchange) {
    auto [vx, dvx] = exchange(rho, model.exchange);
    stack.v_x = std::move(vx);
    stack.dvxc_drho = std::move(dvx);
  } else {
    stack.v_x = RealField(rho.grid);
    stack.dvxc_drho = RealField(rho.grid);
  }
  if (model.interaction.correlation) {
    auto [vc, dvc] = correlation(rho, model.correlation);
    stack.v_c = std::move(vc);
    for (std::size_t i = 0; i < dvc.values.size(); ++i) {
      stack.dvxc_drho.values[i] += dvc.values[i];
    }
  } else {
    stack.v_c = RealField(rho.grid);
  }
  return stack;
}

void total_potential_into(std::span<const double> rho, double u,
                          const KohnShamModel& model, std::span<double> total,
                          std::span<double> dvxc) {
  const auto& v0 = model.v0.values;
  const auto& vu = model.vu.values;
  if (model.interaction.hartree) {
    hartree_into(rho, model.kernel, total);
  } else {
    std::fill(total.begin(), total.end(), 0.0);
  }
  const bool want_derivative = !dvxc.empty();
  const bool with_x = model.interaction.exchange;
  const bool with_c = model.interaction.correlation;
  const auto n = static_cast<std::ptrdiff_t>(total.size());
#pragma omp parallel for schedule(static) if (n > 2048)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double r = rho[i];
    double v = total[i] + v0[i] + u * vu[i];
    double d = 0.0;
    if (with_x) {
      v += exchange_value(r, model.exchange);
      if (want_derivative) d += exchange_derivative(r, model.exchange);
    }
    if (with_c) {
      v += model.correlation.value(r);
      if (want_derivative) d += model.correlation.derivative(r);
    }
    total[i] = v;
    if (want_derivative) dvxc[i] = d;
  }
}

void xc_derivative_into(std::span<const double> rho, const KohnShamModel& model,
                        std::span<double> out) {
  const bool with_x = model.interaction.exchange;
  const bool with_c = model.interaction.correlation;
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (n > 2048)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double d = 0.0;
    if (with_x) d += exchange_derivative(rho[i], model.exchange);
    if (with_c) d += model.correlation.derivative(rho[i]);
    out[i] = d;
  }
}

}  // namespace tdks
