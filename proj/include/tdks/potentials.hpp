#pragma once

#include <span>
#include <string>
#include <utility>

#include "tdks/grid.hpp"
#include "tdks/orbitals.hpp"

namespace tdks {

using Density = RealField;

/// rho = sum_j |psi_j|^2
Density density(const Orbitals& orbitals);
void density_into(const Orbitals& orbitals, std::span<double> rho);

/// Hartree potential: h^dim-scaled circular convolution with 1/|x|.
RealField hartree(const Density& rho, const HartreeKernel& kernel);
void hartree_into(std::span<const double> rho, const HartreeKernel& kernel,
                  std::span<double> out);

// ---------------------------------------------------------------------------
// Exchange

/// LDA exchange with a smooth cutoff: alpha * rho^(1/n) up to R, a quartic
/// blend p on (R, 2R) and the constant alpha * p(2R) beyond.
struct ExchangeParams {
  int dim = 2;
  double cutoff = 1e6;
  double alpha = 0.0;
};

/// alpha_2 = -sqrt(8/pi), alpha_3 = -(3/pi)^(1/3).
ExchangeParams exchange_params(int dim, double cutoff = 1e6);

/// Quartic blend p(rho) and its first two derivatives in rho.
double exchange_blend(double rho, const ExchangeParams& params, int order = 0);

double exchange_value(double rho, const ExchangeParams& params);
double exchange_derivative(double rho, const ExchangeParams& params);

/// Returns (V_x, dV_x/drho). Throws on negative density.
std::pair<RealField, RealField> exchange(const Density& rho,
                                         const ExchangeParams& params);

// ---------------------------------------------------------------------------
// Correlation

/// V_c(rho) = limit * rho / (rho + scale). Zero at zero density, convex and
/// decreasing, saturating at `limit` for large densities.
struct CorrelationFit {
  double limit = -0.1925;
  double scale = 1.0;

  double value(double rho) const { return limit * rho / (rho + scale); }
  double derivative(double rho) const {
    const double d = rho + scale;
    return limit * scale / (d * d);
  }
};

std::pair<RealField, RealField> correlation(const Density& rho,
                                            const CorrelationFit& fit);

// ---------------------------------------------------------------------------
// External potentials

struct Confinement {
  enum class Kind { zero, harmonic, double_well };
  Kind kind = Kind::harmonic;
  double kappa = 50.0;  // harmonic strength, V_0 = kappa * r^2

  /// "harmonic50", "doublewell", "harmonic(<kappa>)" or "zero".
  static Confinement parse(const std::string& name);
  std::string name() const;
};

struct ControlShape {
  enum class Kind { none, quadratic, dipole };
  Kind kind = Kind::quadratic;
  double px = 1.0;
  double py = 0.0;

  /// "quadratic", "dipole(<px>,<py>)" or "none".
  static ControlShape parse(const std::string& name);
  std::string name() const;
};

/// Potentials are expressed in coordinates centered on the box.
RealField confinement_field(const GridPtr& grid, const Confinement& c);
RealField control_shape_field(const GridPtr& grid, const ControlShape& s);

/// Double-well confinement along the x1 axis (x2 = 0).
double double_well_value(double x1, double x2);

// ---------------------------------------------------------------------------
// The assembled model

struct Interaction {
  bool hartree = true;
  bool exchange = true;
  bool correlation = true;
  HartreeQuadrature quadrature = HartreeQuadrature::split;

  static Interaction none() { return {false, false, false}; }
  bool any() const { return hartree || exchange || correlation; }
};

/// Everything needed to evaluate the Kohn-Sham potential on one grid.
/// Immutable once built; shared read-only between propagations.
struct KohnShamModel {
  GridPtr grid;
  Confinement confinement;
  ControlShape control_shape;
  RealField v0;
  RealField vu;
  HartreeKernel kernel;
  Interaction interaction;
  ExchangeParams exchange;
  CorrelationFit correlation;
};

KohnShamModel make_model(const GridPtr& grid, const Confinement& confinement,
                         const ControlShape& shape,
                         const Interaction& interaction = {},
                         double exchange_cutoff = 1e6,
                         const CorrelationFit& fit = {});

struct PotentialStack {
  RealField v0;
  RealField vu;
  RealField v_hartree;
  RealField v_x;
  RealField v_c;
  /// d(V_x + V_c)/drho. The Hartree coupling is nonlocal and not included.
  RealField dvxc_drho;
  /// Control amplitude u the stack was assembled for.
  double control = 0.0;

  /// V_0 + u V_u + V_H + V_x + V_c
  RealField total() const;
};

PotentialStack assemble_stack(const Density& rho, double u,
                              const KohnShamModel& model);

/// Fast path used by the propagators: writes the total potential and
/// optionally d(V_xc)/drho without materializing the stack.
void total_potential_into(std::span<const double> rho, double u,
                          const KohnShamModel& model, std::span<double> total,
                          std::span<double> dvxc = {});

/// d(V_x + V_c)/drho for the interaction terms enabled in the model.
void xc_derivative_into(std::span<const double> rho, const KohnShamModel& model,
                        std::span<double> out);

}  // namespace tdks
