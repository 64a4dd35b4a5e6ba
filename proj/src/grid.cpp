#include "tdks/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tdks/kernels.hpp"

namespace tdks {

namespace {

// FFTW's planner is not thread safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::span<cplx> data) {
  return reinterpret_cast<fftw_complex*>(data.data());
}

}  // namespace

Grid::Grid(int dim, double extent, int points)
    : dim_(dim), extent_(extent), points_(points) {
  size_ = 1;
  for (int d = 0; d < dim_; ++d) size_ *= static_cast<std::size_t>(points_);

  wavenumbers_.resize(points_);
  const double base = 2.0 * std::numbers::pi / extent_;
  for (int m = 0; m < points_; ++m) {
    const int signed_index = m < points_ / 2 ? m : m - points_;
    wavenumbers_[m] = base * signed_index;
  }

  k_squared_.resize(size_);
  if (dim_ == 1) {
    for (int m = 0; m < points_; ++m) k_squared_[m] = wavenumbers_[m] * wavenumbers_[m];
  } else {
    for (int a = 0; a < points_; ++a) {
      for (int b = 0; b < points_; ++b) {
        k_squared_[static_cast<std::size_t>(a) * points_ + b] =
            wavenumbers_[a] * wavenumbers_[a] + wavenumbers_[b] * wavenumbers_[b];
      }
    }
  }

  AlignedComplexVector scratch(size_);
  int shape[2] = {points_, points_};
  std::lock_guard lock(planner_mutex());
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  forward_plan_ = fftw_plan_dft(dim_, shape, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft(dim_, shape, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  const unsigned loose = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_unaligned_ = fftw_plan_dft(dim_, shape, buf, buf, FFTW_FORWARD, loose);
  inverse_unaligned_ = fftw_plan_dft(dim_, shape, buf, buf, FFTW_BACKWARD, loose);
  if (!forward_plan_ || !inverse_plan_ || !forward_unaligned_ || !inverse_unaligned_) {
    throw std::runtime_error("FFTW failed to create a plan");
  }
}

Grid::~Grid() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(forward_unaligned_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_unaligned_));
}

double Grid::cell_volume() const { return std::pow(spacing(), dim_); }

double Grid::centered(std::size_t index, int axis) const {
  if (dim_ == 1) return centered_axis(static_cast<int>(index));
  const auto row = static_cast<int>(index / points_);
  const auto col = static_cast<int>(index % points_);
  return centered_axis(axis == 0 ? row : col);
}

void Grid::forward(std::span<cplx> data) const {
  auto* p = as_fftw(data);
  void* plan = fftw_alignment_of(reinterpret_cast<double*>(p)) == 0 ? forward_plan_
                                                                    : forward_unaligned_;
  fftw_execute_dft(static_cast<fftw_plan>(plan), p, p);
}

void Grid::inverse(std::span<cplx> data) const {
  auto* p = as_fftw(data);
  void* plan = fftw_alignment_of(reinterpret_cast<double*>(p)) == 0 ? inverse_plan_
                                                                    : inverse_unaligned_;
  fftw_execute_dft(static_cast<fftw_plan>(plan), p, p);
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& z : data) z *= scale;
}

bool Grid::same_as(const Grid& other) const {
  return this == &other || (dim_ == other.dim_ && points_ == other.points_ &&
                            extent_ == other.extent_);
}

GridPtr make_grid(int dim, double extent, int points) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("grid dimension must be 1 or 2, got " +
                                std::to_string(dim));
  }
  if (!(extent > 0.0) || !std::isfinite(extent)) {
    throw std::invalid_argument("grid extent must be positive");
  }
  if (points < 8 || points % 2 != 0) {
    throw std::invalid_argument(
        "grid points per axis must be even and at least 8, got " +
        std::to_string(points));
  }
  return std::make_shared<const Grid>(dim, extent, points);
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!a.same_as(b)) {
    throw std::invalid_argument(std::string(where) + ": grid mismatch");
  }
}

ComplexField::ComplexField(GridPtr g, std::vector<cplx> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->size()) {
    throw std::invalid_argument("ComplexField: length does not match grid");
  }
}

RealField::RealField(GridPtr g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->size()) {
    throw std::invalid_argument("RealField: length does not match grid");
  }
}

double l2_norm(const ComplexField& field) {
  const cplx s = kernels::omp::dot(field.values, field.values);
  return std::sqrt(field.grid->cell_volume() * s.real());
}

void kinetic_propagate_inplace(const Grid& grid, std::span<cplx> data,
                               double tau) {
  if (tau == 0.0) return;
  grid.forward(data);
  std::vector<cplx> phase(grid.size());
  kernels::omp::fill_phase(grid.k_squared(), tau, phase);
  kernels::omp::multiply(phase, data);
  grid.inverse(data);
}

ComplexField kinetic_propagate(const ComplexField& field, double tau) {
  if (std::isnan(kernels::omp::max_modulus(field.values))) {
    throw std::invalid_argument("kinetic_propagate: non-finite input");
  }
  ComplexField out = field;
  kinetic_propagate_inplace(*field.grid, out.values, tau);
  return out;
}

double coulomb_origin_value(int dim, double spacing) {
  if (dim == 2) return 4.0 * std::log(1.0 + std::numbers::sqrt2) / spacing;
  return 2.0 * std::asinh(1.0) / spacing;
}

HartreeQuadrature parse_hartree_quadrature(const std::string& name) {
  if (name == "cell_average") return HartreeQuadrature::cell_average;
  if (name == "split") return HartreeQuadrature::split;
  throw std::invalid_argument("unknown Hartree quadrature '" + name + "'");
}

std::string to_string(HartreeQuadrature q) {
  return q == HartreeQuadrature::split ? "split" : "cell_average";
}

HartreeKernel build_hartree_kernel(const GridPtr& grid, HartreeQuadrature quadrature) {
  HartreeKernel kernel;
  kernel.grid = grid;
  const int m_count = grid->points();
  const double h = grid->spacing();
  const bool split = quadrature == HartreeQuadrature::split && grid->dim() == 2;
  // erfc(6) ~ 2e-17, so periodic images of the short-range part are invisible
  const double s = split ? grid->extent() / 12.0 : 0.0;
  kernel.split_width = s;
  auto image = [&](int m) { return std::min(m, m_count - m) * h; };

  kernel.samples.resize(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    double r2 = 0.0;
    if (grid->dim() == 1) {
      const double d = image(static_cast<int>(i));
      r2 = d * d;
    } else {
      const double dx = image(static_cast<int>(i / m_count));
      const double dy = image(static_cast<int>(i % m_count));
      r2 = dx * dx + dy * dy;
    }
    const double r = std::sqrt(r2);
    if (split) {
      kernel.samples[i] = r == 0.0 ? 2.0 / (std::sqrt(std::numbers::pi) * s) : std::erf(r / s) / r;
    } else {
      kernel.samples[i] = r == 0.0 ? coulomb_origin_value(grid->dim(), h) : 1.0 / r;
    }
  }

  kernel.coefficients.assign(kernel.samples.begin(), kernel.samples.end());
  grid->forward(kernel.coefficients);
  const double w = grid->cell_volume();
  for (auto& c : kernel.coefficients) c *= w;

  if (split) {
    const auto& k = grid->wavenumbers();
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const double kk = std::hypot(k[i / m_count], k[i % m_count]);
      kernel.coefficients[i] += kk == 0.0 ? 2.0 * std::sqrt(std::numbers::pi) * s
                                          : 2.0 * std::numbers::pi / kk * std::erf(0.5 * kk * s);
    }
  }
  return kernel;
}

}  // namespace tdks
