#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace tdks {

using cplx = std::complex<double>;

/// 64-byte aligned storage so FFTW can use its SIMD codelets on it.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), alignment));
  }
  void deallocate(T* p, std::size_t) { ::operator delete(p, alignment); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
};

using AlignedComplexVector = std::vector<cplx, AlignedAllocator<cplx>>;

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Uniform periodic grid on the box [0, L)^dim with M samples per axis.
///
/// Samples sit at x_m = m * h. Potentials are written in coordinates
/// centered on the box, see centered(). Instances are immutable and hold
/// FFTW plans that are executed through the new-array interface, so a
/// single grid may be shared by any number of threads.
class Grid {
 public:
  Grid(int dim, double extent, int points);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int dim() const { return dim_; }
  double extent() const { return extent_; }
  int points() const { return points_; }
  double spacing() const { return extent_ / points_; }
  std::size_t size() const { return size_; }
  /// h^dim, the quadrature weight of one sample.
  double cell_volume() const;

  /// Per-axis wavenumbers 2*pi*m/L in FFT order (Nyquist negative).
  const std::vector<double>& wavenumbers() const { return wavenumbers_; }
  /// |k|^2 for every flat index, row-major.
  std::span<const double> k_squared() const { return k_squared_; }

  /// Coordinate relative to the box center along `axis` for flat `index`.
  double centered(std::size_t index, int axis) const;
  /// Coordinate of sample m along an axis, relative to the box center.
  double centered_axis(int m) const { return m * spacing() - 0.5 * extent_; }

  /// Unnormalized forward DFT, in place.
  void forward(std::span<cplx> data) const;
  /// Inverse DFT including the 1/M^dim factor, in place.
  void inverse(std::span<cplx> data) const;

  bool same_as(const Grid& other) const;

 private:
  int dim_;
  double extent_;
  int points_;
  std::size_t size_;
  std::vector<double> wavenumbers_;
  std::vector<double> k_squared_;
  // SIMD plans for aligned arrays and fallbacks for anything else.
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
  void* forward_unaligned_ = nullptr;
  void* inverse_unaligned_ = nullptr;
};

/// Validates the parameters and builds a shared grid.
/// dim must be 1 or 2, points even and at least 8, extent positive.
GridPtr make_grid(int dim, double extent, int points);

void require_same_grid(const Grid& a, const Grid& b, const char* where);

struct ComplexField {
  GridPtr grid;
  std::vector<cplx> values;

  ComplexField() = default;
  explicit ComplexField(GridPtr g) : grid(std::move(g)), values(grid->size()) {}
  ComplexField(GridPtr g, std::vector<cplx> v);
};

struct RealField {
  GridPtr grid;
  std::vector<double> values;

  RealField() = default;
  explicit RealField(GridPtr g, double fill = 0.0)
      : grid(std::move(g)), values(grid->size(), fill) {}
  RealField(GridPtr g, std::vector<double> v);
};

/// Discrete L2 norm sqrt(h^dim * sum |f|^2).
double l2_norm(const ComplexField& field);

/// Multiplies the Fourier coefficients by exp(-i * tau * |k|^2), i.e. applies
/// the free propagator exp(i * tau * Laplacian). Unitary for every real tau.
ComplexField kinetic_propagate(const ComplexField& field, double tau);

/// In-place variant working on raw orbital storage of the given grid.
void kinetic_propagate_inplace(const Grid& grid, std::span<cplx> data,
                               double tau);

/// How the singular Coulomb convolution is discretized.
///
/// cell_average samples 1/|x| at minimum-image distances and replaces the
/// origin by its cell mean. It is consistent but only algebraically accurate,
/// because the kernel is not smooth at the origin.
///
/// split writes 1/r = erf(r/s)/r + erfc(r/s)/r with s = L/12. The smooth
/// first part is sampled like cell_average. The second part decays like
/// exp(-r^2/s^2) and is applied exactly through its Fourier transform
/// (2 pi/|k|) erf(|k| s/2). Both halves converge spectrally for smooth
/// densities, and the continuum operator is the same as for cell_average.
/// 2D only; in 1D the short-range transform diverges and cell_average is used.
enum class HartreeQuadrature { cell_average, split };

HartreeQuadrature parse_hartree_quadrature(const std::string& name);
std::string to_string(HartreeQuadrature q);

/// Fourier multiplier of the Coulomb convolution, scaled so that
/// V = IDFT(coefficients * DFT(rho)) is the quadrature of the Hartree integral.
struct HartreeKernel {
  GridPtr grid;
  std::vector<cplx> coefficients;
  /// Real-space samples at minimum-image distances: 1/|x| with the origin
  /// cell-averaged, or only the smooth erf part for the split quadrature.
  std::vector<double> samples;
  /// Splitting width s; 0 for cell_average.
  double split_width = 0.0;
};

HartreeKernel build_hartree_kernel(const GridPtr& grid,
                                   HartreeQuadrature quadrature = HartreeQuadrature::cell_average);

/// Value used for the singular origin sample. In 2D this is the mean of
/// 1/|x| over the cell [-h/2, h/2]^2, i.e. 4 ln(1 + sqrt 2) / h. In 1D the
/// mean diverges, so the softened kernel 1/sqrt(x^2 + h^2/4) is averaged
/// instead, giving 2 asinh(1) / h.
double coulomb_origin_value(int dim, double spacing);

}  // namespace tdks
