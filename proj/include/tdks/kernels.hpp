#pragma once

// Pointwise grid kernels used by every propagation step.
//
// Two implementations with identical signatures live here: `serial` is the
// plain loop reference kept for testing and benchmarking, `omp` is the
// OpenMP version the library calls. Reductions in `omp` sum fixed-size blocks
// and combine the partial sums in block order, so results do not depend on
// the thread count.

#include <complex>
#include <span>

namespace tdks::kernels {

using cplx = std::complex<double>;

#define TDKS_KERNEL_DECLARATIONS                                               \
  /* rho += weight * |psi|^2 */                                                \
  void add_density(std::span<const cplx> psi, double weight,                   \
                   std::span<double> rho);                                     \
  /* phase = exp(-i * tau * potential) */                                      \
  void fill_phase(std::span<const double> potential, double tau,               \
                  std::span<cplx> phase);                                      \
  /* data *= factor, elementwise */                                            \
  void multiply(std::span<const cplx> factor, std::span<cplx> data);           \
  /* data *= factor, real factor */                                            \
  void multiply_real(std::span<const double> factor, std::span<cplx> data);    \
  /* out += scale * field * psi */                                             \
  void add_scaled_product(std::span<const double> field, cplx scale,           \
                          std::span<const cplx> psi, std::span<cplx> out);     \
  /* y += a * x */                                                             \
  void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y);               \
  /* w += Re(psi * conj(lambda)) */                                            \
  void add_real_overlap(std::span<const cplx> psi,                             \
                        std::span<const cplx> lambda, std::span<double> w);    \
  /* sum conj(a) * b */                                                        \
  cplx dot(std::span<const cplx> a, std::span<const cplx> b);                  \
  /* sum weight * Re(conj(lambda) * psi) */                                    \
  double weighted_real_dot(std::span<const double> weight,                     \
                           std::span<const cplx> lambda,                       \
                           std::span<const cplx> psi);                         \
  /* sum weight * value */                                                     \
  double weighted_sum(std::span<const double> weight,                          \
                      std::span<const double> value);                          \
  /* sum (a - b)^2 */                                                          \
  double squared_distance(std::span<const double> a,                           \
                          std::span<const double> b);                          \
  /* max |z|, NaN if any entry is not finite */                                \
  double max_modulus(std::span<const cplx> data);

namespace serial {
TDKS_KERNEL_DECLARATIONS
}  // namespace serial

namespace omp {
TDKS_KERNEL_DECLARATIONS
}  // namespace omp

#undef TDKS_KERNEL_DECLARATIONS

}  // namespace tdks::kernels
