#include "tdks/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace tdks::kernels {

namespace {

// Below this size the parallel region costs more than it saves.
constexpr std::ptrdiff_t kParallelThreshold = 2048;
constexpr std::ptrdiff_t kReductionBlocks = 64;

// Squared modulus, NaN for non-finite entries. Callers take the root once.
double norm_or_nan(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::norm(z);
}

// Splits [0, n) into kReductionBlocks contiguous blocks, evaluates
// `partial(begin, end)` for each one in parallel and sums the results in
// block order.
template <typename T, typename Partial>
T blocked_sum(std::ptrdiff_t n, Partial partial) {
  std::array<T, kReductionBlocks> sums{};
  const std::ptrdiff_t chunk = (n + kReductionBlocks - 1) / kReductionBlocks;
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (std::ptrdiff_t b = 0; b < kReductionBlocks; ++b) {
    const std::ptrdiff_t begin = std::min(n, b * chunk);
    const std::ptrdiff_t end = std::min(n, begin + chunk);
    sums[b] = partial(begin, end);
  }
  T total{};
  for (const auto& s : sums) total += s;
  return total;
}

}  // namespace

namespace serial {

void add_density(std::span<const cplx> psi, double weight,
                 std::span<double> rho) {
  for (std::size_t i = 0; i < psi.size(); ++i) rho[i] += weight * std::norm(psi[i]);
}

void fill_phase(std::span<const double> potential, double tau,
                std::span<cplx> phase) {
  for (std::size_t i = 0; i < potential.size(); ++i) {
    const double angle = -tau * potential[i];
    phase[i] = {std::cos(angle), std::sin(angle)};
  }
}

void multiply(std::span<const cplx> factor, std::span<cplx> data) {
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= factor[i];
}

void multiply_real(std::span<const double> factor, std::span<cplx> data) {
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= factor[i];
}

void add_scaled_product(std::span<const double> field, cplx scale,
                        std::span<const cplx> psi, std::span<cplx> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += scale * field[i] * psi[i];
}

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void add_real_overlap(std::span<const cplx> psi, std::span<const cplx> lambda,
                      std::span<double> w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] += psi[i].real() * lambda[i].real() + psi[i].imag() * lambda[i].imag();
  }
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx sum{};
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
  return sum;
}

double weighted_real_dot(std::span<const double> weight,
                         std::span<const cplx> lambda,
                         std::span<const cplx> psi) {
  double sum = 0.0;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    sum += weight[i] * (lambda[i].real() * psi[i].real() +
                        lambda[i].imag() * psi[i].imag());
  }
  return sum;
}

double weighted_sum(std::span<const double> weight,
                    std::span<const double> value) {
  double sum = 0.0;
  for (std::size_t i = 0; i < weight.size(); ++i) sum += weight[i] * value[i];
  return sum;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double max_modulus(std::span<const cplx> data) {
  double m = 0.0;
  for (const auto& z : data) {
    const double v = norm_or_nan(z);
    if (std::isnan(v)) return v;
    m = std::max(m, v);
  }
  return std::sqrt(m);
}

}  // namespace serial

namespace omp {

void add_density(std::span<const cplx> psi, double weight,
                 std::span<double> rho) {
  const auto n = static_cast<std::ptrdiff_t>(psi.size());
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) rho[i] += weight * std::norm(psi[i]);
}

void fill_phase(std::span<const double> potential, double tau,
                std::span<cplx> phase) {
  const auto n = static_cast<std::ptrdiff_t>(potential.size());
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double angle = -tau * potential[i];
    phase[i] = {std::cos(angle), std::sin(angle)};
  }
}

void multiply(std::span<const cplx> factor, std::span<cplx> data) {
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) data[i] *= factor[i];
}

void multiply_real(std::span<const double> factor, std::span<cplx> data) {
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) data[i] *= factor[i];
}

void add_scaled_product(std::span<const double> field, cplx scale,
                        std::span<const cplx> psi, std::span<cplx> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] += scale * field[i] * psi[i];
}

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  const auto n = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void add_real_overlap(std::span<const cplx> psi, std::span<const cplx> lambda,
                      std::span<double> w) {
  const auto n = static_cast<std::ptrdiff_t>(w.size());
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    w[i] += psi[i].real() * lambda[i].real() + psi[i].imag() * lambda[i].imag();
  }
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  return blocked_sum<cplx>(static_cast<std::ptrdiff_t>(a.size()),
                           [&](std::ptrdiff_t begin, std::ptrdiff_t end) {
                             return serial::dot(a.subspan(begin, end - begin),
                                                b.subspan(begin, end - begin));
                           });
}

double weighted_real_dot(std::span<const double> weight,
                         std::span<const cplx> lambda,
                         std::span<const cplx> psi) {
  return blocked_sum<double>(
      static_cast<std::ptrdiff_t>(weight.size()),
      [&](std::ptrdiff_t begin, std::ptrdiff_t end) {
        const auto len = static_cast<std::size_t>(end - begin);
        return serial::weighted_real_dot(weight.subspan(begin, len),
                                         lambda.subspan(begin, len),
                                         psi.subspan(begin, len));
      });
}

double weighted_sum(std::span<const double> weight,
                    std::span<const double> value) {
  return blocked_sum<double>(
      static_cast<std::ptrdiff_t>(weight.size()),
      [&](std::ptrdiff_t begin, std::ptrdiff_t end) {
        const auto len = static_cast<std::size_t>(end - begin);
        return serial::weighted_sum(weight.subspan(begin, len),
                                    value.subspan(begin, len));
      });
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  return blocked_sum<double>(
      static_cast<std::ptrdiff_t>(a.size()),
      [&](std::ptrdiff_t begin, std::ptrdiff_t end) {
        const auto len = static_cast<std::size_t>(end - begin);
        return serial::squared_distance(a.subspan(begin, len),
                                        b.subspan(begin, len));
      });
}

double max_modulus(std::span<const cplx> data) {
  const auto n = static_cast<std::ptrdiff_t>(data.size());
  double m = 0.0;
  bool bad = false;
#pragma omp parallel for schedule(static) reduction(max : m) \
    reduction(|| : bad) if (n > kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double v = norm_or_nan(data[i]);
    if (std::isnan(v)) {
      bad = true;
    } else {
      m = std::max(m, v);
    }
  }
  return bad ? std::numeric_limits<double>::quiet_NaN() : std::sqrt(m);
}

}  // namespace omp

}  // namespace tdks::kernels
