#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "tdks/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace tdks::kernels;

namespace {

struct Data {
  std::vector<cplx> a, b;
  std::vector<double> w, v;

  explicit Data(std::size_t n) : a(n), b(n), w(n), v(n) {
    std::mt19937 rng(42);
    std::normal_distribution<double> gauss;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = {gauss(rng), gauss(rng)};
      b[i] = {gauss(rng), gauss(rng)};
      w[i] = gauss(rng);
      v[i] = gauss(rng);
    }
  }
};

template <typename T>
double max_gap(const std::vector<T>& x, const std::vector<T>& y) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  return worst;
}

}  // namespace

TEST_CASE("OpenMP kernels agree with the serial reference") {
  for (std::size_t n : {std::size_t{7}, std::size_t{4096}, std::size_t{70001}}) {
    CAPTURE(n);
    Data d(n);
    {
      std::vector<double> r1(n, 0.5), r2(n, 0.5);
      serial::add_density(d.a, 2.0, r1);
      omp::add_density(d.a, 2.0, r2);
      CHECK(max_gap(r1, r2) == 0.0);
    }
    {
      std::vector<cplx> p1(n), p2(n);
      serial::fill_phase(d.w, 0.3, p1);
      omp::fill_phase(d.w, 0.3, p2);
      CHECK(max_gap(p1, p2) < 1e-15);
      CHECK(std::abs(p1[0] - std::exp(cplx(0.0, -0.3 * d.w[0]))) < 1e-15);
    }
    {
      auto x1 = d.b, x2 = d.b;
      serial::multiply(d.a, x1);
      omp::multiply(d.a, x2);
      CHECK(max_gap(x1, x2) == 0.0);
      serial::multiply_real(d.w, x1);
      omp::multiply_real(d.w, x2);
      CHECK(max_gap(x1, x2) == 0.0);
      serial::add_scaled_product(d.v, cplx(0.1, 2.0), d.a, x1);
      omp::add_scaled_product(d.v, cplx(0.1, 2.0), d.a, x2);
      CHECK(max_gap(x1, x2) == 0.0);
      serial::axpy(cplx(-1.0, 0.5), d.a, x1);
      omp::axpy(cplx(-1.0, 0.5), d.a, x2);
      CHECK(max_gap(x1, x2) == 0.0);
    }
    {
      std::vector<double> o1(n, 1.0), o2(n, 1.0);
      serial::add_real_overlap(d.a, d.b, o1);
      omp::add_real_overlap(d.a, d.b, o2);
      CHECK(max_gap(o1, o2) == 0.0);
    }
    const double scale = static_cast<double>(n);
    CHECK(std::abs(serial::dot(d.a, d.b) - omp::dot(d.a, d.b)) < 1e-12 * scale);
    CHECK(std::abs(serial::weighted_real_dot(d.w, d.a, d.b) -
                   omp::weighted_real_dot(d.w, d.a, d.b)) < 1e-12 * scale);
    CHECK(std::abs(serial::weighted_sum(d.w, d.v) - omp::weighted_sum(d.w, d.v)) < 1e-12 * scale);
    CHECK(std::abs(serial::squared_distance(d.w, d.v) - omp::squared_distance(d.w, d.v)) <
          1e-12 * scale);
    CHECK(serial::max_modulus(d.a) == omp::max_modulus(d.a));
  }
}

TEST_CASE("reductions match direct formulas") {
  std::vector<cplx> a{{1, 2}, {3, -1}};
  std::vector<cplx> b{{0, 1}, {2, 2}};
  // conj(a) b
  CHECK(omp::dot(a, b) == cplx(2, 1) + cplx(4, 8));
  std::vector<double> w{2.0, -1.0};
  // Re(conj(a) b) weighted
  CHECK(omp::weighted_real_dot(w, a, b) == doctest::Approx(2.0 * 2.0 - 1.0 * 4.0));
  CHECK(omp::max_modulus(a) == doctest::Approx(std::sqrt(10.0)));
}

TEST_CASE("max_modulus flags non-finite entries") {
  std::vector<cplx> a(5000, cplx(1.0, 1.0));
  a[4321] = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK(std::isnan(serial::max_modulus(a)));
  CHECK(std::isnan(omp::max_modulus(a)));
  a[4321] = cplx(0.0, std::numeric_limits<double>::infinity());
  CHECK(std::isnan(omp::max_modulus(a)));
}

TEST_CASE("OpenMP reductions do not depend on the thread count") {
  Data d(100003);
  const cplx reference = omp::dot(d.a, d.b);
#ifdef _OPENMP
  for (int threads : {1, 2, 3, 8}) {
    omp_set_num_threads(threads);
    CHECK(omp::dot(d.a, d.b) == reference);
  }
#endif
  CHECK(omp::dot(d.a, d.b) == reference);
}
