#include "tdks/orbitals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tdks/kernels.hpp"

namespace tdks {

Orbitals::Orbitals(GridPtr grid, int count)
    : grid_(std::move(grid)), count_(count) {
  if (count_ < 1) throw std::invalid_argument("Orbitals: count must be >= 1");
  data_.assign(grid_->size() * static_cast<std::size_t>(count_), cplx{});
}

std::span<cplx> Orbitals::orbital(int j) {
  return std::span<cplx>(data_).subspan(j * orbital_size(), orbital_size());
}

std::span<const cplx> Orbitals::orbital(int j) const {
  return std::span<const cplx>(data_).subspan(j * orbital_size(), orbital_size());
}

ComplexField Orbitals::field(int j) const {
  auto o = orbital(j);
  return ComplexField(grid_, std::vector<cplx>(o.begin(), o.end()));
}

void Orbitals::set(int j, const ComplexField& field) {
  require_same_grid(*grid_, *field.grid, "Orbitals::set");
  std::copy(field.values.begin(), field.values.end(), orbital(j).begin());
}

cplx Orbitals::inner(int i, int j) const {
  return grid_->cell_volume() * kernels::omp::dot(orbital(i), orbital(j));
}

double Orbitals::norm(int j) const { return std::sqrt(inner(j, j).real()); }

double Orbitals::max_modulus() const { return kernels::omp::max_modulus(data_); }

void orthonormalize(Orbitals& orbitals) {
  for (int j = 0; j < orbitals.count(); ++j) {
    for (int i = 0; i < j; ++i) {
      const cplx c = orbitals.inner(i, j);
      kernels::omp::axpy(-c, orbitals.orbital(i), orbitals.orbital(j));
    }
    const double n = orbitals.norm(j);
    if (!(n > 1e-12)) {
      throw std::runtime_error("orthonormalize: orbital " + std::to_string(j) +
                               " is linearly dependent");
    }
    for (auto& z : orbitals.orbital(j)) z /= n;
  }
}

void require_compatible(const Orbitals& a, const Orbitals& b, const char* where) {
  require_same_grid(*a.grid(), *b.grid(), where);
  if (a.count() != b.count()) {
    throw std::invalid_argument(std::string(where) + ": orbital count mismatch");
  }
}

}  // namespace tdks
