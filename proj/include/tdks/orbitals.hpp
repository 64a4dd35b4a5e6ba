#pragma once

#include <span>
#include <vector>

#include "tdks/grid.hpp"

namespace tdks {

/// The Kohn-Sham state: N complex orbitals on one grid, stored contiguously.
class Orbitals {
 public:
  Orbitals() = default;
  Orbitals(GridPtr grid, int count);

  const GridPtr& grid() const { return grid_; }
  int count() const { return count_; }
  std::size_t orbital_size() const { return grid_->size(); }

  std::span<cplx> orbital(int j);
  std::span<const cplx> orbital(int j) const;
  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  ComplexField field(int j) const;
  void set(int j, const ComplexField& field);

  /// h^dim * sum conj(psi_i) psi_j
  cplx inner(int i, int j) const;
  double norm(int j) const;

  /// Largest modulus over all orbitals; NaN when any entry is not finite.
  double max_modulus() const;

 private:
  GridPtr grid_;
  int count_ = 0;
  AlignedComplexVector data_;
};

/// Modified Gram-Schmidt in the discrete L2 product. Throws when an orbital
/// is numerically dependent on the previous ones.
void orthonormalize(Orbitals& orbitals);

void require_compatible(const Orbitals& a, const Orbitals& b, const char* where);

}  // namespace tdks
