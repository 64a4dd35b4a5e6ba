#pragma once

#include <iosfwd>
#include <string>

#include "tdks/grid.hpp"

namespace tdks {

// Snapshot format: one ASCII header line
//   TDKSFIELD v1 dim=<d> M=<m> L=<l>\n
// followed by M^dim little-endian float64 (re, im) pairs in row-major order.

std::string field_header(const Grid& grid);

void write_field(std::ostream& out, const ComplexField& field);
/// Real fields are stored with a zero imaginary part.
void write_field(std::ostream& out, const RealField& field);
void write_field_file(const std::string& path, const ComplexField& field);

/// Reads one record. A grid with matching parameters is reused when given,
/// otherwise a new one is built from the header.
ComplexField read_field(std::istream& in, const GridPtr& grid = nullptr);
ComplexField read_field_file(const std::string& path);

}  // namespace tdks
