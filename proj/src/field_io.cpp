#include "tdks/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tdks {

namespace {

void put_le_double(std::ostream& out, double value) {
  auto bits = std::bit_cast<std::uint64_t>(value);
  char bytes[8];
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
  out.write(bytes, 8);
}

double get_le_double(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw std::runtime_error("TDKSFIELD: truncated payload");
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

std::string format_extent(double extent) {
  std::ostringstream s;
  s.precision(17);
  s << extent;
  return s.str();
}

}  // namespace

std::string field_header(const Grid& grid) {
  return "TDKSFIELD v1 dim=" + std::to_string(grid.dim()) +
         " M=" + std::to_string(grid.points()) +
         " L=" + format_extent(grid.extent()) + "\n";
}

void write_field(std::ostream& out, const ComplexField& field) {
  out << field_header(*field.grid);
  for (const auto& z : field.values) {
    put_le_double(out, z.real());
    put_le_double(out, z.imag());
  }
}

void write_field(std::ostream& out, const RealField& field) {
  out << field_header(*field.grid);
  for (double v : field.values) {
    put_le_double(out, v);
    put_le_double(out, 0.0);
  }
}

void write_field_file(const std::string& path, const ComplexField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_field(out, field);
}

ComplexField read_field(std::istream& in, const GridPtr& grid) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("TDKSFIELD: missing header");
  int dim = 0;
  int points = 0;
  double extent = 0.0;
  char version[8] = {};
  if (std::sscanf(line.c_str(), "TDKSFIELD %7s dim=%d M=%d L=%lf", version, &dim,
                  &points, &extent) != 4 ||
      std::strcmp(version, "v1") != 0) {
    throw std::runtime_error("TDKSFIELD: malformed header '" + line + "'");
  }
  GridPtr target = grid;
  if (!target || target->dim() != dim || target->points() != points ||
      target->extent() != extent) {
    target = make_grid(dim, extent, points);
  }
  ComplexField field(target);
  for (auto& z : field.values) {
    const double re = get_le_double(in);
    const double im = get_le_double(in);
    z = {re, im};
  }
  return field;
}

ComplexField read_field_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_field(in);
}

}  // namespace tdks
