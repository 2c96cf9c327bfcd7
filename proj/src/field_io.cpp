#include "crlab/field_io.hpp"

#include "crlab/scalar.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <ostream>

namespace crlab {

namespace {

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

std::uint64_t get_u64(std::string_view in, std::size_t& pos) {
  if (in.size() - pos < 8) throw DataError("field file truncated at byte " + std::to_string(pos));
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
  pos += 8;
  return v;
}

void put_f64(std::string& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }
double get_f64(std::string_view in, std::size_t& pos) { return std::bit_cast<double>(get_u64(in, pos)); }

}  // namespace

std::string encode_field(const elliptic::GridField& field) {
  const auto& g = field.grid;
  std::string out;
  out.reserve(8 * (1 + 3 * static_cast<std::size_t>(g.dim) + field.values.size()));
  put_u64(out, static_cast<std::uint64_t>(g.dim));
  for (int a = 0; a < g.dim; ++a) put_u64(out, g.counts[static_cast<std::size_t>(a)]);
  for (int a = 0; a < g.dim; ++a) {
    put_f64(out, g.lo[static_cast<std::size_t>(a)]);
    put_f64(out, g.hi[static_cast<std::size_t>(a)]);
  }
  for (double v : field.values) put_f64(out, v);
  return out;
}

elliptic::GridField decode_field(std::string_view bytes) {
  std::size_t pos = 0;
  const auto dim = static_cast<std::int64_t>(get_u64(bytes, pos));
  if (dim < 1 || dim > 3) throw DataError("field header: dimension " + std::to_string(dim) + " is not 1, 2 or 3");
  elliptic::Index counts{1, 1, 1};
  elliptic::Point lo{0, 0, 0}, hi{0, 0, 0};
  std::uint64_t total = 1;
  for (std::int64_t a = 0; a < dim; ++a) {
    const std::uint64_t c = get_u64(bytes, pos);
    if (c < 5 || c > (1u << 24)) throw DataError("field header: bad point count " + std::to_string(c));
    counts[static_cast<std::size_t>(a)] = c;
    total *= c;
  }
  for (std::int64_t a = 0; a < dim; ++a) {
    lo[static_cast<std::size_t>(a)] = get_f64(bytes, pos);
    hi[static_cast<std::size_t>(a)] = get_f64(bytes, pos);
  }
  if (bytes.size() - pos != 8 * total)
    throw DataError("field payload has " + std::to_string(bytes.size() - pos) + " bytes, expected " +
                    std::to_string(8 * total));
  elliptic::Grid grid;
  try {
    grid = elliptic::Grid::from_counts(static_cast<int>(dim), lo, hi, counts);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("field header: ") + e.what());
  }
  elliptic::GridField field(grid);
  for (double& v : field.values) {
    v = get_f64(bytes, pos);
    if (!std::isfinite(v)) throw DataError("field payload holds a non-finite value");
  }
  return field;
}

void write_field_binary(const std::string& path, const elliptic::GridField& field) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const std::string bytes = encode_field(field);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

elliptic::GridField read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open field file " + path);
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_field(bytes);
}

void write_field_csv(std::ostream& out, const elliptic::GridField& field, std::string_view value_name,
                     const std::vector<std::uint8_t>& mask) {
  static constexpr const char* names[] = {"i", "j", "k"};
  const auto& g = field.grid;
  for (int a = 0; a < g.dim; ++a) out << names[a] << ',';
  out << value_name << '\n';
  for (std::size_t f = 0; f < field.values.size(); ++f) {
    if (!mask.empty() && !mask[f]) continue;
    const auto idx = g.multi(f);
    for (int a = 0; a < g.dim; ++a) out << idx[static_cast<std::size_t>(a)] << ',';
    out << to_string(field.values[f]) << '\n';
  }
}

void write_field_csv(const std::string& path, const elliptic::GridField& field, std::string_view value_name,
                     const std::vector<std::uint8_t>& mask) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_field_csv(out, field, value_name, mask);
}

}  // namespace crlab
