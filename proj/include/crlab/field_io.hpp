#pragma once

// Grid field files. Binary layout, little-endian:
//   int64 dim, int64 counts[dim], f64 (lo, hi) per axis, f64 values[prod(counts)]
// in row-major order. CSV has one row per node: index columns, then value.

#include "crlab/elliptic.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crlab {

/// Malformed or truncated field data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string encode_field(const elliptic::GridField& field);
elliptic::GridField decode_field(std::string_view bytes);

void write_field_binary(const std::string& path, const elliptic::GridField& field);
elliptic::GridField read_field_binary(const std::string& path);

/// Rows for nodes with mask[f] != 0 (all nodes when mask is empty).
void write_field_csv(std::ostream& out, const elliptic::GridField& field, std::string_view value_name = "value",
                     const std::vector<std::uint8_t>& mask = {});
void write_field_csv(const std::string& path, const elliptic::GridField& field, std::string_view value_name = "value",
                     const std::vector<std::uint8_t>& mask = {});

}  // namespace crlab
