#pragma once

#include "crlab/scalar.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace crlab {

enum class Verdict { pass, fail, sharpness_witness, inapplicable };

std::string_view to_string(Verdict verdict);
Verdict verdict_from_string(std::string_view text);

using ParamValue = std::variant<std::int64_t, Rational, double, std::string, bool>;

/// Verdict for one algebraic or numerical claim. Also the record shape used
/// for minima reports, conclusion verdicts and acceptance rows.
struct Certificate {
  std::string claim_id;
  std::vector<std::pair<std::string, ParamValue>> params;
  Verdict verdict = Verdict::pass;
  std::optional<std::vector<ScalarValue>> witness;
  ScalarValue residual = Rational(0);
  std::string notes;

  Certificate() = default;
  explicit Certificate(std::string id) : claim_id(std::move(id)) {}

  Certificate& with(std::string key, ParamValue value);
  const ParamValue* find(std::string_view key) const;

  /// Accepted by the reporter: pass, an expected sharpness witness, or an
  /// inapplicable gate.
  bool ok() const noexcept { return verdict != Verdict::fail; }
};

/// Rationals serialize as strings ("p/q"), floats as JSON numbers, so the
/// mode survives a round trip.
nlohmann::json to_json(const Certificate& cert);
Certificate certificate_from_json(const nlohmann::json& j);

/// One compact JSON object per line, keys in a fixed order, plus the run
/// seed and tool version stamped on every record.
class RecordWriter {
 public:
  RecordWriter(std::ostream& out, std::uint64_t seed);
  void write(const Certificate& cert);

 private:
  std::ostream* out_;
  std::uint64_t seed_;
};

std::string_view tool_version();

}  // namespace crlab
