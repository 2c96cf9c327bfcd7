#include "crlab/certificate.hpp"

#include <ostream>
#include <stdexcept>

namespace crlab {

std::string_view tool_version() { return "crlab " CRLAB_VERSION; }

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::sharpness_witness: return "sharpness-witness";
    case Verdict::inapplicable: return "inapplicable";
  }
  return "fail";
}

Verdict verdict_from_string(std::string_view text) {
  if (text == "pass") return Verdict::pass;
  if (text == "fail") return Verdict::fail;
  if (text == "sharpness-witness") return Verdict::sharpness_witness;
  if (text == "inapplicable") return Verdict::inapplicable;
  throw std::invalid_argument("unknown verdict '" + std::string(text) + "'");
}

Certificate& Certificate::with(std::string key, ParamValue value) {
  for (auto& [k, v] : params) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  params.emplace_back(std::move(key), std::move(value));
  return *this;
}

const ParamValue* Certificate::find(std::string_view key) const {
  for (const auto& [k, v] : params)
    if (k == key) return &v;
  return nullptr;
}

namespace {

nlohmann::json scalar_json(const ScalarValue& v) {
  if (const auto* r = std::get_if<Rational>(&v)) return nlohmann::json{{"q", to_string(*r)}};
  return nlohmann::json(std::get<double>(v));
}

ScalarValue scalar_from_json(const nlohmann::json& j) {
  if (j.is_object()) return parse_rational(j.at("q").get<std::string>());
  return j.get<double>();
}

nlohmann::json param_json(const ParamValue& v) {
  return std::visit(
      [](const auto& x) -> nlohmann::json {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, Rational>) {
          return nlohmann::json{{"q", to_string(x)}};
        } else {
          return nlohmann::json(x);
        }
      },
      v);
}

ParamValue param_from_json(const nlohmann::json& j) {
  if (j.is_object()) return parse_rational(j.at("q").get<std::string>());
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  return j.get<std::string>();
}

}  // namespace

nlohmann::json to_json(const Certificate& cert) {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& [k, v] : cert.params) params.push_back({k, param_json(v)});
  nlohmann::json j;
  j["claim_id"] = cert.claim_id;
  j["params"] = std::move(params);
  j["verdict"] = std::string(to_string(cert.verdict));
  if (cert.witness) {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& s : *cert.witness) w.push_back(scalar_json(s));
    j["witness"] = std::move(w);
  } else {
    j["witness"] = nullptr;
  }
  j["residual"] = scalar_json(cert.residual);
  j["notes"] = cert.notes;
  return j;
}

Certificate certificate_from_json(const nlohmann::json& j) {
  Certificate cert(j.at("claim_id").get<std::string>());
  for (const auto& kv : j.at("params")) cert.params.emplace_back(kv.at(0).get<std::string>(), param_from_json(kv.at(1)));
  cert.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  if (!j.at("witness").is_null()) {
    std::vector<ScalarValue> w;
    for (const auto& s : j.at("witness")) w.push_back(scalar_from_json(s));
    cert.witness = std::move(w);
  }
  cert.residual = scalar_from_json(j.at("residual"));
  if (j.contains("notes")) cert.notes = j.at("notes").get<std::string>();
  return cert;
}

RecordWriter::RecordWriter(std::ostream& out, std::uint64_t seed) : out_(&out), seed_(seed) {}

void RecordWriter::write(const Certificate& cert) {
  nlohmann::ordered_json j;
  nlohmann::json body = to_json(cert);
  j["claim_id"] = body["claim_id"];
  j["params"] = body["params"];
  j["verdict"] = body["verdict"];
  j["witness"] = body["witness"];
  j["residual"] = body["residual"];
  j["notes"] = body["notes"];
  j["seed"] = seed_;
  j["version"] = std::string(tool_version());
  *out_ << j.dump() << '\n';
}

}  // namespace crlab
