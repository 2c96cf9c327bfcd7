#include "crlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

namespace crlab::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw UsageError("config key '" + std::string(key) + "' needs an integer, got '" + std::string(value) + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw UsageError("config key '" + std::string(key) + "' needs true or false, got '" + std::string(value) + "'");
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k{"mode", "suite", "A",    "n",   "nl",       "grid", "h",     "bc",
                                          "init", "seed",  "tol",  "max_iter", "k", "field", "out", "quick"};
  return k;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  if (key == "mode") {
    if (value != "verify" && value != "solve" && value != "analyze" && value != "reproduce")
      throw UsageError("mode must be verify, solve, analyze or reproduce");
    mode = value;
  } else if (key == "suite") suite = value;
  else if (key == "A") A = value;
  else if (key == "n") n = value;
  else if (key == "nl") nl = value;
  else if (key == "grid") grid = value;
  else if (key == "h") h = value;
  else if (key == "bc") bc = value;
  else if (key == "init") init = value;
  else if (key == "seed") seed = parse_integer<std::uint64_t>(key, value);
  else if (key == "tol") tol = value;
  else if (key == "max_iter") {
    max_iter = parse_integer<int>(key, value);
    if (max_iter < 0) throw UsageError("max_iter must be >= 0");
  } else if (key == "k") k = value;
  else if (key == "field") field = value;
  else if (key == "out") out = value;
  else if (key == "quick") quick = parse_bool(key, value);
  else throw UsageError("unknown config key '" + std::string(key) + "'");
}

std::string RunConfig::get(std::string_view key) const {
  if (key == "mode") return mode;
  if (key == "suite") return suite;
  if (key == "A") return A;
  if (key == "n") return n;
  if (key == "nl") return nl;
  if (key == "grid") return grid;
  if (key == "h") return h;
  if (key == "bc") return bc;
  if (key == "init") return init;
  if (key == "seed") return std::to_string(seed);
  if (key == "tol") return tol;
  if (key == "max_iter") return std::to_string(max_iter);
  if (key == "k") return k;
  if (key == "field") return field;
  if (key == "out") return out;
  if (key == "quick") return quick ? "true" : "false";
  throw UsageError("unknown config key '" + std::string(key) + "'");
}

std::string RunConfig::serialize() const {
  std::string text;
  for (const auto& key : keys()) text += key + " = " + get(key) + "\n";
  return text;
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto end = text.find('\n');
    std::string_view line = trim(text.substr(0, end));
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw UsageError("config line " + std::to_string(line_no) + " is not key = value");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path);
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse(text);
}

}  // namespace crlab::cli
