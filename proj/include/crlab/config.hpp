#pragma once

// Run configuration: a key = value text document. Flags given on the
// command line are applied after the file, so they win.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crlab::cli {

/// Malformed configuration or flags; maps to exit code 64.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string mode = "reproduce";  // verify | solve | analyze | reproduce
  std::string suite = "all";
  std::string A;                   // empty: each claim's own constant
  std::string n;                   // empty: all dimensions of a suite
  std::string nl = "exp:2";
  std::string grid;                // DIM:LO:HI; empty: 1:-1:1
  std::string h = "1/64";
  std::string bc = "lncosh";       // lncosh | radial:<c> | saddle:<c>
  std::string init = "harmonic";   // harmonic | zero
  std::uint64_t seed = 20240607;
  std::string tol;                 // empty: mode default
  int max_iter = 50;
  std::string k;
  std::string field;
  std::string out;                 // empty: $CRLAB_OUT, then ./crlab-out
  bool quick = false;

  static const std::vector<std::string>& keys();

  /// Throws UsageError for an unknown key or a value of the wrong type.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  /// Every key in keys() order, one "key = value" line each.
  std::string serialize() const;
  /// Blank lines and lines starting with '#' are skipped.
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::string& path);
};

}  // namespace crlab::cli
