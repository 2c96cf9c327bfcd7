#pragma once

// Subcommand bodies. Each returns a process exit code and writes its report
// files under the resolved output directory.

#include "crlab/certificate.hpp"
#include "crlab/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace crlab::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitNotConverged = 2,
  kExitUsage = 64,
  kExitData = 65,
};

/// cfg.out, else $CRLAB_OUT, else ./crlab-out. Created if missing.
std::string output_dir(const RunConfig& cfg);

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_reproduce(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Dispatches on cfg.mode and maps UsageError / DataError to 64 / 65.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

struct CriterionRow {
  int id = 0;
  std::string name;
  std::string expected;
  std::string measured;
  bool pass = false;
  double seconds = 0.0;     // wall time; kept out of the report files
  double budget = 0.0;      // seconds
  std::vector<Certificate> records;
};

struct ReproduceOptions {
  std::uint64_t seed = 20240607;
  bool quick = false;
};

/// Criteria 1 to 11. Row 12 (end-to-end run) is assembled by cmd_reproduce.
std::vector<CriterionRow> run_criteria(const ReproduceOptions& opts);

}  // namespace crlab::cli
