#include "crlab/commands.hpp"
#include "crlab/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

// Flag name, config key, help. Values stay strings until RunConfig::set.
const FlagSpec kFlags[] = {
    {"--suite", "suite", "dim2 | sigma2 | sigman | all"},
    {"--A", "A", "structure constant, e.g. 2 or 3/2 or 1.6"},
    {"--n", "n", "dimension for sigma_n suites"},
    {"--nl", "nl", "nonlinearity id: exp:<beta> or power:<p>"},
    {"--grid", "grid", "DIM:LO:HI box"},
    {"--h", "h", "grid spacing"},
    {"--bc", "bc", "lncosh | radial:<c> | saddle:<c>"},
    {"--init", "init", "harmonic | zero"},
    {"--seed", "seed", "run seed"},
    {"--tol", "tol", "solver or analysis tolerance"},
    {"--max-iter", "max_iter", "Newton iteration cap"},
    {"--k", "k", "extra sigma_k field to write"},
    {"--field", "field", "field file to analyze"},
    {"--out", "out", "output directory (default $CRLAB_OUT or ./crlab-out)"},
};

void add_flags(CLI::App* sub, const std::vector<std::string>& keys, std::map<std::string, std::string>& values) {
  for (const auto& spec : kFlags) {
    if (std::find(keys.begin(), keys.end(), spec.key) == keys.end()) continue;
    sub->add_option(spec.flag, values[spec.key], spec.help);
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace crlab::cli;

  CLI::App app{"Constant rank certificates, solver and field analysis"};
  app.set_version_flag("--version", std::string(crlab::tool_version()));
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);

  std::string config_path;
  bool quick = false;
  bool dump_config = false;
  std::map<std::string, std::string> values;

  struct Sub {
    const char* name;
    const char* help;
    std::vector<std::string> keys;
  };
  const std::vector<Sub> subs{
      {"verify", "run certificate suites", {"suite", "A", "n", "seed", "out"}},
      {"solve", "solve Delta u = G(u) on a box", {"nl", "grid", "h", "bc", "init", "seed", "tol", "max_iter", "out"}},
      {"analyze", "Hessian rank and minimum checks on a solved field", {"nl", "k", "tol", "seed", "field", "out"}},
      {"reproduce", "run every acceptance criterion", {"seed", "out"}},
  };
  std::map<std::string, CLI::App*> handles;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_flags(sub, s.keys, values);
    sub->add_option("--config", config_path, "key = value config file; flags override it");
    sub->add_flag("--dump-config", dump_config, "print the resolved config and exit");
    if (std::string(s.name) == "verify" || std::string(s.name) == "reproduce")
      sub->add_flag("--quick", quick, "divide certificate trial counts by 10");
    if (std::string(s.name) == "analyze") sub->add_option("field_path", values["field"], "field file (.bin)");
    handles[s.name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = RunConfig::load(config_path);
    for (const auto& [name, sub] : handles)
      if (sub->parsed()) cfg.set("mode", name);
    for (const auto& [key, value] : values)
      if (!value.empty()) cfg.set(key, value);
    if (quick) cfg.set("quick", "true");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (dump_config) {
    std::cout << cfg.serialize();
    return kExitOk;
  }
  return run(cfg, std::cout, std::cerr);
}
