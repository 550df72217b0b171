#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "psiapprox/config.hpp"

namespace psiapprox {

enum class Command { Approx, Bws, Winiarski, Extremal, Curvature, Volume, Extend };

Command parse_command(const std::string& name);
std::string to_string(Command c);

struct RunOptions {
  std::optional<std::string> out_dir;  ///< overrides the config; written as-is when set
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> jobs;
};

struct RunResult {
  int exit_code = 1;
  nlohmann::ordered_json report;
  std::vector<std::string> files;  ///< paths written, report first
};

/// Exit code from a verdict list: 0 all PASS (or none), 2 INCONCLUSIVE without FAIL, 1 any FAIL.
int exit_code_for(const std::vector<Verdict>& verdicts);

/// Executes one experiment. Report and series files land in the output
/// directory as <command>_report.json and <command>_<series>.csv. With no
/// output directory nothing is written and only the in-memory report is returned.
RunResult run(Command command, const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace psiapprox
