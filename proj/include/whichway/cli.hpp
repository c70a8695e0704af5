#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "whichway/fock.hpp"
#include "whichway/report.hpp"
#include "whichway/scenarios.hpp"

namespace whichway::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitScenario = 3;

enum class Format { Table, Json, Csv };

struct RunConfig {
  std::string scenario;
  Statistics statistics = Statistics::Fermion;
  std::optional<int> depth;  // tree depth or feedback rounds; scenario default if unset
  int grid = 21;
  double a2 = 1.0;
  double v = 1.0;
  double sigma = 1.0;
  double dt_max = 4.0;
  std::int64_t trials = 100000;
  std::uint64_t seed = kDefaultSeed;
  bool equal_spins = false;
  std::string network_path;
  Format format = Format::Table;
  std::string output_path;  // empty: standard output
};

/// Throws InvalidArgument for an unknown scenario or an out-of-range parameter.
void validate(const RunConfig& config);

/// Runs a validated config.
ScenarioReport run_scenario(const RunConfig& config);

std::string render(const ScenarioReport& report, Format format);

/// Full command-line entry point; returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace whichway::cli
