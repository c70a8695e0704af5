#pragma once

// Scenario reports and their JSON / CSV / text renderings.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "whichway/metrics.hpp"

namespace whichway {

using Value = std::variant<std::int64_t, double, std::string, bool>;

enum class Provenance { Exact, Sampled };

struct Scalar {
  std::string name;
  Value value;
  Provenance provenance = Provenance::Exact;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
};

struct ScenarioReport {
  std::string scenario;
  std::vector<std::pair<std::string, Value>> parameters;
  std::vector<Scalar> scalars;
  std::vector<Table> tables;  // tables.front() is the one written as CSV
  std::vector<std::pair<std::string, TwoQubitDM>> density_matrices;
  std::vector<std::string> notes;

  void add(std::string name, Value value, Provenance provenance = Provenance::Exact);

  /// Throws std::out_of_range for an unknown name.
  const Scalar& scalar(std::string_view name) const;
  double number(std::string_view name) const;
  std::string text(std::string_view name) const;
  bool flag(std::string_view name) const;
  const Table& table(std::string_view name) const;
  const TwoQubitDM& density_matrix(std::string_view name) const;
};

/// Rounds to `digits` significant decimal digits (used for every serialized float).
double round_significant(double value, int digits);

nlohmann::ordered_json to_json(const ScenarioReport& report);
std::string to_json_text(const ScenarioReport& report);
/// Header row plus one row per entry of the first table.
std::string to_csv(const ScenarioReport& report);
/// Human-readable rendering, floats rounded to 6 significant digits.
std::string to_text(const ScenarioReport& report);

}  // namespace whichway
