#include "whichway/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace whichway {

namespace {

constexpr int kSerializedDigits = 12;
constexpr int kTextDigits = 6;

std::string format_double(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, round_significant(v, digits));
  return buf;
}

nlohmann::ordered_json value_json(const Value& v) {
  return std::visit(
      [](const auto& x) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          return round_significant(x, kSerializedDigits);
        } else {
          return x;
        }
      },
      v);
}

std::string value_text(const Value& v, int digits) {
  return std::visit(
      [digits](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(x, digits);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else {
          return std::to_string(x);
        }
      },
      v);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

double round_significant(double value, int digits) {
  if (value == 0.0 || !std::isfinite(value)) return value == 0.0 ? 0.0 : value;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  const double rounded = std::strtod(buf, nullptr);
  return rounded == 0.0 ? 0.0 : rounded;  // drop negative zero
}

void ScenarioReport::add(std::string name, Value value, Provenance provenance) {
  scalars.push_back({std::move(name), std::move(value), provenance});
}

const Scalar& ScenarioReport::scalar(std::string_view name) const {
  for (const auto& s : scalars)
    if (s.name == name) return s;
  throw std::out_of_range("report has no scalar '" + std::string(name) + "'");
}

double ScenarioReport::number(std::string_view name) const {
  const Value& v = scalar(name).value;
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw std::out_of_range("scalar '" + std::string(name) + "' is not numeric");
}

std::string ScenarioReport::text(std::string_view name) const {
  return std::get<std::string>(scalar(name).value);
}

bool ScenarioReport::flag(std::string_view name) const { return std::get<bool>(scalar(name).value); }

const Table& ScenarioReport::table(std::string_view name) const {
  for (const auto& t : tables)
    if (t.name == name) return t;
  throw std::out_of_range("report has no table '" + std::string(name) + "'");
}

const TwoQubitDM& ScenarioReport::density_matrix(std::string_view name) const {
  for (const auto& [n, dm] : density_matrices)
    if (n == name) return dm;
  throw std::out_of_range("report has no density matrix '" + std::string(name) + "'");
}

nlohmann::ordered_json to_json(const ScenarioReport& report) {
  nlohmann::ordered_json doc;
  doc["scenario"] = report.scenario;

  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.parameters) params[k] = value_json(v);
  doc["parameters"] = params;

  nlohmann::ordered_json scalars = nlohmann::ordered_json::object();
  for (const auto& s : report.scalars) {
    scalars[s.name] = {{"value", value_json(s.value)},
                       {"provenance", s.provenance == Provenance::Exact ? "exact" : "sampled"}};
  }
  doc["results"] = scalars;

  nlohmann::ordered_json tables = nlohmann::ordered_json::object();
  for (const auto& t : report.tables) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json r = nlohmann::ordered_json::array();
      for (const auto& cell : row) r.push_back(value_json(cell));
      rows.push_back(r);
    }
    tables[t.name] = {{"columns", t.columns}, {"rows", rows}};
  }
  doc["tables"] = tables;

  nlohmann::ordered_json matrices = nlohmann::ordered_json::object();
  for (const auto& [name, dm] : report.density_matrices) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int i = 0; i < 4; ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (int j = 0; j < 4; ++j) {
        row.push_back({round_significant(dm.matrix(i, j).real(), kSerializedDigits),
                       round_significant(dm.matrix(i, j).imag(), kSerializedDigits)});
      }
      rows.push_back(row);
    }
    matrices[name] = {{"labels", dm.labels}, {"matrix", rows}};
  }
  doc["density_matrices"] = matrices;
  doc["notes"] = report.notes;
  return doc;
}

std::string to_json_text(const ScenarioReport& report) { return to_json(report).dump(2) + "\n"; }

std::string to_csv(const ScenarioReport& report) {
  std::ostringstream os;
  if (report.tables.empty()) return {};
  const Table& t = report.tables.front();
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_escape(t.columns[i]);
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << csv_escape(value_text(row[i], kSerializedDigits));
    }
    os << "\n";
  }
  return os.str();
}

std::string to_text(const ScenarioReport& report) {
  std::ostringstream os;
  os << "scenario: " << report.scenario << "\n";
  for (const auto& [k, v] : report.parameters) os << "  " << k << " = " << value_text(v, kTextDigits) << "\n";

  os << "\nresults\n";
  std::size_t width = 0;
  for (const auto& s : report.scalars) width = std::max(width, s.name.size());
  for (const auto& s : report.scalars) {
    os << "  " << std::left << std::setw(static_cast<int>(width)) << s.name << "  "
       << value_text(s.value, kTextDigits) << (s.provenance == Provenance::Sampled ? "  (sampled)" : "")
       << "\n";
  }

  for (const auto& t : report.tables) {
    os << "\n" << t.name << "\n";
    std::vector<std::size_t> widths(t.columns.size());
    for (std::size_t i = 0; i < t.columns.size(); ++i) widths[i] = t.columns[i].size();
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : t.rows) {
      auto& line = cells.emplace_back();
      for (std::size_t i = 0; i < row.size(); ++i) {
        line.push_back(value_text(row[i], kTextDigits));
        widths[i] = std::max(widths[i], line.back().size());
      }
    }
    auto emit = [&](const std::vector<std::string>& line) {
      os << " ";
      for (std::size_t i = 0; i < line.size(); ++i) {
        os << " " << std::left << std::setw(static_cast<int>(widths[i])) << line[i];
      }
      os << "\n";
    };
    emit(t.columns);
    for (const auto& line : cells) emit(line);
  }

  for (const auto& [name, dm] : report.density_matrices) {
    os << "\n" << name << " (" << dm.labels[0] << ", " << dm.labels[1] << ")\n";
    for (int i = 0; i < 4; ++i) {
      os << " ";
      for (int j = 0; j < 4; ++j) {
        auto z = dm.matrix(i, j);
        if (std::abs(z.real()) < 1e-12) z.real(0.0);
        if (std::abs(z.imag()) < 1e-12) z.imag(0.0);
        os << "  " << std::right << std::setw(10) << format_double(z.real(), kTextDigits)
           << (z.imag() < 0 ? "-" : "+") << std::left << std::setw(10)
           << (format_double(std::abs(z.imag()), kTextDigits) + "i") << std::right;
      }
      os << "\n";
    }
  }

  if (!report.notes.empty()) {
    os << "\nnotes\n";
    for (const auto& n : report.notes) os << "  - " << n << "\n";
  }
  return os.str();
}

}  // namespace whichway
