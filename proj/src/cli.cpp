#include "whichway/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "whichway/errors.hpp"
#include "whichway/interferometer.hpp"

namespace whichway::cli {

namespace {

constexpr int kMaxFeedbackRounds = 60;

int default_depth(const std::string& scenario) { return scenario == "feedback" ? 3 : 2; }

bool known_scenario(const std::string& name) {
  const auto& catalog = scenario_catalog();
  return std::any_of(catalog.begin(), catalog.end(), [&](const CatalogEntry& e) { return e.name == name; });
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open network file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("network file '" + path + "' is not valid JSON: " + e.what());
  }
  return network_from_json(doc);
}

std::string catalog_text(Format format) {
  const auto& catalog = scenario_catalog();
  if (format == Format::Json) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& e : catalog) {
      doc.push_back({{"name", e.name}, {"parameters", e.parameters}, {"reproduces", e.reproduces}});
    }
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  if (format == Format::Csv) {
    os << "name,parameters,reproduces\n";
    for (const auto& e : catalog) os << e.name << ",\"" << e.parameters << "\",\"" << e.reproduces << "\"\n";
    return os.str();
  }
  for (const auto& e : catalog) {
    os << e.name << std::string(18 - std::min<std::size_t>(17, e.name.size()), ' ') << e.reproduces << "\n"
       << std::string(18, ' ') << "options: " << e.parameters << "\n";
  }
  return os.str();
}

int emit(const std::string& text, const std::string& output_path, std::ostream& out, std::ostream& err) {
  if (output_path.empty()) {
    out << text;
    return kExitOk;
  }
  std::ofstream file(output_path, std::ios::binary);
  if (!file) {
    err << "error: cannot write '" << output_path << "'\n";
    return kExitUsage;
  }
  file << text;
  return kExitOk;
}

}  // namespace

void validate(const RunConfig& c) {
  if (!known_scenario(c.scenario)) throw InvalidArgument("unknown scenario '" + c.scenario + "'");
  const int depth = c.depth.value_or(default_depth(c.scenario));
  if (c.scenario == "tree" && (depth < 1 || depth > 7)) throw InvalidArgument("--depth must lie in [1, 7] for tree");
  if (c.scenario == "feedback" && (depth < 1 || depth > kMaxFeedbackRounds)) {
    throw InvalidArgument("--depth must lie in [1, " + std::to_string(kMaxFeedbackRounds) + "] for feedback");
  }
  if (c.trials < 0) throw InvalidArgument("--trials must be non-negative");
  if ((c.scenario == "complementarity" || c.scenario == "gaussian") && c.grid < 2) {
    throw InvalidArgument("--grid must be at least 2");
  }
  if (!(c.a2 >= 0.0 && c.a2 <= 1.0)) throw InvalidArgument("--a2 must lie in [0, 1]");
  if (!(c.sigma > 0.0)) throw InvalidArgument("--sigma must be positive");
  if (!(c.dt_max >= 0.0)) throw InvalidArgument("--dt-max must be non-negative");
  if (c.scenario == "network") {
    if (c.network_path.empty()) throw InvalidArgument("scenario 'network' needs --network <file>");
    (void)load_network(c.network_path);
  }
}

ScenarioReport run_scenario(const RunConfig& c) {
  const int depth = c.depth.value_or(default_depth(c.scenario));
  const Statistics s = c.statistics;
  if (c.scenario == "fig1") return scenario_fig1(s, c.equal_spins);
  if (c.scenario == "fig2") return scenario_fig2(s);
  if (c.scenario == "tree") return scenario_tree(depth, s);
  if (c.scenario == "feedback") return scenario_feedback(depth, s, c.trials, c.seed);
  if (c.scenario == "statistics-test") return scenario_statistics_test(s);
  if (c.scenario == "mixed-input") return scenario_mixed_input(s);
  if (c.scenario == "complementarity") return scenario_complementarity(c.grid, s);
  if (c.scenario == "gaussian") return scenario_gaussian(c.v, c.sigma, c.dt_max, c.grid, s);
  if (c.scenario == "dual") return scenario_dual(s, c.a2);
  if (c.scenario == "network") return scenario_network(load_network(c.network_path), s);
  throw InvalidArgument("unknown scenario '" + c.scenario + "'");
}

std::string render(const ScenarioReport& report, Format format) {
  switch (format) {
    case Format::Json: return to_json_text(report);
    case Format::Csv: return to_csv(report);
    case Format::Table: return to_text(report);
  }
  return {};
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Which-way entanglement generation for identical particles"};
  app.require_subcommand(1);

  const std::map<std::string, Format> formats{{"table", Format::Table}, {"json", Format::Json}, {"csv", Format::Csv}};
  const std::map<std::string, Statistics> statistics{{"boson", Statistics::Boson}, {"fermion", Statistics::Fermion}};

  RunConfig config;
  Format list_format = Format::Table;
  auto* list = app.add_subcommand("list", "List the shipped scenarios");
  list->add_option("--format", list_format, "table, json or csv")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("scenario", config.scenario, "Scenario name (see 'list')")->required();
  run->add_option("--statistics", config.statistics, "boson or fermion")
      ->transform(CLI::CheckedTransformer(statistics, CLI::ignore_case));
  run->add_option("--depth", config.depth, "Tree depth (tree) or number of rounds (feedback)");
  run->add_option("--grid", config.grid, "Grid points for complementarity / gaussian sweeps");
  run->add_option("--a2", config.a2, "Squared tag overlap |a|^2 (dual)");
  run->add_option("--v", config.v, "Packet velocity (gaussian)");
  run->add_option("--sigma", config.sigma, "Packet width (gaussian)");
  run->add_option("--dt-max", config.dt_max, "Largest time delay of the sweep (gaussian)");
  run->add_option("--trials", config.trials, "Monte Carlo trajectories (feedback); 0 for exact only");
  run->add_option("--seed", config.seed, "Random seed");
  run->add_flag("--equal-spins", config.equal_spins, "Inject |A up; B up> instead of |A up; B down> (fig1)");
  run->add_option("--network", config.network_path, "Network JSON file (network)");
  run->add_option("--format", config.format, "table, json or csv")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  run->add_option("--output,-o", config.output_path, "Write the report to this file");

  int network_depth = 0;
  int network_fig = 0;
  std::string network_output;
  auto* network = app.add_subcommand("network", "Print the JSON description of a shipped network");
  network->add_option("--depth", network_depth, "Tree depth");
  network->add_option("--fig", network_fig, "1 or 2 for the lettered networks");
  network->add_option("--output,-o", network_output, "Write to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  if (*list) return emit(catalog_text(list_format), "", out, err);

  if (*network) {
    try {
      Network net = network_fig == 1 ? fig1_network()
                    : network_fig == 2 ? fig2_network()
                    : network_depth > 0 ? build_tree(network_depth)
                    : throw InvalidArgument("network needs --fig 1|2 or --depth N");
      return emit(to_json(net).dump(2) + "\n", network_output, out, err);
    } catch (const Error& e) {
      err << "usage error: " << e.what() << "\n";
      return kExitUsage;
    }
  }

  try {
    validate(config);
  } catch (const Error& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::string text;
  try {
    text = render(run_scenario(config), config.format);
  } catch (const Error& e) {
    err << "scenario error: " << e.what() << "\n";
    return kExitScenario;
  }
  return emit(text, config.output_path, out, err);
}

}  // namespace whichway::cli
