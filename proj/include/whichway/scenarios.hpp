#pragma once

// End-to-end experiments on the shipped networks. Each returns a
// ScenarioReport; the CLI and the acceptance suite consume these directly.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "whichway/fock.hpp"
#include "whichway/interferometer.hpp"
#include "whichway/metrics.hpp"
#include "whichway/report.hpp"

namespace whichway {

inline constexpr std::uint64_t kDefaultSeed = 20011019;

/// Classical mixture of pure two-particle inputs.
struct Ensemble {
  std::vector<std::pair<double, FockState>> components;

  /// Throws InvalidArgument on negative weights, weights not summing to 1,
  /// or mixed statistics.
  void validate() const;
};

/// Each particle in the unpolarized spin state (|up><up| + |down><down|)/2:
/// the four products |A s1; B s2> with weight 1/4 each.
Ensemble unpolarized_ensemble(Statistics statistics);

/// Coincidence post-selection of an ensemble through the single splitter:
/// overall coincidence probability and the conditional spin state on C, D.
struct EnsembleCoincidence {
  double probability = 0.0;
  TwoQubitDM state;
  std::vector<double> component_probabilities;
};
EnsembleCoincidence ensemble_coincidence(const Ensemble& ensemble);

/// Tag-free realization of the partially distinguishable coincidence state:
/// the single-splitter Bell pair with weight (1 + a2)/2 and its relative-sign
/// partner with weight (1 - a2)/2. Reduces to the same spin density matrix as
/// the tagged input with |a|^2 = a2.
Ensemble distinguishability_family(double a2, Statistics statistics);

ScenarioReport scenario_fig1(Statistics statistics, bool equal_spins = false);
ScenarioReport scenario_fig2(Statistics statistics);
ScenarioReport scenario_tree(int depth, Statistics statistics);
ScenarioReport scenario_feedback(int rounds, Statistics statistics, std::int64_t trials,
                                 std::uint64_t seed = kDefaultSeed);
ScenarioReport scenario_statistics_test(Statistics statistics);
ScenarioReport scenario_mixed_input(Statistics statistics);
ScenarioReport scenario_complementarity(int grid, Statistics statistics);
ScenarioReport scenario_gaussian(double v, double sigma, double dt_max, int grid, Statistics statistics);
ScenarioReport scenario_dual(Statistics statistics, double a2 = 1.0);
/// Opposite-spin pair injected into the first two network inputs. Throws
/// ImpossiblePostselection if no two-detector coincidence can occur.
ScenarioReport scenario_network(const Network& network, Statistics statistics);

struct CatalogEntry {
  std::string name;
  std::string parameters;
  std::string reproduces;  // the result the scenario checks
};

/// Sorted by name.
const std::vector<CatalogEntry>& scenario_catalog();

}  // namespace whichway
