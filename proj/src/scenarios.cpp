#include "whichway/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "whichway/errors.hpp"

namespace whichway {

namespace {

std::string pattern_label(const ExcitationPattern& pattern) {
  if (pattern.excited.empty()) return "none";
  std::string out;
  for (const auto& p : pattern.excited) out += (out.empty() ? "" : "+") + p;
  return out;
}

struct BranchSummary {
  std::string bell = "-";
  Value concurrence = std::string("-");
  Value phase = std::string("-");
  Value flip = std::string("-");
};

// Bell-state identity, concurrence and correction of a coincidence branch.
BranchSummary summarize(const Branch& branch) {
  BranchSummary out;
  if (!is_coincidence(branch.pattern)) return out;
  const auto& p = branch.pattern.excited;
  const TwoQubitDM dm = reduce_to_spin_dm(branch.state, *p.begin(), *std::next(p.begin()));
  const auto bell = identify_bell_state(dm);
  out.bell = bell ? to_string(*bell) : "none";
  out.concurrence = concurrence(dm);
  if (bell) {
    const SpinCorrection fix = correction_for_state(branch.state, *p.begin(), *std::next(p.begin()));
    out.phase = fix.phase();
    out.flip = fix.flips_spin();
  }
  return out;
}

Table branch_table(const BranchSet& branches, bool with_correction) {
  Table t{"branches", {"pattern", "probability", "bell_state", "concurrence"}, {}};
  if (with_correction) {
    t.columns.push_back("correction_phase");
    t.columns.push_back("correction_flip");
  }
  for (const auto& b : branches.branches) {
    const BranchSummary s = summarize(b);
    std::vector<Value> row{pattern_label(b.pattern), b.probability, s.bell, s.concurrence};
    if (with_correction) {
      row.push_back(s.phase);
      row.push_back(s.flip);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table state_table(const FockState& state) {
  Table t{"output_state", {"monomial", "re", "im"}, {}};
  for (const auto& [monomial, amp] : state.terms()) {
    std::string label;
    for (const auto& m : monomial) label += (label.empty() ? "" : ";") + to_string(m);
    t.rows.push_back({label, amp.real(), amp.imag()});
  }
  return t;
}

double coincidence_total(const BranchSet& branches) {
  double total = 0.0;
  for (const auto& b : branches.branches)
    if (is_coincidence(b.pattern)) total += b.probability;
  return total;
}

ScenarioReport network_report(std::string name, const Network& net, const FockState& input,
                              Statistics statistics, bool require_coincidence = false) {
  ScenarioReport report;
  report.scenario = std::move(name);
  report.parameters.push_back({"statistics", to_string(statistics)});
  const BranchSet branches = detect(run_network(net, input), net.monitored());
  if (require_coincidence) (void)postselect(branches, is_coincidence);
  report.tables.push_back(branch_table(branches, true));
  report.add("splitters", static_cast<std::int64_t>(net.splitters().size()));
  report.add("monitored_paths", static_cast<std::int64_t>(net.monitored().size()));
  report.add("patterns", static_cast<std::int64_t>(branches.branches.size()));
  report.add("entangled_yield", coincidence_total(branches));
  report.add("branch_probability_total", branches.total_probability());
  return report;
}

Eigen::Matrix2cd diag_phase(double theta) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  m(1, 1) = std::polar(1.0, theta);
  return m;
}

}  // namespace

void Ensemble::validate() const {
  if (components.empty()) throw InvalidArgument("empty ensemble");
  double total = 0.0;
  for (const auto& [w, state] : components) {
    if (w < 0.0) throw InvalidArgument("negative ensemble weight");
    if (state.statistics() != components.front().second.statistics()) {
      throw InvalidArgument("ensemble mixes statistics");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("ensemble weights do not sum to 1");
}

Ensemble unpolarized_ensemble(Statistics statistics) {
  Ensemble e;
  for (Spin s1 : {Spin::Up, Spin::Down})
    for (Spin s2 : {Spin::Up, Spin::Down})
      e.components.push_back({0.25, make_product_state(statistics, {Mode{"A", s1, 0}, Mode{"B", s2, 0}})});
  return e;
}

EnsembleCoincidence ensemble_coincidence(const Ensemble& ensemble) {
  ensemble.validate();
  const Network net = fig1_network();
  const ExcitationPattern cd{{"C", "D"}};
  EnsembleCoincidence out;
  std::vector<std::pair<double, TwoQubitDM>> parts;
  for (const auto& [w, state] : ensemble.components) {
    const BranchSet branches = detect(run_network(net, state), net.monitored());
    const Branch* b = branches.find(cd);
    const double p = b ? b->probability : 0.0;
    out.component_probabilities.push_back(p);
    if (b && w * p > 0.0) {
      out.probability += w * p;
      parts.emplace_back(w * p, reduce_to_spin_dm(b->state, "C", "D"));
    }
  }
  if (parts.empty()) throw ImpossiblePostselection("no ensemble component reaches a C-D coincidence");
  out.state = mix(parts);
  return out;
}

Ensemble distinguishability_family(double a2, Statistics statistics) {
  if (!(a2 >= 0.0 && a2 <= 1.0)) throw InvalidArgument("|a|^2 must lie in [0, 1]");
  const Network net = fig1_network();
  const BranchSet branches = detect(run_network(net, opposite_spin_input(statistics)), net.monitored());
  const FockState pair = branches.find(ExcitationPattern{{"C", "D"}})->state;
  const FockState partner = apply_spin_rotation(pair, "C", diag_phase(std::numbers::pi));
  return Ensemble{{{0.5 * (1.0 + a2), pair}, {0.5 * (1.0 - a2), partner}}};
}

// ---------------------------------------------------------------------------

ScenarioReport scenario_fig1(Statistics statistics, bool equal_spins) {
  const Network net = fig1_network();
  const FockState input = equal_spins
                              ? make_product_state(statistics, {Mode{"A", Spin::Up, 0}, Mode{"B", Spin::Up, 0}})
                              : opposite_spin_input(statistics);
  const FockState out = run_network(net, input);
  const BranchSet branches = detect(out, net.monitored());

  ScenarioReport report;
  report.scenario = "fig1";
  report.parameters = {{"statistics", to_string(statistics)}, {"equal_spins", equal_spins}};
  report.tables.push_back(branch_table(branches, false));
  report.tables.push_back(state_table(out));

  report.add("coincidence_probability", coincidence_total(branches));
  if (const Branch* b = branches.find(ExcitationPattern{{"C", "D"}})) {
    const TwoQubitDM dm = reduce_to_spin_dm(b->state, "C", "D");
    const auto bell = identify_bell_state(dm);
    report.add("conditional_state", bell ? to_string(*bell) : std::string("not a Bell state"));
    report.add("concurrence", concurrence(dm));
    report.density_matrices.emplace_back("coincidence_spin_state", dm);
  } else {
    report.add("conditional_state", std::string("no coincidence"));
  }
  return report;
}

ScenarioReport scenario_fig2(Statistics statistics) {
  return network_report("fig2", fig2_network(), opposite_spin_input(statistics), statistics);
}

ScenarioReport scenario_tree(int depth, Statistics statistics) {
  if (depth < 1 || depth > 7) throw InvalidArgument("tree scenario depth must lie in [1, 7]");
  ScenarioReport report = network_report("tree", build_tree(depth), opposite_spin_input(statistics), statistics);
  report.parameters.push_back({"depth", static_cast<std::int64_t>(depth)});
  report.add("yield_formula", 1.0 - std::ldexp(1.0, -depth));
  return report;
}

ScenarioReport scenario_network(const Network& network, Statistics statistics) {
  if (network.inputs().size() < 2) throw InvalidArgument("network needs at least two inputs");
  return network_report("network", network,
                        opposite_spin_input(statistics, network.inputs()[0], network.inputs()[1]),
                        statistics, true);
}

ScenarioReport scenario_feedback(int rounds, Statistics statistics, std::int64_t trials,
                                 std::uint64_t seed) {
  if (rounds < 1) throw InvalidArgument("feedback needs at least one round");
  if (trials < 0) throw InvalidArgument("trials must be non-negative");
  const auto exact = feedback_run(rounds, statistics);
  std::vector<std::int64_t> counts;
  if (trials > 0) counts = sample_feedback(rounds, statistics, trials, seed);

  ScenarioReport report;
  report.scenario = "feedback";
  report.parameters = {{"statistics", to_string(statistics)},
                       {"rounds", static_cast<std::int64_t>(rounds)},
                       {"trials", trials},
                       {"seed", static_cast<std::int64_t>(seed)}};

  Table t{"rounds", {"round", "success_probability", "cumulative_failure", "bell_state", "concurrence"}, {}};
  if (trials > 0) t.columns.push_back("sampled_success_fraction");
  for (const auto& r : exact) {
    const TwoQubitDM dm = reduce_to_spin_dm(r.conditional_state, "C", "D");
    const auto bell = identify_bell_state(dm);
    std::vector<Value> row{static_cast<std::int64_t>(r.round), r.success_probability, r.cumulative_failure,
                           bell ? to_string(*bell) : std::string("none"), concurrence(dm)};
    if (trials > 0) {
      row.push_back(static_cast<double>(counts[static_cast<std::size_t>(r.round)]) / static_cast<double>(trials));
    }
    t.rows.push_back(std::move(row));
  }
  report.tables.push_back(std::move(t));

  const double failure = exact.back().cumulative_failure;
  report.add("cumulative_failure", failure);
  report.add("cumulative_success", 1.0 - failure);
  report.add("failure_law", std::ldexp(1.0, -rounds));
  if (trials > 0) {
    const double sampled = static_cast<double>(trials - counts[0]) / static_cast<double>(trials);
    const double sigma = std::sqrt(failure * (1.0 - failure) / static_cast<double>(trials));
    report.add("sampled_cumulative_success", sampled, Provenance::Sampled);
    report.add("binomial_sigma", sigma);
    report.add("sampled_deviation_sigmas", sigma > 0.0 ? std::abs(sampled - (1.0 - failure)) / sigma : 0.0,
               Provenance::Sampled);
  }
  return report;
}

ScenarioReport scenario_statistics_test(Statistics statistics) {
  const Network net = fig1_network();
  const BranchSet branches = detect(run_network(net, opposite_spin_input(statistics)), net.monitored());
  const Branch* b = branches.find(ExcitationPattern{{"C", "D"}});

  Eigen::Matrix2cd hadamard;
  hadamard << 1, 1, 1, -1;
  hadamard /= std::numbers::sqrt2;
  const FockState rotated = apply_spin_rotation(apply_spin_rotation(b->state, "C", hadamard), "D", hadamard);
  const TwoQubitDM dm = reduce_to_spin_dm(rotated, "C", "D");

  const double puu = dm.matrix(0, 0).real();
  const double pud = dm.matrix(1, 1).real();
  const double pdu = dm.matrix(2, 2).real();
  const double pdd = dm.matrix(3, 3).real();
  const double correlation = puu + pdd - pud - pdu;
  const std::string verdict = correlation > 0.1 ? "fermion" : correlation < -0.1 ? "boson" : "inconclusive";

  ScenarioReport report;
  report.scenario = "statistics-test";
  report.parameters = {{"statistics", to_string(statistics)}};
  report.tables.push_back({"joint_distribution",
                           {"spin_C", "spin_D", "probability"},
                           {{std::string("up"), std::string("up"), puu},
                            {std::string("up"), std::string("down"), pud},
                            {std::string("down"), std::string("up"), pdu},
                            {std::string("down"), std::string("down"), pdd}}});
  report.add("coincidence_probability", b->probability);
  report.add("correlation", correlation);
  report.add("verdict", verdict);
  report.add("verdict_correct", verdict == to_string(statistics));
  return report;
}

ScenarioReport scenario_mixed_input(Statistics statistics) {
  const Ensemble ensemble = unpolarized_ensemble(statistics);
  const EnsembleCoincidence result = ensemble_coincidence(ensemble);

  ScenarioReport report;
  report.scenario = "mixed-input";
  report.parameters = {{"statistics", to_string(statistics)}};

  Table t{"components", {"input", "weight", "coincidence_probability"}, {}};
  const char* labels[] = {"up,up", "up,down", "down,up", "down,down"};
  for (std::size_t i = 0; i < ensemble.components.size(); ++i) {
    t.rows.push_back({std::string(labels[i]), ensemble.components[i].first, result.component_probabilities[i]});
  }
  report.tables.push_back(std::move(t));

  const TwoQubitDM& dm = result.state;
  const ChshSettings standard = ChshSettings::standard();
  double best = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double theta = k * std::numbers::pi / 2.0;
    const Eigen::Matrix3d rz = Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    const ChshSettings s{rz * standard.a, rz * standard.a_prime, standard.b, standard.b_prime};
    best = std::max(best, std::abs(chsh_expectation(dm, s)));
  }

  report.add("coincidence_probability", result.probability);
  report.add("concurrence", concurrence(dm));
  report.add("chsh_standard", chsh_expectation(dm, standard));
  report.add("chsh_max", best);
  const auto bell = identify_bell_state(dm);
  report.add("conditional_state", bell ? to_string(*bell) : std::string("mixed"));
  report.add("weight_up_up", dm.matrix(0, 0).real());
  report.add("weight_down_down", dm.matrix(3, 3).real());
  report.add("weight_psi_plus", fidelity(dm, bell_vector(BellState::PsiPlus)));
  report.add("weight_psi_minus", fidelity(dm, bell_vector(BellState::PsiMinus)));
  report.density_matrices.emplace_back("conditional_spin_state", dm);
  if (statistics == Statistics::Fermion) {
    report.notes.push_back(
        "fermion conditional state has equal 1/3 weights on |up up>, |down down> and psi+; "
        "weights (1/2, 1/2, 1/sqrt2) on |up up>, |down down>, psi- would not be normalized");
  }
  return report;
}

ScenarioReport scenario_complementarity(int grid, Statistics statistics) {
  if (grid < 2) throw InvalidArgument("complementarity grid needs at least 2 points");
  ScenarioReport report;
  report.scenario = "complementarity";
  report.parameters = {{"statistics", to_string(statistics)}, {"grid", static_cast<std::int64_t>(grid)}};
  Table t{"sweep", {"a_squared", "E", "D", "E_plus_D", "E_chsh"}, {}};
  double worst_sum = 0.0, worst_chsh = 0.0, worst_formula = 0.0;
  for (int k = 0; k < grid; ++k) {
    const double a2 = static_cast<double>(k) / (grid - 1);
    const Complementarity c = complementarity_check(OverlapParam::from_squared_magnitude(a2), statistics);
    t.rows.push_back({a2, c.entanglement, c.distinguishability, c.sum, c.chsh_inferred});
    worst_sum = std::max(worst_sum, std::abs(c.sum - 1.0));
    worst_chsh = std::max(worst_chsh, std::abs(c.entanglement - c.chsh_inferred));
    worst_formula = std::max(worst_formula, std::abs(c.entanglement - a2));
  }
  report.tables.push_back(std::move(t));
  report.add("max_abs_sum_residual", worst_sum);
  report.add("max_abs_chsh_residual", worst_chsh);
  report.add("max_abs_E_minus_a_squared", worst_formula);
  return report;
}

ScenarioReport scenario_gaussian(double v, double sigma, double dt_max, int grid, Statistics statistics) {
  if (grid < 2) throw InvalidArgument("gaussian grid needs at least 2 points");
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  if (!(dt_max >= 0.0)) throw InvalidArgument("dt-max must be non-negative");
  ScenarioReport report;
  report.scenario = "gaussian";
  report.parameters = {{"statistics", to_string(statistics)}, {"v", v}, {"sigma", sigma},
                       {"dt_max", dt_max}, {"grid", static_cast<std::int64_t>(grid)}};
  Table t{"curve", {"dt", "a_squared", "E", "E_formula", "D"}, {}};
  double worst = 0.0;
  bool monotone = true;
  double previous = 2.0;
  for (int k = 0; k < grid; ++k) {
    const double dt = dt_max * k / (grid - 1);
    const OverlapParam a = gaussian_overlap(v, dt, sigma);
    const Complementarity c = complementarity_check(a, statistics);
    const double formula = std::exp(-v * v * dt * dt / (2.0 * sigma * sigma));
    t.rows.push_back({dt, a.squared_magnitude(), c.entanglement, formula, c.distinguishability});
    worst = std::max(worst, std::abs(c.entanglement - formula));
    if (c.entanglement > previous + 1e-12) monotone = false;
    previous = c.entanglement;
  }
  report.tables.push_back(std::move(t));
  report.add("max_abs_formula_residual", worst);
  report.add("monotone_decreasing", monotone);
  return report;
}

ScenarioReport scenario_dual(Statistics statistics, double a2) {
  const Ensemble family = distinguishability_family(a2, statistics);
  std::vector<std::pair<double, TwoQubitDM>> spin_parts, path_parts;
  for (const auto& [w, state] : family.components) {
    if (w <= 0.0) continue;
    spin_parts.emplace_back(w, reduce_to_spin_dm(state, "C", "D"));
    path_parts.emplace_back(w, dual_relabel(state, "C", "D"));
  }
  const TwoQubitDM spin = mix(spin_parts);
  const TwoQubitDM path = mix(path_parts);

  // The tagged physical state reduces to the same spin density matrix.
  const Network net = fig1_network();
  const BranchSet tagged = detect(run_network(net, tagged_input(OverlapParam::from_squared_magnitude(a2), statistics)),
                                  net.monitored());
  const TwoQubitDM tagged_spin = reduce_to_spin_dm(tagged.find(ExcitationPattern{{"C", "D"}})->state, "C", "D");

  // A bunched equal-spin pair has no spin-labeled reading.
  bool rejected = false;
  const BranchSet bunched = detect(
      run_network(net, make_product_state(Statistics::Boson, {Mode{"A", Spin::Up, 0}, Mode{"B", Spin::Up, 0}})),
      net.monitored());
  try {
    (void)dual_relabel(bunched.branches.front().state, "C", "D");
  } catch (const InvalidArgument&) {
    rejected = true;
  }

  const double c_spin = concurrence(spin);
  const double c_path = concurrence(path);
  ScenarioReport report;
  report.scenario = "dual";
  report.parameters = {{"statistics", to_string(statistics)}, {"a_squared", a2}};
  report.tables.push_back({"pictures",
                           {"picture", "labels", "concurrence"},
                           {{std::string("spin (paths label particles)"), std::string("C,D"), c_spin},
                            {std::string("path (spins label particles)"), std::string("up,down"), c_path}}});
  report.add("spin_concurrence", c_spin);
  report.add("path_concurrence", c_path);
  report.add("pictures_agree", std::abs(c_spin - c_path) < 1e-9);
  report.add("tagged_state_max_deviation", (tagged_spin.matrix - spin.matrix).cwiseAbs().maxCoeff());
  report.add("bunched_pair_rejected", rejected);
  report.density_matrices.emplace_back("spin_picture", spin);
  report.density_matrices.emplace_back("path_picture", path);
  return report;
}

const std::vector<CatalogEntry>& scenario_catalog() {
  static const std::vector<CatalogEntry> catalog = {
      {"complementarity", "--statistics --grid", "concurrence E and distinguishability D sum to one"},
      {"dual", "--statistics --a2", "spin-labeled path entanglement matches path-labeled spin entanglement"},
      {"feedback", "--statistics --depth --trials --seed", "feedback failure probability falls as 2^-N"},
      {"fig1", "--statistics --equal-spins", "single splitter: coincidence 1/2 heralds a Bell pair"},
      {"fig2", "--statistics", "three splitters: two-detector coincidence in 75% of runs"},
      {"gaussian", "--statistics --v --sigma --dt-max --grid", "E = exp(-v^2 dt^2 / 2 sigma^2) for delayed packets"},
      {"mixed-input", "--statistics", "unpolarized input: psi- for bosons, separable state for fermions"},
      {"network", "--statistics --network", "yield and Bell pairs of a user-supplied splitter network"},
      {"statistics-test", "--statistics", "Hadamard-rotated spins correlate for fermions, anticorrelate for bosons"},
      {"tree", "--statistics --depth", "depth-N splitter tree yields entangled pairs with probability 1 - 2^-N"},
  };
  return catalog;
}

}  // namespace whichway
