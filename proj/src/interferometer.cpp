#include "whichway/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "whichway/errors.hpp"
#include "whichway/metrics.hpp"

namespace whichway {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

struct Outcome {
  double probability = 0.0;
  bool success = false;
  std::size_t next = 0;
  FockState state;
};

struct FeedbackComponent {
  double weight = 0.0;
  FockState state;
  std::vector<Outcome> outcomes;
};

using FeedbackChain = std::vector<std::vector<FeedbackComponent>>;

// Swaps every mode on `from` with the matching mode on `to`.
FockState reroute(const FockState& state, const std::string& from, const std::string& to) {
  if (from == to) return state;
  std::vector<SingleParticleUnitary> us;
  std::set<int> tags = state.tags();
  if (tags.empty()) tags.insert(0);
  for (int tag : tags) {
    for (Spin spin : {Spin::Up, Spin::Down}) {
      Eigen::MatrixXcd swap(2, 2);
      swap << 0, 1, 1, 0;
      us.emplace_back(std::vector<Mode>{{from, spin, tag}, {to, spin, tag}}, swap);
    }
  }
  return apply_unitaries(state, us);
}

FeedbackChain build_feedback_chain(int max_rounds, Statistics statistics) {
  if (max_rounds < 1) throw InvalidArgument("feedback needs at least one round");
  const Network net = fig1_network();
  const std::string port = net.splitters().front().in1;

  FeedbackChain chain;
  std::vector<FeedbackComponent> current;
  current.push_back({1.0, opposite_spin_input(statistics), {}});

  for (int round = 1; round <= max_rounds; ++round) {
    std::vector<FeedbackComponent> next;
    for (auto& component : current) {
      const BranchSet branches = detect(run_network(net, component.state), net.monitored());
      for (const auto& branch : branches.branches) {
        Outcome outcome{branch.probability, is_coincidence(branch.pattern), 0, branch.state};
        if (!outcome.success) {
          FockState back = branch.state;
          if (branch.pattern.size() == 1) back = reroute(back, *branch.pattern.excited.begin(), port);
          const double weight = component.weight * branch.probability;
          auto same = std::find_if(next.begin(), next.end(), [&](const FeedbackComponent& c) {
            return equal_up_to_phase(c.state, back);
          });
          if (same == next.end()) {
            next.push_back({weight, back, {}});
            outcome.next = next.size() - 1;
          } else {
            same->weight += weight;
            outcome.next = static_cast<std::size_t>(same - next.begin());
          }
        }
        component.outcomes.push_back(std::move(outcome));
      }
    }
    chain.push_back(std::move(current));
    current = std::move(next);
  }
  return chain;
}

}  // namespace

void BeamSplitter::validate() const {
  const std::set<std::string> paths{in1, in2, out1, out2};
  if (paths.size() != 4) {
    throw InvalidArgument("beam splitter paths must be distinct: " + in1 + "," + in2 + "," +
                          out1 + "," + out2);
  }
}

SingleParticleUnitary splitter_unitary(const BeamSplitter& splitter, const std::set<int>& tags) {
  splitter.validate();
  const Amplitude t{kInvSqrt2, 0.0};
  const Amplitude r{0.0, kInvSqrt2};
  // Columns: images of in1, in2, out1, out2 over rows in1, in2, out1, out2.
  Eigen::Matrix4cd block;
  block << 0, 0, 1, 0,
           0, 0, 0, 1,
           t, r, 0, 0,
           r, t, 0, 0;

  const std::array<const std::string*, 4> paths{&splitter.in1, &splitter.in2, &splitter.out1,
                                                &splitter.out2};
  std::vector<Mode> domain;
  for (int tag : tags)
    for (Spin spin : {Spin::Up, Spin::Down})
      for (const auto* path : paths) domain.push_back({*path, spin, tag});

  const auto blocks = static_cast<Eigen::Index>(domain.size() / 4);
  Eigen::MatrixXcd matrix = Eigen::MatrixXcd::Zero(4 * blocks, 4 * blocks);
  for (Eigen::Index b = 0; b < blocks; ++b) matrix.block<4, 4>(4 * b, 4 * b) = block;
  return SingleParticleUnitary(std::move(domain), std::move(matrix));
}

// ---------------------------------------------------------------------------

Network::Network(std::vector<BeamSplitter> splitters, std::vector<std::string> inputs,
                 std::vector<std::string> monitored)
    : splitters_(std::move(splitters)), inputs_(std::move(inputs)), monitored_(std::move(monitored)) {
  const std::set<std::string> input_set(inputs_.begin(), inputs_.end());
  if (input_set.size() != inputs_.size()) throw InvalidArgument("network inputs repeat a path");

  std::map<std::string, std::size_t> produced_layer;
  std::set<std::string> consumed;
  std::vector<std::size_t> layer_of(splitters_.size());
  for (std::size_t i = 0; i < splitters_.size(); ++i) {
    const auto& s = splitters_[i];
    s.validate();
    std::size_t layer = 0;
    for (const auto* in : {&s.in1, &s.in2}) {
      if (!consumed.insert(*in).second) {
        throw InvalidArgument("path '" + *in + "' feeds more than one splitter");
      }
      if (auto it = produced_layer.find(*in); it != produced_layer.end()) {
        layer = std::max(layer, it->second + 1);
      }
    }
    for (const auto* out : {&s.out1, &s.out2}) {
      if (consumed.contains(*out) || produced_layer.contains(*out) || input_set.contains(*out)) {
        throw InvalidArgument("path '" + *out + "' is produced twice or after it is consumed");
      }
      produced_layer[*out] = layer;
    }
    layer_of[i] = layer;
  }

  std::set<std::string> seen;
  for (const auto& m : monitored_) {
    if (!seen.insert(m).second) throw InvalidArgument("monitored path '" + m + "' listed twice");
    if (consumed.contains(m)) throw InvalidArgument("monitored path '" + m + "' is not terminal");
    if (!produced_layer.contains(m) && !input_set.contains(m)) {
      throw InvalidArgument("monitored path '" + m + "' does not exist in the network");
    }
  }

  for (std::size_t i = 0; i < splitters_.size(); ++i) {
    if (layers_.size() <= layer_of[i]) layers_.resize(layer_of[i] + 1);
    layers_[layer_of[i]].push_back(i);
  }
}

Network Network::relabeled(const std::map<std::string, std::string>& names) const {
  auto rename = [&](const std::string& p) {
    auto it = names.find(p);
    return it == names.end() ? p : it->second;
  };
  std::vector<BeamSplitter> splitters;
  for (const auto& s : splitters_) {
    splitters.push_back({rename(s.in1), rename(s.in2), rename(s.out1), rename(s.out2)});
  }
  std::vector<std::string> inputs, monitored;
  for (const auto& p : inputs_) inputs.push_back(rename(p));
  for (const auto& p : monitored_) monitored.push_back(rename(p));
  return Network(std::move(splitters), std::move(inputs), std::move(monitored));
}

bool Network::operator==(const Network& other) const {
  return splitters_ == other.splitters_ && inputs_ == other.inputs_ &&
         monitored_ == other.monitored_;
}

nlohmann::json to_json(const Network& network) {
  nlohmann::json splitters = nlohmann::json::array();
  for (const auto& s : network.splitters()) splitters.push_back({s.in1, s.in2, s.out1, s.out2});
  return {{"inputs", network.inputs()},
          {"splitters", splitters},
          {"monitored", network.monitored()}};
}

Network network_from_json(const nlohmann::json& doc) {
  try {
    std::vector<BeamSplitter> splitters;
    for (const auto& s : doc.at("splitters")) {
      if (!s.is_array() || s.size() != 4) {
        throw InvalidArgument("each splitter must be a 4-element array [in1, in2, out1, out2]");
      }
      splitters.push_back({s[0].get<std::string>(), s[1].get<std::string>(),
                           s[2].get<std::string>(), s[3].get<std::string>()});
    }
    return Network(std::move(splitters), doc.at("inputs").get<std::vector<std::string>>(),
                   doc.at("monitored").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed network document: ") + e.what());
  }
}

Network fig1_network() {
  return Network({{"A", "B", "D", "C"}}, {"A", "B"}, {"C", "D"});
}

Network fig2_network() {
  return Network({{"A", "B", "D", "C"}, {"C", "vC", "E", "F"}, {"D", "vD", "G", "H"}},
                 {"A", "B"}, {"E", "F", "G", "H"});
}

Network build_tree(int depth) {
  if (depth < 1 || depth > kMaxTreeDepth) {
    throw InvalidArgument("tree depth must lie in [1, " + std::to_string(kMaxTreeDepth) + "], got " +
                          std::to_string(depth));
  }
  std::vector<BeamSplitter> splitters{{"A", "B", "1", "0"}};
  std::vector<std::string> level{"0", "1"};
  for (int k = 2; k <= depth; ++k) {
    std::vector<std::string> next;
    for (const auto& p : level) {
      splitters.push_back({p, "v" + p, p + "0", p + "1"});
      next.push_back(p + "0");
      next.push_back(p + "1");
    }
    level = std::move(next);
  }
  return Network(std::move(splitters), {"A", "B"}, std::move(level));
}

FockState opposite_spin_input(Statistics statistics, const std::string& in1,
                              const std::string& in2) {
  return make_product_state(statistics, {Mode{in1, Spin::Up, 0}, Mode{in2, Spin::Down, 0}});
}

FockState run_network(const Network& network, const FockState& input) {
  const std::set<std::string> allowed(network.inputs().begin(), network.inputs().end());
  for (const auto& p : input.paths()) {
    if (!allowed.contains(p)) throw InvalidArgument("input occupies non-input path '" + p + "'");
  }
  std::set<int> tags = input.tags();
  if (tags.empty()) tags.insert(0);

  FockState state = input;
  for (const auto& layer : network.layers()) {
    std::vector<SingleParticleUnitary> us;
    us.reserve(layer.size());
    for (std::size_t i : layer) us.push_back(splitter_unitary(network.splitters()[i], tags));
    state = apply_unitaries(state, us);
  }
  return state.normalized();
}

// ---------------------------------------------------------------------------

std::string to_string(const ExcitationPattern& pattern) {
  std::string out = "{";
  bool first = true;
  for (const auto& p : pattern.excited) {
    if (!first) out += ",";
    out += p;
    first = false;
  }
  return out + "}";
}

bool is_coincidence(const ExcitationPattern& pattern) { return pattern.size() == 2; }

double BranchSet::total_probability() const {
  double total = 0.0;
  for (const auto& b : branches) total += b.probability;
  return total;
}

const Branch* BranchSet::find(const ExcitationPattern& pattern) const {
  for (const auto& b : branches)
    if (b.pattern == pattern) return &b;
  return nullptr;
}

BranchSet detect(const FockState& state, const std::vector<std::string>& monitored) {
  const std::set<std::string> watched(monitored.begin(), monitored.end());
  std::map<ExcitationPattern, FockStateBuilder> groups;
  for (const auto& [monomial, amp] : state.terms()) {
    ExcitationPattern pattern;
    for (const auto& mode : monomial)
      if (watched.contains(mode.path)) pattern.excited.insert(mode.path);
    auto it = groups.try_emplace(pattern, state.statistics(), state.prune_threshold()).first;
    it->second.add(monomial, amp);
  }

  const double total = state.norm_squared();
  if (total <= 0.0) throw InvalidArgument("cannot detect on the zero vector");
  BranchSet out;
  for (auto& [pattern, builder] : groups) {
    FockState part = std::move(builder).build();
    const double weight = part.norm_squared();
    if (weight <= 0.0) continue;
    out.branches.push_back({pattern, part.normalized(), weight / total});
  }
  return out;
}

Postselection postselect(const BranchSet& branches,
                         const std::function<bool(const ExcitationPattern&)>& predicate) {
  Postselection out;
  for (const auto& b : branches.branches) {
    if (!predicate(b.pattern)) continue;
    out.probability += b.probability;
    out.conditional.branches.push_back(b);
  }
  if (out.probability <= 1e-15) {
    throw ImpossiblePostselection("impossible post-selection: no branch matches the predicate");
  }
  for (auto& b : out.conditional.branches) b.probability /= out.probability;
  return out;
}

double entangled_yield(const Network& network, const FockState& input) {
  const BranchSet branches = detect(run_network(network, input), network.monitored());
  double total = 0.0;
  for (const auto& b : branches.branches)
    if (is_coincidence(b.pattern)) total += b.probability;
  return total;
}

// ---------------------------------------------------------------------------

std::vector<FeedbackRound> feedback_run(int max_rounds, Statistics statistics) {
  const FeedbackChain chain = build_feedback_chain(max_rounds, statistics);
  std::vector<FeedbackRound> rounds;
  double surviving = 1.0;
  for (std::size_t r = 0; r < chain.size(); ++r) {
    double success = 0.0;
    double best = -1.0;
    const FockState* state = nullptr;
    for (const auto& component : chain[r]) {
      for (const auto& outcome : component.outcomes) {
        if (!outcome.success) continue;
        const double w = component.weight * outcome.probability;
        success += w;
        if (w > best) {
          best = w;
          state = &outcome.state;
        }
      }
    }
    surviving -= success;
    if (state == nullptr) throw ImpossiblePostselection("feedback round produced no coincidence");
    rounds.push_back({static_cast<int>(r + 1), success, std::max(surviving, 0.0), *state});
  }
  return rounds;
}

std::vector<std::int64_t> sample_feedback(int max_rounds, Statistics statistics,
                                          std::int64_t trials, std::uint64_t seed) {
  if (trials < 0) throw InvalidArgument("trials must be non-negative");
  const FeedbackChain chain = build_feedback_chain(max_rounds, statistics);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(max_rounds) + 1, 0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (std::int64_t t = 0; t < trials; ++t) {
    std::size_t component = 0;
    bool done = false;
    for (std::size_t r = 0; r < chain.size() && !done; ++r) {
      const auto& outcomes = chain[r][component].outcomes;
      const double u = uniform(rng);
      double acc = 0.0;
      const Outcome* picked = &outcomes.back();
      for (const auto& o : outcomes) {
        acc += o.probability;
        if (u < acc) {
          picked = &o;
          break;
        }
      }
      if (picked->success) {
        ++counts[r + 1];
        done = true;
      } else {
        component = picked->next;
      }
    }
    if (!done) ++counts[0];
  }
  return counts;
}

// ---------------------------------------------------------------------------

FockState SpinCorrection::apply(const FockState& state) const {
  FockState out = state;
  for (const auto& [path, r] : local) out = apply_spin_rotation(out, path, r);
  return out;
}

double SpinCorrection::phase() const {
  if (local.empty()) return 0.0;
  return std::arg(local.begin()->second(1, 1));
}

bool SpinCorrection::flips_spin() const {
  if (local.size() < 2) return false;
  return std::abs(std::next(local.begin())->second(0, 0)) < 0.5;
}

SpinCorrection correction_for_state(const FockState& state, const std::string& x,
                                    const std::string& y) {
  const TwoQubitDM dm = reduce_to_spin_dm(state, x, y);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(dm.matrix);
  if (solver.eigenvalues()(3) < 1.0 - 1e-9) {
    throw InvalidArgument("branch spin state on " + x + "," + y + " is not pure");
  }
  const Eigen::Vector4cd c = solver.eigenvectors().col(3);
  const double psi_weight = std::norm(c(1)) + std::norm(c(2));
  const double phi_weight = std::norm(c(0)) + std::norm(c(3));

  Eigen::Matrix2cd flip = Eigen::Matrix2cd::Identity();
  Amplitude keep, adjust;  // amplitudes of |up .> and |down .> on qubit 1 after the flip
  if (psi_weight > 1.0 - 1e-9) {
    keep = c(1);
    adjust = c(2);
  } else if (phi_weight > 1.0 - 1e-9) {
    flip << 0, 1, 1, 0;
    keep = c(0);
    adjust = c(3);
  } else {
    throw InvalidArgument("branch spin state on " + x + "," + y + " is not a Bell-type state");
  }
  if (std::abs(std::abs(keep) - std::abs(adjust)) > 1e-9) {
    throw InvalidArgument("branch spin state on " + x + "," + y + " is not maximally entangled");
  }
  const double theta = std::arg(keep / adjust);
  Eigen::Matrix2cd phase = Eigen::Matrix2cd::Identity();
  phase(1, 1) = std::polar(1.0, theta);

  SpinCorrection out;
  out.local[dm.labels[0]] = phase;
  out.local[dm.labels[1]] = flip;
  return out;
}

Network shipped_network_for(const ExcitationPattern& pattern) {
  auto all_in = [&](std::initializer_list<const char*> names) {
    return std::all_of(pattern.excited.begin(), pattern.excited.end(), [&](const std::string& p) {
      return std::any_of(names.begin(), names.end(), [&](const char* n) { return p == n; });
    });
  };
  if (pattern.size() == 0) throw InvalidArgument("empty pattern belongs to no network");
  if (all_in({"C", "D"})) return fig1_network();
  if (all_in({"E", "F", "G", "H"})) return fig2_network();
  const std::size_t length = pattern.excited.begin()->size();
  const bool binary = std::all_of(pattern.excited.begin(), pattern.excited.end(), [&](const std::string& p) {
    return p.size() == length && p.find_first_not_of("01") == std::string::npos;
  });
  if (binary && length >= 1 && length <= static_cast<std::size_t>(kMaxTreeDepth)) {
    return build_tree(static_cast<int>(length));
  }
  throw InvalidArgument("pattern " + to_string(pattern) + " does not belong to a shipped network");
}

SpinCorrection correction_phase(const ExcitationPattern& pattern, Statistics statistics) {
  if (!is_coincidence(pattern)) {
    throw InvalidArgument("correction needs a two-detector coincidence, got " + to_string(pattern));
  }
  const Network net = shipped_network_for(pattern);
  const BranchSet branches = detect(run_network(net, opposite_spin_input(statistics)), net.monitored());
  const Branch* branch = branches.find(pattern);
  if (branch == nullptr) {
    throw InvalidArgument("pattern " + to_string(pattern) + " never occurs in its network");
  }
  const auto& p = pattern.excited;
  return correction_for_state(branch->state, *p.begin(), *std::next(p.begin()));
}

std::map<ExcitationPattern, std::int64_t> sample_clicks(const Network& network,
                                                        const FockState& input,
                                                        std::int64_t trials,
                                                        std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("sample_clicks needs at least one trial");
  const BranchSet branches = detect(run_network(network, input), network.monitored());
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& b : branches.branches) cumulative.push_back(acc += b.probability);

  std::map<ExcitationPattern, std::int64_t> histogram;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, acc);
  for (std::int64_t t = 0; t < trials; ++t) {
    const double u = uniform(rng);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                            branches.branches.size() - 1);
    ++histogram[branches.branches[idx].pattern];
  }
  return histogram;
}

}  // namespace whichway
