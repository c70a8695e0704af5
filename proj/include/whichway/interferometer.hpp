#pragma once

// Beam-splitter networks, absorptionless which-way detection and
// post-selection on detector patterns.

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "whichway/fock.hpp"

namespace whichway {

/// 50:50 splitter. in1 is transmitted to out1 with amplitude 1/sqrt(2) and
/// reflected to out2 with amplitude i/sqrt(2); in2 symmetrically. Spin and
/// tag pass through unchanged.
struct BeamSplitter {
  std::string in1, in2, out1, out2;

  /// Throws InvalidArgument unless the four paths are distinct.
  void validate() const;
  bool operator==(const BeamSplitter&) const = default;
};

/// Unitary of one splitter over its four paths, both spins and the given
/// tags. The out paths are mapped back onto the in paths to complete the
/// matrix; a feed-forward network never populates them beforehand.
SingleParticleUnitary splitter_unitary(const BeamSplitter& splitter, const std::set<int>& tags);

/// Feed-forward arrangement of splitters with detectors on terminal paths.
class Network {
 public:
  /// Throws InvalidArgument if a path is produced twice, consumed twice,
  /// consumed before it is produced, or if a monitored path is not terminal.
  Network(std::vector<BeamSplitter> splitters, std::vector<std::string> inputs,
          std::vector<std::string> monitored);

  const std::vector<BeamSplitter>& splitters() const { return splitters_; }
  const std::vector<std::string>& inputs() const { return inputs_; }
  const std::vector<std::string>& monitored() const { return monitored_; }

  /// Splitter indices grouped into layers of mutually independent splitters,
  /// in an order compatible with the data flow.
  const std::vector<std::vector<std::size_t>>& layers() const { return layers_; }

  /// Copy with every path renamed through `names` (missing keys unchanged).
  Network relabeled(const std::map<std::string, std::string>& names) const;

  bool operator==(const Network& other) const;

 private:
  std::vector<BeamSplitter> splitters_;
  std::vector<std::string> inputs_;
  std::vector<std::string> monitored_;
  std::vector<std::vector<std::size_t>> layers_;
};

nlohmann::json to_json(const Network& network);
/// Schema: {"inputs": [...], "splitters": [[in1, in2, out1, out2], ...], "monitored": [...]}.
Network network_from_json(const nlohmann::json& doc);

/// One splitter, inputs A and B, detectors on C and D.
Network fig1_network();
/// fig1_network() followed by C -> (E, F) and D -> (G, H), detectors on E, F, G, H.
Network fig2_network();

inline constexpr int kMaxTreeDepth = 12;

/// Binary splitter tree with 2^depth monitored leaves. Paths are named by
/// binary strings: the root splitter (inputs A, B) feeds "0" and "1", the
/// splitter on path p feeds p+"0" and p+"1" and takes vacuum on "v"+p.
/// The root is wired as in fig1_network() with C = "0" and D = "1".
Network build_tree(int depth);

/// The input |A up; B down> used by every shipped network.
FockState opposite_spin_input(Statistics statistics, const std::string& in1 = "A",
                              const std::string& in2 = "B");

/// Applies every splitter (layer by layer) and returns the normalized
/// pre-detection state. Throws InvalidArgument if the input occupies a path
/// that is not a network input.
FockState run_network(const Network& network, const FockState& input);

/// Set of monitored paths whose detectors fired.
struct ExcitationPattern {
  std::set<std::string> excited;

  std::size_t size() const { return excited.size(); }
  auto operator<=>(const ExcitationPattern&) const = default;
  bool operator==(const ExcitationPattern&) const = default;
};

std::string to_string(const ExcitationPattern& pattern);

bool is_coincidence(const ExcitationPattern& pattern);

struct Branch {
  ExcitationPattern pattern;
  FockState state;  // normalized conditional state
  double probability = 0.0;
};

/// Incoherent mixture of detector outcomes, ordered by pattern.
struct BranchSet {
  std::vector<Branch> branches;

  double total_probability() const;
  const Branch* find(const ExcitationPattern& pattern) const;
};

/// Groups the monomials of `state` by which monitored paths carry at least
/// one particle. Coherence inside a group is kept; across groups it is lost.
BranchSet detect(const FockState& state, const std::vector<std::string>& monitored);

struct Postselection {
  double probability = 0.0;
  BranchSet conditional;  // renormalized to total probability 1
};

/// Throws ImpossiblePostselection when no branch with non-zero weight
/// matches the predicate.
Postselection postselect(const BranchSet& branches,
                         const std::function<bool(const ExcitationPattern&)>& predicate);

/// Probability that exactly two distinct detectors fire.
double entangled_yield(const Network& network, const FockState& input);

/// One round of the single-splitter feedback protocol.
struct FeedbackRound {
  int round = 0;
  double success_probability = 0.0;  // unconditional weight of success in this round
  double cumulative_failure = 0.0;   // probability that rounds 1..round all failed
  FockState conditional_state;       // coincidence state of this round
};

/// Runs fig1_network() on |A up; B down>; a bunched pair is routed back into
/// port A of the same splitter and the round repeats. Throws InvalidArgument
/// for max_rounds < 1.
std::vector<FeedbackRound> feedback_run(int max_rounds, Statistics statistics);

/// Monte Carlo of the feedback protocol: counts[k] is the number of
/// trajectories that first succeeded in round k (1-based); counts[0] holds
/// the trajectories that failed every round.
std::vector<std::int64_t> sample_feedback(int max_rounds, Statistics statistics,
                                          std::int64_t trials, std::uint64_t seed);

/// Local spin operations (one 2x2 unitary per path) that map a coincidence
/// branch onto |psi+> over (first, second) path in lexicographic order.
struct SpinCorrection {
  std::map<std::string, Eigen::Matrix2cd> local;

  FockState apply(const FockState& state) const;
  /// Relative phase applied to the down component of the first path.
  double phase() const;
  bool flips_spin() const;
};

/// Correction for an arbitrary coincidence state on paths x, y.
SpinCorrection correction_for_state(const FockState& state, const std::string& x,
                                    const std::string& y);

/// Correction for a coincidence pattern of a shipped network: {C, D} is
/// fig1, subsets of {E, F, G, H} are fig2, binary names of equal length L
/// are build_tree(L). Throws InvalidArgument otherwise.
SpinCorrection correction_phase(const ExcitationPattern& pattern, Statistics statistics);

/// Network owning the paths of a shipped coincidence pattern (see above).
Network shipped_network_for(const ExcitationPattern& pattern);

/// i.i.d. detector patterns drawn from the exact branch distribution.
std::map<ExcitationPattern, std::int64_t> sample_clicks(const Network& network,
                                                        const FockState& input,
                                                        std::int64_t trials,
                                                        std::uint64_t seed);

}  // namespace whichway
