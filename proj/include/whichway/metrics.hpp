#pragma once

// Two-qubit reductions of post-selected pairs and the entanglement figures
// computed from them.

#include <array>
#include <optional>
#include <complex>
#include <span>
#include <string>
#include <utility>

#include <Eigen/Dense>
#include <json.hpp>

#include "whichway/fock.hpp"

namespace whichway {

/// 4x4 density matrix in the basis {up up, up down, down up, down down}.
/// labels[0] is qubit 1, labels[1] is qubit 2. In the dual picture the basis
/// states are path pairs instead (index 0 = labels[0] path, 1 = labels[1]).
struct TwoQubitDM {
  Eigen::Matrix4cd matrix = Eigen::Matrix4cd::Zero();
  std::array<std::string, 2> labels;

  /// Throws InvalidArgument unless Hermitian, trace one and PSD within tolerance.
  void validate(double tolerance = 1e-9) const;

  static TwoQubitDM pure(const Eigen::Vector4cd& ket, std::array<std::string, 2> labels = {});
  static TwoQubitDM maximally_mixed(std::array<std::string, 2> labels = {});
};

/// Probability-weighted sum of density matrices; the weights are renormalized.
TwoQubitDM mix(std::span<const std::pair<double, TwoQubitDM>> components);

nlohmann::json to_json(const TwoQubitDM& dm);

enum class BellState { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

Eigen::Vector4cd bell_vector(BellState state);
std::string to_string(BellState state);

/// <ket|dm|ket> for a normalized ket.
double fidelity(const TwoQubitDM& dm, const Eigen::Vector4cd& ket);

/// Bell state whose fidelity with dm exceeds 1 - tolerance, if any.
std::optional<BellState> identify_bell_state(const TwoQubitDM& dm, double tolerance = 1e-9);

/// Spin density matrix of a pair with one particle in x and one in y.
/// Qubit 1 is the lexicographically smaller path. Tags are traced out.
/// Throws InvalidArgument naming the first monomial that violates the
/// occupancy precondition.
TwoQubitDM reduce_to_spin_dm(const FockState& state, const std::string& x, const std::string& y);

/// Wootters concurrence. Throws InvalidArgument for an invalid dm.
double concurrence(const TwoQubitDM& dm);

/// Bloch vectors of the four CHSH observables.
struct ChshSettings {
  Eigen::Vector3d a, a_prime, b, b_prime;

  /// a = x, a' = y on qubit 1; b = (x + y)/sqrt2, b' = (x - y)/sqrt2 on qubit 2.
  static ChshSettings standard();
  void validate(double tolerance = 1e-9) const;
};

Eigen::Matrix2cd pauli_observable(const Eigen::Vector3d& bloch);

/// Tr[dm (ab + ab' + a'b - a'b')].
double chsh_expectation(const TwoQubitDM& dm, const ChshSettings& settings = ChshSettings::standard());

/// Standard-settings CHSH value divided by +2 sqrt2 (fermions) or -2 sqrt2
/// (bosons). Only meaningful for the partially distinguishable coincidence
/// family produced by the single splitter.
double infer_concurrence_from_chsh(const TwoQubitDM& dm, Statistics statistics);

/// Overlap a = <S1|S2> of the two internal states, |a| <= 1.
class OverlapParam {
 public:
  /// Throws InvalidArgument if |a| > 1.
  explicit OverlapParam(std::complex<double> a);
  static OverlapParam from_squared_magnitude(double a2);

  std::complex<double> value() const { return a_; }
  double squared_magnitude() const { return std::norm(a_); }

 private:
  std::complex<double> a_;
};

double distinguishability(const OverlapParam& a);

struct Complementarity {
  double entanglement = 0.0;
  double distinguishability = 0.0;
  double sum = 0.0;
  double chsh_inferred = 0.0;
};

/// |A up S1; B down S2> as a FockState with S1 = tag 0 and
/// S2 = a tag0 + sqrt(1 - |a|^2) tag1.
FockState tagged_input(const OverlapParam& a, Statistics statistics);

/// Runs the single splitter on the tagged input, keeps the C-D coincidence,
/// and compares its concurrence with 1 - |a|^2.
Complementarity complementarity_check(const OverlapParam& a, Statistics statistics);

/// Real a with |a|^2 = exp(-v^2 dt^2 / (2 sigma^2)). Throws for sigma <= 0.
OverlapParam gaussian_overlap(double v, double dt, double sigma);

/// Path density matrix of a pair holding one up and one down particle on
/// {x, y}, with the spins labeling the particles: qubit 1 is the path of the
/// up particle, qubit 2 the path of the down particle, and basis index 0
/// stands for the lexicographically smaller path. Requires all tags 0.
TwoQubitDM dual_relabel(const FockState& state, const std::string& x, const std::string& y);

}  // namespace whichway
