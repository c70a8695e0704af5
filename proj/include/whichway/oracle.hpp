#pragma once

// Brute-force first-quantized simulator for exactly two particles.
//
// The state is a dense matrix psi(i, j) = amplitude of |i>_1 |j>_2 over an
// explicit single-particle basis, symmetric for bosons and antisymmetric for
// fermions. Evolution is psi -> U psi U^T. Nothing here reuses the Fock
// engine's expansion code; only the mapping convention is shared:
//
//   a†_p a†_q |0>  <->  (|p>|q> + s |q>|p>) / sqrt2,   s = +1 bosons, -1 fermions
//
// with (p, q) the canonical (sorted) mode order.

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "whichway/fock.hpp"
#include "whichway/interferometer.hpp"

namespace whichway::oracle {

class FirstQuantizedState {
 public:
  /// Throws InvalidArgument if the amplitude matrix does not have the exchange
  /// symmetry of `statistics` within 1e-12, or is not normalized within 1e-9.
  FirstQuantizedState(Statistics statistics, std::vector<Mode> basis, Eigen::MatrixXcd amplitudes);

  Statistics statistics() const { return statistics_; }
  const std::vector<Mode>& basis() const { return basis_; }
  const Eigen::MatrixXcd& amplitudes() const { return amplitudes_; }

  /// Amplitude of |p>_1 |q>_2 (zero if either label is outside the basis).
  Amplitude amplitude(const Mode& p, const Mode& q) const;

  /// Copy over a larger basis (sorted union of both), zero-padded.
  FirstQuantizedState extended(const std::vector<Mode>& extra) const;

 private:
  Statistics statistics_;
  std::vector<Mode> basis_;
  Eigen::MatrixXcd amplitudes_;
  std::map<Mode, Eigen::Index> index_;
};

/// sum_ij conj(x_ij) y_ij over the union of the two bases.
Amplitude overlap(const FirstQuantizedState& x, const FirstQuantizedState& y);

bool equal_up_to_phase(const FirstQuantizedState& x, const FirstQuantizedState& y,
                       double tolerance = 1e-9);

/// u acts on both tensor factors; modes outside u's domain are untouched.
FirstQuantizedState oracle_evolve(const FirstQuantizedState& state, const SingleParticleUnitary& u);

struct OracleBranch {
  ExcitationPattern pattern;
  double probability = 0.0;
  FirstQuantizedState state;
};

/// Projective grouping by occupied monitored paths, ordered by pattern.
std::vector<OracleBranch> oracle_detect(const FirstQuantizedState& state,
                                        const std::vector<std::string>& monitored);

/// Maps a two-particle FockState to first quantization. Throws
/// InvalidArgument if some monomial does not hold exactly two particles.
FirstQuantizedState cross_check(const FockState& fock_state);

}  // namespace whichway::oracle
