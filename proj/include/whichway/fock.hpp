#pragma once

// Sparse second-quantized states of a few identical particles.
//
// A FockState stores amplitudes of *raw* creation-operator monomials
// a†_{m1} a†_{m2} ... |0>, with the modes sorted in canonical order. The
// exchange sign of reordering (fermions) is absorbed into the amplitude when
// a term is inserted, so every state has exactly one representation. Number
// state normalization (the k! of a k-fold occupied mode) is supplied by
// inner_product() rather than baked into the amplitudes.

#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace whichway {

enum class Statistics { Boson, Fermion };

enum class Spin : std::uint8_t { Up = 0, Down = 1 };

using Amplitude = std::complex<double>;

inline constexpr double kDefaultPrune = 1e-12;
inline constexpr double kUnitarityTolerance = 1e-9;

/// One single-particle mode: a path, a spin and an internal tag.
struct Mode {
  std::string path;
  Spin spin = Spin::Up;
  int tag = 0;

  auto operator<=>(const Mode&) const = default;
  bool operator==(const Mode&) const = default;
};

/// Sorted mode sequence; a mode occupied k times appears k times.
using Monomial = std::vector<Mode>;

/// A term given in creation order, i.e. a†_{modes[0]} a†_{modes[1]} ... |0>.
struct Term {
  std::vector<Mode> modes;
  Amplitude amplitude{1.0, 0.0};
};

class FockState {
 public:
  using TermMap = std::map<Monomial, Amplitude>;

  /// The zero vector (no terms at all, not the vacuum).
  explicit FockState(Statistics statistics, double prune_threshold = kDefaultPrune);

  static FockState vacuum(Statistics statistics);

  /// Sums the given terms, canonicalizing each one. Throws PauliExclusionError
  /// if a fermionic term repeats a mode.
  static FockState from_terms(Statistics statistics, std::span<const Term> terms,
                              double prune_threshold = kDefaultPrune);

  Statistics statistics() const { return statistics_; }
  double prune_threshold() const { return prune_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /// Amplitude of a†_{modes[0]} ... in the given creation order, i.e. the
  /// canonical amplitude times the reordering sign. Zero if absent.
  Amplitude amplitude(std::span<const Mode> creation_order) const;

  double norm_squared() const;
  bool is_normalized(double tolerance = 1e-9) const;

  /// Throws InvalidArgument for the zero vector.
  FockState normalized() const;
  FockState scaled(Amplitude factor) const;

  std::set<int> tags() const;
  std::set<std::string> paths() const;

  friend FockState operator+(const FockState& x, const FockState& y);

 private:
  friend class FockStateBuilder;

  Statistics statistics_;
  double prune_;
  TermMap terms_;
};

/// Mutable accumulator used to assemble FockStates term by term.
class FockStateBuilder {
 public:
  explicit FockStateBuilder(Statistics statistics, double prune_threshold = kDefaultPrune);

  /// Adds amplitude * a†_{modes[0]} a†_{modes[1]} ... |0>. Fermionic terms
  /// with a repeated mode are silently dropped (they vanish); use
  /// FockState::from_terms to get the Pauli exclusion error instead.
  void add(std::span<const Mode> creation_order, Amplitude amplitude);

  FockState build() &&;

 private:
  FockState state_;
};

/// Sign (+1, -1) of sorting the sequence into canonical order, or 0 if the
/// statistics are fermionic and a mode repeats. Bosons always give +1.
int canonical_sign(Statistics statistics, std::span<const Mode> creation_order);

/// Single-particle unitary acting on an explicit list of modes. Column m of
/// the matrix is the image of a†_{domain[m]}: a†_m -> sum_n U(n, m) a†_n.
class SingleParticleUnitary {
 public:
  /// Throws InvalidArgument if the domain repeats a mode, the matrix is not
  /// square of matching size, or U†U differs from the identity by more than
  /// kUnitarityTolerance.
  SingleParticleUnitary(std::vector<Mode> domain, Eigen::MatrixXcd matrix);

  const std::vector<Mode>& domain() const { return domain_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }

  SingleParticleUnitary adjoint() const;

 private:
  std::vector<Mode> domain_;
  Eigen::MatrixXcd matrix_;
};

bool is_unitary(const Eigen::MatrixXcd& matrix, double tolerance = kUnitarityTolerance);

FockState make_product_state(Statistics statistics, std::span<const Mode> modes);
FockState make_product_state(Statistics statistics, std::initializer_list<Mode> modes);

/// Replaces every creation operator of a mode in u's domain by its image and
/// re-expands. Modes outside the domain are untouched.
FockState apply_unitary(const FockState& state, const SingleParticleUnitary& u);

/// Applies several unitaries with pairwise disjoint domains in one pass.
/// Throws InvalidArgument if two domains overlap.
FockState apply_unitaries(const FockState& state, std::span<const SingleParticleUnitary> us);

/// <x|y>, antilinear in x. Throws InvalidArgument on a statistics mismatch.
Amplitude inner_product(const FockState& x, const FockState& y);

/// Acts with the 2x2 unitary r (basis Up, Down) on the spin of every particle
/// in `path`, for every tag present in the state.
FockState apply_spin_rotation(const FockState& state, const std::string& path,
                              const Eigen::Matrix2cd& r);

/// Amplitude-wise comparison; both states must share statistics.
bool approx_equal(const FockState& x, const FockState& y, double tolerance = 1e-9);

/// |<x|y>| close to ||x|| ||y||, i.e. equal up to a global phase.
bool equal_up_to_phase(const FockState& x, const FockState& y, double tolerance = 1e-9);

std::string to_string(Statistics statistics);
std::string to_string(Spin spin);
std::string to_string(const Mode& mode);
std::string to_string(const FockState& state);

Statistics parse_statistics(const std::string& text);

}  // namespace whichway
