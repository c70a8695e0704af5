#include "whichway/fock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "whichway/errors.hpp"

namespace whichway {

namespace {

double multiplicity_factor(const Monomial& monomial) {
  double factor = 1.0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= monomial.size(); ++i) {
    if (i < monomial.size() && monomial[i] == monomial[i - 1]) {
      ++run;
      factor *= static_cast<double>(run);
    } else {
      run = 1;
    }
  }
  return factor;
}

void prune(FockState::TermMap& terms, double threshold) {
  std::erase_if(terms, [threshold](const auto& kv) { return std::abs(kv.second) < threshold; });
}

}  // namespace

int canonical_sign(Statistics statistics, std::span<const Mode> creation_order) {
  const std::size_t n = creation_order.size();
  if (statistics == Statistics::Boson) return 1;
  int inversions = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (creation_order[i] == creation_order[j]) return 0;
      if (creation_order[j] < creation_order[i]) ++inversions;
    }
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

// ---------------------------------------------------------------------------

FockState::FockState(Statistics statistics, double prune_threshold)
    : statistics_(statistics), prune_(prune_threshold) {}

FockState FockState::vacuum(Statistics statistics) {
  FockState state(statistics);
  state.terms_.emplace(Monomial{}, Amplitude{1.0, 0.0});
  return state;
}

FockState FockState::from_terms(Statistics statistics, std::span<const Term> terms,
                                double prune_threshold) {
  FockStateBuilder builder(statistics, prune_threshold);
  for (const auto& term : terms) {
    if (canonical_sign(statistics, term.modes) == 0) {
      throw PauliExclusionError("Pauli exclusion: fermionic term repeats a mode");
    }
    builder.add(term.modes, term.amplitude);
  }
  return std::move(builder).build();
}

Amplitude FockState::amplitude(std::span<const Mode> creation_order) const {
  const int sign = canonical_sign(statistics_, creation_order);
  if (sign == 0) return {};
  Monomial key(creation_order.begin(), creation_order.end());
  std::sort(key.begin(), key.end());
  auto it = terms_.find(key);
  if (it == terms_.end()) return {};
  return static_cast<double>(sign) * it->second;
}

double FockState::norm_squared() const {
  double total = 0.0;
  for (const auto& [monomial, amp] : terms_) total += std::norm(amp) * multiplicity_factor(monomial);
  return total;
}

bool FockState::is_normalized(double tolerance) const {
  return std::abs(std::sqrt(norm_squared()) - 1.0) <= tolerance;
}

FockState FockState::normalized() const {
  const double n2 = norm_squared();
  if (n2 <= 0.0) throw InvalidArgument("cannot normalize the zero vector");
  return scaled(1.0 / std::sqrt(n2));
}

FockState FockState::scaled(Amplitude factor) const {
  FockState out(statistics_, prune_);
  for (const auto& [monomial, amp] : terms_) {
    const Amplitude v = amp * factor;
    if (std::abs(v) >= prune_) out.terms_.emplace_hint(out.terms_.end(), monomial, v);
  }
  return out;
}

std::set<int> FockState::tags() const {
  std::set<int> out;
  for (const auto& [monomial, amp] : terms_)
    for (const auto& m : monomial) out.insert(m.tag);
  return out;
}

std::set<std::string> FockState::paths() const {
  std::set<std::string> out;
  for (const auto& [monomial, amp] : terms_)
    for (const auto& m : monomial) out.insert(m.path);
  return out;
}

FockState operator+(const FockState& x, const FockState& y) {
  if (x.statistics() != y.statistics()) throw InvalidArgument("statistics mismatch in sum");
  FockState out = x;
  for (const auto& [monomial, amp] : y.terms()) out.terms_[monomial] += amp;
  prune(out.terms_, out.prune_);
  return out;
}

// ---------------------------------------------------------------------------

FockStateBuilder::FockStateBuilder(Statistics statistics, double prune_threshold)
    : state_(statistics, prune_threshold) {}

void FockStateBuilder::add(std::span<const Mode> creation_order, Amplitude amplitude) {
  const int sign = canonical_sign(state_.statistics_, creation_order);
  if (sign == 0 || amplitude == Amplitude{}) return;
  Monomial key(creation_order.begin(), creation_order.end());
  std::sort(key.begin(), key.end());
  state_.terms_[std::move(key)] += static_cast<double>(sign) * amplitude;
}

FockState FockStateBuilder::build() && {
  prune(state_.terms_, state_.prune_);
  return std::move(state_);
}

// ---------------------------------------------------------------------------

bool is_unitary(const Eigen::MatrixXcd& matrix, double tolerance) {
  if (matrix.rows() != matrix.cols()) return false;
  if (matrix.size() == 0) return true;
  const Eigen::MatrixXcd product = matrix.adjoint() * matrix;
  const auto identity = Eigen::MatrixXcd::Identity(matrix.rows(), matrix.cols());
  return (product - identity).cwiseAbs().maxCoeff() <= tolerance;
}

SingleParticleUnitary::SingleParticleUnitary(std::vector<Mode> domain, Eigen::MatrixXcd matrix)
    : domain_(std::move(domain)), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(domain_.size());
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw InvalidArgument("unitary matrix size does not match its mode domain");
  }
  std::vector<Mode> sorted = domain_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("unitary domain lists a mode twice");
  }
  if (!is_unitary(matrix_)) throw InvalidArgument("matrix is not unitary");
}

SingleParticleUnitary SingleParticleUnitary::adjoint() const {
  return SingleParticleUnitary(domain_, matrix_.adjoint());
}

// ---------------------------------------------------------------------------

FockState make_product_state(Statistics statistics, std::span<const Mode> modes) {
  const Term term{std::vector<Mode>(modes.begin(), modes.end()), Amplitude{1.0, 0.0}};
  return FockState::from_terms(statistics, std::span<const Term>(&term, 1)).normalized();
}

FockState make_product_state(Statistics statistics, std::initializer_list<Mode> modes) {
  return make_product_state(statistics, std::span<const Mode>(modes.begin(), modes.size()));
}

FockState apply_unitary(const FockState& state, const SingleParticleUnitary& u) {
  return apply_unitaries(state, std::span<const SingleParticleUnitary>(&u, 1));
}

FockState apply_unitaries(const FockState& state, std::span<const SingleParticleUnitary> us) {
  using Column = std::vector<std::pair<Mode, Amplitude>>;
  std::map<Mode, Column> images;
  for (const auto& u : us) {
    const auto& domain = u.domain();
    for (std::size_t m = 0; m < domain.size(); ++m) {
      Column column;
      for (std::size_t n = 0; n < domain.size(); ++n) {
        const Amplitude c = u.matrix()(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
        if (c != Amplitude{}) column.emplace_back(domain[n], c);
      }
      if (!images.emplace(domain[m], std::move(column)).second) {
        throw InvalidArgument("unitaries applied together must have disjoint domains");
      }
    }
  }

  FockStateBuilder builder(state.statistics(), state.prune_threshold());
  std::vector<Mode> sequence;

  for (const auto& [monomial, amp] : state.terms()) {
    // One column of candidate images per creation operator; modes outside
    // every domain map to themselves.
    std::vector<Column> local;
    local.reserve(monomial.size());
    for (const auto& mode : monomial) {
      auto it = images.find(mode);
      if (it == images.end()) {
        local.push_back(Column{{mode, Amplitude{1.0, 0.0}}});
      } else {
        local.push_back(it->second);
      }
    }

    const std::size_t k = monomial.size();
    sequence.assign(k, Mode{});
    std::vector<std::size_t> index(k, 0);
    if (k == 0) {
      builder.add(sequence, amp);
      continue;
    }
    if (std::any_of(local.begin(), local.end(), [](const Column& c) { return c.empty(); })) continue;
    while (true) {
      Amplitude coeff = amp;
      for (std::size_t i = 0; i < k; ++i) {
        const auto& [mode, c] = local[i][index[i]];
        sequence[i] = mode;
        coeff *= c;
      }
      builder.add(sequence, coeff);
      std::size_t pos = 0;
      while (pos < k && ++index[pos] == local[pos].size()) index[pos++] = 0;
      if (pos == k) break;
    }
  }
  return std::move(builder).build();
}

Amplitude inner_product(const FockState& x, const FockState& y) {
  if (x.statistics() != y.statistics()) {
    throw InvalidArgument("inner product of states with different statistics");
  }
  Amplitude total{};
  const auto& small = x.size() <= y.size() ? x.terms() : y.terms();
  const auto& large = x.size() <= y.size() ? y.terms() : x.terms();
  for (const auto& [monomial, a] : small) {
    auto it = large.find(monomial);
    if (it == large.end()) continue;
    const Amplitude ax = (&small == &x.terms()) ? a : it->second;
    const Amplitude ay = (&small == &x.terms()) ? it->second : a;
    total += std::conj(ax) * ay * multiplicity_factor(monomial);
  }
  return total;
}

FockState apply_spin_rotation(const FockState& state, const std::string& path,
                              const Eigen::Matrix2cd& r) {
  if (!is_unitary(r)) throw InvalidArgument("spin rotation is not unitary");
  std::vector<SingleParticleUnitary> us;
  for (int tag : state.tags()) {
    us.emplace_back(std::vector<Mode>{{path, Spin::Up, tag}, {path, Spin::Down, tag}},
                    Eigen::MatrixXcd(r));
  }
  return apply_unitaries(state, us);
}

bool approx_equal(const FockState& x, const FockState& y, double tolerance) {
  if (x.statistics() != y.statistics()) return false;
  for (const auto& [monomial, a] : x.terms()) {
    auto it = y.terms().find(monomial);
    const Amplitude b = it == y.terms().end() ? Amplitude{} : it->second;
    if (std::abs(a - b) > tolerance) return false;
  }
  for (const auto& [monomial, b] : y.terms()) {
    if (!x.terms().contains(monomial) && std::abs(b) > tolerance) return false;
  }
  return true;
}

bool equal_up_to_phase(const FockState& x, const FockState& y, double tolerance) {
  if (x.statistics() != y.statistics()) return false;
  const double nx = std::sqrt(x.norm_squared());
  const double ny = std::sqrt(y.norm_squared());
  if (nx == 0.0 || ny == 0.0) return nx == ny;
  return std::abs(std::abs(inner_product(x, y)) / (nx * ny) - 1.0) <= tolerance;
}

std::string to_string(Statistics statistics) {
  return statistics == Statistics::Boson ? "boson" : "fermion";
}

std::string to_string(Spin spin) { return spin == Spin::Up ? "up" : "down"; }

std::string to_string(const Mode& mode) {
  std::string out = mode.path + (mode.spin == Spin::Up ? "^" : "v");
  if (mode.tag != 0) out += "#" + std::to_string(mode.tag);
  return out;
}

std::string to_string(const FockState& state) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [monomial, amp] : state.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << amp.real() << (amp.imag() < 0 ? "-" : "+") << std::abs(amp.imag()) << "i)|";
    for (std::size_t i = 0; i < monomial.size(); ++i) {
      if (i) os << ";";
      os << to_string(monomial[i]);
    }
    os << ">";
  }
  if (first) os << "0";
  return os.str();
}

Statistics parse_statistics(const std::string& text) {
  if (text == "boson" || text == "bosons") return Statistics::Boson;
  if (text == "fermion" || text == "fermions") return Statistics::Fermion;
  throw InvalidArgument("unknown statistics '" + text + "' (expected boson or fermion)");
}

}  // namespace whichway
