#include "whichway/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "whichway/errors.hpp"

namespace whichway::oracle {

namespace {

double exchange_sign(Statistics statistics) { return statistics == Statistics::Boson ? 1.0 : -1.0; }

std::vector<Mode> sorted_union(const std::vector<Mode>& a, const std::vector<Mode>& b) {
  std::vector<Mode> out = a;
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

FirstQuantizedState::FirstQuantizedState(Statistics statistics, std::vector<Mode> basis,
                                         Eigen::MatrixXcd amplitudes)
    : statistics_(statistics), basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {
  const auto n = static_cast<Eigen::Index>(basis_.size());
  if (amplitudes_.rows() != n || amplitudes_.cols() != n) {
    throw InvalidArgument("amplitude matrix does not match the basis size");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!index_.emplace(basis_[static_cast<std::size_t>(i)], i).second) {
      throw InvalidArgument("first-quantized basis repeats a label");
    }
  }
  const double s = exchange_sign(statistics_);
  if (n > 0 && (amplitudes_ - s * amplitudes_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidArgument("two-particle amplitudes violate exchange symmetry");
  }
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-9) {
    throw InvalidArgument("two-particle state is not normalized (vacuum or zero is not representable)");
  }
}

Amplitude FirstQuantizedState::amplitude(const Mode& p, const Mode& q) const {
  auto ip = index_.find(p);
  auto iq = index_.find(q);
  if (ip == index_.end() || iq == index_.end()) return {};
  return amplitudes_(ip->second, iq->second);
}

FirstQuantizedState FirstQuantizedState::extended(const std::vector<Mode>& extra) const {
  std::vector<Mode> basis = sorted_union(basis_, extra);
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd amps = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      amps(i, j) = amplitude(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]);
  return FirstQuantizedState(statistics_, std::move(basis), std::move(amps));
}

Amplitude overlap(const FirstQuantizedState& x, const FirstQuantizedState& y) {
  Amplitude total{};
  for (const auto& p : x.basis())
    for (const auto& q : x.basis()) total += std::conj(x.amplitude(p, q)) * y.amplitude(p, q);
  return total;
}

bool equal_up_to_phase(const FirstQuantizedState& x, const FirstQuantizedState& y, double tolerance) {
  if (x.statistics() != y.statistics()) return false;
  return std::abs(std::abs(overlap(x, y)) - 1.0) <= tolerance;
}

FirstQuantizedState oracle_evolve(const FirstQuantizedState& state, const SingleParticleUnitary& u) {
  const FirstQuantizedState wide = state.extended(u.domain());
  const auto& basis = wide.basis();
  const auto n = static_cast<Eigen::Index>(basis.size());

  // Embed u into the full single-particle space.
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Identity(n, n);
  std::vector<Eigen::Index> where;
  for (const auto& m : u.domain()) {
    where.push_back(std::lower_bound(basis.begin(), basis.end(), m) - basis.begin());
  }
  for (std::size_t c = 0; c < where.size(); ++c) {
    full.col(where[c]).setZero();
    for (std::size_t r = 0; r < where.size(); ++r) {
      full(where[r], where[c]) = u.matrix()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  Eigen::MatrixXcd amps = full * wide.amplitudes() * full.transpose();
  // Restore exact exchange symmetry lost to rounding.
  const double s = exchange_sign(state.statistics());
  amps = 0.5 * (amps + s * amps.transpose());
  return FirstQuantizedState(state.statistics(), basis, std::move(amps));
}

std::vector<OracleBranch> oracle_detect(const FirstQuantizedState& state,
                                        const std::vector<std::string>& monitored) {
  const std::set<std::string> watched(monitored.begin(), monitored.end());
  const auto& basis = state.basis();
  const auto n = static_cast<Eigen::Index>(basis.size());
  std::map<ExcitationPattern, Eigen::MatrixXcd> parts;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Amplitude a = state.amplitudes()(i, j);
      if (a == Amplitude{}) continue;
      ExcitationPattern pattern;
      for (const auto* m : {&basis[static_cast<std::size_t>(i)], &basis[static_cast<std::size_t>(j)]}) {
        if (watched.contains(m->path)) pattern.excited.insert(m->path);
      }
      auto it = parts.try_emplace(pattern, Eigen::MatrixXcd::Zero(n, n)).first;
      it->second(i, j) = a;
    }
  }
  std::vector<OracleBranch> out;
  for (auto& [pattern, amps] : parts) {
    const double weight = amps.squaredNorm();
    if (weight < 1e-24) continue;
    out.push_back({pattern, weight, FirstQuantizedState(state.statistics(), basis, amps / std::sqrt(weight))});
  }
  return out;
}

FirstQuantizedState cross_check(const FockState& fock_state) {
  std::vector<Mode> basis;
  for (const auto& [monomial, amp] : fock_state.terms()) {
    if (monomial.size() != 2) {
      throw InvalidArgument("first-quantized oracle needs exactly two particles, found a term with " +
                            std::to_string(monomial.size()));
    }
    basis.push_back(monomial[0]);
    basis.push_back(monomial[1]);
  }
  if (basis.empty()) throw InvalidArgument("first-quantized oracle needs exactly two particles");
  basis = sorted_union(basis, {});
  const auto n = static_cast<Eigen::Index>(basis.size());
  auto index = [&](const Mode& m) { return std::lower_bound(basis.begin(), basis.end(), m) - basis.begin(); };

  const double s = exchange_sign(fock_state.statistics());
  const double r = 1.0 / std::numbers::sqrt2;
  Eigen::MatrixXcd amps = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [monomial, amp] : fock_state.terms()) {
    const auto p = index(monomial[0]);
    const auto q = index(monomial[1]);
    amps(p, q) += r * amp;
    amps(q, p) += s * r * amp;
  }
  return FirstQuantizedState(fock_state.statistics(), std::move(basis), std::move(amps));
}

}  // namespace whichway::oracle
