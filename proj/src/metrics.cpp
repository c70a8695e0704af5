#include "whichway/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "whichway/errors.hpp"
#include "whichway/interferometer.hpp"

namespace whichway {

namespace {

// Eigenvalues of a density matrix below this are numerical dust.
constexpr double kRankCutoff = 1e-13;

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

int spin_index(Spin s) { return s == Spin::Up ? 0 : 1; }

std::string describe(const Monomial& monomial) {
  std::string out = "|";
  for (std::size_t i = 0; i < monomial.size(); ++i) {
    if (i) out += ";";
    out += to_string(monomial[i]);
  }
  return out + ">";
}

std::pair<std::string, std::string> ordered(const std::string& x, const std::string& y) {
  if (x == y) throw InvalidArgument("the two paths must differ, got '" + x + "' twice");
  return x < y ? std::pair{x, y} : std::pair{y, x};
}

// Builds sum_t v_t v_t^dagger from kets indexed by an environment label.
template <typename Key>
TwoQubitDM from_ensemble(const std::map<Key, Eigen::Vector4cd>& kets, std::array<std::string, 2> labels) {
  TwoQubitDM dm;
  dm.labels = std::move(labels);
  for (const auto& [key, v] : kets) dm.matrix += v * v.adjoint();
  const double trace = dm.matrix.trace().real();
  if (trace <= 0.0) throw InvalidArgument("state has no weight on the requested paths");
  dm.matrix /= trace;
  return dm;
}

}  // namespace

void TwoQubitDM::validate(double tolerance) const {
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > tolerance) {
    throw InvalidArgument("density matrix is not Hermitian");
  }
  if (std::abs(matrix.trace() - std::complex<double>(1.0, 0.0)) > tolerance) {
    throw InvalidArgument("density matrix trace differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(matrix, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -tolerance) {
    throw InvalidArgument("density matrix is not positive semidefinite");
  }
}

TwoQubitDM TwoQubitDM::pure(const Eigen::Vector4cd& ket, std::array<std::string, 2> labels) {
  const Eigen::Vector4cd v = ket.normalized();
  return {v * v.adjoint(), std::move(labels)};
}

TwoQubitDM TwoQubitDM::maximally_mixed(std::array<std::string, 2> labels) {
  return {Eigen::Matrix4cd::Identity() / 4.0, std::move(labels)};
}

TwoQubitDM mix(std::span<const std::pair<double, TwoQubitDM>> components) {
  if (components.empty()) throw InvalidArgument("cannot mix an empty ensemble");
  TwoQubitDM out;
  out.labels = components.front().second.labels;
  double total = 0.0;
  for (const auto& [w, dm] : components) {
    if (w < 0.0) throw InvalidArgument("negative mixture weight");
    out.matrix += w * dm.matrix;
    total += w;
  }
  if (total <= 0.0) throw InvalidArgument("mixture weights sum to zero");
  out.matrix /= total;
  return out;
}

nlohmann::json to_json(const TwoQubitDM& dm) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < 4; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < 4; ++j) row.push_back({dm.matrix(i, j).real(), dm.matrix(i, j).imag()});
    rows.push_back(row);
  }
  return {{"labels", dm.labels}, {"matrix", rows}};
}

Eigen::Vector4cd bell_vector(BellState state) {
  const double s = 1.0 / std::numbers::sqrt2;
  switch (state) {
    case BellState::PsiPlus: return Eigen::Vector4cd(0, s, s, 0);
    case BellState::PsiMinus: return Eigen::Vector4cd(0, s, -s, 0);
    case BellState::PhiPlus: return Eigen::Vector4cd(s, 0, 0, s);
    case BellState::PhiMinus: return Eigen::Vector4cd(s, 0, 0, -s);
  }
  return Eigen::Vector4cd::Zero();
}

std::string to_string(BellState state) {
  switch (state) {
    case BellState::PsiPlus: return "psi+";
    case BellState::PsiMinus: return "psi-";
    case BellState::PhiPlus: return "phi+";
    case BellState::PhiMinus: return "phi-";
  }
  return "?";
}

double fidelity(const TwoQubitDM& dm, const Eigen::Vector4cd& ket) {
  return (ket.adjoint() * dm.matrix * ket)(0, 0).real();
}

std::optional<BellState> identify_bell_state(const TwoQubitDM& dm, double tolerance) {
  for (BellState b : {BellState::PsiPlus, BellState::PsiMinus, BellState::PhiPlus, BellState::PhiMinus}) {
    if (fidelity(dm, bell_vector(b)) > 1.0 - tolerance) return b;
  }
  return std::nullopt;
}

TwoQubitDM reduce_to_spin_dm(const FockState& state, const std::string& x, const std::string& y) {
  const auto [first, second] = ordered(x, y);
  // Environment label = (tag of the first-path particle, tag of the second).
  std::map<std::pair<int, int>, Eigen::Vector4cd> kets;
  for (const auto& [monomial, amp] : state.terms()) {
    if (monomial.size() != 2 || monomial[0].path != first || monomial[1].path != second) {
      throw InvalidArgument("monomial " + describe(monomial) + " does not hold exactly one particle in " +
                            first + " and one in " + second);
    }
    auto [it, inserted] = kets.try_emplace({monomial[0].tag, monomial[1].tag}, Eigen::Vector4cd::Zero());
    it->second(2 * spin_index(monomial[0].spin) + spin_index(monomial[1].spin)) += amp;
  }
  TwoQubitDM dm = from_ensemble(kets, {first, second});
  dm.validate();
  return dm;
}

double concurrence(const TwoQubitDM& dm) {
  dm.validate();
  // rho = W W^dagger; the Wootters lambdas are the singular values of
  // W^T (sy x sy) W, which avoids square roots of near-zero eigenvalues of R.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(dm.matrix);
  Eigen::Vector4d weights = solver.eigenvalues();
  for (int i = 0; i < 4; ++i) weights(i) = weights(i) < kRankCutoff ? 0.0 : std::sqrt(weights(i));
  const Eigen::Matrix4cd w = solver.eigenvectors() * weights.cast<std::complex<double>>().asDiagonal();

  Eigen::Matrix2cd sy;
  sy << 0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0;
  const Eigen::Matrix4cd tau = w.transpose() * kron(sy, sy) * w;
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(tau);
  const Eigen::Vector4d s = svd.singularValues();  // decreasing
  return std::max(0.0, s(0) - s(1) - s(2) - s(3));
}

ChshSettings ChshSettings::standard() {
  const double s = 1.0 / std::numbers::sqrt2;
  return {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(s, s, 0),
          Eigen::Vector3d(s, -s, 0)};
}

void ChshSettings::validate(double tolerance) const {
  for (const auto* v : {&a, &a_prime, &b, &b_prime}) {
    if (std::abs(v->norm() - 1.0) > tolerance) throw InvalidArgument("CHSH setting is not a unit vector");
  }
}

Eigen::Matrix2cd pauli_observable(const Eigen::Vector3d& n) {
  const std::complex<double> i(0, 1);
  Eigen::Matrix2cd out;
  out << n.z(), n.x() - i * n.y(), n.x() + i * n.y(), -n.z();
  return out;
}

double chsh_expectation(const TwoQubitDM& dm, const ChshSettings& settings) {
  dm.validate();
  settings.validate();
  const auto a = pauli_observable(settings.a);
  const auto ap = pauli_observable(settings.a_prime);
  const auto b = pauli_observable(settings.b);
  const auto bp = pauli_observable(settings.b_prime);
  const Eigen::Matrix4cd bell = kron(a, b) + kron(a, bp) + kron(ap, b) - kron(ap, bp);
  return (dm.matrix * bell).trace().real();
}

double infer_concurrence_from_chsh(const TwoQubitDM& dm, Statistics statistics) {
  const double scale = 2.0 * std::numbers::sqrt2;
  const double value = chsh_expectation(dm);
  return statistics == Statistics::Fermion ? value / scale : -value / scale;
}

// ---------------------------------------------------------------------------

OverlapParam::OverlapParam(std::complex<double> a) : a_(a) {
  if (!(std::abs(a) <= 1.0 + 1e-12)) throw InvalidArgument("overlap must satisfy |a| <= 1");
}

OverlapParam OverlapParam::from_squared_magnitude(double a2) {
  if (!(a2 >= 0.0 && a2 <= 1.0 + 1e-12)) throw InvalidArgument("|a|^2 must lie in [0, 1]");
  return OverlapParam(std::sqrt(std::min(a2, 1.0)));
}

double distinguishability(const OverlapParam& a) { return 1.0 - a.squared_magnitude(); }

FockState tagged_input(const OverlapParam& a, Statistics statistics) {
  const double rest = std::sqrt(std::max(0.0, 1.0 - a.squared_magnitude()));
  const std::vector<Term> terms{
      {{Mode{"A", Spin::Up, 0}, Mode{"B", Spin::Down, 0}}, a.value()},
      {{Mode{"A", Spin::Up, 0}, Mode{"B", Spin::Down, 1}}, rest},
  };
  return FockState::from_terms(statistics, terms).normalized();
}

Complementarity complementarity_check(const OverlapParam& a, Statistics statistics) {
  const Network net = fig1_network();
  const BranchSet branches = detect(run_network(net, tagged_input(a, statistics)), net.monitored());
  const Postselection coincidence = postselect(branches, is_coincidence);
  const TwoQubitDM dm = reduce_to_spin_dm(coincidence.conditional.branches.front().state, "C", "D");

  Complementarity out;
  out.entanglement = concurrence(dm);
  out.distinguishability = distinguishability(a);
  out.sum = out.entanglement + out.distinguishability;
  out.chsh_inferred = infer_concurrence_from_chsh(dm, statistics);
  return out;
}

OverlapParam gaussian_overlap(double v, double dt, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("wave-packet width sigma must be positive");
  return OverlapParam(std::exp(-v * v * dt * dt / (4.0 * sigma * sigma)));
}

TwoQubitDM dual_relabel(const FockState& state, const std::string& x, const std::string& y) {
  const auto [first, second] = ordered(x, y);
  auto path_index = [&](const std::string& p) { return p == first ? 0 : 1; };
  Eigen::Vector4cd ket = Eigen::Vector4cd::Zero();
  for (const auto& [monomial, amp] : state.terms()) {
    const bool ok = monomial.size() == 2 && monomial[0].spin != monomial[1].spin &&
                    std::all_of(monomial.begin(), monomial.end(), [&](const Mode& m) {
                      return m.tag == 0 && (m.path == first || m.path == second);
                    });
    if (!ok) {
      throw InvalidArgument("monomial " + describe(monomial) + " does not hold one up and one down particle "
                            "with tag 0 on " + first + "," + second);
    }
    // Reorder to (up particle, down particle); fermions pick up the swap sign.
    const bool up_first = monomial[0].spin == Spin::Up;
    const Mode& up = up_first ? monomial[0] : monomial[1];
    const Mode& down = up_first ? monomial[1] : monomial[0];
    const double sign = (!up_first && state.statistics() == Statistics::Fermion) ? -1.0 : 1.0;
    ket(2 * path_index(up.path) + path_index(down.path)) += sign * amp;
  }
  if (ket.norm() == 0.0) throw InvalidArgument("state has no weight on the requested paths");
  TwoQubitDM dm = TwoQubitDM::pure(ket, {"up", "down"});
  dm.validate();
  return dm;
}

}  // namespace whichway
