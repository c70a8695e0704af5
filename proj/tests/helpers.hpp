#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "whichway/fock.hpp"
#include "whichway/interferometer.hpp"
#include "whichway/metrics.hpp"
#include "whichway/oracle.hpp"

namespace testutil {

using namespace whichway;
using cd = std::complex<double>;

inline const double kSqrt2 = std::sqrt(2.0);
inline const cd kI{0.0, 1.0};

inline Mode up(const std::string& path, int tag = 0) { return Mode{path, Spin::Up, tag}; }
inline Mode down(const std::string& path, int tag = 0) { return Mode{path, Spin::Down, tag}; }

/// Haar-ish random unitary from the QR decomposition of a complex Gaussian matrix.
inline Eigen::MatrixXcd random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cd(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  Eigen::MatrixXcd q = qr.householderQ();
  return q;
}

/// Random normalized two-particle state over the given modes.
inline FockState random_pair_state(Statistics s, const std::vector<Mode>& modes, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  FockStateBuilder b(s);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i; j < modes.size(); ++j) {
      if (s == Statistics::Fermion && i == j) continue;
      const Mode pair[] = {modes[i], modes[j]};
      b.add(pair, cd(g(rng), g(rng)));
    }
  }
  return std::move(b).build().normalized();
}

inline std::set<int> tags_of(const FockState& s) {
  auto t = s.tags();
  if (t.empty()) t.insert(0);
  return t;
}

/// Runs a network splitter by splitter through the first-quantized oracle.
inline oracle::FirstQuantizedState oracle_run(const Network& net, const FockState& input) {
  auto fq = oracle::cross_check(input);
  const auto tags = tags_of(input);
  for (const auto& bs : net.splitters()) fq = oracle::oracle_evolve(fq, splitter_unitary(bs, tags));
  return fq;
}

/// Spin density matrix of a first-quantized pair with one particle in x and
/// one in y (x < y), tags traced out. Computed directly from psi(i, j).
inline Eigen::Matrix4cd oracle_spin_dm(const oracle::FirstQuantizedState& fq, const std::string& x,
                                       const std::string& y) {
  const auto& basis = fq.basis();
  std::set<int> tags;
  for (const auto& m : basis) tags.insert(m.tag);
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  // Particle-1-in-x component: psi(x s1 t1, y s2 t2); the exchanged ordering
  // carries the same information, so one ordering suffices.
  for (int t1 : tags) {
    for (int t2 : tags) {
      Eigen::Vector4cd v;
      for (int s1 = 0; s1 < 2; ++s1)
        for (int s2 = 0; s2 < 2; ++s2)
          v(2 * s1 + s2) = fq.amplitude(Mode{x, Spin(s1), t1}, Mode{y, Spin(s2), t2});
      rho += v * v.adjoint();
    }
  }
  return rho / rho.trace().real();
}

/// Random feed-forward network of 1..max_splitters splitters over inputs
/// {A, B, X}. Each splitter consumes two live paths, or one live path and a
/// fresh vacuum port; every terminal path is monitored.
inline Network random_network(int max_splitters, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, max_splitters);
  const int n = count(rng);
  std::vector<std::string> live{"A", "B", "X"};
  std::vector<BeamSplitter> splitters;
  int fresh = 0;
  for (int k = 0; k < n; ++k) {
    std::shuffle(live.begin(), live.end(), rng);
    std::string in1 = live.back();
    live.pop_back();
    std::string in2;
    if (!live.empty() && std::uniform_int_distribution<int>(0, 2)(rng) > 0) {
      in2 = live.back();
      live.pop_back();
    } else {
      in2 = "v" + std::to_string(fresh++);
    }
    const std::string o1 = "p" + std::to_string(fresh++), o2 = "p" + std::to_string(fresh++);
    splitters.push_back({in1, in2, o1, o2});
    live.push_back(o1);
    live.push_back(o2);
  }
  std::sort(live.begin(), live.end());
  return Network(std::move(splitters), {"A", "B", "X"}, live);
}

/// Random normalized two-particle input on {A, B, X} with both spins and tags {0, 1}.
inline FockState random_input(Statistics s, std::mt19937_64& rng) {
  std::vector<Mode> modes;
  for (const std::string p : {"A", "B", "X"})
    for (int sp = 0; sp < 2; ++sp)
      for (int t = 0; t < 2; ++t) modes.push_back(Mode{p, Spin(sp), t});
  std::shuffle(modes.begin(), modes.end(), rng);
  modes.resize(std::uniform_int_distribution<std::size_t>(2, modes.size())(rng));
  return random_pair_state(s, modes, rng);
}

struct OracleComparison {
  double max_probability_error = 0.0;
  double max_state_error = 0.0;  // largest amplitude difference after fixing the global phase
  bool same_patterns = true;
};

/// Engine run and detection compared branch by branch with the oracle.
inline OracleComparison compare_with_oracle(const Network& net, const FockState& input) {
  OracleComparison out;
  const auto engine = detect(run_network(net, input), net.monitored());
  const auto reference = oracle::oracle_detect(oracle_run(net, input), net.monitored());
  for (const auto& o : reference) {
    const auto* br = engine.find(o.pattern);
    if (br == nullptr) {
      out.max_probability_error = std::max(out.max_probability_error, o.probability);
      if (o.probability > 1e-9) out.same_patterns = false;
      continue;
    }
    out.max_probability_error = std::max(out.max_probability_error, std::abs(br->probability - o.probability));
    const auto e = oracle::cross_check(br->state).extended(o.state.basis());
    const auto r = o.state.extended(e.basis());
    const cd ov = oracle::overlap(e, r);
    const cd phase = std::abs(ov) > 0.0 ? ov / std::abs(ov) : cd(1.0);
    out.max_state_error =
        std::max(out.max_state_error, (e.amplitudes() * phase - r.amplitudes()).cwiseAbs().maxCoeff());
  }
  for (const auto& br : engine.branches) {
    bool found = false;
    for (const auto& o : reference) found = found || o.pattern == br.pattern;
    if (!found) {
      out.max_probability_error = std::max(out.max_probability_error, br.probability);
      if (br.probability > 1e-9) out.same_patterns = false;
    }
  }
  return out;
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testutil
