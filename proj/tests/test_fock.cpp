#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "whichway/errors.hpp"

using namespace whichway;
using namespace testutil;

namespace {

SingleParticleUnitary fig1_unitary() { return splitter_unitary(BeamSplitter{"A", "B", "D", "C"}, {0}); }

}  // namespace

TEST_CASE("product state carries the fermionic reordering sign") {
  const auto ab = make_product_state(Statistics::Fermion, {up("A"), down("B")});
  REQUIRE(ab.size() == 1);
  CHECK(ab.terms().begin()->first == Monomial{up("A"), down("B")});
  CHECK(std::abs(ab.terms().begin()->second - cd(1.0)) < 1e-15);

  const auto ba = make_product_state(Statistics::Fermion, {down("B"), up("A")});
  CHECK(std::abs(ba.terms().begin()->second - cd(-1.0)) < 1e-15);
  CHECK(approx_equal(ba, ab.scaled(-1.0)));
}

TEST_CASE("bosonic product state is order independent") {
  const auto ab = make_product_state(Statistics::Boson, {up("A"), down("B")});
  const auto ba = make_product_state(Statistics::Boson, {down("B"), up("A")});
  CHECK(approx_equal(ab, ba, 0.0));
  CHECK(ab.is_normalized());
}

TEST_CASE("doubly occupied bosonic mode is normalized with the k! factor") {
  const auto s = make_product_state(Statistics::Boson, {up("A"), up("A")});
  CHECK(s.is_normalized());
  CHECK(std::abs(s.terms().begin()->second - cd(1.0 / kSqrt2)) < 1e-15);
}

TEST_CASE("repeated fermionic mode is a Pauli exclusion error") {
  CHECK_THROWS_AS(make_product_state(Statistics::Fermion, {up("A"), up("A")}), PauliExclusionError);
  const Term t{{up("C"), up("C")}, 1.0};
  CHECK_THROWS_AS(FockState::from_terms(Statistics::Fermion, std::span<const Term>(&t, 1)), PauliExclusionError);
}

TEST_CASE("single particle through the 50:50 splitter") {
  const auto out = apply_unitary(make_product_state(Statistics::Boson, {up("A")}), fig1_unitary());
  const Mode d[] = {up("D")};
  const Mode c[] = {up("C")};
  CHECK(std::abs(out.amplitude(d) - cd(1.0 / kSqrt2)) < 1e-12);
  CHECK(std::abs(out.amplitude(c) - kI / kSqrt2) < 1e-12);
  CHECK(out.size() == 2);
}

TEST_CASE("opposite spins through the splitter: (1/2, +-1/2, i/2, i/2)") {
  for (auto s : {Statistics::Boson, Statistics::Fermion}) {
    CAPTURE(to_string(s));
    const double sign = s == Statistics::Fermion ? 1.0 : -1.0;
    const auto out = apply_unitary(make_product_state(s, {up("A"), down("B")}), fig1_unitary());
    const Mode d_up_c_down[] = {up("D"), down("C")};
    const Mode d_down_c_up[] = {down("D"), up("C")};
    const Mode c_c[] = {up("C"), down("C")};
    const Mode d_d[] = {up("D"), down("D")};
    CHECK(std::abs(out.amplitude(d_up_c_down) - cd(0.5)) < 1e-12);
    CHECK(std::abs(out.amplitude(d_down_c_up) - cd(0.5 * sign)) < 1e-12);
    CHECK(std::abs(out.amplitude(c_c) - 0.5 * kI) < 1e-12);
    CHECK(std::abs(out.amplitude(d_d) - 0.5 * kI) < 1e-12);
    CHECK(out.size() == 4);
  }
}

TEST_CASE("equal-spin fermions antibunch, equal-spin bosons bunch") {
  const auto f = apply_unitary(make_product_state(Statistics::Fermion, {up("A"), up("B")}), fig1_unitary());
  REQUIRE(f.size() == 1);
  CHECK(f.terms().begin()->first == Monomial{up("C"), up("D")});
  CHECK(std::abs(std::abs(f.terms().begin()->second) - 1.0) < 1e-12);

  const auto b = apply_unitary(make_product_state(Statistics::Boson, {up("A"), up("B")}), fig1_unitary());
  const Mode cd_pair[] = {up("C"), up("D")};
  CHECK(std::abs(b.amplitude(cd_pair)) < 1e-15);
  CHECK(b.size() == 2);
  CHECK(b.is_normalized());

  // Oracle: evolve the symmetrized pair and compare every amplitude.
  const auto in = make_product_state(Statistics::Boson, {up("A"), up("B")});
  const auto fq = oracle::oracle_evolve(oracle::cross_check(in), fig1_unitary());
  CHECK(oracle::equal_up_to_phase(fq, oracle::cross_check(b)));
  CHECK(std::abs(oracle::overlap(fq, oracle::cross_check(b)) - cd(1.0)) < 1e-12);
  // Bunched amplitude (i/sqrt2) on each |2 in one path>.
  CHECK(std::abs(fq.amplitude(up("C"), up("C")) - kI / kSqrt2) < 1e-12);
  CHECK(std::abs(fq.amplitude(up("D"), up("D")) - kI / kSqrt2) < 1e-12);
}

TEST_CASE("inner product") {
  const auto x = make_product_state(Statistics::Fermion, {up("A"), down("B")});
  const auto y = make_product_state(Statistics::Fermion, {down("A"), up("B")});
  CHECK(std::abs(inner_product(x, x) - cd(1.0)) < 1e-15);
  CHECK(std::abs(inner_product(x, y)) < 1e-15);
  const auto out = apply_unitary(make_product_state(Statistics::Boson, {up("A"), down("B")}), fig1_unitary());
  CHECK(std::abs(inner_product(out, out) - cd(1.0)) < 1e-12);
  CHECK_THROWS_AS(inner_product(x, make_product_state(Statistics::Boson, {up("A")})), InvalidArgument);

  const auto twice = make_product_state(Statistics::Boson, {up("A"), up("A")});
  CHECK(std::abs(inner_product(twice, twice) - cd(1.0)) < 1e-15);
}

TEST_CASE("spin rotation") {
  Eigen::Matrix2cd h;
  h << 1, 1, 1, -1;
  h /= kSqrt2;
  const auto c = make_product_state(Statistics::Fermion, {up("C")});
  const auto rotated = apply_spin_rotation(c, "C", h);
  const Mode cu[] = {up("C")};
  const Mode cdn[] = {down("C")};
  CHECK(std::abs(rotated.amplitude(cu) - cd(1.0 / kSqrt2)) < 1e-12);
  CHECK(std::abs(rotated.amplitude(cdn) - cd(1.0 / kSqrt2)) < 1e-12);
  CHECK(approx_equal(apply_spin_rotation(c, "C", Eigen::Matrix2cd::Identity()), c, 0.0));
  CHECK(approx_equal(apply_spin_rotation(rotated, "C", h), c, 1e-12));

  // Other paths untouched.
  const auto pair = make_product_state(Statistics::Fermion, {up("C"), down("D")});
  const auto only_c = apply_spin_rotation(pair, "C", h);
  for (const auto& [mono, amp] : only_c.terms()) {
    for (const auto& m : mono)
      if (m.path == "D") CHECK(m.spin == Spin::Down);
  }

  Eigen::Matrix2cd bad;
  bad << 1, 1, 0, 1;
  CHECK_THROWS_AS(apply_spin_rotation(c, "C", bad), InvalidArgument);
}

TEST_CASE("unitary validation") {
  Eigen::MatrixXcd m(2, 2);
  m << 1, 1, 0, 1;
  CHECK_THROWS_AS(SingleParticleUnitary({up("A"), up("B")}, m), InvalidArgument);
  CHECK_THROWS_AS(SingleParticleUnitary({up("A"), up("A")}, Eigen::MatrixXcd::Identity(2, 2)), InvalidArgument);
  CHECK_THROWS_AS(SingleParticleUnitary({up("A")}, Eigen::MatrixXcd::Identity(2, 2)), InvalidArgument);
  CHECK_NOTHROW(SingleParticleUnitary({up("A"), up("B")}, Eigen::MatrixXcd::Identity(2, 2)));

  const auto u = SingleParticleUnitary({up("A"), up("B")}, Eigen::MatrixXcd::Identity(2, 2));
  const SingleParticleUnitary both[] = {u, u};
  CHECK_THROWS_AS(apply_unitaries(make_product_state(Statistics::Boson, {up("A")}), both), InvalidArgument);
}

TEST_CASE("vacuum and zero vector") {
  const auto vac = FockState::vacuum(Statistics::Fermion);
  CHECK(vac.is_normalized());
  CHECK(approx_equal(apply_unitary(vac, fig1_unitary()), vac));
  const FockState zero(Statistics::Fermion);
  CHECK(zero.is_zero());
  CHECK_THROWS_AS(zero.normalized(), InvalidArgument);
}

TEST_CASE("property: random unitaries preserve the norm and never violate exclusion") {
  std::mt19937_64 rng(7);
  const std::vector<Mode> modes{up("A"), down("A"), up("B"), down("B"), up("C"), down("C")};
  for (int trial = 0; trial < 100; ++trial) {
    for (auto s : {Statistics::Boson, Statistics::Fermion}) {
      const auto state = random_pair_state(s, modes, rng);
      const SingleParticleUnitary u(modes, random_unitary(static_cast<int>(modes.size()), rng));
      const auto out = apply_unitary(state, u);
      CHECK(std::abs(out.norm_squared() - 1.0) < 1e-9);
      if (s == Statistics::Fermion) {
        for (const auto& [mono, amp] : out.terms())
          CHECK(std::adjacent_find(mono.begin(), mono.end()) == mono.end());
      }
    }
  }
}

TEST_CASE("property: composition of unitaries") {
  std::mt19937_64 rng(11);
  const std::vector<Mode> modes{up("A"), down("A"), up("B"), down("B")};
  for (int trial = 0; trial < 50; ++trial) {
    for (auto s : {Statistics::Boson, Statistics::Fermion}) {
      const auto state = random_pair_state(s, modes, rng);
      const Eigen::MatrixXcd mu = random_unitary(4, rng);
      const Eigen::MatrixXcd mv = random_unitary(4, rng);
      const SingleParticleUnitary u(modes, mu), v(modes, mv), vu(modes, mv * mu);
      CHECK(approx_equal(apply_unitary(apply_unitary(state, u), v), apply_unitary(state, vu), 1e-9));
      CHECK(approx_equal(apply_unitary(apply_unitary(state, u), u.adjoint()), state, 1e-9));
    }
  }
}

TEST_CASE("property: exchange symmetry of product states") {
  std::vector<Mode> modes{down("B"), up("A"), up("C", 1)};
  std::vector<int> perm{0, 1, 2};
  const auto base_f = make_product_state(Statistics::Fermion, modes);
  const auto base_b = make_product_state(Statistics::Boson, modes);
  do {
    std::vector<Mode> permuted;
    for (int i : perm) permuted.push_back(modes[i]);
    int inversions = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) inversions += perm[i] > perm[j];
    const double sign = inversions % 2 ? -1.0 : 1.0;
    CHECK(approx_equal(make_product_state(Statistics::Fermion, permuted), base_f.scaled(sign), 0.0));
    CHECK(approx_equal(make_product_state(Statistics::Boson, permuted), base_b, 0.0));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("property: engine amplitudes match the oracle for random two-particle states") {
  std::mt19937_64 rng(13);
  const std::vector<Mode> modes{up("A"), down("A"), up("B", 1), down("B"), up("C"), down("C", 1)};
  for (int trial = 0; trial < 50; ++trial) {
    for (auto s : {Statistics::Boson, Statistics::Fermion}) {
      const auto state = random_pair_state(s, modes, rng);
      const SingleParticleUnitary u(modes, random_unitary(static_cast<int>(modes.size()), rng));
      const auto engine = oracle::cross_check(apply_unitary(state, u));
      const auto reference = oracle::oracle_evolve(oracle::cross_check(state), u);
      CHECK(std::abs(oracle::overlap(engine, reference) - cd(1.0)) < 1e-9);
    }
  }
}

TEST_CASE("three fermions stay normalized") {
  std::mt19937_64 rng(17);
  const std::vector<Mode> modes{up("A"), up("B"), up("C"), down("A")};
  const auto state = make_product_state(Statistics::Fermion, {up("A"), up("B"), up("C")});
  const SingleParticleUnitary u(modes, random_unitary(4, rng));
  const auto out = apply_unitary(state, u);
  CHECK(std::abs(out.norm_squared() - 1.0) < 1e-9);
  CHECK(out.size() == 4);
}

TEST_CASE("pruning removes floating-point dust") {
  FockStateBuilder b(Statistics::Boson);
  const Mode m[] = {up("A")};
  b.add(m, 1.0);
  b.add(m, -1.0 + 1e-14);
  CHECK(std::move(b).build().is_zero());
}

TEST_CASE("statistics names") {
  CHECK(parse_statistics("boson") == Statistics::Boson);
  CHECK(parse_statistics("fermion") == Statistics::Fermion);
  CHECK_THROWS_AS(parse_statistics("anyon"), InvalidArgument);
}
