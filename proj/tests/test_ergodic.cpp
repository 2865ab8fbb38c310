#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "oracle.hpp"
#include "sct/catalog.hpp"
#include "sct/ergodic.hpp"
#include "sct/random.hpp"

using namespace sct;

namespace {

/// Doubly Markov instance by construction: a planted component structure
// with Q drawn from a per-component pmf.
JointDist3 double_markov_instance(Rng& rng, int k, int nx, int ny, int nq) {
  std::vector<int> cx(nx), cy(ny);
  for (int i = 0; i < nx; ++i) cx[i] = i < k ? i : static_cast<int>(rng.below(k));
  for (int i = 0; i < ny; ++i) cy[i] = i < k ? i : static_cast<int>(rng.below(k));
  std::vector<Pmf> rows;
  for (int c = 0; c < k; ++c) rows.push_back(random_pmf(rng, nq));
  JointDist3 d(nx, ny, nq);
  double total = 0.0;
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) {
      if (cx[x] != cy[y]) continue;
      double m = rng.uniform();
      for (int q = 0; q < nq; ++q) {
        d.at(x, y, q) = m * rows[cx[x]][q];
        total += d.at(x, y, q);
      }
    }
  for (double& v : d.p) v /= total;
  return validate(std::move(d));
}

}  // namespace

TEST_CASE("ergodic decomposition of handcrafted pmfs") {
  JointDist2 d(4, 4);
  d.at(0, 0) = d.at(0, 1) = d.at(1, 0) = d.at(1, 1) = 0.125;  // block
  d.at(2, 2) = 0.25;
  d.at(3, 3) = 0.25;
  auto dec = ergodic_decompose(d);
  REQUIRE(dec.size() == 3);
  CHECK(dec.q_star[0] == Catch::Approx(0.5));
  CHECK(dec.q_star[1] == Catch::Approx(0.25));
  CHECK(dec.q_star[2] == Catch::Approx(0.25));
  CHECK(dec.x_label[0] == 0);
  CHECK(dec.x_label[1] == 0);
  CHECK(dec.x_label[2] == 1);
  CHECK(dec.y_label[3] == 2);
  CHECK(dec.components[0].x_symbols == std::vector<int>{0, 1});
  CHECK(gk_ci(d) == Catch::Approx(1.5));
}

TEST_CASE("symbols without support get no label") {
  JointDist2 d(3, 3);
  d.at(0, 0) = 0.5;
  d.at(2, 2) = 0.5;
  auto dec = ergodic_decompose(d);
  REQUIRE(dec.size() == 2);
  CHECK(dec.x_label[1] == -1);
  CHECK(dec.y_label[1] == -1);
  CHECK(gk_ci(d) == Catch::Approx(1.0));
}

TEST_CASE("decomposition agrees with the closure oracle on random supports") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(mix64(seed));
    JointDist2 d = random_dist2(rng, 5, 6, 0.55);
    auto dec = ergodic_decompose(d);
    auto ref = oracle::components(d);
    REQUIRE(dec.x_label == ref.x_label);
    REQUIRE(dec.q_star.size() == ref.mass.size());
    for (std::size_t i = 0; i < ref.mass.size(); ++i)
      CHECK(dec.q_star[i] == Catch::Approx(ref.mass[i]).margin(1e-12));
    CHECK(gk_ci(d) == Catch::Approx(oracle::gk_from_closure(d)).margin(1e-10));
  }
}

TEST_CASE("common information is exactly additive over tensor products") {
  JointDist2 a = marginal_xy(catalog_p3());
  JointDist2 b = marginal_xy(catalog_p5());
  CHECK(gk_ci(tensor_product(a, b)) ==
        Catch::Approx(gk_ci(a) + gk_ci(b)).margin(1e-12));
}

TEST_CASE("conditional variants on the worked examples") {
  CHECK(gk_ci_conditional(catalog_p1()) == Catch::Approx(0.0).margin(1e-12));
  CHECK(gk_ci_conditional(catalog_p2()) == Catch::Approx(0.5).margin(1e-12));
  CHECK(gk_ci_conditional(catalog_p3()) == Catch::Approx(1.0).margin(1e-12));
  CHECK(gk_ci_conditional(catalog_p5()) == Catch::Approx(1.0).margin(1e-12));
  // Conditioning splits the parity block into singletons per realization.
  CHECK(gk_ci_conditional_per_z(catalog_p1()) ==
        Catch::Approx(0.5).margin(1e-12));
  // The per-realization value can exceed the marginal-based value.
  CHECK(gk_ci_conditional_per_z(catalog_p1()) >
        gk_ci_conditional(catalog_p1()));
}

TEST_CASE("resolvability flags on the worked examples") {
  auto r3 = resolvability_flags(catalog_p3());
  CHECK(r3.resolvable);
  CHECK_FALSE(r3.conditionally_resolvable);
  auto r4 = resolvability_flags(catalog_p4());
  CHECK_FALSE(r4.resolvable);
  CHECK(r4.conditionally_resolvable);
  auto r5 = resolvability_flags(catalog_p5());
  CHECK_FALSE(r5.resolvable);
  CHECK_FALSE(r5.conditionally_resolvable);
}

TEST_CASE("resolvability residuals equal adjoined conditional informations") {
  for (std::uint64_t seed = 2; seed <= 7; ++seed) {
    Rng rng(mix64(seed));
    JointDist3 d = random_dist3(rng, 4, 4, 3, 0.45);
    auto m = marginal_xy(d);
    auto dec = ergodic_decompose(m);
    if (dec.size() < 2) continue;
    auto rep = resolvability_flags(d);

    JointDist3 pair_q(d.nx, d.ny, dec.size());
    for (int x = 0; x < d.nx; ++x)
      for (int y = 0; y < d.ny; ++y)
        if (m.at(x, y) > 0.0) pair_q.at(x, y, dec.x_label[x]) = m.at(x, y);
    CHECK(rep.residual_marginal ==
          Catch::Approx(oracle::cmi_xy_given_z(pair_q)).margin(1e-9));

    JointDist3 pair_zq(d.nx, d.ny, d.nz * dec.size());
    for (int x = 0; x < d.nx; ++x)
      for (int y = 0; y < d.ny; ++y)
        for (int z = 0; z < d.nz; ++z)
          if (d.at(x, y, z) > 0.0)
            pair_zq.at(x, y, z * dec.size() + dec.x_label[x]) = d.at(x, y, z);
    CHECK(rep.residual_conditional ==
          Catch::Approx(oracle::cmi_xy_given_z(pair_zq)).margin(1e-9));
  }
}

TEST_CASE("double-Markov decomposition on planted instances") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Rng rng(mix64(seed * 77));
    int k = 2 + static_cast<int>(rng.below(2));
    JointDist3 inst = double_markov_instance(rng, k, 4, 5, 3);
    auto out = double_markov_decompose(inst);
    CHECK(out.decomposition.size() == k);
    CHECK(out.residual_markov_x <= 1e-9);
    CHECK(out.residual_markov_y <= 1e-9);
    CHECK(out.mi_pair_q_given_qprime <= 1e-9);
    CHECK(out.mi_pair_q <= out.entropy_qprime + 1e-9);
    // Q' must be a deterministic function of either party's symbol.
    for (int x = 0; x < inst.nx; ++x) CHECK(out.decomposition.x_label[x] >= 0);
    for (int y = 0; y < inst.ny; ++y) CHECK(out.decomposition.y_label[y] >= 0);
  }
}

TEST_CASE("double-Markov rejects a non-Markov triple") {
  // X, Y independent bits and Q = X: the X - Y - Q chain fails.
  JointDist3 bad(2, 2, 2);
  bad.at(0, 0, 0) = bad.at(0, 1, 0) = bad.at(1, 0, 1) = bad.at(1, 1, 1) = 0.25;
  CHECK_THROWS_AS(double_markov_decompose(validate(std::move(bad))),
                  NotDoubleMarkovError);
}

TEST_CASE("entropy identity: shared randomness bounded by the common label") {
  // For doubly Markov inputs, I(XY;Q) = H(Q') - H(Q'|Q) exactly.
  Rng rng(mix64(555));
  JointDist3 inst = double_markov_instance(rng, 3, 5, 5, 4);
  auto out = double_markov_decompose(inst);
  CHECK(out.mi_pair_q ==
        Catch::Approx(out.entropy_qprime - out.entropy_qprime_given_q)
            .margin(1e-9));
}