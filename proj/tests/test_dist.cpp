#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracle.hpp"
#include "sct/dist.hpp"
#include "sct/random.hpp"

using namespace sct;

namespace {

JointDist3 xor_triple() {
  // X, Y uniform bits, Z = X xor Y.
  JointDist3 d(2, 2, 2);
  d.at(0, 0, 0) = 0.25;
  d.at(0, 1, 1) = 0.25;
  d.at(1, 0, 1) = 0.25;
  d.at(1, 1, 0) = 0.25;
  return validate(std::move(d));
}

}  // namespace

TEST_CASE("validation rejects bad inputs") {
  JointDist3 neg(2, 2, 1);
  neg.at(0, 0, 0) = 1.25;
  neg.at(1, 1, 0) = -0.25;
  CHECK_THROWS_AS(validate(neg), NegativeEntryError);

  JointDist3 off(2, 2, 1);
  off.at(0, 0, 0) = 0.6;
  off.at(1, 1, 0) = 0.5;
  CHECK_THROWS_AS(validate(off), NotNormalizedError);

  CHECK_THROWS_AS(validate(JointDist3(0, 2, 1)), ShapeMismatchError);

  JointDist2 ok2(1, 2);
  ok2.at(0, 0) = 0.5;
  ok2.at(0, 1) = 0.5;
  CHECK_NOTHROW(validate(ok2));
}

TEST_CASE("validate fills the support mask and tolerates tiny slack") {
  JointDist3 d(2, 1, 1);
  d.at(0, 0, 0) = 0.5 + 4e-10;
  d.at(1, 0, 0) = 0.5;
  JointDist3 v = validate(d);
  REQUIRE(v.support_mask.size() == 2);
  CHECK(v.support_mask[0] == 1);
  CHECK(support_size(v) == 2);
}

TEST_CASE("entropy basics") {
  CHECK(entropy(Pmf{0.5, 0.5}) == Catch::Approx(1.0));
  CHECK(entropy(Pmf{1.0, 0.0}) == Catch::Approx(0.0).margin(1e-15));
  CHECK(entropy(Pmf{0.5, 0.25, 0.25}) == Catch::Approx(1.5));
  CHECK(xlog2(0.0) == 0.0);
}

TEST_CASE("marginals of the xor triple") {
  JointDist3 d = xor_triple();
  Pmf px = marginal(d, Axis::X);
  CHECK(px[0] == Catch::Approx(0.5));
  JointDist2 xy = marginal_xy(d);
  CHECK(xy.at(0, 1) == Catch::Approx(0.25));
  JointDist2 xz = marginal_pair(d, Axis::X, Axis::Z);
  CHECK(xz.at(1, 1) == Catch::Approx(0.25));
  CHECK_THROWS_AS(marginal_pair(d, Axis::X, Axis::X), EmptyAxisSetError);

  JointDist3 keep = marginalize(d, {Axis::X, Axis::Z});
  CHECK(keep.ny == 1);
  CHECK(keep.at(0, 0, 1) == Catch::Approx(0.25));
  CHECK_THROWS_AS(marginalize(d, std::initializer_list<Axis>{}),
                  EmptyAxisSetError);
}

TEST_CASE("mutual information identities on the xor triple") {
  JointDist3 d = xor_triple();
  // Pairwise independent, jointly dependent.
  CHECK(mutual_information(marginal_xy(d)) == Catch::Approx(0.0).margin(1e-12));
  CHECK(mutual_information(d, Axis::X, Axis::Y) ==
        Catch::Approx(0.0).margin(1e-12));
  CHECK(mutual_information(d, Axis::X, Axis::Y, Axis::Z) ==
        Catch::Approx(1.0));
  CHECK(mutual_information(d, Axis::X, Axis::Z, Axis::Y) ==
        Catch::Approx(1.0));
  CHECK_THROWS_AS(mutual_information(d, Axis::X, Axis::X),
                  EmptyAxisSetError);
}

TEST_CASE("mutual information matches the entropy-identity oracle") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    Rng rng(mix64(seed));
    JointDist3 d = random_dist3(rng, 3, 4, 2);
    CHECK(mutual_information(d, Axis::X, Axis::Y, Axis::Z) ==
          Catch::Approx(oracle::cmi_xy_given_z(d)).margin(1e-10));
    CHECK(mutual_information(marginal_xy(d)) ==
          Catch::Approx(oracle::mi_pair(marginal_xy(d))).margin(1e-10));
  }
}

TEST_CASE("total variation distance") {
  JointDist3 a = xor_triple();
  JointDist3 b = xor_triple();
  CHECK(tv_distance(a, b) == 0.0);
  b.p[b.index(0, 0, 0)] = 0.15;
  b.p[b.index(0, 1, 1)] = 0.35;
  CHECK(tv_distance(a, b) == Catch::Approx(0.1));
  JointDist3 c(2, 2, 1);
  CHECK_THROWS_AS(tv_distance(a, c), ShapeMismatchError);
}

TEST_CASE("tensor products compose independently") {
  Rng rng(mix64(11));
  JointDist3 a = random_dist3(rng, 2, 3, 2);
  JointDist3 b = random_dist3(rng, 3, 2, 2);
  JointDist3 p = tensor_product(a, b);
  REQUIRE(p.nx == 6);
  REQUIRE(p.ny == 6);
  REQUIRE(p.nz == 4);
  CHECK(p.sum() == Catch::Approx(1.0).margin(1e-12));
  double mi_a = mutual_information(a, Axis::X, Axis::Y, Axis::Z);
  double mi_b = mutual_information(b, Axis::X, Axis::Y, Axis::Z);
  CHECK(mutual_information(p, Axis::X, Axis::Y, Axis::Z) ==
        Catch::Approx(mi_a + mi_b).margin(1e-9));
}

TEST_CASE("channels validate and apply") {
  Channel id = Channel::identity(3);
  CHECK(id.is_deterministic());
  Channel cst = Channel::constant(3, 2);
  CHECK(cst.at(2, 0) == 1.0);
  std::vector<int> map{1, 0};
  Channel fm = Channel::from_map(2, 2, map);
  CHECK(fm.at(0, 1) == 1.0);

  JointDist3 d = xor_triple();  // nz == 2, so the identity must match
  JointDist3 same = apply_channel(d, Axis::Z, Channel::identity(2).validated());
  CHECK(tv_distance(d, same) == Catch::Approx(0.0).margin(1e-15));

  JointDist3 erased = apply_channel(d, Axis::Z, Channel::constant(2, 1));
  CHECK(erased.nz == 1);
  CHECK(mutual_information(erased, Axis::X, Axis::Y, Axis::Z) ==
        Catch::Approx(0.0).margin(1e-12));

  CHECK_THROWS_AS(apply_channel(d, Axis::Z, Channel::identity(5)),
                  SizeMismatchError);

  Channel bad(2, 2);
  bad.at(0, 0) = 0.7;  // row does not sum to one
  bad.at(1, 1) = 1.0;
  CHECK_THROWS_AS(bad.validated(), NotNormalizedError);
}

TEST_CASE("random generators are deterministic and well-formed") {
  Rng a(42), b(42);
  for (int i = 0; i < 16; ++i) CHECK(a.next() == b.next());
  Rng c(43);
  CHECK(Rng(42).next() != c.next());

  Rng rng(mix64(7));
  Pmf p = random_pmf(rng, 5);
  double s = 0.0;
  for (double v : p) {
    CHECK(v > 0.0);
    s += v;
  }
  CHECK(s == Catch::Approx(1.0).margin(1e-12));

  Channel ch = random_channel(rng, 4, 3);
  for (int i = 0; i < 4; ++i) {
    double rs = 0.0;
    for (int o = 0; o < 3; ++o) rs += ch.at(i, o);
    CHECK(rs == Catch::Approx(1.0).margin(1e-12));
  }

  JointDist3 d = random_dist3(rng, 3, 3, 3);
  CHECK(support_size(d) == 27);  // full support by default
  JointDist3 sparse = random_dist3(rng, 3, 3, 3, 0.5);
  CHECK(support_size(sparse) < 27);
  CHECK(sparse.sum() == Catch::Approx(1.0).margin(1e-9));

  auto m = random_map(rng, 6, 3);
  REQUIRE(m.size() == 6);
  for (int v : m) CHECK((v >= 0 && v < 3));
}
