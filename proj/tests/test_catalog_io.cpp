#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "sct/catalog.hpp"
#include "sct/dist_io.hpp"
#include "sct/ergodic.hpp"

using namespace sct;

TEST_CASE("catalog entries are normalized and sized as documented") {
  struct Row {
    const char* name;
    int n;
    int nx, ny, nz, support;
  };
  const std::vector<Row> rows = {
      {"p1", -1, 4, 4, 4, 6},   {"p2", -1, 4, 4, 3, 6},
      {"p3", -1, 4, 4, 2, 6},   {"p4", -1, 3, 6, 3, 13},
      {"p5", -1, 4, 4, 2, 8},   {"pn", 5, 10, 10, 5, 30},
      {"qn", 4, 9, 9, 5, 21},   {"psecret", -1, 2, 2, 1, 2},
      {"random", 7, 3, 3, 3, 27},
  };
  for (const Row& r : rows) {
    auto d = catalog_dist(r.name, r.n);
    CHECK(d.nx == r.nx);
    CHECK(d.ny == r.ny);
    CHECK(d.nz == r.nz);
    CHECK(support_size(d) == r.support);
    CHECK(d.sum() == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("catalog parameter validation") {
  CHECK_THROWS_AS(catalog_dist("qn", 2), BadParamError);
  CHECK_THROWS_AS(catalog_dist("pn", 1), BadParamError);
  CHECK_THROWS_AS(catalog_dist("pn"), BadParamError);
  CHECK_THROWS_AS(catalog_dist("qn"), BadParamError);
  CHECK_THROWS_AS(catalog_dist("nonesuch"), UnknownNameError);
  CHECK(!catalog_list().empty());
}

TEST_CASE("scaled family: common-part masses follow the closed form") {
  for (int n : {4, 8}) {
    auto d = catalog_qn(n);
    const double s = 1.0 / std::log2(static_cast<double>(n));
    auto dec = ergodic_decompose(marginal_xy(d));
    REQUIRE(static_cast<int>(dec.components.size()) == n + 2);
    CHECK(dec.components[0].mass == Catch::Approx(s / 2).margin(1e-12));
    for (int j = 0; j < n; ++j)
      CHECK(dec.components[1 + j].mass ==
            Catch::Approx(s / (2 * n)).margin(1e-12));
    CHECK(dec.components[n + 1].mass ==
          Catch::Approx(1.0 - s).margin(1e-12));
    CHECK(gk_ci_conditional(d) == Catch::Approx(s).margin(1e-9));
    CHECK(d.labels[0].back() == "delta");
    CHECK(d.labels[2].back() == "delta");
  }
}

TEST_CASE("modular family: observer symbol decides between block and diagonal") {
  for (int n : {2, 5}) {
    auto d = catalog_pn(n);
    CHECK(gk_ci_conditional(d) == Catch::Approx(1.0).margin(1e-12));
    CHECK(gk_ci(marginal_xy(d)) >= 0.0);
  }
  auto ps = catalog_psecret();
  CHECK(gk_ci(marginal_xy(ps)) == Catch::Approx(1.0).margin(1e-12));
  CHECK(gk_ci_conditional(ps) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("serialization renders small dyadic masses as exact fractions") {
  auto text = serialize_dist(catalog_p1());
  CHECK(text.find("alphabets 4 4 4\n") != std::string::npos);
  CHECK(text.find("entry 0 0 0 1/8\n") != std::string::npos);
  CHECK(text.find("entry 2 2 2 1/4\n") != std::string::npos);
}

TEST_CASE("serialize then parse reproduces every catalog entry bitwise") {
  const std::vector<std::pair<std::string, int>> entries = {
      {"p1", -1}, {"p2", -1}, {"p3", -1},     {"p4", -1},    {"p5", -1},
      {"pn", 5},  {"qn", 4},  {"qn", 32},     {"psecret", -1},
      {"random", 7}};
  for (const auto& [name, n] : entries) {
    auto d = catalog_dist(name, n);
    std::string text = serialize_dist(d, name);
    NamedDist back = parse_dist(text);
    CHECK(back.name == name);
    REQUIRE(back.dist.nx == d.nx);
    REQUIRE(back.dist.ny == d.ny);
    REQUIRE(back.dist.nz == d.nz);
    REQUIRE(back.dist.p.size() == d.p.size());
    for (std::size_t i = 0; i < d.p.size(); ++i) CHECK(back.dist.p[i] == d.p[i]);
    CHECK(back.dist.labels == d.labels);
    CHECK(serialize_dist(back.dist, back.name) == text);
  }
}

TEST_CASE("names and labels survive a round trip") {
  auto d = catalog_p2();
  d.labels[0] = {"u", "v", "w", "q"};
  d.labels[2] = {"s0", "s1", "mix"};
  std::string text = serialize_dist(d, "two words  padded");
  NamedDist back = parse_dist(text);
  CHECK(back.name == "two words  padded");
  CHECK(back.dist.labels[0] == d.labels[0]);
  CHECK(back.dist.labels[1].empty());
  CHECK(back.dist.labels[2] == d.labels[2]);
}

TEST_CASE("parser reports the offending line") {
  auto line_of = [](const std::string& text) -> std::string {
    try {
      parse_dist(text);
    } catch (const SyntaxError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(line_of("alphabets 2 2\n").find("line 1") != std::string::npos);
  CHECK(line_of("entry 0 0 0 1\n").find("line 1") != std::string::npos);
  CHECK(line_of("# hi\nbogus 1\n").find("line 2") != std::string::npos);
  CHECK(line_of("# only a comment\n").find("line 2") != std::string::npos);
  CHECK(line_of("alphabets 2 2 1\nalphabets 2 2 1\n").find("line 2") !=
        std::string::npos);
  CHECK(line_of("alphabets 2 2 1\nentry 2 0 0 1\n").find("line 2") !=
        std::string::npos);
  CHECK(line_of("alphabets 2 2 1\nentry 0 0 0 1/2\nentry 0 0 0 1/2\n")
            .find("line 3") != std::string::npos);
  CHECK(line_of("alphabets 2 2 1\nentry 0 0 0 oops\n").find("line 2") !=
        std::string::npos);
  CHECK(line_of("alphabets 2 2 1\nentry 0 0 0 -0.5\n").find("line 2") !=
        std::string::npos);
  CHECK(line_of("alphabets 2 2 1\nentry 0 0 0 1/0\n").find("line 2") !=
        std::string::npos);
  CHECK(line_of("alphabets 2 2 1\nlabels x one\n").find("line 2") !=
        std::string::npos);
  CHECK(line_of("alphabets 2 2 1\nlabels w a b\n").find("line 2") !=
        std::string::npos);
}

TEST_CASE("parser enforces normalization") {
  CHECK_THROWS_AS(parse_dist("alphabets 2 2 1\nentry 0 0 0 0.5\n"
                             "entry 1 1 0 0.4\n"),
                  NotNormalizedError);
}

TEST_CASE("windows line endings are accepted") {
  NamedDist nd = parse_dist(
      "name crlf\r\nalphabets 2 2 1\r\nentry 0 0 0 1/2\r\nentry 1 1 0 1/2\r\n");
  CHECK(nd.name == "crlf");
  CHECK(nd.dist.at(1, 1, 0) == Catch::Approx(0.5));
}

TEST_CASE("file save and load round trip") {
  std::string path = "test_dist_roundtrip.tmp";
  auto d = catalog_p4();
  save_dist_file(path, d, "p4");
  NamedDist back = load_dist_file(path);
  CHECK(back.name == "p4");
  for (std::size_t i = 0; i < d.p.size(); ++i) CHECK(back.dist.p[i] == d.p[i]);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_dist_file("does_not_exist.tmp"), IoError);
}
