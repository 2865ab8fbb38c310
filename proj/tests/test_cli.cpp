#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sct/cli.hpp"

namespace {

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = sct::cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace

TEST_CASE("compute emits the exact machine line for exact quantities") {
  auto r = run({"compute", "--quantity", "gk-cond", "--dist", "catalog:p3"});
  CHECK(r.code == 0);
  CHECK(r.out == "quantity=gk_cond dist=catalog:p3 value=1.000000000 exact=true\n");
  CHECK(r.err.empty());
}

TEST_CASE("compute reports optimizer diagnostics for solver quantities") {
  auto r = run({"--json-lines", "compute", "--quantity", "wyner-cond",
                "--dist", "catalog:p1", "--restarts", "6"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["quantity"] == "wyner_cond");
  CHECK(j["exact"] == false);
  CHECK(std::abs(j["value"].get<double>() - 0.5) <= 1e-3);
  CHECK(j["residual"].get<double>() <= 1e-6);
  CHECK(j["restarts"].get<int>() > 0);
  CHECK(j["converged"] == true);
}

TEST_CASE("compute handles negative zero and bounds output") {
  // A full-support pair has no exact common part, so the value is zero and
  // must never render as -0.
  auto r = run({"compute", "--quantity", "gk", "--dist", "catalog:random:7"});
  CHECK(r.code == 0);
  CHECK(r.out.find("value=0.000000000") != std::string::npos);
  CHECK(r.out.find("-0.0") == std::string::npos);

  auto b = run({"compute", "--quantity", "bounds", "--dist", "catalog:psecret",
                "--restarts", "4"});
  CHECK(b.code == 0);
  CHECK(b.out.find("quantity=bounds") != std::string::npos);
  CHECK(b.out.find("gk=1.000000000") != std::string::npos);
  CHECK(b.out.find("sk_cost=") != std::string::npos);
}

TEST_CASE("restart count honors the environment override") {
  setenv("SCT_RESTARTS", "3", 1);
  auto r = run({"--json-lines", "compute", "--quantity", "wyner", "--dist",
                "catalog:psecret"});
  unsetenv("SCT_RESTARTS");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  // Four canonical starts, one uniform, three random.
  CHECK(j["restarts"].get<int>() == 8);
}

TEST_CASE("audit subcommand summarizes trials") {
  auto r = run({"audit", "--measure", "gk-cond", "--trials", "5", "--seed",
                "3"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("quantity=audit measure=gk_cond dist=random:3x3x3 "
                   "trials=5 violations=0") != std::string::npos);
  CHECK(r.out.find("tol=1.000e-09") != std::string::npos);
}

TEST_CASE("certificate subcommand accepts the shared secret bit") {
  auto r = run({"certificate", "--dist", "catalog:psecret", "--restarts", "4"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("quantity=certificate") != std::string::npos);
  CHECK(r.out.find("q_prime_exists=true") != std::string::npos);
  CHECK(r.out.find("equality_holds=true") != std::string::npos);
}

TEST_CASE("catalog listing and printing") {
  auto list = run({"catalog"});
  CHECK(list.code == 0);
  CHECK(list.out.find("psecret") != std::string::npos);
  CHECK(list.out.find("qn") != std::string::npos);

  auto print = run({"catalog", "p3"});
  CHECK(print.code == 0);
  CHECK(print.out.find("name p3\n") != std::string::npos);
  CHECK(print.out.find("alphabets 4 4 2\n") != std::string::npos);
  // The printed file parses back to the same distribution.
  auto parsed = sct::parse_dist(print.out);
  CHECK(parsed.dist.nx == 4);
  CHECK(parsed.name == "p3");

  auto fam = run({"catalog", "qn:4"});
  CHECK(fam.code == 0);
  CHECK(fam.out.find("alphabets 9 9 5\n") != std::string::npos);
}

TEST_CASE("sweep prints one row per parameter") {
  auto r = run({"sweep", "qn", "--n", "4", "8"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("row=qn:4 gk_cond=0.500000000 formula=0.500000000") !=
        std::string::npos);
  CHECK(r.out.find("row=qn:8 gk_cond=0.333333333 formula=0.333333333") !=
        std::string::npos);
}

TEST_CASE("reproduce example1 is byte-stable and matches the table") {
  auto a = run({"reproduce", "example1"});
  auto b = run({"reproduce", "example1"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("row=p1 quantity=gk_cond value=0.000000000") !=
        std::string::npos);
  CHECK(a.out.find("row=p2 quantity=gk_cond value=0.500000000") !=
        std::string::npos);
  CHECK(a.out.find("row=p3 quantity=gk_cond value=1.000000000") !=
        std::string::npos);
  CHECK(a.out.find("row=p3 quantity=resolvability marginal=true "
                   "conditional=false") != std::string::npos);
  CHECK(a.out.find("row=p4 quantity=resolvability marginal=false "
                   "conditional=true") != std::string::npos);
  CHECK(a.out.find("row=p5 quantity=resolvability marginal=false "
                   "conditional=false") != std::string::npos);
}

TEST_CASE("json lines parse as json") {
  auto r = run({"--json-lines", "sweep", "qn", "--n", "4"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j.contains("gk_cond"));
    ++count;
  }
  CHECK(count == 1);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run({"compute", "--quantity", "nope", "--dist", "catalog:p3"}).code ==
        2);
  CHECK(run({"compute", "--dist", "catalog:p3"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"reproduce", "example9"}).code == 2);
}

TEST_CASE("domain errors exit with code 1") {
  CHECK(run({"compute", "--quantity", "gk", "--dist", "catalog:zzz"}).code ==
        1);
  CHECK(run({"compute", "--quantity", "gk", "--dist", "file:missing.tmp"})
            .code == 1);
  CHECK(run({"compute", "--quantity", "gk", "--dist", "p3"}).code == 1);
  CHECK(run({"compute", "--quantity", "gk", "--dist", "catalog:qn:2"}).code ==
        1);
}

TEST_CASE("help exits cleanly") {
  auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("compute") != std::string::npos);
}
