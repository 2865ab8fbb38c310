#pragma once

// Built-in distribution catalog: the fixed worked examples p1..p5, the
// parametric families pn and qn, a perfect shared secret bit, and seeded
// random full-support distributions. Rational catalogs are summed exactly
// over a common denominator before conversion to double, so a typo in a
// table is caught at construction time rather than by the normalization
// tolerance.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "sct/dist.hpp"
#include "sct/random.hpp"

namespace sct {

class UnknownNameError : public Error {
 public:
  using Error::Error;
};

class BadParamError : public Error {
 public:
  using Error::Error;
};

namespace detail {

struct RationalEntry {
  int x, y, z;
  long long num, den;
};

inline JointDist3 from_rational(int nx, int ny, int nz,
                                const std::vector<RationalEntry>& entries) {
  JointDist3 d(nx, ny, nz);
  long long snum = 0, sden = 1;
  for (const auto& e : entries) {
    if (e.den <= 0 || e.num < 0)
      throw BadParamError("catalog entry is not a non-negative rational");
    long long g = std::gcd(sden, e.den);
    long long l = sden / g * e.den;
    snum = snum * (l / sden) + e.num * (l / e.den);
    sden = l;
    long long gg = std::gcd(snum, sden);
    if (gg > 1) {
      snum /= gg;
      sden /= gg;
    }
    double& cell = d.at(e.x, e.y, e.z);
    if (cell != 0.0) throw BadParamError("catalog entry repeated");
    cell = static_cast<double>(e.num) / static_cast<double>(e.den);
  }
  if (snum != sden)
    throw BadParamError("catalog masses do not sum to one exactly");
  return validate(std::move(d));
}

}  // namespace detail

/*! \brief Four-symbol pair: a uniform 2x2 block whose parity Z observes,
 * plus two diagonal symbols Z sees directly. No marginal common part. */
inline JointDist3 catalog_p1() {
  return detail::from_rational(4, 4, 4,
                               {{0, 0, 0, 1, 8},
                                {0, 1, 1, 1, 8},
                                {1, 0, 1, 1, 8},
                                {1, 1, 0, 1, 8},
                                {2, 2, 2, 1, 4},
                                {3, 3, 3, 1, 4}});
}

/*! \brief Like p1 but Z cannot tell the two diagonal symbols apart. */
inline JointDist3 catalog_p2() {
  return detail::from_rational(4, 4, 3,
                               {{0, 0, 0, 1, 8},
                                {0, 1, 1, 1, 8},
                                {1, 0, 1, 1, 8},
                                {1, 1, 0, 1, 8},
                                {2, 2, 2, 1, 4},
                                {3, 3, 2, 1, 4}});
}

/*! \brief Like p1 but Z's symbols for the diagonals collide with the
 * parity symbols, so Z learns nothing about which case occurred. */
inline JointDist3 catalog_p3() {
  return detail::from_rational(4, 4, 2,
                               {{0, 0, 0, 1, 8},
                                {0, 1, 1, 1, 8},
                                {1, 0, 1, 1, 8},
                                {1, 1, 0, 1, 8},
                                {2, 2, 0, 1, 4},
                                {3, 3, 1, 1, 4}});
}

/*! \brief Pair that is conditionally resolvable for every Z symbol yet has
 * no marginal decomposition into independent blocks. */
inline JointDist3 catalog_p4() {
  return detail::from_rational(3, 6, 3,
                               {{0, 0, 0, 1, 18},
                                {1, 0, 0, 1, 18},
                                {0, 1, 0, 1, 18},
                                {1, 1, 0, 1, 18},
                                {0, 0, 1, 1, 21},
                                {1, 0, 1, 1, 21},
                                {0, 1, 1, 1, 21},
                                {1, 1, 1, 1, 21},
                                {0, 3, 2, 1, 15},
                                {0, 4, 2, 1, 15},
                                {2, 5, 2, 1, 5},
                                {2, 2, 0, 1, 9},
                                {2, 2, 1, 1, 7}});
}

/*! \brief Pair resolvable in neither the marginal nor the conditional
 * sense. */
inline JointDist3 catalog_p5() {
  return detail::from_rational(4, 4, 2,
                               {{0, 0, 0, 1, 10},
                                {0, 1, 1, 1, 10},
                                {0, 2, 0, 1, 10},
                                {1, 0, 1, 1, 10},
                                {1, 1, 0, 1, 20},
                                {1, 2, 1, 1, 20},
                                {2, 3, 0, 1, 4},
                                {3, 3, 1, 1, 4}});
}

/*! \brief Family over X,Y in {0..2n-1}, Z in {0..n-1}: a uniform n x n
 * block whose modular sum Z observes, mixed with n perfectly correlated
 * diagonal symbols whose residue Z observes. Requires n >= 2. */
inline JointDist3 catalog_pn(int n) {
  if (n < 2) throw BadParamError("pn requires n >= 2");
  std::vector<detail::RationalEntry> entries;
  entries.reserve(static_cast<std::size_t>(n) * n + n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      entries.push_back({x, y, (x + y) % n, 1, 2LL * n * n});
  for (int x = n; x < 2 * n; ++x)
    entries.push_back({x, x, x % n, 1, 2LL * n});
  return detail::from_rational(2 * n, 2 * n, n, entries);
}

/*! \brief The pn family scaled by 1/log2(n) and mixed with a shared
 * absorbing symbol of mass 1 - 1/log2(n) that Z recognizes. The scaled
 * conditional common part has entropy exactly 1/log2(n). Requires
 * n >= 3 so the absorbing mass is positive. */
inline JointDist3 catalog_qn(int n) {
  if (n < 3) throw BadParamError("qn requires n >= 3");
  const double s = 1.0 / std::log2(static_cast<double>(n));
  JointDist3 d(2 * n + 1, 2 * n + 1, n + 1);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      d.at(x, y, (x + y) % n) = s / (2.0 * n * n);
  for (int x = n; x < 2 * n; ++x) d.at(x, x, x % n) = s / (2.0 * n);
  d.at(2 * n, 2 * n, n) = 1.0 - s;
  double total = d.sum();
  for (double& v : d.p) v /= total;
  for (int ax = 0; ax < 2; ++ax) {
    d.labels[ax].resize(2 * n + 1);
    for (int i = 0; i < 2 * n; ++i) d.labels[ax][i] = std::to_string(i);
    d.labels[ax][2 * n] = "delta";
  }
  d.labels[2].resize(n + 1);
  for (int z = 0; z < n; ++z) d.labels[2][z] = std::to_string(z);
  d.labels[2][n] = "delta";
  return validate(std::move(d));
}

/*! \brief One perfectly shared uniform secret bit; Z sees a constant. */
inline JointDist3 catalog_psecret() {
  JointDist3 d = detail::from_rational(2, 2, 1, {{0, 0, 0, 1, 2},
                                                 {1, 1, 0, 1, 2}});
  d.labels[2] = {"delta"};
  return d;
}

/*! \brief Seeded random full-support 3x3x3 distribution. */
inline JointDist3 catalog_random(int seed) {
  Rng rng(mix64(0x52414e440ull + static_cast<std::uint64_t>(seed)));
  return random_dist3(rng, 3, 3, 3);
}

struct CatalogInfo {
  std::string name;
  bool parametric = false;
  std::string shape;  // axis sizes, with n symbolic for families
  std::string summary;
};

inline std::vector<CatalogInfo> catalog_list() {
  return {
      {"p1", false, "4x4x4",
       "uniform parity block plus two diagonals, all visible to Z"},
      {"p2", false, "4x4x3", "parity block; Z cannot separate the diagonals"},
      {"p3", false, "4x4x2",
       "parity block; diagonal symbols reuse Z's parity alphabet"},
      {"p4", false, "3x6x3",
       "conditionally resolvable for each Z symbol, not marginally"},
      {"p5", false, "4x4x2", "resolvable in neither sense"},
      {"pn", true, "2nx2nxn",
       "uniform modular block mixed with n correlated diagonals (n >= 2)"},
      {"qn", true, "(2n+1)x(2n+1)x(n+1)",
       "pn scaled by 1/log2(n) plus a shared absorbing symbol (n >= 3)"},
      {"psecret", false, "2x2x1", "one perfect shared secret bit"},
      {"random", true, "3x3x3", "seeded random full-support distribution"},
  };
}

/*! \brief Look up a catalog distribution; families take their parameter
 * (or seed, for `random`) in `n`. */
inline JointDist3 catalog_dist(const std::string& name, int n = -1) {
  if (name == "p1") return catalog_p1();
  if (name == "p2") return catalog_p2();
  if (name == "p3") return catalog_p3();
  if (name == "p4") return catalog_p4();
  if (name == "p5") return catalog_p5();
  if (name == "psecret") return catalog_psecret();
  if (name == "pn") {
    if (n < 0) throw BadParamError("pn requires a parameter, e.g. pn:4");
    return catalog_pn(n);
  }
  if (name == "qn") {
    if (n < 0) throw BadParamError("qn requires a parameter, e.g. qn:4");
    return catalog_qn(n);
  }
  if (name == "random") return catalog_random(n < 0 ? 1 : n);
  throw UnknownNameError("unknown catalog name: " + name);
}

}  // namespace sct
