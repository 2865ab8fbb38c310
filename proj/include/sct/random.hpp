#pragma once

// Small deterministic PRNG (splitmix64) and samplers for random pmfs,
// channels and joint distributions. Everything here is reproducible from a
// 64-bit seed across platforms, which the restart and audit logic relies on.

#include <cmath>
#include <cstdint>

#include "sct/dist.hpp"

namespace sct {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = state;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // Uniform in (0, 1]; never returns 0 so -log is always finite.
  double uniform() {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

// Symmetric Dirichlet(1) sample: normalized Exp(1) draws.
inline void fill_dirichlet(Rng& rng, std::span<double> out) {
  double s = 0.0;
  for (double& v : out) {
    v = -std::log(rng.uniform());
    s += v;
  }
  for (double& v : out) v /= s;
}

inline Pmf random_pmf(Rng& rng, int dim) {
  Pmf v(dim);
  fill_dirichlet(rng, v);
  return v;
}

inline Channel random_channel(Rng& rng, int in, int out) {
  Channel c(in, out);
  for (int i = 0; i < in; ++i)
    fill_dirichlet(rng, std::span<double>(c.rows).subspan(
                            static_cast<std::size_t>(i) * out, out));
  return c;
}

inline std::vector<int> random_map(Rng& rng, int in, int out) {
  std::vector<int> m(in);
  for (int& v : m) v = rng.below(out);
  return m;
}

/*! \brief Random joint pmf; `zero_fraction` of cells are forced to zero. */
inline JointDist3 random_dist3(Rng& rng, int nx, int ny, int nz,
                               double zero_fraction = 0.0) {
  JointDist3 d(nx, ny, nz);
  fill_dirichlet(rng, d.p);
  if (zero_fraction > 0.0) {
    double s = 0.0;
    for (double& v : d.p)
      if (rng.uniform() < zero_fraction) v = 0.0; else s += v;
    if (s <= 0.0) {
      std::size_t keep = rng.next() % d.p.size();
      d.p[keep] = 1.0;
      s = 1.0;
    }
    for (double& v : d.p) v /= s;
  }
  return d;
}

inline JointDist2 random_dist2(Rng& rng, int nx, int ny,
                               double zero_fraction = 0.0) {
  JointDist2 d(nx, ny);
  fill_dirichlet(rng, d.p);
  if (zero_fraction > 0.0) {
    double s = 0.0;
    for (double& v : d.p)
      if (rng.uniform() < zero_fraction) v = 0.0; else s += v;
    if (s <= 0.0) {
      std::size_t keep = rng.next() % d.p.size();
      d.p[keep] = 1.0;
      s = 1.0;
    }
    for (double& v : d.p) v /= s;
  }
  return d;
}

}  // namespace sct
