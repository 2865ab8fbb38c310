#pragma once

// Ergodic decomposition of a bipartite joint pmf: connected components of
// the characteristic bipartite graph on supp(p_XY). The component label is
// the maximal random variable computable from X alone and from Y alone, so
// its entropy is the Gacs-Korner common information. The conditional
// variants and the double-Markov decomposition build on the same labels.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "sct/dist.hpp"

namespace sct {

struct NotDoubleMarkovError : Error { using Error::Error; };

struct ErgodicComponent {
  std::vector<int> x_symbols;
  std::vector<int> y_symbols;
  double mass = 0.0;
};

struct ErgodicDecomposition {
  std::vector<ErgodicComponent> components;
  std::vector<int> x_label;  // component id per x symbol, -1 off support
  std::vector<int> y_label;
  Pmf q_star;                // component masses, the pmf of the common part

  int size() const { return static_cast<int>(components.size()); }
};

/*! \brief Connected components of the support graph of a bipartite pmf.
 *
 * Components are ordered by their smallest x symbol. Entries at or below
 * `zero_eps` are treated as structural zeros; symbols with no support mass
 * get label -1.
 */
inline ErgodicDecomposition ergodic_decompose(const JointDist2& d,
                                              double zero_eps = kZeroEps) {
  const int n = d.nx + d.ny;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  std::vector<bool> seen(n, false);
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      if (d.at(x, y) > zero_eps) {
        seen[x] = seen[d.nx + y] = true;
        int a = find(x), b = find(d.nx + y);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }

  ErgodicDecomposition dec;
  dec.x_label.assign(d.nx, -1);
  dec.y_label.assign(d.ny, -1);
  std::vector<int> comp_of_root(n, -1);
  for (int x = 0; x < d.nx; ++x) {
    if (!seen[x]) continue;
    int r = find(x);
    if (comp_of_root[r] < 0) {
      comp_of_root[r] = dec.size();
      dec.components.emplace_back();
    }
    dec.x_label[x] = comp_of_root[r];
    dec.components[comp_of_root[r]].x_symbols.push_back(x);
  }
  for (int y = 0; y < d.ny; ++y) {
    if (!seen[d.nx + y]) continue;
    int c = comp_of_root[find(d.nx + y)];
    dec.y_label[y] = c;
    dec.components[c].y_symbols.push_back(y);
  }
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      if (d.at(x, y) > zero_eps)
        dec.components[dec.x_label[x]].mass += d.at(x, y);
  dec.q_star.resize(dec.size());
  for (int c = 0; c < dec.size(); ++c) dec.q_star[c] = dec.components[c].mass;
  return dec;
}

/*! \brief Gacs-Korner common information H(Q*) in bits. */
inline double gk_ci(const JointDist2& d, double zero_eps = kZeroEps) {
  return entropy(ergodic_decompose(d, zero_eps).q_star);
}

/*! \brief Conditional common information H(Q*|Z) with Q* taken from the
 * (X,Y) marginal, so the common part never depends on the eavesdropper. */
inline double gk_ci_conditional(const JointDist3& d,
                                double zero_eps = kZeroEps) {
  auto dec = ergodic_decompose(marginal_xy(d), zero_eps);
  if (dec.size() == 0) return 0.0;
  std::vector<double> pqz(static_cast<std::size_t>(dec.size()) * d.nz, 0.0);
  Pmf pz(d.nz, 0.0);
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      for (int z = 0; z < d.nz; ++z) {
        double v = d.at(x, y, z);
        if (v <= 0.0) continue;
        pz[z] += v;
        if (dec.x_label[x] >= 0)
          pqz[static_cast<std::size_t>(dec.x_label[x]) * d.nz + z] += v;
      }
  double h = entropy(pqz) - entropy(pz);
  return h < 0.0 ? 0.0 : h;
}

/*! \brief Per-realization variant: sum_z p(z) H(Q*_z) where Q*_z comes from
 * the conditional pmf given Z=z. Can exceed the marginal-based value when
 * conditioning splits components. */
inline double gk_ci_conditional_per_z(const JointDist3& d,
                                      double zero_eps = kZeroEps) {
  Pmf pz = marginal(d, Axis::Z);
  double total = 0.0;
  for (int z = 0; z < d.nz; ++z) {
    if (pz[z] <= zero_eps) continue;
    JointDist2 slice(d.nx, d.ny);
    for (int x = 0; x < d.nx; ++x)
      for (int y = 0; y < d.ny; ++y) slice.at(x, y) = d.at(x, y, z) / pz[z];
    total += pz[z] * gk_ci(slice, zero_eps);
  }
  return total;
}

struct ResolvabilityReport {
  bool resolvable = false;
  bool conditionally_resolvable = false;
  double residual_marginal = 0.0;     // I(X;Y|Q*)
  double residual_conditional = 0.0;  // I(X;Y|Z,Q*)
};

/*! \brief Whether the common part explains all dependence between X and Y,
 * marginally and conditioned on Z. Both residuals are computed by direct
 * summation with Q* adjoined as a function of X (equivalently of Y). */
inline ResolvabilityReport resolvability_flags(const JointDist3& d,
                                               double zero_eps = kZeroEps,
                                               double tol = 1e-9) {
  auto m = marginal_xy(d);
  auto dec = ergodic_decompose(m, zero_eps);
  Pmf px = marginal(m, Axis::X);
  Pmf py = marginal(m, Axis::Y);

  double rm = 0.0;
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y) {
      double j = m.at(x, y);
      if (j <= 0.0 || dec.x_label[x] < 0) continue;
      double mq = dec.q_star[dec.x_label[x]];
      rm += j * std::log2(j * mq / (px[x] * py[y]));
    }
  if (rm < 0.0) rm = 0.0;

  // I(X;Y|Z,Q*) = sum p(x,y,z) log [ p(x,y,z) m(z,q) / (p(x,z) p(y,z)) ]
  std::vector<double> pxz(static_cast<std::size_t>(d.nx) * d.nz, 0.0);
  std::vector<double> pyz(static_cast<std::size_t>(d.ny) * d.nz, 0.0);
  std::vector<double> pqz(static_cast<std::size_t>(std::max(dec.size(), 1)) *
                              d.nz, 0.0);
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      for (int z = 0; z < d.nz; ++z) {
        double v = d.at(x, y, z);
        if (v <= 0.0) continue;
        pxz[static_cast<std::size_t>(x) * d.nz + z] += v;
        pyz[static_cast<std::size_t>(y) * d.nz + z] += v;
        if (dec.x_label[x] >= 0)
          pqz[static_cast<std::size_t>(dec.x_label[x]) * d.nz + z] += v;
      }
  double rc = 0.0;
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      for (int z = 0; z < d.nz; ++z) {
        double v = d.at(x, y, z);
        if (v <= 0.0 || dec.x_label[x] < 0) continue;
        double mq = pqz[static_cast<std::size_t>(dec.x_label[x]) * d.nz + z];
        rc += v * std::log2(v * mq /
                            (pxz[static_cast<std::size_t>(x) * d.nz + z] *
                             pyz[static_cast<std::size_t>(y) * d.nz + z]));
      }
  if (rc < 0.0) rc = 0.0;

  ResolvabilityReport r;
  r.residual_marginal = rm;
  r.residual_conditional = rc;
  r.resolvable = rm <= tol;
  r.conditionally_resolvable = rc <= tol;
  return r;
}

struct DoubleMarkovDecomposition {
  ErgodicDecomposition decomposition;  // of the (X,Y) marginal; labels = Q'
  double residual_markov_x = 0.0;      // I(X;Q|Y), must be ~0 on input
  double residual_markov_y = 0.0;      // I(Y;Q|X)
  double entropy_qprime = 0.0;         // H(Q')
  double mi_pair_q = 0.0;              // I(XY;Q)
  double mi_pair_q_given_qprime = 0.0; // I(XY;Q|Q'), ~0 by construction
  double entropy_qprime_given_q = 0.0; // H(Q'|Q), 0 iff Q determines Q'
};

/*! \brief Extracts the deterministic sufficient statistic behind a doubly
 * Markov triple (X - Y - Q and Y - X - Q, with Q on the third axis).
 *
 * The returned labels define Q' = f(X) = g(Y) with I(XY;Q|Q') = 0 and
 * I(XY;Q) <= H(Q'). Throws NotDoubleMarkovError when either Markov
 * residual exceeds `tol`.
 */
inline DoubleMarkovDecomposition double_markov_decompose(
    const JointDist3& xyq, double tol = 1e-9, double zero_eps = kZeroEps) {
  DoubleMarkovDecomposition out;
  out.residual_markov_x = mutual_information(xyq, Axis::X, Axis::Z, Axis::Y);
  out.residual_markov_y = mutual_information(xyq, Axis::Y, Axis::Z, Axis::X);
  if (out.residual_markov_x > tol || out.residual_markov_y > tol)
    throw NotDoubleMarkovError(
        "double_markov_decompose: Markov residuals " +
        std::to_string(out.residual_markov_x) + ", " +
        std::to_string(out.residual_markov_y) + " exceed tolerance");

  auto m = marginal_xy(xyq);
  out.decomposition = ergodic_decompose(m, zero_eps);
  out.entropy_qprime = entropy(out.decomposition.q_star);

  const int nq = xyq.nz;
  const int ncomp = std::max(out.decomposition.size(), 1);
  Pmf pq = marginal(xyq, Axis::Z);
  std::vector<double> pqq(static_cast<std::size_t>(ncomp) * nq, 0.0);
  for (int x = 0; x < xyq.nx; ++x)
    for (int y = 0; y < xyq.ny; ++y)
      for (int q = 0; q < nq; ++q) {
        double v = xyq.at(x, y, q);
        if (v <= 0.0 || out.decomposition.x_label[x] < 0) continue;
        pqq[static_cast<std::size_t>(out.decomposition.x_label[x]) * nq + q] +=
            v;
      }
  double h_xy = entropy(m.p);
  double h_q = entropy(pq);
  double h_xyq = entropy(xyq.p);
  double h_qq = entropy(pqq);
  out.mi_pair_q = std::max(0.0, h_xy + h_q - h_xyq);
  out.mi_pair_q_given_qprime =
      std::max(0.0, h_xy + h_qq - out.entropy_qprime - h_xyq);
  out.entropy_qprime_given_q = std::max(0.0, h_qq - h_q);
  return out;
}

}  // namespace sct
