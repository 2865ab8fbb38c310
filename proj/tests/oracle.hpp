#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is written the slow, obvious way on purpose: entropies
// from scratch with natural logs, connectivity by Warshall closure
// instead of union-find, and conditional mutual information from the
// four-entropy identity.

#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include "sct/dist.hpp"

namespace oracle {

inline double entropy_nat(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h / std::log(2.0);
}

inline double joint_entropy3(const sct::JointDist3& d) {
  return entropy_nat(d.p);
}

inline double cmi_xy_given_z(const sct::JointDist3& d) {
  std::vector<double> pxz(static_cast<std::size_t>(d.nx) * d.nz, 0.0);
  std::vector<double> pyz(static_cast<std::size_t>(d.ny) * d.nz, 0.0);
  std::vector<double> pz(d.nz, 0.0);
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      for (int z = 0; z < d.nz; ++z) {
        double v = d.at(x, y, z);
        pxz[static_cast<std::size_t>(x) * d.nz + z] += v;
        pyz[static_cast<std::size_t>(y) * d.nz + z] += v;
        pz[z] += v;
      }
  return entropy_nat(pxz) + entropy_nat(pyz) - entropy_nat(pz) -
         joint_entropy3(d);
}

inline double mi_pair(const sct::JointDist2& d) {
  std::vector<double> px(d.nx, 0.0), py(d.ny, 0.0);
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y) {
      px[x] += d.at(x, y);
      py[y] += d.at(x, y);
    }
  return entropy_nat(px) + entropy_nat(py) - entropy_nat(d.p);
}

// Connected components of the support bipartite graph by Warshall
// closure; returns per-x labels (-1 for x off support) numbered in order
// of smallest member x, plus the component masses in that order.
struct Components {
  std::vector<int> x_label;
  std::vector<double> mass;
};

inline Components components(const sct::JointDist2& d, double eps = 1e-12) {
  int n = d.nx + d.ny;
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) adj[i][i] = 1;
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      if (d.at(x, y) > eps) adj[x][d.nx + y] = adj[d.nx + y][x] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (adj[i][k] && adj[k][j]) adj[i][j] = 1;
  std::vector<char> on_support(d.nx, 0);
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      if (d.at(x, y) > eps) on_support[x] = 1;
  Components out;
  out.x_label.assign(d.nx, -1);
  for (int x = 0; x < d.nx; ++x) {
    if (!on_support[x] || out.x_label[x] >= 0) continue;
    int label = static_cast<int>(out.mass.size());
    double m = 0.0;
    for (int x2 = x; x2 < d.nx; ++x2)
      if (on_support[x2] && adj[x][x2]) {
        out.x_label[x2] = label;
        for (int y = 0; y < d.ny; ++y)
          if (d.at(x2, y) > eps) m += d.at(x2, y);
      }
    out.mass.push_back(m);
  }
  return out;
}

inline double gk_from_closure(const sct::JointDist2& d) {
  return entropy_nat(components(d).mass);
}

}  // namespace oracle
