#pragma once

// Optimization-defined secrecy measures on tripartite distributions:
// relaxed common information (minimal shared-randomness rate) in marginal
// and conditional form, intrinsic conditional mutual information over
// degradings of the eavesdropper's variable, and their nested combination,
// which equals the secret-key cost of forming the distribution. Also the
// equality certificate relating the nested measure to the intrinsic value,
// and a combined bounds report.
//
// Every objective is expressed through the joint weight array w induced by
// the optimization variables, with all marginals computed as literal sums
// of w. In that form the partial derivative of each term of sum(w log w/..)
// is a pure log-ratio (the +-1 terms cancel), which keeps the analytic
// gradients valid even slightly off the simplex, where finite-difference
// checks evaluate them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sct/dist.hpp"
#include "sct/ergodic.hpp"
#include "sct/random.hpp"
#include "sct/simplex_optim.hpp"

namespace sct {

enum class Quantity {
  gk,
  gk_cond,
  gk_cond_perz,
  wyner,
  wyner_cond,
  intrinsic,
  wyner_intrinsic,
  sk_cost,
};

inline const char* quantity_key(Quantity q) {
  switch (q) {
    case Quantity::gk: return "gk";
    case Quantity::gk_cond: return "gk_cond";
    case Quantity::gk_cond_perz: return "gk_cond_perz";
    case Quantity::wyner: return "wyner";
    case Quantity::wyner_cond: return "wyner_cond";
    case Quantity::intrinsic: return "intrinsic";
    case Quantity::wyner_intrinsic: return "wyner_intrinsic";
    default: return "sk_cost";
  }
}

struct MeasureResult {
  Quantity quantity = Quantity::gk;
  double value = 0.0;
  bool certified_exact = false;  // combinatorial / closed form, not a bound
  std::optional<Channel> witness_channel;  // degrading p(zbar|z) when used
  std::optional<Channel> witness_q;  // conditional pmf of Q per (x,y,zbar)
  double feasibility_residual = 0.0;
  int restarts_used = 0;
  bool converged = true;
};

struct MeasureOptions {
  int restarts = 64;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  int max_iters = 400;
  int q_cardinality = 0;   // 0 means |X||Y|
  int inner_restarts = 0;  // 0 means restarts/8, floor 2
  bool joint_mode = false; // optimize channel and Q in one parametrization
  std::vector<Channel> extra_channels;  // extra degrading warm starts
  std::vector<Channel> extra_q;         // extra Q-row warm starts
};

namespace detail {

inline double clog2(double v) { return std::log2(std::max(v, 1e-300)); }

// min over p(q|x,y,z) of I(XY;Q|Z), penalized by I(X;Y|QZ).
// Cells are flattened (x*ny + y)*nz + z; the variable block has one
// simplex row of dimension nq per cell.
struct WynerCondProblem {
  int nx = 0, ny = 0, nz = 0, nq = 0;
  std::vector<double> base;  // p(x,y,z)

  int cells() const { return nx * ny * nz; }

  SimplexProductSpec spec() const { return {{{cells(), nq}}}; }

  double objective(const BlockValues& rv, BlockValues* grad) const {
    const std::vector<double>& r = rv[0];
    const int nc = cells();
    std::vector<double> wz(nz, 0.0), wq(static_cast<std::size_t>(nz) * nq, 0.0);
    std::vector<double> wxy(nc, 0.0);
    for (int c = 0; c < nc; ++c) {
      double b = base[c];
      if (b == 0.0) continue;
      int zb = c % nz;
      for (int q = 0; q < nq; ++q) {
        double w = b * r[static_cast<std::size_t>(c) * nq + q];
        wxy[c] += w;
        wz[zb] += w;
        wq[static_cast<std::size_t>(zb) * nq + q] += w;
      }
    }
    std::vector<double> lz(nz), lq(static_cast<std::size_t>(nz) * nq), lxy(nc);
    for (int zb = 0; zb < nz; ++zb) lz[zb] = clog2(wz[zb]);
    for (std::size_t i = 0; i < lq.size(); ++i) lq[i] = clog2(wq[i]);
    for (int c = 0; c < nc; ++c) lxy[c] = clog2(wxy[c]);
    double val = 0.0;
    if (grad) std::fill((*grad)[0].begin(), (*grad)[0].end(), 0.0);
    for (int c = 0; c < nc; ++c) {
      double b = base[c];
      if (b == 0.0) continue;
      int zb = c % nz;
      for (int q = 0; q < nq; ++q) {
        double w = b * r[static_cast<std::size_t>(c) * nq + q];
        double lr = clog2(w) + lz[zb] - lxy[c] -
                    lq[static_cast<std::size_t>(zb) * nq + q];
        if (w > 0.0) val += w * lr;
        if (grad) (*grad)[0][static_cast<std::size_t>(c) * nq + q] = b * lr;
      }
    }
    return val;
  }

  double constraint(const BlockValues& rv, BlockValues* grad) const {
    const std::vector<double>& r = rv[0];
    const int nc = cells();
    std::vector<double> wq(static_cast<std::size_t>(nz) * nq, 0.0);
    std::vector<double> u(static_cast<std::size_t>(nx) * nz * nq, 0.0);
    std::vector<double> v(static_cast<std::size_t>(ny) * nz * nq, 0.0);
    for (int c = 0; c < nc; ++c) {
      double b = base[c];
      if (b == 0.0) continue;
      int zb = c % nz;
      int x = c / (ny * nz);
      int y = (c / nz) % ny;
      for (int q = 0; q < nq; ++q) {
        double w = b * r[static_cast<std::size_t>(c) * nq + q];
        wq[static_cast<std::size_t>(zb) * nq + q] += w;
        u[(static_cast<std::size_t>(x) * nz + zb) * nq + q] += w;
        v[(static_cast<std::size_t>(y) * nz + zb) * nq + q] += w;
      }
    }
    std::vector<double> lw(wq.size()), lu(u.size()), lv(v.size());
    for (std::size_t i = 0; i < wq.size(); ++i) lw[i] = clog2(wq[i]);
    for (std::size_t i = 0; i < u.size(); ++i) lu[i] = clog2(u[i]);
    for (std::size_t i = 0; i < v.size(); ++i) lv[i] = clog2(v[i]);
    double val = 0.0;
    if (grad) std::fill((*grad)[0].begin(), (*grad)[0].end(), 0.0);
    for (int c = 0; c < nc; ++c) {
      double b = base[c];
      if (b == 0.0) continue;
      int zb = c % nz;
      int x = c / (ny * nz);
      int y = (c / nz) % ny;
      for (int q = 0; q < nq; ++q) {
        double w = b * r[static_cast<std::size_t>(c) * nq + q];
        double lr = clog2(w) + lw[static_cast<std::size_t>(zb) * nq + q] -
                    lu[(static_cast<std::size_t>(x) * nz + zb) * nq + q] -
                    lv[(static_cast<std::size_t>(y) * nz + zb) * nq + q];
        if (w > 0.0) val += w * lr;
        if (grad) (*grad)[0][static_cast<std::size_t>(c) * nq + q] = b * lr;
      }
    }
    return val < 0.0 && val > -1e-12 ? 0.0 : val;
  }
};

// min over channels p(zbar|z) of I(X;Y|Zbar). One simplex row per z.
struct ChannelProblem {
  int nx = 0, ny = 0, nz = 0, nzb = 0;
  std::vector<double> base;  // p(x,y,z)

  SimplexProductSpec spec() const { return {{{nz, nzb}}}; }

  double objective(const BlockValues& cv, BlockValues* grad) const {
    const std::vector<double>& c = cv[0];
    const int pairs = nx * ny;
    std::vector<double> w(static_cast<std::size_t>(pairs) * nzb, 0.0);
    for (int p = 0; p < pairs; ++p)
      for (int z = 0; z < nz; ++z) {
        double b = base[static_cast<std::size_t>(p) * nz + z];
        if (b == 0.0) continue;
        for (int zb = 0; zb < nzb; ++zb)
          w[static_cast<std::size_t>(p) * nzb + zb] +=
              b * c[static_cast<std::size_t>(z) * nzb + zb];
      }
    std::vector<double> a(static_cast<std::size_t>(nx) * nzb, 0.0);
    std::vector<double> bm(static_cast<std::size_t>(ny) * nzb, 0.0);
    std::vector<double> wz(nzb, 0.0);
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < ny; ++y)
        for (int zb = 0; zb < nzb; ++zb) {
          double ww = w[(static_cast<std::size_t>(x) * ny + y) * nzb + zb];
          a[static_cast<std::size_t>(x) * nzb + zb] += ww;
          bm[static_cast<std::size_t>(y) * nzb + zb] += ww;
          wz[zb] += ww;
        }
    std::vector<double> la(a.size()), lb(bm.size()), lz(nzb);
    for (std::size_t i = 0; i < a.size(); ++i) la[i] = clog2(a[i]);
    for (std::size_t i = 0; i < bm.size(); ++i) lb[i] = clog2(bm[i]);
    for (int zb = 0; zb < nzb; ++zb) lz[zb] = clog2(wz[zb]);
    double val = 0.0;
    std::vector<double> lr(w.size());
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < ny; ++y)
        for (int zb = 0; zb < nzb; ++zb) {
          std::size_t i = (static_cast<std::size_t>(x) * ny + y) * nzb + zb;
          lr[i] = clog2(w[i]) + lz[zb] - la[static_cast<std::size_t>(x) * nzb + zb] -
                  lb[static_cast<std::size_t>(y) * nzb + zb];
          if (w[i] > 0.0) val += w[i] * lr[i];
        }
    if (grad) {
      std::fill((*grad)[0].begin(), (*grad)[0].end(), 0.0);
      for (int p = 0; p < pairs; ++p)
        for (int z = 0; z < nz; ++z) {
          double b = base[static_cast<std::size_t>(p) * nz + z];
          if (b == 0.0) continue;
          for (int zb = 0; zb < nzb; ++zb)
            (*grad)[0][static_cast<std::size_t>(z) * nzb + zb] +=
                b * lr[static_cast<std::size_t>(p) * nzb + zb];
        }
    }
    return val;
  }
};

// Joint parametrization of the nested problem: block 0 is the degrading
// channel p(zbar|z), block 1 holds p(q|x,y,zbar) rows.
struct ChannelWynerProblem {
  int nx = 0, ny = 0, nz = 0, nzb = 0, nq = 0;
  std::vector<double> base;  // p(x,y,z)

  int cells() const { return nx * ny * nzb; }

  SimplexProductSpec spec() const { return {{{nz, nzb}, {cells(), nq}}}; }

  // Degraded pair weights t(x,y,zbar) for the current channel block.
  std::vector<double> degraded(const std::vector<double>& c) const {
    const int pairs = nx * ny;
    std::vector<double> t(static_cast<std::size_t>(pairs) * nzb, 0.0);
    for (int p = 0; p < pairs; ++p)
      for (int z = 0; z < nz; ++z) {
        double b = base[static_cast<std::size_t>(p) * nz + z];
        if (b == 0.0) continue;
        for (int zb = 0; zb < nzb; ++zb)
          t[static_cast<std::size_t>(p) * nzb + zb] +=
              b * c[static_cast<std::size_t>(z) * nzb + zb];
      }
    return t;
  }

  double objective(const BlockValues& xv, BlockValues* grad) const {
    const std::vector<double>& c = xv[0];
    const std::vector<double>& r = xv[1];
    const int nc = cells();
    std::vector<double> t = degraded(c);
    std::vector<double> tt(nc, 0.0);  // sum_q w, the balanced pair marginal
    std::vector<double> m(static_cast<std::size_t>(nzb) * nq, 0.0);
    std::vector<double> wz(nzb, 0.0);
    for (int cell = 0; cell < nc; ++cell) {
      double tc = t[cell];
      if (tc == 0.0) continue;
      int zb = cell % nzb;
      for (int q = 0; q < nq; ++q) {
        double w = tc * r[static_cast<std::size_t>(cell) * nq + q];
        tt[cell] += w;
        m[static_cast<std::size_t>(zb) * nq + q] += w;
        wz[zb] += w;
      }
    }
    std::vector<double> lt(nc), lm(m.size()), lz(nzb);
    for (int cell = 0; cell < nc; ++cell) lt[cell] = clog2(tt[cell]);
    for (std::size_t i = 0; i < m.size(); ++i) lm[i] = clog2(m[i]);
    for (int zb = 0; zb < nzb; ++zb) lz[zb] = clog2(wz[zb]);
    double val = 0.0;
    std::vector<double> srl(grad ? nc : 0, 0.0);  // sum_q r*logratio per cell
    if (grad) {
      std::fill((*grad)[0].begin(), (*grad)[0].end(), 0.0);
      std::fill((*grad)[1].begin(), (*grad)[1].end(), 0.0);
    }
    for (int cell = 0; cell < nc; ++cell) {
      double tc = t[cell];
      int zb = cell % nzb;
      for (int q = 0; q < nq; ++q) {
        double rq = r[static_cast<std::size_t>(cell) * nq + q];
        double w = tc * rq;
        double lr = clog2(w) + lz[zb] - lt[cell] -
                    lm[static_cast<std::size_t>(zb) * nq + q];
        if (w > 0.0) val += w * lr;
        if (grad) {
          (*grad)[1][static_cast<std::size_t>(cell) * nq + q] = tc * lr;
          srl[cell] += rq * lr;
        }
      }
    }
    if (grad) {
      for (int p = 0; p < nx * ny; ++p)
        for (int z = 0; z < nz; ++z) {
          double b = base[static_cast<std::size_t>(p) * nz + z];
          if (b == 0.0) continue;
          for (int zb = 0; zb < nzb; ++zb)
            (*grad)[0][static_cast<std::size_t>(z) * nzb + zb] +=
                b * srl[static_cast<std::size_t>(p) * nzb + zb];
        }
    }
    return val;
  }

  double constraint(const BlockValues& xv, BlockValues* grad) const {
    const std::vector<double>& c = xv[0];
    const std::vector<double>& r = xv[1];
    const int nc = cells();
    std::vector<double> t = degraded(c);
    std::vector<double> m(static_cast<std::size_t>(nzb) * nq, 0.0);
    std::vector<double> u(static_cast<std::size_t>(nx) * nzb * nq, 0.0);
    std::vector<double> v(static_cast<std::size_t>(ny) * nzb * nq, 0.0);
    for (int cell = 0; cell < nc; ++cell) {
      double tc = t[cell];
      if (tc == 0.0) continue;
      int zb = cell % nzb;
      int x = cell / (ny * nzb);
      int y = (cell / nzb) % ny;
      for (int q = 0; q < nq; ++q) {
        double w = tc * r[static_cast<std::size_t>(cell) * nq + q];
        m[static_cast<std::size_t>(zb) * nq + q] += w;
        u[(static_cast<std::size_t>(x) * nzb + zb) * nq + q] += w;
        v[(static_cast<std::size_t>(y) * nzb + zb) * nq + q] += w;
      }
    }
    std::vector<double> lm(m.size()), lu(u.size()), lv(v.size());
    for (std::size_t i = 0; i < m.size(); ++i) lm[i] = clog2(m[i]);
    for (std::size_t i = 0; i < u.size(); ++i) lu[i] = clog2(u[i]);
    for (std::size_t i = 0; i < v.size(); ++i) lv[i] = clog2(v[i]);
    double val = 0.0;
    std::vector<double> srl(grad ? nc : 0, 0.0);
    if (grad) {
      std::fill((*grad)[0].begin(), (*grad)[0].end(), 0.0);
      std::fill((*grad)[1].begin(), (*grad)[1].end(), 0.0);
    }
    for (int cell = 0; cell < nc; ++cell) {
      double tc = t[cell];
      int zb = cell % nzb;
      int x = cell / (ny * nzb);
      int y = (cell / nzb) % ny;
      for (int q = 0; q < nq; ++q) {
        double rq = r[static_cast<std::size_t>(cell) * nq + q];
        double w = tc * rq;
        double lr = clog2(w) + lm[static_cast<std::size_t>(zb) * nq + q] -
                    lu[(static_cast<std::size_t>(x) * nzb + zb) * nq + q] -
                    lv[(static_cast<std::size_t>(y) * nzb + zb) * nq + q];
        if (w > 0.0) val += w * lr;
        if (grad) {
          (*grad)[1][static_cast<std::size_t>(cell) * nq + q] = tc * lr;
          srl[cell] += rq * lr;
        }
      }
    }
    if (grad) {
      for (int p = 0; p < nx * ny; ++p)
        for (int z = 0; z < nz; ++z) {
          double b = base[static_cast<std::size_t>(p) * nz + z];
          if (b == 0.0) continue;
          for (int zb = 0; zb < nzb; ++zb)
            (*grad)[0][static_cast<std::size_t>(z) * nzb + zb] +=
                b * srl[static_cast<std::size_t>(p) * nzb + zb];
        }
    }
    return val < 0.0 && val > -1e-12 ? 0.0 : val;
  }
};

// One-hot start where cell i picks symbol label[i] (clamped into range).
inline BlockValues labeling_start(int rows, int dim,
                                  const std::vector<int>& label) {
  BlockValues v{std::vector<double>(static_cast<std::size_t>(rows) * dim, 0.0)};
  for (int i = 0; i < rows; ++i) {
    int q = label[i];
    if (q < 0 || q >= dim) q = 0;
    v[0][static_cast<std::size_t>(i) * dim + q] = 1.0;
  }
  return v;
}

// Component label of each (x,y,z) cell from the per-z ergodic
// decompositions; cells off the slice support get 0.
inline std::vector<int> perz_component_labels(const JointDist3& d) {
  std::vector<int> lab(d.size(), 0);
  Pmf pz = marginal(d, Axis::Z);
  for (int z = 0; z < d.nz; ++z) {
    if (pz[z] <= kZeroEps) continue;
    JointDist2 slice(d.nx, d.ny);
    for (int x = 0; x < d.nx; ++x)
      for (int y = 0; y < d.ny; ++y) slice.at(x, y) = d.at(x, y, z) / pz[z];
    auto dec = ergodic_decompose(slice);
    for (int x = 0; x < d.nx; ++x) {
      int l = dec.x_label[x];
      if (l < 0) l = 0;
      for (int y = 0; y < d.ny; ++y) lab[d.index(x, y, z)] = l;
    }
  }
  return lab;
}

inline std::vector<int> marginal_component_labels(const JointDist3& d) {
  auto dec = ergodic_decompose(marginal_xy(d));
  std::vector<int> lab(d.size(), 0);
  for (int x = 0; x < d.nx; ++x) {
    int l = dec.x_label[x];
    if (l < 0) l = 0;
    for (int y = 0; y < d.ny; ++y)
      for (int z = 0; z < d.nz; ++z) lab[d.index(x, y, z)] = l;
  }
  return lab;
}

inline MeasureResult exact_zero_result(Quantity q, int nz) {
  MeasureResult r;
  r.quantity = q;
  r.value = 0.0;
  r.certified_exact = true;
  r.witness_channel = Channel::identity(std::max(nz, 1));
  return r;
}

inline MinimizeOptions to_minimize_options(const MeasureOptions& o) {
  MinimizeOptions mo;
  mo.restarts = o.restarts;
  mo.seed = o.seed;
  mo.feas_tol = o.tol;
  mo.max_iters = o.max_iters;
  return mo;
}

}  // namespace detail

/*! \brief Conditional relaxed common information: min of I(XY;Q|Z) over
 * p(q|x,y,z) subject to I(X;Y|QZ)=0, via penalized multi-start descent.
 * Upper-bound semantics; canonical starts include the constant Q, a cell
 * labeling, and the marginal and per-z ergodic component labelings.
 */
inline MeasureResult wyner_ci_conditional(const JointDist3& d,
                                          const MeasureOptions& opts = {}) {
  if (d.nx == 1 || d.ny == 1) {
    auto r = detail::exact_zero_result(Quantity::wyner_cond, d.nz);
    r.witness_q = Channel::constant(d.nx * d.ny * d.nz, 1);
    return r;
  }
  detail::WynerCondProblem prob;
  prob.nx = d.nx;
  prob.ny = d.ny;
  prob.nz = d.nz;
  prob.nq = opts.q_cardinality > 0 ? opts.q_cardinality : d.nx * d.ny;
  prob.base = d.p;
  const int nc = prob.cells();

  auto mo = detail::to_minimize_options(opts);
  std::vector<int> constant(nc, 0), cell_lab(nc);
  for (int c = 0; c < nc; ++c) cell_lab[c] = (c / d.nz) % prob.nq;
  mo.warm_starts.push_back(detail::labeling_start(nc, prob.nq, constant));
  mo.warm_starts.push_back(detail::labeling_start(nc, prob.nq, cell_lab));
  mo.warm_starts.push_back(detail::labeling_start(
      nc, prob.nq, detail::marginal_component_labels(d)));
  mo.warm_starts.push_back(detail::labeling_start(
      nc, prob.nq, detail::perz_component_labels(d)));
  for (const Channel& ch : opts.extra_q)
    if (ch.in_size == nc && ch.out_size == prob.nq)
      mo.warm_starts.push_back(BlockValues{ch.rows});

  auto res = minimize_with_penalty(
      prob.spec(),
      [&prob](const BlockValues& x, BlockValues* g) {
        return prob.objective(x, g);
      },
      [&prob](const BlockValues& x, BlockValues* g) {
        return prob.constraint(x, g);
      },
      mo);

  MeasureResult out;
  out.quantity = Quantity::wyner_cond;
  out.value = std::max(res.value, 0.0);
  out.certified_exact = false;
  Channel wq(nc, prob.nq);
  wq.rows = res.params[0];
  out.witness_q = std::move(wq);
  out.feasibility_residual = res.feasibility_residual;
  out.restarts_used = res.restarts_used;
  out.converged = res.converged;
  return out;
}

/*! \brief Relaxed common information of a bipartite pmf: min of I(XY;Q)
 * subject to X-Q-Y, with |Q| <= |X||Y| by default. */
inline MeasureResult wyner_ci(const JointDist2& d,
                              const MeasureOptions& opts = {}) {
  JointDist3 dd(d.nx, d.ny, 1);
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y) dd.at(x, y, 0) = d.at(x, y);
  MeasureResult r = wyner_ci_conditional(dd, opts);
  r.quantity = Quantity::wyner;
  return r;
}

namespace detail {

inline double channel_cmi(const JointDist3& d, const Channel& ch) {
  return mutual_information(apply_channel(d, Axis::Z, ch), Axis::X, Axis::Y,
                            Axis::Z);
}

inline std::vector<Channel> outer_channel_candidates(
    int nz, const std::vector<Channel>& extra) {
  std::vector<Channel> cands;
  // Each candidate costs a full inner solve, so the exhaustive partition
  // sweep stays limited to alphabets with at most 52 set partitions.
  if (nz <= 5) {
    cands = partition_channels(nz);
  } else {
    cands.push_back(Channel::identity(nz));
    cands.push_back(Channel::constant(nz, nz));
  }
  for (const Channel& ch : extra)
    if (ch.in_size == nz && ch.out_size <= nz) {
      Channel padded(nz, nz);
      for (int i = 0; i < nz; ++i)
        for (int o = 0; o < ch.out_size; ++o) padded.at(i, o) = ch.at(i, o);
      cands.push_back(padded);
    }
  return cands;
}

}  // namespace detail

/*! \brief Intrinsic conditional mutual information: min over degradings
 * p(zbar|z), |Zbar| <= |Z|, of I(X;Y|Zbar). Minimum of an exhaustive
 * deterministic-channel search and continuous multi-start descent.
 */
inline MeasureResult intrinsic_information(const JointDist3& d,
                                           const MeasureOptions& opts = {}) {
  if (d.nx == 1 || d.ny == 1)
    return detail::exact_zero_result(Quantity::intrinsic, d.nz);
  if (d.nz == 1) {
    MeasureResult r;
    r.quantity = Quantity::intrinsic;
    r.value = mutual_information(d, Axis::X, Axis::Y);
    r.certified_exact = true;
    r.witness_channel = Channel::identity(1);
    return r;
  }

  double best_val = std::numeric_limits<double>::infinity();
  Channel best_ch = Channel::identity(d.nz);
  auto consider = [&](const Channel& ch, double v) {
    if (v < best_val) {
      best_val = v;
      best_ch = ch;
    }
  };
  consider(Channel::identity(d.nz), detail::channel_cmi(d, Channel::identity(d.nz)));
  bool enumerated = false;
  try {
    for (const Channel& ch : enumerate_deterministic_channels(d.nz, d.nz))
      consider(ch, detail::channel_cmi(d, ch));
    enumerated = true;
  } catch (const EnumerationTooLargeError&) {
  }
  if (!enumerated && d.nz <= 10)
    for (const Channel& ch : partition_channels(d.nz))
      consider(ch, detail::channel_cmi(d, ch));
  for (const Channel& ch : opts.extra_channels)
    if (ch.in_size == d.nz && ch.out_size <= d.nz)
      consider(ch, detail::channel_cmi(d, ch));

  detail::ChannelProblem prob;
  prob.nx = d.nx;
  prob.ny = d.ny;
  prob.nz = d.nz;
  prob.nzb = d.nz;
  prob.base = d.p;
  auto mo = detail::to_minimize_options(opts);
  mo.warm_starts.push_back(BlockValues{Channel::identity(d.nz).rows});
  {
    Channel padded(d.nz, d.nz);
    for (int i = 0; i < d.nz; ++i)
      for (int o = 0; o < best_ch.out_size && o < d.nz; ++o)
        padded.at(i, o) = best_ch.at(i, o);
    mo.warm_starts.push_back(BlockValues{padded.rows});
  }
  for (const Channel& ch : opts.extra_channels)
    if (ch.in_size == d.nz && ch.out_size == d.nz)
      mo.warm_starts.push_back(BlockValues{ch.rows});
  auto res = minimize(
      prob.spec(),
      [&prob](const BlockValues& x, BlockValues* g) {
        return prob.objective(x, g);
      },
      mo);

  MeasureResult out;
  out.quantity = Quantity::intrinsic;
  out.restarts_used = res.restarts_used;
  out.converged = res.converged;
  if (res.value < best_val) {
    out.value = std::max(res.value, 0.0);
    Channel wc(d.nz, d.nz);
    wc.rows = res.params[0];
    out.witness_channel = std::move(wc);
  } else {
    out.value = std::max(best_val, 0.0);
    out.witness_channel = best_ch;
  }
  return out;
}

namespace detail {

// Penalized value and gradient of the joint nested problem.
inline double penalized(const ChannelWynerProblem& prob, double lambda,
                        const BlockValues& x, BlockValues* grad,
                        BlockValues* scratch) {
  if (!grad)
    return prob.objective(x, nullptr) + lambda * prob.constraint(x, nullptr);
  double f = prob.objective(x, grad);
  double g = prob.constraint(x, scratch);
  for (std::size_t k = 0; k < grad->size(); ++k)
    for (std::size_t i = 0; i < (*grad)[k].size(); ++i)
      (*grad)[k][i] += lambda * (*scratch)[k][i];
  return f + lambda * g;
}

// Alternating block descent over the penalty schedule: each stage runs
// projected gradient on the Q block with the channel fixed, then on the
// channel block with Q fixed, then a short joint polish.
inline void alternate(const ChannelWynerProblem& prob, BlockValues& x,
                      const MinimizeOptions& mo) {
  static const double kSchedule[] = {1.0, 10.0, 100.0, 1000.0};
  SimplexProductSpec full = prob.spec();
  BlockValues scratch = zeros_like(full);
  for (double lambda : kSchedule) {
    for (int which = 1; which >= 0; --which) {
      SimplexProductSpec sub{{full.blocks[which]}};
      BlockValues xb{x[which]};
      BlockValues fg = zeros_like(full);
      ObjectiveFn sub_f = [&, which](const BlockValues& pt, BlockValues* g) {
        BlockValues full_pt = x;
        full_pt[which] = pt[0];
        if (!g) return penalized(prob, lambda, full_pt, nullptr, nullptr);
        double v = penalized(prob, lambda, full_pt, &fg, &scratch);
        (*g)[0] = fg[which];
        return v;
      };
      detail::pgd(sub, sub_f, xb, mo.max_iters, mo.step_tol);
      x[which] = xb[0];
    }
    ObjectiveFn joint_f = [&](const BlockValues& pt, BlockValues* g) {
      return penalized(prob, lambda, pt, g, &scratch);
    };
    detail::pgd(full, joint_f, x, mo.max_iters / 2 + 1, mo.step_tol);
  }
}

}  // namespace detail

/*! \brief Nested measure: min over degradings p(zbar|z) of the conditional
 * relaxed common information of the degraded distribution. Equals the
 * secret-key cost of forming the distribution under unlimited public
 * communication. Outer search over partition channels with full inner
 * solves, then continuous alternating refinement; `joint_mode` switches the
 * refinement to a single joint penalized solve for cross-checking.
 */
inline MeasureResult wyner_intrinsic_ci(const JointDist3& d,
                                        const MeasureOptions& opts = {}) {
  if (d.nx == 1 || d.ny == 1)
    return detail::exact_zero_result(Quantity::wyner_intrinsic, d.nz);
  if (d.nz == 1) {
    MeasureResult r = wyner_ci(marginal_xy(d), opts);
    r.quantity = Quantity::wyner_intrinsic;
    r.witness_channel = Channel::identity(1);
    return r;
  }
  const int nq = opts.q_cardinality > 0 ? opts.q_cardinality : d.nx * d.ny;
  const int nzb = d.nz;
  MeasureOptions inner = opts;
  inner.restarts = opts.inner_restarts > 0 ? opts.inner_restarts
                                           : std::max(2, opts.restarts / 8);
  inner.q_cardinality = nq;
  inner.extra_channels.clear();

  double best_val = std::numeric_limits<double>::infinity();
  double best_res = std::numeric_limits<double>::infinity();
  Channel best_ch = Channel::identity(d.nz);
  Channel best_q(d.nx * d.ny * nzb, nq);
  int starts_total = 0;
  auto better = [&](double v, double r) {
    bool feas_new = r <= opts.tol, feas_old = best_res <= opts.tol;
    if (feas_new != feas_old) return feas_new;
    return v < best_val;
  };

  auto cands = detail::outer_channel_candidates(d.nz, opts.extra_channels);
  for (std::size_t idx = 0; idx < cands.size(); ++idx) {
    inner.seed = mix64(opts.seed + 0x5bd1e995u * (idx + 1));
    inner.extra_q = opts.extra_q;
    auto degraded = apply_channel(d, Axis::Z, cands[idx]);
    auto sub = wyner_ci_conditional(degraded, inner);
    starts_total += sub.restarts_used;
    if (better(sub.value, sub.feasibility_residual)) {
      best_val = sub.value;
      best_res = sub.feasibility_residual;
      best_ch = cands[idx];
      best_q = *sub.witness_q;
    }
  }

  detail::ChannelWynerProblem prob;
  prob.nx = d.nx;
  prob.ny = d.ny;
  prob.nz = d.nz;
  prob.nzb = nzb;
  prob.nq = nq;
  prob.base = d.p;
  auto mo = detail::to_minimize_options(opts);

  std::vector<BlockValues> starts;
  {
    Channel padded(d.nz, nzb);
    for (int i = 0; i < d.nz; ++i)
      for (int o = 0; o < best_ch.out_size && o < nzb; ++o)
        padded.at(i, o) = best_ch.at(i, o);
    starts.push_back(BlockValues{padded.rows, best_q.rows});
  }
  int cont = std::max(1, opts.restarts / 16);
  for (int k = 0; k < cont; ++k) {
    Rng rng(mix64(opts.seed + 0x9e3779b9u + k));
    starts.push_back(random_point(prob.spec(), rng));
  }

  if (opts.joint_mode) {
    MinimizeOptions jm = mo;
    jm.restarts = std::max(opts.restarts / 2, cont);
    jm.warm_starts = starts;
    auto res = minimize_with_penalty(
        prob.spec(),
        [&prob](const BlockValues& x, BlockValues* g) {
          return prob.objective(x, g);
        },
        [&prob](const BlockValues& x, BlockValues* g) {
          return prob.constraint(x, g);
        },
        jm);
    starts_total += res.restarts_used;
    if (better(res.value, res.feasibility_residual)) {
      best_val = res.value;
      best_res = res.feasibility_residual;
      Channel wc(d.nz, nzb);
      wc.rows = res.params[0];
      best_ch = std::move(wc);
      best_q.rows = res.params[1];
    }
  } else {
    for (auto& s : starts) {
      BlockValues x = s;
      project_blocks(prob.spec(), x);
      detail::alternate(prob, x, mo);
      double f = prob.objective(x, nullptr);
      double g = prob.constraint(x, nullptr);
      ++starts_total;
      if (better(f, g)) {
        best_val = f;
        best_res = g;
        Channel wc(d.nz, nzb);
        wc.rows = x[0];
        best_ch = std::move(wc);
        best_q.rows = x[1];
      }
    }
  }

  MeasureResult out;
  out.quantity = Quantity::wyner_intrinsic;
  out.value = std::max(best_val, 0.0);
  out.certified_exact = false;
  out.witness_channel = best_ch;
  out.witness_q = best_q;
  out.feasibility_residual = best_res;
  out.restarts_used = starts_total;
  out.converged = best_res <= opts.tol;
  return out;
}

/*! \brief Secret-key cost of forming the distribution; alias of the nested
 * measure with its own quantity tag. */
inline MeasureResult sk_cost(const JointDist3& d,
                             const MeasureOptions& opts = {}) {
  MeasureResult r = wyner_intrinsic_ci(d, opts);
  r.quantity = Quantity::sk_cost;
  return r;
}

inline MeasureResult evaluate_measure(Quantity q, const JointDist3& d,
                                      const MeasureOptions& opts = {}) {
  MeasureResult r;
  switch (q) {
    case Quantity::gk:
      r.quantity = q;
      r.value = gk_ci(marginal_xy(d));
      r.certified_exact = true;
      return r;
    case Quantity::gk_cond:
      r.quantity = q;
      r.value = gk_ci_conditional(d);
      r.certified_exact = true;
      return r;
    case Quantity::gk_cond_perz:
      r.quantity = q;
      r.value = gk_ci_conditional_per_z(d);
      r.certified_exact = true;
      return r;
    case Quantity::wyner:
      return wyner_ci(marginal_xy(d), opts);
    case Quantity::wyner_cond:
      return wyner_ci_conditional(d, opts);
    case Quantity::intrinsic:
      return intrinsic_information(d, opts);
    case Quantity::wyner_intrinsic:
      return wyner_intrinsic_ci(d, opts);
    default:
      return sk_cost(d, opts);
  }
}

/*! \brief Structural certificate for equality between the nested measure
 * and the intrinsic information at the nested measure's witness channel.
 *
 * A common part Q' with H(Q'|X,Zbar)=H(Q'|Y,Zbar)=0 and X-ZbarQ'-Y exists
 * iff, for every zbar, X and Y are conditionally independent within each
 * ergodic component of the degraded slice; per_zbar_residual is the largest
 * within-component mutual information found.
 */
struct EqualityCertificate {
  double wyner_intrinsic = 0.0;
  double intrinsic = 0.0;
  double gap = 0.0;  // wyner_intrinsic - intrinsic
  Channel optimal_channel;
  double per_zbar_residual = 0.0;
  bool q_prime_exists = false;
  bool equality_holds = false;
};

inline EqualityCertificate equality_certificate(const JointDist3& d,
                                                const MeasureOptions& opts = {}) {
  EqualityCertificate cert;
  auto wi = wyner_intrinsic_ci(d, opts);
  auto ii = intrinsic_information(d, opts);
  cert.wyner_intrinsic = wi.value;
  cert.intrinsic = ii.value;
  cert.gap = wi.value - ii.value;
  cert.optimal_channel =
      wi.witness_channel ? *wi.witness_channel : Channel::identity(d.nz);

  auto degraded = apply_channel(d, Axis::Z, cert.optimal_channel);
  Pmf pz = marginal(degraded, Axis::Z);
  double residual = 0.0;
  for (int zb = 0; zb < degraded.nz; ++zb) {
    if (pz[zb] <= kZeroEps) continue;
    JointDist2 slice(degraded.nx, degraded.ny);
    for (int x = 0; x < degraded.nx; ++x)
      for (int y = 0; y < degraded.ny; ++y)
        slice.at(x, y) = degraded.at(x, y, zb) / pz[zb];
    auto dec = ergodic_decompose(slice);
    for (const auto& comp : dec.components) {
      if (comp.mass <= kZeroEps) continue;
      JointDist2 sub(static_cast<int>(comp.x_symbols.size()),
                     static_cast<int>(comp.y_symbols.size()));
      for (std::size_t i = 0; i < comp.x_symbols.size(); ++i)
        for (std::size_t j = 0; j < comp.y_symbols.size(); ++j)
          sub.at(static_cast<int>(i), static_cast<int>(j)) =
              slice.at(comp.x_symbols[i], comp.y_symbols[j]) / comp.mass;
      residual = std::max(residual, mutual_information(sub));
    }
  }
  cert.per_zbar_residual = residual;
  cert.q_prime_exists = residual <= 1e-9;
  cert.equality_holds = std::abs(cert.gap) <= 1e-3;
  return cert;
}

/*! \brief All the bounds in one report: exact common-information values,
 * mutual informations, and the optimizer-based measures, plus the derived
 * secret-key bounds and a conversion-rate bound against a target
 * distribution (by default a perfect secret bit).
 */
struct BoundsReport {
  double gk = 0.0;
  double mi = 0.0;
  double wyner = 0.0;
  double gk_cond = 0.0;
  double mi_cond = 0.0;
  double intrinsic = 0.0;
  double wyner_intrinsic = 0.0;
  double sk_rate_upper = 0.0;
  double sk_cost_lower = 0.0;
  double sk_cost = 0.0;
  double conversion_rate_bound = 0.0;
};

inline BoundsReport bounds_report(
    const JointDist3& d, const MeasureOptions& opts = {},
    const std::optional<JointDist3>& target = std::nullopt) {
  BoundsReport r;
  auto m = marginal_xy(d);
  r.gk = gk_ci(m);
  r.mi = mutual_information(m);
  r.wyner = wyner_ci(m, opts).value;
  r.gk_cond = gk_ci_conditional(d);
  r.mi_cond = mutual_information(d, Axis::X, Axis::Y, Axis::Z);
  r.intrinsic = intrinsic_information(d, opts).value;
  r.wyner_intrinsic = wyner_intrinsic_ci(d, opts).value;
  r.sk_rate_upper = r.intrinsic;
  r.sk_cost_lower = r.intrinsic;
  r.sk_cost = r.wyner_intrinsic;
  JointDist3 tgt(2, 2, 1);
  tgt.at(0, 0, 0) = 0.5;
  tgt.at(1, 1, 0) = 0.5;
  if (target) tgt = *target;
  double tgt_intr = intrinsic_information(tgt, opts).value;
  r.conversion_rate_bound =
      tgt_intr > 1e-12 ? r.intrinsic / tgt_intr
                       : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace sct
