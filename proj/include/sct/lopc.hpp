#pragma once

// Monotonicity auditing under local operations and public communication.
//
// Five move kinds act on a tripartite distribution: the X party or the Y
// party applies a channel to its variable, the Z observer applies a channel
// to hers, or one of the two parties announces a deterministic function of
// its variable, which is then appended to the other party's variable and to
// Z. Party moves and announcements must not increase a secrecy measure;
// observer processing must not decrease it (the observer only loses
// information). The audit draws random moves, evaluates the measure before
// and after, and reports violations beyond a tolerance band.
//
// For optimization-based measures the audit lifts the witness found on one
// side into a warm start for the other side's solve. The lifted point is
// feasible and its value is provably on the monotone side of the witness
// value, so honest moves cannot produce spurious violations due to one
// loose solve; a reported violation then reflects the measure itself.

#include <cstdint>
#include <string>
#include <vector>

#include "sct/dist.hpp"
#include "sct/measures.hpp"
#include "sct/random.hpp"

namespace sct {

class ProductTooLargeError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kMaxMoveCells = 1000000;

enum class MoveKind { alice_lo, bob_lo, eve_lo, alice_pc, bob_pc };

inline const char* move_kind_name(MoveKind k) {
  switch (k) {
    case MoveKind::alice_lo: return "alice_lo";
    case MoveKind::bob_lo: return "bob_lo";
    case MoveKind::eve_lo: return "eve_lo";
    case MoveKind::alice_pc: return "alice_pc";
    default: return "bob_pc";
  }
}

struct LopcMove {
  MoveKind kind = MoveKind::alice_lo;
  Channel channel;        // used by the *_lo kinds
  std::vector<int> func;  // used by the *_pc kinds, values in [0, t_size)
  int t_size = 0;
};

/*! \brief Apply one move, returning the post-move distribution.
 * Announcement tags use index order v*t_size + t on both tagged axes. */
inline JointDist3 apply_move(const JointDist3& d, const LopcMove& mv) {
  switch (mv.kind) {
    case MoveKind::alice_lo:
      return apply_channel(d, Axis::X, mv.channel);
    case MoveKind::bob_lo:
      return apply_channel(d, Axis::Y, mv.channel);
    case MoveKind::eve_lo:
      return apply_channel(d, Axis::Z, mv.channel);
    case MoveKind::alice_pc:
    case MoveKind::bob_pc:
      break;
  }
  const bool from_x = mv.kind == MoveKind::alice_pc;
  const int T = mv.t_size;
  const auto& f = mv.func;
  if (static_cast<int>(f.size()) != (from_x ? d.nx : d.ny))
    throw SizeMismatchError("announcement function does not match axis size");
  for (int v : f)
    if (v < 0 || v >= T)
      throw SizeMismatchError("announcement value out of range");
  std::size_t cells = static_cast<std::size_t>(d.nx) * d.ny * d.nz * T *
                      static_cast<std::size_t>(T);
  if (cells > kMaxMoveCells)
    throw ProductTooLargeError("announcement would exceed the cell budget");
  JointDist3 out(from_x ? d.nx : d.nx * T, from_x ? d.ny * T : d.ny,
                 d.nz * T);
  auto name = [](const std::vector<std::string>& l, int i) {
    return l.empty() ? std::to_string(i) : l[i];
  };
  auto tagged = [&](const std::vector<std::string>& l, int n) {
    std::vector<std::string> res(static_cast<std::size_t>(n) * T);
    for (int i = 0; i < n; ++i)
      for (int t = 0; t < T; ++t)
        res[static_cast<std::size_t>(i) * T + t] =
            name(l, i) + "|t" + std::to_string(t);
    return res;
  };
  out.labels[2] = tagged(d.labels[2], d.nz);
  if (from_x) {
    out.labels[0] = d.labels[0];
    out.labels[1] = tagged(d.labels[1], d.ny);
  } else {
    out.labels[0] = tagged(d.labels[0], d.nx);
    out.labels[1] = d.labels[1];
  }
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y) {
      int t = f[from_x ? x : y];
      for (int z = 0; z < d.nz; ++z) {
        double v = d.at(x, y, z);
        if (v == 0.0) continue;
        if (from_x)
          out.at(x, y * T + t, z * T + t) += v;
        else
          out.at(x * T + t, y, z * T + t) += v;
      }
    }
  return validate(std::move(out));
}

namespace detail {

inline Channel compose_channels(const Channel& first, const Channel& second) {
  if (first.out_size != second.in_size)
    throw SizeMismatchError("channel composition size mismatch");
  Channel out(first.in_size, second.out_size);
  for (int i = 0; i < first.in_size; ++i)
    for (int m = 0; m < first.out_size; ++m) {
      double a = first.at(i, m);
      if (a == 0.0) continue;
      for (int o = 0; o < second.out_size; ++o)
        out.at(i, o) += a * second.at(m, o);
    }
  return out;
}

// Tag-preserving lift of a degrading channel across an announcement.
inline Channel lift_channel_pc(const Channel& cstar, int T) {
  Channel out(cstar.in_size * T, cstar.out_size * T);
  for (int z = 0; z < cstar.in_size; ++z)
    for (int zb = 0; zb < cstar.out_size; ++zb) {
      double v = cstar.at(z, zb);
      if (v == 0.0) continue;
      for (int t = 0; t < T; ++t) out.at(z * T + t, zb * T + t) = v;
    }
  return out;
}

// Lift of Q rows across an announcement: the post-move cell inherits the
// row of the underlying (x, y, zbar) cell regardless of tag values. The
// tag factor can differ between the announcing party's axis and the Z
// axis (pair-marginal measures keep a one-symbol Z).
inline Channel lift_rows_pc(const Channel& rstar, int nx, int ny, int nzb,
                            int t_party, int t_z, bool tag_on_x) {
  const int nq = rstar.out_size;
  const int nxa = tag_on_x ? nx * t_party : nx;
  const int nya = tag_on_x ? ny : ny * t_party;
  const int nzba = nzb * t_z;
  Channel out(nxa * nya * nzba, nq);
  for (int xa = 0; xa < nxa; ++xa)
    for (int ya = 0; ya < nya; ++ya)
      for (int zba = 0; zba < nzba; ++zba) {
        int x = tag_on_x ? xa / t_party : xa;
        int y = tag_on_x ? ya : ya / t_party;
        int zb = zba / t_z;
        int src = (x * ny + y) * nzb + zb;
        int dst = (xa * nya + ya) * nzba + zba;
        for (int q = 0; q < nq; ++q) out.at(dst, q) = rstar.at(src, q);
      }
  return out;
}

// Lift of Q rows across a local channel on X (or Y when on_x is false):
// the post-move row is the conditional average of the pre-move rows given
// the post-move symbol, computed under the degraded pair weights.
inline Channel lift_rows_lo(const JointDist3& d, const Channel& cstar,
                            const Channel& rstar, const Channel& a,
                            bool on_x) {
  const int nzb = cstar.out_size;
  const int nq = rstar.out_size;
  const int nma = a.out_size;  // moved axis, post-move size
  std::vector<double> w(static_cast<std::size_t>(d.nx) * d.ny * nzb, 0.0);
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      for (int z = 0; z < d.nz; ++z) {
        double b = d.at(x, y, z);
        if (b == 0.0) continue;
        for (int zb = 0; zb < nzb; ++zb)
          w[(static_cast<std::size_t>(x) * d.ny + y) * nzb + zb] +=
              b * cstar.at(z, zb);
      }
  const int nxa = on_x ? nma : d.nx;
  const int nya = on_x ? d.ny : nma;
  Channel out(nxa * nya * nzb, nq);
  std::vector<double> num(nq);
  for (int xa = 0; xa < nxa; ++xa)
    for (int ya = 0; ya < nya; ++ya)
      for (int zb = 0; zb < nzb; ++zb) {
        std::fill(num.begin(), num.end(), 0.0);
        double den = 0.0;
        const int moved_count = on_x ? d.nx : d.ny;
        for (int m = 0; m < moved_count; ++m) {
          int x = on_x ? m : xa;
          int y = on_x ? ya : m;
          double mass = w[(static_cast<std::size_t>(x) * d.ny + y) * nzb + zb] *
                        a.at(m, on_x ? xa : ya);
          if (mass == 0.0) continue;
          den += mass;
          int src = (x * d.ny + y) * nzb + zb;
          for (int q = 0; q < nq; ++q) num[q] += mass * rstar.at(src, q);
        }
        int dst = (xa * nya + ya) * nzb + zb;
        for (int q = 0; q < nq; ++q)
          out.at(dst, q) = den > 0.0 ? num[q] / den : 1.0 / nq;
      }
  return out;
}

// Widens Q rows with zero-probability symbols so a lifted witness matches
// a solve whose default Q alphabet is larger.
inline Channel pad_rows(const Channel& r, int nq_target) {
  Channel out(r.in_size, nq_target);
  for (int i = 0; i < r.in_size; ++i)
    for (int q = 0; q < r.out_size; ++q) out.at(i, q) = r.at(i, q);
  return out;
}

inline bool is_exact_quantity(Quantity q) {
  return q == Quantity::gk || q == Quantity::gk_cond ||
         q == Quantity::gk_cond_perz;
}

inline bool uses_q_block(Quantity q) {
  return q == Quantity::wyner || q == Quantity::wyner_cond ||
         q == Quantity::wyner_intrinsic || q == Quantity::sk_cost;
}

// Distributions whose Z axis is irrelevant are analyzed through their pair
// marginal embedded with a single Z symbol, so witnesses line up.
inline JointDist3 analysis_dist(Quantity q, const JointDist3& d) {
  if (q != Quantity::wyner && q != Quantity::gk) return d;
  JointDist3 dd(d.nx, d.ny, 1);
  dd.labels[0] = d.labels[0];
  dd.labels[1] = d.labels[1];
  auto m = marginal_xy(d);
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y) dd.at(x, y, 0) = m.at(x, y);
  return validate(std::move(dd));
}

inline Channel witness_channel_of(const MeasureResult& r, int nz) {
  return r.witness_channel ? *r.witness_channel : Channel::identity(nz);
}

}  // namespace detail

struct Verdict {
  int trial = 0;
  MoveKind kind = MoveKind::alice_lo;
  double before = 0.0;
  double after = 0.0;
  double excess = 0.0;  // signed distance past the allowed direction
  bool violated = false;
};

struct AuditReport {
  Quantity measure = Quantity::gk;
  int trials = 0;
  int violation_count = 0;
  double max_violation = 0.0;
  std::vector<Verdict> verdicts;
};

/*! \brief Draw a random move compatible with the distribution's axis
 * sizes: channels keep the axis size, announcements use a 2- or 3-valued
 * tag. */
inline LopcMove random_move(Rng& rng, const JointDist3& d) {
  LopcMove mv;
  mv.kind = static_cast<MoveKind>(rng.below(5));
  switch (mv.kind) {
    case MoveKind::alice_lo:
      mv.channel = random_channel(rng, d.nx, d.nx);
      break;
    case MoveKind::bob_lo:
      mv.channel = random_channel(rng, d.ny, d.ny);
      break;
    case MoveKind::eve_lo:
      mv.channel = random_channel(rng, d.nz, d.nz);
      break;
    case MoveKind::alice_pc:
      mv.t_size = 2 + static_cast<int>(rng.below(2));
      mv.func = random_map(rng, d.nx, mv.t_size);
      break;
    case MoveKind::bob_pc:
      mv.t_size = 2 + static_cast<int>(rng.below(2));
      mv.func = random_map(rng, d.ny, mv.t_size);
      break;
  }
  return mv;
}

namespace detail {

// Evaluates one move. `before` is the cached pre-move result and may be
// tightened in place when an observer-move check forces a re-solve.
inline Verdict audit_trial(Quantity q, const JointDist3& d,
                           MeasureResult& before, const LopcMove& mv,
                           int trial, double tol,
                           const MeasureOptions& mopts) {
  Verdict v;
  v.trial = trial;
  v.kind = mv.kind;
  JointDist3 after_raw = apply_move(d, mv);
  JointDist3 da = analysis_dist(q, d);
  JointDist3 after_d = analysis_dist(q, after_raw);

  MeasureOptions ao = mopts;
  const bool exact = is_exact_quantity(q);
  if (!exact) {
    Channel cstar = witness_channel_of(before, da.nz);
    const Channel* rstar =
        before.witness_q ? &*before.witness_q : nullptr;
    switch (mv.kind) {
      case MoveKind::alice_lo:
      case MoveKind::bob_lo: {
        bool on_x = mv.kind == MoveKind::alice_lo;
        ao.extra_channels.push_back(cstar);
        if (rstar && uses_q_block(q))
          ao.extra_q.push_back(
              lift_rows_lo(da, cstar, *rstar, mv.channel, on_x));
        break;
      }
      case MoveKind::alice_pc:
      case MoveKind::bob_pc: {
        // An announcement tags the listening party's axis: Alice's tag
        // lands on Y, Bob's on X. The pair-marginal measures keep a
        // one-symbol Z, so the channel lift is skipped for them.
        bool tag_on_x = mv.kind == MoveKind::bob_pc;
        if (after_d.nz == da.nz * mv.t_size)
          ao.extra_channels.push_back(lift_channel_pc(cstar, mv.t_size));
        if (rstar && uses_q_block(q)) {
          Channel lifted = lift_rows_pc(
              *rstar, da.nx, da.ny, cstar.out_size, mv.t_size,
              after_d.nz == da.nz * mv.t_size ? mv.t_size : 1, tag_on_x);
          int nq_after = ao.q_cardinality > 0 ? ao.q_cardinality
                                              : after_d.nx * after_d.ny;
          if (lifted.out_size <= nq_after)
            ao.extra_q.push_back(pad_rows(lifted, nq_after));
        }
        break;
      }
      case MoveKind::eve_lo:
        break;
    }
  }
  MeasureResult after = evaluate_measure(q, after_d, ao);
  v.before = before.value;
  v.after = after.value;
  if (mv.kind == MoveKind::eve_lo) {
    if (!exact && before.value - after.value > tol && da.nz == d.nz) {
      // Tentative violation: re-solve the before side warm-started with
      // the composed observer channel and the after-side witness.
      MeasureOptions bo = mopts;
      Channel after_ch = witness_channel_of(after, after_d.nz);
      bo.extra_channels.push_back(
          compose_channels(mv.channel, after_ch));
      if (after.witness_q && uses_q_block(q))
        bo.extra_q.push_back(*after.witness_q);
      MeasureResult redo = evaluate_measure(q, da, bo);
      if (redo.value < before.value) before = redo;
      v.before = before.value;
    }
    v.excess = v.before - v.after - tol;
  } else {
    v.excess = v.after - v.before - tol;
  }
  v.violated = v.excess > 0.0;
  return v;
}

}  // namespace detail

/*! \brief Audit one measure on a fixed distribution over `trials` random
 * moves; move k is drawn from a generator seeded by mix64(seed + k). */
inline AuditReport audit_measure(Quantity q, const JointDist3& d, int trials,
                                 std::uint64_t seed, double tol,
                                 const MeasureOptions& mopts = {}) {
  AuditReport rep;
  rep.measure = q;
  rep.trials = trials;
  JointDist3 da = detail::analysis_dist(q, d);
  MeasureResult before = evaluate_measure(q, da, mopts);
  for (int k = 0; k < trials; ++k) {
    Rng rng(mix64(seed + static_cast<std::uint64_t>(k)));
    LopcMove mv = random_move(rng, d);
    Verdict v = detail::audit_trial(q, d, before, mv, k, tol, mopts);
    if (v.violated) {
      ++rep.violation_count;
      rep.max_violation = std::max(rep.max_violation, v.excess + tol);
    }
    rep.verdicts.push_back(v);
  }
  return rep;
}

/*! \brief Audit with a fresh full-support random distribution per trial;
 * trial k draws its distribution and move from mix64(seed + k). */
inline AuditReport audit_random(Quantity q, int trials, std::uint64_t seed,
                                double tol, int nx = 3, int ny = 3,
                                int nz = 3,
                                const MeasureOptions& mopts = {}) {
  AuditReport rep;
  rep.measure = q;
  rep.trials = trials;
  for (int k = 0; k < trials; ++k) {
    Rng rng(mix64(seed + static_cast<std::uint64_t>(k)));
    JointDist3 d = random_dist3(rng, nx, ny, nz);
    LopcMove mv = random_move(rng, d);
    JointDist3 da = detail::analysis_dist(q, d);
    MeasureResult before = evaluate_measure(q, da, mopts);
    Verdict v = detail::audit_trial(q, d, before, mv, k, tol, mopts);
    if (v.violated) {
      ++rep.violation_count;
      rep.max_violation = std::max(rep.max_violation, v.excess + tol);
    }
    rep.verdicts.push_back(v);
  }
  return rep;
}

struct EveSearchResult {
  bool found = false;
  double before = 0.0;
  double after = 0.0;
  double gap = 0.0;
  Channel channel;
  int evaluations = 0;
};

/*! \brief Search for an observer channel that strictly decreases the
 * measure by more than `margin`: deterministic partition channels first,
 * then random channels until the evaluation budget is spent. */
inline EveSearchResult find_eve_lo_violation(Quantity q, const JointDist3& d,
                                             int budget = 200,
                                             double margin = 1e-3,
                                             std::uint64_t seed = 1,
                                             const MeasureOptions& mopts = {}) {
  EveSearchResult res;
  res.before = evaluate_measure(q, d, mopts).value;
  auto consider = [&](const Channel& ch) {
    JointDist3 after_d = apply_channel(d, Axis::Z, ch);
    double after = evaluate_measure(q, after_d, mopts).value;
    ++res.evaluations;
    double gap = res.before - after;
    if (gap > margin && gap > res.gap) {
      res.found = true;
      res.gap = gap;
      res.after = after;
      res.channel = ch;
    }
    return res.found;
  };
  if (d.nz <= 8)
    for (const Channel& ch : partition_channels(d.nz)) {
      if (res.evaluations >= budget || consider(ch)) break;
    }
  Rng rng(mix64(seed));
  while (!res.found && res.evaluations < budget) {
    int out = 1 + static_cast<int>(rng.below(d.nz));
    if (consider(random_channel(rng, d.nz, out))) break;
  }
  return res;
}

struct AdditivityReport {
  double first = 0.0;
  double second = 0.0;
  double product = 0.0;
  double defect = 0.0;  // product minus sum of parts
};

namespace detail {

inline Channel tensor_channels(const Channel& a, const Channel& b) {
  Channel out(a.in_size * b.in_size, a.out_size * b.out_size);
  for (int ia = 0; ia < a.in_size; ++ia)
    for (int ib = 0; ib < b.in_size; ++ib)
      for (int oa = 0; oa < a.out_size; ++oa) {
        double va = a.at(ia, oa);
        if (va == 0.0) continue;
        for (int ob = 0; ob < b.out_size; ++ob)
          out.at(ia * b.in_size + ib, oa * b.out_size + ob) =
              va * b.at(ib, ob);
      }
  return out;
}

// Tensor Q rows aligned with the product problem's cell indexing; the
// degraded Z axis of the product solve has size nzb_target (the padded
// channel keeps original output indices), and rows are nq_target wide.
inline Channel tensor_rows(const Channel& ra, int nxa, int nya, int nzba,
                           const Channel& rb, int nxb, int nyb, int nzbb,
                           int nzb_target, int nq_target) {
  const int nqa = ra.out_size, nqb = rb.out_size;
  const int nx = nxa * nxb, ny = nya * nyb;
  Channel out(nx * ny * nzb_target, nq_target);
  for (int r = 0; r < out.in_size; ++r)
    for (int q = 0; q < nq_target; ++q)
      out.at(r, q) = q == 0 ? 1.0 : 0.0;
  for (int xa = 0; xa < nxa; ++xa)
    for (int xb = 0; xb < nxb; ++xb)
      for (int ya = 0; ya < nya; ++ya)
        for (int yb = 0; yb < nyb; ++yb)
          for (int za = 0; za < nzba; ++za)
            for (int zb = 0; zb < nzbb; ++zb) {
              int zt = za * nzbb + zb;
              if (zt >= nzb_target) continue;
              int cell = ((xa * nxb + xb) * ny + (ya * nyb + yb)) *
                             nzb_target +
                         zt;
              int sa = (xa * nya + ya) * nzba + za;
              int sb = (xb * nyb + yb) * nzbb + zb;
              for (int q = 0; q < nq_target; ++q) out.at(cell, q) = 0.0;
              for (int qa = 0; qa < nqa; ++qa) {
                double va = ra.at(sa, qa);
                if (va == 0.0) continue;
                for (int qb = 0; qb < nqb; ++qb) {
                  int q = qa * nqb + qb;
                  if (q < nq_target) out.at(cell, q) = va * rb.at(sb, qb);
                }
              }
            }
  return out;
}

}  // namespace detail

/*! \brief Evaluate a measure on two distributions and their independent
 * product; for optimizer measures the product solve is warm-started with
 * the tensor of the factor witnesses, so the product estimate never
 * exceeds the sum by solver looseness alone. */
inline AdditivityReport additivity_check(Quantity q, const JointDist3& a,
                                         const JointDist3& b,
                                         const MeasureOptions& mopts = {}) {
  if (static_cast<std::size_t>(a.size()) * b.size() > kMaxMoveCells)
    throw ProductTooLargeError("product exceeds the cell budget");
  JointDist3 prod = tensor_product(a, b);
  JointDist3 aa = detail::analysis_dist(q, a);
  JointDist3 ab = detail::analysis_dist(q, b);
  JointDist3 ap = detail::analysis_dist(q, prod);
  MeasureResult ra = evaluate_measure(q, aa, mopts);
  MeasureResult rb = evaluate_measure(q, ab, mopts);
  MeasureOptions po = mopts;
  if (!detail::is_exact_quantity(q)) {
    Channel ca = detail::witness_channel_of(ra, aa.nz);
    Channel cb = detail::witness_channel_of(rb, ab.nz);
    po.extra_channels.push_back(detail::tensor_channels(ca, cb));
    if (ra.witness_q && rb.witness_q && detail::uses_q_block(q)) {
      // Padded degradings keep the full Z-product axis size.
      int nq_target = mopts.q_cardinality > 0 ? mopts.q_cardinality
                                              : ap.nx * ap.ny;
      po.extra_q.push_back(detail::tensor_rows(
          *ra.witness_q, aa.nx, aa.ny, ca.out_size, *rb.witness_q, ab.nx,
          ab.ny, cb.out_size, ap.nz, nq_target));
    }
  }
  MeasureResult rp = evaluate_measure(q, ap, po);
  AdditivityReport rep;
  rep.first = ra.value;
  rep.second = rb.value;
  rep.product = rp.value;
  rep.defect = rp.value - ra.value - rb.value;
  return rep;
}

}  // namespace sct
