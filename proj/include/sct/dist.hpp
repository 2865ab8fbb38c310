#pragma once

// Dense joint distributions over two or three finite symbol axes, plus the
// elementary information measures evaluated on them. All logarithms are
// base 2 and all information values are in bits.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sct {

inline constexpr double kSumTol = 1e-9;    // normalization tolerance
inline constexpr double kZeroEps = 1e-12;  // structural-zero threshold

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NegativeEntryError : Error { using Error::Error; };
struct NotNormalizedError : Error { using Error::Error; };
struct ShapeMismatchError : Error { using Error::Error; };
struct SizeMismatchError : Error { using Error::Error; };
struct EmptyAxisSetError : Error { using Error::Error; };

using Pmf = std::vector<double>;

enum class Axis : int { X = 0, Y = 1, Z = 2 };

inline const char* axis_name(Axis a) {
  switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    default: return "z";
  }
}

/*! \brief Joint pmf over a pair of finite alphabets, stored dense row-major. */
struct JointDist2 {
  int nx = 0;
  int ny = 0;
  std::vector<double> p;
  std::array<std::vector<std::string>, 2> labels{};

  JointDist2() = default;
  JointDist2(int nx_, int ny_)
      : nx(nx_), ny(ny_), p(static_cast<std::size_t>(nx_) * ny_, 0.0) {}

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(x) * ny + y;
  }
  double at(int x, int y) const { return p[index(x, y)]; }
  double& at(int x, int y) { return p[index(x, y)]; }
  std::size_t size() const { return p.size(); }
  double sum() const { return std::accumulate(p.begin(), p.end(), 0.0); }
};

/*! \brief Joint pmf over a triple of finite alphabets (Alice, Bob, Eve). */
struct JointDist3 {
  int nx = 0;
  int ny = 0;
  int nz = 0;
  std::vector<double> p;
  std::array<std::vector<std::string>, 3> labels{};
  std::vector<std::uint8_t> support_mask{};  // filled by validate()

  JointDist3() = default;
  JointDist3(int nx_, int ny_, int nz_)
      : nx(nx_), ny(ny_), nz(nz_),
        p(static_cast<std::size_t>(nx_) * ny_ * nz_, 0.0) {}

  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(x) * ny + y) * nz + z;
  }
  double at(int x, int y, int z) const { return p[index(x, y, z)]; }
  double& at(int x, int y, int z) { return p[index(x, y, z)]; }
  std::size_t size() const { return p.size(); }
  double sum() const { return std::accumulate(p.begin(), p.end(), 0.0); }

  int axis_size(Axis a) const {
    switch (a) {
      case Axis::X: return nx;
      case Axis::Y: return ny;
      default: return nz;
    }
  }
};

// p * log2(p) with the 0 log 0 = 0 convention.
inline double xlog2(double v) { return v > 0.0 ? v * std::log2(v) : 0.0; }

/*! \brief Shannon entropy of a pmf in bits. Entries <= 0 contribute zero. */
inline double entropy(std::span<const double> pmf) {
  double h = 0.0;
  for (double v : pmf) h -= xlog2(v);
  return h < 0.0 ? 0.0 : h;
}

inline double entropy(const Pmf& pmf) {
  return entropy(std::span<const double>(pmf));
}

namespace detail {

inline void check_entries(std::span<const double> p, double sum_tol,
                          const char* what) {
  double s = 0.0;
  for (double v : p) {
    if (v < 0.0)
      throw NegativeEntryError(std::string(what) + ": negative entry");
    s += v;
  }
  if (std::abs(s - 1.0) > sum_tol)
    throw NotNormalizedError(std::string(what) + ": entries sum to " +
                             std::to_string(s));
}

}  // namespace detail

/*! \brief Checks non-negativity and normalization, records the support mask.
 *
 * Throws NegativeEntryError or NotNormalizedError. Entries strictly above
 * `zero_eps` count as support; everything below is a structural zero.
 */
inline JointDist3 validate(JointDist3 d, double sum_tol = kSumTol,
                           double zero_eps = kZeroEps) {
  if (d.nx < 1 || d.ny < 1 || d.nz < 1 || d.p.size() != d.size())
    throw ShapeMismatchError("validate: inconsistent shape");
  detail::check_entries(d.p, sum_tol, "validate");
  d.support_mask.resize(d.p.size());
  for (std::size_t i = 0; i < d.p.size(); ++i)
    d.support_mask[i] = d.p[i] > zero_eps ? 1 : 0;
  return d;
}

inline JointDist2 validate(JointDist2 d, double sum_tol = kSumTol) {
  if (d.nx < 1 || d.ny < 1 || d.p.size() != d.size())
    throw ShapeMismatchError("validate: inconsistent shape");
  detail::check_entries(d.p, sum_tol, "validate");
  return d;
}

inline std::size_t support_size(const JointDist3& d, double zero_eps = kZeroEps) {
  std::size_t n = 0;
  for (double v : d.p) n += v > zero_eps ? 1 : 0;
  return n;
}

/*! \brief Row-stochastic matrix from one finite alphabet to another. */
struct Channel {
  int in_size = 0;
  int out_size = 0;
  std::vector<double> rows;  // in_size x out_size, row-major

  Channel() = default;
  Channel(int in, int out)
      : in_size(in), out_size(out),
        rows(static_cast<std::size_t>(in) * out, 0.0) {}

  double at(int i, int o) const {
    return rows[static_cast<std::size_t>(i) * out_size + o];
  }
  double& at(int i, int o) {
    return rows[static_cast<std::size_t>(i) * out_size + o];
  }

  static Channel identity(int n) {
    Channel c(n, n);
    for (int i = 0; i < n; ++i) c.at(i, i) = 1.0;
    return c;
  }

  // All inputs mapped to one output symbol.
  static Channel constant(int in, int out = 1, int target = 0) {
    Channel c(in, out);
    for (int i = 0; i < in; ++i) c.at(i, target) = 1.0;
    return c;
  }

  static Channel from_map(int in, int out, std::span<const int> map) {
    if (static_cast<int>(map.size()) != in)
      throw SizeMismatchError("Channel::from_map: map size != in_size");
    Channel c(in, out);
    for (int i = 0; i < in; ++i) {
      if (map[i] < 0 || map[i] >= out)
        throw SizeMismatchError("Channel::from_map: symbol out of range");
      c.at(i, map[i]) = 1.0;
    }
    return c;
  }

  Channel validated(double sum_tol = kSumTol) const {
    for (int i = 0; i < in_size; ++i) {
      double s = 0.0;
      for (int o = 0; o < out_size; ++o) {
        double v = at(i, o);
        if (v < 0.0) throw NegativeEntryError("Channel: negative entry");
        s += v;
      }
      if (std::abs(s - 1.0) > sum_tol)
        throw NotNormalizedError("Channel: row " + std::to_string(i) +
                                 " sums to " + std::to_string(s));
    }
    return *this;
  }

  bool is_deterministic(double eps = 1e-12) const {
    for (double v : rows)
      if (v > eps && v < 1.0 - eps) return false;
    return true;
  }
};

/*! \brief Marginal pmf of one axis. */
inline Pmf marginal(const JointDist3& d, Axis a) {
  Pmf m(d.axis_size(a), 0.0);
  std::size_t i = 0;
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      for (int z = 0; z < d.nz; ++z, ++i) {
        int c = a == Axis::X ? x : a == Axis::Y ? y : z;
        m[c] += d.p[i];
      }
  return m;
}

inline Pmf marginal(const JointDist2& d, Axis a) {
  Pmf m(a == Axis::X ? d.nx : d.ny, 0.0);
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y) m[a == Axis::X ? x : y] += d.at(x, y);
  return m;
}

/*! \brief Pairwise marginal, axes in the order given. */
inline JointDist2 marginal_pair(const JointDist3& d, Axis a, Axis b) {
  if (a == b) throw EmptyAxisSetError("marginal_pair: axes must be distinct");
  JointDist2 m(d.axis_size(a), d.axis_size(b));
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      for (int z = 0; z < d.nz; ++z) {
        int cs[3] = {x, y, z};
        m.at(cs[static_cast<int>(a)], cs[static_cast<int>(b)]) += d.at(x, y, z);
      }
  m.labels[0] = d.labels[static_cast<int>(a)];
  m.labels[1] = d.labels[static_cast<int>(b)];
  return m;
}

inline JointDist2 marginal_xy(const JointDist3& d) {
  return marginal_pair(d, Axis::X, Axis::Y);
}

/*! \brief Sums out the axes not in `keep`; dropped axes collapse to size 1. */
inline JointDist3 marginalize(const JointDist3& d, std::span<const Axis> keep) {
  if (keep.empty()) throw EmptyAxisSetError("marginalize: empty axis set");
  bool kept[3] = {false, false, false};
  for (Axis a : keep) kept[static_cast<int>(a)] = true;
  JointDist3 m(kept[0] ? d.nx : 1, kept[1] ? d.ny : 1, kept[2] ? d.nz : 1);
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      for (int z = 0; z < d.nz; ++z)
        m.at(kept[0] ? x : 0, kept[1] ? y : 0, kept[2] ? z : 0) += d.at(x, y, z);
  for (int a = 0; a < 3; ++a)
    if (kept[a]) m.labels[a] = d.labels[a];
  return m;
}

inline JointDist3 marginalize(const JointDist3& d,
                              std::initializer_list<Axis> keep) {
  return marginalize(d, std::span<const Axis>(keep.begin(), keep.size()));
}

inline double mutual_information(const JointDist2& d) {
  Pmf px = marginal(d, Axis::X);
  Pmf py = marginal(d, Axis::Y);
  double mi = 0.0;
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y) {
      double j = d.at(x, y);
      if (j > 0.0) mi += j * std::log2(j / (px[x] * py[y]));
    }
  return mi < 0.0 ? 0.0 : mi;
}

/*! \brief I(A;B) or I(A;B|C) by direct summation over the support. */
inline double mutual_information(const JointDist3& d, Axis a, Axis b,
                                 std::optional<Axis> given = std::nullopt) {
  if (a == b || (given && (*given == a || *given == b)))
    throw EmptyAxisSetError("mutual_information: axes must be distinct");
  const int sa = d.axis_size(a), sb = d.axis_size(b);
  const int sc = given ? d.axis_size(*given) : 1;
  std::vector<double> jab(static_cast<std::size_t>(sa) * sb * sc, 0.0);
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      for (int z = 0; z < d.nz; ++z) {
        int cs[3] = {x, y, z};
        int ia = cs[static_cast<int>(a)];
        int ib = cs[static_cast<int>(b)];
        int ic = given ? cs[static_cast<int>(*given)] : 0;
        jab[(static_cast<std::size_t>(ia) * sb + ib) * sc + ic] += d.at(x, y, z);
      }
  std::vector<double> pac(static_cast<std::size_t>(sa) * sc, 0.0);
  std::vector<double> pbc(static_cast<std::size_t>(sb) * sc, 0.0);
  std::vector<double> pc(sc, 0.0);
  for (int ia = 0; ia < sa; ++ia)
    for (int ib = 0; ib < sb; ++ib)
      for (int ic = 0; ic < sc; ++ic) {
        double j = jab[(static_cast<std::size_t>(ia) * sb + ib) * sc + ic];
        pac[static_cast<std::size_t>(ia) * sc + ic] += j;
        pbc[static_cast<std::size_t>(ib) * sc + ic] += j;
        pc[ic] += j;
      }
  double mi = 0.0;
  for (int ia = 0; ia < sa; ++ia)
    for (int ib = 0; ib < sb; ++ib)
      for (int ic = 0; ic < sc; ++ic) {
        double j = jab[(static_cast<std::size_t>(ia) * sb + ib) * sc + ic];
        if (j <= 0.0) continue;
        double num = j * pc[ic];
        double den = pac[static_cast<std::size_t>(ia) * sc + ic] *
                     pbc[static_cast<std::size_t>(ib) * sc + ic];
        mi += j * std::log2(num / den);
      }
  return mi < 0.0 ? 0.0 : mi;
}

/*! \brief Total variational distance; inputs must share a shape. */
inline double tv_distance(const JointDist3& a, const JointDist3& b) {
  if (a.nx != b.nx || a.ny != b.ny || a.nz != b.nz)
    throw ShapeMismatchError("tv_distance: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.p.size(); ++i) s += std::abs(a.p[i] - b.p[i]);
  return 0.5 * s;
}

inline double tv_distance(const JointDist2& a, const JointDist2& b) {
  if (a.nx != b.nx || a.ny != b.ny)
    throw ShapeMismatchError("tv_distance: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.p.size(); ++i) s += std::abs(a.p[i] - b.p[i]);
  return 0.5 * s;
}

namespace detail {

inline std::vector<std::string> compose_labels(
    const std::vector<std::string>& a, int na,
    const std::vector<std::string>& b, int nb) {
  if (a.empty() && b.empty()) return {};
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(na) * nb);
  auto name = [](const std::vector<std::string>& l, int i) {
    return l.empty() ? std::to_string(i) : l[i];
  };
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) out.push_back(name(a, i) + "|" + name(b, j));
  return out;
}

}  // namespace detail

/*! \brief Product distribution over paired alphabets. */
inline JointDist3 tensor_product(const JointDist3& a, const JointDist3& b) {
  JointDist3 r(a.nx * b.nx, a.ny * b.ny, a.nz * b.nz);
  for (int x1 = 0; x1 < a.nx; ++x1)
    for (int y1 = 0; y1 < a.ny; ++y1)
      for (int z1 = 0; z1 < a.nz; ++z1) {
        double pa = a.at(x1, y1, z1);
        if (pa == 0.0) continue;
        for (int x2 = 0; x2 < b.nx; ++x2)
          for (int y2 = 0; y2 < b.ny; ++y2)
            for (int z2 = 0; z2 < b.nz; ++z2)
              r.at(x1 * b.nx + x2, y1 * b.ny + y2, z1 * b.nz + z2) =
                  pa * b.at(x2, y2, z2);
      }
  for (int ax = 0; ax < 3; ++ax)
    r.labels[ax] = detail::compose_labels(
        a.labels[ax], ax == 0 ? a.nx : ax == 1 ? a.ny : a.nz,
        b.labels[ax], ax == 0 ? b.nx : ax == 1 ? b.ny : b.nz);
  return r;
}

inline JointDist2 tensor_product(const JointDist2& a, const JointDist2& b) {
  JointDist2 r(a.nx * b.nx, a.ny * b.ny);
  for (int x1 = 0; x1 < a.nx; ++x1)
    for (int y1 = 0; y1 < a.ny; ++y1) {
      double pa = a.at(x1, y1);
      if (pa == 0.0) continue;
      for (int x2 = 0; x2 < b.nx; ++x2)
        for (int y2 = 0; y2 < b.ny; ++y2)
          r.at(x1 * b.nx + x2, y1 * b.ny + y2) = pa * b.at(x2, y2);
    }
  return r;
}

/*! \brief Pushforward of one axis through a channel; other axes untouched. */
inline JointDist3 apply_channel(const JointDist3& d, Axis axis,
                                const Channel& ch) {
  if (ch.in_size != d.axis_size(axis))
    throw SizeMismatchError("apply_channel: channel input size " +
                            std::to_string(ch.in_size) + " != axis size " +
                            std::to_string(d.axis_size(axis)));
  JointDist3 r(axis == Axis::X ? ch.out_size : d.nx,
               axis == Axis::Y ? ch.out_size : d.ny,
               axis == Axis::Z ? ch.out_size : d.nz);
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      for (int z = 0; z < d.nz; ++z) {
        double v = d.at(x, y, z);
        if (v == 0.0) continue;
        int cs[3] = {x, y, z};
        int in = cs[static_cast<int>(axis)];
        for (int o = 0; o < ch.out_size; ++o) {
          double w = ch.at(in, o);
          if (w == 0.0) continue;
          int os[3] = {x, y, z};
          os[static_cast<int>(axis)] = o;
          r.at(os[0], os[1], os[2]) += v * w;
        }
      }
  for (int a = 0; a < 3; ++a)
    if (a != static_cast<int>(axis)) r.labels[a] = d.labels[a];
  return r;
}

}  // namespace sct
