#pragma once

// Plain-text distribution files. Line oriented:
//
//   # comment                      (ignored, as are blank lines)
//   name TITLE                     (optional; rest of line, once)
//   alphabets NX NY NZ             (required before labels/entries)
//   labels x TOK TOK ...           (optional; one token per symbol)
//   entry X Y Z PROB               (PROB is NUM/DEN digits or a decimal)
//
// Every entry names a distinct cell; omitted cells are zero. The total
// mass must be 1 within 1e-9. Serialization writes entries in row-major
// order and renders each probability as an exact small fraction when the
// stored double is bit-for-bit a ratio with denominator at most 10^6,
// else with 17 significant digits; parsing either form reproduces the
// stored double exactly, so serialize/parse round-trips are stable.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "sct/dist.hpp"

namespace sct {

class SyntaxError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

struct NamedDist {
  JointDist3 dist;
  std::string name;
};

namespace detail {

inline bool parse_int_token(const std::string& t, long long& out) {
  if (t.empty()) return false;
  auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  return res.ec == std::errc() && res.ptr == t.data() + t.size();
}

inline bool parse_prob_token(const std::string& t, double& out) {
  auto slash = t.find('/');
  if (slash != std::string::npos) {
    long long num = 0, den = 0;
    if (!parse_int_token(t.substr(0, slash), num)) return false;
    if (!parse_int_token(t.substr(slash + 1), den)) return false;
    if (num < 0 || den <= 0) return false;
    out = static_cast<double>(num) / static_cast<double>(den);
    return true;
  }
  if (t.empty() || t[0] == '-' || t[0] == '+') return false;
  auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  return res.ec == std::errc() && res.ptr == t.data() + t.size() &&
         std::isfinite(out) && out >= 0.0;
}

// Continued-fraction search for a small exact fraction: accepted only if
// the double quotient reproduces v bit-for-bit.
inline bool to_fraction(double v, long long& num, long long& den) {
  if (!(v >= 0.0) || !std::isfinite(v)) return false;
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = v;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(x);
    if (fl > 2e6 && q1 >= 1) return false;
    if (fl > 9e17) return false;
    long long a = static_cast<long long>(fl);
    long long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > 1000000) return false;
    if (q2 > 0 && static_cast<double>(p2) / static_cast<double>(q2) == v) {
      num = p2;
      den = q2;
      return true;
    }
    double frac = x - fl;
    if (frac < 1e-12) return false;
    x = 1.0 / frac;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  return false;
}

inline std::string format_prob(double v) {
  long long num = 0, den = 1;
  if (to_fraction(v, num, den)) {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/*! \brief Parse a distribution from a stream; errors carry the 1-based
 * line number. */
inline NamedDist parse_dist(std::istream& in) {
  NamedDist out;
  bool have_alphabets = false;
  bool have_name = false;
  int nx = 0, ny = 0, nz = 0;
  std::vector<std::uint8_t> seen;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) -> void {
    throw SyntaxError("line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head) || head[0] == '#') continue;
    if (head == "name") {
      if (have_name) fail("duplicate name line");
      std::string rest;
      std::getline(ls, rest);
      std::size_t b = rest.find_first_not_of(" \t");
      out.name = b == std::string::npos ? "" : rest.substr(b);
      have_name = true;
    } else if (head == "alphabets") {
      if (have_alphabets) fail("duplicate alphabets line");
      long long a = 0, b = 0, c = 0;
      std::string ta, tb, tc, extra;
      if (!(ls >> ta >> tb >> tc) || (ls >> extra))
        fail("alphabets needs exactly three sizes");
      if (!detail::parse_int_token(ta, a) || !detail::parse_int_token(tb, b) ||
          !detail::parse_int_token(tc, c))
        fail("alphabets sizes must be integers");
      if (a < 1 || b < 1 || c < 1 || a * b * c > 100000000)
        fail("alphabets sizes out of range");
      nx = static_cast<int>(a);
      ny = static_cast<int>(b);
      nz = static_cast<int>(c);
      out.dist = JointDist3(nx, ny, nz);
      seen.assign(out.dist.size(), 0);
      have_alphabets = true;
    } else if (head == "labels") {
      if (!have_alphabets) fail("labels before alphabets");
      std::string axis;
      if (!(ls >> axis) || axis.size() != 1 ||
          (axis[0] != 'x' && axis[0] != 'y' && axis[0] != 'z'))
        fail("labels needs an axis x, y or z");
      int ax = axis[0] == 'x' ? 0 : axis[0] == 'y' ? 1 : 2;
      int n = ax == 0 ? nx : ax == 1 ? ny : nz;
      std::vector<std::string> toks;
      std::string t;
      while (ls >> t) toks.push_back(t);
      if (static_cast<int>(toks.size()) != n)
        fail("labels " + axis + " needs " + std::to_string(n) + " tokens");
      out.dist.labels[ax] = std::move(toks);
    } else if (head == "entry") {
      if (!have_alphabets) fail("entry before alphabets");
      std::string tx, ty, tz, tp, extra;
      if (!(ls >> tx >> ty >> tz >> tp) || (ls >> extra))
        fail("entry needs x y z prob");
      long long x = 0, y = 0, z = 0;
      double prob = 0.0;
      if (!detail::parse_int_token(tx, x) || !detail::parse_int_token(ty, y) ||
          !detail::parse_int_token(tz, z))
        fail("entry indices must be integers");
      if (x < 0 || x >= nx || y < 0 || y >= ny || z < 0 || z >= nz)
        fail("entry index out of range");
      if (!detail::parse_prob_token(tp, prob))
        fail("entry probability must be NUM/DEN or a non-negative decimal");
      std::size_t idx = out.dist.index(static_cast<int>(x),
                                       static_cast<int>(y),
                                       static_cast<int>(z));
      if (seen[idx]) fail("entry cell repeated");
      seen[idx] = 1;
      out.dist.p[idx] = prob;
    } else {
      fail("unknown directive '" + head + "'");
    }
  }
  ++line_no;
  if (!have_alphabets) fail("missing alphabets line");
  out.dist = validate(std::move(out.dist));
  return out;
}

inline NamedDist parse_dist(const std::string& text) {
  std::istringstream in(text);
  return parse_dist(in);
}

inline NamedDist load_dist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_dist(in);
}

inline std::string serialize_dist(const JointDist3& d,
                                  const std::string& name = "") {
  std::ostringstream out;
  if (!name.empty()) out << "name " << name << "\n";
  out << "alphabets " << d.nx << " " << d.ny << " " << d.nz << "\n";
  const char* axes = "xyz";
  for (int ax = 0; ax < 3; ++ax) {
    if (d.labels[ax].empty()) continue;
    out << "labels " << axes[ax];
    for (const std::string& t : d.labels[ax]) out << " " << t;
    out << "\n";
  }
  for (int x = 0; x < d.nx; ++x)
    for (int y = 0; y < d.ny; ++y)
      for (int z = 0; z < d.nz; ++z) {
        double v = d.at(x, y, z);
        if (v == 0.0) continue;
        out << "entry " << x << " " << y << " " << z << " "
            << detail::format_prob(v) << "\n";
      }
  return out.str();
}

inline void save_dist_file(const std::string& path, const JointDist3& d,
                           const std::string& name = "") {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << serialize_dist(d, name);
}

}  // namespace sct
