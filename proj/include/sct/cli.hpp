#pragma once

// Command-line front end. Subcommands:
//
//   compute      one quantity on one distribution
//   audit        monotonicity audit under random LOPC moves
//   certificate  equality certificate for the nested measure
//   reproduce    canned tables for the worked examples
//   sweep        family sweep over a parameter list
//   catalog      list built-in distributions or print one as a file
//
// Each result is one machine-readable key=value line; --json-lines swaps
// those lines for JSON objects with the same keys. Exit code 0 on
// success, 1 on domain errors (bad input, unknown names, non-normalized
// files), 2 on usage errors.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sct/catalog.hpp"
#include "sct/dist.hpp"
#include "sct/dist_io.hpp"
#include "sct/ergodic.hpp"
#include "sct/lopc.hpp"
#include "sct/measures.hpp"

namespace sct {
namespace cli {

inline std::string fmt9(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  if (std::fabs(v) < 5e-10) v = 0.0;  // avoid -0.000000000
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

inline std::string fmt_sci(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// One output line, rendered either as key=value pairs or as JSON.
class Line {
 public:
  Line& str(const std::string& k, const std::string& v) {
    append(k, v);
    j_[k] = v;
    return *this;
  }
  Line& num(const std::string& k, double v) {
    append(k, fmt9(v));
    j_[k] = std::isfinite(v) ? nlohmann::ordered_json(v)
                             : nlohmann::ordered_json(fmt9(v));
    return *this;
  }
  Line& sci(const std::string& k, double v) {
    append(k, fmt_sci(v));
    j_[k] = v;
    return *this;
  }
  Line& integer(const std::string& k, long long v) {
    append(k, std::to_string(v));
    j_[k] = v;
    return *this;
  }
  Line& boolean(const std::string& k, bool v) {
    append(k, v ? "true" : "false");
    j_[k] = v;
    return *this;
  }
  void emit(std::ostream& out, bool json) const {
    if (json)
      out << j_.dump() << "\n";
    else
      out << text_ << "\n";
  }

 private:
  void append(const std::string& k, const std::string& v) {
    if (!text_.empty()) text_ += " ";
    text_ += k + "=" + v;
  }
  std::string text_;
  nlohmann::ordered_json j_ = nlohmann::ordered_json::object();
};

struct DistSpec {
  JointDist3 dist;
  std::string display;
};

inline std::pair<std::string, int> split_catalog_ref(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) return {s, -1};
  std::string name = s.substr(0, colon);
  std::string param = s.substr(colon + 1);
  long long n = 0;
  if (!detail::parse_int_token(param, n) || n < 0)
    throw BadParamError("bad catalog parameter in '" + s + "'");
  return {name, static_cast<int>(n)};
}

inline DistSpec resolve_dist_spec(const std::string& spec) {
  if (spec.rfind("file:", 0) == 0)
    return {load_dist_file(spec.substr(5)).dist, spec};
  if (spec.rfind("catalog:", 0) == 0) {
    auto [name, n] = split_catalog_ref(spec.substr(8));
    return {catalog_dist(name, n), spec};
  }
  throw BadParamError("distribution spec must be file:PATH or catalog:NAME");
}

inline const std::vector<std::pair<std::string, Quantity>>& quantity_names() {
  static const std::vector<std::pair<std::string, Quantity>> names = {
      {"gk", Quantity::gk},
      {"gk-cond", Quantity::gk_cond},
      {"gk-cond-perz", Quantity::gk_cond_perz},
      {"wyner", Quantity::wyner},
      {"wyner-cond", Quantity::wyner_cond},
      {"intrinsic", Quantity::intrinsic},
      {"wyner-intrinsic", Quantity::wyner_intrinsic},
      {"sk-cost", Quantity::sk_cost},
  };
  return names;
}

inline Quantity quantity_from_name(const std::string& s) {
  for (const auto& [name, q] : quantity_names())
    if (name == s) return q;
  throw UnknownNameError("unknown quantity: " + s);
}

struct Options {
  bool json_lines = false;
  std::ostream* out = &std::cout;
};

inline void emit_measure_line(const Options& o, const std::string& dist,
                              const MeasureResult& r) {
  Line line;
  line.str("quantity", quantity_key(r.quantity)).str("dist", dist);
  line.num("value", r.value).boolean("exact", r.certified_exact);
  if (!r.certified_exact) {
    line.sci("residual", r.feasibility_residual);
    line.integer("restarts", r.restarts_used);
    line.boolean("converged", r.converged);
  }
  line.emit(*o.out, o.json_lines);
}

inline void run_compute(const Options& o, const std::string& quantity,
                        const std::string& dist_spec,
                        const MeasureOptions& mopts) {
  DistSpec ds = resolve_dist_spec(dist_spec);
  if (quantity == "bounds") {
    BoundsReport b = bounds_report(ds.dist, mopts);
    Line line;
    line.str("quantity", "bounds").str("dist", ds.display);
    line.num("gk", b.gk).num("mi", b.mi).num("wyner", b.wyner);
    line.num("gk_cond", b.gk_cond).num("mi_cond", b.mi_cond);
    line.num("intrinsic", b.intrinsic);
    line.num("wyner_intrinsic", b.wyner_intrinsic);
    line.num("sk_rate_upper", b.sk_rate_upper);
    line.num("sk_cost_lower", b.sk_cost_lower);
    line.num("sk_cost", b.sk_cost);
    line.num("conversion_rate_bound", b.conversion_rate_bound);
    line.emit(*o.out, o.json_lines);
    return;
  }
  Quantity q = quantity_from_name(quantity);
  MeasureResult r = evaluate_measure(q, ds.dist, mopts);
  emit_measure_line(o, ds.display, r);
}

inline void run_audit(const Options& o, const std::string& measure,
                      const std::optional<std::string>& dist_spec, int trials,
                      std::uint64_t seed, std::optional<double> tol_opt,
                      const MeasureOptions& mopts) {
  Quantity q = quantity_from_name(measure);
  double tol = tol_opt ? *tol_opt
                       : (detail::is_exact_quantity(q) ? 1e-9 : 1e-3);
  AuditReport rep;
  std::string shown;
  if (dist_spec) {
    DistSpec ds = resolve_dist_spec(*dist_spec);
    shown = ds.display;
    rep = audit_measure(q, ds.dist, trials, seed, tol, mopts);
  } else {
    shown = "random:3x3x3";
    rep = audit_random(q, trials, seed, tol, 3, 3, 3, mopts);
  }
  for (const Verdict& v : rep.verdicts)
    if (v.violated) {
      Line line;
      line.str("event", "violation").str("measure", quantity_key(q));
      line.integer("trial", v.trial).str("move", move_kind_name(v.kind));
      line.num("before", v.before).num("after", v.after);
      line.emit(*o.out, o.json_lines);
    }
  Line line;
  line.str("quantity", "audit").str("measure", quantity_key(q));
  line.str("dist", shown);
  line.integer("trials", rep.trials);
  line.integer("violations", rep.violation_count);
  line.num("max_violation", rep.max_violation);
  line.sci("tol", tol);
  line.emit(*o.out, o.json_lines);
}

inline void run_certificate(const Options& o, const std::string& dist_spec,
                            const MeasureOptions& mopts) {
  DistSpec ds = resolve_dist_spec(dist_spec);
  EqualityCertificate c = equality_certificate(ds.dist, mopts);
  Line line;
  line.str("quantity", "certificate").str("dist", ds.display);
  line.num("wyner_intrinsic", c.wyner_intrinsic);
  line.num("intrinsic", c.intrinsic);
  line.num("gap", c.gap);
  line.sci("per_zbar_residual", c.per_zbar_residual);
  line.boolean("q_prime_exists", c.q_prime_exists);
  line.boolean("equality_holds", c.equality_holds);
  line.emit(*o.out, o.json_lines);
}

inline void run_reproduce_example1(const Options& o) {
  struct Row {
    const char* name;
    const char* expected;
  };
  const Row rows[] = {{"p1", "0"}, {"p2", "1/2"}, {"p3", "1"}, {"p5", "1"}};
  std::vector<double> values;
  for (const Row& r : rows)
    values.push_back(gk_ci_conditional(catalog_dist(r.name)));
  const char* res_rows[] = {"p3", "p4", "p5"};
  std::vector<ResolvabilityReport> reports;
  for (const char* name : res_rows)
    reports.push_back(resolvability_flags(catalog_dist(name)));
  std::ostream& out = *o.out;
  if (!o.json_lines) {
    out << "Conditional common information of the worked examples\n";
    out << "  dist  gk_cond      expected\n";
    for (std::size_t i = 0; i < std::size(rows); ++i) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "  %-4s  %s  %s\n", rows[i].name,
                    fmt9(values[i]).c_str(), rows[i].expected);
      out << buf;
    }
    out << "Resolvability of the pair given its common part\n";
    out << "  dist  marginal  conditional\n";
    for (std::size_t i = 0; i < std::size(res_rows); ++i) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "  %-4s  %-8s  %s\n", res_rows[i],
                    reports[i].resolvable ? "yes" : "no",
                    reports[i].conditionally_resolvable ? "yes" : "no");
      out << buf;
    }
  }
  for (std::size_t i = 0; i < std::size(rows); ++i) {
    Line line;
    line.str("row", rows[i].name).str("quantity", "gk_cond");
    line.num("value", values[i]);
    line.emit(out, o.json_lines);
  }
  for (std::size_t i = 0; i < std::size(res_rows); ++i) {
    Line line;
    line.str("row", res_rows[i]).str("quantity", "resolvability");
    line.boolean("marginal", reports[i].resolvable);
    line.boolean("conditional", reports[i].conditionally_resolvable);
    line.emit(out, o.json_lines);
  }
}

inline void run_reproduce_example2(const Options& o,
                                   const MeasureOptions& mopts) {
  const int ns[] = {4, 8, 16};
  std::ostream& out = *o.out;
  struct Row {
    int n;
    double gk_cond, gk_formula, intrinsic, intrinsic_formula;
  };
  std::vector<Row> table;
  for (int n : ns) {
    JointDist3 d = catalog_qn(n);
    double s = 1.0 / std::log2(static_cast<double>(n));
    Row r;
    r.n = n;
    r.gk_cond = gk_ci_conditional(d);
    r.gk_formula = s;
    r.intrinsic = intrinsic_information(d, mopts).value;
    r.intrinsic_formula = s * (1.0 + 0.5 * std::log2(static_cast<double>(n)));
    table.push_back(r);
  }
  if (!o.json_lines) {
    out << "Scaled family: conditional common part vs. intrinsic leakage\n";
    out << "  n    gk_cond      1/log2(n)    intrinsic    formula\n";
    for (const Row& r : table) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "  %-3d  %s  %s  %s  %s\n", r.n,
                    fmt9(r.gk_cond).c_str(), fmt9(r.gk_formula).c_str(),
                    fmt9(r.intrinsic).c_str(),
                    fmt9(r.intrinsic_formula).c_str());
      out << buf;
    }
  }
  for (const Row& r : table) {
    Line line;
    line.str("row", "qn:" + std::to_string(r.n));
    line.num("gk_cond", r.gk_cond).num("gk_formula", r.gk_formula);
    line.num("intrinsic", r.intrinsic);
    line.num("intrinsic_formula", r.intrinsic_formula);
    line.emit(out, o.json_lines);
  }
}

inline void run_sweep_qn(const Options& o, const std::vector<int>& ns) {
  std::ostream& out = *o.out;
  struct Row {
    int n;
    double gk_cond, formula;
  };
  std::vector<Row> table;
  for (int n : ns) {
    JointDist3 d = catalog_qn(n);
    table.push_back(
        {n, gk_ci_conditional(d), 1.0 / std::log2(static_cast<double>(n))});
  }
  if (!o.json_lines) {
    out << "Family sweep: qn conditional common information\n";
    out << "  n    gk_cond      1/log2(n)\n";
    for (const Row& r : table) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "  %-3d  %s  %s\n", r.n,
                    fmt9(r.gk_cond).c_str(), fmt9(r.formula).c_str());
      out << buf;
    }
  }
  for (const Row& r : table) {
    Line line;
    line.str("row", "qn:" + std::to_string(r.n));
    line.num("gk_cond", r.gk_cond).num("formula", r.formula);
    line.emit(out, o.json_lines);
  }
}

inline void run_catalog(const Options& o,
                        const std::optional<std::string>& name) {
  std::ostream& out = *o.out;
  if (!name) {
    for (const CatalogInfo& e : catalog_list()) {
      if (o.json_lines) {
        Line line;
        line.str("name", e.name).boolean("parametric", e.parametric);
        line.str("shape", e.shape).str("summary", e.summary);
        line.emit(out, true);
      } else {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-8s  %-14s  %s\n", e.name.c_str(),
                      e.shape.c_str(), e.summary.c_str());
        out << buf;
      }
    }
    return;
  }
  auto [base, n] = split_catalog_ref(*name);
  JointDist3 d = catalog_dist(base, n);
  out << serialize_dist(d, *name);
}

/*! \brief Full argument parsing and dispatch; returns the process exit
 * code. Output goes to `out`, error text to `err`. */
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{
      "Secrecy and common-information toolkit for finite tripartite "
      "distributions"};
  app.require_subcommand(1);
  Options opts;
  opts.out = &out;
  app.add_flag("--json-lines", opts.json_lines,
               "emit one JSON object per result line");

  std::vector<std::string> qnames;
  for (const auto& [name, q] : quantity_names()) qnames.push_back(name);
  std::vector<std::string> qnames_bounds = qnames;
  qnames_bounds.push_back("bounds");

  int restarts = 64;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  auto add_optim_flags = [&](CLI::App* cmd) {
    cmd->add_option("--restarts", restarts,
                    "number of optimizer starts per solve")
        ->envname("SCT_RESTARTS");
    cmd->add_option("--seed", seed, "base random seed")->envname("SCT_SEED");
    cmd->add_option("--tol", tol, "feasibility tolerance");
  };

  auto* compute =
      app.add_subcommand("compute", "evaluate one quantity on a distribution");
  std::string quantity, dist_spec;
  compute->add_option("--quantity", quantity, "what to compute")
      ->required()
      ->check(CLI::IsMember(qnames_bounds));
  compute->add_option("--dist", dist_spec, "file:PATH or catalog:NAME[:N]")
      ->required();
  add_optim_flags(compute);

  auto* audit = app.add_subcommand(
      "audit", "audit a measure's monotonicity under random LOPC moves");
  std::string measure;
  int trials = 100;
  std::string audit_dist;
  double audit_tol = -1.0;
  audit->add_option("--measure", measure, "measure to audit")
      ->required()
      ->check(CLI::IsMember(qnames));
  audit->add_option("--trials", trials, "number of random moves")->required();
  audit->add_option("--dist", audit_dist,
                    "fixed distribution (default: fresh random per trial)");
  audit->add_option("--band", audit_tol,
                    "violation band (default 1e-9 exact, 1e-3 optimizer)");
  add_optim_flags(audit);

  auto* cert = app.add_subcommand(
      "certificate", "equality certificate for the nested measure");
  std::string cert_dist;
  cert->add_option("--dist", cert_dist, "file:PATH or catalog:NAME[:N]")
      ->required();
  add_optim_flags(cert);

  auto* repro = app.add_subcommand("reproduce", "print a worked-example table");
  std::string example;
  repro->add_option("example", example, "example1 or example2")
      ->required()
      ->check(CLI::IsMember({"example1", "example2"}));
  add_optim_flags(repro);

  auto* sweep = app.add_subcommand("sweep", "sweep a parametric family");
  std::string family;
  std::vector<int> sweep_ns;
  sweep->add_option("family", family, "family name (qn)")
      ->required()
      ->check(CLI::IsMember({"qn"}));
  sweep->add_option("--n", sweep_ns, "parameter values")
      ->required()
      ->expected(-1);

  auto* cat = app.add_subcommand(
      "catalog", "list catalog entries or print one in file format");
  std::string cat_name;
  cat->add_option("name", cat_name, "entry name, NAME or NAME:N");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);  // CLI11 consumes the vector in reversed order
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  MeasureOptions mopts;
  mopts.restarts = restarts;
  mopts.seed = seed;
  mopts.tol = tol;

  try {
    if (compute->parsed()) {
      run_compute(opts, quantity, dist_spec, mopts);
    } else if (audit->parsed()) {
      std::optional<std::string> ad;
      if (!audit_dist.empty()) ad = audit_dist;
      std::optional<double> at;
      if (audit_tol >= 0.0) at = audit_tol;
      run_audit(opts, measure, ad, trials, seed, at, mopts);
    } else if (cert->parsed()) {
      run_certificate(opts, cert_dist, mopts);
    } else if (repro->parsed()) {
      if (example == "example1")
        run_reproduce_example1(opts);
      else
        run_reproduce_example2(opts, mopts);
    } else if (sweep->parsed()) {
      run_sweep_qn(opts, sweep_ns);
    } else if (cat->parsed()) {
      std::optional<std::string> cn;
      if (!cat_name.empty()) cn = cat_name;
      run_catalog(opts, cn);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

inline int run_cli(int argc, char** argv, std::ostream& out,
                   std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace cli
}  // namespace sct
