#pragma once

// Command-line front end. `run` is separate from main() so tests can drive
// it in-process.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "itelab/itelab.hpp"

namespace itelab::cli {

enum ExitCode { exit_ok = 0, exit_config = 2, exit_numeric = 3 };

inline int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::config_error:
    case ErrorCode::ambiguous_boundary:
    case ErrorCode::nonpositive_profile: return exit_config;
    default: return exit_numeric;
  }
}

using Cell = std::variant<std::string, double, long, bool>;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// A named table rendered as CSV (with a provenance comment line) or as a
/// JSON array of row objects.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }

  void write_csv(std::ostream& os, std::uint32_t hash) const {
    char hex[16];
    std::snprintf(hex, sizeof hex, "%08x", hash);
    os << "# itelab " << version << " config_hash=" << hex << " table=" << name << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) os << ',';
        std::visit(
            [&](const auto& v) {
              using V = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<V, double>) {
                os << format_double(v);
              } else if constexpr (std::is_same_v<V, bool>) {
                os << (v ? "true" : "false");
              } else {
                os << v;
              }
            },
            r[i]);
      }
      os << '\n';
    }
  }

  nlohmann::json to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json obj = nlohmann::json::object();
      for (std::size_t i = 0; i < r.size() && i < columns.size(); ++i)
        std::visit(
            [&](const auto& v) {
              using V = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<V, double>) {
                obj[columns[i]] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
              } else {
                obj[columns[i]] = v;
              }
            },
            r[i]);
      arr.push_back(std::move(obj));
    }
    return arr;
  }
};

struct Options {
  std::string config;
  std::string out_dir;
  std::optional<double> lambda_min, lambda_max, lambda;
  std::optional<int> grid, kmax;
  std::optional<double> tol;
  std::string format = "csv";
};

/// Writes every table of a subcommand: one file per table under out_dir,
/// or all of them to `out`.
inline void emit(const std::vector<Table>& tables, const Options& o, std::uint32_t hash,
                 const std::string& command, std::ostream& out) {
  if (o.format == "json") {
    nlohmann::json doc = nlohmann::json::object();
    char hex[16];
    std::snprintf(hex, sizeof hex, "%08x", hash);
    doc["tool_version"] = version;
    doc["config_hash"] = hex;
    doc["command"] = command;
    for (const auto& t : tables) doc[t.name] = t.to_json();
    if (o.out_dir.empty()) {
      out << doc.dump(2) << '\n';
    } else {
      std::filesystem::create_directories(o.out_dir);
      std::ofstream f(std::filesystem::path(o.out_dir) / (command + ".json"));
      f << doc.dump(2) << '\n';
    }
    return;
  }
  for (const auto& t : tables) {
    if (o.out_dir.empty()) {
      t.write_csv(out, hash);
    } else {
      std::filesystem::create_directories(o.out_dir);
      std::ofstream f(std::filesystem::path(o.out_dir) / (t.name + ".csv"));
      t.write_csv(f, hash);
    }
  }
}

inline std::vector<double> linear_grid(double a, double b, int n) {
  std::vector<double> g;
  if (n <= 1) return {b};
  for (int i = 0; i < n; ++i) g.push_back(a + (b - a) * i / (n - 1));
  return g;
}

struct Context {
  Config cfg;
  Options opt;

  double lambda_min(double fallback) const {
    return opt.lambda_min.value_or(cfg.run.lambda_min.value_or(fallback));
  }
  double lambda_max(double fallback) const {
    return opt.lambda_max.value_or(cfg.run.lambda_max.value_or(fallback));
  }
  int grid(int fallback) const { return opt.grid.value_or(cfg.run.grid.value_or(fallback)); }
  int kmax(int fallback) const { return opt.kmax.value_or(cfg.run.kmax.value_or(fallback)); }
  double tol(double fallback) const { return opt.tol.value_or(cfg.run.tol.value_or(fallback)); }
  const RadialMedium& medium() const { return cfg.medium; }
};

inline const char* class_name(BoundaryClass c) {
  switch (c) {
    case BoundaryClass::b1: return "B1";
    case BoundaryClass::b2: return "B2";
    case BoundaryClass::degenerate: return "degenerate";
  }
  return "?";
}

inline std::vector<Table> cmd_validate(const Context& c) {
  const auto info = validate(c.medium());
  Table t{"validate", {"dimension", "outer_radius", "obstacle_radius", "class", "s", "sigma", "gamma"}, {}};
  t.add({long(c.medium().dimension()), c.medium().outer_radius(), c.medium().obstacle_radius(),
         std::string(class_name(info.cls)), long(info.order), long(sigma(c.medium())),
         gamma(c.medium())});
  return {t};
}

inline std::vector<Table> cmd_dtn(const Context& c) {
  const auto& m = c.medium();
  Table t{"dtn", {"k", "lambda", "f", "f_n", "d", "near_pole", "backend", "discrepancy", "status"}, {}};
  DtnOptions opt;
  opt.record_discrepancy = true;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k <= c.kmax(10); ++k) {
    for (double l : linear_grid(c.lambda_min(-10.0), c.lambda_max(60.0), c.grid(50))) {
      try {
        const auto d = dtn_diff<double>(m, {m.dimension(), k}, l, opt);
        t.add({long(k), l, d.free.value, d.refracted.value, d.value, long(d.near_pole),
               std::string(backend_name(d.backend)), d.discrepancy.value_or(nan),
               std::string("ok")});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::pole_hit) throw;
        t.add({long(k), l, nan, nan, nan, 1L, std::string("-"), nan, std::string("PoleHit")});
      }
    }
  }
  return {t};
}

inline std::vector<Table> cmd_spectrum(const Context& c) {
  const auto& m = c.medium();
  Table t{"spectrum", {"lambda", "N", "N_n"}, {}};
  for (double l : linear_grid(c.lambda_min(1.0), c.lambda_max(100.0), c.grid(50)))
    t.add({l, count_N(m, l), count_Nn(m, l)});
  return {t};
}

inline LocateOptions locate_options(const Context& c) {
  LocateOptions lo;
  lo.root_tol = c.tol(1e-10);
  return lo;
}

inline std::vector<Table> cmd_locate(const Context& c) {
  const auto& m = c.medium();
  const double a = c.lambda_min(choose_alpha(m));
  const double b = c.lambda_max(60.0);
  Table t{"ite", {"lambda", "k", "multiplicity", "kind", "residual"}, {}};
  for (const auto& r : locate_all(m, a, b, locate_options(c)))
    t.add({r.lambda, long(r.mode.k), long(r.multiplicity), std::string(kind_name(r.kind)), r.residual});
  return {t};
}

inline std::vector<Table> cmd_count(const Context& c) {
  const auto& m = c.medium();
  const double alpha = c.lambda_min(choose_alpha(m));
  const double b = c.lambda_max(60.0);
  const auto recs = locate_all(m, alpha, b, locate_options(c));
  Table t{"count", {"lambda", "N_T", "alpha"}, {}};
  for (double l : linear_grid(alpha, b, c.grid(50))) t.add({l, count_NT(recs, alpha, l), alpha});
  return {t};
}

inline std::vector<Table> cmd_weyl(const Context& c) {
  const auto& m = c.medium();
  const double alpha = choose_alpha(m);
  const double b = c.lambda_max(60.0);
  const int n = c.grid(10);
  std::vector<double> cps;
  for (int i = 1; i <= n; ++i) cps.push_back(alpha + (b - alpha) * i / n);
  const auto rep = weyl_report(m, cps, alpha, locate_options(c));
  Table t{"weyl",
          {"lambda", "N_T", "N", "N_n", "sigma_diff", "nminus_alpha", "bound", "main_term",
           "inequality", "shared_pole"},
          {}};
  for (const auto& r : rep.rows)
    t.add({r.lambda, r.NT, r.N, r.Nn, r.sigma_diff, r.nminus_alpha, r.sigma_diff - r.nminus_alpha,
           r.main_term, r.inequality, r.shared});
  Table s{"weyl_summary", {"alpha", "gamma", "sigma", "weyl_constant"}, {}};
  s.add({alpha, rep.gamma, long(rep.sigma), weyl_constant(m.dimension())});
  return {s, t};
}

inline std::vector<Table> cmd_branch(const Context& c) {
  const auto& m = c.medium();
  const double alpha = choose_alpha(m);
  const double b = c.lambda_max(60.0);
  Table dump{"branch", {"lambda", "k", "mu", "status"}, {}};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k <= c.kmax(10); ++k)
    for (double l : linear_grid(c.lambda_min(alpha), b, c.grid(100))) {
      try {
        const auto s = mu(m, {m.dimension(), k}, l);
        dump.add({l, long(k), s.mu, std::string(s.status == BranchStatus::pole ? "pole" : "regular")});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::pole_hit) throw;
        dump.add({l, long(k), nan, std::string("pole")});
      }
    }
  std::vector<double> cps;
  for (int i = 1; i <= 10; ++i) cps.push_back(alpha + (b - alpha) * i / 10);
  const auto ledger = build_ledger(m, alpha, cps, locate_options(c));
  Table id{"ledger",
           {"lambda", "N", "N_n", "N_T", "nminus", "nminus_alpha", "n1", "n2", "residual",
            "shared_pole", "slack", "holds", "NT_ge_n2", "main_inequality"},
           {}};
  for (const auto& r : ledger.checkpoints)
    id.add({r.lambda, r.N, r.Nn, r.NT, r.nminus, r.nminus_alpha, r.n1, r.n2, r.residual,
            r.shared, r.slack, r.holds, r.nt_ge_n2, r.main_inequality});
  Table ev{"pole_events", {"lambda", "k", "m_n", "m_0", "measured", "expected", "shared", "holds"}, {}};
  for (const auto& e : ledger.pole_events)
    ev.add({e.lambda, long(e.mode.k), long(e.m_n), long(e.m_0), e.measured, e.expected,
            e.shared, e.holds});
  return {dump, id, ev};
}

inline std::vector<Table> cmd_symbol(const Context& c) {
  const auto& m = c.medium();
  const double l = c.opt.lambda.value_or(1.0);
  std::vector<int> ks;
  const int top = c.kmax(400);
  for (int k = 50; k <= top; k += 25) ks.push_back(k);
  if (ks.empty() || ks.back() != top) ks.push_back(top);
  Table t{"symbol", {"k", "d_k", "expected", "ratio"}, {}};
  for (const auto& r : asymptotic_limit_check(m, l, ks)) t.add({long(r.k), r.d, r.expected, r.ratio});
  const auto fit = order_fit(m, l, ks);
  const auto info = validate(m);
  Table f{"order_fit", {"lambda", "slope", "expected_slope", "max_residual"}, {}};
  f.add({l, fit.slope, -double(info.order), fit.max_residual});
  return {t, f};
}

inline std::vector<Table> cmd_sector(const Context& c) {
  const auto& m = c.medium();
  Sector sec;
  sec.r_min = c.lambda_min(1.0);
  sec.r_max = c.lambda_max(100.0);
  const int g = c.grid(16);
  const auto scan = sector_scan(m, sec, g, std::max(2, g / 2), c.opt.kmax.value_or(-1));
  Table heat{"sector", {"re_lambda", "im_lambda", "min_abs_d", "argmin_k"}, {}};
  for (const auto& n : scan.nodes) heat.add({n.lambda.real(), n.lambda.imag(), n.min_abs, long(n.argmin_k)});
  Table s{"sector_summary", {"minimum", "re_argmin", "im_argmin", "argmin_k", "k_max", "failed_nodes"}, {}};
  s.add({scan.minimum, scan.argmin.real(), scan.argmin.imag(), long(scan.argmin_k), long(scan.k_max),
         long(scan.failed.size())});
  return {heat, s};
}

inline std::vector<Table> cmd_crosscheck(const Context& c, std::ostream& err, bool& failed) {
  const auto& m = c.medium();
  Table t{"crosscheck", {"k", "lambda", "discrepancy"}, {}};
  double worst = 0.0;
  for (int k = 0; k <= c.kmax(20); ++k)
    for (double l : linear_grid(c.lambda_min(-50.0), c.lambda_max(100.0), c.grid(31))) {
      try {
        const double dev = crosscheck(m, {m.dimension(), k}, l);
        worst = std::max(worst, dev);
        t.add({long(k), l, dev});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::pole_hit) throw;
      }
    }
  const double tol = c.tol(1e-8);
  failed = worst >= tol;
  if (failed) err << "crosscheck: max discrepancy " << format_double(worst) << " >= " << tol << '\n';
  Table s{"crosscheck_summary", {"max_discrepancy", "tolerance"}, {}};
  s.add({worst, tol});
  return {t, s};
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radial interior transmission eigenvalue laboratory"};
  app.set_version_flag("--version", std::string(version));
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "medium description (INI)")->required();
    sub->add_option("--out-dir", o.out_dir, "write tables here instead of stdout");
    sub->add_option("--lambda-min", o.lambda_min);
    sub->add_option("--lambda-max", o.lambda_max);
    sub->add_option("--lambda", o.lambda, "spectral parameter for single-lambda checks");
    sub->add_option("--grid", o.grid, "grid size");
    sub->add_option("--kmax", o.kmax, "largest angular mode");
    sub->add_option("--tol", o.tol, "tolerance");
    sub->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));
  };
  const std::vector<std::string> names{"validate", "dtn",          "spectrum",    "locate",
                                       "count",    "weyl",         "branch",      "symbol-check",
                                       "sector-scan", "crosscheck"};
  std::map<std::string, CLI::App*> subs;
  for (const auto& n : names) add_common(subs[n] = app.add_subcommand(n));
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << version << '\n';
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return exit_config;
  }

  std::string command;
  for (const auto& [n, s] : subs)
    if (s->parsed()) command = n;

  try {
    Context c{load_config(o.config), o};
    std::vector<Table> tables;
    bool failed = false;
    if (command == "validate") tables = cmd_validate(c);
    else if (command == "dtn") tables = cmd_dtn(c);
    else if (command == "spectrum") tables = cmd_spectrum(c);
    else if (command == "locate") tables = cmd_locate(c);
    else if (command == "count") tables = cmd_count(c);
    else if (command == "weyl") tables = cmd_weyl(c);
    else if (command == "branch") tables = cmd_branch(c);
    else if (command == "symbol-check") tables = cmd_symbol(c);
    else if (command == "sector-scan") tables = cmd_sector(c);
    else if (command == "crosscheck") tables = cmd_crosscheck(c, err, failed);
    emit(tables, o, c.cfg.hash, command, out);
    return failed ? exit_numeric : exit_ok;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_numeric;
  }
}

}  // namespace itelab::cli
