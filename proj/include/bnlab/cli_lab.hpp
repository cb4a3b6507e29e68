#pragma once

// Configuration, report tables and the subcommand driver behind the `bnlab`
// executable. Kept header-only so tests can run commands in-process.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bnlab/asymptotic_verifier.hpp"
#include "bnlab/bubble_engine.hpp"
#include "bnlab/errors.hpp"
#include "bnlab/radial_bn_solver.hpp"
#include "bnlab/singular_geometry.hpp"
#include "bnlab/sobolev_extremals.hpp"
#include "bnlab/svg_plot.hpp"

namespace bnlab {

// ---------------------------------------------------------------------------
// Configuration

struct LabConfig {
  // [setup]
  int n = 6;
  double p = 2.0;
  // [domain]
  double alpha = 1.2;
  double kappa = 1.0;
  double spine_length = 1.0;  // key L
  double bulk_radius = 0.5;
  // [coefficients]
  std::string kind = "scalar";  // scalar | matrix
  double a0 = 1.0;
  double C0 = 1.0;
  double sigma = 5.0;
  std::vector<double> A0;  // row-major n*n entries, or one entry s for s*I
  double gamma = 5.0;
  // [sequence]
  double delta = 0.5;
  double eps0 = 0.1;
  double ratio = 0.6;
  int j_max = 10;
  // [bubble]
  std::optional<double> beta;  // empty: auto-midpoint
  double plateau = 0.5;
  // [solver]
  double lambda = 1.0;
  double tol = 0.05;       // relative tolerance of verification checks
  double ball_tol = 1e-6;  // first-zero tolerance of the ball solver
  int jobs = 1;
  // [output]
  std::string format = "csv";
  std::string prefix;  // writes PREFIX.csv and PREFIX.json when set
  std::string plot;

  bool linear() const { return kind == "matrix"; }

  Matrix A0_matrix() const {
    Matrix A(n, n);
    if (A0.size() == 1) {
      A = A0[0] * Matrix::Identity(n, n);
    } else if (A0.size() == static_cast<std::size_t>(n) * n) {
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) A(i, k) = A0[i * n + k];
    } else {
      throw ConfigError("coefficients.A0 needs 1 or n*n = " + std::to_string(n * n) +
                        " entries, got " + std::to_string(A0.size()));
    }
    return A;
  }

  void validate() const {
    if (kind != "scalar" && kind != "matrix")
      throw ConfigError("coefficients.kind must be scalar or matrix");
    if (format != "csv" && format != "json") throw ConfigError("output.format must be csv or json");
    if (!(tol > 0.0) || !(ball_tol > 0.0)) throw ConfigError("tolerances must be positive");
    if (jobs < 1) throw ConfigError("solver.jobs must be >= 1");
    if (!(plateau > 0.0 && plateau < 1.0)) throw ConfigError("bubble.plateau must lie in (0, 1)");
    if (linear()) A0_matrix();
  }

  Experiment experiment() const {
    validate();
    Experiment e;
    e.n = n;
    e.p = p;
    e.alpha = alpha;
    e.kappa = kappa;
    e.spine_length = spine_length;
    e.bulk_radius = bulk_radius;
    if (linear())
      e.coefficients = MatrixCoefficients{A0_matrix(), C0, gamma};
    else
      e.coefficients = ScalarCoefficients{a0, C0, sigma};
    e.delta = delta;
    e.eps0 = eps0;
    e.ratio = ratio;
    e.j_max = j_max;
    e.beta = beta;
    e.plateau = plateau;
    e.jobs = jobs;
    return e;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline double parse_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError("key " + key + ": '" + text + "' is not a finite number");
  return v;
}

inline int parse_int(const std::string& key, const std::string& text) {
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("key " + key + ": '" + text + "' is not an integer");
  return v;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(text);
  while (in >> token) {
    for (char& c : token)
      if (c == ',' || c == ';') c = ' ';
    std::istringstream parts(token);
    std::string piece;
    while (parts >> piece) out.push_back(parse_real(key, piece));
  }
  if (out.empty()) throw ConfigError("key " + key + " is empty");
  return out;
}

}  // namespace detail

/// Parses the sectioned key-value format:
///
///     [section]
///     key = value   # comment
///
/// Every key must belong to its section; unknown sections or keys,
/// duplicates and malformed numbers are rejected with ConfigError.
inline LabConfig parse_config(const std::string& text) {
  LabConfig c;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const auto real = [](double& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = detail::parse_real(k, v); };
  };
  const auto integer = [](int& field) -> Setter {
    return [&field](const std::string& k, const std::string& v) { field = detail::parse_int(k, v); };
  };
  const auto word = [](std::string& field) -> Setter {
    return [&field](const std::string&, const std::string& v) { field = v; };
  };
  const std::map<std::string, std::map<std::string, Setter>> schema{
      {"setup", {{"n", integer(c.n)}, {"p", real(c.p)}}},
      {"domain",
       {{"alpha", real(c.alpha)}, {"kappa", real(c.kappa)}, {"L", real(c.spine_length)},
        {"bulk_radius", real(c.bulk_radius)}}},
      {"coefficients",
       {{"kind", word(c.kind)},
        {"a0", real(c.a0)},
        {"C0", real(c.C0)},
        {"sigma", real(c.sigma)},
        {"gamma", real(c.gamma)},
        {"A0", [&c](const std::string& k, const std::string& v) { c.A0 = detail::parse_list(k, v); }}}},
      {"sequence",
       {{"delta", real(c.delta)}, {"eps0", real(c.eps0)}, {"ratio", real(c.ratio)},
        {"j_max", integer(c.j_max)}}},
      {"bubble",
       {{"beta",
         [&c](const std::string& k, const std::string& v) {
           if (v == "auto-midpoint")
             c.beta.reset();
           else
             c.beta = detail::parse_real(k, v);
         }},
        {"plateau", real(c.plateau)}}},
      {"solver",
       {{"lambda", real(c.lambda)}, {"tol", real(c.tol)}, {"ball_tol", real(c.ball_tol)},
        {"jobs", integer(c.jobs)}}},
      {"output", {{"format", word(c.format)}, {"prefix", word(c.prefix)}, {"plot", word(c.plot)}}},
  };
  std::istringstream in(text);
  std::string line, section;
  std::set<std::string> seen;
  for (int number = 1; std::getline(in, line); ++number) {
    const auto hash = line.find_first_of("#;");
    // ';' separates matrix rows inside A0, so only '#' starts a comment there.
    const bool matrix_line = detail::trim(line).rfind("A0", 0) == 0;
    if (hash != std::string::npos) {
      const auto cut = matrix_line ? line.find('#') : hash;
      if (cut != std::string::npos) line.erase(cut);
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(number) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (!schema.count(section)) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where + "key outside any section");
    const auto& keys = schema.at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError(where + "unknown key " + section + "." + key);
    if (!seen.insert(section + "." + key).second)
      throw ConfigError(where + "duplicate key " + section + "." + key);
    if (value.empty()) throw ConfigError(where + "empty value for " + section + "." + key);
    it->second(section + "." + key, value);
  }
  c.validate();
  return c;
}

inline LabConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

// ---------------------------------------------------------------------------
// Reports

using Cell = std::variant<std::monostate, double, long long, bool, std::string>;

struct Report {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw InvariantError("report row width mismatch");
    rows.push_back(std::move(row));
  }

  std::string to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += csv_cell(row[i]);
      }
      out += '\n';
    }
    return out;
  }

  nlohmann::ordered_json json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["meta"] = meta;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      nlohmann::ordered_json r = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < row.size(); ++i) r[columns[i]] = json_cell(row[i]);
      j["rows"].push_back(std::move(r));
    }
    return j;
  }

  std::string to_json() const { return json().dump(2) + "\n"; }

  static std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

 private:
  static std::string csv_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::monostate>) return "";
          else if constexpr (std::is_same_v<T, double>) return number(v);
          else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
          else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
          else {
            if (v.find_first_of(",\"\n") == std::string::npos) return v;
            std::string q = "\"";
            for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            return q + "\"";
          }
        },
        c);
  }
  static nlohmann::ordered_json json_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> nlohmann::ordered_json {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
          else if constexpr (std::is_same_v<T, double>) {
            if (!std::isfinite(v)) return nullptr;
            return v;
          } else return v;
        },
        c);
  }
};

inline nlohmann::ordered_json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline nlohmann::ordered_json json_numbers(const std::vector<double>& v) {
  auto a = nlohmann::ordered_json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

inline Cell index_cell(const std::optional<std::size_t>& j) {
  if (!j) return std::monostate{};
  return static_cast<long long>(*j);
}

// ---------------------------------------------------------------------------
// Commands

struct CommandResult {
  Report report;
  int exit_code = 0;
  std::string message;  // printed to stderr when non-empty
  std::optional<std::string> svg;
};

inline CommandResult run_extremal(const LabConfig& cfg) {
  CommandResult out;
  auto& r = out.report;
  r.command = "extremal";
  r.columns = {"n", "p", "p_star", "K_inv_pow_p", "K_inv_pow_p_minimized", "relative_gap",
               "instanton_quotient", "quotient_err", "normalization", "normalization_err",
               "mass_constant", "mass_constant_err"};
  const auto setup = make_setup(cfg.n, cfg.p);
  const auto inst = make_instanton(setup);
  const auto sharp = sharp_constant(setup, 1e-6);
  const double q = instanton_quotient(inst);
  Cell a = std::monostate{}, a_err = std::monostate{};
  if (setup.supercritical_dim) {
    const auto m = mass_constant(inst);
    a = m.a, a_err = m.error;
  }
  r.add_row({static_cast<long long>(cfg.n), cfg.p, setup.p_star, sharp.k_inv_pow_p,
             sharp.minimized_inv_pow_p, sharp.relative_gap, q,
             std::abs(q - sharp.k_inv_pow_p), inst.normalization, inst.normalization_error, a,
             a_err});
  if (std::abs(q - sharp.k_inv_pow_p) > 1e-6 * sharp.k_inv_pow_p) {
    out.exit_code = 3;
    out.message = "instanton quotient does not reproduce K(n,p)^{-p}";
  }
  return out;
}

inline CommandResult run_check_domain(const LabConfig& cfg) {
  CommandResult out;
  auto& r = out.report;
  r.command = "check-domain";
  r.columns = {"j", "eps", "ball_radius", "clearance", "contained"};
  const auto setup = make_setup(cfg.n, cfg.p);
  const auto dom = build_domain(setup, cfg.alpha, cfg.kappa, cfg.spine_length, cfg.bulk_radius);
  r.meta["alpha"] = cfg.alpha;
  r.meta["kappa"] = cfg.kappa;
  r.meta["delta"] = cfg.delta;
  // Per-j rows are recorded even past a failure, so the table shows where
  // containment breaks.
  std::optional<int> failing;
  for (int j = 0; j <= cfg.j_max; ++j) {
    const double eps = cfg.eps0 * std::pow(cfg.ratio, j);
    const double need = cfg.delta * std::pow(eps, cfg.alpha);
    const double room = dom.axis_clearance(eps);
    const bool ok = need <= room;
    if (!ok && !failing) failing = j;
    r.add_row({static_cast<long long>(j), eps, need, room, ok});
  }
  try {
    witness_sequence(dom, cfg.delta, cfg.eps0, cfg.ratio, cfg.j_max);
  } catch (const WitnessError& e) {
    out.exit_code = 3;
    out.message = e.what();
    r.meta["failing_j"] = e.failing_index();
  }
  if (failing && out.exit_code == 0) throw InvariantError("containment table and witness disagree");
  r.meta["all_contained"] = out.exit_code == 0;

  constexpr int kSamples = 2000;
  const Vector x0 = dom.tip();
  if (cfg.linear()) {
    const auto field = make_matrix_field(cfg.A0_matrix(), cfg.C0, cfg.gamma, x0);
    r.meta["hypothesis"] = "H1";
    r.meta["hypothesis_holds"] = check_h1(field, dom, kSamples);
  } else {
    const auto field = make_scalar_field(cfg.a0, cfg.C0, cfg.sigma, x0);
    r.meta["hypothesis"] = "H2";
    r.meta["hypothesis_holds"] = check_h2(field, dom, kSamples);
  }
  if (!r.meta["hypothesis_holds"].get<bool>() && out.exit_code == 0) {
    out.exit_code = 3;
    out.message = "coefficient hypothesis fails on the sampled domain";
  }
  return out;
}

inline std::vector<std::string> theta_labels(const std::vector<double>& thetas) {
  std::vector<std::string> out;
  for (double t : thetas) {
    std::ostringstream s;
    s << t;
    out.push_back(s.str());
  }
  return out;
}

/// The per-j table: j, eps, I1, I2, I3, I4_sigma, Q, bound, margin_ratio,
/// err_est, followed by one I4 column per extra theta.
inline Report bubble_table(const PreparedExperiment& pe, const std::vector<BubbleRow>& rows,
                           const QuotientReport& q, const std::vector<double>& extra_thetas,
                           const std::string& command) {
  Report r;
  r.command = command;
  r.columns = {"j", "eps", "I1", "I2", "I3", "I4_sigma", "Q", "bound", "margin_ratio", "err_est"};
  const auto labels = theta_labels(extra_thetas);
  for (const auto& l : labels) r.columns.push_back("I4_theta_" + l);
  const double theta = pe.coefficients.theta;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto& I = rows[j].integrals;
    std::vector<Cell> row{static_cast<long long>(j), rows[j].eps, I.I1, I.I2, I.I3, I.I4.at(theta),
                          q.Q[j], q.bound, q.margin_ratio[j], I.max_relative_error()};
    for (double t : extra_thetas) row.push_back(I.I4.at(t));
    r.add_row(std::move(row));
  }
  return r;
}

inline std::vector<double> all_thetas(const PreparedExperiment& pe, const std::vector<double>& extra) {
  std::vector<double> t{pe.coefficients.theta};
  for (double x : extra)
    if (x != pe.coefficients.theta) t.push_back(x);
  return t;
}

inline CommandResult run_bubbles(const LabConfig& cfg, const std::vector<double>& extra_thetas) {
  const auto pe = prepare(cfg.experiment());
  for (double t : extra_thetas)
    if (!(t > 0.0)) throw ParameterError("theta must be positive");
  const auto rows = evaluate_sequence(pe, all_thetas(pe, extra_thetas));
  const auto q = quotient_sequence(pe, rows, cfg.lambda);
  CommandResult out;
  std::vector<double> extra;
  for (double t : extra_thetas)
    if (t != pe.coefficients.theta) extra.push_back(t);
  out.report = bubble_table(pe, rows, q, extra, "bubbles");
  out.report.meta["beta"] = pe.beta;
  out.report.meta["lambda"] = cfg.lambda;
  std::vector<double> eps, d1, d2;
  for (const auto& row : rows) {
    eps.push_back(row.eps);
    d1.push_back(row.integrals.d1);
    d2.push_back(row.integrals.d2);
  }
  const auto orders = term_orders(pe.setup, pe.coefficients.theta, pe.experiment.alpha, pe.beta);
  out.svg = render_loglog_svg("Bubble deficits", "eps_j", "deficit",
                              {{"I1 - K^-p", eps, d1, {}, {}, orders.cutoff_term},
                               {"1 - I2", eps, d2, {}, {}, orders.norm_term}});
  return out;
}

inline CommandResult run_slopes(const LabConfig& cfg) {
  const auto pe = prepare(cfg.experiment());
  const auto rows = evaluate_sequence(pe);
  const auto table = verify_estimates(pe, rows);
  CommandResult out;
  auto& r = out.report;
  r.command = "slopes";
  r.columns = {"quantity", "claimed_exponent", "fitted_exponent", "relative_deviation",
               "r_squared", "usable", "points", "first_j", "last_j"};
  std::vector<LogLogSeries> series;
  bool failed = false;
  for (const auto& row : table.rows) {
    const bool usable = row.fit.usable && row.fit.points >= 4;
    const double dev = usable ? row.fit.relative_deviation() : std::nan("");
    r.add_row({row.name, row.fit.claimed_exponent,
               usable ? Cell{row.fit.fitted_exponent} : Cell{std::monostate{}},
               usable ? Cell{dev} : Cell{std::monostate{}},
               usable ? Cell{row.fit.r_squared} : Cell{std::monostate{}}, usable,
               static_cast<long long>(row.fit.points),
               row.window.empty() ? Cell{std::monostate{}} : Cell{static_cast<long long>(row.window.front())},
               row.window.empty() ? Cell{std::monostate{}} : Cell{static_cast<long long>(row.window.back())}});
    if (usable && dev > cfg.tol) failed = true;
    LogLogSeries s{row.name, {}, {}, {}, {}, row.fit.claimed_exponent};
    for (auto j : row.window) {
      const auto& I = rows[j].integrals;
      s.x.push_back(rows[j].eps);
      if (row.name == "gradient_deficit") s.y.push_back(I.d1);
      else if (row.name == "norm_deficit") s.y.push_back(I.d2);
      else if (row.name == "mass_term") s.y.push_back(I.I3);
      else s.y.push_back(I.I4.at(pe.coefficients.theta));
    }
    if (usable) s.fitted_slope = row.fit.fitted_exponent, s.fitted_log_prefactor = row.fit.log_prefactor;
    series.push_back(std::move(s));
  }
  r.meta["beta"] = pe.beta;
  r.meta["i3_prefactor"] = table.i3_prefactor;
  r.meta["mass_constant"] = table.mass_constant;
  r.meta["prefactor_deviation"] = table.prefactor_deviation;
  r.meta["tolerance"] = cfg.tol;
  if (table.prefactor_deviation > cfg.tol) failed = true;
  if (failed) {
    out.exit_code = 3;
    out.message = "a usable fitted order or the I3 prefactor deviates beyond tolerance";
  }
  out.svg = render_loglog_svg("Asymptotic orders", "eps_j", "value", series);
  return out;
}

inline CommandResult run_quotient(const LabConfig& cfg, const std::vector<double>& extra_thetas) {
  const auto pe = prepare(cfg.experiment());
  const auto rows = evaluate_sequence(pe, all_thetas(pe, extra_thetas));
  const auto q = quotient_sequence(pe, rows, cfg.lambda);
  std::vector<double> extra;
  for (double t : extra_thetas)
    if (t != pe.coefficients.theta) extra.push_back(t);
  CommandResult out;
  out.report = bubble_table(pe, rows, q, extra, "quotient");
  auto& m = out.report.meta;
  m["lambda"] = cfg.lambda;
  m["beta"] = pe.beta;
  m["bound"] = q.bound;
  m["first_strict_j"] = q.first_strict_j ? nlohmann::ordered_json(*q.first_strict_j) : nullptr;
  m["Q"] = json_numbers(q.Q);
  m["margin"] = json_numbers(q.margin);
  m["margin_error"] = json_numbers(q.margin_error);
  m["margin_ratio"] = json_numbers(q.margin_ratio);
  const auto usable = q.usable_rows();
  m["usable_j"] = usable;
  if (pe.reduction) {
    m["linear"] = true;
    m["C1"] = pe.coefficients.weight;
    m["C2"] = pe.coefficients.lambda_factor;
    m["Q_raw"] = json_numbers(q.Q_raw);
  }
  if (cfg.lambda > 0.0 && !q.first_strict_j) {
    out.exit_code = 3;
    out.message = "no recorded j satisfies Q_j < bound";
  }
  if (cfg.lambda == 0.0 &&
      std::any_of(q.margin.begin(), q.margin.end(), [](double x) { return x > 0.0; })) {
    out.exit_code = 3;
    out.message = "a bubble beat the Sobolev level without the lambda term";
  }
  LogLogSeries margin{"bound - Q_j", q.eps, q.margin, {}, {}, pe.setup.p * pe.beta};
  LogLogSeries leading{"a lambda eps^(p beta)", q.eps, {}, {}, {}, {}};
  for (std::size_t j = 0; j < q.eps.size(); ++j)
    leading.y.push_back(q.margin[j] / q.margin_ratio[j]);
  out.svg = render_loglog_svg("Quotient margin", "eps_j", "margin", {margin, leading});
  return out;
}

inline CommandResult run_sweep(const LabConfig& cfg) {
  const auto e = cfg.experiment();
  const auto setup = make_setup(e.n, e.p);
  const auto adm = admissibility(setup, e.exponent(), e.alpha, e.linear());
  std::set<double> alphas{1.0, e.alpha, adm.alpha_max, adm.alpha_max + 0.05};
  const std::vector<double> list(alphas.begin(), alphas.end());
  std::vector<SweepRow> rows(list.size());
  parallel_for(list.size(), cfg.jobs, [&](std::size_t i) { rows[i] = sweep_point(e, cfg.lambda, list[i]); });
  CommandResult out;
  auto& r = out.report;
  r.command = "sweep";
  r.columns = {"alpha", "alpha_max", "beta_lo", "beta_hi", "beta", "region", "admissible",
               "p_beta", "exponent", "cutoff_order", "lambda_dominates", "evaluated",
               "achieved", "first_strict_j", "note"};
  for (const auto& s : rows)
    r.add_row({s.alpha, s.alpha_max, s.beta_interval.lo, s.beta_interval.hi, s.beta, s.region,
               s.admissible, s.orders.lambda_term, s.orders.weight_term, s.orders.cutoff_term,
               s.orders.lambda_dominates(), s.evaluated, s.achieved, index_cell(s.first_strict_j),
               s.note});
  r.meta["lambda"] = cfg.lambda;
  r.meta["exploratory"] = "rows with alpha >= alpha_max are in the no-theorem region";
  return out;
}

inline CommandResult run_ball(const LabConfig& cfg, bool threshold, bool lambda_given) {
  CommandResult out;
  auto& r = out.report;
  r.command = "ball";
  BallSearch search;
  search.zero_tolerance = cfg.ball_tol;
  search.jobs = cfg.jobs;
  if (threshold) {
    const auto t = existence_threshold(cfg.n, 0.002, search);
    const double reference = cfg.n == 3 ? std::numbers::pi * std::numbers::pi / 4.0 : 0.0;
    r.columns = {"n", "threshold", "bracket_width", "lambda1", "threshold_over_lambda1",
                 "reference", "relative_error"};
    r.add_row({static_cast<long long>(cfg.n), t.threshold, t.bracket_width, t.lambda1,
               t.threshold / t.lambda1, reference,
               cfg.n == 3 ? Cell{std::abs(t.threshold - reference) / reference}
                          : Cell{std::monostate{}}});
    r.meta["note"] = cfg.n == 3 ? "reference is lambda1/4"
                                : "true threshold is 0; the value is the numerical floor";
    return out;
  }
  const double lambda1 = principal_eigenvalue(cfg.n);
  const double lambda = lambda_given ? cfg.lambda : 0.5 * lambda1;
  r.columns = {"n", "lambda", "lambda1", "solved", "shoot_height", "first_zero", "zero_tol",
               "max_residual"};
  const auto s = solve_ball(cfg.n, lambda, search);
  if (s) {
    const auto prof = shoot(cfg.n, lambda, *s);
    r.add_row({static_cast<long long>(cfg.n), lambda, lambda1, true, *s,
               prof.first_zero ? Cell{*prof.first_zero} : Cell{std::monostate{}}, cfg.ball_tol,
               prof.max_residual});
  } else {
    r.add_row({static_cast<long long>(cfg.n), lambda, lambda1, false, std::monostate{},
               std::monostate{}, cfg.ball_tol, std::monostate{}});
    r.meta["result"] = "NoSolution";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Driver

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

/// Parses argv, runs one subcommand and writes its report. Returns the exit
/// status: 0 success, 1 invalid input, 2 numerical failure, 3 failed check.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Numerical lab for critical Sobolev bubbles on singular domains", "bnlab"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::optional<int> n, j_max, jobs;
  std::optional<double> p, alpha, beta, sigma, gamma, lambda, eps_start, eps_ratio, tol;
  std::vector<double> thetas;
  std::optional<std::string> format, plot, prefix;
  bool threshold = false;
  app.add_option("--config", config_path, "config file")->check(CLI::ExistingFile);
  app.add_option("--n", n, "dimension");
  app.add_option("--p", p, "exponent p");
  app.add_option("--alpha", alpha, "cusp order");
  app.add_option("--beta", beta, "concentration exponent");
  app.add_option("--sigma", sigma, "scalar coefficient exponent");
  app.add_option("--gamma", gamma, "matrix coefficient exponent");
  app.add_option("--lambda", lambda, "lambda");
  app.add_option("--eps-start", eps_start, "eps_0");
  app.add_option("--eps-ratio", eps_ratio, "ratio of the eps schedule");
  app.add_option("--j-max", j_max, "last sequence index");
  app.add_option("--theta", thetas, "extra weight exponents for I4");
  app.add_option("--tol", tol, "relative tolerance of verification checks");
  app.add_option("--jobs", jobs, "worker threads");
  app.add_option("--out", format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--plot", plot, "SVG output path");
  app.add_option("--prefix", prefix, "write PREFIX.csv and PREFIX.json");
  app.add_flag("--threshold", threshold, "ball: bisect for the existence threshold");
  const std::vector<std::pair<std::string, std::string>> commands{
      {"extremal", "sharp constant, instanton and mass constant"},
      {"check-domain", "witness balls and coefficient hypothesis"},
      {"bubbles", "bubble integrals per j"},
      {"slopes", "fitted asymptotic orders"},
      {"quotient", "energy quotients against the compactness level"},
      {"sweep", "exploratory sweep across alpha_max"},
      {"ball", "radial problem on the unit ball"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    LabConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (n) cfg.n = *n;
    if (p) cfg.p = *p;
    if (alpha) cfg.alpha = *alpha;
    if (beta) cfg.beta = *beta;
    if (sigma) {
      if (cfg.linear()) throw ConfigError("--sigma given for a matrix configuration");
      cfg.sigma = *sigma;
    }
    if (gamma) {
      if (!cfg.linear()) throw ConfigError("--gamma given for a scalar configuration");
      cfg.gamma = *gamma;
    }
    if (lambda) cfg.lambda = *lambda;
    if (eps_start) cfg.eps0 = *eps_start;
    if (eps_ratio) cfg.ratio = *eps_ratio;
    if (j_max) cfg.j_max = *j_max;
    if (tol) cfg.tol = *tol;
    if (jobs) cfg.jobs = *jobs;
    if (format) cfg.format = *format;
    if (plot) cfg.plot = *plot;
    if (prefix) cfg.prefix = *prefix;
    cfg.validate();

    CommandResult result;
    if (command == "extremal") result = run_extremal(cfg);
    else if (command == "check-domain") result = run_check_domain(cfg);
    else if (command == "bubbles") result = run_bubbles(cfg, thetas);
    else if (command == "slopes") result = run_slopes(cfg);
    else if (command == "quotient") result = run_quotient(cfg, thetas);
    else if (command == "sweep") result = run_sweep(cfg);
    else result = run_ball(cfg, threshold, lambda.has_value());

    out << (cfg.format == "json" ? result.report.to_json() : result.report.to_csv());
    if (!cfg.prefix.empty()) {
      write_file(cfg.prefix + ".csv", result.report.to_csv());
      write_file(cfg.prefix + ".json", result.report.to_json());
    }
    if (!cfg.plot.empty()) {
      if (!result.svg) throw ConfigError("command " + command + " has no plot");
      write_file(cfg.plot, *result.svg);
    }
    if (!result.message.empty()) err << "bnlab " << command << ": " << result.message << "\n";
    return result.exit_code;
  } catch (const Error& e) {
    err << "bnlab " << command << ": " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "bnlab " << command << ": " << e.what() << "\n";
    return 2;
  }
}

}  // namespace bnlab
