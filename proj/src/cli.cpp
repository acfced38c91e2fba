#include "supertail/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <variant>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "supertail/bounds.hpp"
#include "supertail/comparison.hpp"
#include "supertail/majorant.hpp"
#include "supertail/oracle.hpp"

namespace supertail::cli {

namespace {

using json = nlohmann::ordered_json;

struct HelpRequested {
  std::string text;
};

using Cell = std::variant<std::monostate, double, std::int64_t, bool, std::string>;

// Tabular results plus the envelope fields of the JSON form.
struct Report {
  std::string command;
  json inputs = json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  json summary = json::object();  // extra result fields besides the rows
  bool rows_as_results = true;    // JSON results is the bare row array
};

json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return v;
        } else {
          return v;
        }
      },
      c);
}

std::string cell_text(const Cell& c, bool table) {
  return std::visit(
      [table](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return table ? "-" : "";
        } else if constexpr (std::is_same_v<T, double>) {
          if (std::isnan(v)) return table ? "-" : "";
          if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
          return table ? fmt::format("{:.12g}", v) : fmt::format("{}", v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          return fmt::format("{}", v);
        }
      },
      c);
}

void write_report(const Report& r, Format format, std::ostream& out) {
  switch (format) {
    case Format::json: {
      json rows = json::array();
      for (const auto& row : r.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < r.columns.size(); ++i) obj[r.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(obj));
      }
      json results;
      if (r.rows_as_results) {
        results = std::move(rows);
      } else {
        results = r.summary;
        if (!r.columns.empty()) results["rows"] = std::move(rows);
      }
      json doc = json::object();
      doc["command"] = r.command;
      doc["inputs"] = r.inputs;
      doc["results"] = std::move(results);
      out << doc.dump(2) << '\n';
      break;
    }
    case Format::csv: {
      for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << r.columns[i];
      out << '\n';
      for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i], false);
        out << '\n';
      }
      break;
    }
    case Format::table: {
      std::vector<std::size_t> width(r.columns.size());
      std::vector<std::vector<std::string>> text;
      for (std::size_t i = 0; i < r.columns.size(); ++i) width[i] = r.columns[i].size();
      for (const auto& row : r.rows) {
        auto& t = text.emplace_back();
        for (std::size_t i = 0; i < row.size(); ++i) {
          t.push_back(cell_text(row[i], true));
          width[i] = std::max(width[i], t.back().size());
        }
      }
      auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
          out << (i ? "  " : "") << fmt::format("{:>{}}", cells[i], width[i]);
        out << '\n';
      };
      line(r.columns);
      for (const auto& t : text) line(t);
      for (const auto& [key, value] : r.summary.items()) out << key << ": " << value.dump() << '\n';
      break;
    }
  }
}

SupermartingaleSpec make_spec(const Problem& problem) {
  if (problem.p) {
    if (problem.d || problem.sigma || !problem.sigmas.empty())
      throw std::invalid_argument("give either --p or --d with --sigma/--sigmas, not both");
    return SupermartingaleSpec::canonical(problem.n, *problem.p);
  }
  if (!problem.d) throw std::invalid_argument("missing problem: give --p, or --d with --sigma or --sigmas");
  if (problem.sigma && !problem.sigmas.empty()) throw std::invalid_argument("give --sigma or --sigmas, not both");
  if (problem.sigma) return SupermartingaleSpec(problem.n, *problem.d, *problem.sigma);
  if (problem.sigmas.empty()) throw std::invalid_argument("missing --sigma or --sigmas");
  return SupermartingaleSpec(problem.n, *problem.d, problem.sigmas);
}

json problem_inputs(const RunConfig& c, const SupermartingaleSpec& spec) {
  json in = json::object();
  in["n"] = spec.n();
  if (c.problem.p) {
    if (c.problem.p->ratio)
      in["p"] = fmt::format("{}/{}", c.problem.p->ratio->first, c.problem.p->ratio->second);
    else
      in["p"] = c.problem.p->value;
  } else {
    in["d"] = spec.d();
    if (c.problem.sigma)
      in["sigma"] = *c.problem.sigma;
    else
      in["sigmas"] = spec.sigmas();
  }
  in["lattice_p"] = spec.p();
  in["sigma2"] = spec.sigma2();
  in["h"] = spec.h();
  return in;
}

std::vector<double> query_as_x(const RunConfig& c, const SupermartingaleSpec& spec) {
  std::vector<double> xs;
  for (double v : c.query) xs.push_back(c.units == Units::x ? v : rescale(spec, v));
  return xs;
}

std::string units_name(Units u) { return u == Units::x ? "x" : "y"; }

Report run_bound(const RunConfig& c) {
  if (c.query.empty()) throw std::invalid_argument("bound: give at least one query with --x or --y");
  const BoundEvaluator ev(make_spec(c.problem));
  Report r;
  r.command = "bound";
  r.inputs = problem_inputs(c, ev.spec());
  r.inputs["units"] = units_name(c.units);
  r.inputs["query"] = c.query;
  r.columns = {"y",           "x",           "new_bound",       "old_bound",       "ratio",
               "log10_new_bound", "log10_old_bound", "gaussian_bound", "hoeffding_baseline",
               "clipped_new", "clipped_old", "underflow_new", "underflow_old"};
  for (double v : c.query) {
    const BoundReport b = c.units == Units::x ? bound_report_at_x(ev, v) : bound_report(ev, v);
    r.rows.push_back({b.y, b.x, b.new_bound, b.old_bound, b.ratio ? Cell{*b.ratio} : Cell{}, b.log10_new_bound,
                      b.log10_old_bound, b.gaussian_bound, b.hoeffding_baseline, b.clipped_new, b.clipped_old,
                      b.underflow_new, b.underflow_old});
  }
  return r;
}

Report run_sweep(const RunConfig& c) {
  const BoundEvaluator ev(make_spec(c.problem));
  const double stop = c.grid.stop.value_or(static_cast<double>(ev.spec().n()));
  if (!(c.grid.step > 0.0)) throw std::invalid_argument("sweep: --step must be > 0");
  if (stop < c.grid.start) throw std::invalid_argument("sweep: --stop must be >= --start");
  Report r;
  r.command = "sweep";
  r.inputs = problem_inputs(c, ev.spec());
  r.inputs["start"] = c.grid.start;
  r.inputs["stop"] = stop;
  r.inputs["step"] = c.grid.step;
  r.columns = {"x", "r", "q_new", "q_old", "log10_q_new", "log10_q_old"};
  const auto count = static_cast<std::int64_t>(std::floor((stop - c.grid.start) / c.grid.step + 1e-9));
  const double n = static_cast<double>(ev.spec().n());
  for (std::int64_t k = 0; k <= count; ++k) {
    const double x = c.grid.start + static_cast<double>(k) * c.grid.step;
    const Bound nb = ev.new_bound_at_x(x);
    const Bound ob = ev.old_bound_at_x(x);
    Cell ratio;
    if (x <= n) ratio = std::exp(nb.unclipped.log() - ob.unclipped.log());
    r.rows.push_back({x, ratio, nb.value(), ob.value(), nb.log10(), ob.log10()});
  }
  return r;
}

Report run_constants(const RunConfig&) {
  const auto& k = comparison_constants();
  Report r;
  r.command = "constants";
  r.rows_as_results = false;
  r.columns = {"name", "value"};
  const std::vector<std::pair<std::string, double>> values = {
      {"u_star", k.u_star},
      {"u_double_star", k.u_double_star},
      {"inv_u_double_star", 1.0 / k.u_double_star},
      {"alpha_star", k.alpha_star},
      {"r_alpha_star", k.r_alpha_star},
      {"exp_r_minus_one", k.exp_r_minus_one},
      {"c2", c2()},
      {"c3", c3()},
      {"gaussian_hoeffding_crossover", gaussian_hoeffding_crossover()},
  };
  for (const auto& [name, value] : values) {
    r.rows.push_back({name, value});
    r.summary[name] = value;
  }
  r.columns.clear();
  // Table and CSV still list name/value pairs.
  return r;
}

Report run_compare(const RunConfig& c) {
  const auto spec = make_spec(c.problem);
  const LinLcMajorant maj(spec.binomial());
  Report r;
  r.command = "compare";
  r.rows_as_results = false;
  r.inputs = problem_inputs(c, spec);
  const double p = spec.p();
  r.summary["j_star"] = maj.table().j_star;
  r.summary["j_double_star"] = j_double_star(spec.n(), p);
  r.summary["u_double_star"] = u_double_star();
  r.summary["dominance_limit_n"] = p / (1.0 - p) / u_double_star();
  r.summary["dominance_all_x"] = dominance_all_x(spec.n(), p);
  r.columns = {"x", "ratio", "new_not_worse"};
  const double n = static_cast<double>(spec.n());
  for (double x : query_as_x(c, spec)) {
    if (x > n) {
      r.rows.push_back({x, Cell{}, Cell{}});
      continue;
    }
    const double ratio = ratio_r(maj.table(), maj.lattice(), x);
    r.rows.push_back({x, ratio, ratio <= 1.0 + 1e-12});
  }
  return r;
}

std::vector<double> default_verify_x(const SupermartingaleSpec& spec) {
  const TailTable table = build_tail_table(spec.binomial());
  std::vector<double> xs = {-1.0};
  const auto n = spec.n();
  const auto first = static_cast<std::int64_t>(std::ceil(static_cast<double>(n) * spec.p()));
  for (std::int64_t j = std::max<std::int64_t>(first, 0); j <= n; ++j) {
    if (table.tail(j).linear() < 1e-4) break;
    xs.push_back(static_cast<double>(j));
  }
  return xs;
}

Report run_verify(const RunConfig& c, bool& all_pass) {
  const auto spec = make_spec(c.problem);
  const BoundEvaluator ev(spec);
  const auto& sig = spec.sigmas();
  const bool homogeneous = std::all_of(sig.begin(), sig.end(), [&](double s) { return s == sig.front(); });

  std::vector<double> ys;
  if (c.query.empty()) {
    // lattice points, nudged left so rounding in the path sums cannot miss them
    for (double x : default_verify_x(spec)) {
      const double y = unrescale(spec, x);
      ys.push_back(y - 1e-9 * (1.0 + std::abs(y)));
    }
  } else {
    for (double v : c.query) ys.push_back(c.units == Units::y ? v : unrescale(spec, v));
  }
  std::vector<FamilyKind> families = c.families;
  if (families.empty())
    families = {FamilyKind::two_point_extremal, FamilyKind::truncated_shifted, FamilyKind::bounded_uniform};

  Report r;
  r.command = "verify";
  r.rows_as_results = false;
  r.inputs = problem_inputs(c, spec);
  r.inputs["trials"] = c.trials;
  r.inputs["seed"] = c.seed;
  r.inputs["drift"] = c.drift;
  r.columns = {"family", "statistic", "y",        "x",        "estimate",         "ci_low",        "ci_high",
               "std_error", "new_bound", "old_bound", "truncation_bound", "exact",          "exact_in_ci", "pass"};
  all_pass = true;
  for (FamilyKind kind : families) {
    const IncrementFamily family{kind, c.drift, false};
    const auto est = estimate_tails(spec, family, ys, c.trials, c.seed, c.threads);
    const double exceed = exceedance_sum(spec, family, spec.d());
    for (std::size_t k = 0; k < ys.size(); ++k) {
      const double y = ys[k];
      const double x = rescale(spec, y);
      const double nb = ev.new_bound(y).value();
      const double ob = ev.old_bound(y).value();
      const double tb = ev.truncation_bound_from_sum(y, exceed);
      for (int stat = 0; stat < 2; ++stat) {
        const McEstimate& e = stat == 0 ? est.terminal[k] : est.maximum[k];
        const double excess = e.point - 3.0 * e.standard_error();
        const bool pass = excess <= nb && excess <= ob && excess <= tb;
        all_pass = all_pass && pass;
        Cell exact, exact_in_ci;
        if (kind == FamilyKind::two_point_extremal && homogeneous && stat == 0) {
          const double value = build_tail_table(spec.binomial()).tail(static_cast<std::int64_t>(std::ceil(x - 1e-6))).linear();
          exact = value;
          exact_in_ci = value >= e.ci_low && value <= e.ci_high;
        }
        r.rows.push_back({std::string(to_string(kind)), std::string(stat == 0 ? "terminal" : "maximum"), y, x,
                          e.point, e.ci_low, e.ci_high, e.standard_error(), nb, ob, tb, exact, exact_in_ci, pass});
      }
    }
  }
  r.summary["all_pass"] = all_pass;
  return r;
}

Report run_oracle_check(const RunConfig& c, bool& pass) {
  const auto spec = make_spec(c.problem);
  if (spec.n() > oracle::kMaxOracleN)
    throw std::invalid_argument(fmt::format("oracle-check: n = {} exceeds the oracle limit {}", spec.n(),
                                            oracle::kMaxOracleN));
  if (!(c.oracle_step > 0.0)) throw std::invalid_argument("oracle-check: --grid-step must be > 0");
  if (c.oracle_queries < 0) throw std::invalid_argument("oracle-check: --queries must be >= 0");
  const LinLcMajorant maj(spec.binomial());
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> uni(-1.0, static_cast<double>(spec.n()) + 0.5);
  std::vector<double> queries(static_cast<std::size_t>(c.oracle_queries));
  for (auto& q : queries) q = uni(rng);
  const auto check = oracle::check_majorant_against_hull(maj.table(), maj.lattice(), c.oracle_step, queries);
  pass = check.max_log_discrepancy <= 1e-6 && check.max_tail_rel_error <= 1e-12;

  Report r;
  r.command = "oracle-check";
  r.rows_as_results = false;
  r.inputs = problem_inputs(c, spec);
  r.inputs["grid_step"] = c.oracle_step;
  r.inputs["queries"] = c.oracle_queries;
  r.inputs["seed"] = c.seed;
  r.summary["samples"] = check.samples;
  r.summary["max_log_discrepancy"] = check.max_log_discrepancy;
  r.summary["worst_x"] = check.worst_x;
  r.summary["max_tail_rel_error"] = check.max_tail_rel_error;
  r.summary["tolerance_log"] = 1e-6;
  r.summary["tolerance_tail"] = 1e-12;
  r.summary["pass"] = pass;
  return r;
}

Report constants_rows(Report r) {
  r.columns = {"name", "value"};
  return r;
}

}  // namespace

Probability parse_probability(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing characters");
      return Probability::from_double(v);
    }
    std::size_t used_a = 0, used_b = 0;
    const std::string a = text.substr(0, slash), b = text.substr(slash + 1);
    const long long num = std::stoll(a, &used_a);
    const long long den = std::stoll(b, &used_b);
    if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument("trailing characters");
    return Probability::from_ratio(num, den);
  } catch (const std::domain_error&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("--p: expected a number or a ratio like 3/100, got '" + text + "'");
  }
}

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"Tail bounds for supermartingales with differences bounded from above", "supertail"};
  app.require_subcommand(1);

  std::string p_text;
  std::vector<double> xs, ys;
  std::string format_text;
  std::string out_path;
  std::vector<std::string> family_names;
  double d = 0.0, sigma = 0.0;
  std::optional<double> stop;

  auto add_problem = [&](CLI::App* sub) {
    sub->add_option("--n", cfg.problem.n, "number of steps")->required();
    sub->add_option("--p", p_text, "lattice success probability, e.g. 0.03 or 3/100");
    sub->add_option("--d", d, "upper bound on each difference");
    sub->add_option("--sigma", sigma, "common conditional standard deviation bound");
    sub->add_option("--sigmas", cfg.problem.sigmas, "per-step standard deviation bounds")->expected(1, -1);
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--format", format_text, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));
    sub->add_option("--out", out_path, "write to PATH instead of standard output");
  };
  auto add_query = [&](CLI::App* sub) {
    sub->add_option("--x", xs, "lattice coordinate(s)")->expected(1, -1);
    sub->add_option("--y", ys, "threshold(s) in martingale units")->expected(1, -1);
  };

  auto* bound = app.add_subcommand("bound", "new and old bounds at given thresholds");
  add_problem(bound);
  add_query(bound);
  add_output(bound);

  auto* sweep = app.add_subcommand("sweep", "bounds and their ratio over a grid of x");
  add_problem(sweep);
  add_output(sweep);
  sweep->add_option("--start", cfg.grid.start, "first x");
  sweep->add_option("--stop", stop, "last x (default n)");
  sweep->add_option("--step", cfg.grid.step, "grid step (> 0)");

  auto* constants = app.add_subcommand("constants", "u*, u**, alpha*, c2, c3 and related constants");
  add_output(constants);

  auto* compare = app.add_subcommand("compare", "when the new bound is no worse than the old one");
  add_problem(compare);
  add_query(compare);
  add_output(compare);

  auto* verify = app.add_subcommand("verify", "Monte Carlo check of the bounds");
  add_problem(verify);
  add_query(verify);
  add_output(verify);
  verify->add_option("--trials", cfg.trials, "paths per family")->check(CLI::PositiveNumber);
  verify->add_option("--seed", cfg.seed, "random seed");
  verify->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
  verify->add_option("--family", family_names, "two_point_extremal, truncated_shifted, bounded_uniform")
      ->expected(1, -1);
  verify->add_option("--drift", cfg.drift, "negative drift of truncated_shifted, in units of sigma");

  auto* oracle_check = app.add_subcommand("oracle-check", "compare the majorant with a brute-force hull");
  add_problem(oracle_check);
  add_output(oracle_check);
  oracle_check->add_option("--grid-step", cfg.oracle_step, "hull sampling step");
  oracle_check->add_option("--queries", cfg.oracle_queries, "random extra query points");
  oracle_check->add_option("--seed", cfg.seed, "seed for the query points");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    throw std::invalid_argument(e.what());
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  if (name == "bound") cfg.command = Command::bound;
  else if (name == "sweep") cfg.command = Command::sweep;
  else if (name == "constants") cfg.command = Command::constants;
  else if (name == "compare") cfg.command = Command::compare;
  else if (name == "verify") cfg.command = Command::verify;
  else cfg.command = Command::oracle_check;

  cfg.format = cfg.command == Command::sweep ? Format::csv : Format::json;
  if (format_text == "json") cfg.format = Format::json;
  else if (format_text == "csv") cfg.format = Format::csv;
  else if (format_text == "table") cfg.format = Format::table;
  if (!out_path.empty()) cfg.out_path = out_path;

  if (!p_text.empty()) cfg.problem.p = parse_probability(p_text);
  auto given = [chosen](const std::string& flag) {
    const CLI::Option* opt = chosen->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--d")) cfg.problem.d = d;
  if (given("--sigma")) cfg.problem.sigma = sigma;
  cfg.grid.stop = stop;

  if (!xs.empty() && !ys.empty()) throw std::invalid_argument("give thresholds with --x or --y, not both");
  if (!ys.empty()) {
    cfg.units = Units::y;
    cfg.query = ys;
  } else {
    cfg.units = Units::x;
    cfg.query = xs;
  }
  for (const auto& f : family_names) cfg.families.push_back(parse_family(f));
  return cfg;
}

int execute(const RunConfig& config, std::ostream& out) {
  Report report;
  int code = kExitOk;
  switch (config.command) {
    case Command::bound: report = run_bound(config); break;
    case Command::sweep: report = run_sweep(config); break;
    case Command::constants: report = constants_rows(run_constants(config)); break;
    case Command::compare: report = run_compare(config); break;
    case Command::verify: {
      bool all_pass = true;
      report = run_verify(config, all_pass);
      if (!all_pass) code = kExitVerifyFailed;
      break;
    }
    case Command::oracle_check: {
      bool pass = true;
      report = run_oracle_check(config, pass);
      if (!pass) code = kExitOracleMismatch;
      break;
    }
  }
  if (config.command == Command::constants && config.format == Format::json) report.columns.clear();
  if (config.command == Command::constants && config.format == Format::table) report.summary = json::object();

  if (config.out_path) {
    std::ofstream file(*config.out_path, std::ios::binary);
    if (!file) throw std::invalid_argument("cannot open --out path " + *config.out_path);
    write_report(report, config.format, file);
  } else {
    write_report(report, config.format, out);
  }
  return code;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return execute(parse_args(args), out);
  } catch (const HelpRequested& help) {
    out << help.text;
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace supertail::cli
