#pragma once

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netsens/baselines.hpp"
#include "netsens/communicability.hpp"
#include "netsens/connectivity.hpp"
#include "netsens/estimators.hpp"
#include "netsens/graph_io.hpp"
#include "netsens/irreducible.hpp"
#include "netsens/parallel.hpp"
#include "netsens/perron.hpp"
#include "report.hpp"
#include "validate.hpp"

#ifndef NETSENS_FIXTURE_DIR
#define NETSENS_FIXTURE_DIR "data/fixtures"
#endif

namespace netsens::cli {

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string format = "table";
  bool directed = false;
  bool undirected = false;
  std::string input_format = "auto";
  bool zero_based = false;
  std::string out;
  std::size_t threads = 1;
  std::size_t dense_limit = kDefaultDenseLimit;

  std::string method = "auto";
  std::vector<std::string> methods;
  double tol = 1e-4;
  bool tol_set = false;
  double t_step = 2e-5;
  std::size_t m_max = 200;
  double delta = 0.0;
  bool delta_set = false;
  bool delta_auto = false;
  std::string filter = "non-edges";
  std::size_t top = 5;
  double change = 1.0;
  bool after = false;
  std::vector<std::string> edges;

  std::size_t sample = 0;
  std::optional<std::uint64_t> seed;
  std::string scatter;
  bool baselines = false;
  bool timings = false;
  std::string fixtures = NETSENS_FIXTURE_DIR;
};

namespace detail {

inline const std::vector<std::string>& krylov_names() {
  static const std::vector<std::string> names{"arnoldi-block", "arnoldi-fd", "lanczos-block", "lanczos-fd", "kkrs"};
  return names;
}

inline AdjacencyMatrix load(const Options& o) {
  LoadOptions lo;
  if (o.input_format == "edge-list") lo.format = InputFormat::edge_list;
  if (o.input_format == "matrix-market") lo.format = InputFormat::matrix_market;
  if (o.directed) lo.directed = true;
  if (o.undirected) lo.directed = false;
  lo.index_base = o.zero_based ? 0 : 1;
  auto a = load_graph(o.input, lo);
  if (a.nnz() == 0) throw DataError("no edges");
  return a;
}

inline Method resolve_method(const std::string& s, const AdjacencyMatrix& a, std::size_t dense_limit) {
  if (s == "auto") return a.size() <= dense_limit ? Method::exact : Method::arnoldi_fd;
  const auto m = method_from_string(s);
  if (!m) throw UsageError("unknown method '" + s + "'");
  return *m;
}

inline CandidateFilter filter_of(const Options& o) {
  const auto f = filter_from_string(o.filter);
  if (!f) throw UsageError("unknown filter '" + o.filter + "'");
  return *f;
}

inline EstimatorConfig estimator_config(const Options& o, Method m) {
  EstimatorConfig cfg;
  cfg.method = m;
  cfg.tol = o.tol;
  cfg.t_step = o.t_step;
  cfg.m_max = o.m_max;
  return cfg;
}

struct Shift {
  double delta = 0.0;
  std::string how; // given, auto, none
  PerronTriple triple;
};

// Perron triple of A + delta 11^T. Without --delta the shift is chosen
// automatically for reducible graphs (or always with --delta-auto).
inline Shift perron_shift(const AdjacencyMatrix& a, const Options& o, CandidateFilter filter, double tol) {
  PerronOptions po;
  po.tol = tol;
  if (o.delta_set) return {o.delta, "given", perron_triple(PerturbedOperator(a, o.delta), po)};
  if (o.delta_auto || !is_strongly_connected(a)) {
    auto sel = select_delta(a, root_sensitivity_selector(filter, !a.directed()), 1e-4, 10.0, 8, po);
    return {sel.delta, "auto", std::move(sel.triple)};
  }
  return {0.0, "none", perron_triple(a, po)};
}

inline double shift_delta(const AdjacencyMatrix& a, const Options& o, CandidateFilter filter) {
  if (o.delta_set) return o.delta;
  if (o.delta_auto || !is_strongly_connected(a)) {
    return select_delta(a, root_sensitivity_selector(filter, !a.directed())).delta;
  }
  return 0.0;
}

inline long long label(const Options& o, index_t i) { return static_cast<long long>(i) + (o.zero_based ? 0 : 1); }

inline Direction parse_direction(const std::string& s, const AdjacencyMatrix& a, const Options& o) {
  const auto sep = s.find_first_of(",:");
  auto bad = [&] { return UsageError("edge '" + s + "' is not of the form i,j"); };
  if (sep == std::string::npos) throw bad();
  long long i = 0, j = 0;
  try {
    std::size_t pi = 0, pj = 0;
    i = std::stoll(s.substr(0, sep), &pi);
    j = std::stoll(s.substr(sep + 1), &pj);
    if (pi != sep || pj != s.size() - sep - 1) throw bad();
  } catch (const std::logic_error&) {
    throw bad();
  }
  const long long base = o.zero_based ? 0 : 1;
  const long long n = static_cast<long long>(a.size());
  if (i < base || j < base || i >= n + base || j >= n + base) throw DataError("edge '" + s + "' is out of range");
  return Direction(static_cast<index_t>(i - base), static_cast<index_t>(j - base), !a.directed());
}

inline std::vector<Direction> directions(const AdjacencyMatrix& a, const Options& o) {
  if (o.edges.empty()) return candidate_directions(a, filter_of(o));
  std::vector<Direction> out;
  for (const auto& e : o.edges) out.push_back(parse_direction(e, a, o));
  return out;
}

inline void graph_fields(Report& r, const AdjacencyMatrix& a) {
  r.field("nodes", static_cast<long long>(a.size()));
  r.field("nonzeros", static_cast<long long>(a.nnz()));
  r.field("directed", a.directed());
}

inline std::string where(const Options& o, const Direction& d) {
  return "(" + std::to_string(label(o, d.i())) + "," + std::to_string(label(o, d.j())) + ")";
}

} // namespace detail

inline Report cmd_communicability(const Options& o) {
  const auto a = detail::load(o);
  Report r{"communicability"};
  detail::graph_fields(r, a);
  const bool strong = is_strongly_connected(a);
  r.field("strongly_connected", strong);
  if (a.size() <= o.dense_limit) {
    r.field("ctn", total_communicability(a, o.dense_limit));
  } else {
    r.field("ctn", std::monostate{});
    r.notes.push_back("C^TN skipped: " + std::to_string(a.size()) + " nodes exceed the dense limit");
  }
  try {
    const auto s = detail::perron_shift(a, o, detail::filter_of(o), 1e-12);
    const double n = static_cast<double>(a.size());
    r.field("delta", s.delta);
    r.field("delta_selection", s.how);
    r.field("rho", s.triple.rho);
    r.field("kappa", s.triple.kappa());
    std::optional<double> cpn;
    try {
      cpn = perron_communicability(s.triple);
    } catch (const OverflowError&) {
      r.notes.push_back("C^PN overflows; see log_cpn");
    }
    r.field("cpn", maybe(cpn));
    r.field("log_cpn", log_perron_communicability(s.triple));
    r.field("bound", n * std::expm1(s.triple.rho));
    r.field("kappa_cpn", maybe(cpn ? std::optional<double>(s.triple.kappa() * *cpn) : std::nullopt));
    if (s.how == "auto") r.notes.push_back("graph is reducible; Perron quantities are for A + delta 11^T");
  } catch (const Error& e) {
    r.notes.push_back(std::string("Perron quantities unavailable: ") + e.what());
  }
  return r;
}

inline Report cmd_rank(const Options& o) {
  const auto a = detail::load(o);
  const auto filter = detail::filter_of(o);
  const Method m = detail::resolve_method(o.method, a, o.dense_limit);
  Report r{"rank"};
  detail::graph_fields(r, a);
  r.field("method", std::string(to_string(m)));
  r.field("filter", o.filter);
  r.field("top", static_cast<long long>(o.top));

  std::vector<SensitivityRecord> recs;
  std::optional<detail::Shift> shift;
  auto need_shift = [&](double tol) -> const detail::Shift& {
    if (!shift) shift = detail::perron_shift(a, o, filter, tol);
    return *shift;
  };

  if (o.top > 0) {
    if (m == Method::perron_root) {
      recs = top_k_root_sensitivities(need_shift(1e-12).triple, o.top, filter, a, !a.directed());
    } else if (m == Method::exact) {
      recs = total_sensitivity_scan(a, candidate_directions(a, filter), o.dense_limit, o.threads).records;
    } else if (m == Method::perron_network) {
      const auto& s = need_shift(1e-13);
      const PerturbedOperator op(a, s.delta);
      const auto cands = candidate_directions(a, filter);
      std::vector<std::optional<double>> vals(cands.size());
      std::vector<std::string> errors(cands.size());
      parallel_for(cands.size(), o.threads, [&](std::size_t k) {
        try {
          vals[k] = perron_sensitivity(op, cands[k], s.triple, {.t_step = o.t_step});
        } catch (const Error& e) {
          errors[k] = e.what();
        }
      });
      for (std::size_t k = 0; k < cands.size(); ++k) {
        if (vals[k]) {
          recs.push_back({cands[k], Method::perron_network, *vals[k]});
        } else {
          r.notes.push_back(detail::where(o, cands[k]) + ": " + errors[k]);
        }
      }
      if (recs.empty() && !cands.empty()) throw NumericalError("every S^PN evaluation failed");
    } else {
      auto scan = scan_estimated(a, candidate_directions(a, filter), detail::estimator_config(o, m), false, o.threads);
      for (const auto& f : scan.failures) r.notes.push_back(f);
      if (scan.records.empty() && !scan.failures.empty()) throw NumericalError("every estimate failed");
      recs = std::move(scan.records);
    }
    rank_records(recs);
    if (recs.size() > o.top) recs.erase(recs.begin() + static_cast<std::ptrdiff_t>(o.top), recs.end());
  }
  if (shift) {
    r.field("delta", shift->delta);
    r.field("delta_selection", shift->how);
  }

  r.columns = {"rank", "i", "j", "value", "method", "steps", "matvecs"};
  if (o.after) {
    r.columns.push_back("ctn_after");
    r.columns.push_back("cpn_after");
  }
  r.columns.push_back("note");
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const auto& rec = recs[k];
    const auto& d = rec.direction;
    std::vector<Cell> row{static_cast<long long>(k + 1), detail::label(o, d.i()), detail::label(o, d.j()), rec.value,
                          rec.method_tag(), static_cast<long long>(rec.steps), static_cast<long long>(rec.matvecs)};
    std::string note = rec.note;
    if (o.after) {
      std::optional<double> ctn, cpn;
      try {
        if (a.size() <= o.dense_limit) ctn = total_communicability(a.with_change(d.i(), d.j(), o.change));
        const auto& s = need_shift(1e-12);
        const PerturbedOperator shifted(a, s.delta);
        RankUpdatedOperator<PerturbedOperator> moved(shifted, d, o.change);
        PerronOptions po;
        po.tol = 1e-12;
        po.x0 = s.triple.x;
        po.y0 = s.triple.y;
        cpn = perron_communicability(perron_triple(moved, po));
      } catch (const Error& e) {
        note += (note.empty() ? "" : "; ") + std::string(e.what());
      }
      row.push_back(maybe(ctn));
      row.push_back(maybe(cpn));
    }
    row.push_back(note);
    r.rows.push_back(std::move(row));
  }
  if (o.after && shift && std::none_of(r.fields.begin(), r.fields.end(), [](const auto& f) { return f.first == "delta"; })) {
    r.field("delta", shift->delta);
    r.field("delta_selection", shift->how);
  }
  return r;
}

inline Report cmd_sensitivity(const Options& o) {
  const auto a = detail::load(o);
  const Method m = detail::resolve_method(o.method, a, o.dense_limit);
  const auto dirs = detail::directions(a, o);
  Report r{"sensitivity"};
  detail::graph_fields(r, a);
  r.field("method", std::string(to_string(m)));

  std::vector<std::optional<SensitivityRecord>> recs(dirs.size());
  std::vector<std::string> errors(dirs.size());
  auto each = [&](auto&& fn) {
    parallel_for(dirs.size(), o.threads, [&](std::size_t k) {
      try {
        recs[k] = fn(dirs[k]);
      } catch (const Error& e) {
        errors[k] = e.what();
      }
    });
  };
  if (m == Method::exact) {
    check_dense_limit(a, o.dense_limit);
    const Matrix dense = a.to_dense();
    each([&](const Direction& d) { return SensitivityRecord{d, m, total_sensitivity_exact(dense, d)}; });
  } else if (m == Method::perron_root || m == Method::perron_network) {
    const auto s = detail::perron_shift(a, o, detail::filter_of(o), m == Method::perron_root ? 1e-12 : 1e-13);
    r.field("delta", s.delta);
    r.field("delta_selection", s.how);
    const PerturbedOperator op(a, s.delta);
    each([&](const Direction& d) {
      if (m == Method::perron_root) return SensitivityRecord{d, m, perron_root_sensitivity(s.triple, d)};
      std::size_t mv = 0;
      SensitivityRecord rec{d, m, perron_sensitivity(op, d, s.triple, {.t_step = o.t_step}, &mv)};
      rec.matvecs = mv;
      return rec;
    });
  } else {
    const auto cfg = detail::estimator_config(o, m);
    cfg.validate();
    each([&](const Direction& d) { return estimate(a, d, cfg); });
  }

  r.columns = {"i", "j", "value", "method", "steps", "matvecs", "converged", "note"};
  std::size_t failed = 0;
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const auto& d = dirs[k];
    if (!recs[k]) {
      ++failed;
      r.rows.push_back({detail::label(o, d.i()), detail::label(o, d.j()), std::monostate{}, std::string(to_string(m)),
                        std::monostate{}, std::monostate{}, false, errors[k]});
      continue;
    }
    const auto& rec = *recs[k];
    r.rows.push_back({detail::label(o, d.i()), detail::label(o, d.j()), rec.value, rec.method_tag(),
                      static_cast<long long>(rec.steps), static_cast<long long>(rec.matvecs), rec.converged, rec.note});
  }
  if (failed > 0 && failed == dirs.size()) throw NumericalError(errors.front());
  return r;
}

inline Report cmd_compare_baselines(const Options& o, const AdjacencyMatrix& a) {
  const auto filter = detail::filter_of(o);
  CompareOptions co;
  co.delta = detail::shift_delta(a, o, filter);
  co.t_step = o.t_step;
  co.change = o.change;
  co.dense_limit = o.dense_limit;
  const auto t = compare_methods(a, detail::directions(a, o), co);
  Report r{"compare"};
  detail::graph_fields(r, a);
  r.field("mode", std::string("baselines"));
  r.field("ctn", t.ctn);
  r.field("cpn", maybe(t.cpn));
  r.field("delta", t.delta);
  r.field("change", o.change);
  r.columns = {"method", "i", "j", "score", "ctn_after", "cpn_after", "error"};
  for (const auto& row : t.rows) {
    Cell i, j;
    if (row.selected) {
      i = detail::label(o, row.selected->i());
      j = detail::label(o, row.selected->j());
    }
    auto num = [](double v) -> Cell {
      if (std::isnan(v)) return std::monostate{};
      return v;
    };
    r.rows.push_back({row.method, i, j, num(row.score), num(row.ctn_after), num(row.cpn_after), row.error});
  }
  return r;
}

inline Report cmd_compare(const Options& o) {
  const auto a = detail::load(o);
  if (o.baselines) return cmd_compare_baselines(o, a);
  check_dense_limit(a, o.dense_limit);

  auto cands = detail::directions(a, o);
  if (o.sample > 0 && o.sample < cands.size()) {
    if (!o.seed) throw UsageError("--sample needs an explicit --seed");
    std::mt19937_64 rng(*o.seed);
    std::shuffle(cands.begin(), cands.end(), rng);
    cands.erase(cands.begin() + static_cast<std::ptrdiff_t>(o.sample), cands.end());
    std::sort(cands.begin(), cands.end());
  }
  std::vector<std::string> names = o.methods.empty() ? detail::krylov_names() : o.methods;

  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  const Matrix dense = a.to_dense();
  std::vector<double> exact(cands.size());
  parallel_for(cands.size(), o.threads, [&](std::size_t k) { exact[k] = total_sensitivity_exact(dense, cands[k]); });
  const double exact_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  std::map<Direction, double> exact_of;
  for (std::size_t k = 0; k < cands.size(); ++k) exact_of.emplace(cands[k], exact[k]);

  Report r{"compare"};
  detail::graph_fields(r, a);
  r.field("mode", std::string("estimators"));
  r.field("directions", static_cast<long long>(cands.size()));
  r.field("tol", o.tol);
  r.field("t_step", o.t_step);
  if (o.timings) r.field("exact_seconds", exact_seconds);
  r.columns = {"method", "directions", "avg_steps", "avg_matvecs", "max_rel_error", "mean_rel_error", "fallbacks",
               "failures"};
  if (o.timings) r.columns.push_back("seconds");

  EstimatedScan scatter;
  for (const auto& name : names) {
    const Method m = *method_from_string(name);
    t0 = clock::now();
    auto scan = scan_estimated(a, cands, detail::estimator_config(o, m), false, o.threads);
    const double seconds = std::chrono::duration<double>(clock::now() - t0).count();
    double worst = 0.0, sum = 0.0, matvecs = 0.0;
    for (const auto& rec : scan.records) {
      const double ex = exact_of.at(rec.direction);
      const double err = ex != 0.0 ? std::abs(rec.value - ex) / std::abs(ex) : std::abs(rec.value);
      worst = std::max(worst, err);
      sum += err;
      matvecs += static_cast<double>(rec.matvecs);
      scatter.records.push_back(rec);
      scatter.exact.emplace_back(ex);
    }
    for (const auto& f : scan.failures) r.notes.push_back(name + " " + f);
    const double cnt = static_cast<double>(scan.records.size());
    std::vector<Cell> row{name,
                          static_cast<long long>(scan.records.size()),
                          scan.average_steps(),
                          cnt > 0 ? Cell(matvecs / cnt) : Cell(),
                          cnt > 0 ? Cell(worst) : Cell(),
                          cnt > 0 ? Cell(sum / cnt) : Cell(),
                          static_cast<long long>(scan.fallbacks()),
                          static_cast<long long>(scan.failures.size())};
    if (o.timings) row.push_back(seconds);
    r.rows.push_back(std::move(row));
  }
  if (!o.scatter.empty()) {
    std::ofstream f(o.scatter);
    if (!f) throw DataError("cannot write '" + o.scatter + "'");
    write_scatter_csv(f, scatter);
    r.field("scatter", o.scatter);
  }
  return r;
}

inline Report cmd_validate(const Options& o, int& code) {
  const auto checks = run_golden_suite(o.fixtures, o.tol_set ? std::optional<double>(o.tol) : std::nullopt);
  Report r{"validate"};
  const auto passed = std::count_if(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  r.field("checks", static_cast<long long>(checks.size()));
  r.field("passed", static_cast<long long>(passed));
  r.field("failed", static_cast<long long>(checks.size()) - passed);
  r.columns = {"check", "expected", "actual", "gap", "tolerance", "status"};
  for (const auto& c : checks) {
    r.rows.push_back({c.name, c.expected, c.actual, maybe(c.gap), maybe(c.tolerance), std::string(c.pass ? "PASS" : "FAIL")});
  }
  code = passed == static_cast<long>(checks.size()) ? 0 : 3;
  return r;
}

namespace detail {

inline void add_graph_options(CLI::App* sub, Options& o) {
  sub->add_option("input", o.input, "Edge list or MatrixMarket file")->required();
  auto* d = sub->add_flag("--directed", o.directed, "Treat the input as directed");
  auto* u = sub->add_flag("--undirected", o.undirected, "Treat the input as undirected");
  d->excludes(u);
  sub->add_option("--input-format", o.input_format, "auto, edge-list or matrix-market")
      ->check(CLI::IsMember({"auto", "edge-list", "matrix-market"}));
  sub->add_flag("--zero-based", o.zero_based, "Node indices start at 0 (input and output)");
  sub->add_option("--dense-limit", o.dense_limit, "Largest n for dense computations");
  sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

inline void add_output_options(CLI::App* sub, Options& o) {
  sub->add_option("--format", o.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));
  sub->add_option("--out", o.out, "Write the report to this file");
}

inline void add_shift_options(CLI::App* sub, Options& o) {
  sub->add_option("--delta", o.delta, "Irreducibility shift A + delta 11^T for Perron quantities")
      ->check(CLI::NonNegativeNumber);
  sub->add_flag("--delta-auto", o.delta_auto, "Choose the shift automatically even for irreducible graphs");
}

inline void add_estimator_options(CLI::App* sub, Options& o) {
  sub->add_option("--tol", o.tol, "Stopping tolerance of the Krylov estimators")->check(CLI::PositiveNumber);
  sub->add_option("--t-step", o.t_step, "Finite-difference step")->check(CLI::PositiveNumber);
  sub->add_option("--max-steps", o.m_max, "Krylov step cap")->check(CLI::Range(2, 100000));
}

inline std::vector<std::string> method_choices() {
  std::vector<std::string> v{"auto", "exact", "perron-root", "perron-network"};
  for (const auto& k : krylov_names()) v.push_back(k);
  return v;
}

} // namespace detail

// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Edge sensitivity of network communicability"};
  app.name("netsens");
  app.require_subcommand(1);

  auto* comm = app.add_subcommand("communicability", "Total and Perron network communicability");
  detail::add_graph_options(comm, o);
  detail::add_output_options(comm, o);
  detail::add_shift_options(comm, o);
  comm->add_option("--filter", o.filter, "Candidate filter used when choosing the shift")
      ->check(CLI::IsMember({"existing-edges", "non-edges", "all"}));

  auto* rank = app.add_subcommand("rank", "Top-k edges by a sensitivity criterion");
  detail::add_graph_options(rank, o);
  detail::add_output_options(rank, o);
  detail::add_shift_options(rank, o);
  detail::add_estimator_options(rank, o);
  rank->add_option("--method", o.method, "auto, exact, perron-root, perron-network or a Krylov estimator")
      ->check(CLI::IsMember(detail::method_choices()));
  rank->add_option("--filter", o.filter, "existing-edges, non-edges or all")
      ->check(CLI::IsMember({"existing-edges", "non-edges", "all"}));
  rank->add_option("--top", o.top, "Number of edges to report");
  rank->add_flag("--after", o.after, "Also report C^TN and C^PN after changing each edge");
  rank->add_option("--change", o.change, "Weight change used with --after");

  auto* sens = app.add_subcommand("sensitivity", "Sensitivity of given directions");
  detail::add_graph_options(sens, o);
  detail::add_output_options(sens, o);
  detail::add_shift_options(sens, o);
  detail::add_estimator_options(sens, o);
  sens->add_option("--method", o.method, "auto, exact, perron-root, perron-network or a Krylov estimator")
      ->check(CLI::IsMember(detail::method_choices()));
  sens->add_option("--edge", o.edges, "Direction i,j (repeatable); default is every candidate")->take_all();
  sens->add_option("--filter", o.filter, "Candidates when no --edge is given")
      ->check(CLI::IsMember({"existing-edges", "non-edges", "all"}));

  auto* cmp = app.add_subcommand("compare", "Estimators against the dense oracle, or the baseline selection table");
  detail::add_graph_options(cmp, o);
  detail::add_output_options(cmp, o);
  detail::add_shift_options(cmp, o);
  detail::add_estimator_options(cmp, o);
  cmp->add_option("--method", o.methods, "Krylov estimators to compare (comma separated)")
      ->delimiter(',')
      ->check(CLI::IsMember(detail::krylov_names()));
  cmp->add_option("--edge", o.edges, "Direction i,j (repeatable); default is every candidate")->take_all();
  cmp->add_option("--filter", o.filter, "existing-edges, non-edges or all")
      ->check(CLI::IsMember({"existing-edges", "non-edges", "all"}));
  cmp->add_option("--sample", o.sample, "Compare a random subset of this many directions");
  cmp->add_option("--seed", o.seed, "Seed for --sample");
  cmp->add_option("--scatter", o.scatter, "Write per-direction results as CSV");
  cmp->add_flag("--timings", o.timings, "Report wall-clock seconds (output is then not reproducible)");
  cmp->add_flag("--baselines", o.baselines, "Edge chosen by eTC, egTC, S^TN, S^PN and S^PR");
  cmp->add_option("--change", o.change, "Weight change for the baseline table");

  auto* val = app.add_subcommand("validate", "Check reference values on the bundled fixtures");
  detail::add_output_options(val, o);
  auto* tol = val->add_option("--tol", o.tol, "Override every check tolerance")->check(CLI::PositiveNumber);
  val->add_option("--fixtures", o.fixtures, "Fixture directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }
  o.tol_set = tol->count() > 0;
  for (auto* sub : {rank, sens, cmp, comm}) {
    if (sub->parsed() && sub->get_option_no_throw("--delta") && sub->get_option("--delta")->count() > 0) o.delta_set = true;
  }

  try {
    Report report;
    int code = 0;
    if (comm->parsed()) report = cmd_communicability(o);
    if (rank->parsed()) report = cmd_rank(o);
    if (sens->parsed()) report = cmd_sensitivity(o);
    if (cmp->parsed()) report = cmd_compare(o);
    if (val->parsed()) report = cmd_validate(o, code);

    const auto format = o.format == "json" ? OutputFormat::json : o.format == "csv" ? OutputFormat::csv : OutputFormat::table;
    if (o.out.empty()) {
      render(report, format, out, err);
    } else {
      std::ofstream f(o.out);
      if (!f) throw DataError("cannot write '" + o.out + "'");
      render(report, format, f, err);
    }
    return code;
  } catch (const UsageError& e) {
    err << "netsens: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    err << "netsens: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "netsens: " << e.what() << '\n';
    return 3;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"netsens"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace netsens::cli
