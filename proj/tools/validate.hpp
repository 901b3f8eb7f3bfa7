#pragma once

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "netsens/baselines.hpp"
#include "netsens/communicability.hpp"
#include "netsens/graph_io.hpp"
#include "netsens/irreducible.hpp"
#include "netsens/perron.hpp"
#include "report.hpp"

namespace netsens::cli {

struct Check {
  std::string name;
  Cell expected;
  Cell actual;
  std::optional<double> gap;
  std::optional<double> tolerance;
  bool pass = false;
};

// Collects checks; a tolerance override replaces every numeric tolerance.
class CheckList {
public:
  explicit CheckList(std::optional<double> tol_override) : override_(tol_override) {}

  void rel(std::string name, double expected, double actual, double tol) {
    const double gap = std::abs(actual - expected) / std::abs(expected);
    add(std::move(name), expected, actual, gap, override_.value_or(tol));
  }
  void abs(std::string name, double expected, double actual, double tol) {
    add(std::move(name), expected, actual, std::abs(actual - expected), override_.value_or(tol));
  }
  void same(std::string name, const std::string& expected, const std::string& actual) {
    checks_.push_back({std::move(name), expected, actual, std::nullopt, std::nullopt, expected == actual});
  }
  void error(std::string name, const std::string& what) {
    checks_.push_back({std::move(name), std::monostate{}, "error: " + what, std::nullopt, std::nullopt, false});
  }

  template <class Fn>
  void guard(const std::string& name, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      error(name, e.what());
    }
  }

  const std::vector<Check>& checks() const noexcept { return checks_; }

private:
  void add(std::string name, double expected, double actual, double gap, double tol) {
    checks_.push_back({std::move(name), expected, actual, gap, tol, gap <= tol});
  }

  std::optional<double> override_;
  std::vector<Check> checks_;
};

namespace golden {

inline std::string pair(index_t i, index_t j) { return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")"; }
inline std::string pair(const Direction& d) { return pair(d.i(), d.j()); }

struct Table1Row {
  int i, j;
  double stn, ctn, spn, cpn;
};

// Four-node weighted example, unit increase of one weight at a time.
inline const std::vector<Table1Row>& table1() {
  static const std::vector<Table1Row> rows{
      {1, 3, 22615, 82269, 22781, 79872}, {2, 3, 18221, 76339, 18247, 73711}, {1, 4, 17662, 75511, 17577, 72722},
      {4, 3, 15611, 73124, 15009, 69720}, {2, 4, 14225, 71324, 14078, 68481}, {1, 2, 13151, 70097, 12411, 66543},
      {2, 1, 12957, 69606, 12394, 66250}, {3, 4, 12883, 69588, 12134, 66022}, {3, 1, 11734, 68303, 10666, 64389},
      {4, 1, 11098, 67434, 10188, 63702}, {3, 2, 9585, 65627, 8562, 61789},   {4, 2, 9063, 65011, 8176, 61329}};
  return rows;
}

inline const double kRootSensitivity[4][4] = {{0.2956, 0.2339, 0.4241, 0.3250},
                                              {0.2336, 0.1848, 0.3352, 0.2568},
                                              {0.2109, 0.1669, 0.3026, 0.2319},
                                              {0.1973, 0.1562, 0.2832, 0.2170}};

inline void four_node(const AdjacencyMatrix& a, CheckList& c) {
  c.guard("fig1 perron", [&] {
    const auto t = perron_triple(a, {.tol = 1e-13});
    const RankOneSensitivity s(t);
    for (index_t i = 0; i < 4; ++i) {
      for (index_t j = 0; j < 4; ++j) c.abs("fig1 S^PR" + pair(i, j), kRootSensitivity[i][j], s(i, j), 5e-5);
    }
    for (const auto& r : table1()) {
      const Direction d(r.i - 1, r.j - 1);
      c.rel("fig1 S^PN" + pair(d), r.spn, perron_sensitivity(a, d, t), 1e-3);
      c.rel("fig1 C^PN(A+E" + pair(d) + ")", r.cpn, perron_communicability(perron_triple(a.with_change(d.i(), d.j(), 1.0))),
            1e-3);
    }
  });
  c.guard("fig1 total sensitivity", [&] {
    const auto scan = total_sensitivity_scan(a, candidate_directions(a, CandidateFilter::all));
    std::string want, got;
    for (std::size_t k = 0; k < table1().size(); ++k) {
      const auto& r = table1()[k];
      want += pair(r.i - 1, r.j - 1);
      got += pair(scan.records[k].direction);
      const Direction d(r.i - 1, r.j - 1);
      const auto it = std::find_if(scan.records.begin(), scan.records.end(),
                                   [&](const SensitivityRecord& s) { return s.direction == d; });
      c.rel("fig1 S^TN" + pair(d), r.stn, it->value, 5e-4);
      c.rel("fig1 C^TN(A+E" + pair(d) + ")", r.ctn, total_communicability(a.with_change(d.i(), d.j(), 1.0)), 5e-4);
    }
    c.same("fig1 ranking", want, got);
  });
}

inline void path(const AdjacencyMatrix& p, CheckList& c) {
  c.guard("path C^TN", [&] {
    c.abs("path C^TN", 11.03, total_communicability(p), 0.01);
    c.abs("path C^TN(A+E(8,1))", 13.75, total_communicability(p.with_change(7, 0, 1.0)), 0.01);
    c.abs("path C^TN(A+E(1,3))", 12.75, total_communicability(p.with_change(0, 2, 1.0)), 0.01);
  });
  for (std::size_t n = 4; n <= 12; ++n) {
    c.guard("path argmax n=" + std::to_string(n), [&] {
      std::vector<Edge> es;
      for (std::size_t k = 0; k + 1 < n; ++k) es.push_back({k, k + 1, 1.0});
      const AdjacencyMatrix g(n, es, true);
      const auto scan = total_sensitivity_scan(g, candidate_directions(g, CandidateFilter::all));
      std::string got = pair(scan.records[0].direction);
      if (scan.records[1].value >= scan.records[0].value) got += " (tied)";
      c.same("path argmax n=" + std::to_string(n), pair(n - 1, 0), got);
    });
  }
}

inline void eight_node(const AdjacencyMatrix& a, CheckList& c) {
  c.guard("fig2 shifted perron", [&] {
    const auto sel = select_delta(a, root_sensitivity_selector(CandidateFilter::all));
    c.same("fig2 delta", "1e-05", detail::number(sel.delta, false));
    const auto top = top_k_root_sensitivities(sel.triple, 3, CandidateFilter::all, a);
    const std::vector<std::pair<Direction, double>> want{
        {Direction(4, 0), 0.477305}, {Direction(4, 1), 0.477298}, {Direction(4, 7), 0.400601}};
    for (std::size_t k = 0; k < want.size(); ++k) {
      c.same("fig2 S^PR top " + std::to_string(k + 1), pair(want[k].first), pair(top[k].direction));
      c.abs("fig2 S^PR" + pair(want[k].first), want[k].second, perron_root_sensitivity(sel.triple, want[k].first), 5e-6);
    }
    c.rel("fig2 S^PN(5,2)", 28.5369, perron_sensitivity(sel.op, Direction(4, 1), sel.triple), 1e-2);
  });
  c.guard("fig2 total sensitivity", [&] {
    c.rel("fig2 S^TN(5,1)", 16.8311, total_sensitivity_exact(a, Direction(4, 0)), 1e-3);
    c.rel("fig2 C^TN(A+E(5,1))", 68.1499, total_communicability(a.with_change(4, 0, 1.0)), 1e-3);
  });
}

inline void seven_node(const AdjacencyMatrix& a, CheckList& c) {
  c.guard("fig4 comparison", [&] {
    const auto t = compare_methods(a, candidate_directions(a, CandidateFilter::non_edges), {.delta = 1e-5});
    const std::vector<std::tuple<std::string, Direction, double>> want{{"eTC", Direction(4, 2), 117.3601},
                                                                      {"egTC", Direction(4, 2), 117.3601},
                                                                      {"S^TN", Direction(6, 4), 127.1123},
                                                                      {"S^PN", Direction(3, 4), 124.1918},
                                                                      {"S^PR", Direction(6, 4), 127.1123}};
    for (const auto& [method, d, ctn] : want) {
      const auto it = std::find_if(t.rows.begin(), t.rows.end(), [&](const ComparisonRow& r) { return r.method == method; });
      if (!it->error.empty()) {
        c.error("fig4 " + method, it->error);
        continue;
      }
      c.same("fig4 " + method + " edge", pair(d), pair(*it->selected));
      c.abs("fig4 " + method + " C^TN after", ctn, it->ctn_after, 5e-5);
    }
  });
}

} // namespace golden

inline const std::vector<std::string>& golden_fixtures() {
  static const std::vector<std::string> names{"fig1.txt", "path8.txt", "fig2.txt", "fig4.txt"};
  return names;
}

// Runs the reference-value checks against the fixture directory.
inline std::vector<Check> run_golden_suite(const std::string& dir, std::optional<double> tol_override) {
  namespace fs = std::filesystem;
  std::vector<AdjacencyMatrix> graphs;
  for (const auto& name : golden_fixtures()) {
    const auto path = (fs::path(dir) / name).string();
    if (!fs::exists(path)) throw DataError("missing fixture file '" + path + "'");
    graphs.push_back(load_graph(path));
  }
  CheckList c(tol_override);
  golden::four_node(graphs[0], c);
  golden::path(graphs[1], c);
  golden::eight_node(graphs[2], c);
  golden::seven_node(graphs[3], c);
  return c.checks();
}

} // namespace netsens::cli
