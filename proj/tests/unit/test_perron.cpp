#include <chrono>

#include <gtest/gtest.h>

#include "netsens/connectivity.hpp"
#include "netsens/irreducible.hpp"
#include "netsens/perron.hpp"
#include "oracles.hpp"

using namespace netsens;

TEST(Perron, FourNodeRootSensitivityMatrix) {
  const auto a = oracle::load("fig1.txt");
  const auto t = perron_triple(a);
  Matrix expect(4, 4);
  expect << 0.2956, 0.2339, 0.4241, 0.3250, 0.2336, 0.1848, 0.3352, 0.2568, 0.2109, 0.1669, 0.3026, 0.2319, 0.1973,
      0.1562, 0.2832, 0.2170;
  const RankOneSensitivity s(t);
  for (index_t i = 0; i < 4; ++i) {
    for (index_t j = 0; j < 4; ++j) EXPECT_NEAR(s(i, j), expect(i, j), 5e-5) << i << "," << j;
  }
  EXPECT_NEAR(perron_root_sensitivity(t, Direction(0, 2)), 0.4241, 5e-5);
  EXPECT_LE(t.residual, 1e-10 * t.rho);
  EXPECT_NEAR(t.x.norm(), 1.0, 1e-12);
  EXPECT_NEAR(t.y.norm(), 1.0, 1e-12);
  EXPECT_GE(t.kappa(), 1.0);
  EXPECT_NEAR(s.sum(), t.x.sum() * t.y.sum() / t.y.dot(t.x), 1e-10);
}

TEST(Perron, MatchesDenseOracle) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 5; ++rep) {
    const auto a = oracle::random_strong(40 + 10 * rep, 0.08, rng);
    const auto t = perron_triple(a);
    const auto o = oracle::perron(a.to_dense());
    EXPECT_LT(oracle::rel(t.rho, o.rho), 1e-10);
    EXPECT_LT((t.x - o.x).norm(), 1e-8);
    EXPECT_LT((t.y - o.y).norm(), 1e-8);
  }
}

TEST(Perron, SymmetricShortcut) {
  std::mt19937_64 rng(4);
  const auto a = oracle::random_strong(25, 0.1, rng, 2.0, false);
  const auto t = perron_triple(a);
  EXPECT_LT((t.x - t.y).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(t.kappa(), 1.0, 1e-12);

  const auto e = parse_edge_list("1 2\n", {.directed = false});
  const auto te = perron_triple(e);
  EXPECT_NEAR(te.rho, 1.0, 1e-12);
  EXPECT_NEAR(te.x[0], std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(te.x[1], std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(perron_communicability(te), 2.0 * std::expm1(1.0), 1e-12);
}

TEST(Perron, RejectsReducibleAndTiny) {
  EXPECT_THROW(perron_triple(oracle::load("path8.txt")), NumericalError);
  EXPECT_THROW(perron_triple(AdjacencyMatrix(1, {}, true)), DataError);
}

TEST(Perron, CommunicabilityBoundAndLog) {
  const auto a = oracle::load("fig1.txt");
  const auto t = perron_triple(a);
  const double c = perron_communicability(t);
  EXPECT_LE(c, 4 * std::expm1(t.rho));
  EXPECT_NEAR(log_perron_communicability(t), std::log(c), 1e-12);
  EXPECT_NEAR(perron_communicability(perron_triple(a.with_change(0, 2, 1.0))), 79872, 79872 * 1e-3);
}

TEST(Perron, NetworkSensitivityTable) {
  const auto a = oracle::load("fig1.txt");
  const auto base = perron_triple(a);
  struct Row {
    int i, j;
    double spn, cpn;
  };
  const std::vector<Row> rows{{1, 3, 22781, 79872}, {2, 3, 18247, 73711}, {1, 4, 17577, 72722}, {4, 3, 15009, 69720},
                              {2, 4, 14078, 68481}, {1, 2, 12411, 66543}, {2, 1, 12394, 66250}, {3, 4, 12134, 66022},
                              {3, 1, 10666, 64389}, {4, 1, 10188, 63702}, {3, 2, 8562, 61789},  {4, 2, 8176, 61329}};
  for (const auto& r : rows) {
    const Direction d(r.i - 1, r.j - 1);
    EXPECT_LT(oracle::rel(perron_sensitivity(a, d, base), r.spn), 1e-3) << r.i << r.j;
    EXPECT_LT(oracle::rel(perron_communicability(perron_triple(a.with_change(d.i(), d.j(), 1.0))), r.cpn), 1e-3);
  }
}

TEST(Perron, SymmetricDirectionDoublesOnSymmetricGraph) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 3; ++rep) {
    const auto a = oracle::random_strong(8, 0.3, rng, 1.0, false);
    const auto base = perron_triple(a);
    const double one = perron_sensitivity(a, Direction(1, 4), base);
    const double both = perron_sensitivity(a, Direction(1, 4, true), base);
    EXPECT_LT(oracle::rel(both, 2 * one), 1e-3);
    // dense reference via the same difference quotient on the eigendecomposition
    const Matrix d = a.to_dense();
    const double h = 2e-5;
    const Matrix e = oracle::unit(8, 1, 4) + oracle::unit(8, 4, 1);
    EXPECT_LT(oracle::rel(both, (oracle::cpn(d + h * e) - oracle::cpn(d)) / h), 1e-5);
  }
}

TEST(Perron, WarmStartNotSlower) {
  std::mt19937_64 rng(13);
  const auto a = oracle::random_strong(300, 0.03, rng);
  const auto base = perron_triple(a);
  RankUpdatedOperator<AdjacencyMatrix> moved(a, Direction(3, 17), 2e-5);
  const auto cold = perron_triple(moved);
  PerronOptions warm;
  warm.x0 = base.x;
  warm.y0 = base.y;
  const auto hot = perron_triple(moved, warm);
  EXPECT_LE(hot.matvecs, cold.matvecs);
  EXPECT_NEAR(hot.rho, cold.rho, 1e-9 * cold.rho);
}

TEST(Perron, RootSlopeIsSensitivity) {
  std::mt19937_64 rng(17);
  const auto a = oracle::random_strong(10, 0.3, rng);
  const Matrix d = a.to_dense();
  const auto t = perron_triple(a);
  for (auto [i, j] : {std::pair{0, 5}, {7, 2}}) {
    const double s = perron_root_sensitivity(t, Direction(i, j));
    double prev_err = 0.0;
    for (double eps : {1e-4, 1e-5}) {
      const double slope = (oracle::perron(d + eps * oracle::unit(10, i, j)).rho - t.rho) / eps;
      const double err = std::abs(slope - s);
      EXPECT_LT(err, 10 * eps * s);
      if (prev_err > 0.0) EXPECT_LT(err, prev_err);
      prev_err = err;
    }
  }
}

TEST(Perron, MaxEntryBoundedByKappa) {
  const auto t = perron_triple(oracle::load("fig1.txt"));
  EXPECT_LE(t.y.maxCoeff() * t.x.maxCoeff() / t.y.dot(t.x), t.kappa());
}

TEST(Perron, KappaRelation) {
  const auto a = oracle::load("fig1.txt");
  const auto k = kappa_relation_report(a);
  EXPECT_LT(oracle::rel(k.spectral_total, k.ctn), 1e-8);
  EXPECT_LT(k.dominance_ratio, 1.0);

  // rank-one dominant: rho / |lambda_2| well above 20
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  Matrix m(12, 12);
  Vector p(12), q(12);
  for (int r = 0; r < 12; ++r) {
    p[r] = u(rng);
    q[r] = u(rng);
  }
  for (int r = 0; r < 12; ++r) {
    for (int c = 0; c < 12; ++c) m(r, c) = p[r] * q[c] + 0.01 * u(rng);
  }
  const auto kr = kappa_relation_report(m);
  ASSERT_GE(1.0 / kr.dominance_ratio, 20.0);
  EXPECT_LE(std::abs(kr.ctn - kr.kappa_cpn) / kr.ctn, 0.05);

  std::mt19937_64 rng2(9);
  const auto s = oracle::random_strong(10, 0.3, rng2, 1.0, false);
  const auto ks = kappa_relation_report(s);
  EXPECT_NEAR(ks.kappa, 1.0, 1e-10);
  EXPECT_LT(oracle::rel(ks.spectral_total, ks.ctn), 1e-8);
}

TEST(TopK, EightNodeShifted) {
  const auto a = oracle::load("fig2.txt");
  const PerturbedOperator op(a, 1e-5);
  const auto t = perron_triple(op);
  const auto top = top_k_root_sensitivities(t, 3, CandidateFilter::all, a);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].direction, Direction(4, 0));
  EXPECT_EQ(top[1].direction, Direction(4, 1));
  EXPECT_EQ(top[2].direction, Direction(4, 7));
  EXPECT_NEAR(top[0].value, 0.477305, 5e-7);
  EXPECT_NEAR(top[1].value, 0.477298, 5e-7);
  EXPECT_NEAR(top[2].value, 0.400601, 5e-7);
}

TEST(TopK, MatchesBruteForce) {
  std::mt19937_64 rng(31);
  const auto a = oracle::random_strong(60, 0.1, rng);
  const auto t = perron_triple(a);
  for (auto f : {CandidateFilter::all, CandidateFilter::non_edges, CandidateFilter::existing_edges}) {
    std::vector<SensitivityRecord> brute;
    for (const auto& d : candidate_directions(a, f)) brute.push_back({d, Method::perron_root, perron_root_sensitivity(t, d)});
    rank_records(brute);
    const auto top = top_k_root_sensitivities(t, 10, f, a);
    ASSERT_EQ(top.size(), 10u);
    for (std::size_t k = 0; k < 10; ++k) {
      EXPECT_EQ(top[k].direction, brute[k].direction);
      EXPECT_DOUBLE_EQ(top[k].value, brute[k].value);
    }
  }
  // the unconstrained argmax is (argmax y, argmax x)
  Eigen::Index iy, jx;
  t.y.maxCoeff(&iy);
  t.x.maxCoeff(&jx);
  if (iy != jx) {
    EXPECT_EQ(top_k_root_sensitivities(t, 1, CandidateFilter::all, a)[0].direction,
              Direction(static_cast<index_t>(iy), static_cast<index_t>(jx)));
  }
  EXPECT_EQ(top_k_root_sensitivities(t, 100000, CandidateFilter::existing_edges, a).size(), a.nnz());
}

TEST(SelectDelta, EightNodeGraph) {
  const auto a = oracle::load("fig2.txt");
  ASSERT_FALSE(is_strongly_connected(a));
  const auto sel = select_delta(a, root_sensitivity_selector(CandidateFilter::all));
  EXPECT_DOUBLE_EQ(sel.delta, 1e-5);
  EXPECT_EQ(top_k_root_sensitivities(sel.triple, 1, CandidateFilter::all, a)[0].direction, Direction(4, 0));
  // network sensitivity of the shifted operator
  const double spn = perron_sensitivity(sel.op, Direction(4, 1), sel.triple);
  EXPECT_LT(oracle::rel(spn, 28.5369), 1e-2);
}

TEST(SelectDelta, IrreducibleStable) {
  const auto a = oracle::load("fig1.txt");
  const auto sel = select_delta(a, root_sensitivity_selector(CandidateFilter::all));
  EXPECT_DOUBLE_EQ(sel.delta, 1e-5);
  EXPECT_EQ(sel.reductions, 1u);
}
