#include <gtest/gtest.h>

#include "netsens/estimators.hpp"
#include "netsens/krylov.hpp"
#include "oracles.hpp"

using namespace netsens;

namespace {

Matrix random_dense(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = g(rng);
  return m;
}

const std::vector<Method> kAll{Method::arnoldi_block, Method::arnoldi_fd, Method::lanczos_block, Method::lanczos_fd,
                               Method::kkrs};

} // namespace

TEST(ArnoldiProcess, IdentityTruncates) {
  const DenseOperator id(Matrix::Identity(6, 6));
  const auto d = arnoldi(id, Vector::Ones(6) / std::sqrt(6.0), 4);
  EXPECT_EQ(d.m, 1u);
  EXPECT_TRUE(d.breakdown);
  EXPECT_NEAR(d.H(0, 0), 1.0, 1e-15);
}

TEST(ArnoldiProcess, RelationAndOrthogonality) {
  const DenseOperator op(random_dense(30, 1));
  Vector v1 = Vector::LinSpaced(30, 1.0, 3.0);
  v1.normalize();
  for (std::size_t m : {3u, 5u, 12u}) {
    const auto d = arnoldi(op, v1, m);
    ASSERT_EQ(d.m, m);
    Matrix em = Matrix::Zero(1, static_cast<Eigen::Index>(m));
    em(0, static_cast<Eigen::Index>(m) - 1) = 1.0;
    const Matrix lhs = op.matrix() * d.V;
    const Matrix rhs = d.V * d.H + d.g * em;
    EXPECT_LT((lhs - rhs).norm() / lhs.norm(), 1e-12);
    EXPECT_LT((d.V.transpose() * d.V - Matrix::Identity(d.V.cols(), d.V.cols())).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((d.V.transpose() * d.g).norm() / d.g.norm(), 1e-10);
  }
  // p(A) v1 = V p(H) e1 for degree below m
  const auto d = arnoldi(op, v1, 3);
  const Vector a2v = op.matrix() * (op.matrix() * v1);
  const Vector vh2 = d.V * (d.H * d.H).col(0);
  EXPECT_LT((a2v - vh2).norm() / a2v.norm(), 1e-12);
}

TEST(LanczosProcess, SymmetricReducesToLanczos) {
  Matrix s = random_dense(20, 2);
  s = (s + s.transpose()).eval();
  const DenseOperator op(s);
  Vector v1 = Vector::Ones(20);
  v1.normalize();
  const auto d = lanczos_biorth(op, v1, v1, 8);
  EXPECT_LT((d.V - d.W).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((d.T - d.T.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  for (Eigen::Index r = 0; r < d.T.rows(); ++r) {
    for (Eigen::Index c = 0; c < d.T.cols(); ++c) {
      if (std::abs(r - c) > 1) EXPECT_EQ(d.T(r, c), 0.0);
    }
  }
}

TEST(LanczosProcess, Biorthogonality) {
  const DenseOperator op(random_dense(30, 3));
  Vector v1 = Vector::Ones(30);
  v1.normalize();
  Vector w1 = Vector::LinSpaced(30, 0.5, 1.5);
  w1.normalize();
  const auto d = lanczos_biorth(op, v1, w1, 10);
  ASSERT_EQ(d.m, 10u);
  EXPECT_LT((d.W.transpose() * d.V - Matrix::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-10);
  Matrix em = Matrix::Zero(1, 10);
  em(0, 9) = 1.0;
  const Matrix r1 = op.matrix() * d.V - d.V * d.T - d.g1 * em;
  const Matrix r2 = op.matrix().transpose() * d.W - d.W * d.T.transpose() - d.g2 * em;
  EXPECT_LT(r1.norm() / (op.matrix() * d.V).norm(), 1e-8);
  EXPECT_LT(r2.norm() / (op.matrix().transpose() * d.W).norm(), 1e-8);
}

TEST(LanczosProcess, EngineeredSeriousBreakdown) {
  // A v1 = e2, A^T w1 = e3 with e2 orthogonal to e3: after one step the new
  // residuals are nonzero and mutually orthogonal.
  Matrix a = Matrix::Zero(4, 4);
  a(1, 0) = 1.0; // A e1 = e2
  a(0, 2) = 1.0; // A^T e1 = e3
  const DenseOperator op(a);
  const Vector e1 = Vector::Unit(4, 0);
  EXPECT_THROW(lanczos_biorth(op, e1, e1, 3), SeriousBreakdown);
  try {
    lanczos_biorth(op, e1, e1, 3);
  } catch (const SeriousBreakdown& b) {
    EXPECT_EQ(b.step(), 1u);
  }
}

TEST(Estimators, FourNodeGraph) {
  const auto a = oracle::load("fig1.txt");
  const Direction d(0, 2);
  const double exact = total_sensitivity_exact(a, d);
  for (auto m : kAll) {
    EstimatorConfig cfg;
    cfg.method = m;
    const auto r = estimate(a, d, cfg);
    EXPECT_LT(oracle::rel(r.value, 22615.0), 1e-3) << to_string(m);
    EXPECT_LT(oracle::rel(r.value, exact), 1e-3) << to_string(m);
    EXPECT_TRUE(r.converged);
  }
}

TEST(Estimators, ZeroMatrixGivesOne) {
  const AdjacencyMatrix z(4, {}, true);
  for (auto m : kAll) {
    EstimatorConfig cfg;
    cfg.method = m;
    const auto r = estimate(z, Direction(1, 3), cfg);
    EXPECT_NEAR(r.value, 1.0, 1e-6) << to_string(m);
  }
  EstimatorConfig cfg;
  cfg.method = Method::arnoldi_block;
  const auto r = estimate(z, Direction(1, 3), cfg);
  EXPECT_EQ(r.steps, 2u);
  EXPECT_NEAR(r.value, 1.0, 1e-15);
}

TEST(Estimators, ExactLimit) {
  std::mt19937_64 rng(41);
  for (std::size_t n : {6u, 10u, 14u}) {
    const auto a = oracle::random_strong(n, 0.3, rng, 1.0);
    for (const Direction d : {Direction(0, 3), Direction(n - 1, 1)}) {
      const double exact = total_sensitivity_exact(a, d);
      for (auto m : kAll) {
        EstimatorConfig cfg;
        cfg.method = m;
        const bool block = m == Method::arnoldi_block || m == Method::lanczos_block;
        cfg.fixed_steps = block ? 2 * n : n;
        // the finite-difference forms carry an O(t) bias of their own
        if (m == Method::arnoldi_fd || m == Method::lanczos_fd) cfg.t_step = 1e-7;
        const auto r = estimate(a, d, cfg);
        const double tol = (m == Method::arnoldi_fd || m == Method::lanczos_fd) ? 1e-5 : 1e-8;
        EXPECT_LT(oracle::rel(r.value, exact), tol) << to_string(m) << " n=" << n;
      }
    }
  }
}

TEST(Estimators, RandomGraphsAgreeWithOracle) {
  std::mt19937_64 rng(43);
  for (int rep = 0; rep < 3; ++rep) {
    const auto a = oracle::random_strong(40, 0.1, rng);
    const Matrix dense = a.to_dense();
    std::uniform_int_distribution<index_t> node(0, 39);
    for (int k = 0; k < 6; ++k) {
      index_t i = node(rng), j = node(rng);
      if (i == j) j = (j + 1) % 40;
      const Direction d(i, j);
      const double exact = total_sensitivity_exact(dense, d);
      for (auto m : kAll) {
        EstimatorConfig cfg;
        cfg.method = m;
        const auto r = estimate(a, d, cfg);
        EXPECT_LT(oracle::rel(r.value, exact), 1e-3) << to_string(m) << " " << r.method_tag();
      }
    }
  }
}

TEST(Estimators, SymmetricDirections) {
  std::mt19937_64 rng(47);
  const auto a = oracle::random_strong(30, 0.1, rng, 1.0, false);
  const Direction d(2, 9, true);
  const double exact = total_sensitivity_exact(a, d);
  for (auto m : kAll) {
    EstimatorConfig cfg;
    cfg.method = m;
    EXPECT_LT(oracle::rel(estimate(a, d, cfg).value, exact), 1e-3) << to_string(m);
  }
}

TEST(Estimators, CostModel) {
  std::mt19937_64 rng(53);
  const auto a = oracle::random_strong(50, 0.1, rng);
  const Direction d(4, 7);
  for (auto [m, per] : {std::pair{Method::arnoldi_block, 2u}, {Method::arnoldi_fd, 2u}, {Method::kkrs, 2u},
                        {Method::lanczos_block, 4u}, {Method::lanczos_fd, 4u}}) {
    EstimatorConfig cfg;
    cfg.method = m;
    const auto r = estimate(a, d, cfg);
    if (r.fallback) continue;
    EXPECT_EQ(r.matvecs, per * r.steps) << to_string(m);
    EXPECT_LE(r.steps, cfg.m_max);
  }
}

TEST(Estimators, TighterToleranceMovesLittle) {
  std::mt19937_64 rng(59);
  const auto a = oracle::random_strong(60, 0.08, rng);
  const Direction d(1, 2);
  EstimatorConfig loose, tight;
  tight.tol = 1e-5;
  const double x = estimate(a, d, loose).value;
  const double y = estimate(a, d, tight).value;
  EXPECT_LE(oracle::rel(x, y), 1e-4);
}

TEST(Estimators, StepHalvingIsFirstOrderConsistent) {
  const auto a = oracle::load("fig1.txt");
  EstimatorConfig c1, c2;
  c2.t_step = 1e-5;
  c1.tol = c2.tol = 1e-8;
  EXPECT_LE(oracle::rel(estimate(a, Direction(0, 2), c1).value, estimate(a, Direction(0, 2), c2).value), 1e-4);
}

TEST(Estimators, ScaledMonitoringReportsUnscaledValue) {
  const auto a = oracle::load("fig1.txt");
  EstimatorConfig cfg;
  cfg.method = Method::lanczos_block;
  cfg.scale = 3.0;
  const auto r = estimate(a, Direction(0, 2), cfg);
  EXPECT_LT(oracle::rel(r.value, total_sensitivity_exact(a, Direction(0, 2))), 1e-3);
}

TEST(Estimators, Validation) {
  const auto a = oracle::load("fig1.txt");
  EstimatorConfig cfg;
  cfg.tol = 0.0;
  EXPECT_THROW(estimate(a, Direction(0, 1), cfg), DataError);
  cfg = {};
  cfg.method = Method::exact;
  EXPECT_THROW(estimate(a, Direction(0, 1), cfg), DataError);
  cfg = {};
  cfg.m_max = 1;
  EXPECT_THROW(estimate(a, Direction(0, 1), cfg), DataError);
}

TEST(Scan, ExactPairsAndCsv) {
  const auto a = oracle::load("fig1.txt");
  EstimatorConfig cfg;
  cfg.method = Method::kkrs;
  EXPECT_TRUE(scan_estimated(a, {}, cfg).records.empty());
  const auto cands = candidate_directions(a, CandidateFilter::all);
  const auto scan = scan_estimated(a, cands, cfg, true, 2);
  ASSERT_EQ(scan.records.size(), cands.size());
  ASSERT_EQ(scan.exact.size(), cands.size());
  for (std::size_t k = 0; k < cands.size(); ++k) EXPECT_LT(oracle::rel(scan.records[k].value, *scan.exact[k]), 1e-3);
  std::ostringstream csv;
  write_scatter_csv(csv, scan);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "i,j,method,approx,exact,steps,matvecs");
  EXPECT_NE(csv.str().find("\n1,2,kkrs,"), std::string::npos);
}

TEST(ArnoldiProcess, FullDimensionIsInvariant) {
  const DenseOperator op(random_dense(5, 9));
  const auto d = arnoldi(op, Vector::Ones(5), 10);
  EXPECT_EQ(d.m, 5u);
  EXPECT_TRUE(d.breakdown);
}

TEST(LanczosProcess, BlockStartLeavesLeftSpaceInBottomBlock) {
  // M^T keeps [0; v] in the bottom block, so the left recurrence runs out
  // after n steps and the block estimator must hand over to Arnoldi.
  const auto a = oracle::load("fig1.txt");
  EstimatorConfig cfg;
  cfg.method = Method::lanczos_block;
  const auto r = estimate(a, Direction(0, 2), cfg);
  ASSERT_TRUE(r.fallback.has_value());
  EXPECT_EQ(r.method_tag(), "lanczos-block>arnoldi-block");
  EXPECT_LT(oracle::rel(r.value, total_sensitivity_exact(a, Direction(0, 2))), 1e-10);
}
