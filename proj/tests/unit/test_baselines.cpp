#include <gtest/gtest.h>

#include "netsens/baselines.hpp"
#include "oracles.hpp"

using namespace netsens;

namespace {

const ComparisonRow& row(const ComparisonTable& t, const std::string& name) {
  for (const auto& r : t.rows) {
    if (r.method == name) return r;
  }
  throw std::runtime_error("no row " + name);
}

} // namespace

TEST(Svd, FactorsAndSigns) {
  std::mt19937_64 rng(7);
  const Matrix a = oracle::random_strong(12, 0.3, rng).to_dense();
  const auto f = svd_factors(a);
  EXPECT_LT((f.U * f.sigma.asDiagonal() * f.V.transpose() - a).norm(), 1e-10);
  for (Eigen::Index k = 0; k + 1 < f.sigma.size(); ++k) EXPECT_GE(f.sigma[k], f.sigma[k + 1]);
  EXPECT_GE(f.sigma.minCoeff(), 0.0);
  for (Eigen::Index k = 0; k < f.U.cols(); ++k) {
    Eigen::Index p = 0;
    while (std::abs(f.U(p, k)) <= 1e-14) ++p;
    EXPECT_GT(f.U(p, k), 0.0);
  }
}

TEST(EdgeBaselines, ZeroMatrix) {
  const AdjacencyMatrix z(5, {}, true);
  EXPECT_DOUBLE_EQ(edge_tc(z, Direction(1, 3)), 1.0);
  EXPECT_DOUBLE_EQ(edge_gtc(z, Direction(1, 3)), 0.0);
}

TEST(EdgeBaselines, AgreeWithDenseFormulas) {
  std::mt19937_64 rng(17);
  const auto a = oracle::random_strong(9, 0.3, rng, 1.0);
  const Matrix d = a.to_dense();
  const Matrix e = oracle::expm(d);
  // sinh of the singular values is the odd part of exp on [[0, A], [A^T, 0]]
  Matrix b = Matrix::Zero(18, 18);
  b.topRightCorner(9, 9) = d;
  b.bottomLeftCorner(9, 9) = d.transpose();
  const Matrix odd = 0.5 * (oracle::expm(b) - oracle::expm(-b));
  const Vector ch = odd.topRightCorner(9, 9).rowwise().sum();
  const Vector ca = odd.bottomLeftCorner(9, 9).rowwise().sum();
  for (auto [i, j] : {std::pair{0, 1}, {4, 2}, {8, 0}}) {
    EXPECT_LT(oracle::rel(edge_tc(a, Direction(i, j)), e.row(i).sum() * e.col(j).sum()), 1e-12);
    EXPECT_LT(oracle::rel(edge_gtc(a, Direction(i, j)), ch[i] * ca[j]), 1e-10);
  }
}

TEST(EdgeBaselines, RankOne) {
  Vector u(4), v(4);
  u << 1, 2, 0, 2;
  v << 0, 3, 4, 0;
  u.normalize();
  v.normalize();
  const double sigma = 1.7;
  const Matrix a = sigma * u * v.transpose();
  const EdgeGeneralizedCommunicability g(a);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      if (i == j) continue;
      const double want = std::pow(std::sinh(sigma), 2) * u[i] * v.sum() * v[j] * u.sum();
      EXPECT_NEAR(g(Direction(i, j)), want, 1e-12);
    }
  }
}

TEST(EdgeBaselines, SymmetricGraph) {
  std::mt19937_64 rng(19);
  const auto a = oracle::random_strong(10, 0.3, rng, 1.0, false);
  const EdgeGeneralizedCommunicability g(a.to_dense());
  EXPECT_LT((g.hub - g.authority).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(edge_tc(a, Direction(2, 7)), edge_tc(a, Direction(7, 2)), 1e-9);
}

TEST(EdgeBaselines, DenseLimit) {
  const auto a = oracle::load("fig4.txt");
  EXPECT_THROW(edge_tc(a, Direction(0, 1), 3), DenseLimitError);
  EXPECT_THROW(edge_gtc(a, Direction(0, 1), 3), DenseLimitError);
}

TEST(Compare, SevenNodeExample) {
  const auto a = oracle::load("fig4.txt");
  const auto t = compare_methods(a, candidate_directions(a, CandidateFilter::non_edges), {.delta = 1e-5});
  ASSERT_EQ(t.rows.size(), 5u);
  for (const char* name : {"eTC", "egTC"}) {
    EXPECT_EQ(*row(t, name).selected, Direction(4, 2)) << name;
    EXPECT_LT(oracle::rel(row(t, name).ctn_after, 117.3601), 1e-6);
  }
  for (const char* name : {"S^TN", "S^PR"}) {
    EXPECT_EQ(*row(t, name).selected, Direction(6, 4)) << name;
    EXPECT_LT(oracle::rel(row(t, name).ctn_after, 127.1123), 1e-6);
  }
  EXPECT_EQ(*row(t, "S^PN").selected, Direction(3, 4));
  EXPECT_LT(oracle::rel(row(t, "S^PN").ctn_after, 124.1918), 1e-6);
  // C^PN after the change against the dense oracle on A + delta 11^T + E
  for (const auto& r : t.rows) {
    EXPECT_TRUE(r.error.empty()) << r.error;
    Matrix m = a.to_dense().array() + 1e-5;
    m(r.selected->i(), r.selected->j()) += 1.0;
    EXPECT_LT(oracle::rel(r.cpn_after, oracle::cpn(m)), 1e-8) << r.method;
  }
}

TEST(Compare, SingleCandidate) {
  const auto a = oracle::load("fig1.txt");
  const auto t = compare_methods(a, {Direction(1, 3)});
  for (const auto& r : t.rows) {
    EXPECT_EQ(*r.selected, Direction(1, 3)) << r.method;
    EXPECT_TRUE(r.error.empty());
  }
}

TEST(Compare, RemovalAnalysis) {
  const auto a = oracle::load("fig1.txt");
  const auto t =
      compare_methods(a, candidate_directions(a, CandidateFilter::existing_edges), {.change = -1.0});
  const Matrix d = a.to_dense();
  for (const auto& r : t.rows) {
    Matrix m = d;
    m(r.selected->i(), r.selected->j()) -= 1.0;
    EXPECT_LT(oracle::rel(r.ctn_after, oracle::ctn(m)), 1e-12) << r.method;
    EXPECT_LT(r.ctn_after, t.ctn);
  }
}

TEST(Compare, ReducibleWithoutShiftReportsPerMethod) {
  const auto a = oracle::load("fig4.txt");
  const auto t = compare_methods(a, candidate_directions(a, CandidateFilter::non_edges));
  EXPECT_FALSE(t.cpn.has_value());
  EXPECT_TRUE(row(t, "eTC").error.empty());
  EXPECT_FALSE(row(t, "S^PR").error.empty());
  EXPECT_FALSE(row(t, "S^PN").error.empty());
  EXPECT_THROW(compare_methods(a, {}), DataError);
}
