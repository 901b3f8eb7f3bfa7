#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <unordered_set>
#include <vector>

#include <Eigen/Eigenvalues>

#include "netsens/adjacency.hpp"
#include "netsens/communicability.hpp"
#include "netsens/error.hpp"
#include "netsens/linalg.hpp"
#include "netsens/operators.hpp"
#include "netsens/record.hpp"

namespace netsens {

struct PerronTriple {
  double rho = 0.0;
  Vector x; // right, unit 2-norm, positive
  Vector y; // left, unit 2-norm, positive
  double residual = 0.0;
  std::size_t matvecs = 0;
  bool power_fallback = false;

  double kappa() const { return 1.0 / y.dot(x); }
};

struct PerronOptions {
  double tol = 1e-10;
  std::size_t krylov_dim = 20;
  std::size_t max_restarts = 500;
  std::size_t max_power_iterations = 200000;
  std::optional<Vector> x0;
  std::optional<Vector> y0;
};

namespace detail {

struct DominantPair {
  double theta = 0.0;
  Vector v;
  double residual = 0.0;
  std::size_t matvecs = 0;
  bool power_fallback = false;
};

inline Vector start_vector(const std::optional<Vector>& given, Eigen::Index n) {
  Vector v;
  if (given && given->size() == n && given->norm() > 0.0) {
    v = given->cwiseAbs();
  } else {
    v = Vector::Ones(n);
  }
  return v / v.norm();
}

// Dominant (largest real part) eigenpair of a nonnegative operator by
// explicitly restarted Arnoldi, with shifted power iteration as fallback.
template <class Apply>
DominantPair dominant_eigenpair(Apply&& apply, Eigen::Index n, Vector v, const PerronOptions& opts) {
  DominantPair out;
  const auto kmax = static_cast<Eigen::Index>(std::min<std::size_t>(std::max<std::size_t>(opts.krylov_dim, 2), n));
  Matrix basis(n, kmax + 1);
  Matrix h = Matrix::Zero(kmax + 1, kmax);
  Vector w, u, au;

  double best = std::numeric_limits<double>::infinity();
  std::size_t stalled = 0;
  double theta = 0.0;
  for (std::size_t restart = 0; restart < opts.max_restarts; ++restart) {
    basis.col(0) = v;
    h.setZero();
    Eigen::Index m = 0;
    for (; m < kmax; ++m) {
      apply(Vector(basis.col(m)), w);
      ++out.matvecs;
      const double wnorm = w.norm();
      for (int pass = 0; pass < 2; ++pass) {
        const Vector c = basis.leftCols(m + 1).transpose() * w;
        w.noalias() -= basis.leftCols(m + 1) * c;
        h.col(m).head(m + 1) += c;
      }
      const double beta = w.norm();
      h(m + 1, m) = beta;
      if (beta <= 1e-14 * std::max(wnorm, h.topLeftCorner(m + 1, m + 1).norm())) {
        ++m;
        break;
      }
      basis.col(m + 1) = w / beta;
    }

    Eigen::EigenSolver<Matrix> es(h.topLeftCorner(m, m));
    const auto& vals = es.eigenvalues();
    Eigen::Index pick = -1;
    for (Eigen::Index k = 0; k < vals.size(); ++k) {
      const bool real = std::abs(vals[k].imag()) <= 1e-10 * std::abs(vals[k]);
      if (real && (pick < 0 || vals[k].real() > vals[pick].real())) pick = k;
    }
    if (pick < 0) {
      pick = 0;
      for (Eigen::Index k = 1; k < vals.size(); ++k) {
        if (vals[k].real() > vals[pick].real()) pick = k;
      }
    }
    theta = vals[pick].real();
    Vector s = es.eigenvectors().col(pick).real();
    u = basis.leftCols(m) * s;
    u /= u.norm();
    if (u.sum() < 0.0) u = -u;

    apply(u, au);
    ++out.matvecs;
    const double res = (au - theta * u).norm();
    if (res <= opts.tol * std::abs(theta)) {
      out.theta = theta;
      out.v = u;
      out.residual = res;
      return out;
    }
    if (res < 0.5 * best) {
      best = res;
      stalled = 0;
    } else if (++stalled >= 8) {
      break;
    }
    v = u;
  }

  // (A + sigma I) shares the eigenvectors and is primitive for sigma > 0.
  out.power_fallback = true;
  const double sigma = std::max(std::abs(theta), 1e-3);
  v = u.cwiseAbs();
  if (!(v.norm() > 0.0)) v = Vector::Ones(n);
  v /= v.norm();
  for (std::size_t it = 0; it < opts.max_power_iterations; ++it) {
    apply(v, au);
    ++out.matvecs;
    const double rq = v.dot(au);
    const double res = (au - rq * v).norm();
    if (res <= opts.tol * std::abs(rq)) {
      out.theta = rq;
      out.v = v;
      out.residual = res;
      return out;
    }
    v = au + sigma * v;
    v /= v.norm();
  }
  throw NumericalError("Perron iteration did not converge");
}

inline void require_positive(const Vector& v, const char* which) {
  if (!(v.minCoeff() > 0.0)) {
    throw NumericalError(std::string("Perron ") + which +
                         " vector has nonpositive entries; the matrix looks reducible (try an irreducibility shift)");
  }
}

} // namespace detail

// Perron root with right and left Perron vectors of a nonnegative
// irreducible operator.
template <TransposableOperator Op>
PerronTriple perron_triple(const Op& op, const PerronOptions& opts = {}) {
  const auto n = static_cast<Eigen::Index>(op.size());
  if (n < 2) throw DataError("the Perron triple needs at least two nodes");
  if (!(opts.tol > 0.0)) throw DataError("Perron tolerance must be positive");

  PerronTriple t;
  const bool sym = is_symmetric_operator(op);
  // Slightly tighter per side so the combined residual meets tol.
  PerronOptions side = opts;
  side.tol = 0.5 * opts.tol;

  auto right = detail::dominant_eigenpair([&](const Vector& a, Vector& b) { op.apply(a, b); }, n,
                                          detail::start_vector(opts.x0, n), side);
  t.matvecs = right.matvecs;
  t.power_fallback = right.power_fallback;
  t.x = right.v;
  if (t.x.maxCoeff() < -t.x.minCoeff()) t.x = -t.x;
  if (sym) {
    t.y = t.x;
  } else {
    auto left = detail::dominant_eigenpair([&](const Vector& a, Vector& b) { op.apply_transpose(a, b); }, n,
                                           detail::start_vector(opts.y0, n), side);
    t.matvecs += left.matvecs;
    t.power_fallback = t.power_fallback || left.power_fallback;
    t.y = left.v;
    if (t.y.maxCoeff() < -t.y.minCoeff()) t.y = -t.y;
  }
  detail::require_positive(t.x, "right");
  detail::require_positive(t.y, "left");

  Vector ax, aty;
  op.apply(t.x, ax);
  t.rho = t.y.dot(ax) / t.y.dot(t.x);
  if (sym) {
    t.residual = (ax - t.rho * t.x).norm();
    t.matvecs += 1;
  } else {
    op.apply_transpose(t.y, aty);
    t.residual = std::max((ax - t.rho * t.x).norm(), (aty - t.rho * t.y).norm());
    t.matvecs += 2;
  }
  if (!(t.rho > 0.0)) throw NumericalError("Perron root is not positive");
  return t;
}

// S^PR_ij = y_i x_j / (y^T x); symmetric directions add the (j, i) entry.
inline double perron_root_sensitivity(const PerronTriple& t, const Direction& d) {
  const auto i = static_cast<Eigen::Index>(d.i());
  const auto j = static_cast<Eigen::Index>(d.j());
  double v = t.y[i] * t.x[j];
  if (d.symmetric()) v += t.y[j] * t.x[i];
  return v / t.y.dot(t.x);
}

// Entries of the rank-one matrix y x^T / (y^T x); never materialized.
class RankOneSensitivity {
public:
  explicit RankOneSensitivity(PerronTriple t) : t_(std::move(t)), scale_(1.0 / t_.y.dot(t_.x)) {}

  const PerronTriple& triple() const noexcept { return t_; }
  double operator()(index_t i, index_t j) const {
    return t_.y[static_cast<Eigen::Index>(i)] * t_.x[static_cast<Eigen::Index>(j)] * scale_;
  }
  double sum() const { return t_.y.sum() * t_.x.sum() * scale_; }

private:
  PerronTriple t_;
  double scale_;
};

// The k largest S^PR entries passing the filter. Walks the outer product of
// y and x (both sorted descending) through a max-heap frontier, so the cost
// is about k log k plus the rejected candidates. With `pairs` set and a
// symmetric triple, each unordered pair {i, j} is reported once as a
// symmetric direction carrying the one-sided value.
inline std::vector<SensitivityRecord> top_k_root_sensitivities(const PerronTriple& t, std::size_t k,
                                                               CandidateFilter filter, const AdjacencyMatrix& a,
                                                               bool pairs = false) {
  std::vector<SensitivityRecord> out;
  const std::size_t n = a.size();
  if (k == 0 || n < 2) return out;
  if (static_cast<std::size_t>(t.x.size()) != n) throw DataError("Perron triple does not match the graph");
  const double scale = 1.0 / t.y.dot(t.x);
  auto value = [&](index_t i, index_t j) {
    return t.y[static_cast<Eigen::Index>(i)] * t.x[static_cast<Eigen::Index>(j)] * scale;
  };

  if (filter == CandidateFilter::existing_edges) {
    for (const auto& e : a.edges()) {
      if (pairs && e.i > e.j) continue;
      out.push_back({Direction(e.i, e.j, pairs), Method::perron_root, value(e.i, e.j)});
    }
    rank_records(out);
    if (out.size() > k) out.erase(out.begin() + static_cast<std::ptrdiff_t>(k), out.end());
    return out;
  }

  auto order = [](const Vector& v) {
    std::vector<index_t> idx(static_cast<std::size_t>(v.size()));
    std::iota(idx.begin(), idx.end(), index_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](index_t p, index_t q) {
      return v[static_cast<Eigen::Index>(p)] > v[static_cast<Eigen::Index>(q)];
    });
    return idx;
  };
  const auto ys = order(t.y);
  const auto xs = order(t.x);

  struct Node {
    double v;
    std::size_t a, b;
  };
  auto cmp = [&](const Node& p, const Node& q) {
    if (p.v != q.v) return p.v < q.v;
    return std::tie(ys[p.a], xs[p.b]) > std::tie(ys[q.a], xs[q.b]);
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);
  std::unordered_set<std::size_t> seen;
  auto push = [&](std::size_t pa, std::size_t pb) {
    if (pa >= n || pb >= n) return;
    if (!seen.insert(pa * n + pb).second) return;
    heap.push({value(ys[pa], xs[pb]), pa, pb});
  };
  push(0, 0);
  while (!heap.empty() && out.size() < k) {
    const Node top = heap.top();
    heap.pop();
    const index_t i = ys[top.a];
    const index_t j = xs[top.b];
    if (passes(filter, a, i, j) && (!pairs || i < j)) {
      out.push_back({Direction(i, j, pairs), Method::perron_root, top.v});
    }
    push(top.a + 1, top.b);
    push(top.a, top.b + 1);
  }
  rank_records(out);
  if (out.size() > k) out.erase(out.begin() + static_cast<std::ptrdiff_t>(k), out.end());
  return out;
}

// C^PN = exp0(rho) (sum x)(sum y).
inline double perron_communicability(const PerronTriple& t) {
  const double v = std::expm1(t.rho) * t.x.sum() * t.y.sum();
  if (!std::isfinite(v)) {
    throw OverflowError("Perron communicability overflows (rho = " + std::to_string(t.rho) + ")");
  }
  return v;
}

// log C^PN, usable when C^PN itself overflows.
inline double log_perron_communicability(const PerronTriple& t) {
  const double log_exp0 = t.rho > 1.0 ? t.rho + std::log1p(-std::exp(-t.rho)) : std::log(std::expm1(t.rho));
  return log_exp0 + std::log(t.x.sum()) + std::log(t.y.sum());
}

struct PerronSensitivityOptions {
  double t_step = 2e-5;
  // Inner solves run tighter than the default so the difference quotient
  // is not swamped by eigensolver error.
  double tol = 1e-13;
};

// Forward difference (C^PN(A + tE) - C^PN(A)) / t. The perturbed solve is
// warm-started from `base`.
template <TransposableOperator Op>
double perron_sensitivity(const Op& op, const Direction& d, const PerronTriple& base,
                          const PerronSensitivityOptions& opts = {}, std::size_t* matvecs = nullptr) {
  if (!(opts.t_step > 0.0)) throw DataError("finite-difference step must be positive");
  RankUpdatedOperator<Op> shifted(op, d, opts.t_step);
  PerronOptions po;
  po.tol = opts.tol;
  po.x0 = base.x;
  po.y0 = base.y;
  const auto moved = perron_triple(shifted, po);
  if (matvecs) *matvecs = moved.matvecs;
  return (perron_communicability(moved) - perron_communicability(base)) / opts.t_step;
}

template <TransposableOperator Op>
double perron_sensitivity(const Op& op, const Direction& d, const PerronSensitivityOptions& opts = {}) {
  PerronOptions po;
  po.tol = opts.tol;
  return perron_sensitivity(op, d, perron_triple(op, po), opts);
}

struct KappaRelation {
  double ctn = 0.0;
  double kappa_cpn = 0.0;
  double dominance_ratio = 0.0; // |lambda_2| / rho
  double spectral_total = 0.0;  // kappa C^PN plus all the other spectral terms
  double rho = 0.0;
  double kappa = 1.0;
};

// Dense check of C^TN = kappa C^PN + sum_{j>=2} exp0(lambda_j)(1^T x_j)(y~_j^T 1).
inline KappaRelation kappa_relation_report(const Matrix& a) {
  const auto n = a.rows();
  if (n < 2) throw DataError("the Perron triple needs at least two nodes");
  KappaRelation out;
  out.ctn = total_communicability(a);

  Eigen::EigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
  const Eigen::VectorXcd lambda = es.eigenvalues();
  const Eigen::MatrixXcd xv = es.eigenvectors();
  const Eigen::MatrixXcd yt = xv.inverse(); // rows are the scaled left vectors

  Eigen::Index p = 0;
  for (Eigen::Index k = 1; k < n; ++k) {
    if (lambda[k].real() > lambda[p].real()) p = k;
  }
  out.rho = lambda[p].real();
  double second = 0.0;
  std::complex<double> total = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k != p) second = std::max(second, std::abs(lambda[k]));
    const std::complex<double> e0 = std::exp(lambda[k]) - 1.0;
    total += e0 * xv.col(k).sum() * yt.row(k).sum();
  }
  out.spectral_total = total.real();
  out.dominance_ratio = out.rho > 0.0 ? second / out.rho : std::numeric_limits<double>::infinity();

  Vector x = xv.col(p).real();
  Vector y = yt.row(p).transpose().real();
  x /= x.norm();
  y /= y.norm();
  if (x.sum() < 0.0) x = -x;
  if (y.sum() < 0.0) y = -y;
  out.kappa = 1.0 / y.dot(x);
  out.kappa_cpn = out.kappa * std::expm1(out.rho) * x.sum() * y.sum();
  return out;
}

inline KappaRelation kappa_relation_report(const AdjacencyMatrix& a, std::size_t dense_limit = kDefaultDenseLimit) {
  check_dense_limit(a, dense_limit);
  return kappa_relation_report(a.to_dense());
}

} // namespace netsens
