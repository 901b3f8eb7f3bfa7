#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>

#include "netsens/error.hpp"
#include "netsens/linalg.hpp"

namespace netsens {

using ApplyFn = std::function<void(const Vector&, Vector&)>;

template <LinearOperator Op>
ApplyFn apply_of(const Op& op) {
  return [&op](const Vector& x, Vector& y) { op.apply(x, y); };
}

template <TransposableOperator Op>
ApplyFn apply_transpose_of(const Op& op) {
  return [&op](const Vector& x, Vector& y) { op.apply_transpose(x, y); };
}

namespace detail {

// Grows the column capacity of a basis matrix geometrically.
inline void ensure_columns(Matrix& m, Eigen::Index rows, Eigen::Index cols) {
  if (m.cols() >= cols) return;
  m.conservativeResize(rows, std::max<Eigen::Index>(cols, 2 * m.cols()));
}

inline void ensure_square(Matrix& m, Eigen::Index k) {
  if (m.rows() >= k) return;
  const auto old = m.rows();
  const auto size = std::max<Eigen::Index>(k, 2 * old);
  m.conservativeResize(size, size);
  m.rightCols(size - old).setZero();
  m.bottomRows(size - old).setZero();
}

} // namespace detail

// Incremental Arnoldi process: op V_m = V_m H_m + g e_m^T with V_m
// orthonormal. Classical Gram-Schmidt with a second pass when `reorth`.
class Arnoldi {
public:
  Arnoldi(ApplyFn op, const Vector& v1, bool reorth = true, double lucky_tol = 1e-14)
      : op_(std::move(op)), n_(v1.size()), reorth_(reorth), lucky_tol_(lucky_tol) {
    const double nv = v1.norm();
    if (!(nv > 0.0)) throw DataError("Arnoldi start vector is zero");
    v_.resize(n_, 8);
    v_.col(0) = v1 / nv;
    h_ = Matrix::Zero(9, 9);
  }

  // Adds one column. Returns false once the space is invariant.
  bool step() {
    if (done_) return false;
    const Eigen::Index m = m_;
    detail::ensure_columns(v_, n_, m + 2);
    detail::ensure_square(h_, m + 2);
    op_(Vector(v_.col(m)), w_);
    ++matvecs_;
    const double wnorm = w_.norm();
    for (int pass = 0; pass < (reorth_ ? 2 : 1); ++pass) {
      const Vector c = v_.leftCols(m + 1).transpose() * w_;
      w_.noalias() -= v_.leftCols(m + 1) * c;
      h_.col(m).head(m + 1) += c;
    }
    const double beta = w_.norm();
    ++m_;
    const double scale = std::max(wnorm, h_.topLeftCorner(m_, m_).norm());
    // a full-dimensional basis is invariant whatever rounding leaves in w
    if (beta <= lucky_tol_ * scale || beta == 0.0 || m_ == n_) {
      h_(m_, m_ - 1) = 0.0;
      beta_ = 0.0;
      done_ = true;
      return true;
    }
    beta_ = beta;
    h_(m_, m_ - 1) = beta;
    v_.col(m_) = w_ / beta;
    return true;
  }

  Eigen::Index size() const noexcept { return m_; }
  std::size_t matvecs() const noexcept { return matvecs_; }
  bool breakdown() const noexcept { return done_; }
  double beta() const noexcept { return beta_; }

  auto basis() const { return v_.leftCols(m_); }
  auto hessenberg() const { return h_.topLeftCorner(m_, m_); }
  // g = h_{m+1,m} v_{m+1} (numerically tiny after a breakdown)
  Vector residual() const { return m_ == 0 ? Vector::Zero(n_) : w_; }
  auto column(Eigen::Index k) const { return v_.col(k); }

private:
  ApplyFn op_;
  Eigen::Index n_;
  bool reorth_;
  double lucky_tol_;
  Matrix v_;
  Matrix h_;
  Vector w_;
  Eigen::Index m_ = 0;
  double beta_ = 0.0;
  bool done_ = false;
  std::size_t matvecs_ = 0;
};

struct ArnoldiDecomposition {
  Matrix V;
  Matrix H;
  Vector g;
  std::size_t m = 0;
  bool breakdown = false;
};

template <LinearOperator Op>
ArnoldiDecomposition arnoldi(const Op& op, const Vector& v1, std::size_t m, bool reorth = true) {
  Arnoldi a(apply_of(op), v1, reorth);
  while (static_cast<std::size_t>(a.size()) < m && a.step()) {
    if (a.breakdown()) break;
  }
  return {a.basis(), a.hessenberg(), a.residual(), static_cast<std::size_t>(a.size()), a.breakdown()};
}

// Two-sided Lanczos biorthogonalization:
//   A V_m = V_m T_m + g1 e_m^T,  A^T W_m = W_m T_m^T + g2 e_m^T,  W^T V = I.
class LanczosBiorth {
public:
  enum class Status { ok, lucky, serious };

  LanczosBiorth(ApplyFn a, ApplyFn at, const Vector& v1, const Vector& w1, bool rebiorth = true,
                double breakdown_tol = 1e-12, double lucky_tol = 1e-14)
      : a_(std::move(a)), at_(std::move(at)), n_(v1.size()), rebiorth_(rebiorth), breakdown_tol_(breakdown_tol),
        lucky_tol_(lucky_tol) {
    const double nv = v1.norm();
    if (!(nv > 0.0)) throw DataError("Lanczos start vector is zero");
    const Vector v = v1 / nv;
    const double c = w1.dot(v);
    if (std::abs(c) <= breakdown_tol_ * w1.norm()) throw SeriousBreakdown(0);
    v_.resize(n_, 8);
    w_.resize(n_, 8);
    v_.col(0) = v;
    w_.col(0) = w1 / c;
    t_ = Matrix::Zero(9, 9);
  }

  // Adds one column to both bases. After a lucky breakdown the current T is
  // exact for the right space; after a serious one it cannot be extended.
  Status step() {
    if (status_ != Status::ok) return status_;
    const Eigen::Index j = m_;
    detail::ensure_columns(v_, n_, j + 2);
    detail::ensure_columns(w_, n_, j + 2);
    detail::ensure_square(t_, j + 2);

    a_(Vector(v_.col(j)), vh_);
    at_(Vector(w_.col(j)), wh_);
    matvecs_ += 2;
    const double alpha = vh_.dot(w_.col(j));
    const double vscale = vh_.norm();
    vh_ -= alpha * v_.col(j);
    wh_ -= alpha * w_.col(j);
    if (j > 0) {
      vh_ -= t_(j - 1, j) * v_.col(j - 1);
      wh_ -= t_(j, j - 1) * w_.col(j - 1);
    }
    if (rebiorth_) {
      for (int pass = 0; pass < 2; ++pass) {
        vh_.noalias() -= v_.leftCols(j + 1) * (w_.leftCols(j + 1).transpose() * vh_);
        wh_.noalias() -= w_.leftCols(j + 1) * (v_.leftCols(j + 1).transpose() * wh_);
      }
    }
    t_(j, j) = alpha;
    ++m_;

    const double nv = vh_.norm();
    const double nw = wh_.norm();
    const double tnorm = t_.topLeftCorner(m_, m_).norm();
    if (nv <= lucky_tol_ * std::max(tnorm, vscale) || nv == 0.0 || m_ == n_) {
      status_ = Status::lucky;
      return status_;
    }
    const double inner = vh_.dot(wh_);
    if (nw == 0.0 || std::abs(inner) < breakdown_tol_ * nv * nw) {
      status_ = Status::serious;
      return status_;
    }
    const double delta = std::sqrt(std::abs(inner));
    const double beta = inner / delta;
    t_(j + 1, j) = delta;
    t_(j, j + 1) = beta;
    v_.col(j + 1) = vh_ / delta;
    w_.col(j + 1) = wh_ / beta;
    return Status::ok;
  }

  Eigen::Index size() const noexcept { return m_; }
  std::size_t matvecs() const noexcept { return matvecs_; }
  Status status() const noexcept { return status_; }

  auto right_basis() const { return v_.leftCols(m_); }
  auto left_basis() const { return w_.leftCols(m_); }
  auto tridiagonal() const { return t_.topLeftCorner(m_, m_); }
  auto right_column(Eigen::Index k) const { return v_.col(k); }
  Vector right_residual() const { return m_ == 0 ? Vector::Zero(n_) : vh_; }
  Vector left_residual() const { return m_ == 0 ? Vector::Zero(n_) : wh_; }

private:
  ApplyFn a_, at_;
  Eigen::Index n_;
  bool rebiorth_;
  double breakdown_tol_;
  double lucky_tol_;
  Matrix v_, w_, t_;
  Vector vh_, wh_;
  Eigen::Index m_ = 0;
  Status status_ = Status::ok;
  std::size_t matvecs_ = 0;
};

struct BiorthDecomposition {
  Matrix V, W, T;
  Vector g1, g2;
  std::size_t m = 0;
  bool breakdown = false; // lucky
};

template <TransposableOperator Op>
BiorthDecomposition lanczos_biorth(const Op& op, const Vector& v1, const Vector& w1, std::size_t m,
                                   bool rebiorth = true, double breakdown_tol = 1e-12) {
  LanczosBiorth l(apply_of(op), apply_transpose_of(op), v1, w1, rebiorth, breakdown_tol);
  while (static_cast<std::size_t>(l.size()) < m) {
    const auto s = l.step();
    if (s == LanczosBiorth::Status::lucky) break;
    if (s == LanczosBiorth::Status::serious) {
      if (static_cast<std::size_t>(l.size()) < m) throw SeriousBreakdown(static_cast<std::size_t>(l.size()));
      break;
    }
  }
  return {l.right_basis(),    l.left_basis(),     l.tridiagonal(),
          l.right_residual(), l.left_residual(), static_cast<std::size_t>(l.size()),
          l.status() == LanczosBiorth::Status::lucky};
}

} // namespace netsens
