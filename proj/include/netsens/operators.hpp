#pragma once

#include <cmath>

#include "netsens/adjacency.hpp"
#include "netsens/linalg.hpp"

namespace netsens {

// op + t * E, with E = E_ij (or E_ij + E_ji), applied as a rank-one update.
template <TransposableOperator Op>
class RankUpdatedOperator {
public:
  RankUpdatedOperator(const Op& op, Direction d, double t) : op_(op), d_(d), t_(t) {}

  std::size_t size() const { return op_.size(); }
  bool symmetric() const { return d_.symmetric() && is_symmetric_operator(op_); }

  // E_ij x = x_j e_i
  void apply(const Vector& x, Vector& y) const {
    op_.apply(x, y);
    const auto i = static_cast<Eigen::Index>(d_.i());
    const auto j = static_cast<Eigen::Index>(d_.j());
    y[i] += t_ * x[j];
    if (d_.symmetric()) y[j] += t_ * x[i];
  }
  void apply_transpose(const Vector& x, Vector& y) const {
    op_.apply_transpose(x, y);
    const auto i = static_cast<Eigen::Index>(d_.i());
    const auto j = static_cast<Eigen::Index>(d_.j());
    y[j] += t_ * x[i];
    if (d_.symmetric()) y[i] += t_ * x[j];
  }

private:
  const Op& op_;
  Direction d_;
  double t_;
};

// The 2n x 2n block operator [[A, E], [0, A]] whose exponential carries the
// Frechet derivative L(A, E) in its (1,2) block.
template <TransposableOperator Op>
class FrechetBlockOperator {
public:
  FrechetBlockOperator(const Op& op, Direction d) : op_(op), d_(d) {}

  std::size_t size() const { return 2 * op_.size(); }
  std::size_t base_size() const { return op_.size(); }

  // [u; v] -> [A u + E v; A v]
  void apply(const Vector& x, Vector& y) const {
    const auto n = static_cast<Eigen::Index>(op_.size());
    y.resize(2 * n);
    top_ = x.head(n);
    op_.apply(top_, out_);
    y.head(n) = out_;
    bottom_ = x.tail(n);
    op_.apply(bottom_, out_);
    y.tail(n) = out_;
    const auto i = static_cast<Eigen::Index>(d_.i());
    const auto j = static_cast<Eigen::Index>(d_.j());
    y[i] += x[n + j];
    if (d_.symmetric()) y[j] += x[n + i];
  }

  // [u; v] -> [A^T u; E^T u + A^T v]
  void apply_transpose(const Vector& x, Vector& y) const {
    const auto n = static_cast<Eigen::Index>(op_.size());
    y.resize(2 * n);
    top_ = x.head(n);
    op_.apply_transpose(top_, out_);
    y.head(n) = out_;
    bottom_ = x.tail(n);
    op_.apply_transpose(bottom_, out_);
    y.tail(n) = out_;
    const auto i = static_cast<Eigen::Index>(d_.i());
    const auto j = static_cast<Eigen::Index>(d_.j());
    y[n + j] += x[i];
    if (d_.symmetric()) y[n + i] += x[j];
  }

private:
  const Op& op_;
  Direction d_;
  // scratch; makes the operator unsuitable for sharing across threads
  mutable Vector top_, bottom_, out_;
};

} // namespace netsens
