#pragma once

#include <concepts>
#include <cstddef>

#include <Eigen/Dense>

namespace netsens {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using index_t = std::size_t;

// A square linear map applied out of place: y = op * x (y is resized).
template <class Op>
concept LinearOperator = requires(const Op& op, const Vector& x, Vector& y) {
  { op.size() } -> std::convertible_to<std::size_t>;
  op.apply(x, y);
};

// A linear map that can also apply its transpose.
template <class Op>
concept TransposableOperator = LinearOperator<Op> && requires(const Op& op, const Vector& x, Vector& y) {
  op.apply_transpose(x, y);
};

// Operators that know they are symmetric may take single-sided shortcuts.
template <class Op>
bool is_symmetric_operator(const Op& op) {
  if constexpr (requires { { op.symmetric() } -> std::convertible_to<bool>; }) {
    return op.symmetric();
  } else {
    return false;
  }
}

// Dense matrix as an operator; mostly used by tests and small oracles.
class DenseOperator {
public:
  explicit DenseOperator(Matrix m) : m_(std::move(m)) {}

  std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }
  void apply(const Vector& x, Vector& y) const { y.noalias() = m_ * x; }
  void apply_transpose(const Vector& x, Vector& y) const { y.noalias() = m_.transpose() * x; }
  bool symmetric() const { return m_ == m_.transpose(); }
  const Matrix& matrix() const { return m_; }

private:
  Matrix m_;
};

// Swaps the roles of apply and apply_transpose.
template <TransposableOperator Op>
class TransposedOperator {
public:
  explicit TransposedOperator(const Op& op) : op_(op) {}

  std::size_t size() const { return op_.size(); }
  void apply(const Vector& x, Vector& y) const { op_.apply_transpose(x, y); }
  void apply_transpose(const Vector& x, Vector& y) const { op_.apply(x, y); }
  bool symmetric() const { return is_symmetric_operator(op_); }

private:
  const Op& op_;
};

// Densify any operator by applying it to the unit vectors.
template <LinearOperator Op>
Matrix to_dense(const Op& op) {
  const auto n = static_cast<Eigen::Index>(op.size());
  Matrix out(n, n);
  Vector e = Vector::Zero(n);
  Vector col;
  for (Eigen::Index k = 0; k < n; ++k) {
    e[k] = 1.0;
    op.apply(e, col);
    out.col(k) = col;
    e[k] = 0.0;
  }
  return out;
}

} // namespace netsens
