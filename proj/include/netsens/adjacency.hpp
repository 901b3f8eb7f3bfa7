#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "netsens/error.hpp"
#include "netsens/linalg.hpp"

namespace netsens {

// One stored entry w_ij of an adjacency matrix (0-based indices).
struct Edge {
  index_t i{};
  index_t j{};
  double w{1.0};

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Perturbation target E_ij, or E_ij + E_ji when symmetric.
class Direction {
public:
  Direction(index_t i, index_t j, bool symmetric = false) : i_(i), j_(j), symmetric_(symmetric) {
    if (i == j) {
      throw DataError("direction (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                      ") lies on the diagonal");
    }
  }

  index_t i() const noexcept { return i_; }
  index_t j() const noexcept { return j_; }
  bool symmetric() const noexcept { return symmetric_; }

  friend bool operator==(const Direction&, const Direction&) = default;
  friend auto operator<=>(const Direction& a, const Direction& b) {
    return std::tie(a.i_, a.j_, a.symmetric_) <=> std::tie(b.i_, b.j_, b.symmetric_);
  }

private:
  index_t i_;
  index_t j_;
  bool symmetric_;
};

// Sparse nonnegative weighted adjacency matrix, stored as CSR for A and for
// A^T. Immutable; copies share storage.
class AdjacencyMatrix {
public:
  AdjacencyMatrix() : AdjacencyMatrix(0, {}, true) {}

  // Builds a validated matrix. For undirected graphs every edge must be
  // listed in both orientations with equal weight.
  AdjacencyMatrix(std::size_t n, std::vector<Edge> edges, bool directed,
                  std::vector<std::string> labels = {}) {
    auto storage = std::make_shared<Storage>();
    auto& s = *storage;
    s.n = n;
    s.directed = directed;
    if (!labels.empty() && labels.size() != n) {
      throw DataError("expected " + std::to_string(n) + " node labels, got " + std::to_string(labels.size()));
    }
    s.labels = std::move(labels);

    for (const auto& e : edges) {
      if (e.i >= n || e.j >= n) {
        throw DataError("edge (" + std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) +
                        ") outside a graph with " + std::to_string(n) + " nodes");
      }
      if (e.i == e.j) throw DataError("self-loop at node " + std::to_string(e.i + 1));
      if (!(e.w > 0.0) || !std::isfinite(e.w)) {
        throw DataError("weight of edge (" + std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) +
                        ") must be positive and finite");
      }
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    for (std::size_t k = 1; k < edges.size(); ++k) {
      if (edges[k].i == edges[k - 1].i && edges[k].j == edges[k - 1].j) {
        throw DataError("duplicate edge (" + std::to_string(edges[k].i + 1) + "," +
                        std::to_string(edges[k].j + 1) + ")");
      }
    }

    build_csr(n, edges, s.row_ptr, s.col, s.val);
    std::vector<Edge> transposed;
    transposed.reserve(edges.size());
    for (const auto& e : edges) transposed.push_back({e.j, e.i, e.w});
    std::sort(transposed.begin(), transposed.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    build_csr(n, transposed, s.t_row_ptr, s.t_col, s.t_val);

    s.symmetric = (s.t_col == s.col && s.t_val == s.val);
    if (!directed && !s.symmetric) {
      throw DataError("undirected graph has an edge without a reverse edge of equal weight");
    }
    data_ = std::move(storage);
  }

  std::size_t size() const noexcept { return data_->n; }
  std::size_t nnz() const noexcept { return data_->col.size(); }
  bool directed() const noexcept { return data_->directed; }
  // Structural and numerical symmetry (always true for undirected graphs).
  bool symmetric() const noexcept { return data_->symmetric; }
  const std::vector<std::string>& labels() const noexcept { return data_->labels; }

  std::span<const index_t> row_indices(index_t i) const {
    const auto& s = *data_;
    return {s.col.data() + s.row_ptr[i], s.row_ptr[i + 1] - s.row_ptr[i]};
  }
  std::span<const double> row_weights(index_t i) const {
    const auto& s = *data_;
    return {s.val.data() + s.row_ptr[i], s.row_ptr[i + 1] - s.row_ptr[i]};
  }
  std::span<const index_t> column_indices(index_t j) const {
    const auto& s = *data_;
    return {s.t_col.data() + s.t_row_ptr[j], s.t_row_ptr[j + 1] - s.t_row_ptr[j]};
  }

  double weight(index_t i, index_t j) const {
    const auto cols = row_indices(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return row_weights(i)[static_cast<std::size_t>(it - cols.begin())];
  }
  bool has_edge(index_t i, index_t j) const { return weight(i, j) > 0.0; }

  // All stored entries sorted by (i, j).
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(nnz());
    for (index_t i = 0; i < size(); ++i) {
      const auto cols = row_indices(i);
      const auto w = row_weights(i);
      for (std::size_t k = 0; k < cols.size(); ++k) out.push_back({i, cols[k], w[k]});
    }
    return out;
  }

  void apply(const Vector& x, Vector& y) const { spmv(data_->row_ptr, data_->col, data_->val, x, y); }
  void apply_transpose(const Vector& x, Vector& y) const {
    spmv(data_->t_row_ptr, data_->t_col, data_->t_val, x, y);
  }

  Matrix to_dense() const {
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(size()));
    for (const auto& e : edges()) out(static_cast<Eigen::Index>(e.i), static_cast<Eigen::Index>(e.j)) = e.w;
    return out;
  }

  // Copy with w_ij changed by `change` (both orientations when undirected).
  // A resulting weight of zero removes the edge; a negative one is an error.
  AdjacencyMatrix with_change(index_t i, index_t j, double change) const {
    if (i >= size() || j >= size()) throw DataError("node index out of range");
    if (i == j) throw DataError("self-loops are not allowed");
    auto es = edges();
    auto update = [&](index_t a, index_t b) {
      auto it = std::find_if(es.begin(), es.end(), [&](const Edge& e) { return e.i == a && e.j == b; });
      const double current = it == es.end() ? 0.0 : it->w;
      const double next = current + change;
      if (next < 0.0) {
        throw DataError("weight of edge (" + std::to_string(a + 1) + "," + std::to_string(b + 1) +
                        ") would become negative");
      }
      if (it != es.end()) {
        if (next == 0.0) {
          es.erase(it);
        } else {
          it->w = next;
        }
      } else if (next > 0.0) {
        es.push_back({a, b, next});
      }
    };
    update(i, j);
    if (!directed()) update(j, i);
    return AdjacencyMatrix(size(), std::move(es), directed(), labels());
  }

  friend bool operator==(const AdjacencyMatrix& a, const AdjacencyMatrix& b) {
    return a.size() == b.size() && a.directed() == b.directed() && a.data_->row_ptr == b.data_->row_ptr &&
           a.data_->col == b.data_->col && a.data_->val == b.data_->val;
  }

private:
  struct Storage {
    std::size_t n{};
    bool directed{true};
    bool symmetric{true};
    std::vector<std::string> labels;
    std::vector<std::size_t> row_ptr, t_row_ptr;
    std::vector<index_t> col, t_col;
    std::vector<double> val, t_val;
  };

  static void build_csr(std::size_t n, const std::vector<Edge>& sorted, std::vector<std::size_t>& row_ptr,
                        std::vector<index_t>& col, std::vector<double>& val) {
    row_ptr.assign(n + 1, 0);
    col.resize(sorted.size());
    val.resize(sorted.size());
    for (const auto& e : sorted) ++row_ptr[e.i + 1];
    for (std::size_t r = 0; r < n; ++r) row_ptr[r + 1] += row_ptr[r];
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      col[k] = sorted[k].j;
      val[k] = sorted[k].w;
    }
  }

  static void spmv(const std::vector<std::size_t>& row_ptr, const std::vector<index_t>& col,
                   const std::vector<double>& val, const Vector& x, Vector& y) {
    const std::size_t n = row_ptr.size() - 1;
    y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      double acc = 0.0;
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += val[k] * x[static_cast<Eigen::Index>(col[k])];
      y[static_cast<Eigen::Index>(r)] = acc;
    }
  }

  std::shared_ptr<const Storage> data_;
};

// A + delta * 1 1^T, applied without forming the dense rank-one term.
class PerturbedOperator {
public:
  PerturbedOperator(AdjacencyMatrix base, double delta) : base_(std::move(base)), delta_(delta) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw DataError("irreducibility shift must be nonnegative");
  }

  std::size_t size() const { return base_.size(); }
  const AdjacencyMatrix& base() const noexcept { return base_; }
  double delta() const noexcept { return delta_; }
  bool symmetric() const { return base_.symmetric(); }

  void apply(const Vector& x, Vector& y) const {
    base_.apply(x, y);
    if (delta_ != 0.0) y.array() += delta_ * x.sum();
  }
  void apply_transpose(const Vector& x, Vector& y) const {
    base_.apply_transpose(x, y);
    if (delta_ != 0.0) y.array() += delta_ * x.sum();
  }

  Matrix to_dense() const { return base_.to_dense().array() + delta_; }

private:
  AdjacencyMatrix base_;
  double delta_;
};

} // namespace netsens
