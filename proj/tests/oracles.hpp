#pragma once

// Independent reference computations for the tests. Nothing here reuses the
// library's numerical kernels: the exponential comes from Eigen's
// MatrixFunctions module and eigenpairs from a dense eigensolver.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "netsens/adjacency.hpp"
#include "netsens/graph_io.hpp"

namespace oracle {

using netsens::Matrix;
using netsens::Vector;

inline std::string fixture(const std::string& name) { return std::string(NETSENS_FIXTURE_DIR) + "/" + name; }

inline netsens::AdjacencyMatrix load(const std::string& name, bool directed = true) {
  netsens::LoadOptions opts;
  opts.directed = directed;
  return netsens::load_graph(fixture(name), opts);
}

inline Matrix expm(const Matrix& a) { return a.exp(); }

inline double ctn(const Matrix& a) { return (expm(a) - Matrix::Identity(a.rows(), a.cols())).sum(); }

// 1^T L(A, E) 1 from the block exponential.
inline double stn(const Matrix& a, Eigen::Index i, Eigen::Index j, bool sym = false) {
  const auto n = a.rows();
  Matrix m = Matrix::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = a;
  m.bottomRightCorner(n, n) = a;
  m(i, n + j) += 1.0;
  if (sym) m(j, n + i) += 1.0;
  return expm(m).topRightCorner(n, n).sum();
}

struct Perron {
  double rho;
  Vector x, y;
};

inline Perron perron(const Matrix& a) {
  auto dominant = [](const Matrix& m, double& rho) {
    Eigen::EigenSolver<Matrix> es(m);
    Eigen::Index k = 0;
    for (Eigen::Index p = 1; p < m.rows(); ++p) {
      if (es.eigenvalues()[p].real() > es.eigenvalues()[k].real()) k = p;
    }
    rho = es.eigenvalues()[k].real();
    Vector v = es.eigenvectors().col(k).real().cwiseAbs();
    return Vector(v / v.norm());
  };
  Perron p{};
  double r2 = 0.0;
  p.x = dominant(a, p.rho);
  p.y = dominant(a.transpose(), r2);
  return p;
}

inline double cpn(const Matrix& a) {
  const auto p = perron(a);
  return std::expm1(p.rho) * p.x.sum() * p.y.sum();
}

inline Matrix unit(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
  Matrix e = Matrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

// Random strongly connected weighted digraph: a random Hamiltonian cycle
// plus independent extra edges with the given density; weights in (0, wmax].
inline netsens::AdjacencyMatrix random_strong(std::size_t n, double density, std::mt19937_64& rng,
                                              double wmax = 5.0, bool directed = true) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto weight = [&] { return wmax * (1.0 - unif(rng)); };
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  for (std::size_t k = 0; k < n; ++k) {
    w(static_cast<Eigen::Index>(perm[k]), static_cast<Eigen::Index>(perm[(k + 1) % n])) = weight();
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && w(i, j) == 0.0 && unif(rng) < density) w(i, j) = weight();
    }
  }
  if (!directed) w = (w + w.transpose()).eval();
  std::vector<netsens::Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (w(i, j) != 0.0) edges.push_back({i, j, w(i, j)});
    }
  }
  return netsens::AdjacencyMatrix(n, std::move(edges), directed);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace oracle
