#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "netsens/adjacency.hpp"
#include "netsens/communicability.hpp"
#include "netsens/error.hpp"
#include "netsens/expm.hpp"
#include "netsens/krylov.hpp"
#include "netsens/operators.hpp"
#include "netsens/parallel.hpp"
#include "netsens/record.hpp"

namespace netsens {

struct EstimatorConfig {
  Method method = Method::arnoldi_fd;
  double tol = 1e-4;
  double t_step = 2e-5;
  std::size_t m_max = 200;
  double eta = 1.0;   // kkrs only
  double scale = 1.0; // lanczos-block: damps the monitored sequence only
  double breakdown_tol = 1e-12;
  // Run exactly this many steps (or until the space is exhausted) instead
  // of the adaptive rule. 0 = adaptive.
  std::size_t fixed_steps = 0;
  // Consecutive steps with r < tol required before stopping. 1 stops at the
  // first small relative change, which is occasionally a coincidental
  // plateau of the sequence; 2 guards against that at about one extra step.
  std::size_t patience = 2;

  void validate() const {
    if (!is_krylov(method)) throw DataError(std::string("not a Krylov method: ") + std::string(to_string(method)));
    if (!(tol > 0.0)) throw DataError("tolerance must be positive");
    if (!(t_step > 0.0)) throw DataError("finite-difference step must be positive");
    if (m_max < 2) throw DataError("m_max must be at least 2");
    if (!(eta > 0.0)) throw DataError("eta must be positive");
    if (!(scale > 0.0)) throw DataError("scale must be positive");
    if (patience < 1) throw DataError("patience must be at least 1");
  }
};

namespace detail {

inline double e1_exp0_e1(const Matrix& h) {
  if (h.rows() == 0) return 0.0;
  return exp0(h)(0, 0);
}

// Relative change between successive estimates; absolute below 1e-12 when
// the previous estimate is exactly zero.
inline bool settled(double prev, double next, double tol) {
  if (prev == 0.0) return std::abs(next - prev) < 1e-12;
  return std::abs(next - prev) / std::abs(prev) < tol;
}

struct LoopResult {
  double value = 0.0;
  std::size_t steps = 0;
  bool converged = false;
};

// Shared adaptive loop. `advance` adds a step and returns false when no
// recurrence can move; `exact` reports that every space is invariant;
// `monitor` and `value` give the stopping sequence and the reported value.
template <class Stepper>
LoopResult run_adaptive(Stepper& s, const EstimatorConfig& cfg) {
  LoopResult out;
  std::optional<double> prev;
  std::size_t calm = 0;
  const std::size_t cap = cfg.fixed_steps ? cfg.fixed_steps : cfg.m_max;
  while (s.steps() < cap) {
    if (!s.advance()) {
      out.converged = true;
      break;
    }
    const double mon = s.monitor();
    if (!std::isfinite(mon)) {
      // transient Ritz values after a near breakdown; wait for later steps
      prev.reset();
      calm = 0;
      continue;
    }
    if (s.exact()) {
      out.converged = true;
      break;
    }
    if (!cfg.fixed_steps && prev && s.steps() >= 2) {
      calm = settled(*prev, mon, cfg.tol) ? calm + 1 : 0;
      if (calm >= cfg.patience) {
        out.converged = true;
        break;
      }
    }
    prev = mon;
  }
  if (cfg.fixed_steps && s.steps() >= cap) out.converged = true;
  out.value = s.value();
  out.steps = s.steps();
  return out;
}

// n w^T V exp0(H) e1 with v1 = [0; 1]/sqrt(n) and w = [1; 0]/sqrt(n).
template <TransposableOperator Op>
class BlockArnoldiStepper {
public:
  BlockArnoldiStepper(const Op& a, const Direction& d)
      : block_(a, d), n_(static_cast<Eigen::Index>(a.size())), arn_(apply_of(block_), start(n_)) {}

  bool advance() {
    if (!arn_.step()) return false;
    const auto k = arn_.size() - 1;
    wv_.conservativeResize(k + 1);
    wv_[k] = arn_.column(k).head(n_).sum() / std::sqrt(static_cast<double>(n_));
    return true;
  }
  double value() const {
    const Matrix f = exp0(Matrix(arn_.hessenberg()));
    return static_cast<double>(n_) * wv_.dot(f.col(0));
  }
  double monitor() const { return value(); }
  bool exact() const { return arn_.breakdown(); }
  std::size_t steps() const { return static_cast<std::size_t>(arn_.size()); }
  std::size_t matvecs() const { return 2 * arn_.matvecs(); }

  static Vector start(Eigen::Index n) {
    Vector v = Vector::Zero(2 * n);
    v.tail(n).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
    return v;
  }

private:
  FrechetBlockOperator<Op> block_;
  Eigen::Index n_;
  Arnoldi arn_;
  Vector wv_;
};

// Two Arnoldi runs from 1/sqrt(n), on A and on A + tE, advanced together.
template <TransposableOperator Op>
class ArnoldiFdStepper {
public:
  ArnoldiFdStepper(const Op& a, const Direction& d, double t)
      : moved_(a, d, t), n_(static_cast<double>(a.size())), t_(t),
        base_(apply_of(a), ones(a.size())), pert_(apply_of(moved_), ones(a.size())) {}

  bool advance() {
    // a frozen (invariant) run keeps its last projection
    const bool b = base_.step();
    const bool p = pert_.step();
    if (b || p) ++steps_;
    return b || p;
  }
  double base_term() const { return e1_exp0_e1(Matrix(base_.hessenberg())); }
  double value() const { return n_ * (e1_exp0_e1(Matrix(pert_.hessenberg())) - base_term()) / t_; }
  double monitor() const { return value(); }
  bool exact() const { return base_.breakdown() && pert_.breakdown(); }
  std::size_t steps() const { return steps_; }
  std::size_t matvecs() const { return base_.matvecs() + pert_.matvecs(); }

  static Vector ones(std::size_t n) { return Vector::Constant(static_cast<Eigen::Index>(n), 1.0); }

private:
  RankUpdatedOperator<Op> moved_;
  double n_;
  double t_;
  Arnoldi base_;
  Arnoldi pert_;
  std::size_t steps_ = 0;
};

// Two-sided Lanczos on the block operator, v1 = w1 = [0; 1]/sqrt(n).
template <TransposableOperator Op>
class BlockLanczosStepper {
public:
  BlockLanczosStepper(const Op& a, const Direction& d, double scale, double breakdown_tol)
      : block_(a, d), n_(static_cast<Eigen::Index>(a.size())), scale_(scale),
        lan_(apply_of(block_), apply_transpose_of(block_), BlockArnoldiStepper<Op>::start(n_),
             BlockArnoldiStepper<Op>::start(n_), true, breakdown_tol) {}

  bool advance() {
    if (lan_.status() != LanczosBiorth::Status::ok) return false;
    const auto s = lan_.step();
    const auto k = lan_.size() - 1;
    wv_.conservativeResize(k + 1);
    wv_[k] = lan_.right_column(k).head(n_).sum() / std::sqrt(static_cast<double>(n_));
    if (s == LanczosBiorth::Status::serious) throw SeriousBreakdown(static_cast<std::size_t>(lan_.size()));
    return true;
  }
  double evaluate(double scale) const {
    try {
      const Matrix f = exp0(Matrix(lan_.tridiagonal()) / scale);
      return static_cast<double>(n_) * wv_.dot(f.col(0));
    } catch (const OverflowError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  }
  double value() const { return evaluate(1.0); }
  double monitor() const { return scale_ == 1.0 ? value() : evaluate(scale_); }
  bool exact() const { return lan_.status() == LanczosBiorth::Status::lucky; }
  std::size_t steps() const { return static_cast<std::size_t>(lan_.size()); }
  std::size_t matvecs() const { return 2 * lan_.matvecs(); }

private:
  FrechetBlockOperator<Op> block_;
  Eigen::Index n_;
  double scale_;
  LanczosBiorth lan_;
  Vector wv_;
};

// Four recurrences: Lanczos pairs for (A, A^T) and (A + tE, (A + tE)^T).
template <TransposableOperator Op>
class LanczosFdStepper {
public:
  LanczosFdStepper(const Op& a, const Direction& d, double t, double breakdown_tol)
      : moved_(a, d, t), n_(static_cast<double>(a.size())), t_(t),
        base_(apply_of(a), apply_transpose_of(a), ones(a.size()), ones(a.size()), true, breakdown_tol),
        pert_(apply_of(moved_), apply_transpose_of(moved_), ones(a.size()), ones(a.size()), true, breakdown_tol) {}

  bool advance() {
    const bool b = move(base_);
    const bool p = move(pert_);
    if (b || p) ++steps_;
    return b || p;
  }
  double base_term() const { return safe(base_); }
  double value() const { return n_ * (safe(pert_) - base_term()) / t_; }
  double monitor() const { return value(); }
  bool exact() const {
    return base_.status() == LanczosBiorth::Status::lucky && pert_.status() == LanczosBiorth::Status::lucky;
  }
  std::size_t steps() const { return steps_; }
  std::size_t matvecs() const { return base_.matvecs() + pert_.matvecs(); }

  static Vector ones(std::size_t n) { return Vector::Constant(static_cast<Eigen::Index>(n), 1.0); }

private:
  static double safe(const LanczosBiorth& l) {
    try {
      return e1_exp0_e1(Matrix(l.tridiagonal()));
    } catch (const OverflowError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  }
  bool move(LanczosBiorth& l) {
    if (l.status() != LanczosBiorth::Status::ok) return false;
    if (l.step() == LanczosBiorth::Status::serious) throw SeriousBreakdown(static_cast<std::size_t>(l.size()));
    return true;
  }

  RankUpdatedOperator<Op> moved_;
  double n_;
  double t_;
  LanczosBiorth base_;
  LanczosBiorth pert_;
  std::size_t steps_ = 0;
};

// Rank-one Frechet approximation: Arnoldi on A from e_i and on A^T from
// e_j, then the (1,2) block X of exp0([[G, eta e1 e1^T], [0, H^T]]).
// 1^T L(A, eta e_i e_j^T) 1 ~= (1^T V) X (W^T 1), so dividing by eta gives
// the sensitivity per unit weight.
template <TransposableOperator Op>
class KkrsStepper {
public:
  KkrsStepper(const Op& a, index_t i, index_t j, double eta)
      : eta_(eta), left_(apply_of(a), unit(a.size(), i)), right_(apply_transpose_of(a), unit(a.size(), j)) {}

  bool advance() {
    const bool l = grow(left_, vsum_);
    const bool r = grow(right_, wsum_);
    if (l || r) ++steps_;
    return l || r;
  }
  double value() const {
    const auto p = left_.size();
    const auto q = right_.size();
    Matrix b = Matrix::Zero(p + q, p + q);
    b.topLeftCorner(p, p) = left_.hessenberg();
    b.bottomRightCorner(q, q) = right_.hessenberg().transpose();
    b(0, p) = eta_;
    const Matrix x = expm(b).topRightCorner(p, q);
    return vsum_.dot(x * wsum_) / eta_;
  }
  double monitor() const { return value(); }
  bool exact() const { return left_.breakdown() && right_.breakdown(); }
  std::size_t steps() const { return steps_; }
  std::size_t matvecs() const { return left_.matvecs() + right_.matvecs(); }

  static Vector unit(std::size_t n, index_t k) {
    Vector e = Vector::Zero(static_cast<Eigen::Index>(n));
    e[static_cast<Eigen::Index>(k)] = 1.0;
    return e;
  }

private:
  static bool grow(Arnoldi& a, Vector& sums) {
    if (!a.step()) return false;
    const auto k = a.size() - 1;
    sums.conservativeResize(k + 1);
    sums[k] = a.column(k).sum();
    return true;
  }

  double eta_;
  Arnoldi left_;
  Arnoldi right_;
  Vector vsum_, wsum_;
  std::size_t steps_ = 0;
};

template <class Stepper>
SensitivityRecord finish(Stepper& s, const Direction& d, Method m, const EstimatorConfig& cfg) {
  const auto r = run_adaptive(s, cfg);
  if (!std::isfinite(r.value)) {
    if (m == Method::lanczos_block || m == Method::lanczos_fd) throw SeriousBreakdown(r.steps);
    throw OverflowError("Krylov estimate overflows");
  }
  SensitivityRecord rec{d, m, r.value, r.steps, s.matvecs(), r.converged};
  return rec;
}

// The finite-difference forms lose digits when the difference is tiny
// compared to the terms being subtracted.
inline void flag_cancellation(SensitivityRecord& rec, double n, double t, double term) {
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * n * std::max(1.0, std::abs(term)) / t;
  if (std::abs(rec.value) < floor) rec.note = "possible cancellation in the finite difference";
}

} // namespace detail

template <TransposableOperator Op>
SensitivityRecord estimate_arnoldi_block(const Op& a, const Direction& d, const EstimatorConfig& cfg = {}) {
  detail::BlockArnoldiStepper<Op> s(a, d);
  return detail::finish(s, d, Method::arnoldi_block, cfg);
}

template <TransposableOperator Op>
SensitivityRecord estimate_arnoldi_fd(const Op& a, const Direction& d, const EstimatorConfig& cfg = {}) {
  detail::ArnoldiFdStepper<Op> s(a, d, cfg.t_step);
  auto rec = detail::finish(s, d, Method::arnoldi_fd, cfg);
  detail::flag_cancellation(rec, static_cast<double>(a.size()), cfg.t_step, s.base_term());
  return rec;
}

namespace detail {

// Serious breakdowns hand the direction to block Arnoldi. The fd variants
// work in an n-dimensional space, the block one in 2n.
template <TransposableOperator Op>
SensitivityRecord lanczos_fallback(const Op& a, const Direction& d, const EstimatorConfig& cfg, Method m,
                                   std::size_t block_factor) {
  EstimatorConfig fb = cfg;
  fb.method = Method::arnoldi_block;
  fb.fixed_steps = cfg.fixed_steps * block_factor;
  auto rec = estimate_arnoldi_block(a, d, fb);
  rec.method = m;
  rec.fallback = Method::arnoldi_block;
  return rec;
}

} // namespace detail

template <TransposableOperator Op>
SensitivityRecord estimate_lanczos_block(const Op& a, const Direction& d, const EstimatorConfig& cfg = {}) {
  try {
    detail::BlockLanczosStepper<Op> s(a, d, cfg.scale, cfg.breakdown_tol);
    return detail::finish(s, d, Method::lanczos_block, cfg);
  } catch (const SeriousBreakdown&) {
    return detail::lanczos_fallback(a, d, cfg, Method::lanczos_block, 1);
  }
}

template <TransposableOperator Op>
SensitivityRecord estimate_lanczos_fd(const Op& a, const Direction& d, const EstimatorConfig& cfg = {}) {
  try {
    detail::LanczosFdStepper<Op> s(a, d, cfg.t_step, cfg.breakdown_tol);
    auto rec = detail::finish(s, d, Method::lanczos_fd, cfg);
    detail::flag_cancellation(rec, static_cast<double>(a.size()), cfg.t_step, s.base_term());
    return rec;
  } catch (const SeriousBreakdown&) {
    return detail::lanczos_fallback(a, d, cfg, Method::lanczos_fd, 2);
  }
}

// Symmetric directions run the two rank-one terms separately and add them.
template <TransposableOperator Op>
SensitivityRecord estimate_kkrs(const Op& a, const Direction& d, const EstimatorConfig& cfg = {}) {
  detail::KkrsStepper<Op> s(a, d.i(), d.j(), cfg.eta);
  auto rec = detail::finish(s, d, Method::kkrs, cfg);
  if (d.symmetric()) {
    detail::KkrsStepper<Op> s2(a, d.j(), d.i(), cfg.eta);
    const auto r2 = detail::run_adaptive(s2, cfg);
    rec.value += r2.value;
    rec.steps = std::max(rec.steps, r2.steps);
    rec.matvecs += s2.matvecs();
    rec.converged = rec.converged && r2.converged;
  }
  return rec;
}

template <TransposableOperator Op>
SensitivityRecord estimate(const Op& a, const Direction& d, const EstimatorConfig& cfg) {
  cfg.validate();
  if (d.i() >= a.size() || d.j() >= a.size()) throw DataError("direction outside the graph");
  switch (cfg.method) {
  case Method::arnoldi_block: return estimate_arnoldi_block(a, d, cfg);
  case Method::arnoldi_fd: return estimate_arnoldi_fd(a, d, cfg);
  case Method::lanczos_block: return estimate_lanczos_block(a, d, cfg);
  case Method::lanczos_fd: return estimate_lanczos_fd(a, d, cfg);
  case Method::kkrs: return estimate_kkrs(a, d, cfg);
  default: break;
  }
  throw DataError("not a Krylov method");
}

struct EstimatedScan {
  std::vector<SensitivityRecord> records; // candidate order
  std::vector<std::optional<double>> exact; // parallel to records when requested
  std::vector<std::string> failures;

  double average_steps() const {
    if (records.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : records) s += static_cast<double>(r.steps);
    return s / static_cast<double>(records.size());
  }
  std::size_t fallbacks() const {
    std::size_t c = 0;
    for (const auto& r : records) c += r.fallback.has_value();
    return c;
  }
};

// Estimates every candidate, optionally next to the dense oracle. A failing
// direction is recorded in `failures` and skipped.
inline EstimatedScan scan_estimated(const AdjacencyMatrix& a, const std::vector<Direction>& candidates,
                                    const EstimatorConfig& cfg, bool with_exact = false, std::size_t threads = 1,
                                    std::size_t dense_limit = kDefaultDenseLimit) {
  cfg.validate();
  EstimatedScan out;
  if (candidates.empty()) return out;
  Matrix dense;
  if (with_exact) {
    check_dense_limit(a, dense_limit);
    dense = a.to_dense();
  }
  std::vector<std::optional<SensitivityRecord>> recs(candidates.size());
  std::vector<std::optional<double>> exact(candidates.size());
  std::vector<std::string> errors(candidates.size());
  parallel_for(candidates.size(), threads, [&](std::size_t k) {
    try {
      recs[k] = estimate(a, candidates[k], cfg);
      if (with_exact) exact[k] = total_sensitivity_exact(dense, candidates[k]);
    } catch (const Error& e) {
      errors[k] = e.what();
    }
  });
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (!recs[k]) {
      const auto& d = candidates[k];
      out.failures.push_back("(" + std::to_string(d.i() + 1) + "," + std::to_string(d.j() + 1) + "): " + errors[k]);
      continue;
    }
    out.records.push_back(*recs[k]);
    if (with_exact) out.exact.push_back(exact[k]);
  }
  return out;
}

// Scatter data: i,j,method,approx,exact,steps,matvecs (1-based nodes).
inline void write_scatter_csv(std::ostream& out, const EstimatedScan& scan) {
  out << "i,j,method,approx,exact,steps,matvecs\n";
  char buf[64];
  auto num = [&](double v) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  for (std::size_t k = 0; k < scan.records.size(); ++k) {
    const auto& r = scan.records[k];
    out << r.direction.i() + 1 << ',' << r.direction.j() + 1 << ',' << r.method_tag() << ',' << num(r.value) << ',';
    if (k < scan.exact.size() && scan.exact[k]) out << num(*scan.exact[k]);
    out << ',' << r.steps << ',' << r.matvecs << '\n';
  }
}

} // namespace netsens
