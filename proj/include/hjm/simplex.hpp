#pragma once

// Dense two-phase simplex with Bland's rule, templated on the scalar so the
// same code runs in double and in exact rationals (mpq_class).
//
//   minimize c.x  subject to  A x = b,  x >= 0
//
// Desk-scale only: the tableau is dense.

#include <cstddef>
#include <vector>

#include "hjm/error.hpp"

namespace hjm {

enum class LpStatus { optimal, infeasible, unbounded };

template <class S>
struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<S> x;
  // Phase-1 duals in the caller's row signs. When infeasible, u.A_j <= 0 for
  // every column and u.b > 0, so -u is a Farkas certificate.
  std::vector<S> phase1_dual;
  S phase1_objective{};
  S objective{};
  std::size_t iterations = 0;
};

namespace detail {

template <class S>
S abs_of(const S& v) {
  return v < S(0) ? S(-v) : v;
}

template <class S>
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), t_(rows, std::vector<S>(cols + 1, S(0))), z_(cols + 1, S(0)),
        basis_(rows, 0) {}

  S& at(std::size_t i, std::size_t j) { return t_[i][j]; }
  const S& at(std::size_t i, std::size_t j) const { return t_[i][j]; }
  S& rhs(std::size_t i) { return t_[i][cols_]; }
  S& rc(std::size_t j) { return z_[j]; }
  S& zval() { return z_[cols_]; }
  std::size_t& basis(std::size_t i) { return basis_[i]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t r, std::size_t c) {
    const S piv = t_[r][c];
    for (auto& v : t_[r]) v /= piv;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const S f = t_[i][c];
      if (f == S(0)) continue;
      for (std::size_t j = 0; j <= cols_; ++j) t_[i][j] -= f * t_[r][j];
    }
    const S f = z_[c];
    if (f != S(0)) {
      for (std::size_t j = 0; j <= cols_; ++j) z_[j] -= f * t_[r][j];
    }
    basis_[r] = c;
  }

  // Bland's rule over columns [0, limit). Returns false if unbounded.
  // Throws when the iteration guard is exceeded.
  bool optimize(std::size_t limit, const S& tol, std::size_t& iters, std::size_t max_iter) {
    for (;;) {
      std::size_t enter = limit;
      for (std::size_t j = 0; j < limit; ++j) {
        if (z_[j] < S(-tol)) {
          enter = j;
          break;
        }
      }
      if (enter == limit) return true;
      std::size_t leave = rows_;
      S best{};
      for (std::size_t i = 0; i < rows_; ++i) {
        if (!(t_[i][enter] > tol)) continue;
        const S ratio = t_[i][cols_] / t_[i][enter];
        if (leave == rows_ || ratio < best ||
            (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == rows_) return false;
      pivot(leave, enter);
      if (++iters > max_iter) fail(ErrorKind::numeric, "LP cycling guard exceeded");
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::vector<S>> t_;
  std::vector<S> z_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

/// Two-phase simplex. With an empty c only phase 1 runs (pure feasibility).
template <class S>
LpSolution<S> solve_standard_lp(const std::vector<std::vector<S>>& A, const std::vector<S>& b,
                                const std::vector<S>& c, const S& tol,
                                std::size_t max_iter = 100000) {
  const std::size_t m = A.size();
  const std::size_t n = m == 0 ? c.size() : A.front().size();
  require(b.size() == m, "LP: rhs size mismatch");
  require(c.empty() || c.size() == n, "LP: objective size mismatch");

  detail::Tableau<S> tab(m, n + m);
  std::vector<int> flip(m, 1);
  for (std::size_t i = 0; i < m; ++i) {
    require(A[i].size() == n, "LP: ragged constraint matrix");
    flip[i] = b[i] < S(0) ? -1 : 1;
    for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = flip[i] > 0 ? A[i][j] : S(-A[i][j]);
    tab.at(i, n + i) = S(1);
    tab.rhs(i) = flip[i] > 0 ? b[i] : S(-b[i]);
    tab.basis(i) = n + i;
  }
  // Phase-1 reduced costs: c_art = 1, so rc_j = -sum_i A_ij for structurals.
  for (std::size_t j = 0; j < n; ++j) {
    S s(0);
    for (std::size_t i = 0; i < m; ++i) s += tab.at(i, j);
    tab.rc(j) = -s;
  }
  S total(0);
  for (std::size_t i = 0; i < m; ++i) total += tab.rhs(i);
  tab.zval() = -total;

  LpSolution<S> sol;
  tab.optimize(n + m, tol, sol.iterations, max_iter);
  sol.phase1_objective = S(-tab.zval());
  sol.phase1_dual.assign(m, S(0));
  for (std::size_t i = 0; i < m; ++i) {
    const S u = S(1) - tab.rc(n + i);
    sol.phase1_dual[i] = flip[i] > 0 ? u : S(-u);
  }
  sol.x.assign(n, S(0));
  if (sol.phase1_objective > tol) {
    sol.status = LpStatus::infeasible;
    return sol;
  }

  // Drive artificials out of the basis where possible.
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis(i) < n) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (detail::abs_of(tab.at(i, j)) > tol) {
        tab.pivot(i, j);
        break;
      }
    }
  }

  if (!c.empty()) {
    for (std::size_t j = 0; j <= n + m; ++j) {
      if (j == n + m) {
        S v(0);
        for (std::size_t i = 0; i < m; ++i) {
          if (tab.basis(i) < n) v += c[tab.basis(i)] * tab.rhs(i);
        }
        tab.zval() = S(-v);
        break;
      }
      S v = j < n ? c[j] : S(0);
      for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis(i) < n) v -= c[tab.basis(i)] * tab.at(i, j);
      }
      tab.rc(j) = v;
    }
    if (!tab.optimize(n, tol, sol.iterations, max_iter)) {
      sol.status = LpStatus::unbounded;
      return sol;
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis(i) < n) sol.x[tab.basis(i)] = tab.rhs(i);
  }
  S obj(0);
  if (!c.empty()) {
    for (std::size_t j = 0; j < n; ++j) obj += c[j] * sol.x[j];
  }
  sol.objective = obj;
  sol.status = LpStatus::optimal;
  return sol;
}

}  // namespace hjm
