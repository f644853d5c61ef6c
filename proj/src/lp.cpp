#include "mixvol/lp.hpp"

#include <limits>

namespace mixvol {

void LinearProgram::add_le(const Vec& row, double rhs) {
  a_ub.conservativeResize(a_ub.rows() + 1, n);
  a_ub.row(a_ub.rows() - 1) = row.transpose();
  b_ub.conservativeResize(b_ub.size() + 1);
  b_ub[b_ub.size() - 1] = rhs;
}

void LinearProgram::add_eq(const Vec& row, double rhs) {
  a_eq.conservativeResize(a_eq.rows() + 1, n);
  a_eq.row(a_eq.rows() - 1) = row.transpose();
  b_eq.conservativeResize(b_eq.size() + 1);
  b_eq[b_eq.size() - 1] = rhs;
}

namespace {

struct Tableau {
  int rows, cols;  // constraint rows, total columns excluding rhs
  std::vector<double> t;
  std::vector<int> basis;
  double& at(int r, int c) { return t[size_t(r) * (cols + 1) + c]; }
  double& rhs(int r) { return t[size_t(r) * (cols + 1) + cols]; }

  void pivot(int pr, int pc) {
    const int w = cols + 1;
    double* prow = &t[size_t(pr) * w];
    const double inv = 1.0 / prow[pc];
    for (int c = 0; c < w; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (int r = 0; r <= rows; ++r) {
      if (r == pr) continue;
      double* row = &t[size_t(r) * w];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (int c = 0; c < w; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
    basis[pr] = pc;
  }

  // Simplex on objective row `rows`; columns >= limit never enter. Returns false if unbounded.
  bool run(int limit, double tol) {
    const int max_iter = 50000;
    for (int it = 0; it < max_iter; ++it) {
      int pc = -1;
      for (int c = 0; c < limit; ++c)
        if (at(rows, c) < -tol) {
          pc = c;
          break;
        }
      if (pc < 0) return true;
      int pr = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows; ++r) {
        const double a = at(r, pc);
        if (a > tol) {
          const double ratio = rhs(r) / a;
          if (pr < 0 || ratio < best - 1e-12 || (ratio <= best + 1e-12 && basis[r] < basis[pr])) {
            best = ratio;
            pr = r;
          }
        }
      }
      if (pr < 0) return false;
      pivot(pr, pc);
    }
    throw EstimationError("simplex: iteration limit reached");
  }
};

}  // namespace

LPResult solve_lp(const LinearProgram& lp, double tol) {
  const int n = lp.n;
  const int mu = int(lp.a_ub.rows()), me = int(lp.a_eq.rows());
  const int m = mu + me;
  std::vector<int> col_of(n), neg_col(n, -1);
  int ny = 0;
  for (int i = 0; i < n; ++i) {
    col_of[i] = ny++;
    const bool nn = !lp.nonneg.empty() && lp.nonneg[i];
    if (!nn) neg_col[i] = ny++;
  }
  const int nslack = mu;
  // Artificial for every row whose slack cannot start in the basis.
  std::vector<int> art_of(m, -1);
  int nart = 0;
  std::vector<double> sign(m, 1.0);
  for (int r = 0; r < m; ++r) {
    const double b = r < mu ? lp.b_ub[r] : lp.b_eq[r - mu];
    if (b < 0) sign[r] = -1.0;
    if (r >= mu || b < 0) art_of[r] = nart++;
  }
  const int art0 = ny + nslack;
  Tableau tb;
  tb.rows = m;
  tb.cols = ny + nslack + nart;
  tb.t.assign(size_t(m + 1) * (tb.cols + 1), 0.0);
  tb.basis.assign(m, -1);
  for (int r = 0; r < m; ++r) {
    const auto row = r < mu ? lp.a_ub.row(r) : lp.a_eq.row(r - mu);
    const double b = r < mu ? lp.b_ub[r] : lp.b_eq[r - mu];
    for (int i = 0; i < n; ++i) {
      tb.at(r, col_of[i]) = sign[r] * row[i];
      if (neg_col[i] >= 0) tb.at(r, neg_col[i]) = -sign[r] * row[i];
    }
    if (r < mu) tb.at(r, ny + r) = sign[r];
    tb.rhs(r) = sign[r] * b;
    if (art_of[r] >= 0) {
      tb.at(r, art0 + art_of[r]) = 1.0;
      tb.basis[r] = art0 + art_of[r];
    } else {
      tb.basis[r] = ny + r;
    }
  }
  LPResult res;
  if (nart > 0) {
    for (int r = 0; r < m; ++r)
      if (art_of[r] >= 0)
        for (int c = 0; c <= tb.cols; ++c)
          if (c < art0 || c == tb.cols) tb.t[size_t(m) * (tb.cols + 1) + c] -= tb.t[size_t(r) * (tb.cols + 1) + c];
    tb.run(tb.cols, tol);
    if (-tb.rhs(m) > tol) {
      res.status = LPStatus::Infeasible;
      return res;
    }
    for (int r = 0; r < m; ++r) {
      if (tb.basis[r] < art0) continue;
      int pc = -1;
      for (int c = 0; c < art0; ++c)
        if (std::abs(tb.at(r, c)) > tol) {
          pc = c;
          break;
        }
      if (pc >= 0) tb.pivot(r, pc);
    }
  }
  // Phase 2 objective.
  for (int c = 0; c <= tb.cols; ++c) tb.t[size_t(m) * (tb.cols + 1) + c] = 0.0;
  for (int i = 0; i < n; ++i) {
    tb.at(m, col_of[i]) = lp.c[i];
    if (neg_col[i] >= 0) tb.at(m, neg_col[i]) = -lp.c[i];
  }
  for (int r = 0; r < m; ++r) {
    const int b = tb.basis[r];
    const double f = tb.at(m, b);
    if (f != 0.0)
      for (int c = 0; c <= tb.cols; ++c) tb.at(m, c) -= f * tb.at(r, c);
  }
  // Redundant rows still holding an artificial at level 0 stay basic; artificials never enter.
  if (!tb.run(art0, tol)) {
    res.status = LPStatus::Unbounded;
    return res;
  }
  Vec y = Vec::Zero(tb.cols);
  for (int r = 0; r < m; ++r) y[tb.basis[r]] = tb.rhs(r);
  res.x.resize(n);
  for (int i = 0; i < n; ++i) res.x[i] = y[col_of[i]] - (neg_col[i] >= 0 ? y[neg_col[i]] : 0.0);
  res.objective = lp.c.dot(res.x);
  res.status = LPStatus::Optimal;
  return res;
}

bool lp_feasible(const LinearProgram& lp, double tol) {
  LinearProgram q = lp;
  q.c = Vec::Zero(lp.n);
  return solve_lp(q, tol).status != LPStatus::Infeasible;
}

}  // namespace mixvol
