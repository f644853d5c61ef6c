#pragma once

#include "mixvol/common.hpp"

namespace mixvol {

enum class LPStatus { Optimal, Infeasible, Unbounded };

// minimize c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x_i >= 0 for nonneg[i], else free.
struct LinearProgram {
  int n = 0;
  Mat a_ub, a_eq;
  Vec b_ub, b_eq, c;
  std::vector<bool> nonneg;  // empty means all variables free

  explicit LinearProgram(int vars) : n(vars), a_ub(0, vars), a_eq(0, vars), c(Vec::Zero(vars)) {}
  void add_le(const Vec& row, double rhs);
  void add_eq(const Vec& row, double rhs);
};

struct LPResult {
  LPStatus status = LPStatus::Infeasible;
  Vec x;
  double objective = 0.0;
};

// Dense two-phase simplex with Bland's rule.
LPResult solve_lp(const LinearProgram& lp, double tol = 1e-9);
bool lp_feasible(const LinearProgram& lp, double tol = 1e-9);

}  // namespace mixvol
