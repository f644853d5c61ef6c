#pragma once

#include "mixvol/kernels.hpp"
#include "mixvol/polytope.hpp"

#include <map>

namespace mixvol {

// V_{r_1,…,r_k}(K_1,…,K_k) for Σr = (k−1)d + j, keyed by r.
struct TranslativeTable {
  int d = 0;
  int k = 0;
  int j = 0;
  std::map<std::vector<int>, double> values;
  std::map<std::vector<int>, double> errors;  // standard errors
  std::string route;
  double condition = 0.0;  // of the column-scaled fit design
  double total = 0.0;      // Σ_r V_r
  double total_error = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;

  double at(const std::vector<int>& r) const;
};

// All r ∈ {j,…,d}^k with Σr = (k−1)d + j, lexicographic.
std::vector<std::vector<int>> translative_degrees(int d, int k, int j);

struct CurvatureOptions {
  double epsilon = 0.0;    // G^{(ε)} cutoff; 0 disables
  double arc_tol = 1e-10;  // relative tolerance of the normal-arc integrals
  QuadratureOptions quad;
};

// Σ over F_i ∈ 𝓕_{r_i}(P_i) of ∏H^{r_i}(F_i)·‖⋀ lin(F_i)^⊥‖²·∫_{∏n(P_i,F_i)} G_r.
// Normal cones must have dimension ≤ 2 (all cases with d ≤ 3).
double curvature_mixed_functional(const std::vector<const Polytope*>& polys, const std::vector<int>& r,
                                  const CurvatureOptions& opt = {});

// ∫⋯∫ V_j(K_1 ∩ (K_2+z_2) ∩ ⋯ ∩ (K_k+z_k)) dz_2⋯dz_k; k ∈ {2,3}, d ∈ {2,3}, 0 ≤ j ≤ d−1.
MCEstimate translative_integral_mc(const std::vector<const Polytope*>& polys, int j, std::uint64_t seed,
                                   std::uint64_t samples);

// Fits Σ_r ∏λ_i^{r_i}V_r to the translative integral of (λ_1K_1,…,λ_kK_k) on the grid
// {1, 3/2, 2}^k, with one set of translation variates shared by all grid points.
TranslativeTable decompose_homogeneous(const std::vector<const Polytope*>& polys, int j, std::uint64_t seed,
                                       std::uint64_t samples);

// Deterministic table: entries with some r_i = d factor as V_d(K_i)·V_{r'}(rest),
// the others come from curvature_mixed_functional. Same restrictions apply.
TranslativeTable exact_translative_table(const std::vector<const Polytope*>& polys, int j,
                                         const CurvatureOptions& opt = {});

struct DualityPair {
  double lhs = 0.0;  // V_{n,d−n}(K,L), curvature route
  double rhs = 0.0;  // binom(d,n)·V(K[n],−L[d−n]), oracle
};
DualityPair duality_check(const Polytope& k, const Polytope& l, int n);

}  // namespace mixvol
