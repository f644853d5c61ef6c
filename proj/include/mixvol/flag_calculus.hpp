#pragma once

#include "mixvol/kernels.hpp"
#include "mixvol/polytope.hpp"

#include <map>
#include <mutex>

namespace mixvol {

// Flag measure Ω_n(P;·) of a polytope: one atom per face F ∈ 𝓕_n(P). A flag
// (u,V) carries V ⊂ u^⊥ of dimension d−1−n with weight ⟨V,T(F,u)⟩².
struct FlagAtom {
  int face = 0;
  double weight = 0.0;  // H^n(F)
  const NormalCone* cone = nullptr;
};

struct FlagAtomSet {
  int d = 0;
  int n = 0;
  double gamma = 0.0;  // γ(d,n)
  const Polytope* poly = nullptr;
  std::vector<FlagAtom> atoms;

  int flag_dim() const { return d - 1 - n; }
  // T(F,u) = u^⊥ ∩ lin(F)^⊥.
  Subspace tangent(size_t atom, const Vec& u) const;
  // ∫ g dΩ_n by Monte Carlo: atom ∝ H^n(F)·H(n(P,F)), u from the cone, V Haar.
  MCEstimate integrate(const std::function<double(const Vec&, const Subspace&)>& g, std::uint64_t seed,
                       std::uint64_t samples) const;
};

// The polytope must outlive the atom set.
FlagAtomSet polytope_flag_atoms(const Polytope& p, int n);

// D^{d−1,j}: ∫⟨U,B⟩²_p⟨U,A⟩² dU = Σ_q D_{p,q}⟨A,B⟩²_q over U ∈ G(d−1,j).
struct DMatrix {
  int d = 0;
  int j = 0;
  Mat entries;
  Vec a;             // first row of entries^{-1}
  Mat sigma;         // standard errors of the entries (0 for closed forms)
  Vec a_sigma;
  double condition = 1.0;  // of the regression design (estimates) or of entries
  double residual = 0.0;   // max_q |Σ_p a_p D_{p,q} − δ_{q,0}|
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  bool exact = false;

  int size() const { return int(entries.rows()); }
};

bool has_closed_form_d_matrix(int d, int j);
// d ≥ 1, 0 ≤ j ≤ d−1 with min(j, d−1−j) ≤ 1.
DMatrix closed_form_d_matrix(int d, int j);
// OLS over `budget` triples (A,B,U); throws EstimationError when the design is
// ill-conditioned (condition > max_condition).
DMatrix estimate_d_matrix(int d, int j, std::uint64_t seed, std::uint64_t budget, double max_condition = 1e6);

// Σ_q D_{p,q}μ_q − μ_p/binom(d−1,j), μ_q = binom(j,q)binom(d−1−j,q)/binom(d−1,j): the
// A-average of the defining relation. Returns the largest |·| over p.
double d_matrix_average_defect(const DMatrix& m);

struct DMatrixPolicy {
  bool prefer_closed_form = true;
  std::uint64_t seed = 0;
  std::uint64_t budget = 200000;
  double max_condition = 1e6;  // of the regression design
  std::string path;  // JSON cache; empty disables disk I/O
};

// Write-once store keyed by (d,j). Thread-safe.
class DMatrixCache {
 public:
  explicit DMatrixCache(DMatrixPolicy policy = {});
  const DMatrix& get(int d, int j);
  const DMatrixPolicy& policy() const { return policy_; }
  void save() const;

 private:
  void load();

  DMatrixPolicy policy_;
  std::map<std::pair<int, int>, DMatrix> store_;  // estimates, persisted
  std::map<std::pair<int, int>, DMatrix> closed_;
  mutable std::mutex mu_;
};

DMatrixCache& default_d_matrices();

// Per-body coefficient rows a^i for subspaces of dimension dims[i] in u_i^⊥.
std::vector<std::vector<double>> multiplier_coefficients(int d, const std::vector<int>& dims, DMatrixCache& cache);

// Φ_u(W_1,…,W_k), W_i ⊂ u_i^⊥ of dimension n_i, Σn_i = d.
double phi_kernel(const std::vector<Vec>& u, const std::vector<Subspace>& w, const std::vector<std::vector<double>>& a);
// Ψ_u(U_1,…,U_k), U_i ⊂ u_i^⊥ of dimension d−1−r_i; the wedges carry u_i as well.
// For j > 0 this is the reduced form of the averaged construction.
double psi_kernel(const std::vector<Vec>& u, const std::vector<Subspace>& U, const std::vector<std::vector<double>>& a);

// φ_n(u_i,V_i) = c(d,n)^{-1}Φ(V_1^⊥∩u_1^⊥,…), V_i the flag subspaces (dim d−1−n_i).
double phi_multiplier(const std::vector<int>& n, const std::vector<Vec>& u, const std::vector<Subspace>& v,
                      const std::vector<std::vector<double>>& a);
// ψ_r(u_i,U_i) = c̃(d,r)^{-1}Ψ(U_1,…,U_k).
double psi_multiplier(const std::vector<int>& r, const std::vector<Vec>& u, const std::vector<Subspace>& v,
                      const std::vector<std::vector<double>>& a);

struct IdentityTrial {
  double mc = 0.0;
  double std_error = 0.0;
  double target = 0.0;
  double z = 0.0;  // (mc − target)/std_error, 0 when exact
};
struct IdentityReport {
  int lemma = 3;
  int d = 0;
  std::vector<int> degrees;
  int j = 0;
  bool deterministic = false;
  double max_abs_z = 0.0;
  double max_abs_error = 0.0;
  std::vector<IdentityTrial> trials;
};
// Lemma 3 (degrees n, Σn = d) or Lemma 5 (degrees r). For Lemma 5 with j > 0 the
// extra body of degree d−j is averaged inside the same Monte Carlo loop.
IdentityReport verify_multiplier_identity(int lemma, int d, const std::vector<int>& degrees, std::uint64_t seed,
                                          int trials, std::uint64_t samples, DMatrixCache& cache);

struct FlagOptions {
  std::uint64_t seed = 0;
  std::uint64_t samples = 100000;
  double epsilon = 0.0;
  bool require_general_position = true;  // only enforced at ε = 0
  QuadratureOptions quad{1e-9, 1e-6, 40, 20000, 0};
  DMatrixCache* cache = nullptr;  // default_d_matrices() if null
};

// V(K_1[n_1],…,K_k[n_k]) from ∫F_n φ_n dΩ_{n_1}⋯dΩ_{n_k}.
MCEstimate flag_mixed_volume(const std::vector<const Polytope*>& polys, const std::vector<int>& n,
                             const FlagOptions& opt = {});
// V_{r_1,…,r_k}(K_1,…,K_k) from ∫G_r ψ_r dΩ_{r_1}⋯dΩ_{r_k}.
MCEstimate flag_mixed_functional(const std::vector<const Polytope*>& polys, const std::vector<int>& r,
                                 const FlagOptions& opt = {});

}  // namespace mixvol
