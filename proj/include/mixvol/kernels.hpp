#pragma once

#include "mixvol/common.hpp"
#include "mixvol/random.hpp"

#include <functional>

namespace mixvol {

enum class KernelMode { MixedVolume, Translative };

// Degree data of F_n (mode n) or G_r (mode r).
struct KernelSpec {
  int d = 0;
  KernelMode mode = KernelMode::MixedVolume;
  std::vector<int> degrees;
  double epsilon = 0.0;  // 0 disables the cutoff

  int k() const { return int(degrees.size()); }
  // Homogeneity index Σr − (k−1)d; 0 in mode n.
  int j() const;
  void validate() const;

  static KernelSpec mixed(int d, std::vector<int> n, double eps = 0.0);
  static KernelSpec translative(int d, std::vector<int> r, double eps = 0.0);
};

struct QuadratureOptions {
  double rel_tol_k2 = 1e-10;
  double rel_tol_k3 = 1e-6;
  int max_depth = 40;
  std::uint64_t mc_samples = 1000000;  // k >= 4
  std::uint64_t seed = 0;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // quadrature error estimate or MC standard error
  std::uint64_t evals = 0;
  bool converged = true;
};

// ∫_{S^{k-1}_+} f dH^{k-1}.
QuadResult sphere_plus_integrate(const std::function<double(const Vec&)>& f, int k, const QuadratureOptions& opt = {});

// Precomputed evaluator of F_n / G_r (and the ε versions) for repeated use.
class Kernel {
 public:
  explicit Kernel(KernelSpec spec, QuadratureOptions opt = {});
  const KernelSpec& spec() const { return spec_; }

  // Throws DivergenceError at ε = 0 near the singular set. For k >= 4 the
  // t-integral is Monte Carlo; `rng` (if given) replaces the fixed seed.
  QuadResult evaluate(const std::vector<Vec>& u, Rng* rng = nullptr) const;
  double operator()(const std::vector<Vec>& u) const { return evaluate(u).value; }

 private:
  QuadResult eval_F(const std::vector<Vec>& u, Rng* rng) const;
  QuadResult eval_G(const std::vector<Vec>& u, Rng* rng) const;

  KernelSpec spec_;
  QuadratureOptions opt_;
  std::vector<int> tpow_;
  int power_ = 0;  // integrand carries (·)^{-power/2}
  double prefactor_ = 1.0;
};

double eval_F(const KernelSpec& spec, const std::vector<Vec>& u, const QuadratureOptions& opt = {});
double eval_G(const KernelSpec& spec, const std::vector<Vec>& u, const QuadratureOptions& opt = {});

// Closest point of conv{u_i} to the origin and its convex weights.
struct MinNormPoint {
  Vec point;
  Vec weights;
  double distance = 0.0;
};
MinNormPoint min_norm_point(const std::vector<Vec>& u);
inline double hull_distance(const std::vector<Vec>& u) { return min_norm_point(u).distance; }

// Upper bound ω_k/(ω_{d−j} ε^{d−j}) for G^{(ε)}.
double G_eps_bound(const KernelSpec& spec);

// ‖(t_1u_1,…,t_ku_k)|L^⊥‖.
double scaled_diag_norm(const Vec& t, const std::vector<Vec>& u);

struct SphereSelftest {
  MCEstimate plain;       // sample mean
  MCEstimate controlled;  // with control variates s, s², s³
  double exact = 0.0;
};
// ∫_{S^{p−1}} (1+β‖x|L^⊥‖²)^{−p/2} for a d-dimensional L.
SphereSelftest sphere_projection_selftest(int p, int d, double beta, std::uint64_t seed, std::uint64_t samples);

}  // namespace mixvol
