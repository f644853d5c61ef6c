#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixvol {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error hierarchy; the CLI maps these onto exit codes.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Point set spans an affine space of lower dimension than requested.
struct DegenerateInput : InputError {
  int intrinsic_dim;
  DegenerateInput(const std::string& what, int dim) : InputError(what), intrinsic_dim(dim) {}
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rejection sampler acceptance rate fell below the usable threshold.
struct ThinConeError : EstimationError {
  using EstimationError::EstimationError;
};

// Surface area of the unit sphere S^{k-1} in R^k.
inline double omega(int k) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k);
}

// Volume of the unit ball in R^k.
inline double kappa(int k) {
  return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

inline double multinomial(int d, const std::vector<int>& parts) {
  double r = std::tgamma(d + 1.0);
  for (int p : parts) r /= std::tgamma(p + 1.0);
  return std::round(r);
}

// Normalizing constant of the flag measure of degree n in R^d.
inline double gamma_const(int d, int n) { return binom(d - 1, n) / omega(d - n); }

inline double ipow(double x, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

// x^{-p/2} for integer p >= 0 and x > 0.
inline double inv_pow_half(double x, int p) {
  double r = ipow(x, p / 2);
  if (p & 1) r *= std::sqrt(x);
  return 1.0 / r;
}

// All m-element subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> k_subsets(int n, int m);

}  // namespace mixvol
