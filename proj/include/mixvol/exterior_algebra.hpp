#pragma once

#include "mixvol/common.hpp"
#include "mixvol/random.hpp"

namespace mixvol {

class UnitVector {
 public:
  // Throws InputError unless | ||v|| - 1 | <= 1e-12.
  explicit UnitVector(Vec coords);
  static UnitVector normalized(const Vec& v);
  int dim() const { return int(v_.size()); }
  const Vec& coords() const { return v_; }
  operator const Vec&() const { return v_; }

 private:
  Vec v_;
};

// Linear subspace stored as an orthonormal frame (ambient_dim x dim).
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(int ambient_dim) : frame_(ambient_dim, 0) {}

  static Subspace span(const Mat& vectors, double tol = 1e-10);
  static Subspace span(const std::vector<Vec>& vectors, double tol = 1e-10);
  static Subspace from_orthonormal(Mat frame);
  static Subspace whole(int d);

  int ambient_dim() const { return int(frame_.rows()); }
  int dim() const { return int(frame_.cols()); }
  const Mat& frame() const { return frame_; }

  Subspace complement() const;
  // outer ∩ this^⊥, assuming this ⊂ outer.
  Subspace complement_within(const Subspace& outer) const;
  Vec project(const Vec& x) const { return frame_ * (frame_.transpose() * x); }
  bool contains(const Vec& x, double tol = 1e-9) const;
  bool contains(const Subspace& s, double tol = 1e-9) const;
  // Span equality via the product of principal-angle cosines.
  bool same_span(const Subspace& s, double tol = 1e-9) const;

 private:
  Mat frame_;
};

// ||v1 ^ ... ^ vm||^2 as a Gram determinant; columns are the vectors.
double wedge_norm_sq(const Mat& columns);
double wedge_norm_sq(const std::vector<Vec>& vectors);
// Determinant of a symmetric PSD matrix by pivoted Cholesky, clamped at 0.
double gram_det(const Mat& gram);

// [A1,...,Ak]: norm of the wedge of all frames.
double subspace_determinant(const std::vector<Subspace>& subspaces);
// <A,B>^2 for subspaces of equal dimension.
double subspace_product_sq(const Subspace& a, const Subspace& b);

// Orthonormal basis of `ambient` whose first dim(U) columns span U.
Mat adapted_basis(const Subspace& ambient, const Subspace& u);

// <U,A>_l^2 inside `ambient` (U, A of the same dimension j).
double graded_scalar_product(const Subspace& ambient, const Subspace& u, const Subspace& a, int l);
// Same inside the orthogonal complement of the unit vector `normal`.
double graded_scalar_product(const Vec& normal, const Subspace& u, const Subspace& a, int l);
// All l = 0..min(j, e-j) at once.
std::vector<double> graded_scalar_products(const Subspace& ambient, const Subspace& u, const Subspace& a);

// ||x|L^perp|| for the diagonal L of (R^d)^k, via the pairwise-difference formula.
double diag_projection_norm(const std::vector<Vec>& x);
// Same via subtraction of the block mean.
double diag_projection_norm_explicit(const std::vector<Vec>& x);

// Orthonormal frame from Gaussian vectors by MGS with one re-orthogonalization pass.
Mat orthonormalize(const Mat& vectors, double tol = 1e-10);

// Haar-random m-dimensional subspace of `ambient`.
Subspace uniform_subspace_in(const Subspace& ambient, int m, Rng& rng);
// Haar-random m-dimensional subspace of u^perp.
Subspace uniform_subspace(const Vec& u, int m, Rng& rng);

// u^perp ∩ lin(F)^perp, given lin(F)^perp; u must lie in lin(F)^perp.
Subspace tangent_subspace(const Vec& u, const Subspace& lin_face_perp);

}  // namespace mixvol
