#include "mixvol/exterior_algebra.hpp"

#include <algorithm>

namespace mixvol {

std::vector<std::vector<int>> k_subsets(int n, int m) {
  std::vector<std::vector<int>> out;
  if (m < 0 || m > n) return out;
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  while (true) {
    out.push_back(idx);
    int i = m - 1;
    while (i >= 0 && idx[i] == n - m + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int l = i + 1; l < m; ++l) idx[l] = idx[l - 1] + 1;
  }
  return out;
}

UnitVector::UnitVector(Vec coords) : v_(std::move(coords)) {
  if (std::abs(v_.norm() - 1.0) > 1e-12) throw InputError("UnitVector: coordinates are not of unit norm");
}

UnitVector UnitVector::normalized(const Vec& v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw InputError("UnitVector: zero vector");
  return UnitVector(v / n);
}

Mat orthonormalize(const Mat& vectors, double tol) {
  const int d = int(vectors.rows());
  Mat q(d, vectors.cols());
  int r = 0;
  double scale = 0.0;
  for (int j = 0; j < vectors.cols(); ++j) scale = std::max(scale, vectors.col(j).norm());
  for (int j = 0; j < vectors.cols(); ++j) {
    Vec v = vectors.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < r; ++i) v -= q.col(i).dot(v) * q.col(i);
    const double n = v.norm();
    if (n > tol * std::max(1.0, scale)) q.col(r++) = v / n;
  }
  return q.leftCols(r);
}

Subspace Subspace::span(const Mat& vectors, double tol) {
  Subspace s;
  s.frame_ = orthonormalize(vectors, tol);
  return s;
}

Subspace Subspace::span(const std::vector<Vec>& vectors, double tol) {
  if (vectors.empty()) throw InputError("Subspace::span: no vectors (ambient dimension unknown)");
  Mat m(vectors[0].size(), vectors.size());
  for (size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != m.rows()) throw InputError("Subspace::span: dimension mismatch");
    m.col(i) = vectors[i];
  }
  return span(m, tol);
}

Subspace Subspace::from_orthonormal(Mat frame) {
  const Mat g = frame.transpose() * frame;
  if (g.size() > 0 && (g - Mat::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() > 1e-10)
    throw InputError("Subspace: frame is not orthonormal");
  Subspace s;
  s.frame_ = std::move(frame);
  return s;
}

Subspace Subspace::whole(int d) {
  Subspace s;
  s.frame_ = Mat::Identity(d, d);
  return s;
}

namespace {
// Orthonormal basis of the complement of span(f) in R^{rows}, f orthonormal.
Mat complement_frame(const Mat& f) {
  const int d = int(f.rows()), m = int(f.cols());
  if (m == 0) return Mat::Identity(d, d);
  Eigen::HouseholderQR<Mat> qr(f);
  Mat q = qr.householderQ() * Mat::Identity(d, d);
  return q.rightCols(d - m);
}
}  // namespace

Subspace Subspace::complement() const {
  Subspace s;
  s.frame_ = complement_frame(frame_);
  return s;
}

Subspace Subspace::complement_within(const Subspace& outer) const {
  const Mat coords = outer.frame_.transpose() * frame_;
  Subspace s;
  s.frame_ = outer.frame_ * complement_frame(orthonormalize(coords));
  return s;
}

bool Subspace::contains(const Vec& x, double tol) const {
  return (x - project(x)).norm() <= tol * std::max(1.0, x.norm());
}

bool Subspace::contains(const Subspace& s, double tol) const {
  for (int j = 0; j < s.dim(); ++j)
    if (!contains(Vec(s.frame_.col(j)), tol)) return false;
  return true;
}

bool Subspace::same_span(const Subspace& s, double tol) const {
  if (s.dim() != dim() || s.ambient_dim() != ambient_dim()) return false;
  if (dim() == 0) return true;
  const double c = std::abs((frame_.transpose() * s.frame_).determinant());
  return std::abs(c - 1.0) <= tol;
}

double gram_det(const Mat& gram) {
  const int m = int(gram.rows());
  Mat a = gram;
  double det = 1.0;
  for (int k = 0; k < m; ++k) {
    int p = k;
    for (int i = k + 1; i < m; ++i)
      if (a(i, i) > a(p, p)) p = i;
    if (p != k) {
      a.row(k).swap(a.row(p));
      a.col(k).swap(a.col(p));
    }
    const double piv = a(k, k);
    if (piv <= 0.0) return 0.0;
    det *= piv;
    for (int i = k + 1; i < m; ++i) {
      const double f = a(i, k) / piv;
      for (int j = k + 1; j < m; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return std::max(0.0, det);
}

double wedge_norm_sq(const Mat& columns) {
  if (columns.cols() == 0) return 1.0;
  if (columns.cols() > columns.rows()) return 0.0;
  if (columns.cols() == columns.rows()) {
    const double det = columns.determinant();
    return det * det;
  }
  return gram_det(columns.transpose() * columns);
}

double wedge_norm_sq(const std::vector<Vec>& vectors) {
  if (vectors.empty()) return 1.0;
  Mat m(vectors[0].size(), vectors.size());
  for (size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != m.rows()) throw InputError("wedge_norm_sq: dimension mismatch");
    m.col(i) = vectors[i];
  }
  return wedge_norm_sq(m);
}

double subspace_determinant(const std::vector<Subspace>& subspaces) {
  if (subspaces.empty()) return 1.0;
  const int d = subspaces[0].ambient_dim();
  int total = 0;
  for (const auto& s : subspaces) {
    if (s.ambient_dim() != d) throw InputError("subspace_determinant: dimension mismatch");
    total += s.dim();
  }
  if (total > d) return 0.0;
  Mat m(d, total);
  int c = 0;
  for (const auto& s : subspaces) {
    m.middleCols(c, s.dim()) = s.frame();
    c += s.dim();
  }
  return std::sqrt(wedge_norm_sq(m));
}

double subspace_product_sq(const Subspace& a, const Subspace& b) {
  if (a.dim() != b.dim() || a.ambient_dim() != b.ambient_dim())
    throw InputError("subspace_product_sq: dimension mismatch");
  if (a.dim() == 0) return 1.0;
  const double det = (a.frame().transpose() * b.frame()).determinant();
  return det * det;
}

Mat adapted_basis(const Subspace& ambient, const Subspace& u) {
  const Subspace rest = u.complement_within(ambient);
  Mat v(ambient.ambient_dim(), u.dim() + rest.dim());
  v << u.frame(), rest.frame();
  return v;
}

std::vector<double> graded_scalar_products(const Subspace& ambient, const Subspace& u, const Subspace& a) {
  const int j = u.dim();
  if (a.dim() != j) throw InputError("graded_scalar_product: U and A differ in dimension");
  const int e = ambient.dim();
  if (j > e) throw InputError("graded_scalar_product: subspace exceeds ambient");
  const int lmax = std::min(j, e - j);
  std::vector<double> out(lmax + 1, 0.0);
  if (j == 0) {
    out[0] = 1.0;
    return out;
  }
  const Mat v = adapted_basis(ambient, u);
  const Mat m = v.transpose() * a.frame();  // e x j
  Mat sub(j, j);
  for (const auto& idx : k_subsets(e, j)) {
    int outside = 0;
    for (int i : idx) outside += (i >= j);
    for (int r = 0; r < j; ++r) sub.row(r) = m.row(idx[r]);
    const double det = sub.determinant();
    out[outside] += det * det;
  }
  return out;
}

double graded_scalar_product(const Subspace& ambient, const Subspace& u, const Subspace& a, int l) {
  const int lmax = std::min(u.dim(), ambient.dim() - u.dim());
  if (l < 0 || l > lmax) throw InputError("graded_scalar_product: index l out of range");
  return graded_scalar_products(ambient, u, a)[l];
}

double graded_scalar_product(const Vec& normal, const Subspace& u, const Subspace& a, int l) {
  const Mat n = normal;
  return graded_scalar_product(Subspace::span(n).complement(), u, a, l);
}

double diag_projection_norm(const std::vector<Vec>& x) {
  const size_t k = x.size();
  if (k < 2) throw InputError("diag_projection_norm: need k >= 2");
  double s = 0.0;
  for (size_t i = 0; i < k; ++i)
    for (size_t j = i + 1; j < k; ++j) s += (x[i] - x[j]).squaredNorm();
  return std::sqrt(s / double(k));
}

double diag_projection_norm_explicit(const std::vector<Vec>& x) {
  const size_t k = x.size();
  if (k < 2) throw InputError("diag_projection_norm: need k >= 2");
  Vec mean = Vec::Zero(x[0].size());
  for (const auto& v : x) mean += v;
  mean /= double(k);
  double s = 0.0;
  for (const auto& v : x) s += (v - mean).squaredNorm();
  return std::sqrt(s);
}

Subspace uniform_subspace_in(const Subspace& ambient, int m, Rng& rng) {
  const int e = ambient.dim();
  if (m < 0 || m > e) throw InputError("uniform_subspace: dimension out of range");
  if (m == e) return ambient;
  if (m == 0) return Subspace(ambient.ambient_dim());
  while (true) {
    Mat g(e, m);
    for (int j = 0; j < m; ++j) g.col(j) = gaussian_vector(rng, e);
    Mat q = orthonormalize(g, 1e-8);
    if (q.cols() == m) return Subspace::from_orthonormal(ambient.frame() * q);
  }
}

Subspace uniform_subspace(const Vec& u, int m, Rng& rng) {
  const Mat n = u;
  return uniform_subspace_in(Subspace::span(n).complement(), m, rng);
}

Subspace tangent_subspace(const Vec& u, const Subspace& lin_face_perp) {
  if (!lin_face_perp.contains(u, 1e-8)) throw InputError("tangent_subspace: u is not orthogonal to lin(F)");
  const Mat n = u;
  return Subspace::span(n).complement_within(lin_face_perp);
}

}  // namespace mixvol
