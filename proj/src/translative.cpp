#include "mixvol/translative.hpp"

#include "mixvol/cones.hpp"
#include "mixvol/mixed_volume.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>

namespace mixvol {

double TranslativeTable::at(const std::vector<int>& r) const {
  auto it = values.find(r);
  if (it == values.end()) throw InputError("translative table: no entry for the requested degrees");
  return it->second;
}

std::vector<std::vector<int>> translative_degrees(int d, int k, int j) {
  std::vector<std::vector<int>> out;
  const int total = (k - 1) * d + j;
  std::vector<int> cur(static_cast<size_t>(k));
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == k - 1) {
      if (left >= j && left <= d) {
        cur[size_t(i)] = left;
        out.push_back(cur);
      }
      return;
    }
    for (int r = j; r <= d; ++r) {
      cur[size_t(i)] = r;
      self(self, i + 1, left - r);
    }
  };
  if (k > 0) rec(rec, 0, total);
  return out;
}

// ---- curvature representation

namespace {

double face_measure(const Face& f) { return f.dim == 0 ? 1.0 : f.volume; }

// ∫ over the product of normal-cone sections; atoms are summed, arcs integrated.
double cone_product_integral(const std::vector<ConeSampler>& s, const std::function<double(const std::vector<Vec>&)>& f,
                             double tol) {
  const size_t k = s.size();
  std::vector<Vec> u(k);
  std::function<double(size_t)> rec = [&](size_t i) -> double {
    if (i == k) return f(u);
    const ConeSampler& c = s[i];
    switch (c.kind()) {
      case ConeSampler::Kind::Empty:
        return 0.0;
      case ConeSampler::Kind::Atoms: {
        double sum = 0.0;
        for (const auto& a : c.atoms()) {
          u[i] = a;
          sum += rec(i + 1);
        }
        return sum;
      }
      case ConeSampler::Kind::Arc: {
        auto g = [&](double t) {
          u[i] = c.arc_point(t);
          return rec(i + 1);
        };
        double err = 0.0;
        return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, 0.0, c.arc_length(), 15, tol, &err);
      }
      case ConeSampler::Kind::Indicator:
        break;
    }
    throw InputError("curvature_mixed_functional: normal cones of dimension > 2 are not supported");
  };
  return rec(0);
}

}  // namespace

double curvature_mixed_functional(const std::vector<const Polytope*>& polys, const std::vector<int>& r,
                                  const CurvatureOptions& opt) {
  if (polys.empty() || polys.size() != r.size())
    throw InputError("curvature_mixed_functional: degree count does not match polytope count");
  const int d = polys[0]->ambient_dim();
  for (const auto* p : polys)
    if (p->ambient_dim() != d) throw InputError("curvature_mixed_functional: dimension mismatch");
  const Kernel ker(KernelSpec::translative(d, r, opt.epsilon), opt.quad);
  const size_t k = polys.size();
  std::vector<const std::vector<int>*> lists;
  for (size_t i = 0; i < k; ++i) {
    lists.push_back(&polys[i]->faces_of_dim(r[i]));
    if (lists.back()->empty()) return 0.0;
  }
  double total = 0.0;
  std::vector<size_t> idx(k, 0);
  while (true) {
    std::vector<Subspace> spans;
    double h = 1.0;
    std::vector<ConeSampler> s;
    for (size_t i = 0; i < k; ++i) {
      const Face& f = polys[i]->face((*lists[i])[idx[i]]);
      spans.push_back(f.cone.span);
      h *= face_measure(f);
      s.emplace_back(f.cone);
    }
    const double br = subspace_determinant(spans);
    if (br > 1e-12)
      total += h * br * br * cone_product_integral(s, [&](const std::vector<Vec>& u) { return ker(u); }, opt.arc_tol);
    size_t i = 0;
    while (i < k && ++idx[i] == lists[i]->size()) idx[i++] = 0;
    if (i == k) break;
  }
  return total;
}

// ---- translative integral

namespace {

using Poly2 = std::vector<Eigen::Vector2d>;

// Halfspaces n·x ≤ b of a full-dimensional polytope.
struct HRep {
  Mat a;
  Vec b;
};

HRep hrep(const Polytope& p) {
  if (p.dim() != p.ambient_dim())
    throw InputError("translative integral: bodies must be full-dimensional");
  HRep h;
  const auto& fs = p.facets();
  h.a.resize(Eigen::Index(fs.size()), p.ambient_dim());
  h.b.resize(Eigen::Index(fs.size()));
  for (size_t i = 0; i < fs.size(); ++i) {
    h.a.row(Eigen::Index(i)) = fs[i].normal.transpose();
    h.b[Eigen::Index(i)] = fs[i].offset;
  }
  return h;
}

Poly2 ccw_polygon(const Polytope& p) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& v : p.vertices()) c += Eigen::Vector2d(v[0], v[1]);
  c /= double(p.vertices().size());
  Poly2 out;
  for (const auto& v : p.vertices()) out.emplace_back(v[0], v[1]);
  std::sort(out.begin(), out.end(), [&](const Eigen::Vector2d& x, const Eigen::Vector2d& y) {
    return std::atan2(x[1] - c[1], x[0] - c[0]) < std::atan2(y[1] - c[1], y[0] - c[0]);
  });
  return out;
}

// Sutherland–Hodgman against n·x ≤ b.
void clip(Poly2& poly, const Eigen::Vector2d& n, double b) {
  Poly2 out;
  const size_t m = poly.size();
  for (size_t i = 0; i < m; ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % m];
    const double sp = n.dot(p) - b, sq = n.dot(q) - b;
    if (sp <= 0) out.push_back(p);
    if ((sp < 0 && sq > 0) || (sp > 0 && sq < 0)) out.push_back(p + (sp / (sp - sq)) * (q - p));
  }
  poly.swap(out);
}

// Evaluates V_j of ∩(λ_iK_i + z_i), z_1 = 0.
class Intersector {
 public:
  Intersector(const std::vector<const Polytope*>& polys, int j) : j_(j), d_(polys[0]->ambient_dim()) {
    for (const auto* p : polys) {
      h_.push_back(hrep(*p));
      lo_.push_back(p->bbox_lo());
      hi_.push_back(p->bbox_hi());
    }
    if (d_ == 2) base_ = ccw_polygon(*polys[0]);
    scale_ = std::max(1.0, polys[0]->diameter());
  }

  int dim() const { return d_; }
  size_t bodies() const { return h_.size(); }

  // Box for z_i: bbox(λ_1K_1) − bbox(λ_iK_i), inflated by 1e-9.
  void box(const std::vector<double>& lam, size_t i, Vec& lo, Vec& hi) const {
    lo = lam[0] * lo_[0] - lam[i] * hi_[i];
    hi = lam[0] * hi_[0] - lam[i] * lo_[i];
    lo.array() -= 1e-9;
    hi.array() += 1e-9;
  }

  double value(const std::vector<double>& lam, const std::vector<Vec>& z) const {
    return d_ == 2 ? planar(lam, z) : spatial(lam, z);
  }

 private:
  double planar(const std::vector<double>& lam, const std::vector<Vec>& z) const {
    Poly2 poly;
    for (const auto& v : base_) poly.push_back(lam[0] * v);
    for (size_t i = 1; i < h_.size() && poly.size() >= 3; ++i)
      for (Eigen::Index r = 0; r < h_[i].a.rows() && poly.size() >= 3; ++r) {
        const Eigen::Vector2d n(h_[i].a(r, 0), h_[i].a(r, 1));
        clip(poly, n, lam[i] * h_[i].b[r] + n[0] * z[i][0] + n[1] * z[i][1]);
      }
    if (poly.size() < 3) return 0.0;
    double area = 0.0, perim = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
      const auto& p = poly[i];
      const auto& q = poly[(i + 1) % poly.size()];
      area += p[0] * q[1] - p[1] * q[0];
      perim += (q - p).norm();
    }
    area *= 0.5;
    if (area <= 1e-14 * scale_ * scale_) return 0.0;  // measure-zero contact
    if (j_ == 0) return 1.0;
    if (j_ == 1) return 0.5 * perim;
    return area;
  }

  double spatial(const std::vector<double>& lam, const std::vector<Vec>& z) const {
    Vec lo = lam[0] * lo_[0], hi = lam[0] * hi_[0];
    for (size_t i = 1; i < h_.size(); ++i) {
      lo = lo.cwiseMax(lam[i] * lo_[i] + z[i]);
      hi = hi.cwiseMin(lam[i] * hi_[i] + z[i]);
    }
    if ((hi - lo).minCoeff() <= 0.0) return 0.0;
    Eigen::Index rows = 0;
    for (const auto& h : h_) rows += h.a.rows();
    Mat a(rows, d_);
    Vec b(rows);
    Eigen::Index r = 0;
    for (size_t i = 0; i < h_.size(); ++i)
      for (Eigen::Index q = 0; q < h_[i].a.rows(); ++q, ++r) {
        a.row(r) = h_[i].a.row(q);
        b[r] = lam[i] * h_[i].b[q] + (i ? h_[i].a.row(q).dot(z[i]) : 0.0);
      }
    const auto p = Polytope::from_halfspaces(a, b);
    if (!p) return 0.0;
    return p->intrinsic_volume(j_);
  }

  int j_, d_;
  std::vector<HRep> h_;
  std::vector<Vec> lo_, hi_;
  Poly2 base_;
  double scale_ = 1.0;
};

void check_translative(const std::vector<const Polytope*>& polys, int j) {
  if (polys.size() < 2 || polys.size() > 3) throw InputError("translative integral: need k = 2 or 3 bodies");
  const int d = polys[0]->ambient_dim();
  if (d < 2 || d > 3) throw InputError("translative integral: dimension must be 2 or 3");
  for (const auto* p : polys)
    if (p->ambient_dim() != d) throw InputError("translative integral: dimension mismatch");
  if (j < 0 || j > d - 1) throw InputError("translative integral: need 0 <= j <= d-1");
}

// One draw of the integrand for every λ tuple, driven by the same uniforms.
void draw_all(const Intersector& in, const std::vector<std::vector<double>>& grid, Rng& rng, Vec& out) {
  const size_t k = in.bodies();
  const int d = in.dim();
  std::vector<double> w((k - 1) * size_t(d));
  for (auto& x : w) x = uniform01(rng);
  std::vector<Vec> z(k, Vec::Zero(d));
  Vec lo, hi;
  for (size_t g = 0; g < grid.size(); ++g) {
    double vol = 1.0;
    for (size_t i = 1; i < k; ++i) {
      in.box(grid[g], i, lo, hi);
      for (int c = 0; c < d; ++c) z[i][c] = lo[c] + w[(i - 1) * size_t(d) + size_t(c)] * (hi[c] - lo[c]);
      vol *= (hi - lo).prod();
    }
    out[Eigen::Index(g)] = vol * in.value(grid[g], z);
  }
}

}  // namespace

MCEstimate translative_integral_mc(const std::vector<const Polytope*>& polys, int j, std::uint64_t seed,
                                   std::uint64_t samples) {
  check_translative(polys, j);
  const Intersector in(polys, j);
  const std::vector<std::vector<double>> grid{std::vector<double>(polys.size(), 1.0)};
  return mc_mean(seed, samples, [&](Rng& rng) {
    Vec y(1);
    draw_all(in, grid, rng, y);
    return y[0];
  });
}

TranslativeTable decompose_homogeneous(const std::vector<const Polytope*>& polys, int j, std::uint64_t seed,
                                       std::uint64_t samples) {
  check_translative(polys, j);
  const int d = polys[0]->ambient_dim();
  const int k = int(polys.size());
  const Intersector in(polys, j);
  std::vector<std::vector<double>> grid;
  const double levels[3] = {1.0, 1.5, 2.0};
  for (int c = 0; c < int(std::pow(3, k)); ++c) {
    std::vector<double> lam;
    for (int i = 0, x = c; i < k; ++i, x /= 3) lam.push_back(levels[x % 3]);
    grid.push_back(lam);
  }
  const auto deg = translative_degrees(d, k, j);
  const int m = int(deg.size());
  const VecEstimate y = mc_mean_vec(seed, samples, int(grid.size()),
                                    [&](Rng& rng, Vec& out) { draw_all(in, grid, rng, out); });

  Mat x(Eigen::Index(grid.size()), m);
  for (size_t g = 0; g < grid.size(); ++g)
    for (int c = 0; c < m; ++c) {
      double v = 1.0;
      for (int i = 0; i < k; ++i) v *= ipow(grid[g][size_t(i)], deg[size_t(c)][size_t(i)]);
      x(Eigen::Index(g), c) = v;
    }
  Vec scale = x.colwise().norm().transpose();
  const Mat xs = x * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Mat> svd(xs);
  TranslativeTable t;
  t.d = d;
  t.k = k;
  t.j = j;
  t.route = "translative-fit";
  t.seed = seed;
  t.samples = samples;
  t.condition = svd.singularValues()[0] / svd.singularValues()[m - 1];
  if (!(t.condition <= 1e8)) throw EstimationError("decompose_homogeneous: ill-conditioned fit");
  // β = A ȳ with A = (XᵀX)^{-1}Xᵀ; Cov β = A Cov(ȳ) Aᵀ
  const Mat a = (x.transpose() * x).ldlt().solve(x.transpose());
  const Vec beta = a * y.mean;
  const Mat cov = a * y.covariance * a.transpose();
  for (int c = 0; c < m; ++c) {
    t.values[deg[size_t(c)]] = beta[c];
    t.errors[deg[size_t(c)]] = std::sqrt(std::max(0.0, cov(c, c)));
  }
  t.total = beta.sum();
  t.total_error = std::sqrt(std::max(0.0, cov.sum()));
  return t;
}

namespace {

double exact_entry(const std::vector<const Polytope*>& polys, const std::vector<int>& r, const CurvatureOptions& opt) {
  const int d = polys[0]->ambient_dim();
  if (polys.size() == 1) return polys[0]->intrinsic_volume(r[0]);
  for (size_t i = 0; i < polys.size(); ++i)
    if (r[i] == d) {
      std::vector<const Polytope*> rest;
      std::vector<int> rr;
      for (size_t m = 0; m < polys.size(); ++m)
        if (m != i) {
          rest.push_back(polys[m]);
          rr.push_back(r[m]);
        }
      return polys[i]->volume() * exact_entry(rest, rr, opt);
    }
  return curvature_mixed_functional(polys, r, opt);
}

}  // namespace

TranslativeTable exact_translative_table(const std::vector<const Polytope*>& polys, int j,
                                         const CurvatureOptions& opt) {
  if (polys.size() < 2) throw InputError("exact_translative_table: need at least two bodies");
  const int d = polys[0]->ambient_dim();
  for (const auto* p : polys)
    if (p->ambient_dim() != d) throw InputError("exact_translative_table: dimension mismatch");
  if (j < 0 || j > d - 1) throw InputError("exact_translative_table: need 0 <= j <= d-1");
  TranslativeTable t;
  t.d = d;
  t.k = int(polys.size());
  t.j = j;
  t.route = "curvature";
  for (const auto& r : translative_degrees(d, t.k, j)) {
    const double v = exact_entry(polys, r, opt);
    t.values[r] = v;
    t.errors[r] = 0.0;
    t.total += v;
  }
  return t;
}

DualityPair duality_check(const Polytope& k, const Polytope& l, int n) {
  const int d = k.ambient_dim();
  if (l.ambient_dim() != d) throw InputError("duality_check: dimension mismatch");
  if (n < 1 || n > d - 1) throw InputError("duality_check: need 1 <= n <= d-1");
  DualityPair p;
  p.lhs = curvature_mixed_functional({&k, &l}, {n, d - n});
  p.rhs = binom(d, n) * oracle_mixed_volume({k, l.reflected()}, {n, d - n});
  return p;
}

}  // namespace mixvol
