#include "mixvol/polytope.hpp"

#include "mixvol/lp.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace mixvol {

bool NormalCone::contains(const Vec& w, double tol) const {
  const double scale = std::max(1.0, w.norm());
  if ((w - span.project(w)).norm() > tol * scale) return false;
  for (int r = 0; r < inequalities.rows(); ++r)
    if (inequalities.row(r).dot(w) > tol * scale * std::max(1.0, inequalities.row(r).norm())) return false;
  return true;
}

namespace {

struct AffineFrame {
  Vec p0;
  Mat e;  // d x dim orthonormal directions
  double scale = 1.0;
};

double point_diameter(const std::vector<Vec>& pts) {
  double dmax = 0.0;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) dmax = std::max(dmax, (pts[i] - pts[j]).norm());
  return dmax;
}

AffineFrame affine_frame(const std::vector<Vec>& pts, double tol) {
  AffineFrame f;
  const int d = int(pts[0].size());
  f.p0 = pts[0];
  f.scale = point_diameter(pts);
  if (f.scale <= 0.0) {
    f.e = Mat(d, 0);
    f.scale = 1.0;
    return f;
  }
  // Greedy farthest-point selection keeps the rank decision stable.
  Mat basis(d, 0);
  std::vector<bool> used(pts.size(), false);
  while (basis.cols() < d) {
    double best = -1.0;
    int bi = -1;
    for (size_t i = 0; i < pts.size(); ++i) {
      Vec w = pts[i] - f.p0;
      if (basis.cols() > 0) w -= basis * (basis.transpose() * w);
      const double n = w.norm();
      if (n > best) {
        best = n;
        bi = int(i);
      }
    }
    if (best <= tol * f.scale) break;
    Vec w = pts[size_t(bi)] - f.p0;
    for (int pass = 0; pass < 2; ++pass)
      if (basis.cols() > 0) w -= basis * (basis.transpose() * w);
    basis.conservativeResize(d, basis.cols() + 1);
    basis.col(basis.cols() - 1) = w.normalized();
  }
  f.e = basis;
  return f;
}

std::vector<Vec> dedupe(const std::vector<Vec>& pts, double tol_abs) {
  std::vector<Vec> out;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : out)
      if ((p - q).norm() <= tol_abs) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(p);
  }
  return out;
}

double cross2(const Vec& o, const Vec& a, const Vec& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Counter-clockwise convex polygon (no collinear points) by monotone chain.
std::vector<int> monotone_chain(const std::vector<Vec>& y, double tol) {
  std::vector<int> idx(y.size());
  for (size_t i = 0; i < y.size(); ++i) idx[i] = int(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return y[size_t(a)][0] < y[size_t(b)][0] || (y[size_t(a)][0] == y[size_t(b)][0] && y[size_t(a)][1] < y[size_t(b)][1]);
  });
  std::vector<int> h(2 * idx.size() + 1);
  int k = 0;
  for (int i : idx) {
    while (k >= 2 && cross2(y[size_t(h[k - 2])], y[size_t(h[k - 1])], y[size_t(i)]) <= tol) --k;
    h[k++] = i;
  }
  const int lower = k + 1;
  for (int t = int(idx.size()) - 2; t >= 0; --t) {
    const int i = idx[size_t(t)];
    while (k >= lower && cross2(y[size_t(h[k - 2])], y[size_t(h[k - 1])], y[size_t(i)]) <= tol) --k;
    h[k++] = i;
  }
  h.resize(size_t(std::max(0, k - 1)));
  return h;
}

// Indices of extreme points of y (coordinates already full-dimensional, unit scale).
std::vector<int> extreme_indices(const std::vector<Vec>& y, double tol) {
  const int n = int(y.size());
  const int e = n > 0 ? int(y[0].size()) : 0;
  std::vector<int> out;
  if (e == 1) {
    int lo = 0, hi = 0;
    for (int i = 1; i < n; ++i) {
      if (y[size_t(i)][0] < y[size_t(lo)][0]) lo = i;
      if (y[size_t(i)][0] > y[size_t(hi)][0]) hi = i;
    }
    out = {std::min(lo, hi), std::max(lo, hi)};
    return out;
  }
  if (e == 2) {
    out = monotone_chain(y, tol);
    std::sort(out.begin(), out.end());
    return out;
  }
  std::vector<bool> alive(static_cast<size_t>(n), true);
  for (int p = 0; p < n; ++p) {
    std::vector<int> others;
    for (int q = 0; q < n; ++q)
      if (q != p && alive[size_t(q)]) others.push_back(q);
    const int m = int(others.size());
    LinearProgram lp(m);
    lp.nonneg.assign(size_t(m), true);
    for (int c = 0; c < e; ++c) {
      Vec row(m);
      for (int i = 0; i < m; ++i) row[i] = y[size_t(others[size_t(i)])][c];
      lp.add_eq(row, y[size_t(p)][c]);
    }
    lp.add_eq(Vec::Ones(m), 1.0);
    if (lp_feasible(lp, tol)) alive[size_t(p)] = false;
  }
  for (int p = 0; p < n; ++p)
    if (alive[size_t(p)]) out.push_back(p);
  return out;
}

struct RawFacet {
  Vec normal;  // in frame coordinates
  double offset;
  std::vector<int> members;  // indices into y
};

Vec null_vector(const std::vector<Vec>& y, const std::vector<int>& s) {
  const int e = int(y[0].size());
  if (e == 3) {
    const Vec a = y[size_t(s[1])] - y[size_t(s[0])];
    const Vec b = y[size_t(s[2])] - y[size_t(s[0])];
    Vec c(3);
    c << a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0];
    return c;
  }
  Mat diffs(e, e - 1);
  for (int i = 1; i < e; ++i) diffs.col(i - 1) = y[size_t(s[size_t(i)])] - y[size_t(s[0])];
  Eigen::FullPivLU<Mat> lu(diffs.transpose());
  lu.setThreshold(1e-10);
  if (lu.rank() < e - 1) return Vec::Zero(e);
  Mat k = lu.kernel();
  return k.col(0);
}

// Facets by brute force over e-subsets with a one-sided check (points are all extreme).
std::vector<RawFacet> brute_facets(const std::vector<Vec>& y, double tol) {
  const int n = int(y.size());
  const int e = int(y[0].size());
  std::vector<RawFacet> facets;
  std::vector<std::vector<bool>> member;  // member[f][i]
  std::vector<int> s(static_cast<size_t>(e));
  std::vector<double> dist(static_cast<size_t>(n));
  // Iterate over subsets in lexicographic order.
  for (int i = 0; i < e; ++i) s[size_t(i)] = i;
  if (n < e) return facets;
  while (true) {
    bool known = false;
    for (const auto& mem : member) {
      bool all = true;
      for (int i : s)
        if (!mem[size_t(i)]) {
          all = false;
          break;
        }
      if (all) {
        known = true;
        break;
      }
    }
    if (!known) {
      Vec nv = null_vector(y, s);
      const double nn = nv.norm();
      if (nn > 1e-12) {
        nv /= nn;
        const double off = nv.dot(y[size_t(s[0])]);
        bool pos = false, neg = false;
        for (int q = 0; q < n && !(pos && neg); ++q) {
          const double v = nv.dot(y[size_t(q)]) - off;
          dist[size_t(q)] = v;
          if (v > tol) pos = true;
          if (v < -tol) neg = true;
        }
        if (!(pos && neg)) {
          RawFacet f;
          f.normal = pos ? Vec(-nv) : nv;
          f.offset = pos ? -off : off;
          std::vector<bool> mem(static_cast<size_t>(n), false);
          for (int q = 0; q < n; ++q)
            if (std::abs(dist[size_t(q)]) <= tol) {
              f.members.push_back(q);
              mem[size_t(q)] = true;
            }
          facets.push_back(std::move(f));
          member.push_back(std::move(mem));
        }
      }
    }
    int i = e - 1;
    while (i >= 0 && s[size_t(i)] == n - e + i) --i;
    if (i < 0) break;
    ++s[size_t(i)];
    for (int l = i + 1; l < e; ++l) s[size_t(l)] = s[size_t(l - 1)] + 1;
  }
  return facets;
}

std::vector<RawFacet> facets_of(const std::vector<Vec>& y, double tol) {
  const int e = int(y[0].size());
  if (e == 2) {
    std::vector<int> ring = monotone_chain(y, tol);
    std::vector<RawFacet> out;
    const int m = int(ring.size());
    for (int i = 0; i < m; ++i) {
      const Vec& a = y[size_t(ring[size_t(i)])];
      const Vec& b = y[size_t(ring[size_t((i + 1) % m)])];
      Vec nv(2);
      nv << b[1] - a[1], a[0] - b[0];
      nv.normalize();
      RawFacet f;
      f.normal = nv;
      f.offset = nv.dot(a);
      f.members = {std::min(ring[size_t(i)], ring[size_t((i + 1) % m)]), std::max(ring[size_t(i)], ring[size_t((i + 1) % m)])};
      out.push_back(f);
    }
    return out;
  }
  if (e == 1) {
    std::vector<RawFacet> out;
    for (int i = 0; i < 2; ++i) {
      RawFacet f;
      f.normal = Vec::Constant(1, y[size_t(i)][0] < y[size_t(1 - i)][0] ? -1.0 : 1.0);
      f.offset = f.normal[0] * y[size_t(i)][0];
      f.members = {i};
      out.push_back(f);
    }
    return out;
  }
  return brute_facets(y, tol);
}

bool lex_less(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

int affine_rank(const std::vector<Vec>& pts, const std::vector<int>& idx, double tol_abs) {
  if (idx.size() <= 1) return 0;
  Mat diffs(pts[0].size(), idx.size() - 1);
  for (size_t i = 1; i < idx.size(); ++i) diffs.col(Eigen::Index(i - 1)) = pts[size_t(idx[i])] - pts[size_t(idx[0])];
  return int(orthonormalize(diffs, tol_abs).cols());
}

double recursive_hull_volume(const std::vector<Vec>& y, double tol, bool extreme_known);

double polygon_area(const std::vector<Vec>& y, double tol) {
  std::vector<int> ring = monotone_chain(y, tol);
  double a = 0.0;
  for (size_t i = 0; i < ring.size(); ++i) {
    const Vec& p = y[size_t(ring[i])];
    const Vec& q = y[size_t(ring[(i + 1) % ring.size()])];
    a += p[0] * q[1] - p[1] * q[0];
  }
  return 0.5 * std::abs(a);
}

// Volume of conv(y), y given in full-dimensional coordinates of unit scale.
double recursive_hull_volume(const std::vector<Vec>& y_in, double tol, bool extreme_known) {
  const int e = int(y_in[0].size());
  if (e == 1) {
    double lo = y_in[0][0], hi = y_in[0][0];
    for (const auto& p : y_in) {
      lo = std::min(lo, p[0]);
      hi = std::max(hi, p[0]);
    }
    return hi - lo;
  }
  if (e == 2) return polygon_area(y_in, tol);
  std::vector<Vec> y;
  if (extreme_known) {
    y = y_in;
  } else {
    for (int i : extreme_indices(y_in, tol)) y.push_back(y_in[size_t(i)]);
  }
  Vec c = Vec::Zero(e);
  for (const auto& p : y) c += p;
  c /= double(y.size());
  double vol = 0.0;
  for (const auto& f : brute_facets(y, tol)) {
    const double h = f.offset - f.normal.dot(c);
    // Coordinates inside the facet hyperplane.
    Mat frame = Subspace::span(Mat(f.normal)).complement().frame();
    std::vector<Vec> z;
    for (int q : f.members) z.push_back(frame.transpose() * (y[size_t(q)] - y[size_t(f.members[0])]));
    vol += h * recursive_hull_volume(z, tol, true) / double(e);
  }
  return vol;
}

}  // namespace

std::vector<Vec> extreme_points(const std::vector<Vec>& points, double tol) {
  if (points.empty()) return {};
  AffineFrame fr = affine_frame(points, tol);
  std::vector<Vec> pts = dedupe(points, tol * fr.scale);
  if (fr.e.cols() == 0) return {pts[0]};
  std::vector<Vec> y;
  for (const auto& p : pts) y.push_back(fr.e.transpose() * (p - fr.p0) / fr.scale);
  std::vector<Vec> out;
  for (int i : extreme_indices(y, tol)) out.push_back(pts[size_t(i)]);
  return out;
}

double hull_volume(const std::vector<Vec>& points, double tol) {
  if (points.empty()) return 0.0;
  const int d = int(points[0].size());
  AffineFrame fr = affine_frame(points, tol);
  if (fr.e.cols() < d) return 0.0;
  std::vector<Vec> pts = dedupe(points, tol * fr.scale);
  std::vector<Vec> y;
  for (const auto& p : pts) y.push_back(fr.e.transpose() * (p - fr.p0) / fr.scale);
  return recursive_hull_volume(y, tol, false) * std::pow(fr.scale, d) * std::abs(fr.e.determinant());
}

Polytope Polytope::hull(const std::vector<Vec>& points, const HullOptions& opt, std::string name) {
  if (points.empty()) throw InputError("hull: empty point set");
  const int d = int(points[0].size());
  for (const auto& p : points) {
    if (p.size() != d) throw InputError("hull: points of mixed dimension");
    if (!p.allFinite()) throw InputError("hull: non-finite coordinate");
  }
  AffineFrame fr = affine_frame(points, opt.tol);
  const int e = int(fr.e.cols());
  if (e < d && !opt.allow_degenerate)
    throw DegenerateInput("hull: points span an affine subspace of dimension " + std::to_string(e), e);
  std::vector<Vec> pts = dedupe(points, opt.tol * fr.scale);
  Polytope P;
  P.name_ = std::move(name);
  P.d_ = d;
  P.e_ = e;
  P.aff_ = Subspace::from_orthonormal(fr.e);
  P.base_point_ = fr.p0;
  if (e == 0) {
    P.vertices_ = {pts[0]};
    P.build_lattice({}, opt.tol);
    return P;
  }
  std::vector<Vec> y;
  for (const auto& p : pts) y.push_back(fr.e.transpose() * (p - fr.p0) / fr.scale);
  std::vector<int> ext = extreme_indices(y, opt.tol);
  std::vector<Vec> yext;
  for (int i : ext) yext.push_back(y[size_t(i)]);
  std::vector<RawFacet> raw = facets_of(yext, opt.tol);
  // Lexicographic vertex order.
  std::vector<int> order(ext.size());
  for (size_t i = 0; i < ext.size(); ++i) order[i] = int(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return lex_less(pts[size_t(ext[size_t(a)])], pts[size_t(ext[size_t(b)])]); });
  std::vector<int> rank(ext.size());
  for (size_t i = 0; i < order.size(); ++i) {
    rank[size_t(order[i])] = int(i);
    P.vertices_.push_back(pts[size_t(ext[size_t(order[i])])]);
  }
  std::vector<std::vector<int>> sets;
  for (const auto& f : raw) {
    Facet g;
    g.normal = fr.e * f.normal;
    g.offset = f.offset * fr.scale + g.normal.dot(fr.p0);
    for (int m : f.members) g.vertices.push_back(rank[size_t(m)]);
    std::sort(g.vertices.begin(), g.vertices.end());
    P.facets_.push_back(g);
  }
  std::sort(P.facets_.begin(), P.facets_.end(), [](const Facet& a, const Facet& b) { return a.vertices < b.vertices; });
  for (const auto& f : P.facets_) sets.push_back(f.vertices);
  P.build_lattice(sets, opt.tol);
  return P;
}

std::optional<Polytope> Polytope::from_halfspaces(const Mat& a, const Vec& b, double tol) {
  const int d = int(a.cols());
  const int m = int(a.rows());
  std::vector<Vec> verts;
  std::vector<std::vector<int>> tight;
  Mat sub(d, d);
  Vec rhs(d);
  for (const auto& s : k_subsets(m, d)) {
    for (int i = 0; i < d; ++i) {
      sub.row(i) = a.row(s[size_t(i)]);
      rhs[i] = b[s[size_t(i)]];
    }
    Eigen::PartialPivLU<Mat> lu(sub);
    if (std::abs(lu.determinant()) < 1e-12) continue;
    Vec x = lu.solve(rhs);
    const Vec slack = a * x - b;
    if (slack.maxCoeff() > tol) continue;
    bool dup = false;
    for (const auto& v : verts)
      if ((v - x).norm() <= 1e-9) {
        dup = true;
        break;
      }
    if (!dup) verts.push_back(x);
  }
  if (int(verts.size()) < d + 1) return std::nullopt;
  AffineFrame fr = affine_frame(verts, 1e-9);
  if (fr.scale < 1e-9 || fr.e.cols() < d) return std::nullopt;
  // Vertices in lexicographic order; facets are the constraints whose tight set is (d-1)-dimensional.
  std::sort(verts.begin(), verts.end(), lex_less);
  Polytope P;
  P.d_ = P.e_ = d;
  P.aff_ = Subspace::whole(d);
  P.base_point_ = verts[0];
  P.vertices_ = verts;
  const double tol_abs = 1e-9 * std::max(1.0, fr.scale);
  std::set<std::vector<int>> seen;
  for (int r = 0; r < m; ++r) {
    const double nr = a.row(r).norm();
    if (nr <= 0.0) continue;
    std::vector<int> on;
    for (size_t v = 0; v < verts.size(); ++v)
      if (std::abs(a.row(r).dot(verts[v]) - b[r]) <= tol_abs * nr) on.push_back(int(v));
    if (int(on.size()) < d || affine_rank(verts, on, tol_abs) < d - 1) continue;
    if (!seen.insert(on).second) continue;
    Facet f;
    f.normal = a.row(r).transpose() / nr;
    f.offset = b[r] / nr;
    f.vertices = on;
    P.facets_.push_back(f);
  }
  std::sort(P.facets_.begin(), P.facets_.end(), [](const Facet& x, const Facet& y) { return x.vertices < y.vertices; });
  std::vector<std::vector<int>> sets;
  for (const auto& f : P.facets_) sets.push_back(f.vertices);
  P.build_lattice(sets, 1e-9);
  return P;
}

void Polytope::build_lattice(const std::vector<std::vector<int>>& facet_sets, double tol) {
  const double scale = std::max(1.0, diameter());
  const double tol_abs = tol * scale;
  std::set<std::vector<int>> all(facet_sets.begin(), facet_sets.end());
  std::vector<std::vector<int>> frontier(facet_sets.begin(), facet_sets.end());
  while (!frontier.empty()) {
    std::vector<std::vector<int>> next;
    for (const auto& x : frontier)
      for (const auto& f : facet_sets) {
        std::vector<int> y;
        std::set_intersection(x.begin(), x.end(), f.begin(), f.end(), std::back_inserter(y));
        if (!y.empty() && y != x && all.insert(y).second) next.push_back(y);
      }
    frontier.swap(next);
  }
  std::vector<int> top(vertices_.size());
  for (size_t i = 0; i < top.size(); ++i) top[i] = int(i);
  all.insert(top);
  for (size_t i = 0; i < vertices_.size(); ++i) all.insert({int(i)});

  by_dim_.assign(size_t(e_ + 1), {});
  std::vector<std::pair<int, std::vector<int>>> tmp;
  for (const auto& s : all) tmp.push_back({affine_rank(vertices_, s, tol_abs), s});
  std::sort(tmp.begin(), tmp.end());
  faces_.clear();
  for (auto& t : tmp) {
    Face f;
    f.dim = t.first;
    f.vertices = t.second;
    Mat diffs(d_, std::max<size_t>(1, f.vertices.size()) - 1);
    for (size_t i = 1; i < f.vertices.size(); ++i)
      diffs.col(Eigen::Index(i - 1)) = vertices_[size_t(f.vertices[i])] - vertices_[size_t(f.vertices[0])];
    f.lin = Subspace::span(diffs, tol_abs);
    if (f.lin.dim() != f.dim) f.lin = Subspace::span(diffs, tol);
    f.centroid = Vec::Zero(d_);
    for (int v : f.vertices) f.centroid += vertices_[size_t(v)];
    f.centroid /= double(f.vertices.size());
    by_dim_[size_t(f.dim)].push_back(int(faces_.size()));
    faces_.push_back(std::move(f));
  }
  // Relative volumes, bottom-up by the pyramid formula.
  for (int j = 0; j <= e_; ++j) {
    for (int fi : by_dim_[size_t(j)]) {
      Face& f = faces_[size_t(fi)];
      if (j == 0) {
        f.volume = 1.0;
        continue;
      }
      if (j == 1) {
        f.volume = (vertices_[size_t(f.vertices.front())] - vertices_[size_t(f.vertices.back())]).norm();
        if (f.vertices.size() != 2) {
          double best = 0.0;
          for (int a : f.vertices)
            for (int b : f.vertices) best = std::max(best, (vertices_[size_t(a)] - vertices_[size_t(b)]).norm());
          f.volume = best;
        }
        continue;
      }
      double vol = 0.0;
      for (int gi : by_dim_[size_t(j - 1)]) {
        const Face& g = faces_[size_t(gi)];
        if (!std::includes(f.vertices.begin(), f.vertices.end(), g.vertices.begin(), g.vertices.end())) continue;
        Vec w = vertices_[size_t(g.vertices[0])] - f.centroid;
        w = f.lin.project(w);
        w -= g.lin.project(w);
        vol += w.norm() * g.volume / double(j);
      }
      f.volume = vol;
    }
  }
  // Normal cones.
  const Subspace aff_perp = aff_.complement();
  for (auto& f : faces_) {
    NormalCone& c = f.cone;
    c.span = f.lin.complement();
    std::vector<int> others;
    for (size_t v = 0, p = 0; v < vertices_.size(); ++v) {
      if (p < f.vertices.size() && f.vertices[p] == int(v)) {
        ++p;
        continue;
      }
      others.push_back(int(v));
    }
    c.inequalities.resize(Eigen::Index(others.size()), d_);
    for (size_t i = 0; i < others.size(); ++i)
      c.inequalities.row(Eigen::Index(i)) = (vertices_[size_t(others[i])] - f.centroid).transpose();
    for (const auto& fa : facets_)
      if (std::includes(fa.vertices.begin(), fa.vertices.end(), f.vertices.begin(), f.vertices.end()))
        c.generators.push_back(fa.normal);
    for (int i = 0; i < aff_perp.dim(); ++i) {
      c.generators.push_back(aff_perp.frame().col(i));
      c.generators.push_back(-aff_perp.frame().col(i));
    }
    c.pointed = aff_perp.dim() == 0;
  }
}

const std::vector<int>& Polytope::faces_of_dim(int j) const {
  static const std::vector<int> empty;
  if (j < 0 || j > e_) return empty;
  return by_dim_[size_t(j)];
}

double Polytope::volume() const {
  if (e_ < d_) return 0.0;
  return faces_[size_t(by_dim_[size_t(e_)][0])].volume;
}

double Polytope::diameter() const { return point_diameter(vertices_); }

Vec Polytope::bbox_lo() const {
  Vec lo = vertices_[0];
  for (const auto& v : vertices_) lo = lo.cwiseMin(v);
  return lo;
}

Vec Polytope::bbox_hi() const {
  Vec hi = vertices_[0];
  for (const auto& v : vertices_) hi = hi.cwiseMax(v);
  return hi;
}

bool Polytope::contains(const Vec& x, double tol) const {
  const double s = std::max(1.0, diameter());
  Vec w = x - base_point_;
  if ((w - aff_.project(w)).norm() > tol * s) return false;
  if (e_ == 0) return true;
  for (const auto& f : facets_)
    if (f.normal.dot(x) > f.offset + tol * s) return false;
  return true;
}

double Polytope::external_angle(int face_index) const {
  const Face& f = faces_[size_t(face_index)];
  const int m = f.cone.dim();
  if (m == 0) return 1.0;
  if (auto ex = cone_measure_exact(f.cone)) return *ex / omega(m);
  return cone_measure_mc(f.cone, 0x5eedULL + std::uint64_t(face_index), 1000000).value / omega(m);
}

double Polytope::intrinsic_volume(int j) const {
  if (j < 0 || j > d_) throw InputError("intrinsic_volume: index out of range");
  if (j > e_) return 0.0;
  if (j == 0) return 1.0;
  if (j == e_) return faces_[size_t(by_dim_[size_t(e_)][0])].volume;
  double s = 0.0;
  for (int fi : by_dim_[size_t(j)]) s += faces_[size_t(fi)].volume * external_angle(fi);
  return s;
}

Polytope Polytope::transformed(const Mat& m) const {
  std::vector<Vec> pts;
  for (const auto& v : vertices_) pts.push_back(m * v);
  HullOptions opt;
  opt.allow_degenerate = e_ < d_;
  return hull(pts, opt, name_);
}

Polytope Polytope::translated(const Vec& x) const {
  std::vector<Vec> pts;
  for (const auto& v : vertices_) pts.push_back(v + x);
  HullOptions opt;
  opt.allow_degenerate = e_ < d_;
  return hull(pts, opt, name_);
}

Polytope Polytope::scaled(double lambda) const { return transformed(lambda * Mat::Identity(d_, d_)); }

Polytope minkowski_sum(const Polytope& p, const Polytope& q) {
  if (p.ambient_dim() != q.ambient_dim()) throw InputError("minkowski_sum: dimension mismatch");
  std::vector<Vec> pts;
  for (const auto& a : p.vertices())
    for (const auto& b : q.vertices()) pts.push_back(a + b);
  HullOptions opt;
  opt.allow_degenerate = true;
  return Polytope::hull(extreme_points(pts), opt);
}

namespace {
std::vector<Vec> scaled_sum_points(const std::vector<double>& t, const std::vector<Polytope>& polys) {
  if (t.size() != polys.size() || polys.empty()) throw InputError("scaled_sum: coefficient count mismatch");
  const int d = polys[0].ambient_dim();
  std::vector<Vec> acc = {Vec::Zero(d)};
  for (size_t i = 0; i < polys.size(); ++i) {
    if (polys[i].ambient_dim() != d) throw InputError("scaled_sum: dimension mismatch");
    if (t[i] < 0) throw InputError("scaled_sum: negative coefficient");
    if (t[i] == 0) continue;
    std::vector<Vec> next;
    for (const auto& a : acc)
      for (const auto& v : polys[i].vertices()) next.push_back(a + t[i] * v);
    acc = extreme_points(next);
  }
  return acc;
}
}  // namespace

Polytope scaled_sum(const std::vector<double>& t, const std::vector<Polytope>& polys) {
  HullOptions opt;
  opt.allow_degenerate = true;
  return Polytope::hull(scaled_sum_points(t, polys), opt);
}

double scaled_sum_volume(const std::vector<double>& t, const std::vector<Polytope>& polys) {
  return hull_volume(scaled_sum_points(t, polys));
}

std::optional<double> cone_measure_exact(const NormalCone& cone) {
  const int m = cone.dim();
  if (m == 0) return 0.0;
  if (m >= 3) return std::nullopt;
  const Mat& b = cone.span.frame();
  const Mat a = cone.inequalities * b;  // constraints in span coordinates
  auto feasible = [&](const Vec& w) {
    for (int r = 0; r < a.rows(); ++r) {
      const double nr = a.row(r).norm();
      if (nr > 1e-12 && a.row(r).dot(w) > 1e-9 * nr) return false;
    }
    return true;
  };
  if (m == 1) {
    double c = 0.0;
    if (feasible(Vec::Constant(1, 1.0))) c += 1.0;
    if (feasible(Vec::Constant(1, -1.0))) c += 1.0;
    return c;
  }
  std::vector<double> angles;
  for (int r = 0; r < a.rows(); ++r) {
    if (a.row(r).norm() <= 1e-12) continue;
    const double t = std::atan2(a(r, 1), a(r, 0));
    for (double s : {t + 0.5 * std::numbers::pi, t - 0.5 * std::numbers::pi}) {
      double u = std::fmod(s, 2.0 * std::numbers::pi);
      if (u < 0) u += 2.0 * std::numbers::pi;
      angles.push_back(u);
    }
  }
  if (angles.empty()) return 2.0 * std::numbers::pi;
  std::sort(angles.begin(), angles.end());
  double total = 0.0;
  for (size_t i = 0; i < angles.size(); ++i) {
    const double lo = angles[i];
    const double hi = i + 1 < angles.size() ? angles[i + 1] : angles[0] + 2.0 * std::numbers::pi;
    if (hi - lo <= 1e-15) continue;
    const double mid = 0.5 * (lo + hi);
    Vec w(2);
    w << std::cos(mid), std::sin(mid);
    if (feasible(w)) total += hi - lo;
  }
  return total;
}

MCEstimate cone_measure_mc(const NormalCone& cone, std::uint64_t seed, std::uint64_t samples) {
  const int m = cone.dim();
  const Mat& b = cone.span.frame();
  const Mat a = cone.inequalities * b;
  const double om = omega(m);
  return mc_mean(seed, samples, [&](Rng& rng) {
    const Vec w = uniform_sphere(rng, m);
    for (int r = 0; r < a.rows(); ++r)
      if (a.row(r).dot(w) > 0.0) return 0.0;
    return om;
  }, 1);
}

std::vector<AreaAtom> area_measure_atoms(const Polytope& p, int n) {
  if (n < 0 || n > p.ambient_dim() - 1) throw InputError("area_measure_atoms: degree out of range");
  std::vector<AreaAtom> out;
  for (int fi : p.faces_of_dim(n)) out.push_back({fi, p.face(fi).volume, &p.face(fi).cone});
  return out;
}

Polytope unit_cube(int d) {
  std::vector<Vec> pts;
  for (int mask = 0; mask < (1 << d); ++mask) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = (mask >> i) & 1;
    pts.push_back(v);
  }
  return Polytope::hull(pts, {}, "cube");
}

Polytope unit_simplex(int d) {
  std::vector<Vec> pts = {Vec::Zero(d)};
  for (int i = 0; i < d; ++i) pts.push_back(Vec::Unit(d, i));
  return Polytope::hull(pts, {}, "simplex");
}

Polytope cross_polytope(int d) {
  std::vector<Vec> pts;
  for (int i = 0; i < d; ++i) {
    pts.push_back(Vec::Unit(d, i));
    pts.push_back(-Vec::Unit(d, i));
  }
  return Polytope::hull(pts, {}, d == 2 ? "diamond" : "cross");
}

Polytope unit_segment(int d, int axis) {
  HullOptions opt;
  opt.allow_degenerate = true;
  return Polytope::hull({Vec::Zero(d), Vec::Unit(d, axis)}, opt, "segment");
}

}  // namespace mixvol
