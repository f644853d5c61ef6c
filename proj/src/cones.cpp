#include "mixvol/cones.hpp"

#include "mixvol/lp.hpp"

#include <algorithm>

namespace mixvol {

namespace {

// Append the constraints "z + shift in cone" to an LP over z (first d variables, offset `col`).
void add_cone_rows(LinearProgram& lp, const NormalCone& c, const Vec& shift, int col, double slack_coeff, int slack_col) {
  const int d = c.ambient_dim();
  const Mat lin = c.span.complement().frame();
  for (int j = 0; j < lin.cols(); ++j) {
    Vec row = Vec::Zero(lp.n);
    row.segment(col, d) = lin.col(j);
    lp.add_eq(row, -lin.col(j).dot(shift));
  }
  for (int r = 0; r < c.inequalities.rows(); ++r) {
    const double nr = c.inequalities.row(r).norm();
    if (nr <= 1e-14) continue;
    Vec a = c.inequalities.row(r).transpose() / nr;
    Vec row = Vec::Zero(lp.n);
    row.segment(col, d) = a;
    if (slack_col >= 0) row[slack_col] = slack_coeff;
    lp.add_le(row, -a.dot(shift));
  }
}

}  // namespace

bool cones_intersect(const std::vector<ShiftedCone>& shifted, double tol) {
  if (shifted.empty()) return true;
  const int d = shifted[0].cone->ambient_dim();
  LinearProgram lp(d);
  for (const auto& s : shifted) {
    if (s.cone->ambient_dim() != d || s.shift.size() != d) throw InputError("cones_intersect: dimension mismatch");
    add_cone_rows(lp, *s.cone, s.shift, 0, 0.0, -1);
  }
  return lp_feasible(lp, tol);
}

double cones_intersect_margin(const std::vector<ShiftedCone>& shifted) {
  const int d = shifted[0].cone->ambient_dim();
  LinearProgram lp(d + 1);
  for (const auto& s : shifted) add_cone_rows(lp, *s.cone, s.shift, 0, 1.0, d);
  Vec cap = Vec::Zero(d + 1);
  cap[d] = 1.0;
  lp.add_le(cap, 1.0);
  lp.c = Vec::Zero(d + 1);
  lp.c[d] = -1.0;
  LPResult r = solve_lp(lp);
  if (r.status == LPStatus::Infeasible) return -std::numeric_limits<double>::infinity();
  if (r.status == LPStatus::Unbounded) return 1.0;
  return r.x[d];
}

std::vector<Vec> uniform_diagonal_complement(int d, int k, Rng& rng) {
  std::vector<Vec> x(static_cast<size_t>(k));
  while (true) {
    Vec mean = Vec::Zero(d);
    for (int i = 0; i < k; ++i) {
      x[size_t(i)] = gaussian_vector(rng, d);
      mean += x[size_t(i)];
    }
    mean /= double(k);
    double s = 0.0;
    for (auto& v : x) {
      v -= mean;
      s += v.squaredNorm();
    }
    if (s > 1e-20) {
      const double n = std::sqrt(s);
      for (auto& v : x) v /= n;
      return x;
    }
  }
}

bool verify_admissible(const std::vector<const Polytope*>& polys, const std::vector<Vec>& x, double margin) {
  const int k = int(polys.size());
  const int d = polys[0]->ambient_dim();
  std::vector<int> idx(static_cast<size_t>(k), 0);
  while (true) {
    int dims = 0;
    for (int i = 0; i < k; ++i) dims += polys[size_t(i)]->face(idx[size_t(i)]).dim;
    if (dims > d) {
      std::vector<ShiftedCone> sc;
      for (int i = 0; i < k; ++i) sc.push_back({&polys[size_t(i)]->face(idx[size_t(i)]).cone, x[size_t(i)]});
      if (cones_intersect_margin(sc) >= -margin) return false;
    }
    int i = 0;
    while (i < k && ++idx[size_t(i)] == int(polys[size_t(i)]->faces().size())) idx[size_t(i++)] = 0;
    if (i == k) break;
  }
  return true;
}

std::vector<Vec> random_admissible(const std::vector<const Polytope*>& polys, Rng& rng, const AdmissibleOptions& opt) {
  if (polys.size() < 2) throw InputError("random_admissible: need at least two polytopes");
  const int d = polys[0]->ambient_dim();
  for (int attempt = 0; attempt < std::max(1, opt.max_resample); ++attempt) {
    auto x = uniform_diagonal_complement(d, int(polys.size()), rng);
    if (!opt.verify || verify_admissible(polys, x, opt.margin)) return x;
  }
  throw EstimationError("random_admissible: resample budget exhausted (non-generic configuration)");
}

bool cones_meet_trivially(const std::vector<const NormalCone*>& cones) {
  const int d = cones[0]->ambient_dim();
  for (int l = 0; l < d; ++l)
    for (double sgn : {1.0, -1.0}) {
      LinearProgram lp(d);
      for (const auto* c : cones) add_cone_rows(lp, *c, Vec::Zero(d), 0, 0.0, -1);
      for (int i = 0; i < d; ++i) {
        lp.add_le(Vec::Unit(d, i), 1.0);
        lp.add_le(-Vec::Unit(d, i), 1.0);
      }
      lp.c = -sgn * Vec::Unit(d, l);
      LPResult r = solve_lp(lp);
      if (r.status == LPStatus::Optimal && -r.objective > 1e-7) return false;
    }
  return true;
}

bool cones_hull_avoids_origin(const std::vector<const NormalCone*>& cones) {
  const int k = int(cones.size());
  const int d = cones[0]->ambient_dim();
  const int n = k * d;
  auto base = [&] {
    LinearProgram lp(n);
    for (int i = 0; i < k; ++i) add_cone_rows(lp, *cones[size_t(i)], Vec::Zero(d), i * d, 0.0, -1);
    for (int c = 0; c < d; ++c) {
      Vec row = Vec::Zero(n);
      for (int i = 0; i < k; ++i) row[i * d + c] = 1.0;
      lp.add_eq(row, 0.0);
    }
    for (int v = 0; v < n; ++v) {
      lp.add_le(Vec::Unit(n, v), 1.0);
      lp.add_le(-Vec::Unit(n, v), 1.0);
    }
    return lp;
  };
  const LinearProgram proto = base();
  for (int v = 0; v < n; ++v)
    for (double sgn : {1.0, -1.0}) {
      LinearProgram lp = proto;
      lp.c = -sgn * Vec::Unit(n, v);
      LPResult r = solve_lp(lp);
      if (r.status == LPStatus::Optimal && -r.objective > 1e-7) return false;
    }
  return true;
}

bool general_position(const std::vector<const Polytope*>& polys, const std::vector<int>& degrees, PositionMode mode) {
  const int k = int(polys.size());
  if (int(degrees.size()) != k) throw InputError("general_position: degree count mismatch");
  const int d = polys[0]->ambient_dim();
  int sum = 0;
  for (int r : degrees) sum += r;
  if (mode == PositionMode::MixedVolume && sum != d) throw InputError("general_position: degrees must sum to d");
  if (mode == PositionMode::Translative && (sum < (k - 1) * d || sum > k * d))
    throw InputError("general_position: degrees must sum to (k-1)d + j");
  std::vector<const std::vector<int>*> lists;
  for (int i = 0; i < k; ++i) {
    lists.push_back(&polys[size_t(i)]->faces_of_dim(degrees[size_t(i)]));
    if (lists.back()->empty()) return true;
  }
  std::vector<size_t> idx(size_t(k), 0);
  while (true) {
    std::vector<const NormalCone*> cones;
    for (int i = 0; i < k; ++i) cones.push_back(&polys[size_t(i)]->face((*lists[size_t(i)])[idx[size_t(i)]]).cone);
    const bool ok = mode == PositionMode::MixedVolume ? cones_meet_trivially(cones) : cones_hull_avoids_origin(cones);
    if (!ok) return false;
    int i = 0;
    while (i < k && ++idx[size_t(i)] == lists[size_t(i)]->size()) idx[size_t(i++)] = 0;
    if (i == k) break;
  }
  return true;
}

ConeSampler::ConeSampler(const NormalCone& cone) : cone_(&cone), m_(cone.dim()) {
  const Mat& b = cone.span.frame();
  a_span_ = cone.inequalities * b;
  for (int r = 0; r < a_span_.rows(); ++r) {
    const double nr = a_span_.row(r).norm();
    if (nr > 1e-12) a_span_.row(r) /= nr;
  }
  auto feasible = [&](const Vec& w) {
    for (int r = 0; r < a_span_.rows(); ++r)
      if (a_span_.row(r).dot(w) > 1e-9) return false;
    return true;
  };
  if (m_ == 0) {
    kind_ = Kind::Empty;
    measure_ = 0.0;
    return;
  }
  if (m_ == 1) {
    kind_ = Kind::Atoms;
    for (double s : {1.0, -1.0})
      if (feasible(Vec::Constant(1, s))) atoms_.push_back(s * b.col(0));
    measure_ = double(atoms_.size());
    if (atoms_.empty()) kind_ = Kind::Empty;
    return;
  }
  if (m_ == 2) {
    kind_ = Kind::Arc;
    std::vector<double> ang;
    for (int r = 0; r < a_span_.rows(); ++r) {
      if (a_span_.row(r).norm() <= 1e-12) continue;
      const double t = std::atan2(a_span_(r, 1), a_span_(r, 0));
      for (double s : {t + 0.5 * std::numbers::pi, t - 0.5 * std::numbers::pi}) {
        double u = std::fmod(s, 2.0 * std::numbers::pi);
        if (u < 0) u += 2.0 * std::numbers::pi;
        ang.push_back(u);
      }
    }
    if (ang.empty()) {
      arc_lo_ = 0.0;
      arc_len_ = 2.0 * std::numbers::pi;
    } else {
      std::sort(ang.begin(), ang.end());
      const size_t n = ang.size();
      std::vector<bool> ok(n);
      for (size_t i = 0; i < n; ++i) {
        const double lo = ang[i];
        const double hi = i + 1 < n ? ang[i + 1] : ang[0] + 2.0 * std::numbers::pi;
        const double mid = 0.5 * (lo + hi);
        Vec w(2);
        w << std::cos(mid), std::sin(mid);
        ok[i] = hi - lo > 1e-15 && feasible(w);
      }
      // The feasible pieces form one contiguous arc for a convex cone.
      size_t start = n;
      for (size_t i = 0; i < n; ++i)
        if (ok[i] && !ok[(i + n - 1) % n]) {
          start = i;
          break;
        }
      if (start == n && ok[0]) {
        arc_lo_ = 0.0;
        arc_len_ = 2.0 * std::numbers::pi;
      } else if (start < n) {
        arc_lo_ = ang[start];
        double len = 0.0;
        for (size_t t = 0; t < n && ok[(start + t) % n]; ++t) {
          const size_t i = (start + t) % n;
          const double hi = i + 1 < n ? ang[i + 1] : ang[0] + 2.0 * std::numbers::pi;
          len += hi - ang[i];
        }
        arc_len_ = len;
      }
    }
    measure_ = arc_len_;
    if (arc_len_ <= 0.0) kind_ = Kind::Empty;
    return;
  }
  kind_ = Kind::Indicator;
}

Vec ConeSampler::arc_point(double s) const {
  const double t = arc_lo_ + s;
  const Mat& b = cone_->span.frame();
  return std::cos(t) * b.col(0) + std::sin(t) * b.col(1);
}

Vec ConeSampler::draw(Rng& rng, double& weight) const {
  switch (kind_) {
    case Kind::Empty:
      weight = 0.0;
      return Vec::Zero(cone_->ambient_dim());
    case Kind::Atoms:
      if (atoms_.size() == 1) {
        weight = 1.0;
        return atoms_[0];
      }
      weight = double(atoms_.size());
      return atoms_[size_t(std::uniform_int_distribution<int>(0, int(atoms_.size()) - 1)(rng))];
    case Kind::Arc:
      weight = arc_len_;
      return arc_point(arc_len_ * uniform01(rng));
    case Kind::Indicator: {
      const Vec w = uniform_sphere(rng, m_);
      bool in = true;
      for (int r = 0; r < a_span_.rows() && in; ++r)
        if (a_span_.row(r).dot(w) > 0.0) in = false;
      weight = in ? omega(m_) : 0.0;
      return cone_->span.frame() * w;
    }
  }
  weight = 0.0;
  return Vec();
}

std::pair<Vec, MCEstimate> sample_cone_sphere(const NormalCone& cone, Rng& rng, std::uint64_t pilot) {
  const int m = cone.dim();
  if (m < 1) throw InputError("sample_cone_sphere: cone of dimension 0");
  ConeSampler s(cone);
  if (s.kind() == ConeSampler::Kind::Empty) throw InputError("sample_cone_sphere: empty cone");
  if (s.kind() != ConeSampler::Kind::Indicator) {
    double w = 0.0;
    Vec u = s.draw(rng, w);
    return {u, MCEstimate{s.exact_measure(), 0.0, 0, 0}};
  }
  const Mat& b = cone.span.frame();
  Mat a = cone.inequalities * b;
  auto inside = [&](const Vec& w) {
    for (int r = 0; r < a.rows(); ++r)
      if (a.row(r).dot(w) > 0.0) return false;
    return true;
  };
  std::uint64_t hits = 0;
  Vec first;
  for (std::uint64_t i = 0; i < pilot; ++i) {
    Vec w = uniform_sphere(rng, m);
    if (inside(w)) {
      if (hits == 0) first = w;
      ++hits;
    }
  }
  const double p = double(hits) / double(pilot);
  if (p < 1e-4) throw ThinConeError("sample_cone_sphere: acceptance rate below 1e-4");
  MCEstimate meas{omega(m) * p, omega(m) * std::sqrt(p * (1 - p) / double(pilot)), pilot, 0};
  Vec w;
  do {
    w = uniform_sphere(rng, m);
  } while (!inside(w));
  return {b * w, meas};
}

MCEstimate external_angle(const Polytope& p, int face_index, std::uint64_t seed, std::uint64_t samples) {
  const NormalCone& c = p.face(face_index).cone;
  const int m = c.dim();
  if (m == 0) return {1.0, 0.0, 0, seed};
  if (auto ex = cone_measure_exact(c)) return {*ex / omega(m), 0.0, 0, seed};
  MCEstimate e = cone_measure_mc(c, seed, samples);
  e.value /= omega(m);
  e.std_error /= omega(m);
  return e;
}

}  // namespace mixvol
