#pragma once

#include "mixvol/exterior_algebra.hpp"

#include <optional>
#include <string>

namespace mixvol {

// Polyhedral cone N(P,F) with apex at the origin.
struct NormalCone {
  Subspace span;                // lin(F)^perp, the linear span of the cone
  Mat inequalities;             // rows a with <a, w> <= 0 (ambient coordinates)
  std::vector<Vec> generators;  // outer normals of the facets containing F, +- aff(P)^perp
  bool pointed = true;

  int ambient_dim() const { return span.ambient_dim(); }
  int dim() const { return span.dim(); }
  bool contains(const Vec& w, double tol = 1e-9) const;
};

struct Facet {
  Vec normal;  // unit outer normal inside the direction space of aff(P)
  double offset = 0.0;
  std::vector<int> vertices;
};

struct Face {
  int dim = 0;
  std::vector<int> vertices;
  Subspace lin;  // direction space of aff(F)
  Vec centroid;
  double volume = 0.0;  // relative H^dim measure
  NormalCone cone;
};

struct HullOptions {
  bool allow_degenerate = false;  // accept point sets spanning a proper affine subspace
  double tol = 1e-9;              // relative to the diameter of the point set
};

class Polytope {
 public:
  Polytope() = default;

  static Polytope hull(const std::vector<Vec>& points, const HullOptions& opt = {}, std::string name = "");
  // Bounded intersection {x : A x <= b}; nullopt if empty or not full-dimensional.
  static std::optional<Polytope> from_halfspaces(const Mat& a, const Vec& b, double tol = 1e-9);

  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }
  int ambient_dim() const { return d_; }
  int dim() const { return e_; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  const std::vector<Facet>& facets() const { return facets_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Face& face(int i) const { return faces_[size_t(i)]; }
  // Indices into faces() of all faces of dimension j (j = dim() gives P itself).
  const std::vector<int>& faces_of_dim(int j) const;
  const Subspace& affine_directions() const { return aff_; }

  double volume() const;  // H^d, zero for lower-dimensional P
  double intrinsic_volume(int j) const;
  // gamma(F,P) = H^{d-1-j}(n(P,F)) / omega_{d-j}; exact when the cone has dimension <= 2.
  double external_angle(int face_index) const;
  double diameter() const;
  Vec bbox_lo() const;
  Vec bbox_hi() const;
  bool contains(const Vec& x, double tol = 1e-9) const;

  Polytope transformed(const Mat& m) const;
  Polytope translated(const Vec& x) const;
  Polytope scaled(double lambda) const;
  Polytope reflected() const { return scaled(-1.0); }

 private:
  void build_lattice(const std::vector<std::vector<int>>& facet_sets, double tol);

  std::string name_;
  int d_ = 0, e_ = 0;
  std::vector<Vec> vertices_;
  std::vector<Facet> facets_;
  std::vector<Face> faces_;
  std::vector<std::vector<int>> by_dim_;
  Subspace aff_;
  Vec base_point_;
};

Polytope minkowski_sum(const Polytope& p, const Polytope& q);
Polytope scaled_sum(const std::vector<double>& t, const std::vector<Polytope>& polys);
// V_d(t_1 P_1 + ... + t_k P_k) without building the face lattice.
double scaled_sum_volume(const std::vector<double>& t, const std::vector<Polytope>& polys);
// d-volume of conv(points) without building the face lattice.
double hull_volume(const std::vector<Vec>& points, double tol = 1e-9);
// Vertices of conv(points) (extreme points only), in input order.
std::vector<Vec> extreme_points(const std::vector<Vec>& points, double tol = 1e-9);

// H^{m-1} measure of n(P,F) where m = dim of the cone's span; nullopt if m >= 3.
std::optional<double> cone_measure_exact(const NormalCone& cone);
// Same by Monte Carlo for any dimension.
MCEstimate cone_measure_mc(const NormalCone& cone, std::uint64_t seed, std::uint64_t samples);

// Area-measure atoms of degree n: faces F in F_n(P) with weights H^n(F).
struct AreaAtom {
  int face = 0;
  double weight = 0.0;
  const NormalCone* cone = nullptr;
};
std::vector<AreaAtom> area_measure_atoms(const Polytope& p, int n);

// Built-in families.
Polytope unit_cube(int d);
Polytope unit_simplex(int d);
Polytope cross_polytope(int d);  // diamond in d = 2
Polytope unit_segment(int d, int axis);

}  // namespace mixvol
