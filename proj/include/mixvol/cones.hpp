#pragma once

#include "mixvol/polytope.hpp"

namespace mixvol {

struct ShiftedCone {
  const NormalCone* cone = nullptr;
  Vec shift;  // the set is N - shift
};

// Is there z with z + x_i in N_i for all i? Phase-1 LP.
bool cones_intersect(const std::vector<ShiftedCone>& shifted, double tol = 1e-9);
// Largest t such that some z satisfies every cone inequality with slack t (capped at 1).
double cones_intersect_margin(const std::vector<ShiftedCone>& shifted);

// Uniform x on L^perp ∩ S^{kd-1} (L the diagonal of (R^d)^k).
std::vector<Vec> uniform_diagonal_complement(int d, int k, Rng& rng);

struct AdmissibleOptions {
  bool verify = false;
  double margin = 1e-7;
  int max_resample = 50;
};
// Random admissible shift tuple for the polytopes.
std::vector<Vec> random_admissible(const std::vector<const Polytope*>& polys, Rng& rng, const AdmissibleOptions& opt = {});
// False if some face tuple with total face dimension > d has cones meeting within `margin`.
bool verify_admissible(const std::vector<const Polytope*>& polys, const std::vector<Vec>& x, double margin = 1e-7);

enum class PositionMode { MixedVolume, Translative };
bool general_position(const std::vector<const Polytope*>& polys, const std::vector<int>& degrees, PositionMode mode);
// Mode n check for one tuple of cones: do they meet only at 0?
bool cones_meet_trivially(const std::vector<const NormalCone*>& cones);
// Mode r check for one tuple: no w_i in N_i, not all zero, with sum w_i = 0.
bool cones_hull_avoids_origin(const std::vector<const NormalCone*>& cones);

// Weighted sampler for H^{m-1} on n(P,F) = N ∩ S^{d-1}, m = dim span(N).
// E[weight * f(u)] = integral of f over n(P,F).
class ConeSampler {
 public:
  enum class Kind { Empty, Atoms, Arc, Indicator };
  explicit ConeSampler(const NormalCone& cone);

  Kind kind() const { return kind_; }
  int dim() const { return m_; }
  const std::vector<Vec>& atoms() const { return atoms_; }
  // Exact measure for atoms and arcs, NaN otherwise.
  double exact_measure() const { return measure_; }
  double arc_length() const { return arc_len_; }
  Vec arc_point(double s) const;  // s in [0, arc_length()]
  Vec draw(Rng& rng, double& weight) const;
  bool deterministic() const { return kind_ == Kind::Empty || (kind_ == Kind::Atoms && atoms_.size() == 1); }

 private:
  const NormalCone* cone_;
  Kind kind_ = Kind::Empty;
  int m_ = 0;
  std::vector<Vec> atoms_;
  double measure_ = std::nan("");
  double arc_lo_ = 0.0, arc_len_ = 0.0;
  Mat a_span_;  // inequalities in span coordinates
};

// Rejection sample of n(P,F) plus an estimate of its H^{m-1} measure.
std::pair<Vec, MCEstimate> sample_cone_sphere(const NormalCone& cone, Rng& rng, std::uint64_t pilot = 20000);

MCEstimate external_angle(const Polytope& p, int face_index, std::uint64_t seed, std::uint64_t samples = 200000);

}  // namespace mixvol
