#pragma once

#include "mixvol/cones.hpp"
#include "mixvol/kernels.hpp"
#include "mixvol/polytope.hpp"

#include <map>

namespace mixvol {

// Mixed volumes V(K_1[n_1],…,K_k[n_k]) keyed by the multidegree. Every route in
// this header returns the mixed volume itself, with the multinomial divided out.
struct MixedVolumeTable {
  int d = 0;
  std::map<std::vector<int>, double> values;
  std::string route;
  double residual = 0.0;   // max |fit − data| / max |data|
  double condition = 0.0;  // of the column-scaled design matrix
  double holdout = 0.0;    // max relative error at off-grid t

  double at(const std::vector<int>& n) const;
};

// All compositions of d into k nonnegative parts, lexicographic.
std::vector<std::vector<int>> compositions(int d, int k);

// Fits V_d(Σ t_i K_i) on the grid {1,…,d+1}^k. Throws EstimationError if the
// fit is ill-conditioned (condition > max_condition).
MixedVolumeTable oracle_mixed_volumes(const std::vector<Polytope>& polys, double max_condition = 1e12);
double oracle_mixed_volume(const std::vector<Polytope>& polys, const std::vector<int>& n);

// [F_1,…,F_k]: volume of the parallelepiped spanned by unit cubes of lin(F_i).
double face_bracket(const std::vector<const Face*>& faces);

struct SchneiderResult {
  double value = 0.0;
  std::vector<Vec> shifts;
  int tuples = 0;  // face tuples that passed the selection rule
};
SchneiderResult schneider_mixed_volume(const std::vector<const Polytope*>& polys, const std::vector<int>& n, Rng& rng,
                                       const AdmissibleOptions& opt = {});

enum class AngleRoute { ConeQuadrature, AdmissibleMC };

struct AngleOptions {
  std::uint64_t seed = 0;
  std::uint64_t samples = 100000;  // per face tuple with a non-atomic cone
  double epsilon = 0.0;
  QuadratureOptions quad;
};

// β(F_1,…,F_k; P_1,…,P_k) ∈ [0,1], including the bracket [F_1,…,F_k].
MCEstimate mixed_exterior_angle(const std::vector<const Polytope*>& polys, const std::vector<int>& faces,
                                const std::vector<int>& n, AngleRoute route, const AngleOptions& opt = {});

struct TupleTerm {
  std::vector<int> faces;
  double bracket = 0.0;
  double volume = 0.0;  // ∏ V_{n_i}(F_i)
  MCEstimate beta;      // already carries one factor of the bracket
  double weight() const { return bracket * volume; }
};
// β over every face tuple of the given degrees with nonzero bracket.
std::vector<TupleTerm> mixed_angle_terms(const std::vector<const Polytope*>& polys, const std::vector<int>& n,
                                         const AngleOptions& opt = {});

MCEstimate angle_mixed_volume(const std::vector<const Polytope*>& polys, const std::vector<int>& n,
                              const AngleOptions& opt = {});
// Same sum with the cutoff kernel F^{(ε)}.
MCEstimate epsilon_mixed_volume(const std::vector<const Polytope*>& polys, const std::vector<int>& n, double eps,
                                AngleOptions opt = {});

}  // namespace mixvol
