#include "mixvol/mixed_volume.hpp"

#include <algorithm>

namespace mixvol {

double MixedVolumeTable::at(const std::vector<int>& n) const {
  auto it = values.find(n);
  if (it == values.end()) throw InputError("mixed volume table: no entry for the requested degrees");
  return it->second;
}

std::vector<std::vector<int>> compositions(int d, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<size_t>(k), 0);
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == k - 1) {
      cur[size_t(i)] = left;
      out.push_back(cur);
      return;
    }
    for (int a = left; a >= 0; --a) {
      cur[size_t(i)] = a;
      self(self, i + 1, left - a);
    }
  };
  if (k > 0) rec(rec, 0, d);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

double monomial(const std::vector<double>& t, const std::vector<int>& a) {
  double r = 1.0;
  for (size_t i = 0; i < t.size(); ++i) r *= ipow(t[i], a[i]);
  return r;
}

double face_volume(const Face& f) { return f.dim == 0 ? 1.0 : f.volume; }

// Calls body(indices) for every tuple in the product of the lists.
template <class B>
void for_each_tuple(const std::vector<const std::vector<int>*>& lists, B&& body) {
  const size_t k = lists.size();
  for (const auto* l : lists)
    if (l->empty()) return;
  std::vector<size_t> idx(k, 0);
  std::vector<int> faces(k);
  while (true) {
    for (size_t i = 0; i < k; ++i) faces[i] = (*lists[i])[idx[i]];
    body(faces);
    size_t i = 0;
    while (i < k && ++idx[i] == lists[i]->size()) idx[i++] = 0;
    if (i == k) break;
  }
}

std::vector<const std::vector<int>*> face_lists(const std::vector<const Polytope*>& polys, const std::vector<int>& n) {
  if (polys.size() != n.size()) throw InputError("mixed volume: degree count does not match polytope count");
  if (polys.empty()) throw InputError("mixed volume: no polytopes");
  const int d = polys[0]->ambient_dim();
  int s = 0;
  for (size_t i = 0; i < n.size(); ++i) {
    if (polys[i]->ambient_dim() != d) throw InputError("mixed volume: dimension mismatch");
    if (n[i] < 0 || n[i] > d) throw InputError("mixed volume: degree out of range");
    s += n[i];
  }
  if (s != d) throw InputError("mixed volume: degrees must sum to d");
  std::vector<const std::vector<int>*> lists;
  for (size_t i = 0; i < n.size(); ++i) lists.push_back(&polys[i]->faces_of_dim(n[i]));
  return lists;
}

std::vector<const Face*> tuple_faces(const std::vector<const Polytope*>& polys, const std::vector<int>& faces) {
  std::vector<const Face*> f;
  for (size_t i = 0; i < polys.size(); ++i) f.push_back(&polys[i]->face(faces[i]));
  return f;
}

// [F]·∫⋯∫ F_n over ∏ n(P_i,F_i) for one tuple.
MCEstimate cone_quadrature(const std::vector<const Face*>& faces, const Kernel& ker, double bracket, std::uint64_t seed,
                           std::uint64_t samples) {
  const size_t k = faces.size();
  std::vector<ConeSampler> s;
  bool atomic = true;
  for (const auto* f : faces) {
    s.emplace_back(f->cone);
    if (s.back().kind() == ConeSampler::Kind::Empty) return {0.0, 0.0, 0, seed};
    atomic = atomic && s.back().kind() == ConeSampler::Kind::Atoms;
  }
  if (atomic) {
    // finite sum over all atom combinations
    std::vector<const std::vector<int>*> dummy;
    std::vector<std::vector<int>> ids(k);
    for (size_t i = 0; i < k; ++i)
      for (int a = 0; a < int(s[i].atoms().size()); ++a) ids[i].push_back(a);
    for (auto& v : ids) dummy.push_back(&v);
    double total = 0.0;
    std::vector<Vec> u(k);
    for_each_tuple(dummy, [&](const std::vector<int>& pick) {
      for (size_t i = 0; i < k; ++i) u[i] = s[i].atoms()[size_t(pick[i])];
      total += ker(u);
    });
    return {bracket * total, 0.0, 1, seed};
  }
  int arcs = 0;
  size_t arc = 0;
  for (size_t i = 0; i < k; ++i)
    if (s[i].kind() == ConeSampler::Kind::Arc) {
      ++arcs;
      arc = i;
    } else if (s[i].kind() != ConeSampler::Kind::Atoms) {
      arcs = -1;
      break;
    }
  if (arcs == 1) {
    // One arc, the rest atoms: jittered strata along the arc, every atom combination
    // at each point. F_n peaks sharply where the arc passes close to an atom, and plain
    // sampling then underreports its error; the error bar here comes from independent
    // replicates.
    constexpr std::uint64_t kReplicates = 32;
    const std::uint64_t m = std::max<std::uint64_t>(1, (samples + kReplicates - 1) / kReplicates);
    std::vector<std::vector<Vec>> combos(1);
    for (size_t i = 0; i < k; ++i) {
      std::vector<std::vector<Vec>> next;
      for (const auto& c : combos) {
        if (i == arc) {
          next.push_back(c);
          next.back().push_back(Vec());
          continue;
        }
        for (const auto& a : s[i].atoms()) {
          next.push_back(c);
          next.back().push_back(a);
        }
      }
      combos = std::move(next);
    }
    const double len = s[arc].arc_length();
    std::vector<double> rep(kReplicates, 0.0);
    parallel_chunks(kReplicates, default_threads(), [&](std::uint64_t r) {
      Rng rng(derive_seed(seed, 0x57a7, r));
      auto local = combos;
      double sum = 0.0;
      for (std::uint64_t i = 0; i < m; ++i) {
        const Vec p = s[arc].arc_point(len * (double(i) + uniform01(rng)) / double(m));
        for (auto& u : local) {
          u[arc] = p;
          sum += ker.evaluate(u, &rng).value;
        }
      }
      rep[r] = len * sum / double(m);
    });
    Accumulator acc;
    for (double x : rep) acc.add(x);
    return {bracket * acc.mean, bracket * acc.std_error(), m * kReplicates, seed};
  }
  MCEstimate e = mc_mean(seed, samples, [&](Rng& rng) {
    std::vector<Vec> u(k);
    double w = 1.0;
    for (size_t i = 0; i < k; ++i) {
      double wi = 0.0;
      u[i] = s[i].draw(rng, wi);
      w *= wi;
    }
    if (w == 0.0) return 0.0;
    return w * ker.evaluate(u, &rng).value;
  });
  e.value *= bracket;
  e.std_error *= bracket;
  return e;
}

}  // namespace

MixedVolumeTable oracle_mixed_volumes(const std::vector<Polytope>& polys, double max_condition) {
  if (polys.empty()) throw InputError("oracle: no polytopes");
  const int d = polys[0].ambient_dim();
  const int k = int(polys.size());
  const auto comps = compositions(d, k);
  const int m = int(comps.size());

  std::vector<std::vector<double>> grid;
  std::vector<double> t(static_cast<size_t>(k), 1.0);
  while (true) {
    grid.push_back(t);
    int i = 0;
    while (i < k && (t[size_t(i)] += 1.0) > d + 1) t[size_t(i++)] = 1.0;
    if (i == k) break;
  }
  const int rows = int(grid.size());
  Mat a(rows, m);
  Vec b(rows);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < m; ++c) a(r, c) = monomial(grid[size_t(r)], comps[size_t(c)]);
    b[r] = scaled_sum_volume(grid[size_t(r)], polys);
  }
  Vec scale(m);
  for (int c = 0; c < m; ++c) {
    scale[c] = a.col(c).norm();
    a.col(c) /= scale[c];
  }
  Eigen::JacobiSVD<Mat> svd(a);
  const Vec sv = svd.singularValues();
  MixedVolumeTable out;
  out.d = d;
  out.route = "oracle";
  out.condition = sv[0] / sv[sv.size() - 1];
  if (!(out.condition <= max_condition))
    throw EstimationError("oracle: ill-conditioned polynomial fit (condition " + std::to_string(out.condition) + ")");
  const Vec x = a.colPivHouseholderQr().solve(b);
  const double bmax = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  out.residual = (a * x - b).cwiseAbs().maxCoeff() / bmax;
  Vec coef = x.cwiseQuotient(scale);
  for (int c = 0; c < m; ++c) out.values[comps[size_t(c)]] = coef[c] / multinomial(d, comps[size_t(c)]);

  // off-grid check
  for (int h = 0; h < 4; ++h) {
    std::vector<double> th(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
      const double f = std::fmod(0.6180339887 * (h + 1) * (i + 2), 1.0);
      th[size_t(i)] = 0.4 + 2.0 * f;
    }
    double p = 0.0;
    for (int c = 0; c < m; ++c) p += coef[c] * monomial(th, comps[size_t(c)]);
    const double v = scaled_sum_volume(th, polys);
    out.holdout = std::max(out.holdout, std::abs(p - v) / std::max(std::abs(v), 1e-300));
  }
  return out;
}

double oracle_mixed_volume(const std::vector<Polytope>& polys, const std::vector<int>& n) {
  return oracle_mixed_volumes(polys).at(n);
}

double face_bracket(const std::vector<const Face*>& faces) {
  std::vector<Subspace> subs;
  for (const auto* f : faces)
    if (f->dim > 0) subs.push_back(f->lin);
  if (subs.empty()) return 1.0;
  return subspace_determinant(subs);
}

SchneiderResult schneider_mixed_volume(const std::vector<const Polytope*>& polys, const std::vector<int>& n, Rng& rng,
                                       const AdmissibleOptions& opt) {
  const auto lists = face_lists(polys, n);
  const int d = polys[0]->ambient_dim();
  SchneiderResult res;
  res.shifts = random_admissible(polys, rng, opt);
  double sum = 0.0;
  for_each_tuple(lists, [&](const std::vector<int>& faces) {
    const auto f = tuple_faces(polys, faces);
    const double br = face_bracket(f);
    if (br <= 1e-9) return;  // dim(F_1 + ... + F_k) < d
    std::vector<ShiftedCone> sc;
    for (size_t i = 0; i < f.size(); ++i) sc.push_back({&f[i]->cone, res.shifts[i]});
    if (!cones_intersect(sc)) return;
    double w = br;
    for (const auto* fi : f) w *= face_volume(*fi);
    sum += w;
    ++res.tuples;
  });
  res.value = sum / multinomial(d, n);
  return res;
}

MCEstimate mixed_exterior_angle(const std::vector<const Polytope*>& polys, const std::vector<int>& faces,
                                const std::vector<int>& n, AngleRoute route, const AngleOptions& opt) {
  face_lists(polys, n);
  const int d = polys[0]->ambient_dim();
  const int k = int(polys.size());
  if (int(faces.size()) != k) throw InputError("mixed_exterior_angle: face count mismatch");
  for (int i = 0; i < k; ++i)
    if (polys[size_t(i)]->face(faces[size_t(i)]).dim != n[size_t(i)])
      throw InputError("mixed_exterior_angle: face dimension does not match degree");
  const auto f = tuple_faces(polys, faces);
  if (route == AngleRoute::ConeQuadrature) {
    const double br = face_bracket(f);
    if (br <= 1e-12) return {0.0, 0.0, 0, opt.seed};
    const Kernel ker(KernelSpec::mixed(d, n, opt.epsilon), opt.quad);
    return cone_quadrature(f, ker, br, opt.seed, opt.samples);
  }
  return mc_mean(opt.seed, opt.samples, [&](Rng& rng) {
    const auto x = uniform_diagonal_complement(d, k, rng);
    std::vector<ShiftedCone> sc;
    for (int i = 0; i < k; ++i) sc.push_back({&f[size_t(i)]->cone, x[size_t(i)]});
    return cones_intersect(sc) ? 1.0 : 0.0;
  });
}

std::vector<TupleTerm> mixed_angle_terms(const std::vector<const Polytope*>& polys, const std::vector<int>& n,
                                         const AngleOptions& opt) {
  const auto lists = face_lists(polys, n);
  const int d = polys[0]->ambient_dim();
  const Kernel ker(KernelSpec::mixed(d, n, opt.epsilon), opt.quad);
  std::vector<TupleTerm> terms;
  std::uint64_t index = 0;
  for_each_tuple(lists, [&](const std::vector<int>& faces) {
    const std::uint64_t id = index++;
    const auto f = tuple_faces(polys, faces);
    const double br = face_bracket(f);
    if (br <= 1e-12) return;
    TupleTerm t;
    t.faces = faces;
    t.bracket = br;
    t.volume = 1.0;
    for (const auto* fi : f) t.volume *= face_volume(*fi);
    t.beta = cone_quadrature(f, ker, br, derive_seed(opt.seed, id), opt.samples);
    terms.push_back(std::move(t));
  });
  return terms;
}

MCEstimate angle_mixed_volume(const std::vector<const Polytope*>& polys, const std::vector<int>& n,
                              const AngleOptions& opt) {
  const auto terms = mixed_angle_terms(polys, n, opt);
  const double m = multinomial(polys[0]->ambient_dim(), n);
  double v = 0.0, var = 0.0;
  std::uint64_t samples = 0;
  for (const auto& t : terms) {
    v += t.weight() * t.beta.value;
    var += std::pow(t.weight() * t.beta.std_error, 2);
    samples += t.beta.samples;
  }
  return {v / m, std::sqrt(var) / m, samples, opt.seed};
}

MCEstimate epsilon_mixed_volume(const std::vector<const Polytope*>& polys, const std::vector<int>& n, double eps,
                                AngleOptions opt) {
  if (!(eps > 0.0)) throw InputError("epsilon_mixed_volume: epsilon must be positive");
  opt.epsilon = eps;
  return angle_mixed_volume(polys, n, opt);
}

}  // namespace mixvol
