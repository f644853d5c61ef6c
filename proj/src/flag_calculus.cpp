#include "mixvol/flag_calculus.hpp"

#include "mixvol/cones.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>

namespace mixvol {

namespace {

Subspace normal_complement(const Vec& u) {
  const Mat m = u;
  return Subspace::span(m).complement();
}

double face_measure(const Face& f) { return f.dim == 0 ? 1.0 : f.volume; }

// Sphere measure of n(P,F) used only to allocate samples.
double cone_mass(const NormalCone& cone, std::uint64_t seed) {
  if (auto ex = cone_measure_exact(cone)) return *ex;
  return cone_measure_mc(cone, seed, 4000).value;
}

// Index of the first cumulative weight above x·total.
size_t pick(const std::vector<double>& cum, Rng& rng) {
  const double x = uniform01(rng) * cum.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), x);
  return std::min(size_t(it - cum.begin()), cum.size() - 1);
}

// One body of a flag integral: atoms, samplers and the allocation law.
struct BodyDraw {
  FlagAtomSet set;
  std::vector<ConeSampler> samplers;
  std::vector<double> prob;
  std::vector<double> cum;

  BodyDraw(const Polytope& p, int n, std::uint64_t seed) : set(polytope_flag_atoms(p, n)) {
    std::vector<double> w;
    for (size_t i = 0; i < set.atoms.size(); ++i) {
      samplers.emplace_back(*set.atoms[i].cone);
      w.push_back(set.atoms[i].weight * cone_mass(*set.atoms[i].cone, derive_seed(seed, i)));
    }
    double tot = 0.0;
    for (double x : w) tot += x;
    if (!(tot > 0.0)) throw InputError("flag integral: body has no face of the requested dimension");
    // keep every atom reachable
    for (double& x : w) x = std::max(x, 1e-6 * tot);
    tot = 0.0;
    for (double x : w) tot += x;
    double c = 0.0;
    for (double x : w) {
      prob.push_back(x / tot);
      cum.push_back(c += x);
    }
  }

  // Draws (u, V) and returns γ·H·(cone weight)·⟨V,T⟩²/prob, or 0.
  double draw(Rng& rng, Vec& u, Subspace& v) const {
    const size_t i = pick(cum, rng);
    double w = 0.0;
    u = samplers[i].draw(rng, w);
    if (w == 0.0) return 0.0;
    v = uniform_subspace(u, set.flag_dim(), rng);
    const double t = subspace_product_sq(v, set.tangent(i, u));
    return set.gamma * set.atoms[i].weight * w * t / prob[i];
  }
};

std::vector<BodyDraw> body_draws(const std::vector<const Polytope*>& polys, const std::vector<int>& deg,
                                 std::uint64_t seed) {
  std::vector<BodyDraw> out;
  for (size_t i = 0; i < polys.size(); ++i) out.emplace_back(*polys[i], deg[i], derive_seed(seed, 0xa11c, i));
  return out;
}

// Σ over I_1,…,I_k of ∏a^i_{p(I_i)}·‖⋀ columns‖², bases[i] adapted with the first
// dims[i] columns spanning the argument; extra[i] (if any) appended after V_{I_i}.
double multiplier_sum(const std::vector<Mat>& bases, const std::vector<int>& dims, const std::vector<Vec>* extra,
                      const std::vector<std::vector<double>>& a) {
  const size_t k = bases.size();
  const int rows = int(bases[0].rows());
  int cols = 0;
  for (size_t i = 0; i < k; ++i) cols += dims[i] + (extra ? 1 : 0);
  std::vector<std::vector<std::vector<int>>> sets(k);
  std::vector<std::vector<double>> coef(k);
  for (size_t i = 0; i < k; ++i) {
    const int e = int(bases[i].cols());
    for (auto& s : k_subsets(e, dims[i])) {
      int p = 0;
      for (int x : s) p += (x >= dims[i]);
      if (p >= int(a[i].size())) throw InputError("multiplier: coefficient row too short");
      if (a[i][size_t(p)] == 0.0) continue;
      coef[i].push_back(a[i][size_t(p)]);
      sets[i].push_back(std::move(s));
    }
    if (sets[i].empty()) return 0.0;
  }
  Mat m(rows, cols);
  std::vector<size_t> idx(k, 0);
  double total = 0.0;
  while (true) {
    int c = 0;
    double w = 1.0;
    for (size_t i = 0; i < k; ++i) {
      for (int x : sets[i][idx[i]]) m.col(c++) = bases[i].col(x);
      if (extra) m.col(c++) = (*extra)[i];
      w *= coef[i][idx[i]];
    }
    total += w * wedge_norm_sq(m);
    size_t i = 0;
    while (i < k && ++idx[i] == sets[i].size()) idx[i++] = 0;
    if (i == k) break;
  }
  return total;
}

std::vector<Mat> adapted_bases(const std::vector<Vec>& u, const std::vector<Subspace>& w) {
  std::vector<Mat> b;
  for (size_t i = 0; i < u.size(); ++i) {
    if (w[i].ambient_dim() != u[i].size()) throw InputError("multiplier: subspace and normal differ in dimension");
    const Subspace perp = normal_complement(u[i]);
    if (!perp.contains(w[i], 1e-8)) throw InputError("multiplier: subspace is not orthogonal to its normal");
    b.push_back(adapted_basis(perp, w[i]));
  }
  return b;
}

std::vector<int> dims_of(const std::vector<Subspace>& w) {
  std::vector<int> d;
  for (const auto& s : w) d.push_back(s.dim());
  return d;
}

void check_pairs(const std::vector<Vec>& u, const std::vector<Subspace>& w, const std::vector<std::vector<double>>& a) {
  if (u.empty() || u.size() != w.size() || a.size() != u.size())
    throw InputError("multiplier: normals, subspaces and coefficients must have equal counts");
}

void finish(DMatrix& m) {
  const int s = m.size();
  const Mat inv = m.entries.inverse();
  m.a = inv.row(0).transpose();
  Vec e0 = Vec::Zero(s);
  e0[0] = 1.0;
  m.residual = (m.entries.transpose() * m.a - e0).cwiseAbs().maxCoeff();
}

}  // namespace

Subspace FlagAtomSet::tangent(size_t atom, const Vec& u) const {
  return tangent_subspace(u, atoms.at(atom).cone->span);
}

MCEstimate FlagAtomSet::integrate(const std::function<double(const Vec&, const Subspace&)>& g, std::uint64_t seed,
                                  std::uint64_t samples) const {
  if (!poly) throw InputError("flag atoms: no polytope");
  BodyDraw b(*poly, n, seed);
  return mc_mean(seed, samples, [&](Rng& rng) {
    Vec u;
    Subspace v;
    const double w = b.draw(rng, u, v);
    return w == 0.0 ? 0.0 : w * g(u, v);
  });
}

FlagAtomSet polytope_flag_atoms(const Polytope& p, int n) {
  const int d = p.ambient_dim();
  if (n < 0 || n > d - 1) throw InputError("flag atoms: degree out of range");
  FlagAtomSet s;
  s.d = d;
  s.n = n;
  s.gamma = gamma_const(d, n);
  s.poly = &p;
  for (int fi : p.faces_of_dim(n)) s.atoms.push_back({fi, face_measure(p.face(fi)), &p.face(fi).cone});
  return s;
}

// ---- D-matrices

bool has_closed_form_d_matrix(int d, int j) {
  if (d < 1 || j < 0 || j > d - 1) return false;
  return std::min(j, d - 1 - j) <= 1;
}

DMatrix closed_form_d_matrix(int d, int j) {
  if (!has_closed_form_d_matrix(d, j)) throw InputError("D-matrix: no closed form for this (d, j)");
  DMatrix m;
  m.d = d;
  m.j = j;
  m.exact = true;
  const int e = d - 1;
  if (j == 0 || j == e) {
    m.entries = Mat::Ones(1, 1);
  } else {
    // lines in R^e (the j = e−1 case is the same matrix by complements)
    const double den = double(e) * (e + 2);
    m.entries.resize(2, 2);
    m.entries << 3.0 / den, 1.0 / den, (e - 1.0) / den, (e + 1.0) / den;
  }
  m.sigma = Mat::Zero(m.size(), m.size());
  m.a_sigma = Vec::Zero(m.size());
  Eigen::JacobiSVD<Mat> svd(m.entries);
  m.condition = svd.singularValues()[0] / svd.singularValues()[m.size() - 1];
  finish(m);
  return m;
}

DMatrix estimate_d_matrix(int d, int j, std::uint64_t seed, std::uint64_t budget, double max_condition) {
  if (d < 3 || j < 1 || j > d - 2) throw InputError("estimate_d_matrix: need 1 <= j <= d-2");
  if (budget < 100) throw InputError("estimate_d_matrix: budget too small");
  const int e = d - 1;
  const int s = std::min(j, e - j) + 1;
  const Subspace whole = Subspace::whole(e);
  Mat x(budget, s), y(budget, s);
  const std::uint64_t chunks = (budget + kChunkSize - 1) / kChunkSize;
  parallel_chunks(chunks, default_threads(), [&](std::uint64_t c) {
    Rng rng(derive_seed(seed, c));
    const std::uint64_t lo = c * kChunkSize, hi = std::min(budget, lo + kChunkSize);
    for (std::uint64_t r = lo; r < hi; ++r) {
      const Subspace a = uniform_subspace_in(whole, j, rng);
      const Subspace b = uniform_subspace_in(whole, j, rng);
      const Subspace u = uniform_subspace_in(whole, j, rng);
      const auto f = graded_scalar_products(whole, a, b);
      const auto g = graded_scalar_products(whole, u, b);
      const double ua = subspace_product_sq(u, a);
      for (int q = 0; q < s; ++q) {
        x(Eigen::Index(r), q) = f[size_t(q)];
        y(Eigen::Index(r), q) = g[size_t(q)] * ua;
      }
    }
  });
  DMatrix m;
  m.d = d;
  m.j = j;
  m.seed = seed;
  m.samples = budget;
  Vec scale = x.colwise().norm().transpose();
  Eigen::JacobiSVD<Mat> svd(x * scale.cwiseInverse().asDiagonal());
  m.condition = svd.singularValues()[0] / svd.singularValues()[s - 1];
  if (!(m.condition <= max_condition))
    throw EstimationError("estimate_d_matrix: design condition " + std::to_string(m.condition) + " exceeds limit");
  const Mat xtx_inv = (x.transpose() * x).inverse();
  const Mat beta = xtx_inv * x.transpose() * y;  // column p = row p of D
  m.entries = beta.transpose();
  const Mat res = y - x * beta;
  // heteroscedasticity-robust covariance of vec(D), entry (p,q) at p*s+q
  Mat cov = Mat::Zero(s * s, s * s);
  for (int p = 0; p < s; ++p)
    for (int p2 = 0; p2 < s; ++p2) {
      Mat meat = Mat::Zero(s, s);
      for (Eigen::Index r = 0; r < x.rows(); ++r)
        meat.noalias() += res(r, p) * res(r, p2) * x.row(r).transpose() * x.row(r);
      cov.block(p * s, p2 * s, s, s) = xtx_inv * meat * xtx_inv;
    }
  m.sigma.resize(s, s);
  for (int p = 0; p < s; ++p)
    for (int q = 0; q < s; ++q) m.sigma(p, q) = std::sqrt(cov(p * s + q, p * s + q));
  finish(m);
  // δa_t = −Σ_{p,q} a_p (D^{-1})_{q,t} δD_{p,q}
  const Mat inv = m.entries.inverse();
  Mat jac(s, s * s);
  for (int t = 0; t < s; ++t)
    for (int p = 0; p < s; ++p)
      for (int q = 0; q < s; ++q) jac(t, p * s + q) = -m.a[p] * inv(q, t);
  m.a_sigma = (jac * cov * jac.transpose()).diagonal().cwiseMax(0.0).cwiseSqrt();
  return m;
}

double d_matrix_average_defect(const DMatrix& m) {
  const int e = m.d - 1;
  const double g = binom(e, m.j);
  double worst = 0.0;
  for (int p = 0; p < m.size(); ++p) {
    double lhs = 0.0;
    for (int q = 0; q < m.size(); ++q) lhs += m.entries(p, q) * binom(m.j, q) * binom(e - m.j, q) / g;
    worst = std::max(worst, std::abs(lhs - binom(m.j, p) * binom(e - m.j, p) / g / g));
  }
  return worst;
}

namespace {

nlohmann::json to_json(const DMatrix& m) {
  auto rows = [](const Mat& a) {
    std::vector<double> v;
    for (int r = 0; r < a.rows(); ++r)
      for (int c = 0; c < a.cols(); ++c) v.push_back(a(r, c));
    return v;
  };
  return {{"d", m.d},
          {"j", m.j},
          {"size", m.size()},
          {"entries", rows(m.entries)},
          {"sigma", rows(m.sigma)},
          {"a", std::vector<double>(m.a.data(), m.a.data() + m.a.size())},
          {"a_sigma", std::vector<double>(m.a_sigma.data(), m.a_sigma.data() + m.a_sigma.size())},
          {"condition", m.condition},
          {"seed", m.seed},
          {"samples", m.samples},
          {"exact", m.exact}};
}

DMatrix from_json(const nlohmann::json& js) {
  DMatrix m;
  m.d = js.at("d").get<int>();
  m.j = js.at("j").get<int>();
  const int s = js.at("size").get<int>();
  const auto e = js.at("entries").get<std::vector<double>>();
  const auto sg = js.at("sigma").get<std::vector<double>>();
  if (s < 1 || e.size() != size_t(s * s) || sg.size() != e.size()) throw InputError("D-matrix cache: malformed entry");
  m.entries.resize(s, s);
  m.sigma.resize(s, s);
  for (int r = 0; r < s; ++r)
    for (int c = 0; c < s; ++c) {
      m.entries(r, c) = e[size_t(r * s + c)];
      m.sigma(r, c) = sg[size_t(r * s + c)];
    }
  const auto as = js.at("a_sigma").get<std::vector<double>>();
  m.a_sigma = Eigen::Map<const Vec>(as.data(), Eigen::Index(as.size()));
  m.condition = js.at("condition").get<double>();
  m.seed = js.at("seed").get<std::uint64_t>();
  m.samples = js.at("samples").get<std::uint64_t>();
  m.exact = js.at("exact").get<bool>();
  finish(m);
  return m;
}

}  // namespace

DMatrixCache::DMatrixCache(DMatrixPolicy policy) : policy_(std::move(policy)) { load(); }

void DMatrixCache::load() {
  if (policy_.path.empty()) return;
  std::ifstream in(policy_.path);
  if (!in) return;
  nlohmann::json js;
  try {
    in >> js;
    for (const auto& e : js.at("matrices")) {
      DMatrix m = from_json(e);
      store_[{m.d, m.j}] = std::move(m);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("D-matrix cache: ") + ex.what());
  }
}

void DMatrixCache::save() const {
  if (policy_.path.empty()) return;
  nlohmann::json js;
  js["schema"] = 1;
  js["matrices"] = nlohmann::json::array();
  {
    std::lock_guard<std::mutex> lk(mu_);
    for (const auto& [key, m] : store_) js["matrices"].push_back(to_json(m));
  }
  std::ofstream out(policy_.path);
  if (!out) throw InputError("D-matrix cache: cannot write " + policy_.path);
  out << js.dump(2) << '\n';
}

const DMatrix& DMatrixCache::get(int d, int j) {
  const bool closed = has_closed_form_d_matrix(d, j) && (policy_.prefer_closed_form || j == 0 || j == d - 1);
  {
    std::lock_guard<std::mutex> lk(mu_);
    if (closed) {
      auto it = closed_.find({d, j});
      if (it == closed_.end()) it = closed_.emplace(std::make_pair(d, j), closed_form_d_matrix(d, j)).first;
      return it->second;
    }
    auto it = store_.find({d, j});
    if (it != store_.end()) return it->second;
  }
  DMatrix m = estimate_d_matrix(d, j, derive_seed(policy_.seed, std::uint64_t(d), std::uint64_t(j)), policy_.budget,
                                 policy_.max_condition);
  {
    std::lock_guard<std::mutex> lk(mu_);
    if (!store_.emplace(std::make_pair(d, j), std::move(m)).second) return store_.at({d, j});
  }
  save();
  std::lock_guard<std::mutex> lk(mu_);
  return store_.at({d, j});
}

DMatrixCache& default_d_matrices() {
  static DMatrixCache cache;
  return cache;
}

std::vector<std::vector<double>> multiplier_coefficients(int d, const std::vector<int>& dims, DMatrixCache& cache) {
  std::vector<std::vector<double>> a;
  for (int j : dims) {
    if (j < 0 || j > d - 1) throw InputError("multiplier: subspace dimension out of range");
    const Vec& v = cache.get(d, j).a;
    a.emplace_back(v.data(), v.data() + v.size());
  }
  return a;
}

// ---- Φ and Ψ

double phi_kernel(const std::vector<Vec>& u, const std::vector<Subspace>& w, const std::vector<std::vector<double>>& a) {
  check_pairs(u, w, a);
  const int d = int(u[0].size());
  const auto dims = dims_of(w);
  int sum = 0;
  for (int x : dims) sum += x;
  if (sum != d) throw InputError("phi_kernel: subspace dimensions must sum to d");
  return multiplier_sum(adapted_bases(u, w), dims, nullptr, a);
}

double psi_kernel(const std::vector<Vec>& u, const std::vector<Subspace>& U, const std::vector<std::vector<double>>& a) {
  check_pairs(u, U, a);
  const int d = int(u[0].size());
  const auto dims = dims_of(U);
  int cols = 0;
  for (int x : dims) cols += x + 1;
  if (cols > d) throw InputError("psi_kernel: too many vectors for the wedge");
  return multiplier_sum(adapted_bases(u, U), dims, &u, a);
}

double phi_multiplier(const std::vector<int>& n, const std::vector<Vec>& u, const std::vector<Subspace>& v,
                      const std::vector<std::vector<double>>& a) {
  if (n.size() != u.size()) throw InputError("phi_multiplier: degree count mismatch");
  const int d = int(u[0].size());
  std::vector<Subspace> w;
  double c = 1.0;
  for (size_t i = 0; i < u.size(); ++i) {
    if (v[i].dim() != d - 1 - n[i]) throw InputError("phi_multiplier: flag subspace has the wrong dimension");
    w.push_back(v[i].complement_within(normal_complement(u[i])));
    c *= gamma_const(d, n[i]);
  }
  return phi_kernel(u, w, a) / c;
}

double psi_multiplier(const std::vector<int>& r, const std::vector<Vec>& u, const std::vector<Subspace>& v,
                      const std::vector<std::vector<double>>& a) {
  if (r.size() != u.size()) throw InputError("psi_multiplier: degree count mismatch");
  const int d = int(u[0].size());
  double c = 1.0;
  for (size_t i = 0; i < u.size(); ++i) {
    if (v[i].dim() != d - 1 - r[i]) throw InputError("psi_multiplier: flag subspace has the wrong dimension");
    c *= gamma_const(d, r[i]);
  }
  return psi_kernel(u, v, a) / c;
}

// ---- Lemma 3 / Lemma 5 checks

IdentityReport verify_multiplier_identity(int lemma, int d, const std::vector<int>& degrees, std::uint64_t seed,
                                          int trials, std::uint64_t samples, DMatrixCache& cache) {
  if (lemma != 3 && lemma != 5) throw InputError("verify_multiplier_identity: lemma must be 3 or 5");
  const int k = int(degrees.size());
  if (k < 2) throw InputError("verify_multiplier_identity: need k >= 2");
  IdentityReport rep;
  rep.lemma = lemma;
  rep.d = d;
  rep.degrees = degrees;
  std::vector<int> dims;  // dimension of U_i inside u_i^⊥
  int sum = 0;
  for (int x : degrees) sum += x;
  if (lemma == 3) {
    KernelSpec::mixed(d, degrees).validate();
    dims = degrees;
  } else {
    KernelSpec::translative(d, degrees).validate();
    rep.j = sum - (k - 1) * d;
    for (int r : degrees) dims.push_back(d - 1 - r);
  }
  const bool fused = lemma == 5 && rep.j > 0;
  std::vector<int> all = dims;
  if (fused) all.push_back(rep.j - 1);
  const auto a = multiplier_coefficients(d, all, cache);
  rep.deterministic = !fused;
  for (int x : dims) rep.deterministic = rep.deterministic && (x == 0 || x == d - 1);

  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, 0x1d, std::uint64_t(t)));
    std::vector<Vec> u;
    std::vector<Subspace> A;
    for (int i = 0; i < k; ++i) {
      u.push_back(uniform_sphere(rng, d));
      A.push_back(uniform_subspace(u.back(), dims[size_t(i)], rng));
    }
    std::vector<Vec> cols;
    for (int i = 0; i < k; ++i) {
      for (int c = 0; c < A[size_t(i)].dim(); ++c) cols.push_back(A[size_t(i)].frame().col(c));
      if (lemma == 5) cols.push_back(u[size_t(i)]);
    }
    IdentityTrial tr;
    tr.target = wedge_norm_sq(cols);
    auto sample = [&](Rng& r) {
      std::vector<Subspace> U;
      double w = 1.0;
      for (int i = 0; i < k; ++i) {
        U.push_back(uniform_subspace(u[size_t(i)], dims[size_t(i)], r));
        w *= subspace_product_sq(U.back(), A[size_t(i)]);
      }
      if (lemma == 3) return w * phi_kernel(u, U, a);
      if (!fused) return w * psi_kernel(u, U, a);
      std::vector<Vec> u2 = u;
      u2.push_back(uniform_sphere(r, d));
      const Subspace a_extra = uniform_subspace(u2.back(), rep.j - 1, r);
      U.push_back(uniform_subspace(u2.back(), rep.j - 1, r));
      w *= subspace_product_sq(U.back(), a_extra);
      return binom(d, rep.j) * w * psi_kernel(u2, U, a);
    };
    if (rep.deterministic) {
      Rng r(derive_seed(seed, 0x2d, std::uint64_t(t)));
      tr.mc = sample(r);
    } else {
      const MCEstimate e = mc_mean(derive_seed(seed, 0x3d, std::uint64_t(t)), samples, sample);
      tr.mc = e.value;
      tr.std_error = e.std_error;
    }
    const double err = tr.mc - tr.target;
    if (tr.std_error > 0.0)
      tr.z = err / tr.std_error;
    else if (std::abs(err) > 1e-12)
      tr.z = std::copysign(std::numeric_limits<double>::infinity(), err);
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(tr.z));
    rep.max_abs_error = std::max(rep.max_abs_error, std::abs(err));
    rep.trials.push_back(tr);
  }
  if (rep.deterministic) rep.max_abs_z = 0.0;
  return rep;
}

// ---- flag representations

namespace {

template <class Integrand>
MCEstimate flag_integral(const std::vector<const Polytope*>& polys, const std::vector<int>& deg, const FlagOptions& opt,
                         Integrand&& f) {
  const auto bodies = body_draws(polys, deg, opt.seed);
  const size_t k = polys.size();
  return mc_mean(opt.seed, opt.samples, [&](Rng& rng) {
    std::vector<Vec> u(k);
    std::vector<Subspace> v(k);
    double w = 1.0;
    for (size_t i = 0; i < k; ++i) {
      w *= bodies[i].draw(rng, u[i], v[i]);
      if (w == 0.0) return 0.0;
    }
    return w * f(u, v, rng);
  });
}

void check_bodies(const std::vector<const Polytope*>& polys, const std::vector<int>& deg, const char* what) {
  if (polys.empty() || polys.size() != deg.size())
    throw InputError(std::string(what) + ": degree count does not match polytope count");
  for (const auto* p : polys)
    if (p->ambient_dim() != polys[0]->ambient_dim()) throw InputError(std::string(what) + ": dimension mismatch");
}

}  // namespace

MCEstimate flag_mixed_volume(const std::vector<const Polytope*>& polys, const std::vector<int>& n,
                             const FlagOptions& opt) {
  check_bodies(polys, n, "flag_mixed_volume");
  const int d = polys[0]->ambient_dim();
  const Kernel ker(KernelSpec::mixed(d, n, opt.epsilon), opt.quad);
  if (opt.epsilon == 0.0 && opt.require_general_position &&
      !general_position(polys, n, PositionMode::MixedVolume))
    throw DivergenceError("flag_mixed_volume: bodies are not in general position; use an epsilon cutoff");
  DMatrixCache& cache = opt.cache ? *opt.cache : default_d_matrices();
  const auto a = multiplier_coefficients(d, n, cache);
  MCEstimate e = flag_integral(polys, n, opt, [&](const std::vector<Vec>& u, const std::vector<Subspace>& v, Rng& rng) {
    const double m = phi_multiplier(n, u, v, a);
    if (m == 0.0) return 0.0;
    return m * ker.evaluate(u, &rng).value;
  });
  const double mult = multinomial(d, n);
  e.value /= mult;
  e.std_error /= mult;
  return e;
}

MCEstimate flag_mixed_functional(const std::vector<const Polytope*>& polys, const std::vector<int>& r,
                                 const FlagOptions& opt) {
  check_bodies(polys, r, "flag_mixed_functional");
  const int d = polys[0]->ambient_dim();
  const Kernel ker(KernelSpec::translative(d, r, opt.epsilon), opt.quad);
  if (opt.epsilon == 0.0 && opt.require_general_position &&
      !general_position(polys, r, PositionMode::Translative))
    throw DivergenceError("flag_mixed_functional: bodies are not in general position; use an epsilon cutoff");
  DMatrixCache& cache = opt.cache ? *opt.cache : default_d_matrices();
  std::vector<int> dims;
  for (int x : r) dims.push_back(d - 1 - x);
  const auto a = multiplier_coefficients(d, dims, cache);
  return flag_integral(polys, r, opt, [&](const std::vector<Vec>& u, const std::vector<Subspace>& v, Rng& rng) {
    const double m = psi_multiplier(r, u, v, a);
    if (m == 0.0) return 0.0;
    return m * ker.evaluate(u, &rng).value;
  });
}

}  // namespace mixvol
