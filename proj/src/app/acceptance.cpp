#include "mixvol/app.hpp"

#include <algorithm>
#include <cstdarg>
#include <cstdio>
#include <numeric>

namespace mixvol::app {

namespace {

std::vector<const Polytope*> ptrs(const std::vector<Polytope>& p) {
  std::vector<const Polytope*> out;
  for (const auto& q : p) out.push_back(&q);
  return out;
}

std::string format(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

Mat rotation2(double t) {
  Mat r(2, 2);
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

Polytope square() { return unit_cube(2); }
Polytope diamond() { return cross_polytope(2); }

std::vector<Vec> random_units(Rng& rng, int d, int k) {
  std::vector<Vec> u;
  for (int i = 0; i < k; ++i) u.push_back(uniform_sphere(rng, d));
  return u;
}

std::vector<Vec> clustered_units(Rng& rng, int d, int k) {
  const Vec c = uniform_sphere(rng, d);
  const double s = std::pow(10.0, -6.0 * uniform01(rng));
  std::vector<Vec> u;
  for (int i = 0; i < k; ++i) u.push_back((c + s * gaussian_vector(rng, d)).normalized());
  return u;
}

Polytope random_polytope(Rng& rng, int d, int n) {
  std::vector<Vec> pts;
  for (int i = 0; i < n; ++i) pts.push_back(gaussian_vector(rng, d));
  return Polytope::hull(pts);
}

struct Scale {
  bool full = true;
  std::uint64_t seed = 7;
  std::uint64_t sub(std::uint64_t a, std::uint64_t b = 0) const { return derive_seed(seed, 0xacce97 + a, b); }
};

// Tracks the first failure and a running summary.
struct Check {
  bool ok = true;
  std::string first;
  void expect(bool c, const std::string& what) {
    if (!c && ok) first = what;
    ok = ok && c;
  }
};

CriterionResult finish(int id, std::string name, const Check& c, const std::string& summary) {
  return {id, std::move(name), c.ok, c.ok ? summary : summary + "; first failure: " + c.first};
}

// ---- 1
CriterionResult oracle_fit(const Scale& s) {
  Rng rng(s.sub(1));
  const Mat r3 = random_rotation(rng, 3);
  const std::vector<std::pair<std::string, std::vector<Polytope>>> fam{
      {"(2,2) square/triangle", {square(), unit_simplex(2)}},
      {"(2,2) diamond/rotated square", {diamond(), square().transformed(rotation2(0.3))}},
      {"(2,3) square/triangle/diamond", {square(), unit_simplex(2), diamond()}},
      {"(3,2) cube/rotated simplex", {unit_cube(3), unit_simplex(3).transformed(r3)}},
      {"(3,2) octahedron/cube", {cross_polytope(3), unit_cube(3)}},
      {"(3,3) cube/simplex/rotated octahedron", {unit_cube(3), unit_simplex(3), cross_polytope(3).transformed(r3)}}};
  Check c;
  double worst = 0.0;
  for (const auto& [name, p] : fam) {
    const auto t = oracle_mixed_volumes(p);
    worst = std::max(worst, t.residual);
    c.expect(t.residual <= 1e-8, format("%s residual %.3g", name.c_str(), t.residual));
  }
  return finish(1, "oracle polynomial fit residual <= 1e-8", c,
                format("%zu families, max residual %.3g", fam.size(), worst));
}

// ---- 2
CriterionResult schneider_vs_oracle(const Scale& s) {
  Rng rng(s.sub(2));
  const Mat r = random_rotation(rng, 3), r2 = random_rotation(rng, 3);
  struct Inst {
    std::string name;
    std::vector<Polytope> p;
    std::vector<int> n;
    double known = std::nan("");
  };
  const std::vector<Inst> lib{
      {"Q/D", {square(), diamond()}, {1, 1}, 2.0},
      {"S1/S2", {unit_segment(2, 0), unit_segment(2, 1)}, {1, 1}, 0.5},
      {"Q/rot30", {square(), square().transformed(rotation2(std::numbers::pi / 6))}, {1, 1}},
      {"triangle/Q", {unit_simplex(2), square()}, {1, 1}},
      {"D/triangle/Q", {diamond(), unit_simplex(2), square()}, {1, 1, 0}},
      {"cube/rotcube (1,2)", {unit_cube(3), unit_cube(3).transformed(r)}, {1, 2}},
      {"cube/rotcube (2,1)", {unit_cube(3), unit_cube(3).transformed(r)}, {2, 1}},
      {"simplex/-simplex", {unit_simplex(3), unit_simplex(3).reflected()}, {1, 2}},
      {"octahedron/rotcube", {cross_polytope(3), unit_cube(3).transformed(r2)}, {2, 1}},
      {"three bodies 3D", {unit_cube(3), unit_simplex(3).transformed(r), cross_polytope(3).transformed(r2)}, {1, 1, 1}},
      {"cube/cube", {unit_cube(3), unit_cube(3)}, {1, 2}, 1.0}};
  Check c;
  double worst = 0.0;
  for (const auto& in : lib) {
    const double want = oracle_mixed_volume(in.p, in.n);
    const double got = schneider_mixed_volume(ptrs(in.p), in.n, rng).value;
    const double rel = std::abs(got - want) / std::max(1e-300, std::abs(want));
    worst = std::max(worst, rel);
    c.expect(rel <= 1e-6, format("%s: %.12g vs oracle %.12g", in.name.c_str(), got, want));
    if (!std::isnan(in.known))
      c.expect(std::abs(want - in.known) <= 1e-6 * in.known, format("%s oracle %.12g vs %g", in.name.c_str(), want, in.known));
  }
  return finish(2, "Schneider rule = oracle to relative 1e-6", c,
                format("%zu instances, max relative error %.3g", lib.size(), worst));
}

// ---- 3
CriterionResult angle_route(const Scale& s) {
  Rng rng(s.sub(3));
  AngleOptions o;
  o.seed = s.sub(3, 1);
  o.samples = s.full ? 100000 : 20000;
  Check c;
  const std::vector<Polytope> qd{square(), diamond()};
  const auto e = angle_mixed_volume(ptrs(qd), {1, 1}, o);
  c.expect(std::abs(e.value - 2.0) <= 3 * e.std_error + 1e-9, format("Q/D %.10g", e.value));
  std::string summary = format("Q/D %.10g (exact sum)", e.value);
  double worst = 0.0;
  for (int t = 0; t < 2; ++t) {
    const std::vector<Polytope> p{unit_cube(3), unit_cube(3).transformed(random_rotation(rng, 3))};
    for (const std::vector<int>& n : {std::vector<int>{1, 2}, std::vector<int>{2, 1}}) {
      o.seed = s.sub(3, 10 + std::uint64_t(t) * 2 + std::uint64_t(n[0]));
      const double want = oracle_mixed_volume(p, n);
      const auto a = angle_mixed_volume(ptrs(p), n, o);
      const double z = (a.value - want) / a.std_error;
      worst = std::max(worst, std::abs(z));
      c.expect(std::abs(z) <= 3.0, format("rotated cube (%d,%d): %.6g vs %.6g, z=%.2f", n[0], n[1], a.value, want, z));
    }
  }
  summary += format("; 4 rotated-cube cases at %llu samples/tuple, max |z| %.2f", (unsigned long long)o.samples, worst);
  return finish(3, "angle route = oracle within 3 sigma", c, summary);
}

// ---- 4
CriterionResult angle_cross_check(const Scale& s) {
  Rng rng(s.sub(4));
  Check c;
  int checked = 0;
  double worst = 0.0;
  for (int trial = 0; checked < 20 && trial < 200; ++trial) {
    const int d = 2 + trial % 2;
    const Polytope a = random_polytope(rng, d, d + 3);
    const Polytope b = random_polytope(rng, d, d + 3);
    const std::vector<int> n = d == 2 ? std::vector<int>{1, 1} : std::vector<int>{1, 2};
    const auto& fa = a.faces_of_dim(n[0]);
    const auto& fb = b.faces_of_dim(n[1]);
    const std::vector<int> faces{fa[rng() % fa.size()], fb[rng() % fb.size()]};
    AngleOptions o;
    o.seed = s.sub(4, std::uint64_t(trial));
    o.samples = 100000;
    MCEstimate q;
    try {
      q = mixed_exterior_angle({&a, &b}, faces, n, AngleRoute::ConeQuadrature, o);
    } catch (const DivergenceError&) {
      continue;  // tuple not in general position
    }
    const MCEstimate m = mixed_exterior_angle({&a, &b}, faces, n, AngleRoute::AdmissibleMC, o);
    const double sd = std::hypot(q.std_error, m.std_error);
    const double z = sd > 0 ? (q.value - m.value) / sd : 0.0;
    if (sd == 0) c.expect(std::abs(q.value - m.value) <= 1e-9, format("tuple %d exact mismatch", trial));
    worst = std::max(worst, std::abs(z));
    c.expect(std::abs(z) <= 3.0, format("tuple %d (d=%d): %.6g vs %.6g", trial, d, q.value, m.value));
    for (const auto& x : {q, m})
      c.expect(x.value >= 0.0 && x.value <= 1.0 + 3 * x.std_error, format("tuple %d beta %.6g", trial, x.value));
    ++checked;
  }
  c.expect(checked == 20, format("only %d tuples", checked));

  // Σ_F β·∏V(F) = binom·V
  const std::vector<Polytope> qd{square(), diamond()};
  double sq = 0.0;
  for (const auto& t : mixed_angle_terms(ptrs(qd), {1, 1})) sq += t.beta.value * t.weight();
  c.expect(std::abs(sq - 4.0) <= 1e-9, format("Q/D beta sum %.12g", sq));
  const std::vector<Polytope> p{unit_cube(3), unit_simplex(3).transformed(random_rotation(rng, 3))};
  AngleOptions o;
  o.seed = s.sub(4, 999);
  o.samples = s.full ? 100000 : 20000;
  double sum = 0.0, var = 0.0;
  for (const auto& t : mixed_angle_terms(ptrs(p), {1, 2}, o)) {
    sum += t.beta.value * t.weight();
    var += std::pow(t.beta.std_error * t.weight(), 2);
  }
  const double want = multinomial(3, {1, 2}) * oracle_mixed_volume(p, {1, 2});
  const double zs = (sum - want) / std::sqrt(var);
  c.expect(std::abs(zs) <= 3.0, format("cube/simplex beta sum %.6g vs %.6g", sum, want));
  return finish(4, "cone quadrature = admissible MC on 20 tuples; beta sum identity", c,
                format("%d tuples, max |z| %.2f; 2D sum %.10g = 4; 3D sum %.5g vs %.5g (z=%.2f)", checked, worst, sq, sum,
                       want, zs));
}

// ---- 5
CriterionResult sphere_selftest(const Scale& s) {
  Check c;
  std::string summary;
  for (auto [p, d, b] : {std::tuple{4, 2, 1.0}, std::tuple{6, 3, 3.0}}) {
    const auto r = sphere_projection_selftest(p, d, b, s.sub(5, std::uint64_t(p)), 100000);
    const double rel = std::abs(r.controlled.value - r.exact) / r.exact;
    const double relp = std::abs(r.plain.value - r.exact) / r.exact;
    c.expect(rel <= 0.005, format("(%d,%d,%g) relative error %.4f%%", p, d, b, 100 * rel));
    summary += format("%s(%d,%d,%g) %.4f%% (plain %.4f%%)", summary.empty() ? "" : "; ", p, d, b, 100 * rel, 100 * relp);
  }
  return finish(5, "sphere projection self-test within 0.5%", c, summary);
}

// ---- 6
CriterionResult multiplier_identities(const Scale& s) {
  DMatrixPolicy pol;
  pol.prefer_closed_form = false;
  pol.seed = s.sub(6);
  DMatrixCache est(pol);
  Check c;
  double worst = 0.0;
  struct Case {
    int lemma;
    std::vector<int> deg;
  };
  const std::vector<Case> cases{{3, {1, 2}}, {3, {2, 1}}, {3, {1, 1, 1}}, {5, {2, 1}}, {5, {2, 2}}};
  bool saw_positive_j = false;
  for (size_t i = 0; i < cases.size(); ++i) {
    const auto& cs = cases[i];
    const auto rep = verify_multiplier_identity(cs.lemma, 3, cs.deg, s.sub(6, i + 1), 20, 20000, est);
    saw_positive_j = saw_positive_j || (cs.lemma == 5 && rep.j > 0);
    worst = std::max(worst, rep.max_abs_z);
    c.expect(!rep.deterministic && rep.max_abs_z <= 3.0,
             format("lemma %d deg size %zu: max |z| %.2f", cs.lemma, cs.deg.size(), rep.max_abs_z));
  }
  c.expect(saw_positive_j, "no j > 0 case");
  double exact = 0.0;
  for (const auto& [lemma, deg] : std::vector<std::pair<int, std::vector<int>>>{{3, {1, 1}}, {5, {1, 1}}, {3, {1, 1, 0}}}) {
    const auto rep = verify_multiplier_identity(lemma, 2, deg, s.sub(6, 50), 20, 100, est);
    exact = std::max(exact, rep.max_abs_error);
    c.expect(rep.deterministic && rep.max_abs_error <= 1e-10, format("d=2 lemma %d error %.3g", lemma, rep.max_abs_error));
  }
  const DMatrix& m = est.get(3, 1);
  c.expect(!m.exact, "D(3,1) was not estimated");
  const double want[2][2] = {{3.0 / 8, 1.0 / 8}, {1.0 / 8, 3.0 / 8}};
  double zd = 0.0;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) zd = std::max(zd, std::abs(m.entries(p, q) - want[p][q]) / m.sigma(p, q));
  const double za = std::max(std::abs(m.a[0] - 3.0) / m.a_sigma[0], std::abs(m.a[1] + 1.0) / m.a_sigma[1]);
  c.expect(zd <= 3.0, format("D(3,1) entries max |z| %.2f", zd));
  c.expect(za <= 3.0, format("a(3,1) max |z| %.2f", za));
  return finish(6, "multiplier identities with estimated D; d=2 exact; D(3,1) anchors", c,
                format("5 d=3 cases, 20 trials each, max |z| %.2f; d=2 max error %.2g; D(3,1) |z| %.2f, "
                       "a = (%.4f, %.4f) |z| %.2f",
                       worst, exact, zd, m.a[0], m.a[1], za));
}

// ---- 7
CriterionResult flag_mixed_volumes(const Scale& s) {
  Check c;
  FlagOptions o;
  o.seed = s.sub(7);
  o.samples = 100000;
  const std::vector<Polytope> qd{square(), diamond()};
  const auto e = flag_mixed_volume(ptrs(qd), {1, 1}, o);
  const double z0 = (e.value - 2.0) / e.std_error;
  c.expect(std::abs(z0) <= 3.0, format("Q/D %.6g +- %.2g", e.value, e.std_error));
  std::vector<double> seq;
  for (double eps : {0.8, 0.4, 0.2, 0.1}) {
    o.epsilon = eps;
    seq.push_back(flag_mixed_volume(ptrs(qd), {1, 1}, o).value);
    if (seq.size() > 1) c.expect(seq.back() >= seq[seq.size() - 2], format("decrease at eps %g", eps));
  }
  o.epsilon = 0.0;
  const int seeds = s.full ? 10 : 3;
  double worst = 0.0;
  for (int t = 0; t < seeds; ++t) {
    Rng rng(s.sub(7, 100 + std::uint64_t(t)));
    const std::vector<Polytope> p{unit_cube(3), unit_cube(3).transformed(random_rotation(rng, 3))};
    const std::vector<int> n = t % 2 ? std::vector<int>{2, 1} : std::vector<int>{1, 2};
    o.seed = s.sub(7, 200 + std::uint64_t(t));
    o.samples = 40000;
    const auto f = flag_mixed_volume(ptrs(p), n, o);
    const double want = oracle_mixed_volume(p, n);
    const double z = (f.value - want) / f.std_error;
    worst = std::max(worst, std::abs(z));
    c.expect(std::abs(z) <= 3.0, format("rotation seed %d: %.6g vs %.6g (z=%.2f)", t, f.value, want, z));
  }
  return finish(7, "flag mixed volume: Q/D, epsilon monotone, rotated cubes", c,
                format("Q/D %.5f +- %.5f (z=%.2f); eps 0.8..0.1: %.4f %.4f %.4f %.4f; %d rotations max |z| %.2f",
                       e.value, e.std_error, z0, seq[0], seq[1], seq[2], seq[3], seeds, worst));
}

// ---- 8
CriterionResult flag_functional(const Scale& s) {
  Check c;
  const std::vector<Polytope> qd{square(), diamond()};
  const double v = curvature_mixed_functional(ptrs(qd), {1, 1});
  c.expect(std::abs(v - 4.0) <= 1e-8, format("curvature %.12g", v));
  FlagOptions o;
  o.seed = s.sub(8);
  o.samples = 100000;
  const auto e = flag_mixed_functional(ptrs(qd), {1, 1}, o);
  const double z = (e.value - 4.0) / e.std_error;
  c.expect(std::abs(z) <= 3.0, format("flag %.6g +- %.2g", e.value, e.std_error));
  return finish(8, "V_{1,1}(Q,D) = 4 by curvature and flag routes", c,
                format("curvature %.12g; flag %.5f +- %.5f (z=%.2f)", v, e.value, e.std_error, z));
}

// ---- 9
CriterionResult closure(const Scale& s) {
  Check c;
  Rng rng(s.sub(9));
  const std::vector<Polytope> planar{square(), diamond().transformed(rotation2(0.4))};
  const std::vector<Polytope> spatial{unit_cube(3), unit_simplex(3).transformed(random_rotation(rng, 3))};
  const std::uint64_t fit3 = s.full ? 4000 : 1500, mc3 = s.full ? 16000 : 6000;
  struct Case {
    const std::vector<Polytope>* p;
    int j;
    std::uint64_t fit, mc;
  };
  std::string summary;
  const std::vector<Case> cases{{&planar, 0, 200000, 400000}, {&planar, 1, 200000, 400000},
                                {&spatial, 0, fit3, mc3},      {&spatial, 1, fit3, mc3},
                                {&spatial, 2, fit3, mc3}};
  for (size_t i = 0; i < cases.size(); ++i) {
    const auto& cs = cases[i];
    const int d = cs.p->at(0).ambient_dim();
    const auto t = decompose_homogeneous(ptrs(*cs.p), cs.j, s.sub(9, 10 + i), cs.fit);
    const auto e = translative_integral_mc(ptrs(*cs.p), cs.j, s.sub(9, 20 + i), cs.mc);
    const double z = (t.total - e.value) / std::hypot(t.total_error, e.std_error);
    c.expect(std::abs(z) <= 3.0, format("(%d,2,%d): fit %.5g vs mc %.5g", d, cs.j, t.total, e.value));
    summary += format("(%d,2,%d) z=%.2f; ", d, cs.j, z);
  }
  const Polytope q = square(), dd = diamond();
  const auto a = translative_integral_mc({&q, &dd}, 0, s.sub(9, 30), 1000000);
  const auto b = translative_integral_mc({&q, &q}, 1, s.sub(9, 31), 1000000);
  c.expect(std::abs(a.value - 7.0) <= 0.07, format("Q/D j=0 %.5g", a.value));
  c.expect(std::abs(b.value - 4.0) <= 0.04, format("Q/Q j=1 %.5g", b.value));
  summary += format("anchors %.5f (7), %.5f (4)", a.value, b.value);
  return finish(9, "translative closure and anchors", c, summary);
}

// ---- 10
CriterionResult duality() {
  Check c;
  std::string summary;
  const std::vector<std::tuple<std::string, Polytope, Polytope>> pairs{
      {"Q,D", square(), diamond()}, {"Q,Q", square(), square()}, {"S1,S2", unit_segment(2, 0), unit_segment(2, 1)}};
  for (const auto& [name, k, l] : pairs) {
    const auto p = duality_check(k, l, 1);
    c.expect(std::abs(p.lhs - p.rhs) <= 1e-6, format("%s: %.12g vs %.12g", name.c_str(), p.lhs, p.rhs));
    summary += format("%s(%s) (%.10g, %.10g)", summary.empty() ? "" : "; ", name.c_str(), p.lhs, p.rhs);
  }
  return finish(10, "duality pairs equal to 1e-6", c, summary);
}

// ---- 11
CriterionResult properties(const Scale& s) {
  Check c;
  Rng rng(s.sub(11));
  const int n = 1000;
  std::vector<std::string> parts;

  {  // diagonal-projection identity
    double worst = 0.0;
    for (int t = 0; t < n; ++t) {
      const int d = 1 + t % 5, k = 2 + t % 4;
      std::vector<Vec> x;
      for (int i = 0; i < k; ++i) x.push_back(gaussian_vector(rng, d));
      const double e = std::abs(diag_projection_norm(x) - diag_projection_norm_explicit(x));
      worst = std::max(worst, e);
      c.expect(e <= 1e-12, format("diag projection case %d: %.3g", t, e));
    }
    parts.push_back(format("diag-proj %d (max %.1g)", n, worst));
  }
  {  // graded products sum to 1
    double worst = 0.0;
    for (int t = 0; t < n; ++t) {
      const int d = 3 + t % 4;
      const Vec u = uniform_sphere(rng, d);
      const int j = 1 + (t / 4) % (d - 2);
      const Subspace U = uniform_subspace(u, j, rng), A = uniform_subspace(u, j, rng);
      const Subspace amb = Subspace::span(Mat(u)).complement();
      double sum = 0.0;
      for (double x : graded_scalar_products(amb, U, A)) sum += x;
      worst = std::max(worst, std::abs(sum - 1.0));
      c.expect(std::abs(sum - 1.0) <= 1e-10, format("graded sum case %d: %.3g", t, sum));
    }
    parts.push_back(format("graded-sum %d (max %.1g)", n, worst));
  }
  {  // lower bounds on ‖t̲u̲|L^⊥‖ for admissible tuples
    const int m = 10 * n;
    for (int t = 0; t < m; ++t) {
      const int k = 2 + t % 3, d = 2 + t % 2;
      const auto u = random_units(rng, d, k);
      Vec w = t % 3 == 0 ? Vec(Vec::Constant(k, 1.0) + 0.3 * gaussian_vector(rng, k)) : gaussian_vector(rng, k);
      w = w.cwiseAbs();
      w /= w.norm();
      const double spread = scaled_diag_norm(w, u);
      const double rk = std::sqrt(double(k));
      if (w.minCoeff() >= 1.0 / (2 * rk))
        c.expect(spread >= diag_projection_norm(u) / (2 * rk) - 1e-12, format("inner bound case %d", t));
      else
        c.expect(spread >= 1.0 / (2 * k) - 1e-12, format("outer bound case %d", t));
    }
    parts.push_back(format("lemma-2 %d", m));
  }
  {  // multiplier bound ‖⋀V^i‖ ≤ d√k‖u̲|L^⊥‖
    const int m = 10 * n;
    for (int t = 0; t < m; ++t) {
      const int d = 2 + int(rng() % 3), k = 2 + int(rng() % 2);
      std::vector<int> deg(size_t(k), 0);
      for (int left = d; left > 0;) {
        const size_t i = size_t(rng() % size_t(k));
        if (deg[i] < d - 1) {
          ++deg[i];
          --left;
        }
      }
      const auto u = t % 2 ? clustered_units(rng, d, k) : random_units(rng, d, k);
      const double bound = d * std::sqrt(double(k)) * diag_projection_norm(u);
      Mat cols(d, d);
      int at = 0;
      for (int i = 0; i < k; ++i) {
        const Mat b = uniform_subspace(u[size_t(i)], d - 1, rng).frame();
        const auto sets = k_subsets(d - 1, deg[size_t(i)]);
        for (int x : sets[rng() % sets.size()]) cols.col(at++) = b.col(x);
      }
      c.expect(std::sqrt(wedge_norm_sq(cols)) <= bound * (1 + 1e-9) + 1e-15, format("multiplier bound case %d", t));
    }
    parts.push_back(format("multiplier-bound %d", m));
  }
  {  // ε-monotonicity of F^{(ε)}
    const std::vector<double> eps{1.0, 0.5, 0.25, 0.1, 0.05, 0.01};
    for (int t = 0; t < n; ++t) {
      const int d = 2 + t % 2;
      const std::vector<int> deg = d == 2 ? std::vector<int>{1, 1} : std::vector<int>{1, 2};
      const auto u = random_units(rng, d, 2);
      double prev = 0.0;
      for (double e : eps) {
        const double v = eval_F(KernelSpec::mixed(d, deg, e), u);
        c.expect(v >= prev - 1e-12, format("F_eps monotonicity case %d", t));
        prev = v;
      }
    }
    parts.push_back(format("eps-monotone %d", n));
  }
  {  // rotation and permutation invariance of F_n, G_r
    const std::vector<KernelSpec> specs{KernelSpec::mixed(3, {1, 2}), KernelSpec::translative(3, {2, 2}),
                                        KernelSpec::translative(3, {2, 2, 2}), KernelSpec::mixed(2, {1, 1}),
                                        KernelSpec::mixed(3, {1, 1, 1})};
    std::vector<Kernel> kers;
    for (const auto& sp : specs) kers.emplace_back(sp);
    for (int t = 0; t < n; ++t) {
      const size_t w = size_t(t) % specs.size();
      const KernelSpec& sp = specs[w];
      std::vector<Vec> u;
      do u = random_units(rng, sp.d, sp.k());
      while (diag_projection_norm(u) < 0.2 || (sp.mode == KernelMode::Translative && hull_distance(u) < 0.2));
      const Mat r = random_rotation(rng, sp.d);
      std::vector<Vec> ru;
      for (const auto& v : u) ru.push_back(r * v);
      const double a = kers[w](u), b = kers[w](ru);
      c.expect(std::abs(a - b) <= 1e-6 * std::abs(a), format("rotation invariance case %d", t));
      std::vector<int> perm(size_t(sp.k()));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<int> pd;
      std::vector<Vec> pu;
      for (int i : perm) {
        pd.push_back(sp.degrees[size_t(i)]);
        pu.push_back(u[size_t(i)]);
      }
      const double p = Kernel(KernelSpec{sp.d, sp.mode, pd, 0.0})(pu);
      c.expect(std::abs(a - p) <= 1e-6 * std::abs(a), format("permutation invariance case %d", t));
    }
    parts.push_back(format("rotation+permutation %d", n));
  }
  {  // reproducibility: library estimators under fixed seeds and thread counts
    const std::vector<Polytope> qd{square(), diamond()};
    Rng r3(s.sub(11, 1));
    const std::vector<Polytope> p3{unit_cube(3), unit_simplex(3).transformed(random_rotation(r3, 3))};
    const int saved = default_threads();
    int cases = 0;
    for (int t = 0; t < n; ++t) {
      const std::uint64_t seed = s.sub(11, 1000 + std::uint64_t(t));
      std::function<double()> f;
      switch (t % 5) {
        case 0:
          f = [&] {
            FlagOptions o;
            o.seed = seed;
            o.samples = 300;
            return flag_mixed_volume(ptrs(qd), {1, 1}, o).value;
          };
          break;
        case 1:
          f = [&] {
            FlagOptions o;
            o.seed = seed;
            o.samples = 300;
            return flag_mixed_functional(ptrs(qd), {1, 1}, o).value;
          };
          break;
        case 2:
          f = [&] { return translative_integral_mc(ptrs(qd), 0, seed, 500).value; };
          break;
        case 3:
          f = [&] {
            AngleOptions o;
            o.seed = seed;
            o.samples = 50;
            return angle_mixed_volume(ptrs(p3), {2, 1}, o).value;
          };
          break;
        default:
          f = [&] { return sphere_projection_selftest(4, 2, 1.0, seed, 500).controlled.value; };
      }
      set_default_threads(1);
      const double a = f();
      set_default_threads(2 + t % 3);
      const double b = f();
      const double b2 = f();
      c.expect(a == b && b == b2, format("reproducibility case %d", t));
      ++cases;
    }
    set_default_threads(saved);
    // every MC command of the CLI, byte for byte
    std::vector<RunConfig> cmds(4);
    cmds[0].command = "mixed-volume";
    cmds[0].method = "angle";
    cmds[0].generators = {"cube", "random-rotation 3 simplex"};
    cmds[0].dim = 3;
    cmds[0].degrees = {1, 2};
    cmds[0].samples = 2000;
    cmds[1].command = "flag-check";
    cmds[1].generators = {"square", "diamond"};
    cmds[1].samples = 2000;
    cmds[2].command = "translative";
    cmds[2].generators = {"square", "diamond"};
    cmds[2].decompose = true;
    cmds[2].samples = 5000;
    cmds[3].command = "kernel-eval";
    cmds[3].degrees = {1, 2};
    cmds[3].dim = 3;
    cmds[3].random_tuples = 20;
    for (auto& cfg : cmds) {
      cfg.seed = s.sub(11, 7);
      const std::string a = run(cfg).text;
      cfg.threads = 3;
      const std::string b = run(cfg).text;
      c.expect(a == b, "CLI " + cfg.command + " not byte-identical");
      ++cases;
    }
    set_default_threads(saved);
    parts.push_back(format("reproducibility %d", cases));
  }
  std::string summary;
  for (const auto& p : parts) summary += (summary.empty() ? "" : ", ") + p;
  return finish(11, "property suites", c, summary);
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  Scale s;
  s.full = opt.suite == "full";
  s.seed = opt.seed;
  const std::vector<std::pair<int, std::function<CriterionResult()>>> all{
      {1, [&] { return oracle_fit(s); }},
      {2, [&] { return schneider_vs_oracle(s); }},
      {3, [&] { return angle_route(s); }},
      {4, [&] { return angle_cross_check(s); }},
      {5, [&] { return sphere_selftest(s); }},
      {6, [&] { return multiplier_identities(s); }},
      {7, [&] { return flag_mixed_volumes(s); }},
      {8, [&] { return flag_functional(s); }},
      {9, [&] { return closure(s); }},
      {10, [&] { return duality(); }},
      {11, [&] { return properties(s); }}};
  std::vector<CriterionResult> out;
  for (const auto& [id, f] : all) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
    CriterionResult r;
    try {
      r = f();
    } catch (const std::exception& e) {
      r = {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what()};
    }
    if (on_result) on_result(r);
    out.push_back(r);
  }
  return out;
}

}  // namespace mixvol::app
