#include "mixvol/flag_calculus.hpp"

#include "mixvol/cones.hpp"
#include "mixvol/mixed_volume.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

using namespace mixvol;
using mixvol::testing::diamond;
using mixvol::testing::rotation2;
using mixvol::testing::square;
using mixvol::testing::vec;

namespace {

Subspace perp_of(const Vec& u) {
  const Mat m = u;
  return Subspace::span(m).complement();
}

// Random orthonormal basis of u^⊥ (d × (d−1)).
Mat random_basis(const Vec& u, Rng& rng) {
  return uniform_subspace(u, int(u.size()) - 1, rng).frame();
}

// u_i clustered around a common direction at a random log-scale spread.
std::vector<Vec> clustered_units(Rng& rng, int d, int k) {
  const Vec c = uniform_sphere(rng, d);
  const double s = std::pow(10.0, -6.0 * uniform01(rng));
  std::vector<Vec> u;
  for (int i = 0; i < k; ++i) u.push_back((c + s * gaussian_vector(rng, d)).normalized());
  return u;
}

double unit_l_perp(const std::vector<Vec>& u) { return diag_projection_norm(u); }

std::vector<std::vector<double>> coeffs(int d, const std::vector<int>& dims) {
  return multiplier_coefficients(d, dims, default_d_matrices());
}

}  // namespace

// ---- flag atoms

TEST(FlagAtoms, TotalMassIsIntrinsicVolume) {
  // γ(d,n)·Σ H^n(F)·H(n(P,F))·E⟨V,T⟩² = Σ H^n(F)γ(F,P).
  const Polytope c = unit_cube(3);
  const Polytope s = unit_simplex(3);
  for (const Polytope* p : {&c, &s})
    for (int n = 0; n <= 2; ++n) {
      const auto atoms = polytope_flag_atoms(*p, n);
      const auto e = atoms.integrate([](const Vec&, const Subspace&) { return 1.0; }, 11, 40000);
      EXPECT_NEAR(e.value, p->intrinsic_volume(n), 3.0 * e.std_error + 1e-12) << p->name() << " n=" << n;
    }
}

TEST(FlagAtoms, PlanarDegenerateGrassmannian) {
  // d = 2, n = 1: V is the zero subspace, mass = binom(2,1)(2κ_1)^{-1}·S_1 total.
  const Polytope q = square();
  const auto atoms = polytope_flag_atoms(q, 1);
  EXPECT_EQ(atoms.flag_dim(), 0);
  EXPECT_EQ(atoms.atoms.size(), 4u);
  const auto e = atoms.integrate([](const Vec&, const Subspace& v) { return v.dim() == 0 ? 1.0 : 0.0; }, 1, 1000);
  EXPECT_NEAR(e.value, 2.0 / (2.0 * kappa(1)) * 4.0, 1e-12);
  EXPECT_NEAR(e.std_error, 0.0, 1e-12);
}

TEST(FlagAtoms, MarginalMatchesAreaMeasure) {
  // ∫⟨u,e1⟩² dΩ_1(cube) against (1/ω_2)Σ_F H^1(F)∫_{n(P,F)}⟨u,e1⟩², arcs by Simpson.
  const Polytope c = unit_cube(3);
  auto g = [](const Vec& u) { return u[0] * u[0]; };
  double oracle = 0.0;
  for (const auto& a : area_measure_atoms(c, 1)) {
    ConeSampler s(*a.cone);
    ASSERT_EQ(s.kind(), ConeSampler::Kind::Arc);
    const int m = 200;
    const double h = s.arc_length() / m;
    double sum = 0.0;
    for (int i = 0; i <= m; ++i) sum += (i == 0 || i == m ? 1 : (i % 2 ? 4 : 2)) * g(s.arc_point(i * h));
    oracle += a.weight * sum * h / 3.0;
  }
  oracle /= omega(2);
  const auto atoms = polytope_flag_atoms(c, 1);
  const auto e = atoms.integrate([&](const Vec& u, const Subspace&) { return g(u); }, 5, 100000);
  EXPECT_NEAR(e.value, oracle, 3.0 * e.std_error);
}

TEST(FlagAtoms, WeightAverageIsTraceIdentity) {
  // E⟨V,T⟩² over V ∈ G^{u⊥}(d−1,d−1−n) equals 1/binom(d−1,n).
  Rng rng(3);
  for (int d : {3, 4})
    for (int n = 0; n <= d - 1; ++n) {
      const Vec u = uniform_sphere(rng, d);
      const Subspace t = uniform_subspace(u, d - 1 - n, rng);
      Accumulator acc;
      for (int s = 0; s < 20000; ++s) acc.add(subspace_product_sq(uniform_subspace(u, d - 1 - n, rng), t));
      EXPECT_NEAR(acc.mean, 1.0 / binom(d - 1, n), 3.0 * acc.std_error() + 1e-12);
    }
}

// ---- D-matrices

TEST(DMatrix, ClosedFormAnchors) {
  const DMatrix m = closed_form_d_matrix(3, 1);
  EXPECT_NEAR(m.entries(0, 0), 3.0 / 8, 1e-15);
  EXPECT_NEAR(m.entries(0, 1), 1.0 / 8, 1e-15);
  EXPECT_NEAR(m.entries(1, 0), 1.0 / 8, 1e-15);
  EXPECT_NEAR(m.entries(1, 1), 3.0 / 8, 1e-15);
  EXPECT_NEAR(m.a[0], 3.0, 1e-12);
  EXPECT_NEAR(m.a[1], -1.0, 1e-12);
  EXPECT_LE(m.residual, 1e-12);

  const DMatrix p = closed_form_d_matrix(2, 1);
  ASSERT_EQ(p.size(), 1);
  EXPECT_EQ(p.entries(0, 0), 1.0);
  EXPECT_EQ(p.a[0], 1.0);

  const DMatrix q = closed_form_d_matrix(4, 1);
  EXPECT_NEAR(q.entries(0, 0), 1.0 / 5, 1e-15);
  EXPECT_NEAR(q.entries(0, 1), 1.0 / 15, 1e-15);
  EXPECT_NEAR(q.entries(1, 0), 2.0 / 15, 1e-15);
  EXPECT_NEAR(q.entries(1, 1), 4.0 / 15, 1e-15);
  EXPECT_NEAR(q.a[0], 6.0, 1e-12);
  EXPECT_NEAR(q.a[1], -1.5, 1e-12);

  EXPECT_FALSE(has_closed_form_d_matrix(5, 2));
  EXPECT_THROW(closed_form_d_matrix(5, 2), InputError);
}

TEST(DMatrix, PlanarAverageFormula) {
  // avg over φ of cos²φ·cos²(φ−ψ) = (1 + 2cos²ψ)/8, by direct quadrature.
  const DMatrix m = closed_form_d_matrix(3, 1);
  for (double psi : {0.0, 0.3, 1.0, 1.4, 2.5}) {
    const int n = 4000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double phi = std::numbers::pi * (i + 0.5) / n;
      s += std::pow(std::cos(phi) * std::cos(phi - psi), 2);
    }
    s /= n;
    const double c2 = std::pow(std::cos(psi), 2);
    EXPECT_NEAR(s, (1 + 2 * c2) / 8, 1e-12);
    EXPECT_NEAR(s, m.entries(0, 0) * c2 + m.entries(0, 1) * (1 - c2), 1e-12);
  }
}

TEST(DMatrix, EstimateMatchesClosedForm) {
  for (auto [d, j] : std::vector<std::pair<int, int>>{{3, 1}, {4, 1}, {4, 2}}) {
    const DMatrix e = estimate_d_matrix(d, j, 17, 100000);
    const DMatrix c = closed_form_d_matrix(d, j);
    ASSERT_EQ(e.size(), c.size());
    for (int p = 0; p < e.size(); ++p) {
      for (int q = 0; q < e.size(); ++q)
        EXPECT_NEAR(e.entries(p, q), c.entries(p, q), 3.0 * e.sigma(p, q)) << d << "," << j << " " << p << q;
      EXPECT_NEAR(e.a[p], c.a[p], 3.0 * e.a_sigma[p]);
    }
    EXPECT_LE(e.residual, 1e-6);
    EXPECT_LT(e.condition, 1e6);
  }
}

TEST(DMatrix, AveragedRelation) {
  for (auto [d, j] : std::vector<std::pair<int, int>>{{3, 1}, {4, 1}, {4, 2}, {5, 1}})
    EXPECT_LE(d_matrix_average_defect(closed_form_d_matrix(d, j)), 1e-15);
  // no closed form here; |defect| is a μ-weighted sum of entry errors
  const DMatrix e = estimate_d_matrix(5, 2, 3, 60000);
  ASSERT_EQ(e.size(), 3);
  EXPECT_LE(d_matrix_average_defect(e), 3.0 * e.sigma.maxCoeff());
  EXPECT_LE(e.residual, 1e-6);
}

TEST(DMatrix, IllConditionedDesignSignals) {
  EXPECT_THROW(estimate_d_matrix(3, 1, 1, 2000, 1.0), EstimationError);
  EXPECT_THROW(estimate_d_matrix(3, 0, 1, 2000), InputError);
  EXPECT_THROW(estimate_d_matrix(3, 2, 1, 2000), InputError);
}

TEST(DMatrix, CacheRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "mixvol_dmatrix_cache_test.json").string();
  std::remove(path.c_str());
  DMatrixPolicy pol;
  pol.prefer_closed_form = false;
  pol.seed = 5;
  pol.budget = 20000;
  pol.path = path;
  Mat first;
  {
    DMatrixCache c(pol);
    const DMatrix& m = c.get(3, 1);
    EXPECT_FALSE(m.exact);
    first = m.entries;
    EXPECT_TRUE(c.get(3, 0).exact);  // 1×1 cases are never estimated
  }
  ASSERT_TRUE(std::filesystem::exists(path));
  pol.budget = 300;  // a fresh estimate would differ
  DMatrixCache again(pol);
  const DMatrix& m2 = again.get(3, 1);
  EXPECT_EQ(m2.samples, 20000u);
  EXPECT_EQ(m2.seed, derive_seed(5, 3, 1));
  EXPECT_TRUE(m2.entries.isApprox(first, 1e-15));
  std::remove(path.c_str());
}

// ---- Φ and Ψ

TEST(Phi, PlanarIsSineSquared) {
  Rng rng(1);
  const auto a = coeffs(2, {1, 1});
  for (int t = 0; t < 100; ++t) {
    const Vec u1 = uniform_sphere(rng, 2), u2 = uniform_sphere(rng, 2);
    const double c = u1.dot(u2);
    const double phi = phi_kernel({u1, u2}, {perp_of(u1), perp_of(u2)}, a);
    EXPECT_NEAR(phi, 1.0 - c * c, 1e-12);
    // flag subspaces are zero-dimensional; c(2,(1,1)) = γ(2,1)²
    const double m = phi_multiplier({1, 1}, {u1, u2}, {Subspace(2), Subspace(2)}, a);
    EXPECT_NEAR(m, (1.0 - c * c) / std::pow(gamma_const(2, 1), 2), 1e-10);
  }
}

TEST(Phi, CoincidentNormalsVanish) {
  Rng rng(2);
  const auto a = coeffs(3, {1, 2});
  const auto b = coeffs(3, {1, 1, 1});
  for (int t = 0; t < 100; ++t) {
    const Vec u = uniform_sphere(rng, 3);
    EXPECT_NEAR(phi_kernel({u, u}, {uniform_subspace(u, 1, rng), perp_of(u)}, a), 0.0, 1e-20);
    EXPECT_NEAR(phi_kernel({u, u, u}, {uniform_subspace(u, 1, rng), uniform_subspace(u, 1, rng),
                                       uniform_subspace(u, 1, rng)}, b),
                0.0, 1e-20);
  }
}

TEST(Phi, DimensionChecks) {
  const Vec u = vec({0, 0, 1});
  const auto a = coeffs(3, {1, 2});
  Rng rng(0);
  EXPECT_THROW(phi_kernel({u, u}, {uniform_subspace(u, 1, rng), uniform_subspace(u, 1, rng)}, a), InputError);
  EXPECT_THROW(phi_kernel({u, u}, {Subspace::span(Mat(vec({0, 0, 1}))), perp_of(u)}, a), InputError);
  EXPECT_THROW(phi_multiplier({1, 2}, {u, u}, {Subspace(3), Subspace(3)}, a), InputError);
}

TEST(Psi, PlanarSingleTerm) {
  Rng rng(4);
  const auto a = coeffs(2, {0, 0});
  for (int t = 0; t < 100; ++t) {
    const Vec u1 = uniform_sphere(rng, 2), u2 = uniform_sphere(rng, 2);
    const double w = wedge_norm_sq(std::vector<Vec>{u1, u2});
    EXPECT_NEAR(psi_kernel({u1, u2}, {Subspace(2), Subspace(2)}, a), w, 1e-14);
    EXPECT_NEAR(psi_multiplier({1, 1}, {u1, u2}, {Subspace(2), Subspace(2)}, a), w / std::pow(gamma_const(2, 1), 2),
                1e-12);
  }
}

TEST(Psi, DependentNormalsVanish) {
  Rng rng(6);
  const auto a = coeffs(3, {0, 0, 0});
  const auto b = coeffs(3, {1, 0});
  for (int t = 0; t < 100; ++t) {
    // three normals in a common plane, r = (2,2,2)
    const Vec n = uniform_sphere(rng, 3);
    const Subspace pl = perp_of(n);
    std::vector<Vec> u;
    for (int i = 0; i < 3; ++i) u.push_back(pl.frame() * uniform_sphere(rng, 2));
    EXPECT_NEAR(psi_kernel(u, {Subspace(3), Subspace(3), Subspace(3)}, a), 0.0, 1e-20);
    // equal normals, r = (1,2)
    const Vec v = uniform_sphere(rng, 3);
    EXPECT_NEAR(psi_kernel({v, v}, {uniform_subspace(v, 1, rng), Subspace(3)}, b), 0.0, 1e-20);
  }
}

// ---- Lemma 3 / Lemma 5 integral equations

TEST(MultiplierIdentity, Lemma3) {
  for (const auto& n : std::vector<std::vector<int>>{{1, 2}, {1, 1, 1}}) {
    const auto rep = verify_multiplier_identity(3, 3, n, 21, 20, 20000, default_d_matrices());
    EXPECT_FALSE(rep.deterministic);
    EXPECT_LE(rep.max_abs_z, 3.0) << n.size();
  }
  const auto rep4 = verify_multiplier_identity(3, 4, {2, 2}, 21, 8, 20000, default_d_matrices());
  EXPECT_LE(rep4.max_abs_z, 3.0);
}

TEST(MultiplierIdentity, Lemma5) {
  const auto r0 = verify_multiplier_identity(5, 3, {2, 1}, 22, 20, 20000, default_d_matrices());
  EXPECT_EQ(r0.j, 0);
  EXPECT_LE(r0.max_abs_z, 3.0);
  // j = 1: the averaged construction with the extra body of degree d − j
  const auto r1 = verify_multiplier_identity(5, 3, {2, 2}, 22, 20, 20000, default_d_matrices());
  EXPECT_EQ(r1.j, 1);
  EXPECT_FALSE(r1.deterministic);
  EXPECT_LE(r1.max_abs_z, 3.0);
}

TEST(MultiplierIdentity, EstimatedCoefficients) {
  DMatrixPolicy pol;
  pol.prefer_closed_form = false;
  pol.seed = 9;
  DMatrixCache est(pol);
  const auto rep = verify_multiplier_identity(3, 3, {1, 2}, 23, 20, 20000, est);
  EXPECT_LE(rep.max_abs_z, 3.0);
  EXPECT_FALSE(est.get(3, 1).exact);
}

TEST(MultiplierIdentity, PlanarExact) {
  for (const auto& n : std::vector<std::vector<int>>{{1, 1}, {1, 1, 0}, {0, 1, 1, 0}}) {
    const auto rep = verify_multiplier_identity(3, 2, n, 1, 20, 100, default_d_matrices());
    EXPECT_TRUE(rep.deterministic);
    EXPECT_LE(rep.max_abs_error, 1e-10);
  }
  const auto r = verify_multiplier_identity(5, 2, {1, 1}, 1, 20, 100, default_d_matrices());
  EXPECT_TRUE(r.deterministic);
  EXPECT_LE(r.max_abs_error, 1e-10);
  // three facet normals in R^3: U_i = 0, Ψ = ‖u_1∧u_2∧u_3‖²
  const auto r3 = verify_multiplier_identity(5, 3, {2, 2, 2}, 1, 20, 100, default_d_matrices());
  EXPECT_TRUE(r3.deterministic);
  EXPECT_LE(r3.max_abs_error, 1e-10);
}

TEST(MultiplierIdentity, ReducedPsiForPositiveJ) {
  // the closed form used by the flag route, checked against the Lemma 5 target directly
  Rng rng(8);
  for (auto [d, r] : std::vector<std::pair<int, std::vector<int>>>{{3, {2, 2}}, {4, {2, 3}}, {4, {3, 3, 3}}}) {
    const int k = int(r.size());
    std::vector<int> dims;
    for (int x : r) dims.push_back(d - 1 - x);
    const auto a = coeffs(d, dims);
    for (int t = 0; t < 5; ++t) {
      std::vector<Vec> u;
      std::vector<Subspace> A;
      std::vector<Vec> cols;
      for (int i = 0; i < k; ++i) {
        u.push_back(uniform_sphere(rng, d));
        A.push_back(uniform_subspace(u.back(), dims[size_t(i)], rng));
        for (int c = 0; c < A.back().dim(); ++c) cols.push_back(A.back().frame().col(c));
        cols.push_back(u.back());
      }
      const double target = wedge_norm_sq(cols);
      const auto e = mc_mean(derive_seed(8, t), 20000, [&](Rng& g) {
        std::vector<Subspace> U;
        double w = 1.0;
        for (int i = 0; i < k; ++i) {
          U.push_back(uniform_subspace(u[size_t(i)], dims[size_t(i)], g));
          w *= subspace_product_sq(U.back(), A[size_t(i)]);
        }
        return w * psi_kernel(u, U, a);
      });
      EXPECT_NEAR(e.value, target, 3.0 * e.std_error + 1e-12) << d << " " << k;
    }
  }
}

// ---- bounds and continuity

TEST(MultiplierBound, WedgeOfCompletions) {
  // ‖V^1_{n_1}∧⋯∧V^k_{n_k}‖ ≤ d√k‖u|L^⊥‖ for every index choice of every completion.
  Rng rng(12);
  int cases = 0;
  for (int t = 0; t < 10000; ++t) {
    const int d = 2 + int(rng() % 3);
    const int k = 2 + int(rng() % 2);
    std::vector<int> n(size_t(k), 0);
    for (int left = d; left > 0;) {
      const size_t i = size_t(rng() % size_t(k));
      if (n[i] < d - 1) {
        ++n[i];
        --left;
      }
    }
    const auto u = (t % 2) ? clustered_units(rng, d, k) : mixvol::testing::random_units(rng, d, k);
    const double bound = d * std::sqrt(double(k)) * unit_l_perp(u);
    std::vector<Mat> b;
    for (const auto& v : u) b.push_back(random_basis(v, rng));
    Mat m(d, d);
    int c = 0;
    for (int i = 0; i < k; ++i) {
      const auto sets = k_subsets(d - 1, n[size_t(i)]);
      const auto& s = sets[rng() % sets.size()];
      for (int x : s) m.col(c++) = b[size_t(i)].col(x);
    }
    ASSERT_LE(std::sqrt(wedge_norm_sq(m)), bound * (1 + 1e-9) + 1e-15) << t;
    ++cases;
  }
  EXPECT_EQ(cases, 10000);
}

TEST(MultiplierBound, PsiTermwise) {
  // each ‖V_{I_1}∧u_1∧⋯∧V_{I_k}∧u_k‖² ≤ ‖u_1∧⋯∧u_k‖²
  Rng rng(13);
  for (int t = 0; t < 2000; ++t) {
    const int d = 3 + int(rng() % 2);
    const int k = 2;
    const auto u = (t % 2) ? clustered_units(rng, d, k) : mixvol::testing::random_units(rng, d, k);
    const double wu = wedge_norm_sq(u);
    // r with Σr ≥ d, 1 ≤ r_i ≤ d−1
    std::vector<int> r;
    for (int i = 0; i < k; ++i) r.push_back(1 + int(rng() % size_t(d - 1)));
    if (r[0] + r[1] < d) r[0] = d - r[1];
    std::vector<Vec> cols;
    for (int i = 0; i < k; ++i) {
      const Mat b = random_basis(u[size_t(i)], rng);
      const auto sets = k_subsets(d - 1, d - 1 - r[size_t(i)]);
      for (int x : sets[rng() % sets.size()]) cols.push_back(b.col(x));
      cols.push_back(u[size_t(i)]);
    }
    ASSERT_LE(wedge_norm_sq(cols), wu * (1 + 1e-9) + 1e-15);
  }
}

namespace {

// Rotation about a fixed axis w by the angle h‖w‖ (Rodrigues).
struct Path {
  Vec w;
  Mat at(double h) const {
    const double th = h * w.norm();
    const Vec a = w.normalized();
    Mat k(3, 3);
    k << 0, -a[2], a[1], a[2], 0, -a[0], -a[1], a[0], 0;
    return Mat::Identity(3, 3) + std::sin(th) * k + (1 - std::cos(th)) * k * k;
  }
};

}  // namespace

TEST(Continuity, LipschitzAlongGeodesics) {
  Rng rng(14);
  const auto a12 = coeffs(3, {1, 2});
  const auto a22 = coeffs(3, {0, 0});
  auto phi = [&](const std::vector<Vec>& u, const std::vector<Subspace>& w) { return phi_kernel(u, w, a12); };
  auto psi = [&](const std::vector<Vec>& u, const std::vector<Subspace>& w) { return psi_kernel(u, w, a22); };
  for (int which = 0; which < 2; ++which) {
    std::vector<double> ratios;
    for (int seg = 0; seg < 100; ++seg) {
      std::vector<Vec> u;
      std::vector<Subspace> w;
      std::vector<Path> paths;
      for (int i = 0; i < 2; ++i) {
        u.push_back(uniform_sphere(rng, 3));
        const int dim = which == 0 ? (i == 0 ? 1 : 2) : 0;
        w.push_back(uniform_subspace(u.back(), dim, rng));
        paths.push_back({gaussian_vector(rng, 3)});
      }
      auto f = [&](double h) {
        std::vector<Vec> uu;
        std::vector<Subspace> ww;
        for (int i = 0; i < 2; ++i) {
          const Mat r = paths[size_t(i)].at(h);
          uu.push_back(r * u[size_t(i)]);
          ww.push_back(Subspace::from_orthonormal(r * w[size_t(i)].frame()));
        }
        return which == 0 ? phi(uu, ww) : psi(uu, ww);
      };
      double worst = 0.0;
      const double step = 1e-3;
      double prev = f(0.0);
      for (int s = 1; s <= 200; ++s) {
        const double cur = f(s * step);
        worst = std::max(worst, std::abs(cur - prev) / step);
        prev = cur;
      }
      ratios.push_back(worst);
    }
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    EXPECT_GT(median, 0.0);
    for (double r : ratios) EXPECT_LE(r, 10.0 * median) << which;
  }
}

// ---- flag representations

namespace {

std::vector<const Polytope*> ptrs(const std::vector<Polytope>& p) {
  std::vector<const Polytope*> out;
  for (const auto& q : p) out.push_back(&q);
  return out;
}

}  // namespace

TEST(FlagMixedVolume, SquareDiamond) {
  const std::vector<Polytope> qd{square(), diamond()};
  FlagOptions o;
  o.seed = 31;
  o.samples = 100000;
  const auto e = flag_mixed_volume(ptrs(qd), {1, 1}, o);
  EXPECT_NEAR(e.value, 2.0, 3.0 * e.std_error);
  EXPECT_GT(e.std_error, 0.0);
}

TEST(FlagMixedVolume, RotatedCubeMatchesOracle) {
  Rng rng(40);
  for (int s = 0; s < 3; ++s) {
    const std::vector<Polytope> p{unit_cube(3), unit_cube(3).transformed(random_rotation(rng, 3))};
    const auto table = oracle_mixed_volumes(p);
    FlagOptions o;
    o.seed = 41 + std::uint64_t(s);
    o.samples = 40000;
    for (const std::vector<int>& n : {std::vector<int>{1, 2}, std::vector<int>{2, 1}}) {
      const auto e = flag_mixed_volume(ptrs(p), n, o);
      EXPECT_NEAR(e.value, table.at(n), 3.0 * e.std_error) << s;
    }
  }
}

TEST(FlagMixedVolume, ThreeBodies) {
  Rng rng(42);
  const std::vector<Polytope> p{unit_cube(3), unit_simplex(3).transformed(random_rotation(rng, 3)),
                                cross_polytope(3).transformed(random_rotation(rng, 3))};
  FlagOptions o;
  o.seed = 43;
  o.samples = 40000;
  const auto e = flag_mixed_volume(ptrs(p), {1, 1, 1}, o);
  EXPECT_NEAR(e.value, oracle_mixed_volume(p, {1, 1, 1}), 3.0 * e.std_error);
}

TEST(FlagMixedVolume, EpsilonMonotone) {
  const std::vector<Polytope> qd{square(), diamond()};
  FlagOptions o;
  o.seed = 32;
  o.samples = 50000;
  double prev = 0.0;
  for (double eps : {0.8, 0.4, 0.2, 0.1}) {
    o.epsilon = eps;
    const double v = flag_mixed_volume(ptrs(qd), {1, 1}, o).value;
    EXPECT_GE(v, prev) << eps;
    prev = v;
  }
  o.epsilon = 0.0;
  EXPECT_NEAR(prev, flag_mixed_volume(ptrs(qd), {1, 1}, o).value, 1e-12);
  o.epsilon = 0.8;
  EXPECT_LT(flag_mixed_volume(ptrs(qd), {1, 1}, o).value, 2.0);
}

TEST(FlagMixedVolume, NonGeneralPosition) {
  const std::vector<Polytope> qq{square(), square()};
  FlagOptions o;
  o.samples = 2000;
  EXPECT_THROW(flag_mixed_volume(ptrs(qq), {1, 1}, o), DivergenceError);
  o.epsilon = 0.3;
  const auto e = flag_mixed_volume(ptrs(qq), {1, 1}, o);
  EXPECT_TRUE(std::isfinite(e.value));
  EXPECT_LE(e.value, 1.0 + 3.0 * e.std_error);
}

TEST(FlagMixedVolume, RotationEquivariance) {
  Rng rng(44);
  const Mat r = random_rotation(rng, 3);
  const Mat r2 = random_rotation(rng, 3);
  const std::vector<Polytope> p{unit_cube(3), unit_simplex(3).transformed(r2)};
  const std::vector<Polytope> q{p[0].transformed(r), p[1].transformed(r)};
  FlagOptions o;
  o.samples = 40000;
  o.seed = 45;
  const auto a = flag_mixed_volume(ptrs(p), {1, 2}, o);
  o.seed = 46;
  const auto b = flag_mixed_volume(ptrs(q), {1, 2}, o);
  EXPECT_NEAR(a.value, b.value, 3.0 * std::hypot(a.std_error, b.std_error));
}

TEST(FlagMixedFunctional, SquareDiamond) {
  const std::vector<Polytope> qd{square(), diamond()};
  FlagOptions o;
  o.seed = 33;
  const auto e = flag_mixed_functional(ptrs(qd), {1, 1}, o);
  EXPECT_NEAR(e.value, 4.0, 3.0 * e.std_error);
}

TEST(FlagMixedFunctional, RotatedSquares) {
  // Q and ρQ: the target is 2V(Q,−ρQ), from the oracle
  Rng rng(50);
  for (int s = 0; s < 3; ++s) {
    const double th = 2 * std::numbers::pi * uniform01(rng);
    const std::vector<Polytope> p{square(), square().transformed(rotation2(th))};
    FlagOptions o;
    o.seed = 51 + std::uint64_t(s);
    const auto e = flag_mixed_functional(ptrs(p), {1, 1}, o);
    const double want = 2.0 * oracle_mixed_volume({p[0], p[1].reflected()}, {1, 1});
    EXPECT_NEAR(e.value, want, 3.0 * e.std_error) << th;
    EXPECT_NEAR(want, 2.0 * (std::abs(std::cos(th)) + std::abs(std::sin(th))), 1e-9);
  }
}

TEST(FlagMixedFunctional, DualityInThreeDimensions) {
  // k = 2, Σr = d: V_{r,d−r}(K,L) = binom(d,r)V(K[r],−L[d−r])
  Rng rng(52);
  const std::vector<Polytope> p{unit_cube(3), unit_simplex(3).transformed(random_rotation(rng, 3))};
  FlagOptions o;
  o.seed = 53;
  o.samples = 40000;
  for (int r : {1, 2}) {
    const auto e = flag_mixed_functional(ptrs(p), {r, 3 - r}, o);
    const double want = binom(3, r) * oracle_mixed_volume({p[0], p[1].reflected()}, {r, 3 - r});
    EXPECT_NEAR(e.value, want, 3.0 * e.std_error) << r;
  }
}

TEST(FlagMixedFunctional, NonGeneralPosition) {
  const std::vector<Polytope> qq{square(), square()};
  FlagOptions o;
  o.samples = 1000;
  EXPECT_THROW(flag_mixed_functional(ptrs(qq), {1, 1}, o), DivergenceError);
  o.require_general_position = false;
  o.epsilon = 0.2;
  EXPECT_TRUE(std::isfinite(flag_mixed_functional(ptrs(qq), {1, 1}, o).value));
}

TEST(FlagMixedFunctional, Reproducible) {
  Rng rng(54);
  const std::vector<Polytope> p{unit_cube(3), unit_cube(3).transformed(random_rotation(rng, 3))};
  FlagOptions o;
  o.seed = 55;
  o.samples = 5000;
  const auto a = flag_mixed_functional(ptrs(p), {2, 2}, o);
  const auto b = flag_mixed_functional(ptrs(p), {2, 2}, o);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
}
