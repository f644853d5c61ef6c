#include "mixvol/polytope.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace mixvol;
using mixvol::testing::vec;

namespace {
void expect_euler(const Polytope& p) {
  int s = 0;
  for (int j = 0; j < p.dim(); ++j) s += (j % 2 == 0 ? 1 : -1) * int(p.faces_of_dim(j).size());
  EXPECT_EQ(s, 1 + ((p.dim() - 1) % 2 == 0 ? 1 : -1));
}
}  // namespace

TEST(Hull, SquareDropsCenter) {
  Polytope p = Polytope::hull({vec({0, 0}), vec({1, 0}), vec({1, 1}), vec({0, 1}), vec({0.5, 0.5})});
  EXPECT_EQ(p.vertices().size(), 4u);
  EXPECT_EQ(p.facets().size(), 4u);
  EXPECT_NEAR(p.volume(), 1.0, 1e-14);
}

TEST(Hull, SimplexFacetCount) {
  for (int d = 2; d <= 4; ++d) {
    Polytope s = unit_simplex(d);
    EXPECT_EQ(int(s.facets().size()), d + 1);
    EXPECT_NEAR(s.volume(), 1.0 / std::tgamma(d + 1.0), 1e-12);
  }
}

TEST(Hull, CubeWithDuplicates) {
  std::vector<Vec> pts;
  for (int rep = 0; rep < 2; ++rep)
    for (int m = 0; m < 8; ++m) pts.push_back(vec({double(m & 1), double((m >> 1) & 1), double((m >> 2) & 1)}));
  pts.push_back(vec({0.5, 0.5, 0.5}));
  pts.push_back(vec({0.5, 0.5, 1.0}));
  Polytope p = Polytope::hull(pts);
  EXPECT_EQ(p.vertices().size(), 8u);
  EXPECT_EQ(p.facets().size(), 6u);
  EXPECT_EQ(p.faces_of_dim(0).size(), 8u);
  EXPECT_EQ(p.faces_of_dim(1).size(), 12u);
  EXPECT_EQ(p.faces_of_dim(2).size(), 6u);
  EXPECT_NEAR(p.volume(), 1.0, 1e-12);
}

TEST(Hull, DegenerateInputReportsDimension) {
  try {
    Polytope::hull({vec({0, 0, 0}), vec({1, 0, 0}), vec({0, 1, 0}), vec({1, 1, 0})});
    FAIL();
  } catch (const DegenerateInput& e) {
    EXPECT_EQ(e.intrinsic_dim, 2);
  }
  HullOptions opt;
  opt.allow_degenerate = true;
  Polytope sq = Polytope::hull({vec({0, 0, 0}), vec({1, 0, 0}), vec({0, 1, 0}), vec({1, 1, 0})}, opt);
  EXPECT_EQ(sq.dim(), 2);
  EXPECT_NEAR(sq.intrinsic_volume(2), 1.0, 1e-12);
  EXPECT_NEAR(sq.intrinsic_volume(1), 2.0, 1e-12);
  EXPECT_EQ(sq.volume(), 0.0);
}

TEST(Hull, DeterministicOrdering) {
  Rng rng(2);
  std::vector<Vec> pts;
  for (int i = 0; i < 20; ++i) pts.push_back(gaussian_vector(rng, 3));
  Polytope a = Polytope::hull(pts);
  std::reverse(pts.begin(), pts.end());
  Polytope b = Polytope::hull(pts);
  ASSERT_EQ(a.vertices().size(), b.vertices().size());
  for (size_t i = 0; i < a.vertices().size(); ++i) EXPECT_EQ(a.vertices()[i], b.vertices()[i]);
  ASSERT_EQ(a.facets().size(), b.facets().size());
  for (size_t i = 0; i < a.facets().size(); ++i) EXPECT_EQ(a.facets()[i].vertices, b.facets()[i].vertices);
}

TEST(FaceLattice, CountsAndVolumes) {
  Polytope sq = mixvol::testing::square();
  EXPECT_EQ(sq.faces_of_dim(0).size(), 4u);
  EXPECT_EQ(sq.faces_of_dim(1).size(), 4u);
  Polytope dia = mixvol::testing::diamond();
  for (int f : dia.faces_of_dim(1)) EXPECT_NEAR(dia.face(f).volume, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(dia.volume(), 2.0, 1e-12);
  EXPECT_NEAR(unit_cube(3).volume(), 1.0, 1e-12);
  EXPECT_NEAR(unit_cube(4).volume(), 1.0, 1e-12);
  EXPECT_NEAR(unit_simplex(2).volume(), 0.5, 1e-12);
}

TEST(FaceLattice, EulerRelationRandom) {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + trial % 3;
    Polytope p = mixvol::testing::random_polytope(rng, d, d + 3 + trial % 8);
    expect_euler(p);
    for (int j = 1; j < d; ++j)
      for (int f : p.faces_of_dim(j)) EXPECT_GT(p.face(f).volume, 0.0);
    for (const auto& f : p.faces()) EXPECT_EQ(f.cone.dim(), d - f.dim);
    for (const auto& fa : p.facets())
      for (const auto& v : p.vertices()) EXPECT_LE(fa.normal.dot(v) - fa.offset, 1e-9);
  }
}

TEST(FaceLattice, VolumeMatchesHullVolumeAndDivergence) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Polytope p = mixvol::testing::random_polytope(rng, 3, 12);
    EXPECT_NEAR(p.volume(), hull_volume(p.vertices()), 1e-10);
    // Divergence theorem: sum over facets of area * (n . c) / 3 = volume.
    double s = 0.0;
    for (int f : p.faces_of_dim(2)) {
      const Face& face = p.face(f);
      Vec n = face.cone.generators[0];
      s += face.volume * n.dot(face.centroid) / 3.0;
    }
    EXPECT_NEAR(s, p.volume(), 1e-10);
  }
}

TEST(Minkowski, Examples) {
  Polytope octagon = minkowski_sum(mixvol::testing::square(), mixvol::testing::diamond());
  EXPECT_EQ(octagon.vertices().size(), 8u);
  EXPECT_NEAR(octagon.volume(), 7.0, 1e-12);
  HullOptions opt;
  opt.allow_degenerate = true;
  Polytope origin = Polytope::hull({vec({0, 0})}, opt);
  Polytope same = minkowski_sum(mixvol::testing::square(), origin);
  EXPECT_NEAR(same.volume(), 1.0, 1e-12);
  Polytope sq = minkowski_sum(unit_segment(2, 0), unit_segment(2, 1));
  EXPECT_NEAR(sq.volume(), 1.0, 1e-12);
  Polytope ss = scaled_sum({2.0, 1.0}, {mixvol::testing::square(), mixvol::testing::diamond()});
  EXPECT_NEAR(ss.volume(), 4.0 + 2.0 * 2.0 * 2.0 + 2.0, 1e-12);
}

TEST(IntrinsicVolume, Examples) {
  Polytope sq = mixvol::testing::square();
  EXPECT_NEAR(sq.intrinsic_volume(0), 1.0, 1e-14);
  EXPECT_NEAR(sq.intrinsic_volume(1), 2.0, 1e-12);
  EXPECT_NEAR(sq.intrinsic_volume(2), 1.0, 1e-12);
  Polytope cube = unit_cube(3);
  EXPECT_NEAR(cube.intrinsic_volume(1), 3.0, 1e-12);
  EXPECT_NEAR(cube.intrinsic_volume(2), 3.0, 1e-12);
  // Regular simplex-free check: V_1 of a segment is its length.
  EXPECT_NEAR(unit_segment(3, 1).intrinsic_volume(1), 1.0, 1e-12);
}

TEST(IntrinsicVolume, SteinerPolynomialIn2D) {
  // Mean width identity in the plane: V_1 = perimeter / 2.
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    Polytope p = mixvol::testing::random_polytope(rng, 2, 7);
    double per = 0.0;
    for (int f : p.faces_of_dim(1)) per += p.face(f).volume;
    EXPECT_NEAR(p.intrinsic_volume(1), per / 2.0, 1e-12);
  }
}

TEST(IntrinsicVolume, ExternalAnglesTileSphere) {
  // For every j, the H^{d-1-j} cone measures sum with vertices' to the full sphere when j = 0.
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    Polytope p = mixvol::testing::random_polytope(rng, 2, 9);
    double s = 0.0;
    for (int f : p.faces_of_dim(0)) s += *cone_measure_exact(p.face(f).cone);
    EXPECT_NEAR(s, 2.0 * std::numbers::pi, 1e-10);
    double facets = 0.0;
    for (int f : p.faces_of_dim(1)) facets += p.external_angle(f);
    EXPECT_NEAR(facets, 0.5 * double(p.faces_of_dim(1).size()), 1e-12);
  }
}

TEST(IntrinsicVolume, TranslationInvariance) {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    Polytope p = mixvol::testing::random_polytope(rng, 3, 10);
    Polytope q = p.translated(gaussian_vector(rng, 3));
    for (int j = 0; j <= 3; ++j) EXPECT_NEAR(p.intrinsic_volume(j), q.intrinsic_volume(j), 1e-10);
    ASSERT_EQ(p.faces().size(), q.faces().size());
    for (size_t f = 0; f < p.faces().size(); ++f) {
      EXPECT_NEAR(p.faces()[f].volume, q.faces()[f].volume, 1e-10);
      EXPECT_TRUE(p.faces()[f].cone.span.same_span(q.faces()[f].cone.span));
    }
  }
}

TEST(AreaAtoms, TotalMassAndFacets) {
  Polytope sq = mixvol::testing::square();
  auto atoms = area_measure_atoms(sq, 1);
  ASSERT_EQ(atoms.size(), 4u);
  for (const auto& a : atoms) {
    EXPECT_NEAR(a.weight, 1.0, 1e-14);
    EXPECT_EQ(a.cone->dim(), 1);
  }
  // Total S_n mass: (1/omega_{d-n}) sum H^n(F) H^{d-1-n}(n(P,F)) = binom(d,n)^{-1} d kappa_{d-n} V_n / omega_{d-n}... compare with V_n.
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    Polytope p = mixvol::testing::random_polytope(rng, 3, 9);
    for (int n = 0; n <= 2; ++n) {
      double mass = 0.0, se2 = 0.0;
      for (const auto& a : area_measure_atoms(p, n)) {
        MCEstimate m = a.cone->dim() <= 2 ? MCEstimate{*cone_measure_exact(*a.cone), 0.0, 0, 0}
                                           : cone_measure_mc(*a.cone, 100 + a.face, 200000);
        mass += a.weight * m.value / omega(3 - n);
        se2 += std::pow(a.weight * m.std_error / omega(3 - n), 2);
      }
      const double target = p.intrinsic_volume(n);
      EXPECT_LE(std::abs(mass - target), std::max(1e-6, 4.0 * std::sqrt(se2))) << "n=" << n;
    }
  }
}

TEST(HalfspaceIntersection, CubeFromInequalities) {
  Mat a(6, 3);
  Vec b(6);
  for (int i = 0; i < 3; ++i) {
    a.row(2 * i) = Vec::Unit(3, i).transpose();
    b[2 * i] = 1.0;
    a.row(2 * i + 1) = -Vec::Unit(3, i).transpose();
    b[2 * i + 1] = 0.0;
  }
  auto p = Polytope::from_halfspaces(a, b);
  ASSERT_TRUE(p.has_value());
  EXPECT_NEAR(p->volume(), 1.0, 1e-12);
  EXPECT_EQ(p->facets().size(), 6u);
  EXPECT_NEAR(p->intrinsic_volume(1), 3.0, 1e-12);
  b[0] = -0.5;
  EXPECT_FALSE(Polytope::from_halfspaces(a, b).has_value());
}
