#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "regcomp/models.hpp"
#include "regcomp/oracles.hpp"
#include "regcomp/rng.hpp"

using namespace regcomply;

namespace {

void expect_vec_near(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "index " << i;
}

}  // namespace

TEST(Project, TopTwoMagnitudes) {
  const auto p = project_model(ModelSet::sparse(2, 4), Point::vector({3, -1, 2, 0.5}));
  expect_vec_near(p.data, {3, 0, 2, 0}, 0);
}

TEST(Project, ZeroStaysZero) {
  const auto p = project_model(ModelSet::sparse(1, 3), Point::vector({0, 0, 0}));
  expect_vec_near(p.data, {0, 0, 0}, 0);
}

TEST(Project, DiagonalEigenvalueTruncation) {
  const auto p = project_model(ModelSet::low_rank_sym(1, 3), Point::diag({3, 2, 1}));
  expect_vec_near(p.dense().a, Point::diag({3, 0, 0}).dense().a, 1e-12);
}

TEST(Project, TieTakesLowestIndex) {
  const Point z = Point::vector({1, 1});
  const auto p = project_model(ModelSet::sparse(1, 2), z);
  expect_vec_near(p.data, {1, 0}, 0);
  EXPECT_DOUBLE_EQ(norm_sq(z - p), 1.0);
  EXPECT_DOUBLE_EQ(inner(z, p), norm_sq(p));
}

TEST(Project, LevelsThresholdsEachBlock) {
  const auto p = project_model(ModelSet::levels(1, 2, 3, 3), Point::vector({1, -5, 2, 0.1, 3, -4}));
  expect_vec_near(p.data, {0, -5, 0, 0, 3, -4}, 0);
}

TEST(Project, DimensionMismatchThrows) {
  EXPECT_THROW(project_model(ModelSet::sparse(1, 3), Point::vector({1, 2})), ConfigError);
}

TEST(Project, PythagorasAndInnerIdentity) {
  Rng rng = make_stream(7, 0, 1);
  const std::vector<ModelSet> models{ModelSet::sparse(2, 7), ModelSet::low_rank_sym(2, 5),
                                     ModelSet::levels(1, 2, 4, 5)};
  for (const auto& m : models)
    for (int t = 0; t < 10000; ++t) {
      const Point z = sphere_point(m, rng);
      const Point p = project_model(m, z);
      const double zz = norm_sq(z);
      EXPECT_LE(std::abs(zz - norm_sq(p) - norm_sq(z - p)), 1e-10 * zz);
      EXPECT_LE(std::abs(inner(z, p) - norm_sq(p)), 1e-10 * zz);
    }
}

TEST(Secant, DoublesAndClamps) {
  EXPECT_EQ(to_string(secant_model(ModelSet::sparse(2, 10))), to_string(ModelSet::sparse(4, 10)));
  EXPECT_EQ(to_string(secant_model(ModelSet::low_rank_sym(1, 5))), to_string(ModelSet::low_rank_sym(2, 5)));
  EXPECT_EQ(to_string(secant_model(ModelSet::sparse(3, 4))), to_string(ModelSet::sparse(4, 4)));
  EXPECT_EQ(to_string(secant_model(ModelSet::levels(1, 3, 4, 5))), to_string(ModelSet::levels(2, 5, 4, 5)));
}

TEST(ModelNorm, Examples) {
  EXPECT_NEAR(model_norm(ModelSet::sparse(1, 2), Point::vector({1, 1})), 2.0, 1e-12);
  EXPECT_NEAR(model_norm(ModelSet::sparse(2, 3), Point::vector({1, 1, 0})), std::sqrt(2.0), 1e-12);
  EXPECT_EQ(model_norm(ModelSet::sparse(1, 3), Point::vector({0, 0, 0})), 0.0);
}

TEST(ModelNorm, FrozenValues) {
  // Certified by the convex-program bracket.
  EXPECT_NEAR(k_support_norm({3, 1, 1}, 2), 3.605551275463989, 1e-9);
  EXPECT_NEAR(k_support_norm({1, 1, 1}, 2), 2.1213203435596424, 1e-9);
}

TEST(ModelNorm, LevelsUnsupported) {
  EXPECT_THROW(model_norm(ModelSet::levels(1, 1, 3, 3), Point::vector({1, 0, 0, 1, 0, 0})), Unsupported);
}

TEST(ModelNorm, MatchesConvexProgram) {
  Rng rng = make_stream(11, 0, 2);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(3, n))(rng);
    auto z = gaussian_vector(rng, n);
    if (t % 3 == 0) z[0] = z[n - 1];  // magnitude ties
    const double v = model_norm(ModelSet::sparse(k, n), Point::vector(z));
    const auto br = oracle::model_norm_admm(z, k);
    EXPECT_LE(br.upper - br.lower, 1e-6 * std::max(1.0, br.upper));
    EXPECT_GE(v, br.lower - 1e-6);
    EXPECT_LE(v, br.upper + 1e-6);
  }
}

TEST(ModelNorm, EqualsEuclideanOnModel) {
  Rng rng = make_stream(12, 0, 3);
  for (int t = 0; t < 500; ++t) {
    const ModelSet m = ModelSet::sparse(3, 9);
    const Point x = model_sphere_point(m, rng);
    EXPECT_NEAR(model_norm(m, x), norm(x), 1e-9);
    const ModelSet lr = ModelSet::low_rank_sym(2, 5);
    const Point y = model_sphere_point(lr, rng);
    EXPECT_NEAR(model_norm(lr, y), norm(y), 1e-9);
  }
}

TEST(ModelNorm, NuclearLowerBound) {
  Rng rng = make_stream(13, 0, 4);
  for (int t = 0; t < 500; ++t) {
    const std::size_t k = 1 + t % 3;
    const auto v = gaussian_vector(rng, 8);
    double l1 = 0;
    for (double x : v) l1 += std::abs(x);
    const double s = model_norm(ModelSet::sparse(k, 8), Point::vector(v));
    EXPECT_GE(s * s, l1 * l1 / static_cast<double>(k) - 1e-9);

    const ModelSet lr = ModelSet::low_rank_sym(1 + t % 2, 4);
    const Point z = sphere_point(lr, rng);
    double nuc = 0;
    for (double x : spectrum(z)) nuc += std::abs(x);
    const double sz = model_norm(lr, z);
    EXPECT_GE(sz * sz, nuc * nuc / static_cast<double>(lr.k) - 1e-9);
  }
}

TEST(ModelNorm, MonotoneInMagnitudes) {
  Rng rng = make_stream(14, 0, 5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    auto v = gaussian_vector(rng, 7);
    auto w = v;
    for (auto& x : w) x *= 1.0 + u(rng);
    const ModelSet m = ModelSet::sparse(1 + t % 4, 7);
    EXPECT_LE(model_norm(m, Point::vector(v)), model_norm(m, Point::vector(w)) + 1e-12);
  }
}

TEST(ModelNorm, SignedPermutationInvariant) {
  Rng rng = make_stream(15, 0, 6);
  for (int t = 0; t < 1000; ++t) {
    const auto v = gaussian_vector(rng, 6);
    std::vector<std::size_t> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> w(6);
    for (std::size_t i = 0; i < 6; ++i) w[i] = (rng() & 1 ? -1.0 : 1.0) * v[perm[i]];
    const ModelSet m = ModelSet::sparse(1 + t % 3, 6);
    EXPECT_EQ(model_norm(m, Point::vector(v)), model_norm(m, Point::vector(w)));
  }
}

TEST(Eig, DiagonalIsSorted) {
  const auto e = eig_sym(Point::diag({3, -1, 2}).dense());
  expect_vec_near(e.values, {3, 2, -1}, 1e-14);
  for (double x : e.vectors.a) EXPECT_TRUE(std::abs(x) < 1e-14 || std::abs(std::abs(x) - 1) < 1e-14);
}

TEST(Eig, Identity) {
  const auto e = eig_sym(Matrix::identity(4));
  expect_vec_near(e.values, {1, 1, 1, 1}, 1e-14);
}

TEST(Eig, TwoByTwoSwap) {
  Matrix z(2, 2);
  z(0, 1) = z(1, 0) = 1;
  const auto e = eig_sym(z);
  EXPECT_NEAR(std::abs(e.values[0]), 1, 1e-14);
  EXPECT_NEAR(e.values[0] + e.values[1], 0, 1e-14);
  for (double x : e.vectors.a) EXPECT_NEAR(std::abs(x), 1 / std::sqrt(2.0), 1e-12);
}

TEST(Eig, NonSymmetricRejected) {
  Matrix z(2, 2);
  z(0, 1) = 1;
  EXPECT_THROW(eig_sym(z), ConfigError);
}

TEST(Eig, RotatedDiagonalRecoversSpectrum) {
  Rng rng = make_stream(16, 0, 7);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + t % 9;
    auto d = gaussian_vector(rng, n);
    if (t % 4 == 0) d[0] = -d[1];  // magnitude tie
    const Matrix U = random_orthogonal(rng, n);
    const Matrix z = reconstruct(U, d);
    const auto e = eig_sym(z);
    auto want = d, got = e.values;
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], want[i], 1e-9);
    for (std::size_t i = 1; i < n; ++i) EXPECT_GE(std::abs(e.values[i - 1]), std::abs(e.values[i]));
    Matrix diff = reconstruct(e.vectors, e.values);
    for (std::size_t i = 0; i < diff.a.size(); ++i) diff.a[i] -= z.a[i];
    EXPECT_LE(frobenius(diff), 1e-10 * frobenius(z));
    const Matrix utu = matmul(transpose(e.vectors), e.vectors);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(utu(i, j), i == j ? 1.0 : 0.0, 1e-10);
  }
}

TEST(Point, PackedInnerMatchesFrobenius) {
  Rng rng = make_stream(17, 0, 8);
  const ModelSet m = ModelSet::low_rank_sym(2, 4);
  const Point x = sphere_point(m, rng), y = sphere_point(m, rng);
  const Matrix X = x.dense(), Y = y.dense();
  double f = 0;
  for (std::size_t i = 0; i < X.a.size(); ++i) f += X.a[i] * Y.a[i];
  EXPECT_NEAR(inner(x, y), f, 1e-14);
  EXPECT_NEAR(norm(x), 1.0, 1e-12);
}

TEST(SingularValues, SquaresMatchGramSpectrum) {
  Rng rng = make_stream(18, 0, 9);
  for (int t = 0; t < 200; ++t) {
    const std::size_t m = 1 + t % 6, n = 1 + t % 5;
    Matrix a(m, n);
    for (auto& x : a.a) x = gaussian_vector(rng, 1)[0];
    auto sv = singular_values(a);
    for (auto& s : sv) s *= s;
    auto ev = eig_sym(matmul(transpose(a), a)).values;
    std::sort(sv.begin(), sv.end());
    std::sort(ev.begin(), ev.end());
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(sv[i], ev[i], 1e-10);
  }
}

TEST(SingularValues, KeepsSmallValuesAccurate) {
  // Columns (1, 0) and (1, e): singular values near sqrt(2) and e/sqrt(2).
  Matrix a(2, 2);
  a(0, 0) = a(0, 1) = 1.0;
  a(1, 1) = 1e-9;
  auto sv = singular_values(a);
  std::sort(sv.begin(), sv.end());
  EXPECT_NEAR(sv[0] / (1e-9 / std::sqrt(2.0)), 1.0, 1e-12);
}
