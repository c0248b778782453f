#include "fbheat/catalog.hpp"
#include "fbheat/errors.hpp"
#include "fbheat/fields.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace fbheat;

TEST(Grid, RadialVolumesFillTheShell) {
  const Mesh mesh(GridSpec::radial(3, 5.0, 300, 1e-3));
  const double r0 = 5e-3;
  EXPECT_NEAR(mesh.volumes().sum(), 4.0 * std::numbers::pi / 3.0 * (125.0 - r0 * r0 * r0), 1e-9);
}

TEST(Grid, CartesianIndexingAndInterpolation) {
  const Mesh mesh(GridSpec::cartesian(3, 1.5, 7));
  EXPECT_NEAR(mesh.volumes().sum(), 27.0, 1e-12);
  for (Index i = 0; i < mesh.size(); i += 13) EXPECT_EQ(mesh.index(mesh.multi_index(i)), i);
  Vec f(mesh.size());
  for (Index i = 0; i < mesh.size(); ++i) {
    const Vec p = mesh.point(i);
    f[i] = 2.0 * p[0] - p[1] + 0.5 * p[2];
  }
  Vec x(3);
  x << 0.13, -0.4, 0.77;
  EXPECT_NEAR(mesh.interpolate(f, x), 2.0 * 0.13 + 0.4 + 0.5 * 0.77, 1e-12);
  const GridSpec fine = mesh.spec().refined();
  EXPECT_EQ(fine.points[0], 14);
}

TEST(Fields, HardyMetadataAndSingularity) {
  const auto b = hardy_drift(3, 0.25, HardySign::Attracting);
  EXPECT_EQ(b.meta().sign, DivergenceSign::Nonnegative);
  EXPECT_DOUBLE_EQ(b.meta().delta, 0.25);
  ASSERT_EQ(b.meta().singular_points.size(), 1u);
  EXPECT_THROW(b(Vec::Zero(3)), SingularPointError);
  Vec x(3);
  x << 0.0, 2.0, 0.0;
  // b = sqrt(delta) (d-2)/2 |x|^{-2} x
  EXPECT_NEAR(b(x)[1], 0.25 * 0.5, 1e-15);
  EXPECT_NEAR(b.divergence(x), 0.25 / 4.0, 1e-15);
  const auto r = hardy_drift(3, 1.0, HardySign::Repelling);
  EXPECT_EQ(r.meta().sign, DivergenceSign::Nonpositive);
}

TEST(Fields, ScalingFlipsSignAndScalesConstants) {
  const auto b = hardy_drift(3, 1.0, HardySign::Attracting).scaled(-2.0);
  EXPECT_EQ(b.meta().sign, DivergenceSign::Nonpositive);
  EXPECT_DOUBLE_EQ(b.meta().delta, 4.0);
}

TEST(Fields, NumericDivergenceOfLinearAndTanh) {
  const auto mesh = make_mesh(GridSpec::cartesian(3, 2.0, 16));
  const auto lin = numeric_divergence(linear_drift(3, 0.7), mesh);
  for (Index i = 0; i < mesh->size(); i += 97) EXPECT_NEAR(lin.values[i], 2.1, 1e-10);
  // Second-order convergence towards -1.5 sech^2(x1).
  auto error = [](int n) {
    const auto m = make_mesh(GridSpec::cartesian(3, 2.0, n));
    const auto th = numeric_divergence(tanh_drift(3, 1.5), m);
    double e = 0.0;
    for (Index i = 0; i < m->size(); ++i) {
      const double c = std::cosh(m->coordinate(i, 0));
      e = std::max(e, std::abs(th.values[i] + 1.5 / (c * c)));
    }
    return e;
  };
  const double e16 = error(16), e32 = error(32);
  EXPECT_LT(e16, 5e-2);
  EXPECT_GT(e16 / e32, 3.5);
  const auto th = numeric_divergence(tanh_drift(3, 1.5), mesh);
  const auto split = split_divergence(th);
  EXPECT_GE(split.plus.min(), 0.0);
  EXPECT_GE(split.minus.min(), 0.0);
}

TEST(Catalog, ParsesIdentifiers) {
  const auto id = CatalogId::parse("hardy:d=3,delta=0.5,sign=-");
  EXPECT_EQ(id.name, "hardy");
  EXPECT_DOUBLE_EQ(id.number("delta"), 0.5);
  EXPECT_EQ(id.text("sign", "+"), "-");
  EXPECT_EQ(drift_from_id("hardy:d=3,delta=0.5,sign=-").meta().sign, DivergenceSign::Nonpositive);
  EXPECT_EQ(matrix_from_id("checkerboard:d=3,a=1,b=3,cell=1").xi(), 3.0);
  EXPECT_EQ(matrix_from_id("checkerboard:d=3,a=1,b=3,cell=1").sigma(), 1.0);
  EXPECT_THROW(drift_from_id("nonsense:d=3"), InvalidArgument);
  EXPECT_THROW(matrix_from_id("nonsense"), InvalidArgument);
  EXPECT_THROW(scalar_from_id("constant:d=3"), InvalidArgument);
}

TEST(Fields, MatrixMustBePositiveDefinite) {
  MatrixParams p;
  p.matrix = Mat::Identity(3, 3);
  p.matrix(0, 0) = -1.0;
  EXPECT_THROW(make_matrix(MatrixKind::Constant, p), InvalidArgument);
  p.matrix = Mat::Identity(3, 3);
  p.matrix(0, 1) = 0.5;
  EXPECT_THROW(make_matrix(MatrixKind::Constant, p), InvalidArgument);
}
