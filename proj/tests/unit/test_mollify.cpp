#include "fbheat/errors.hpp"
#include "fbheat/mollify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace fbheat;

namespace {

constexpr double kPi = std::numbers::pi;

double heat(double t, double r) { return std::pow(4.0 * kPi * t, -1.5) * std::exp(-r * r / (4.0 * t)); }

ScalarField gaussian_field(double t) {
  ScalarInfo info;
  info.id = "gaussian";
  return ScalarField::radial(3, [t](double r) { return heat(t, r); }, info);
}

}  // namespace

TEST(Mollify, ClaimOneBoundFormula) {
  EXPECT_DOUBLE_EQ(mollified_sup_bound(1.0, 0.0, 3, 0.5), std::sqrt(3.0 / 4.0));
  EXPECT_DOUBLE_EQ(mollified_sup_bound(0.25, 2.0, 3, 0.1), std::sqrt(0.25 * 3.0 / 0.8 + 2.0));
}

TEST(Mollify, HeatSemigroupOnGaussianProfile) {
  const double s = 0.3, eps = 0.2;
  const auto smooth = mollify_scalar(gaussian_field(s), eps);
  for (double r : {0.0, 0.4, 1.1, 2.5}) EXPECT_NEAR(smooth(Vec::Unit(3, 0) * r), heat(s + eps, r), 1e-6 * heat(s + eps, 0.0));
}

TEST(Mollify, LinearFieldIsInvariant) {
  DriftMetadata meta;
  meta.id = "identity-field";
  meta.delta = std::numeric_limits<double>::infinity();
  meta.c_delta = std::numeric_limits<double>::infinity();
  const auto b = DriftField::radial(3, [](double r) { return r; }, [](double) { return 3.0; }, meta);
  const auto g = mollify_radial_vector_profile(b.radial_profile(), 3, 0.3);
  for (double r : {0.05, 0.5, 2.0}) EXPECT_NEAR(g(r), r, 1e-8);
}

TEST(Mollify, CartesianConvolutionOfGaussian) {
  const double s = 0.25, eps = 0.05;
  const GridSpec target = GridSpec::cartesian(3, 2.0, 20);
  const auto m = mollify(gaussian_field(s), eps, target);
  const Mesh& mesh = *m.values.mesh;
  double worst = 0.0;
  for (Index i = 0; i < mesh.size(); ++i) {
    const double r = mesh.radius(i);
    if (r > 1.0) continue;
    worst = std::max(worst, std::abs(m.values.values[i] - heat(s + eps, r)) / heat(s + eps, 0.0));
  }
  EXPECT_LE(worst, 2e-2);
  EXPECT_THROW(mollify(gaussian_field(s), eps, target, 0.5 * required_padding(eps)), InvalidArgument);
}

TEST(Mollify, HardyDriftBecomesBoundedWithClaimBound) {
  const auto b = hardy_drift(3, 1.0, HardySign::Attracting);
  for (double eps : {1.0, 0.1, 0.01}) {
    const auto be = mollify_drift(b, eps);
    const double bound = mollified_sup_bound(1.0, 0.0, 3, eps);
    double sup = 0.0;
    for (double r = 1e-3 * std::sqrt(eps); r < 20.0 * std::sqrt(eps); r *= 1.05)
      sup = std::max(sup, std::abs(be.radial_component(r)));
    EXPECT_LE(sup, bound * 1.02) << eps;
    EXPECT_GT(sup, 0.0);
    EXPECT_TRUE(be.meta().singular_points.empty());
    EXPECT_NO_THROW(be(Vec::Zero(3)));
  }
}

TEST(Mollify, DivergenceCommutesWithMollifier) {
  const auto be = mollify_drift(hardy_drift(3, 0.25, HardySign::Attracting), 0.1);
  for (double r : {0.1, 0.4, 1.0}) {
    const double h = 1e-4 * r;
    const double g = be.radial_component(r);
    const double dg = (be.radial_component(r + h) - be.radial_component(r - h)) / (2.0 * h);
    const double div = dg + 2.0 * g / r;
    EXPECT_NEAR(be.radial_divergence(r), div, 1e-5 * std::abs(div)) << r;
  }
}

TEST(Mollify, PreservationClaimsForAttractingHardy) {
  const auto rep = verify_preservation(hardy_drift(3, 0.25, HardySign::Attracting), {1.0, 0.1, 0.01});
  EXPECT_TRUE(rep.all_pass());
  EXPECT_NO_THROW(rep.throw_if_failed());
  int counted = 0;
  for (const auto& c : rep.results)
    if (!c.skipped) {
      ++counted;
      if (c.claim == "divergence-sign") EXPECT_GE(c.lhs, c.rhs) << c.epsilon;
      else EXPECT_LE(c.lhs, c.rhs) << c.claim << " " << c.epsilon;
    }
  EXPECT_GE(counted, 12);
}

TEST(Mollify, KatoPreservedForBallPotential) {
  PreservationOptions opt;
  opt.potential = indicator_ball(3);
  opt.potential_kato = KatoData{0.5, 0.0};
  const auto rep = verify_preservation(zero_drift(3), {0.1}, opt);
  EXPECT_TRUE(rep.all_pass());
}
