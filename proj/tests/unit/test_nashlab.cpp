#include "fbheat/errors.hpp"
#include "fbheat/nashlab.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fbheat;

namespace {

constexpr double kPi = std::numbers::pi;

GridFunction gaussian_on(const MeshPtr& mesh, double tau) {
  Vec v(mesh->size());
  for (Index i = 0; i < mesh->size(); ++i) {
    const double r = mesh->radius(i);
    v[i] = std::pow(4.0 * kPi * tau, -1.5) * std::exp(-r * r / (4.0 * tau));
  }
  return {mesh, v};
}

MeshPtr fine_radial() { return make_mesh(GridSpec::radial(3, 14.0, 4096, 1e-4)); }

HeatKernelEstimate slice(const MeshPtr& mesh, double tau) {
  HeatKernelEstimate k;
  k.s = 0.0;
  k.t = tau;
  k.source = Vec::Zero(3);
  k.direction = Direction::Adjoint;
  k.values = gaussian_on(mesh, tau);
  k.mass = k.values.integral();
  return k;
}

}  // namespace

TEST(NashLab, GaussianEntropyClosedForm) {
  const auto mesh = fine_radial();
  for (double tau : {0.25, 1.0, 2.0}) {
    const double q = entropy(gaussian_on(mesh, tau));
    EXPECT_NEAR(q, 1.5 * (std::log(4.0 * kPi * tau) + 1.0), 1e-5) << tau;
  }
}

TEST(NashLab, GaussianMomentAgainstMonteCarlo) {
  const double tau = 0.7;
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> n(0.0, std::sqrt(2.0 * tau));
  const int samples = 400000;
  double acc = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = n(rng), y = n(rng), z = n(rng);
    acc += std::sqrt(x * x + y * y + z * z);
  }
  const double mc = acc / samples;
  const double m = moment(gaussian_on(fine_radial(), tau), Vec::Zero(3));
  EXPECT_NEAR(m, mc, 5e-3 * mc);
  EXPECT_NEAR(m, 4.0 * std::sqrt(tau / kPi), 1e-6);
}

TEST(NashLab, MassDefectIsRejected) {
  auto u = gaussian_on(fine_radial(), 1.0);
  u.values *= 1.01;
  EXPECT_THROW(entropy(u), CheckFailure);
  EXPECT_THROW(moment(u, Vec::Zero(3)), CheckFailure);
  EXPECT_NO_THROW(entropy(u, 0.02));
  u = gaussian_on(fine_radial(), 1.0);
  Vec off = Vec::Zero(3);
  off[0] = 1.0;
  EXPECT_THROW(moment(u, off), InvalidArgument);
}

TEST(NashLab, GFunctionOfGaussian) {
  const auto mesh = fine_radial();
  const double tau = 1.0, beta = 0.5;
  const Vec o = Vec::Zero(3);
  const double g = g_function(gaussian_on(mesh, tau), beta, o, tau, o, o);
  // <k_beta, log k_1> = -(d/2) log(4 pi tau) - E|Y|^2 / (4 tau) with E|Y|^2 = 2 d beta tau.
  EXPECT_NEAR(g, -1.5 * std::log(4.0 * kPi * tau) - 1.5 * beta, 1e-5);
  Vec far = Vec::Zero(3);
  far[0] = 1.0;
  EXPECT_THROW(g_function(gaussian_on(mesh, tau), beta, o, tau, o, far), InvalidArgument);
}

TEST(NashLab, FisherInformationOfGaussian) {
  const auto mesh = fine_radial();
  for (double tau : {0.5, 1.0}) EXPECT_NEAR(dissipation(gaussian_on(mesh, tau)), 1.5 / tau, 2e-3 / tau);
}

TEST(NashLab, DiagnosticsOfGaussianSeries) {
  const auto mesh = fine_radial();
  std::vector<HeatKernelEstimate> series;
  for (int k = 1; k <= 10; ++k) series.push_back(slice(mesh, 0.1 * k));
  NashOptions opt;
  opt.with_dissipation = true;
  const auto n = nash_diagnostics(series, 1.5, opt);
  const double nee = 1.5 * (std::log(4.0 * kPi) + 1.0);
  EXPECT_NEAR(n.c_nee, nee, 1e-4);
  EXPECT_NEAR(n.c_minus, 4.0 / std::sqrt(kPi), 1e-4);
  EXPECT_NEAR(n.c_plus, 4.0 / std::sqrt(kPi), 1e-4);
  EXPECT_DOUBLE_EQ(n.beta, 16.0 * n.c_plus * n.c_plus);
  EXPECT_NEAR(n.tau_half, 0.5, 1e-12);
  // <k_beta(1/2), log(k_1(1/2) v floor)> by a radial trapezoid rule on [0, 200].
  const double th = 0.5, floor_log = std::log(1e-30 * std::pow(4.0 * kPi * th, -1.5));
  double g = 0.0;
  const int steps = 400000;
  const double dr = 200.0 / steps;
  for (int i = 0; i <= steps; ++i) {
    const double r = i * dr;
    const double w = 4.0 * kPi * r * r * std::pow(4.0 * kPi * n.beta * th, -1.5) * std::exp(-r * r / (4.0 * n.beta * th));
    const double lu = std::max(-1.5 * std::log(4.0 * kPi * th) - r * r / (4.0 * th), floor_log);
    g += (i == 0 || i == steps ? 0.5 : 1.0) * w * lu * dr;
  }
  EXPECT_NEAR(n.g_hat, g, 1e-3 * std::abs(g));
  EXPECT_NEAR(n.g_constant, -1.5 * std::log(th) - g, 1e-3 * std::abs(g));
  // e^{Q/d} / M is independent of tau for a Gaussian.
  const double ratio = std::exp(nee / 3.0) / (4.0 / std::sqrt(kPi));
  for (double r : n.entropy_moment.ratios) EXPECT_NEAR(r, ratio, 1e-4);
  ASSERT_EQ(n.dissipation.size(), 10u);
}

TEST(NashLab, DiagnosticsNeedAdjointSlicesAndHalfTime) {
  const auto mesh = fine_radial();
  std::vector<HeatKernelEstimate> series{slice(mesh, 0.3), slice(mesh, 1.0)};
  EXPECT_THROW(nash_diagnostics(series, 1.5), InvalidArgument);
  series.push_back(slice(mesh, 0.5));
  series.back().direction = Direction::Forward;
  EXPECT_THROW(nash_diagnostics(series, 1.5), InvalidArgument);
}

TEST(NashLab, EntropyMomentReport) {
  const auto rep = entropy_moment_check({3.0, 6.0}, {1.0, 2.0}, 3);
  EXPECT_NEAR(rep.sup, std::max(std::exp(1.0), std::exp(2.0) / 2.0), 1e-14);
  EXPECT_TRUE(rep.finite);
  EXPECT_THROW(entropy_moment_check({1.0}, {}, 3), InvalidArgument);
}
