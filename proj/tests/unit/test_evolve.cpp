#include "fbheat/errors.hpp"
#include "fbheat/evolve.hpp"
#include "fbheat/gaussian.hpp"
#include "fbheat/mollify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace fbheat;

namespace {

constexpr double kPi = std::numbers::pi;

ParabolicProblem problem(DriftField b) {
  return {make_matrix(MatrixKind::Identity, {}), std::move(b), Variant::Lambda, 2.0, {}, {}, {}};
}

SolverConfig radial_config(double r_max = 10.0, int points = 1024) {
  SolverConfig cfg;
  cfg.grid = GridSpec::radial(3, r_max, points);
  return cfg;
}

// u(t, 0; 0, y) = C t^{-(d-k)/2} |y|^{-k} e^{-|y|^2/4t} for the attracting Hardy drift in d = 3,
// k = sqrt(delta)/2, normalized so that the y-integral is 1.
double hardy_norm(double k) {
  double norm = 0.0;
  const int n = 200000;
  const double h = 40.0 / n;
  for (int i = 1; i <= n; ++i) {
    const double s = (i - 0.5) * h;
    norm += 4.0 * kPi * s * s * std::pow(s, -k) * std::exp(-s * s / 4.0) * h;
  }
  return norm;
}

double hardy_exact(double delta, double t, double r, double norm) {
  const double k = std::sqrt(delta) / 2.0;
  return std::pow(t, -(3.0 - k) / 2.0) * std::pow(r, -k) * std::exp(-r * r / (4.0 * t)) / norm;
}

}  // namespace

TEST(Evolve, BaselineRadialKernelIsGaussian) {
  const auto k = estimate_kernel(problem(zero_drift(3)), 0.0, 1.0, Vec::Zero(3), radial_config());
  double err = 0.0, peak = 0.0;
  for (Index i = 0; i < k.values.mesh->size(); ++i) {
    const double r = k.values.mesh->radius(i);
    const double exact = std::pow(4.0 * kPi, -1.5) * std::exp(-r * r / 4.0);
    peak = std::max(peak, exact);
    err = std::max(err, std::abs(k.values.values[i] - exact));
  }
  EXPECT_LE(err / peak, 1e-3);
  EXPECT_NEAR(k.mass, 1.0, 1e-9);
  EXPECT_NEAR(*k.row_mass, 1.0, 1e-9);
}

TEST(Evolve, AttractingHardyMatchesSelfSimilarKernel) {
  for (double delta : {0.25, 1.0}) {
    const auto k = estimate_kernel(problem(hardy_drift(3, delta, HardySign::Attracting)), 0.0, 1.0, Vec::Zero(3),
                                   radial_config());
    const double norm = hardy_norm(std::sqrt(delta) / 2.0);
    double worst = 0.0;
    for (Index i = 0; i < k.values.mesh->size(); ++i) {
      const double r = k.values.mesh->radius(i);
      if (r < 0.05 || r > 3.0) continue;
      worst = std::max(worst, std::abs(k.values.values[i] / hardy_exact(delta, 1.0, r, norm) - 1.0));
    }
    EXPECT_LE(worst, 0.02) << "delta " << delta;
  }
}

TEST(Evolve, ConstantDriftTransportsCentroid) {
  Vec v = Vec::Zero(3);
  v[0] = 1.0;
  const auto pb = problem(constant_drift(v));
  const double tau = 0.25;
  SolverConfig cfg;
  cfg.grid = GridSpec::cartesian(3, 1.25 * suggest_box_half_width(pb, tau), 28);
  for (auto dir : {Direction::Forward, Direction::Adjoint}) {
    const auto k = estimate_kernel(pb, 0.0, tau, Vec::Zero(3), cfg, dir);
    const Mesh& m = *k.values.mesh;
    Vec x1(m.size());
    for (Index i = 0; i < m.size(); ++i) x1[i] = m.coordinate(i, 0);
    const double centroid = m.integrate(x1.cwiseProduct(k.values.values)) / k.mass;
    const double expected = (dir == Direction::Forward ? 1.0 : -1.0) * (1.0 - cfg.dirac_fraction) * tau;
    EXPECT_NEAR(centroid, expected, 0.02 * tau) << to_string(dir);
    EXPECT_NEAR(k.mass, 1.0, 1e-6);
  }
}

TEST(Evolve, ChapmanKolmogorovOnRadialGrid) {
  const auto pb = problem(hardy_drift(3, 0.25, HardySign::Attracting));
  const auto cfg = radial_config();
  const auto series = estimate_kernel_series(pb, 0.0, {0.5, 1.0}, Vec::Zero(3), cfg);
  const auto two_step = solve(pb, series[0].values, 0.5, 1.0, cfg, Direction::Adjoint);
  const Vec& direct = series[1].values.values;
  const double peak = direct.maxCoeff();
  double worst = 0.0;
  for (Index i = 0; i < direct.size(); ++i)
    if (direct[i] > 1e-3 * peak) worst = std::max(worst, std::abs(two_step.values[i] / direct[i] - 1.0));
  EXPECT_LE(worst, 1e-2);
}

TEST(Evolve, ForwardAndAdjointAgreeAtDistinctPoints) {
  const auto pb = problem(tanh_drift(3, 1.0));
  const double tau = 0.25;
  SolverConfig cfg;
  cfg.grid = GridSpec::cartesian(3, 1.25 * suggest_box_half_width(pb, tau), 32);
  Vec x = Vec::Zero(3), y = Vec::Zero(3);
  const Mesh probe(cfg.grid);
  std::vector<int> ix(3, 16), iy(3, 16);
  ix[0] = 17;
  iy[0] = 14;
  iy[1] = 17;
  x = probe.point(probe.index(ix));
  y = probe.point(probe.index(iy));
  const auto fwd = estimate_kernel(pb, 0.0, tau, y, cfg, Direction::Forward);
  const auto adj = estimate_kernel(pb, 0.0, tau, x, cfg, Direction::Adjoint);
  const double a = fwd.values.values[probe.index(ix)];
  const double b = adj.values.values[probe.index(iy)];
  EXPECT_NEAR(a / b, 1.0, 0.03);
  EXPECT_NEAR(*adj.row_mass, 1.0, 1e-6);
}

TEST(Evolve, VariantPotentialsFollowDivergence) {
  auto pb = problem(hardy_drift(3, 1.0, HardySign::Repelling));
  const Mesh mesh(GridSpec::radial(3, 4.0, 256));
  pb.variant = Variant::LambdaStar;
  const Vec star = variant_potential(pb, mesh);
  pb.variant = Variant::Hminus;
  const Vec hminus = variant_potential(pb, mesh);
  pb.variant = Variant::HminusPprime;
  pb.p_prime = 3.0;
  const Vec hp = variant_potential(pb, mesh);
  pb.variant = Variant::Hplus;
  const Vec hplus = variant_potential(pb, mesh);
  for (Index i = 10; i < mesh.size(); i += 40) {
    const double r = mesh.radius(i);
    const double div = -0.5 / (r * r);
    EXPECT_NEAR(star[i] / div, 1.0, 0.02) << r;
    EXPECT_NEAR(hminus[i], star[i], 1e-12);
    EXPECT_NEAR(hp[i], 3.0 * star[i], 1e-12);
    EXPECT_EQ(hplus[i], 0.0);
  }
}

TEST(Evolve, AdjointGeneratorConservesMass) {
  const auto pb = problem(tanh_drift(3, 0.7));
  const auto mesh = make_mesh(GridSpec::cartesian(3, 4.0, 10));
  const Generator g = assemble(pb, mesh);
  const Vec ones = Vec::Ones(mesh->size());
  EXPECT_LE((g.matrix * ones).cwiseAbs().maxCoeff(), 1e-12);
  const Generator a = g.adjoint();
  EXPECT_LE(std::abs(mesh->volumes().dot(a.matrix * dirac_approximation(*mesh, Vec::Zero(3), 0.5))), 1e-12);
}

TEST(Evolve, TimeStepsLandOnStops) {
  const Mesh mesh(GridSpec::radial(3, 5.0, 64));
  SolverConfig cfg;
  const auto steps = time_steps(cfg, mesh, 1.0, 0.01, 1.0, {0.3, 0.7});
  double e = 0.01;
  bool hit3 = false, hit7 = false;
  for (double dt : steps) {
    EXPECT_GT(dt, 0.0);
    EXPECT_LE(dt, 1.0 / cfg.min_steps + 1e-15);
    e += dt;
    hit3 = hit3 || std::abs(e - 0.3) < 1e-12;
    hit7 = hit7 || std::abs(e - 0.7) < 1e-12;
  }
  EXPECT_NEAR(e, 1.0, 1e-12);
  EXPECT_TRUE(hit3 && hit7);
}

TEST(Evolve, LeakIsReported) {
  const auto pb = problem(zero_drift(3));
  SolverConfig cfg;
  cfg.grid = GridSpec::radial(3, 2.0, 256);
  EXPECT_THROW(estimate_kernel(pb, 0.0, 1.0, Vec::Zero(3), cfg), BoundaryLeakError);
}

TEST(Evolve, LpDecayUnderFormBound) {
  const auto pb = problem(hardy_drift(3, 1.0, HardySign::Attracting));
  auto cfg = radial_config(10.0, 512);
  const auto mesh = make_mesh(cfg.grid);
  const GridFunction f{mesh, dirac_approximation(*mesh, Vec::Zero(3), 0.05)};
  const auto rep = lp_decay_check(pb, f, 2.0, 1.0, cfg);
  EXPECT_TRUE(rep.pass) << rep.worst_excess;
  EXPECT_LT(rep.norms.back(), rep.norms.front());
  EXPECT_THROW(lp_decay_check(pb, f, 1.5, 1.0, cfg), InvalidArgument);
}

TEST(Evolve, LpNormOfGaussian) {
  const auto mesh = make_mesh(GridSpec::radial(3, 14.0, 4096, 1e-4));
  const GridFunction g{mesh, dirac_approximation(*mesh, Vec::Zero(3), 1.0)};
  // ||k_1(t)||_2^2 = (8 pi t)^{-3/2}.
  EXPECT_NEAR(lp_norm(g, 2.0), std::pow(8.0 * kPi, -0.75), 1e-6);
  EXPECT_NEAR(lp_norm(g, 1.0), 1.0, 1e-9);
}

TEST(Evolve, MollifiedSolutionsConverge) {
  const auto b = hardy_drift(3, 0.25, HardySign::Attracting);
  auto cfg = radial_config(8.0, 512);
  const auto mesh = make_mesh(cfg.grid);
  const GridFunction f{mesh, dirac_approximation(*mesh, Vec::Zero(3), 0.05)};
  const auto rep = mollifier_consistency([&](double eps) { return problem(mollify_drift(b, eps)); },
                                         {0.2, 0.1, 0.05, 0.025}, f, 0.5, cfg);
  ASSERT_EQ(rep.consecutive.size(), 3u);
  for (size_t i = 1; i < rep.consecutive.size(); ++i) EXPECT_LT(rep.consecutive[i], rep.consecutive[i - 1]);
  EXPECT_TRUE(rep.monotone_tail);
}
