#include "fbheat/catalog.hpp"
#include "fbheat/kernelfit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace fbheat;

namespace {

ParabolicProblem problem(DriftField b, DiffusionMatrix a = make_matrix(MatrixKind::Identity, {})) {
  return {std::move(a), std::move(b), Variant::Lambda, 2.0, {}, {}, {}};
}

class KernelFit : public ::testing::Test {
 protected:
  // Slices at t - s = 1/4, 1/2, 3/4, 1 on the default radial grid, cached per drift id.
  static const std::vector<HeatKernelEstimate>& family(const std::string& id) {
    static std::map<std::string, std::vector<HeatKernelEstimate>> cache;
    auto it = cache.find(id);
    if (it != cache.end()) return it->second;
    SolverConfig cfg;
    cfg.grid = GridSpec::radial(3, 10.0, 1024);
    DriftField b = zero_drift(3);
    if (id == "hardy+0.25") b = hardy_drift(3, 0.25, HardySign::Attracting);
    if (id == "hardy+1") b = hardy_drift(3, 1.0, HardySign::Attracting);
    if (id == "hardy-1") b = hardy_drift(3, 1.0, HardySign::Repelling);
    return cache[id] = estimate_kernel_series(problem(b), 0.0, {0.25, 0.5, 0.75, 1.0}, Vec::Zero(3), cfg);
  }
  static std::vector<Vec> origin() { return {Vec::Zero(3)}; }
};

}  // namespace

TEST_F(KernelFit, BaselineEnvelopesAreUnitGaussians) {
  const auto& f = family("zero");
  for (Side side : {Side::Lower, Side::Upper}) {
    const auto fit = fit_bound(f, side, 1.0, 1.0);
    EXPECT_NEAR(fit.multiplier, 1.0, 0.05);
    EXPECT_NEAR(fit.scale, 1.0, 0.05);
    EXPECT_NEAR(fit.rate, 0.0, 0.05);
    EXPECT_TRUE(envelope_holds(fit, f));
    EXPECT_GT(fit.samples, 100u);
  }
  const auto lower = fit_bound(f, Side::Lower, 1.0, 1.0);
  EXPECT_GE(lower.worst_ratio, 1.0 - 1e-12);
}

TEST_F(KernelFit, FittedRateIsNearZeroForConservativeFlow) {
  FitOptions opt;
  opt.fit_rate = true;
  const auto fit = fit_bound(family("zero"), Side::Upper, 1.0, 1.0, {}, opt);
  EXPECT_NEAR(fit.rate, 0.0, 0.05);
}

TEST_F(KernelFit, EnvelopeCheckDetectsViolation) {
  const auto& f = family("zero");
  auto fit = fit_bound(f, Side::Upper, 1.0, 1.0);
  fit.multiplier *= 0.9;
  EXPECT_FALSE(envelope_holds(fit, f));
}

TEST_F(KernelFit, AttractingHardyUpperBoundFailsNearSingularity) {
  for (const char* id : {"hardy+0.25", "hardy+1"}) {
    const auto& f = family(id);
    EXPECT_NO_THROW(fit_bound(f, Side::Lower, 1.0, 1.0, origin()));
    try {
      fit_bound(f, Side::Upper, 1.0, 1.0, origin());
      FAIL() << id << ": upper fit should be infeasible";
    } catch (const InfeasibleFit& e) {
      EXPECT_EQ(e.side(), Side::Upper);
      EXPECT_LE(e.worst().distance, 0.05 * std::sqrt(e.worst().tau));
      EXPECT_LT(e.slope(), -0.05);
    }
  }
}

TEST_F(KernelFit, RepellingHardyLowerBoundFails) {
  const auto& f = family("hardy-1");
  EXPECT_NO_THROW(fit_bound(f, Side::Upper, 1.0, 1.0, origin()));
  EXPECT_THROW(fit_bound(f, Side::Lower, 1.0, 1.0, origin()), InfeasibleFit);
}

TEST_F(KernelFit, WeightExponents) {
  const auto w0 = fit_weight_exponent(family("hardy+0.25").back(), 0.01, 1.0, 1.0, 0.25);
  EXPECT_NEAR(w0.exponent, 0.25, 0.025);
  const auto w1 = fit_weight_exponent(family("hardy+1").back(), 0.01, 1.0, 1.0, 0.5);
  EXPECT_NEAR(w1.exponent, 0.5, 0.05);
  EXPECT_FALSE(w1.vanishes_at_zero);
  const auto wr = fit_weight_exponent(family("hardy-1").back(), 0.01, 1.0, 1.0, -0.5);
  EXPECT_NEAR(wr.exponent, -0.5, 0.05);
  EXPECT_TRUE(wr.bounded);
  EXPECT_TRUE(wr.vanishes_at_zero);
  EXPECT_NEAR(fit_weight_exponent(family("zero").back(), 0.01, 1.0).exponent, 0.0, 1e-3);
  EXPECT_THROW(fit_weight_exponent(family("zero").front(), 0.01, 1.0), InvalidArgument);
}

TEST_F(KernelFit, CounterexampleGrowth) {
  const auto g = counterexample_growth(family("hardy+0.25").back(), 4.0, 0.01, 0.5);
  EXPECT_GT(g.power, 0.2);
  EXPECT_GE(g.decades, 1.0);
  for (size_t i = 1; i < g.ratios.size(); ++i) EXPECT_LT(g.ratios[i], g.ratios[i - 1]);
}

TEST_F(KernelFit, RatioUnderHalving) {
  const auto rep = ratio_under_halving(family("hardy-1").back(), 1.0, 0.5);
  EXPECT_TRUE(rep.decreasing);
  EXPECT_GE(rep.radii.size(), 5u);
  EXPECT_NEAR(rep.radii[1], 0.25, 1e-12);
  EXPECT_FALSE(ratio_under_halving(family("hardy+1").back(), 1.0, 0.5).decreasing);
}

TEST(KernelFitCartesian, CheckerboardEnvelopesBracketEllipticity) {
  const auto pb = problem(zero_drift(3), matrix_from_id("checkerboard:d=3,a=1,b=2,cell=1"));
  const double tau = 0.25;
  SolverConfig cfg;
  cfg.grid = GridSpec::cartesian(3, 1.25 * suggest_box_half_width(pb, tau), 28);
  const auto f = estimate_kernel_series(pb, 0.0, {0.125, 0.1875, 0.25}, Vec::Zero(3), cfg);
  const auto lo = fit_bound(f, Side::Lower, 1.0, 2.0);
  const auto up = fit_bound(f, Side::Upper, 1.0, 2.0);
  EXPECT_GE(lo.scale, 0.25);
  EXPECT_LE(up.scale, 8.0);
  EXPECT_LE(lo.scale, up.scale);
  EXPECT_TRUE(envelope_holds(lo, f));
  EXPECT_TRUE(envelope_holds(up, f));
  EXPECT_NEAR(f.back().mass, 1.0, 1e-6);
}

TEST(KernelFitCartesian, SandwichAndDominationForBoundedDrift) {
  const auto pb = problem(tanh_drift(3, 1.0));
  const double tau = 0.25;
  SolverConfig cfg;
  cfg.grid = GridSpec::cartesian(3, 1.25 * suggest_box_half_width(pb, tau), 28);
  auto variant = [&](Variant v, double p_prime = 2.0) {
    ParabolicProblem q = pb;
    q.variant = v;
    q.p_prime = p_prime;
    return estimate_kernel(q, 0.0, tau, Vec::Zero(3), cfg);
  };
  const auto u = variant(Variant::Lambda);
  const auto h1 = variant(Variant::Hminus);
  const auto hp = variant(Variant::HminusPprime, 2.0);
  const auto star = variant(Variant::LambdaStar);
  const auto sw = sandwich_check(h1, u, hp, 2.0);
  EXPECT_TRUE(sw.pass) << sw.violations << " " << sw.worst_excess;
  EXPECT_GT(sw.cells, 1000u);
  // div b <= 0 here, so the zero-order term of Lambda* is nonpositive and u <= u_*.
  EXPECT_TRUE(domination_check(u, star).pass);
  EXPECT_FALSE(domination_check(star, u).pass);
  EXPECT_GT(hp.mass, h1.mass);
  EXPECT_GT(h1.mass, 1.0);
}
