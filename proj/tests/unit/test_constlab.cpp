#include "fbheat/constlab.hpp"
#include "fbheat/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace fbheat;

namespace {

ConstantInputs unit_inputs(double delta) {
  ConstantInputs in;
  in.delta = delta;
  in.c_n = 0.3;
  in.c_n_source = "test";
  return in;
}

}  // namespace

TEST(ConstLab, LedgerAtUnitFormBound) {
  const auto l = proof_constants(unit_inputs(1.0));
  EXPECT_DOUBLE_EQ(*l.p_c, 2.0);
  EXPECT_DOUBLE_EQ(l.beta_star, 15.0 / 8.0);
  EXPECT_DOUBLE_EQ(*l.k1, 3.0);
  EXPECT_DOUBLE_EQ(*l.k2, 4.0);
  EXPECT_DOUBLE_EQ(l.c_delta_a_moser, 5.0 / 4.0);
  EXPECT_DOUBLE_EQ(l.c4, 5.0 / 4.0);
  EXPECT_DOUBLE_EQ(*l.c_g, 2.0 * 0.3 / 2.0);
  EXPECT_DOUBLE_EQ(*l.omega, 0.0);
}

TEST(ConstLab, EllipticityRescalesFormBound) {
  ConstantInputs in = unit_inputs(4.0);
  in.sigma = 2.0;
  in.xi = 3.0;
  const auto l = proof_constants(in);
  EXPECT_DOUBLE_EQ(l.delta_a, 1.0);
  EXPECT_DOUBLE_EQ(*l.p_c, 2.0);
  EXPECT_DOUBLE_EQ(l.beta_star, 1.5 * 1.25 * 3.0);
  EXPECT_DOUBLE_EQ(l.c4, 1.25 * 3.0);
  EXPECT_DOUBLE_EQ(*l.c_g, 2.0 * 2.0 * 0.3 / 2.0);
}

TEST(ConstLab, CriticalExponentMatchesConjugateForm) {
  for (double da : {0.0, 0.25, 1.0, 2.25, 3.9}) {
    const double pc = critical_exponent(da);
    // 1/p_c' = sqrt(delta_a)/2 with p_c' the conjugate exponent.
    EXPECT_NEAR(1.0 - 1.0 / pc, std::sqrt(da) / 2.0, 1e-14);
    EXPECT_NEAR(c_p(3.0 * pc, da), 1.0 / pc - 1.0 / (3.0 * pc), 1e-14);
  }
  EXPECT_THROW(c_p(1.0, 1.0), InvalidArgument);
}

TEST(ConstLab, SupercriticalGatesLowerBoundConstants) {
  EXPECT_THROW(critical_exponent(4.0), InvalidArgument);
  const auto l = proof_constants(unit_inputs(5.0));
  EXPECT_FALSE(l.p_c);
  EXPECT_FALSE(l.k1);
  EXPECT_FALSE(l.k2);
  EXPECT_FALSE(l.c_g);
  EXPECT_DOUBLE_EQ(l.c4, 1.0 + 5.0 / 4.0);
  try {
    l.c_p_at(3.0);
    FAIL() << "expected a supercritical error";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("supercritical form-bound"), std::string::npos);
  }
}

TEST(ConstLab, K2AbsentWithoutFormBound) {
  const auto l = proof_constants(unit_inputs(0.0));
  EXPECT_DOUBLE_EQ(*l.p_c, 1.0);
  EXPECT_DOUBLE_EQ(*l.k1, std::sqrt(2.0));
  EXPECT_FALSE(l.k2);
}

TEST(ConstLab, BetaUsesMomentBoundAndCBeta) {
  ConstantInputs in = unit_inputs(1.0);
  in.c_plus = 0.5;
  in.c_hat = 2.0;
  const auto l = proof_constants(in);
  EXPECT_DOUBLE_EQ(l.beta, std::max(15.0 / 8.0, 16.0 * 0.25));
  const double cb = std::pow(4.0 * std::numbers::pi * 4.0, -1.5) * std::exp(-0.25);
  EXPECT_NEAR(l.c_beta, cb, 1e-15);
  EXPECT_NEAR(*l.c_of_beta, cb / (4.0 * 4.0 * 2.0) * std::pow(2.0, -3.0 / 4.0), 1e-15);
}

TEST(ConstLab, OmegaUsesCompensatingConstant) {
  ConstantInputs in = unit_inputs(0.5);
  in.c_delta = 0.2;
  EXPECT_DOUBLE_EQ(*proof_constants(in).omega, 0.2 / (2.0 * 0.5));
  in.delta = 0.0;
  EXPECT_FALSE(proof_constants(in).omega);
}

TEST(ConstLab, RejectsBadInputs) {
  ConstantInputs in = unit_inputs(1.0);
  in.xi = 0.5;
  EXPECT_THROW(proof_constants(in), InvalidArgument);
  in = unit_inputs(-1.0);
  EXPECT_THROW(proof_constants(in), InvalidArgument);
  in = unit_inputs(1.0);
  in.d = 2;
  EXPECT_THROW(proof_constants(in), InvalidArgument);
}

TEST(ConstLab, JsonRoundTrip) {
  ConstantInputs in = unit_inputs(0.25);
  in.c_plus = 2.2;
  in.c_hat = 0.7;
  in.nu = 0.1;
  in.lambda = 3.0;
  const auto l = proof_constants(in);
  const auto back = ledger_from_json(to_json(l));
  EXPECT_TRUE(back == l);
  const auto sup = proof_constants(unit_inputs(6.0));
  EXPECT_TRUE(ledger_from_json(to_json(sup, 0)) == sup);
  EXPECT_FALSE(back == sup);
}

TEST(ConstLab, CoulhonRaynaudInfiniteTarget) {
  const double nu = 0.7, m1 = 1.3, m2 = 2.1;
  const auto cr = coulhon_raynaud(1.0, 2.0, std::numeric_limits<double>::infinity(), nu, m1, m2);
  EXPECT_DOUBLE_EQ(cr.beta, 0.5);
  EXPECT_DOUBLE_EQ(cr.exponent, 2.0 * nu);
  EXPECT_NEAR(cr.m, std::pow(2.0, 4.0 * nu) * m1 * m2 * m2, 1e-12);
}

TEST(ConstLab, CoulhonRaynaudFiniteTarget) {
  const double nu = 0.4, m1 = 1.7, m2 = 0.9;
  const auto cr = coulhon_raynaud(2.0, 4.0, 8.0, nu, m1, m2);
  EXPECT_NEAR(cr.beta, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(cr.exponent, 3.0 * nu, 1e-14);
  EXPECT_NEAR(cr.m, std::pow(2.0, 9.0 * nu) * m1 * std::pow(m2, 3.0), 1e-12);
  EXPECT_THROW(coulhon_raynaud(2.0, 2.0, 8.0, nu, m1, m2), InvalidArgument);
}

TEST(ConstLab, TheoryConsistency) {
  const auto l = proof_constants(unit_inputs(1.0));
  TheoryInputs th;
  th.sign = DivergenceSign::Nonnegative;
  SideResult lo{FitOutcome::Feasible, std::nullopt, false};
  SideResult up{FitOutcome::Infeasible, std::nullopt, true};
  auto rep = theory_vs_fit(l, th, lo, up);
  EXPECT_TRUE(rep.consistent);
  EXPECT_TRUE(rep.rows[0].guaranteed);
  EXPECT_FALSE(rep.rows[1].guaranteed);
  EXPECT_DOUBLE_EQ(*rep.rows[1].ledger_scale, 1.25);

  lo.outcome = FitOutcome::Infeasible;
  EXPECT_FALSE(theory_vs_fit(l, th, lo, up).consistent);

  lo.outcome = FitOutcome::Feasible;
  up.outcome = FitOutcome::Feasible;
  EXPECT_FALSE(theory_vs_fit(l, th, lo, up).consistent);

  th.div_abs_kato = true;
  up.expected_infeasible = false;
  up.outcome = FitOutcome::Infeasible;
  rep = theory_vs_fit(l, th, lo, up);
  EXPECT_FALSE(rep.consistent);
  EXPECT_TRUE(rep.rows[1].guaranteed);
}
