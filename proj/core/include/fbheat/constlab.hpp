#pragma once

#include "fbheat/kernelfit.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fbheat {

/// p_c = 2 / (2 - sqrt(delta_a)) for 0 <= delta_a < 4.
double critical_exponent(double delta_a);
/// c_p = 1/p_c - 1/p (= 1/p' - sqrt(delta_a / 4)).
double c_p(double p, double delta_a);

struct ConstantInputs {
  int d = 3;
  double sigma = 1.0;
  double xi = 1.0;
  double delta = 0.0;
  double c_delta = 0.0;
  double nu = 0.0;
  double lambda = 0.0;
  /// Nash constant; `c_n_source` records where it came from.
  double c_n = 0.0;
  std::string c_n_source = "unset";
  /// Measured moment bound c_+ and integral-bound constant c^.
  std::optional<double> c_plus;
  std::optional<double> c_hat;
  /// Exponent r > 2 in c(beta).
  double r = 3.0;
};

struct ConstantLedger {
  ConstantInputs inputs;
  double delta_a = 0.0;
  double c_delta_a = 0.0;
  std::optional<double> p_c;
  std::optional<double> k1;
  std::optional<double> k2;
  std::optional<double> c_g;
  double beta_star = 0.0;
  double c_delta_a_moser = 0.0;
  std::optional<double> omega;
  double c4 = 0.0;
  double beta = 0.0;
  double c_beta = 0.0;
  std::optional<double> c_of_beta;

  /// c_p(p) for this ledger; throws when p_c is absent.
  double c_p_at(double p) const;
};

ConstantLedger proof_constants(const ConstantInputs& in);

std::string to_json(const ConstantLedger& ledger, int indent = 2);
ConstantLedger ledger_from_json(const std::string& text);
bool operator==(const ConstantLedger& a, const ConstantLedger& b);

struct CoulhonRaynaud {
  double beta = 0.0;
  double exponent = 0.0;
  double m = 0.0;
};

/// ||T||_{p->p} <= M1 and ||T_t||_{q->r} <= M2 t^{-nu} give ||T_t||_{p->r} <= M t^{-nu/(1-beta)}.
/// r may be infinity.
CoulhonRaynaud coulhon_raynaud(double p, double q, double r, double nu, double m1, double m2);

enum class FitOutcome { Feasible, Infeasible, NotRun };
std::string to_string(FitOutcome o);

struct SideResult {
  FitOutcome outcome = FitOutcome::NotRun;
  std::optional<BoundFit> fit;
  /// True when the scenario declares this side infeasible.
  bool expected_infeasible = false;
};

struct TheoryInputs {
  DivergenceSign sign = DivergenceSign::Unknown;
  /// Drift is identically zero.
  bool zero_drift = false;
  /// Kato data of div b_+ and |div b| (with the scenario's smallness threshold already applied).
  bool div_plus_kato = false;
  bool div_abs_kato = false;
};

struct TheoryRow {
  Side side = Side::Lower;
  bool guaranteed = false;
  std::string reason;
  FitOutcome outcome = FitOutcome::NotRun;
  bool expected_infeasible = false;
  bool consistent = true;
  std::optional<double> fitted_scale;
  /// Ledger value shown next to the fit (c4 for the upper side).
  std::optional<double> ledger_scale;
};

struct TheoryReport {
  std::vector<TheoryRow> rows;
  bool consistent = true;
};

/// Direction-consistency: every side the hypotheses guarantee must have a feasible fit.
TheoryReport theory_vs_fit(const ConstantLedger& ledger, const TheoryInputs& theory, const SideResult& lower,
                           const SideResult& upper);

}  // namespace fbheat
