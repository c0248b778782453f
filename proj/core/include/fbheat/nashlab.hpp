#pragma once

#include "fbheat/evolve.hpp"

#include <vector>

namespace fbheat {

/// Q = -<u log u> with 0 log 0 = 0. Throws CheckFailure when |<u> - 1| exceeds `mass_tolerance`.
double entropy(const GridFunction& u, double mass_tolerance = 1e-3);

/// M = <|x - .| u>. Radial meshes only admit the origin as centre.
double moment(const GridFunction& u, const Vec& center, double mass_tolerance = 1e-3);

/// G^(s) = <k_beta(t - s, o - .) log(u v floor)>, floor = log_floor * sup u.
/// Requires 2|x - y| <= sqrt(beta (t - s)).
double g_function(const GridFunction& u, double beta, const Vec& o, double tau, const Vec& x, const Vec& y,
                  double log_floor = 1e-30);

/// Discrete Fisher information <|grad u|^2 / u> from face differences.
double dissipation(const GridFunction& u);

struct EntropyMomentReport {
  std::vector<double> ratios;
  /// sup over times of e^{Q/d} / M.
  double sup = 0.0;
  bool finite = false;
};

EntropyMomentReport entropy_moment_check(const std::vector<double>& q, const std::vector<double>& m, int d);

struct NashDiagnostics {
  /// t - s for each slice.
  std::vector<double> taus;
  std::vector<double> q;
  std::vector<double> m;
  std::vector<double> q_tilde;
  std::vector<double> dissipation;
  /// sup |Q - Q~(t - s)|.
  double c_nee = 0.0;
  /// Range of M / sqrt(t - s).
  double c_minus = 0.0;
  double c_plus = 0.0;
  double beta = 0.0;
  /// G^ at t_s = (t + s) / 2 and the smallest C with G^ >= -Q~(t - t_s) - C.
  double tau_half = 0.0;
  double g_hat = 0.0;
  double g_constant = 0.0;
  EntropyMomentReport entropy_moment;
};

struct NashOptions {
  double mass_tolerance = 1e-3;
  double log_floor = 1e-30;
  bool with_dissipation = false;
};

/// Diagnostics from adjoint slices y -> u(t, x; s, y) sharing x = source. The slice at half the
/// largest t - s must be present for G^. beta = max(beta_star, (4 c_plus)^2).
NashDiagnostics nash_diagnostics(const std::vector<HeatKernelEstimate>& series, double beta_star,
                                 const NashOptions& opt = {});

}  // namespace fbheat
