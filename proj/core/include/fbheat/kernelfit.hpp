#pragma once

#include "fbheat/errors.hpp"
#include "fbheat/evolve.hpp"
#include "fbheat/gaussian.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fbheat {

enum class Side { Lower, Upper };
std::string to_string(Side s);

/// Samples entering a fit: times from the kernel family, offsets |x - y| up to `radius_factor`
/// sqrt(xi (t - s)), cells closer than `exclude_radius` to a singular point dropped.
struct FitRegion {
  double t_min = 0.0;
  double t_max = 0.0;
  double radius_factor = 6.0;
  double exclude_radius = 0.0;
  /// Kernel values below floor * peak are ignored.
  double floor = 1e-12;
};

struct FitOptions {
  /// Search range of c2 (or c4) is [sigma / 4, 4 xi] unless overridden.
  std::optional<double> scale_min;
  std::optional<double> scale_max;
  int scale_points = 25;
  /// Fit the exponential rate c0 (c5); otherwise it is pinned to 0.
  bool fit_rate = false;
  /// Slope of log(u / k) against log distance to the singular point, over the innermost decade,
  /// beyond which no constant can hold as the grid offset shrinks.
  double growth_slope = 0.05;
  FitRegion region;
};

struct FitSample {
  double tau = 0.0;
  double distance = 0.0;
  double value = 0.0;
  double ratio = 0.0;
};

struct BoundFit {
  Side side = Side::Lower;
  /// (c1, c2, c0) for the lower side, (c3, c4, c5) for the upper side.
  double multiplier = 0.0;
  double scale = 0.0;
  double rate = 0.0;
  FitRegion region;
  double xi = 1.0;
  /// Largest |x - y| admitted, at the latest time.
  double spatial_radius = 0.0;
  std::size_t samples = 0;
  /// Mean of |log(u / envelope)| over the samples.
  double mean_log_gap = 0.0;
  /// Extreme of u / envelope (>= 1 for lower, <= 1 for upper).
  double worst_ratio = 0.0;
  /// Regression slope of log(u / k_scale) against log distance to the singular point.
  std::optional<double> singular_slope;
};

/// Raised when no envelope of the requested side fits; carries the most-violating sample.
class InfeasibleFit : public CheckFailure {
 public:
  InfeasibleFit(const std::string& what, Side side, FitSample worst, double slope)
      : CheckFailure(what), side_(side), worst_(worst), slope_(slope) {}
  Side side() const { return side_; }
  const FitSample& worst() const { return worst_; }
  double slope() const { return slope_; }

 private:
  Side side_;
  FitSample worst_;
  double slope_;
};

/// Extremal Gaussian envelope c k_{scale}(t-s; x-y) e^{-+rate (t-s)} below or above a kernel family.
/// `sigma`, `xi` are the ellipticity constants of the scenario; `singular` lists the points whose
/// neighbourhood decides feasibility.
BoundFit fit_bound(const std::vector<HeatKernelEstimate>& family, Side side, double sigma, double xi,
                   const std::vector<Vec>& singular = {}, const FitOptions& opt = {});

/// Whether the inequality defining `fit` holds at every sample of the family.
bool envelope_holds(const BoundFit& fit, const std::vector<HeatKernelEstimate>& family,
                    const std::vector<Vec>& singular = {}, double relative_slack = 1e-12);

struct WeightProfile {
  double exponent = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  double residual = 0.0;
  std::size_t points = 0;
  double theoretical = 0.0;
  std::vector<double> radii;
  std::vector<double> ratios;
  /// Ratio bounded over the range and decreasing towards y = 0.
  bool bounded = false;
  bool vanishes_at_zero = false;
};

/// Regresses log(u(t,x0;0,y) / k_mu(t, x0 - y)) on log|y| for r_lo <= |y| <= r_hi <= sqrt(t).
/// The slope is -exponent. `theoretical` is stored for reporting.
WeightProfile fit_weight_exponent(const HeatKernelEstimate& slice, double r_lo, double r_hi,
                                  double mu = 1.0, double theoretical = 0.0,
                                  double monotone_tolerance = 1e-3);

struct GrowthReport {
  std::vector<double> radii;
  std::vector<double> ratios;
  /// Ratio ~ r^{-power}.
  double power = 0.0;
  double decades = 0.0;
};

/// max over |y| = r of u / k_mu along a geometric radius sequence in [r_lo, r_hi].
GrowthReport counterexample_growth(const HeatKernelEstimate& slice, double mu, double r_lo, double r_hi);

struct HalvingReport {
  std::vector<double> radii;
  std::vector<double> ratios;
  bool decreasing = false;
};

/// u / k_mu at r_start, r_start / 2, ... down to the smallest resolved radius.
HalvingReport ratio_under_halving(const HeatKernelEstimate& slice, double mu, double r_start);

struct ComparisonReport {
  std::size_t cells = 0;
  std::size_t violations = 0;
  double fraction_ok = 1.0;
  double worst_excess = 0.0;
  Index worst_cell = -1;
  double tolerance = 0.0;
  bool pass = false;
};

/// h1 <= u^{1/p} h_{p'}^{1/p'} on every cell above floor * peak.
ComparisonReport sandwich_check(const HeatKernelEstimate& h_minus, const HeatKernelEstimate& u,
                                const HeatKernelEstimate& h_pprime, double p, double solver_tolerance = 1e-10,
                                double floor = 1e-12);

/// lower <= upper on every cell above floor * peak (u_* <= u when div b >= 0).
ComparisonReport domination_check(const HeatKernelEstimate& lower, const HeatKernelEstimate& upper,
                                  double solver_tolerance = 1e-10, double floor = 1e-12);

}  // namespace fbheat
