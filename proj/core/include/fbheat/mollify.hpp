#pragma once

#include "fbheat/fields.hpp"
#include "fbheat/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fbheat {

/// E_eps f = e^{eps Laplacian} f sampled on a grid, with the bound its values must respect.
struct MollifiedField {
  std::string source_id;
  double epsilon = 0.0;
  /// Scalar values, or |b_eps| for drifts.
  GridFunction values;
  /// Per-component values for drifts on Cartesian grids, radial component on radial grids.
  std::vector<GridFunction> components;
  /// Upper bound for sup |values|: the Claim-1 bound for drifts, sup |f| for scalars.
  double certificate = 0.0;
};

/// Lazily evaluated E_eps f for a radial profile, by radial quadrature against the heat kernel.
Profile mollify_radial_profile(const Profile& f, int d, double eps,
                               const std::vector<double>& breakpoints = {});
/// Radial component of E_eps b for b = g(|x|) x/|x|.
Profile mollify_radial_vector_profile(const Profile& g, int d, double eps,
                                      const std::vector<double>& breakpoints = {});

/// E_eps V for a radial scalar field; the result has no singular points.
ScalarField mollify_scalar(const ScalarField& f, double eps);
/// E_eps b for a radial drift. Metadata (delta, c(delta), sign) carries over; the divergence
/// evaluator is E_eps(div b).
DriftField mollify_drift(const DriftField& b, double eps);

/// Smallest padding accepted by the Cartesian convolution.
double required_padding(double eps);

/// Mollifies a scalar field onto a grid. Radial grids use radial quadrature; Cartesian grids a
/// separable Gaussian convolution of cell averages sampled on a box padded by `padding`
/// (default 8 sqrt(eps)).
MollifiedField mollify(const ScalarField& f, double eps, const GridSpec& grid,
                       std::optional<double> padding = std::nullopt);
MollifiedField mollify(const DriftField& b, double eps, const GridSpec& grid,
                       std::optional<double> padding = std::nullopt);

/// Separable Gaussian convolution of gridded values: `source` lives on `padded`, the result on
/// `target`, whose box must sit inside `padded` with at least `required_padding(eps)` margin.
Vec convolve_cartesian(const Mesh& padded, const Vec& source, const Mesh& target, double eps);

/// sqrt(delta d / (8 eps) + c(delta)).
double mollified_sup_bound(double delta, double c_delta, int d, double eps);

struct ClaimResult {
  std::string claim;
  double epsilon = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  bool skipped = false;
};

struct PreservationReport {
  std::vector<ClaimResult> results;
  bool all_pass() const;
  /// Throws CheckFailure naming the first failing claim and epsilon.
  void throw_if_failed() const;
};

struct PreservationOptions {
  int radial_points = 512;
  /// Radial grid radius as a multiple of sqrt(eps) (at least `min_radius`).
  double radius_factor = 40.0;
  double min_radius = 4.0;
  int form_bound_levels = 3;
  double relative_tolerance = 0.02;
  double divergence_tolerance = 1e-8;
  /// Kato check of E_eps div b_+ (when the drift declares Kato data) and of an optional potential.
  std::optional<ScalarField> potential;
  std::optional<KatoData> potential_kato;
};

/// Runs the preservation claims for each eps: sup bound, form-bound, divergence sign, Kato class,
/// and commutation div E_eps = E_eps div.
PreservationReport verify_preservation(const DriftField& b, const std::vector<double>& epsilons,
                                       const PreservationOptions& opt = {});

}  // namespace fbheat
