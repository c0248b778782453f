#pragma once

#include "fbheat/fields.hpp"
#include "fbheat/grid.hpp"

#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace fbheat {

using SpMat = Eigen::SparseMatrix<double>;

/// Dirichlet energy matrix: f^T K f is the forward-difference ||grad f||^2 with f = 0 outside.
/// On radial meshes the inner wall at r_min can be Dirichlet or natural (Neumann).
SpMat stiffness(const Mesh& mesh, bool inner_dirichlet = true);

struct RefinementLevel {
  GridSpec grid;
  double value = 0.0;
  int iterations = 0;
};

struct FormBoundEstimate {
  double delta_hat = 0.0;
  double c_of_delta = 0.0;
  GridSpec grid;
  std::vector<RefinementLevel> trace;
};

struct FormBoundOptions {
  int levels = 3;
  int max_iterations = 500;
  double tolerance = 1e-8;
  /// Radial refinements also square r_min / r_max, doubling the log-range.
  bool extend_log_range = true;
};

/// Largest generalized Rayleigh quotient of (|b|^2 - c) against the Dirichlet energy on one mesh,
/// by shifted power iteration. `b2` holds |b|^2 at cell centres.
double form_bound_on_mesh(const Mesh& mesh, const Vec& b2, double c, const FormBoundOptions& opt,
                          int* iterations = nullptr);

/// Same quantity on radial meshes by Sturm/LDL^T inertia bisection.
double form_bound_inertia(const Mesh& mesh, const Vec& b2, double c);

/// |b|^2 sampled at cell centres.
Vec squared_magnitude(const DriftField& b, const Mesh& mesh);

/// Refinement study of the form-bound of b with compensating constant c.
FormBoundEstimate estimate_form_bound(const DriftField& b, double c, const GridSpec& grid,
                                      const FormBoundOptions& opt = {});

/// The refinement ladder used by estimate_form_bound.
std::vector<GridSpec> refinement_ladder(const GridSpec& grid, int levels, bool extend_log_range);

struct KatoEstimate {
  double nu_hat = 0.0;
  double lambda = 0.0;
  GridSpec grid;
  double refined_value = 0.0;
  bool divergent = false;
  std::vector<RefinementLevel> trace;
};

struct KatoOptions {
  double divergence_factor = 0.05;
  /// Cap on evaluation points per level (the origin is always included on radial meshes).
  int max_points = 256;
};

/// (lambda - Laplacian)^{-1} kernel at distance r in R^d.
double resolvent_kernel(double lambda, int d, double r);

/// <G_lambda(x - .) |V|> at |x| = r for a radial V supported on [r_lo, r_hi].
double radial_kato_potential(const ScalarField& V, double lambda, int d, double r, double r_lo,
                             double r_hi);

/// sup_x <G_lambda(x - .)|V|> on one mesh.
double kato_on_mesh(const ScalarField& V, double lambda, const Mesh& mesh, int max_points = 256);

/// Kato norm estimate with a divergence flag from a refinement that halves h and r_min.
KatoEstimate estimate_kato_norm(const ScalarField& V, double lambda, const GridSpec& grid,
                                const KatoOptions& opt = {});

/// Smooth test functions spanning several scales and frequencies, decayed at the outer boundary.
struct TestFunction {
  std::string name;
  Vec values;
};
std::vector<TestFunction> test_bank(const Mesh& mesh);

/// Certifies ||sqrt(V) f||^2 <= nu ||grad f||^2 + lambda nu ||f||^2 on the test bank.
/// Returns the worst observed effective form-bound with c = lambda nu.
FormBoundEstimate birman_formbound_from_kato(const ScalarField& V, double nu, double lambda,
                                             const GridSpec& grid, double tolerance = 1e-2);

enum class InequalityKind { Hardy, Nash, SpectralGap };

struct InequalityParams {
  double c_nash = 0.0;
  double beta = 1.0;
  double tau = 1.0;
  Vec center;  // Hardy singular point or Gaussian centre o; defaults to the origin
  double boundary_tolerance = 1e-8;
};

struct InequalityReport {
  InequalityKind kind;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool degenerate = false;
  bool holds = false;
};

/// lhs <= rhs forms:
///   hardy: (d-2)^2/4 ||f/|x|||^2 <= ||grad f||^2
///   nash: c_N ||f||_2^{2+4/d} ||f||_1^{-4/d} <= ||grad f||^2
///   spectral gap: (2 beta tau)^{-1} <Gamma |f - <Gamma f>|^2> <= <Gamma |grad f|^2>
InequalityReport check_inequality(InequalityKind kind, const GridFunction& f,
                                  const InequalityParams& params);

/// Smallest ||grad psi||^2 ||psi||_1^{4/d} / ||psi||_2^{2+4/d} over the test bank.
double calibrate_nash_constant(const Mesh& mesh);

}  // namespace fbheat
