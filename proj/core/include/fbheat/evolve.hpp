#pragma once

#include "fbheat/fields.hpp"
#include "fbheat/grid.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fbheat {

/// Operator variant; fixes the zero-order potential V in -div a grad + b.grad + V.
enum class Variant { Lambda, LambdaStar, Hplus, Hminus, HminusPprime };
enum class Scheme { BackwardEuler, CrankNicolson };
/// Forward: x -> u(t,x;s,y) for a fixed source y. Adjoint: y -> u(t,x;s,y) for a fixed x.
enum class Direction { Forward, Adjoint };
enum class LinearSolverKind { Auto, Thomas, GaussSeidel, BiCGSTAB };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);
std::string to_string(Scheme s);
std::string to_string(Direction d);

struct ParabolicProblem {
  DiffusionMatrix a;
  DriftField b;
  Variant variant = Variant::Lambda;
  /// Conjugate exponent used by HminusPprime.
  double p_prime = 2.0;
  /// div b_+ and div b_- (already mollified when the variant calls for it). When absent they are
  /// taken pointwise from the divergence of b.
  std::optional<ScalarField> div_plus;
  std::optional<ScalarField> div_minus;
  /// Extra potential added to the variant's V.
  std::optional<ScalarField> extra_potential;
};

struct SolverConfig {
  GridSpec grid;
  Scheme scheme = Scheme::BackwardEuler;
  LinearSolverKind solver = LinearSolverKind::Auto;
  double solver_tolerance = 1e-10;
  int max_solver_iterations = 20000;
  /// Dirac data is k_1(tau0, . - y) with tau0 = dirac_fraction (t - s).
  double dirac_fraction = 0.01;
  /// Cartesian step: min(h^2 / (2 d xi), (t - s) / min_steps).
  int min_steps = 200;
  /// Radial step: dt = growth * (elapsed time since the Dirac), capped by (t - s) / min_steps.
  double radial_growth = 2e-4;
  double leak_tolerance = 1e-6;
  bool check_leak = true;
};

/// Assembled generator G with du/dt = G u, G = div a grad - b.grad - V, on zero-flux walls.
struct Generator {
  MeshPtr mesh;
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  Vec potential;

  /// G* = W^{-1} G^T W, the generator of the adjoint (density) evolution.
  Generator adjoint() const;
  double max_diagonal() const;
};

/// Zero-order potential of the variant at the cell centres.
Vec variant_potential(const ParabolicProblem& problem, const Mesh& mesh);
Generator assemble(const ParabolicProblem& problem, const MeshPtr& mesh);

/// Time steps carrying the elapsed time from `origin` to `horizon`, landing exactly on every
/// time in `stops`. The elapsed time counts from the (approximate) Dirac source.
std::vector<double> time_steps(const SolverConfig& cfg, const Mesh& mesh, double xi, double origin,
                               double horizon, const std::vector<double>& stops);

/// Evolves f from s to t. Adjoint direction evolves with G*.
GridFunction solve(const ParabolicProblem& problem, const GridFunction& f, double s, double t,
                   const SolverConfig& cfg, Direction direction = Direction::Forward);

struct HeatKernelEstimate {
  double s = 0.0;
  double t = 0.0;
  Vec source;
  Direction direction = Direction::Adjoint;
  Variant variant = Variant::Lambda;
  std::string scheme;
  GridSpec grid;
  double tau0 = 0.0;
  GridFunction values;
  /// Integral of the slice over the co-variable.
  double mass = 0.0;
  /// <u(t,x;s,.)>, available for adjoint slices.
  std::optional<double> row_mass;
  /// sup u (t - s)^{d/2}.
  double sup_constant = 0.0;
};

/// Normalized k_1(tau0, . - y) on the mesh.
Vec dirac_approximation(const Mesh& mesh, const Vec& y, double tau0);

/// Kernel slices at t = s + tau for each tau in `taus` (ascending), from one run.
std::vector<HeatKernelEstimate> estimate_kernel_series(const ParabolicProblem& problem, double s,
                                                       const std::vector<double>& taus, const Vec& point,
                                                       const SolverConfig& cfg,
                                                       Direction direction = Direction::Adjoint);
HeatKernelEstimate estimate_kernel(const ParabolicProblem& problem, double s, double t, const Vec& point,
                                   const SolverConfig& cfg, Direction direction = Direction::Adjoint);

/// Half-width 8 sqrt(xi (t - s)) plus (t - s) sup_{|x| >= sqrt(t-s)} |b|.
double suggest_box_half_width(const ParabolicProblem& problem, double tau, double factor = 8.0);

struct LpDecayReport {
  double p = 0.0;
  std::vector<double> times;
  std::vector<double> norms;
  std::vector<double> envelope;
  double worst_excess = 0.0;
  bool pass = false;
};

/// Time series of ||u(t)||_p against ||f||_p exp((1/p)(c(delta_a)/sqrt(delta_a)) t).
LpDecayReport lp_decay_check(const ParabolicProblem& problem, const GridFunction& f, double p,
                             double horizon, const SolverConfig& cfg, int samples = 10,
                             Direction direction = Direction::Forward, double tolerance = 1e-8);

struct ConsistencyReport {
  std::vector<double> epsilons;
  /// differences[i][j] = ||u_{eps_i}(t) - u_{eps_j}(t)||_2.
  std::vector<std::vector<double>> differences;
  /// ||u_{eps_i} - u_{eps_{i+1}}||_2 along the list.
  std::vector<double> consecutive;
  bool monotone_tail = false;
};

/// Pairwise L^2 differences of solutions over a decreasing epsilon list.
/// Throws CheckFailure on a non-decreasing tail when `strict`.
ConsistencyReport mollifier_consistency(const std::function<ParabolicProblem(double)>& family,
                                        const std::vector<double>& epsilons, const GridFunction& f,
                                        double t, const SolverConfig& cfg, bool strict = true);

/// L^p norm of gridded values.
double lp_norm(const GridFunction& f, double p);

}  // namespace fbheat
