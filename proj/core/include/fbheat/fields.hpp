#pragma once

#include "fbheat/grid.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fbheat {

using Mat = Eigen::MatrixXd;

enum class DivergenceSign { Nonnegative, Nonpositive, Mixed, Unknown };

std::string to_string(DivergenceSign s);
DivergenceSign divergence_sign_from_string(const std::string& s);

/// Kato data (nu, lambda) for a potential: ||(lambda - Laplacian)^{-1}|V|||_inf <= nu.
struct KatoData {
  double nu = 0.0;
  double lambda = 0.0;
};

struct DriftMetadata {
  std::string id;
  double delta = 0.0;
  double c_delta = 0.0;
  DivergenceSign sign = DivergenceSign::Unknown;
  std::vector<Vec> singular_points;
  /// sup |div b| when known to be bounded.
  std::optional<double> div_sup;
  /// Kato data of div b_+ when known.
  std::optional<KatoData> kato_div_plus;
  /// Kato data of |div b| when known.
  std::optional<KatoData> kato_div_abs;
};

/// Uniformly elliptic symmetric matrix field a(x) with sigma I <= a <= xi I.
class DiffusionMatrix {
 public:
  using Eval = std::function<Mat(const Vec&)>;

  struct Flags {
    bool constant = true;
    bool diagonal = true;
    bool isotropic = true;
    bool discontinuous = false;
  };

  DiffusionMatrix(int dim, Eval eval, double sigma, double xi, Flags flags, std::string id);

  int dim() const { return dim_; }
  Mat operator()(const Vec& x) const { return eval_(x); }
  /// a_kk(x); cheaper than the full matrix for diagonal fields.
  double diagonal_entry(const Vec& x, int k) const;
  double sigma() const { return sigma_; }
  double xi() const { return xi_; }
  const Flags& flags() const { return flags_; }
  const std::string& id() const { return id_; }

 private:
  int dim_;
  Eval eval_;
  double sigma_;
  double xi_;
  Flags flags_;
  std::string id_;
};

enum class MatrixKind { Identity, DiagonalConstant, Constant, Checkerboard };

struct MatrixParams {
  int dim = 3;
  Vec diagonal;     // DiagonalConstant
  Mat matrix;       // Constant, first Checkerboard tile
  Mat matrix2;      // second Checkerboard tile
  double cell = 1.0;
};

/// Builds a matrix field and verifies symmetry and positive definiteness of its tiles.
DiffusionMatrix make_matrix(MatrixKind kind, const MatrixParams& params);

/// Radial profile of a radially symmetric field: value g(r).
using Profile = std::function<double(double)>;

/// Vector field b with metadata. Radial fields b(x) = g(|x|) x/|x| also keep g.
class DriftField {
 public:
  using Eval = std::function<Vec(const Vec&)>;
  using ScalarEval = std::function<double(const Vec&)>;

  DriftField(int dim, Eval eval, std::optional<ScalarEval> divergence, DriftMetadata meta);
  static DriftField radial(int dim, Profile g, std::optional<Profile> divergence,
                           DriftMetadata meta);

  int dim() const { return dim_; }
  /// Throws SingularPointError at declared singular points.
  Vec operator()(const Vec& x) const;
  bool has_divergence() const { return divergence_.has_value(); }
  double divergence(const Vec& x) const;

  bool is_radial() const { return static_cast<bool>(radial_g_); }
  /// Radial component g(r); only for radial fields.
  double radial_component(double r) const;
  /// div b as a function of r; only for radial fields with a divergence.
  double radial_divergence(double r) const;
  const Profile& radial_profile() const { return radial_g_; }

  /// The field s*b; delta and c(delta) scale by s^2, the divergence sign flips for s < 0.
  DriftField scaled(double s) const;

  const DriftMetadata& meta() const { return meta_; }
  DriftMetadata& meta() { return meta_; }

 private:
  void check_regular(const Vec& x) const;

  int dim_;
  Eval eval_;
  std::optional<ScalarEval> divergence_;
  Profile radial_g_;
  Profile radial_div_;
  DriftMetadata meta_;
};

struct ScalarInfo {
  std::string id;
  std::vector<Vec> singular_points;
  /// Radii where a radial profile jumps or kinks; quadratures split there.
  std::vector<double> breakpoints;
  std::optional<double> constant;
  std::optional<double> sup;
};

class ScalarField {
 public:
  using Eval = std::function<double(const Vec&)>;

  ScalarField(int dim, Eval eval, ScalarInfo info);
  static ScalarField radial(int dim, Profile profile, ScalarInfo info);

  int dim() const { return dim_; }
  double operator()(const Vec& x) const;
  bool is_radial() const { return static_cast<bool>(profile_); }
  double profile(double r) const;
  const Profile& radial_profile() const { return profile_; }
  const ScalarInfo& info() const { return info_; }

 private:
  int dim_;
  Eval eval_;
  Profile profile_;
  ScalarInfo info_;
};

enum class HardySign { Attracting, Repelling };

/// b(x) = +-sqrt(delta) (d-2)/2 |x|^{-2} x, singular at the origin.
DriftField hardy_drift(int d, double delta, HardySign sign);
DriftField zero_drift(int d);
DriftField constant_drift(const Vec& v);
/// b(x) = c * x restricted to `axis`, or to all axes when axis < 0.
DriftField linear_drift(int d, double c, int axis = -1);
/// b(x) = -amp tanh(x_1) e_1; smooth, bounded, div b = -amp sech^2(x_1).
DriftField tanh_drift(int d, double amp);

ScalarField indicator_ball(int d, double radius = 1.0);
/// V(x) = |x|^{-2}.
ScalarField inverse_square(int d);
ScalarField constant_scalar(int d, double value);

/// Centered-difference divergence of b on the cells of a grid.
GridFunction numeric_divergence(const DriftField& b, const MeshPtr& mesh);

struct DivergenceSplit {
  GridFunction div;
  GridFunction plus;   // 0 v div b
  GridFunction minus;  // div b_+ - div b
};

DivergenceSplit split_divergence(const GridFunction& div);

/// Samples a scalar field on the cells of a mesh.
GridFunction sample(const ScalarField& f, const MeshPtr& mesh);

}  // namespace fbheat
