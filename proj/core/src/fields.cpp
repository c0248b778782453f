#include "fbheat/fields.hpp"

#include "fbheat/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

namespace fbheat {

std::string to_string(DivergenceSign s) {
  switch (s) {
    case DivergenceSign::Nonnegative: return "nonnegative";
    case DivergenceSign::Nonpositive: return "nonpositive";
    case DivergenceSign::Mixed: return "mixed";
    case DivergenceSign::Unknown: break;
  }
  return "unknown";
}

DivergenceSign divergence_sign_from_string(const std::string& s) {
  if (s == "nonnegative") return DivergenceSign::Nonnegative;
  if (s == "nonpositive") return DivergenceSign::Nonpositive;
  if (s == "mixed") return DivergenceSign::Mixed;
  if (s == "unknown") return DivergenceSign::Unknown;
  throw InvalidArgument("unknown divergence sign tag '" + s + "'");
}

DiffusionMatrix::DiffusionMatrix(int dim, Eval eval, double sigma, double xi, Flags flags,
                                 std::string id)
    : dim_(dim), eval_(std::move(eval)), sigma_(sigma), xi_(xi), flags_(flags), id_(std::move(id)) {
  if (!(sigma > 0.0) || !(xi >= sigma)) throw InvalidArgument("ellipticity requires 0 < sigma <= xi");
}

double DiffusionMatrix::diagonal_entry(const Vec& x, int k) const { return eval_(x)(k, k); }

namespace {

void check_spd(const Mat& m, const char* what) {
  if (m.rows() != m.cols()) throw InvalidArgument(std::string(what) + " must be square");
  if (!m.isApprox(m.transpose(), 1e-12)) throw InvalidArgument(std::string(what) + " is not symmetric");
  const Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (!(es.eigenvalues().minCoeff() > 0.0))
    throw InvalidArgument(std::string(what) + " is not positive definite");
}

std::pair<double, double> extreme_eigenvalues(const Mat& m) {
  const Eigen::SelfAdjointEigenSolver<Mat> es(m);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

bool is_diagonal(const Mat& m) {
  return (m - Mat(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
}

bool is_scalar(const Mat& m) {
  return is_diagonal(m) && m.diagonal().maxCoeff() == m.diagonal().minCoeff();
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

DiffusionMatrix make_matrix(MatrixKind kind, const MatrixParams& p) {
  const int d = p.dim;
  if (d < 1) throw InvalidArgument("matrix dimension must be positive");
  switch (kind) {
    case MatrixKind::Identity:
      return DiffusionMatrix(d, [d](const Vec&) { return Mat::Identity(d, d); }, 1.0, 1.0, {},
                             "identity:d=" + std::to_string(d));
    case MatrixKind::DiagonalConstant: {
      if (p.diagonal.size() != d) throw InvalidArgument("diagonal needs one entry per axis");
      if (!(p.diagonal.minCoeff() > 0.0)) throw InvalidArgument("diagonal entries must be positive");
      const Mat m = p.diagonal.asDiagonal();
      DiffusionMatrix::Flags f;
      f.isotropic = is_scalar(m);
      std::string id = "diag:";
      for (int k = 0; k < d; ++k) id += (k ? "," : "") + std::string("a") + std::to_string(k + 1) + "=" + fmt_num(p.diagonal[k]);
      return DiffusionMatrix(d, [m](const Vec&) { return m; }, p.diagonal.minCoeff(),
                             p.diagonal.maxCoeff(), f, id);
    }
    case MatrixKind::Constant: {
      check_spd(p.matrix, "matrix");
      if (p.matrix.rows() != d) throw InvalidArgument("matrix size does not match dimension");
      const auto [lo, hi] = extreme_eigenvalues(p.matrix);
      DiffusionMatrix::Flags f;
      f.diagonal = is_diagonal(p.matrix);
      f.isotropic = is_scalar(p.matrix);
      const Mat m = p.matrix;
      return DiffusionMatrix(d, [m](const Vec&) { return m; }, lo, hi, f, "constant-matrix");
    }
    case MatrixKind::Checkerboard: {
      check_spd(p.matrix, "first checkerboard tile");
      check_spd(p.matrix2, "second checkerboard tile");
      if (p.matrix.rows() != d || p.matrix2.rows() != d)
        throw InvalidArgument("checkerboard tile size does not match dimension");
      if (!(p.cell > 0.0)) throw InvalidArgument("checkerboard cell size must be positive");
      const auto [lo1, hi1] = extreme_eigenvalues(p.matrix);
      const auto [lo2, hi2] = extreme_eigenvalues(p.matrix2);
      DiffusionMatrix::Flags f;
      f.constant = false;
      f.diagonal = is_diagonal(p.matrix) && is_diagonal(p.matrix2);
      f.isotropic = false;
      f.discontinuous = !p.matrix.isApprox(p.matrix2, 0.0);
      const Mat m1 = p.matrix, m2 = p.matrix2;
      const double cell = p.cell;
      auto eval = [m1, m2, cell](const Vec& x) -> Mat {
        long parity = 0;
        for (Index k = 0; k < x.size(); ++k) parity += static_cast<long>(std::floor(x[k] / cell));
        return (parity % 2 == 0) ? m1 : m2;
      };
      return DiffusionMatrix(d, eval, std::min(lo1, lo2), std::max(hi1, hi2), f,
                             "checkerboard:a=" + fmt_num(m1(0, 0)) + ",b=" + fmt_num(m2(0, 0)) +
                                 ",cell=" + fmt_num(cell));
    }
  }
  throw InvalidArgument("unknown matrix kind");
}

DriftField::DriftField(int dim, Eval eval, std::optional<ScalarEval> divergence, DriftMetadata meta)
    : dim_(dim), eval_(std::move(eval)), divergence_(std::move(divergence)), meta_(std::move(meta)) {
  if (dim < 1) throw InvalidArgument("drift dimension must be positive");
}

DriftField DriftField::radial(int dim, Profile g, std::optional<Profile> divergence,
                              DriftMetadata meta) {
  auto eval = [g](const Vec& x) -> Vec {
    const double r = x.norm();
    if (r == 0.0) return Vec::Zero(x.size());
    return (g(r) / r) * x;
  };
  std::optional<ScalarEval> div;
  if (divergence) {
    Profile dv = *divergence;
    div = [dv](const Vec& x) { return dv(x.norm()); };
  }
  DriftField f(dim, eval, div, std::move(meta));
  f.radial_g_ = std::move(g);
  if (divergence) f.radial_div_ = *divergence;
  return f;
}

void DriftField::check_regular(const Vec& x) const {
  for (const auto& p : meta_.singular_points) {
    if ((x - p).norm() == 0.0) {
      std::ostringstream os;
      os << "drift '" << meta_.id << "' evaluated at singular point (" << p.transpose() << ")";
      throw SingularPointError(os.str());
    }
  }
}

Vec DriftField::operator()(const Vec& x) const {
  check_regular(x);
  return eval_(x);
}

double DriftField::divergence(const Vec& x) const {
  if (!divergence_) throw InvalidArgument("drift '" + meta_.id + "' has no divergence evaluator");
  check_regular(x);
  return (*divergence_)(x);
}

double DriftField::radial_component(double r) const {
  if (!radial_g_) throw InvalidArgument("drift '" + meta_.id + "' is not radial");
  if (r == 0.0 && !meta_.singular_points.empty())
    throw SingularPointError("drift '" + meta_.id + "' evaluated at singular point r = 0");
  return radial_g_(r);
}

double DriftField::radial_divergence(double r) const {
  if (!radial_div_) throw InvalidArgument("drift '" + meta_.id + "' has no radial divergence");
  if (r == 0.0 && !meta_.singular_points.empty())
    throw SingularPointError("drift '" + meta_.id + "' evaluated at singular point r = 0");
  return radial_div_(r);
}

DriftField DriftField::scaled(double s) const {
  DriftMetadata m = meta_;
  m.delta *= s * s;
  m.c_delta *= s * s;
  m.id = meta_.id + "*" + fmt_num(s);
  if (s < 0.0) {
    if (m.sign == DivergenceSign::Nonnegative) m.sign = DivergenceSign::Nonpositive;
    else if (m.sign == DivergenceSign::Nonpositive) m.sign = DivergenceSign::Nonnegative;
  }
  if (s == 0.0) m.sign = DivergenceSign::Nonnegative;
  if (m.div_sup) *m.div_sup *= std::abs(s);
  m.kato_div_plus.reset();
  if (m.kato_div_abs) m.kato_div_abs->nu *= std::abs(s);
  if (radial_g_) {
    Profile g = radial_g_;
    std::optional<Profile> dv;
    if (radial_div_) {
      Profile base = radial_div_;
      dv = [base, s](double r) { return s * base(r); };
    }
    return radial(dim_, [g, s](double r) { return s * g(r); }, dv, m);
  }
  Eval e = eval_;
  std::optional<ScalarEval> dv;
  if (divergence_) {
    ScalarEval base = *divergence_;
    dv = [base, s](const Vec& x) { return s * base(x); };
  }
  return DriftField(dim_, [e, s](const Vec& x) -> Vec { return s * e(x); }, dv, m);
}

ScalarField::ScalarField(int dim, Eval eval, ScalarInfo info)
    : dim_(dim), eval_(std::move(eval)), info_(std::move(info)) {}

ScalarField ScalarField::radial(int dim, Profile profile, ScalarInfo info) {
  ScalarField f(dim, [profile](const Vec& x) { return profile(x.norm()); }, std::move(info));
  f.profile_ = std::move(profile);
  return f;
}

double ScalarField::operator()(const Vec& x) const {
  for (const auto& p : info_.singular_points)
    if ((x - p).norm() == 0.0)
      throw SingularPointError("scalar field '" + info_.id + "' evaluated at a singular point");
  return eval_(x);
}

double ScalarField::profile(double r) const {
  if (!profile_) throw InvalidArgument("scalar field '" + info_.id + "' is not radial");
  if (r == 0.0 && !info_.singular_points.empty())
    throw SingularPointError("scalar field '" + info_.id + "' evaluated at r = 0");
  return profile_(r);
}

DriftField hardy_drift(int d, double delta, HardySign sign) {
  if (d < 3) throw InvalidArgument("Hardy drift requires d >= 3");
  if (!(delta > 0.0)) throw InvalidArgument("Hardy drift requires delta > 0");
  const double s = sign == HardySign::Attracting ? 1.0 : -1.0;
  const double k = s * std::sqrt(delta) * (d - 2) / 2.0;
  const double kd = s * std::sqrt(delta) * (d - 2) * (d - 2) / 2.0;
  DriftMetadata m;
  m.id = "hardy:d=" + std::to_string(d) + ",delta=" + fmt_num(delta) + ",sign=" + (s > 0 ? "+" : "-");
  m.delta = delta;
  m.c_delta = 0.0;
  m.sign = s > 0 ? DivergenceSign::Nonnegative : DivergenceSign::Nonpositive;
  m.singular_points = {Vec::Zero(d)};
  return DriftField::radial(d, [k](double r) { return k / r; }, Profile([kd](double r) { return kd / (r * r); }), m);
}

DriftField zero_drift(int d) {
  DriftMetadata m;
  m.id = "zero:d=" + std::to_string(d);
  m.sign = DivergenceSign::Nonnegative;
  m.div_sup = 0.0;
  m.kato_div_plus = KatoData{0.0, 0.0};
  m.kato_div_abs = KatoData{0.0, 0.0};
  return DriftField::radial(d, [](double) { return 0.0; }, Profile([](double) { return 0.0; }), m);
}

DriftField constant_drift(const Vec& v) {
  const int d = static_cast<int>(v.size());
  DriftMetadata m;
  m.id = "constant:d=" + std::to_string(d) + ",v=" + fmt_num(v[0]);
  m.delta = 0.0;
  m.c_delta = v.squaredNorm();
  m.sign = DivergenceSign::Nonnegative;
  m.div_sup = 0.0;
  m.kato_div_plus = KatoData{0.0, 0.0};
  m.kato_div_abs = KatoData{0.0, 0.0};
  return DriftField(d, [v](const Vec&) -> Vec { return v; }, DriftField::ScalarEval([](const Vec&) { return 0.0; }), m);
}

DriftField linear_drift(int d, double c, int axis) {
  if (axis >= d) throw InvalidArgument("linear drift axis out of range");
  DriftMetadata m;
  m.id = "linear:d=" + std::to_string(d) + ",c=" + fmt_num(c) + ",axis=" + std::to_string(axis);
  m.delta = std::numeric_limits<double>::infinity();
  m.c_delta = std::numeric_limits<double>::infinity();
  const double div = axis < 0 ? c * d : c;
  m.sign = div >= 0 ? DivergenceSign::Nonnegative : DivergenceSign::Nonpositive;
  m.div_sup = std::abs(div);
  auto eval = [c, axis](const Vec& x) -> Vec {
    if (axis < 0) return c * x;
    Vec b = Vec::Zero(x.size());
    b[axis] = c * x[axis];
    return b;
  };
  return DriftField(d, eval, DriftField::ScalarEval([div](const Vec&) { return div; }), m);
}

DriftField tanh_drift(int d, double amp) {
  DriftMetadata m;
  m.id = "tanh:d=" + std::to_string(d) + ",amp=" + fmt_num(amp);
  m.delta = 0.0;
  m.c_delta = amp * amp;
  m.sign = amp >= 0 ? DivergenceSign::Nonpositive : DivergenceSign::Nonnegative;
  m.div_sup = std::abs(amp);
  m.kato_div_abs = KatoData{std::abs(amp), 1.0};
  if (amp <= 0) m.kato_div_plus = KatoData{std::abs(amp), 1.0};
  else m.kato_div_plus = KatoData{0.0, 0.0};
  auto eval = [amp](const Vec& x) -> Vec {
    Vec b = Vec::Zero(x.size());
    b[0] = -amp * std::tanh(x[0]);
    return b;
  };
  auto div = [amp](const Vec& x) {
    const double c = std::cosh(x[0]);
    return -amp / (c * c);
  };
  return DriftField(d, eval, DriftField::ScalarEval(div), m);
}

ScalarField indicator_ball(int d, double radius) {
  ScalarInfo info;
  info.id = "indicator-ball:d=" + std::to_string(d) + ",radius=" + fmt_num(radius);
  info.breakpoints = {radius};
  info.sup = 1.0;
  return ScalarField::radial(d, [radius](double r) { return r < radius ? 1.0 : 0.0; }, info);
}

ScalarField inverse_square(int d) {
  ScalarInfo info;
  info.id = "inverse-square:d=" + std::to_string(d);
  info.singular_points = {Vec::Zero(d)};
  return ScalarField::radial(d, [](double r) { return 1.0 / (r * r); }, info);
}

ScalarField constant_scalar(int d, double value) {
  ScalarInfo info;
  info.id = "constant:d=" + std::to_string(d) + ",value=" + fmt_num(value);
  info.constant = value;
  info.sup = std::abs(value);
  return ScalarField::radial(d, [value](double) { return value; }, info);
}

namespace {

void check_clearance(const std::vector<Vec>& singular, const Mesh& mesh, const std::string& id) {
  if (mesh.radial()) {
    for (const auto& p : singular)
      if (p.norm() != 0.0)
        throw InvalidArgument("radial grids only support a singular point at the origin ('" + id + "')");
    return;
  }
  double h = 0.0;
  for (int k = 0; k < mesh.dim(); ++k) h = std::max(h, mesh.spec().spacing_along(k));
  for (Index i = 0; i < mesh.size(); ++i) {
    const Vec x = mesh.point(i);
    for (const auto& p : singular) {
      if ((x - p).lpNorm<Eigen::Infinity>() < h) {
        std::ostringstream os;
        os << "grid cell " << i << " at (" << x.transpose() << ") is within one cell of singular point ("
           << p.transpose() << ") of '" << id << "'";
        throw SingularPointError(os.str());
      }
    }
  }
}

}  // namespace

GridFunction numeric_divergence(const DriftField& b, const MeshPtr& mesh) {
  check_clearance(b.meta().singular_points, *mesh, b.meta().id);
  const int d = mesh->dim();
  Vec out(mesh->size());
  if (mesh->radial()) {
    for (Index i = 0; i < mesh->size(); ++i) {
      const double r = mesh->radius(i);
      const double h = 0.5 * mesh->width(i);
      const double up = std::pow(r + h, d - 1) * b.radial_component(r + h);
      const double lo = std::pow(r - h, d - 1) * b.radial_component(r - h);
      out[i] = (up - lo) / (2.0 * h * std::pow(r, d - 1));
    }
    return {mesh, out};
  }
  for (Index i = 0; i < mesh->size(); ++i) {
    const Vec x = mesh->point(i);
    double acc = 0.0;
    for (int k = 0; k < d; ++k) {
      const double h = mesh->spec().spacing_along(k);
      Vec xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      acc += (b(xp)[k] - b(xm)[k]) / (2.0 * h);
    }
    out[i] = acc;
  }
  return {mesh, out};
}

DivergenceSplit split_divergence(const GridFunction& div) {
  DivergenceSplit s;
  s.div = div;
  s.plus = {div.mesh, div.values.cwiseMax(0.0)};
  s.minus = {div.mesh, s.plus.values - div.values};
  return s;
}

GridFunction sample(const ScalarField& f, const MeshPtr& mesh) {
  Vec v(mesh->size());
  for (Index i = 0; i < mesh->size(); ++i) {
    v[i] = (mesh->radial() && f.is_radial()) ? f.profile(mesh->radius(i)) : f(mesh->point(i));
  }
  return {mesh, v};
}

}  // namespace fbheat
