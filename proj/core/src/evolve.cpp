#include "fbheat/evolve.hpp"

#include "fbheat/errors.hpp"
#include "fbheat/gaussian.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fbheat {

using RowSpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Lambda: return "Lambda";
    case Variant::LambdaStar: return "LambdaStar";
    case Variant::Hplus: return "Hplus";
    case Variant::Hminus: return "Hminus";
    case Variant::HminusPprime: return "HminusPprime";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  for (Variant v : {Variant::Lambda, Variant::LambdaStar, Variant::Hplus, Variant::Hminus, Variant::HminusPprime})
    if (to_string(v) == s) return v;
  throw InvalidArgument("unknown operator variant '" + s + "'");
}

std::string to_string(Scheme s) { return s == Scheme::BackwardEuler ? "backward-euler+upwind" : "crank-nicolson+upwind"; }
std::string to_string(Direction d) { return d == Direction::Forward ? "forward" : "adjoint"; }

Generator Generator::adjoint() const {
  const Vec& w = mesh->volumes();
  RowSpMat t = RowSpMat(matrix.transpose());
  for (Index i = 0; i < t.outerSize(); ++i)
    for (RowSpMat::InnerIterator it(t, i); it; ++it) it.valueRef() *= w[it.col()] / w[i];
  return {mesh, t, potential};
}

double Generator::max_diagonal() const {
  double m = 0.0;
  for (Index i = 0; i < matrix.rows(); ++i) m = std::max(m, std::abs(matrix.coeff(i, i)));
  return m;
}

namespace {

double sample_scalar(const ScalarField& f, const Mesh& mesh, Index i) {
  return mesh.radial() && f.is_radial() ? f.profile(mesh.radius(i)) : f(mesh.point(i));
}

Vec divergence_values(const DriftField& b, const MeshPtr& mesh) {
  Vec div(mesh->size());
  if (!b.has_divergence()) return numeric_divergence(b, mesh).values;
  for (Index i = 0; i < mesh->size(); ++i)
    div[i] = mesh->radial() && b.is_radial() ? b.radial_divergence(mesh->radius(i)) : b.divergence(mesh->point(i));
  return div;
}

}  // namespace

Vec variant_potential(const ParabolicProblem& pb, const Mesh& mesh) {
  const Index n = mesh.size();
  Vec v = Vec::Zero(n);
  if (pb.variant != Variant::Lambda) {
    Vec plus(n), minus(n);
    const bool explicit_parts = pb.div_plus.has_value() || pb.div_minus.has_value();
    Vec div;
    if (!explicit_parts || !pb.div_plus || !pb.div_minus) {
      auto shared = std::make_shared<const Mesh>(mesh);
      div = divergence_values(pb.b, shared);
    }
    for (Index i = 0; i < n; ++i) {
      plus[i] = pb.div_plus ? sample_scalar(*pb.div_plus, mesh, i) : std::max(0.0, div[i]);
      minus[i] = pb.div_minus ? sample_scalar(*pb.div_minus, mesh, i) : std::max(0.0, -div[i]);
    }
    switch (pb.variant) {
      case Variant::LambdaStar: v = plus - minus; break;
      case Variant::Hplus: v = plus; break;
      case Variant::Hminus: v = -minus; break;
      case Variant::HminusPprime: v = -pb.p_prime * minus; break;
      case Variant::Lambda: break;
    }
  }
  if (pb.extra_potential)
    for (Index i = 0; i < n; ++i) v[i] += sample_scalar(*pb.extra_potential, mesh, i);
  return v;
}

Generator assemble(const ParabolicProblem& pb, const MeshPtr& mesh) {
  const Mesh& m = *mesh;
  const int d = m.dim();
  if (pb.a.dim() != d || pb.b.dim() != d) throw InvalidArgument("problem dimension does not match the grid");
  const Index n = m.size();
  if (m.radial()) {
    if (!(pb.a.flags().isotropic && pb.a.flags().constant))
      throw InvalidArgument("radial grids require a constant isotropic diffusion matrix");
    if (!pb.b.is_radial()) throw InvalidArgument("radial grids require a radial drift");
  } else if (!pb.a.flags().diagonal) {
    throw InvalidArgument("the finite-volume solver supports diagonal diffusion matrices only");
  }

  std::vector<Vec> acoef(d, Vec(n));
  std::vector<Vec> bcomp(d, Vec(n));
  for (Index i = 0; i < n; ++i) {
    const Vec x = m.point(i);
    const Mat ax = pb.a(x);
    for (int k = 0; k < d; ++k) acoef[k][i] = ax(k, k);
    if (m.radial()) {
      bcomp[0][i] = pb.b.radial_component(m.radius(i));
    } else {
      const Vec bx = pb.b(x);
      for (int k = 0; k < d; ++k) bcomp[k][i] = bx[k];
    }
  }

  const Vec& w = m.volumes();
  const Vec pot = variant_potential(pb, m);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * m.faces().size() + n);
  Vec offsum = Vec::Zero(n);
  auto add = [&](Index i, Index j, double c) {
    if (c == 0.0) return;
    trip.emplace_back(i, j, c);
    offsum[i] += c;
  };
  for (const auto& f : m.faces()) {
    const int k = f.axis;
    const double al = acoef[k][f.lo], ah = acoef[k][f.hi];
    const double aface = 2.0 * al * ah / (al + ah);
    const double flux = f.area * aface / f.distance;
    add(f.lo, f.hi, flux / w[f.lo]);
    add(f.hi, f.lo, flux / w[f.hi]);
    // Upwind transport for -b.grad u.
    const double bh = bcomp[k][f.hi], bl = bcomp[k][f.lo];
    if (bh > 0.0) add(f.hi, f.lo, bh / f.distance);
    if (bl < 0.0) add(f.lo, f.hi, -bl / f.distance);
  }
  for (Index i = 0; i < n; ++i) trip.emplace_back(i, i, -offsum[i] - pot[i]);
  RowSpMat g(n, n);
  g.setFromTriplets(trip.begin(), trip.end());
  return {mesh, g, pot};
}

std::vector<double> time_steps(const SolverConfig& cfg, const Mesh& mesh, double xi, double origin,
                               double horizon, const std::vector<double>& stops) {
  if (!(horizon > origin)) throw InvalidArgument("time window must satisfy s < t");
  std::vector<double> marks;
  for (double s : stops)
    if (s > origin && s < horizon) marks.push_back(s);
  marks.push_back(horizon);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  const double cap = horizon / std::max(1, cfg.min_steps);
  std::vector<double> steps;
  double e = origin;
  for (double target : marks) {
    if (mesh.radial()) {
      while (e < target) {
        double dt = std::min(cfg.radial_growth * std::max(e, 1e-300), cap);
        if (e + 1.5 * dt >= target) dt = target - e;
        steps.push_back(dt);
        e += dt;
      }
      e = target;
    } else {
      double h = std::numeric_limits<double>::infinity();
      for (int k = 0; k < mesh.dim(); ++k) h = std::min(h, mesh.spec().spacing_along(k));
      const double dt = std::min(h * h / (2.0 * mesh.dim() * xi), cap);
      const double seg = target - e;
      const int count = std::max(1, static_cast<int>(std::ceil(seg / dt - 1e-9)));
      for (int i = 0; i < count; ++i) steps.push_back(seg / count);
      e = target;
    }
  }
  return steps;
}

namespace {

class Stepper {
 public:
  Stepper(const Generator& gen, const SolverConfig& cfg) : gen_(gen), cfg_(cfg) {
    const Index n = gen.matrix.rows();
    kind_ = cfg.solver;
    if (kind_ == LinearSolverKind::Auto) kind_ = gen.mesh->radial() ? LinearSolverKind::Thomas : LinearSolverKind::GaussSeidel;
    if (kind_ == LinearSolverKind::Thomas) {
      if (!gen.mesh->radial()) throw InvalidArgument("Thomas solver requires a radial (tridiagonal) mesh");
      sub_ = Vec::Zero(n);
      dia_ = Vec::Zero(n);
      sup_ = Vec::Zero(n);
      for (Index i = 0; i < n; ++i)
        for (RowSpMat::InnerIterator it(gen.matrix, i); it; ++it) {
          if (it.col() == i - 1) sub_[i] = it.value();
          else if (it.col() == i) dia_[i] = it.value();
          else if (it.col() == i + 1) sup_[i] = it.value();
          else throw InvalidArgument("generator is not tridiagonal");
        }
    }
    neg_pot_ = std::max(0.0, -gen.potential.minCoeff());
    max_diag_ = gen.max_diagonal();
  }

  /// Splits dt so that dt |V| stays below 1/2 on negative potentials.
  void step(Vec& u, double dt) {
    const int parts = dt * neg_pot_ >= 1.0 ? static_cast<int>(std::ceil(2.0 * dt * neg_pot_)) : 1;
    for (int k = 0; k < parts; ++k) substep(u, dt / parts);
  }

 private:
  void substep(Vec& u, double dt) {
    const bool cn = cfg_.scheme == Scheme::CrankNicolson;
    if (cn && dt * max_diag_ > 2.0) {
      std::ostringstream os;
      os << "CFL violation in the explicit half-step: dt max|G_ii| = " << dt * max_diag_ << " > 2";
      throw InvalidArgument(os.str());
    }
    const double theta = cn ? 0.5 : 1.0;
    Vec rhs = u;
    if (cn) rhs += (0.5 * dt) * (gen_.matrix * u);
    const double a = theta * dt;
    if (kind_ == LinearSolverKind::Thomas) {
      thomas(rhs, a, u);
      return;
    }
    if (a != cached_dt_) {
      RowSpMat id(gen_.matrix.rows(), gen_.matrix.cols());
      id.setIdentity();
      system_ = id - a * gen_.matrix;
      system_.makeCompressed();
      cached_dt_ = a;
      bicg_.reset();
    }
    if (kind_ == LinearSolverKind::GaussSeidel) gauss_seidel(rhs, u);
    else bicgstab(rhs, u);
  }

  void thomas(const Vec& rhs, double a, Vec& x) {
    const Index n = rhs.size();
    cp_.resize(n);
    dp_.resize(n);
    double b0 = 1.0 - a * dia_[0];
    cp_[0] = -a * sup_[0] / b0;
    dp_[0] = rhs[0] / b0;
    for (Index i = 1; i < n; ++i) {
      const double lo = -a * sub_[i];
      const double den = 1.0 - a * dia_[i] - lo * cp_[i - 1];
      cp_[i] = -a * sup_[i] / den;
      dp_[i] = (rhs[i] - lo * dp_[i - 1]) / den;
    }
    x[n - 1] = dp_[n - 1];
    for (Index i = n - 2; i >= 0; --i) x[i] = dp_[i] - cp_[i] * x[i + 1];
  }

  void gauss_seidel(const Vec& rhs, Vec& x) {
    const double bnorm = rhs.norm();
    if (bnorm == 0.0) {
      x.setZero();
      return;
    }
    const Index n = rhs.size();
    const int* outer = system_.outerIndexPtr();
    const int* inner = system_.innerIndexPtr();
    const double* val = system_.valuePtr();
    for (int sweep = 1; sweep <= cfg_.max_solver_iterations; ++sweep) {
      for (Index i = 0; i < n; ++i) {
        double s = rhs[i], diag = 1.0;
        for (int p = outer[i]; p < outer[i + 1]; ++p) {
          if (inner[p] == i) diag = val[p];
          else s -= val[p] * x[inner[p]];
        }
        x[i] = s / diag;
      }
      if (sweep % 2 == 0 && (rhs - system_ * x).norm() <= cfg_.solver_tolerance * bnorm) return;
    }
    throw ConvergenceError("Gauss-Seidel did not reach the requested tolerance", (rhs - system_ * x).norm() / bnorm);
  }

  void bicgstab(const Vec& rhs, Vec& x) {
    if (!bicg_) {
      bicg_ = std::make_unique<Eigen::BiCGSTAB<RowSpMat>>();
      bicg_->setTolerance(cfg_.solver_tolerance);
      bicg_->setMaxIterations(cfg_.max_solver_iterations);
      bicg_->compute(system_);
    }
    const Vec guess = x;
    x = bicg_->solveWithGuess(rhs, guess);
    if (bicg_->info() != Eigen::Success) throw ConvergenceError("BiCGSTAB did not converge", bicg_->error());
  }

  const Generator& gen_;
  const SolverConfig& cfg_;
  LinearSolverKind kind_;
  Vec sub_, dia_, sup_, cp_, dp_;
  double neg_pot_ = 0.0;
  double max_diag_ = 0.0;
  double cached_dt_ = -1.0;
  RowSpMat system_;
  std::unique_ptr<Eigen::BiCGSTAB<RowSpMat>> bicg_;
};

double outer_fraction(const Mesh& mesh, const Vec& u) {
  const Vec& w = mesh.volumes();
  double outer = 0.0;
  for (Index i : mesh.outer_layer(1)) outer += w[i] * std::abs(u[i]);
  const double total = w.dot(u.cwiseAbs());
  return total > 0.0 ? outer / total : 0.0;
}

void check_leak(const Mesh& mesh, const Vec& u, const SolverConfig& cfg) {
  const double frac = outer_fraction(mesh, u);
  if (frac > cfg.leak_tolerance) {
    std::ostringstream os;
    os << "boundary leak: " << frac << " of the mass sits in the outer cell layer (tolerance "
       << cfg.leak_tolerance << "); enlarge the box beyond " << mesh.outer_extent();
    throw BoundaryLeakError(os.str());
  }
}

}  // namespace

GridFunction solve(const ParabolicProblem& pb, const GridFunction& f, double s, double t,
                   const SolverConfig& cfg, Direction direction) {
  if (!(s >= 0.0) || !(t > s)) throw InvalidArgument("solve requires 0 <= s < t");
  if (f.values.minCoeff() < 0.0) throw InvalidArgument("initial data must be nonnegative");
  const MeshPtr mesh = f.mesh;
  Generator gen = assemble(pb, mesh);
  if (direction == Direction::Adjoint) gen = gen.adjoint();
  const double tau = t - s;
  const double origin = cfg.dirac_fraction * tau;
  const auto steps = time_steps(cfg, *mesh, pb.a.xi(), origin, origin + tau, {});
  const bool leak = cfg.check_leak && outer_fraction(*mesh, f.values) <= cfg.leak_tolerance;
  Stepper stepper(gen, cfg);
  Vec u = f.values;
  for (double dt : steps) stepper.step(u, dt);
  if (leak) check_leak(*mesh, u, cfg);
  return {mesh, u};
}

Vec dirac_approximation(const Mesh& mesh, const Vec& y, double tau0) {
  if (!(tau0 > 0.0)) throw InvalidArgument("Dirac approximation needs tau0 > 0");
  if (mesh.radial() && y.norm() != 0.0) throw InvalidArgument("radial grids need the source at the origin");
  const int d = mesh.dim();
  Vec v(mesh.size());
  for (Index i = 0; i < mesh.size(); ++i) {
    const double r2 = mesh.radial() ? mesh.radius(i) * mesh.radius(i) : (mesh.point(i) - y).squaredNorm();
    v[i] = gaussian_kernel_r2(1.0, tau0, r2, d);
  }
  const double mass = mesh.integrate(v);
  if (!(mass > 0.0)) throw InvalidArgument("Dirac approximation has zero mass on this grid");
  return v / mass;
}

std::vector<HeatKernelEstimate> estimate_kernel_series(const ParabolicProblem& pb, double s,
                                                       const std::vector<double>& taus, const Vec& point,
                                                       const SolverConfig& cfg, Direction direction) {
  if (taus.empty()) throw InvalidArgument("need at least one time");
  if (!std::is_sorted(taus.begin(), taus.end())) throw InvalidArgument("times must be ascending");
  if (s < 0.0) throw InvalidArgument("s must be nonnegative");
  const double horizon = taus.back();
  const double tau0 = cfg.dirac_fraction * horizon;
  if (!(taus.front() > tau0)) throw InvalidArgument("all times must exceed the Dirac offset tau0");
  const MeshPtr mesh = make_mesh(cfg.grid);
  Generator gen = assemble(pb, mesh);
  if (direction == Direction::Adjoint) gen = gen.adjoint();
  Stepper stepper(gen, cfg);
  Vec u = dirac_approximation(*mesh, point, tau0);

  const auto steps = time_steps(cfg, *mesh, pb.a.xi(), tau0, horizon, taus);
  std::vector<HeatKernelEstimate> out;
  const int d = mesh->dim();
  double e = tau0;
  size_t next = 0;
  auto record = [&]() {
    HeatKernelEstimate k;
    k.s = s;
    k.t = s + taus[next];
    k.source = point;
    k.direction = direction;
    k.variant = pb.variant;
    k.scheme = to_string(cfg.scheme);
    k.grid = cfg.grid;
    k.tau0 = tau0;
    k.values = {mesh, u};
    k.mass = mesh->integrate(u);
    if (direction == Direction::Adjoint) k.row_mass = k.mass;
    k.sup_constant = u.maxCoeff() * std::pow(taus[next], 0.5 * d);
    if (cfg.check_leak) check_leak(*mesh, u, cfg);
    out.push_back(std::move(k));
    ++next;
  };
  for (double dt : steps) {
    stepper.step(u, dt);
    e += dt;
    while (next < taus.size() && std::abs(e - taus[next]) <= 1e-9 * horizon) record();
  }
  while (next < taus.size()) record();
  return out;
}

HeatKernelEstimate estimate_kernel(const ParabolicProblem& pb, double s, double t, const Vec& point,
                                   const SolverConfig& cfg, Direction direction) {
  if (!(t > s)) throw InvalidArgument("estimate_kernel requires s < t");
  return estimate_kernel_series(pb, s, {t - s}, point, cfg, direction).front();
}

double suggest_box_half_width(const ParabolicProblem& pb, double tau, double factor) {
  if (!(tau > 0.0)) throw InvalidArgument("time span must be positive");
  const int d = pb.b.dim();
  double sup = 0.0;
  std::vector<Vec> dirs;
  for (int k = 0; k < d; ++k) {
    Vec e = Vec::Zero(d);
    e[k] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  dirs.push_back(Vec::Ones(d) / std::sqrt(static_cast<double>(d)));
  for (int j = 0; j <= 12; ++j) {
    const double r = std::sqrt(tau) * std::pow(2.0, 0.5 * j);
    for (const auto& e : dirs) {
      try {
        sup = std::max(sup, pb.b(r * e).norm());
      } catch (const SingularPointError&) {
      }
    }
  }
  return factor * std::sqrt(pb.a.xi() * tau) + tau * sup;
}

double lp_norm(const GridFunction& f, double p) {
  if (std::isinf(p)) return f.values.cwiseAbs().maxCoeff();
  if (!(p >= 1.0)) throw InvalidArgument("L^p norm needs p >= 1");
  return std::pow(f.mesh->integrate(f.values.cwiseAbs().array().pow(p).matrix()), 1.0 / p);
}

LpDecayReport lp_decay_check(const ParabolicProblem& pb, const GridFunction& f, double p, double horizon,
                             const SolverConfig& cfg, int samples, Direction direction, double tolerance) {
  if (pb.variant != Variant::Lambda) throw InvalidArgument("L^p decay check applies to the Lambda variant");
  if (!(horizon > 0.0) || samples < 1) throw InvalidArgument("need a positive horizon and samples");
  const double sigma = pb.a.sigma();
  const double delta_a = pb.b.meta().delta / (sigma * sigma);
  const double c_a = pb.b.meta().c_delta / (sigma * sigma);
  double rate = 0.0;
  if (delta_a > 0.0) {
    if (delta_a >= 4.0) throw InvalidArgument("supercritical form-bound: L^p theory inapplicable");
    const double pc = 2.0 / (2.0 - std::sqrt(delta_a));
    if (p < pc) throw InvalidArgument("p must be at least the critical exponent p_c");
    rate = c_a / (std::sqrt(delta_a) * p);
  } else if (c_a > 0.0) {
    rate = std::numeric_limits<double>::infinity();
  }
  const MeshPtr mesh = f.mesh;
  Generator gen = assemble(pb, mesh);
  if (direction == Direction::Adjoint) gen = gen.adjoint();
  Stepper stepper(gen, cfg);
  std::vector<double> stops;
  const double origin = cfg.dirac_fraction * horizon;
  for (int k = 1; k <= samples; ++k) stops.push_back(origin + horizon * k / samples);
  const auto steps = time_steps(cfg, *mesh, pb.a.xi(), origin, origin + horizon, stops);
  LpDecayReport rep;
  rep.p = p;
  const double f0 = lp_norm(f, p);
  rep.times.push_back(0.0);
  rep.norms.push_back(f0);
  rep.envelope.push_back(f0);
  Vec u = f.values;
  double e = 0.0;
  size_t next = 0;
  for (double dt : steps) {
    stepper.step(u, dt);
    e += dt;
    if (next < stops.size() && std::abs(origin + e - stops[next]) <= 1e-9 * horizon) {
      rep.times.push_back(e);
      rep.norms.push_back(lp_norm({mesh, u}, p));
      rep.envelope.push_back(f0 * std::exp(rate * e));
      ++next;
    }
  }
  rep.pass = true;
  for (size_t k = 1; k < rep.norms.size(); ++k) {
    const double excess = rep.norms[k] / rep.envelope[k] - 1.0;
    rep.worst_excess = std::max(rep.worst_excess, excess);
    if (excess > tolerance) rep.pass = false;
    if (rate == 0.0 && rep.norms[k] > rep.norms[k - 1] * (1.0 + tolerance)) rep.pass = false;
  }
  return rep;
}

ConsistencyReport mollifier_consistency(const std::function<ParabolicProblem(double)>& family,
                                        const std::vector<double>& eps, const GridFunction& f, double t,
                                        const SolverConfig& cfg, bool strict) {
  if (eps.size() < 3) throw InvalidArgument("mollifier consistency needs at least 3 epsilon values");
  for (size_t i = 1; i < eps.size(); ++i)
    if (!(eps[i] < eps[i - 1])) throw InvalidArgument("epsilon list must be strictly decreasing");
  ConsistencyReport rep;
  rep.epsilons = eps;
  std::vector<Vec> sols;
  for (double e : eps) sols.push_back(solve(family(e), f, 0.0, t, cfg).values);
  const Vec& w = f.mesh->volumes();
  const size_t n = eps.size();
  rep.differences.assign(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) rep.differences[i][j] = std::sqrt(w.dot((sols[i] - sols[j]).cwiseAbs2()));
  for (size_t i = 0; i + 1 < n; ++i) rep.consecutive.push_back(rep.differences[i][i + 1]);
  const double scale = std::sqrt(w.dot(sols.back().cwiseAbs2()));
  rep.monotone_tail = true;
  for (size_t i = 1; i < rep.consecutive.size(); ++i)
    if (rep.consecutive[i] > rep.consecutive[i - 1] && rep.consecutive[i] > 1e-12 * scale) rep.monotone_tail = false;
  if (strict && !rep.monotone_tail) {
    std::ostringstream os;
    os << "mollifier consistency: differences do not decrease along the epsilon tail:";
    for (double c : rep.consecutive) os << ' ' << c;
    throw CheckFailure(os.str());
  }
  return rep;
}

}  // namespace fbheat
