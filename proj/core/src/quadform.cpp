#include "fbheat/quadform.hpp"

#include "fbheat/errors.hpp"
#include "fbheat/gaussian.hpp"
#include "fbheat/quadrature.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace fbheat {

SpMat stiffness(const Mesh& mesh, bool inner_dirichlet) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(4 * mesh.faces().size() + mesh.walls().size());
  for (const auto& f : mesh.faces()) {
    const double w = f.area / f.distance;
    t.emplace_back(f.lo, f.lo, w);
    t.emplace_back(f.hi, f.hi, w);
    t.emplace_back(f.lo, f.hi, -w);
    t.emplace_back(f.hi, f.lo, -w);
  }
  for (const auto& w : mesh.walls()) {
    if (mesh.radial() && w.side < 0 && !inner_dirichlet) continue;
    t.emplace_back(w.cell, w.cell, w.area / w.distance);
  }
  SpMat k(mesh.size(), mesh.size());
  k.setFromTriplets(t.begin(), t.end());
  return k;
}

Vec squared_magnitude(const DriftField& b, const Mesh& mesh) {
  Vec out(mesh.size());
  for (Index i = 0; i < mesh.size(); ++i) {
    if (mesh.radial()) {
      const double g = b.radial_component(mesh.radius(i));
      out[i] = g * g;
    } else {
      out[i] = b(mesh.point(i)).squaredNorm();
    }
  }
  return out;
}

namespace {

double largest_mass_ratio(const Eigen::SimplicialLDLT<SpMat>& solver, const SpMat& k, const Vec& w) {
  Vec x = Vec::Ones(w.size());
  double rho = 0.0;
  for (int it = 0; it < 1000; ++it) {
    const Vec y = solver.solve(w.cwiseProduct(x));
    const double next = y.dot(w.cwiseProduct(y)) / y.dot(k * y);
    x = y / y.norm();
    if (std::abs(next - rho) <= 1e-10 * next) return next;
    rho = next;
  }
  return rho;
}

}  // namespace

double form_bound_on_mesh(const Mesh& mesh, const Vec& b2, double c, const FormBoundOptions& opt,
                          int* iterations) {
  if (c < 0.0) throw InvalidArgument("compensating constant c must be nonnegative");
  const Vec& w = mesh.volumes();
  const Vec dvec = w.cwiseProduct(b2.array().matrix() - Vec::Constant(b2.size(), c));
  if (iterations) *iterations = 0;
  if (dvec.maxCoeff() <= 0.0) return 0.0;

  const SpMat k = stiffness(mesh, true);
  Eigen::SimplicialLDLT<SpMat> solver(k);
  if (solver.info() != Eigen::Success) throw InvalidArgument("Dirichlet energy matrix is singular");
  const double mu = c > 0.0 ? 1.01 * c * largest_mass_ratio(solver, k, w) : 0.0;

  Vec x = Vec::Ones(mesh.size());
  double rho = -std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opt.max_iterations; ++it) {
    Vec y = solver.solve(dvec.cwiseProduct(x)) + mu * x;
    y /= y.norm();
    const double next = y.dot(dvec.cwiseProduct(y)) / y.dot(k * y);
    x = y;
    if (std::abs(next - rho) <= opt.tolerance * std::max(std::abs(next), 1e-300)) {
      if (iterations) *iterations = it;
      return std::max(0.0, next);
    }
    rho = next;
  }
  throw ConvergenceError("form-bound power iteration did not converge within " +
                             std::to_string(opt.max_iterations) + " iterations",
                         rho);
}

double form_bound_inertia(const Mesh& mesh, const Vec& b2, double c) {
  if (!mesh.radial()) throw InvalidArgument("inertia route requires a radial (tridiagonal) mesh");
  const Index n = mesh.size();
  const Vec& w = mesh.volumes();
  const Vec dvec = w.cwiseProduct(b2 - Vec::Constant(n, c));
  if (dvec.maxCoeff() <= 0.0) return 0.0;
  const SpMat k = stiffness(mesh, true);
  Vec kd(n), ko(std::max<Index>(n - 1, 0));
  for (Index i = 0; i < n; ++i) kd[i] = k.coeff(i, i);
  for (Index i = 0; i + 1 < n; ++i) ko[i] = k.coeff(i, i + 1);
  // Number of pencil eigenvalues above lambda = negative pivots of lambda K - D.
  auto count_above = [&](double lambda) {
    int neg = 0;
    double piv = 0.0;
    for (Index i = 0; i < n; ++i) {
      double a = lambda * kd[i] - dvec[i];
      if (i > 0) {
        const double off = lambda * ko[i - 1];
        a -= off * off / piv;
      }
      if (a == 0.0) a = -1e-300;
      if (a < 0.0) ++neg;
      piv = a;
    }
    return neg;
  };
  if (count_above(0.0) == 0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (count_above(hi) > 0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (count_above(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<GridSpec> refinement_ladder(const GridSpec& grid, int levels, bool extend_log_range) {
  std::vector<GridSpec> out{grid};
  for (int k = 1; k < levels; ++k) {
    GridSpec g = out.back().refined();
    if (g.is_radial() && extend_log_range) g.r_min = g.r_max * std::pow(out.back().r_min / g.r_max, 2.0);
    g.validate();
    out.push_back(g);
  }
  return out;
}

FormBoundEstimate estimate_form_bound(const DriftField& b, double c, const GridSpec& grid,
                                      const FormBoundOptions& opt) {
  if (c < 0.0) throw InvalidArgument("compensating constant c must be nonnegative");
  if (grid.is_radial() && !b.is_radial())
    throw InvalidArgument("radial form-bound estimate requires a radial drift");
  FormBoundEstimate est;
  est.c_of_delta = c;
  for (const auto& g : refinement_ladder(grid, std::max(1, opt.levels), opt.extend_log_range)) {
    const Mesh mesh(g);
    const Vec b2 = squared_magnitude(b, mesh);
    RefinementLevel level;
    level.grid = g;
    level.value = form_bound_on_mesh(mesh, b2, c, opt, &level.iterations);
    if (mesh.radial()) {
      const double check = form_bound_inertia(mesh, b2, c);
      if (std::abs(check - level.value) > 1e-4 * std::max(check, 1e-12))
        throw InconsistencyError("power iteration and inertia bisection disagree on the form-bound");
    }
    est.trace.push_back(level);
  }
  est.delta_hat = est.trace.back().value;
  est.grid = est.trace.back().grid;
  return est;
}

double resolvent_kernel(double lambda, int d, double r) {
  if (!(r > 0.0)) throw InvalidArgument("resolvent kernel requires r > 0");
  if (lambda < 0.0) throw InvalidArgument("resolvent kernel requires lambda >= 0");
  if (d < 1) throw InvalidArgument("dimension must be positive");
  const double pi = std::numbers::pi;
  if (d == 3) return std::exp(-std::sqrt(lambda) * r) / (4.0 * pi * r);
  if (lambda == 0.0) {
    if (d < 3) throw InvalidArgument("lambda = 0 resolvent kernel needs d >= 3");
    return std::tgamma(0.5 * d - 1.0) / (4.0 * std::pow(pi, 0.5 * d)) * std::pow(r, 2.0 - d);
  }
  const double k = std::sqrt(lambda);
  const double nu = 0.5 * d - 1.0;
  return std::pow(2.0 * pi, -0.5 * d) * std::pow(k / r, nu) * std::cyl_bessel_k(std::abs(nu), k * r);
}

namespace {

// rho^{d-1} times the sphere average of G_lambda(|r e - rho w|) times omega_d.
double shell_kernel(double lambda, int d, double r, double rho) {
  const double omega = unit_sphere_area(d);
  if (r == 0.0) return omega * std::pow(rho, d - 1) * resolvent_kernel(lambda, d, rho);
  if (d == 3) {
    if (lambda == 0.0) return rho * rho / std::max(r, rho);
    const double k = std::sqrt(lambda);
    const double lo = std::min(r, rho), hi = std::max(r, rho);
    const double kl = k * lo;
    const double sh = kl < 1e-8 ? 1.0 : std::sinh(kl) / kl;
    return rho * lo * std::exp(-k * hi) * sh / r;
  }
  if (lambda == 0.0) return std::pow(rho, d - 1) * std::pow(std::max(r, rho), 2.0 - d) / (d - 2.0);
  const double scale = std::max((r - rho) * (r - rho) / (r * rho), 1e-16);
  const double mean = sphere_mean(
      d,
      [&](double u) {
        const double z2 = std::max(r * r + rho * rho - 2.0 * r * rho * u, 1e-300);
        return resolvent_kernel(lambda, d, std::sqrt(z2));
      },
      scale);
  return omega * std::pow(rho, d - 1) * mean;
}

std::vector<double> potential_breaks(const ScalarField& V, double r, double lo, double hi) {
  std::vector<double> b;
  const int per_decade = 6;
  const int panels = std::max(2, static_cast<int>(std::ceil(per_decade * std::log10(hi / lo))));
  for (int i = 0; i <= panels; ++i) b.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / panels));
  for (double x : V.info().breakpoints)
    if (x > lo && x < hi) b.push_back(x);
  if (r > lo && r < hi) b.push_back(r);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

}  // namespace

double radial_kato_potential(const ScalarField& V, double lambda, int d, double r, double r_lo,
                             double r_hi) {
  if (lambda < 0.0) throw InvalidArgument("lambda must be nonnegative");
  if (!V.is_radial()) throw InvalidArgument("radial Kato potential requires a radial field");
  const auto breaks = potential_breaks(V, r, r_lo, r_hi);
  const int order = d == 3 || lambda == 0.0 ? 10 : 6;
  return integrate_panels(
      [&](double rho) { return std::abs(V.profile(rho)) * shell_kernel(lambda, d, r, rho); }, breaks,
      order);
}

double kato_on_mesh(const ScalarField& V, double lambda, const Mesh& mesh, int max_points) {
  if (lambda < 0.0) throw InvalidArgument("lambda must be nonnegative");
  const int d = mesh.dim();
  const Index n = mesh.size();
  const Index stride = std::max<Index>(1, (n + max_points - 1) / max_points);
  if (mesh.radial()) {
    const double lo = mesh.spec().r_min, hi = mesh.spec().r_max;
    double best = radial_kato_potential(V, lambda, d, 0.0, lo, hi);
    for (Index i = 0; i < n; i += stride)
      best = std::max(best, radial_kato_potential(V, lambda, d, mesh.radius(i), lo, hi));
    return best;
  }
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = std::abs(V(mesh.point(i)));
  const Vec& w = mesh.volumes();
  // Self-cell treated as a ball of equal volume.
  auto self_term = [&](Index i) {
    const double a = std::pow(w[i] * d / unit_sphere_area(d), 1.0 / d);
    const double omega = unit_sphere_area(d);
    return omega * integrate_panels(
                       [&](double rho) { return std::pow(rho, d - 1) * resolvent_kernel(lambda, d, rho); },
                       graded_breaks(0.0, a, a * 1e-3, 4), 10);
  };
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return v[a] > v[b]; });
  std::vector<Index> eval(order.begin(), order.begin() + std::min<Index>(n, max_points / 2));
  for (Index i = 0; i < n; i += stride) eval.push_back(i);
  std::sort(eval.begin(), eval.end());
  eval.erase(std::unique(eval.begin(), eval.end()), eval.end());
  double best = 0.0;
  for (Index i : eval) {
    const Vec x = mesh.point(i);
    double acc = v[i] == 0.0 ? 0.0 : v[i] * self_term(i);
    for (Index j = 0; j < n; ++j) {
      if (j == i || v[j] == 0.0) continue;
      acc += resolvent_kernel(lambda, d, (x - mesh.point(j)).norm()) * v[j] * w[j];
    }
    best = std::max(best, acc);
  }
  return best;
}

KatoEstimate estimate_kato_norm(const ScalarField& V, double lambda, const GridSpec& grid,
                                const KatoOptions& opt) {
  if (lambda < 0.0) throw InvalidArgument("lambda must be nonnegative");
  KatoEstimate est;
  est.lambda = lambda;
  GridSpec fine = grid.refined();
  if (fine.is_radial()) fine.r_min = 0.5 * grid.r_min;
  for (const auto& g : {grid, fine}) {
    const Mesh mesh(g);
    RefinementLevel level;
    level.grid = g;
    level.value = kato_on_mesh(V, lambda, mesh, opt.max_points);
    est.trace.push_back(level);
  }
  est.nu_hat = est.trace.front().value;
  est.refined_value = est.trace.back().value;
  est.grid = grid;
  est.divergent = est.refined_value > est.nu_hat * (1.0 + opt.divergence_factor);
  return est;
}

std::vector<TestFunction> test_bank(const Mesh& mesh) {
  const int d = mesh.dim();
  std::vector<TestFunction> bank;
  const double ext = mesh.outer_extent();
  Vec center = Vec::Zero(d), half = Vec::Constant(d, ext);
  if (!mesh.radial()) {
    for (int k = 0; k < d; ++k) {
      center[k] = 0.5 * (mesh.spec().lower[k] + mesh.spec().upper[k]);
      half[k] = 0.5 * (mesh.spec().upper[k] - mesh.spec().lower[k]);
    }
  }
  const double len = half.minCoeff();
  auto cutoff = [&](const Vec& x) {
    if (mesh.radial()) {
      const double s = x.norm() / len;
      return s >= 1.0 ? 0.0 : std::pow(1.0 - s * s, 2);
    }
    double c = 1.0;
    for (int k = 0; k < d; ++k) {
      const double s = (x[k] - center[k]) / half[k];
      c *= std::abs(s) >= 1.0 ? 0.0 : std::pow(1.0 - s * s, 2);
    }
    return c;
  };
  const double scales[] = {len / 16.0, len / 8.0, len / 4.0};
  const char* tags[] = {"fine", "mid", "coarse"};
  for (int si = 0; si < 3; ++si) {
    const double s = scales[si];
    TestFunction g{std::string("gaussian-") + tags[si], Vec(mesh.size())};
    TestFunction sh{std::string("shifted-") + tags[si], Vec(mesh.size())};
    TestFunction os{std::string("oscillatory-") + tags[si], Vec(mesh.size())};
    for (Index i = 0; i < mesh.size(); ++i) {
      const Vec x = mesh.point(i);
      const Vec z = x - center;
      const double cut = cutoff(x);
      const double r = z.norm();
      g.values[i] = std::exp(-r * r / (2 * s * s)) * cut;
      if (mesh.radial()) {
        const double r0 = len / 3.0;
        sh.values[i] = std::exp(-(r - r0) * (r - r0) / (2 * s * s)) * cut;
        os.values[i] = g.values[i] * std::cos(std::numbers::pi * r / s);
      } else {
        Vec zs = z;
        zs[0] -= len / 3.0;
        sh.values[i] = std::exp(-zs.squaredNorm() / (2 * s * s)) * cut;
        os.values[i] = g.values[i] * std::cos(std::numbers::pi * z[0] / s);
      }
    }
    bank.push_back(std::move(g));
    bank.push_back(std::move(sh));
    bank.push_back(std::move(os));
  }
  return bank;
}

FormBoundEstimate birman_formbound_from_kato(const ScalarField& V, double nu, double lambda,
                                             const GridSpec& grid, double tolerance) {
  if (!std::isfinite(nu) || nu < 0.0) throw InvalidArgument("Kato norm must be finite and nonnegative");
  if (lambda < 0.0) throw InvalidArgument("lambda must be nonnegative");
  const Mesh mesh(grid);
  const SpMat k = stiffness(mesh, false);
  const Vec& w = mesh.volumes();
  Vec v(mesh.size());
  for (Index i = 0; i < mesh.size(); ++i)
    v[i] = std::abs(mesh.radial() && V.is_radial() ? V.profile(mesh.radius(i)) : V(mesh.point(i)));
  FormBoundEstimate est;
  est.c_of_delta = lambda * nu;
  est.grid = grid;
  double worst = 0.0;
  for (const auto& f : test_bank(mesh)) {
    const Vec f2 = f.values.cwiseAbs2();
    const double qv = w.dot(v.cwiseProduct(f2));
    const double qf = w.dot(f2);
    const double qg = f.values.dot(k * f.values);
    const double bound = nu * qg + lambda * nu * qf;
    if (qv > bound * (1.0 + tolerance) + 1e-14 * (qg + qf)) {
      std::ostringstream os;
      os << "Kato-to-form-bound certificate violated on test function '" << f.name << "': "
         << qv << " > " << bound;
      throw InconsistencyError(os.str());
    }
    if (qg > 0.0) worst = std::max(worst, (qv - lambda * nu * qf) / qg);
    est.trace.push_back({grid, qg > 0.0 ? (qv - lambda * nu * qf) / qg : 0.0, 0});
  }
  est.delta_hat = worst;
  return est;
}

namespace {

double outer_fraction(const Mesh& mesh, const Vec& density) {
  double outer = 0.0;
  for (Index i : mesh.outer_layer(1)) outer += mesh.volumes()[i] * std::abs(density[i]);
  const double total = mesh.volumes().dot(density.cwiseAbs());
  return total > 0.0 ? outer / total : 0.0;
}

}  // namespace

InequalityReport check_inequality(InequalityKind kind, const GridFunction& fg,
                                  const InequalityParams& p) {
  const Mesh& mesh = *fg.mesh;
  const Vec& f = fg.values;
  const Vec& w = mesh.volumes();
  const int d = mesh.dim();
  const Vec center = p.center.size() == d ? p.center : Vec::Zero(d);
  if (mesh.radial() && center.norm() != 0.0)
    throw InvalidArgument("radial meshes only support inequalities centred at the origin");
  InequalityReport rep;
  rep.kind = kind;
  const SpMat k = stiffness(mesh, false);

  if (kind == InequalityKind::SpectralGap) {
    if (!(p.beta > 0.0) || !(p.tau > 0.0)) throw InvalidArgument("spectral gap needs beta, tau > 0");
    Vec gam(mesh.size());
    for (Index i = 0; i < mesh.size(); ++i)
      gam[i] = gaussian_kernel_r2(p.beta, p.tau, (mesh.point(i) - center).squaredNorm(), d);
    gam /= w.dot(gam);
    if (outer_fraction(mesh, gam.cwiseProduct(f.cwiseAbs2())) > p.boundary_tolerance)
      throw InvalidArgument("weighted function is not decayed at the grid boundary");
    const double mean = w.dot(gam.cwiseProduct(f));
    const Vec dev = (f.array() - mean).matrix();
    rep.lhs = w.dot(gam.cwiseProduct(dev.cwiseAbs2())) / (2.0 * p.beta * p.tau);
    double grad = 0.0;
    for (const auto& fc : mesh.faces()) {
      const double diff = f[fc.hi] - f[fc.lo];
      grad += fc.area / fc.distance * 0.5 * (gam[fc.lo] + gam[fc.hi]) * diff * diff;
    }
    rep.rhs = grad;
    const double scale = w.dot(gam.cwiseProduct(f.cwiseAbs2())) + 1e-300;
    if (rep.lhs <= 1e-14 * scale && rep.rhs <= 1e-14 * scale) {
      rep.degenerate = true;
      rep.ratio = 1.0;
      rep.holds = true;
      return rep;
    }
    rep.ratio = rep.lhs / rep.rhs;
    rep.holds = rep.ratio <= 1.0;
    return rep;
  }

  if (outer_fraction(mesh, f.cwiseAbs2()) > p.boundary_tolerance)
    throw InvalidArgument("test function is not decayed at the grid boundary");
  const double grad = f.dot(k * f);
  rep.rhs = grad;
  if (kind == InequalityKind::Hardy) {
    double acc = 0.0;
    for (Index i = 0; i < mesh.size(); ++i) {
      const double r = (mesh.point(i) - center).norm();
      if (r == 0.0) throw SingularPointError("Hardy weight evaluated at the singular point");
      acc += w[i] * f[i] * f[i] / (r * r);
    }
    rep.lhs = (d - 2.0) * (d - 2.0) / 4.0 * acc;
  } else {
    const double l2 = w.dot(f.cwiseAbs2());
    const double l1 = w.dot(f.cwiseAbs());
    rep.lhs = p.c_nash * std::pow(l2, 1.0 + 2.0 / d) * std::pow(l1, -4.0 / d);
  }
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : std::numeric_limits<double>::infinity();
  rep.holds = rep.ratio <= 1.0;
  return rep;
}

double calibrate_nash_constant(const Mesh& mesh) {
  const SpMat k = stiffness(mesh, false);
  const Vec& w = mesh.volumes();
  const int d = mesh.dim();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : test_bank(mesh)) {
    const double grad = f.values.dot(k * f.values);
    const double l2 = w.dot(f.values.cwiseAbs2());
    const double l1 = w.dot(f.values.cwiseAbs());
    best = std::min(best, grad * std::pow(l1, 4.0 / d) / std::pow(l2, 1.0 + 2.0 / d));
  }
  return best;
}

}  // namespace fbheat
