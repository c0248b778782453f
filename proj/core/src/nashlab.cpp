#include "fbheat/nashlab.hpp"

#include "fbheat/errors.hpp"
#include "fbheat/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fbheat {

namespace {

void check_mass(const GridFunction& u, double tol) {
  if (u.values.minCoeff() < 0.0) throw InvalidArgument("kernel slice has negative values");
  const double mass = u.integral();
  if (std::abs(mass - 1.0) > tol) {
    std::ostringstream os;
    os << "kernel mass " << mass << " deviates from 1 by more than " << tol;
    throw CheckFailure(os.str());
  }
}

double distance(const Mesh& mesh, Index i, const Vec& c) {
  if (mesh.radial()) {
    if (c.norm() != 0.0) throw InvalidArgument("radial meshes only support the origin as centre");
    return mesh.radius(i);
  }
  return (mesh.point(i) - c).norm();
}

}  // namespace

double entropy(const GridFunction& u, double mass_tolerance) {
  check_mass(u, mass_tolerance);
  Vec e(u.values.size());
  for (Index i = 0; i < e.size(); ++i) {
    const double v = u.values[i];
    e[i] = v > 0.0 ? -v * std::log(v) : 0.0;
  }
  return u.mesh->integrate(e);
}

double moment(const GridFunction& u, const Vec& center, double mass_tolerance) {
  check_mass(u, mass_tolerance);
  const Mesh& mesh = *u.mesh;
  Vec e(u.values.size());
  for (Index i = 0; i < e.size(); ++i) e[i] = distance(mesh, i, center) * u.values[i];
  return mesh.integrate(e);
}

double g_function(const GridFunction& u, double beta, const Vec& o, double tau, const Vec& x, const Vec& y,
                  double log_floor) {
  if (!(beta > 0.0) || !(tau > 0.0)) throw InvalidArgument("G-function needs beta, t - s > 0");
  if (2.0 * (x - y).norm() > std::sqrt(beta * tau))
    throw InvalidArgument("G-function admissibility 2|x - y| <= sqrt(beta (t - s)) violated");
  const Mesh& mesh = *u.mesh;
  const double floor = log_floor * u.values.maxCoeff();
  if (!(floor > 0.0)) throw InvalidArgument("G-function needs a positive kernel slice");
  Vec w(u.values.size()), e(u.values.size());
  for (Index i = 0; i < e.size(); ++i) {
    const double r = distance(mesh, i, o);
    w[i] = gaussian_kernel_r2(beta, tau, r * r, mesh.dim());
    e[i] = w[i] * std::log(std::max(u.values[i], floor));
  }
  // Off the grid the kernel is below the floor.
  const double outside = std::max(0.0, 1.0 - mesh.integrate(w));
  return mesh.integrate(e) + outside * std::log(floor);
}

double dissipation(const GridFunction& u) {
  const Mesh& mesh = *u.mesh;
  double acc = 0.0;
  for (const auto& f : mesh.faces()) {
    const double a = u.values[f.lo], b = u.values[f.hi];
    const double mean = 0.5 * (a + b);
    if (!(mean > 0.0)) continue;
    const double g = (b - a) / f.distance;
    acc += f.area * f.distance * g * g / mean;
  }
  return acc;
}

EntropyMomentReport entropy_moment_check(const std::vector<double>& q, const std::vector<double>& m, int d) {
  if (q.size() != m.size()) throw InvalidArgument("entropy and moment series must share the time grid");
  if (d < 1) throw InvalidArgument("dimension must be positive");
  EntropyMomentReport rep;
  rep.finite = !q.empty();
  for (size_t i = 0; i < q.size(); ++i) {
    const double r = std::exp(q[i] / d) / m[i];
    rep.ratios.push_back(r);
    if (!std::isfinite(r)) rep.finite = false;
    rep.sup = std::max(rep.sup, r);
  }
  return rep;
}

NashDiagnostics nash_diagnostics(const std::vector<HeatKernelEstimate>& series, double beta_star,
                                 const NashOptions& opt) {
  if (series.empty()) throw InvalidArgument("Nash diagnostics need kernel slices");
  NashDiagnostics n;
  const int d = series.front().values.mesh->dim();
  const Vec x = series.front().source;
  double tau_max = 0.0;
  for (const auto& k : series) {
    if (k.direction != Direction::Adjoint) throw InvalidArgument("Nash diagnostics use adjoint slices y -> u(t,x;s,y)");
    const double tau = k.t - k.s;
    tau_max = std::max(tau_max, tau);
    n.taus.push_back(tau);
    n.q.push_back(entropy(k.values, opt.mass_tolerance));
    n.m.push_back(moment(k.values, x, opt.mass_tolerance));
    n.q_tilde.push_back(0.5 * d * std::log(tau));
    if (opt.with_dissipation) n.dissipation.push_back(dissipation(k.values));
  }
  n.c_minus = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n.taus.size(); ++i) {
    n.c_nee = std::max(n.c_nee, std::abs(n.q[i] - n.q_tilde[i]));
    const double c = n.m[i] / std::sqrt(n.taus[i]);
    n.c_minus = std::min(n.c_minus, c);
    n.c_plus = std::max(n.c_plus, c);
  }
  n.beta = std::max(beta_star, 16.0 * n.c_plus * n.c_plus);
  n.tau_half = 0.5 * tau_max;
  const HeatKernelEstimate* half = nullptr;
  for (const auto& k : series)
    if (std::abs((k.t - k.s) - n.tau_half) <= 1e-9 * tau_max) half = &k;
  if (!half) throw InvalidArgument("series lacks the slice at half the largest t - s");
  n.g_hat = g_function(half->values, n.beta, x, n.tau_half, x, x, opt.log_floor);
  n.g_constant = -0.5 * d * std::log(n.tau_half) - n.g_hat;
  n.entropy_moment = entropy_moment_check(n.q, n.m, d);
  return n;
}

}  // namespace fbheat
