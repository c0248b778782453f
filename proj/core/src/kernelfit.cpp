#include "fbheat/kernelfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace fbheat {

std::string to_string(Side s) { return s == Side::Lower ? "lower" : "upper"; }

namespace {

struct Sample {
  double tau;
  double r2;
  double log_u;
  double singular_distance;
};

double tau_of(const HeatKernelEstimate& k) { return k.t - k.s; }

std::vector<Sample> collect(const std::vector<HeatKernelEstimate>& family, double xi,
                            const std::vector<Vec>& singular, const FitRegion& region, double* radius) {
  std::vector<Sample> out;
  *radius = 0.0;
  for (const auto& k : family) {
    const double tau = tau_of(k);
    if (region.t_max > 0.0 && (tau < region.t_min || tau > region.t_max)) continue;
    const Mesh& mesh = *k.values.mesh;
    const double peak = k.values.values.maxCoeff();
    const double rmax = region.radius_factor * std::sqrt(xi * tau);
    *radius = std::max(*radius, rmax);
    for (Index i = 0; i < mesh.size(); ++i) {
      const double u = k.values.values[i];
      if (!(u > region.floor * peak)) continue;
      const Vec p = mesh.point(i);
      const double r2 = mesh.radial() ? mesh.radius(i) * mesh.radius(i) : (p - k.source).squaredNorm();
      if (r2 > rmax * rmax) continue;
      double ds = std::numeric_limits<double>::infinity();
      for (const auto& q : singular) ds = std::min(ds, mesh.radial() ? std::abs(mesh.radius(i) - q.norm()) : (p - q).norm());
      if (ds < region.exclude_radius) continue;
      out.push_back({tau, r2, std::log(u), ds});
    }
  }
  return out;
}

struct Envelope {
  double log_mult;
  double rate;
  double gap;
};

// Extremal (log c, rate) in log space: lower maximizes log c - rate * mean tau subject to
// log c - rate tau_i <= L_i; upper is the mirror image.
Envelope extremal(const std::vector<double>& taus, const std::vector<double>& logs, bool lower, bool fit_rate) {
  std::vector<double> times;
  std::vector<double> ext;
  for (size_t i = 0; i < taus.size(); ++i) {
    auto it = std::find(times.begin(), times.end(), taus[i]);
    if (it == times.end()) {
      times.push_back(taus[i]);
      ext.push_back(logs[i]);
    } else {
      double& e = ext[it - times.begin()];
      e = lower ? std::min(e, logs[i]) : std::max(e, logs[i]);
    }
  }
  const double mean_tau = std::accumulate(taus.begin(), taus.end(), 0.0) / taus.size();
  std::vector<double> rates{0.0};
  if (fit_rate)
    for (size_t j = 0; j < times.size(); ++j)
      for (size_t k = j + 1; k < times.size(); ++k) {
        const double r = lower ? (ext[j] - ext[k]) / (times[k] - times[j]) : (ext[k] - ext[j]) / (times[k] - times[j]);
        if (r > 0.0 && std::isfinite(r)) rates.push_back(r);
      }
  Envelope best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  for (double rate : rates) {
    double a = lower ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < times.size(); ++k)
      a = lower ? std::min(a, ext[k] + rate * times[k]) : std::max(a, ext[k] - rate * times[k]);
    const double objective = lower ? -(a - rate * mean_tau) : a + rate * mean_tau;
    if (objective < best.gap) best = {a, rate, objective};
  }
  double gap = 0.0;
  for (size_t i = 0; i < taus.size(); ++i) {
    const double env = lower ? best.log_mult - best.rate * taus[i] : best.log_mult + best.rate * taus[i];
    gap += std::abs(logs[i] - env);
  }
  best.gap = gap / taus.size();
  return best;
}

double slope_fit(const std::vector<double>& x, const std::vector<double>& y, double* residual = nullptr) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("regression needs at least two distinct abscissae");
  const double slope = sxy / sxx;
  if (residual) {
    double ss = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - my - slope * (x[i] - mx);
      ss += e * e;
    }
    *residual = std::sqrt(ss / n);
  }
  return slope;
}

// Slope of log(u / k) against log distance over the innermost decade, if it is resolved.
std::optional<double> inner_slope(const std::vector<Sample>& s, const std::vector<double>& logs) {
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& x : s) dmin = std::min(dmin, x.singular_distance);
  if (!std::isfinite(dmin) || !(dmin > 0.0)) return std::nullopt;
  std::vector<double> lx, ly;
  for (size_t i = 0; i < s.size(); ++i)
    if (s[i].singular_distance <= 10.0 * dmin) {
      lx.push_back(std::log(s[i].singular_distance));
      ly.push_back(logs[i]);
    }
  if (lx.size() < 3) return std::nullopt;
  const auto [lo, hi] = std::minmax_element(lx.begin(), lx.end());
  if (*hi - *lo < 0.5 * std::log(10.0)) return std::nullopt;
  return slope_fit(lx, ly);
}

}  // namespace

BoundFit fit_bound(const std::vector<HeatKernelEstimate>& family, Side side, double sigma, double xi,
                   const std::vector<Vec>& singular, const FitOptions& opt) {
  if (!(sigma > 0.0) || !(xi >= sigma)) throw InvalidArgument("ellipticity constants must satisfy 0 < sigma <= xi");
  std::vector<double> distinct;
  for (const auto& k : family)
    if (std::find(distinct.begin(), distinct.end(), tau_of(k)) == distinct.end()) distinct.push_back(tau_of(k));
  if (distinct.size() < 3) throw InvalidArgument("bound fits need kernel estimates at >= 3 times");
  if (opt.scale_points < 2) throw InvalidArgument("scale search needs at least two points");
  double radius = 0.0;
  const auto samples = collect(family, xi, singular, opt.region, &radius);
  if (samples.size() < 3) throw InvalidArgument("fit region contains fewer than 3 samples");
  const int d = family.front().values.mesh->dim();
  const double smin = opt.scale_min.value_or(0.25 * sigma), smax = opt.scale_max.value_or(4.0 * xi);
  const bool lower = side == Side::Lower;

  std::vector<double> taus(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) taus[i] = samples[i].tau;

  BoundFit best;
  best.side = side;
  best.region = opt.region;
  best.xi = xi;
  best.spatial_radius = radius;
  best.samples = samples.size();
  best.mean_log_gap = std::numeric_limits<double>::infinity();
  bool all_grow = !singular.empty();
  std::optional<double> chosen_slope;
  FitSample worst{};
  for (int j = 0; j < opt.scale_points; ++j) {
    const double c = smin * std::pow(smax / smin, static_cast<double>(j) / (opt.scale_points - 1));
    std::vector<double> logs(samples.size());
    for (size_t i = 0; i < samples.size(); ++i)
      logs[i] = samples[i].log_u - log_gaussian_kernel_r2(c, samples[i].tau, samples[i].r2, d);
    const auto slope = inner_slope(samples, logs);
    const bool grows = slope && (lower ? *slope > opt.growth_slope : *slope < -opt.growth_slope);
    if (!grows) all_grow = false;
    const Envelope env = extremal(taus, logs, lower, opt.fit_rate);
    if (env.gap < best.mean_log_gap) {
      best.multiplier = std::exp(env.log_mult);
      best.scale = c;
      best.rate = env.rate;
      best.mean_log_gap = env.gap;
      chosen_slope = slope;
      double extreme = lower ? std::numeric_limits<double>::infinity() : 0.0;
      size_t at = 0;
      for (size_t i = 0; i < samples.size(); ++i) {
        const double env_i = lower ? env.log_mult - env.rate * taus[i] : env.log_mult + env.rate * taus[i];
        const double ratio = std::exp(logs[i] - env_i);
        if (lower ? ratio < extreme : ratio > extreme) {
          extreme = ratio;
          at = i;
        }
      }
      best.worst_ratio = extreme;
      // The most-violating sample is the one nearest the singular point.
      size_t near = at;
      for (size_t i = 0; i < samples.size(); ++i)
        if (samples[i].singular_distance < samples[near].singular_distance ||
            (samples[i].singular_distance == samples[near].singular_distance &&
             (lower ? logs[i] < logs[near] : logs[i] > logs[near])))
          near = i;
      const size_t w = all_grow ? near : at;
      worst = {samples[w].tau, std::sqrt(samples[w].r2), std::exp(samples[w].log_u), std::exp(logs[w])};
    }
  }
  best.singular_slope = chosen_slope;
  if (all_grow) {
    std::ostringstream os;
    os << "no " << to_string(side) << " Gaussian envelope fits: u / k_c behaves like a power "
       << (chosen_slope ? *chosen_slope : 0.0) << " of the distance to the singular point for every c in ["
       << smin << ", " << smax << "]; worst sample at t - s = " << worst.tau << ", |x - y| = " << worst.distance;
    throw InfeasibleFit(os.str(), side, worst, chosen_slope.value_or(0.0));
  }
  return best;
}

bool envelope_holds(const BoundFit& fit, const std::vector<HeatKernelEstimate>& family,
                    const std::vector<Vec>& singular, double slack) {
  double radius = 0.0;
  for (const auto& s : collect(family, fit.xi, singular, fit.region, &radius)) {
    const int d = family.front().values.mesh->dim();
    const double log_env = std::log(fit.multiplier) + log_gaussian_kernel_r2(fit.scale, s.tau, s.r2, d) +
                           (fit.side == Side::Lower ? -fit.rate : fit.rate) * s.tau;
    const double gap = s.log_u - log_env;
    if (fit.side == Side::Lower ? gap < -slack : gap > slack) return false;
  }
  return true;
}

namespace {

void require_radial_slice(const HeatKernelEstimate& k) {
  if (!k.values.mesh->radial()) throw InvalidArgument("radial profiles need a kernel slice on a radial grid");
}

}  // namespace

WeightProfile fit_weight_exponent(const HeatKernelEstimate& slice, double r_lo, double r_hi, double mu,
                                  double theoretical, double monotone_tolerance) {
  require_radial_slice(slice);
  const double tau = tau_of(slice);
  if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw InvalidArgument("weight fit needs 0 < r_lo < r_hi");
  if (r_hi > std::sqrt(tau) * (1.0 + 1e-12)) throw InvalidArgument("weight fit radius must satisfy r_hi <= sqrt(t - s)");
  const Mesh& mesh = *slice.values.mesh;
  WeightProfile w;
  w.r_lo = r_lo;
  w.r_hi = r_hi;
  w.theoretical = theoretical;
  std::vector<double> lx, ly;
  for (Index i = 0; i < mesh.size(); ++i) {
    const double r = mesh.radius(i);
    if (r < r_lo || r > r_hi) continue;
    const double ratio = slice.values.values[i] / gaussian_kernel_r2(mu, tau, r * r, mesh.dim());
    w.radii.push_back(r);
    w.ratios.push_back(ratio);
    lx.push_back(std::log(r));
    ly.push_back(std::log(ratio));
  }
  w.points = w.radii.size();
  if (w.points < 5) throw InvalidArgument("weight fit needs at least 5 radii in range");
  bool up = true, down = true;
  for (size_t i = 1; i < w.ratios.size(); ++i) {
    if (w.ratios[i] < w.ratios[i - 1] * (1.0 - monotone_tolerance)) up = false;
    if (w.ratios[i] > w.ratios[i - 1] * (1.0 + monotone_tolerance)) down = false;
  }
  if (!up && !down) throw CheckFailure("weight ratio profile is not monotone in |y|");
  w.exponent = -slope_fit(lx, ly, &w.residual);
  w.bounded = up && std::all_of(w.ratios.begin(), w.ratios.end(), [](double v) { return std::isfinite(v); });
  w.vanishes_at_zero = w.bounded && w.exponent < 0.0 && w.ratios.front() < w.ratios.back();
  return w;
}

GrowthReport counterexample_growth(const HeatKernelEstimate& slice, double mu, double r_lo, double r_hi) {
  require_radial_slice(slice);
  if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw InvalidArgument("growth study needs 0 < r_lo < r_hi");
  const Mesh& mesh = *slice.values.mesh;
  const double tau = tau_of(slice);
  GrowthReport g;
  std::vector<double> lx, ly;
  for (Index i = 0; i < mesh.size(); ++i) {
    const double r = mesh.radius(i);
    if (r < r_lo || r > r_hi) continue;
    const double ratio = slice.values.values[i] / gaussian_kernel_r2(mu, tau, r * r, mesh.dim());
    g.radii.push_back(r);
    g.ratios.push_back(ratio);
    lx.push_back(std::log(r));
    ly.push_back(std::log(ratio));
  }
  if (g.radii.size() < 3) throw InvalidArgument("growth study needs at least 3 radii in range");
  g.power = -slope_fit(lx, ly);
  g.decades = std::log10(g.radii.back() / g.radii.front());
  return g;
}

HalvingReport ratio_under_halving(const HeatKernelEstimate& slice, double mu, double r_start) {
  require_radial_slice(slice);
  const Mesh& mesh = *slice.values.mesh;
  const double tau = tau_of(slice);
  const double r_small = mesh.radius(0);
  if (!(r_start > r_small)) throw InvalidArgument("start radius must exceed the smallest resolved radius");
  HalvingReport h;
  Vec e = Vec::Zero(mesh.dim());
  for (double r = r_start; r >= r_small; r *= 0.5) {
    e[0] = r;
    h.radii.push_back(r);
    h.ratios.push_back(mesh.interpolate(slice.values.values, e) / gaussian_kernel_r2(mu, tau, r * r, mesh.dim()));
  }
  h.decreasing = h.ratios.size() >= 2;
  for (size_t i = 1; i < h.ratios.size(); ++i)
    if (!(h.ratios[i] < h.ratios[i - 1])) h.decreasing = false;
  return h;
}

namespace {

void require_matched(const HeatKernelEstimate& a, const HeatKernelEstimate& b) {
  if (a.values.values.size() != b.values.values.size()) throw InvalidArgument("kernels live on different grids");
  if (std::abs(tau_of(a) - tau_of(b)) > 1e-12 * std::max(1.0, tau_of(a)))
    throw InvalidArgument("kernels are taken at different times");
  if (std::abs(a.tau0 - b.tau0) > 1e-15 * std::max(1.0, a.tau0))
    throw InvalidArgument("kernels use different Dirac approximations");
}

template <class Rhs>
ComparisonReport compare(const Vec& lhs, const Rhs& rhs, double peak, double solver_tol, double floor) {
  ComparisonReport rep;
  rep.tolerance = 10.0 * solver_tol * peak;
  for (Index i = 0; i < lhs.size(); ++i) {
    const double l = lhs[i], r = rhs(i);
    if (std::max(l, r) < floor * peak) continue;
    ++rep.cells;
    const double excess = l - r - rep.tolerance - 1e-6 * r;
    if (excess > 0.0) {
      ++rep.violations;
      if (excess > rep.worst_excess) {
        rep.worst_excess = excess;
        rep.worst_cell = i;
      }
    }
  }
  rep.fraction_ok = rep.cells ? 1.0 - static_cast<double>(rep.violations) / rep.cells : 1.0;
  rep.pass = rep.violations == 0;
  return rep;
}

}  // namespace

ComparisonReport sandwich_check(const HeatKernelEstimate& h1, const HeatKernelEstimate& u,
                                const HeatKernelEstimate& hp, double p, double solver_tolerance, double floor) {
  if (!(p > 1.0)) throw InvalidArgument("sandwich exponent must satisfy p > 1");
  require_matched(h1, u);
  require_matched(h1, hp);
  const double q = p / (p - 1.0);
  const Vec& uv = u.values.values;
  const Vec& hv = hp.values.values;
  const double peak = std::max({h1.values.values.maxCoeff(), uv.maxCoeff()});
  return compare(
      h1.values.values,
      [&](Index i) { return std::pow(std::max(uv[i], 0.0), 1.0 / p) * std::pow(std::max(hv[i], 0.0), 1.0 / q); },
      peak, solver_tolerance, floor);
}

ComparisonReport domination_check(const HeatKernelEstimate& lower, const HeatKernelEstimate& upper,
                                  double solver_tolerance, double floor) {
  require_matched(lower, upper);
  const Vec& up = upper.values.values;
  const double peak = std::max(lower.values.values.maxCoeff(), up.maxCoeff());
  return compare(lower.values.values, [&](Index i) { return up[i]; }, peak, solver_tolerance, floor);
}

}  // namespace fbheat
