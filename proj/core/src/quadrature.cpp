#include "fbheat/quadrature.hpp"

#include "fbheat/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace fbheat {

const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw InvalidArgument("Gauss rule needs at least one node");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double integrate_panel(const std::function<double(double)>& f, double a, double b, int n) {
  const auto& g = gauss_legendre(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += g.weights[i] * f(mid + half * g.nodes[i]);
  return acc * half;
}

double integrate_panels(const std::function<double(double)>& f, const std::vector<double>& breaks,
                        int n) {
  double acc = 0.0;
  for (size_t i = 0; i + 1 < breaks.size(); ++i)
    if (breaks[i + 1] > breaks[i]) acc += integrate_panel(f, breaks[i], breaks[i + 1], n);
  return acc;
}

std::vector<double> graded_breaks(double a, double b, double finest, int uniform_panels) {
  std::vector<double> out{a};
  const double len = b - a;
  double step = std::min(finest, len);
  double x = a;
  const double coarse = len / std::max(1, uniform_panels);
  while (x + step < b && step < coarse) {
    x += step;
    out.push_back(x);
    step *= 2.0;
  }
  const int rest = std::max(1, static_cast<int>(std::ceil((b - x) / coarse)));
  const double h = (b - x) / rest;
  for (int i = 1; i < rest; ++i) out.push_back(x + i * h);
  out.push_back(b);
  return out;
}

double sphere_cosine_density(int d, double u) {
  if (d == 1) throw InvalidArgument("sphere density requires d >= 2");
  const double c = std::tgamma(0.5 * d) / (std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (d - 1)));
  return c * std::pow(std::max(0.0, 1.0 - u * u), 0.5 * (d - 3));
}

double sphere_mean(int d, const std::function<double(double)>& f, double scale) {
  if (d < 2) throw InvalidArgument("sphere average requires d >= 2");
  // Polar angle theta in [0, pi] with weight sin^{d-2}; panels geometric towards theta = 0.
  const double norm = std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (d - 1)) / std::tgamma(0.5 * d);
  const double pi = std::numbers::pi;
  double th = std::min(pi / 8.0, std::sqrt(std::max(scale, 1e-24)));
  std::vector<double> breaks{0.0};
  std::vector<double> inner;
  for (int k = 0; k < 40 && th > 1e-9; ++k, th *= 0.5) inner.push_back(th);
  for (auto it = inner.rbegin(); it != inner.rend(); ++it) breaks.push_back(*it);
  const double start = breaks.back();
  const int n = 16;
  for (int i = 1; i <= n; ++i) breaks.push_back(start + (pi - start) * i / n);
  auto g = [&](double t) { return f(std::cos(t)) * std::pow(std::sin(t), d - 2); };
  return integrate_panels(g, breaks, 20) / norm;
}

double sphere_mean_exp(int d, double a) {
  if (d == 3) {
    if (a < 1e-3) return 1.0 - a + 2.0 * a * a / 3.0;
    return -std::expm1(-2.0 * a) / (2.0 * a);
  }
  return sphere_mean(d, [a](double u) { return std::exp(a * (u - 1.0)); }, a > 1.0 ? 4.0 / a : 2.0);
}

double sphere_mean_u_exp(int d, double a) {
  if (d == 3) {
    if (a < 1e-3) return std::exp(-a) * (a / 3.0 + a * a * a / 30.0);
    const double e = std::exp(-2.0 * a);
    return (1.0 + e) / (2.0 * a) - (1.0 - e) / (2.0 * a * a);
  }
  return sphere_mean(d, [a](double u) { return u * std::exp(a * (u - 1.0)); }, a > 1.0 ? 4.0 / a : 2.0);
}

}  // namespace fbheat
