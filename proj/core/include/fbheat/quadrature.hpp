#pragma once

#include <functional>
#include <vector>

namespace fbheat {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point Gauss-Legendre rule.
const GaussRule& gauss_legendre(int n);

/// Integral of f over [a, b] with a single n-point Gauss-Legendre panel.
double integrate_panel(const std::function<double(double)>& f, double a, double b, int n = 16);

/// Composite rule over consecutive breakpoints.
double integrate_panels(const std::function<double(double)>& f, const std::vector<double>& breaks,
                        int n = 16);

/// Breakpoints on [a, b] that are geometric towards `a` (ratio 2) and uniform elsewhere.
std::vector<double> graded_breaks(double a, double b, double finest, int uniform_panels);

/// Normalized density of u = cos(angle) on the unit sphere in R^d, on [-1, 1].
double sphere_cosine_density(int d, double u);

/// Angular averages over the unit sphere of e^{a(u-1)} and u e^{a(u-1)}, u = cos(angle).
/// Closed forms for d = 3; quadrature in w = 1 - u otherwise.
double sphere_mean_exp(int d, double a);
double sphere_mean_u_exp(int d, double a);

/// Angular average of f(u) over the unit sphere in R^d, resolving u = 1 with geometric panels.
double sphere_mean(int d, const std::function<double(double)>& f, double scale = 1.0);

}  // namespace fbheat
