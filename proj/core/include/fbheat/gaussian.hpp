#pragma once

#include "fbheat/errors.hpp"
#include "fbheat/grid.hpp"

#include <cmath>
#include <numbers>

namespace fbheat {

/// k_mu(t, z) = (4 pi mu t)^{-d/2} exp(-|z|^2 / (4 mu t)) from |z|^2.
inline double gaussian_kernel_r2(double mu, double t, double r2, int d) {
  if (!(mu > 0.0) || !(t > 0.0)) throw InvalidArgument("gaussian kernel requires mu, t > 0");
  const double s = 4.0 * mu * t;
  return std::pow(std::numbers::pi * s, -0.5 * d) * std::exp(-r2 / s);
}

/// log k_mu(t, z) from |z|^2.
inline double log_gaussian_kernel_r2(double mu, double t, double r2, int d) {
  const double s = 4.0 * mu * t;
  return -0.5 * d * std::log(std::numbers::pi * s) - r2 / s;
}

/// k_mu(t, z) for a vector z in R^d.
inline double gaussian_kernel(double mu, double t, const Vec& z) {
  return gaussian_kernel_r2(mu, t, z.squaredNorm(), static_cast<int>(z.size()));
}

}  // namespace fbheat
