#include "fbheat/grid.hpp"

#include "fbheat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace fbheat {

double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

GridSpec GridSpec::cartesian(int dim, double half_width, int points_per_axis) {
  return cartesian(std::vector<double>(dim, -half_width), std::vector<double>(dim, half_width),
                   std::vector<int>(dim, points_per_axis));
}

GridSpec GridSpec::cartesian(std::vector<double> lower, std::vector<double> upper,
                             std::vector<int> points) {
  GridSpec g;
  g.dim = static_cast<int>(lower.size());
  g.kind = GridKind::Cartesian;
  g.lower = std::move(lower);
  g.upper = std::move(upper);
  g.points = std::move(points);
  g.validate();
  return g;
}

GridSpec GridSpec::radial(int dim, double r_max, int points, double r_min_factor,
                          RadialSpacing spacing) {
  GridSpec g;
  g.dim = dim;
  g.kind = GridKind::Radial;
  g.r_max = r_max;
  g.r_min = r_min_factor * r_max;
  g.radial_points = points;
  g.spacing = spacing;
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (dim < 1) throw InvalidArgument("grid dimension must be positive");
  if (kind == GridKind::Radial) {
    if (!(r_min > 0.0)) throw InvalidArgument("radial grid requires r_min > 0");
    if (!(r_max > r_min)) throw InvalidArgument("radial grid requires r_max > r_min");
    if (radial_points < 2) throw InvalidArgument("radial grid needs at least 2 points");
    return;
  }
  if (static_cast<int>(lower.size()) != dim || static_cast<int>(upper.size()) != dim ||
      static_cast<int>(points.size()) != dim)
    throw InvalidArgument("Cartesian grid bounds/points must have one entry per axis");
  for (int k = 0; k < dim; ++k) {
    if (points[k] < 2) throw InvalidArgument("Cartesian grid needs at least 2 points per axis");
    if (!(upper[k] > lower[k])) throw InvalidArgument("Cartesian grid requires spacing h > 0");
  }
}

double GridSpec::spacing_along(int axis) const {
  if (kind == GridKind::Radial) {
    if (spacing == RadialSpacing::Uniform) return (r_max - r_min) / radial_points;
    return r_max * (1.0 - std::pow(r_min / r_max, 1.0 / radial_points));
  }
  return (upper[axis] - lower[axis]) / points[axis];
}

GridSpec GridSpec::refined() const {
  GridSpec g = *this;
  if (kind == GridKind::Radial) {
    g.radial_points *= 2;
  } else {
    for (auto& n : g.points) n *= 2;
  }
  return g;
}

Mesh::Mesh(GridSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const int d = spec_.dim;
  if (spec_.is_radial()) {
    const int n = spec_.radial_points;
    radial_faces_.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
      const double s = static_cast<double>(k) / n;
      radial_faces_[k] = spec_.spacing == RadialSpacing::Geometric
                             ? spec_.r_min * std::pow(spec_.r_max / spec_.r_min, s)
                             : spec_.r_min + s * (spec_.r_max - spec_.r_min);
    }
    radial_faces_.front() = spec_.r_min;
    radial_faces_.back() = spec_.r_max;
    const double omega = unit_sphere_area(d);
    volumes_.resize(n);
    radial_nodes_.resize(n);
    for (int i = 0; i < n; ++i) {
      const double a = radial_faces_[i], b = radial_faces_[i + 1];
      radial_nodes_[i] = 0.5 * (a + b);
      volumes_[i] = omega * (std::pow(b, d) - std::pow(a, d)) / d;
    }
    for (int i = 0; i + 1 < n; ++i) {
      const double f = radial_faces_[i + 1];
      faces_.push_back({i, i + 1, 0, omega * std::pow(f, d - 1),
                        radial_nodes_[i + 1] - radial_nodes_[i], f});
    }
    walls_.push_back({0, 0, -1, omega * std::pow(radial_faces_.front(), d - 1),
                      radial_nodes_.front() - radial_faces_.front()});
    walls_.push_back({n - 1, 0, +1, omega * std::pow(radial_faces_.back(), d - 1),
                      radial_faces_.back() - radial_nodes_.back()});
    return;
  }

  strides_.assign(d, 1);
  Index total = 1;
  for (int k = 0; k < d; ++k) {
    strides_[k] = total;
    total *= spec_.points[k];
  }
  double cell_volume = 1.0;
  for (int k = 0; k < d; ++k) cell_volume *= spec_.spacing_along(k);
  volumes_ = Vec::Constant(total, cell_volume);
  for (Index i = 0; i < total; ++i) {
    const auto m = multi_index(i);
    for (int k = 0; k < d; ++k) {
      const double h = spec_.spacing_along(k);
      const double area = cell_volume / h;
      if (m[k] + 1 < spec_.points[k]) {
        faces_.push_back({i, i + strides_[k], k, area, h, spec_.lower[k] + (m[k] + 1) * h});
      } else {
        walls_.push_back({i, k, +1, area, 0.5 * h});
      }
      if (m[k] == 0) walls_.push_back({i, k, -1, area, 0.5 * h});
    }
  }
}

Index Mesh::index(const std::vector<int>& multi) const {
  if (radial()) return multi.at(0);
  Index i = 0;
  for (int k = 0; k < dim(); ++k) i += multi[k] * strides_[k];
  return i;
}

std::vector<int> Mesh::multi_index(Index i) const {
  if (radial()) return {static_cast<int>(i)};
  std::vector<int> m(dim());
  for (int k = 0; k < dim(); ++k) {
    m[k] = static_cast<int>(i % spec_.points[k]);
    i /= spec_.points[k];
  }
  return m;
}

double Mesh::coordinate(Index i, int axis) const {
  if (radial()) return axis == 0 ? radial_nodes_[i] : 0.0;
  const int n = spec_.points[axis];
  const int m = static_cast<int>((i / strides_[axis]) % n);
  return spec_.lower[axis] + (m + 0.5) * spec_.spacing_along(axis);
}

Vec Mesh::point(Index i) const {
  Vec x = Vec::Zero(dim());
  if (radial()) {
    x[0] = radial_nodes_[i];
    return x;
  }
  for (int k = 0; k < dim(); ++k) x[k] = coordinate(i, k);
  return x;
}

double Mesh::radius(Index i) const {
  if (radial()) return radial_nodes_[i];
  return point(i).norm();
}

double Mesh::width(Index i, int axis) const {
  if (radial()) return radial_faces_[i + 1] - radial_faces_[i];
  return spec_.spacing_along(axis);
}

double Mesh::interpolate(const Vec& values, const Vec& x) const {
  if (radial()) {
    const double r = x.norm();
    const auto& rn = radial_nodes_;
    if (r <= rn.front()) return values[0];
    if (r >= rn.back()) return values[size() - 1];
    const auto it = std::upper_bound(rn.begin(), rn.end(), r);
    const Index j = it - rn.begin();
    const double w = (r - rn[j - 1]) / (rn[j] - rn[j - 1]);
    return (1.0 - w) * values[j - 1] + w * values[j];
  }
  const int d = dim();
  std::vector<int> base(d);
  std::vector<double> frac(d);
  for (int k = 0; k < d; ++k) {
    const double h = spec_.spacing_along(k);
    double s = (x[k] - spec_.lower[k]) / h - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(spec_.points[k] - 1));
    int b = std::min(static_cast<int>(std::floor(s)), spec_.points[k] - 2);
    base[k] = b;
    frac[k] = s - b;
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    Index idx = 0;
    for (int k = 0; k < d; ++k) {
      const int bit = (corner >> k) & 1;
      w *= bit ? frac[k] : 1.0 - frac[k];
      idx += (base[k] + bit) * strides_[k];
    }
    if (w != 0.0) acc += w * values[idx];
  }
  return acc;
}

Index Mesh::nearest(const Vec& x) const {
  if (radial()) {
    const double r = x.norm();
    const auto it = std::lower_bound(radial_nodes_.begin(), radial_nodes_.end(), r);
    Index j = std::min<Index>(it - radial_nodes_.begin(), size() - 1);
    if (j > 0 && std::abs(radial_nodes_[j - 1] - r) < std::abs(radial_nodes_[j] - r)) --j;
    return j;
  }
  std::vector<int> m(dim());
  for (int k = 0; k < dim(); ++k) {
    const double h = spec_.spacing_along(k);
    const int c = static_cast<int>(std::floor((x[k] - spec_.lower[k]) / h));
    m[k] = std::clamp(c, 0, spec_.points[k] - 1);
  }
  return index(m);
}

std::vector<Index> Mesh::outer_layer(int layers) const {
  std::vector<Index> out;
  if (radial()) {
    for (Index i = std::max<Index>(0, size() - layers); i < size(); ++i) out.push_back(i);
    return out;
  }
  for (Index i = 0; i < size(); ++i) {
    const auto m = multi_index(i);
    for (int k = 0; k < dim(); ++k) {
      if (m[k] < layers || m[k] >= spec_.points[k] - layers) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

double Mesh::outer_extent() const {
  if (radial()) return spec_.r_max;
  double e = 0.0;
  for (int k = 0; k < dim(); ++k) e = std::max({e, std::abs(spec_.lower[k]), std::abs(spec_.upper[k])});
  return e;
}

}  // namespace fbheat
