#pragma once

#include <Eigen/Core>

#include <memory>
#include <vector>

namespace fbheat {

using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

enum class GridKind { Cartesian, Radial };
enum class RadialSpacing { Geometric, Uniform };

/// Description of a computational grid.
///
/// Cartesian grids are cell-centred boxes. Radial grids discretize r = |x| on
/// [r_min, r_max] with Jacobian weight r^{d-1}; r_min > 0 is the
/// regularization offset that keeps the grid away from the origin.
struct GridSpec {
  int dim = 3;
  GridKind kind = GridKind::Cartesian;

  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<int> points;

  double r_min = 0.0;
  double r_max = 0.0;
  int radial_points = 0;
  RadialSpacing spacing = RadialSpacing::Geometric;

  static GridSpec cartesian(int dim, double half_width, int points_per_axis);
  static GridSpec cartesian(std::vector<double> lower, std::vector<double> upper,
                            std::vector<int> points);
  /// Radial grid on [r_min_factor * r_max, r_max].
  static GridSpec radial(int dim, double r_max, int points, double r_min_factor = 1e-3,
                         RadialSpacing spacing = RadialSpacing::Geometric);

  bool is_radial() const { return kind == GridKind::Radial; }
  void validate() const;
  double spacing_along(int axis) const;
  /// Same box (or radial range) with twice the points per axis.
  GridSpec refined() const;
};

/// Finite-volume discretization of a GridSpec: cell centres, volumes and faces.
class Mesh {
 public:
  struct Face {
    Index lo;
    Index hi;
    int axis;         // Cartesian axis, 0 for radial faces
    double area;
    double distance;  // centre-to-centre distance
    double position;  // coordinate of the face along its axis (radius for radial)
  };
  struct Wall {
    Index cell;
    int axis;
    int side;         // -1 lower wall, +1 upper wall
    double area;
    double distance;  // centre-to-wall distance
  };

  explicit Mesh(GridSpec spec);

  const GridSpec& spec() const { return spec_; }
  bool radial() const { return spec_.is_radial(); }
  int dim() const { return spec_.dim; }
  Index size() const { return volumes_.size(); }

  const Vec& volumes() const { return volumes_; }
  /// Cell centre; radial cells map to (r, 0, ..., 0).
  Vec point(Index i) const;
  /// |point(i)|.
  double radius(Index i) const;
  /// Coordinate of cell i along one axis (radius for radial meshes).
  double coordinate(Index i, int axis) const;
  /// Characteristic cell width: h_axis on Cartesian meshes, the radial cell width otherwise.
  double width(Index i, int axis = 0) const;

  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Wall>& walls() const { return walls_; }
  const std::vector<double>& radial_faces() const { return radial_faces_; }

  Index index(const std::vector<int>& multi) const;
  std::vector<int> multi_index(Index i) const;

  double integrate(const Vec& values) const { return volumes_.dot(values); }
  /// Multilinear (Cartesian) or linear-in-r (radial) interpolation; clamps to the grid.
  double interpolate(const Vec& values, const Vec& x) const;
  /// Index of the cell whose centre is closest to x.
  Index nearest(const Vec& x) const;
  /// Cells within `layers` cells of the outer boundary.
  std::vector<Index> outer_layer(int layers = 1) const;
  /// Largest distance from the origin (or box centre) to the outer boundary.
  double outer_extent() const;

 private:
  GridSpec spec_;
  Vec volumes_;
  std::vector<Face> faces_;
  std::vector<Wall> walls_;
  std::vector<double> radial_faces_;
  std::vector<double> radial_nodes_;
  std::vector<Index> strides_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

inline MeshPtr make_mesh(GridSpec spec) { return std::make_shared<const Mesh>(std::move(spec)); }

/// Surface area of the unit sphere in R^d.
double unit_sphere_area(int d);

/// Values attached to the cells of a mesh.
struct GridFunction {
  MeshPtr mesh;
  Vec values;

  double integral() const { return mesh->integrate(values); }
  double max() const { return values.maxCoeff(); }
  double min() const { return values.minCoeff(); }
};

}  // namespace fbheat
