#pragma once

// Dyadic cubes on the periodic domain [0,1)^n, n in {1, 2}.
//
// A cube at level l >= 0 with index vector k is [0, 2^-l)^n + 2^-l k. Coefficient-carrying
// cubes live on levels 0..depth; levels -virtual_levels..-1 are "virtual" coarse cubes
// (side 2^-l > 1, index forced to 0) whose triples saturate the torus.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace microlocal {

inline constexpr int kMaxDim = 2;

using Point = std::array<double, kMaxDim>;
using Index = std::array<std::int64_t, kMaxDim>;

struct DyadicCube {
  int level = 0;
  Index k{};

  friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
};

struct CubeGeometry {
  double side = 1.0;
  Point corner{};
};

// Axis-aligned cube region on the torus. `saturated` regions cover the whole torus.
struct CubeRegion {
  Point center{};
  double half_width = 0.0;
  bool saturated = false;
};

// Per-axis minimum over integer shifts, combined in the Euclidean norm.
double torus_distance(const Point& x, const Point& y, int dim);

// Reduces a coordinate into [0, 1).
double wrap_unit(double x);

class Lattice {
 public:
  Lattice(int dim, int depth, int virtual_levels = 4);

  int dim() const { return dim_; }
  int depth() const { return depth_; }
  int virtual_levels() const { return virtual_levels_; }
  int min_level() const { return -virtual_levels_; }

  // Grid points per axis (2^depth) and in total (2^(n depth)).
  std::int64_t points_per_axis() const { return std::int64_t{1} << depth_; }
  std::size_t point_count() const { return cube_count(depth_); }

  std::size_t cube_count(int level) const;
  // Number of coefficient-carrying cubes, levels 0..depth.
  std::size_t total_cube_count() const;
  // Offset of `level` in the (level, lexicographic k) enumeration of levels 0..depth.
  std::size_t level_offset(int level) const;
  std::size_t global_index(const DyadicCube& q) const { return level_offset(q.level) + flat_index(q); }

  // Row-major flat index of k within its level (k[0] slowest).
  std::size_t flat_index(const DyadicCube& q) const;
  DyadicCube cube_at(int level, std::size_t flat) const;
  DyadicCube cube_from_global(std::size_t global) const;

  CubeGeometry geometry(const DyadicCube& q) const;
  Point center(const DyadicCube& q) const;
  CubeRegion triple(const DyadicCube& q) const;

  // One cube per level in [lo, hi]; the virtual cube for negative levels.
  std::vector<DyadicCube> cubes_containing(const Point& x0, int lo, int hi) const;
  // All level-`level` cubes whose closure lies in the closed region, lexicographic in k.
  std::vector<DyadicCube> cubes_in_region(const CubeRegion& region, int level) const;

  bool contains(const DyadicCube& q, const Point& x) const;
  bool contains(const CubeRegion& region, const DyadicCube& q) const;

  // Grid point coordinates for flat grid index m at the finest level.
  Point grid_point(std::size_t m) const;
  // Flat grid indices of the points inside cube q, in row-major order.
  std::vector<std::size_t> grid_points_in(const DyadicCube& q) const;

  void check_level(int level) const;
  void check_cube(const DyadicCube& q) const;

 private:
  int dim_;
  int depth_;
  int virtual_levels_;
};

}  // namespace microlocal
