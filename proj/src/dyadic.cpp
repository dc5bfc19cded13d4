#include "microlocal/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "microlocal/errors.hpp"

namespace microlocal {

double wrap_unit(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

double torus_distance(const Point& x, const Point& y, int dim) {
  double sum = 0.0;
  for (int a = 0; a < dim; ++a) {
    double d = std::abs(wrap_unit(x[a]) - wrap_unit(y[a]));
    d = std::min(d, 1.0 - d);
    sum += d * d;
  }
  return std::sqrt(sum);
}

Lattice::Lattice(int dim, int depth, int virtual_levels)
    : dim_(dim), depth_(depth), virtual_levels_(virtual_levels) {
  require(dim >= 1 && dim <= kMaxDim, "dimension must be 1 or 2");
  require(depth >= 0 && depth <= 30 / dim, "depth out of range for dimension " + std::to_string(dim));
  require(virtual_levels >= 0 && virtual_levels <= 60, "virtual level count out of range");
}

void Lattice::check_level(int level) const {
  if (level < min_level() || level > depth_) {
    throw InvalidInput("cube level " + std::to_string(level) + " outside [" + std::to_string(min_level()) +
                       ", " + std::to_string(depth_) + "]");
  }
}

void Lattice::check_cube(const DyadicCube& q) const {
  check_level(q.level);
  const std::int64_t per_axis = q.level >= 0 ? (std::int64_t{1} << q.level) : 1;
  for (int a = 0; a < dim_; ++a) {
    require(q.k[a] >= 0 && q.k[a] < per_axis, "cube index outside its level");
  }
}

std::size_t Lattice::cube_count(int level) const {
  if (level < 0) return 1;
  return std::size_t{1} << (static_cast<std::size_t>(level) * dim_);
}

std::size_t Lattice::total_cube_count() const { return level_offset(depth_ + 1); }

std::size_t Lattice::level_offset(int level) const {
  std::size_t off = 0;
  for (int j = 0; j < level; ++j) off += cube_count(j);
  return off;
}

std::size_t Lattice::flat_index(const DyadicCube& q) const {
  if (q.level < 0) return 0;
  std::size_t idx = 0;
  for (int a = 0; a < dim_; ++a) idx = (idx << q.level) | static_cast<std::size_t>(q.k[a]);
  return idx;
}

DyadicCube Lattice::cube_at(int level, std::size_t flat) const {
  DyadicCube q{level, {}};
  if (level < 0) return q;
  const std::size_t mask = (std::size_t{1} << level) - 1;
  for (int a = dim_ - 1; a >= 0; --a) {
    q.k[a] = static_cast<std::int64_t>(flat & mask);
    flat >>= level;
  }
  return q;
}

DyadicCube Lattice::cube_from_global(std::size_t global) const {
  int level = 0;
  while (level < depth_ && global >= cube_count(level)) {
    global -= cube_count(level);
    ++level;
  }
  return cube_at(level, global);
}

CubeGeometry Lattice::geometry(const DyadicCube& q) const {
  check_cube(q);
  CubeGeometry g;
  g.side = std::ldexp(1.0, -q.level);
  for (int a = 0; a < dim_; ++a) g.corner[a] = static_cast<double>(q.k[a]) * g.side;
  return g;
}

Point Lattice::center(const DyadicCube& q) const {
  const CubeGeometry g = geometry(q);
  Point c{};
  for (int a = 0; a < dim_; ++a) c[a] = g.corner[a] + 0.5 * g.side;
  return c;
}

CubeRegion Lattice::triple(const DyadicCube& q) const {
  const CubeGeometry g = geometry(q);
  CubeRegion r;
  r.center = center(q);
  r.half_width = 1.5 * g.side;
  r.saturated = 2.0 * r.half_width >= 1.0;
  return r;
}

std::vector<DyadicCube> Lattice::cubes_containing(const Point& x0, int lo, int hi) const {
  for (int a = 0; a < dim_; ++a) require(x0[a] >= 0.0 && x0[a] < 1.0, "x0 must lie in [0,1)^n");
  check_level(lo);
  check_level(hi);
  std::vector<DyadicCube> out;
  for (int level = lo; level <= hi; ++level) {
    DyadicCube q{level, {}};
    if (level > 0) {
      for (int a = 0; a < dim_; ++a) {
        q.k[a] = static_cast<std::int64_t>(std::floor(std::ldexp(x0[a], level)));
      }
    }
    out.push_back(q);
  }
  return out;
}

std::vector<DyadicCube> Lattice::cubes_in_region(const CubeRegion& region, int level) const {
  require(level >= 0 && level <= depth_, "region enumeration level outside [0, depth]");
  const std::int64_t per_axis = std::int64_t{1} << level;
  std::array<std::vector<std::int64_t>, kMaxDim> allowed;
  for (int a = 0; a < dim_; ++a) {
    auto& ks = allowed[a];
    if (region.saturated) {
      for (std::int64_t k = 0; k < per_axis; ++k) ks.push_back(k);
      continue;
    }
    const double lo = region.center[a] - region.half_width;
    const double hi = region.center[a] + region.half_width;
    const auto first = static_cast<std::int64_t>(std::ceil(std::ldexp(lo, level)));
    const auto last = static_cast<std::int64_t>(std::floor(std::ldexp(hi, level))) - 1;
    for (std::int64_t k = first; k <= last; ++k) ks.push_back(((k % per_axis) + per_axis) % per_axis);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  }
  std::vector<DyadicCube> out;
  if (dim_ == 1) {
    for (auto k : allowed[0]) out.push_back({level, {k, 0}});
  } else {
    for (auto k0 : allowed[0])
      for (auto k1 : allowed[1]) out.push_back({level, {k0, k1}});
  }
  return out;
}

bool Lattice::contains(const DyadicCube& q, const Point& x) const {
  if (q.level < 0) return true;
  const CubeGeometry g = geometry(q);
  for (int a = 0; a < dim_; ++a) {
    const double u = wrap_unit(x[a]);
    if (u < g.corner[a] || u >= g.corner[a] + g.side) return false;
  }
  return true;
}

bool Lattice::contains(const CubeRegion& region, const DyadicCube& q) const {
  if (region.saturated) return q.level >= 0;
  if (q.level < 0) return false;
  const auto cubes = cubes_in_region(region, q.level);
  return std::find(cubes.begin(), cubes.end(), q) != cubes.end();
}

Point Lattice::grid_point(std::size_t m) const {
  const DyadicCube cell = cube_at(depth_, m);
  Point x{};
  for (int a = 0; a < dim_; ++a) x[a] = std::ldexp(static_cast<double>(cell.k[a]), -depth_);
  return x;
}

std::vector<std::size_t> Lattice::grid_points_in(const DyadicCube& q) const {
  check_cube(q);
  std::vector<std::size_t> out;
  if (q.level < 0) {
    out.resize(point_count());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = m;
    return out;
  }
  const int shift = depth_ - q.level;
  const std::int64_t span = std::int64_t{1} << shift;
  const std::int64_t n_axis = points_per_axis();
  if (dim_ == 1) {
    for (std::int64_t t = 0; t < span; ++t) out.push_back(static_cast<std::size_t>((q.k[0] << shift) + t));
  } else {
    for (std::int64_t t0 = 0; t0 < span; ++t0)
      for (std::int64_t t1 = 0; t1 < span; ++t1)
        out.push_back(static_cast<std::size_t>(((q.k[0] << shift) + t0) * n_axis + (q.k[1] << shift) + t1));
  }
  return out;
}

}  // namespace microlocal
