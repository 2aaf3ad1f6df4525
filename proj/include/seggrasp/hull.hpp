#pragma once

#include <array>
#include <span>
#include <vector>

#include "seggrasp/types.hpp"

namespace seggrasp {

/// Convex hull as outward facet planes n . x = offset.
struct ConvexHull {
  std::vector<std::array<int, 3>> facets;  // indices into the input points
  std::vector<Vec3> normals;
  std::vector<double> offsets;
  /// True when the input spans fewer than three dimensions; such a hull has no facets.
  bool flat = false;

  /// Distance from an interior point to the hull boundary, i.e. the smallest
  /// facet-plane clearance; 0 for points on or outside the boundary and for flat hulls.
  double depth(const Vec3& p) const;
};

/// Incremental 3D hull. Points within `relative_eps` x (bounding diagonal) of
/// a facet plane are treated as on it, so coplanar lattices stay cheap.
ConvexHull convex_hull(std::span<const Vec3> points, double relative_eps = 1e-10);

}  // namespace seggrasp
