#include "seggrasp/hull.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include <Eigen/Geometry>

namespace seggrasp {

double ConvexHull::depth(const Vec3& p) const {
  if (flat || facets.empty()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < facets.size(); ++f) best = std::min(best, offsets[f] - normals[f].dot(p));
  return std::max(0.0, best);
}

ConvexHull convex_hull(std::span<const Vec3> points, double relative_eps) {
  ConvexHull hull;
  const int n = static_cast<int>(points.size());
  if (n < 4) {
    hull.flat = true;
    return hull;
  }
  Eigen::AlignedBox3d box;
  for (const Vec3& p : points) box.extend(p);
  const double eps = relative_eps * box.diagonal().norm();
  if (!(box.diagonal().norm() > 0.0)) {
    hull.flat = true;
    return hull;
  }

  // Initial simplex from extreme points.
  int i0 = 0;
  for (int i = 1; i < n; ++i) {
    if (points[i].x() < points[i0].x()) i0 = i;
  }
  int i1 = i0;
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = (points[i] - points[i0]).squaredNorm();
    if (d > best) {
      best = d;
      i1 = i;
    }
  }
  const Vec3 axis = (points[i1] - points[i0]).normalized();
  int i2 = -1;
  best = eps;
  for (int i = 0; i < n; ++i) {
    const Vec3 d = points[i] - points[i0];
    const double dist = (d - d.dot(axis) * axis).norm();
    if (dist > best) {
      best = dist;
      i2 = i;
    }
  }
  if (i2 < 0) {
    hull.flat = true;
    return hull;
  }
  const Vec3 plane_n = (points[i1] - points[i0]).cross(points[i2] - points[i0]).normalized();
  int i3 = -1;
  best = eps;
  for (int i = 0; i < n; ++i) {
    const double dist = std::abs(plane_n.dot(points[i] - points[i0]));
    if (dist > best) {
      best = dist;
      i3 = i;
    }
  }
  if (i3 < 0) {
    hull.flat = true;
    return hull;
  }

  struct Facet {
    std::array<int, 3> v;
    Vec3 normal;
    double offset;
  };
  auto make_facet = [&](int a, int b, int c) {
    Facet f{{a, b, c}, (points[b] - points[a]).cross(points[c] - points[a]), 0.0};
    const double len = f.normal.norm();
    if (len > 0.0) f.normal /= len;
    f.offset = f.normal.dot(points[a]);
    return f;
  };

  const Vec3 inside = (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;
  std::vector<Facet> facets;
  for (auto [a, b, c] : {std::array{i0, i1, i2}, std::array{i0, i3, i1}, std::array{i1, i3, i2},
                         std::array{i2, i3, i0}}) {
    Facet f = make_facet(a, b, c);
    if (f.normal.dot(inside) - f.offset > 0.0) f = make_facet(a, c, b);
    facets.push_back(f);
  }

  std::vector<char> is_seed(n, 0);
  is_seed[i0] = is_seed[i1] = is_seed[i2] = is_seed[i3] = 1;
  std::vector<char> visible;
  std::set<std::pair<int, int>> visible_edges;
  std::vector<Facet> next;
  for (int p = 0; p < n; ++p) {
    if (is_seed[p]) continue;
    visible.assign(facets.size(), 0);
    bool any = false;
    for (std::size_t f = 0; f < facets.size(); ++f) {
      if (facets[f].normal.dot(points[p]) - facets[f].offset > eps) {
        visible[f] = 1;
        any = true;
      }
    }
    if (!any) continue;

    visible_edges.clear();
    for (std::size_t f = 0; f < facets.size(); ++f) {
      if (!visible[f]) continue;
      const auto& v = facets[f].v;
      for (int e = 0; e < 3; ++e) visible_edges.emplace(v[e], v[(e + 1) % 3]);
    }
    next.clear();
    for (std::size_t f = 0; f < facets.size(); ++f) {
      if (!visible[f]) next.push_back(facets[f]);
    }
    // Horizon: directed edges of visible facets whose twin belongs to a hidden facet.
    for (std::size_t f = 0; f < facets.size(); ++f) {
      if (!visible[f]) continue;
      const auto& v = facets[f].v;
      for (int e = 0; e < 3; ++e) {
        const int a = v[e];
        const int b = v[(e + 1) % 3];
        if (!visible_edges.contains({b, a})) next.push_back(make_facet(a, b, p));
      }
    }
    facets.swap(next);
  }

  for (const Facet& f : facets) {
    hull.facets.push_back(f.v);
    hull.normals.push_back(f.normal);
    hull.offsets.push_back(f.offset);
  }
  return hull;
}

}  // namespace seggrasp
