#include "seggrasp/mesh.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "seggrasp/error.hpp"

namespace seggrasp {

namespace {

constexpr double kAreaEpsilon = 1e-12;

Vec3 closest_point_on_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

}  // namespace

TriMesh::TriMesh(VertexMatrix vertices, FaceMatrix faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const int nv = vertex_count();
  const int nf = face_count();
  for (int f = 0; f < nf; ++f) {
    for (int c = 0; c < 3; ++c) {
      const int v = faces_(f, c);
      if (v < 0 || v >= nv) {
        throw Error(ErrorKind::IndexOutOfRange, "face " + std::to_string(f) + " references vertex " +
                                                    std::to_string(v) + " of " + std::to_string(nv));
      }
    }
    if (faces_(f, 0) == faces_(f, 1) || faces_(f, 1) == faces_(f, 2) || faces_(f, 0) == faces_(f, 2)) {
      throw Error(ErrorKind::DegenerateMesh, "face " + std::to_string(f) + " repeats a vertex index");
    }
  }

  face_area_.resize(nf);
  face_normal_.resize(nf, 3);
  total_area_ = 0.0;
  for (int f = 0; f < nf; ++f) {
    const auto [a, b, c] = corners(f);
    const Vec3 cross = (b - a).cross(c - a);
    const double twice_area = cross.norm();
    face_area_[f] = 0.5 * twice_area;
    if (face_area_[f] > kAreaEpsilon) {
      face_normal_.row(f) = (cross / twice_area).transpose();
    } else {
      face_normal_.row(f).setZero();
    }
    total_area_ += face_area_[f];
  }
}

std::array<Vec3, 3> TriMesh::corners(int face) const {
  return {vertex(faces_(face, 0)), vertex(faces_(face, 1)), vertex(faces_(face, 2))};
}

Vec3 TriMesh::face_centroid(int face) const {
  const auto [a, b, c] = corners(face);
  return (a + b + c) / 3.0;
}

void TriMesh::require_non_degenerate() const {
  if (is_degenerate()) throw Error(ErrorKind::DegenerateMesh, "mesh has zero total area");
}

Eigen::AlignedBox3d TriMesh::bounds() const {
  Eigen::AlignedBox3d box;
  for (int v = 0; v < vertex_count(); ++v) box.extend(vertex(v));
  return box;
}

Vec3 TriMesh::bounds_center() const { return bounds().center(); }

double TriMesh::bounding_radius() const {
  const Vec3 center = bounds_center();
  double r2 = 0.0;
  for (int v = 0; v < vertex_count(); ++v) r2 = std::max(r2, (vertex(v) - center).squaredNorm());
  return std::sqrt(r2);
}

std::vector<SurfaceSample> sample_surface(const TriMesh& mesh, int count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "sample count must be >= 1");
  mesh.require_non_degenerate();

  std::vector<double> cumulative(mesh.face_count());
  std::partial_sum(mesh.face_areas().begin(), mesh.face_areas().end(), cumulative.begin());
  const double total = cumulative.back();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<SurfaceSample> samples;
  samples.reserve(count);
  for (int s = 0; s < count; ++s) {
    const double pick = unit(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    int face = static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(), mesh.face_count() - 1));
    // upper_bound can land on a zero-area face sharing the same prefix sum.
    while (mesh.face_area(face) <= 0.0 && face > 0) --face;

    const double r1 = std::sqrt(unit(rng));
    const double r2 = unit(rng);
    const Vec3 bary(1.0 - r1, r1 * (1.0 - r2), r1 * r2);
    const auto [a, b, c] = mesh.corners(face);
    samples.push_back({bary[0] * a + bary[1] * b + bary[2] * c, face, mesh.face_normal(face), bary});
  }
  return samples;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  if (ab.cross(ac).squaredNorm() <= 1e-30) {
    // Degenerate triangle: best point over its three edges.
    const Vec3 candidates[3] = {closest_point_on_segment(p, a, b), closest_point_on_segment(p, b, c),
                                closest_point_on_segment(p, c, a)};
    const Vec3* best = &candidates[0];
    for (const Vec3& q : candidates) {
      if ((q - p).squaredNorm() < (*best - p).squaredNorm()) best = &q;
    }
    return *best;
  }

  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

NearestFace nearest_face(const TriMesh& mesh, const Vec3& point) {
  mesh.require_non_degenerate();
  std::vector<double> dist(mesh.face_count());
  double min_d = std::numeric_limits<double>::infinity();
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto [a, b, c] = mesh.corners(f);
    dist[f] = (closest_point_on_triangle(point, a, b, c) - point).norm();
    min_d = std::min(min_d, dist[f]);
  }
  // Faces sharing the closest vertex or edge differ only by rounding; treat them as tied.
  const double tie = kNearestTieTolerance * std::max(mesh.bounding_radius(), min_d);
  for (int f = 0; f < mesh.face_count(); ++f) {
    if (dist[f] <= min_d + tie) return {f, dist[f]};
  }
  return {-1, min_d};
}

std::vector<std::vector<int>> connected_components(const TriMesh& mesh, std::span<const int> faces) {
  // Union-find over the vertices touched by `faces`.
  std::vector<int> parent(mesh.vertex_count(), -1);
  auto find = [&](int v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (int f : faces) {
    for (int c = 0; c < 3; ++c) {
      const int v = mesh.faces()(f, c);
      if (parent[v] < 0) parent[v] = v;
    }
  }
  for (int f : faces) {
    const int r0 = find(mesh.faces()(f, 0));
    for (int c = 1; c < 3; ++c) {
      const int r = find(mesh.faces()(f, c));
      if (r != r0) parent[std::max(r, r0)] = std::min(r, r0);
    }
  }

  std::vector<int> sorted(faces.begin(), faces.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::vector<int>> components;
  std::vector<int> component_of_root(mesh.vertex_count(), -1);
  for (int f : sorted) {
    const int root = find(mesh.faces()(f, 0));
    if (component_of_root[root] < 0) {
      component_of_root[root] = static_cast<int>(components.size());
      components.emplace_back();
    }
    components[component_of_root[root]].push_back(f);
  }
  return components;
}

TriMesh transformed(const TriMesh& mesh, const Eigen::Isometry3d& transform) {
  VertexMatrix v(mesh.vertex_count(), 3);
  for (int i = 0; i < mesh.vertex_count(); ++i) v.row(i) = (transform * mesh.vertex(i)).transpose();
  return TriMesh(std::move(v), mesh.faces());
}

}  // namespace seggrasp
