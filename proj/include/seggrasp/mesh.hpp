#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Geometry>

#include "seggrasp/types.hpp"

namespace seggrasp {

/// Indexed triangle surface with cached per-face area and unit normal.
///
/// Immutable after construction. Construction validates indices (every face
/// references existing, pairwise distinct vertices) but accepts zero-area
/// meshes; operations that need a surface call `require_non_degenerate()`.
class TriMesh {
 public:
  TriMesh() = default;
  TriMesh(VertexMatrix vertices, FaceMatrix faces);

  int vertex_count() const { return static_cast<int>(vertices_.rows()); }
  int face_count() const { return static_cast<int>(faces_.rows()); }

  const VertexMatrix& vertices() const { return vertices_; }
  const FaceMatrix& faces() const { return faces_; }

  Vec3 vertex(int v) const { return vertices_.row(v).transpose(); }
  std::array<Vec3, 3> corners(int face) const;
  Vec3 face_centroid(int face) const;

  double face_area(int face) const { return face_area_[face]; }
  const VectorXd& face_areas() const { return face_area_; }
  /// Unit normal, or zero for faces with area <= 1e-12.
  Vec3 face_normal(int face) const { return face_normal_.row(face).transpose(); }

  double total_area() const { return total_area_; }
  bool is_degenerate() const { return !(total_area_ > 0.0); }
  /// Throws Error{DegenerateMesh} when the mesh has no positive-area surface.
  void require_non_degenerate() const;

  Eigen::AlignedBox3d bounds() const;
  Vec3 bounds_center() const;
  /// Max distance from the bounding-box center to any vertex.
  double bounding_radius() const;

 private:
  VertexMatrix vertices_;
  FaceMatrix faces_;
  VectorXd face_area_;
  VertexMatrix face_normal_;
  double total_area_ = 0.0;
};

enum class MeshFormat { Obj, Ply };

/// Loads an OBJ or PLY (ASCII or binary) file. Polygons are fan-triangulated.
TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
/// Picks the format from the file extension.
TriMesh load_mesh(const std::filesystem::path& path);

void save_obj(const TriMesh& mesh, const std::filesystem::path& path);

using Rgb = std::array<std::uint8_t, 3>;
/// ASCII PLY with per-face red/green/blue properties.
void save_colored_ply(const TriMesh& mesh, std::span<const Rgb> face_colors,
                      const std::filesystem::path& path);

struct SurfaceSample {
  Vec3 point;
  int face_index = -1;
  Vec3 normal;
  Vec3 barycentric;
};

/// Area-weighted uniform surface samples; deterministic for a given seed.
std::vector<SurfaceSample> sample_surface(const TriMesh& mesh, int count, std::uint64_t seed);

/// Closest point of the closed triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

struct NearestFace {
  int face_index = -1;
  double distance = 0.0;
};

/// Relative distance margin within which faces count as equally near.
inline constexpr double kNearestTieTolerance = 1e-10;

/// Nearest face by point-to-triangle distance. Faces within
/// kNearestTieTolerance x max(bounding radius, distance) of the minimum are
/// tied, and ties go to the lowest index.
NearestFace nearest_face(const TriMesh& mesh, const Vec3& point);

/// Groups `faces` into components connected through shared vertex indices.
/// Components are ordered by their smallest face index and each is sorted.
std::vector<std::vector<int>> connected_components(const TriMesh& mesh, std::span<const int> faces);

/// Applies a rigid (or any affine) transform to every vertex.
TriMesh transformed(const TriMesh& mesh, const Eigen::Isometry3d& transform);

}  // namespace seggrasp
