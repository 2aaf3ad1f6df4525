#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "seggrasp/mesh.hpp"

namespace seggrasp {

struct ImageSize {
  int width = 512;
  int height = 512;
  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// Pixel rectangle, inclusive min and exclusive max: [x0, x1) x [y0, y1).
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  bool empty() const { return x1 <= x0 || y1 <= y0; }
  std::int64_t area() const { return empty() ? 0 : std::int64_t{x1 - x0} * (y1 - y0); }
  PixelRect clipped(ImageSize size) const;
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

struct Camera {
  Vec3 position;
  Vec3 look_at;
  Vec3 up;
  double fov_y_deg = 45.0;
  ImageSize image;

  /// Throws Error{InvalidArgument} when the camera violates its invariants.
  void validate() const;
  bool operator==(const Camera&) const = default;
};

/// Screen-space projection of a point: pixel coordinates (x right, y down,
/// pixel (i, j) covers [i, i+1) x [j, j+1)) and view depth. Empty when the
/// point is not in front of the camera.
struct Projection {
  double x;
  double y;
  double depth;
};
std::optional<Projection> project(const Camera& camera, const Vec3& point);

inline constexpr int kEmptyPixel = -1;

/// Per-pixel nearest face index (or kEmptyPixel) and its view depth.
struct FaceIdBuffer {
  int view_index = 0;
  ImageSize image;
  std::vector<int> pixels;
  std::vector<double> depth;

  int at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * image.width + x]; }
  bool operator==(const FaceIdBuffer&) const = default;
};

/// Cameras on a sphere around the bounding-box center, radius 2.5x the
/// bounding-sphere radius, directions from a seeded, jittered Fibonacci lattice.
std::vector<Camera> make_view_sphere(int view_count, const TriMesh& mesh, std::uint64_t seed,
                                     ImageSize image = {});

/// Perspective z-buffer rasterization with pixel-center coverage. Faces are
/// drawn in index order with a strict depth test, so equal-depth ties go to the
/// lower face index. No back-face culling.
FaceIdBuffer rasterize(const TriMesh& mesh, const Camera& camera, int view_index = 0);

/// Renders every camera; buffer k has view_index k regardless of worker count.
std::vector<FaceIdBuffer> render_views(const TriMesh& mesh, const std::vector<Camera>& cameras, int workers = 1);

/// V(face, rect): pixels inside `rect` owned by `face`.
std::int64_t visible_pixel_count(const FaceIdBuffer& buffer, int face_index, PixelRect rect);

/// Writes the buffer as RGB PNG, colors hashed from face index, empty pixels black.
void write_face_id_png(const FaceIdBuffer& buffer, const std::filesystem::path& path);

}  // namespace seggrasp
