#include "seggrasp/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <png.h>

#include "seggrasp/error.hpp"
#include "seggrasp/parallel.hpp"
#include "seggrasp/random.hpp"

namespace seggrasp {

namespace {

struct CameraFrame {
  Vec3 origin;
  Vec3 right;
  Vec3 up;
  Vec3 forward;
  double focal;  // pixels
  double cx;
  double cy;

  explicit CameraFrame(const Camera& camera)
      : origin(camera.position),
        forward((camera.look_at - camera.position).normalized()),
        focal(0.5 * camera.image.height / std::tan(0.5 * camera.fov_y_deg * std::numbers::pi / 180.0)),
        cx(0.5 * camera.image.width),
        cy(0.5 * camera.image.height) {
    right = forward.cross(camera.up).normalized();
    up = right.cross(forward);
  }

  Vec3 to_view(const Vec3& p) const {
    const Vec3 d = p - origin;
    return {d.dot(right), d.dot(up), d.dot(forward)};
  }
};

struct ScreenVertex {
  double x;
  double y;
  double inv_depth;
};

double edge(const ScreenVertex& a, const ScreenVertex& b, double px, double py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

void raster_triangle(const ScreenVertex& a, const ScreenVertex& b, const ScreenVertex& c, int face,
                     FaceIdBuffer& out) {
  const double area2 = edge(a, b, c.x, c.y);
  if (std::abs(area2) < 1e-14) return;
  const int w = out.image.width;
  const int h = out.image.height;
  const double min_x = std::min({a.x, b.x, c.x});
  const double max_x = std::max({a.x, b.x, c.x});
  const double min_y = std::min({a.y, b.y, c.y});
  const double max_y = std::max({a.y, b.y, c.y});
  if (max_x < 0.0 || max_y < 0.0 || min_x > w || min_y > h) return;
  // Clamp in floating point first: near-clipped vertices can project far outside int range.
  const int x_begin = static_cast<int>(std::max(0.0, std::floor(min_x - 0.5)));
  const int x_end = static_cast<int>(std::min(w - 1.0, std::ceil(max_x - 0.5)));
  const int y_begin = static_cast<int>(std::max(0.0, std::floor(min_y - 0.5)));
  const int y_end = static_cast<int>(std::min(h - 1.0, std::ceil(max_y - 0.5)));
  const double sign = area2 > 0.0 ? 1.0 : -1.0;
  const double inv_area = 1.0 / area2;

  for (int py = y_begin; py <= y_end; ++py) {
    const double sy = py + 0.5;
    for (int px = x_begin; px <= x_end; ++px) {
      const double sx = px + 0.5;
      const double w0 = edge(b, c, sx, sy);
      const double w1 = edge(c, a, sx, sy);
      const double w2 = edge(a, b, sx, sy);
      if (sign * w0 < 0.0 || sign * w1 < 0.0 || sign * w2 < 0.0) continue;
      // 1/z is affine in screen space.
      const double inv_depth = (w0 * a.inv_depth + w1 * b.inv_depth + w2 * c.inv_depth) * inv_area;
      if (!(inv_depth > 0.0)) continue;
      const double depth = 1.0 / inv_depth;
      const std::size_t idx = static_cast<std::size_t>(py) * w + px;
      if (depth < out.depth[idx]) {
        out.depth[idx] = depth;
        out.pixels[idx] = face;
      }
    }
  }
}

}  // namespace

PixelRect PixelRect::clipped(ImageSize size) const {
  PixelRect r{std::clamp(x0, 0, size.width), std::clamp(y0, 0, size.height), std::clamp(x1, 0, size.width),
              std::clamp(y1, 0, size.height)};
  return r;
}

void Camera::validate() const {
  if (!position.allFinite() || !look_at.allFinite() || !up.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "camera has non-finite coordinates");
  }
  const Vec3 forward = look_at - position;
  if (forward.norm() <= 0.0) throw Error(ErrorKind::InvalidArgument, "camera position equals look_at");
  if (!(fov_y_deg > 0.0 && fov_y_deg < 180.0)) throw Error(ErrorKind::InvalidArgument, "fov_y must be in (0, 180)");
  if (image.width < 16 || image.height < 16) throw Error(ErrorKind::InvalidArgument, "image must be at least 16x16");
  if (forward.normalized().cross(up).norm() < 1e-9) {
    throw Error(ErrorKind::InvalidArgument, "camera up vector is parallel to the view direction");
  }
}

std::optional<Projection> project(const Camera& camera, const Vec3& point) {
  const CameraFrame frame(camera);
  const Vec3 v = frame.to_view(point);
  if (!(v.z() > 0.0)) return std::nullopt;
  return Projection{frame.cx + frame.focal * v.x() / v.z(), frame.cy - frame.focal * v.y() / v.z(), v.z()};
}

std::vector<Camera> make_view_sphere(int view_count, const TriMesh& mesh, std::uint64_t seed, ImageSize image) {
  if (view_count < 1) throw Error(ErrorKind::InvalidArgument, "view_count must be >= 1");
  mesh.require_non_degenerate();
  const Vec3 center = mesh.bounds_center();
  const double radius = std::max(mesh.bounding_radius(), 1e-12);
  const double distance = 2.5 * radius;

  // Half-angle subtended by the bounding sphere, with a small margin; widened
  // vertically when the image is narrower than it is tall.
  const double half = std::asin(radius / distance) * 1.02;
  const double aspect = static_cast<double>(image.height) / image.width;
  const double half_y = std::atan(std::tan(half) * std::max(1.0, aspect));
  const double fov_y = 2.0 * half_y * 180.0 / std::numbers::pi;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double phase = 2.0 * std::numbers::pi * unit(rng);

  std::vector<Camera> cameras;
  cameras.reserve(view_count);
  for (int i = 0; i < view_count; ++i) {
    const double jitter = unit(rng) - 0.5;  // within +-half a lattice band
    const double z = 1.0 - 2.0 * (i + 0.5 + 0.5 * jitter) / view_count;
    const double ring = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double theta = phase + golden_angle * i;
    const Vec3 dir(ring * std::cos(theta), ring * std::sin(theta), z);
    const Vec3 up = std::abs(dir.z()) > 0.999 ? Vec3::UnitY() : Vec3::UnitZ();
    cameras.push_back({center + distance * dir, center, up, fov_y, image});
  }
  return cameras;
}

FaceIdBuffer rasterize(const TriMesh& mesh, const Camera& camera, int view_index) {
  camera.validate();
  mesh.require_non_degenerate();
  const CameraFrame frame(camera);
  const int w = camera.image.width;
  const int h = camera.image.height;

  FaceIdBuffer out;
  out.view_index = view_index;
  out.image = camera.image;
  out.pixels.assign(static_cast<std::size_t>(w) * h, kEmptyPixel);
  out.depth.assign(static_cast<std::size_t>(w) * h, std::numeric_limits<double>::infinity());

  const double near = 1e-6 * (camera.look_at - camera.position).norm();
  std::vector<Vec3> view(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) view[v] = frame.to_view(mesh.vertex(v));

  auto to_screen = [&](const Vec3& p) {
    return ScreenVertex{frame.cx + frame.focal * p.x() / p.z(), frame.cy - frame.focal * p.y() / p.z(), 1.0 / p.z()};
  };

  std::vector<Vec3> polygon;
  std::vector<Vec3> clipped;
  for (int f = 0; f < mesh.face_count(); ++f) {
    polygon = {view[mesh.faces()(f, 0)], view[mesh.faces()(f, 1)], view[mesh.faces()(f, 2)]};
    const bool all_in_front = polygon[0].z() >= near && polygon[1].z() >= near && polygon[2].z() >= near;
    if (!all_in_front) {
      // Sutherland-Hodgman against the near plane.
      clipped.clear();
      for (std::size_t k = 0; k < polygon.size(); ++k) {
        const Vec3& cur = polygon[k];
        const Vec3& nxt = polygon[(k + 1) % polygon.size()];
        const bool cur_in = cur.z() >= near;
        const bool nxt_in = nxt.z() >= near;
        if (cur_in) clipped.push_back(cur);
        if (cur_in != nxt_in) {
          const double t = (near - cur.z()) / (nxt.z() - cur.z());
          Vec3 p = cur + t * (nxt - cur);
          p.z() = near;
          clipped.push_back(p);
        }
      }
      if (clipped.size() < 3) continue;
      polygon = clipped;
    }
    const ScreenVertex s0 = to_screen(polygon[0]);
    for (std::size_t k = 1; k + 1 < polygon.size(); ++k) {
      raster_triangle(s0, to_screen(polygon[k]), to_screen(polygon[k + 1]), f, out);
    }
  }
  return out;
}

std::vector<FaceIdBuffer> render_views(const TriMesh& mesh, const std::vector<Camera>& cameras, int workers) {
  std::vector<FaceIdBuffer> buffers(cameras.size());
  parallel_for(static_cast<int>(cameras.size()), workers,
               [&](int i) { buffers[i] = rasterize(mesh, cameras[i], i); });
  return buffers;
}

std::int64_t visible_pixel_count(const FaceIdBuffer& buffer, int face_index, PixelRect rect) {
  const PixelRect r = rect.clipped(buffer.image);
  std::int64_t count = 0;
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = r.x0; x < r.x1; ++x) count += buffer.at(x, y) == face_index;
  }
  return count;
}

void write_face_id_png(const FaceIdBuffer& buffer, const std::filesystem::path& path) {
  FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (!fp) throw Error(ErrorKind::Parse, "cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw Error(ErrorKind::Parse, "libpng failed writing " + path.string());
  }
  png_init_io(png, fp);
  const int w = buffer.image.width;
  const int h = buffer.image.height;
  png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(w) * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int face = buffer.at(x, y);
      std::uint64_t c = face == kEmptyPixel ? 0 : mix_seed(static_cast<std::uint64_t>(face)) | 0x404040;
      row[3 * x + 0] = static_cast<png_byte>(c & 0xff);
      row[3 * x + 1] = static_cast<png_byte>((c >> 8) & 0xff);
      row[3 * x + 2] = static_cast<png_byte>((c >> 16) & 0xff);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

}  // namespace seggrasp
