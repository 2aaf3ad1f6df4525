#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <unistd.h>

#include "seggrasp/mesh.hpp"

namespace testing {

using seggrasp::Vec3;

// Independent point-to-triangle distance: plane distance when the projection
// falls inside, otherwise the nearest of the three edge segments.
inline double brute_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  auto segment = [&](const Vec3& s0, const Vec3& s1) {
    const Vec3 d = s1 - s0;
    const double t = std::clamp((p - s0).dot(d) / d.squaredNorm(), 0.0, 1.0);
    return (s0 + t * d - p).norm();
  };
  const Vec3 n = (b - a).cross(c - a).normalized();
  const Vec3 q = p - (p - a).dot(n) * n;
  const double s1 = n.dot((b - a).cross(q - a));
  const double s2 = n.dot((c - b).cross(q - b));
  const double s3 = n.dot((a - c).cross(q - c));
  if (s1 >= 0 && s2 >= 0 && s3 >= 0) return std::abs((p - a).dot(n));
  return std::min({segment(a, b), segment(b, c), segment(c, a)});
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("seggrasp_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Random triangle soup inside [-1, 1]^3 with no sliver triangles.
inline seggrasp::TriMesh random_soup(int faces, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  seggrasp::VertexMatrix v(3 * faces, 3);
  seggrasp::FaceMatrix f(faces, 3);
  for (int i = 0; i < faces; ++i) {
    for (;;) {
      seggrasp::Vec3 p[3];
      for (auto& q : p) q = seggrasp::Vec3(coord(rng), coord(rng), coord(rng));
      const seggrasp::Vec3 center = (p[0] + p[1] + p[2]) / 3.0;
      for (auto& q : p) q = center + 0.35 * (q - center);
      if ((p[1] - p[0]).cross(p[2] - p[0]).norm() < 1e-3) continue;
      for (int k = 0; k < 3; ++k) {
        v.row(3 * i + k) = p[k].transpose();
        f(i, k) = 3 * i + k;
      }
      break;
    }
  }
  return seggrasp::TriMesh(v, f);
}

}  // namespace testing

