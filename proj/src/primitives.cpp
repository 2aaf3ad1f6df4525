#include "seggrasp/primitives.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "seggrasp/error.hpp"

namespace seggrasp {

namespace {

struct Builder {
  std::vector<Vec3> vertices;
  std::vector<Eigen::Vector3i> faces;

  int add(const Vec3& p) {
    vertices.push_back(p);
    return static_cast<int>(vertices.size()) - 1;
  }
  void tri(int a, int b, int c) { faces.emplace_back(a, b, c); }
  void quad(int a, int b, int c, int d) {
    tri(a, b, c);
    tri(a, c, d);
  }

  TriMesh build() const {
    VertexMatrix v(static_cast<Eigen::Index>(vertices.size()), 3);
    for (std::size_t i = 0; i < vertices.size(); ++i) v.row(i) = vertices[i].transpose();
    FaceMatrix f(static_cast<Eigen::Index>(faces.size()), 3);
    for (std::size_t i = 0; i < faces.size(); ++i) f.row(i) = faces[i].transpose();
    return TriMesh(std::move(v), std::move(f));
  }
};

}  // namespace

TriMesh make_box(const Vec3& min_corner, const Vec3& max_corner, double cell) {
  const Vec3 size = max_corner - min_corner;
  if (!(size.array() > 0.0).all() || !(cell > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "box needs positive extents and cell size");
  }
  std::array<int, 3> n;
  for (int a = 0; a < 3; ++a) n[a] = std::max(1, static_cast<int>(std::ceil(size[a] / cell - 1e-9)));

  // Surface lattice points are keyed by integer coordinates so shared edges weld exactly.
  Builder b;
  std::map<std::array<int, 3>, int> index;
  auto vertex = [&](const std::array<int, 3>& ijk) {
    auto [it, inserted] = index.try_emplace(ijk, -1);
    if (inserted) {
      Vec3 p;
      for (int a = 0; a < 3; ++a) {
        p[a] = ijk[a] == n[a] ? max_corner[a] : min_corner[a] + size[a] * ijk[a] / n[a];
      }
      it->second = b.add(p);
    }
    return it->second;
  };

  // (normal axis, at max?, first in-plane axis, second in-plane axis) with u x v = outward normal.
  struct Side {
    int axis;
    bool at_max;
    int u;
    int v;
  };
  constexpr Side sides[6] = {{0, true, 1, 2}, {0, false, 2, 1}, {1, true, 2, 0},
                             {1, false, 0, 2}, {2, true, 0, 1}, {2, false, 1, 0}};
  for (const Side& s : sides) {
    for (int i = 0; i < n[s.u]; ++i) {
      for (int j = 0; j < n[s.v]; ++j) {
        auto at = [&](int di, int dj) {
          std::array<int, 3> ijk{};
          ijk[s.axis] = s.at_max ? n[s.axis] : 0;
          ijk[s.u] = i + di;
          ijk[s.v] = j + dj;
          return vertex(ijk);
        };
        b.quad(at(0, 0), at(1, 0), at(1, 1), at(0, 1));
      }
    }
  }
  return b.build();
}

TriMesh make_prism(double radius, double z0, double z1, int sides, int rings) {
  if (!(radius > 0.0) || !(z1 > z0) || sides < 3 || rings < 1) {
    throw Error(ErrorKind::InvalidArgument, "invalid prism parameters");
  }
  Builder b;
  std::vector<std::vector<int>> ring(rings + 1, std::vector<int>(sides));
  for (int h = 0; h <= rings; ++h) {
    const double z = h == rings ? z1 : z0 + (z1 - z0) * h / rings;
    for (int s = 0; s < sides; ++s) {
      const double t = 2.0 * std::numbers::pi * s / sides;
      ring[h][s] = b.add(Vec3(radius * std::cos(t), radius * std::sin(t), z));
    }
  }
  for (int h = 0; h < rings; ++h) {
    for (int s = 0; s < sides; ++s) {
      const int s1 = (s + 1) % sides;
      b.quad(ring[h][s], ring[h][s1], ring[h + 1][s1], ring[h + 1][s]);
    }
  }
  const int bottom = b.add(Vec3(0, 0, z0));
  const int top = b.add(Vec3(0, 0, z1));
  for (int s = 0; s < sides; ++s) {
    const int s1 = (s + 1) % sides;
    b.tri(top, ring[rings][s], ring[rings][s1]);
    b.tri(bottom, ring[0][s1], ring[0][s]);
  }
  return b.build();
}

TriMesh make_icosphere(const Vec3& center, double radius, int level) {
  if (!(radius > 0.0) || level < 0) throw Error(ErrorKind::InvalidArgument, "invalid icosphere parameters");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> unit = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
                            {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : unit) p.normalize();
  std::vector<Eigen::Vector3i> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int c) {
      const auto key = std::minmax(a, c);
      auto [it, inserted] = midpoint.try_emplace(key, -1);
      if (inserted) {
        unit.push_back((unit[a] + unit[c]).normalized());
        it->second = static_cast<int>(unit.size()) - 1;
      }
      return it->second;
    };
    std::vector<Eigen::Vector3i> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]);
      const int bc = mid(f[1], f[2]);
      const int ca = mid(f[2], f[0]);
      next.emplace_back(f[0], ab, ca);
      next.emplace_back(f[1], bc, ab);
      next.emplace_back(f[2], ca, bc);
      next.emplace_back(ab, bc, ca);
    }
    faces = std::move(next);
  }
  Builder b;
  for (const Vec3& p : unit) b.add(center + radius * p);
  b.faces = std::move(faces);
  return b.build();
}

TriMesh make_tube_arc(double arc_radius, double tube_radius, double a0, double a1, int arc_segments,
                      int tube_sides) {
  if (!(tube_radius > 0.0) || !(arc_radius > tube_radius) || !(a1 > a0) || arc_segments < 1 || tube_sides < 3) {
    throw Error(ErrorKind::InvalidArgument, "invalid tube arc parameters");
  }
  Builder b;
  std::vector<std::vector<int>> ring(arc_segments + 1, std::vector<int>(tube_sides));
  std::vector<Vec3> ring_center(arc_segments + 1);
  for (int i = 0; i <= arc_segments; ++i) {
    const double phi = i == arc_segments ? a1 : a0 + (a1 - a0) * i / arc_segments;
    const Vec3 radial(std::cos(phi), std::sin(phi), 0.0);
    ring_center[i] = arc_radius * radial;
    for (int j = 0; j < tube_sides; ++j) {
      const double psi = 2.0 * std::numbers::pi * j / tube_sides;
      ring[i][j] = b.add(ring_center[i] + tube_radius * (std::cos(psi) * radial + std::sin(psi) * Vec3::UnitZ()));
    }
  }
  for (int i = 0; i < arc_segments; ++i) {
    for (int j = 0; j < tube_sides; ++j) {
      const int j1 = (j + 1) % tube_sides;
      b.quad(ring[i][j], ring[i + 1][j], ring[i + 1][j1], ring[i][j1]);
    }
  }
  const int start = b.add(ring_center.front());
  const int end = b.add(ring_center.back());
  for (int j = 0; j < tube_sides; ++j) {
    const int j1 = (j + 1) % tube_sides;
    b.tri(start, ring[0][j], ring[0][j1]);
    b.tri(end, ring[arc_segments][j1], ring[arc_segments][j]);
  }
  return b.build();
}

TriMesh concatenate(std::span<const TriMesh> meshes) {
  int nv = 0;
  int nf = 0;
  for (const TriMesh& m : meshes) {
    nv += m.vertex_count();
    nf += m.face_count();
  }
  VertexMatrix v(nv, 3);
  FaceMatrix f(nf, 3);
  int vo = 0;
  int fo = 0;
  for (const TriMesh& m : meshes) {
    v.middleRows(vo, m.vertex_count()) = m.vertices();
    f.middleRows(fo, m.face_count()) = m.faces().array() + vo;
    vo += m.vertex_count();
    fo += m.face_count();
  }
  return TriMesh(std::move(v), std::move(f));
}

}  // namespace seggrasp
