#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "seggrasp/error.hpp"
#include "seggrasp/mesh.hpp"
#include "seggrasp/primitives.hpp"

using namespace seggrasp;
using testing::TempDir;
using testing::write_file;

namespace {

const char* kCubeObj = R"(# unit cube
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
)";

TriMesh single_triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
  VertexMatrix v(3, 3);
  v.row(0) = a.transpose();
  v.row(1) = b.transpose();
  v.row(2) = c.transpose();
  FaceMatrix f(1, 3);
  f << 0, 1, 2;
  return TriMesh(v, f);
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("unit cube OBJ has total area 6") {
  TempDir dir("mesh");
  write_file(dir / "cube.obj", kCubeObj);
  const TriMesh mesh = load_mesh(dir / "cube.obj");
  CHECK(mesh.vertex_count() == 8);
  CHECK(mesh.face_count() == 12);
  CHECK(mesh.total_area() == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("equilateral triangle of edge 2 has area sqrt(3)") {
  const TriMesh mesh = single_triangle(Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(1, std::sqrt(3.0), 0));
  CHECK(mesh.face_area(0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(mesh.face_normal(0).isApprox(Vec3(0, 0, 1)));
}

TEST_CASE("load errors") {
  TempDir dir("mesh");
  SUBCASE("face index beyond vertex count") {
    write_file(dir / "bad.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nv 1 1 1\nv 2 0 0\nv 0 2 0\nv 0 0 2\nf 1 2 99\n");
    CHECK(kind_of([&] { load_mesh(dir / "bad.obj"); }) == ErrorKind::IndexOutOfRange);
  }
  SUBCASE("malformed vertex") {
    write_file(dir / "bad.obj", "v 0 zero 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    CHECK(kind_of([&] { load_mesh(dir / "bad.obj"); }) == ErrorKind::Parse);
  }
  SUBCASE("zero total area") {
    write_file(dir / "flat.obj", "v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n");
    CHECK(kind_of([&] { load_mesh(dir / "flat.obj"); }) == ErrorKind::DegenerateMesh);
  }
  SUBCASE("missing file") {
    CHECK(kind_of([&] { load_mesh(dir / "nope.obj"); }) == ErrorKind::Parse);
  }
  SUBCASE("repeated vertex in a face") {
    VertexMatrix v(3, 3);
    v << 0, 0, 0, 1, 0, 0, 0, 1, 0;
    FaceMatrix f(1, 3);
    f << 0, 0, 1;
    CHECK(kind_of([&] { TriMesh(v, f); }) == ErrorKind::DegenerateMesh);
  }
}

TEST_CASE("OBJ polygons are fan triangulated and negative indices resolve") {
  TempDir dir("mesh");
  write_file(dir / "quad.obj", "v 0 0 0\nv 2 0 0\nv 2 3 0\nv 0 3 0\nf 1/1/1 2/2/2 3/3/3 4/4/4\nf -4 -3 -2\n");
  const TriMesh mesh = load_mesh(dir / "quad.obj");
  CHECK(mesh.face_count() == 3);
  CHECK(mesh.face_area(0) + mesh.face_area(1) == doctest::Approx(6.0));
  CHECK(mesh.faces().row(2) == mesh.faces().row(0));
}

TEST_CASE("PLY ascii, binary little and big endian load the same cube") {
  TempDir dir("mesh");
  write_file(dir / "cube.obj", kCubeObj);
  const TriMesh cube = load_mesh(dir / "cube.obj");

  const std::string header_tail =
      "element vertex 8\nproperty float x\nproperty float y\nproperty float z\n"
      "element face 12\nproperty list uchar int vertex_indices\nend_header\n";
  std::string ascii = "ply\nformat ascii 1.0\ncomment test\n" + header_tail;
  for (int v = 0; v < 8; ++v) {
    ascii += std::to_string(cube.vertex(v).x()) + " " + std::to_string(cube.vertex(v).y()) + " " +
             std::to_string(cube.vertex(v).z()) + "\n";
  }
  for (int f = 0; f < 12; ++f) {
    ascii += "3 " + std::to_string(cube.faces()(f, 0)) + " " + std::to_string(cube.faces()(f, 1)) + " " +
             std::to_string(cube.faces()(f, 2)) + "\n";
  }
  write_file(dir / "a.ply", ascii);

  auto binary = [&](bool big) {
    std::string out = std::string("ply\nformat ") + (big ? "binary_big_endian" : "binary_little_endian") +
                      " 1.0\n" + header_tail;
    auto put = [&](const void* p, int n) {
      std::string bytes(static_cast<const char*>(p), n);
      if (big) std::reverse(bytes.begin(), bytes.end());
      out += bytes;
    };
    for (int v = 0; v < 8; ++v) {
      for (int k = 0; k < 3; ++k) {
        const float x = static_cast<float>(cube.vertices()(v, k));
        put(&x, 4);
      }
    }
    for (int f = 0; f < 12; ++f) {
      out += static_cast<char>(3);
      for (int k = 0; k < 3; ++k) {
        const std::int32_t i = cube.faces()(f, k);
        put(&i, 4);
      }
    }
    return out;
  };
  write_file(dir / "le.ply", binary(false));
  write_file(dir / "be.ply", binary(true));

  for (const char* name : {"a.ply", "le.ply", "be.ply"}) {
    CAPTURE(name);
    const TriMesh mesh = load_mesh(dir / name);
    CHECK(mesh.faces() == cube.faces());
    CHECK(mesh.total_area() == doctest::Approx(6.0));
  }
}

TEST_CASE("OBJ save and reload preserves geometry") {
  TempDir dir("mesh");
  const TriMesh sphere = make_icosphere(Vec3(0.1, 0.2, 0.3), 0.7, 2);
  save_obj(sphere, dir / "s.obj");
  const TriMesh back = load_mesh(dir / "s.obj");
  CHECK(back.faces() == sphere.faces());
  CHECK((back.vertices() - sphere.vertices()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("colored PLY output checks color count") {
  TempDir dir("mesh");
  const TriMesh sphere = make_icosphere(Vec3::Zero(), 1.0, 0);
  std::vector<Rgb> colors(sphere.face_count(), Rgb{1, 2, 3});
  save_colored_ply(sphere, colors, dir / "c.ply");
  CHECK(load_mesh(dir / "c.ply").face_count() == sphere.face_count());
  colors.pop_back();
  CHECK(kind_of([&] { save_colored_ply(sphere, colors, dir / "d.ply"); }) == ErrorKind::LengthMismatch);
}

TEST_CASE("area conservation on generated primitives") {
  const TriMesh box = make_box(Vec3(-0.5, 0.0, 0.1), Vec3(0.3, 0.25, 1.4), 0.07);
  const double a = 0.8, b = 0.25, c = 1.3;
  CHECK(std::abs(box.total_area() - 2 * (a * b + b * c + c * a)) < 1e-6 * box.total_area());

  // Regular icosahedron: 20 equilateral faces of edge r / sin(2 pi / 5).
  const double r = 1.3;
  const TriMesh ico = make_icosphere(Vec3(1, 2, 3), r, 0);
  const double edge = r / std::sin(2 * std::numbers::pi / 5);
  CHECK(ico.face_count() == 20);
  CHECK(std::abs(ico.total_area() - 5 * std::sqrt(3.0) * edge * edge) < 1e-6 * ico.total_area());

  const TriMesh prism = make_prism(0.5, 0.0, 2.0, 8, 3);
  const double side = 2 * 0.5 * std::sin(std::numbers::pi / 8);
  const double cap = 0.5 * 8 * 0.5 * 0.5 * std::sin(2 * std::numbers::pi / 8);
  CHECK(std::abs(prism.total_area() - (8 * side * 2.0 + 2 * cap)) < 1e-6 * prism.total_area());
}

TEST_CASE("face normals are unit length on non-degenerate faces") {
  std::mt19937_64 rng(3);
  const TriMesh soup = testing::random_soup(40, rng);
  for (int f = 0; f < soup.face_count(); ++f) CHECK(std::abs(soup.face_normal(f).norm() - 1.0) < 1e-9);
}

TEST_CASE("sample_surface follows area proportions") {
  VertexMatrix v(6, 3);
  v << 0, 0, 0, 1, 0, 0, 0, 2, 0,  // area 1
      0, 0, 1, 3, 0, 1, 0, 2, 1;   // area 3
  FaceMatrix f(2, 3);
  f << 0, 1, 2, 3, 4, 5;
  const TriMesh mesh(v, f);
  for (std::uint64_t seed : {1ULL, 99ULL, 123456789ULL}) {
    const auto samples = sample_surface(mesh, 40000, seed);
    REQUIRE(samples.size() == 40000);
    int second = 0;
    for (const auto& s : samples) second += s.face_index == 1;
    CHECK(std::abs(second / 40000.0 - 0.75) <= 0.01);
  }
}

TEST_CASE("sample_surface histogram on a many-face mesh converges") {
  const TriMesh mesh = make_icosphere(Vec3::Zero(), 1.0, 1);
  std::vector<int> hist(mesh.face_count(), 0);
  for (const auto& s : sample_surface(mesh, 100000, 5)) ++hist[s.face_index];
  for (int face = 0; face < mesh.face_count(); ++face) {
    CHECK(std::abs(hist[face] / 100000.0 - mesh.face_area(face) / mesh.total_area()) < 0.01);
  }
}

TEST_CASE("samples lie on their face with valid barycentrics") {
  std::mt19937_64 rng(11);
  const TriMesh soup = testing::random_soup(25, rng);
  for (const auto& s : sample_surface(soup, 500, 8)) {
    const auto [a, b, c] = soup.corners(s.face_index);
    CHECK(std::abs((s.point - a).dot(soup.face_normal(s.face_index))) < 1e-9);
    CHECK(s.barycentric.minCoeff() >= 0.0);
    CHECK(s.barycentric.maxCoeff() <= 1.0);
    CHECK(std::abs(s.barycentric.sum() - 1.0) < 1e-12);
    CHECK((s.barycentric[0] * a + s.barycentric[1] * b + s.barycentric[2] * c - s.point).norm() < 1e-12);
    CHECK(s.normal == soup.face_normal(s.face_index));
  }
}

TEST_CASE("sample_surface edge cases") {
  const TriMesh tri = single_triangle(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0));
  const auto one = sample_surface(tri, 1, 42);
  REQUIRE(one.size() == 1);
  CHECK(one[0].face_index == 0);

  const TriMesh sphere = make_icosphere(Vec3::Zero(), 1.0, 1);
  const auto a = sample_surface(sphere, 300, 77);
  const auto b = sample_surface(sphere, 300, 77);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].face_index == b[i].face_index);
    CHECK(a[i].point == b[i].point);
  }

  const TriMesh flat = single_triangle(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0));
  CHECK(kind_of([&] { sample_surface(flat, 10, 1); }) == ErrorKind::DegenerateMesh);
}

TEST_CASE("nearest_face tie-break and analytic distance") {
  // Fan of 8 triangles around vertex 0; faces 2, 5 and 7 share it with others
  // that are placed away from the query.
  VertexMatrix v(10, 3);
  v.row(0) << 0, 0, 0;
  for (int k = 0; k < 9; ++k) {
    const double t = 2 * std::numbers::pi * k / 9;
    v.row(k + 1) << std::cos(t), std::sin(t), 0;
  }
  FaceMatrix f(8, 3);
  for (int k = 0; k < 8; ++k) f.row(k) << 0, k + 1, k + 2;
  // Detach faces other than 2, 5, 7 from the shared vertex.
  VertexMatrix v2(v.rows() + 1, 3);
  v2.topRows(v.rows()) = v;
  v2.row(v.rows()) << 5, 5, 5;
  for (int k : {0, 1, 3, 4, 6}) f(k, 0) = static_cast<int>(v.rows());
  const TriMesh mesh(v2, f);
  const NearestFace hit = nearest_face(mesh, Vec3(0, 0, 0));
  CHECK(hit.face_index == 2);
  CHECK(hit.distance == 0.0);

  const TriMesh tri = single_triangle(Vec3(0, 0, 0), Vec3(3, 0, 0), Vec3(0, 3, 0));
  const NearestFace above = nearest_face(tri, Vec3(1, 1, 1));
  CHECK(above.face_index == 0);
  CHECK(above.distance == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("nearest_face matches an independent brute-force scan") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  for (int trial = 0; trial < 5; ++trial) {
    const TriMesh mesh = testing::random_soup(20, rng);
    for (int q = 0; q < 50; ++q) {
      const Vec3 p(coord(rng), coord(rng), coord(rng));
      int best = -1;
      double best_d = 0.0;
      for (int face = 0; face < mesh.face_count(); ++face) {
        const auto [a, b, c] = mesh.corners(face);
        const double d = testing::brute_distance(p, a, b, c);
        if (best < 0 || d < best_d) {
          best = face;
          best_d = d;
        }
      }
      const NearestFace hit = nearest_face(mesh, p);
      CHECK(hit.face_index == best);
      CHECK(std::abs(hit.distance - best_d) < 1e-12);
    }
  }
}

TEST_CASE("connected components over shared vertices") {
  const TriMesh a = make_icosphere(Vec3::Zero(), 1.0, 0);
  const TriMesh b = make_box(Vec3(3, 0, 0), Vec3(4, 1, 1), 1.0);
  const std::vector<TriMesh> parts{a, b};
  const TriMesh both = concatenate(parts);
  std::vector<int> all(both.face_count());
  for (int i = 0; i < both.face_count(); ++i) all[i] = i;
  const auto comps = connected_components(both, all);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].size() == static_cast<std::size_t>(a.face_count()));
  CHECK(comps[1].front() == a.face_count());
}

TEST_CASE("rigid transforms preserve areas") {
  const TriMesh box = make_box(Vec3(0, 0, 0), Vec3(1, 2, 3), 0.5);
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.rotate(Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()));
  t.translate(Vec3(4, -1, 2));
  const TriMesh moved = transformed(box, t);
  CHECK((moved.face_areas() - box.face_areas()).cwiseAbs().maxCoeff() < 1e-12);
}
