#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "seggrasp/error.hpp"
#include "seggrasp/eval.hpp"
#include "seggrasp/grasp.hpp"
#include "seggrasp/primitives.hpp"

using namespace seggrasp;
using nlohmann::json;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidArgument;
}

GraspCandidate at(const Vec3& p, double confidence) {
  GraspCandidate g;
  g.position = p;
  g.width = 0.05;
  g.confidence = confidence;
  return g;
}

/// Faces 0 and 1 are two triangles in z = 0 sharing the edge x = 0.
TriMesh two_triangles() {
  VertexMatrix v(4, 3);
  v << -1, -1, 0, 0, -1, 0, 0, 1, 0, 1, -1, 0;
  FaceMatrix f(2, 3);
  f << 0, 1, 2, 1, 3, 2;
  return TriMesh(v, f);
}

std::vector<PartAssignment> labeled(const std::vector<int>& labels) {
  std::vector<PartAssignment> out;
  for (std::size_t i = 0; i < labels.size(); ++i) out.push_back({static_cast<int>(i), 0, labels[i], 0.0});
  return out;
}

}  // namespace

TEST_CASE("loading grasp files") {
  json doc = {{"grasps", json::array()}};
  for (int k = 0; k < 5; ++k) {
    doc["grasps"].push_back({{"position", {0.1 * k, 0.0, 1.0}},
                             {"quaternion", {1.0, 0.0, 0.0, 0.0}},
                             {"width", 0.04},
                             {"confidence", 0.2 * k}});
  }
  const auto grasps = grasps_from_json(doc);
  REQUIRE(grasps.size() == 5);
  for (int k = 0; k < 5; ++k) {
    CHECK(grasps[k].position.x() == 0.1 * k);
    CHECK(grasps[k].confidence == 0.2 * k);
  }

  json bad = doc;
  bad["grasps"][2]["quaternion"] = {2.0, 0.0, 0.0, 0.0};
  CHECK(kind_of([&] { grasps_from_json(bad); }) == ErrorKind::BadQuaternion);
  const auto widened = grasps_from_json(bad, 1.5);
  CHECK(widened[2].orientation.coeffs() == Eigen::Quaterniond::Identity().coeffs());

  json slightly = doc;
  slightly["grasps"][0]["quaternion"] = {1.0005, 0.0, 0.0, 0.0};
  CHECK(std::abs(grasps_from_json(slightly)[0].orientation.norm() - 1.0) < 1e-12);

  CHECK(grasps_from_json(json{{"grasps", json::array()}}).empty());

  json missing = doc;
  missing["grasps"][1].erase("width");
  CHECK(kind_of([&] { grasps_from_json(missing); }) == ErrorKind::Parse);

  testing::TempDir dir("grasp");
  testing::write_file(dir / "g.json", "[1, 2");
  CHECK(kind_of([&] { load_grasps(dir / "g.json"); }) == ErrorKind::Parse);
  save_grasps(dir / "h.json", grasps);
  CHECK(load_grasps(dir / "h.json") == grasps);
}

TEST_CASE("antipodal grasps on a thin plate close across its thickness") {
  const TriMesh plate = make_box(Vec3(0, 0, 0), Vec3(1.0, 0.6, 0.05), 0.1);
  const auto grasps = sample_antipodal(plate, 200, 0.1, 11);
  REQUIRE(grasps.size() == 200);
  int aligned = 0;
  for (const auto& g : grasps) {
    const double angle = std::acos(std::min(1.0, std::abs(g.closing_axis().dot(Vec3::UnitZ()))));
    aligned += angle <= 15.0 * std::numbers::pi / 180.0;
    CHECK(std::abs(g.orientation.norm() - 1.0) < 1e-6);
    CHECK(g.width > 0.0);
    CHECK(g.width <= 0.1);
    CHECK(g.confidence >= 0.5);
    CHECK(g.confidence <= 1.0);
  }
  CHECK(aligned >= 180);
  CHECK(sample_antipodal(plate, 200, 0.1, 11) == grasps);
  CHECK(sample_antipodal(plate, 200, 0.1, 12) != grasps);
  CHECK(kind_of([&] { sample_antipodal(plate, 10, 0.01, 1); }) == ErrorKind::NoValidGrasps);
}

TEST_CASE("antipodal width bound holds on every fixture") {
  for (Archetype a : {Archetype::Hammer, Archetype::Mug, Archetype::Knife, Archetype::Dumbbell}) {
    const Fixture fx = make_fixture(a, 3);
    const auto grasps = sample_antipodal(fx.mesh, 100, fx.grasp_width, 5);
    for (const auto& g : grasps) {
      CHECK(g.width <= fx.grasp_width);
      CHECK(std::abs(g.orientation.norm() - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("assigning grasps to parts") {
  const TriMesh mesh = two_triangles();
  const LabelMap labels{{1, 0}, LabelSource::Fused};

  const auto above = assign_parts({at(Vec3(0.5, -0.5, 0.01), 1.0)}, mesh, labels);
  REQUIRE(above.size() == 1);
  CHECK(above[0].face_index == 1);
  CHECK(above[0].part_label == 0);
  CHECK(above[0].distance == doctest::Approx(0.01));

  // On the shared edge both faces are at distance 0.5; the lower index wins.
  const auto tie = assign_parts({at(Vec3(0.0, 0.0, 0.5), 1.0)}, mesh, labels);
  CHECK(tie[0].face_index == 0);
  CHECK(tie[0].part_label == 1);
}

TEST_CASE("assignments match a brute-force scan and survive rigid motion") {
  const Fixture fx = make_fixture(Archetype::Hammer, 7);
  const LabelMap labels{fx.labels.face_label, LabelSource::Fused};
  std::mt19937_64 rng(41);
  const Vec3 lo = fx.mesh.vertices().colwise().minCoeff().transpose();
  const Vec3 hi = fx.mesh.vertices().colwise().maxCoeff().transpose();
  std::vector<GraspCandidate> candidates;
  for (int k = 0; k < 30; ++k) {
    Vec3 p;
    for (int d = 0; d < 3; ++d) p(d) = std::uniform_real_distribution<double>(lo(d) - 0.05, hi(d) + 0.05)(rng);
    candidates.push_back(at(p, 0.5));
  }
  const auto assigned = assign_parts(candidates, fx.mesh, labels);
  CHECK(assign_parts(candidates, fx.mesh, labels, 4) == assigned);
  for (int k = 0; k < 30; ++k) {
    // Faces meeting at the closest vertex or edge tie up to rounding; the lowest index wins.
    std::vector<double> d(fx.mesh.face_count());
    for (int face = 0; face < fx.mesh.face_count(); ++face) {
      const auto [a, b, c] = fx.mesh.corners(face);
      d[face] = testing::brute_distance(candidates[k].position, a, b, c);
    }
    const double best_d = *std::min_element(d.begin(), d.end());
    const double tie = 1e-9 * std::max(fx.mesh.bounding_radius(), best_d);
    const int best = static_cast<int>(std::find_if(d.begin(), d.end(), [&](double x) { return x <= best_d + tie; }) - d.begin());
    CHECK(assigned[k].candidate_index == k);
    CHECK(assigned[k].face_index == best);
    CHECK(assigned[k].part_label == fx.labels.face_label[best]);
    CHECK(std::abs(assigned[k].distance - best_d) < 1e-12);
  }

  const Eigen::Isometry3d motion =
      Eigen::Translation3d(0.3, -2.0, 1.1) * Eigen::AngleAxisd(0.7, Vec3(1, 2, -0.5).normalized());
  const TriMesh moved = transformed(fx.mesh, motion);
  auto moved_candidates = candidates;
  for (auto& g : moved_candidates) g.position = motion * g.position;
  const auto after = assign_parts(moved_candidates, moved, labels);
  for (int k = 0; k < 30; ++k) {
    CHECK(after[k].face_index == assigned[k].face_index);
    CHECK(after[k].part_label == assigned[k].part_label);
    CHECK(after[k].distance == doctest::Approx(assigned[k].distance).epsilon(1e-9));
  }
}

TEST_CASE("selecting grasps on the target part") {
  SUBCASE("fewer on target than top_k") {
    const std::vector<GraspCandidate> c{at(Vec3::Zero(), 0.2), at(Vec3::Zero(), 0.9), at(Vec3::Zero(), 0.5),
                                        at(Vec3::Zero(), 0.95), at(Vec3::Zero(), 0.4)};
    const auto picked = select_grasp_indices(labeled({0, 0, 1, kUnknownLabel, 0}), c, 0, 10);
    CHECK(picked == std::vector<int>{1, 4, 0});
    CHECK(select_grasps(labeled({0, 0, 1, kUnknownLabel, 0}), c, 0, 10).front().confidence == 0.9);
  }
  SUBCASE("nothing on target") {
    const std::vector<GraspCandidate> c{at(Vec3::Zero(), 0.2)};
    CHECK(kind_of([&] { select_grasp_indices(labeled({1}), c, 0, 10); }) == ErrorKind::EmptySelection);
  }
  SUBCASE("top_k of many distinct confidences") {
    std::mt19937_64 rng(42);
    std::vector<GraspCandidate> c;
    std::vector<int> labels;
    for (int k = 0; k < 40; ++k) {
      c.push_back(at(Vec3::Zero(), std::uniform_real_distribution<double>(0, 1)(rng)));
      labels.push_back(k < 15 ? 2 : 0);
    }
    std::shuffle(labels.begin(), labels.end(), rng);
    const auto picked = select_grasp_indices(labeled(labels), c, 2, 10);
    std::vector<int> on_target;
    for (int k = 0; k < 40; ++k) {
      if (labels[k] == 2) on_target.push_back(k);
    }
    std::sort(on_target.begin(), on_target.end(), [&](int a, int b) { return c[a].confidence > c[b].confidence; });
    on_target.resize(10);
    CHECK(picked == on_target);
    for (std::size_t i = 1; i < picked.size(); ++i) CHECK(c[picked[i - 1]].confidence >= c[picked[i]].confidence);
  }
  SUBCASE("ties keep input order") {
    const std::vector<GraspCandidate> c{at(Vec3::Zero(), 0.5), at(Vec3::Zero(), 0.7), at(Vec3::Zero(), 0.5),
                                        at(Vec3::Zero(), 0.5)};
    CHECK(select_grasp_indices(labeled({0, 0, 0, 0}), c, 0, 3) == std::vector<int>{1, 0, 2});
  }
  SUBCASE("top_k must be positive") {
    const std::vector<GraspCandidate> c{at(Vec3::Zero(), 0.5)};
    CHECK(kind_of([&] { select_grasp_indices(labeled({0}), c, 0, 0); }) == ErrorKind::InvalidArgument);
  }
}
