#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "helpers.hpp"
#include "seggrasp/detection.hpp"
#include "seggrasp/fusion.hpp"
#include "seggrasp/grasp.hpp"

using namespace seggrasp;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string output;
};

/// Runs the CLI inside `dir`, capturing stdout and stderr together.
Run run(const testing::TempDir& dir, const std::string& args) {
  const std::string log = (dir / "cli.log").string();
  const std::string cmd = "cd '" + dir.path().string() + "' && '" SEGGRASP_BIN "' " + args + " > '" + log + "' 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = testing::read_file(log);
  return r;
}

json read_json(const std::filesystem::path& path) { return json::parse(testing::read_file(path)); }

const std::string kSource = SEGGRASP_SOURCE_DIR;

/// Smaller renders keep the suite quick; zero-noise recovery still holds at this size.
const std::string kFast = " --image-size 384 -j 1";

}  // namespace

TEST_CASE("zero-noise segment reproduces the fixture labels") {
  testing::TempDir dir("cli");
  REQUIRE(run(dir, "fixture --archetype hammer --seed 7 -o fx").code == 0);
  const Run seg = run(dir, "segment -c fx/config.json -o seg" + kFast);
  REQUIRE_MESSAGE(seg.code == 0, seg.output);
  const json labels = read_json(dir / "seg/labels.json");
  CHECK(labels["labels"].get<std::vector<int>>() == load_labels(dir / "fx/labels.json").face_label);
  CHECK(labels["source"] == "fused");
  CHECK(labels["prompts"] == json::array({"handle", "head"}));
  CHECK(std::filesystem::exists(dir / "seg/segmented.ply"));
}

TEST_CASE("missing mesh is a parse error") {
  testing::TempDir dir("cli");
  const Run r = run(dir, "segment --mesh nope.obj --prompts handle,head --truth nope.json -o seg");
  CHECK(r.code == 1);
  CHECK(r.output.find("ParseError") != std::string::npos);
}

TEST_CASE("spreading policy and debug dumps") {
  testing::TempDir dir("cli");
  REQUIRE(run(dir, "fixture --archetype knife --seed 2 -o fx").code == 0);
  const Run r = run(dir, "segment -c fx/config.json -o seg --policy spreading --debug --views 4" + kFast);
  REQUIRE_MESSAGE(r.code == 0, r.output);
  CHECK(read_json(dir / "seg/labels.json")["source"] == "spread");
  CHECK(std::filesystem::exists(dir / "seg/detections.json"));
  CHECK(std::filesystem::exists(dir / "seg/scores.bin"));
  CHECK(std::filesystem::exists(dir / "seg/views/view_03.png"));
  CHECK(std::filesystem::exists(dir / "seg/decomp"));
  CHECK(run(dir, "segment -c fx/config.json -o seg --policy wander").code == 2);
}

TEST_CASE("grasp selection on the handle") {
  testing::TempDir dir("cli");
  REQUIRE(run(dir, "fixture --archetype hammer --seed 7 -o fx").code == 0);
  const Run r = run(dir, "grasp -c fx/config.json -o g --target handle" + kFast);
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const auto grasps = load_grasps(dir / "g/grasps.json");
  REQUIRE_FALSE(grasps.empty());
  CHECK(grasps.size() <= 10);
  for (std::size_t k = 1; k < grasps.size(); ++k) CHECK(grasps[k - 1].confidence >= grasps[k].confidence);

  // The top grasp sits on a handle face of the original fixture.
  const TriMesh mesh = load_mesh(dir / "fx/mesh.obj");
  const auto truth = load_labels(dir / "fx/labels.json");
  CHECK(truth.face_label[nearest_face(mesh, grasps[0].position).face_index] == 0);

  const Run one = run(dir, "grasp -c fx/config.json -o g1 --top-k 1" + kFast);
  REQUIRE(one.code == 0);
  const auto top = load_grasps(dir / "g1/grasps.json");
  REQUIRE(top.size() == 1);
  CHECK(top[0] == grasps[0]);

  const Run absent = run(dir, "grasp -c fx/config.json -o g2 --target spout" + kFast);
  CHECK(absent.code == 2);
}

TEST_CASE("segment then grasp equals the one-shot run") {
  testing::TempDir dir("cli");
  REQUIRE(run(dir, "fixture --archetype mug --seed 3 -o fx").code == 0);
  REQUIRE(run(dir, "segment -c fx/config.json -o seg" + kFast).code == 0);
  REQUIRE(run(dir, "grasp -c fx/config.json -o composed --segment-labels seg/labels.json" + kFast).code == 0);
  REQUIRE(run(dir, "grasp -c fx/config.json -o oneshot" + kFast).code == 0);
  CHECK(testing::read_file(dir / "composed/grasps.json") == testing::read_file(dir / "oneshot/grasps.json"));
}

TEST_CASE("empty selection exits with 3") {
  testing::TempDir dir("cli");
  REQUIRE(run(dir, "fixture --archetype hammer --seed 7 -o fx").code == 0);
  // A single candidate at the centroid of a head face.
  const TriMesh mesh = load_mesh(dir / "fx/mesh.obj");
  const auto truth = load_labels(dir / "fx/labels.json");
  int head = 0;
  while (truth.face_label[head] != 1) ++head;
  GraspCandidate g;
  const auto [a, b, c] = mesh.corners(head);
  g.position = (a + b + c) / 3.0;
  g.width = 0.05;
  g.confidence = 0.9;
  save_grasps(dir / "one.json", {g});
  const Run r = run(dir, "grasp -c fx/config.json -o g --grasps one.json" + kFast);
  CHECK(r.code == 3);
  CHECK(r.output.find("EmptySelection") != std::string::npos);
}

TEST_CASE("bundled experiment configs") {
  testing::TempDir dir("cli");
  const Run ab = run(dir, "eval -c '" + kSource + "/configs/ablation.json' -o ab --fixtures 4");
  REQUIRE_MESSAGE(ab.code == 0, ab.output);
  const json report = read_json(dir / "ab/report.json");
  REQUIRE(report["variants"].size() == 4);
  CHECK(report["variants"][0]["name"] == "coarse");
  CHECK(report["variants"][3]["name"] == "full");
  for (const auto& row : report["variants"]) {
    for (const char* key : {"miou_mean", "miou_std", "part_sel", "pose_var"}) CHECK(row.contains(key));
  }
  CHECK(ab.output.find("coarse+fusion") != std::string::npos);

  const Run sw = run(dir, "eval -c '" + kSource + "/configs/sweep.json' -o sw --fixtures 2");
  REQUIRE_MESSAGE(sw.code == 0, sw.output);
  const std::string csv = testing::read_file(dir / "sw/sweep.csv");
  CHECK(csv.rfind("threshold,geofusion,spreading\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 26);

  CHECK(run(dir, "eval -c '" + kSource + "/configs/ablation.json' -o bad --variants full,magic").code == 2);
}

TEST_CASE("identical runs write identical bytes") {
  testing::TempDir dir("cli");
  REQUIRE(run(dir, "fixture --archetype mug --seed 5 -o fx").code == 0);
  const std::string noisy = " --seed 9 -j 2";
  json cfg = read_json(dir / "fx/config.json");
  cfg["noise"]["jitter_frac"] = 0.15;
  cfg["noise"]["drop_prob"] = 0.2;
  cfg["noise"]["spurious_rate"] = 0.5;
  testing::write_file(dir / "noisy.json", cfg.dump());
  REQUIRE(run(dir, "grasp -c noisy.json -o a --image-size 256" + noisy).code == 0);
  REQUIRE(run(dir, "grasp -c noisy.json -o b --image-size 256 --seed 9 -j 1").code == 0);
  CHECK(testing::read_file(dir / "a/grasps.json") == testing::read_file(dir / "b/grasps.json"));
  REQUIRE(run(dir, "segment -c noisy.json -o c --image-size 256" + noisy).code == 0);
  REQUIRE(run(dir, "segment -c noisy.json -o d --image-size 256" + noisy).code == 0);
  CHECK(testing::read_file(dir / "c/labels.json") == testing::read_file(dir / "d/labels.json"));
  CHECK(testing::read_file(dir / "c/segmented.ply") == testing::read_file(dir / "d/segmented.ply"));
}

TEST_CASE("decompose and render-debug") {
  testing::TempDir dir("cli");
  REQUIRE(run(dir, "fixture --archetype mug --seed 1 -o fx").code == 0);
  const Run d = run(dir, "decompose --mesh fx/mesh.obj -o dec");
  REQUIRE_MESSAGE(d.code == 0, d.output);
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "dec")) files += entry.path().extension() == ".json";
  CHECK(files == 25);
  CHECK(std::filesystem::exists(dir / "dec/th_0.01.json"));

  // Imported decompositions give the same labels as the builtin decomposer.
  REQUIRE(run(dir, "segment -c fx/config.json -o builtin" + kFast).code == 0);
  REQUIRE(run(dir, "segment -c fx/config.json -o imported --decomp-dir dec" + kFast).code == 0);
  CHECK(testing::read_file(dir / "builtin/labels.json") == testing::read_file(dir / "imported/labels.json"));

  const Run r = run(dir, "render-debug --mesh fx/mesh.obj --views 3 --image-size 64 -o views");
  REQUIRE_MESSAGE(r.code == 0, r.output);
  CHECK(std::filesystem::exists(dir / "views/view_00.png"));
  CHECK(std::filesystem::exists(dir / "views/view_02.png"));
  CHECK_FALSE(std::filesystem::exists(dir / "views/view_03.png"));
}
