#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seggrasp/cli.hpp"

using namespace seggrasp;

namespace {

// Options shared by `segment` and `grasp`; anything given on the command line
// replaces the config file value.
struct PipelineFlags {
  std::string config;
  std::string mesh, truth, detections, decomp_dir, policy, rev_norm, out;
  std::string target, grasps, segment_labels;
  std::vector<std::string> prompts;
  int views = 0, image_size = 0, workers = 0, top_k = 0, grasp_count = 0;
  double max_width = 0.0;
  std::uint64_t seed = 0;
  bool debug = false;
  CLI::App* app = nullptr;

  void attach(CLI::App* sub, bool grasp_options) {
    app = sub;
    sub->add_option("-c,--config", config, "pipeline config (JSON)");
    sub->add_option("--mesh", mesh, "mesh file (.obj or .ply)");
    sub->add_option("--prompts", prompts, "prompt list")->delimiter(',');
    sub->add_option("--truth", truth, "ground-truth labels driving the mock detector");
    sub->add_option("--detections", detections, "detection file (switches to file detections)");
    sub->add_option("--decomp-dir", decomp_dir, "directory of th_<value>.json decompositions");
    sub->add_option("--policy", policy, "geofusion or spreading");
    sub->add_option("--rev-norm", rev_norm, "paper or mean");
    sub->add_option("--views", views, "number of views");
    sub->add_option("--image-size", image_size, "square image side in pixels");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("-j,--workers", workers, "worker threads (0 = all cores)");
    sub->add_option("-o,--out", out, "output directory");
    sub->add_flag("--debug", debug, "write intermediate dumps");
    if (grasp_options) {
      sub->add_option("--target", target, "prompt to grasp");
      sub->add_option("--top-k", top_k, "number of grasps to keep");
      sub->add_option("--grasps", grasps, "grasp candidate file (switches to file grasps)");
      sub->add_option("--grasp-count", grasp_count, "antipodal candidates to sample");
      sub->add_option("--max-width", max_width, "gripper opening for the antipodal sampler");
      sub->add_option("--segment-labels", segment_labels, "labels.json written by segment");
    }
  }

  bool given(const char* name) const { return app->count(name) > 0; }

  PipelineConfig resolve() const {
    PipelineConfig c = config.empty() ? PipelineConfig{} : load_pipeline_config(config);
    nlohmann::json doc = pipeline_config_to_json(c);
    if (given("--mesh")) doc["mesh_path"] = mesh;
    if (given("--prompts")) doc["prompts"] = prompts;
    if (given("--truth")) doc["truth_path"] = truth;
    if (given("--detections")) {
      doc["detections_path"] = detections;
      doc["detection_source"] = "file";
    }
    if (given("--decomp-dir")) {
      doc["decomposition_dir"] = decomp_dir;
      doc["decomposition_source"] = "directory";
    }
    if (given("--policy")) doc["policy"] = policy;
    if (given("--rev-norm")) doc["rev_norm"] = rev_norm;
    if (given("--views")) doc["view_count"] = views;
    if (given("--image-size")) doc["image_size"] = image_size;
    if (given("--seed")) doc["seed"] = seed;
    if (given("--workers")) doc["workers"] = workers;
    if (given("--out")) doc["output_dir"] = out;
    if (given("--debug")) doc["debug"] = debug;
    if (app->get_option_no_throw("--target") != nullptr) {
      if (given("--target")) doc["target_prompt"] = target;
      if (given("--top-k")) doc["top_k"] = top_k;
      if (given("--grasps")) {
        doc["grasps_path"] = grasps;
        doc["grasp_source"] = "file";
      }
      if (given("--grasp-count")) doc["grasp_count"] = grasp_count;
      if (given("--max-width")) doc["max_width"] = max_width;
      if (given("--segment-labels")) doc["segment_labels_path"] = segment_labels;
    }
    return pipeline_config_from_json(doc);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mesh part segmentation and part-aware grasp selection"};
  app.require_subcommand(1);

  PipelineFlags segment_flags;
  auto* segment = app.add_subcommand("segment", "label every face with a prompt");
  segment_flags.attach(segment, false);

  PipelineFlags grasp_flags;
  auto* grasp = app.add_subcommand("grasp", "select grasps on the target part");
  grasp_flags.attach(grasp, true);

  std::string eval_config, eval_out = "eval_out";
  std::vector<std::string> eval_variants;
  int eval_workers = 0, eval_fixtures = -1;
  std::uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("eval", "run an experiment over synthetic fixtures");
  eval->add_option("-c,--config", eval_config, "experiment config (JSON)");
  eval->add_option("-o,--out", eval_out, "output directory");
  eval->add_option("--variants", eval_variants, "variant list")->delimiter(',');
  eval->add_option("--fixtures", eval_fixtures, "number of generated fixtures");
  eval->add_option("--seed", eval_seed, "experiment seed");
  eval->add_option("-j,--workers", eval_workers, "worker threads (0 = all cores)");

  std::string dec_mesh, dec_out = "decomp";
  double th_min = 0.01, th_max = 0.25, th_step = 0.01;
  auto* decompose = app.add_subcommand("decompose", "write one decomposition per threshold");
  decompose->add_option("--mesh", dec_mesh, "mesh file")->required();
  decompose->add_option("--th-min", th_min, "smallest threshold");
  decompose->add_option("--th-max", th_max, "largest threshold");
  decompose->add_option("--step", th_step, "threshold step");
  decompose->add_option("-o,--out", dec_out, "output directory");

  std::string rd_mesh, rd_out = "views";
  int rd_views = 10, rd_size = 512;
  std::uint64_t rd_seed = 0;
  auto* render = app.add_subcommand("render-debug", "write face-ID images of the view sphere");
  render->add_option("--mesh", rd_mesh, "mesh file")->required();
  render->add_option("--views", rd_views, "number of views");
  render->add_option("--image-size", rd_size, "square image side in pixels");
  render->add_option("--seed", rd_seed, "random seed (matches segment)");
  render->add_option("-o,--out", rd_out, "output directory");

  std::string fx_archetype = "hammer", fx_out = "fixture";
  std::uint64_t fx_seed = 0;
  auto* fixture = app.add_subcommand("fixture", "write a synthetic object with ground truth");
  fixture->add_option("--archetype", fx_archetype, "hammer, mug, knife or dumbbell");
  fixture->add_option("--seed", fx_seed, "random seed");
  fixture->add_option("-o,--out", fx_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (segment->parsed()) {
      const PipelineConfig config = segment_flags.resolve();
      const SegmentResult result = cmd_segment(config);
      std::cout << "labels: " << (config.output_dir / "labels.json").string() << " (" << result.labels.label.size()
                << " faces, " << result.ladder.size() << " ladder levels)\n";
    } else if (grasp->parsed()) {
      const PipelineConfig config = grasp_flags.resolve();
      const auto selected = cmd_grasp(config);
      std::cout << "grasps: " << (config.output_dir / "grasps.json").string() << " (" << selected.size()
                << " selected)\n";
    } else if (eval->parsed()) {
      ExperimentConfig config = eval_config.empty() ? ExperimentConfig{} : load_experiment_config(eval_config);
      nlohmann::json doc = experiment_config_to_json(config);
      if (eval->count("--variants") > 0) doc["variants"] = eval_variants;
      if (eval->count("--fixtures") > 0) doc["fixture_count"] = eval_fixtures;
      if (eval->count("--seed") > 0) doc["seed"] = eval_seed;
      config = experiment_config_from_json(doc);
      config.workers = eval_workers;
      cmd_eval(config, eval_out, std::cout);
    } else if (decompose->parsed()) {
      const auto decomps = cmd_decompose(dec_mesh, th_min, th_max, th_step, dec_out);
      for (const auto& d : decomps) {
        std::cout << d.threshold << ": " << d.part_count << " parts" << (d.depth_limited ? " (depth limited)" : "")
                  << "\n";
      }
    } else if (render->parsed()) {
      cmd_render_debug(rd_mesh, rd_views, rd_size, rd_seed, rd_out);
    } else if (fixture->parsed()) {
      cmd_fixture(parse_archetype(fx_archetype), fx_seed, fx_out);
      std::cout << "wrote " << fx_out << "/mesh.obj, labels.json, config.json\n";
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "ParseError: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
