#include "seggrasp/cli.hpp"

#include <fstream>
#include <ostream>

#include "seggrasp/random.hpp"

namespace seggrasp {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("config key '") + key + "': " + e.what());
  }
}

template <typename Enum>
Enum pick(const std::string& value, const char* key, std::initializer_list<std::pair<const char*, Enum>> options) {
  for (const auto& [name, e] : options) {
    if (value == name) return e;
  }
  throw Error(ErrorKind::InvalidArgument, std::string("invalid value '") + value + "' for " + key);
}

template <typename Enum>
const char* name_of(Enum e, std::initializer_list<std::pair<const char*, Enum>> options) {
  for (const auto& [name, v] : options) {
    if (v == e) return name;
  }
  return "";
}

const std::initializer_list<std::pair<const char*, RevNorm>> kNorms{{"paper", RevNorm::Paper}, {"mean", RevNorm::Mean}};
const std::initializer_list<std::pair<const char*, Policy>> kPolicies{{"geofusion", Policy::GeoFusion},
                                                                      {"spreading", Policy::Spreading}};
const std::initializer_list<std::pair<const char*, DetectionSource>> kDetections{{"mock", DetectionSource::Mock},
                                                                                 {"file", DetectionSource::File}};
const std::initializer_list<std::pair<const char*, DecompositionSource>> kDecomps{
    {"builtin", DecompositionSource::Builtin}, {"directory", DecompositionSource::Directory}};
const std::initializer_list<std::pair<const char*, GraspSource>> kGrasps{{"antipodal", GraspSource::Antipodal},
                                                                         {"file", GraspSource::File}};

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "file not found: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Parse, "cannot write " + path.string());
  out << text;
}

std::string view_png_name(int view) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "view_%02d.png", view);
  return buf;
}

}  // namespace

PipelineConfig pipeline_config_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::Parse, "pipeline config must be a JSON object");
  PipelineConfig c;
  c.mesh_path = get_or<std::string>(doc, "mesh_path", "");
  c.prompts = get_or(doc, "prompts", c.prompts);
  c.view_count = get_or(doc, "view_count", c.view_count);
  c.image_size = get_or(doc, "image_size", c.image_size);
  c.th_min = get_or(doc, "th_min", c.th_min);
  c.th_max = get_or(doc, "th_max", c.th_max);
  c.th_step = get_or(doc, "th_step", c.th_step);
  c.rev_norm = pick(get_or<std::string>(doc, "rev_norm", "paper"), "rev_norm", kNorms);
  c.policy = pick(get_or<std::string>(doc, "policy", "geofusion"), "policy", kPolicies);
  c.detection_source = pick(get_or<std::string>(doc, "detection_source", "mock"), "detection_source", kDetections);
  c.detections_path = get_or<std::string>(doc, "detections_path", "");
  c.truth_path = get_or<std::string>(doc, "truth_path", "");
  if (doc.contains("noise")) {
    const json& n = doc.at("noise");
    c.noise.jitter_frac = get_or(n, "jitter_frac", c.noise.jitter_frac);
    c.noise.conf_noise = get_or(n, "conf_noise", c.noise.conf_noise);
    c.noise.drop_prob = get_or(n, "drop_prob", c.noise.drop_prob);
    c.noise.spurious_rate = get_or(n, "spurious_rate", c.noise.spurious_rate);
    c.noise.min_pixels = get_or(n, "min_pixels", c.noise.min_pixels);
  }
  c.decomposition_source =
      pick(get_or<std::string>(doc, "decomposition_source", "builtin"), "decomposition_source", kDecomps);
  c.decomposition_dir = get_or<std::string>(doc, "decomposition_dir", "");
  c.grasp_source = pick(get_or<std::string>(doc, "grasp_source", "antipodal"), "grasp_source", kGrasps);
  c.grasps_path = get_or<std::string>(doc, "grasps_path", "");
  c.grasp_count = get_or(doc, "grasp_count", c.grasp_count);
  c.max_width = get_or(doc, "max_width", c.max_width);
  c.segment_labels_path = get_or<std::string>(doc, "segment_labels_path", "");
  c.target_prompt = get_or(doc, "target_prompt", c.target_prompt);
  c.top_k = get_or(doc, "top_k", c.top_k);
  c.seed = get_or(doc, "seed", c.seed);
  c.workers = get_or(doc, "workers", c.workers);
  c.output_dir = get_or<std::string>(doc, "output_dir", c.output_dir.string());
  c.debug = get_or(doc, "debug", c.debug);
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) { return pipeline_config_from_json(read_json(path)); }

json pipeline_config_to_json(const PipelineConfig& c) {
  return {{"mesh_path", c.mesh_path.string()},
          {"prompts", c.prompts},
          {"view_count", c.view_count},
          {"image_size", c.image_size},
          {"th_min", c.th_min},
          {"th_max", c.th_max},
          {"th_step", c.th_step},
          {"rev_norm", name_of(c.rev_norm, kNorms)},
          {"policy", name_of(c.policy, kPolicies)},
          {"detection_source", name_of(c.detection_source, kDetections)},
          {"detections_path", c.detections_path.string()},
          {"truth_path", c.truth_path.string()},
          {"noise",
           {{"jitter_frac", c.noise.jitter_frac},
            {"conf_noise", c.noise.conf_noise},
            {"drop_prob", c.noise.drop_prob},
            {"spurious_rate", c.noise.spurious_rate},
            {"min_pixels", c.noise.min_pixels}}},
          {"decomposition_source", name_of(c.decomposition_source, kDecomps)},
          {"decomposition_dir", c.decomposition_dir.string()},
          {"grasp_source", name_of(c.grasp_source, kGrasps)},
          {"grasps_path", c.grasps_path.string()},
          {"grasp_count", c.grasp_count},
          {"max_width", c.max_width},
          {"segment_labels_path", c.segment_labels_path.string()},
          {"target_prompt", c.target_prompt},
          {"top_k", c.top_k},
          {"seed", c.seed},
          {"workers", c.workers},
          {"output_dir", c.output_dir.string()},
          {"debug", c.debug}};
}

SegmentResult run_segment(const PipelineConfig& config, const TriMesh& mesh) {
  mesh.require_non_degenerate();
  SegmentResult result;
  result.prompts = PromptSet(config.prompts);
  const int m = result.prompts.size();

  CoarseOptions options;
  options.view_count = config.view_count;
  options.image = ImageSize{config.image_size, config.image_size};
  options.seed = config.seed;
  options.workers = config.workers;

  CoarseStage stage;
  if (config.detection_source == DetectionSource::Mock) {
    if (config.truth_path.empty()) {
      throw Error(ErrorKind::InvalidArgument, "mock detection needs truth_path (ground-truth labels)");
    }
    stage = run_coarse_mock(mesh, load_labels(config.truth_path), m, config.noise, options);
  } else {
    DetectionSet set = load_detections(config.detections_path, result.prompts, options.image);
    stage = run_coarse_external(mesh, std::move(set.detections), m, options);
  }
  result.coarse = stage.scores;

  if (config.decomposition_source == DecompositionSource::Builtin) {
    result.ladder = build_ladder(mesh, config.th_min, config.th_max, config.th_step, BuiltinSource{});
  } else {
    result.ladder =
        build_ladder(mesh, config.th_min, config.th_max, config.th_step, DirectorySource{config.decomposition_dir});
  }

  const Variant variant = config.policy == Policy::GeoFusion ? Variant::Full : Variant::Spreading;
  result.labels = segment_labels(result.coarse, mesh, result.ladder, variant, config.rev_norm);

  if (config.debug) {
    const fs::path dir = config.output_dir;
    fs::create_directories(dir / "views");
    fs::create_directories(dir / "decomp");
    save_detections(dir / "detections.json", stage.detections, result.prompts, options.image);
    save_score_matrix(dir / "scores.bin", result.coarse, result.prompts);
    for (int k = 0; k < result.ladder.size(); ++k) {
      save_decomposition(dir / "decomp" / ladder_file_name(result.ladder.thresholds[k]),
                         result.ladder.decompositions[k]);
    }
    for (const auto& buffer : stage.buffers) {
      write_face_id_png(buffer, dir / "views" / view_png_name(buffer.view_index));
    }
  }
  return result;
}

SegmentResult cmd_segment(const PipelineConfig& config) {
  const TriMesh mesh = load_mesh(config.mesh_path);
  SegmentResult result = run_segment(config, mesh);
  fs::create_directories(config.output_dir);
  save_label_map(config.output_dir / "labels.json", result.labels, result.prompts);
  save_colored_ply(mesh, label_colors(result.labels), config.output_dir / "segmented.ply");
  return result;
}

std::vector<GraspCandidate> cmd_grasp(const PipelineConfig& config) {
  const TriMesh mesh = load_mesh(config.mesh_path);
  if (config.target_prompt.empty()) throw Error(ErrorKind::InvalidArgument, "target_prompt is required");
  if (config.top_k < 1) throw Error(ErrorKind::InvalidArgument, "top_k must be >= 1");

  LabelMap labels;
  PromptSet prompts;
  if (!config.segment_labels_path.empty()) {
    std::vector<std::string> stored;
    labels = load_label_map(config.segment_labels_path, &stored);
    if (!config.prompts.empty() && config.prompts != stored) {
      throw Error(ErrorKind::InvalidArgument, "label file prompts differ from the configured prompts");
    }
    prompts = PromptSet(stored);
    if (static_cast<int>(labels.label.size()) != mesh.face_count()) {
      throw Error(ErrorKind::LengthMismatch, "label file does not match the mesh face count");
    }
  } else {
    SegmentResult seg = run_segment(config, mesh);
    labels = std::move(seg.labels);
    prompts = std::move(seg.prompts);
  }
  const int target = prompts.index_of(config.target_prompt);

  std::vector<GraspCandidate> candidates;
  if (config.grasp_source == GraspSource::File) {
    candidates = load_grasps(config.grasps_path);
  } else {
    const double width = config.max_width > 0.0 ? config.max_width : 0.2 * mesh.bounding_radius();
    candidates = sample_antipodal(mesh, config.grasp_count, width, derive_seed(config.seed, 3));
  }
  const std::vector<PartAssignment> assignments = assign_parts(candidates, mesh, labels, config.workers);
  std::vector<GraspCandidate> selected = select_grasps(assignments, candidates, target, config.top_k);
  fs::create_directories(config.output_dir);
  save_grasps(config.output_dir / "grasps.json", selected);
  return selected;
}

ExperimentReport cmd_eval(const ExperimentConfig& config, const fs::path& output_dir, std::ostream& out) {
  ExperimentReport report = run_experiment(config);
  write_text(output_dir / "report.json", report_to_json(report).dump(2) + "\n");
  if (config.sweep) write_text(output_dir / "sweep.csv", sweep_csv(report));
  out << report_table(report);
  return report;
}

std::vector<Decomposition> cmd_decompose(const fs::path& mesh_path, double th_min, double th_max, double step,
                                         const fs::path& output_dir) {
  const TriMesh mesh = load_mesh(mesh_path);
  const std::vector<double> values = threshold_values(th_min, th_max, step);
  std::vector<Decomposition> decomps = decompose_thresholds(mesh, values);
  fs::create_directories(output_dir);
  for (const auto& d : decomps) save_decomposition(output_dir / ladder_file_name(d.threshold), d);
  return decomps;
}

void cmd_render_debug(const fs::path& mesh_path, int view_count, int image_size, std::uint64_t seed,
                      const fs::path& output_dir) {
  const TriMesh mesh = load_mesh(mesh_path);
  const ImageSize image{image_size, image_size};
  // Same camera seed derivation as the segment pipeline.
  const auto cameras = make_view_sphere(view_count, mesh, derive_seed(seed, 1), image);
  fs::create_directories(output_dir);
  for (const auto& buffer : render_views(mesh, cameras, 0)) {
    write_face_id_png(buffer, output_dir / view_png_name(buffer.view_index));
  }
}

Fixture cmd_fixture(Archetype archetype, std::uint64_t seed, const fs::path& output_dir) {
  Fixture fx = make_fixture(archetype, seed);
  fs::create_directories(output_dir);
  save_obj(fx.mesh, output_dir / "mesh.obj");
  save_labels(output_dir / "labels.json", fx.labels);
  PipelineConfig config;
  config.mesh_path = output_dir / "mesh.obj";
  config.prompts = fx.prompts.prompts();
  config.truth_path = output_dir / "labels.json";
  config.target_prompt = fx.prompts[0];
  config.max_width = fx.grasp_width;
  config.seed = seed;
  config.output_dir = output_dir / "out";
  write_text(output_dir / "config.json", pipeline_config_to_json(config).dump(2) + "\n");
  return fx;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return 1;
    case ErrorKind::EmptySelection:
    case ErrorKind::NoValidGrasps:
    case ErrorKind::EmptyInput: return 3;
    default: return 2;
  }
}

}  // namespace seggrasp
