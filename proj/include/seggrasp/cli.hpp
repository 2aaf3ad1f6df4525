#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seggrasp/error.hpp"
#include "seggrasp/experiment.hpp"
#include "seggrasp/grasp.hpp"
#include "seggrasp/pipeline.hpp"

namespace seggrasp {

enum class DetectionSource { Mock, File };
enum class DecompositionSource { Builtin, Directory };
enum class GraspSource { Antipodal, File };
enum class Policy { GeoFusion, Spreading };

struct PipelineConfig {
  std::filesystem::path mesh_path;
  std::vector<std::string> prompts;
  int view_count = 10;
  int image_size = 512;
  double th_min = 0.01;
  double th_max = 0.25;
  double th_step = 0.01;
  RevNorm rev_norm = RevNorm::Paper;
  Policy policy = Policy::GeoFusion;

  DetectionSource detection_source = DetectionSource::Mock;
  std::filesystem::path detections_path;  // detection_source == File
  std::filesystem::path truth_path;       // ground-truth labels driving the mock detector
  NoiseConfig noise;

  DecompositionSource decomposition_source = DecompositionSource::Builtin;
  std::filesystem::path decomposition_dir;

  GraspSource grasp_source = GraspSource::Antipodal;
  std::filesystem::path grasps_path;  // grasp_source == File
  int grasp_count = 200;
  double max_width = 0.0;  // <= 0: 0.2 x bounding radius
  /// Reuse labels written by `segment` instead of segmenting again.
  std::filesystem::path segment_labels_path;
  std::string target_prompt;
  int top_k = 10;

  std::uint64_t seed = 0;
  int workers = 0;
  std::filesystem::path output_dir = "out";
  bool debug = false;
};

/// Missing keys keep their defaults. Throws Error{Parse} or Error{InvalidArgument}.
PipelineConfig pipeline_config_from_json(const nlohmann::json& doc);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
nlohmann::json pipeline_config_to_json(const PipelineConfig& config);

struct SegmentResult {
  LabelMap labels;
  PromptSet prompts;
  ScoreMatrix coarse;
  ThresholdLadder ladder;
};

/// render -> detect -> score -> ladder -> refine -> argmax, in memory.
SegmentResult run_segment(const PipelineConfig& config, const TriMesh& mesh);

/// Writes labels.json and segmented.ply to output_dir; with debug also
/// detections.json, scores.bin (+ .json sidecar), decomp/ and views/*.png.
SegmentResult cmd_segment(const PipelineConfig& config);

/// Writes grasps.json (selected grasps, best first). Throws Error{EmptySelection}.
std::vector<GraspCandidate> cmd_grasp(const PipelineConfig& config);

/// Writes report.json (and sweep.csv when sweeping) to `output_dir`; prints the table.
ExperimentReport cmd_eval(const ExperimentConfig& config, const std::filesystem::path& output_dir, std::ostream& out);

/// One th_<value>.json per threshold (no dedup), usable as a decomposition directory.
std::vector<Decomposition> cmd_decompose(const std::filesystem::path& mesh_path, double th_min, double th_max,
                                         double step, const std::filesystem::path& output_dir);

/// Face-ID PNGs of the view sphere.
void cmd_render_debug(const std::filesystem::path& mesh_path, int view_count, int image_size, std::uint64_t seed,
                      const std::filesystem::path& output_dir);

/// Writes mesh.obj, labels.json and a segment config for a synthetic fixture.
Fixture cmd_fixture(Archetype archetype, std::uint64_t seed, const std::filesystem::path& output_dir);

/// 1 parse / missing file, 2 validation, 3 empty result.
int exit_code(ErrorKind kind);

}  // namespace seggrasp
