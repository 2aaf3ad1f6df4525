#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "seggrasp/eval.hpp"
#include "seggrasp/pipeline.hpp"

namespace seggrasp {

/// A mesh with ground truth supplied from disk instead of a generated fixture.
struct ExternalCase {
  std::filesystem::path mesh;
  std::filesystem::path labels;
  std::vector<std::string> prompts;
  /// Gripper opening; <= 0 means 0.2 x bounding radius.
  double grasp_width = 0.0;
};

struct ExperimentConfig {
  std::vector<Archetype> archetypes{Archetype::Hammer, Archetype::Mug, Archetype::Knife, Archetype::Dumbbell};
  int fixture_count = 20;
  std::vector<ExternalCase> external;
  std::uint64_t seed = 1;
  NoiseConfig noise;
  std::vector<Variant> variants{Variant::Coarse, Variant::CoarseFusion, Variant::CoarseFineOpt, Variant::Full};
  int view_count = 10;
  int image_size = 512;
  double th_min = 0.01;
  double th_max = 0.25;
  double th_step = 0.01;
  RevNorm rev_norm = RevNorm::Paper;
  IouWeighting weighting = IouWeighting::FaceArea;
  int grasp_count = 200;
  int top_k = 10;
  /// Also compare GeoFusion and GeoSpreading with the finest threshold swept over the ladder.
  bool sweep = false;
  int workers = 0;
};

/// Throws Error{InvalidArgument} for empty case or variant lists and out-of-range values.
void validate_experiment_config(const ExperimentConfig& config);

/// Missing keys keep their defaults. Throws Error{Parse} or Error{InvalidArgument}.
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
/// Every field, including ones left at defaults; the worker count is omitted.
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);

struct VariantResult {
  Variant variant = Variant::Coarse;
  std::vector<double> miou;  // per case
  std::vector<SelectionOutcome> outcomes;
  std::vector<double> pose_variance;  // per case; NaN when nothing was selected
  double miou_mean = 0.0;
  double miou_std = 0.0;
  double part_sel = 0.0;
  double pose_var = 0.0;  // mean over cases with a selection
};

struct SweepPoint {
  double threshold = 0.0;
  double geofusion_miou = 0.0;
  double spreading_miou = 0.0;
  std::vector<double> geofusion_per_case;
  std::vector<double> spreading_per_case;
};

struct ExperimentReport {
  std::vector<VariantResult> variants;
  std::vector<SweepPoint> sweep;
  /// Fine-opt constancy check: finest parts with differing rows or labels, over all cases.
  int fineopt_violations = 0;
  int case_count = 0;
  std::string config_hash;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

nlohmann::json report_to_json(const ExperimentReport& report);
std::string report_table(const ExperimentReport& report);
/// threshold,geofusion,spreading with a header row.
std::string sweep_csv(const ExperimentReport& report);

/// FNV-1a 64 of the canonical config JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace seggrasp
