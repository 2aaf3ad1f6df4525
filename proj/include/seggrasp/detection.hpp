#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seggrasp/render.hpp"

namespace seggrasp {

/// Ordered, duplicate-free list of text prompts; prompt j is column j of S.
class PromptSet {
 public:
  PromptSet() = default;
  explicit PromptSet(std::vector<std::string> prompts);

  int size() const { return static_cast<int>(prompts_.size()); }
  const std::string& operator[](int j) const { return prompts_[j]; }
  const std::vector<std::string>& prompts() const { return prompts_; }

  std::optional<int> find(const std::string& name) const;
  /// Throws Error{UnknownPrompt}.
  int index_of(const std::string& name) const;

 private:
  std::vector<std::string> prompts_;
};

struct Detection {
  int view_index = 0;
  int prompt_index = 0;
  PixelRect bbox;
  double confidence = 0.0;
  bool operator==(const Detection&) const = default;
};

struct GroundTruthLabels {
  std::vector<int> face_label;
  /// Throws Error{LengthMismatch} or Error{IndexOutOfRange}.
  void validate(int face_count, int prompt_count) const;
};

struct NoiseConfig {
  double jitter_frac = 0.0;
  double conf_noise = 0.0;
  double drop_prob = 0.0;
  double spurious_rate = 0.0;  // expected spurious detections per view (Poisson)
  int min_pixels = 20;
  bool operator==(const NoiseConfig&) const = default;
};

struct DetectionSet {
  std::vector<Detection> detections;
  int dropped = 0;  // records with empty boxes after clipping
};

/// Parses the detection schema. Fractional box coordinates expand outward
/// (floor min, ceil max) before clipping to `image`; empty boxes are dropped.
DetectionSet detections_from_json(const nlohmann::json& doc, const PromptSet& prompts, ImageSize image);
DetectionSet load_detections(const std::filesystem::path& path, const PromptSet& prompts, ImageSize image);

nlohmann::json detections_to_json(const std::vector<Detection>& detections, const PromptSet& prompts, ImageSize image);
void save_detections(const std::filesystem::path& path, const std::vector<Detection>& detections,
                     const PromptSet& prompts, ImageSize image);

GroundTruthLabels load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const GroundTruthLabels& labels);

/// Synthetic detector over one face-ID buffer: one tight box per visible
/// ground-truth prompt, then jitter / confidence noise / drops / spurious boxes.
std::vector<Detection> mock_detect(const FaceIdBuffer& buffer, const GroundTruthLabels& labels, int prompt_count,
                                   const NoiseConfig& noise, std::uint64_t seed);

/// mock_detect over every buffer with a per-view derived seed; output sorted
/// by (view_index, prompt_index), stable within equal keys.
std::vector<Detection> mock_detect_views(const std::vector<FaceIdBuffer>& buffers, const GroundTruthLabels& labels,
                                         int prompt_count, const NoiseConfig& noise, std::uint64_t seed,
                                         int workers = 1);

}  // namespace seggrasp
