#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seggrasp/coarse_score.hpp"
#include "seggrasp/decomp.hpp"
#include "seggrasp/detection.hpp"
#include "seggrasp/fusion.hpp"
#include "seggrasp/render.hpp"

namespace seggrasp {

/// Refinement variants, matching the ablation rows plus the spreading baseline.
enum class Variant { Coarse, CoarseFusion, CoarseFineOpt, Full, Spreading };

const char* to_string(Variant variant);
/// Accepts "coarse", "coarse+fusion", "coarse+fineopt", "full", "spreading".
/// Throws Error{InvalidArgument}.
Variant parse_variant(const std::string& name);
LabelSource label_source(Variant variant);

/// Scores after applying `variant` to the coarse matrix.
ScoreMatrix refine_scores(const ScoreMatrix& coarse, const TriMesh& mesh, const ThresholdLadder& ladder,
                          Variant variant, RevNorm norm = RevNorm::Paper);

inline LabelMap segment_labels(const ScoreMatrix& coarse, const TriMesh& mesh, const ThresholdLadder& ladder,
                               Variant variant, RevNorm norm = RevNorm::Paper) {
  return argmax_labels(refine_scores(coarse, mesh, ladder, variant, norm), label_source(variant));
}

/// Intermediate products of the coarse stage for one object.
struct CoarseStage {
  std::vector<Camera> cameras;
  std::vector<FaceIdBuffer> buffers;
  std::vector<Detection> detections;
  ScoreMatrix scores;
};

struct CoarseOptions {
  int view_count = 10;
  ImageSize image;
  std::uint64_t seed = 0;
  int workers = 1;
};

/// Renders the views, runs the mock detector against `truth`, and votes.
CoarseStage run_coarse_mock(const TriMesh& mesh, const GroundTruthLabels& truth, int prompt_count,
                            const NoiseConfig& noise, const CoarseOptions& options);

/// Renders the views and votes with externally supplied detections.
CoarseStage run_coarse_external(const TriMesh& mesh, std::vector<Detection> detections, int prompt_count,
                                const CoarseOptions& options);

}  // namespace seggrasp
