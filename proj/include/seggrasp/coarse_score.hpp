#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "seggrasp/detection.hpp"
#include "seggrasp/mesh.hpp"
#include "seggrasp/render.hpp"

namespace seggrasp {

/// Confidence-weighted visible-pixel vote:
///
///   S(i, j) = sum over views v of sum over detections d in v with prompt j
///             of V(i, d.bbox) * d.confidence
///
/// where V counts pixels of face i inside the box in view v's face-ID buffer.
/// Each view accumulates into its own partial matrix (detections in list
/// order); partials are then added in ascending view order, so the result
/// is bit-identical for any worker count.
///
/// Throws Error{ViewMismatch} if a detection names a view without a buffer.
ScoreMatrix coarse_scores(int face_count, std::span<const FaceIdBuffer> buffers,
                          std::span<const Detection> detections, int prompt_count, int workers = 1);

inline ScoreMatrix coarse_scores(const TriMesh& mesh, std::span<const FaceIdBuffer> buffers,
                                 std::span<const Detection> detections, int prompt_count, int workers = 1) {
  return coarse_scores(mesh.face_count(), buffers, detections, prompt_count, workers);
}

/// Raw f x m little-endian float64 dump (row-major) plus `<path>.json`
/// sidecar {"f", "m", "prompts"}.
void save_score_matrix(const std::filesystem::path& path, const ScoreMatrix& scores, const PromptSet& prompts);
ScoreMatrix load_score_matrix(const std::filesystem::path& path);

}  // namespace seggrasp
