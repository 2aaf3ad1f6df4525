#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seggrasp/detection.hpp"
#include "seggrasp/fusion.hpp"
#include "seggrasp/grasp.hpp"
#include "seggrasp/mesh.hpp"

namespace seggrasp {

// ---- metrics ---------------------------------------------------------------

enum class IouWeighting { FaceCount, FaceArea };

struct SegMetrics {
  /// IoU per label index; labels absent from the ground truth hold 0 and are
  /// excluded from `miou`.
  std::vector<double> per_label_iou;
  double miou = 0.0;
  double unknown_fraction = 0.0;
};

/// Weighted IoU per label. Unknown predictions count as wrong for every label.
SegMetrics miou(const LabelMap& pred, const GroundTruthLabels& truth, std::span<const double> face_weights);
SegMetrics miou(const LabelMap& pred, const GroundTruthLabels& truth, const TriMesh& mesh,
                IouWeighting weighting = IouWeighting::FaceArea);

enum class SelectionOutcome { Correct, Wrong, Empty };

/// Fraction of Correct outcomes; Empty counts as a failure. Throws Error{EmptyInput}.
double part_selection_accuracy(std::span<const SelectionOutcome> outcomes);

/// Sum over the four components of the population variance, after mapping
/// each quaternion to the w >= 0 hemisphere (for w == 0 the first nonzero
/// component is made positive). Throws Error{EmptyInput}.
double quaternion_variance(std::span<const Eigen::Quaterniond> quaternions);
double quaternion_variance(std::span<const GraspCandidate> grasps);

// ---- synthetic fixtures ----------------------------------------------------

enum class Archetype { Hammer, Mug, Knife, Dumbbell };

const char* to_string(Archetype archetype);
/// Throws Error{InvalidArgument} for unknown names.
Archetype parse_archetype(const std::string& name);

/// Objects composed of convex primitives (the mug handle is a bent tube) with
/// per-face ground truth recorded at construction. Prompt 0 is always "handle".
struct Fixture {
  TriMesh mesh;
  GroundTruthLabels labels;
  PromptSet prompts;
  Archetype archetype = Archetype::Hammer;
  std::uint64_t seed = 0;
  /// Gripper opening that fits the handle.
  double grasp_width = 0.0;
};

/// Dimensions are jittered and the object randomly rotated from `seed`.
Fixture make_fixture(Archetype archetype, std::uint64_t seed);

}  // namespace seggrasp
