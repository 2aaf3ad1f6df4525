#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Geometry>
#include <json.hpp>

#include "seggrasp/fusion.hpp"
#include "seggrasp/mesh.hpp"

namespace seggrasp {

/// 6-DoF grasp. `position` is the grasp point used for part lookup; the
/// gripper closes along the local x axis of `orientation`.
struct GraspCandidate {
  Vec3 position = Vec3::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
  double width = 0.0;
  double confidence = 0.0;

  Vec3 closing_axis() const { return orientation * Vec3::UnitX(); }
  bool operator==(const GraspCandidate& o) const {
    return position == o.position && orientation.coeffs() == o.orientation.coeffs() && width == o.width &&
           confidence == o.confidence;
  }
};

struct PartAssignment {
  int candidate_index = 0;
  int face_index = -1;
  int part_label = kUnknownLabel;
  double distance = 0.0;
  bool operator==(const PartAssignment&) const = default;
};

/// Quaternions within `quaternion_tolerance` of unit norm are renormalized;
/// others raise Error{BadQuaternion}.
std::vector<GraspCandidate> grasps_from_json(const nlohmann::json& doc, double quaternion_tolerance = 1e-3);
std::vector<GraspCandidate> load_grasps(const std::filesystem::path& path, double quaternion_tolerance = 1e-3);
nlohmann::json grasps_to_json(const std::vector<GraspCandidate>& grasps);
void save_grasps(const std::filesystem::path& path, const std::vector<GraspCandidate>& grasps);

/// Naive antipodal sampler: from a surface sample p, cast a ray along the
/// inward normal to the opposite surface point q; keep the pair when the
/// normals oppose (dot < -0.5) and |p - q| <= max_width. Gives up with
/// Error{NoValidGrasps} if nothing is found after 100 x count trials.
std::vector<GraspCandidate> sample_antipodal(const TriMesh& mesh, int count, double max_width, std::uint64_t seed);

/// Maps every candidate to its nearest face and that face's label.
std::vector<PartAssignment> assign_parts(const std::vector<GraspCandidate>& candidates, const TriMesh& mesh,
                                         const LabelMap& labels, int workers = 1);

/// Indices of candidates on `target_prompt`, by confidence descending (stable),
/// truncated to top_k. Throws Error{EmptySelection} when none qualify.
std::vector<int> select_grasp_indices(const std::vector<PartAssignment>& assignments,
                                      const std::vector<GraspCandidate>& candidates, int target_prompt, int top_k);

std::vector<GraspCandidate> select_grasps(const std::vector<PartAssignment>& assignments,
                                          const std::vector<GraspCandidate>& candidates, int target_prompt,
                                          int top_k);

}  // namespace seggrasp
