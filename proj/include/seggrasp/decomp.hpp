#pragma once

#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include <json.hpp>

#include "seggrasp/mesh.hpp"

namespace seggrasp {

/// A partition of the mesh faces into parts at one concavity threshold.
///
/// Part indices are canonical: numbered 0..part_count-1 in order of first
/// appearance in face order, so two decompositions describing the same
/// partition compare equal element-wise.
struct Decomposition {
  double threshold = 0.0;
  std::vector<int> part_of_face;
  int part_count = 0;
  /// Set when a part was accepted without meeting the threshold (depth guard
  /// or an unsplittable component).
  bool depth_limited = false;

  /// Face lists per part, each in ascending face order.
  std::vector<std::vector<int>> parts() const;
  bool same_partition(const Decomposition& other) const { return part_of_face == other.part_of_face; }
};

/// Compacts arbitrary non-negative labels to canonical part indices.
Decomposition make_decomposition(double threshold, std::span<const int> labels);

nlohmann::json decomposition_to_json(const Decomposition& d);
Decomposition decomposition_from_json(const nlohmann::json& doc, int face_count);
/// Throws Error{Parse} or Error{LengthMismatch}.
Decomposition load_decomposition(const std::filesystem::path& path, const TriMesh& mesh);
void save_decomposition(const std::filesystem::path& path, const Decomposition& d);

struct DecomposeOptions {
  int max_depth = 12;
  int concavity_samples = 2000;
};

/// Concavity of a face subset: max distance from its surface samples to the
/// boundary of the convex hull of its vertices, divided by the mesh
/// bounding-sphere radius. Deterministic (internally seeded).
double measure_concavity(const TriMesh& mesh, std::span<const int> faces, int samples = 2000);

/// Concavity-guided recursive splitter. A part whose concavity exceeds the
/// threshold is split into its connected components if it has several,
/// otherwise cut by the plane through its area-weighted centroid normal to
/// its largest-variance principal axis (faces assigned by centroid side).
/// Every final part is then split into connected components.
Decomposition builtin_decompose(const TriMesh& mesh, double threshold, const DecomposeOptions& options = {});

/// Decompositions from fine (smallest threshold) to coarse with adjacent
/// duplicates removed; thresholds[k] belongs to decompositions[k].
struct ThresholdLadder {
  std::vector<double> thresholds;
  std::vector<Decomposition> decompositions;

  int size() const { return static_cast<int>(decompositions.size()); }
  bool empty() const { return decompositions.empty(); }
  const Decomposition& finest() const { return decompositions.front(); }
  /// Sub-ladder whose finest entry is decompositions[first].
  ThresholdLadder from(int first) const;
};

/// th_min, th_min + step, ... up to th_max (inclusive, within 1e-9), rounded to 1e-12.
std::vector<double> threshold_values(double th_min, double th_max, double step);

/// Builds a ladder from decompositions already ordered fine to coarse,
/// dropping any entry whose partition equals the previously retained one.
ThresholdLadder dedup_ladder(std::vector<Decomposition> ordered);

struct BuiltinSource {
  DecomposeOptions options;
};
/// Directory of `th_<value>.json` files; one must exist for every threshold.
struct DirectorySource {
  std::filesystem::path directory;
};
using LadderSource = std::variant<BuiltinSource, DirectorySource>;

/// One decomposition per threshold, in the given order, without deduplication.
std::vector<Decomposition> decompose_thresholds(const TriMesh& mesh, std::span<const double> values,
                                               const LadderSource& source = BuiltinSource{});

ThresholdLadder build_ladder(const TriMesh& mesh, double th_min, double th_max, double step,
                             const LadderSource& source = BuiltinSource{});

/// File name used for directory import/export of one decomposition.
std::string ladder_file_name(double threshold);

}  // namespace seggrasp
