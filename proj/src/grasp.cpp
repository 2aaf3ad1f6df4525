#include "seggrasp/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include "seggrasp/error.hpp"
#include "seggrasp/parallel.hpp"

namespace seggrasp {

using nlohmann::json;

std::vector<GraspCandidate> grasps_from_json(const json& doc, double quaternion_tolerance) {
  std::vector<GraspCandidate> out;
  try {
    for (const json& rec : doc.at("grasps")) {
      const auto p = rec.at("position").get<std::vector<double>>();
      const auto q = rec.at("quaternion").get<std::vector<double>>();
      if (p.size() != 3 || q.size() != 4) throw Error(ErrorKind::Parse, "position needs 3 and quaternion 4 numbers");
      GraspCandidate g;
      g.position = Vec3(p[0], p[1], p[2]);
      g.orientation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]);
      g.width = rec.at("width").get<double>();
      g.confidence = rec.at("confidence").get<double>();
      const double norm = g.orientation.norm();
      if (!std::isfinite(norm) || std::abs(norm - 1.0) > quaternion_tolerance) {
        throw Error(ErrorKind::BadQuaternion, "grasp " + std::to_string(out.size()) + " quaternion norm " +
                                                  std::to_string(norm));
      }
      g.orientation.normalize();
      if (!(g.width > 0.0)) throw Error(ErrorKind::Parse, "grasp width must be positive");
      if (!(g.confidence >= 0.0 && g.confidence <= 1.0)) throw Error(ErrorKind::Parse, "confidence outside [0, 1]");
      out.push_back(g);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("grasp file: ") + e.what());
  }
  return out;
}

std::vector<GraspCandidate> load_grasps(const std::filesystem::path& path, double quaternion_tolerance) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  return grasps_from_json(doc, quaternion_tolerance);
}

json grasps_to_json(const std::vector<GraspCandidate>& grasps) {
  json records = json::array();
  for (const auto& g : grasps) {
    const auto& q = g.orientation;
    records.push_back({{"position", {g.position.x(), g.position.y(), g.position.z()}},
                       {"quaternion", {q.w(), q.x(), q.y(), q.z()}},
                       {"width", g.width},
                       {"confidence", g.confidence}});
  }
  return {{"grasps", records}};
}

void save_grasps(const std::filesystem::path& path, const std::vector<GraspCandidate>& grasps) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write " + path.string());
  out << grasps_to_json(grasps).dump(2) << '\n';
}

namespace {

struct RayHit {
  double t;
  int face;
};

// Moller-Trumbore, two-sided; nearest hit with t > t_min.
std::optional<RayHit> cast_ray(const TriMesh& mesh, const Vec3& origin, const Vec3& dir, double t_min) {
  std::optional<RayHit> best;
  for (int f = 0; f < mesh.face_count(); ++f) {
    const auto [a, b, c] = mesh.corners(f);
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 pvec = dir.cross(e2);
    const double det = e1.dot(pvec);
    if (std::abs(det) < 1e-300) continue;
    const double inv = 1.0 / det;
    const Vec3 tvec = origin - a;
    const double u = tvec.dot(pvec) * inv;
    if (u < 0.0 || u > 1.0) continue;
    const Vec3 qvec = tvec.cross(e1);
    const double v = dir.dot(qvec) * inv;
    if (v < 0.0 || u + v > 1.0) continue;
    const double t = e2.dot(qvec) * inv;
    if (t > t_min && (!best || t < best->t)) best = RayHit{t, f};
  }
  return best;
}

}  // namespace

std::vector<GraspCandidate> sample_antipodal(const TriMesh& mesh, int count, double max_width, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "grasp count must be >= 1");
  if (!(max_width > 0.0)) throw Error(ErrorKind::InvalidArgument, "max_width must be positive");
  mesh.require_non_degenerate();

  const long long trials = 100LL * count;
  const double t_min = 1e-9 * mesh.bounding_radius();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<GraspCandidate> out;
  constexpr int kBatch = 256;
  for (long long done = 0; done < trials && static_cast<int>(out.size()) < count;) {
    const int batch = static_cast<int>(std::min<long long>(kBatch, trials - done));
    const auto samples = sample_surface(mesh, batch, rng());
    for (const SurfaceSample& s : samples) {
      ++done;
      const double spin = 2.0 * std::numbers::pi * unit(rng);
      if (s.normal.isZero()) continue;
      const Vec3 inward = -s.normal;
      const auto hit = cast_ray(mesh, s.point, inward, t_min);
      if (!hit || hit->t > max_width) continue;
      const double opposition = s.normal.dot(mesh.face_normal(hit->face));
      if (!(opposition < -0.5)) continue;

      const Vec3 q = s.point + hit->t * inward;
      const Vec3 closing = (q - s.point).normalized();
      const Vec3 helper = std::abs(closing.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
      const Vec3 e1 = closing.cross(helper).normalized();
      const Vec3 e2 = closing.cross(e1);
      const Vec3 approach = std::cos(spin) * e1 + std::sin(spin) * e2;
      Eigen::Matrix3d rotation;
      rotation.col(0) = closing;
      rotation.col(1) = approach.cross(closing);
      rotation.col(2) = approach;

      GraspCandidate g;
      g.position = 0.5 * (s.point + q);
      g.orientation = Eigen::Quaterniond(rotation).normalized();
      g.width = hit->t;
      g.confidence = std::clamp(-opposition, 0.0, 1.0);
      out.push_back(g);
      if (static_cast<int>(out.size()) == count) break;
    }
  }
  if (out.empty()) throw Error(ErrorKind::NoValidGrasps, "no antipodal pair within max_width");
  return out;
}

std::vector<PartAssignment> assign_parts(const std::vector<GraspCandidate>& candidates, const TriMesh& mesh,
                                         const LabelMap& labels, int workers) {
  if (static_cast<int>(labels.label.size()) != mesh.face_count()) {
    throw Error(ErrorKind::LengthMismatch, "label map does not match mesh face count");
  }
  std::vector<PartAssignment> out(candidates.size());
  parallel_for(static_cast<int>(candidates.size()), workers, [&](int c) {
    const NearestFace nearest = nearest_face(mesh, candidates[c].position);
    out[c] = {c, nearest.face_index, labels.label[nearest.face_index], nearest.distance};
  });
  return out;
}

std::vector<int> select_grasp_indices(const std::vector<PartAssignment>& assignments,
                                      const std::vector<GraspCandidate>& candidates, int target_prompt, int top_k) {
  if (top_k < 1) throw Error(ErrorKind::InvalidArgument, "top_k must be >= 1");
  std::vector<int> picked;
  for (const PartAssignment& a : assignments) {
    if (a.part_label == target_prompt) picked.push_back(a.candidate_index);
  }
  if (picked.empty()) throw Error(ErrorKind::EmptySelection, "no grasp lies on the target part");
  std::stable_sort(picked.begin(), picked.end(),
                   [&](int a, int b) { return candidates[a].confidence > candidates[b].confidence; });
  if (static_cast<int>(picked.size()) > top_k) picked.resize(top_k);
  return picked;
}

std::vector<GraspCandidate> select_grasps(const std::vector<PartAssignment>& assignments,
                                          const std::vector<GraspCandidate>& candidates, int target_prompt,
                                          int top_k) {
  std::vector<GraspCandidate> out;
  for (int i : select_grasp_indices(assignments, candidates, target_prompt, top_k)) out.push_back(candidates[i]);
  return out;
}

}  // namespace seggrasp
