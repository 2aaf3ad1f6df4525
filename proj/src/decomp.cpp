#include "seggrasp/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>

#include <Eigen/Eigenvalues>

#include "seggrasp/error.hpp"
#include "seggrasp/hull.hpp"
#include "seggrasp/random.hpp"

namespace seggrasp {

using nlohmann::json;

std::vector<std::vector<int>> Decomposition::parts() const {
  std::vector<std::vector<int>> out(part_count);
  for (std::size_t f = 0; f < part_of_face.size(); ++f) out[part_of_face[f]].push_back(static_cast<int>(f));
  return out;
}

Decomposition make_decomposition(double threshold, std::span<const int> labels) {
  Decomposition d;
  d.threshold = threshold;
  d.part_of_face.resize(labels.size());
  std::map<int, int> remap;
  for (std::size_t f = 0; f < labels.size(); ++f) {
    if (labels[f] < 0) throw Error(ErrorKind::InvalidArgument, "negative part label");
    auto [it, inserted] = remap.try_emplace(labels[f], static_cast<int>(remap.size()));
    d.part_of_face[f] = it->second;
  }
  d.part_count = static_cast<int>(remap.size());
  if (d.part_count == 0) throw Error(ErrorKind::EmptyPart, "decomposition has no faces");
  return d;
}

json decomposition_to_json(const Decomposition& d) {
  return {{"threshold", d.threshold}, {"part_of_face", d.part_of_face}};
}

Decomposition decomposition_from_json(const json& doc, int face_count) {
  double threshold = 0.0;
  std::vector<int> labels;
  try {
    threshold = doc.at("threshold").get<double>();
    labels = doc.at("part_of_face").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("decomposition: ") + e.what());
  }
  if (static_cast<int>(labels.size()) != face_count) {
    throw Error(ErrorKind::LengthMismatch, "decomposition has " + std::to_string(labels.size()) +
                                               " labels for " + std::to_string(face_count) + " faces");
  }
  for (int l : labels) {
    if (l < 0) throw Error(ErrorKind::Parse, "decomposition contains a negative part index");
  }
  return make_decomposition(threshold, labels);
}

Decomposition load_decomposition(const std::filesystem::path& path, const TriMesh& mesh) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  return decomposition_from_json(doc, mesh.face_count());
}

void save_decomposition(const std::filesystem::path& path, const Decomposition& d) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write " + path.string());
  out << decomposition_to_json(d).dump() << '\n';
}

double measure_concavity(const TriMesh& mesh, std::span<const int> faces, int samples) {
  if (faces.empty()) return 0.0;
  std::vector<double> cumulative;
  cumulative.reserve(faces.size());
  double total = 0.0;
  for (int f : faces) cumulative.push_back(total += mesh.face_area(f));
  if (!(total > 0.0)) return 0.0;

  std::vector<int> vertex_ids;
  vertex_ids.reserve(faces.size() * 3);
  for (int f : faces) {
    for (int c = 0; c < 3; ++c) vertex_ids.push_back(mesh.faces()(f, c));
  }
  std::sort(vertex_ids.begin(), vertex_ids.end());
  vertex_ids.erase(std::unique(vertex_ids.begin(), vertex_ids.end()), vertex_ids.end());
  std::vector<Vec3> points;
  points.reserve(vertex_ids.size());
  for (int v : vertex_ids) points.push_back(mesh.vertex(v));
  const ConvexHull hull = convex_hull(points);
  if (hull.flat) return 0.0;

  std::mt19937_64 rng(derive_seed(static_cast<std::uint64_t>(faces.size()), static_cast<std::uint64_t>(faces[0])));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), unit(rng) * total);
    const int f = faces[std::min<std::size_t>(it - cumulative.begin(), faces.size() - 1)];
    const double r1 = std::sqrt(unit(rng));
    const double r2 = unit(rng);
    const auto [a, b, c] = mesh.corners(f);
    const Vec3 p = (1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c;
    worst = std::max(worst, hull.depth(p));
  }
  return worst / mesh.bounding_radius();
}

namespace {

// Binary split tree shared by every threshold of a ladder: the cut sequence
// does not depend on the threshold, only where the recursion stops does.
class SplitTree {
 public:
  SplitTree(const TriMesh& mesh, const DecomposeOptions& options) : mesh_(mesh), options_(options) {
    std::vector<int> all(mesh.face_count());
    for (int f = 0; f < mesh.face_count(); ++f) all[f] = f;
    nodes_.push_back(Node{std::move(all), 0, -1.0, false, {}});
  }

  Decomposition cut(double threshold) {
    std::vector<int> labels(mesh_.face_count(), -1);
    int next_part = 0;
    bool limited = false;
    std::vector<int> stack{0};
    while (!stack.empty()) {
      const int id = stack.back();
      stack.pop_back();
      bool emit = concavity(id) <= threshold;
      if (!emit && nodes_[id].depth >= options_.max_depth) {
        emit = true;
        limited = true;
      }
      if (!emit) {
        const std::vector<int> children = expand(id);
        if (children.size() < 2) {
          emit = true;
          limited = true;
        } else {
          // Reverse so children are visited in order.
          for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(*it);
        }
      }
      if (emit) {
        for (const auto& component : connected_components(mesh_, nodes_[id].faces)) {
          for (int f : component) labels[f] = next_part;
          ++next_part;
        }
      }
    }
    Decomposition d = make_decomposition(threshold, labels);
    d.depth_limited = limited;
    return d;
  }

 private:
  struct Node {
    std::vector<int> faces;
    int depth = 0;
    double concavity = -1.0;
    bool expanded = false;
    std::vector<int> children;
  };

  double concavity(int id) {
    if (nodes_[id].concavity < 0.0) {
      nodes_[id].concavity = measure_concavity(mesh_, nodes_[id].faces, options_.concavity_samples);
    }
    return nodes_[id].concavity;
  }

  std::vector<int> expand(int id) {
    if (nodes_[id].expanded) return nodes_[id].children;
    nodes_[id].expanded = true;
    const int depth = nodes_[id].depth + 1;
    std::vector<std::vector<int>> pieces = connected_components(mesh_, nodes_[id].faces);
    if (pieces.size() < 2) pieces = plane_split(nodes_[id].faces);
    std::vector<int> children;
    if (pieces.size() >= 2) {
      for (auto& piece : pieces) {
        children.push_back(static_cast<int>(nodes_.size()));
        nodes_.push_back(Node{std::move(piece), depth, -1.0, false, {}});
      }
    }
    nodes_[id].children = children;
    return children;
  }

  std::vector<std::vector<int>> plane_split(const std::vector<int>& faces) const {
    double total = 0.0;
    Vec3 centroid = Vec3::Zero();
    for (int f : faces) {
      total += mesh_.face_area(f);
      centroid += mesh_.face_area(f) * mesh_.face_centroid(f);
    }
    if (!(total > 0.0)) return {};
    centroid /= total;
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int f : faces) {
      const Vec3 d = mesh_.face_centroid(f) - centroid;
      cov += mesh_.face_area(f) * d * d.transpose();
    }
    cov /= total;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    const Vec3 values = solver.eigenvalues();  // ascending
    // Among (near-)tied largest eigenvalues prefer the axis most aligned with x, then y, then z.
    int pick = 2;
    for (int k = 1; k >= 0; --k) {
      if (values[2] - values[k] > 1e-9 * std::max(values[2], 1e-300)) break;
      const Vec3 a = solver.eigenvectors().col(k).cwiseAbs();
      const Vec3 b = solver.eigenvectors().col(pick).cwiseAbs();
      if (std::lexicographical_compare(b.data(), b.data() + 3, a.data(), a.data() + 3)) pick = k;
    }
    Vec3 axis = solver.eigenvectors().col(pick);
    int dominant = 0;
    axis.cwiseAbs().maxCoeff(&dominant);
    if (axis[dominant] < 0.0) axis = -axis;

    std::vector<std::vector<int>> sides(2);
    for (int f : faces) sides[(mesh_.face_centroid(f) - centroid).dot(axis) > 0.0].push_back(f);
    if (sides[0].empty() || sides[1].empty()) return {};
    return sides;
  }

  const TriMesh& mesh_;
  DecomposeOptions options_;
  std::vector<Node> nodes_;
};

}  // namespace

Decomposition builtin_decompose(const TriMesh& mesh, double threshold, const DecomposeOptions& options) {
  mesh.require_non_degenerate();
  if (!(threshold > 0.0)) throw Error(ErrorKind::InvalidArgument, "threshold must be positive");
  return SplitTree(mesh, options).cut(threshold);
}

ThresholdLadder ThresholdLadder::from(int first) const {
  if (first < 0 || first >= size()) throw Error(ErrorKind::IndexOutOfRange, "ladder index out of range");
  ThresholdLadder out;
  out.thresholds.assign(thresholds.begin() + first, thresholds.end());
  out.decompositions.assign(decompositions.begin() + first, decompositions.end());
  return out;
}

std::vector<double> threshold_values(double th_min, double th_max, double step) {
  if (!(th_min > 0.0) || !(th_max >= th_min)) throw Error(ErrorKind::InvalidArgument, "need 0 < th_min <= th_max");
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "step must be positive");
  const auto count = static_cast<long long>(std::floor((th_max - th_min) / step + 1e-9)) + 1;
  std::vector<double> values;
  values.reserve(count);
  for (long long k = 0; k < count; ++k) values.push_back(std::round((th_min + k * step) * 1e12) / 1e12);
  return values;
}

ThresholdLadder dedup_ladder(std::vector<Decomposition> ordered) {
  ThresholdLadder ladder;
  for (Decomposition& d : ordered) {
    if (!ladder.empty() && ladder.decompositions.back().same_partition(d)) continue;
    ladder.thresholds.push_back(d.threshold);
    ladder.decompositions.push_back(std::move(d));
  }
  return ladder;
}

std::string ladder_file_name(double threshold) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "th_%.10g.json", threshold);
  return buf;
}

std::vector<Decomposition> decompose_thresholds(const TriMesh& mesh, std::span<const double> values,
                                               const LadderSource& source) {
  std::vector<Decomposition> ordered;
  ordered.reserve(values.size());

  if (const auto* builtin = std::get_if<BuiltinSource>(&source)) {
    mesh.require_non_degenerate();
    SplitTree tree(mesh, builtin->options);
    for (double th : values) ordered.push_back(tree.cut(th));
  } else {
    const auto& dir = std::get<DirectorySource>(source).directory;
    if (!std::filesystem::is_directory(dir)) throw Error(ErrorKind::Parse, "not a directory: " + dir.string());
    // Match files by the numeric value in their name.
    std::vector<std::pair<double, std::filesystem::path>> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("th_", 0) != 0 || entry.path().extension() != ".json") continue;
      try {
        files.emplace_back(std::stod(name.substr(3, name.size() - 8)), entry.path());
      } catch (const std::logic_error&) {
      }
    }
    for (double th : values) {
      auto it = std::find_if(files.begin(), files.end(),
                             [&](const auto& file) { return std::abs(file.first - th) <= 1e-9; });
      if (it == files.end()) {
        throw Error(ErrorKind::Parse, "no decomposition file for threshold " + std::to_string(th) + " in " +
                                          dir.string());
      }
      Decomposition d = load_decomposition(it->second, mesh);
      d.threshold = th;
      ordered.push_back(std::move(d));
    }
  }
  return ordered;
}

ThresholdLadder build_ladder(const TriMesh& mesh, double th_min, double th_max, double step,
                             const LadderSource& source) {
  return dedup_ladder(decompose_thresholds(mesh, threshold_values(th_min, th_max, step), source));
}

}  // namespace seggrasp
