#include <algorithm>
#include <cmath>

#include "seggrasp/error.hpp"
#include "seggrasp/eval.hpp"

namespace seggrasp {

SegMetrics miou(const LabelMap& pred, const GroundTruthLabels& truth, std::span<const double> face_weights) {
  const std::size_t n = truth.face_label.size();
  if (pred.label.size() != n || face_weights.size() != n) {
    throw Error(ErrorKind::LengthMismatch, "prediction, ground truth and weights must align");
  }
  int label_count = 0;
  for (std::size_t i = 0; i < n; ++i) label_count = std::max({label_count, truth.face_label[i] + 1, pred.label[i] + 1});

  std::vector<double> intersection(label_count, 0.0);
  std::vector<double> union_(label_count, 0.0);
  std::vector<char> present(label_count, 0);
  double total = 0.0;
  double unknown = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = face_weights[i];
    const int t = truth.face_label[i];
    const int p = pred.label[i];
    total += w;
    if (p == kUnknownLabel) unknown += w;
    present[t] = 1;
    if (p == t) {
      intersection[t] += w;
      union_[t] += w;
    } else {
      union_[t] += w;
      if (p != kUnknownLabel) union_[p] += w;
    }
  }

  SegMetrics m;
  m.per_label_iou.assign(label_count, 0.0);
  int counted = 0;
  double sum = 0.0;
  for (int j = 0; j < label_count; ++j) {
    if (union_[j] > 0.0) m.per_label_iou[j] = intersection[j] / union_[j];
    if (present[j]) {
      sum += m.per_label_iou[j];
      ++counted;
    }
  }
  m.miou = counted > 0 ? sum / counted : 0.0;
  m.unknown_fraction = total > 0.0 ? unknown / total : 0.0;
  return m;
}

SegMetrics miou(const LabelMap& pred, const GroundTruthLabels& truth, const TriMesh& mesh, IouWeighting weighting) {
  if (weighting == IouWeighting::FaceArea) {
    return miou(pred, truth, std::span<const double>(mesh.face_areas().data(), mesh.face_areas().size()));
  }
  const std::vector<double> ones(mesh.face_count(), 1.0);
  return miou(pred, truth, ones);
}

double part_selection_accuracy(std::span<const SelectionOutcome> outcomes) {
  if (outcomes.empty()) throw Error(ErrorKind::EmptyInput, "no selection outcomes");
  const auto correct = std::count(outcomes.begin(), outcomes.end(), SelectionOutcome::Correct);
  return static_cast<double>(correct) / static_cast<double>(outcomes.size());
}

double quaternion_variance(std::span<const Eigen::Quaterniond> quaternions) {
  if (quaternions.empty()) throw Error(ErrorKind::EmptyInput, "no quaternions");
  std::vector<Eigen::Vector4d> canonical;
  canonical.reserve(quaternions.size());
  for (const auto& q : quaternions) {
    Eigen::Vector4d v(q.w(), q.x(), q.y(), q.z());
    for (int c = 0; c < 4; ++c) {
      if (v[c] != 0.0) {
        if (v[c] < 0.0) v = -v;
        break;
      }
    }
    canonical.push_back(v);
  }
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  for (const auto& v : canonical) mean += v;
  mean /= static_cast<double>(canonical.size());
  double variance = 0.0;
  for (const auto& v : canonical) variance += (v - mean).squaredNorm();
  return variance / static_cast<double>(canonical.size());
}

double quaternion_variance(std::span<const GraspCandidate> grasps) {
  std::vector<Eigen::Quaterniond> q;
  q.reserve(grasps.size());
  for (const auto& g : grasps) q.push_back(g.orientation);
  return quaternion_variance(q);
}

}  // namespace seggrasp
