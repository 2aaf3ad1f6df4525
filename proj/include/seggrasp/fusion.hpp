#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "seggrasp/decomp.hpp"
#include "seggrasp/detection.hpp"
#include "seggrasp/error.hpp"
#include "seggrasp/mesh.hpp"
#include "seggrasp/types.hpp"

namespace seggrasp {

/// Normalization of the per-part relevance score.
///   Paper: sum(area * S) / (l * sum(area)), l = faces in the part
///   Mean:  sum(area * S) / sum(area)
enum class RevNorm { Paper, Mean };

enum class LabelSource { Coarse, Fused, Spread };

const char* to_string(LabelSource source);

/// Per-face prompt index, or kUnknownLabel where the score row is all zero.
struct LabelMap {
  std::vector<int> label;
  LabelSource source = LabelSource::Coarse;
  bool operator==(const LabelMap&) const = default;
};

template <typename Scalar>
struct PartScoreT {
  int part_index = 0;
  double threshold = 0.0;
  RowVectorT<Scalar> score;
};
using PartScore = PartScoreT<double>;

namespace detail {

template <typename ScoresDerived, typename AreasDerived>
void check_dimensions(const Eigen::MatrixBase<ScoresDerived>& scores, const Eigen::MatrixBase<AreasDerived>& areas,
                      const Decomposition& d) {
  if (scores.rows() != areas.size() || static_cast<Eigen::Index>(d.part_of_face.size()) != scores.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "score rows, face areas and decomposition disagree on face count");
  }
}

/// Per-part sums of area * row and of area, plus face counts, accumulated in face order.
template <typename ScoresDerived, typename AreasDerived>
void accumulate_parts(const Eigen::MatrixBase<ScoresDerived>& scores, const Eigen::MatrixBase<AreasDerived>& areas,
                      const Decomposition& d, ScoreMatrixT<typename ScoresDerived::Scalar>& weighted,
                      VectorT<typename ScoresDerived::Scalar>& area_sum, std::vector<int>& face_count) {
  using Scalar = typename ScoresDerived::Scalar;
  weighted = ScoreMatrixT<Scalar>::Zero(d.part_count, scores.cols());
  area_sum = VectorT<Scalar>::Zero(d.part_count);
  face_count.assign(d.part_count, 0);
  for (Eigen::Index u = 0; u < scores.rows(); ++u) {
    const int k = d.part_of_face[u];
    const Scalar a = static_cast<Scalar>(areas(u));
    weighted.row(k) += a * scores.row(u);
    area_sum(k) += a;
    ++face_count[k];
  }
}

}  // namespace detail

/// Area-weighted relevance of every part of `d` (zero vector for zero-area parts).
template <typename ScoresDerived, typename AreasDerived>
std::vector<PartScoreT<typename ScoresDerived::Scalar>> part_relevance(
    const Eigen::MatrixBase<ScoresDerived>& scores, const Eigen::MatrixBase<AreasDerived>& areas,
    const Decomposition& d, RevNorm norm = RevNorm::Paper) {
  using Scalar = typename ScoresDerived::Scalar;
  detail::check_dimensions(scores, areas, d);
  ScoreMatrixT<Scalar> weighted;
  VectorT<Scalar> area_sum;
  std::vector<int> count;
  detail::accumulate_parts(scores, areas, d, weighted, area_sum, count);

  std::vector<PartScoreT<Scalar>> out(d.part_count);
  for (int k = 0; k < d.part_count; ++k) {
    out[k].part_index = k;
    out[k].threshold = d.threshold;
    if (area_sum(k) > Scalar(0)) {
      const Scalar denom = norm == RevNorm::Paper ? static_cast<Scalar>(count[k]) * area_sum(k) : area_sum(k);
      out[k].score = weighted.row(k) / denom;
    } else {
      out[k].score = RowVectorT<Scalar>::Zero(scores.cols());
    }
  }
  return out;
}

/// Adds, for every ladder threshold, the relevance of the part containing
/// each face to that face's row. Relevances are always computed from the
/// input scores; thresholds are added in ladder order.
template <typename ScoresDerived, typename AreasDerived>
ScoreMatrixT<typename ScoresDerived::Scalar> multi_fusion(const Eigen::MatrixBase<ScoresDerived>& scores,
                                                         const Eigen::MatrixBase<AreasDerived>& areas,
                                                         const ThresholdLadder& ladder,
                                                         RevNorm norm = RevNorm::Paper) {
  if (ladder.empty()) throw Error(ErrorKind::InvalidArgument, "threshold ladder is empty");
  ScoreMatrixT<typename ScoresDerived::Scalar> fused = scores;
  for (const Decomposition& d : ladder.decompositions) {
    const auto relevance = part_relevance(scores, areas, d, norm);
    for (Eigen::Index i = 0; i < fused.rows(); ++i) fused.row(i) += relevance[d.part_of_face[i]].score;
  }
  return fused;
}

/// Replaces each face's row by the unnormalized area-weighted sum of the rows
/// in its part of `finest`, so all faces of a part share one row.
template <typename ScoresDerived, typename AreasDerived>
ScoreMatrixT<typename ScoresDerived::Scalar> fine_opt(const Eigen::MatrixBase<ScoresDerived>& scores,
                                                     const Eigen::MatrixBase<AreasDerived>& areas,
                                                     const Decomposition& finest) {
  using Scalar = typename ScoresDerived::Scalar;
  detail::check_dimensions(scores, areas, finest);
  ScoreMatrixT<Scalar> weighted;
  VectorT<Scalar> area_sum;
  std::vector<int> count;
  detail::accumulate_parts(scores, areas, finest, weighted, area_sum, count);
  ScoreMatrixT<Scalar> out(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) = weighted.row(finest.part_of_face[i]);
  return out;
}

/// Multi-fusion over the ladder followed by fine-grained optimization on its finest entry.
template <typename ScoresDerived, typename AreasDerived>
ScoreMatrixT<typename ScoresDerived::Scalar> geo_fusion(const Eigen::MatrixBase<ScoresDerived>& scores,
                                                       const Eigen::MatrixBase<AreasDerived>& areas,
                                                       const ThresholdLadder& ladder,
                                                       RevNorm norm = RevNorm::Paper) {
  return fine_opt(multi_fusion(scores, areas, ladder, norm), areas, ladder.finest());
}

/// Sequential fine-to-coarse propagation. For each threshold, every face gains
/// sum(area * row) / (ladder size * sum(area)) over its part, with part sums
/// taken from the state before that threshold's update.
template <typename ScoresDerived, typename AreasDerived>
ScoreMatrixT<typename ScoresDerived::Scalar> geo_spreading(const Eigen::MatrixBase<ScoresDerived>& scores,
                                                          const Eigen::MatrixBase<AreasDerived>& areas,
                                                          const ThresholdLadder& ladder) {
  using Scalar = typename ScoresDerived::Scalar;
  if (ladder.empty()) throw Error(ErrorKind::InvalidArgument, "threshold ladder is empty");
  const auto ladder_size = static_cast<Scalar>(ladder.size());
  ScoreMatrixT<Scalar> current = scores;
  ScoreMatrixT<Scalar> weighted;
  VectorT<Scalar> area_sum;
  std::vector<int> count;
  for (const Decomposition& d : ladder.decompositions) {
    detail::check_dimensions(current, areas, d);
    detail::accumulate_parts(current, areas, d, weighted, area_sum, count);
    for (int k = 0; k < d.part_count; ++k) {
      if (area_sum(k) > Scalar(0)) {
        weighted.row(k) /= ladder_size * area_sum(k);
      } else {
        weighted.row(k).setZero();
      }
    }
    for (Eigen::Index i = 0; i < current.rows(); ++i) current.row(i) += weighted.row(d.part_of_face[i]);
  }
  return current;
}

/// Row-wise argmax; ties go to the lowest prompt index; all-zero rows are unknown.
template <typename Derived>
LabelMap argmax_labels(const Eigen::MatrixBase<Derived>& scores, LabelSource source = LabelSource::Coarse) {
  LabelMap out;
  out.source = source;
  out.label.resize(scores.rows());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    if ((scores.row(i).array() == 0).all()) {
      out.label[i] = kUnknownLabel;
      continue;
    }
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < scores.cols(); ++j) {
      if (scores(i, j) > scores(i, best)) best = j;
    }
    out.label[i] = static_cast<int>(best);
  }
  return out;
}

// TriMesh convenience overloads.

inline std::vector<PartScore> part_relevance(const ScoreMatrix& scores, const TriMesh& mesh, const Decomposition& d,
                                             RevNorm norm = RevNorm::Paper) {
  return part_relevance(scores, mesh.face_areas(), d, norm);
}
inline ScoreMatrix multi_fusion(const ScoreMatrix& scores, const TriMesh& mesh, const ThresholdLadder& ladder,
                                RevNorm norm = RevNorm::Paper) {
  return multi_fusion(scores, mesh.face_areas(), ladder, norm);
}
inline ScoreMatrix fine_opt(const ScoreMatrix& scores, const TriMesh& mesh, const Decomposition& finest) {
  return fine_opt(scores, mesh.face_areas(), finest);
}
inline ScoreMatrix geo_fusion(const ScoreMatrix& scores, const TriMesh& mesh, const ThresholdLadder& ladder,
                              RevNorm norm = RevNorm::Paper) {
  return geo_fusion(scores, mesh.face_areas(), ladder, norm);
}
inline ScoreMatrix geo_spreading(const ScoreMatrix& scores, const TriMesh& mesh, const ThresholdLadder& ladder) {
  return geo_spreading(scores, mesh.face_areas(), ladder);
}

/// Fixed 16-entry palette indexed by label; unknown is gray.
Rgb label_color(int label);
std::vector<Rgb> label_colors(const LabelMap& labels);

nlohmann::json label_map_to_json(const LabelMap& labels, const PromptSet& prompts);
void save_label_map(const std::filesystem::path& path, const LabelMap& labels, const PromptSet& prompts);
/// Also returns the prompts recorded in the file.
LabelMap load_label_map(const std::filesystem::path& path, std::vector<std::string>* prompts = nullptr);

}  // namespace seggrasp
