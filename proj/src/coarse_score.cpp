#include "seggrasp/coarse_score.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "seggrasp/error.hpp"
#include "seggrasp/parallel.hpp"

namespace seggrasp {

ScoreMatrix coarse_scores(int face_count, std::span<const FaceIdBuffer> buffers,
                          std::span<const Detection> detections, int prompt_count, int workers) {
  if (prompt_count < 1) throw Error(ErrorKind::InvalidArgument, "prompt_count must be >= 1");

  std::map<int, int> buffer_of_view;
  for (std::size_t b = 0; b < buffers.size(); ++b) buffer_of_view.emplace(buffers[b].view_index, static_cast<int>(b));

  // Group detection indices by view, preserving list order within a view.
  std::map<int, std::vector<int>> by_view;
  for (std::size_t d = 0; d < detections.size(); ++d) {
    const Detection& det = detections[d];
    if (!buffer_of_view.contains(det.view_index)) {
      throw Error(ErrorKind::ViewMismatch, "detection references view " + std::to_string(det.view_index) +
                                               " with no face-ID buffer");
    }
    if (det.prompt_index < 0 || det.prompt_index >= prompt_count) {
      throw Error(ErrorKind::IndexOutOfRange, "detection prompt index out of range");
    }
    by_view[det.view_index].push_back(static_cast<int>(d));
  }

  std::vector<std::pair<int, std::vector<int>>> groups(by_view.begin(), by_view.end());
  std::vector<ScoreMatrix> partial(groups.size());
  parallel_for(static_cast<int>(groups.size()), workers, [&](int g) {
    const FaceIdBuffer& buffer = buffers[buffer_of_view.at(groups[g].first)];
    ScoreMatrix p = ScoreMatrix::Zero(face_count, prompt_count);
    std::vector<std::int64_t> count(face_count, 0);
    std::vector<int> touched;
    for (int d : groups[g].second) {
      const Detection& det = detections[d];
      const PixelRect r = det.bbox.clipped(buffer.image);
      for (int y = r.y0; y < r.y1; ++y) {
        for (int x = r.x0; x < r.x1; ++x) {
          const int face = buffer.at(x, y);
          if (face == kEmptyPixel) continue;
          if (face >= face_count) throw Error(ErrorKind::DimensionMismatch, "buffer face index exceeds face count");
          if (count[face]++ == 0) touched.push_back(face);
        }
      }
      for (int face : touched) {
        p(face, det.prompt_index) += static_cast<double>(count[face]) * det.confidence;
        count[face] = 0;
      }
      touched.clear();
    }
    partial[g] = std::move(p);
  });

  ScoreMatrix scores = ScoreMatrix::Zero(face_count, prompt_count);
  for (const ScoreMatrix& p : partial) scores += p;
  return scores;
}

void save_score_matrix(const std::filesystem::path& path, const ScoreMatrix& scores, const PromptSet& prompts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Parse, "cannot write " + path.string());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
      std::uint64_t bits = std::bit_cast<std::uint64_t>(scores(i, j));
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
      char bytes[8];
      std::memcpy(bytes, &bits, 8);
      out.write(bytes, 8);
    }
  }
  std::ofstream sidecar(path.string() + ".json");
  if (!sidecar) throw Error(ErrorKind::Parse, "cannot write " + path.string() + ".json");
  sidecar << nlohmann::json{{"f", scores.rows()}, {"m", scores.cols()}, {"prompts", prompts.prompts()}}.dump(2)
          << '\n';
}

ScoreMatrix load_score_matrix(const std::filesystem::path& path) {
  std::ifstream sidecar(path.string() + ".json");
  if (!sidecar) throw Error(ErrorKind::Parse, "cannot open " + path.string() + ".json");
  Eigen::Index f = 0;
  Eigen::Index m = 0;
  try {
    const auto meta = nlohmann::json::parse(sidecar);
    f = meta.at("f").get<Eigen::Index>();
    m = meta.at("m").get<Eigen::Index>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ".json: " + e.what());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());
  ScoreMatrix scores(f, m);
  for (Eigen::Index i = 0; i < f; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      char bytes[8];
      if (!in.read(bytes, 8)) throw Error(ErrorKind::Parse, path.string() + ": truncated score matrix");
      std::uint64_t bits;
      std::memcpy(&bits, bytes, 8);
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
      scores(i, j) = std::bit_cast<double>(bits);
    }
  }
  return scores;
}

}  // namespace seggrasp
