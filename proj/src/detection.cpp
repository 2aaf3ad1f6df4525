#include "seggrasp/detection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <tuple>

#include "seggrasp/error.hpp"
#include "seggrasp/parallel.hpp"
#include "seggrasp/random.hpp"

namespace seggrasp {

using nlohmann::json;

namespace {

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace

PromptSet::PromptSet(std::vector<std::string> prompts) : prompts_(std::move(prompts)) {
  if (prompts_.empty()) throw Error(ErrorKind::InvalidArgument, "prompt set is empty");
  std::set<std::string> seen;
  for (const auto& p : prompts_) {
    if (!seen.insert(p).second) throw Error(ErrorKind::InvalidArgument, "duplicate prompt '" + p + "'");
  }
}

std::optional<int> PromptSet::find(const std::string& name) const {
  auto it = std::find(prompts_.begin(), prompts_.end(), name);
  if (it == prompts_.end()) return std::nullopt;
  return static_cast<int>(it - prompts_.begin());
}

int PromptSet::index_of(const std::string& name) const {
  if (auto j = find(name)) return *j;
  throw Error(ErrorKind::UnknownPrompt, "prompt '" + name + "' is not in the prompt set");
}

void GroundTruthLabels::validate(int face_count, int prompt_count) const {
  if (static_cast<int>(face_label.size()) != face_count) {
    throw Error(ErrorKind::LengthMismatch, "label count " + std::to_string(face_label.size()) +
                                               " != face count " + std::to_string(face_count));
  }
  for (int label : face_label) {
    if (label < 0 || label >= prompt_count) {
      throw Error(ErrorKind::IndexOutOfRange, "label " + std::to_string(label) + " outside prompt range");
    }
  }
}

DetectionSet detections_from_json(const json& doc, const PromptSet& prompts, ImageSize image) {
  DetectionSet out;
  try {
    for (const json& rec : doc.at("detections")) {
      const auto& box = rec.at("bbox");
      if (!box.is_array() || box.size() != 4) throw Error(ErrorKind::Parse, "bbox must have 4 numbers");
      Detection d;
      d.view_index = rec.at("view").get<int>();
      d.prompt_index = prompts.index_of(rec.at("prompt").get<std::string>());
      d.confidence = rec.at("confidence").get<double>();
      if (d.view_index < 0) throw Error(ErrorKind::Parse, "negative view index");
      if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) throw Error(ErrorKind::Parse, "confidence outside [0, 1]");
      const double c[4] = {box[0].get<double>(), box[1].get<double>(), box[2].get<double>(), box[3].get<double>()};
      for (double v : c) {
        if (!std::isfinite(v)) throw Error(ErrorKind::Parse, "non-finite bbox coordinate");
      }
      auto to_int = [](double v) { return static_cast<int>(std::clamp(v, -1e9, 1e9)); };
      d.bbox = PixelRect{to_int(std::floor(c[0])), to_int(std::floor(c[1])), to_int(std::ceil(c[2])),
                         to_int(std::ceil(c[3]))}
                   .clipped(image);
      if (d.bbox.empty()) {
        ++out.dropped;
        continue;
      }
      out.detections.push_back(d);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("detection file: ") + e.what());
  }
  return out;
}

DetectionSet load_detections(const std::filesystem::path& path, const PromptSet& prompts, ImageSize image) {
  return detections_from_json(read_json(path), prompts, image);
}

json detections_to_json(const std::vector<Detection>& detections, const PromptSet& prompts, ImageSize image) {
  json records = json::array();
  for (const Detection& d : detections) {
    records.push_back({{"view", d.view_index},
                       {"prompt", prompts[d.prompt_index]},
                       {"bbox", {d.bbox.x0, d.bbox.y0, d.bbox.x1, d.bbox.y1}},
                       {"confidence", d.confidence}});
  }
  return {{"image_size", {image.width, image.height}}, {"detections", records}};
}

void save_detections(const std::filesystem::path& path, const std::vector<Detection>& detections,
                     const PromptSet& prompts, ImageSize image) {
  write_json(path, detections_to_json(detections, prompts, image));
}

GroundTruthLabels load_labels(const std::filesystem::path& path) {
  const json doc = read_json(path);
  try {
    return GroundTruthLabels{doc.at("labels").get<std::vector<int>>()};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

void save_labels(const std::filesystem::path& path, const GroundTruthLabels& labels) {
  write_json(path, json{{"labels", labels.face_label}});
}

std::vector<Detection> mock_detect(const FaceIdBuffer& buffer, const GroundTruthLabels& labels, int prompt_count,
                                   const NoiseConfig& noise, std::uint64_t seed) {
  const int w = buffer.image.width;
  const int h = buffer.image.height;
  struct Extent {
    std::int64_t pixels = 0;
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;
  };
  std::vector<Extent> extent(prompt_count);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int face = buffer.at(x, y);
      if (face == kEmptyPixel) continue;
      if (face >= static_cast<int>(labels.face_label.size())) {
        throw Error(ErrorKind::LengthMismatch, "buffer references a face beyond the label list");
      }
      const int label = labels.face_label[face];
      if (label < 0 || label >= prompt_count) throw Error(ErrorKind::IndexOutOfRange, "label outside the prompt set");
      Extent& e = extent[label];
      if (e.pixels == 0) {
        e.x0 = e.x1 = x;
        e.y0 = e.y1 = y;
      } else {
        e.x0 = std::min(e.x0, x);
        e.x1 = std::max(e.x1, x);
        e.y0 = std::min(e.y0, y);
        e.y1 = std::max(e.y1, y);
      }
      ++e.pixels;
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto symmetric = [&] { return 2.0 * unit(rng) - 1.0; };

  std::vector<Detection> out;
  for (int j = 0; j < prompt_count; ++j) {
    const Extent& e = extent[j];
    if (e.pixels < noise.min_pixels || e.pixels == 0) continue;
    Detection d{buffer.view_index, j, PixelRect{e.x0, e.y0, e.x1 + 1, e.y1 + 1}, 1.0};
    if (noise.jitter_frac > 0.0) {
      const double jx = noise.jitter_frac * (d.bbox.x1 - d.bbox.x0);
      const double jy = noise.jitter_frac * (d.bbox.y1 - d.bbox.y0);
      d.bbox.x0 += static_cast<int>(std::lround(symmetric() * jx));
      d.bbox.x1 += static_cast<int>(std::lround(symmetric() * jx));
      d.bbox.y0 += static_cast<int>(std::lround(symmetric() * jy));
      d.bbox.y1 += static_cast<int>(std::lround(symmetric() * jy));
      d.bbox = d.bbox.clipped(buffer.image);
    }
    if (noise.conf_noise > 0.0) d.confidence *= 1.0 - noise.conf_noise * unit(rng);
    if (noise.drop_prob > 0.0 && unit(rng) < noise.drop_prob) continue;
    if (d.bbox.empty()) continue;
    out.push_back(d);
  }

  if (noise.spurious_rate > 0.0) {
    std::poisson_distribution<int> spurious(noise.spurious_rate);
    const int n = spurious(rng);
    for (int s = 0; s < n; ++s) {
      const double bw = w * (0.1 + 0.4 * unit(rng));
      const double bh = h * (0.1 + 0.4 * unit(rng));
      const double x0 = (w - bw) * unit(rng);
      const double y0 = (h - bh) * unit(rng);
      Detection d;
      d.view_index = buffer.view_index;
      d.prompt_index = std::min(prompt_count - 1, static_cast<int>(unit(rng) * prompt_count));
      d.bbox = PixelRect{static_cast<int>(x0), static_cast<int>(y0), static_cast<int>(x0 + bw),
                         static_cast<int>(y0 + bh)}
                   .clipped(buffer.image);
      d.confidence = 0.3 * (1.0 - unit(rng));  // (0, 0.3]
      if (!d.bbox.empty()) out.push_back(d);
    }
  }
  return out;
}

std::vector<Detection> mock_detect_views(const std::vector<FaceIdBuffer>& buffers, const GroundTruthLabels& labels,
                                         int prompt_count, const NoiseConfig& noise, std::uint64_t seed,
                                         int workers) {
  std::vector<std::vector<Detection>> per_view(buffers.size());
  parallel_for(static_cast<int>(buffers.size()), workers, [&](int i) {
    per_view[i] = mock_detect(buffers[i], labels, prompt_count, noise,
                              derive_seed(seed, static_cast<std::uint64_t>(buffers[i].view_index)));
  });
  std::vector<Detection> all;
  for (auto& v : per_view) all.insert(all.end(), v.begin(), v.end());
  std::stable_sort(all.begin(), all.end(), [](const Detection& a, const Detection& b) {
    return std::tie(a.view_index, a.prompt_index) < std::tie(b.view_index, b.prompt_index);
  });
  return all;
}

}  // namespace seggrasp
