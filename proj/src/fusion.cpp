#include "seggrasp/fusion.hpp"

#include <fstream>

namespace seggrasp {

using nlohmann::json;

const char* to_string(LabelSource source) {
  switch (source) {
    case LabelSource::Coarse: return "coarse";
    case LabelSource::Fused: return "fused";
    case LabelSource::Spread: return "spread";
  }
  return "coarse";
}

Rgb label_color(int label) {
  static constexpr Rgb palette[16] = {
      {230, 25, 75},   {60, 180, 75},   {255, 225, 25}, {0, 130, 200},  {245, 130, 48}, {145, 30, 180},
      {70, 240, 240},  {240, 50, 230},  {210, 245, 60}, {250, 190, 212}, {0, 128, 128}, {220, 190, 255},
      {170, 110, 40},  {255, 250, 200}, {128, 0, 0},    {170, 255, 195}};
  if (label < 0) return {128, 128, 128};
  return palette[label % 16];
}

std::vector<Rgb> label_colors(const LabelMap& labels) {
  std::vector<Rgb> colors;
  colors.reserve(labels.label.size());
  for (int l : labels.label) colors.push_back(label_color(l));
  return colors;
}

json label_map_to_json(const LabelMap& labels, const PromptSet& prompts) {
  return {{"labels", labels.label}, {"prompts", prompts.prompts()}, {"source", to_string(labels.source)}};
}

void save_label_map(const std::filesystem::path& path, const LabelMap& labels, const PromptSet& prompts) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write " + path.string());
  out << label_map_to_json(labels, prompts).dump() << '\n';
}

LabelMap load_label_map(const std::filesystem::path& path, std::vector<std::string>* prompts) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());
  try {
    const json doc = json::parse(in);
    LabelMap out;
    out.label = doc.at("labels").get<std::vector<int>>();
    const std::string source = doc.value("source", "fused");
    if (source == "coarse") out.source = LabelSource::Coarse;
    else if (source == "spread") out.source = LabelSource::Spread;
    else out.source = LabelSource::Fused;
    if (prompts) *prompts = doc.at("prompts").get<std::vector<std::string>>();
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

}  // namespace seggrasp
