#include "seggrasp/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "seggrasp/error.hpp"
#include "seggrasp/parallel.hpp"
#include "seggrasp/random.hpp"

namespace seggrasp {

namespace {

using nlohmann::json;

const char* weighting_name(IouWeighting w) { return w == IouWeighting::FaceArea ? "face_area" : "face_count"; }
const char* norm_name(RevNorm n) { return n == RevNorm::Paper ? "paper" : "mean"; }

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("config key '") + key + "': " + e.what());
  }
}

json noise_to_json(const NoiseConfig& n) {
  return {{"jitter_frac", n.jitter_frac},
          {"conf_noise", n.conf_noise},
          {"drop_prob", n.drop_prob},
          {"spurious_rate", n.spurious_rate},
          {"min_pixels", n.min_pixels}};
}

NoiseConfig noise_from_json(const json& doc) {
  NoiseConfig n;
  n.jitter_frac = get_or(doc, "jitter_frac", n.jitter_frac);
  n.conf_noise = get_or(doc, "conf_noise", n.conf_noise);
  n.drop_prob = get_or(doc, "drop_prob", n.drop_prob);
  n.spurious_rate = get_or(doc, "spurious_rate", n.spurious_rate);
  n.min_pixels = get_or(doc, "min_pixels", n.min_pixels);
  if (n.jitter_frac < 0 || n.conf_noise < 0 || n.drop_prob < 0 || n.drop_prob > 1 || n.spurious_rate < 0) {
    throw Error(ErrorKind::InvalidArgument, "noise parameters out of range");
  }
  return n;
}

struct Case {
  TriMesh mesh;
  GroundTruthLabels labels;
  int prompt_count = 0;
  double grasp_width = 0.0;
  std::uint64_t seed = 0;
};

Case make_case(const ExperimentConfig& config, int index) {
  Case c;
  c.seed = derive_seed(config.seed, static_cast<std::uint64_t>(index));
  if (index < config.fixture_count) {
    const Archetype archetype = config.archetypes[index % config.archetypes.size()];
    Fixture fx = make_fixture(archetype, c.seed);
    c.mesh = std::move(fx.mesh);
    c.labels = std::move(fx.labels);
    c.prompt_count = fx.prompts.size();
    c.grasp_width = fx.grasp_width;
    return c;
  }
  const ExternalCase& ext = config.external[index - config.fixture_count];
  c.mesh = load_mesh(ext.mesh);
  c.labels = load_labels(ext.labels);
  c.prompt_count = PromptSet(ext.prompts).size();
  c.labels.validate(c.mesh.face_count(), c.prompt_count);
  c.grasp_width = ext.grasp_width > 0.0 ? ext.grasp_width : 0.2 * c.mesh.bounding_radius();
  return c;
}

// Finest parts whose faces disagree on their fine-opt row or label.
int fineopt_violations(const ScoreMatrix& refined, const LabelMap& labels, const Decomposition& finest) {
  int violations = 0;
  for (const auto& part : finest.parts()) {
    const int first = part.front();
    for (int f : part) {
      if (refined.row(f) != refined.row(first) || labels.label[f] != labels.label[first]) {
        ++violations;
        break;
      }
    }
  }
  return violations;
}

struct CaseResult {
  std::vector<double> miou;
  std::vector<SelectionOutcome> outcomes;
  std::vector<double> pose_variance;
  std::vector<double> sweep_fusion;
  std::vector<double> sweep_spreading;
  int fineopt_violations = 0;
};

CaseResult run_case(const ExperimentConfig& config, int index) {
  const Case c = make_case(config, index);
  CoarseOptions coarse_options;
  coarse_options.view_count = config.view_count;
  coarse_options.image = ImageSize{config.image_size, config.image_size};
  coarse_options.seed = c.seed;
  coarse_options.workers = 1;
  const CoarseStage stage = run_coarse_mock(c.mesh, c.labels, c.prompt_count, config.noise, coarse_options);

  const std::vector<double> values = threshold_values(config.th_min, config.th_max, config.th_step);
  std::vector<Decomposition> decomps = decompose_thresholds(c.mesh, values);
  const ThresholdLadder ladder = dedup_ladder(decomps);

  // Grasp candidates and their nearest faces do not depend on the variant.
  std::vector<GraspCandidate> candidates;
  std::vector<PartAssignment> assignments;
  try {
    candidates = sample_antipodal(c.mesh, config.grasp_count, c.grasp_width, derive_seed(c.seed, 3));
    LabelMap truth_map{c.labels.face_label, LabelSource::Coarse};
    assignments = assign_parts(candidates, c.mesh, truth_map, 1);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoValidGrasps) throw;
  }
  const int target = 0;

  CaseResult out;
  for (Variant variant : config.variants) {
    const ScoreMatrix refined = refine_scores(stage.scores, c.mesh, ladder, variant, config.rev_norm);
    const LabelMap pred = argmax_labels(refined, label_source(variant));
    out.miou.push_back(miou(pred, c.labels, c.mesh, config.weighting).miou);
    if (variant == Variant::Full || variant == Variant::CoarseFineOpt) {
      out.fineopt_violations += fineopt_violations(refined, pred, ladder.finest());
    }

    std::vector<PartAssignment> relabeled = assignments;
    for (auto& a : relabeled) a.part_label = pred.label[a.face_index];
    SelectionOutcome outcome = SelectionOutcome::Empty;
    double pose = std::numeric_limits<double>::quiet_NaN();
    if (!candidates.empty()) {
      try {
        const std::vector<int> picked = select_grasp_indices(relabeled, candidates, target, config.top_k);
        const int top = picked.front();
        outcome = c.labels.face_label[relabeled[top].face_index] == target ? SelectionOutcome::Correct
                                                                           : SelectionOutcome::Wrong;
        std::vector<Eigen::Quaterniond> q;
        for (int i : picked) q.push_back(candidates[i].orientation);
        pose = quaternion_variance(q);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::EmptySelection) throw;
      }
    }
    out.outcomes.push_back(outcome);
    out.pose_variance.push_back(pose);
  }

  if (config.sweep) {
    for (std::size_t s = 0; s < decomps.size(); ++s) {
      const ThresholdLadder sub = dedup_ladder(std::vector<Decomposition>(decomps.begin() + s, decomps.end()));
      const LabelMap fused =
          argmax_labels(geo_fusion(stage.scores, c.mesh, sub, config.rev_norm), LabelSource::Fused);
      const LabelMap spread = argmax_labels(geo_spreading(stage.scores, c.mesh, sub), LabelSource::Spread);
      out.sweep_fusion.push_back(miou(fused, c.labels, c.mesh, config.weighting).miou);
      out.sweep_spreading.push_back(miou(spread, c.labels, c.mesh, config.weighting).miou);
    }
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double sum = 0.0;
  for (double x : v) sum += (x - m) * (x - m);
  return std::sqrt(sum / static_cast<double>(v.size()));
}

}  // namespace

void validate_experiment_config(const ExperimentConfig& c) {
  if (c.fixture_count < 0) throw Error(ErrorKind::InvalidArgument, "fixture_count must be >= 0");
  if (c.fixture_count > 0 && c.archetypes.empty()) throw Error(ErrorKind::InvalidArgument, "no archetypes");
  if (c.fixture_count + static_cast<int>(c.external.size()) == 0) {
    throw Error(ErrorKind::InvalidArgument, "experiment has no cases");
  }
  if (c.variants.empty()) throw Error(ErrorKind::InvalidArgument, "no variants");
  if (c.view_count < 1 || c.image_size < 1) throw Error(ErrorKind::InvalidArgument, "bad view setup");
  if (c.grasp_count < 1 || c.top_k < 1) throw Error(ErrorKind::InvalidArgument, "grasp_count and top_k must be >= 1");
  threshold_values(c.th_min, c.th_max, c.th_step);
}

ExperimentConfig experiment_config_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::Parse, "experiment config must be a JSON object");
  ExperimentConfig c;
  if (doc.contains("archetypes")) {
    c.archetypes.clear();
    for (const auto& name : get_or<std::vector<std::string>>(doc, "archetypes", {})) {
      c.archetypes.push_back(parse_archetype(name));
    }
  }
  c.fixture_count = get_or(doc, "fixture_count", c.fixture_count);
  c.seed = get_or(doc, "seed", c.seed);
  if (doc.contains("noise")) c.noise = noise_from_json(doc.at("noise"));
  if (doc.contains("variants")) {
    c.variants.clear();
    for (const auto& name : get_or<std::vector<std::string>>(doc, "variants", {})) {
      c.variants.push_back(parse_variant(name));
    }
  }
  c.view_count = get_or(doc, "view_count", c.view_count);
  c.image_size = get_or(doc, "image_size", c.image_size);
  if (doc.contains("thresholds")) {
    const json& t = doc.at("thresholds");
    c.th_min = get_or(t, "min", c.th_min);
    c.th_max = get_or(t, "max", c.th_max);
    c.th_step = get_or(t, "step", c.th_step);
  }
  const std::string norm = get_or<std::string>(doc, "rev_norm", norm_name(c.rev_norm));
  if (norm == "paper") {
    c.rev_norm = RevNorm::Paper;
  } else if (norm == "mean") {
    c.rev_norm = RevNorm::Mean;
  } else {
    throw Error(ErrorKind::InvalidArgument, "rev_norm must be 'paper' or 'mean'");
  }
  const std::string weighting = get_or<std::string>(doc, "weighting", weighting_name(c.weighting));
  if (weighting == "face_area") {
    c.weighting = IouWeighting::FaceArea;
  } else if (weighting == "face_count") {
    c.weighting = IouWeighting::FaceCount;
  } else {
    throw Error(ErrorKind::InvalidArgument, "weighting must be 'face_area' or 'face_count'");
  }
  c.grasp_count = get_or(doc, "grasp_count", c.grasp_count);
  c.top_k = get_or(doc, "top_k", c.top_k);
  c.sweep = get_or(doc, "sweep", c.sweep);
  c.workers = get_or(doc, "workers", c.workers);
  if (doc.contains("external")) {
    for (const auto& e : doc.at("external")) {
      ExternalCase ext;
      ext.mesh = get_or<std::string>(e, "mesh", "");
      ext.labels = get_or<std::string>(e, "labels", "");
      ext.prompts = get_or<std::vector<std::string>>(e, "prompts", {});
      ext.grasp_width = get_or(e, "grasp_width", 0.0);
      c.external.push_back(std::move(ext));
    }
  }

  validate_experiment_config(c);
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  return experiment_config_from_json(doc);
}

json experiment_config_to_json(const ExperimentConfig& c) {
  json archetypes = json::array();
  for (Archetype a : c.archetypes) archetypes.push_back(to_string(a));
  json variants = json::array();
  for (Variant v : c.variants) variants.push_back(to_string(v));
  json external = json::array();
  for (const auto& e : c.external) {
    external.push_back(
        {{"mesh", e.mesh.string()}, {"labels", e.labels.string()}, {"prompts", e.prompts}, {"grasp_width", e.grasp_width}});
  }
  return {{"archetypes", archetypes},
          {"fixture_count", c.fixture_count},
          {"external", external},
          {"seed", c.seed},
          {"noise", noise_to_json(c.noise)},
          {"variants", variants},
          {"view_count", c.view_count},
          {"image_size", c.image_size},
          {"thresholds", {{"min", c.th_min}, {"max", c.th_max}, {"step", c.th_step}}},
          {"rev_norm", norm_name(c.rev_norm)},
          {"weighting", weighting_name(c.weighting)},
          {"grasp_count", c.grasp_count},
          {"top_k", c.top_k},
          {"sweep", c.sweep}};
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = experiment_config_to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate_experiment_config(config);
  const int case_count = config.fixture_count + static_cast<int>(config.external.size());
  std::vector<CaseResult> results(case_count);
  parallel_for(case_count, config.workers, [&](int i) { results[i] = run_case(config, i); });

  ExperimentReport report;
  report.case_count = case_count;
  report.config_hash = config_hash(config);
  for (std::size_t v = 0; v < config.variants.size(); ++v) {
    VariantResult r;
    r.variant = config.variants[v];
    std::vector<double> poses;
    for (const auto& res : results) {
      r.miou.push_back(res.miou[v]);
      r.outcomes.push_back(res.outcomes[v]);
      r.pose_variance.push_back(res.pose_variance[v]);
      if (!std::isnan(res.pose_variance[v])) poses.push_back(res.pose_variance[v]);
    }
    r.miou_mean = mean_of(r.miou);
    r.miou_std = population_std(r.miou);
    r.part_sel = part_selection_accuracy(r.outcomes);
    r.pose_var = mean_of(poses);
    report.variants.push_back(std::move(r));
  }
  for (const auto& res : results) report.fineopt_violations += res.fineopt_violations;

  if (config.sweep) {
    const std::vector<double> values = threshold_values(config.th_min, config.th_max, config.th_step);
    for (std::size_t s = 0; s < values.size(); ++s) {
      SweepPoint p;
      p.threshold = values[s];
      for (const auto& res : results) {
        p.geofusion_per_case.push_back(res.sweep_fusion[s]);
        p.spreading_per_case.push_back(res.sweep_spreading[s]);
      }
      p.geofusion_miou = mean_of(p.geofusion_per_case);
      p.spreading_miou = mean_of(p.spreading_per_case);
      report.sweep.push_back(std::move(p));
    }
  }
  return report;
}

json report_to_json(const ExperimentReport& report) {
  json variants = json::array();
  for (const auto& v : report.variants) {
    variants.push_back({{"name", to_string(v.variant)},
                        {"miou_mean", v.miou_mean},
                        {"miou_std", v.miou_std},
                        {"part_sel", v.part_sel},
                        {"pose_var", v.pose_var}});
  }
  json doc = {{"variants", variants}, {"config_hash", report.config_hash}};
  if (!report.sweep.empty()) {
    json sweep = json::array();
    for (const auto& p : report.sweep) {
      sweep.push_back({{"threshold", p.threshold}, {"geofusion", p.geofusion_miou}, {"spreading", p.spreading_miou}});
    }
    doc["sweep"] = sweep;
  }
  return doc;
}

std::string report_table(const ExperimentReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-16s %10s %10s %10s %10s\n", "variant", "mIoU", "std", "part_sel", "pose_var");
  out << line;
  for (const auto& v : report.variants) {
    std::snprintf(line, sizeof(line), "%-16s %10.4f %10.4f %10.4f %10.4f\n", to_string(v.variant), v.miou_mean,
                  v.miou_std, v.part_sel, v.pose_var);
    out << line;
  }
  out << "cases: " << report.case_count << "  config: " << report.config_hash << "\n";
  return out.str();
}

std::string sweep_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "threshold,geofusion,spreading\n";
  char line[96];
  for (const auto& p : report.sweep) {
    std::snprintf(line, sizeof(line), "%.10g,%.10f,%.10f\n", p.threshold, p.geofusion_miou, p.spreading_miou);
    out << line;
  }
  return out.str();
}

}  // namespace seggrasp
