#include "seggrasp/pipeline.hpp"

#include "seggrasp/error.hpp"
#include "seggrasp/random.hpp"

namespace seggrasp {

const char* to_string(Variant variant) {
  switch (variant) {
    case Variant::Coarse: return "coarse";
    case Variant::CoarseFusion: return "coarse+fusion";
    case Variant::CoarseFineOpt: return "coarse+fineopt";
    case Variant::Full: return "full";
    case Variant::Spreading: return "spreading";
  }
  return "coarse";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : {Variant::Coarse, Variant::CoarseFusion, Variant::CoarseFineOpt, Variant::Full,
                    Variant::Spreading}) {
    if (name == to_string(v)) return v;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown variant '" + name + "'");
}

LabelSource label_source(Variant variant) {
  switch (variant) {
    case Variant::Coarse: return LabelSource::Coarse;
    case Variant::Spreading: return LabelSource::Spread;
    default: return LabelSource::Fused;
  }
}

ScoreMatrix refine_scores(const ScoreMatrix& coarse, const TriMesh& mesh, const ThresholdLadder& ladder,
                          Variant variant, RevNorm norm) {
  switch (variant) {
    case Variant::Coarse: return coarse;
    case Variant::CoarseFusion: return multi_fusion(coarse, mesh, ladder, norm);
    case Variant::CoarseFineOpt: return fine_opt(coarse, mesh, ladder.finest());
    case Variant::Full: return geo_fusion(coarse, mesh, ladder, norm);
    case Variant::Spreading: return geo_spreading(coarse, mesh, ladder);
  }
  return coarse;
}

namespace {

CoarseStage render_stage(const TriMesh& mesh, const CoarseOptions& options) {
  CoarseStage stage;
  stage.cameras = make_view_sphere(options.view_count, mesh, derive_seed(options.seed, 1), options.image);
  stage.buffers = render_views(mesh, stage.cameras, options.workers);
  return stage;
}

}  // namespace

CoarseStage run_coarse_mock(const TriMesh& mesh, const GroundTruthLabels& truth, int prompt_count,
                            const NoiseConfig& noise, const CoarseOptions& options) {
  truth.validate(mesh.face_count(), prompt_count);
  CoarseStage stage = render_stage(mesh, options);
  stage.detections =
      mock_detect_views(stage.buffers, truth, prompt_count, noise, derive_seed(options.seed, 2), options.workers);
  stage.scores = coarse_scores(mesh, stage.buffers, stage.detections, prompt_count, options.workers);
  return stage;
}

CoarseStage run_coarse_external(const TriMesh& mesh, std::vector<Detection> detections, int prompt_count,
                                const CoarseOptions& options) {
  CoarseStage stage = render_stage(mesh, options);
  stage.detections = std::move(detections);
  stage.scores = coarse_scores(mesh, stage.buffers, stage.detections, prompt_count, options.workers);
  return stage;
}

}  // namespace seggrasp
