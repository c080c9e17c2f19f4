#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "leafdx/classifier.hpp"
#include "leafdx/image.hpp"
#include "leafdx/segmentation.hpp"
#include "leafdx/texture.hpp"

namespace leafdx {

struct SelectConfig {
  /// Clusters holding more than this share of the border are background.
  double border_threshold = 0.5;
  std::optional<int> override_cluster;
};

/// Effective configuration of every pipeline command. One master seed
/// derives all sub-seeds (image i of a dataset scan uses mix_seed(seed, i)).
struct PipelineConfig {
  std::uint64_t seed = 0;
  std::optional<std::pair<int, int>> resize;  // absent = keep input size
  std::optional<double> gamma;                // enhance step, off by default
  GaConfig ga;
  SelectConfig select;
  GlcmConfig glcm;
  KernelSpec kernel;
  SvmParams svm;

  void validate() const;
};

/// JSON echo of the effective config (schema version 1, stable key order).
nlohmann::json config_to_json(const PipelineConfig& cfg);

/// Applies the keys present in j onto cfg; unknown keys are an error.
void config_apply_json(PipelineConfig& cfg, const nlohmann::json& j);

/// Defaults overlaid with the file's values; requires "version": 1.
PipelineConfig load_pipeline_config(const std::string& path);

struct SegmentResult {
  RasterImage processed;  // RGB after resize / optional enhancement
  RasterImage ycbcr;
  GaResult ga;
  int selected_cluster = -1;
  RasterImage mask;  // Gray {0,255}, selected (diseased) cluster
};

/// load → resize → optional gamma_enhance → rgb_to_ycbcr → run_ga →
/// select_diseased_cluster. image_seed seeds the GA.
SegmentResult run_segmentation(const RasterImage& rgb,
                               const PipelineConfig& cfg,
                               std::uint64_t image_seed);

/// GLCM features of the luma over the segmented lesion mask.
FeatureVector featurize(const SegmentResult& seg, const GlcmConfig& glcm);

struct DatasetEntry {
  std::string path;   // image file
  std::string label;  // parent directory name
};

/// Scans <root>/<label>/*.png (plus .ppm/.pnm), skipping *.mask.png and
/// manifest files; sorted by label then filename.
std::vector<DatasetEntry> scan_dataset(const std::string& root);

/// Segment + featurize every entry; entry i uses mix_seed(cfg.seed, i).
Dataset featurize_dataset(const std::vector<DatasetEntry>& entries,
                          const PipelineConfig& cfg);

/// CSV rows "label,f1,f2,f3,f4,f5" (no header, full double precision).
Dataset load_feature_csv(const std::string& path);
void append_feature_csv(const std::string& path, const std::string& label,
                        const FeatureVector& features);

/// Deterministic stratified split: returns the indices (sorted) that go to
/// the eval side, floor(eval_fraction * count) per label.
std::vector<std::size_t> stratified_eval_indices(
    const std::vector<std::string>& labels, double eval_fraction,
    std::uint64_t seed);

}  // namespace leafdx
