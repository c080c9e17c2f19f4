#include "leafdx/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "leafdx/image_io.hpp"
#include "leafdx/rng.hpp"

namespace leafdx {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int direction_degrees(GlcmDirection d) {
  switch (d) {
    case GlcmDirection::Deg0: return 0;
    case GlcmDirection::Deg45: return 45;
    case GlcmDirection::Deg90: return 90;
    case GlcmDirection::Deg135: return 135;
  }
  return -1;
}

GlcmDirection direction_from_degrees(int deg) {
  switch (deg) {
    case 0: return GlcmDirection::Deg0;
    case 45: return GlcmDirection::Deg45;
    case 90: return GlcmDirection::Deg90;
    case 135: return GlcmDirection::Deg135;
  }
  throw Error("config: glcm direction must be one of 0, 45, 90, 135");
}

void apply_ga(GaConfig& ga, const json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "k") ga.k = value.get<int>();
    else if (key == "population_size") ga.population_size = value.get<int>();
    else if (key == "generations") ga.generations = value.get<int>();
    else if (key == "crossover_rate") ga.crossover_rate = value.get<double>();
    else if (key == "mutation_rate") ga.mutation_rate = value.get<double>();
    else if (key == "mutation_sigma") ga.mutation_sigma = value.get<double>();
    else if (key == "elitism") ga.elitism = value.get<int>();
    else if (key == "stagnation_window")
      ga.stagnation_window = value.get<int>();
    else throw Error("config: unknown ga key '" + key + "'");
  }
}

void apply_select(SelectConfig& sel, const json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "border_threshold") sel.border_threshold = value.get<double>();
    else if (key == "override_cluster") {
      if (value.is_null()) sel.override_cluster.reset();
      else sel.override_cluster = value.get<int>();
    } else {
      throw Error("config: unknown select key '" + key + "'");
    }
  }
}

void apply_glcm(GlcmConfig& glcm, const json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "levels") glcm.levels = value.get<int>();
    else if (key == "distance") glcm.distance = value.get<int>();
    else if (key == "masked") glcm.masked = value.get<bool>();
    else if (key == "symmetric") {
      if (!value.is_boolean() || !value.get<bool>())
        throw Error("config: glcm.symmetric must be true");
    } else if (key == "directions") {
      if (!value.is_array() || value.empty())
        throw Error("config: glcm.directions must be a non-empty array");
      glcm.directions.clear();
      for (const json& deg : value)
        glcm.directions.push_back(direction_from_degrees(deg.get<int>()));
    } else {
      throw Error("config: unknown glcm key '" + key + "'");
    }
  }
}

void apply_kernel(KernelSpec& kernel, const json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") kernel.kind = parse_kernel_kind(value.get<std::string>());
    else if (key == "rbf_gamma") {
      if (value.is_null()) kernel.rbf_gamma.reset();
      else kernel.rbf_gamma = value.get<double>();
    } else if (key == "poly_degree") {
      kernel.poly_degree = value.get<int>();
    } else if (key == "poly_coef0") {
      kernel.poly_coef0 = value.get<double>();
    } else {
      throw Error("config: unknown kernel key '" + key + "'");
    }
  }
}

void apply_svm(SvmParams& svm, const json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "c") svm.c = value.get<double>();
    else if (key == "tol") svm.tol = value.get<double>();
    else if (key == "max_passes") svm.max_passes = value.get<int>();
    else throw Error("config: unknown svm key '" + key + "'");
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (resize && (resize->first < 1 || resize->second < 1))
    throw Error("config: resize dimensions must be positive");
  if (gamma && *gamma <= 0.0) throw Error("config: gamma must be positive");
  if (select.border_threshold < 0.0 || select.border_threshold > 1.0)
    throw Error("config: select.border_threshold must be in [0, 1]");
  if (select.override_cluster && *select.override_cluster < 0)
    throw Error("config: select.override_cluster must be non-negative");
  if (kernel.rbf_gamma && *kernel.rbf_gamma <= 0.0)
    throw Error("config: kernel.rbf_gamma must be positive");
  if (kernel.poly_degree < 1)
    throw Error("config: kernel.poly_degree must be at least 1");
  ga.validate();
  glcm.validate();
  svm.validate();
}

json config_to_json(const PipelineConfig& cfg) {
  json j;
  j["version"] = 1;
  j["seed"] = cfg.seed;
  j["resize"] = cfg.resize ? json::array({cfg.resize->first,
                                          cfg.resize->second})
                           : json(nullptr);
  j["gamma"] = cfg.gamma ? json(*cfg.gamma) : json(nullptr);
  j["ga"] = {{"k", cfg.ga.k},
             {"population_size", cfg.ga.population_size},
             {"generations", cfg.ga.generations},
             {"crossover_rate", cfg.ga.crossover_rate},
             {"mutation_rate", cfg.ga.mutation_rate},
             {"mutation_sigma", cfg.ga.mutation_sigma},
             {"elitism", cfg.ga.elitism},
             {"stagnation_window", cfg.ga.stagnation_window}};
  j["select"] = {{"border_threshold", cfg.select.border_threshold},
                 {"override_cluster",
                  cfg.select.override_cluster
                      ? json(*cfg.select.override_cluster)
                      : json(nullptr)}};
  json dirs = json::array();
  for (GlcmDirection d : cfg.glcm.directions)
    dirs.push_back(direction_degrees(d));
  j["glcm"] = {{"levels", cfg.glcm.levels},
               {"distance", cfg.glcm.distance},
               {"directions", dirs},
               {"masked", cfg.glcm.masked},
               {"symmetric", true}};
  j["kernel"] = {{"kind", to_string(cfg.kernel.kind)},
                 {"rbf_gamma", cfg.kernel.rbf_gamma
                                   ? json(*cfg.kernel.rbf_gamma)
                                   : json(nullptr)},
                 {"poly_degree", cfg.kernel.poly_degree},
                 {"poly_coef0", cfg.kernel.poly_coef0}};
  j["svm"] = {{"c", cfg.svm.c},
              {"tol", cfg.svm.tol},
              {"max_passes", cfg.svm.max_passes}};
  return j;
}

void config_apply_json(PipelineConfig& cfg, const json& j) {
  if (!j.is_object()) throw Error("config: expected a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "version") {
        if (!value.is_number_integer() || value.get<int>() != 1)
          throw Error("config: unsupported schema version");
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "resize") {
        if (value.is_null()) {
          cfg.resize.reset();
        } else {
          if (!value.is_array() || value.size() != 2)
            throw Error("config: resize must be [width, height] or null");
          cfg.resize = {value.at(0).get<int>(), value.at(1).get<int>()};
        }
      } else if (key == "gamma") {
        if (value.is_null()) cfg.gamma.reset();
        else cfg.gamma = value.get<double>();
      } else if (key == "ga") {
        apply_ga(cfg.ga, value);
      } else if (key == "select") {
        apply_select(cfg.select, value);
      } else if (key == "glcm") {
        apply_glcm(cfg.glcm, value);
      } else if (key == "kernel") {
        apply_kernel(cfg.kernel, value);
      } else if (key == "svm") {
        apply_svm(cfg.svm, value);
      } else {
        throw Error("config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("config: cannot parse " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("version"))
    throw Error("config: " + path + " is missing the version field");
  PipelineConfig cfg;
  config_apply_json(cfg, j);
  return cfg;
}

SegmentResult run_segmentation(const RasterImage& rgb,
                               const PipelineConfig& cfg,
                               std::uint64_t image_seed) {
  cfg.validate();
  if (rgb.space() != ColorSpace::Rgb)
    throw Error("run_segmentation: expected an RGB image");

  SegmentResult result;
  result.processed = rgb;
  if (cfg.resize) {
    result.processed =
        resize(result.processed, cfg.resize->first, cfg.resize->second);
  }
  if (cfg.gamma) {
    result.processed = gamma_enhance(result.processed, GammaParams{*cfg.gamma});
  }
  result.ycbcr = rgb_to_ycbcr(result.processed);

  GaConfig ga = cfg.ga;
  ga.seed = image_seed;
  result.ga = run_ga(result.ycbcr, ga);

  const int w = result.ycbcr.width();
  const int h = result.ycbcr.height();
  result.selected_cluster =
      select_diseased_cluster(result.ga.assignment, w, h,
                              cfg.select.border_threshold,
                              cfg.select.override_cluster);
  result.mask =
      extract_cluster_mask(result.ga.assignment, result.selected_cluster, w, h);
  return result;
}

FeatureVector featurize(const SegmentResult& seg, const GlcmConfig& glcm) {
  return extract_features(seg.ycbcr, PixelMask::from_image(seg.mask), glcm);
}

std::vector<DatasetEntry> scan_dataset(const std::string& root) {
  if (!fs::is_directory(root))
    throw Error("dataset root is not a directory: " + root);

  static const std::set<std::string> kImageExts = {".png", ".ppm", ".pnm"};
  std::vector<DatasetEntry> entries;
  std::vector<fs::path> label_dirs;
  for (const fs::directory_entry& e : fs::directory_iterator(root)) {
    if (e.is_directory()) label_dirs.push_back(e.path());
  }
  std::sort(label_dirs.begin(), label_dirs.end());

  for (const fs::path& dir : label_dirs) {
    const std::string label = dir.filename().string();
    std::vector<std::string> files;
    for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
      if (!e.is_regular_file()) continue;
      const std::string name = e.path().filename().string();
      if (kImageExts.count(e.path().extension().string()) == 0) continue;
      if (name.size() > 9 && name.substr(name.size() - 9) == ".mask.png")
        continue;
      files.push_back(e.path().string());
    }
    if (files.empty())
      throw Error("label '" + label + "' has no usable images");
    std::sort(files.begin(), files.end());
    for (std::string& f : files) entries.push_back({std::move(f), label});
  }
  if (entries.empty()) throw Error("no label directories under " + root);
  return entries;
}

Dataset featurize_dataset(const std::vector<DatasetEntry>& entries,
                          const PipelineConfig& cfg) {
  Dataset out;
  out.samples.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const RasterImage img = load_image(entries[i].path);
    const SegmentResult seg =
        run_segmentation(img, cfg, mix_seed(cfg.seed, i));
    const FeatureVector fv = featurize(seg, cfg.glcm);
    out.samples.push_back(
        {std::vector<double>(fv.begin(), fv.end()), entries[i].label});
  }
  return out;
}

Dataset load_feature_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open feature CSV: " + path);
  Dataset out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 6)
      throw Error("feature CSV " + path + " line " + std::to_string(lineno) +
                  ": expected label plus 5 features");
    Sample s;
    s.label = fields[0];
    for (int f = 1; f <= 5; ++f) {
      try {
        s.features.push_back(std::stod(fields[f]));
      } catch (const std::exception&) {
        throw Error("feature CSV " + path + " line " + std::to_string(lineno) +
                    ": bad number '" + fields[f] + "'");
      }
    }
    out.samples.push_back(std::move(s));
  }
  if (out.samples.empty()) throw Error("feature CSV " + path + " is empty");
  return out;
}

void append_feature_csv(const std::string& path, const std::string& label,
                        const FeatureVector& features) {
  if (label.find(',') != std::string::npos)
    throw Error("feature CSV labels must not contain commas");
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot open feature CSV for append: " + path);
  out << label;
  char buf[64];
  for (double v : features) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << "," << buf;
  }
  out << "\n";
  if (!out.good()) throw Error("failed writing feature CSV: " + path);
}

std::vector<std::size_t> stratified_eval_indices(
    const std::vector<std::string>& labels, double eval_fraction,
    std::uint64_t seed) {
  if (eval_fraction < 0.0 || eval_fraction > 1.0)
    throw Error("eval fraction must be in [0, 1]");
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_label[labels[i]].push_back(i);

  std::vector<std::size_t> eval;
  std::uint64_t label_index = 0;
  for (auto& [label, indices] : by_label) {
    std::mt19937_64 rng(mix_seed(seed, label_index++));
    std::shuffle(indices.begin(), indices.end(), rng);
    const std::size_t take =
        static_cast<std::size_t>(eval_fraction * indices.size());
    eval.insert(eval.end(), indices.begin(), indices.begin() + take);
  }
  std::sort(eval.begin(), eval.end());
  return eval;
}

}  // namespace leafdx
