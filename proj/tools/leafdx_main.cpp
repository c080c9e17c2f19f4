#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "leafdx/classifier.hpp"
#include "leafdx/image_io.hpp"
#include "leafdx/pipeline.hpp"
#include "leafdx/rng.hpp"
#include "leafdx/synth.hpp"
#include "leafdx/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace leafdx;

namespace {

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool json_out = false;
  std::string out_dir;
};

void add_common(CLI::App* sub, CommonOpts& c, const std::string& default_out) {
  sub->add_option("--config", c.config_path, "pipeline config JSON");
  CLI::Option* seed_opt =
      sub->add_option("--seed", c.seed, "master seed (overrides config)");
  seed_opt->each([&c](const std::string&) { c.seed_given = true; });
  sub->add_flag("--json", c.json_out, "print the JSON report to stdout");
  c.out_dir = default_out;
  sub->add_option("--out", c.out_dir, "output directory");
}

PipelineConfig effective_config(const CommonOpts& c) {
  PipelineConfig cfg;
  if (!c.config_path.empty()) cfg = load_pipeline_config(c.config_path);
  if (c.seed_given) cfg.seed = c.seed;
  cfg.validate();
  return cfg;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir + ": " +
                      ec.message());
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out.good()) throw Error("failed writing " + path);
}

json base_report(const PipelineConfig& cfg) {
  json j;
  j["version"] = kVersionString;
  j["config"] = config_to_json(cfg);
  return j;
}

RasterImage make_overlay(const RasterImage& rgb, const RasterImage& mask) {
  RasterImage out = rgb;
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      if (mask.at(0, y, x) > 127.5) {
        out.at(0, y, x) = 0.5 * out.at(0, y, x) + 0.5 * 230.0;
        out.at(1, y, x) = 0.5 * out.at(1, y, x) + 0.5 * 30.0;
        out.at(2, y, x) = 0.5 * out.at(2, y, x) + 0.5 * 30.0;
      }
    }
  }
  return out;
}

json features_to_json(const TextureFeatures& f) {
  return {{"contrast", f.contrast},       {"energy", f.energy},
          {"dissimilarity", f.dissimilarity}, {"entropy", f.entropy},
          {"correlation", f.correlation}, {"mu", f.mu},
          {"sigma2", f.sigma2}};
}

// --- segment ---------------------------------------------------------------

void run_segment(const CommonOpts& common, const std::string& image_path) {
  const PipelineConfig cfg = effective_config(common);
  const RasterImage rgb = load_image(image_path);
  const SegmentResult seg =
      run_segmentation(rgb, cfg, mix_seed(cfg.seed, 0));
  ensure_out_dir(common.out_dir);

  const int w = seg.ycbcr.width();
  const int h = seg.ycbcr.height();
  json report = base_report(cfg);
  report["image"] = image_path;
  report["width"] = w;
  report["height"] = h;
  report["selected_cluster"] = seg.selected_cluster;
  report["fitness"] = seg.ga.fitness;
  report["generations_run"] = seg.ga.generations_run;

  json clusters = json::array();
  json cluster_files = json::array();
  for (std::size_t i = 0; i < seg.ga.assignment.counts.size(); ++i) {
    const Pixel3& c = seg.ga.assignment.centroids[i];
    clusters.push_back({{"index", i},
                        {"pixels", seg.ga.assignment.counts[i]},
                        {"centroid", {c[0], c[1], c[2]}}});
    const std::string name = "cluster_" + std::to_string(i) + ".png";
    save_image(extract_cluster_mask(seg.ga.assignment, static_cast<int>(i),
                                    w, h),
               (fs::path(common.out_dir) / name).string());
    cluster_files.push_back(name);
  }
  report["clusters"] = clusters;

  save_image(seg.mask, (fs::path(common.out_dir) / "mask.png").string());
  save_image(make_overlay(seg.processed, seg.mask),
             (fs::path(common.out_dir) / "overlay.png").string());
  report["outputs"] = {{"mask", "mask.png"},
                       {"overlay", "overlay.png"},
                       {"clusters", cluster_files}};
  write_json_file((fs::path(common.out_dir) / "report.json").string(),
                  report);

  if (common.json_out) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << "selected cluster " << seg.selected_cluster << " of "
              << seg.ga.assignment.counts.size() << " (fitness "
              << seg.ga.fitness << ", " << seg.ga.generations_run
              << " generations)\n"
              << "outputs in " << common.out_dir << ": report.json mask.png "
              << "overlay.png + " << cluster_files.size()
              << " cluster masks\n";
  }
}

// --- features ----------------------------------------------------------------

void run_features(const CommonOpts& common, const std::string& image_path,
                  const std::string& mask_path, const std::string& csv_path,
                  const std::string& csv_label) {
  const PipelineConfig cfg = effective_config(common);
  const RasterImage img = load_image(image_path);
  const RasterImage mask_img = load_image(mask_path);
  if (mask_img.width() != img.width() || mask_img.height() != img.height())
    throw Error("image and mask dimensions differ");
  const PixelMask mask = PixelMask::from_image(mask_img);
  const FeatureReport fr = extract_features_full(img, mask, cfg.glcm);

  json report = base_report(cfg);
  report["image"] = image_path;
  report["mask"] = mask_path;
  report["mask_pixels"] = fr.mask_pixels;
  json dirs = json::array();
  for (const DirectionFeatures& d : fr.per_direction) {
    json dj = features_to_json(d.features);
    dj["direction"] = to_string(d.direction);
    dirs.push_back(dj);
  }
  report["per_direction"] = dirs;
  report["mean"] = features_to_json(fr.mean);
  report["features"] = fr.vector;

  if (!csv_path.empty()) {
    if (csv_label.empty())
      throw Error("--csv requires --label for the row label");
    append_feature_csv(csv_path, csv_label, fr.vector);
    report["csv"] = csv_path;
  }
  if (!common.out_dir.empty()) {
    ensure_out_dir(common.out_dir);
    write_json_file((fs::path(common.out_dir) / "features.json").string(),
                    report);
  }

  if (common.json_out) {
    std::cout << report.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < fr.vector.size(); ++i) {
      std::cout << kFeatureNames[i] << ": " << fr.vector[i] << "\n";
    }
    std::cout << "(mask pixels: " << fr.mask_pixels << ", directions: "
              << fr.per_direction.size() << ")\n";
  }
}

// --- train -------------------------------------------------------------------

void run_train(const CommonOpts& common, const std::string& root,
               const std::string& csv_path) {
  const PipelineConfig cfg = effective_config(common);
  if (root.empty() && csv_path.empty())
    throw Error("provide a dataset root or --features-csv");
  if (!root.empty() && !csv_path.empty())
    throw Error("dataset root and --features-csv are mutually exclusive");

  Dataset ds;
  if (!csv_path.empty()) {
    ds = load_feature_csv(csv_path);
  } else {
    ds = featurize_dataset(scan_dataset(root), cfg);
  }
  const MulticlassModel model =
      train_multiclass(ds, cfg.kernel, cfg.svm, cfg.seed);

  ensure_out_dir(common.out_dir);
  const std::string model_path =
      (fs::path(common.out_dir) / "model.json").string();
  save_model(model, model_path);

  json report = base_report(cfg);
  report["source"] = csv_path.empty() ? root : csv_path;
  report["samples"] = ds.samples.size();
  report["labels"] = model.labels;
  json binaries = json::array();
  for (const BinarySvm& b : model.binaries) {
    binaries.push_back({{"pair", {b.class_pair.first, b.class_pair.second}},
                        {"support_vectors", b.support_vectors.size()}});
  }
  report["binaries"] = binaries;
  report["model"] = "model.json";
  write_json_file(
      (fs::path(common.out_dir) / "train_report.json").string(), report);

  if (common.json_out) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << "trained " << model.binaries.size() << " binary classifiers"
              << " on " << ds.samples.size() << " samples ("
              << model.labels.size() << " labels)\n";
    for (const BinarySvm& b : model.binaries) {
      std::cout << b.class_pair.first << "|" << b.class_pair.second << ": "
                << b.support_vectors.size() << " support vectors\n";
    }
    std::cout << "model: " << model_path << "\n";
  }
}

// --- eval ---------------------------------------------------------------------

std::string eval_table(const EvalReport& r,
                       const std::vector<std::string>& model_labels) {
  std::size_t w = std::string("overall").size();
  for (const auto& [label, stats] : r.per_label) w = std::max(w, label.size());
  std::ostringstream out;
  auto row = [&](const std::string& label, int count, int correct) {
    out << label << std::string(w - label.size() + 2, ' ') << count << "\t"
        << correct << "\t" << count - correct << "\t"
        << format_percent(correct, count) << "%\n";
  };
  out << "label" << std::string(w - 5 + 2, ' ')
      << "count\tcorrect\tincorrect\taccuracy\n";
  for (const auto& [label, stats] : r.per_label)
    row(label, stats.total, stats.correct);
  row("overall", r.total, r.correct);

  out << "\nconfusion (rows actual, columns predicted):\n";
  out << std::string(w + 2, ' ');
  for (const std::string& m : model_labels) out << m << "\t";
  out << "\n";
  for (const auto& [actual, preds] : r.confusion) {
    out << actual << std::string(w - actual.size() + 2, ' ');
    for (const std::string& m : model_labels) {
      const auto it = preds.find(m);
      out << (it == preds.end() ? 0 : it->second) << "\t";
    }
    out << "\n";
  }
  return out.str();
}

void run_eval(const CommonOpts& common, const std::string& root,
              const std::string& csv_path, const std::string& model_path) {
  const PipelineConfig cfg = effective_config(common);
  if (root.empty() && csv_path.empty())
    throw Error("provide a dataset root or --features-csv");
  if (!root.empty() && !csv_path.empty())
    throw Error("dataset root and --features-csv are mutually exclusive");

  const MulticlassModel model = load_model(model_path);
  Dataset ds;
  if (!csv_path.empty()) {
    ds = load_feature_csv(csv_path);
  } else {
    ds = featurize_dataset(scan_dataset(root), cfg);
  }
  const EvalReport r = evaluate_accuracy(model, ds);

  json report = base_report(cfg);
  report["source"] = csv_path.empty() ? root : csv_path;
  report["model"] = model_path;
  json per_label = json::object();
  for (const auto& [label, stats] : r.per_label) {
    per_label[label] = {{"count", stats.total},
                        {"correct", stats.correct},
                        {"incorrect", stats.total - stats.correct},
                        {"accuracy", format_percent(stats.correct,
                                                    stats.total)}};
  }
  report["per_label"] = per_label;
  report["overall"] = {{"count", r.total},
                       {"correct", r.correct},
                       {"incorrect", r.total - r.correct},
                       {"accuracy", format_percent(r.correct, r.total)}};
  json confusion = json::object();
  for (const auto& [actual, preds] : r.confusion) {
    confusion[actual] = preds;
  }
  report["confusion"] = confusion;

  if (!common.out_dir.empty()) {
    ensure_out_dir(common.out_dir);
    write_json_file((fs::path(common.out_dir) / "eval_report.json").string(),
                    report);
  }
  if (common.json_out) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << eval_table(r, model.labels);
  }
}

// --- predict -------------------------------------------------------------------

void run_predict(const CommonOpts& common, const std::string& image_path,
                 const std::string& model_path) {
  const PipelineConfig cfg = effective_config(common);
  const MulticlassModel model = load_model(model_path);
  const RasterImage rgb = load_image(image_path);
  const SegmentResult seg =
      run_segmentation(rgb, cfg, mix_seed(cfg.seed, 0));
  const FeatureVector fv = featurize(seg, cfg.glcm);
  const Prediction pred =
      predict(model, std::vector<double>(fv.begin(), fv.end()));

  json report = base_report(cfg);
  report["image"] = image_path;
  report["model"] = model_path;
  report["label"] = pred.label;
  report["votes"] = pred.votes;
  report["margin"] = pred.margin;
  report["features"] = fv;

  if (!common.out_dir.empty()) {
    ensure_out_dir(common.out_dir);
    write_json_file(
        (fs::path(common.out_dir) / "prediction.json").string(), report);
  }
  if (common.json_out) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << "label: " << pred.label << "\nvotes:";
    for (const auto& [label, v] : pred.votes) {
      std::cout << " " << label << "=" << v;
    }
    std::cout << "\nfeatures:";
    for (std::size_t i = 0; i < fv.size(); ++i) {
      std::cout << " " << kFeatureNames[i] << "=" << fv[i];
    }
    std::cout << "\n";
  }
}

// --- synth ---------------------------------------------------------------------

void run_synth(const CommonOpts& common, int per_class, int size,
               double noise_sigma, const std::string& class_list,
               double eval_fraction) {
  const PipelineConfig cfg = effective_config(common);
  SynthConfig scfg;
  scfg.per_class = per_class;
  scfg.size = size;
  scfg.noise_sigma = noise_sigma;
  scfg.seed = cfg.seed;
  if (!class_list.empty()) {
    scfg.classes.clear();
    std::stringstream ss(class_list);
    std::string name;
    while (std::getline(ss, name, ',')) {
      scfg.classes.push_back(parse_disease_class(name));
    }
  }
  scfg.validate();
  if (eval_fraction < 0.0 || eval_fraction >= 1.0)
    throw Error("--eval-fraction must be in [0, 1)");

  const std::vector<SynthSample> samples = generate(scfg);
  json report = base_report(cfg);
  report["count"] = samples.size();
  report["per_class"] = scfg.per_class;
  report["size"] = scfg.size;
  report["noise_sigma"] = scfg.noise_sigma;

  std::ostringstream text;
  if (eval_fraction > 0.0) {
    std::vector<std::string> labels;
    labels.reserve(samples.size());
    for (const SynthSample& s : samples) labels.push_back(to_string(s.label));
    const std::vector<std::size_t> eval_idx =
        stratified_eval_indices(labels, eval_fraction, scfg.seed);
    if (eval_idx.empty())
      throw Error("--eval-fraction " + std::to_string(eval_fraction) +
                  " leaves the eval split empty at " +
                  std::to_string(scfg.per_class) +
                  " samples per class; raise one of them");
    std::vector<SynthSample> train_set, eval_set;
    std::size_t next = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (next < eval_idx.size() && eval_idx[next] == i) {
        eval_set.push_back(samples[i]);
        ++next;
      } else {
        train_set.push_back(samples[i]);
      }
    }
    const std::string train_manifest = export_dataset(
        train_set, (fs::path(common.out_dir) / "train").string(), scfg.seed);
    const std::string eval_manifest = export_dataset(
        eval_set, (fs::path(common.out_dir) / "eval").string(), scfg.seed);
    report["train"] = {{"count", train_set.size()},
                       {"manifest", train_manifest}};
    report["eval"] = {{"count", eval_set.size()},
                      {"manifest", eval_manifest}};
    text << "wrote " << train_set.size() << " train + " << eval_set.size()
         << " eval samples under " << common.out_dir << "\n";
  } else {
    const std::string manifest =
        export_dataset(samples, common.out_dir, scfg.seed);
    report["manifest"] = manifest;
    text << "wrote " << samples.size() << " samples to " << common.out_dir
         << " (manifest: " << manifest << ")\n";
  }

  if (common.json_out) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << text.str();
  }
}

// Surfaces component errors with the subcommand (stage) name prefixed.
template <typename Fn>
std::function<void()> guarded(const char* stage, Fn fn) {
  return [stage, fn] {
    try {
      fn();
    } catch (const Error& e) {
      throw Error(std::string(stage) + ": " + e.what());
    }
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"leafdx: leaf disease segmentation, texture features, and "
               "SVM classification"};
  app.set_version_flag("--version", kVersionString);
  app.require_subcommand(1);

  // segment
  auto seg_common = std::make_shared<CommonOpts>();
  auto seg_image = std::make_shared<std::string>();
  CLI::App* seg = app.add_subcommand("segment",
                                     "GA-segment an image into K clusters "
                                     "and pick the diseased one");
  seg->add_option("image", *seg_image, "input image (PNG/PPM)")->required();
  add_common(seg, *seg_common, "leafdx_out");
  seg->callback(guarded("segment", [seg_common, seg_image] {
    run_segment(*seg_common, *seg_image);
  }));

  // features
  auto feat_common = std::make_shared<CommonOpts>();
  auto feat_image = std::make_shared<std::string>();
  auto feat_mask = std::make_shared<std::string>();
  auto feat_csv = std::make_shared<std::string>();
  auto feat_label = std::make_shared<std::string>();
  CLI::App* feat = app.add_subcommand(
      "features", "GLCM texture features of a masked region");
  feat->add_option("image", *feat_image, "input image")->required();
  feat->add_option("--mask", *feat_mask, "binary mask image")->required();
  feat->add_option("--csv", *feat_csv, "append a label,f1..f5 row here");
  feat->add_option("--label", *feat_label, "label for the CSV row");
  add_common(feat, *feat_common, "");
  feat->callback(
      guarded("features", [feat_common, feat_image, feat_mask, feat_csv,
                           feat_label] {
        run_features(*feat_common, *feat_image, *feat_mask, *feat_csv,
                     *feat_label);
      }));

  // train
  auto train_common = std::make_shared<CommonOpts>();
  auto train_root = std::make_shared<std::string>();
  auto train_csv = std::make_shared<std::string>();
  CLI::App* train = app.add_subcommand(
      "train", "train the one-vs-one kernel SVM on a labeled dataset");
  train->add_option("dataset", *train_root,
                    "dataset root (<root>/<label>/*.png)");
  train->add_option("--features-csv", *train_csv,
                    "precomputed features (skips segmentation)");
  add_common(train, *train_common, "leafdx_model");
  train->callback(guarded("train", [train_common, train_root, train_csv] {
    run_train(*train_common, *train_root, *train_csv);
  }));

  // eval
  auto eval_common = std::make_shared<CommonOpts>();
  auto eval_root = std::make_shared<std::string>();
  auto eval_csv = std::make_shared<std::string>();
  auto eval_model = std::make_shared<std::string>();
  CLI::App* eval = app.add_subcommand(
      "eval", "evaluate a trained model on a labeled dataset");
  eval->add_option("dataset", *eval_root, "dataset root");
  eval->add_option("--features-csv", *eval_csv,
                   "precomputed features (skips segmentation)");
  eval->add_option("--model", *eval_model, "model file")->required();
  add_common(eval, *eval_common, "");
  eval->callback(
      guarded("eval", [eval_common, eval_root, eval_csv, eval_model] {
        run_eval(*eval_common, *eval_root, *eval_csv, *eval_model);
      }));

  // predict
  auto pred_common = std::make_shared<CommonOpts>();
  auto pred_image = std::make_shared<std::string>();
  auto pred_model = std::make_shared<std::string>();
  CLI::App* pred = app.add_subcommand(
      "predict", "segment, featurize, and classify one image");
  pred->add_option("image", *pred_image, "input image")->required();
  pred->add_option("--model", *pred_model, "model file")->required();
  add_common(pred, *pred_common, "");
  pred->callback(guarded("predict", [pred_common, pred_image, pred_model] {
    run_predict(*pred_common, *pred_image, *pred_model);
  }));

  // synth
  auto synth_common = std::make_shared<CommonOpts>();
  auto synth_per_class = std::make_shared<int>(10);
  auto synth_size = std::make_shared<int>(96);
  auto synth_noise = std::make_shared<double>(2.0);
  auto synth_classes = std::make_shared<std::string>();
  auto synth_eval_fraction = std::make_shared<double>(0.0);
  CLI::App* synth = app.add_subcommand(
      "synth", "generate a labeled synthetic leaf dataset");
  synth->add_option("--per-class", *synth_per_class, "samples per class");
  synth->add_option("--size", *synth_size, "image side length (>= 64)");
  synth->add_option("--noise", *synth_noise, "Gaussian noise sigma");
  synth->add_option("--classes", *synth_classes,
                    "comma-separated class list (default: all four)");
  synth->add_option("--eval-fraction", *synth_eval_fraction,
                    "also write a stratified train/eval split");
  add_common(synth, *synth_common, "synth_data");
  synth->callback(
      guarded("synth", [synth_common, synth_per_class, synth_size,
                        synth_noise, synth_classes, synth_eval_fraction] {
        run_synth(*synth_common, *synth_per_class, *synth_size, *synth_noise,
                  *synth_classes, *synth_eval_fraction);
      }));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
