#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "leafdx/classifier.hpp"
#include "leafdx/image.hpp"
#include "leafdx/image_io.hpp"
#include "leafdx/pipeline.hpp"
#include "leafdx/rng.hpp"
#include "leafdx/synth.hpp"
#include "leafdx/texture.hpp"
#include "leafdx/version.hpp"

namespace py = pybind11;
using namespace leafdx;

namespace {

py::array_t<double> planes_to_array(const RasterImage& img) {
  if (img.channels() == 1) {
    py::array_t<double> out({img.height(), img.width()});
    auto r = out.mutable_unchecked<2>();
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) r(y, x) = img.at(0, y, x);
    return out;
  }
  py::array_t<double> out({img.height(), img.width(), 3});
  auto r = out.mutable_unchecked<3>();
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) r(y, x, c) = img.at(c, y, x);
  return out;
}

RasterImage array_to_image(const py::array& arr, ColorSpace space) {
  auto a = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(arr);
  if (!a) throw Error("expected a numeric array");
  if (a.ndim() != 3 || a.shape(2) != 3)
    throw Error("expected an array of shape (height, width, 3)");
  RasterImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)),
                  space);
  auto r = a.unchecked<3>();
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) img.at(c, y, x) = r(y, x, c);
  return img;
}

PixelMask array_to_mask(const py::array& arr) {
  auto a = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(arr);
  if (!a || a.ndim() != 2) throw Error("mask must be a 2-D array");
  PixelMask mask;
  mask.height = static_cast<int>(a.shape(0));
  mask.width = static_cast<int>(a.shape(1));
  mask.inside.resize(static_cast<std::size_t>(mask.width) * mask.height);
  auto r = a.unchecked<2>();
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      mask.inside[static_cast<std::size_t>(y) * mask.width + x] =
          r(y, x) != 0.0 ? 1 : 0;
  return mask;
}

py::array_t<std::uint8_t> mask_to_array(const RasterImage& mask) {
  py::array_t<std::uint8_t> out({mask.height(), mask.width()});
  auto r = out.mutable_unchecked<2>();
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      r(y, x) = mask.at(0, y, x) > 127.5 ? 255 : 0;
  return out;
}

}  // namespace

PYBIND11_MODULE(_leafdx, m) {
  m.doc() = "Leaf disease classification pipeline (GA segmentation, GLCM "
            "texture features, one-vs-one SVM)";

  py::register_exception<Error>(m, "LeafdxError");

  m.def("version", [] { return std::string(kVersion); });

  m.def(
      "rgb_to_ycbcr",
      [](const py::array& rgb) {
        return planes_to_array(rgb_to_ycbcr(array_to_image(rgb, ColorSpace::Rgb)));
      },
      py::arg("rgb"), "Convert an (H, W, 3) RGB array in [0, 255] to YCbCr.");

  m.def(
      "ycbcr_to_rgb",
      [](const py::array& ycbcr) {
        return planes_to_array(
            ycbcr_to_rgb(array_to_image(ycbcr, ColorSpace::YCbCr)));
      },
      py::arg("ycbcr"), "Inverse of rgb_to_ycbcr, clamped to [0, 255].");

  m.def(
      "generate_dataset",
      [](const std::string& out_dir, int per_class, int size,
         std::uint64_t seed, double noise_sigma) {
        SynthConfig cfg;
        cfg.per_class = per_class;
        cfg.size = size;
        cfg.seed = seed;
        cfg.noise_sigma = noise_sigma;
        cfg.validate();
        return export_dataset(generate(cfg), out_dir, seed);
      },
      py::arg("out_dir"), py::arg("per_class") = 10, py::arg("size") = 96,
      py::arg("seed") = 0, py::arg("noise_sigma") = 2.0,
      "Write a synthetic labelled dataset; returns the manifest path.");

  m.def(
      "segment",
      [](const std::string& image_path, std::uint64_t seed, int k) {
        PipelineConfig cfg;
        cfg.seed = seed;
        cfg.ga.k = k;
        cfg.validate();
        const RasterImage rgb = load_image(image_path);
        const SegmentResult seg = run_segmentation(rgb, cfg, mix_seed(seed, 0));
        py::dict out;
        out["mask"] = mask_to_array(seg.mask);
        out["selected_cluster"] = seg.selected_cluster;
        out["fitness"] = seg.ga.fitness;
        out["generations"] = seg.ga.generations_run;
        return out;
      },
      py::arg("image_path"), py::arg("seed") = 0, py::arg("k") = 3,
      "GA segmentation of one image; returns the diseased-cluster mask.");

  m.def(
      "features",
      [](const std::string& image_path, const py::array& mask) {
        const RasterImage img = load_image(image_path);
        const FeatureVector fv =
            extract_features(img, array_to_mask(mask), GlcmConfig{});
        return std::vector<double>(fv.begin(), fv.end());
      },
      py::arg("image_path"), py::arg("mask"),
      "GLCM texture features [contrast, energy, dissimilarity, entropy, "
      "correlation] over the masked region.");

  m.def(
      "train",
      [](const std::string& dataset_root, const std::string& model_path,
         const std::string& kernel, std::uint64_t seed) {
        PipelineConfig cfg;
        cfg.seed = seed;
        cfg.kernel.kind = parse_kernel_kind(kernel);
        cfg.validate();
        const Dataset ds = featurize_dataset(scan_dataset(dataset_root), cfg);
        const MulticlassModel model =
            train_multiclass(ds, cfg.kernel, cfg.svm, seed);
        save_model(model, model_path);
        return model.labels;
      },
      py::arg("dataset_root"), py::arg("model_path"),
      py::arg("kernel") = "linear", py::arg("seed") = 0,
      "Segment + featurize every labelled image under dataset_root, train a "
      "one-vs-one SVM, save it; returns the label set.");

  m.def(
      "predict",
      [](const std::string& model_path, const std::string& image_path,
         std::uint64_t seed) {
        const MulticlassModel model = load_model(model_path);
        PipelineConfig cfg;
        cfg.seed = seed;
        cfg.validate();
        const RasterImage rgb = load_image(image_path);
        const SegmentResult seg = run_segmentation(rgb, cfg, mix_seed(seed, 0));
        const FeatureVector fv = featurize(seg, cfg.glcm);
        const Prediction pred =
            predict(model, std::vector<double>(fv.begin(), fv.end()));
        py::dict out;
        out["label"] = pred.label;
        out["votes"] = pred.votes;
        out["features"] = std::vector<double>(fv.begin(), fv.end());
        return out;
      },
      py::arg("model_path"), py::arg("image_path"), py::arg("seed") = 0,
      "Classify one image with a saved model.");
}
