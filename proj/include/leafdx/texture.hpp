#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "leafdx/image.hpp"

namespace leafdx {

enum class GlcmDirection { Deg0, Deg45, Deg90, Deg135 };

const char* to_string(GlcmDirection d);

/// (dy, dx) offset for a direction at the given pixel distance:
/// 0° → (0,d), 45° → (−d,d), 90° → (−d,0), 135° → (−d,−d).
std::pair<int, int> direction_offset(GlcmDirection d, int distance);

struct GlcmConfig {
  int levels = 8;
  int distance = 1;
  std::vector<GlcmDirection> directions = {
      GlcmDirection::Deg0, GlcmDirection::Deg45, GlcmDirection::Deg90,
      GlcmDirection::Deg135};
  bool symmetric = true;  // transpose is always added; echoed in reports
  bool masked = true;
  void validate() const;
};

struct QuantizedGrid {
  int width = 0;
  int height = 0;
  std::vector<int> bins;  // row-major
  int at(int y, int x) const {
    return bins[static_cast<std::size_t>(y) * width + x];
  }
};

struct PixelMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> inside;  // row-major, nonzero = selected
  bool at(int y, int x) const {
    return inside[static_cast<std::size_t>(y) * width + x] != 0;
  }
  std::size_t count() const;

  static PixelMask full(int width, int height);
  /// Thresholds the luma of any image at 127.5 (so 0/255 masks map cleanly).
  static PixelMask from_image(const RasterImage& img);
};

struct Glcm {
  int levels = 0;
  std::vector<double> p;  // levels×levels, row-major, normalized
  double at(int i, int j) const {
    return p[static_cast<std::size_t>(i) * levels + j];
  }
  double& at(int i, int j) {
    return p[static_cast<std::size_t>(i) * levels + j];
  }
};

/// bin = floor(v·N/256), clamped to [0, N−1].
QuantizedGrid quantize(const RasterImage& gray, int levels);

/// Symmetric normalized co-occurrence matrix for one offset. A pair counts
/// only when both endpoints are in bounds and (with cfg.masked and a mask
/// present) both inside the mask. Returns nullopt when no pair qualifies.
std::optional<Glcm> try_compute_glcm(const QuantizedGrid& grid,
                                     const PixelMask* mask,
                                     std::pair<int, int> offset,
                                     const GlcmConfig& cfg);

/// Same as try_compute_glcm but an empty result is an error ("empty GLCM").
Glcm compute_glcm(const QuantizedGrid& grid, const PixelMask* mask,
                  std::pair<int, int> offset, const GlcmConfig& cfg);

struct TextureFeatures {
  double contrast = 0.0;
  double energy = 0.0;
  double dissimilarity = 0.0;
  double entropy = 0.0;
  double correlation = 0.0;
  double mu = 0.0;
  double sigma2 = 0.0;
};

/// §-style statistics of a normalized symmetric GLCM. A zero-variance
/// matrix has correlation defined as 1.0.
TextureFeatures glcm_features(const Glcm& g);

using FeatureVector = std::array<double, 5>;

inline constexpr std::array<const char*, 5> kFeatureNames = {
    "contrast", "energy", "dissimilarity", "entropy", "correlation"};

FeatureVector to_feature_vector(const TextureFeatures& f);

struct DirectionFeatures {
  GlcmDirection direction;
  TextureFeatures features;
};

struct FeatureReport {
  std::vector<DirectionFeatures> per_direction;  // directions with pairs
  TextureFeatures mean;                          // field-wise average
  FeatureVector vector{};  // [contrast, energy, dissimilarity, entropy, correlation]
  std::size_t mask_pixels = 0;
};

/// Gray conversion → quantization → one GLCM per configured direction →
/// per-feature mean. Directions without valid pairs are skipped; it is an
/// error only when every direction comes up empty (or the mask is empty).
FeatureReport extract_features_full(const RasterImage& img,
                                    const PixelMask& mask,
                                    const GlcmConfig& cfg = {});

FeatureVector extract_features(const RasterImage& img, const PixelMask& mask,
                               const GlcmConfig& cfg = {});

}  // namespace leafdx
