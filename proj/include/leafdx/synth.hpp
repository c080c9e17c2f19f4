#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "leafdx/image.hpp"

namespace leafdx {

enum class DiseaseClass { Blight, Anthracnose, Canker, LeafSpot };

inline constexpr std::array<DiseaseClass, 4> kAllDiseaseClasses = {
    DiseaseClass::Blight, DiseaseClass::Anthracnose, DiseaseClass::Canker,
    DiseaseClass::LeafSpot};

const char* to_string(DiseaseClass c);
DiseaseClass parse_disease_class(const std::string& name);

/// Named generator constants, citable from tests. Lesion pixels share one
/// chroma (Cr well above the leaf's ~105) and vary only in luma, so the
/// lesion forms a single tight YCbCr cluster while its luma texture carries
/// the class signature.
namespace synthdef {
inline constexpr std::array<double, 3> kLeafRgb = {58.0, 122.0, 48.0};
inline constexpr std::array<double, 3> kBackgroundRgb = {246.0, 244.0, 240.0};
inline constexpr double kLesionCb = 106.0;
inline constexpr double kLesionCr = 153.0;
inline constexpr double kLesionLowY = 76.0;   // quantizes to bin 2 of 8
inline constexpr double kLesionHighY = 112.0; // quantizes to bin 3 of 8
inline constexpr double kSpotY = 80.0;        // LeafSpot: single-bin texture
inline constexpr int kBlightPatchesMin = 1, kBlightPatchesMax = 2;
inline constexpr int kCankerRingsMin = 2, kCankerRingsMax = 3;
inline constexpr int kSpotCountMin = 8, kSpotCountMax = 12;
}  // namespace synthdef

struct SynthConfig {
  std::vector<DiseaseClass> classes{kAllDiseaseClasses.begin(),
                                    kAllDiseaseClasses.end()};
  int per_class = 10;
  int size = 96;  // square, >= 64
  std::uint64_t seed = 0;
  double noise_sigma = 2.0;
  void validate() const;
};

struct SynthSample {
  RasterImage image;  // RGB
  RasterImage mask;   // Gray, strictly {0, 255}; 255 = lesion
  DiseaseClass label = DiseaseClass::Blight;
};

/// One leaf image, fully determined by sample_seed: a rotated green ellipse
/// on a light background with class-characteristic lesions, pixel-unique
/// micro-texture, and optional Gaussian noise.
SynthSample generate_sample(DiseaseClass label, int size, double noise_sigma,
                            std::uint64_t sample_seed);

/// cfg.per_class samples per configured class; sample i (global order) uses
/// mix_seed(cfg.seed, i), so generation is order-independent.
std::vector<SynthSample> generate(const SynthConfig& cfg);

/// Writes <root>/<label>/<index>.png plus <index>.mask.png and a
/// manifest.json (schema version, seed, per-sample records with paths
/// relative to root). Returns the manifest path.
std::string export_dataset(const std::vector<SynthSample>& samples,
                           const std::string& root, std::uint64_t seed);

}  // namespace leafdx
