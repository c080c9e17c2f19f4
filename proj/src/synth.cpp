#include "leafdx/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "json.hpp"

#include "leafdx/image_io.hpp"
#include "leafdx/rng.hpp"

namespace leafdx {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(DiseaseClass c) {
  switch (c) {
    case DiseaseClass::Blight: return "Blight";
    case DiseaseClass::Anthracnose: return "Anthracnose";
    case DiseaseClass::Canker: return "Canker";
    case DiseaseClass::LeafSpot: return "LeafSpot";
  }
  return "?";
}

DiseaseClass parse_disease_class(const std::string& name) {
  for (DiseaseClass c : kAllDiseaseClasses) {
    if (name == to_string(c)) return c;
  }
  throw Error("unknown disease class '" + name +
              "' (expected Blight, Anthracnose, Canker, or LeafSpot)");
}

void SynthConfig::validate() const {
  if (classes.empty()) throw Error("synth: at least one class required");
  if (per_class < 1) throw Error("synth: per_class must be at least 1");
  if (size < 64) throw Error("synth: size must be at least 64");
  if (noise_sigma < 0.0)
    throw Error("synth: noise_sigma must be non-negative");
}

namespace {

constexpr double kTau = 6.283185307179586;

// Per-pixel hash lanes give order-independent determinism: lane k of pixel
// p never collides with other pixels or with the geometry RNG stream.
double hash_unit(std::uint64_t seed, std::uint64_t lane) {
  return static_cast<double>((mix_seed(seed, lane) >> 11) + 1) * 0x1.0p-53;
}

double hash_gauss(std::uint64_t seed, std::uint64_t lane0) {
  const double u1 = hash_unit(seed, lane0);
  const double u2 = hash_unit(seed, lane0 + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTau * u2);
}

struct Shape {
  double u = 0.0, v = 0.0;  // center, leaf-normalized coordinates
  double s = 0.0;           // radius, leaf-normalized
  double wob3 = 0.0, wob5 = 0.0, ph3 = 0.0, ph5 = 0.0;  // boundary wobble
  int rings = 0;  // Canker: alternating luma bands across the radius
};

struct SampleGeometry {
  double cx, cy, cos_t, sin_t, a, b;
  double leaf_y, leaf_cb, leaf_cr;
  double bg_y, bg_cb, bg_cr;
  double lesion_cb, lesion_cr, lesion_dy;
  double band_lo = 2.0, arc0 = 0.0, arc_len = 0.0;  // Anthracnose margin
  std::vector<Shape> shapes;
};

SampleGeometry make_geometry(DiseaseClass label, int size,
                             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  SampleGeometry g;
  g.cx = size * 0.5 + uni(-2.0, 2.0);
  g.cy = size * 0.5 + uni(-2.0, 2.0);
  const double theta = uni(-0.35, 0.35);
  g.cos_t = std::cos(theta);
  g.sin_t = std::sin(theta);
  g.a = size * uni(0.41, 0.45);
  g.b = size * uni(0.30, 0.34);

  const std::array<double, 3> leaf = rgb_pixel_to_ycbcr(synthdef::kLeafRgb);
  const std::array<double, 3> bg =
      rgb_pixel_to_ycbcr(synthdef::kBackgroundRgb);
  g.leaf_y = leaf[0];
  g.leaf_cb = leaf[1] + uni(-2.0, 2.0);
  g.leaf_cr = leaf[2] + uni(-2.0, 2.0);
  g.bg_y = bg[0];
  g.bg_cb = bg[1] + uni(-1.5, 1.5);
  g.bg_cr = bg[2] + uni(-1.5, 1.5);
  g.lesion_cb = synthdef::kLesionCb + uni(-2.0, 2.0);
  g.lesion_cr = synthdef::kLesionCr + uni(-2.0, 2.0);
  g.lesion_dy = uni(-2.0, 2.0);

  // Rejection placement; the last attempt is accepted regardless so the
  // generator never fails, it only degrades spacing.
  auto place = [&](double s, double rho_max, double sep_factor) {
    Shape sh;
    sh.s = s;
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double ang = uni(0.0, kTau);
      const double rho = std::sqrt(unit(rng)) * rho_max;
      sh.u = rho * std::cos(ang);
      sh.v = rho * std::sin(ang);
      bool ok = true;
      for (const Shape& other : g.shapes) {
        if (std::hypot(sh.u - other.u, sh.v - other.v) <
            sep_factor * (sh.s + other.s)) {
          ok = false;
          break;
        }
      }
      if (ok) break;
    }
    return sh;
  };

  switch (label) {
    case DiseaseClass::Blight: {
      std::uniform_int_distribution<int> count(synthdef::kBlightPatchesMin,
                                               synthdef::kBlightPatchesMax);
      const int n = count(rng);
      for (int i = 0; i < n; ++i) {
        const double s = n == 1 ? uni(0.33, 0.38) : uni(0.24, 0.27);
        Shape sh = place(s, std::max(0.0, 0.97 - 1.4 * s), 1.1);
        sh.wob3 = uni(0.16, 0.24);
        sh.wob5 = uni(0.08, 0.14);
        sh.ph3 = uni(0.0, kTau);
        sh.ph5 = uni(0.0, kTau);
        g.shapes.push_back(sh);
      }
      break;
    }
    case DiseaseClass::Anthracnose: {
      g.band_lo = 1.0 - uni(0.13, 0.16);
      g.arc0 = uni(0.0, kTau);
      g.arc_len = uni(2.8, 3.8);
      break;
    }
    case DiseaseClass::Canker: {
      std::uniform_int_distribution<int> count(synthdef::kCankerRingsMin,
                                               synthdef::kCankerRingsMax);
      const int n = count(rng);
      for (int i = 0; i < n; ++i) {
        const double s = uni(0.18, 0.22);
        Shape sh = place(s, std::max(0.0, 0.97 - 1.05 * s), 1.2);
        sh.rings = 3;
        g.shapes.push_back(sh);
      }
      break;
    }
    case DiseaseClass::LeafSpot: {
      std::uniform_int_distribution<int> count(synthdef::kSpotCountMin,
                                               synthdef::kSpotCountMax);
      const int n = count(rng);
      for (int i = 0; i < n; ++i) {
        const double s = uni(0.050, 0.062);
        g.shapes.push_back(place(s, 0.9 - s, 1.6));
      }
      break;
    }
  }
  return g;
}

struct PixelColor {
  double y, cb, cr;
  bool lesion;
};

PixelColor compose(const SampleGeometry& g, DiseaseClass label, int size,
                   int px, int py, std::uint64_t seed) {
  const std::uint64_t pix =
      static_cast<std::uint64_t>(py) * static_cast<std::uint64_t>(size) + px;
  const double jitter = hash_unit(seed, pix * 8) - 0.5;
  const double dx = px - g.cx;
  const double dy = py - g.cy;
  const double u = (dx * g.cos_t + dy * g.sin_t) / g.a;
  const double v = (-dx * g.sin_t + dy * g.cos_t) / g.b;
  const double rho = std::hypot(u, v);

  if (rho >= 1.0) {
    const double vignette =
        ((px + py) / (2.0 * (size - 1)) - 0.5) * 1.6;
    return {g.bg_y + vignette + jitter, g.bg_cb, g.bg_cr, false};
  }

  if (rho <= 0.99) {
    const double low = synthdef::kLesionLowY + g.lesion_dy;
    const double high = synthdef::kLesionHighY + g.lesion_dy;
    if (label == DiseaseClass::Anthracnose && rho >= g.band_lo) {
      const double phi = std::atan2(v, u);
      const double rel = std::fmod(phi - g.arc0 + 2.0 * kTau, kTau);
      if (rel <= g.arc_len) {
        const bool up = (mix_seed(seed, pix * 8 + 1) & 1) != 0;
        return {(up ? high : low) + jitter, g.lesion_cb, g.lesion_cr, true};
      }
    }
    for (const Shape& sh : g.shapes) {
      const double du = u - sh.u;
      const double dv = v - sh.v;
      const double d = std::hypot(du, dv);
      switch (label) {
        case DiseaseClass::Blight: {
          const double phi = std::atan2(dv, du);
          const double s_eff =
              sh.s * (1.0 + sh.wob3 * std::sin(3.0 * phi + sh.ph3) +
                      sh.wob5 * std::sin(5.0 * phi + sh.ph5));
          if (d <= s_eff) {
            const double t = s_eff > 0.0 ? d / s_eff : 0.0;
            return {high - (high - low) * t + jitter, g.lesion_cb,
                    g.lesion_cr, true};
          }
          break;
        }
        case DiseaseClass::Canker: {
          if (d <= sh.s) {
            const int idx = std::min(
                sh.rings - 1,
                static_cast<int>(std::floor(d / sh.s * sh.rings)));
            return {(idx % 2 == 0 ? high : low) + jitter, g.lesion_cb,
                    g.lesion_cr, true};
          }
          break;
        }
        case DiseaseClass::LeafSpot: {
          if (d <= sh.s) {
            return {synthdef::kSpotY + g.lesion_dy + jitter, g.lesion_cb,
                    g.lesion_cr, true};
          }
          break;
        }
        case DiseaseClass::Anthracnose:
          break;
      }
    }
  }

  const double shading = (rho * rho - 0.5) * 4.0;
  return {g.leaf_y + shading + jitter, g.leaf_cb, g.leaf_cr, false};
}

struct RenderStats {
  std::size_t leaf_pixels = 0;
  std::size_t lesion_pixels = 0;
};

SynthSample render(DiseaseClass label, int size, double noise_sigma,
                   std::uint64_t seed, RenderStats& stats) {
  std::mt19937_64 rng(seed);
  const SampleGeometry g = make_geometry(label, size, rng);

  SynthSample out;
  out.label = label;
  out.image = RasterImage(size, size, ColorSpace::Rgb);
  out.mask = RasterImage(size, size, ColorSpace::Gray);
  stats = {};
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const PixelColor c = compose(g, label, size, x, y, seed);
      std::array<double, 3> rgb = ycbcr_pixel_to_rgb({c.y, c.cb, c.cr});
      if (noise_sigma > 0.0) {
        const std::uint64_t pix =
            static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(size) +
            x;
        for (int ch = 0; ch < 3; ++ch) {
          rgb[ch] += noise_sigma * hash_gauss(seed, pix * 8 + 2 + 2 * ch);
        }
      }
      for (int ch = 0; ch < 3; ++ch) {
        rgb[ch] = std::clamp(rgb[ch], 0.0, 255.0);
      }
      out.image.set_pixel3(y, x, rgb);
      out.mask.at(0, y, x) = c.lesion ? 255.0 : 0.0;

      const double dx = x - g.cx;
      const double dy = y - g.cy;
      const double u = (dx * g.cos_t + dy * g.sin_t) / g.a;
      const double v = (-dx * g.sin_t + dy * g.cos_t) / g.b;
      if (std::hypot(u, v) < 1.0) ++stats.leaf_pixels;
      if (c.lesion) ++stats.lesion_pixels;
    }
  }
  return out;
}

}  // namespace

SynthSample generate_sample(DiseaseClass label, int size, double noise_sigma,
                            std::uint64_t sample_seed) {
  if (size < 64) throw Error("synth: size must be at least 64");
  if (noise_sigma < 0.0)
    throw Error("synth: noise_sigma must be non-negative");

  std::uint64_t seed = sample_seed;
  for (int attempt = 0; attempt < 16; ++attempt) {
    RenderStats stats;
    SynthSample sample = render(label, size, noise_sigma, seed, stats);
    if (stats.lesion_pixels * 200 >= stats.leaf_pixels) {  // >= 0.5% of leaf
      return sample;
    }
    seed = mix_seed(sample_seed, 1000 + attempt);
  }
  throw Error("synth: could not reach the minimum lesion area");
}

std::vector<SynthSample> generate(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<SynthSample> samples;
  samples.reserve(cfg.classes.size() * cfg.per_class);
  std::uint64_t index = 0;
  for (DiseaseClass cls : cfg.classes) {
    for (int i = 0; i < cfg.per_class; ++i) {
      samples.push_back(generate_sample(cls, cfg.size, cfg.noise_sigma,
                                        mix_seed(cfg.seed, index)));
      ++index;
    }
  }
  return samples;
}

std::string export_dataset(const std::vector<SynthSample>& samples,
                           const std::string& root, std::uint64_t seed) {
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error("cannot create dataset directory " + root + ": " +
                      ec.message());

  json manifest;
  manifest["format"] = "leafdx-dataset";
  manifest["version"] = 1;
  manifest["seed"] = seed;
  manifest["samples"] = json::array();

  std::map<std::string, int> counters;
  for (const SynthSample& sample : samples) {
    const std::string label = to_string(sample.label);
    const int idx = counters[label]++;
    fs::create_directories(fs::path(root) / label, ec);
    if (ec) throw Error("cannot create label directory: " + ec.message());
    char name[32];
    std::snprintf(name, sizeof name, "%03d", idx);
    const std::string image_rel = label + "/" + name + ".png";
    const std::string mask_rel = label + "/" + name + ".mask.png";
    save_image(sample.image, (fs::path(root) / image_rel).string());
    save_image(sample.mask, (fs::path(root) / mask_rel).string());
    manifest["samples"].push_back(
        {{"image", image_rel}, {"mask", mask_rel}, {"label", label}});
  }

  const std::string manifest_path = (fs::path(root) / "manifest.json").string();
  std::ofstream out(manifest_path);
  if (!out) throw Error("cannot write manifest: " + manifest_path);
  out << manifest.dump(2) << "\n";
  if (!out.good()) throw Error("failed writing manifest: " + manifest_path);
  return manifest_path;
}

}  // namespace leafdx
