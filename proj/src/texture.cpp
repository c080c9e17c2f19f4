#include "leafdx/texture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace leafdx {

const char* to_string(GlcmDirection d) {
  switch (d) {
    case GlcmDirection::Deg0: return "0";
    case GlcmDirection::Deg45: return "45";
    case GlcmDirection::Deg90: return "90";
    case GlcmDirection::Deg135: return "135";
  }
  return "?";
}

std::pair<int, int> direction_offset(GlcmDirection d, int distance) {
  switch (d) {
    case GlcmDirection::Deg0: return {0, distance};
    case GlcmDirection::Deg45: return {-distance, distance};
    case GlcmDirection::Deg90: return {-distance, 0};
    case GlcmDirection::Deg135: return {-distance, -distance};
  }
  throw Error("direction_offset: unknown direction");
}

void GlcmConfig::validate() const {
  if (levels < 2 || levels > 256)
    throw Error("glcm: levels must be in [2, 256]");
  if (distance < 1) throw Error("glcm: distance must be at least 1");
  if (directions.empty()) throw Error("glcm: at least one direction required");
}

std::size_t PixelMask::count() const {
  return static_cast<std::size_t>(
      std::count_if(inside.begin(), inside.end(),
                    [](std::uint8_t v) { return v != 0; }));
}

PixelMask PixelMask::full(int width, int height) {
  PixelMask m;
  m.width = width;
  m.height = height;
  m.inside.assign(static_cast<std::size_t>(width) * height, 1);
  return m;
}

PixelMask PixelMask::from_image(const RasterImage& img) {
  const RasterImage gray = to_gray(img);
  PixelMask m;
  m.width = gray.width();
  m.height = gray.height();
  m.inside.resize(gray.pixel_count());
  for (std::size_t i = 0; i < m.inside.size(); ++i) {
    m.inside[i] = gray.plane(0)[i] > 127.5 ? 1 : 0;
  }
  return m;
}

QuantizedGrid quantize(const RasterImage& gray, int levels) {
  if (levels < 2 || levels > 256)
    throw Error("quantize: levels must be in [2, 256]");
  if (gray.channels() != 1) throw Error("quantize: expected a Gray image");
  if (gray.empty()) throw Error("quantize: empty image");

  QuantizedGrid grid;
  grid.width = gray.width();
  grid.height = gray.height();
  grid.bins.resize(gray.pixel_count());
  for (std::size_t i = 0; i < grid.bins.size(); ++i) {
    const int bin =
        static_cast<int>(std::floor(gray.plane(0)[i] * levels / 256.0));
    grid.bins[i] = std::clamp(bin, 0, levels - 1);
  }
  return grid;
}

std::optional<Glcm> try_compute_glcm(const QuantizedGrid& grid,
                                     const PixelMask* mask,
                                     std::pair<int, int> offset,
                                     const GlcmConfig& cfg) {
  cfg.validate();
  if (grid.width <= 0 || grid.height <= 0)
    throw Error("compute_glcm: empty grid");
  const auto [dy, dx] = offset;
  if (dy == 0 && dx == 0) throw Error("compute_glcm: offset must be nonzero");
  if (mask && (mask->width != grid.width || mask->height != grid.height))
    throw Error("compute_glcm: mask dimensions do not match grid");
  const bool use_mask = cfg.masked && mask != nullptr;

  const int n = cfg.levels;
  std::vector<double> counts(static_cast<std::size_t>(n) * n, 0.0);
  double total = 0.0;
  for (int y = 0; y < grid.height; ++y) {
    const int y2 = y + dy;
    if (y2 < 0 || y2 >= grid.height) continue;
    for (int x = 0; x < grid.width; ++x) {
      const int x2 = x + dx;
      if (x2 < 0 || x2 >= grid.width) continue;
      if (use_mask && (!mask->at(y, x) || !mask->at(y2, x2))) continue;
      const int a = grid.at(y, x);
      const int b = grid.at(y2, x2);
      if (a < 0 || a >= n || b < 0 || b >= n)
        throw Error("compute_glcm: bin out of range for configured levels");
      counts[static_cast<std::size_t>(a) * n + b] += 1.0;
      counts[static_cast<std::size_t>(b) * n + a] += 1.0;  // transpose
      total += 2.0;
    }
  }
  if (total == 0.0) return std::nullopt;

  Glcm g;
  g.levels = n;
  g.p.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) g.p[i] = counts[i] / total;
  return g;
}

Glcm compute_glcm(const QuantizedGrid& grid, const PixelMask* mask,
                  std::pair<int, int> offset, const GlcmConfig& cfg) {
  std::optional<Glcm> g = try_compute_glcm(grid, mask, offset, cfg);
  if (!g) throw Error("compute_glcm: empty GLCM (no valid pixel pairs)");
  return std::move(*g);
}

TextureFeatures glcm_features(const Glcm& g) {
  const int n = g.levels;
  TextureFeatures f;
  double mu = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      mu += i * g.at(i, j);
    }
  }
  double sigma2 = 0.0;
  double cross = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double p = g.at(i, j);
      const double d = i - j;
      f.contrast += p * d * d;
      f.energy += p * p;
      f.dissimilarity += p * std::abs(d);
      if (p > 0.0) f.entropy -= p * std::log(p);
      sigma2 += p * (i - mu) * (i - mu);
      cross += p * (i - mu) * (j - mu);
    }
  }
  f.mu = mu;
  f.sigma2 = sigma2;
  f.correlation = sigma2 < 1e-12 ? 1.0 : cross / sigma2;
  return f;
}

FeatureVector to_feature_vector(const TextureFeatures& f) {
  return {f.contrast, f.energy, f.dissimilarity, f.entropy, f.correlation};
}

FeatureReport extract_features_full(const RasterImage& img,
                                    const PixelMask& mask,
                                    const GlcmConfig& cfg) {
  cfg.validate();
  if (mask.width != img.width() || mask.height != img.height())
    throw Error("extract_features: mask dimensions do not match image");
  const std::size_t selected = mask.count();
  if (cfg.masked && selected == 0) throw Error("extract_features: empty mask");

  const QuantizedGrid grid = quantize(to_gray(img), cfg.levels);

  FeatureReport report;
  report.mask_pixels = selected;
  for (GlcmDirection dir : cfg.directions) {
    const std::optional<Glcm> g = try_compute_glcm(
        grid, &mask, direction_offset(dir, cfg.distance), cfg);
    if (!g) continue;
    report.per_direction.push_back({dir, glcm_features(*g)});
  }
  if (report.per_direction.empty())
    throw Error("extract_features: empty GLCM in every direction");

  const double n = static_cast<double>(report.per_direction.size());
  for (const DirectionFeatures& d : report.per_direction) {
    report.mean.contrast += d.features.contrast / n;
    report.mean.energy += d.features.energy / n;
    report.mean.dissimilarity += d.features.dissimilarity / n;
    report.mean.entropy += d.features.entropy / n;
    report.mean.correlation += d.features.correlation / n;
    report.mean.mu += d.features.mu / n;
    report.mean.sigma2 += d.features.sigma2 / n;
  }
  report.vector = to_feature_vector(report.mean);
  return report;
}

FeatureVector extract_features(const RasterImage& img, const PixelMask& mask,
                               const GlcmConfig& cfg) {
  return extract_features_full(img, mask, cfg).vector;
}

}  // namespace leafdx
