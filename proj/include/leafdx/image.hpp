#pragma once

#include <array>
#include <stdexcept>
#include <vector>

namespace leafdx {

/// Domain error: bad input data, unreadable file, invalid configuration.
/// The CLI maps this to exit code 1; anything else is an internal bug (2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ColorSpace { Rgb, YCbCr, Gray };

const char* to_string(ColorSpace space);

/// Width x height raster with 1 (Gray) or 3 (Rgb, YCbCr) planes of
/// real-valued samples in [0, 255]. Quantization to integers happens only
/// at file I/O, so color round trips and sub-integer tests stay exact.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, ColorSpace space, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  ColorSpace space() const { return space_; }
  int channels() const { return static_cast<int>(planes_.size()); }
  bool empty() const { return width_ == 0 || height_ == 0; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  double at(int plane, int y, int x) const {
    return planes_[plane][static_cast<std::size_t>(y) * width_ + x];
  }
  double& at(int plane, int y, int x) {
    return planes_[plane][static_cast<std::size_t>(y) * width_ + x];
  }

  const std::vector<double>& plane(int i) const { return planes_[i]; }
  std::vector<double>& plane(int i) { return planes_[i]; }

  /// Pixel of a 3-plane image in plane order (R,G,B) or (Y,Cb,Cr).
  std::array<double, 3> pixel3(int y, int x) const {
    return {at(0, y, x), at(1, y, x), at(2, y, x)};
  }
  void set_pixel3(int y, int x, const std::array<double, 3>& v) {
    at(0, y, x) = v[0];
    at(1, y, x) = v[1];
    at(2, y, x) = v[2];
  }

 private:
  int width_ = 0;
  int height_ = 0;
  ColorSpace space_ = ColorSpace::Gray;
  std::vector<std::vector<double>> planes_;
};

// --- color conversion --------------------------------------------------

std::array<double, 3> rgb_pixel_to_ycbcr(const std::array<double, 3>& rgb);
std::array<double, 3> ycbcr_pixel_to_rgb(const std::array<double, 3>& ycbcr);

/// Per-pixel affine transform [Y,Cb,Cr] = offset + M*[R,G,B], kept as reals.
RasterImage rgb_to_ycbcr(const RasterImage& img);

/// Exact matrix inverse of the forward transform, clamped to [0, 255].
RasterImage ycbcr_to_rgb(const RasterImage& img);

/// Luma plane: YCbCr input projects its Y plane, RGB converts first,
/// Gray passes through unchanged.
RasterImage to_gray(const RasterImage& img);

// --- geometry ------------------------------------------------------------

/// Bilinear resample (half-pixel-center sampling, edge clamped).
RasterImage resize(const RasterImage& img, int width, int height);

// --- gamma ---------------------------------------------------------------

struct GammaParams {
  double gamma = 1.0;  // > 0; the degradation range of interest is [1.5, 5.5]
};

/// out = 255 * (v/255)^gamma per sample. Darkens for gamma > 1.
RasterImage gamma_degrade(const RasterImage& img, const GammaParams& p);

/// out = 255 * (v/255)^(1/gamma); inverse of gamma_degrade for known gamma.
RasterImage gamma_enhance(const RasterImage& img, const GammaParams& p);

// --- SSIM ------------------------------------------------------------------

struct SsimParams {
  int window = 11;   // odd, >= 3
  double c1 = 1e-4;  // (0.01)^2 on the [0,1] intensity scale
  double c2 = 9e-4;  // (0.03)^2
};

/// Mean structural similarity over all fully-contained sliding windows.
/// Inputs are Gray images on [0,255]; intensities are normalized to [0,1]
/// internally. Returns exactly 1.0 for identical inputs.
double ssim(const RasterImage& a, const RasterImage& b, const SsimParams& p = {});

}  // namespace leafdx
