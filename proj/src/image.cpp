#include "leafdx/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace leafdx {

namespace {

// Forward RGB -> YCbCr transform: [Y,Cb,Cr] = offset + M * [R,G,B].
// Rows 2 and 3 sum to zero, so achromatic pixels map to Cb = Cr = 128.
constexpr double kForward[3][3] = {
    {0.2568, 0.5041, 0.0979},
    {-0.1482, -0.2910, 0.4392},
    {0.4392, -0.3678, -0.0714},
};
constexpr double kOffset[3] = {16.0, 128.0, 128.0};

struct Matrix3 {
  double m[3][3];
};

Matrix3 invert(const double a[3][3]) {
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  Matrix3 inv;
  inv.m[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
  inv.m[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
  inv.m[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
  inv.m[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
  inv.m[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
  inv.m[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
  inv.m[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
  inv.m[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
  inv.m[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
  return inv;
}

const Matrix3& inverse_matrix() {
  static const Matrix3 inv = invert(kForward);
  return inv;
}

double clamp255(double v) { return std::clamp(v, 0.0, 255.0); }

}  // namespace

const char* to_string(ColorSpace space) {
  switch (space) {
    case ColorSpace::Rgb:
      return "rgb";
    case ColorSpace::YCbCr:
      return "ycbcr";
    case ColorSpace::Gray:
      return "gray";
  }
  return "unknown";
}

RasterImage::RasterImage(int width, int height, ColorSpace space, double fill)
    : width_(width), height_(height), space_(space) {
  if (width < 1 || height < 1) {
    throw Error("image dimensions must be at least 1x1");
  }
  const int channels = space == ColorSpace::Gray ? 1 : 3;
  planes_.assign(channels, std::vector<double>(pixel_count(), fill));
}

std::array<double, 3> rgb_pixel_to_ycbcr(const std::array<double, 3>& rgb) {
  std::array<double, 3> out;
  for (int r = 0; r < 3; ++r) {
    out[r] = kOffset[r] + kForward[r][0] * rgb[0] + kForward[r][1] * rgb[1] +
             kForward[r][2] * rgb[2];
  }
  return out;
}

std::array<double, 3> ycbcr_pixel_to_rgb(const std::array<double, 3>& ycbcr) {
  const Matrix3& inv = inverse_matrix();
  const double d0 = ycbcr[0] - kOffset[0];
  const double d1 = ycbcr[1] - kOffset[1];
  const double d2 = ycbcr[2] - kOffset[2];
  std::array<double, 3> out;
  for (int r = 0; r < 3; ++r) {
    out[r] = clamp255(inv.m[r][0] * d0 + inv.m[r][1] * d1 + inv.m[r][2] * d2);
  }
  return out;
}

RasterImage rgb_to_ycbcr(const RasterImage& img) {
  if (img.space() != ColorSpace::Rgb) {
    throw Error("rgb_to_ycbcr: input must be an RGB image");
  }
  RasterImage out(img.width(), img.height(), ColorSpace::YCbCr);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.set_pixel3(y, x, rgb_pixel_to_ycbcr(img.pixel3(y, x)));
    }
  }
  return out;
}

RasterImage ycbcr_to_rgb(const RasterImage& img) {
  if (img.space() != ColorSpace::YCbCr) {
    throw Error("ycbcr_to_rgb: input must be a YCbCr image");
  }
  RasterImage out(img.width(), img.height(), ColorSpace::Rgb);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.set_pixel3(y, x, ycbcr_pixel_to_rgb(img.pixel3(y, x)));
    }
  }
  return out;
}

RasterImage to_gray(const RasterImage& img) {
  if (img.space() == ColorSpace::Gray) {
    return img;
  }
  RasterImage out(img.width(), img.height(), ColorSpace::Gray);
  if (img.space() == ColorSpace::YCbCr) {
    out.plane(0) = img.plane(0);
    return out;
  }
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto p = img.pixel3(y, x);
      out.at(0, y, x) = kOffset[0] + kForward[0][0] * p[0] +
                        kForward[0][1] * p[1] + kForward[0][2] * p[2];
    }
  }
  return out;
}

RasterImage resize(const RasterImage& img, int width, int height) {
  if (width < 1 || height < 1) {
    throw Error("resize: target dimensions must be at least 1x1");
  }
  if (img.empty()) {
    throw Error("resize: empty input image");
  }
  RasterImage out(width, height, img.space());
  const double sx = static_cast<double>(img.width()) / width;
  const double sy = static_cast<double>(img.height()) / height;
  for (int p = 0; p < img.channels(); ++p) {
    const std::vector<double>& src = img.plane(p);
    std::vector<double>& dst = out.plane(p);
    for (int y = 0; y < height; ++y) {
      const double src_y = (y + 0.5) * sy - 0.5;
      const int fy = static_cast<int>(std::floor(src_y));
      const double ty = src_y - fy;
      const int y0 = std::clamp(fy, 0, img.height() - 1);
      const int y1 = std::clamp(fy + 1, 0, img.height() - 1);
      for (int x = 0; x < width; ++x) {
        const double src_x = (x + 0.5) * sx - 0.5;
        const int fx = static_cast<int>(std::floor(src_x));
        const double tx = src_x - fx;
        const int x0 = std::clamp(fx, 0, img.width() - 1);
        const int x1 = std::clamp(fx + 1, 0, img.width() - 1);
        const double v00 = src[static_cast<std::size_t>(y0) * img.width() + x0];
        const double v01 = src[static_cast<std::size_t>(y0) * img.width() + x1];
        const double v10 = src[static_cast<std::size_t>(y1) * img.width() + x0];
        const double v11 = src[static_cast<std::size_t>(y1) * img.width() + x1];
        dst[static_cast<std::size_t>(y) * width + x] =
            (1.0 - ty) * ((1.0 - tx) * v00 + tx * v01) +
            ty * ((1.0 - tx) * v10 + tx * v11);
      }
    }
  }
  return out;
}

namespace {

RasterImage apply_gamma(const RasterImage& img, double exponent) {
  RasterImage out(img.width(), img.height(), img.space());
  for (int p = 0; p < img.channels(); ++p) {
    const std::vector<double>& src = img.plane(p);
    std::vector<double>& dst = out.plane(p);
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i] = 255.0 * std::pow(src[i] / 255.0, exponent);
    }
  }
  return out;
}

}  // namespace

RasterImage gamma_degrade(const RasterImage& img, const GammaParams& p) {
  if (!(p.gamma > 0.0)) {
    throw Error("gamma_degrade: gamma must be positive");
  }
  return apply_gamma(img, p.gamma);
}

RasterImage gamma_enhance(const RasterImage& img, const GammaParams& p) {
  if (!(p.gamma > 0.0)) {
    throw Error("gamma_enhance: gamma must be positive");
  }
  return apply_gamma(img, 1.0 / p.gamma);
}

double ssim(const RasterImage& a, const RasterImage& b, const SsimParams& p) {
  if (a.space() != ColorSpace::Gray || b.space() != ColorSpace::Gray) {
    throw Error("ssim: inputs must be Gray images");
  }
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error("ssim: image dimensions differ");
  }
  if (p.window < 3 || p.window % 2 == 0) {
    throw Error("ssim: window must be odd and at least 3");
  }
  if (p.window > a.width() || p.window > a.height()) {
    throw Error("ssim: window larger than image");
  }
  const int w = p.window;
  const double n = static_cast<double>(w) * w;
  const std::vector<double>& pa = a.plane(0);
  const std::vector<double>& pb = b.plane(0);
  const int stride = a.width();

  double total = 0.0;
  std::size_t windows = 0;
  for (int wy = 0; wy + w <= a.height(); ++wy) {
    for (int wx = 0; wx + w <= a.width(); ++wx) {
      double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
      for (int y = wy; y < wy + w; ++y) {
        for (int x = wx; x < wx + w; ++x) {
          const double va = pa[static_cast<std::size_t>(y) * stride + x] / 255.0;
          const double vb = pb[static_cast<std::size_t>(y) * stride + x] / 255.0;
          sa += va;
          sb += vb;
          saa += va * va;
          sbb += vb * vb;
          sab += va * vb;
        }
      }
      const double mu_a = sa / n;
      const double mu_b = sb / n;
      const double var_a = saa / n - mu_a * mu_a;
      const double var_b = sbb / n - mu_b * mu_b;
      const double cov = sab / n - mu_a * mu_b;
      const double num = (2.0 * mu_a * mu_b + p.c1) * (2.0 * cov + p.c2);
      const double den =
          (mu_a * mu_a + mu_b * mu_b + p.c1) * (var_a + var_b + p.c2);
      total += num / den;
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

}  // namespace leafdx
