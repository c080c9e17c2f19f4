#include "leafdx/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace leafdx {

namespace {

std::uint8_t to_byte(double v) {
  const long r = std::lround(std::clamp(v, 0.0, 255.0));
  return static_cast<std::uint8_t>(std::clamp(r, 0L, 255L));
}

RasterImage read_png(const std::filesystem::path& path) {
  png_image pimg{};
  pimg.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&pimg, path.string().c_str())) {
    throw Error("load_image: not a readable PNG: " + path.string() + " (" +
                pimg.message + ")");
  }
  pimg.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(pimg));
  if (!png_image_finish_read(&pimg, nullptr, buffer.data(), 0, nullptr)) {
    std::string message = pimg.message;
    png_image_free(&pimg);
    throw Error("load_image: failed to decode PNG: " + path.string() + " (" +
                message + ")");
  }
  if (pimg.width == 0 || pimg.height == 0) {
    throw Error("load_image: zero-dimension image: " + path.string());
  }
  RasterImage img(static_cast<int>(pimg.width), static_cast<int>(pimg.height),
                  ColorSpace::Rgb);
  std::size_t i = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      img.at(0, y, x) = buffer[i++];
      img.at(1, y, x) = buffer[i++];
      img.at(2, y, x) = buffer[i++];
    }
  }
  return img;
}

// Skips PNM whitespace and '#' comments, then parses one unsigned integer.
int read_pnm_int(std::istream& in, const std::filesystem::path& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c)) {
    throw Error("load_image: malformed PNM header: " + path.string());
  }
  long value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    if (value > 1'000'000'000L) {
      throw Error("load_image: PNM header value out of range: " + path.string());
    }
    c = in.get();
  }
  if (c != EOF) in.unget();
  return static_cast<int>(value);
}

RasterImage read_pnm(std::ifstream& in, const std::filesystem::path& path,
                     bool color) {
  in.seekg(2);  // past the magic
  const int width = read_pnm_int(in, path);
  const int height = read_pnm_int(in, path);
  const int maxval = read_pnm_int(in, path);
  if (width < 1 || height < 1) {
    throw Error("load_image: zero-dimension image: " + path.string());
  }
  if (maxval < 1 || maxval > 255) {
    throw Error("load_image: unsupported PNM maxval (must be ≤ 255): " +
                path.string());
  }
  in.get();  // single whitespace byte after the header
  const int samples_per_pixel = color ? 3 : 1;
  std::vector<char> raw(static_cast<std::size_t>(width) * height *
                        samples_per_pixel);
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw Error("load_image: truncated PNM data: " + path.string());
  }
  RasterImage img(width, height, ColorSpace::Rgb);
  const double scale = 255.0 / maxval;
  std::size_t i = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (color) {
        img.at(0, y, x) = static_cast<std::uint8_t>(raw[i++]) * scale;
        img.at(1, y, x) = static_cast<std::uint8_t>(raw[i++]) * scale;
        img.at(2, y, x) = static_cast<std::uint8_t>(raw[i++]) * scale;
      } else {
        const double v = static_cast<std::uint8_t>(raw[i++]) * scale;
        img.at(0, y, x) = v;
        img.at(1, y, x) = v;
        img.at(2, y, x) = v;
      }
    }
  }
  return img;
}

void write_png(const RasterImage& img, const std::filesystem::path& path) {
  const bool gray = img.space() == ColorSpace::Gray;
  png_image pimg{};
  pimg.version = PNG_IMAGE_VERSION;
  pimg.width = static_cast<png_uint_32>(img.width());
  pimg.height = static_cast<png_uint_32>(img.height());
  pimg.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const int channels = gray ? 1 : 3;
  std::vector<std::uint8_t> buffer(img.pixel_count() * channels);
  std::size_t i = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int p = 0; p < channels; ++p) {
        buffer[i++] = to_byte(img.at(p, y, x));
      }
    }
  }
  if (!png_image_write_to_file(&pimg, path.string().c_str(), 0, buffer.data(),
                               0, nullptr)) {
    throw Error("save_image: failed to write PNG: " + path.string() + " (" +
                pimg.message + ")");
  }
}

void write_pnm(const RasterImage& img, const std::filesystem::path& path,
               bool color) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("save_image: cannot open for writing: " + path.string());
  }
  out << (color ? "P6" : "P5") << "\n"
      << img.width() << " " << img.height() << "\n255\n";
  std::vector<char> raw;
  raw.reserve(img.pixel_count() * (color ? 3 : 1));
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int p = 0; p < (color ? 3 : 1); ++p) {
        raw.push_back(static_cast<char>(to_byte(img.at(p, y, x))));
      }
    }
  }
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  out.flush();
  if (!out) {
    throw Error("save_image: write failed: " + path.string());
  }
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

RasterImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("load_image: file not found: " + path.string());
  }
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  if (in.gcount() < 2) {
    throw Error("load_image: unsupported format (file too short): " +
                path.string());
  }
  static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G',
                                           '\r', '\n', 0x1a, '\n'};
  if (in.gcount() == 8 &&
      std::equal(png_sig, png_sig + 8,
                 reinterpret_cast<const unsigned char*>(magic))) {
    in.close();
    return read_png(path);
  }
  if (magic[0] == 'P' && (magic[1] == '6' || magic[1] == '5')) {
    in.clear();
    return read_pnm(in, path, magic[1] == '6');
  }
  throw Error("load_image: unsupported format (expected PNG, PPM or PGM): " +
              path.string());
}

void save_image(const RasterImage& img, const std::filesystem::path& path) {
  if (img.empty()) {
    throw Error("save_image: empty image");
  }
  const RasterImage& out =
      img.space() == ColorSpace::YCbCr ? ycbcr_to_rgb(img) : img;
  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    write_png(out, path);
  } else if (ext == ".ppm") {
    if (out.space() == ColorSpace::Gray) {
      RasterImage rgb(out.width(), out.height(), ColorSpace::Rgb);
      rgb.plane(0) = out.plane(0);
      rgb.plane(1) = out.plane(0);
      rgb.plane(2) = out.plane(0);
      write_pnm(rgb, path, true);
    } else {
      write_pnm(out, path, true);
    }
  } else if (ext == ".pgm") {
    if (out.space() != ColorSpace::Gray) {
      throw Error("save_image: .pgm requires a Gray image");
    }
    write_pnm(out, path, false);
  } else {
    throw Error("save_image: unsupported extension (use .png, .ppm or .pgm): " +
                path.string());
  }
}

}  // namespace leafdx
