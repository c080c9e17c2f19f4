#pragma once

#include <filesystem>

#include "leafdx/image.hpp"

namespace leafdx {

/// Reads a PNG or binary PPM/PGM (P6/P5) file into an RGB image with values
/// in [0, 255]. Grayscale sources are expanded to three equal planes.
RasterImage load_image(const std::filesystem::path& path);

/// Writes PNG (.png), binary PPM (.ppm) or binary PGM (.pgm), chosen by
/// extension. Samples are rounded to nearest integer and clamped to [0, 255].
/// YCbCr images are converted to RGB before writing; .pgm requires Gray.
void save_image(const RasterImage& img, const std::filesystem::path& path);

}  // namespace leafdx
