#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "leafdx/image.hpp"

namespace leafdx {

/// One pixel in (Y, Cb, Cr) plane order.
using Pixel3 = std::array<double, 3>;

/// GA genotype: an ordered sequence of K cluster centers in YCbCr space.
struct Chromosome {
  std::vector<Pixel3> centers;
};

struct ClusterAssignment {
  std::vector<int> labels;          // per pixel, nearest-center index in [0, K)
  std::vector<std::size_t> counts;  // per cluster; sums to the pixel count
  std::vector<Pixel3> centroids;    // mean of members; empty clusters carry
                                    // the chromosome center they came from
};

struct GaConfig {
  int k = 3;
  int population_size = 24;
  int generations = 60;
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;    // per coordinate
  double mutation_sigma = 10.0;  // YCbCr units
  int elitism = 1;
  std::uint64_t seed = 0;
  int stagnation_window = 12;  // stop after this many generations without
                               // a best-ever improvement of at least 1e-6

  void validate() const;  // throws Error
};

/// Flattens a YCbCr image into its pixel list (row-major).
std::vector<Pixel3> image_pixels(const RasterImage& ycbcr);

/// Labels every pixel with its nearest center by Euclidean distance.
/// Ties break toward the lowest center index.
ClusterAssignment assign_pixels(const std::vector<Pixel3>& pixels,
                                const Chromosome& chrom);

/// Replaces each non-empty cluster's center with the cluster centroid;
/// empty clusters keep their previous center.
Chromosome update_centers(const ClusterAssignment& assignment,
                          const Chromosome& chrom);

/// Sum over all pixels of the Euclidean distance to the nearest center.
/// Lower is fitter; zero iff every pixel coincides with a center.
double fitness(const std::vector<Pixel3>& pixels, const Chromosome& chrom);

/// Each chromosome gets K centers drawn from the pixels, distinct by value
/// when the image has at least K distinct colors (otherwise sampled with
/// replacement).
std::vector<Chromosome> init_population(const std::vector<Pixel3>& pixels,
                                        const GaConfig& cfg,
                                        std::mt19937_64& rng);

/// One generation: elitism, binary tournament selection, single-point
/// crossover at a center boundary, per-coordinate Gaussian mutation clamped
/// to [0, 255], then one nearest-assignment/mean-update refinement step on
/// every offspring.
std::vector<Chromosome> evolve_generation(
    const std::vector<Chromosome>& population,
    const std::vector<Pixel3>& pixels, const GaConfig& cfg,
    std::mt19937_64& rng);

struct GaResult {
  Chromosome best;
  ClusterAssignment assignment;
  double fitness = 0.0;
  int generations_run = 0;
  std::vector<double> best_history;  // best-ever fitness after each generation
};

/// Full GA loop over the image pixels; deterministic for a given config.
GaResult run_ga(const RasterImage& ycbcr, const GaConfig& cfg);

/// Binary mask image: 255 where the label matches, 0 elsewhere.
RasterImage extract_cluster_mask(const ClusterAssignment& assignment,
                                 int cluster, int width, int height);

/// Picks the diseased cluster: clusters owning more than
/// `border_fraction_threshold` of the image-border pixels are treated as
/// background and excluded, then the remaining cluster with the highest
/// centroid Cr wins. `override_index`, when set, is returned unconditionally.
int select_diseased_cluster(const ClusterAssignment& assignment, int width,
                            int height, double border_fraction_threshold,
                            std::optional<int> override_index = std::nullopt);

}  // namespace leafdx
