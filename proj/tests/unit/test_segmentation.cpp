#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "leafdx/segmentation.hpp"

using namespace leafdx;

namespace {

RasterImage ycbcr_strip(const std::vector<Pixel3>& pixels) {
  RasterImage rgb(static_cast<int>(pixels.size()), 1, ColorSpace::Rgb);
  RasterImage img = rgb_to_ycbcr(rgb);
  for (int x = 0; x < img.width(); ++x)
    img.set_pixel3(0, x, pixels[static_cast<std::size_t>(x)]);
  return img;
}

// Exhaustive K=2 oracle: best fitness over all bipartitions with
// centroid centers (the configurations the GA's refinement step produces).
double bipartition_optimum(const std::vector<Pixel3>& pixels) {
  const std::size_t n = pixels.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask + 1 < (1u << n); ++mask) {
    Pixel3 c0{}, c1{};
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool one = (mask >> i) & 1u;
      Pixel3& acc = one ? c1 : c0;
      for (int c = 0; c < 3; ++c) acc[c] += pixels[i][c];
      (one ? n1 : n0)++;
    }
    for (int c = 0; c < 3; ++c) {
      c0[c] /= static_cast<double>(n0);
      c1[c] /= static_cast<double>(n1);
    }
    best = std::min(best, fitness(pixels, Chromosome{{c0, c1}}));
  }
  return best;
}

}  // namespace

TEST_CASE("assign_pixels labels, counts, centroids") {
  std::vector<Pixel3> pixels = {{0, 0, 0}, {10, 0, 0}, {255, 0, 0}};
  Chromosome chrom{{{1, 0, 0}, {250, 0, 0}}};
  ClusterAssignment a = assign_pixels(pixels, chrom);
  CHECK(a.labels == std::vector<int>{0, 0, 1});
  CHECK(a.counts == std::vector<std::size_t>{2, 1});
  CHECK(a.centroids[0] == Pixel3{5, 0, 0});
  CHECK(a.centroids[1] == Pixel3{255, 0, 0});
}

TEST_CASE("assignment ties break to the lowest center index") {
  std::vector<Pixel3> pixels = {{5, 0, 0}};
  ClusterAssignment a = assign_pixels(pixels, Chromosome{{{0, 0, 0}, {10, 0, 0}}});
  CHECK(a.labels == std::vector<int>{0});
}

TEST_CASE("empty clusters keep the chromosome center") {
  std::vector<Pixel3> pixels = {{0, 0, 0}, {1, 0, 0}};
  Chromosome chrom{{{0, 0, 0}, {200, 50, 50}}};
  ClusterAssignment a = assign_pixels(pixels, chrom);
  CHECK(a.counts == std::vector<std::size_t>{2, 0});
  CHECK(a.centroids[1] == Pixel3{200, 50, 50});

  Chromosome updated = update_centers(a, chrom);
  CHECK(updated.centers[0] == Pixel3{0.5, 0, 0});
  CHECK(updated.centers[1] == Pixel3{200, 50, 50});
}

TEST_CASE("fitness sums Euclidean distances to the nearest center") {
  // [DERIVED] 3-4-5 triangle: distances 0 and 5.
  std::vector<Pixel3> pixels = {{0, 0, 0}, {3, 4, 0}};
  CHECK(fitness(pixels, Chromosome{{{0, 0, 0}}}) == doctest::Approx(5.0));
  CHECK(fitness(pixels, Chromosome{{{0, 0, 0}, {3, 4, 0}}}) == 0.0);
}

TEST_CASE("image_pixels requires a YCbCr image") {
  RasterImage rgb(2, 2, ColorSpace::Rgb);
  CHECK_THROWS_AS(image_pixels(rgb), Error);
  RasterImage img = rgb_to_ycbcr(rgb);
  CHECK(image_pixels(img).size() == 4);
}

TEST_CASE("init_population draws distinct centers when possible") {
  std::vector<Pixel3> pixels;
  for (int i = 0; i < 6; ++i)
    pixels.push_back({static_cast<double>(40 * i), 0, 0});
  GaConfig cfg;
  cfg.k = 3;
  cfg.population_size = 16;
  std::mt19937_64 rng(1);
  auto pop = init_population(pixels, cfg, rng);
  REQUIRE(pop.size() == 16);
  for (const Chromosome& c : pop) {
    REQUIRE(c.centers.size() == 3);
    for (const Pixel3& center : c.centers)
      CHECK(std::count(pixels.begin(), pixels.end(), center) == 1);
    CHECK(c.centers[0] != c.centers[1]);
    CHECK(c.centers[0] != c.centers[2]);
    CHECK(c.centers[1] != c.centers[2]);
  }

  // Fewer distinct colors than K: sampling falls back to replacement.
  std::vector<Pixel3> flat(5, Pixel3{9, 9, 9});
  auto pop2 = init_population(flat, cfg, rng);
  for (const Chromosome& c : pop2)
    for (const Pixel3& center : c.centers) CHECK(center == Pixel3{9, 9, 9});
}

TEST_CASE("GaConfig::validate rejects bad settings") {
  GaConfig ok;
  CHECK_NOTHROW(ok.validate());
  GaConfig bad = ok;
  bad.k = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ok;
  bad.population_size = 1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ok;
  bad.elitism = ok.population_size;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ok;
  bad.mutation_rate = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ok;
  bad.stagnation_window = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("evolve_generation preserves the best chromosome via elitism") {
  std::mt19937_64 data_rng(5);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  std::vector<Pixel3> pixels;
  for (int i = 0; i < 30; ++i) pixels.push_back({u(data_rng), u(data_rng), u(data_rng)});

  GaConfig cfg;
  cfg.k = 2;
  cfg.population_size = 10;
  cfg.elitism = 2;
  std::mt19937_64 rng(7);
  auto pop = init_population(pixels, cfg, rng);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : pop) best = std::min(best, fitness(pixels, c));

  for (int gen = 0; gen < 8; ++gen) {
    pop = evolve_generation(pop, pixels, cfg, rng);
    REQUIRE(pop.size() == 10);
    double now = std::numeric_limits<double>::infinity();
    for (const auto& c : pop) now = std::min(now, fitness(pixels, c));
    CHECK(now <= best + 1e-12);  // elite carries the incumbent forward
    best = now;
  }
}

TEST_CASE("run_ga separates three flat color regions exactly") {
  std::vector<Pixel3> pixels;
  for (int i = 0; i < 12; ++i)
    pixels.push_back(i < 4   ? Pixel3{30, 100, 100}
                     : i < 8 ? Pixel3{120, 110, 150}
                             : Pixel3{220, 128, 128});
  RasterImage img = ycbcr_strip(pixels);

  GaConfig cfg;
  cfg.k = 3;
  cfg.seed = 42;
  GaResult res = run_ga(img, cfg);
  CHECK(res.fitness < 1e-6);
  CHECK(res.assignment.labels.size() == 12);
  REQUIRE(!res.best_history.empty());
  for (std::size_t i = 1; i < res.best_history.size(); ++i)
    CHECK(res.best_history[i] <= res.best_history[i - 1] + 1e-12);
  CHECK(res.generations_run <= cfg.generations);
  std::size_t total = 0;
  for (std::size_t c : res.assignment.counts) total += c;
  CHECK(total == 12);

  // Pixels of one flat region always share a label.
  for (int i = 1; i < 4; ++i)
    CHECK(res.assignment.labels[i] == res.assignment.labels[0]);
  for (int i = 5; i < 8; ++i)
    CHECK(res.assignment.labels[i] == res.assignment.labels[4]);
}

TEST_CASE("run_ga is deterministic for a fixed config") {
  std::mt19937_64 data_rng(17);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  std::vector<Pixel3> pixels;
  for (int i = 0; i < 20; ++i) pixels.push_back({u(data_rng), u(data_rng), u(data_rng)});
  RasterImage img = ycbcr_strip(pixels);
  GaConfig cfg;
  cfg.k = 2;
  cfg.seed = 9;
  GaResult a = run_ga(img, cfg);
  GaResult b = run_ga(img, cfg);
  CHECK(a.fitness == b.fitness);
  CHECK(a.assignment.labels == b.assignment.labels);
  CHECK(a.best.centers == b.best.centers);
  CHECK(a.best_history == b.best_history);
}

TEST_CASE("run_ga matches the exhaustive bipartition oracle on tiny instances") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  for (int inst = 0; inst < 10; ++inst) {
    std::uniform_int_distribution<int> nd(3, 8);
    const int n = nd(rng);
    std::vector<Pixel3> pixels;
    for (int i = 0; i < n; ++i) pixels.push_back({u(rng), u(rng), u(rng)});
    const double oracle = bipartition_optimum(pixels);

    RasterImage img = ycbcr_strip(pixels);
    GaConfig cfg;
    cfg.k = 2;
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t s = 0; s < 3; ++s) {
      cfg.seed = s;
      best = std::min(best, run_ga(img, cfg).fitness);
    }
    CHECK(best <= oracle + 1e-6);
  }
}

TEST_CASE("extract_cluster_mask emits a strict 0/255 Gray image") {
  std::vector<Pixel3> pixels = {{0, 0, 0}, {200, 0, 0}, {0, 0, 0}, {200, 0, 0}};
  ClusterAssignment a = assign_pixels(pixels, Chromosome{{{0, 0, 0}, {200, 0, 0}}});
  RasterImage mask = extract_cluster_mask(a, 1, 2, 2);
  CHECK(mask.space() == ColorSpace::Gray);
  CHECK(mask.at(0, 0, 0) == 0.0);
  CHECK(mask.at(0, 0, 1) == 255.0);
  CHECK(mask.at(0, 1, 0) == 0.0);
  CHECK(mask.at(0, 1, 1) == 255.0);
}

TEST_CASE("select_diseased_cluster excludes border owners, then picks max Cr") {
  // 4x4 grid: cluster 0 owns the whole border, clusters 1 and 2 share
  // the 2x2 interior. Cluster 2 has the higher centroid Cr.
  ClusterAssignment a;
  a.labels.assign(16, 0);
  a.labels[5] = 1;
  a.labels[6] = 2;
  a.labels[9] = 1;
  a.labels[10] = 2;
  a.counts = {12, 2, 2};
  a.centroids = {{220, 125, 160}, {97, 105, 105}, {85, 106, 154}};

  CHECK(select_diseased_cluster(a, 4, 4, 0.5) == 2);
  // Override wins unconditionally (after range validation).
  CHECK(select_diseased_cluster(a, 4, 4, 0.5, 1) == 1);
  CHECK(select_diseased_cluster(a, 4, 4, 0.5, 0) == 0);
  CHECK_THROWS_AS(select_diseased_cluster(a, 4, 4, 0.5, 7), Error);

  // Threshold 1.0 keeps the border cluster in play; its Cr is the highest,
  // so exclusion is what protects against picking the background.
  CHECK(select_diseased_cluster(a, 4, 4, 1.0) == 0);

  // Everything excluded -> error.
  ClusterAssignment all_border;
  all_border.labels.assign(16, 0);
  for (std::size_t i = 0; i < all_border.labels.size(); ++i)
    all_border.labels[i] = static_cast<int>(i % 2);
  all_border.counts = {8, 8};
  all_border.centroids = {{10, 0, 0}, {20, 0, 0}};
  CHECK_THROWS_AS(select_diseased_cluster(all_border, 4, 4, 0.0), Error);
}
