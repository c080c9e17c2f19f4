#include "leafdx/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

namespace leafdx {

namespace {

double squared_distance(const Pixel3& a, const Pixel3& b) {
  const double d0 = a[0] - b[0];
  const double d1 = a[1] - b[1];
  const double d2 = a[2] - b[2];
  return d0 * d0 + d1 * d1 + d2 * d2;
}

// Nearest center by Euclidean distance; squared distances compare the same
// way, ties keep the lowest index because only a strictly smaller distance
// replaces the incumbent.
int nearest_center(const Pixel3& p, const std::vector<Pixel3>& centers) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int j = 0; j < static_cast<int>(centers.size()); ++j) {
    const double d = squared_distance(p, centers[j]);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

struct Scored {
  Chromosome chrom;
  double fitness = 0.0;
};

// Index of the fitter of two scored chromosomes; ties keep the lower index.
std::size_t tournament_winner(const std::vector<Scored>& population,
                              std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return population[b].fitness < population[a].fitness ? b : a;
}

std::vector<Scored> score_population(const std::vector<Chromosome>& population,
                                     const std::vector<Pixel3>& pixels) {
  std::vector<Scored> scored;
  scored.reserve(population.size());
  for (const Chromosome& c : population) {
    scored.push_back({c, fitness(pixels, c)});
  }
  return scored;
}

// One generation over an already-scored population. Elites are copied with
// their fitness; every offspring is refined by one assignment/mean-update
// step and scored exactly once.
std::vector<Scored> evolve_scored(const std::vector<Scored>& population,
                                  const std::vector<Pixel3>& pixels,
                                  const GaConfig& cfg, std::mt19937_64& rng) {
  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return population[a].fitness < population[b].fitness;
                   });

  std::vector<Scored> next;
  next.reserve(population.size());
  const std::size_t elites = std::min<std::size_t>(
      static_cast<std::size_t>(std::max(cfg.elitism, 0)), population.size());
  for (std::size_t e = 0; e < elites; ++e) {
    next.push_back(population[order[e]]);
  }

  std::uniform_int_distribution<std::size_t> pick(0, population.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int k = static_cast<int>(population.front().chrom.centers.size());

  while (next.size() < population.size()) {
    const std::size_t pa = tournament_winner(population, pick(rng), pick(rng));
    const std::size_t pb = tournament_winner(population, pick(rng), pick(rng));
    Chromosome child = population[pa].chrom;
    if (k >= 2 && unit(rng) < cfg.crossover_rate) {
      std::uniform_int_distribution<int> cut_dist(1, k - 1);
      const int cut = cut_dist(rng);
      for (int j = cut; j < k; ++j) {
        child.centers[j] = population[pb].chrom.centers[j];
      }
    }
    for (Pixel3& center : child.centers) {
      for (double& coord : center) {
        if (unit(rng) < cfg.mutation_rate) {
          std::normal_distribution<double> noise(0.0, cfg.mutation_sigma);
          coord = std::clamp(coord + noise(rng), 0.0, 255.0);
        }
      }
    }
    child = update_centers(assign_pixels(pixels, child), child);
    const double child_fitness = fitness(pixels, child);
    next.push_back({std::move(child), child_fitness});
  }
  return next;
}

}  // namespace

void GaConfig::validate() const {
  if (k < 1) throw Error("ga: k must be at least 1");
  if (population_size < 2) throw Error("ga: population_size must be at least 2");
  if (generations < 0) throw Error("ga: generations must be non-negative");
  if (crossover_rate < 0.0 || crossover_rate > 1.0)
    throw Error("ga: crossover_rate must be in [0, 1]");
  if (mutation_rate < 0.0 || mutation_rate > 1.0)
    throw Error("ga: mutation_rate must be in [0, 1]");
  if (mutation_sigma < 0.0) throw Error("ga: mutation_sigma must be non-negative");
  if (elitism < 0 || elitism >= population_size)
    throw Error("ga: elitism must be in [0, population_size)");
  if (stagnation_window < 1)
    throw Error("ga: stagnation_window must be at least 1");
}

std::vector<Pixel3> image_pixels(const RasterImage& ycbcr) {
  if (ycbcr.space() != ColorSpace::YCbCr) {
    throw Error("image_pixels: expected a YCbCr image");
  }
  std::vector<Pixel3> pixels;
  pixels.reserve(ycbcr.pixel_count());
  for (int y = 0; y < ycbcr.height(); ++y) {
    for (int x = 0; x < ycbcr.width(); ++x) {
      pixels.push_back(ycbcr.pixel3(y, x));
    }
  }
  return pixels;
}

ClusterAssignment assign_pixels(const std::vector<Pixel3>& pixels,
                                const Chromosome& chrom) {
  if (pixels.empty()) throw Error("assign_pixels: empty pixel list");
  if (chrom.centers.empty())
    throw Error("assign_pixels: chromosome has no centers");
  const int k = static_cast<int>(chrom.centers.size());

  ClusterAssignment out;
  out.labels.resize(pixels.size());
  out.counts.assign(k, 0);
  std::vector<Pixel3> sums(k, Pixel3{0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const int j = nearest_center(pixels[i], chrom.centers);
    out.labels[i] = j;
    out.counts[j] += 1;
    sums[j][0] += pixels[i][0];
    sums[j][1] += pixels[i][1];
    sums[j][2] += pixels[i][2];
  }
  out.centroids.resize(k);
  for (int j = 0; j < k; ++j) {
    if (out.counts[j] > 0) {
      const double n = static_cast<double>(out.counts[j]);
      out.centroids[j] = {sums[j][0] / n, sums[j][1] / n, sums[j][2] / n};
    } else {
      out.centroids[j] = chrom.centers[j];
    }
  }
  return out;
}

Chromosome update_centers(const ClusterAssignment& assignment,
                          const Chromosome& chrom) {
  Chromosome next = chrom;
  for (std::size_t j = 0; j < chrom.centers.size(); ++j) {
    if (j < assignment.counts.size() && assignment.counts[j] > 0) {
      next.centers[j] = assignment.centroids[j];
    }
  }
  return next;
}

double fitness(const std::vector<Pixel3>& pixels, const Chromosome& chrom) {
  if (pixels.empty()) throw Error("fitness: empty pixel list");
  if (chrom.centers.empty()) throw Error("fitness: chromosome has no centers");
  double total = 0.0;
  for (const Pixel3& p : pixels) {
    double best = std::numeric_limits<double>::infinity();
    for (const Pixel3& z : chrom.centers) {
      best = std::min(best, squared_distance(p, z));
    }
    total += std::sqrt(best);
  }
  return total;
}

std::vector<Chromosome> init_population(const std::vector<Pixel3>& pixels,
                                        const GaConfig& cfg,
                                        std::mt19937_64& rng) {
  if (pixels.empty()) throw Error("init_population: empty pixel list");
  const std::size_t distinct =
      std::set<Pixel3>(pixels.begin(), pixels.end()).size();
  const bool with_replacement = distinct < static_cast<std::size_t>(cfg.k);

  std::uniform_int_distribution<std::size_t> pick(0, pixels.size() - 1);
  std::vector<Chromosome> population;
  population.reserve(cfg.population_size);
  for (int c = 0; c < cfg.population_size; ++c) {
    Chromosome chrom;
    chrom.centers.reserve(cfg.k);
    std::set<Pixel3> chosen;
    while (static_cast<int>(chrom.centers.size()) < cfg.k) {
      const Pixel3& candidate = pixels[pick(rng)];
      if (!with_replacement && !chosen.insert(candidate).second) {
        continue;  // value already used in this chromosome
      }
      chrom.centers.push_back(candidate);
    }
    population.push_back(std::move(chrom));
  }
  return population;
}

std::vector<Chromosome> evolve_generation(
    const std::vector<Chromosome>& population,
    const std::vector<Pixel3>& pixels, const GaConfig& cfg,
    std::mt19937_64& rng) {
  if (population.empty()) throw Error("evolve_generation: empty population");
  const std::vector<Scored> next =
      evolve_scored(score_population(population, pixels), pixels, cfg, rng);
  std::vector<Chromosome> out;
  out.reserve(next.size());
  for (const Scored& s : next) out.push_back(s.chrom);
  return out;
}

GaResult run_ga(const RasterImage& ycbcr, const GaConfig& cfg) {
  cfg.validate();
  const std::vector<Pixel3> pixels = image_pixels(ycbcr);

  std::mt19937_64 rng(cfg.seed);
  std::vector<Scored> population =
      score_population(init_population(pixels, cfg, rng), pixels);

  GaResult result;
  result.fitness = std::numeric_limits<double>::infinity();
  for (const Scored& s : population) {
    if (s.fitness < result.fitness) {
      result.fitness = s.fitness;
      result.best = s.chrom;
    }
  }

  int stagnant = 0;
  for (int gen = 0; gen < cfg.generations; ++gen) {
    population = evolve_scored(population, pixels, cfg, rng);
    double gen_best = std::numeric_limits<double>::infinity();
    const Chromosome* gen_best_chrom = nullptr;
    for (const Scored& s : population) {
      if (s.fitness < gen_best) {
        gen_best = s.fitness;
        gen_best_chrom = &s.chrom;
      }
    }
    result.generations_run = gen + 1;
    if (gen_best < result.fitness - 1e-6) {
      stagnant = 0;
    } else {
      ++stagnant;
    }
    if (gen_best < result.fitness) {
      result.fitness = gen_best;
      result.best = *gen_best_chrom;
    }
    result.best_history.push_back(result.fitness);
    if (stagnant >= cfg.stagnation_window) {
      break;
    }
  }

  result.assignment = assign_pixels(pixels, result.best);
  return result;
}

RasterImage extract_cluster_mask(const ClusterAssignment& assignment,
                                 int cluster, int width, int height) {
  if (cluster < 0 || cluster >= static_cast<int>(assignment.counts.size())) {
    throw Error("extract_cluster_mask: cluster index out of range");
  }
  if (assignment.labels.size() !=
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error("extract_cluster_mask: label count does not match dimensions");
  }
  RasterImage mask(width, height, ColorSpace::Gray);
  for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
    mask.plane(0)[i] = assignment.labels[i] == cluster ? 255.0 : 0.0;
  }
  return mask;
}

int select_diseased_cluster(const ClusterAssignment& assignment, int width,
                            int height, double border_fraction_threshold,
                            std::optional<int> override_index) {
  const int k = static_cast<int>(assignment.counts.size());
  if (override_index.has_value()) {
    if (*override_index < 0 || *override_index >= k) {
      throw Error("select_diseased_cluster: override index out of range");
    }
    return *override_index;
  }
  if (k < 2) throw Error("select_diseased_cluster: need at least 2 clusters");
  if (assignment.labels.size() !=
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error("select_diseased_cluster: label count does not match dimensions");
  }

  std::vector<std::size_t> border_counts(k, 0);
  std::size_t border_total = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (y == 0 || y == height - 1 || x == 0 || x == width - 1) {
        border_counts[assignment.labels[static_cast<std::size_t>(y) * width + x]]++;
        ++border_total;
      }
    }
  }

  int best = -1;
  double best_cr = -1.0;
  for (int j = 0; j < k; ++j) {
    const double border_share =
        border_total > 0 ? static_cast<double>(border_counts[j]) / border_total
                         : 0.0;
    if (border_share > border_fraction_threshold) continue;  // background
    const double cr = assignment.centroids[j][2];
    if (cr > best_cr) {
      best_cr = cr;
      best = j;
    }
  }
  if (best < 0) {
    throw Error("select_diseased_cluster: no foreground cluster found");
  }
  return best;
}

}  // namespace leafdx
