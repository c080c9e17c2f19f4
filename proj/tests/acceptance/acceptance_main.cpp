// Acceptance gate: one self-contained check per criterion, one line of
// output each, nonzero exit if any fails.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "leafdx/classifier.hpp"
#include "leafdx/image.hpp"
#include "leafdx/image_io.hpp"
#include "leafdx/pipeline.hpp"
#include "leafdx/rng.hpp"
#include "leafdx/segmentation.hpp"
#include "leafdx/synth.hpp"
#include "leafdx/texture.hpp"

namespace fs = std::filesystem;
using namespace leafdx;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(3);
  out << v;
  return out.str();
}

// ---- A1 -------------------------------------------------------------------

Outcome a1_color_transform() {
  const auto t0 = Clock::now();
  auto black = rgb_pixel_to_ycbcr({0, 0, 0});
  if (black != std::array<double, 3>{16.0, 128.0, 128.0})
    return {false, "(0,0,0) did not map to (16,128,128) exactly"};
  auto white = rgb_pixel_to_ycbcr({255, 255, 255});
  if (std::abs(white[0] - 234.99) > 1e-2 || std::abs(white[1] - 128.0) > 1e-2 ||
      std::abs(white[2] - 128.0) > 1e-2)
    return {false, "(255,255,255) outside 1e-2 of (234.99,128,128)"};

  std::mt19937_64 rng(20240915);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    std::array<double, 3> rgb = {u(rng), u(rng), u(rng)};
    auto back = ycbcr_pixel_to_rgb(rgb_pixel_to_ycbcr(rgb));
    for (int c = 0; c < 3; ++c)
      worst = std::max(worst, std::abs(back[c] - rgb[c]));
  }
  const double dt = seconds_since(t0);
  if (worst > 0.01)
    return {false, "round-trip error " + fmt(worst) + " exceeds 0.01"};
  if (dt >= 1.0) return {false, "took " + fmt(dt) + "s (budget 1s)"};
  return {true, "round-trip max err " + fmt(worst) + ", " + fmt(dt) + "s"};
}

// ---- A2 -------------------------------------------------------------------

Glcm naive_glcm(const QuantizedGrid& grid, std::pair<int, int> offset,
                int levels) {
  const auto [dy, dx] = offset;
  std::vector<long long> counts(static_cast<std::size_t>(levels) * levels, 0);
  long long total = 0;
  for (int y = 0; y < grid.height; ++y)
    for (int x = 0; x < grid.width; ++x) {
      const int ny = y + dy, nx = x + dx;
      if (ny < 0 || ny >= grid.height || nx < 0 || nx >= grid.width) continue;
      const int a = grid.at(y, x), b = grid.at(ny, nx);
      counts[static_cast<std::size_t>(a) * levels + b]++;
      counts[static_cast<std::size_t>(b) * levels + a]++;
      total += 2;
    }
  Glcm g;
  g.levels = levels;
  g.p.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    g.p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return g;
}

Outcome a2_glcm_oracle() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> bin(0, 3);
  const GlcmDirection dirs[] = {GlcmDirection::Deg0, GlcmDirection::Deg45,
                                GlcmDirection::Deg90, GlcmDirection::Deg135};
  GlcmConfig cfg;
  cfg.levels = 4;
  cfg.distance = 1;
  for (int iter = 0; iter < 500; ++iter) {
    QuantizedGrid grid;
    grid.width = 4;
    grid.height = 4;
    for (int i = 0; i < 16; ++i) grid.bins.push_back(bin(rng));
    for (GlcmDirection d : dirs) {
      const auto offset = direction_offset(d, 1);
      const Glcm got = compute_glcm(grid, nullptr, offset, cfg);
      const Glcm expect = naive_glcm(grid, offset, 4);
      if (got.p != expect.p)
        return {false, "grid " + std::to_string(iter) + " direction " +
                           to_string(d) + " differs from the naive oracle"};
    }
  }

  // Hand-computed 2x2 example: rows (0,0),(1,1) at 0 degrees.
  RasterImage two(2, 2, ColorSpace::Gray);
  two.at(0, 1, 0) = 255.0;
  two.at(0, 1, 1) = 255.0;
  GlcmConfig c2;
  c2.levels = 2;
  TextureFeatures f = glcm_features(compute_glcm(
      quantize(two, 2), nullptr, direction_offset(GlcmDirection::Deg0, 1), c2));
  if (f.contrast != 0.0) return {false, "2x2 example contrast != 0"};
  if (f.energy != 0.5) return {false, "2x2 example energy != 0.5"};
  if (std::abs(f.entropy - std::log(2.0)) > 1e-9)
    return {false, "2x2 example entropy off ln 2"};
  if (f.correlation != 1.0) return {false, "2x2 example correlation != 1"};

  RasterImage flat(5, 5, ColorSpace::Gray, 200.0);
  TextureFeatures cf = glcm_features(
      compute_glcm(quantize(flat, 8), nullptr,
                   direction_offset(GlcmDirection::Deg0, 1), GlcmConfig{}));
  if (cf.contrast != 0.0 || cf.energy != 1.0)
    return {false, "constant image is not (contrast 0, energy 1)"};
  return {true, "500 grids x 4 directions exact; hand examples exact"};
}

// ---- A3 -------------------------------------------------------------------

double bipartition_optimum(const std::vector<Pixel3>& pixels) {
  const std::size_t n = pixels.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask + 1 < (1u << n); ++mask) {
    Pixel3 c0{}, c1{};
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Pixel3& acc = ((mask >> i) & 1u) ? c1 : c0;
      for (int c = 0; c < 3; ++c) acc[c] += pixels[i][c];
      (((mask >> i) & 1u) ? n1 : n0)++;
    }
    for (int c = 0; c < 3; ++c) {
      c0[c] /= static_cast<double>(n0);
      c1[c] /= static_cast<double>(n1);
    }
    best = std::min(best, fitness(pixels, Chromosome{{c0, c1}}));
  }
  return best;
}

Outcome a3_ga_optimality() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  std::uniform_int_distribution<int> nd(3, 12);
  int solved = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const int n = nd(rng);
    std::vector<Pixel3> pixels;
    for (int i = 0; i < n; ++i) pixels.push_back({u(rng), u(rng), u(rng)});
    const double oracle = bipartition_optimum(pixels);

    RasterImage rgb(n, 1, ColorSpace::Rgb);
    RasterImage img = rgb_to_ycbcr(rgb);
    for (int x = 0; x < n; ++x)
      img.set_pixel3(0, x, pixels[static_cast<std::size_t>(x)]);

    GaConfig cfg;
    cfg.k = 2;
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t s = 0; s < 5; ++s) {
      cfg.seed = s;
      GaResult res = run_ga(img, cfg);
      for (std::size_t g = 1; g < res.best_history.size(); ++g)
        if (res.best_history[g] > res.best_history[g - 1] + 1e-12)
          return {false, "best-ever fitness increased during instance " +
                             std::to_string(inst)};
      best = std::min(best, res.fitness);
    }
    if (best <= oracle + 1e-6) ++solved;
    else
      return {false, "instance " + std::to_string(inst) + ": ga " + fmt(best) +
                         " vs oracle " + fmt(oracle)};
  }
  const double dt = seconds_since(t0);
  if (dt >= 5.0) return {false, "took " + fmt(dt) + "s (budget 5s)"};
  return {true, "50/50 instances at the exhaustive optimum, " + fmt(dt) + "s"};
}

// ---- A4 -------------------------------------------------------------------

double dual_objective(const std::vector<double>& alpha,
                      const std::vector<int>& y,
                      const std::vector<std::vector<double>>& gram) {
  double w = 0.0;
  for (double a : alpha) w += a;
  for (std::size_t i = 0; i < alpha.size(); ++i)
    for (std::size_t j = 0; j < alpha.size(); ++j)
      w -= 0.5 * alpha[i] * alpha[j] * y[i] * y[j] * gram[i][j];
  return w;
}

double brute_force_dual(const std::vector<std::vector<double>>& x,
                        const std::vector<int>& y, const KernelSpec& kernel,
                        double c) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> gram(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      gram[i][j] = kernel_eval(kernel, x[i], x[j]);
  std::vector<double> alpha(n, 0.0);
  for (int pass = 0; pass < 200000; ++pass) {
    double gained = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        double fi = 0.0, fj = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          fi += alpha[k] * y[k] * gram[i][k];
          fj += alpha[k] * y[k] * gram[j][k];
        }
        const double slope = y[i] - y[j] - fi + fj;
        const double eta = gram[i][i] + gram[j][j] - 2.0 * gram[i][j];
        double tlo, thi;
        if (y[i] > 0) { tlo = -alpha[i]; thi = c - alpha[i]; }
        else { tlo = alpha[i] - c; thi = alpha[i]; }
        if (y[j] > 0) { tlo = std::max(tlo, alpha[j] - c); thi = std::min(thi, alpha[j]); }
        else { tlo = std::max(tlo, -alpha[j]); thi = std::min(thi, c - alpha[j]); }
        if (thi <= tlo) continue;
        double t;
        if (eta > 1e-15) t = std::clamp(slope / eta, tlo, thi);
        else if (slope > 0) t = thi;
        else if (slope < 0) t = tlo;
        else continue;
        const double gain = slope * t - 0.5 * eta * t * t;
        if (gain <= 0.0) continue;
        alpha[i] += t * y[i];
        alpha[j] -= t * y[j];
        gained += gain;
      }
    if (gained < 1e-13) break;
  }
  return dual_objective(alpha, y, gram);
}

// Returns an empty string when the KKT conditions hold within tolerances.
std::string kkt_violation(const BinarySvm& svm,
                          const std::vector<std::vector<double>>& x,
                          const std::vector<int>& y, double c, double tol) {
  double sum = 0.0;
  for (double co : svm.coeffs) sum += co;
  if (std::abs(sum) > 1e-9) return "sum(alpha*y) = " + fmt(sum);
  for (double co : svm.coeffs)
    if (std::abs(co) > c + 1e-9) return "alpha above C";
  for (std::size_t i = 0; i < x.size(); ++i) {
    double alpha = 0.0;
    for (std::size_t s = 0; s < svm.support_vectors.size(); ++s)
      if (svm.support_vectors[s] == x[i]) alpha = std::abs(svm.coeffs[s]);
    const double r = y[i] * svm.decision(x[i]) - 1.0;
    if (alpha < 1e-12 && r < -tol - 1e-9) return "alpha=0 point violates margin";
    if (alpha > c - 1e-12 && r > tol + 1e-9) return "alpha=C point violates margin";
    if (alpha >= 1e-12 && alpha <= c - 1e-12 && std::abs(r) > tol + 1e-9)
      return "free SV off the margin";
  }
  return "";
}

Outcome a4_svm_correctness() {
  int runs = 0;

  // Analytic 2-point problem.
  {
    std::vector<std::vector<double>> x = {{1.0}, {-1.0}};
    std::vector<int> y = {1, -1};
    SvmParams params;
    BinarySvm svm = smo_train(x, y, KernelSpec{}, params, 0);
    ++runs;
    if (std::abs(svm.bias) > 1e-6)
      return {false, "analytic 2-point bias " + fmt(svm.bias)};
    const std::string v = kkt_violation(svm, x, y, params.c, params.tol);
    if (!v.empty()) return {false, "analytic 2-point: " + v};
  }

  // XOR with the RBF kernel.
  {
    std::vector<std::vector<double>> x = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    std::vector<int> y = {1, 1, -1, -1};
    KernelSpec rbf;
    rbf.kind = KernelKind::Rbf;
    rbf.rbf_gamma = 1.0;
    SvmParams params;
    BinarySvm svm = smo_train(x, y, rbf, params, 1);
    ++runs;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (svm.decision(x[i]) * y[i] <= 0.0)
        return {false, "xor training accuracy below 100%"};
    const std::string v = kkt_violation(svm, x, y, params.c, params.tol);
    if (!v.empty()) return {false, "xor: " + v};
  }

  // Random instances: KKT on every run, all four kernels.
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::bernoulli_distribution coin;
  KernelSpec rbf;
  rbf.kind = KernelKind::Rbf;
  rbf.rbf_gamma = 0.7;
  KernelSpec poly;
  poly.kind = KernelKind::Polynomial;
  KernelSpec quad;
  quad.kind = KernelKind::Quadratic;
  for (const KernelSpec& kernel : {KernelSpec{}, rbf, poly, quad}) {
    for (int inst = 0; inst < 5; ++inst) {
      std::vector<std::vector<double>> x;
      std::vector<int> y;
      for (int i = 0; i < 14; ++i) {
        x.push_back({u(rng), u(rng)});
        y.push_back(coin(rng) ? 1 : -1);
      }
      y[0] = 1;
      y[1] = -1;
      SvmParams params;
      BinarySvm svm = smo_train(x, y, kernel, params, 90 + inst);
      ++runs;
      const std::string v = kkt_violation(svm, x, y, params.c, params.tol);
      if (!v.empty())
        return {false, std::string(to_string(kernel.kind)) + " instance " +
                           std::to_string(inst) + ": " + v};
    }
  }

  // Tiny instances: dual objective vs brute force.
  double worst_gap = 0.0;
  for (const KernelSpec& kernel : {KernelSpec{}, rbf}) {
    for (int inst = 0; inst < 6; ++inst) {
      std::vector<std::vector<double>> x;
      std::vector<int> y;
      const int n = 4 + inst % 3;
      for (int i = 0; i < n; ++i) {
        x.push_back({u(rng), u(rng)});
        y.push_back(coin(rng) ? 1 : -1);
      }
      y[0] = 1;
      y[1] = -1;
      SvmParams params;
      params.tol = 1e-6;
      BinarySvm svm = smo_train(x, y, kernel, params, 7 + inst);
      ++runs;
      std::vector<double> alpha(x.size(), 0.0);
      std::size_t cursor = 0;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (cursor < svm.support_vectors.size() &&
            svm.support_vectors[cursor] == x[i])
          alpha[i] = std::abs(svm.coeffs[cursor++]);
      std::vector<std::vector<double>> gram(x.size(),
                                            std::vector<double>(x.size()));
      for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j)
          gram[i][j] = kernel_eval(kernel, x[i], x[j]);
      const double gap = std::abs(dual_objective(alpha, y, gram) -
                                  brute_force_dual(x, y, kernel, params.c));
      worst_gap = std::max(worst_gap, gap);
      if (gap > 1e-4)
        return {false, "dual gap " + fmt(gap) + " on a tiny instance"};
    }
  }
  return {true, std::to_string(runs) + " training runs KKT-clean; dual gap <= " +
                    fmt(worst_gap)};
}

// ---- A5 -------------------------------------------------------------------

Outcome a5_end_to_end() {
  const auto t0 = Clock::now();

  SynthConfig synth_cfg;
  synth_cfg.per_class = 60;  // 240 total: 160 train / 80 eval, stratified
  synth_cfg.size = 96;
  synth_cfg.seed = 20240915;
  std::vector<SynthSample> samples = generate(synth_cfg);

  PipelineConfig cfg;
  cfg.seed = 7;
  Dataset all;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    SegmentResult seg =
        run_segmentation(samples[i].image, cfg, mix_seed(cfg.seed, i));
    const FeatureVector fv = featurize(seg, cfg.glcm);
    all.samples.push_back({std::vector<double>(fv.begin(), fv.end()),
                           to_string(samples[i].label)});
    labels.push_back(to_string(samples[i].label));
  }

  const auto eval_idx = stratified_eval_indices(labels, 1.0 / 3.0, cfg.seed);
  Dataset train, eval;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < all.samples.size(); ++i) {
    if (cursor < eval_idx.size() && eval_idx[cursor] == i) {
      eval.samples.push_back(all.samples[i]);
      ++cursor;
    } else {
      train.samples.push_back(all.samples[i]);
    }
  }
  if (train.samples.size() != 160 || eval.samples.size() != 80)
    return {false, "split sizes " + std::to_string(train.samples.size()) + "/" +
                       std::to_string(eval.samples.size()) + " (wanted 160/80)"};

  MulticlassModel model =
      train_multiclass(train, KernelSpec{}, SvmParams{}, cfg.seed);
  EvalReport rep = evaluate_accuracy(model, eval);
  const double accuracy = static_cast<double>(rep.correct) / rep.total;
  const double dt = seconds_since(t0);

  // Table-arithmetic reproduction built into the evaluator's formatter.
  if (format_percent(54, 64) != "84.37")
    return {false, "format_percent(54,64) != 84.37"};
  if (format_percent(26, 37) != "70.27")
    return {false, "format_percent(26,37) != 70.27"};

  if (accuracy < 0.85)
    return {false, "accuracy " + format_percent(rep.correct, rep.total) +
                       "% below 85% (" + fmt(dt) + "s)"};
  if (dt >= 120.0) return {false, "took " + fmt(dt) + "s (budget 120s)"};
  return {true, "accuracy " + format_percent(rep.correct, rep.total) + "% (" +
                    std::to_string(rep.correct) + "/" +
                    std::to_string(rep.total) + ") in " + fmt(dt) + "s"};
}

// ---- A6 -------------------------------------------------------------------

double mask_iou(const RasterImage& a, const RasterImage& b) {
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.plane(0).size(); ++i) {
    const bool pa = a.plane(0)[i] == 255.0;
    const bool pb = b.plane(0)[i] == 255.0;
    inter += pa && pb ? 1 : 0;
    uni += pa || pb ? 1 : 0;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Outcome a6_segmentation_quality() {
  SynthConfig synth_cfg;
  synth_cfg.per_class = 10;
  synth_cfg.size = 96;
  synth_cfg.seed = 424242;
  synth_cfg.noise_sigma = 0.0;  // noise-free per the criterion
  std::vector<SynthSample> samples = generate(synth_cfg);

  PipelineConfig cfg;
  cfg.seed = 3;
  int good = 0;
  double worst = 1.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    SegmentResult seg =
        run_segmentation(samples[i].image, cfg, mix_seed(cfg.seed, i));
    const double iou = mask_iou(seg.mask, samples[i].mask);
    worst = std::min(worst, iou);
    if (iou >= 0.85) ++good;
  }
  if (good < 36)
    return {false, std::to_string(good) + "/40 samples at IoU >= 0.85 (worst " +
                       fmt(worst) + ")"};
  return {true, std::to_string(good) + "/40 samples at IoU >= 0.85 (worst " +
                    fmt(worst) + ")"};
}

// ---- A7 -------------------------------------------------------------------

Outcome a7_enhancement() {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  RasterImage img(32, 32, ColorSpace::Rgb);
  for (int c = 0; c < 3; ++c)
    for (double& v : img.plane(c)) v = u(rng);

  for (double g : {1.5, 3.5, 5.5}) {
    const RasterImage back = gamma_enhance(gamma_degrade(img, {g}), {g});
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < img.plane(c).size(); ++i)
        if (std::abs(back.plane(c)[i] - img.plane(c)[i]) > 0.001)
          return {false, "gamma " + fmt(g) + " round trip above 0.001"};
  }

  RasterImage gray = to_gray(img);
  if (ssim(gray, gray) != 1.0) return {false, "ssim(x,x) != 1 exactly"};

  RasterImage ca(16, 16, ColorSpace::Gray, 0.25 * 255.0);
  RasterImage cb(16, 16, ColorSpace::Gray, 0.50 * 255.0);
  const double s = ssim(ca, cb);
  if (std::abs(s - 0.8001) > 1e-4)
    return {false, "zero-variance ssim " + fmt(s) + " (wanted 0.8001)"};
  return {true, "gamma round trips tight; ssim identities hold"};
}

// ---- A8 -------------------------------------------------------------------

using DirSnapshot = std::map<std::string, std::string>;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "<unreadable>";
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

DirSnapshot snapshot_dir(const fs::path& dir) {
  DirSnapshot snap;
  if (!fs::exists(dir)) return snap;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    snap[fs::relative(entry.path(), dir).generic_string()] =
        slurp(entry.path());
  }
  return snap;
}

struct CliStep {
  std::string name;
  std::string args;     // appended after the binary path
  std::string out_dir;  // wiped between the two runs, snapshotted after each
};

Outcome a8_determinism() {
  const char* cli = std::getenv("LEAFDX_CLI");
  if (!cli || !fs::exists(cli))
    return {false, "LEAFDX_CLI does not point at the CLI binary"};

  const fs::path work = fs::temp_directory_path() /
                        ("leafdx_a8_" + std::to_string(::getpid()));
  std::error_code ec;
  fs::remove_all(work, ec);
  fs::create_directories(work);
  const auto data = (work / "data").string();
  const auto seg = (work / "seg").string();
  const auto image = (fs::path(data) / "Blight" / "000.png").string();
  const auto model = (work / "model").string();
  const auto model_file = (fs::path(model) / "model.json").string();

  const std::vector<CliStep> steps = {
      {"synth", "synth --seed 11 --per-class 2 --size 64 --json --out " + data,
       data},
      {"segment", "segment " + image + " --seed 3 --json --out " + seg, seg},
      {"features",
       "features " + image + " --mask " + seg + "/mask.png --json --out " +
           (work / "feat").string(),
       (work / "feat").string()},
      {"train", "train " + data + " --seed 4 --json --out " + model, model},
      {"eval",
       "eval " + data + " --model " + model_file + " --seed 4 --json --out " +
           (work / "eval").string(),
       (work / "eval").string()},
      {"predict",
       "predict " + (fs::path(data) / "Canker" / "001.png").string() +
           " --model " + model_file + " --seed 6 --json --out " +
           (work / "pred").string(),
       (work / "pred").string()},
  };

  for (const CliStep& step : steps) {
    DirSnapshot snaps[2];
    std::string stdouts[2];
    for (int run = 0; run < 2; ++run) {
      fs::remove_all(step.out_dir, ec);
      const fs::path out_file =
          work / (step.name + "_run" + std::to_string(run) + ".stdout");
      const std::string cmd = std::string(cli) + " " + step.args + " > " +
                              out_file.string() + " 2>&1";
      if (std::system(cmd.c_str()) != 0)
        return {false, step.name + " exited nonzero: " + slurp(out_file)};
      snaps[run] = snapshot_dir(step.out_dir);
      stdouts[run] = slurp(out_file);
    }
    if (stdouts[0] != stdouts[1])
      return {false, step.name + ": stdout differs between runs"};
    if (snaps[0].size() != snaps[1].size() || snaps[0].empty())
      return {false, step.name + ": output file sets differ (" +
                         std::to_string(snaps[0].size()) + " vs " +
                         std::to_string(snaps[1].size()) + ")"};
    for (const auto& [rel, bytes] : snaps[0]) {
      auto it = snaps[1].find(rel);
      if (it == snaps[1].end() || it->second != bytes)
        return {false, step.name + ": " + rel + " differs between runs"};
    }
  }
  fs::remove_all(work, ec);
  return {true, "6 subcommands byte-identical across repeated runs"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {"A1", "color transform", a1_color_transform},
      {"A2", "glcm oracle", a2_glcm_oracle},
      {"A3", "ga optimality", a3_ga_optimality},
      {"A4", "svm correctness", a4_svm_correctness},
      {"A5", "end-to-end synthetic", a5_end_to_end},
      {"A6", "segmentation quality", a6_segmentation_quality},
      {"A7", "enhancement ops", a7_enhancement},
      {"A8", "determinism", a8_determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::cout << c.id << " " << (out.pass ? "PASS" : "FAIL") << " " << c.title
              << ": " << out.detail << "\n";
    std::cout.flush();
  }
  return failures == 0 ? 0 : 1;
}
