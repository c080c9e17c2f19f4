#include "leafdx/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "leafdx/rng.hpp"

namespace leafdx {

using nlohmann::json;

const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::Linear: return "linear";
    case KernelKind::Rbf: return "rbf";
    case KernelKind::Polynomial: return "polynomial";
    case KernelKind::Quadratic: return "quadratic";
  }
  return "?";
}

KernelKind parse_kernel_kind(const std::string& name) {
  if (name == "linear") return KernelKind::Linear;
  if (name == "rbf") return KernelKind::Rbf;
  if (name == "polynomial") return KernelKind::Polynomial;
  if (name == "quadratic") return KernelKind::Quadratic;
  throw Error("unknown kernel '" + name +
              "' (expected linear, rbf, polynomial, or quadratic)");
}

namespace {

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double squared_dist(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

double ipow(double base, int exp) {
  double r = 1.0;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

double kernel_eval(const KernelSpec& k, const std::vector<double>& x,
                   const std::vector<double>& y) {
  if (x.size() != y.size())
    throw Error("kernel_eval: vector dimensions differ");
  switch (k.kind) {
    case KernelKind::Linear:
      return dot(x, y);
    case KernelKind::Rbf:
      if (!k.rbf_gamma || *k.rbf_gamma <= 0.0)
        throw Error("kernel_eval: RBF kernel requires gamma > 0");
      return std::exp(-*k.rbf_gamma * squared_dist(x, y));
    case KernelKind::Polynomial:
      if (k.poly_degree < 1)
        throw Error("kernel_eval: polynomial degree must be at least 1");
      return ipow(dot(x, y) + k.poly_coef0, k.poly_degree);
    case KernelKind::Quadratic: {
      const double v = dot(x, y) + k.poly_coef0;
      return v * v;
    }
  }
  throw Error("kernel_eval: unknown kernel kind");
}

std::vector<std::string> Dataset::labels() const {
  std::set<std::string> seen;
  for (const Sample& s : samples) seen.insert(s.label);
  return {seen.begin(), seen.end()};
}

std::size_t Dataset::feature_dim() const {
  if (samples.empty()) throw Error("dataset is empty");
  const std::size_t dim = samples.front().features.size();
  for (const Sample& s : samples) {
    if (s.features.size() != dim)
      throw Error("dataset has inconsistent feature dimensions");
  }
  return dim;
}

std::vector<double> Scaler::apply(const std::vector<double>& x) const {
  if (x.size() != mean.size())
    throw Error("scaler: feature dimension mismatch");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = (x[i] - mean[i]) / std[i];
  }
  return out;
}

Scaler standardize_fit(const Dataset& train) {
  const std::size_t dim = train.feature_dim();
  const double n = static_cast<double>(train.samples.size());
  Scaler s;
  s.mean.assign(dim, 0.0);
  s.std.assign(dim, 0.0);
  for (const Sample& sample : train.samples) {
    for (std::size_t f = 0; f < dim; ++f) s.mean[f] += sample.features[f];
  }
  for (double& m : s.mean) m /= n;
  for (const Sample& sample : train.samples) {
    for (std::size_t f = 0; f < dim; ++f) {
      const double d = sample.features[f] - s.mean[f];
      s.std[f] += d * d;
    }
  }
  for (double& v : s.std) {
    v = std::sqrt(v / n);
    if (v < 1e-12) v = 1.0;
  }
  return s;
}

void SvmParams::validate() const {
  if (c <= 0.0) throw Error("svm: C must be positive");
  if (tol <= 0.0) throw Error("svm: tol must be positive");
  if (max_passes < 1) throw Error("svm: max_passes must be at least 1");
}

double BinarySvm::decision(const std::vector<double>& x) const {
  double s = bias;
  for (std::size_t i = 0; i < support_vectors.size(); ++i) {
    s += coeffs[i] * kernel_eval(kernel, support_vectors[i], x);
  }
  return s;
}

namespace {

// Sequential minimal optimization over a cached Gram matrix. One pair
// update per violating first index; the second index is drawn from the
// seeded generator first and falls back to a full scan so any possible
// progress is found.
class SmoSolver {
 public:
  SmoSolver(const std::vector<std::vector<double>>& x,
            const std::vector<int>& y, const KernelSpec& kernel,
            const SvmParams& p, std::uint64_t seed)
      : x_(x), y_(y), p_(p), rng_(seed), n_(x.size()) {
    gram_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i; j < n_; ++j) {
        const double k = kernel_eval(kernel, x_[i], x_[j]);
        gram_[i * n_ + j] = k;
        gram_[j * n_ + i] = k;
      }
    }
    alpha_.assign(n_, 0.0);
  }

  void solve() {
    const int sweep_cap = std::max(1000, p_.max_passes * 50);
    int idle_sweeps = 0;
    for (int sweep = 0; sweep < sweep_cap; ++sweep) {
      int changed = 0;
      int violations = 0;
      for (std::size_t i = 0; i < n_; ++i) {
        const double r = y_[i] * (f(i) - y_[i]);
        const bool violates = (r < -p_.tol && alpha_[i] < p_.c) ||
                              (r > p_.tol && alpha_[i] > 0.0);
        if (!violates) continue;
        ++violations;
        if (step_with_some_j(i)) ++changed;
      }
      if (violations == 0) break;
      idle_sweeps = changed == 0 ? idle_sweeps + 1 : 0;
      if (idle_sweeps >= p_.max_passes) break;
    }
  }

  const std::vector<double>& alphas() const { return alpha_; }
  double bias() const { return b_; }

 private:
  double k(std::size_t i, std::size_t j) const { return gram_[i * n_ + j]; }

  double f(std::size_t i) const {
    double s = b_;
    for (std::size_t j = 0; j < n_; ++j) {
      if (alpha_[j] > 0.0) s += alpha_[j] * y_[j] * k(j, i);
    }
    return s;
  }

  bool step_with_some_j(std::size_t i) {
    std::uniform_int_distribution<std::size_t> pick(0, n_ - 2);
    std::size_t j = pick(rng_);
    if (j >= i) ++j;
    if (take_step(i, j)) return true;
    const std::size_t start = pick(rng_);
    for (std::size_t off = 0; off < n_; ++off) {
      const std::size_t cand = (start + off) % n_;
      if (cand == i || cand == j) continue;
      if (take_step(i, cand)) return true;
    }
    return false;
  }

  bool take_step(std::size_t i, std::size_t j) {
    if (i == j) return false;
    const double a1 = alpha_[i], a2 = alpha_[j];
    const int y1 = y_[i], y2 = y_[j];
    const double e1 = f(i) - y1;
    const double e2 = f(j) - y2;
    const double s = y1 * y2;

    double lo, hi;
    if (s > 0) {
      lo = std::max(0.0, a1 + a2 - p_.c);
      hi = std::min(p_.c, a1 + a2);
    } else {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(p_.c, p_.c + a2 - a1);
    }
    if (lo >= hi) return false;

    const double k11 = k(i, i), k12 = k(i, j), k22 = k(j, j);
    const double eta = k11 + k22 - 2.0 * k12;  // >= 0 for a PSD kernel
    double a2new;
    if (eta > 1e-12) {
      a2new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // Objective is (numerically) linear along the constraint line;
      // move to the endpoint in the ascent direction.
      const double slope = y2 * (e1 - e2);
      if (slope > 1e-12) a2new = hi;
      else if (slope < -1e-12) a2new = lo;
      else return false;
    }
    if (std::abs(a2new - a2) < 1e-9) return false;

    const double a1new = std::clamp(a1 + s * (a2 - a2new), 0.0, p_.c);
    const double d1 = a1new - a1, d2 = a2new - a2;
    const double b1 = b_ - e1 - y1 * d1 * k11 - y2 * d2 * k12;
    const double b2 = b_ - e2 - y1 * d1 * k12 - y2 * d2 * k22;
    if (a1new > 0.0 && a1new < p_.c) b_ = b1;
    else if (a2new > 0.0 && a2new < p_.c) b_ = b2;
    else b_ = 0.5 * (b1 + b2);

    alpha_[i] = a1new;
    alpha_[j] = a2new;
    return true;
  }

  const std::vector<std::vector<double>>& x_;
  const std::vector<int>& y_;
  const SvmParams& p_;
  std::mt19937_64 rng_;
  std::size_t n_;
  std::vector<double> gram_;
  std::vector<double> alpha_;
  double b_ = 0.0;
};

}  // namespace

BinarySvm smo_train(const std::vector<std::vector<double>>& x,
                    const std::vector<int>& y, const KernelSpec& kernel,
                    const SvmParams& params, std::uint64_t seed) {
  params.validate();
  if (x.empty()) throw Error("smo_train: empty training set");
  if (x.size() != y.size())
    throw Error("smo_train: sample/label count mismatch");
  const std::size_t dim = x.front().size();
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (x[i].size() != dim)
      throw Error("smo_train: inconsistent feature dimensions");
    if (y[i] == 1) has_pos = true;
    else if (y[i] == -1) has_neg = true;
    else throw Error("smo_train: labels must be +1 or -1");
  }
  if (!has_pos || !has_neg)
    throw Error("smo_train: both classes must be present");

  SmoSolver solver(x, y, kernel, params, seed);
  solver.solve();

  BinarySvm svm;
  svm.kernel = kernel;
  const std::vector<double>& alpha = solver.alphas();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (alpha[i] > 0.0) {
      svm.support_vectors.push_back(x[i]);
      svm.coeffs.push_back(alpha[i] * y[i]);
    }
  }
  svm.bias = solver.bias();
  if (svm.support_vectors.empty())
    throw Error("smo_train: training produced no support vectors");
  return svm;
}

namespace {

// 1/(d * median pairwise squared distance); degenerate spreads clamp high.
double resolve_rbf_gamma(const std::vector<std::vector<double>>& x) {
  std::vector<double> d2;
  d2.reserve(x.size() * (x.size() - 1) / 2);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      d2.push_back(squared_dist(x[i], x[j]));
    }
  }
  double med = 0.0;
  if (!d2.empty()) {
    std::sort(d2.begin(), d2.end());
    const std::size_t m = d2.size() / 2;
    med = d2.size() % 2 == 1 ? d2[m] : 0.5 * (d2[m - 1] + d2[m]);
  }
  const double den = static_cast<double>(x.front().size()) * med;
  const double gamma = den > 0.0 ? 1.0 / den
                                 : std::numeric_limits<double>::infinity();
  return std::clamp(gamma, 1e-4, 1e2);
}

}  // namespace

MulticlassModel train_multiclass(const Dataset& train, const KernelSpec& kernel,
                                 const SvmParams& params, std::uint64_t seed) {
  params.validate();
  const std::vector<std::string> labels = train.labels();
  if (labels.size() < 2)
    throw Error("train_multiclass: need at least 2 labels");
  train.feature_dim();

  MulticlassModel model;
  model.labels = labels;
  model.scaler = standardize_fit(train);
  model.params = params;

  std::vector<std::vector<double>> standardized;
  standardized.reserve(train.samples.size());
  for (const Sample& s : train.samples) {
    standardized.push_back(model.scaler.apply(s.features));
  }

  model.kernel = kernel;
  if (kernel.kind == KernelKind::Rbf && !kernel.rbf_gamma) {
    model.kernel.rbf_gamma = resolve_rbf_gamma(standardized);
  }

  std::uint64_t pair_index = 0;
  for (std::size_t a = 0; a < labels.size(); ++a) {
    for (std::size_t b = a + 1; b < labels.size(); ++b) {
      std::vector<std::vector<double>> xs;
      std::vector<int> ys;
      for (std::size_t i = 0; i < train.samples.size(); ++i) {
        if (train.samples[i].label == labels[a]) {
          xs.push_back(standardized[i]);
          ys.push_back(1);
        } else if (train.samples[i].label == labels[b]) {
          xs.push_back(standardized[i]);
          ys.push_back(-1);
        }
      }
      BinarySvm svm =
          smo_train(xs, ys, model.kernel, params, mix_seed(seed, pair_index));
      svm.class_pair = {labels[a], labels[b]};
      model.binaries.push_back(std::move(svm));
      ++pair_index;
    }
  }
  return model;
}

Prediction predict(const MulticlassModel& model, const std::vector<double>& x) {
  const std::vector<double> xs = model.scaler.apply(x);
  Prediction out;
  for (const std::string& label : model.labels) {
    out.votes[label] = 0;
    out.margin[label] = 0.0;
  }
  for (const BinarySvm& svm : model.binaries) {
    const double d = svm.decision(xs);
    const std::string& winner =
        d >= 0.0 ? svm.class_pair.first : svm.class_pair.second;
    out.votes[winner] += 1;
    out.margin[winner] += std::abs(d);
  }
  int best_votes = -1;
  double best_margin = 0.0;
  for (const std::string& label : model.labels) {
    const int v = out.votes[label];
    const double m = out.margin[label];
    if (v > best_votes || (v == best_votes && m > best_margin)) {
      best_votes = v;
      best_margin = m;
      out.label = label;
    }
  }
  return out;
}

EvalReport evaluate_accuracy(const MulticlassModel& model, const Dataset& eval) {
  if (eval.samples.empty())
    throw Error("evaluate_accuracy: empty evaluation set");
  EvalReport report;
  for (const Sample& s : eval.samples) {
    const Prediction p = predict(model, s.features);
    report.total += 1;
    report.per_label[s.label].total += 1;
    report.confusion[s.label][p.label] += 1;
    if (p.label == s.label) {
      report.correct += 1;
      report.per_label[s.label].correct += 1;
    }
  }
  return report;
}

std::string format_percent(int correct, int total) {
  if (total <= 0) throw Error("format_percent: total must be positive");
  if (correct < 0 || correct > total)
    throw Error("format_percent: correct out of range");
  const long long cents =
      static_cast<long long>(correct) * 10000LL / total;  // truncated
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%02lld", cents / 100, cents % 100);
  return buf;
}

std::string format_eval_text(const EvalReport& report) {
  std::size_t width = std::string("overall").size();
  for (const auto& [label, stats] : report.per_label) {
    width = std::max(width, label.size());
  }
  std::ostringstream out;
  for (const auto& [label, stats] : report.per_label) {
    out << label << std::string(width - label.size() + 2, ' ')
        << stats.correct << "/" << stats.total << "  "
        << format_percent(stats.correct, stats.total) << "%\n";
  }
  out << "overall" << std::string(width - 7 + 2, ' ') << report.correct << "/"
      << report.total << "  " << format_percent(report.correct, report.total)
      << "%\n";
  return out.str();
}

namespace {

json kernel_to_json(const KernelSpec& k) {
  json j;
  j["kind"] = to_string(k.kind);
  if (k.rbf_gamma) j["rbf_gamma"] = *k.rbf_gamma;
  j["poly_degree"] = k.poly_degree;
  j["poly_coef0"] = k.poly_coef0;
  return j;
}

KernelSpec kernel_from_json(const json& j) {
  KernelSpec k;
  k.kind = parse_kernel_kind(j.at("kind").get<std::string>());
  if (j.contains("rbf_gamma")) k.rbf_gamma = j.at("rbf_gamma").get<double>();
  k.poly_degree = j.at("poly_degree").get<int>();
  k.poly_coef0 = j.at("poly_coef0").get<double>();
  return k;
}

}  // namespace

void save_model(const MulticlassModel& model, const std::string& path) {
  json j;
  j["format"] = "leafdx-model";
  j["version"] = model.version;
  j["labels"] = model.labels;
  j["scaler"] = {{"mean", model.scaler.mean}, {"std", model.scaler.std}};
  j["kernel"] = kernel_to_json(model.kernel);
  j["params"] = {{"c", model.params.c},
                 {"tol", model.params.tol},
                 {"max_passes", model.params.max_passes}};
  j["binaries"] = json::array();
  for (const BinarySvm& svm : model.binaries) {
    j["binaries"].push_back(
        {{"pair", {svm.class_pair.first, svm.class_pair.second}},
         {"bias", svm.bias},
         {"coeffs", svm.coeffs},
         {"support_vectors", svm.support_vectors}});
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open model file for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out.good()) throw Error("failed writing model file: " + path);
}

MulticlassModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("malformed model file " + path + ": " + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != "leafdx-model")
      throw Error("malformed model file " + path +
                  ": missing leafdx-model format tag");
    MulticlassModel model;
    model.version = j.at("version").get<int>();
    if (model.version != 1)
      throw Error("unsupported model version in " + path + ": " +
                  std::to_string(model.version));
    model.labels = j.at("labels").get<std::vector<std::string>>();
    model.scaler.mean = j.at("scaler").at("mean").get<std::vector<double>>();
    model.scaler.std = j.at("scaler").at("std").get<std::vector<double>>();
    model.kernel = kernel_from_json(j.at("kernel"));
    model.params.c = j.at("params").at("c").get<double>();
    model.params.tol = j.at("params").at("tol").get<double>();
    model.params.max_passes = j.at("params").at("max_passes").get<int>();
    for (const json& jb : j.at("binaries")) {
      BinarySvm svm;
      svm.kernel = model.kernel;
      svm.class_pair = {jb.at("pair").at(0).get<std::string>(),
                        jb.at("pair").at(1).get<std::string>()};
      svm.bias = jb.at("bias").get<double>();
      svm.coeffs = jb.at("coeffs").get<std::vector<double>>();
      svm.support_vectors =
          jb.at("support_vectors").get<std::vector<std::vector<double>>>();
      if (svm.coeffs.size() != svm.support_vectors.size() ||
          svm.support_vectors.empty())
        throw Error("malformed model file " + path +
                    ": inconsistent binary classifier");
      for (const std::vector<double>& sv : svm.support_vectors) {
        if (sv.size() != model.scaler.mean.size())
          throw Error("malformed model file " + path +
                      ": support vector dimension mismatch");
      }
      model.binaries.push_back(std::move(svm));
    }
    if (model.scaler.mean.size() != model.scaler.std.size())
      throw Error("malformed model file " + path + ": scaler mismatch");
    const std::size_t l = model.labels.size();
    if (model.binaries.size() != l * (l - 1) / 2)
      throw Error("malformed model file " + path +
                  ": wrong number of binary classifiers");
    return model;
  } catch (const json::exception& e) {
    throw Error("malformed model file " + path + ": " + e.what());
  }
}

}  // namespace leafdx
