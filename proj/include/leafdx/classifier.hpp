#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "leafdx/image.hpp"

namespace leafdx {

enum class KernelKind { Linear, Rbf, Polynomial, Quadratic };

const char* to_string(KernelKind k);
KernelKind parse_kernel_kind(const std::string& name);

struct KernelSpec {
  KernelKind kind = KernelKind::Linear;
  /// Unset means "resolve from training data" (train_multiclass fills it in).
  std::optional<double> rbf_gamma;
  int poly_degree = 3;
  double poly_coef0 = 1.0;
};

/// Linear: x·y; RBF: exp(−γ‖x−y‖²); Polynomial: (x·y+c0)^degree;
/// Quadratic: (x·y+c0)². RBF requires rbf_gamma to be set.
double kernel_eval(const KernelSpec& k, const std::vector<double>& x,
                   const std::vector<double>& y);

struct Sample {
  std::vector<double> features;
  std::string label;
};

struct Dataset {
  std::vector<Sample> samples;
  /// Sorted distinct labels.
  std::vector<std::string> labels() const;
  std::size_t feature_dim() const;
};

struct Scaler {
  std::vector<double> mean;
  std::vector<double> std;  // zero-variance features recorded as 1
  std::vector<double> apply(const std::vector<double>& x) const;
};

/// Per-feature mean and population std over the training samples.
Scaler standardize_fit(const Dataset& train);

struct SvmParams {
  double c = 10.0;
  double tol = 1e-3;
  int max_passes = 200;  // consecutive sweeps without an alpha update
  void validate() const;
};

struct BinarySvm {
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> coeffs;  // alpha_i * y_i, |coeff| <= C
  double bias = 0.0;
  KernelSpec kernel;
  /// (positive label, negative label), lexicographically ordered.
  std::pair<std::string, std::string> class_pair;

  double decision(const std::vector<double>& x) const;
};

/// Simplified SMO on pre-standardized features; y entries are ±1. Runs
/// whole-set sweeps until no sample violates the KKT conditions within
/// tol (or the no-progress/pass limits hit). Deterministic given seed.
BinarySvm smo_train(const std::vector<std::vector<double>>& x,
                    const std::vector<int>& y, const KernelSpec& kernel,
                    const SvmParams& params, std::uint64_t seed);

struct MulticlassModel {
  int version = 1;
  std::vector<std::string> labels;  // sorted
  Scaler scaler;
  KernelSpec kernel;  // with rbf_gamma resolved
  SvmParams params;
  std::vector<BinarySvm> binaries;  // one per label pair, pair-sorted
};

/// Fits the scaler on all of train, resolves an RBF gamma when unset
/// (1/(d·median pairwise squared distance), clamped to [1e-4, 1e2]), then
/// trains one one-vs-one binary per label pair with a pair-derived seed.
MulticlassModel train_multiclass(const Dataset& train, const KernelSpec& kernel,
                                 const SvmParams& params, std::uint64_t seed);

struct Prediction {
  std::string label;
  std::map<std::string, int> votes;
  /// Sum of |decision| over the binaries each label won (tie-break key).
  std::map<std::string, double> margin;
};

Prediction predict(const MulticlassModel& model, const std::vector<double>& x);

struct LabelStats {
  int total = 0;
  int correct = 0;
};

struct EvalReport {
  int total = 0;
  int correct = 0;
  std::map<std::string, LabelStats> per_label;           // actual labels
  std::map<std::string, std::map<std::string, int>> confusion;  // actual→predicted
};

EvalReport evaluate_accuracy(const MulticlassModel& model, const Dataset& eval);

/// "correct/total" as a percentage with exactly two decimals, truncated
/// (54/64 → "84.37", not "84.38").
std::string format_percent(int correct, int total);

/// Human-readable accuracy table (per-label rows plus overall).
std::string format_eval_text(const EvalReport& report);

void save_model(const MulticlassModel& model, const std::string& path);
MulticlassModel load_model(const std::string& path);

}  // namespace leafdx
