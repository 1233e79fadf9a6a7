#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fluct/featureset.hpp"

namespace fluct {

struct NormalizationStats {
  FeatureArray mean{};
  FeatureArray stddev{};  // population; zero-variance columns stored as 1
};

/// Throws std::invalid_argument on an empty training set.
NormalizationStats normalize_fit(const std::vector<FeatureArray>& train);
FeatureArray normalize_apply(const NormalizationStats& stats, const FeatureArray& row);
std::vector<FeatureArray> normalize_apply(const NormalizationStats& stats,
                                          const std::vector<FeatureArray>& rows);

struct Hyperparameters {
  double learning_rate = 0.1;
  int epochs = 500;
  double l2_lambda = 0.01;

  void validate() const;
};

/// Dense dimension-agnostic core. Loss is the mean negative log-likelihood
/// plus (lambda/2)*|w|^2; the bias is not penalized.
namespace logistic {

using Matrix = std::vector<std::vector<double>>;

struct Parameters {
  std::vector<double> weights;
  double bias = 0.0;
};

double sigmoid(double z);
double loss(const Matrix& x, const std::vector<int>& y, const Parameters& params,
            double l2_lambda);
/// Gradient of `loss`; bias derivative is stored in `.bias`.
Parameters gradient(const Matrix& x, const std::vector<int>& y, const Parameters& params,
                    double l2_lambda);
/// Full-batch gradient descent from zero. `loss_history`, when given,
/// receives the loss before every step and after the last one.
Parameters fit(const Matrix& x, const std::vector<int>& y, const Hyperparameters& hyper,
               std::vector<double>* loss_history = nullptr);
double predict(const Parameters& params, const std::vector<double>& row);

}  // namespace logistic

struct LogisticModel {
  FeatureArray weights{};  // masked features stay exactly 0
  double bias = 0.0;
  FeatureMask mask;
  Hyperparameters hyper;

  double predict_proba(const FeatureArray& row) const;
  bool predict(const FeatureArray& row) const { return predict_proba(row) >= 0.5; }
};

/// Trains on the active columns only. Labels are 1 for the positive class.
/// Throws ModelError on single-class input or a non-finite loss.
LogisticModel train(const std::vector<FeatureArray>& rows, const std::vector<int>& labels,
                    const FeatureMask& mask, const Hyperparameters& hyper);

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
};

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  double accuracy = 0.0;
};

Metrics metrics_from(const Confusion& confusion);
double f_measure(double precision, double recall);

/// Rows are raw; `stats` normalizes them before prediction at threshold 0.5.
Confusion confusion(const LogisticModel& model, const NormalizationStats& stats,
                    const std::vector<FeatureArray>& rows, const std::vector<int>& labels);
Metrics evaluate(const LogisticModel& model, const NormalizationStats& stats,
                 const std::vector<FeatureArray>& rows, const std::vector<int>& labels);

struct AblationPreset {
  std::string name;
  std::string description;
  FeatureMask mask;
};

/// M1 all features; M2 without current text measures; M3 without any text
/// measure; M1 without modularity; M3 without average centralities.
std::vector<AblationPreset> ablation_presets();
const AblationPreset& find_preset(std::string_view name);

enum class Balance { None, Downsample };
Balance parse_balance(std::string_view name);
std::string_view to_string(Balance balance);

struct CvConfig {
  int repeats = 20;
  double train_fraction = 0.7;
  std::uint64_t seed = 7;
  Balance balance = Balance::None;

  void validate() const;
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;
};

struct EvalReport {
  std::string model_name;
  std::string task;
  int repeats = 0;
  /// Mean precision and recall over repeats; f_measure.mean is the
  /// harmonic mean of those two means, f_measure.std the spread of the
  /// per-repeat F values.
  MetricSummary precision, recall, f_measure, accuracy;
  double train_accuracy = 0.0;
  double train_accuracy_std = 0.0;
};

/// Stratified train/test index split. `rng_seed` fully determines it.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
Split stratified_split(const std::vector<int>& labels, double train_fraction,
                       std::uint64_t rng_seed);

/// Sub-seed of one repeat, independent of scheduling.
std::uint64_t repeat_seed(std::uint64_t seed, int repeat);

EvalReport monte_carlo_cv(const std::vector<FeatureArray>& rows, const std::vector<int>& labels,
                          const AblationPreset& preset, const CvConfig& cv,
                          const Hyperparameters& hyper);
EvalReport monte_carlo_cv(const std::vector<LabeledExample>& dataset,
                          const AblationPreset& preset, const CvConfig& cv,
                          const Hyperparameters& hyper);

std::string report_json(const EvalReport& report);
EvalReport parse_report_json(std::string_view text);

/// Plain-text table with columns Model, Precision, Recall, F-measure.
std::string format_report_table(const std::vector<EvalReport>& reports);

}  // namespace fluct
