#include "fluct/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "fluct/errors.hpp"

namespace fluct {

NormalizationStats normalize_fit(const std::vector<FeatureArray>& train) {
  if (train.empty()) throw std::invalid_argument("cannot fit normalization on an empty training set");
  NormalizationStats stats;
  const double n = static_cast<double>(train.size());
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    double sum = 0.0;
    for (const auto& row : train) sum += row[j];
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto& row : train) sq += (row[j] - mean) * (row[j] - mean);
    const double sd = std::sqrt(sq / n);
    stats.mean[j] = mean;
    stats.stddev[j] = sd > 0.0 ? sd : 1.0;
  }
  return stats;
}

FeatureArray normalize_apply(const NormalizationStats& stats, const FeatureArray& row) {
  FeatureArray out;
  for (std::size_t j = 0; j < kFeatureCount; ++j) out[j] = (row[j] - stats.mean[j]) / stats.stddev[j];
  return out;
}

std::vector<FeatureArray> normalize_apply(const NormalizationStats& stats,
                                          const std::vector<FeatureArray>& rows) {
  std::vector<FeatureArray> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(normalize_apply(stats, r));
  return out;
}

void Hyperparameters::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) {
    throw std::invalid_argument("l2_lambda must be non-negative");
  }
}

namespace logistic {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double linear(const Parameters& p, const std::vector<double>& row) {
  double z = p.bias;
  for (std::size_t j = 0; j < p.weights.size(); ++j) z += p.weights[j] * row[j];
  return z;
}

void check_shapes(const Matrix& x, const std::vector<int>& y, const Parameters& p) {
  if (x.size() != y.size()) throw std::invalid_argument("row and label counts differ");
  if (x.empty()) throw std::invalid_argument("no training rows");
  for (const auto& row : x) {
    if (row.size() != p.weights.size()) throw std::invalid_argument("row width differs from weights");
  }
}

}  // namespace

double loss(const Matrix& x, const std::vector<int>& y, const Parameters& params, double l2_lambda) {
  check_shapes(x, y, params);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = linear(params, x[i]);
    total += softplus(z) - (y[i] ? z : 0.0);
  }
  double penalty = 0.0;
  for (double w : params.weights) penalty += w * w;
  return total / static_cast<double>(x.size()) + 0.5 * l2_lambda * penalty;
}

Parameters gradient(const Matrix& x, const std::vector<int>& y, const Parameters& params,
                    double l2_lambda) {
  check_shapes(x, y, params);
  Parameters g{std::vector<double>(params.weights.size(), 0.0), 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double residual = sigmoid(linear(params, x[i])) - (y[i] ? 1.0 : 0.0);
    for (std::size_t j = 0; j < g.weights.size(); ++j) g.weights[j] += residual * x[i][j];
    g.bias += residual;
  }
  const double n = static_cast<double>(x.size());
  for (std::size_t j = 0; j < g.weights.size(); ++j) {
    g.weights[j] = g.weights[j] / n + l2_lambda * params.weights[j];
  }
  g.bias /= n;
  return g;
}

Parameters fit(const Matrix& x, const std::vector<int>& y, const Hyperparameters& hyper,
               std::vector<double>* loss_history) {
  hyper.validate();
  const std::size_t dim = x.empty() ? 0 : x.front().size();
  Parameters p{std::vector<double>(dim, 0.0), 0.0};
  for (int epoch = 0; epoch <= hyper.epochs; ++epoch) {
    const double current = loss(x, y, p, hyper.l2_lambda);
    if (!std::isfinite(current)) {
      throw ModelError("logistic regression diverged at epoch " + std::to_string(epoch) +
                       " (non-finite loss); lower the learning rate");
    }
    if (loss_history) loss_history->push_back(current);
    if (epoch == hyper.epochs) break;
    const Parameters g = gradient(x, y, p, hyper.l2_lambda);
    for (std::size_t j = 0; j < dim; ++j) p.weights[j] -= hyper.learning_rate * g.weights[j];
    p.bias -= hyper.learning_rate * g.bias;
  }
  return p;
}

double predict(const Parameters& params, const std::vector<double>& row) {
  return sigmoid(linear(params, row));
}

}  // namespace logistic

double LogisticModel::predict_proba(const FeatureArray& row) const {
  double z = bias;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    if (mask.test(j)) z += weights[j] * row[j];
  }
  return logistic::sigmoid(z);
}

LogisticModel train(const std::vector<FeatureArray>& rows, const std::vector<int>& labels,
                    const FeatureMask& mask, const Hyperparameters& hyper) {
  if (rows.size() != labels.size()) throw std::invalid_argument("row and label counts differ");
  const auto positives = std::count_if(labels.begin(), labels.end(), [](int y) { return y != 0; });
  if (positives == 0 || static_cast<std::size_t>(positives) == labels.size()) {
    throw ModelError("training data holds a single class");
  }
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    if (mask.test(j)) active.push_back(j);
  }
  logistic::Matrix x;
  x.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<double> reduced;
    reduced.reserve(active.size());
    for (std::size_t j : active) reduced.push_back(row[j]);
    x.push_back(std::move(reduced));
  }
  const logistic::Parameters p = logistic::fit(x, labels, hyper);

  LogisticModel model;
  model.mask = mask;
  model.hyper = hyper;
  model.bias = p.bias;
  for (std::size_t k = 0; k < active.size(); ++k) model.weights[active[k]] = p.weights[k];
  return model;
}

double f_measure(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

Metrics metrics_from(const Confusion& c) {
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  Metrics m;
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.f_measure = f_measure(m.precision, m.recall);
  m.accuracy = ratio(c.tp + c.tn, c.total());
  return m;
}

Confusion confusion(const LogisticModel& model, const NormalizationStats& stats,
                    const std::vector<FeatureArray>& rows, const std::vector<int>& labels) {
  if (rows.size() != labels.size()) throw std::invalid_argument("row and label counts differ");
  Confusion c;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool predicted = model.predict(normalize_apply(stats, rows[i]));
    const bool actual = labels[i] != 0;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Metrics evaluate(const LogisticModel& model, const NormalizationStats& stats,
                 const std::vector<FeatureArray>& rows, const std::vector<int>& labels) {
  if (rows.empty()) throw std::invalid_argument("cannot evaluate on an empty test set");
  return metrics_from(confusion(model, stats, rows, labels));
}

std::vector<AblationPreset> ablation_presets() {
  auto without = [](FeatureMask mask, std::initializer_list<Feature> drop) {
    for (Feature f : drop) mask.reset(static_cast<std::size_t>(f));
    return mask;
  };
  FeatureMask all;
  all.set();
  const FeatureMask m2 = without(all, {Feature::Sentiment, Feature::Cognition, Feature::Intent});
  const FeatureMask m3 = without(m2, {Feature::AvgSentimentBefore, Feature::AvgCognitionBefore,
                                      Feature::AvgIntentBefore, Feature::LastSentiment,
                                      Feature::LastCognition, Feature::LastIntent});
  return {
      {"M1", "all features", all},
      {"M2", "M1 minus current-window text measures", m2},
      {"M3", "M1 minus every text measure", m3},
      {"M1-modularity", "M1 minus modularity", without(all, {Feature::Modularity})},
      {"M3-avgcentrality", "M3 minus average connectiveness and betweenness",
       without(m3, {Feature::AvgConnectiveness, Feature::AvgBetweenness})},
  };
}

const AblationPreset& find_preset(std::string_view name) {
  static const std::vector<AblationPreset> presets = ablation_presets();
  for (const auto& p : presets) {
    if (p.name == name) return p;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

Balance parse_balance(std::string_view name) {
  if (name == "none") return Balance::None;
  if (name == "downsample") return Balance::Downsample;
  throw std::invalid_argument("unknown balance mode '" + std::string(name) + "'");
}

std::string_view to_string(Balance balance) {
  return balance == Balance::None ? "none" : "downsample";
}

void CvConfig::validate() const {
  if (repeats < 1) throw std::invalid_argument("cv repeats must be at least 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must lie strictly between 0 and 1");
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Unbiased draw in [0, n) from raw engine output.
std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[below(rng, i)]);
  }
}

double sample_std(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return std::sqrt(sq / static_cast<double>(values.size() - 1));
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

bool has_both_classes(const std::vector<std::size_t>& idx, const std::vector<int>& labels) {
  bool pos = false, neg = false;
  for (std::size_t i : idx) (labels[i] ? pos : neg) = true;
  return pos && neg;
}

}  // namespace

std::uint64_t repeat_seed(std::uint64_t seed, int repeat) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(repeat));
}

Split stratified_split(const std::vector<int>& labels, double train_fraction, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  Split split;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if ((labels[i] != 0) == (cls == 1)) members.push_back(i);
    }
    if (members.empty()) continue;
    shuffle(members, rng);
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(members.size())));
    if (members.size() >= 2) n_train = std::clamp<std::size_t>(n_train, 1, members.size() - 1);
    else n_train = 1;
    split.train.insert(split.train.end(), members.begin(), members.begin() + static_cast<long>(n_train));
    split.test.insert(split.test.end(), members.begin() + static_cast<long>(n_train), members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

EvalReport monte_carlo_cv(const std::vector<FeatureArray>& rows, const std::vector<int>& labels,
                          const AblationPreset& preset, const CvConfig& cv,
                          const Hyperparameters& hyper) {
  cv.validate();
  hyper.validate();
  if (rows.size() != labels.size()) throw std::invalid_argument("row and label counts differ");
  if (!has_both_classes([&] {
        std::vector<std::size_t> all(rows.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        return all;
      }(), labels)) {
    throw ModelError("dataset for " + preset.name + " holds a single class");
  }

  std::vector<double> precision, recall, f, accuracy, train_accuracy;
  for (int r = 0; r < cv.repeats; ++r) {
    const std::uint64_t seed_r = repeat_seed(cv.seed, r);
    Split split;
    bool ok = false;
    for (int attempt = 0; attempt <= 100 && !ok; ++attempt) {
      split = stratified_split(labels, cv.train_fraction, repeat_seed(seed_r, attempt));
      ok = has_both_classes(split.train, labels) && has_both_classes(split.test, labels);
    }
    if (!ok) {
      throw ModelError("Monte Carlo split kept collapsing to a single class after 100 redraws");
    }

    if (cv.balance == Balance::Downsample) {
      std::vector<std::size_t> pos, neg;
      for (std::size_t i : split.train) (labels[i] ? pos : neg).push_back(i);
      auto& major = pos.size() > neg.size() ? pos : neg;
      const std::size_t keep = std::min(pos.size(), neg.size());
      std::mt19937_64 rng(splitmix64(seed_r ^ 0xBA1A9CEULL));
      shuffle(major, rng);
      major.resize(keep);
      split.train = pos;
      split.train.insert(split.train.end(), neg.begin(), neg.end());
      std::sort(split.train.begin(), split.train.end());
    }

    std::vector<FeatureArray> train_rows, test_rows;
    std::vector<int> train_labels, test_labels;
    for (std::size_t i : split.train) {
      train_rows.push_back(rows[i]);
      train_labels.push_back(labels[i]);
    }
    for (std::size_t i : split.test) {
      test_rows.push_back(rows[i]);
      test_labels.push_back(labels[i]);
    }
    const NormalizationStats stats = normalize_fit(train_rows);
    const LogisticModel model = train(normalize_apply(stats, train_rows), train_labels, preset.mask, hyper);
    const Metrics test = evaluate(model, stats, test_rows, test_labels);
    const Metrics fit = evaluate(model, stats, train_rows, train_labels);
    precision.push_back(test.precision);
    recall.push_back(test.recall);
    f.push_back(test.f_measure);
    accuracy.push_back(test.accuracy);
    train_accuracy.push_back(fit.accuracy);
  }

  EvalReport report;
  report.model_name = preset.name;
  report.repeats = cv.repeats;
  report.precision.mean = mean_of(precision);
  report.precision.std = sample_std(precision, report.precision.mean);
  report.recall.mean = mean_of(recall);
  report.recall.std = sample_std(recall, report.recall.mean);
  report.f_measure.mean = f_measure(report.precision.mean, report.recall.mean);
  report.f_measure.std = sample_std(f, mean_of(f));
  report.accuracy.mean = mean_of(accuracy);
  report.accuracy.std = sample_std(accuracy, report.accuracy.mean);
  report.train_accuracy = mean_of(train_accuracy);
  report.train_accuracy_std = sample_std(train_accuracy, report.train_accuracy);
  return report;
}

EvalReport monte_carlo_cv(const std::vector<LabeledExample>& dataset, const AblationPreset& preset,
                          const CvConfig& cv, const Hyperparameters& hyper) {
  std::vector<FeatureArray> rows;
  std::vector<int> labels;
  rows.reserve(dataset.size());
  for (const auto& ex : dataset) {
    rows.push_back(ex.features.to_array());
    labels.push_back(ex.positive ? 1 : 0);
  }
  EvalReport report = monte_carlo_cv(rows, labels, preset, cv, hyper);
  if (!dataset.empty()) report.task = std::string(to_string(dataset.front().task));
  return report;
}

std::string report_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  auto summary = [](const MetricSummary& m) {
    nlohmann::ordered_json s;
    s["mean"] = m.mean;
    s["std"] = m.std;
    return s;
  };
  j["model_name"] = report.model_name;
  j["task"] = report.task;
  j["repeats"] = report.repeats;
  j["metrics"]["precision"] = summary(report.precision);
  j["metrics"]["recall"] = summary(report.recall);
  j["metrics"]["f_measure"] = summary(report.f_measure);
  j["metrics"]["accuracy"] = summary(report.accuracy);
  j["train_accuracy"] = report.train_accuracy;
  j["train_accuracy_std"] = report.train_accuracy_std;
  return j.dump(2) + "\n";
}

EvalReport parse_report_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    auto summary = [&](const char* key) {
      const auto& m = j.at("metrics").at(key);
      return MetricSummary{m.at("mean").get<double>(), m.at("std").get<double>()};
    };
    EvalReport r;
    r.model_name = j.at("model_name").get<std::string>();
    r.task = j.value("task", "");
    r.repeats = j.at("repeats").get<int>();
    r.precision = summary("precision");
    r.recall = summary("recall");
    r.f_measure = summary("f_measure");
    r.accuracy = summary("accuracy");
    r.train_accuracy = j.at("train_accuracy").get<double>();
    r.train_accuracy_std = j.value("train_accuracy_std", 0.0);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

std::string format_report_table(const std::vector<EvalReport>& reports) {
  std::string out;
  std::string task;
  char line[160];
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    if (i == 0 || r.task != task) {
      if (i) out += "\n";
      task = r.task;
      if (!task.empty()) out += "Task: " + task + "\n";
      std::snprintf(line, sizeof line, "%-18s %-10s %-10s %s\n", "Model", "Precision", "Recall",
                    "F-measure");
      out += line;
    }
    std::snprintf(line, sizeof line, "%-18s %-10.4f %-10.4f %.4f\n", r.model_name.c_str(),
                  r.precision.mean, r.recall.mean, r.f_measure.mean);
    out += line;
  }
  return out;
}

}  // namespace fluct
