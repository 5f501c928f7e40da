#pragma once

// Accuracy, confusion matrices, length-based failure analysis and the
// cross-domain protocol.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nordiclid/corpus.hpp"
#include "nordiclid/error.hpp"
#include "nordiclid/label.hpp"

namespace nordiclid {

struct ConfusionMatrix {
  // counts[true][predicted]
  PerLabel<PerLabel<std::size_t>> counts{};

  void add(Label truth, Label predicted) { ++counts[index_of(truth)][index_of(predicted)]; }

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& row : counts) {
      for (auto c : row) t += c;
    }
    return t;
  }

  std::size_t trace() const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < kNumLabels; ++i) t += counts[i][i];
    return t;
  }

  std::size_t row_sum(Label l) const {
    std::size_t s = 0;
    for (auto c : counts[index_of(l)]) s += c;
    return s;
  }

  std::size_t column_sum(Label l) const {
    std::size_t s = 0;
    for (const auto& row : counts) s += row[index_of(l)];
    return s;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct LabelMetrics {
  double precision = 0.0;  // 0 when the label was never predicted
  double recall = 0.0;     // 0 when the label is absent from the test set
  std::size_t support = 0;
};

struct EvalReport {
  std::string dataset_id;
  std::string model_id;
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  PerLabel<LabelMetrics> per_label{};
  std::vector<Label> predictions;  // in test order
};

inline EvalReport make_report(const Dataset& test, std::vector<Label> predictions, std::string dataset_id = "",
                              std::string model_id = "") {
  if (test.empty()) throw InputError("evaluation requires a non-empty test set");
  if (predictions.size() != test.size()) throw LengthMismatch(predictions.size(), test.size());
  EvalReport r{std::move(dataset_id), std::move(model_id), {}, 0.0, {}, std::move(predictions)};
  for (std::size_t i = 0; i < test.size(); ++i) r.confusion.add(test[i].label, r.predictions[i]);
  r.accuracy = static_cast<double>(r.confusion.trace()) / static_cast<double>(r.confusion.total());
  for (auto l : kAllLabels) {
    const std::size_t k = index_of(l);
    const std::size_t tp = r.confusion.counts[k][k];
    const std::size_t predicted = r.confusion.column_sum(l);
    auto& m = r.per_label[k];
    m.support = r.confusion.row_sum(l);
    m.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    m.recall = m.support ? static_cast<double>(tp) / static_cast<double>(m.support) : 0.0;
  }
  return r;
}

// Predicts every sentence once, in dataset order. A failing prediction is
// rethrown with the index of the offending sentence.
template <class PredictFn>
std::vector<Label> predict_all(PredictFn&& predict, const Dataset& test) {
  std::vector<Label> out;
  out.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    try {
      out.push_back(predict(test[i]));
    } catch (const Error& e) {
      throw Error(e.code(), "sentence " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

template <class PredictFn>
EvalReport evaluate(PredictFn&& predict, const Dataset& test, std::string dataset_id = "",
                    std::string model_id = "") {
  if (test.empty()) throw InputError("evaluation requires a non-empty test set");
  return make_report(test, predict_all(predict, test), std::move(dataset_id), std::move(model_id));
}

struct GroupStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population
};

struct LengthStats {
  std::optional<GroupStats> all;
  std::optional<GroupStats> correct;
  std::optional<GroupStats> misclassified;
};

inline std::optional<GroupStats> group_stats(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  GroupStats g;
  g.count = values.size();
  for (double v : values) g.mean += v;
  g.mean /= static_cast<double>(g.count);
  double ss = 0.0;
  for (double v : values) ss += (v - g.mean) * (v - g.mean);
  g.stddev = std::sqrt(ss / static_cast<double>(g.count));
  return g;
}

inline LengthStats length_stats(const Dataset& test, const std::vector<Label>& predictions) {
  if (predictions.size() != test.size()) throw LengthMismatch(predictions.size(), test.size());
  std::vector<double> all, good, bad;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto len = static_cast<double>(test[i].length);
    all.push_back(len);
    (predictions[i] == test[i].label ? good : bad).push_back(len);
  }
  return {group_stats(all), group_stats(good), group_stats(bad)};
}

template <class PredictFn>
LengthStats length_failure_analysis(PredictFn&& predict, const Dataset& test) {
  if (test.empty()) throw InputError("length analysis requires a non-empty test set");
  return length_stats(test, predict_all(predict, test));
}

struct CrossDomainResult {
  EvalReport in_domain;
  EvalReport out_domain;
  double delta = 0.0;  // in-domain accuracy minus out-of-domain accuracy
};

template <class PredictFn>
CrossDomainResult cross_domain_eval(PredictFn&& predict, const Dataset& in_domain, const Dataset& out_domain,
                                    const std::string& model_id = "") {
  CrossDomainResult r{evaluate(predict, in_domain, "in-domain", model_id),
                      evaluate(predict, out_domain, "out-of-domain", model_id), 0.0};
  r.delta = r.in_domain.accuracy - r.out_domain.accuracy;
  return r;
}

// --- output ----------------------------------------------------------------

inline std::string format_confusion_csv(const ConfusionMatrix& m) {
  std::string out = "true\\pred";
  for (auto l : kAllLabels) out += "," + std::string(code_of(l));
  out += "\n";
  for (auto t : kAllLabels) {
    out += code_of(t);
    for (auto c : m.counts[index_of(t)]) out += "," + std::to_string(c);
    out += "\n";
  }
  return out;
}

inline nlohmann::ordered_json to_json(const std::optional<GroupStats>& g) {
  if (!g) return nullptr;
  return {{"count", g->count}, {"mean", g->mean}, {"std", g->stddev}};
}

inline std::string format_report_json(const EvalReport& r, const std::optional<LengthStats>& lengths = std::nullopt) {
  nlohmann::ordered_json j;
  j["dataset"] = r.dataset_id;
  j["model"] = r.model_id;
  j["total"] = r.confusion.total();
  j["correct"] = r.confusion.trace();
  j["accuracy"] = r.accuracy;
  auto& labels = j["per_label"];
  labels = nlohmann::ordered_json::object();
  for (auto l : kAllLabels) {
    const auto& m = r.per_label[index_of(l)];
    labels[std::string(code_of(l))] = {{"precision", m.precision}, {"recall", m.recall}, {"support", m.support}};
  }
  if (lengths) {
    j["length"] = {{"all", to_json(lengths->all)},
                   {"correct", to_json(lengths->correct)},
                   {"misclassified", to_json(lengths->misclassified)}};
  }
  j["note"] = "lengths are cleaned character counts; std is the population standard deviation";
  return j.dump(2) + "\n";
}

}  // namespace nordiclid
