#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace stackga {

// Counts under the standard convention: positive = 1 = disease present,
// TP = predicted positive and actually positive.
struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
};

inline ConfusionMatrix confusion(std::span<const int> y_true,
                                 std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw std::invalid_argument("confusion: length mismatch");
  }
  if (y_true.empty()) throw std::invalid_argument("confusion: empty input");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    int t = y_true[i], p = y_pred[i];
    if ((t != 0 && t != 1) || (p != 0 && p != 1)) {
      throw std::invalid_argument("confusion: labels must be 0 or 1");
    }
    if (t == 1) {
      p == 1 ? ++cm.tp : ++cm.fn;
    } else {
      p == 1 ? ++cm.fp : ++cm.tn;
    }
  }
  return cm;
}

// Ratio metrics return nullopt on a zero denominator ("undefined", distinct
// from 0); fold averaging skips undefined entries.
namespace detail {
inline std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}
}  // namespace detail

inline std::optional<double> accuracy(const ConfusionMatrix& c) {
  return detail::ratio(static_cast<double>(c.tp + c.tn),
                       static_cast<double>(c.total()));
}
inline std::optional<double> sensitivity(const ConfusionMatrix& c) {
  return detail::ratio(static_cast<double>(c.tp),
                       static_cast<double>(c.tp + c.fn));
}
inline std::optional<double> specificity(const ConfusionMatrix& c) {
  return detail::ratio(static_cast<double>(c.tn),
                       static_cast<double>(c.tn + c.fp));
}
inline std::optional<double> ppv(const ConfusionMatrix& c) {
  return detail::ratio(static_cast<double>(c.tp),
                       static_cast<double>(c.tp + c.fp));
}
inline std::optional<double> npv(const ConfusionMatrix& c) {
  return detail::ratio(static_cast<double>(c.tn),
                       static_cast<double>(c.tn + c.fn));
}
inline std::optional<double> f1(const ConfusionMatrix& c) {
  return detail::ratio(2.0 * static_cast<double>(c.tp),
                       static_cast<double>(2 * c.tp + c.fp + c.fn));
}
inline std::optional<double> youden(const ConfusionMatrix& c) {
  auto se = sensitivity(c), sp = specificity(c);
  if (!se || !sp) return std::nullopt;
  return *se + *sp - 1.0;
}

// Mann-Whitney AUC: probability that a random positive's score exceeds a
// random negative's, ties credited 0.5. Computed from average ranks; equals
// the trapezoidal ROC area. Undefined when only one class is present.
inline std::optional<double> auc(std::span<const int> y_true,
                                 std::span<const double> scores) {
  if (y_true.size() != scores.size()) {
    throw std::invalid_argument("auc: length mismatch");
  }
  const std::size_t m = y_true.size();
  std::size_t pos = 0;
  for (int t : y_true) {
    if (t != 0 && t != 1) {
      throw std::invalid_argument("auc: labels must be 0 or 1");
    }
    pos += static_cast<std::size_t>(t);
  }
  const std::size_t neg = m - pos;
  if (pos == 0 || neg == 0) return std::nullopt;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < m) {
    std::size_t j = i;
    while (j < m && scores[order[j]] == scores[order[i]]) ++j;
    // Tied block [i, j): each member gets the average 1-based rank.
    double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (y_true[order[t]] == 1) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  double u = rank_sum_pos -
             static_cast<double>(pos) * static_cast<double>(pos + 1) / 2.0;
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

// ---------------------------------------------------------------------------
// MetricReport
// ---------------------------------------------------------------------------

// Flat record of all scalar metrics. Entries are optional because a fold can
// leave a ratio undefined; `skipped` tracks how many folds were skipped per
// metric when reports are averaged.
struct MetricReport {
  static constexpr std::size_t kCount = 8;
  static constexpr std::array<const char*, kCount> kNames = {
      "accuracy", "sensitivity", "specificity", "ppv",
      "npv",      "f1",          "youden",      "auc"};

  std::array<std::optional<double>, kCount> values;
  std::array<int, kCount> skipped{};
  int folds = 1;

  std::optional<double> get(std::size_t i) const { return values[i]; }
  std::optional<double> accuracy() const { return values[0]; }
  std::optional<double> sensitivity() const { return values[1]; }
  std::optional<double> specificity() const { return values[2]; }
  std::optional<double> ppv() const { return values[3]; }
  std::optional<double> npv() const { return values[4]; }
  std::optional<double> f1() const { return values[5]; }
  std::optional<double> youden() const { return values[6]; }
  std::optional<double> auc() const { return values[7]; }

  static MetricReport from_counts(const ConfusionMatrix& cm,
                                  std::optional<double> auc_value) {
    MetricReport r;
    r.values = {stackga::accuracy(cm), stackga::sensitivity(cm),
                stackga::specificity(cm), stackga::ppv(cm),
                stackga::npv(cm),      stackga::f1(cm),
                stackga::youden(cm),   auc_value};
    return r;
  }

  static MetricReport from_predictions(std::span<const int> y_true,
                                       std::span<const int> y_pred,
                                       std::span<const double> scores) {
    return from_counts(confusion(y_true, y_pred),
                       stackga::auc(y_true, scores));
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    for (std::size_t i = 0; i < kCount; ++i) {
      if (values[i]) {
        j[kNames[i]] = *values[i];
      } else {
        j[kNames[i]] = nullptr;
      }
    }
    return j;
  }
};

// Mean across folds per metric, skipping undefined entries and recording the
// skip count. A metric undefined in every fold stays undefined.
inline MetricReport average_reports(const std::vector<MetricReport>& reports) {
  if (reports.empty()) {
    throw std::invalid_argument("average_reports: no reports");
  }
  MetricReport out;
  out.folds = static_cast<int>(reports.size());
  for (std::size_t i = 0; i < MetricReport::kCount; ++i) {
    double sum = 0.0;
    int defined = 0;
    for (const auto& r : reports) {
      if (r.values[i]) {
        sum += *r.values[i];
        ++defined;
      } else {
        ++out.skipped[i];
      }
    }
    if (defined > 0) out.values[i] = sum / defined;
  }
  return out;
}

}  // namespace stackga
