#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "stackga/dataset.hpp"
#include "stackga/learners.hpp"
#include "stackga/metrics.hpp"

namespace stackga {

// Anything that can score a feature row. Models and stacked models both
// qualify; test doubles can too.
using FitFn = std::function<ModelPtr(const Dataset& train)>;

// Scores every test row, then checks the label-read audit: test-partition
// labels must be untouched until predictions exist.
inline MetricReport score_partition(const Model& model, const Dataset& test) {
  std::vector<double> scores(test.m());
  std::vector<int> preds(test.m());
  for (std::size_t i = 0; i < test.m(); ++i) {
    scores[i] = model.score(test.row(i));
    preds[i] = scores[i] >= 0.5 ? 1 : 0;
  }
  if (test.label_reads() != 0) {
    throw std::logic_error(
        "leakage guard: test-partition labels were read before prediction");
  }
  return MetricReport::from_predictions(test.labels(), preds, scores);
}

// Runs one train/test evaluation: fit the scaler on the training partition
// only, standardize both sides, train via fit_fn, score the test partition.
inline MetricReport evaluate_fold(const Dataset& train, const Dataset& test,
                                  const FitFn& fit_fn) {
  Scaler scaler = fit_scaler(train);
  Dataset train_s = apply_scaler(scaler, train);
  Dataset test_s = apply_scaler(scaler, test);
  ModelPtr model = fit_fn(train_s);
  return score_partition(*model, test_s);
}

// Cross-validated evaluation under a split plan. Holdout yields one report;
// k-fold reports are averaged with undefined entries skipped.
inline MetricReport evaluate_with(const Dataset& ds, const SplitPlan& plan,
                                  const FitFn& fit_fn) {
  if (plan.kind == SplitPlan::Kind::holdout) {
    auto [train, test] =
        holdout_split(ds, plan.fraction, plan.seed, plan.stratified);
    return evaluate_fold(train, test, fit_fn);
  }
  auto folds = kfold_split(ds, plan.k, plan.stratified, plan.seed);
  std::vector<MetricReport> reports;
  reports.reserve(folds.size());
  for (const auto& [train, test] : folds) {
    reports.push_back(evaluate_fold(train, test, fit_fn));
  }
  return average_reports(reports);
}

inline MetricReport evaluate(const ClassifierSpec& spec, const Dataset& ds,
                             const SplitPlan& plan) {
  return evaluate_with(ds, plan,
                       [&](const Dataset& train) { return fit(spec, train); });
}

}  // namespace stackga
