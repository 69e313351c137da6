#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stackga/dataset.hpp"
#include "stackga/evaluate.hpp"
#include "stackga/ga.hpp"
#include "stackga/learners.hpp"
#include "stackga/parallel.hpp"

namespace stackga {

// Two-level stacked generalization: T first-level learners feed a
// meta-learner trained on their outputs.
struct StackSpec {
  enum class MetaMode { resubstitution, out_of_fold };

  std::vector<ClassifierSpec> first_level;
  ClassifierSpec meta_learner =
      ClassifierSpec::make(Family::logistic_regression);
  MetaMode meta_mode = MetaMode::out_of_fold;
  int oof_folds = 5;
  // Meta-features are scores in [0,1] by default; hard_labels thresholds
  // them first, reproducing the literal label-composition scheme.
  bool hard_labels = false;

  // One learner per family, logistic-regression meta-learner.
  static StackSpec default_roster(std::uint64_t seed = 0) {
    StackSpec s;
    for (const auto& [family, name] : family_names()) {
      (void)name;
      s.first_level.push_back(ClassifierSpec::make(family, seed));
    }
    s.meta_learner = ClassifierSpec::make(Family::logistic_regression, seed);
    return s;
  }

  std::size_t t_learners() const { return first_level.size(); }

  void validate() const {
    if (first_level.empty()) {
      throw std::invalid_argument("stack: need at least one first-level learner");
    }
    for (const auto& spec : first_level) spec.validate();
    meta_learner.validate();
    if (meta_mode == MetaMode::out_of_fold && oof_folds < 2) {
      throw std::invalid_argument("stack: out_of_fold needs >= 2 folds");
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json fl = nlohmann::json::array();
    for (const auto& spec : first_level) fl.push_back(spec.to_json());
    std::string mode = meta_mode == MetaMode::resubstitution
                           ? "resub"
                           : "oof:" + std::to_string(oof_folds);
    return nlohmann::json{{"first_level", fl},
                          {"meta_learner", meta_learner.to_json()},
                          {"meta_mode", mode},
                          {"hard_labels", hard_labels}};
  }

  static StackSpec from_json(const nlohmann::json& j) {
    StackSpec s;
    s.first_level.clear();
    for (const auto& item : j.at("first_level")) {
      s.first_level.push_back(ClassifierSpec::from_json(item));
    }
    s.meta_learner = ClassifierSpec::from_json(j.at("meta_learner"));
    if (j.contains("meta_mode")) {
      std::string mode = j.at("meta_mode").get<std::string>();
      if (mode == "resub") {
        s.meta_mode = MetaMode::resubstitution;
      } else if (mode.rfind("oof:", 0) == 0) {
        s.meta_mode = MetaMode::out_of_fold;
        s.oof_folds = std::stoi(mode.substr(4));
      } else {
        throw std::invalid_argument("stack: meta_mode must be 'resub' or 'oof:<k>'");
      }
    }
    if (j.contains("hard_labels")) j.at("hard_labels").get_to(s.hard_labels);
    s.validate();
    return s;
  }
};

// First-level outputs assembled into a training set for the meta-learner:
// column t holds learner t's outputs, labels are the original ones.
struct MetaDataset {
  Dataset data;

  std::size_t m() const { return data.m(); }
  std::size_t t_learners() const { return data.n(); }
};

namespace detail {

inline ModelPtr fit_first_level(const ClassifierSpec& spec,
                                const Dataset& train, std::size_t index) {
  try {
    return fit(spec, train);
  } catch (const std::exception& e) {
    throw TrainingError("first-level learner " + std::to_string(index) + " (" +
                        family_name(spec.family) + "): " + e.what());
  }
}

inline double meta_feature(const Model& model, std::span<const double> x,
                           bool hard_labels) {
  double s = model.score(x);
  return hard_labels ? (s >= 0.5 ? 1.0 : 0.0) : s;
}

}  // namespace detail

// Trains the first level and produces the meta dataset. Resubstitution uses
// each model's outputs on its own training data (leaky but literal);
// out-of-fold fills column t from models trained without the record's fold,
// then refits learner t on all of the data for inference.
inline std::pair<std::vector<ModelPtr>, MetaDataset> build_meta(
    const StackSpec& spec, const Dataset& train) {
  spec.validate();
  detail::require_both_classes(train, "stacking");
  const std::size_t m = train.m();
  const std::size_t T = spec.t_learners();
  std::vector<std::vector<double>> z(m, std::vector<double>(T, 0.0));
  std::vector<ModelPtr> models(T);

  if (spec.meta_mode == StackSpec::MetaMode::resubstitution) {
    parallel_for(T, [&](std::size_t t) {
      models[t] = detail::fit_first_level(spec.first_level[t], train, t);
      for (std::size_t i = 0; i < m; ++i) {
        z[i][t] = detail::meta_feature(*models[t], train.row(i),
                                       spec.hard_labels);
      }
    });
  } else {
    auto y = train.labels();
    const std::uint64_t fold_seed =
        derive_seed(spec.meta_learner.seed, 0x00FULL);
    auto folds = kfold_test_indices(y, spec.oof_folds, /*stratified=*/true,
                                    fold_seed);
    // Fold training sets are shared across learners.
    std::vector<Dataset> fold_trains;
    fold_trains.reserve(folds.size());
    for (const auto& test_idx : folds) {
      std::vector<std::uint8_t> in_test(m, 0);
      for (auto i : test_idx) in_test[i] = 1;
      std::vector<std::vector<double>> rows;
      std::vector<int> labels;
      rows.reserve(m - test_idx.size());
      for (std::size_t i = 0; i < m; ++i) {
        if (in_test[i]) continue;
        auto r = train.row(i);
        rows.emplace_back(r.begin(), r.end());
        labels.push_back(y[i]);
      }
      fold_trains.push_back(
          Dataset::from_rows(rows, std::move(labels), train.specs()));
    }
    parallel_for(T, [&](std::size_t t) {
      for (std::size_t f = 0; f < folds.size(); ++f) {
        ModelPtr model =
            detail::fit_first_level(spec.first_level[t], fold_trains[f], t);
        for (auto i : folds[f]) {
          z[i][t] =
              detail::meta_feature(*model, train.row(i), spec.hard_labels);
        }
      }
      models[t] = detail::fit_first_level(spec.first_level[t], train, t);
    });
  }

  std::vector<FeatureSpec> meta_specs;
  meta_specs.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    meta_specs.push_back({"h" + std::to_string(t), FeatureKind::continuous, t});
  }
  auto y = train.labels();
  MetaDataset meta{Dataset::from_rows(z, {y.begin(), y.end()},
                                      std::move(meta_specs))};
  return {std::move(models), std::move(meta)};
}

// Trained stack: score() routes the feature row through every first-level
// model and the meta-model. Exposed as a Model so the shared evaluation
// harness applies unchanged.
class StackedModel final : public Model {
 public:
  StackedModel(StackSpec spec, std::vector<ModelPtr> first_level,
               ModelPtr meta, std::size_t n_in)
      : Model(spec.meta_learner, n_in),
        stack_spec_(std::move(spec)),
        first_level_(std::move(first_level)),
        meta_(std::move(meta)) {}

  const StackSpec& stack_spec() const { return stack_spec_; }
  const std::vector<ModelPtr>& first_level() const { return first_level_; }
  const Model& meta_model() const { return *meta_; }

  // The length-T meta-feature row for x.
  std::vector<double> meta_row(std::span<const double> x) const {
    std::vector<double> z(first_level_.size());
    for (std::size_t t = 0; t < first_level_.size(); ++t) {
      z[t] = detail::meta_feature(*first_level_[t], x,
                                  stack_spec_.hard_labels);
    }
    return z;
  }

 private:
  double do_score(std::span<const double> x) const override {
    auto z = meta_row(x);
    return meta_->score(z);
  }

  StackSpec stack_spec_;
  std::vector<ModelPtr> first_level_;
  ModelPtr meta_;
};

inline std::unique_ptr<StackedModel> fit_stack(const StackSpec& spec,
                                               const Dataset& train) {
  auto [models, meta] = build_meta(spec, train);
  ModelPtr meta_model = fit(spec.meta_learner, meta.data);
  return std::make_unique<StackedModel>(spec, std::move(models),
                                        std::move(meta_model), train.n());
}

inline int predict_stack(const StackedModel& model,
                         std::span<const double> x) {
  return model.predict(x);
}

inline MetricReport evaluate_stack(const StackSpec& spec, const Dataset& ds,
                                   const SplitPlan& plan) {
  return evaluate_with(
      ds, plan, [&](const Dataset& train) -> ModelPtr {
        return fit_stack(spec, train);
      });
}

// Fitness for a whole stack on masked features: mean stratified k-fold
// accuracy minus the feature-count penalty, failed folds scoring 0.
inline double stack_fitness(const FeatureMask& mask, const StackSpec& spec,
                            const Dataset& train, int folds,
                            std::uint64_t seed, double alpha = 0.0,
                            bool* flagged = nullptr) {
  Dataset masked = apply_mask(train, mask);
  auto splits = kfold_split(masked, folds, /*stratified=*/true, seed);
  std::vector<MetricReport> reports;
  reports.reserve(splits.size());
  for (const auto& [tr, te] : splits) {
    try {
      reports.push_back(evaluate_fold(tr, te, [&](const Dataset& t) -> ModelPtr {
        return fit_stack(spec, t);
      }));
    } catch (const TrainingError&) {
      MetricReport zero;
      zero.values[0] = 0.0;
      reports.push_back(zero);
      if (flagged) *flagged = true;
    }
  }
  double acc = *average_reports(reports).values[0];
  return acc - alpha * (static_cast<double>(mask.count()) /
                        static_cast<double>(mask.size()));
}

// The exact mask fitness stacked_ga() optimizes; `train` is captured by
// reference and must outlive the callback.
inline MaskFitness stack_wrapper_fitness(const GAConfig& config,
                                         const StackSpec& spec,
                                         const Dataset& train) {
  const std::uint64_t fold_seed = derive_seed(config.seed, 0xCFULL);
  const int folds = config.fitness_folds;
  const double alpha = config.alpha;
  return [&train, spec, folds, fold_seed, alpha](const FeatureMask& mask,
                                                 bool* flagged) {
    return stack_fitness(mask, spec, train, folds, fold_seed, alpha, flagged);
  };
}

// GA over feature masks where every candidate is scored by cross-validating
// the full stack on the masked features; one shared mask serves all
// first-level learners. The returned model is fitted on the whole training
// partition restricted to the best mask.
inline std::pair<GAResult, std::unique_ptr<StackedModel>> stacked_ga(
    const StackSpec& spec, const GAConfig& config, const Dataset& train) {
  spec.validate();
  detail::require_both_classes(train, "stacked_ga");
  GAResult result = evolve_masks(config, train.n(),
                                 stack_wrapper_fitness(config, spec, train));
  auto model = fit_stack(spec, apply_mask(train, result.best_mask));
  return {std::move(result), std::move(model)};
}

}  // namespace stackga
