#pragma once

#include "stackga/learners/classifier.hpp"
#include "stackga/learners/knn.hpp"
#include "stackga/learners/linear.hpp"
#include "stackga/learners/mlp.hpp"
#include "stackga/learners/naive_bayes.hpp"
#include "stackga/learners/tree.hpp"

namespace stackga {

// Trains a classifier. Deterministic given (spec, training data): two calls
// with identical inputs produce models with identical predictions.
inline ModelPtr fit(const ClassifierSpec& spec, const Dataset& train) {
  spec.validate();
  if (train.m() < 1) throw TrainingError("fit: empty training set");
  switch (spec.family) {
    case Family::knn:
      return std::make_unique<KnnModel>(spec, train);
    case Family::naive_bayes:
      return std::make_unique<NaiveBayesModel>(spec, train);
    case Family::cart:
      return std::make_unique<CartModel>(spec, train);
    case Family::random_forest:
      return std::make_unique<RandomForestModel>(spec, train);
    case Family::logistic_regression:
      return std::make_unique<LogisticRegressionModel>(spec, train);
    case Family::linear_svm:
      return std::make_unique<LinearSvmModel>(spec, train);
    case Family::mlp:
      return std::make_unique<MlpModel>(spec, train);
  }
  throw std::logic_error("unreachable family");
}

}  // namespace stackga
