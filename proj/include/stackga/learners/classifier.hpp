#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stackga/dataset.hpp"

namespace stackga {

enum class Family {
  knn,
  naive_bayes,
  cart,
  random_forest,
  logistic_regression,
  linear_svm,
  mlp,
};

inline const std::vector<std::pair<Family, std::string>>& family_names() {
  static const std::vector<std::pair<Family, std::string>> names = {
      {Family::knn, "knn"},
      {Family::naive_bayes, "naive_bayes"},
      {Family::cart, "cart"},
      {Family::random_forest, "random_forest"},
      {Family::logistic_regression, "logistic_regression"},
      {Family::linear_svm, "linear_svm"},
      {Family::mlp, "mlp"},
  };
  return names;
}

inline std::string family_name(Family f) {
  for (const auto& [fam, name] : family_names()) {
    if (fam == f) return name;
  }
  throw std::logic_error("unknown family enum value");
}

inline Family family_from_name(const std::string& s) {
  for (const auto& [fam, name] : family_names()) {
    if (name == s) return fam;
  }
  throw std::invalid_argument("unknown classifier family: '" + s + "'");
}

// Hyperparameter keys accepted per family; anything else is rejected at
// validation time.
inline const std::map<std::string, double>& default_hyperparameters(Family f) {
  static const std::map<Family, std::map<std::string, double>> defaults = {
      {Family::knn, {{"k", 5}}},
      {Family::naive_bayes, {}},
      {Family::cart, {{"max_depth", 10}, {"min_leaf", 2}}},
      {Family::random_forest,
       {{"trees", 100}, {"max_depth", 10}, {"min_leaf", 2}, {"mtry", 0}}},
      {Family::logistic_regression,
       {{"lr", 0.1}, {"epochs", 2000}, {"l2", 1e-4}}},
      {Family::linear_svm, {{"lr", 0.01}, {"epochs", 2000}, {"l2", 1e-3}}},
      {Family::mlp, {{"hidden", 16}, {"lr", 0.05}, {"epochs", 3000}}},
  };
  return defaults.at(f);
}

struct ClassifierSpec {
  Family family = Family::knn;
  std::map<std::string, double> hyperparameters;
  std::uint64_t seed = 0;

  static ClassifierSpec make(Family f, std::uint64_t seed = 0) {
    ClassifierSpec s;
    s.family = f;
    s.seed = seed;
    return s;
  }

  // Effective value: explicit setting, else family default.
  double get(const std::string& key) const {
    auto it = hyperparameters.find(key);
    if (it != hyperparameters.end()) return it->second;
    const auto& defs = default_hyperparameters(family);
    auto dit = defs.find(key);
    if (dit == defs.end()) {
      throw std::logic_error("no such hyperparameter: " + key);
    }
    return dit->second;
  }

  ClassifierSpec& set(const std::string& key, double value) {
    hyperparameters[key] = value;
    return *this;
  }

  void validate() const {
    const auto& defs = default_hyperparameters(family);
    for (const auto& [key, value] : hyperparameters) {
      if (defs.find(key) == defs.end()) {
        throw std::invalid_argument("unknown hyperparameter '" + key +
                                    "' for family " + family_name(family));
      }
      (void)value;
    }
  }

  nlohmann::json to_json() const {
    return nlohmann::json{{"family", family_name(family)},
                          {"hyperparameters", hyperparameters},
                          {"seed", seed}};
  }

  static ClassifierSpec from_json(const nlohmann::json& j) {
    ClassifierSpec s;
    s.family = family_from_name(j.at("family").get<std::string>());
    if (j.contains("hyperparameters")) {
      s.hyperparameters =
          j.at("hyperparameters").get<std::map<std::string, double>>();
    }
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    s.validate();
    return s;
  }
};

// A trained classifier. score() is a monotone confidence for class 1 in
// [0,1]; predict() thresholds it at 0.5 uniformly across families so that
// stacking meta-features stay comparable.
class Model {
 public:
  virtual ~Model() = default;

  double score(std::span<const double> x) const {
    if (x.size() != n_in_) {
      throw std::invalid_argument("model expects " + std::to_string(n_in_) +
                                  " features, got " + std::to_string(x.size()));
    }
    return do_score(x);
  }

  int predict(std::span<const double> x) const {
    return score(x) >= 0.5 ? 1 : 0;
  }

  std::size_t n_in() const { return n_in_; }
  const ClassifierSpec& spec() const { return spec_; }

 protected:
  Model(ClassifierSpec spec, std::size_t n_in)
      : spec_(std::move(spec)), n_in_(n_in) {}

  virtual double do_score(std::span<const double> x) const = 0;

 private:
  ClassifierSpec spec_;
  std::size_t n_in_;
};

using ModelPtr = std::unique_ptr<Model>;

struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool has_both_classes(std::span<const int> y) {
  bool c0 = false, c1 = false;
  for (int v : y) (v == 1 ? c1 : c0) = true;
  return c0 && c1;
}

inline void require_both_classes(const Dataset& train, const char* family) {
  if (train.m() < 2 || !has_both_classes(train.labels())) {
    throw TrainingError(std::string(family) +
                        ": training data must contain both classes");
  }
}

}  // namespace detail

}  // namespace stackga
