#pragma once

#include <cmath>
#include <vector>

#include "stackga/learners/classifier.hpp"
#include "stackga/random.hpp"

namespace stackga {

inline double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) - y*z, stable for large |z|.
inline double cross_entropy_from_logit(double z, int y) {
  return std::max(z, 0.0) - static_cast<double>(y) * z +
         std::log1p(std::exp(-std::abs(z)));
}

struct LinearParams {
  std::vector<double> w;
  double b = 0.0;
};

// Mean cross-entropy plus (l2/2)*|w|^2; the bias is unregularized. Exposed
// (with the gradient below) so finite-difference checks can probe arbitrary
// parameter points.
inline double logreg_loss(const LinearParams& p, const Dataset& ds,
                          double l2) {
  const std::size_t m = ds.m(), n = ds.n();
  auto y = ds.labels();
  double loss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    auto x = ds.row(i);
    double z = p.b;
    for (std::size_t j = 0; j < n; ++j) z += p.w[j] * x[j];
    loss += cross_entropy_from_logit(z, y[i]);
  }
  loss /= static_cast<double>(m);
  double reg = 0.0;
  for (double wj : p.w) reg += wj * wj;
  return loss + 0.5 * l2 * reg;
}

inline LinearParams logreg_grad(const LinearParams& p, const Dataset& ds,
                                double l2) {
  const std::size_t m = ds.m(), n = ds.n();
  auto y = ds.labels();
  LinearParams g;
  g.w.assign(n, 0.0);
  g.b = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    auto x = ds.row(i);
    double z = p.b;
    for (std::size_t j = 0; j < n; ++j) z += p.w[j] * x[j];
    double delta = (sigmoid(z) - static_cast<double>(y[i])) /
                   static_cast<double>(m);
    for (std::size_t j = 0; j < n; ++j) g.w[j] += delta * x[j];
    g.b += delta;
  }
  for (std::size_t j = 0; j < n; ++j) g.w[j] += l2 * p.w[j];
  return g;
}

// Full-batch gradient descent on the regularized cross-entropy, weights
// zero-initialized.
class LogisticRegressionModel final : public Model {
 public:
  LogisticRegressionModel(ClassifierSpec spec, const Dataset& train)
      : Model(std::move(spec), train.n()) {
    detail::require_both_classes(train, "logistic_regression");
    const auto& sp = this->spec();
    const double lr = sp.get("lr");
    const double l2 = sp.get("l2");
    const int epochs = static_cast<int>(sp.get("epochs"));
    params_.w.assign(train.n(), 0.0);
    params_.b = 0.0;
    for (int e = 0; e < epochs; ++e) {
      LinearParams g = logreg_grad(params_, train, l2);
      for (std::size_t j = 0; j < params_.w.size(); ++j) {
        params_.w[j] -= lr * g.w[j];
      }
      params_.b -= lr * g.b;
    }
  }

  const LinearParams& params() const { return params_; }

 private:
  double do_score(std::span<const double> x) const override {
    double z = params_.b;
    for (std::size_t j = 0; j < x.size(); ++j) z += params_.w[j] * x[j];
    return sigmoid(z);
  }

  LinearParams params_;
};

// SGD on the hinge loss with per-epoch 1/t learning-rate decay. The signed
// margin is squashed through a sigmoid so score() fits the uniform [0,1]
// contract.
class LinearSvmModel final : public Model {
 public:
  LinearSvmModel(ClassifierSpec spec, const Dataset& train)
      : Model(std::move(spec), train.n()) {
    detail::require_both_classes(train, "linear_svm");
    const auto& sp = this->spec();
    const double lr0 = sp.get("lr");
    const double l2 = sp.get("l2");
    const int epochs = static_cast<int>(sp.get("epochs"));
    const std::size_t m = train.m(), n = train.n();
    auto labels = train.labels();
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) y[i] = labels[i] == 1 ? 1.0 : -1.0;

    params_.w.assign(n, 0.0);
    params_.b = 0.0;
    for (int e = 0; e < epochs; ++e) {
      const double eta = lr0 / (1.0 + static_cast<double>(e));
      Rng rng(derive_seed(sp.seed, 0x5F3AULL, static_cast<std::uint64_t>(e)));
      auto perm = rng.permutation(m);
      for (auto i : perm) {
        auto x = train.row(i);
        double margin = params_.b;
        for (std::size_t j = 0; j < n; ++j) margin += params_.w[j] * x[j];
        margin *= y[i];
        if (margin < 1.0) {
          for (std::size_t j = 0; j < n; ++j) {
            params_.w[j] += eta * (y[i] * x[j] - l2 * params_.w[j]);
          }
          params_.b += eta * y[i];
        } else {
          for (std::size_t j = 0; j < n; ++j) {
            params_.w[j] -= eta * l2 * params_.w[j];
          }
        }
      }
    }
  }

  const LinearParams& params() const { return params_; }

 private:
  double do_score(std::span<const double> x) const override {
    double z = params_.b;
    for (std::size_t j = 0; j < x.size(); ++j) z += params_.w[j] * x[j];
    return sigmoid(z);
  }

  LinearParams params_;
};

}  // namespace stackga
