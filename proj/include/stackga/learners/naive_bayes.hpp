#pragma once

#include <cmath>
#include <vector>

#include "stackga/learners/classifier.hpp"

namespace stackga {

// Gaussian naive Bayes. Per-class feature variances are smoothed by
// 1e-9 * (largest total feature variance) to keep densities finite on
// constant columns.
class NaiveBayesModel final : public Model {
 public:
  NaiveBayesModel(ClassifierSpec spec, const Dataset& train)
      : Model(std::move(spec), train.n()), n_(train.n()) {
    const std::size_t m = train.m();
    if (m < 1) throw TrainingError("naive_bayes: empty training set");
    auto y = train.labels();

    double max_var = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      double mean = 0.0, var = 0.0;
      for (std::size_t i = 0; i < m; ++i) mean += train.at(i, j);
      mean /= static_cast<double>(m);
      for (std::size_t i = 0; i < m; ++i) {
        double d = train.at(i, j) - mean;
        var += d * d;
      }
      var /= static_cast<double>(m);
      max_var = std::max(max_var, var);
    }
    const double eps = 1e-9 * std::max(max_var, 1e-12);

    for (int c = 0; c < 2; ++c) {
      auto& st = stats_[c];
      st.mean.assign(n_, 0.0);
      st.var.assign(n_, eps);
      st.count = 0;
      for (std::size_t i = 0; i < m; ++i) {
        if (y[i] != c) continue;
        ++st.count;
        for (std::size_t j = 0; j < n_; ++j) st.mean[j] += train.at(i, j);
      }
      if (st.count == 0) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        st.mean[j] /= static_cast<double>(st.count);
      }
      for (std::size_t i = 0; i < m; ++i) {
        if (y[i] != c) continue;
        for (std::size_t j = 0; j < n_; ++j) {
          double d = train.at(i, j) - st.mean[j];
          st.var[j] += d * d / static_cast<double>(st.count);
        }
      }
      st.log_prior = std::log(static_cast<double>(st.count) /
                              static_cast<double>(m));
    }
  }

 private:
  struct ClassStats {
    std::vector<double> mean, var;
    std::size_t count = 0;
    double log_prior = 0.0;
  };

  double do_score(std::span<const double> x) const override {
    // Degenerate priors: a single-class model always predicts that class.
    if (stats_[0].count == 0) return 1.0;
    if (stats_[1].count == 0) return 0.0;
    double lp[2];
    for (int c = 0; c < 2; ++c) {
      const auto& st = stats_[c];
      double s = st.log_prior;
      for (std::size_t j = 0; j < n_; ++j) {
        double d = x[j] - st.mean[j];
        s += -0.5 * (std::log(2.0 * M_PI * st.var[j]) + d * d / st.var[j]);
      }
      lp[c] = s;
    }
    // P(y=1 | x) via a stable log-sum-exp.
    double hi = std::max(lp[0], lp[1]);
    double z0 = std::exp(lp[0] - hi), z1 = std::exp(lp[1] - hi);
    return z1 / (z0 + z1);
  }

  std::size_t n_;
  ClassStats stats_[2];
};

}  // namespace stackga
