#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "stackga/learners/classifier.hpp"

namespace stackga {

// k-nearest neighbours with Euclidean distance. Distance ties break toward
// the lower training-record index. Score = fraction of neighbours labelled 1.
class KnnModel final : public Model {
 public:
  KnnModel(ClassifierSpec spec, const Dataset& train)
      : Model(std::move(spec), train.n()),
        m_(train.m()),
        n_(train.n()),
        k_(static_cast<std::size_t>(this->spec().get("k"))) {
    if (k_ < 1) throw std::invalid_argument("knn: k must be >= 1");
    if (m_ < 1) throw TrainingError("knn: empty training set");
    x_.reserve(m_ * n_);
    for (std::size_t i = 0; i < m_; ++i) {
      auto r = train.row(i);
      x_.insert(x_.end(), r.begin(), r.end());
    }
    auto y = train.labels();
    y_.assign(y.begin(), y.end());
  }

 private:
  double do_score(std::span<const double> x) const override {
    std::vector<std::pair<double, std::size_t>> d(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      double s = 0.0;
      const double* row = x_.data() + i * n_;
      for (std::size_t j = 0; j < n_; ++j) {
        double diff = x[j] - row[j];
        s += diff * diff;
      }
      d[i] = {s, i};
    }
    const std::size_t k = std::min(k_, m_);
    std::partial_sort(d.begin(), d.begin() + k, d.end());
    std::size_t ones = 0;
    for (std::size_t i = 0; i < k; ++i) {
      ones += static_cast<std::size_t>(y_[d[i].second]);
    }
    return static_cast<double>(ones) / static_cast<double>(k);
  }

  std::size_t m_, n_, k_;
  std::vector<double> x_;
  std::vector<int> y_;
};

}  // namespace stackga
