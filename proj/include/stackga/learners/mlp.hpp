#pragma once

#include <cmath>
#include <vector>

#include "stackga/learners/classifier.hpp"
#include "stackga/learners/linear.hpp"
#include "stackga/random.hpp"

namespace stackga {

// One hidden layer, tanh activations, sigmoid output.
struct MlpParams {
  std::size_t n_in = 0, hidden = 0;
  std::vector<double> w1;  // hidden x n_in, row-major per hidden unit
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;

  static MlpParams random(std::size_t n_in, std::size_t hidden, Rng& rng) {
    MlpParams p;
    p.n_in = n_in;
    p.hidden = hidden;
    p.w1.resize(hidden * n_in);
    p.b1.resize(hidden);
    p.w2.resize(hidden);
    for (auto& v : p.w1) v = rng.uniform(-0.5, 0.5);
    for (auto& v : p.b1) v = rng.uniform(-0.5, 0.5);
    for (auto& v : p.w2) v = rng.uniform(-0.5, 0.5);
    p.b2 = rng.uniform(-0.5, 0.5);
    return p;
  }

  std::size_t size() const { return w1.size() + b1.size() + w2.size() + 1; }

  std::vector<double> flatten() const {
    std::vector<double> v;
    v.reserve(size());
    v.insert(v.end(), w1.begin(), w1.end());
    v.insert(v.end(), b1.begin(), b1.end());
    v.insert(v.end(), w2.begin(), w2.end());
    v.push_back(b2);
    return v;
  }

  void unflatten(std::span<const double> v) {
    std::size_t o = 0;
    for (auto& x : w1) x = v[o++];
    for (auto& x : b1) x = v[o++];
    for (auto& x : w2) x = v[o++];
    b2 = v[o];
  }
};

inline double mlp_logit(const MlpParams& p, std::span<const double> x,
                        std::vector<double>* hidden_out = nullptr) {
  double z = p.b2;
  if (hidden_out) hidden_out->resize(p.hidden);
  for (std::size_t h = 0; h < p.hidden; ++h) {
    double a = p.b1[h];
    const double* w = p.w1.data() + h * p.n_in;
    for (std::size_t j = 0; j < p.n_in; ++j) a += w[j] * x[j];
    double t = std::tanh(a);
    if (hidden_out) (*hidden_out)[h] = t;
    z += p.w2[h] * t;
  }
  return z;
}

// Mean cross-entropy over the dataset (no regularization).
inline double mlp_loss(const MlpParams& p, const Dataset& ds) {
  auto y = ds.labels();
  double loss = 0.0;
  for (std::size_t i = 0; i < ds.m(); ++i) {
    loss += cross_entropy_from_logit(mlp_logit(p, ds.row(i)), y[i]);
  }
  return loss / static_cast<double>(ds.m());
}

inline MlpParams mlp_grad(const MlpParams& p, const Dataset& ds) {
  const std::size_t m = ds.m();
  auto y = ds.labels();
  MlpParams g;
  g.n_in = p.n_in;
  g.hidden = p.hidden;
  g.w1.assign(p.w1.size(), 0.0);
  g.b1.assign(p.b1.size(), 0.0);
  g.w2.assign(p.w2.size(), 0.0);
  g.b2 = 0.0;
  std::vector<double> hidden;
  for (std::size_t i = 0; i < m; ++i) {
    auto x = ds.row(i);
    double z = mlp_logit(p, x, &hidden);
    double dz = (sigmoid(z) - static_cast<double>(y[i])) /
                static_cast<double>(m);
    g.b2 += dz;
    for (std::size_t h = 0; h < p.hidden; ++h) {
      g.w2[h] += dz * hidden[h];
      double da = dz * p.w2[h] * (1.0 - hidden[h] * hidden[h]);
      g.b1[h] += da;
      double* gw = g.w1.data() + h * p.n_in;
      for (std::size_t j = 0; j < p.n_in; ++j) gw[j] += da * x[j];
    }
  }
  return g;
}

// Full-batch gradient descent on cross-entropy; weights start at
// Uniform(-0.5, 0.5) drawn from the spec seed.
class MlpModel final : public Model {
 public:
  MlpModel(ClassifierSpec spec, const Dataset& train)
      : Model(std::move(spec), train.n()) {
    detail::require_both_classes(train, "mlp");
    const auto& sp = this->spec();
    const std::size_t hidden = static_cast<std::size_t>(sp.get("hidden"));
    const double lr = sp.get("lr");
    const int epochs = static_cast<int>(sp.get("epochs"));
    if (hidden < 1) throw std::invalid_argument("mlp: hidden must be >= 1");
    Rng rng(derive_seed(sp.seed, 0x3117ULL));
    params_ = MlpParams::random(train.n(), hidden, rng);
    for (int e = 0; e < epochs; ++e) {
      MlpParams g = mlp_grad(params_, train);
      for (std::size_t i = 0; i < params_.w1.size(); ++i) {
        params_.w1[i] -= lr * g.w1[i];
      }
      for (std::size_t i = 0; i < params_.b1.size(); ++i) {
        params_.b1[i] -= lr * g.b1[i];
      }
      for (std::size_t i = 0; i < params_.w2.size(); ++i) {
        params_.w2[i] -= lr * g.w2[i];
      }
      params_.b2 -= lr * g.b2;
    }
  }

  const MlpParams& params() const { return params_; }

 private:
  double do_score(std::span<const double> x) const override {
    return sigmoid(mlp_logit(params_, x));
  }

  MlpParams params_;
};

}  // namespace stackga
