#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "stackga/learners/classifier.hpp"
#include "stackga/parallel.hpp"
#include "stackga/random.hpp"

namespace stackga {

namespace detail {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1, right = -1;
  double leaf_score = 0.0;  // class-1 fraction at the leaf
};

// Binary CART builder: Gini impurity, thresholds at midpoints of consecutive
// distinct sorted values, children constrained to >= min_leaf records.
// Ties between splits resolve to the lowest feature index, then the lowest
// threshold, so the tree is invariant to training-record order.
class TreeBuilder {
 public:
  TreeBuilder(const Dataset& train, int max_depth, int min_leaf)
      : ds_(train),
        y_(train.labels().begin(), train.labels().end()),
        max_depth_(max_depth),
        min_leaf_(std::max(1, min_leaf)) {}

  // rng/mtry: when mtry < n, each split considers a random mtry-subset of
  // features drawn from rng (random-forest mode).
  std::vector<TreeNode> build(std::vector<std::size_t> idx, Rng* rng,
                              std::size_t mtry) {
    nodes_.clear();
    build_node(std::move(idx), 0, rng, mtry);
    return std::move(nodes_);
  }

 private:
  int build_node(std::vector<std::size_t> idx, int depth, Rng* rng,
                 std::size_t mtry) {
    const int me = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    std::size_t ones = 0;
    for (auto i : idx) ones += static_cast<std::size_t>(y_[i]);
    const double score = static_cast<double>(ones) / idx.size();
    nodes_[me].leaf_score = score;

    const bool pure = ones == 0 || ones == idx.size();
    if (pure || depth >= max_depth_ ||
        idx.size() < 2 * static_cast<std::size_t>(min_leaf_)) {
      return me;
    }

    std::vector<std::size_t> features;
    const std::size_t n = ds_.n();
    if (mtry >= n || rng == nullptr) {
      features.resize(n);
      for (std::size_t j = 0; j < n; ++j) features[j] = j;
    } else {
      // Sample mtry distinct features, then scan in ascending order.
      std::vector<std::size_t> pool(n);
      for (std::size_t j = 0; j < n; ++j) pool[j] = j;
      for (std::size_t j = 0; j < mtry; ++j) {
        std::swap(pool[j], pool[j + rng->below(n - j)]);
      }
      features.assign(pool.begin(), pool.begin() + mtry);
      std::sort(features.begin(), features.end());
    }

    int best_feature = -1;
    double best_threshold = 0.0, best_impurity = 0.0;
    std::vector<std::pair<double, int>> vals(idx.size());
    for (auto f : features) {
      for (std::size_t r = 0; r < idx.size(); ++r) {
        vals[r] = {ds_.at(idx[r], f), y_[idx[r]]};
      }
      std::sort(vals.begin(), vals.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::size_t left_ones = 0;
      const std::size_t total = idx.size();
      for (std::size_t p = 0; p + 1 < total; ++p) {
        left_ones += static_cast<std::size_t>(vals[p].second);
        if (vals[p].first == vals[p + 1].first) continue;
        const std::size_t nl = p + 1, nr = total - nl;
        if (nl < static_cast<std::size_t>(min_leaf_) ||
            nr < static_cast<std::size_t>(min_leaf_)) {
          continue;
        }
        const double pl = static_cast<double>(left_ones) / nl;
        const double pr = static_cast<double>(ones - left_ones) / nr;
        const double gini_l = 2.0 * pl * (1.0 - pl);
        const double gini_r = 2.0 * pr * (1.0 - pr);
        const double weighted = (nl * gini_l + nr * gini_r) / total;
        if (best_feature < 0 || weighted < best_impurity - 1e-15) {
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (vals[p].first + vals[p + 1].first);
          best_impurity = weighted;
        }
      }
    }
    if (best_feature < 0) return me;  // no admissible split

    std::vector<std::size_t> left_idx, right_idx;
    for (auto i : idx) {
      (ds_.at(i, static_cast<std::size_t>(best_feature)) <= best_threshold
           ? left_idx
           : right_idx)
          .push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    nodes_[me].feature = best_feature;
    nodes_[me].threshold = best_threshold;
    const int l = build_node(std::move(left_idx), depth + 1, rng, mtry);
    nodes_[me].left = l;
    const int r = build_node(std::move(right_idx), depth + 1, rng, mtry);
    nodes_[me].right = r;
    return me;
  }

  const Dataset& ds_;
  std::vector<int> y_;
  int max_depth_, min_leaf_;
  std::vector<TreeNode> nodes_;
};

inline double tree_score(const std::vector<TreeNode>& nodes,
                         std::span<const double> x) {
  int cur = 0;
  while (nodes[cur].feature >= 0) {
    cur = x[static_cast<std::size_t>(nodes[cur].feature)] <=
                  nodes[cur].threshold
              ? nodes[cur].left
              : nodes[cur].right;
  }
  return nodes[cur].leaf_score;
}

}  // namespace detail

class CartModel final : public Model {
 public:
  CartModel(ClassifierSpec spec, const Dataset& train)
      : Model(std::move(spec), train.n()) {
    if (train.m() < 1) throw TrainingError("cart: empty training set");
    detail::TreeBuilder builder(
        train, static_cast<int>(this->spec().get("max_depth")),
        static_cast<int>(this->spec().get("min_leaf")));
    std::vector<std::size_t> idx(train.m());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    nodes_ = builder.build(std::move(idx), nullptr, train.n());
  }

 private:
  double do_score(std::span<const double> x) const override {
    return detail::tree_score(nodes_, x);
  }

  std::vector<detail::TreeNode> nodes_;
};

// Bagged CART ensemble: bootstrap samples of size m, ceil(sqrt(n)) candidate
// features per split (override with "mtry"), majority vote. Per-tree random
// streams derive from (seed, tree index), so concurrent training cannot
// change the result.
class RandomForestModel final : public Model {
 public:
  RandomForestModel(ClassifierSpec spec, const Dataset& train)
      : Model(std::move(spec), train.n()) {
    const std::size_t m = train.m(), n = train.n();
    if (m < 1) throw TrainingError("random_forest: empty training set");
    const auto& sp = this->spec();
    const std::size_t trees = static_cast<std::size_t>(sp.get("trees"));
    if (trees < 1) throw std::invalid_argument("random_forest: trees >= 1");
    const int max_depth = static_cast<int>(sp.get("max_depth"));
    const int min_leaf = static_cast<int>(sp.get("min_leaf"));
    std::size_t mtry = static_cast<std::size_t>(sp.get("mtry"));
    if (mtry == 0) {
      mtry = static_cast<std::size_t>(
          std::ceil(std::sqrt(static_cast<double>(n))));
    }
    mtry = std::min(mtry, n);

    forest_.resize(trees);
    parallel_for(trees, [&](std::size_t t) {
      Rng rng(derive_seed(sp.seed, 0x0F0E57ULL, t));
      std::vector<std::size_t> sample(m);
      for (std::size_t i = 0; i < m; ++i) sample[i] = rng.below(m);
      detail::TreeBuilder builder(train, max_depth, min_leaf);
      forest_[t] = builder.build(std::move(sample), &rng, mtry);
    });
  }

 private:
  double do_score(std::span<const double> x) const override {
    std::size_t votes = 0;
    for (const auto& tree : forest_) {
      if (detail::tree_score(tree, x) >= 0.5) ++votes;
    }
    return static_cast<double>(votes) / static_cast<double>(forest_.size());
  }

  std::vector<std::vector<detail::TreeNode>> forest_;
};

}  // namespace stackga
