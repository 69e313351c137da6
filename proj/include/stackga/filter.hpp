#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stackga/dataset.hpp"
#include "stackga/random.hpp"

namespace stackga {

// Equal-frequency binning with boundaries at empirical quantiles; tied values
// all land in the lower bin. Constant columns collapse to a single bin 0.
inline std::vector<int> discretize(const std::vector<double>& column,
                                   int bins) {
  if (bins < 2) throw std::invalid_argument("discretize: bins must be >= 2");
  if (column.size() < static_cast<std::size_t>(bins)) {
    throw std::invalid_argument("discretize: column shorter than bin count");
  }
  const std::size_t len = column.size();
  std::vector<double> sorted(column);
  std::sort(sorted.begin(), sorted.end());
  // Bin b covers sorted positions [b*len/bins, (b+1)*len/bins).
  std::vector<std::size_t> starts(static_cast<std::size_t>(bins));
  for (std::size_t b = 0; b < starts.size(); ++b) {
    starts[b] = b * len / static_cast<std::size_t>(bins);
  }
  std::vector<int> out(len);
  for (std::size_t i = 0; i < len; ++i) {
    const std::size_t pos = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), column[i]) -
        sorted.begin());
    const std::size_t b = static_cast<std::size_t>(
        std::upper_bound(starts.begin(), starts.end(), pos) - starts.begin());
    out[i] = static_cast<int>(b - 1);
  }
  return out;
}

// Shannon entropy in bits, with 0*log(0) = 0.
inline double entropy(std::span<const int> v) {
  if (v.empty()) return 0.0;
  std::map<int, std::size_t> counts;
  for (int x : v) ++counts[x];
  const double total = static_cast<double>(v.size());
  double h = 0.0;
  for (const auto& [value, count] : counts) {
    (void)value;
    const double p = static_cast<double>(count) / total;
    h -= p * std::log2(p);
  }
  return h;
}

inline double mutual_information(std::span<const int> a,
                                 std::span<const int> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("mutual_information: length mismatch");
  }
  std::map<std::pair<int, int>, std::size_t> joint;
  for (std::size_t i = 0; i < a.size(); ++i) ++joint[{a[i], b[i]}];
  const double total = static_cast<double>(a.size());
  double h_joint = 0.0;
  for (const auto& [pair, count] : joint) {
    (void)pair;
    const double p = static_cast<double>(count) / total;
    h_joint -= p * std::log2(p);
  }
  return entropy(a) + entropy(b) - h_joint;
}

// SU = 2*IG(a;b) / (H(a)+H(b)); 0 when both entropies vanish.
inline double symmetric_uncertainty(std::span<const int> a,
                                    std::span<const int> b) {
  const double denom = entropy(a) + entropy(b);
  if (denom == 0.0) return 0.0;
  return 2.0 * mutual_information(a, b) / denom;
}

struct FeatureWeights {
  std::vector<double> weights;
  std::string method;
  double elapsed_ms = 0.0;
};

struct FilterResult {
  FeatureMask mask;
  FeatureWeights weights;
  std::vector<std::size_t> ordering;  // selected then rejected, by relevance
  bool k_reduced = false;  // relief had to shrink k for a small class

  nlohmann::json to_json() const {
    std::vector<std::size_t> selected = mask.indices();
    return nlohmann::json{{"method", weights.method},
                          {"selected", selected},
                          {"weights", weights.weights},
                          {"elapsed_ms", weights.elapsed_ms}};
  }
};

namespace detail {

// Feature columns as discrete vectors: continuous columns are binned,
// everything else is cast.
inline std::vector<std::vector<int>> discretize_columns(const Dataset& ds,
                                                        int bins) {
  const int eff_bins =
      std::max(2, std::min<int>(bins, static_cast<int>(ds.m())));
  std::vector<std::vector<int>> cols(ds.n());
  for (std::size_t j = 0; j < ds.n(); ++j) {
    auto col = ds.column(j);
    if (ds.specs()[j].kind == FeatureKind::continuous) {
      bool constant =
          std::all_of(col.begin(), col.end(),
                      [&](double v) { return v == col.front(); });
      if (constant) {
        cols[j].assign(col.size(), 0);
      } else {
        cols[j] = discretize(col, eff_bins);
      }
    } else {
      cols[j].reserve(col.size());
      for (double v : col) {
        cols[j].push_back(static_cast<int>(std::llround(v)));
      }
    }
  }
  return cols;
}

class StopWatch {
 public:
  StopWatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Fast correlation-based filter. Features with SU(f, class) > delta are
// ranked by decreasing SU; walking the ranking, each survivor removes every
// lower-ranked feature it predominates (SU(f_i, f_j) >= SU(f_j, class)).
inline FilterResult fcbf(const Dataset& ds, double delta, int bins = 10) {
  if (delta < 0.0) throw std::invalid_argument("fcbf: delta must be >= 0");
  detail::StopWatch watch;
  const std::size_t n = ds.n();
  auto cols = detail::discretize_columns(ds, bins);
  auto labels = ds.labels();
  std::vector<int> y(labels.begin(), labels.end());

  std::vector<double> su_class(n);
  for (std::size_t j = 0; j < n; ++j) {
    su_class[j] = symmetric_uncertainty(cols[j], y);
  }

  std::vector<std::size_t> ranked;
  for (std::size_t j = 0; j < n; ++j) {
    if (su_class[j] > delta) ranked.push_back(j);
  }
  std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    if (su_class[a] != su_class[b]) return su_class[a] > su_class[b];
    return a < b;
  });
  if (ranked.empty()) {
    throw std::runtime_error(
        "fcbf: delta " + std::to_string(delta) +
        " removed every feature; rerun with a lower delta");
  }

  std::vector<std::uint8_t> removed(n, 0);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const std::size_t fi = ranked[i];
    if (removed[fi]) continue;
    for (std::size_t jj = i + 1; jj < ranked.size(); ++jj) {
      const std::size_t fj = ranked[jj];
      if (removed[fj]) continue;
      if (symmetric_uncertainty(cols[fi], cols[fj]) >= su_class[fj]) {
        removed[fj] = 1;
      }
    }
  }

  FilterResult res;
  res.mask = FeatureMask(n);
  res.ordering.reserve(n);
  for (auto f : ranked) {
    if (!removed[f]) {
      res.mask.bits[f] = 1;
      res.ordering.push_back(f);
    }
  }
  // Rejected features follow, still in decreasing-relevance order.
  std::vector<std::size_t> rejected;
  for (std::size_t j = 0; j < n; ++j) {
    if (!res.mask.bits[j]) rejected.push_back(j);
  }
  std::sort(rejected.begin(), rejected.end(),
            [&](std::size_t a, std::size_t b) {
              if (su_class[a] != su_class[b]) return su_class[a] > su_class[b];
              return a < b;
            });
  res.ordering.insert(res.ordering.end(), rejected.begin(), rejected.end());
  res.weights = {std::move(su_class), "fcbf", 0.0};
  res.weights.elapsed_ms = watch.ms();
  return res;
}

// ReliefF weighting: for each sampled record, k nearest hits and misses pull
// per-feature weights down/up by the normalized value difference. Weights lie
// in [-1, 1]. Selection keeps weights > 0, or the top_q features when
// top_q > 0.
inline FilterResult relief(const Dataset& ds, std::size_t iterations,
                           std::size_t k, std::uint64_t seed, int top_q = 0) {
  if (k < 1) throw std::invalid_argument("relief: k must be >= 1");
  if (iterations < 1) {
    throw std::invalid_argument("relief: iterations must be >= 1");
  }
  detail::StopWatch watch;
  const std::size_t m = ds.m(), n = ds.n();
  auto labels = ds.labels();
  std::vector<int> y(labels.begin(), labels.end());
  std::vector<std::size_t> members[2];
  for (std::size_t i = 0; i < m; ++i) {
    members[static_cast<std::size_t>(y[i])].push_back(i);
  }
  if (members[0].empty() || members[1].empty()) {
    throw std::invalid_argument("relief: both classes must be present");
  }

  // Value ranges for the normalized diff; zero range contributes zero.
  std::vector<double> range(n, 0.0);
  std::vector<std::uint8_t> is_cont(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    is_cont[j] = ds.specs()[j].kind == FeatureKind::continuous ? 1 : 0;
    double lo = ds.at(0, j), hi = ds.at(0, j);
    for (std::size_t i = 1; i < m; ++i) {
      lo = std::min(lo, ds.at(i, j));
      hi = std::max(hi, ds.at(i, j));
    }
    range[j] = hi - lo;
  }
  auto diff = [&](std::size_t f, std::size_t a, std::size_t b) -> double {
    const double va = ds.at(a, f), vb = ds.at(b, f);
    if (is_cont[f]) {
      return range[f] > 0.0 ? std::abs(va - vb) / range[f] : 0.0;
    }
    return va == vb ? 0.0 : 1.0;
  };

  // Sample order: a full permutation when every record is visited once,
  // uniform draws otherwise.
  Rng rng(derive_seed(seed, 0x3E11EFULL));
  std::vector<std::size_t> samples;
  if (iterations == m) {
    samples = rng.permutation(m);
  } else {
    samples.reserve(iterations);
    for (std::size_t t = 0; t < iterations; ++t) samples.push_back(rng.below(m));
  }

  bool reduced = false;
  std::vector<double> w(n, 0.0);
  std::vector<std::pair<double, std::size_t>> dist;
  for (auto x : samples) {
    const std::size_t cls = static_cast<std::size_t>(y[x]);
    for (int side = 0; side < 2; ++side) {
      const bool hit = side == 0;
      const auto& pool = members[hit ? cls : 1 - cls];
      std::size_t avail = pool.size() - (hit ? 1 : 0);
      if (avail == 0) continue;
      std::size_t keff = std::min(k, avail);
      if (keff < k) reduced = true;
      dist.clear();
      for (auto i : pool) {
        if (i == x) continue;
        double d = 0.0;
        for (std::size_t f = 0; f < n; ++f) d += diff(f, x, i);
        dist.push_back({d, i});
      }
      std::partial_sort(dist.begin(), dist.begin() + keff, dist.end());
      const double scale =
          1.0 / (static_cast<double>(iterations) * static_cast<double>(keff));
      for (std::size_t t = 0; t < keff; ++t) {
        const std::size_t i = dist[t].second;
        for (std::size_t f = 0; f < n; ++f) {
          w[f] += (hit ? -1.0 : 1.0) * diff(f, x, i) * scale;
        }
      }
    }
  }

  FilterResult res;
  res.k_reduced = reduced;
  res.ordering.resize(n);
  for (std::size_t j = 0; j < n; ++j) res.ordering[j] = j;
  std::sort(res.ordering.begin(), res.ordering.end(),
            [&](std::size_t a, std::size_t b) {
              if (w[a] != w[b]) return w[a] > w[b];
              return a < b;
            });
  res.mask = FeatureMask(n);
  if (top_q > 0) {
    for (std::size_t t = 0;
         t < std::min<std::size_t>(static_cast<std::size_t>(top_q), n); ++t) {
      res.mask.bits[res.ordering[t]] = 1;
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      if (w[j] > 0.0) res.mask.bits[j] = 1;
    }
    // All-nonpositive weights: keep the single best so the mask stays usable.
    if (!res.mask.any()) res.mask.bits[res.ordering[0]] = 1;
  }
  res.weights = {std::move(w), "relief", watch.ms()};
  return res;
}

}  // namespace stackga
