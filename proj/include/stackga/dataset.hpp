#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <memory>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stackga/random.hpp"

namespace stackga {

enum class FeatureKind { continuous, binary, ordinal, nominal };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  std::size_t index = 0;
};

// The 13 Statlog heart attributes, in file column order.
inline const std::vector<FeatureSpec>& statlog_specs() {
  static const std::vector<FeatureSpec> specs = {
      {"age", FeatureKind::continuous, 0},
      {"sex", FeatureKind::binary, 1},
      {"chest pain", FeatureKind::nominal, 2},
      {"blood pressure", FeatureKind::continuous, 3},
      {"cholesterol", FeatureKind::continuous, 4},
      {"blood sugar", FeatureKind::binary, 5},
      {"electrocardiographic", FeatureKind::nominal, 6},
      {"heart rate", FeatureKind::continuous, 7},
      {"exercise-induced angina", FeatureKind::binary, 8},
      {"ST depression", FeatureKind::continuous, 9},
      {"slope", FeatureKind::ordinal, 10},
      {"ca", FeatureKind::ordinal, 11},
      {"thal", FeatureKind::nominal, 12},
  };
  return specs;
}

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bit vector over feature columns; the GA chromosome. A valid model input
// has at least one bit set.
struct FeatureMask {
  std::vector<std::uint8_t> bits;

  FeatureMask() = default;
  explicit FeatureMask(std::size_t n, bool set_all = false)
      : bits(n, set_all ? 1 : 0) {}

  static FeatureMask full(std::size_t n) { return FeatureMask(n, true); }

  static FeatureMask of(std::size_t n, const std::vector<std::size_t>& idx) {
    FeatureMask m(n);
    for (auto i : idx) {
      if (i >= n) throw std::invalid_argument("mask index out of range");
      m.bits[i] = 1;
    }
    return m;
  }

  std::size_t size() const { return bits.size(); }

  std::size_t count() const {
    return static_cast<std::size_t>(
        std::count(bits.begin(), bits.end(), std::uint8_t{1}));
  }

  bool any() const {
    return std::any_of(bits.begin(), bits.end(), [](auto b) { return b != 0; });
  }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i]) idx.push_back(i);
    }
    return idx;
  }

  // '0'/'1' string; doubles as a cache key.
  std::string key() const {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i]) s[i] = '1';
    }
    return s;
  }

  bool operator==(const FeatureMask& o) const { return bits == o.bits; }
};

struct Scaler;
class Dataset;
Dataset apply_mask(const Dataset& ds, const FeatureMask& mask);
Dataset apply_scaler(const Scaler& s, const Dataset& ds);
std::pair<Dataset, Dataset> holdout_split(const Dataset& ds, double fraction,
                                          std::uint64_t seed, bool stratified);
std::vector<std::pair<Dataset, Dataset>> kfold_split(const Dataset& ds, int k,
                                                     bool stratified,
                                                     std::uint64_t seed);

// Immutable m x n feature matrix with binary labels ({0,1}, 1 = positive
// class) and per-feature metadata. Safe to share across concurrent readers.
//
// Label reads through labels() are counted per instance; evaluation harnesses
// use the counter to assert that no test-partition labels were touched before
// predictions were made.
class Dataset {
 public:
  Dataset() : label_reads_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

  Dataset(const Dataset& o)
      : x_(o.x_),
        y_(o.y_),
        specs_(o.specs_),
        m_(o.m_),
        n_(o.n_),
        label_reads_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

  Dataset& operator=(const Dataset& o) {
    if (this != &o) {
      x_ = o.x_;
      y_ = o.y_;
      specs_ = o.specs_;
      m_ = o.m_;
      n_ = o.n_;
      label_reads_ = std::make_shared<std::atomic<std::uint64_t>>(0);
    }
    return *this;
  }

  Dataset(Dataset&&) = default;
  Dataset& operator=(Dataset&&) = default;

  static Dataset from_rows(const std::vector<std::vector<double>>& rows,
                           std::vector<int> labels,
                           std::vector<FeatureSpec> specs) {
    if (rows.empty()) throw std::invalid_argument("dataset: no records");
    const std::size_t m = rows.size();
    const std::size_t n = rows.front().size();
    if (n == 0) throw std::invalid_argument("dataset: no features");
    if (labels.size() != m) {
      throw std::invalid_argument("dataset: row count != label count");
    }
    if (specs.size() != n) {
      throw std::invalid_argument("dataset: spec count != feature count");
    }
    std::vector<double> flat;
    flat.reserve(m * n);
    for (std::size_t i = 0; i < m; ++i) {
      if (rows[i].size() != n) {
        throw std::invalid_argument("dataset: ragged rows");
      }
      for (double v : rows[i]) {
        if (!std::isfinite(v)) {
          throw std::invalid_argument("dataset: non-finite feature value");
        }
        flat.push_back(v);
      }
    }
    for (int y : labels) {
      if (y != 0 && y != 1) {
        throw std::domain_error("dataset: labels must be 0 or 1");
      }
    }
    return Dataset(std::move(flat), std::move(labels), std::move(specs), m, n);
  }

  // Convenience for synthetic data: generic continuous specs f0..f{n-1}.
  static Dataset from_rows(const std::vector<std::vector<double>>& rows,
                           std::vector<int> labels) {
    const std::size_t n = rows.empty() ? 0 : rows.front().size();
    std::vector<FeatureSpec> specs;
    specs.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      specs.push_back({"f" + std::to_string(j), FeatureKind::continuous, j});
    }
    return from_rows(rows, std::move(labels), std::move(specs));
  }

  std::size_t m() const { return m_; }
  std::size_t n() const { return n_; }
  const std::vector<FeatureSpec>& specs() const { return specs_; }

  std::span<const double> row(std::size_t i) const {
    return {x_.data() + i * n_, n_};
  }

  double at(std::size_t i, std::size_t j) const { return x_[i * n_ + j]; }

  std::vector<double> column(std::size_t j) const {
    std::vector<double> c(m_);
    for (std::size_t i = 0; i < m_; ++i) c[i] = x_[i * n_ + j];
    return c;
  }

  // Audited label access; see class comment.
  std::span<const int> labels() const {
    label_reads_->fetch_add(1, std::memory_order_relaxed);
    return {y_.data(), y_.size()};
  }

  std::uint64_t label_reads() const {
    return label_reads_->load(std::memory_order_relaxed);
  }

 private:
  Dataset(std::vector<double> x, std::vector<int> y,
          std::vector<FeatureSpec> specs, std::size_t m, std::size_t n)
      : x_(std::move(x)),
        y_(std::move(y)),
        specs_(std::move(specs)),
        m_(m),
        n_(n),
        label_reads_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

  // Rows at `idx`, in the given order. Structural; does not audit.
  Dataset subset(const std::vector<std::size_t>& idx) const {
    std::vector<double> x;
    x.reserve(idx.size() * n_);
    std::vector<int> y;
    y.reserve(idx.size());
    for (auto i : idx) {
      x.insert(x.end(), x_.begin() + i * n_, x_.begin() + (i + 1) * n_);
      y.push_back(y_[i]);
    }
    return Dataset(std::move(x), std::move(y), specs_, idx.size(), n_);
  }

  const std::vector<int>& raw_labels() const { return y_; }

  std::vector<double> x_;  // row-major
  std::vector<int> y_;
  std::vector<FeatureSpec> specs_;
  std::size_t m_ = 0, n_ = 0;
  mutable std::shared_ptr<std::atomic<std::uint64_t>> label_reads_;

  friend Dataset apply_mask(const Dataset&, const FeatureMask&);
  friend Dataset apply_scaler(const Scaler&, const Dataset&);
  friend std::pair<Dataset, Dataset> holdout_split(const Dataset&, double,
                                                   std::uint64_t, bool);
  friend std::vector<std::pair<Dataset, Dataset>> kfold_split(const Dataset&,
                                                              int, bool,
                                                              std::uint64_t);
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline bool parse_double(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size() && std::isfinite(out);
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream is(line);
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      toks.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  toks.push_back(cur);
  return toks;
}

inline std::string trim_lower(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c); };
  while (!s.empty() && issp(s.front())) s.erase(s.begin());
  while (!s.empty() && issp(s.back())) s.pop_back();
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline int remap_label(double v, std::size_t line_no) {
  if (v == 1.0) return 0;  // UCI convention: 1 = absence
  if (v == 2.0) return 1;  //                 2 = presence
  throw std::domain_error("line " + std::to_string(line_no) +
                          ": class label must be 1 or 2, got " +
                          std::to_string(v));
}

}  // namespace detail

// Parses the UCI Statlog heart layout: whitespace-separated numeric rows,
// 13 feature values plus a trailing class label in {1,2}. Labels are
// remapped to {0,1} with 1 = disease present. Row order is preserved.
inline Dataset parse_statlog(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 14) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 14 values, got " +
                       std::to_string(toks.size()));
    }
    std::vector<double> row;
    row.reserve(13);
    for (std::size_t j = 0; j < 13; ++j) {
      double v;
      if (!detail::parse_double(toks[j], v)) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": invalid numeric token '" + toks[j] + "'");
      }
      row.push_back(v);
    }
    double label_raw;
    if (!detail::parse_double(toks[13], label_raw)) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": invalid numeric token '" + toks[13] + "'");
    }
    labels.push_back(detail::remap_label(label_raw, line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no records");
  return Dataset::from_rows(rows, std::move(labels), statlog_specs());
}

inline Dataset parse_statlog(const std::string& text) {
  std::istringstream is(text);
  return parse_statlog(is);
}

// CSV with a header row. Header names matching the Statlog attribute names
// (case-insensitive) adopt those specs; otherwise kinds are inferred from the
// data (two distinct values in {0,1} -> binary, few small integers -> nominal,
// anything else -> continuous). The last column is the class label, accepted
// as {0,1} or {1,2}.
inline Dataset parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("no records");
  auto headers = detail::split_csv(line);
  if (headers.size() < 2) {
    throw ParseError("line 1: expected at least 2 columns in header");
  }
  const std::size_t ncols = headers.size();
  const std::size_t nfeat = ncols - 1;

  std::vector<std::vector<double>> rows;
  std::vector<double> raw_labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim_lower(line).empty()) continue;
    auto toks = detail::split_csv(line);
    if (toks.size() != ncols) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(ncols) + " values, got " +
                       std::to_string(toks.size()));
    }
    std::vector<double> row;
    row.reserve(nfeat);
    for (std::size_t j = 0; j < ncols; ++j) {
      double v;
      if (!detail::parse_double(detail::trim_lower(toks[j]), v)) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": invalid numeric token '" + toks[j] + "'");
      }
      if (j + 1 < ncols) {
        row.push_back(v);
      } else {
        raw_labels.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no records");

  // Label convention: {0,1} kept, {1,2} remapped.
  bool any_zero = false, any_two = false;
  for (double v : raw_labels) {
    if (v == 0.0) any_zero = true;
    else if (v == 2.0) any_two = true;
    else if (v != 1.0) {
      throw std::domain_error("class labels must be in {0,1} or {1,2}");
    }
  }
  if (any_zero && any_two) {
    throw std::domain_error("class labels mix the {0,1} and {1,2} conventions");
  }
  std::vector<int> labels;
  labels.reserve(raw_labels.size());
  for (double v : raw_labels) {
    labels.push_back(any_two ? static_cast<int>(v) - 1 : static_cast<int>(v));
  }

  // Header match against the Statlog names?
  std::vector<FeatureSpec> specs;
  if (nfeat == statlog_specs().size()) {
    bool all_match = true;
    for (std::size_t j = 0; j < nfeat; ++j) {
      if (detail::trim_lower(headers[j]) !=
          detail::trim_lower(statlog_specs()[j].name)) {
        all_match = false;
        break;
      }
    }
    if (all_match) specs = statlog_specs();
  }
  if (specs.empty()) {
    for (std::size_t j = 0; j < nfeat; ++j) {
      std::vector<double> distinct;
      for (const auto& r : rows) {
        if (std::find(distinct.begin(), distinct.end(), r[j]) ==
            distinct.end()) {
          distinct.push_back(r[j]);
        }
        if (distinct.size() > 5) break;
      }
      FeatureKind kind = FeatureKind::continuous;
      auto integral = [](double v) { return v == std::floor(v); };
      if (distinct.size() <= 2 &&
          std::all_of(distinct.begin(), distinct.end(),
                      [](double v) { return v == 0.0 || v == 1.0; })) {
        kind = FeatureKind::binary;
      } else if (distinct.size() <= 5 &&
                 std::all_of(distinct.begin(), distinct.end(), integral)) {
        kind = FeatureKind::nominal;
      }
      std::string name = detail::trim_lower(headers[j]);
      if (name.empty()) name = "f" + std::to_string(j);
      specs.push_back({name, kind, j});
    }
  }
  return Dataset::from_rows(rows, std::move(labels), std::move(specs));
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset file: " + path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    return parse_csv(in);
  }
  return parse_statlog(in);
}

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

struct SplitPlan {
  enum class Kind { holdout, kfold };
  Kind kind = Kind::kfold;
  double fraction = 0.75;
  int k = 10;
  bool stratified = true;
  std::uint64_t seed = 0;

  static SplitPlan holdout(double fraction, std::uint64_t seed,
                           bool stratified = true) {
    SplitPlan p;
    p.kind = Kind::holdout;
    p.fraction = fraction;
    p.stratified = stratified;
    p.seed = seed;
    return p;
  }

  static SplitPlan kfold(int k, std::uint64_t seed, bool stratified = true) {
    SplitPlan p;
    p.kind = Kind::kfold;
    p.k = k;
    p.stratified = stratified;
    p.seed = seed;
    return p;
  }
};

namespace detail {

// Per-class record index lists, in record order.
inline std::vector<std::vector<std::size_t>> class_index_lists(
    const std::vector<int>& y) {
  std::vector<std::vector<std::size_t>> lists(2);
  for (std::size_t i = 0; i < y.size(); ++i) {
    lists[static_cast<std::size_t>(y[i])].push_back(i);
  }
  return lists;
}

}  // namespace detail

// Seeded holdout split. Train size is exactly floor(fraction * m). When
// stratified, per-class train counts are apportioned by largest remainder so
// class proportions stay within one record of the global ones. Partitions
// come back in original record order.
inline std::pair<Dataset, Dataset> holdout_split(const Dataset& ds,
                                                 double fraction,
                                                 std::uint64_t seed,
                                                 bool stratified = true) {
  const std::size_t m = ds.m();
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("holdout fraction must be in (0,1)");
  }
  if (m < 2) throw std::invalid_argument("holdout needs at least 2 records");
  const std::size_t train_m =
      static_cast<std::size_t>(std::floor(fraction * static_cast<double>(m)));
  if (train_m == 0 || train_m == m) {
    throw std::invalid_argument("holdout fraction yields an empty partition");
  }

  std::vector<std::size_t> train_idx;
  if (!stratified) {
    Rng rng(derive_seed(seed, 0x401dC0d3ULL));
    auto perm = rng.permutation(m);
    train_idx.assign(perm.begin(), perm.begin() + train_m);
  } else {
    auto lists = detail::class_index_lists(ds.raw_labels());
    // Largest-remainder apportionment of train_m across classes.
    std::vector<std::size_t> take(lists.size(), 0);
    std::vector<std::pair<double, std::size_t>> frac;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < lists.size(); ++c) {
      double target = fraction * static_cast<double>(lists[c].size());
      take[c] = static_cast<std::size_t>(std::floor(target));
      assigned += take[c];
      frac.push_back({target - std::floor(target), c});
    }
    std::sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (std::size_t r = 0; assigned < train_m && r < frac.size(); ++r) {
      std::size_t c = frac[r].second;
      if (take[c] < lists[c].size()) {
        ++take[c];
        ++assigned;
      }
    }
    for (std::size_t c = 0; c < lists.size(); ++c) {
      Rng rng(derive_seed(seed, 0x401dC0d3ULL, c));
      rng.shuffle(lists[c]);
      train_idx.insert(train_idx.end(), lists[c].begin(),
                       lists[c].begin() + take[c]);
    }
  }

  std::sort(train_idx.begin(), train_idx.end());
  std::vector<std::uint8_t> in_train(m, 0);
  for (auto i : train_idx) in_train[i] = 1;
  std::vector<std::size_t> test_idx;
  test_idx.reserve(m - train_idx.size());
  for (std::size_t i = 0; i < m; ++i) {
    if (!in_train[i]) test_idx.push_back(i);
  }
  return {ds.subset(train_idx), ds.subset(test_idx)};
}

// Test-fold assignment for k-fold splitting: fold f's record indices, each
// sorted ascending. Every record lands in exactly one fold and fold sizes
// differ by at most one. Stratification assigns each class round-robin,
// continuing at the fold where the previous class stopped, which also keeps
// per-fold class counts within one of proportional.
inline std::vector<std::vector<std::size_t>> kfold_test_indices(
    std::span<const int> y, int k, bool stratified, std::uint64_t seed) {
  const std::size_t m = y.size();
  if (k < 2 || static_cast<std::size_t>(k) > m) {
    throw std::invalid_argument("kfold requires 2 <= k <= m");
  }
  const std::size_t kk = static_cast<std::size_t>(k);
  std::vector<std::vector<std::size_t>> fold_of(kk);

  if (!stratified) {
    Rng rng(derive_seed(seed, 0xF01d5ULL));
    auto perm = rng.permutation(m);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < kk; ++f) {
      std::size_t size = m / kk + (f < m % kk ? 1 : 0);
      for (std::size_t j = 0; j < size; ++j) fold_of[f].push_back(perm[pos++]);
    }
  } else {
    std::vector<std::vector<std::size_t>> lists(2);
    for (std::size_t i = 0; i < m; ++i) {
      lists[static_cast<std::size_t>(y[i])].push_back(i);
    }
    std::size_t cursor = 0;
    for (std::size_t c = 0; c < lists.size(); ++c) {
      Rng rng(derive_seed(seed, 0xF01d5ULL, c));
      rng.shuffle(lists[c]);
      for (std::size_t j = 0; j < lists[c].size(); ++j) {
        fold_of[(cursor + j) % kk].push_back(lists[c][j]);
      }
      cursor = (cursor + lists[c].size()) % kk;
    }
  }
  for (auto& fold : fold_of) std::sort(fold.begin(), fold.end());
  return fold_of;
}

inline std::vector<std::pair<Dataset, Dataset>> kfold_split(
    const Dataset& ds, int k, bool stratified, std::uint64_t seed) {
  const std::size_t m = ds.m();
  auto fold_of = kfold_test_indices(
      {ds.raw_labels().data(), ds.raw_labels().size()}, k, stratified, seed);
  std::vector<std::pair<Dataset, Dataset>> out;
  out.reserve(fold_of.size());
  for (const auto& test_idx : fold_of) {
    std::vector<std::uint8_t> in_test(m, 0);
    for (auto i : test_idx) in_test[i] = 1;
    std::vector<std::size_t> train_idx;
    train_idx.reserve(m - test_idx.size());
    for (std::size_t i = 0; i < m; ++i) {
      if (!in_test[i]) train_idx.push_back(i);
    }
    out.emplace_back(ds.subset(train_idx), ds.subset(test_idx));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

// Per-column mean/std fitted on a training partition. Only continuous
// columns are standardized; binary/ordinal/nominal columns pass through.
struct Scaler {
  std::vector<double> means;
  std::vector<double> stds;             // population std, >= 0
  std::vector<std::uint8_t> standardize;  // 1 where the column is transformed
};

inline Scaler fit_scaler(const Dataset& train) {
  const std::size_t m = train.m(), n = train.n();
  Scaler s;
  s.means.assign(n, 0.0);
  s.stds.assign(n, 1.0);
  s.standardize.assign(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    if (train.specs()[j].kind != FeatureKind::continuous) continue;
    s.standardize[j] = 1;
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += train.at(i, j);
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double d = train.at(i, j) - mean;
      var += d * d;
    }
    var /= static_cast<double>(m);
    s.means[j] = mean;
    s.stds[j] = std::sqrt(var);
  }
  return s;
}

// Applies (x - mean)/std to continuous columns; zero-variance columns map
// to 0. Never changes m, n, labels, or specs.
inline Dataset apply_scaler(const Scaler& s, const Dataset& ds) {
  const std::size_t m = ds.m(), n = ds.n();
  if (s.means.size() != n) {
    throw std::invalid_argument("scaler dimension mismatch");
  }
  std::vector<double> x = ds.x_;
  for (std::size_t j = 0; j < n; ++j) {
    if (!s.standardize[j]) continue;
    for (std::size_t i = 0; i < m; ++i) {
      double& v = x[i * n + j];
      v = s.stds[j] > 0.0 ? (v - s.means[j]) / s.stds[j] : 0.0;
    }
  }
  return Dataset(std::move(x), ds.y_, ds.specs_, m, n);
}

// Keeps only masked columns, in original relative order; labels unchanged.
inline Dataset apply_mask(const Dataset& ds, const FeatureMask& mask) {
  if (mask.size() != ds.n()) {
    throw std::invalid_argument("mask length != feature count");
  }
  if (!mask.any()) throw std::invalid_argument("all-zero feature mask");
  auto keep = mask.indices();
  const std::size_t m = ds.m(), nk = keep.size();
  std::vector<double> x;
  x.reserve(m * nk);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto j : keep) x.push_back(ds.at(i, j));
  }
  std::vector<FeatureSpec> specs;
  specs.reserve(nk);
  for (std::size_t jj = 0; jj < nk; ++jj) {
    FeatureSpec sp = ds.specs()[keep[jj]];
    sp.index = jj;
    specs.push_back(std::move(sp));
  }
  return Dataset(std::move(x), ds.y_, std::move(specs), m, nk);
}

}  // namespace stackga
