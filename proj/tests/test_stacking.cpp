#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "stackga/stacking.hpp"

using namespace stackga;

namespace {

Dataset blobs(std::size_t per_class, std::size_t dim, double sep,
              std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    int y = i < per_class ? 0 : 1;
    std::vector<double> row(dim);
    for (auto& v : row) {
      v = rng.uniform(-1.0, 1.0) + rng.uniform(-1.0, 1.0) + y * sep;
    }
    rows.push_back(row);
    labels.push_back(y);
  }
  return Dataset::from_rows(rows, labels);
}

// Distinct rows, labels pure coin flips: nothing generalizes.
Dataset noise_labels(std::size_t m, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> row(dim);
    for (auto& v : row) v = rng.uniform(0.0, 1.0);
    rows.push_back(row);
    labels.push_back(rng.bernoulli(0.5) ? 1 : 0);
  }
  // Both classes must exist.
  labels[0] = 0;
  labels[1] = 1;
  return Dataset::from_rows(rows, labels);
}

StackSpec fast_stack(std::uint64_t seed) {
  StackSpec s;
  s.first_level = {ClassifierSpec::make(Family::knn, seed),
                   ClassifierSpec::make(Family::naive_bayes, seed),
                   ClassifierSpec::make(Family::cart, seed)};
  s.meta_learner =
      ClassifierSpec::make(Family::logistic_regression, seed).set("epochs", 400);
  return s;
}

double column_accuracy(const Dataset& meta, std::size_t t) {
  auto y = meta.labels();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < meta.m(); ++i) {
    int pred = meta.at(i, t) >= 0.5 ? 1 : 0;
    if (pred == y[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(meta.m());
}

// Meta-model that passes through column 0, for projection tests.
class ProjectionModel final : public Model {
 public:
  explicit ProjectionModel(std::size_t t)
      : Model(ClassifierSpec::make(Family::knn), t) {}

 private:
  double do_score(std::span<const double> x) const override { return x[0]; }
};

}  // namespace

TEST_CASE("meta dataset has dimensions m x T in both modes") {
  Dataset ds = blobs(20, 3, 2.0, 3);
  for (auto mode :
       {StackSpec::MetaMode::resubstitution, StackSpec::MetaMode::out_of_fold}) {
    StackSpec spec = fast_stack(1);
    spec.meta_mode = mode;
    auto [models, meta] = build_meta(spec, ds);
    REQUIRE(models.size() == 3);
    CHECK(meta.m() == ds.m());
    CHECK(meta.t_learners() == 3);
  }
}

TEST_CASE("a memorizing learner's resubstitution column equals y") {
  Dataset ds = noise_labels(40, 2, 5);
  StackSpec spec;
  spec.first_level = {ClassifierSpec::make(Family::knn).set("k", 1)};
  spec.meta_learner = ClassifierSpec::make(Family::logistic_regression);
  spec.meta_mode = StackSpec::MetaMode::resubstitution;
  auto [models, meta] = build_meta(spec, ds);
  auto y = ds.labels();
  for (std::size_t i = 0; i < ds.m(); ++i) {
    CHECK(meta.data.at(i, 0) == static_cast<double>(y[i]));
  }
}

TEST_CASE("out-of-fold mode eliminates the resubstitution leak") {
  // Random labels: a 1-NN base memorizes, so its resubstitution column is
  // perfect while its out-of-fold column is roughly chance.
  Dataset ds = noise_labels(60, 2, 7);
  StackSpec spec;
  spec.first_level = {ClassifierSpec::make(Family::knn).set("k", 1)};
  spec.meta_learner = ClassifierSpec::make(Family::logistic_regression);

  spec.meta_mode = StackSpec::MetaMode::resubstitution;
  auto [m1, resub] = build_meta(spec, ds);
  spec.meta_mode = StackSpec::MetaMode::out_of_fold;
  spec.oof_folds = 5;
  auto [m2, oof] = build_meta(spec, ds);

  double resub_acc = column_accuracy(resub.data, 0);
  double oof_acc = column_accuracy(oof.data, 0);
  INFO("resub=" << resub_acc << " oof=" << oof_acc);
  CHECK(resub_acc == 1.0);
  CHECK(oof_acc < 0.75);
  CHECK(resub_acc >= oof_acc);
}

TEST_CASE("composition law: predict_stack equals meta over base scores") {
  Dataset ds = blobs(25, 3, 1.5, 11);
  auto model = fit_stack(fast_stack(2), ds);
  Rng rng(13);
  for (int probe = 0; probe < 100; ++probe) {
    std::vector<double> x = {rng.uniform(-2, 4), rng.uniform(-2, 4),
                             rng.uniform(-2, 4)};
    std::vector<double> z = model->meta_row(x);
    REQUIRE(z.size() == 3);
    for (std::size_t t = 0; t < z.size(); ++t) {
      REQUIRE(z[t] == model->first_level()[t]->score(x));
    }
    double manual = model->meta_model().score(z);
    REQUIRE(model->score(x) == manual);
    REQUIRE(predict_stack(*model, x) == (manual >= 0.5 ? 1 : 0));
  }
}

TEST_CASE("projection meta-learner reduces the stack to its first learner") {
  Dataset ds = blobs(20, 2, 2.0, 17);
  StackSpec spec = fast_stack(3);
  auto [models, meta] = build_meta(spec, ds);
  std::vector<ModelPtr> level;
  for (auto& m : models) level.push_back(std::move(m));
  // Keep an independently trained copy of learner 0 for comparison.
  auto h1 = fit(spec.first_level[0], ds);
  StackedModel stacked(spec, std::move(level),
                       std::make_unique<ProjectionModel>(3), ds.n());
  Rng rng(19);
  for (int probe = 0; probe < 50; ++probe) {
    std::vector<double> x = {rng.uniform(-1, 3), rng.uniform(-1, 3)};
    CHECK(stacked.predict(x) == (h1->score(x) >= 0.5 ? 1 : 0));
  }
}

TEST_CASE("perfect first-level learners give perfect stacked training fit") {
  Dataset ds = blobs(15, 2, 6.0, 23);  // hugely separated: every base nails it
  StackSpec spec;
  spec.first_level = {ClassifierSpec::make(Family::knn).set("k", 1),
                      ClassifierSpec::make(Family::cart)};
  spec.meta_learner = ClassifierSpec::make(Family::logistic_regression);
  spec.meta_mode = StackSpec::MetaMode::resubstitution;
  auto model = fit_stack(spec, ds);
  auto y = ds.labels();
  for (std::size_t i = 0; i < ds.m(); ++i) {
    CHECK(model->predict(ds.row(i)) == y[i]);
  }
}

TEST_CASE("single-learner stack tracks its base learner") {
  Dataset heart = load_dataset(std::string(STACKGA_SOURCE_DIR) +
                               "/data/heart_synthetic.dat");
  StackSpec spec;
  spec.first_level = {ClassifierSpec::make(Family::knn, 1)};
  spec.meta_learner = ClassifierSpec::make(Family::logistic_regression, 1);
  SplitPlan plan = SplitPlan::holdout(0.75, 31);
  double stacked = *evaluate_stack(spec, heart, plan).accuracy();
  double base =
      *evaluate(ClassifierSpec::make(Family::knn, 1), heart, plan).accuracy();
  INFO("stacked=" << stacked << " base=" << base);
  CHECK(stacked >= base - 0.02);
}

TEST_CASE("stacked predictions are deterministic") {
  Dataset ds = blobs(20, 3, 1.2, 29);
  StackSpec spec = fast_stack(4);
  auto a = fit_stack(spec, ds);
  auto b = fit_stack(spec, ds);
  Rng rng(31);
  for (int probe = 0; probe < 30; ++probe) {
    std::vector<double> x = {rng.uniform(-1, 2), rng.uniform(-1, 2),
                             rng.uniform(-1, 2)};
    REQUIRE(a->score(x) == b->score(x));
  }
}

TEST_CASE("stacked_ga reaches the exhaustive maximum on a 4-feature toy") {
  Rng rng(37);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 48; ++i) {
    std::vector<double> row(4);
    for (auto& v : row) v = rng.uniform(0.0, 1.0);
    rows.push_back(row);
    labels.push_back(row[0] + row[1] > 1.0 ? 1 : 0);
  }
  Dataset ds = Dataset::from_rows(rows, labels);

  StackSpec spec = fast_stack(5);
  GAConfig cfg;
  cfg.population_size = 16;
  cfg.generations = 20;
  cfg.fitness_folds = 3;
  cfg.seed = 41;

  auto fn = stack_wrapper_fitness(cfg, spec, ds);
  double brute_best = -1.0;
  for (std::size_t bits = 1; bits < 16; ++bits) {
    FeatureMask mask(4);
    for (std::size_t j = 0; j < 4; ++j) mask.bits[j] = (bits >> j) & 1;
    brute_best = std::max(brute_best, fn(mask, nullptr));
  }
  auto [result, model] = stacked_ga(spec, cfg, ds);
  CHECK(result.best_fitness == Catch::Approx(brute_best).margin(1e-12));
  CHECK(model->n_in() == result.best_mask.count());
}

TEST_CASE("stacked_ga survives a degenerate config") {
  Dataset ds = blobs(12, 3, 1.5, 43);
  StackSpec spec = fast_stack(6);
  GAConfig cfg;
  cfg.population_size = 2;
  cfg.generations = 1;
  cfg.tournament_size = 1;
  cfg.elitism = 1;
  cfg.fitness_folds = 2;
  cfg.seed = 1;
  auto [result, model] = stacked_ga(spec, cfg, ds);
  CHECK(result.best_mask.any());
  Dataset masked = apply_mask(ds, result.best_mask);
  double s = model->score(masked.row(0));
  CHECK(s >= 0.0);
  CHECK(s <= 1.0);
}

TEST_CASE("with elitism the stacked_ga history is non-decreasing") {
  Dataset ds = blobs(15, 4, 1.0, 47);
  StackSpec spec = fast_stack(7);
  GAConfig cfg;
  cfg.population_size = 8;
  cfg.generations = 6;
  cfg.elitism = 2;
  cfg.fitness_folds = 2;
  cfg.seed = 3;
  auto [result, model] = stacked_ga(spec, cfg, ds);
  for (std::size_t g = 1; g < result.history.size(); ++g) {
    CHECK(result.history[g].first >= result.history[g - 1].first);
  }
}

TEST_CASE("stack spec json round trip") {
  StackSpec spec = fast_stack(9);
  spec.meta_mode = StackSpec::MetaMode::out_of_fold;
  spec.oof_folds = 4;
  spec.hard_labels = true;
  auto j = spec.to_json();
  CHECK(j.at("meta_mode") == "oof:4");
  StackSpec back = StackSpec::from_json(j);
  CHECK(back.first_level.size() == 3);
  CHECK(back.oof_folds == 4);
  CHECK(back.hard_labels);
  CHECK(back.meta_learner.family == Family::logistic_regression);

  spec.meta_mode = StackSpec::MetaMode::resubstitution;
  CHECK(StackSpec::from_json(spec.to_json()).meta_mode ==
        StackSpec::MetaMode::resubstitution);

  nlohmann::json bad = spec.to_json();
  bad["meta_mode"] = "sideways";
  CHECK_THROWS_AS(StackSpec::from_json(bad), std::invalid_argument);
}

TEST_CASE("hard labels threshold the meta features") {
  Dataset ds = blobs(20, 2, 1.0, 53);
  StackSpec spec = fast_stack(11);
  spec.meta_mode = StackSpec::MetaMode::resubstitution;
  spec.hard_labels = true;
  auto [models, meta] = build_meta(spec, ds);
  for (std::size_t i = 0; i < meta.m(); ++i) {
    for (std::size_t t = 0; t < meta.t_learners(); ++t) {
      double v = meta.data.at(i, t);
      CHECK((v == 0.0 || v == 1.0));
    }
  }
}

TEST_CASE("first-level training failures name the learner") {
  Dataset ds = blobs(10, 2, 2.0, 59);
  StackSpec spec;
  spec.first_level = {ClassifierSpec::make(Family::cart),
                      ClassifierSpec::make(Family::knn).set("k", 0)};
  spec.meta_learner = ClassifierSpec::make(Family::logistic_regression);
  CHECK_THROWS_WITH(
      build_meta(spec, ds),
      Catch::Matchers::ContainsSubstring("first-level learner 1"));
}
