#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "stackga/metrics.hpp"
#include "stackga/random.hpp"

using namespace stackga;

namespace {

// Independent oracle: every positive-negative pair counted explicitly,
// ties credited 0.5.
double pairwise_auc(const std::vector<int>& y, const std::vector<double>& s) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] != 0) continue;
      ++pairs;
      if (s[i] > s[j]) wins += 1.0;
      else if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

ConfusionMatrix cm_of(std::size_t tp, std::size_t fp, std::size_t tn,
                      std::size_t fn) {
  ConfusionMatrix c;
  c.tp = tp;
  c.fp = fp;
  c.tn = tn;
  c.fn = fn;
  return c;
}

}  // namespace

TEST_CASE("confusion tallies under the standard convention") {
  SECTION("perfect prediction") {
    std::vector<int> y = {1, 1, 0, 0};
    auto cm = confusion(y, y);
    CHECK(cm.tp == 2);
    CHECK(cm.tn == 2);
    CHECK(cm.fp == 0);
    CHECK(cm.fn == 0);
  }
  SECTION("total inversion") {
    std::vector<int> yt = {1, 0}, yp = {0, 1};
    auto cm = confusion(yt, yp);
    CHECK(cm.tp == 0);
    CHECK(cm.tn == 0);
    CHECK(cm.fp == 1);
    CHECK(cm.fn == 1);
  }
  SECTION("hand count") {
    std::vector<int> yt = {1, 1, 1, 0}, yp = {1, 0, 1, 1};
    auto cm = confusion(yt, yp);
    CHECK(cm.tp == 2);
    CHECK(cm.fn == 1);
    CHECK(cm.fp == 1);
    CHECK(cm.tn == 0);
  }
  SECTION("rejects bad input") {
    std::vector<int> a = {0, 1}, b = {0};
    CHECK_THROWS_AS(confusion(a, b), std::invalid_argument);
    std::vector<int> c = {0, 2};
    CHECK_THROWS_AS(confusion(a, c), std::invalid_argument);
    std::vector<int> empty;
    CHECK_THROWS_AS(confusion(empty, empty), std::invalid_argument);
  }
}

TEST_CASE("scalar metrics match their defining ratios") {
  SECTION("worked examples") {
    auto cm = cm_of(50, 5, 40, 5);
    CHECK(*accuracy(cm) == Catch::Approx(0.90).epsilon(1e-15));

    auto cm2 = cm_of(9, 2, 8, 1);
    CHECK(*sensitivity(cm2) == Catch::Approx(0.9).epsilon(1e-15));
    CHECK(*specificity(cm2) == Catch::Approx(0.8).epsilon(1e-15));
    CHECK(*youden(cm2) == Catch::Approx(0.7).epsilon(1e-15));
  }

  SECTION("zero denominators are undefined, not zero") {
    auto cm = cm_of(0, 0, 3, 2);
    CHECK(!ppv(cm).has_value());
    CHECK(!sensitivity(cm).has_value() == false);  // tp+fn = 2, defined
    auto cm2 = cm_of(0, 0, 0, 2);
    CHECK(!specificity(cm2).has_value());
    CHECK(!youden(cm2).has_value());
  }

  SECTION("50 random matrices against direct arithmetic") {
    Rng rng(1234);
    for (int t = 0; t < 50; ++t) {
      std::size_t tp = rng.below(30), fp = rng.below(30), tn = rng.below(30),
                  fn = rng.below(30);
      if (tp + fp + tn + fn == 0) tp = 1;
      auto cm = cm_of(tp, fp, tn, fn);
      auto dtp = static_cast<double>(tp), dfp = static_cast<double>(fp),
           dtn = static_cast<double>(tn), dfn = static_cast<double>(fn);

      REQUIRE(std::abs(*accuracy(cm) -
                       (dtp + dtn) / (dtp + dfp + dtn + dfn)) < 1e-12);
      if (tp + fn > 0) {
        REQUIRE(std::abs(*sensitivity(cm) - dtp / (dtp + dfn)) < 1e-12);
      }
      if (tn + fp > 0) {
        REQUIRE(std::abs(*specificity(cm) - dtn / (dtn + dfp)) < 1e-12);
      }
      if (tp + fp > 0) {
        REQUIRE(std::abs(*ppv(cm) - dtp / (dtp + dfp)) < 1e-12);
      }
      if (tn + fn > 0) {
        REQUIRE(std::abs(*npv(cm) - dtn / (dtn + dfn)) < 1e-12);
      }
      if (2 * tp + fp + fn > 0) {
        REQUIRE(std::abs(*f1(cm) - 2.0 * dtp / (2.0 * dtp + dfp + dfn)) <
                1e-12);
      }
      if (tp + fn > 0 && tn + fp > 0) {
        REQUIRE(std::abs(*youden(cm) -
                         (*sensitivity(cm) + *specificity(cm) - 1.0)) <
                1e-12);
      }
      // All ratio metrics in [0,1] when defined.
      for (auto v : {accuracy(cm), sensitivity(cm), specificity(cm), ppv(cm),
                     npv(cm), f1(cm)}) {
        if (v) {
          REQUIRE(*v >= 0.0);
          REQUIRE(*v <= 1.0);
        }
      }
    }
  }

  SECTION("label-swap duality") {
    Rng rng(77);
    for (int t = 0; t < 20; ++t) {
      std::vector<int> yt, yp;
      for (int i = 0; i < 40; ++i) {
        yt.push_back(rng.bernoulli(0.5) ? 1 : 0);
        yp.push_back(rng.bernoulli(0.5) ? 1 : 0);
      }
      auto cm = confusion(yt, yp);
      std::vector<int> yt2, yp2;
      for (int v : yt) yt2.push_back(1 - v);
      for (int v : yp) yp2.push_back(1 - v);
      auto cm2 = confusion(yt2, yp2);
      CHECK(*accuracy(cm) == Catch::Approx(*accuracy(cm2)).epsilon(1e-15));
      if (sensitivity(cm) && specificity(cm2)) {
        CHECK(*sensitivity(cm) ==
              Catch::Approx(*specificity(cm2)).epsilon(1e-15));
      }
      if (ppv(cm) && npv(cm2)) {
        CHECK(*ppv(cm) == Catch::Approx(*npv(cm2)).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("auc follows the Mann-Whitney formulation") {
  SECTION("perfect separation") {
    std::vector<int> y = {1, 1, 0, 0};
    std::vector<double> s = {0.9, 0.8, 0.3, 0.1};
    CHECK(*auc(y, s) == 1.0);
  }
  SECTION("all ties give 0.5") {
    std::vector<int> y = {1, 0, 1, 0, 0};
    std::vector<double> s = {0.4, 0.4, 0.4, 0.4, 0.4};
    CHECK(*auc(y, s) == 0.5);
  }
  SECTION("worked example: 3 wins of 4 pairs") {
    std::vector<int> y = {1, 0, 1, 0};
    std::vector<double> s = {0.9, 0.8, 0.4, 0.1};
    CHECK(*auc(y, s) == Catch::Approx(0.75).epsilon(1e-15));
  }
  SECTION("single-class input is undefined") {
    std::vector<int> y = {1, 1};
    std::vector<double> s = {0.2, 0.4};
    CHECK(!auc(y, s).has_value());
  }
  SECTION("oracle equivalence on 200 random small instances") {
    Rng rng(4242);
    for (int t = 0; t < 200; ++t) {
      std::size_t m = 2 + rng.below(11);  // up to 12 records
      std::vector<int> y(m);
      std::vector<double> s(m);
      bool has0 = false, has1 = false;
      for (std::size_t i = 0; i < m; ++i) {
        y[i] = rng.bernoulli(0.5) ? 1 : 0;
        (y[i] ? has1 : has0) = true;
        // Coarse grid so ties actually occur.
        s[i] = static_cast<double>(rng.below(5)) / 4.0;
      }
      if (!has0) y[0] = 0;
      if (!has1) y[m - 1] = 1;
      REQUIRE(std::abs(*auc(y, s) - pairwise_auc(y, s)) < 1e-12);
    }
  }
  SECTION("complement property without ties") {
    Rng rng(555);
    for (int t = 0; t < 50; ++t) {
      std::size_t m = 3 + rng.below(10);
      std::vector<int> y(m);
      std::vector<double> s(m);
      bool has0 = false, has1 = false;
      for (std::size_t i = 0; i < m; ++i) {
        y[i] = rng.bernoulli(0.5) ? 1 : 0;
        (y[i] ? has1 : has0) = true;
        s[i] = rng.uniform01();  // continuous, ties have measure zero
      }
      if (!has0) y[0] = 0;
      if (!has1) y[m - 1] = 1;
      std::vector<double> neg(m);
      for (std::size_t i = 0; i < m; ++i) neg[i] = -s[i];
      REQUIRE(std::abs(*auc(y, s) + *auc(y, neg) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("metric report averaging skips undefined entries") {
  MetricReport a, b, c;
  a.values[0] = 0.8;   // accuracy
  b.values[0] = 0.6;
  c.values[0] = 0.7;
  a.values[3] = 1.0;   // ppv defined in one fold only
  auto avg = average_reports({a, b, c});
  CHECK(*avg.values[0] == Catch::Approx(0.7).epsilon(1e-15));
  CHECK(*avg.values[3] == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(avg.skipped[3] == 2);
  CHECK(avg.skipped[0] == 0);
  CHECK(avg.folds == 3);
  CHECK(!avg.values[7].has_value());  // auc undefined everywhere
}

TEST_CASE("metric report serializes under the exact names") {
  ConfusionMatrix cm = cm_of(9, 2, 8, 1);
  std::vector<int> y = {1, 0};
  std::vector<double> s = {0.9, 0.1};
  auto rep = MetricReport::from_counts(cm, auc(y, s));
  auto j = rep.to_json();
  CHECK(j.at("accuracy").get<double>() == Catch::Approx(0.85));
  CHECK(j.at("sensitivity").get<double>() == Catch::Approx(0.9));
  CHECK(j.at("specificity").get<double>() == Catch::Approx(0.8));
  CHECK(j.at("youden").get<double>() == Catch::Approx(0.7));
  CHECK(j.at("auc").get<double>() == 1.0);
  for (auto name : {"accuracy", "sensitivity", "specificity", "ppv", "npv",
                    "f1", "youden", "auc"}) {
    CHECK(j.contains(name));
  }
}
