#pragma once

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stackga/dataset.hpp"
#include "stackga/evaluate.hpp"
#include "stackga/parallel.hpp"
#include "stackga/random.hpp"

namespace stackga {

struct GAConfig {
  std::size_t population_size = 50;
  std::size_t generations = 100;
  double crossover_rate = 0.8;
  double mutation_rate = -1.0;  // < 0 resolves to 1/n
  std::size_t tournament_size = 3;
  std::size_t elitism = 2;
  double alpha = 0.01;  // feature-count penalty weight
  int fitness_folds = 5;
  std::uint64_t seed = 0;

  void validate() const {
    if (population_size < 2) {
      throw std::invalid_argument("ga: population_size must be >= 2");
    }
    if (generations < 1) {
      throw std::invalid_argument("ga: generations must be >= 1");
    }
    if (crossover_rate < 0.0 || crossover_rate > 1.0) {
      throw std::invalid_argument("ga: crossover_rate must be in [0,1]");
    }
    if (mutation_rate > 1.0) {
      throw std::invalid_argument("ga: mutation_rate must be in [0,1]");
    }
    if (tournament_size < 1 || tournament_size > population_size) {
      throw std::invalid_argument(
          "ga: tournament_size must be in [1, population_size]");
    }
    if (elitism >= population_size) {
      throw std::invalid_argument("ga: elitism must be < population_size");
    }
    if (alpha < 0.0) throw std::invalid_argument("ga: alpha must be >= 0");
    if (fitness_folds < 2) {
      throw std::invalid_argument("ga: fitness_folds must be >= 2");
    }
  }

  nlohmann::json to_json() const {
    return nlohmann::json{{"population_size", population_size},
                          {"generations", generations},
                          {"crossover_rate", crossover_rate},
                          {"mutation_rate", mutation_rate},
                          {"tournament_size", tournament_size},
                          {"elitism", elitism},
                          {"alpha", alpha},
                          {"fitness_folds", fitness_folds},
                          {"seed", seed}};
  }

  static GAConfig from_json(const nlohmann::json& j) {
    GAConfig c;
    if (j.contains("population_size")) j.at("population_size").get_to(c.population_size);
    if (j.contains("generations")) j.at("generations").get_to(c.generations);
    if (j.contains("crossover_rate")) j.at("crossover_rate").get_to(c.crossover_rate);
    if (j.contains("mutation_rate")) j.at("mutation_rate").get_to(c.mutation_rate);
    if (j.contains("tournament_size")) j.at("tournament_size").get_to(c.tournament_size);
    if (j.contains("elitism")) j.at("elitism").get_to(c.elitism);
    if (j.contains("alpha")) j.at("alpha").get_to(c.alpha);
    if (j.contains("fitness_folds")) j.at("fitness_folds").get_to(c.fitness_folds);
    if (j.contains("seed")) j.at("seed").get_to(c.seed);
    c.validate();
    return c;
  }
};

struct GAResult {
  FeatureMask best_mask;
  double best_fitness = 0.0;
  std::vector<std::pair<double, double>> history;  // (best, mean) per gen
  std::size_t evaluations = 0;  // distinct fitness computations
  std::vector<double> selection_frequency;  // over the final population
  bool fitness_flagged = false;  // a fold failed training somewhere

  nlohmann::json to_json() const {
    std::vector<std::vector<double>> hist;
    hist.reserve(history.size());
    for (const auto& [best, mean] : history) hist.push_back({best, mean});
    return nlohmann::json{{"best_mask", best_mask.indices()},
                          {"best_fitness", best_fitness},
                          {"history", hist},
                          {"evaluations", evaluations},
                          {"selection_frequency", selection_frequency},
                          {"fitness_flagged", fitness_flagged}};
  }
};

// Wrapper fitness: mean stratified k-fold accuracy of the learner on the
// masked training data, minus alpha * (selected/total). A fold whose training
// fails contributes accuracy 0 and sets *flagged. Matches evaluate() on the
// same plan exactly when alpha = 0 and no fold fails.
inline double fitness(const FeatureMask& mask, const ClassifierSpec& learner,
                      const Dataset& train, int folds, std::uint64_t seed,
                      double alpha = 0.0, bool* flagged = nullptr) {
  if (folds < 2) throw std::invalid_argument("fitness: folds must be >= 2");
  Dataset masked = apply_mask(train, mask);
  auto splits = kfold_split(masked, folds, /*stratified=*/true, seed);
  std::vector<MetricReport> reports;
  reports.reserve(splits.size());
  for (const auto& [tr, te] : splits) {
    try {
      reports.push_back(evaluate_fold(tr, te, [&](const Dataset& t) {
        return fit(learner, t);
      }));
    } catch (const TrainingError&) {
      MetricReport zero;
      zero.values[0] = 0.0;
      reports.push_back(zero);
      if (flagged) *flagged = true;
    }
  }
  double acc = *average_reports(reports).values[0];
  return acc - alpha * (static_cast<double>(mask.count()) /
                        static_cast<double>(mask.size()));
}

// Mask-level fitness callback; *flagged reports training failures.
using MaskFitness = std::function<double(const FeatureMask&, bool* flagged)>;

namespace detail {

// Fitness-desc, then fewer features, then lexicographically smaller mask.
struct ScoredMask {
  FeatureMask mask;
  double fitness = 0.0;
  std::size_t bit_count = 0;
};

inline bool better(const ScoredMask& a, const ScoredMask& b) {
  if (a.fitness != b.fitness) return a.fitness > b.fitness;
  if (a.bit_count != b.bit_count) return a.bit_count < b.bit_count;
  return a.mask.bits < b.mask.bits;
}

}  // namespace detail

// Generational GA over feature masks: seeded Bernoulli(0.5) initialization
// with all-zero repair, tournament selection, uniform crossover, per-bit
// mutation, elitism. Individual i of generation g draws from a stream keyed
// (seed, g, i), so concurrent fitness evaluation cannot change the outcome.
inline GAResult evolve_masks(const GAConfig& config, std::size_t n,
                             const MaskFitness& fitness_fn) {
  config.validate();
  if (n < 1) throw std::invalid_argument("evolve: need at least one feature");
  const double mut =
      config.mutation_rate < 0.0 ? 1.0 / static_cast<double>(n)
                                 : config.mutation_rate;

  GAResult result;
  std::unordered_map<std::string, std::pair<double, bool>> cache;

  auto repair = [&](FeatureMask& mask, Rng& rng) {
    if (!mask.any()) mask.bits[rng.below(n)] = 1;
  };

  // Evaluate a population, memoized; uncached masks run (possibly
  // concurrently) and land in the cache in index order.
  auto evaluate_all = [&](const std::vector<FeatureMask>& pop)
      -> std::vector<detail::ScoredMask> {
    std::vector<std::string> keys(pop.size());
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      keys[i] = pop[i].key();
      if (cache.find(keys[i]) == cache.end()) {
        bool fresh = true;
        for (auto j : missing) {
          if (keys[j] == keys[i]) {
            fresh = false;
            break;
          }
        }
        if (fresh) missing.push_back(i);
      }
    }
    std::vector<std::pair<double, bool>> computed(missing.size());
    parallel_for(missing.size(), [&](std::size_t t) {
      bool flag = false;
      double f = fitness_fn(pop[missing[t]], &flag);
      computed[t] = {f, flag};
    });
    for (std::size_t t = 0; t < missing.size(); ++t) {
      cache.emplace(keys[missing[t]], computed[t]);
      ++result.evaluations;
    }
    std::vector<detail::ScoredMask> scored(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const auto& [f, flag] = cache.at(keys[i]);
      scored[i] = {pop[i], f, pop[i].count()};
      if (flag) result.fitness_flagged = true;
    }
    return scored;
  };

  // Generation 0: random initialization.
  std::vector<FeatureMask> population(config.population_size);
  for (std::size_t i = 0; i < config.population_size; ++i) {
    Rng rng(derive_seed(config.seed, 0, i));
    FeatureMask mask(n);
    for (auto& b : mask.bits) b = rng.bernoulli(0.5) ? 1 : 0;
    repair(mask, rng);
    population[i] = std::move(mask);
  }

  std::vector<detail::ScoredMask> scored = evaluate_all(population);
  detail::ScoredMask best_ever = scored.front();
  auto record_generation = [&](const std::vector<detail::ScoredMask>& gen) {
    double best = gen.front().fitness, sum = 0.0;
    for (const auto& s : gen) {
      if (detail::better(s, best_ever)) best_ever = s;
      best = std::max(best, s.fitness);
      sum += s.fitness;
    }
    result.history.push_back({best, sum / static_cast<double>(gen.size())});
  };
  record_generation(scored);

  for (std::size_t g = 1; g <= config.generations; ++g) {
    std::vector<detail::ScoredMask> by_rank = scored;
    std::sort(by_rank.begin(), by_rank.end(), detail::better);

    std::vector<FeatureMask> next;
    next.reserve(config.population_size);
    for (std::size_t e = 0; e < config.elitism; ++e) {
      next.push_back(by_rank[e].mask);
    }
    for (std::size_t i = next.size(); i < config.population_size; ++i) {
      Rng rng(derive_seed(config.seed, g, i));
      auto tournament = [&]() -> const detail::ScoredMask& {
        std::size_t winner = rng.below(config.population_size);
        for (std::size_t t = 1; t < config.tournament_size; ++t) {
          std::size_t cand = rng.below(config.population_size);
          if (detail::better(scored[cand], scored[winner])) winner = cand;
        }
        return scored[winner];
      };
      const detail::ScoredMask& a = tournament();
      const detail::ScoredMask& b = tournament();
      FeatureMask child(n);
      if (rng.bernoulli(config.crossover_rate)) {
        for (std::size_t j = 0; j < n; ++j) {
          child.bits[j] = rng.bernoulli(0.5) ? a.mask.bits[j] : b.mask.bits[j];
        }
      } else {
        child = a.mask;
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (rng.bernoulli(mut)) child.bits[j] ^= 1;
      }
      repair(child, rng);
      next.push_back(std::move(child));
    }
    population = std::move(next);
    scored = evaluate_all(population);
    record_generation(scored);
  }

  result.best_mask = best_ever.mask;
  result.best_fitness = best_ever.fitness;
  result.selection_frequency.assign(n, 0.0);
  for (const auto& s : scored) {
    for (std::size_t j = 0; j < n; ++j) {
      result.selection_frequency[j] += s.mask.bits[j] ? 1.0 : 0.0;
    }
  }
  for (auto& f : result.selection_frequency) {
    f /= static_cast<double>(config.population_size);
  }
  return result;
}

// The exact mask fitness evolve() optimizes, exposed so callers (and
// brute-force oracles) can score masks identically. `train` is captured by
// reference and must outlive the callback.
inline MaskFitness wrapper_fitness(const GAConfig& config,
                                   const ClassifierSpec& learner,
                                   const Dataset& train) {
  const std::uint64_t fold_seed = derive_seed(config.seed, 0xCFULL);
  const int folds = config.fitness_folds;
  const double alpha = config.alpha;
  return [&train, learner, folds, fold_seed, alpha](const FeatureMask& mask,
                                                    bool* flagged) {
    return fitness(mask, learner, train, folds, fold_seed, alpha, flagged);
  };
}

// GA-wrapped feature selection for a single learner.
inline GAResult evolve(const GAConfig& config, const ClassifierSpec& learner,
                       const Dataset& train) {
  detail::require_both_classes(train, "evolve");
  return evolve_masks(config, train.n(),
                      wrapper_fitness(config, learner, train));
}

// Fraction of runs whose best mask kept each feature.
inline std::vector<double> selection_frequency(
    const std::vector<GAResult>& results) {
  if (results.empty()) {
    throw std::invalid_argument("selection_frequency: no results");
  }
  const std::size_t n = results.front().best_mask.size();
  std::vector<double> freq(n, 0.0);
  for (const auto& r : results) {
    if (r.best_mask.size() != n) {
      throw std::invalid_argument(
          "selection_frequency: results span different feature counts");
    }
    for (std::size_t j = 0; j < n; ++j) {
      freq[j] += r.best_mask.bits[j] ? 1.0 : 0.0;
    }
  }
  for (auto& f : freq) f /= static_cast<double>(results.size());
  return freq;
}

}  // namespace stackga
