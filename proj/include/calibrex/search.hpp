#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "calibrex/analysis.hpp"
#include "calibrex/benchmark.hpp"

namespace calibrex {

enum class SearchAlgorithm { regularized_evolution, local_search, random_search };

struct Objective {
  enum class Kind { accuracy, neg_ece, hcs };
  Kind kind = Kind::accuracy;
  double beta = 1.0;  // hcs only

  [[nodiscard]] double operator()(const BenchmarkEntry& e) const;
  [[nodiscard]] std::string name() const;
};

struct SearchConfig {
  SearchAlgorithm algorithm = SearchAlgorithm::regularized_evolution;
  Objective objective;
  std::size_t budget = 100;
  std::uint64_t seed = 0;
  std::size_t population_size = 20;
  std::size_t sample_size = 5;
  //! Local search only; random start when unset.
  std::optional<Architecture> start;
};

void validate(const SearchConfig& config);

struct TrajectoryPoint {
  std::size_t evaluation = 0;
  Architecture incumbent;
  double value = 0.0;
};

struct SearchResult {
  Architecture best;
  double best_value = 0.0;
  std::size_t evaluations = 0;
  bool budget_exhausted = false;
  //! One point per query: the best architecture seen so far.
  std::vector<TrajectoryPoint> trajectory;
};

//! Uniform sampling without replacement from the benchmark's domain.
SearchResult random_search(const TabularBenchmark& bench, const SearchConfig& config);

/// Aging evolution.
///
/// The population is seeded by the same sampling as random_search, so a budget
/// equal to the population size reproduces it exactly. Each later step draws
/// `sample_size` distinct members, mutates the best of them, appends the
/// child and retires the oldest member.
SearchResult regularized_evolution(const TabularBenchmark& bench, const SearchConfig& config);

/// Best-improvement hill climbing over single-change neighbours.
///
/// Each sweep queries every in-domain neighbour of the current architecture
/// and moves to the best one only if it strictly improves. Stops at a local
/// optimum or when the budget runs out mid-sweep.
SearchResult local_search(const TabularBenchmark& bench, const SearchConfig& config);

SearchResult run_search(const TabularBenchmark& bench, const SearchConfig& config);

//! {algorithm, objective, best_arch, best_value, evaluations,
//!  budget_exhausted, trajectory[]}; values multiplied by `scale`.
std::string search_result_to_json(const SearchResult& result, const SearchConfig& config,
                                  double scale = 1.0);

}  // namespace calibrex
