#include "calibrex/search.hpp"

#include <deque>
#include <json.hpp>
#include <unordered_map>

#include "calibrex/error.hpp"

namespace calibrex {

double Objective::operator()(const BenchmarkEntry& e) const {
  switch (kind) {
    case Kind::accuracy: return e.accuracy;
    case Kind::neg_ece: return -e.ece;
    case Kind::hcs: return hcs(e.accuracy, e.ece, {beta});
  }
  return 0.0;
}

std::string Objective::name() const {
  switch (kind) {
    case Kind::accuracy: return "acc";
    case Kind::neg_ece: return "ece";
    case Kind::hcs: return "hcs";
  }
  return "?";
}

void validate(const SearchConfig& config) {
  if (config.budget < 1) throw Error(Errc::invalid_argument, "search budget must be at least 1");
  if (config.objective.kind == Objective::Kind::hcs && !(config.objective.beta > 0.0)) {
    throw Error(Errc::invalid_argument, "HCS beta must be positive");
  }
  if (config.algorithm == SearchAlgorithm::regularized_evolution) {
    if (config.population_size < 1 || config.sample_size < 1) {
      throw Error(Errc::invalid_argument, "population and sample sizes must be positive");
    }
    if (config.sample_size > config.population_size) {
      throw Error(Errc::invalid_argument, "sample size exceeds population size");
    }
    if (config.population_size > config.budget) {
      throw Error(Errc::invalid_argument, "population size exceeds the budget");
    }
  }
}

namespace {

// Answers benchmark queries, memoizing values while charging every query to
// the budget, and records the incumbent after each one.
class Evaluator {
 public:
  Evaluator(const TabularBenchmark& bench, const SearchConfig& config)
      : bench_(bench), objective_(config.objective), budget_(config.budget) {}

  [[nodiscard]] bool exhausted() const { return result_.evaluations >= budget_; }

  double query(std::size_t position) {
    if (exhausted()) throw Error(Errc::exhausted, "search budget exhausted");
    auto it = memo_.find(position);
    if (it == memo_.end()) it = memo_.emplace(position, objective_(bench_.entry(position))).first;
    const double value = it->second;
    ++result_.evaluations;
    if (result_.evaluations == 1 || value > result_.best_value) {
      result_.best = bench_.arch(position);
      result_.best_value = value;
    }
    result_.trajectory.push_back({result_.evaluations, result_.best, result_.best_value});
    return value;
  }

  SearchResult finish(bool exhausted_early) {
    result_.budget_exhausted = exhausted_early;
    return std::move(result_);
  }

 private:
  const TabularBenchmark& bench_;
  Objective objective_;
  std::size_t budget_;
  std::unordered_map<std::size_t, double> memo_;
  SearchResult result_;
};

// Draws `count` distinct domain positions; shared by random search and the
// evolution seed population.
std::vector<std::size_t> sample_positions(std::size_t domain, std::size_t count, Rng& rng) {
  if (count > domain) {
    throw Error(Errc::exhausted, "budget " + std::to_string(count) + " exceeds the " +
                                     std::to_string(domain) + " architectures in the benchmark");
  }
  std::vector<std::size_t> order(domain);
  for (std::size_t i = 0; i < domain; ++i) order[i] = i;
  for (std::size_t i = 0; i < count; ++i) std::swap(order[i], order[i + uniform_index(rng, domain - i)]);
  order.resize(count);
  return order;
}

std::vector<std::size_t> domain_neighbors(const TabularBenchmark& bench, std::size_t position) {
  std::vector<std::size_t> out;
  for (const auto& n : neighbors(bench.arch(position))) {
    if (auto p = bench.find(n)) out.push_back(*p);
  }
  return out;
}

std::size_t mutate_in_domain(const TabularBenchmark& bench, std::size_t position, Rng& rng) {
  if (bench.is_complete()) return *bench.find(mutate(bench.arch(position), rng));
  const auto options = domain_neighbors(bench, position);
  if (options.empty()) return position;
  return options[uniform_index(rng, options.size())];
}

}  // namespace

SearchResult random_search(const TabularBenchmark& bench, const SearchConfig& config) {
  validate(config);
  Rng rng(config.seed);
  Evaluator eval(bench, config);
  for (std::size_t p : sample_positions(bench.size(), config.budget, rng)) eval.query(p);
  return eval.finish(false);
}

SearchResult regularized_evolution(const TabularBenchmark& bench, const SearchConfig& config) {
  validate(config);
  Rng rng(config.seed);
  Evaluator eval(bench, config);
  std::deque<std::pair<std::size_t, double>> population;
  for (std::size_t p : sample_positions(bench.size(), config.population_size, rng)) {
    population.emplace_back(p, eval.query(p));
  }
  std::vector<std::size_t> slots(population.size());
  while (!eval.exhausted()) {
    for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
    std::size_t parent = 0;
    bool first = true;
    for (std::size_t i = 0; i < config.sample_size; ++i) {
      std::swap(slots[i], slots[i + uniform_index(rng, slots.size() - i)]);
      const auto& cand = population[slots[i]];
      if (first || cand.second > population[parent].second) parent = slots[i];
      first = false;
    }
    const std::size_t child = mutate_in_domain(bench, population[parent].first, rng);
    population.emplace_back(child, eval.query(child));
    population.pop_front();
  }
  return eval.finish(false);
}

SearchResult local_search(const TabularBenchmark& bench, const SearchConfig& config) {
  validate(config);
  Rng rng(config.seed);
  Evaluator eval(bench, config);
  std::size_t current = 0;
  if (config.start) {
    const auto p = bench.find(*config.start);
    if (!p) throw Error(Errc::invalid_argument, "start architecture not in benchmark");
    current = *p;
  } else {
    current = uniform_index(rng, bench.size());
  }
  double current_value = eval.query(current);
  while (true) {
    std::optional<std::size_t> best;
    double best_value = current_value;
    for (std::size_t n : domain_neighbors(bench, current)) {
      if (eval.exhausted()) return eval.finish(true);
      const double v = eval.query(n);
      if (v > best_value) {
        best = n;
        best_value = v;
      }
    }
    if (!best) return eval.finish(false);
    current = *best;
    current_value = best_value;
  }
}

SearchResult run_search(const TabularBenchmark& bench, const SearchConfig& config) {
  switch (config.algorithm) {
    case SearchAlgorithm::regularized_evolution: return regularized_evolution(bench, config);
    case SearchAlgorithm::local_search: return local_search(bench, config);
    case SearchAlgorithm::random_search: return random_search(bench, config);
  }
  throw Error(Errc::invalid_argument, "unknown search algorithm");
}

std::string search_result_to_json(const SearchResult& result, const SearchConfig& config, double scale) {
  using ojson = nlohmann::ordered_json;
  static const char* names[] = {"re", "ls", "rs"};
  ojson j;
  j["algorithm"] = names[static_cast<int>(config.algorithm)];
  j["objective"] = config.objective.name();
  if (config.objective.kind == Objective::Kind::hcs) j["beta"] = config.objective.beta;
  j["seed"] = config.seed;
  j["budget"] = config.budget;
  j["best_arch"] = to_string(result.best);
  j["best_value"] = result.best_value * scale;
  j["evaluations"] = result.evaluations;
  j["budget_exhausted"] = result.budget_exhausted;
  ojson traj = ojson::array();
  for (const auto& t : result.trajectory) {
    traj.push_back(ojson{{"evaluation", t.evaluation}, {"arch", to_string(t.incumbent)}, {"value", t.value * scale}});
  }
  j["trajectory"] = std::move(traj);
  return j.dump(2) + "\n";
}

}  // namespace calibrex
