#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "calibrex/analysis.hpp"
#include "calibrex/arch.hpp"
#include "calibrex/benchmark.hpp"
#include "calibrex/error.hpp"
#include "calibrex/fileutil.hpp"
#include "calibrex/logits_io.hpp"
#include "calibrex/search.hpp"
#include "calibrex/suite.hpp"

namespace fs = std::filesystem;
using namespace calibrex;

namespace {

void emit(const std::string& out, const std::string& contents) {
  if (out.empty() || out == "-") {
    std::cout << contents;
  } else {
    write_file_atomic(out, contents);
  }
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw Error(Errc::io, "cannot open " + path);
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::vector<std::string> logits;
  std::string format = "bin";
  std::string scores = "auto";
  std::vector<std::size_t> bins{kDefaultBinSizes.begin(), kDefaultBinSizes.end()};
  bool temperature_scale = true;
  double val_fraction = 0.2;
  bool stratified = false;
  std::uint64_t seed = 0;
  std::string ood_in;
  std::string ood_out;
  std::string out;
  std::string dataset = "unknown";
  std::string space = "tss";
  std::int64_t arch_index = 0;
  bool with_accuracy = false;
  unsigned jobs = 1;
  std::size_t kdece_grid = 1024;
  std::optional<double> kdece_bandwidth;
  double mmce_bandwidth = 0.4;
};

PredictionSet load_predictions(const std::string& path, const EvalArgs& a) {
  require_file(path);
  if (a.format == "bin") return read_logits_file(path);
  std::optional<ScoreKind> kind;
  if (a.scores == "logits") kind = ScoreKind::logits;
  if (a.scores == "probabilities") kind = ScoreKind::probabilities;
  return read_csv_predictions(path, kind);
}

int cmd_eval(const EvalArgs& a) {
  SuiteConfig base;
  std::vector<std::size_t> bins = a.bins;
  std::sort(bins.begin(), bins.end());
  bins.erase(std::unique(bins.begin(), bins.end()), bins.end());
  base.bin_sizes = bins;
  base.temperature_scale = a.temperature_scale;
  base.include_accuracy = a.with_accuracy;
  base.split.validation_fraction = a.val_fraction;
  base.split.seed = a.seed;
  base.split.stratified = a.stratified;
  base.benchmark_dataset = a.dataset;
  base.search_space = parse_search_space(a.space);
  base.kdece.grid_points = a.kdece_grid;
  base.kdece.bandwidth = a.kdece_bandwidth;
  base.mmce_kernel.bandwidth = a.mmce_bandwidth;
  for (const auto& [name, path] : {std::pair{"ood_in", a.ood_in}, std::pair{"ood_out", a.ood_out}}) {
    if (path.empty()) continue;
    base.ood_inputs.push_back({name, top_label(to_probabilities(load_predictions(path, a))).confidence});
  }
  for (const auto& path : a.logits) require_file(path);

  const std::size_t n = a.logits.size();
  std::vector<std::vector<MeasurementRecord>> results(n);
  std::vector<std::optional<Error>> failures(n);
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < n; i += step) {
      try {
        SuiteConfig config = base;
        config.arch_index = a.arch_index + static_cast<std::int64_t>(i);
        const PredictionSet preds = load_predictions(a.logits[i], a);
        if (config.temperature_scale && preds.is_probabilities()) {
          throw Error(Errc::invalid_argument,
                      a.logits[i] + " holds probabilities; pass --no-temperature-scale");
        }
        results[i] = run_suite(preds, config);
      } catch (const Error& e) {
        failures[i] = e;
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(a.jobs, 1, n);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(work, t, jobs);
  work(0, jobs);
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) throw *f;
  }

  std::vector<MeasurementRecord> all;
  for (auto& r : results) all.insert(all.end(), r.begin(), r.end());
  write_records(all, a.out);
  std::cout << all.size() << " records written\n";
  return 0;
}

// ---------------------------------------------------------------- correlate

struct CorrelateArgs {
  std::string table;
  std::vector<std::string> columns;
  std::optional<std::size_t> top_k;
  std::string by;
  std::string out;
};

MetricTable load_table(const std::string& path) {
  require_file(path);
  if (fs::path(path).extension() == ".jsonl") return records_to_table(read_records(path));
  return read_table_csv(path);
}

int cmd_correlate(const CorrelateArgs& a) {
  MetricTable table = load_table(a.table);
  if (a.top_k) {
    if (a.by.empty()) throw Error(Errc::invalid_argument, "--top-k needs --by COLUMN");
    table = top_k_by(table, a.by, *a.top_k);
  }
  const std::vector<std::string> columns = a.columns.empty() ? table.names() : a.columns;
  emit(a.out, format_correlation_csv(correlation_matrix(table, columns)));
  return 0;
}

// ---------------------------------------------------------------- search

struct SearchArgs {
  std::string benchmark = "synthetic";
  std::string index;
  std::string space = "tss";
  std::string algo = "re";
  std::string objective = "acc";
  double beta = 1.0;
  std::size_t budget = 100;
  std::uint64_t seed = 0;
  std::uint64_t bench_seed = 0;
  std::size_t population = 20;
  std::size_t sample = 5;
  std::string start;
  std::string dataset;
  std::int64_t ece_bins = 15;
  bool percent = false;
  std::string out;
};

TabularBenchmark make_benchmark(const SearchArgs& a) {
  const SearchSpace space = parse_search_space(a.space);
  if (a.benchmark == "synthetic") return synth_benchmark({space, std::nullopt, false}, a.bench_seed);
  const std::string planted_prefix = "planted:";
  if (a.benchmark.rfind(planted_prefix, 0) == 0) {
    const Architecture planted = parse_arch(a.benchmark.substr(planted_prefix.size()));
    const SearchSpace planted_space =
        std::holds_alternative<TssArch>(planted) ? SearchSpace::tss : SearchSpace::sss;
    return synth_benchmark({planted_space, planted, false}, a.bench_seed);
  }
  if (a.index.empty()) throw Error(Errc::invalid_argument, "--benchmark PATH needs --index PATH");
  require_file(a.benchmark);
  require_file(a.index);
  BenchmarkLoadOptions options;
  if (!a.dataset.empty()) options.dataset = a.dataset;
  options.ece_bins = a.ece_bins;
  return load_benchmark(a.benchmark, a.index, options);
}

int cmd_search(const SearchArgs& a) {
  SearchConfig config;
  static const std::map<std::string, SearchAlgorithm> algos = {
      {"re", SearchAlgorithm::regularized_evolution},
      {"ls", SearchAlgorithm::local_search},
      {"rs", SearchAlgorithm::random_search}};
  static const std::map<std::string, Objective::Kind> objectives = {
      {"acc", Objective::Kind::accuracy}, {"ece", Objective::Kind::neg_ece}, {"hcs", Objective::Kind::hcs}};
  config.algorithm = algos.at(a.algo);
  config.objective = {objectives.at(a.objective), a.beta};
  config.budget = a.budget;
  config.seed = a.seed;
  config.population_size = a.population;
  config.sample_size = a.sample;
  if (!a.start.empty()) config.start = parse_arch(a.start);
  validate(config);
  const TabularBenchmark bench = make_benchmark(a);
  emit(a.out, search_result_to_json(run_search(bench, config), config, a.percent ? 100.0 : 1.0));
  return 0;
}

// ---------------------------------------------------------------- enumerate

struct EnumerateArgs {
  std::string space = "tss";
  bool dedupe = false;
  std::string out;
};

int cmd_enumerate(const EnumerateArgs& a) {
  std::string text;
  if (parse_search_space(a.space) == SearchSpace::sss) {
    for (const auto& arch : enumerate_sss()) text += to_string(arch) + '\n';
  } else {
    std::set<std::string> seen;
    for (const auto& arch : enumerate_tss()) {
      if (a.dedupe && !seen.insert(canonical_fingerprint(arch)).second) continue;
      text += to_string(arch) + '\n';
    }
  }
  emit(a.out, text);
  return 0;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::string records;
  std::string group_by = "bin_count";
  std::string stat = "boxplot";
  std::vector<std::string> metrics;
  std::string stage;
  std::string index;
  std::vector<double> brackets;
  bool percent = false;
  std::string out;
};

int cmd_report(const ReportArgs& a) {
  require_file(a.records);
  std::vector<MeasurementRecord> records;
  for (auto& r : read_records(a.records)) {
    if (!a.metrics.empty() && std::find(a.metrics.begin(), a.metrics.end(), r.metric) == a.metrics.end()) continue;
    if (!a.stage.empty() && to_string(r.stage) != a.stage) continue;
    records.push_back(std::move(r));
  }
  if (records.empty()) throw Error(Errc::invalid_argument, "no records in " + a.records);

  std::vector<GroupStats> groups;
  if (a.group_by == "bin_count") {
    std::map<std::int64_t, std::vector<double>> binned;
    std::vector<double> unbinned;
    for (const auto& r : records) (r.bin_count ? binned[*r.bin_count] : unbinned).push_back(r.value);
    for (const auto& [m, values] : binned) groups.push_back({std::to_string(m), boxplot_stats(values)});
    if (!unbinned.empty()) groups.push_back({"unbinned", boxplot_stats(unbinned)});
  } else {
    if (a.index.empty() || a.brackets.empty()) {
      throw Error(Errc::invalid_argument, "size_bracket grouping needs --index and --brackets");
    }
    require_file(a.index);
    std::map<std::int64_t, double> size_of;
    for (const auto& [idx, text] : parse_index(read_file_text(a.index))) {
      const Architecture arch = parse_arch(text);
      if (!std::holds_alternative<SssArch>(arch)) {
        throw Error(Errc::invalid_argument, "size brackets apply to the sss space only");
      }
      size_of[idx] = model_size(std::get<SssArch>(arch));
    }
    std::vector<std::vector<double>> buckets(a.brackets.size() > 1 ? a.brackets.size() - 1 : 0);
    for (const auto& r : records) {
      const auto it = size_of.find(r.arch_index);
      if (it == size_of.end()) {
        throw Error(Errc::schema, "arch_index " + std::to_string(r.arch_index) + " missing from index");
      }
      buckets[bracket_of(it->second, a.brackets)].push_back(r.value);
    }
    for (std::size_t g = 0; g < buckets.size(); ++g) {
      if (buckets[g].empty()) continue;
      groups.push_back({format_double(a.brackets[g]) + "-" + format_double(a.brackets[g + 1]),
                        boxplot_stats(buckets[g])});
    }
  }
  emit(a.out, format_group_stats_csv(groups, a.percent ? 100.0 : 1.0));
  return 0;
}

int exit_code(Errc code) { return code == Errc::io ? 2 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibration measurement and calibration-aware architecture search"};
  app.require_subcommand(1);

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Run the calibration suite on prediction files");
  eval->add_option("--logits", ev.logits, "Prediction file (repeatable)")->required();
  eval->add_option("--format", ev.format, "Input format")->check(CLI::IsMember({"bin", "csv"}));
  eval->add_option("--scores", ev.scores, "CSV score kind")
      ->check(CLI::IsMember({"logits", "probabilities", "auto"}));
  eval->add_option("--bins", ev.bins, "Bin counts")->delimiter(',');
  eval->add_flag("--temperature-scale,!--no-temperature-scale", ev.temperature_scale,
                 "Fit a temperature on the validation split");
  eval->add_option("--val-fraction", ev.val_fraction, "Validation fraction")->check(CLI::Range(0.0, 1.0));
  eval->add_flag("--stratified", ev.stratified, "Stratify the split by label");
  eval->add_option("--seed", ev.seed, "Split seed")->envname("CALIBREX_SEED");
  eval->add_option("--ood-in", ev.ood_in, "Near out-of-distribution predictions");
  eval->add_option("--ood-out", ev.ood_out, "Far out-of-distribution predictions");
  eval->add_option("--out", ev.out, "Output JSONL")->required();
  eval->add_option("--dataset", ev.dataset, "Dataset tag for the records");
  eval->add_option("--space", ev.space, "Search space tag")->check(CLI::IsMember({"tss", "sss"}));
  eval->add_option("--arch-index", ev.arch_index, "Arch index of the first file");
  eval->add_flag("--with-accuracy", ev.with_accuracy, "Also record accuracy");
  eval->add_option("--jobs", ev.jobs, "Files evaluated in parallel")->check(CLI::PositiveNumber);
  eval->add_option("--kdece-grid", ev.kdece_grid, "KDECE grid points")->check(CLI::Range(2, 1 << 20));
  eval->add_option("--kdece-bandwidth", ev.kdece_bandwidth, "Fixed KDECE bandwidth");
  eval->add_option("--mmce-bandwidth", ev.mmce_bandwidth, "MMCE Laplacian bandwidth");

  CorrelateArgs co;
  auto* correlate = app.add_subcommand("correlate", "Kendall tau matrix over table columns");
  correlate->add_option("--table", co.table, "CSV table or JSONL records")->required();
  correlate->add_option("--columns", co.columns, "Columns to correlate")->delimiter(',');
  correlate->add_option("--top-k", co.top_k, "Keep the k best rows by --by");
  correlate->add_option("--by", co.by, "Ranking column for --top-k");
  correlate->add_option("--out", co.out, "Output CSV (stdout if omitted)");

  SearchArgs se;
  auto* search = app.add_subcommand("search", "Search a tabular benchmark");
  search->add_option("--benchmark", se.benchmark, "Records PATH, synthetic, or planted:ARCH");
  search->add_option("--index", se.index, "Index CSV for a records benchmark");
  search->add_option("--space", se.space, "Search space")->check(CLI::IsMember({"tss", "sss"}));
  search->add_option("--algo", se.algo, "Algorithm")->check(CLI::IsMember({"re", "ls", "rs"}));
  search->add_option("--objective", se.objective, "Objective")->check(CLI::IsMember({"acc", "ece", "hcs"}));
  search->add_option("--beta", se.beta, "HCS weight");
  search->add_option("--budget", se.budget, "Benchmark queries");
  search->add_option("--seed", se.seed, "Search seed")->envname("CALIBREX_SEED");
  search->add_option("--bench-seed", se.bench_seed, "Synthetic benchmark seed");
  search->add_option("--population", se.population, "Evolution population size");
  search->add_option("--sample", se.sample, "Evolution tournament size");
  search->add_option("--start", se.start, "Local search start architecture");
  search->add_option("--dataset", se.dataset, "Dataset to load from records");
  search->add_option("--ece-bins", se.ece_bins, "Bin count of the ECE column");
  search->add_flag("--percent", se.percent, "Report values in percent");
  search->add_option("--out", se.out, "Output JSON (stdout if omitted)");

  EnumerateArgs en;
  auto* enumerate = app.add_subcommand("enumerate", "List every architecture of a space");
  enumerate->add_option("--space", en.space, "Search space")->check(CLI::IsMember({"tss", "sss"}));
  enumerate->add_flag("--dedupe", en.dedupe, "One representative per isomorphism class");
  enumerate->add_option("--out", en.out, "Output file (stdout if omitted)");

  ReportArgs re;
  auto* report = app.add_subcommand("report", "Grouped summary statistics of records");
  report->add_option("--records", re.records, "Records JSONL")->required();
  report->add_option("--group-by", re.group_by, "Grouping")->check(CLI::IsMember({"bin_count", "size_bracket"}));
  report->add_option("--stat", re.stat, "Statistic")->check(CLI::IsMember({"boxplot"}));
  report->add_option("--metric", re.metrics, "Keep only these metrics")->delimiter(',');
  report->add_option("--stage", re.stage, "Keep only this stage")->check(CLI::IsMember({"pre", "post"}));
  report->add_option("--index", re.index, "Index CSV for size brackets");
  report->add_option("--brackets", re.brackets, "Ascending size bracket edges")->delimiter(',');
  report->add_flag("--percent", re.percent, "Report values in percent");
  report->add_option("--out", re.out, "Output CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*eval) return cmd_eval(ev);
    if (*correlate) return cmd_correlate(co);
    if (*search) return cmd_search(se);
    if (*enumerate) {
      if (en.dedupe && en.space == "sss") throw Error(Errc::invalid_argument, "--dedupe applies to tss only");
      return cmd_enumerate(en);
    }
    if (*report) return cmd_report(re);
  } catch (const Error& e) {
    std::cerr << "error[" << errc_name(e.code()) << "]: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
