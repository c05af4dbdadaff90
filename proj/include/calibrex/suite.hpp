#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "calibrex/binning.hpp"
#include "calibrex/continuous_metrics.hpp"
#include "calibrex/predictions.hpp"

namespace calibrex {

enum class SearchSpace { tss, sss };
enum class Stage { pre, post };
enum class SplitName { val, test };

std::string to_string(SearchSpace s);
std::string to_string(Stage s);
std::string to_string(SplitName s);
SearchSpace parse_search_space(const std::string& s);

// Metric names as they appear in records.
namespace metric {
inline const std::string ece = "ece";
inline const std::string ece_em = "ece_em";
inline const std::string cwce = "cwce";
inline const std::string cwce_em = "cwce_em";
inline const std::string mce = "mce";
inline const std::string nll = "nll";
inline const std::string brier = "brier";
inline const std::string kdece = "kdece";
inline const std::string ksce = "ksce";
inline const std::string mmce = "mmce";
inline const std::string accuracy = "accuracy";
}  // namespace metric

const std::vector<std::string>& bin_metric_names();
const std::vector<std::string>& continuous_metric_names();
bool is_bin_metric(const std::string& name);

//! One row of the calibration dataset: C[dataset][metric]["CE"][arch].
struct MeasurementRecord {
  std::string benchmark_dataset;
  SearchSpace search_space = SearchSpace::tss;
  std::int64_t arch_index = 0;
  std::string metric;
  std::optional<std::int64_t> bin_count;
  Stage stage = Stage::pre;
  SplitName split = SplitName::test;
  double value = 0.0;
  std::optional<double> temperature;

  friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

struct OodSet {
  std::string name;  // record metric becomes "auroc_<name>"
  std::vector<double> confidence;
};

struct SuiteConfig {
  std::vector<std::size_t> bin_sizes{kDefaultBinSizes.begin(), kDefaultBinSizes.end()};
  //! Empty means every metric.
  std::set<std::string> metrics;
  std::vector<OodSet> ood_inputs;
  bool temperature_scale = true;
  //! Appends one accuracy record per stage (outside the 102-measurement count).
  bool include_accuracy = false;
  SplitSpec split;
  KernelSpec mmce_kernel;
  KdeceOptions kdece;

  std::string benchmark_dataset = "unknown";
  SearchSpace search_space = SearchSpace::tss;
  std::int64_t arch_index = 0;
};

void validate(const SuiteConfig& config);

//! Number of records `run_suite` emits: 5*|bins|*stages + 5*stages + |OoD|
//! (+ stages with accuracy), restricted to the enabled metrics.
std::size_t expected_record_count(const SuiteConfig& config);

/// Runs the full measurement suite for one model.
///
/// The predictions are split into validation and test parts. Pre-stage
/// metrics use softmax of the test logits; when temperature scaling is on, a
/// temperature is fitted on the validation part and the post stage repeats
/// every metric on the rescaled test part. AUROC records are pre-stage only.
/// Record order is fixed: pre bin metrics (metric-major, then bin size),
/// pre continuous metrics, AUROC, then the same for post.
std::vector<MeasurementRecord> run_suite(const PredictionSet& logits, const SuiteConfig& config);

std::string record_to_json(const MeasurementRecord& record);
MeasurementRecord record_from_json(const std::string& line, std::size_t line_number = 1);

std::string format_records(const std::vector<MeasurementRecord>& records);
std::vector<MeasurementRecord> parse_records(const std::string& text);
void write_records(const std::vector<MeasurementRecord>& records, const std::filesystem::path& path);
std::vector<MeasurementRecord> read_records(const std::filesystem::path& path);

//! Nested layout dataset -> "<metric>[@bins]/<stage>" -> "CE" -> arch_index.
std::string records_to_nested_json(const std::vector<MeasurementRecord>& records);

}  // namespace calibrex
