#include "calibrex/suite.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>

#include "calibrex/error.hpp"
#include "calibrex/fileutil.hpp"
#include "calibrex/temperature.hpp"

namespace calibrex {

using ojson = nlohmann::ordered_json;

std::string to_string(SearchSpace s) { return s == SearchSpace::tss ? "tss" : "sss"; }
std::string to_string(Stage s) { return s == Stage::pre ? "pre" : "post"; }
std::string to_string(SplitName s) { return s == SplitName::val ? "val" : "test"; }

SearchSpace parse_search_space(const std::string& s) {
  if (s == "tss") return SearchSpace::tss;
  if (s == "sss") return SearchSpace::sss;
  throw Error(Errc::invalid_argument, "unknown search space '" + s + "'");
}

const std::vector<std::string>& bin_metric_names() {
  static const std::vector<std::string> names{metric::ece, metric::ece_em, metric::cwce,
                                              metric::cwce_em, metric::mce};
  return names;
}

const std::vector<std::string>& continuous_metric_names() {
  static const std::vector<std::string> names{metric::nll, metric::brier, metric::kdece,
                                              metric::ksce, metric::mmce};
  return names;
}

bool is_bin_metric(const std::string& name) {
  const auto& b = bin_metric_names();
  return std::find(b.begin(), b.end(), name) != b.end();
}

namespace {

bool enabled(const SuiteConfig& config, const std::string& name) {
  return config.metrics.empty() || config.metrics.count(name) > 0;
}

double bin_metric(const std::string& name, const PredictionSet& probs, const TopLabel& top,
                  std::size_t m) {
  if (name == metric::ece) return top_label_bins(top, m, BinScheme::equal_width).weighted_gap();
  if (name == metric::ece_em) return top_label_bins(top, m, BinScheme::equal_mass).weighted_gap();
  if (name == metric::mce) return top_label_bins(top, m, BinScheme::equal_width).max_gap();
  if (name == metric::cwce) return cwce(probs, m, BinScheme::equal_width);
  return cwce(probs, m, BinScheme::equal_mass);
}

double continuous_metric(const std::string& name, const PredictionSet& probs, const TopLabel& top,
                         const SuiteConfig& config) {
  if (name == metric::nll) return nll(probs);
  if (name == metric::brier) return brier(probs);
  if (name == metric::kdece) return kdece(top.confidence, top.correct, config.kdece);
  if (name == metric::ksce) return ksce(top.confidence, top.correct);
  return mmce(top.confidence, top.correct, config.mmce_kernel);
}

}  // namespace

void validate(const SuiteConfig& config) {
  for (std::size_t i = 0; i < config.bin_sizes.size(); ++i) {
    if (config.bin_sizes[i] == 0) throw Error(Errc::invalid_argument, "bin sizes must be positive");
    if (i > 0 && config.bin_sizes[i] <= config.bin_sizes[i - 1]) {
      throw Error(Errc::invalid_argument, "bin sizes must be sorted and unique");
    }
  }
  for (const auto& name : config.metrics) {
    const auto& c = continuous_metric_names();
    if (!is_bin_metric(name) && std::find(c.begin(), c.end(), name) == c.end()) {
      throw Error(Errc::invalid_argument, "unknown metric '" + name + "'");
    }
  }
  for (const auto& ood : config.ood_inputs) {
    if (ood.confidence.empty()) {
      throw Error(Errc::invalid_argument, "OoD set '" + ood.name + "' is empty");
    }
  }
}

std::size_t expected_record_count(const SuiteConfig& config) {
  const std::size_t stages = config.temperature_scale ? 2 : 1;
  std::size_t per_stage = 0;
  for (const auto& name : bin_metric_names()) {
    if (enabled(config, name)) per_stage += config.bin_sizes.size();
  }
  for (const auto& name : continuous_metric_names()) {
    if (enabled(config, name)) ++per_stage;
  }
  if (config.include_accuracy) ++per_stage;
  return per_stage * stages + config.ood_inputs.size();
}

std::vector<MeasurementRecord> run_suite(const PredictionSet& logits, const SuiteConfig& config) {
  validate(config);
  if (config.temperature_scale && logits.is_probabilities()) {
    throw Error(Errc::invalid_argument, "temperature scaling needs logits, got probabilities");
  }
  const SplitIndices idx = split_indices(logits, config.split);
  const PredictionSet test = logits.subset(idx.test);

  std::vector<MeasurementRecord> out;
  out.reserve(expected_record_count(config));
  auto emit_stage = [&](Stage stage, const PredictionSet& probs, std::optional<double> temperature) {
    const TopLabel top = top_label(probs);
    auto push = [&](const std::string& name, std::optional<std::int64_t> bins, double value) {
      if (!std::isfinite(value)) {
        throw Error(Errc::non_finite, "metric " + name + " produced a non-finite value");
      }
      out.push_back({config.benchmark_dataset, config.search_space, config.arch_index, name, bins,
                     stage, SplitName::test, value, temperature});
    };
    for (const auto& name : bin_metric_names()) {
      if (!enabled(config, name)) continue;
      for (std::size_t m : config.bin_sizes) {
        push(name, static_cast<std::int64_t>(m), bin_metric(name, probs, top, m));
      }
    }
    for (const auto& name : continuous_metric_names()) {
      if (enabled(config, name)) push(name, std::nullopt, continuous_metric(name, probs, top, config));
    }
    if (config.include_accuracy) push(metric::accuracy, std::nullopt, accuracy(probs));
    if (stage == Stage::pre) {
      for (const auto& ood : config.ood_inputs) {
        push("auroc_" + ood.name, std::nullopt, auroc(top.confidence, ood.confidence));
      }
    }
  };

  emit_stage(Stage::pre, to_probabilities(test), std::nullopt);
  if (config.temperature_scale) {
    const Temperature t = fit_temperature(logits.subset(idx.validation));
    emit_stage(Stage::post, apply_temperature(test, t.value), t.value);
  }
  return out;
}

namespace {

ojson to_ojson(const MeasurementRecord& r) {
  ojson j;
  j["benchmark_dataset"] = r.benchmark_dataset;
  j["search_space"] = to_string(r.search_space);
  j["arch_index"] = r.arch_index;
  j["metric"] = r.metric;
  j["bin_count"] = r.bin_count ? ojson(*r.bin_count) : ojson(nullptr);
  j["stage"] = to_string(r.stage);
  j["split"] = to_string(r.split);
  j["value"] = r.value;
  j["temperature"] = r.temperature ? ojson(*r.temperature) : ojson(nullptr);
  return j;
}

}  // namespace

std::string record_to_json(const MeasurementRecord& record) { return to_ojson(record).dump(); }

MeasurementRecord record_from_json(const std::string& line, std::size_t line_number) {
  const std::string where = "line " + std::to_string(line_number) + ": ";
  ojson j;
  try {
    j = ojson::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::schema, where + "malformed JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw Error(Errc::schema, where + "record is not a JSON object");

  auto field = [&](const char* name) -> const ojson& {
    auto it = j.find(name);
    if (it == j.end()) throw Error(Errc::schema, where + "missing field '" + name + "'");
    return *it;
  };
  auto string_field = [&](const char* name) {
    const ojson& v = field(name);
    if (!v.is_string()) throw Error(Errc::schema, where + "field '" + name + "' must be a string");
    return v.get<std::string>();
  };
  auto optional_number = [&](const char* name) -> const ojson* {
    auto it = j.find(name);
    if (it == j.end() || it->is_null()) return nullptr;
    if (!it->is_number()) throw Error(Errc::schema, where + "field '" + name + "' must be a number");
    return &*it;
  };

  MeasurementRecord r;
  r.benchmark_dataset = string_field("benchmark_dataset");
  const std::string space = string_field("search_space");
  if (space != "tss" && space != "sss") throw Error(Errc::schema, where + "bad search_space");
  r.search_space = parse_search_space(space);
  const ojson& arch = field("arch_index");
  if (!arch.is_number_integer()) throw Error(Errc::schema, where + "arch_index must be an integer");
  r.arch_index = arch.get<std::int64_t>();
  r.metric = string_field("metric");
  if (const ojson* bins = optional_number("bin_count")) {
    if (!bins->is_number_integer()) throw Error(Errc::schema, where + "bin_count must be an integer");
    r.bin_count = bins->get<std::int64_t>();
  }
  const std::string stage = string_field("stage");
  if (stage != "pre" && stage != "post") throw Error(Errc::schema, where + "bad stage '" + stage + "'");
  r.stage = stage == "pre" ? Stage::pre : Stage::post;
  const std::string split = string_field("split");
  if (split != "val" && split != "test") throw Error(Errc::schema, where + "bad split '" + split + "'");
  r.split = split == "val" ? SplitName::val : SplitName::test;
  const ojson& value = field("value");
  if (!value.is_number()) throw Error(Errc::schema, where + "value must be a number");
  r.value = value.get<double>();
  if (!std::isfinite(r.value)) throw Error(Errc::schema, where + "value must be finite");
  if (const ojson* t = optional_number("temperature")) r.temperature = t->get<double>();
  if (is_bin_metric(r.metric) != r.bin_count.has_value()) {
    throw Error(Errc::schema, where + "bin_count must be present exactly for bin-based metrics");
  }
  return r;
}

std::string format_records(const std::vector<MeasurementRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r);
    out += '\n';
  }
  return out;
}

std::vector<MeasurementRecord> parse_records(const std::string& text) {
  std::vector<MeasurementRecord> out;
  std::size_t line_number = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line_number;
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) {
      out.push_back(record_from_json(line, line_number));
    }
    start = end + 1;
  }
  return out;
}

void write_records(const std::vector<MeasurementRecord>& records, const std::filesystem::path& path) {
  write_file_atomic(path, format_records(records));
}

std::vector<MeasurementRecord> read_records(const std::filesystem::path& path) {
  return parse_records(read_file_text(path));
}

std::string records_to_nested_json(const std::vector<MeasurementRecord>& records) {
  // std::map keeps keys sorted so the export is byte-stable.
  std::map<std::string, std::map<std::string, std::map<std::int64_t, double>>> nested;
  for (const auto& r : records) {
    std::string key = r.metric;
    if (r.bin_count) key += "@" + std::to_string(*r.bin_count);
    key += "/" + to_string(r.stage);
    nested[r.benchmark_dataset][key][r.arch_index] = r.value;
  }
  ojson root = ojson::object();
  for (const auto& [dataset, metrics] : nested) {
    ojson d = ojson::object();
    for (const auto& [key, archs] : metrics) {
      ojson ce = ojson::object();
      for (const auto& [arch, value] : archs) ce[std::to_string(arch)] = value;
      d[key] = ojson{{"CE", ce}};
    }
    root[dataset] = d;
  }
  return root.dump(2) + "\n";
}

}  // namespace calibrex
