#include "calibrex/benchmark.hpp"

#include <map>

#include "calibrex/error.hpp"
#include "calibrex/fileutil.hpp"

namespace calibrex {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_from(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

SearchSpace space_of(const Architecture& a) {
  return std::holds_alternative<TssArch>(a) ? SearchSpace::tss : SearchSpace::sss;
}

std::size_t space_size(SearchSpace s) { return s == SearchSpace::tss ? kTssSpaceSize : kSssSpaceSize; }

std::int64_t lex_index(const Architecture& a) {
  return static_cast<std::int64_t>(std::visit([](const auto& x) { return lexicographic_index(x); }, a));
}

}  // namespace

TabularBenchmark::TabularBenchmark(SearchSpace space, std::vector<Architecture> archs,
                                   std::vector<BenchmarkEntry> entries)
    : space_(space), archs_(std::move(archs)), entries_(std::move(entries)) {
  if (archs_.size() != entries_.size()) {
    throw Error(Errc::invalid_argument, "benchmark needs one entry per architecture");
  }
  if (archs_.empty()) throw Error(Errc::invalid_argument, "benchmark is empty");
  position_.reserve(archs_.size());
  for (std::size_t i = 0; i < archs_.size(); ++i) {
    if (space_of(archs_[i]) != space_) {
      throw Error(Errc::invalid_argument, "architecture " + to_string(archs_[i]) + " is not in the " +
                                              to_string(space_) + " space");
    }
    if (!position_.emplace(to_string(archs_[i]), i).second) {
      throw Error(Errc::schema, "duplicate architecture " + to_string(archs_[i]));
    }
  }
}

bool TabularBenchmark::is_complete() const noexcept { return archs_.size() == space_size(space_); }

std::optional<std::size_t> TabularBenchmark::find(const Architecture& arch) const {
  const auto it = position_.find(to_string(arch));
  if (it == position_.end()) return std::nullopt;
  return it->second;
}

const BenchmarkEntry& TabularBenchmark::lookup(const Architecture& arch) const {
  const auto pos = find(arch);
  if (!pos) throw Error(Errc::invalid_argument, "architecture " + to_string(arch) + " not in benchmark");
  return entries_[*pos];
}

TabularBenchmark synth_benchmark(const SynthSpec& spec, std::uint64_t seed) {
  std::vector<Architecture> archs;
  if (spec.space == SearchSpace::tss) {
    for (const auto& a : enumerate_tss()) archs.emplace_back(a);
  } else {
    for (const auto& a : enumerate_sss()) archs.emplace_back(a);
  }
  if (spec.planted && space_of(*spec.planted) != spec.space) {
    throw Error(Errc::invalid_argument, "planted architecture is not in the benchmark space");
  }
  const double genes = spec.space == SearchSpace::tss ? static_cast<double>(kTssEdgeCount)
                                                      : static_cast<double>(kSssLayerCount);
  std::vector<BenchmarkEntry> entries;
  entries.reserve(archs.size());
  for (const auto& a : archs) {
    BenchmarkEntry e;
    e.arch_index = lex_index(a);
    if (spec.planted) {
      const double d = static_cast<double>(hamming(a, *spec.planted)) / genes;
      e.accuracy = 0.95 - 0.5 * d;
      e.ece = 0.02 + 0.2 * d;
    } else {
      std::string key = to_string(a);
      if (spec.key_by_fingerprint && spec.space == SearchSpace::tss) {
        key = canonical_fingerprint(std::get<TssArch>(a));
      }
      const std::uint64_t h = splitmix64(fnv1a(key) ^ splitmix64(seed));
      e.accuracy = 0.1 + 0.85 * unit_from(h);
      e.ece = 0.01 + 0.2 * unit_from(splitmix64(h));
    }
    entries.push_back(e);
  }
  return {spec.space, std::move(archs), std::move(entries)};
}

std::vector<std::pair<std::int64_t, std::string>> parse_index(const std::string& text) {
  std::vector<std::pair<std::int64_t, std::string>> out;
  std::size_t start = 0;
  std::size_t line_number = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line_number;
    std::string line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_number == 1 && line == "arch_index,arch") continue;
    const auto fields = split_fields(line, ',');
    double idx = 0.0;
    if (fields.size() != 2 || !parse_double(fields[0], idx) || idx != static_cast<double>(static_cast<std::int64_t>(idx))) {
      throw Error(Errc::schema, "index line " + std::to_string(line_number) + ": expected arch_index,arch");
    }
    out.emplace_back(static_cast<std::int64_t>(idx), std::string(fields[1]));
  }
  return out;
}

std::string format_index(const TabularBenchmark& bench) {
  std::string out = "arch_index,arch\n";
  for (std::size_t i = 0; i < bench.size(); ++i) {
    out += std::to_string(bench.entry(i).arch_index) + "," + to_string(bench.arch(i)) + "\n";
  }
  return out;
}

TabularBenchmark benchmark_from_records(const std::vector<MeasurementRecord>& records,
                                        const std::vector<std::pair<std::int64_t, std::string>>& index,
                                        const BenchmarkLoadOptions& options) {
  if (index.empty()) throw Error(Errc::schema, "benchmark index is empty");
  std::optional<std::string> dataset = options.dataset;
  if (!dataset) {
    for (const auto& r : records) {
      if (!dataset) dataset = r.benchmark_dataset;
      if (*dataset != r.benchmark_dataset) {
        throw Error(Errc::invalid_argument, "records hold several datasets; choose one");
      }
    }
  }
  std::map<std::int64_t, double> acc;
  std::map<std::int64_t, double> ece;
  for (const auto& r : records) {
    if (dataset && r.benchmark_dataset != *dataset) continue;
    if (r.stage != options.stage) continue;
    if (r.metric == metric::accuracy) acc[r.arch_index] = r.value;
    if (r.metric == metric::ece && r.bin_count == options.ece_bins) ece[r.arch_index] = r.value;
  }

  std::vector<Architecture> archs;
  std::vector<BenchmarkEntry> entries;
  const SearchSpace space = space_of(parse_arch(index.front().second));
  for (const auto& [idx, text] : index) {
    const auto a = acc.find(idx);
    const auto e = ece.find(idx);
    if (a == acc.end() || e == ece.end()) {
      throw Error(Errc::schema, "arch_index " + std::to_string(idx) + " lacks accuracy or ece@" +
                                    std::to_string(options.ece_bins) + " records");
    }
    archs.push_back(parse_arch(text));
    entries.push_back({idx, a->second, e->second});
  }
  return {space, std::move(archs), std::move(entries)};
}

TabularBenchmark load_benchmark(const std::filesystem::path& records_path,
                                const std::filesystem::path& index_path,
                                const BenchmarkLoadOptions& options) {
  return benchmark_from_records(read_records(records_path), parse_index(read_file_text(index_path)), options);
}

std::vector<MeasurementRecord> benchmark_to_records(const TabularBenchmark& bench, const std::string& dataset,
                                                    const BenchmarkLoadOptions& options) {
  std::vector<MeasurementRecord> out;
  for (std::size_t i = 0; i < bench.size(); ++i) {
    const auto& e = bench.entry(i);
    out.push_back({dataset, bench.space(), e.arch_index, metric::accuracy, std::nullopt, options.stage,
                   SplitName::test, e.accuracy, std::nullopt});
    out.push_back({dataset, bench.space(), e.arch_index, metric::ece, options.ece_bins, options.stage,
                   SplitName::test, e.ece, std::nullopt});
  }
  return out;
}

void save_benchmark(const TabularBenchmark& bench, const std::filesystem::path& records_path,
                    const std::filesystem::path& index_path, const std::string& dataset) {
  write_records(benchmark_to_records(bench, dataset), records_path);
  write_file_atomic(index_path, format_index(bench));
}

}  // namespace calibrex
