#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "calibrex/arch.hpp"
#include "calibrex/suite.hpp"

namespace calibrex {

struct BenchmarkEntry {
  std::int64_t arch_index = 0;
  double accuracy = 0.0;
  double ece = 0.0;

  friend bool operator==(const BenchmarkEntry&, const BenchmarkEntry&) = default;
};

//! Pre-evaluated measurements keyed by architecture. The stored
//! architectures form the declared domain that searches draw from.
class TabularBenchmark {
 public:
  TabularBenchmark(SearchSpace space, std::vector<Architecture> archs, std::vector<BenchmarkEntry> entries);

  [[nodiscard]] SearchSpace space() const noexcept { return space_; }
  [[nodiscard]] std::size_t size() const noexcept { return archs_.size(); }
  //! True when the domain is the whole search space.
  [[nodiscard]] bool is_complete() const noexcept;

  [[nodiscard]] const Architecture& arch(std::size_t i) const { return archs_[i]; }
  [[nodiscard]] const BenchmarkEntry& entry(std::size_t i) const { return entries_[i]; }
  [[nodiscard]] std::optional<std::size_t> find(const Architecture& arch) const;
  //! Throws when the architecture lies outside the domain.
  [[nodiscard]] const BenchmarkEntry& lookup(const Architecture& arch) const;

  friend bool operator==(const TabularBenchmark& a, const TabularBenchmark& b) {
    return a.space_ == b.space_ && a.archs_ == b.archs_ && a.entries_ == b.entries_;
  }

 private:
  SearchSpace space_;
  std::vector<Architecture> archs_;
  std::vector<BenchmarkEntry> entries_;
  std::unordered_map<std::string, std::size_t> position_;
};

struct SynthSpec {
  SearchSpace space = SearchSpace::tss;
  //! When set, values fall off with Hamming distance to this architecture,
  //! which becomes the unique optimum of every objective.
  std::optional<Architecture> planted;
  //! Hash the TSS isomorphism fingerprint instead of the arch string, so
  //! isomorphic cells share their values.
  bool key_by_fingerprint = false;
};

//! Covers the whole space; accuracy and ECE come from a seeded hash of the
//! key (hash mode) or from the distance to the planted arch (planted mode).
TabularBenchmark synth_benchmark(const SynthSpec& spec, std::uint64_t seed);

struct BenchmarkLoadOptions {
  std::optional<std::string> dataset;
  std::int64_t ece_bins = 15;
  Stage stage = Stage::pre;
};

//! Index file: CSV `arch_index,arch`, one architecture per line.
std::vector<std::pair<std::int64_t, std::string>> parse_index(const std::string& text);
std::string format_index(const TabularBenchmark& bench);

//! Builds a benchmark from suite records (metrics `accuracy` and `ece` at the
//! requested bin count and stage) plus the index file.
TabularBenchmark benchmark_from_records(const std::vector<MeasurementRecord>& records,
                                        const std::vector<std::pair<std::int64_t, std::string>>& index,
                                        const BenchmarkLoadOptions& options = {});
TabularBenchmark load_benchmark(const std::filesystem::path& records_path,
                                const std::filesystem::path& index_path,
                                const BenchmarkLoadOptions& options = {});

//! Records (accuracy + ECE per arch) that load back into an equal benchmark.
std::vector<MeasurementRecord> benchmark_to_records(const TabularBenchmark& bench,
                                                    const std::string& dataset,
                                                    const BenchmarkLoadOptions& options = {});
void save_benchmark(const TabularBenchmark& bench, const std::filesystem::path& records_path,
                    const std::filesystem::path& index_path, const std::string& dataset = "synthetic");

}  // namespace calibrex
