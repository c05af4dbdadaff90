#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "calibrex/arch.hpp"
#include "calibrex/suite.hpp"

namespace calibrex {

//! Rows are architectures, columns named measurements.
class MetricTable {
 public:
  MetricTable() = default;
  MetricTable(std::vector<std::int64_t> row_ids, std::vector<std::string> names,
              std::vector<std::vector<double>> columns);

  [[nodiscard]] std::size_t rows() const noexcept { return row_ids_.size(); }
  [[nodiscard]] std::size_t cols() const noexcept { return names_.size(); }
  [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
  [[nodiscard]] const std::vector<std::int64_t>& row_ids() const noexcept { return row_ids_; }
  [[nodiscard]] std::span<const double> column(const std::string& name) const;
  [[nodiscard]] std::span<const double> column(std::size_t i) const { return columns_[i]; }
  [[nodiscard]] std::size_t column_index(const std::string& name) const;
  [[nodiscard]] bool has_column(const std::string& name) const;

  [[nodiscard]] MetricTable select_rows(std::span<const std::size_t> rows) const;

  friend bool operator==(const MetricTable&, const MetricTable&) = default;

 private:
  std::vector<std::int64_t> row_ids_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
};

//! CSV with a header row. A column named `arch_index` becomes the row id;
//! otherwise rows are numbered from 0. Empty cells are not allowed.
MetricTable parse_table_csv(const std::string& text);
MetricTable read_table_csv(const std::filesystem::path& path);
std::string format_table_csv(const MetricTable& table);

//! Pivots records into one row per arch_index and one column per
//! `<metric>[@bins]/<stage>`; cells missing for an arch are rejected.
MetricTable records_to_table(const std::vector<MeasurementRecord>& records);

//! Kendall tau-b in O(n log n). nullopt when either input is constant.
std::optional<double> kendall_tau(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<std::optional<double>>> cells;
};

CorrelationMatrix correlation_matrix(const MetricTable& table, const std::vector<std::string>& columns);
//! Undefined cells are written as `nan`.
std::string format_correlation_csv(const CorrelationMatrix& matrix);

//! Rows holding the k largest values of `column`; ties at the boundary go to
//! the smaller row id. Output is ordered by descending value, then row id.
MetricTable top_k_by(const MetricTable& table, const std::string& column, std::size_t k);

struct HcsParams {
  double beta = 1.0;
};

//! Harmonic calibration score (1+b) A (1-E) / (b A + (1-E)), on fractions.
double hcs(double accuracy, double ece, HcsParams params = {});

struct BoxplotStats {
  std::size_t count = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

//! Type-7 (linear interpolation) quartiles.
BoxplotStats boxplot_stats(std::span<const double> values);

struct GroupStats {
  std::string group;
  BoxplotStats stats;
};

std::string format_group_stats_csv(const std::vector<GroupStats>& groups, double scale = 1.0);

//! Index of the bracket [edges[i], edges[i+1]) holding `size`; the last
//! bracket is closed. Throws when the size falls outside every bracket.
std::size_t bracket_of(double size, std::span<const double> edges);

//! Groups `value_column` by the bracket of `size_column`; one entry per
//! non-empty bracket, in bracket order, labelled "lo-hi".
std::vector<GroupStats> size_brackets(const MetricTable& table, const std::string& size_column,
                                      const std::string& value_column,
                                      std::span<const double> edges);

//! counts[edge][op] over the given cells; every row sums to archs.size().
std::array<std::array<std::size_t, kTssOpCount>, kTssEdgeCount> edge_preference_histogram(
    std::span<const TssArch> archs);

//! CSV of x, y and an optional colour column for external plotting.
std::string format_scatter_csv(const MetricTable& table, const std::string& x, const std::string& y,
                               const std::optional<std::string>& color = std::nullopt);

}  // namespace calibrex
