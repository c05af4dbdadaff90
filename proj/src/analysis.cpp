#include "calibrex/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "calibrex/error.hpp"
#include "calibrex/fileutil.hpp"

namespace calibrex {

MetricTable::MetricTable(std::vector<std::int64_t> row_ids, std::vector<std::string> names,
                         std::vector<std::vector<double>> columns)
    : row_ids_(std::move(row_ids)), names_(std::move(names)), columns_(std::move(columns)) {
  if (names_.size() != columns_.size()) {
    throw Error(Errc::invalid_argument, "column names and columns differ in count");
  }
  std::set<std::string> seen;
  for (std::size_t c = 0; c < names_.size(); ++c) {
    if (!seen.insert(names_[c]).second) {
      throw Error(Errc::schema, "duplicate column '" + names_[c] + "'");
    }
    if (columns_[c].size() != row_ids_.size()) {
      throw Error(Errc::schema, "column '" + names_[c] + "' is not rectangular");
    }
    for (double v : columns_[c]) {
      if (!std::isfinite(v)) throw Error(Errc::non_finite, "column '" + names_[c] + "' has a non-finite cell");
    }
  }
}

std::size_t MetricTable::column_index(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error(Errc::invalid_argument, "unknown column '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

bool MetricTable::has_column(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::span<const double> MetricTable::column(const std::string& name) const {
  return columns_[column_index(name)];
}

MetricTable MetricTable::select_rows(std::span<const std::size_t> rows) const {
  std::vector<std::int64_t> ids;
  std::vector<std::vector<double>> cols(names_.size());
  for (std::size_t r : rows) {
    ids.push_back(row_ids_[r]);
    for (std::size_t c = 0; c < names_.size(); ++c) cols[c].push_back(columns_[c][r]);
  }
  return {std::move(ids), names_, std::move(cols)};
}

MetricTable parse_table_csv(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error(Errc::schema, "line 1: table CSV has no header");

  std::vector<std::string> header;
  for (auto f : split_fields(lines[0], ',')) header.emplace_back(f);
  const auto id_it = std::find(header.begin(), header.end(), "arch_index");
  const bool has_ids = id_it != header.end();
  const auto id_col = static_cast<std::size_t>(id_it - header.begin());

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!has_ids || c != id_col) names.push_back(header[c]);
  }
  std::vector<std::int64_t> ids;
  std::vector<std::vector<double>> cols(names.size());
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string where = "line " + std::to_string(li + 1) + ": ";
    const auto fields = split_fields(lines[li], ',');
    if (fields.size() != header.size()) {
      throw Error(Errc::ragged_row, where + "expected " + std::to_string(header.size()) + " cells");
    }
    std::size_t out_col = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v)) {
        throw Error(Errc::non_numeric, where + "cell '" + header[c] + "' is not a number");
      }
      if (has_ids && c == id_col) {
        if (v != std::floor(v)) throw Error(Errc::non_numeric, where + "arch_index must be an integer");
        ids.push_back(static_cast<std::int64_t>(v));
      } else {
        cols[out_col++].push_back(v);
      }
    }
    if (!has_ids) ids.push_back(static_cast<std::int64_t>(li - 1));
  }
  return {std::move(ids), std::move(names), std::move(cols)};
}

MetricTable read_table_csv(const std::filesystem::path& path) {
  return parse_table_csv(read_file_text(path));
}

std::string format_table_csv(const MetricTable& table) {
  std::string out = "arch_index";
  for (const auto& n : table.names()) out += "," + n;
  out += '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out += std::to_string(table.row_ids()[r]);
    for (std::size_t c = 0; c < table.cols(); ++c) out += "," + format_double(table.column(c)[r]);
    out += '\n';
  }
  return out;
}

MetricTable records_to_table(const std::vector<MeasurementRecord>& records) {
  std::set<std::string> datasets;
  for (const auto& r : records) datasets.insert(r.benchmark_dataset);
  const bool tag_dataset = datasets.size() > 1;

  std::vector<std::string> names;
  std::map<std::string, std::size_t> name_pos;
  std::map<std::int64_t, std::map<std::size_t, double>> cells;
  for (const auto& r : records) {
    std::string key = tag_dataset ? r.benchmark_dataset + ":" : std::string();
    key += r.metric;
    if (r.bin_count) key += "@" + std::to_string(*r.bin_count);
    key += "/" + to_string(r.stage);
    auto [it, inserted] = name_pos.emplace(key, names.size());
    if (inserted) names.push_back(key);
    if (!cells[r.arch_index].emplace(it->second, r.value).second) {
      throw Error(Errc::schema, "duplicate measurement " + key + " for arch " + std::to_string(r.arch_index));
    }
  }
  std::vector<std::int64_t> ids;
  std::vector<std::vector<double>> cols(names.size());
  for (const auto& [arch, row] : cells) {
    if (row.size() != names.size()) {
      throw Error(Errc::schema, "arch " + std::to_string(arch) + " is missing measurements");
    }
    ids.push_back(arch);
    for (const auto& [c, v] : row) cols[c].push_back(v);
  }
  return {std::move(ids), std::move(names), std::move(cols)};
}

namespace {

std::int64_t tie_pairs(std::span<const double> sorted) {
  std::int64_t pairs = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<std::int64_t>(j - i);
    pairs += t * (t - 1) / 2;
    i = j;
  }
  return pairs;
}

// Counts pairs i < j with v[i] > v[j] while sorting v.
std::int64_t count_inversions(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace

std::optional<double> kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(Errc::invalid_argument, "kendall_tau: lengths differ");
  if (x.size() < 2) throw Error(Errc::invalid_argument, "kendall_tau needs at least 2 pairs");
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) throw Error(Errc::non_finite, "kendall_tau: NaN input");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  std::vector<double> xs(n);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }
  const auto total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t x_ties = tie_pairs(xs);
  std::int64_t joint_ties = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && xs[j] == xs[i] && ys[j] == ys[i]) ++j;
    const auto t = static_cast<std::int64_t>(j - i);
    joint_ties += t * (t - 1) / 2;
    i = j;
  }
  std::vector<double> buf(n);
  const std::int64_t swaps = count_inversions(ys, buf, 0, n);
  const std::int64_t y_ties = tie_pairs(ys);

  if (total == x_ties || total == y_ties) return std::nullopt;
  const double numer = static_cast<double>(total - x_ties - y_ties + joint_ties - 2 * swaps);
  const double denom = std::sqrt(static_cast<double>(total - x_ties)) *
                       std::sqrt(static_cast<double>(total - y_ties));
  return std::clamp(numer / denom, -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(const MetricTable& table, const std::vector<std::string>& columns) {
  CorrelationMatrix m;
  m.names = columns;
  std::vector<std::span<const double>> cols;
  for (const auto& name : columns) cols.push_back(table.column(name));
  const std::size_t c = columns.size();
  m.cells.assign(c, std::vector<std::optional<double>>(c));
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = i; j < c; ++j) {
      const auto tau = kendall_tau(cols[i], cols[j]);
      m.cells[i][j] = tau;
      m.cells[j][i] = tau;
    }
  }
  return m;
}

std::string format_correlation_csv(const CorrelationMatrix& matrix) {
  std::string out = "metric";
  for (const auto& n : matrix.names) out += "," + n;
  out += '\n';
  for (std::size_t i = 0; i < matrix.names.size(); ++i) {
    out += matrix.names[i];
    for (const auto& cell : matrix.cells[i]) out += "," + (cell ? format_double(*cell) : std::string("nan"));
    out += '\n';
  }
  return out;
}

MetricTable top_k_by(const MetricTable& table, const std::string& column, std::size_t k) {
  const auto values = table.column(column);
  if (k > table.rows()) {
    throw Error(Errc::invalid_argument, "top-k of " + std::to_string(k) + " exceeds " +
                                            std::to_string(table.rows()) + " rows");
  }
  std::vector<std::size_t> order(table.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& ids = table.row_ids();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return ids[a] < ids[b];
  });
  order.resize(k);
  return table.select_rows(order);
}

double hcs(double accuracy, double ece, HcsParams params) {
  if (!(params.beta > 0.0)) throw Error(Errc::invalid_argument, "HCS beta must be positive");
  if (!(accuracy >= 0.0 && accuracy <= 1.0) || !(ece >= 0.0 && ece <= 1.0)) {
    throw Error(Errc::invalid_argument, "HCS takes accuracy and ECE as fractions in [0, 1]");
  }
  const double calibrated = 1.0 - ece;
  const double denom = params.beta * accuracy + calibrated;
  if (denom <= 0.0) throw Error(Errc::degenerate, "HCS undefined for accuracy 0 and ECE 1");
  return (1.0 + params.beta) * accuracy * calibrated / denom;
}

BoxplotStats boxplot_stats(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::invalid_argument, "boxplot of an empty sample");
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
  };
  return {s.size(), s.front(), q(0.25), q(0.5), q(0.75), s.back()};
}

std::string format_group_stats_csv(const std::vector<GroupStats>& groups, double scale) {
  std::string out = "group,count,min,q1,median,q3,max\n";
  for (const auto& g : groups) {
    const auto& s = g.stats;
    out += g.group + ',' + std::to_string(s.count) + ',' + format_double(s.min * scale) + ',' +
           format_double(s.q1 * scale) + ',' + format_double(s.median * scale) + ',' +
           format_double(s.q3 * scale) + ',' + format_double(s.max * scale) + '\n';
  }
  return out;
}

std::size_t bracket_of(double size, std::span<const double> edges) {
  if (edges.size() < 2) throw Error(Errc::invalid_argument, "need at least two bracket edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw Error(Errc::invalid_argument, "bracket edges must ascend");
  }
  if (size < edges.front() || size > edges.back()) {
    throw Error(Errc::invalid_argument, "size " + format_double(size) + " outside every bracket");
  }
  const auto it = std::upper_bound(edges.begin(), edges.end(), size);
  const auto idx = static_cast<std::size_t>(it - edges.begin());
  return std::min(idx - 1, edges.size() - 2);
}

std::vector<GroupStats> size_brackets(const MetricTable& table, const std::string& size_column,
                                      const std::string& value_column, std::span<const double> edges) {
  const auto sizes = table.column(size_column);
  const auto values = table.column(value_column);
  std::vector<std::vector<double>> groups(edges.size() > 1 ? edges.size() - 1 : 0);
  for (std::size_t r = 0; r < table.rows(); ++r) groups[bracket_of(sizes[r], edges)].push_back(values[r]);
  std::vector<GroupStats> out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) continue;
    out.push_back({format_double(edges[g]) + "-" + format_double(edges[g + 1]), boxplot_stats(groups[g])});
  }
  return out;
}

std::array<std::array<std::size_t, kTssOpCount>, kTssEdgeCount> edge_preference_histogram(
    std::span<const TssArch> archs) {
  std::array<std::array<std::size_t, kTssOpCount>, kTssEdgeCount> counts{};
  for (const auto& a : archs) {
    for (std::size_t e = 0; e < kTssEdgeCount; ++e) ++counts[e][static_cast<std::size_t>(a.ops[e])];
  }
  return counts;
}

std::string format_scatter_csv(const MetricTable& table, const std::string& x, const std::string& y,
                               const std::optional<std::string>& color) {
  const auto xs = table.column(x);
  const auto ys = table.column(y);
  std::span<const double> cs;
  if (color) cs = table.column(*color);
  std::string out = "arch_index," + x + "," + y + (color ? "," + *color : std::string()) + "\n";
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out += std::to_string(table.row_ids()[r]) + "," + format_double(xs[r]) + "," + format_double(ys[r]);
    if (color) out += "," + format_double(cs[r]);
    out += '\n';
  }
  return out;
}

}  // namespace calibrex
