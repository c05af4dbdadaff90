#include "calibrex/binning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "calibrex/error.hpp"
#include "calibrex/fileutil.hpp"

namespace calibrex {

namespace {

void require_bins(std::size_t m) {
  if (m == 0) throw Error(Errc::invalid_argument, "bin count must be positive");
}

BinPartition partition_for(std::span<const double> confidences, std::size_t m, BinScheme scheme) {
  return scheme == BinScheme::equal_width ? equal_width_edges(m) : equal_mass_edges(confidences, m);
}

}  // namespace

BinPartition equal_width_edges(std::size_t m) {
  require_bins(m);
  BinPartition p{BinScheme::equal_width, std::vector<double>(m + 1)};
  for (std::size_t i = 0; i <= m; ++i) p.edges[i] = static_cast<double>(i) / static_cast<double>(m);
  return p;
}

BinPartition equal_mass_edges_sorted(std::span<const double> sorted, std::size_t m) {
  require_bins(m);
  const std::size_t n = sorted.size();
  if (m > n) {
    throw Error(Errc::invalid_argument, "equal-mass binning needs at least m=" + std::to_string(m) +
                                            " samples, got " + std::to_string(n));
  }
  BinPartition p{BinScheme::equal_mass, std::vector<double>(m + 1)};
  p.edges[0] = 0.0;
  p.edges[m] = 1.0;
  for (std::size_t b = 1; b < m; ++b) p.edges[b] = sorted[b * n / m];
  return p;
}

BinPartition equal_mass_edges(std::span<const double> confidences, std::size_t m) {
  std::vector<double> sorted(confidences.begin(), confidences.end());
  std::sort(sorted.begin(), sorted.end());
  return equal_mass_edges_sorted(sorted, m);
}

std::size_t bin_of(double confidence, const BinPartition& partition) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw Error(Errc::invalid_argument, "confidence " + format_double(confidence) + " outside [0, 1]");
  }
  const auto& e = partition.edges;
  const std::size_t m = partition.bin_count();
  const auto it = std::upper_bound(e.begin(), e.end(), confidence);
  const auto idx = static_cast<std::size_t>(it - e.begin());
  return std::min(idx == 0 ? 0 : idx - 1, m - 1);
}

std::vector<std::size_t> assign_bins(std::span<const double> confidences,
                                     const BinPartition& partition) {
  std::vector<std::size_t> out(confidences.size());
  for (std::size_t i = 0; i < confidences.size(); ++i) out[i] = bin_of(confidences[i], partition);
  return out;
}

double BinStats::weighted_gap() const {
  double sum = 0.0;
  for (const Bin& b : bins) sum += std::abs(b.accuracy_sum - b.confidence_sum);
  return sum / static_cast<double>(total);
}

double BinStats::max_gap() const {
  double worst = 0.0;
  for (const Bin& b : bins) {
    if (b.count > 0) worst = std::max(worst, std::abs(b.accuracy() - b.confidence()));
  }
  return worst;
}

double BinStats::lp_gap(double p) const {
  double sum = 0.0;
  for (const Bin& b : bins) {
    if (b.count == 0) continue;
    sum += static_cast<double>(b.count) / static_cast<double>(total) *
           std::pow(std::abs(b.accuracy() - b.confidence()), p);
  }
  return std::pow(sum, 1.0 / p);
}

BinStats bin_stats(std::span<const double> confidences, std::span<const double> outcomes,
                   BinPartition partition) {
  if (confidences.size() != outcomes.size()) {
    throw Error(Errc::invalid_argument, "confidence and outcome lengths differ");
  }
  if (confidences.empty()) throw Error(Errc::invalid_argument, "no samples to bin");
  BinStats stats;
  stats.bins.resize(partition.bin_count());
  stats.total = confidences.size();
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    Bin& b = stats.bins[bin_of(confidences[i], partition)];
    ++b.count;
    b.confidence_sum += confidences[i];
    b.accuracy_sum += outcomes[i];
  }
  stats.partition = std::move(partition);
  return stats;
}

BinStats top_label_bins(const TopLabel& top, std::size_t m, BinScheme scheme) {
  std::vector<double> outcomes(top.correct.begin(), top.correct.end());
  return bin_stats(top.confidence, outcomes, partition_for(top.confidence, m, scheme));
}

double ece(const PredictionSet& preds, std::size_t m, BinScheme scheme) {
  return top_label_bins(top_label(preds), m, scheme).weighted_gap();
}

double ece_em(const PredictionSet& preds, std::size_t m) {
  return ece(preds, m, BinScheme::equal_mass);
}

double mce(const PredictionSet& preds, std::size_t m, BinScheme scheme) {
  return top_label_bins(top_label(preds), m, scheme).max_gap();
}

double cwce(const PredictionSet& preds, std::size_t m, BinScheme scheme) {
  require_bins(m);
  const PredictionSet probs = to_probabilities(preds);
  const std::size_t n = probs.n_samples();
  const std::size_t k = probs.n_classes();
  std::vector<double> column(n);
  std::vector<double> is_class(n);
  const BinPartition width = equal_width_edges(m);
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = std::clamp(probs.row(i)[c], 0.0, 1.0);
      is_class[i] = static_cast<std::size_t>(probs.label(i)) == c ? 1.0 : 0.0;
    }
    BinPartition part = scheme == BinScheme::equal_width ? width : equal_mass_edges(column, m);
    total += bin_stats(column, is_class, std::move(part)).weighted_gap();
  }
  return total / static_cast<double>(k);
}

double cwce_em(const PredictionSet& preds, std::size_t m) {
  return cwce(preds, m, BinScheme::equal_mass);
}

ReliabilityDiagram reliability_data(const PredictionSet& preds, std::size_t m, BinScheme scheme) {
  const BinStats stats = top_label_bins(top_label(preds), m, scheme);
  ReliabilityDiagram out;
  out.total = stats.total;
  for (std::size_t i = 0; i < stats.bins.size(); ++i) {
    const Bin& b = stats.bins[i];
    ReliabilityBin rb;
    rb.lo = stats.partition.edges[i];
    rb.hi = stats.partition.edges[i + 1];
    rb.count = b.count;
    if (b.count > 0) {
      rb.confidence = b.confidence();
      rb.accuracy = b.accuracy();
      rb.gap = *rb.accuracy - *rb.confidence;
    }
    out.bins.push_back(rb);
  }
  return out;
}

std::string format_reliability_csv(const ReliabilityDiagram& diagram) {
  std::string out = "bin_lo,bin_hi,count,confidence,accuracy,gap\n";
  auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& b : diagram.bins) {
    out += format_double(b.lo) + ',' + format_double(b.hi) + ',' + std::to_string(b.count) + ',' +
           cell(b.confidence) + ',' + cell(b.accuracy) + ',' + cell(b.gap) + '\n';
  }
  return out;
}

}  // namespace calibrex
