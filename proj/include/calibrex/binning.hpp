#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "calibrex/predictions.hpp"

namespace calibrex {

enum class BinScheme { equal_width, equal_mass };

inline constexpr std::array<std::size_t, 9> kDefaultBinSizes = {5, 10, 15, 20, 25, 50, 100, 200, 500};

//! m+1 ascending edges over [0, 1]. Bin i is [edges[i], edges[i+1]); the last
//! bin also holds 1.0.
struct BinPartition {
  BinScheme scheme = BinScheme::equal_width;
  std::vector<double> edges;

  [[nodiscard]] std::size_t bin_count() const noexcept { return edges.size() - 1; }
};

BinPartition equal_width_edges(std::size_t m);

//! Edges at the order statistics s[floor(b*N/m)] of the sorted confidences.
//! With distinct values the occupancies differ by at most one. Tied values
//! share a bin, so heavy ties leave some bins empty.
BinPartition equal_mass_edges(std::span<const double> confidences, std::size_t m);
BinPartition equal_mass_edges_sorted(std::span<const double> sorted, std::size_t m);

std::size_t bin_of(double confidence, const BinPartition& partition);
std::vector<std::size_t> assign_bins(std::span<const double> confidences,
                                     const BinPartition& partition);

struct Bin {
  std::size_t count = 0;
  double confidence_sum = 0.0;
  double accuracy_sum = 0.0;

  [[nodiscard]] double confidence() const { return confidence_sum / static_cast<double>(count); }
  [[nodiscard]] double accuracy() const { return accuracy_sum / static_cast<double>(count); }
};

struct BinStats {
  BinPartition partition;
  std::vector<Bin> bins;
  std::size_t total = 0;

  //! Sum of |B_i|/total * |accuracy - confidence|.
  [[nodiscard]] double weighted_gap() const;
  //! Max |accuracy - confidence| over non-empty bins; 0 when all are empty.
  [[nodiscard]] double max_gap() const;
  //! (sum |B_i|/total * |gap|^p)^(1/p).
  [[nodiscard]] double lp_gap(double p) const;
};

//! Accumulates (confidence, outcome) pairs into the bins of `partition`.
BinStats bin_stats(std::span<const double> confidences, std::span<const double> outcomes,
                   BinPartition partition);

// Top-label metrics. Logit inputs are softmaxed first.
double ece(const PredictionSet& preds, std::size_t m, BinScheme scheme = BinScheme::equal_width);
double ece_em(const PredictionSet& preds, std::size_t m);
double mce(const PredictionSet& preds, std::size_t m, BinScheme scheme = BinScheme::equal_width);

// Classwise metrics: every class's own probability column is binned over all
// N samples and scored against the indicator y == k; the per-class sums are
// averaged over K.
double cwce(const PredictionSet& preds, std::size_t m, BinScheme scheme = BinScheme::equal_width);
double cwce_em(const PredictionSet& preds, std::size_t m);

BinStats top_label_bins(const TopLabel& top, std::size_t m, BinScheme scheme);

struct ReliabilityBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  std::optional<double> confidence;
  std::optional<double> accuracy;
  std::optional<double> gap;  // accuracy - confidence
};

struct ReliabilityDiagram {
  std::vector<ReliabilityBin> bins;
  std::size_t total = 0;
};

ReliabilityDiagram reliability_data(const PredictionSet& preds, std::size_t m,
                                    BinScheme scheme = BinScheme::equal_width);

//! CSV `bin_lo,bin_hi,count,confidence,accuracy,gap`; empty bins leave the
//! last three cells blank.
std::string format_reliability_csv(const ReliabilityDiagram& diagram);

}  // namespace calibrex
