#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace calibrex {

enum class ScoreKind : std::uint8_t { logits = 0, probabilities = 1 };

//! Per-sample class scores plus integer labels. Immutable once built.
//!
//! Scores are row-major, N rows of K values, held in 64-bit floats. When the
//! set is flagged as probabilities every row must be a distribution.
class PredictionSet {
 public:
  PredictionSet(std::vector<double> scores, std::vector<std::int32_t> labels,
                std::size_t n_classes, ScoreKind kind);

  [[nodiscard]] std::size_t n_samples() const noexcept { return labels_.size(); }
  [[nodiscard]] std::size_t n_classes() const noexcept { return n_classes_; }
  [[nodiscard]] ScoreKind kind() const noexcept { return kind_; }
  [[nodiscard]] bool is_probabilities() const noexcept {
    return kind_ == ScoreKind::probabilities;
  }

  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
    return {scores_.data() + i * n_classes_, n_classes_};
  }
  [[nodiscard]] std::span<const double> scores() const noexcept { return scores_; }
  [[nodiscard]] std::span<const std::int32_t> labels() const noexcept { return labels_; }
  [[nodiscard]] std::int32_t label(std::size_t i) const noexcept { return labels_[i]; }

  //! Rows selected by `indices`, in that order.
  [[nodiscard]] PredictionSet subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;

 private:
  std::vector<double> scores_;
  std::vector<std::int32_t> labels_;
  std::size_t n_classes_;
  ScoreKind kind_;
};

//! Row-sum tolerance for probability rows. float32 storage of K
//! probabilities can drift by about K ulps.
double probability_row_tolerance(std::size_t n_classes);

//! Row-wise softmax of logits, shifted by the row max. Throws on non-finite
//! input.
std::vector<double> softmax_rows(std::span<const double> logits, std::size_t n_classes);

//! Probability view of `preds`: returned as-is when already probabilities,
//! softmax otherwise.
PredictionSet to_probabilities(const PredictionSet& preds);

//! Index of the first maximal entry.
std::size_t argmax(std::span<const double> row) noexcept;

//! Fraction of rows whose argmax equals the label.
double accuracy(const PredictionSet& preds);

//! Top-label confidence and correctness, the input of every top-label metric.
struct TopLabel {
  std::vector<double> confidence;
  std::vector<std::uint8_t> correct;
};

TopLabel top_label(const PredictionSet& preds);

struct SplitSpec {
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;
  bool stratified = false;
};

struct SplitIndices {
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

//! Seeded shuffle then prefix-take; both index lists come back sorted.
SplitIndices split_indices(const PredictionSet& preds, const SplitSpec& spec);

std::pair<PredictionSet, PredictionSet> split(const PredictionSet& preds,
                                              const SplitSpec& spec);

}  // namespace calibrex
