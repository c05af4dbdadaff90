#include "calibrex/predictions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "calibrex/error.hpp"
#include "calibrex/rng.hpp"

namespace calibrex {

double probability_row_tolerance(std::size_t n_classes) {
  return std::max(1e-6, static_cast<double>(n_classes) *
                            static_cast<double>(std::numeric_limits<float>::epsilon()));
}

PredictionSet::PredictionSet(std::vector<double> scores, std::vector<std::int32_t> labels,
                             std::size_t n_classes, ScoreKind kind)
    : scores_(std::move(scores)), labels_(std::move(labels)), n_classes_(n_classes), kind_(kind) {
  if (n_classes_ < 2) {
    throw Error(Errc::invalid_argument, "prediction set needs at least 2 classes");
  }
  if (labels_.empty()) {
    throw Error(Errc::invalid_argument, "prediction set needs at least 1 sample");
  }
  if (scores_.size() != labels_.size() * n_classes_) {
    throw Error(Errc::invalid_argument,
                "score matrix holds " + std::to_string(scores_.size()) + " values, expected " +
                    std::to_string(labels_.size() * n_classes_));
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || static_cast<std::size_t>(labels_[i]) >= n_classes_) {
      throw Error(Errc::label_out_of_range, "row " + std::to_string(i) + ": label " +
                                                std::to_string(labels_[i]) +
                                                " outside [0, " + std::to_string(n_classes_) + ")");
    }
  }
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    if (!std::isfinite(scores_[i])) {
      throw Error(Errc::non_finite, "row " + std::to_string(i / n_classes_) + ": non-finite score");
    }
  }
  if (kind_ == ScoreKind::probabilities) {
    const double tol = probability_row_tolerance(n_classes_);
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      double sum = 0.0;
      for (double p : row(i)) {
        if (p < 0.0 || p > 1.0) {
          throw Error(Errc::invalid_argument,
                      "row " + std::to_string(i) + ": probability outside [0, 1]");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > tol) {
        throw Error(Errc::invalid_argument,
                    "row " + std::to_string(i) + ": probabilities sum to " + std::to_string(sum));
      }
    }
  }
}

PredictionSet PredictionSet::subset(std::span<const std::size_t> indices) const {
  std::vector<double> scores;
  std::vector<std::int32_t> labels;
  scores.reserve(indices.size() * n_classes_);
  labels.reserve(indices.size());
  for (std::size_t i : indices) {
    auto r = row(i);
    scores.insert(scores.end(), r.begin(), r.end());
    labels.push_back(labels_[i]);
  }
  return {std::move(scores), std::move(labels), n_classes_, kind_};
}

std::vector<double> softmax_rows(std::span<const double> logits, std::size_t n_classes) {
  std::vector<double> out(logits.size());
  for (std::size_t start = 0; start < logits.size(); start += n_classes) {
    auto row = logits.subspan(start, n_classes);
    double hi = -std::numeric_limits<double>::infinity();
    for (double z : row) {
      if (!std::isfinite(z)) {
        throw Error(Errc::non_finite,
                    "softmax: non-finite logit in row " + std::to_string(start / n_classes));
      }
      hi = std::max(hi, z);
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < n_classes; ++k) {
      out[start + k] = std::exp(row[k] - hi);
      sum += out[start + k];
    }
    for (std::size_t k = 0; k < n_classes; ++k) out[start + k] /= sum;
  }
  return out;
}

PredictionSet to_probabilities(const PredictionSet& preds) {
  if (preds.is_probabilities()) return preds;
  auto labels = preds.labels();
  return {softmax_rows(preds.scores(), preds.n_classes()),
          std::vector<std::int32_t>(labels.begin(), labels.end()), preds.n_classes(),
          ScoreKind::probabilities};
}

std::size_t argmax(std::span<const double> row) noexcept {
  return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

double accuracy(const PredictionSet& preds) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.n_samples(); ++i) {
    hits += argmax(preds.row(i)) == static_cast<std::size_t>(preds.label(i));
  }
  return static_cast<double>(hits) / static_cast<double>(preds.n_samples());
}

TopLabel top_label(const PredictionSet& preds) {
  const PredictionSet probs = to_probabilities(preds);
  TopLabel out;
  out.confidence.resize(probs.n_samples());
  out.correct.resize(probs.n_samples());
  for (std::size_t i = 0; i < probs.n_samples(); ++i) {
    auto r = probs.row(i);
    const std::size_t top = argmax(r);
    out.confidence[i] = std::clamp(r[top], 0.0, 1.0);
    out.correct[i] = top == static_cast<std::size_t>(probs.label(i)) ? 1 : 0;
  }
  return out;
}

namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_index(rng, i)]);
  }
}

}  // namespace

SplitIndices split_indices(const PredictionSet& preds, const SplitSpec& spec) {
  if (!(spec.validation_fraction > 0.0 && spec.validation_fraction < 1.0)) {
    throw Error(Errc::invalid_argument, "validation fraction must lie in (0, 1)");
  }
  const std::size_t n = preds.n_samples();
  if (n < 5) throw Error(Errc::invalid_argument, "split needs at least 5 samples");
  const auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.validation_fraction));
  if (n_val == 0 || n_val == n) {
    throw Error(Errc::invalid_argument, "validation fraction leaves one side of the split empty");
  }

  Rng rng(spec.seed);
  std::vector<std::size_t> chosen;
  std::vector<std::size_t> rest;

  if (!spec.stratified) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order, rng);
    chosen.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    rest.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  } else {
    // Per-class quotas by largest remainder so the total stays round(N * f).
    std::vector<std::vector<std::size_t>> by_class(preds.n_classes());
    for (std::size_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(preds.label(i))].push_back(i);
    std::vector<std::size_t> quota(by_class.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      const double exact = static_cast<double>(by_class[c].size()) * spec.validation_fraction;
      quota[c] = static_cast<std::size_t>(std::floor(exact));
      assigned += quota[c];
      remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < n_val && r < remainders.size(); ++r) {
      const std::size_t c = remainders[r].second;
      if (quota[c] < by_class[c].size()) {
        ++quota[c];
        ++assigned;
      }
    }
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      shuffle(by_class[c], rng);
      chosen.insert(chosen.end(), by_class[c].begin(),
                    by_class[c].begin() + static_cast<std::ptrdiff_t>(quota[c]));
      rest.insert(rest.end(), by_class[c].begin() + static_cast<std::ptrdiff_t>(quota[c]),
                  by_class[c].end());
    }
  }
  std::sort(chosen.begin(), chosen.end());
  std::sort(rest.begin(), rest.end());
  return {std::move(chosen), std::move(rest)};
}

std::pair<PredictionSet, PredictionSet> split(const PredictionSet& preds, const SplitSpec& spec) {
  const SplitIndices idx = split_indices(preds, spec);
  return {preds.subset(idx.validation), preds.subset(idx.test)};
}

}  // namespace calibrex
