#include "calibrex/temperature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "calibrex/error.hpp"

namespace calibrex {

namespace {

constexpr std::size_t kScanPoints = 64;
constexpr double kTolerance = 1e-5;

void require_logits(const PredictionSet& preds) {
  if (preds.is_probabilities()) {
    throw Error(Errc::invalid_argument, "temperature scaling needs logits, got probabilities");
  }
}

}  // namespace

double temperature_nll(const PredictionSet& logits, double temperature) {
  const double inv = 1.0 / temperature;
  const std::size_t k = logits.n_classes();
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.n_samples(); ++i) {
    auto row = logits.row(i);
    const double hi = *std::max_element(row.begin(), row.end()) * inv;
    double z = 0.0;
    for (std::size_t c = 0; c < k; ++c) z += std::exp(row[c] * inv - hi);
    const double log_p = row[static_cast<std::size_t>(logits.label(i))] * inv - hi - std::log(z);
    sum -= log_p;
  }
  return sum / static_cast<double>(logits.n_samples());
}

Temperature fit_temperature(const PredictionSet& validation) {
  require_logits(validation);
  const double log_lo = std::log(kTemperatureMin);
  const double log_hi = std::log(kTemperatureMax);
  std::size_t evals = 0;
  auto objective = [&](double log_t) {
    ++evals;
    return temperature_nll(validation, std::exp(log_t));
  };

  std::vector<double> grid(kScanPoints);
  std::vector<double> values(kScanPoints);
  std::size_t best = 0;
  for (std::size_t i = 0; i < kScanPoints; ++i) {
    grid[i] = log_lo + (log_hi - log_lo) * static_cast<double>(i) / static_cast<double>(kScanPoints - 1);
    values[i] = objective(grid[i]);
    if (values[i] < values[best]) best = i;
  }
  const double nll_at_one = objective(0.0);
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double scale = std::max(1.0, std::abs(nll_at_one));
  if (*hi_it - *lo_it <= 1e-12 * scale) return {1.0, nll_at_one, evals};

  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[std::min(best + 1, kScanPoints - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (std::exp(b) - std::exp(a) > kTolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  double log_t = fc <= fd ? c : d;
  double fit = std::min(fc, fd);
  if (values[best] < fit) {
    log_t = grid[best];
    fit = values[best];
  }
  if (nll_at_one <= fit) return {1.0, nll_at_one, evals};
  return {std::exp(log_t), fit, evals};
}

PredictionSet apply_temperature(const PredictionSet& logits, double temperature) {
  require_logits(logits);
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(Errc::invalid_argument, "temperature must be positive");
  }
  std::vector<double> scaled(logits.scores().begin(), logits.scores().end());
  if (temperature != 1.0) {
    for (double& z : scaled) z /= temperature;
  }
  auto labels = logits.labels();
  return {softmax_rows(scaled, logits.n_classes()),
          std::vector<std::int32_t>(labels.begin(), labels.end()), logits.n_classes(),
          ScoreKind::probabilities};
}

}  // namespace calibrex
