#pragma once

#include <cstddef>

#include "calibrex/predictions.hpp"

namespace calibrex {

inline constexpr double kTemperatureMin = 0.05;
inline constexpr double kTemperatureMax = 20.0;

struct Temperature {
  double value = 1.0;
  double fit_nll = 0.0;
  std::size_t iterations = 0;
};

//! Mean NLL of softmax(z / T) against the labels.
double temperature_nll(const PredictionSet& logits, double temperature);

/// Fits one temperature by minimizing validation NLL over [0.05, 20].
///
/// A coarse log-spaced scan brackets the minimum, then golden-section search
/// on log T narrows it to |dT| < 1e-5. The scan makes the result robust when
/// the objective is not unimodal. A flat objective, or one where T = 1 is not
/// beaten, returns T = 1.
Temperature fit_temperature(const PredictionSet& validation);

//! softmax(z / T) as a probability set; argmax per row is unchanged.
PredictionSet apply_temperature(const PredictionSet& logits, double temperature);

}  // namespace calibrex
