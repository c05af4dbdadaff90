#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "calibrex/predictions.hpp"

namespace calibrex {

enum class KernelFamily { laplacian, gaussian, triweight };

struct KernelSpec {
  KernelFamily family = KernelFamily::laplacian;
  double bandwidth = 0.4;
};

//! k(a, b) for the family; laplacian and gaussian equal 1 at a == b, the
//! triweight is the normalized density kernel (35/32)(1-u^2)^3 / h.
double kernel_value(const KernelSpec& kernel, double a, double b);

inline constexpr double kNllFloor = 1e-12;

//! Mean -log p(y), probabilities floored at 1e-12.
double nll(const PredictionSet& preds);

//! Mean squared distance between the probability row and the one-hot label.
double brier(const PredictionSet& preds);

//! Largest absolute cumulative gap sum(a_j - r_j)/N over thresholds on the
//! sorted top-label confidences. Ties are summed as one block.
double ksce(std::span<const double> confidence, std::span<const std::uint8_t> correct);
double ksce(const PredictionSet& preds);

struct KdeceOptions {
  std::size_t grid_points = 1024;
  KernelFamily family = KernelFamily::triweight;
  //! Silverman's rule clipped to [1e-3, 0.2] when unset.
  std::optional<double> bandwidth;
};

double silverman_bandwidth(std::span<const double> values);

//! Top-label KDE calibration error: integral of |z - pi(z)| dp(z) where p is
//! the kernel density of the confidences and pi the kernel regression of the
//! correctness indicator, by trapezoid on a uniform grid over [0, 1]. The
//! density is renormalized to unit mass on the grid.
double kdece(std::span<const double> confidence, std::span<const std::uint8_t> correct,
             const KdeceOptions& options = {});
double kdece(const PredictionSet& preds, const KdeceOptions& options = {});

//! Plug-in MMCE: sqrt(sum_ij (a_i - r_i)(a_j - r_j) k(r_i, r_j)) / N.
//! Row sums run on `threads` workers; the result does not depend on the
//! thread count.
double mmce(std::span<const double> confidence, std::span<const std::uint8_t> correct,
            const KernelSpec& kernel = {}, unsigned threads = 0);
double mmce(const PredictionSet& preds, const KernelSpec& kernel = {}, unsigned threads = 0);

//! Lp calibration error with P(Y | f(X)) estimated by equal-width binning of
//! the top-label confidence. p must lie in [1, 2].
double lp_ce(const PredictionSet& preds, double p, std::size_t m);

//! P(in > ood) + 0.5 P(in == ood); in-distribution is the positive class.
double auroc(std::span<const double> in_dist, std::span<const double> ood);

}  // namespace calibrex
