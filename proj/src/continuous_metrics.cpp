#include "calibrex/continuous_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "calibrex/binning.hpp"
#include "calibrex/error.hpp"

namespace calibrex {

namespace {

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw Error(Errc::invalid_argument, "confidence and correctness lengths differ");
  if (a == 0) throw Error(Errc::invalid_argument, "metric needs at least one sample");
}

void require_bandwidth(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(Errc::degenerate, "kernel bandwidth must be a positive finite number");
  }
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double quantile7(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double kernel_value(const KernelSpec& kernel, double a, double b) {
  const double u = (a - b) / kernel.bandwidth;
  switch (kernel.family) {
    case KernelFamily::laplacian:
      return std::exp(-std::abs(u));
    case KernelFamily::gaussian:
      return std::exp(-0.5 * u * u);
    case KernelFamily::triweight: {
      if (std::abs(u) >= 1.0) return 0.0;
      const double t = 1.0 - u * u;
      return 35.0 / 32.0 * t * t * t / kernel.bandwidth;
    }
  }
  return 0.0;
}

double nll(const PredictionSet& preds) {
  const PredictionSet probs = to_probabilities(preds);
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.n_samples(); ++i) {
    const double p = probs.row(i)[static_cast<std::size_t>(probs.label(i))];
    sum -= std::log(std::max(p, kNllFloor));
  }
  return sum / static_cast<double>(probs.n_samples());
}

double brier(const PredictionSet& preds) {
  const PredictionSet probs = to_probabilities(preds);
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.n_samples(); ++i) {
    auto row = probs.row(i);
    const auto y = static_cast<std::size_t>(probs.label(i));
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double d = row[k] - (k == y ? 1.0 : 0.0);
      sum += d * d;
    }
  }
  return sum / static_cast<double>(probs.n_samples());
}

double ksce(std::span<const double> confidence, std::span<const std::uint8_t> correct) {
  require_same_length(confidence.size(), correct.size());
  const std::size_t n = confidence.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return confidence[a] < confidence[b]; });
  double cum = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < n;) {
    const double r = confidence[order[i]];
    for (; i < n && confidence[order[i]] == r; ++i) {
      cum += static_cast<double>(correct[order[i]]) - confidence[order[i]];
    }
    worst = std::max(worst, std::abs(cum));
  }
  return worst / static_cast<double>(n);
}

double ksce(const PredictionSet& preds) {
  const TopLabel top = top_label(preds);
  return ksce(top.confidence, top.correct);
}

double silverman_bandwidth(std::span<const double> values) {
  const std::size_t n = values.size();
  double h = 0.0;
  if (n >= 2) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double iqr = (quantile7(sorted, 0.75) - quantile7(sorted, 0.25)) / 1.34;
    double spread = std::min(sd, iqr);
    if (spread <= 0.0) spread = std::max(sd, iqr);
    h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
  }
  return std::clamp(h, 1e-3, 0.2);
}

double kdece(std::span<const double> confidence, std::span<const std::uint8_t> correct,
             const KdeceOptions& options) {
  require_same_length(confidence.size(), correct.size());
  if (options.grid_points < 2) throw Error(Errc::invalid_argument, "KDECE grid needs at least 2 points");
  const double h = options.bandwidth ? *options.bandwidth : silverman_bandwidth(confidence);
  require_bandwidth(h);
  const KernelSpec kernel{options.family, h};

  const std::size_t n = confidence.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return confidence[a] < confidence[b]; });
  std::vector<double> r(n);
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = confidence[order[i]];
    a[i] = correct[order[i]];
  }

  const bool compact = options.family == KernelFamily::triweight;
  const std::size_t g_count = options.grid_points;
  const double dz = 1.0 / static_cast<double>(g_count - 1);
  double mass = 0.0;
  double integral = 0.0;
  for (std::size_t g = 0; g < g_count; ++g) {
    const double z = static_cast<double>(g) * dz;
    std::size_t lo = 0;
    std::size_t hi = n;
    if (compact) {
      lo = static_cast<std::size_t>(std::upper_bound(r.begin(), r.end(), z - h) - r.begin());
      hi = static_cast<std::size_t>(std::lower_bound(r.begin(), r.end(), z + h) - r.begin());
    }
    double dens = 0.0;
    double hits = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double w = kernel_value(kernel, z, r[i]);
      dens += w;
      hits += w * a[i];
    }
    if (dens <= 0.0) continue;
    const double weight = (g == 0 || g + 1 == g_count) ? 0.5 : 1.0;
    const double p = dens / static_cast<double>(n);
    mass += weight * p;
    integral += weight * p * std::abs(z - hits / dens);
  }
  if (mass <= 0.0) throw Error(Errc::degenerate, "KDE density vanishes on the whole grid");
  return integral / mass;
}

double kdece(const PredictionSet& preds, const KdeceOptions& options) {
  const TopLabel top = top_label(preds);
  return kdece(top.confidence, top.correct, options);
}

double mmce(std::span<const double> confidence, std::span<const std::uint8_t> correct,
            const KernelSpec& kernel, unsigned threads) {
  require_same_length(confidence.size(), correct.size());
  require_bandwidth(kernel.bandwidth);
  const std::size_t n = confidence.size();
  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i) resid[i] = static_cast<double>(correct[i]) - confidence[i];

  // terms[i] = d_i^2 k(r_i, r_i) + 2 d_i sum_{j>i} d_j k(r_i, r_j)
  std::vector<double> terms(n);
  auto rows = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < n; i += step) {
      double upper = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        upper += resid[j] * kernel_value(kernel, confidence[i], confidence[j]);
      }
      terms[i] = resid[i] * resid[i] * kernel_value(kernel, confidence[i], confidence[i]) +
                 2.0 * resid[i] * upper;
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n / 256)));
  if (threads <= 1) {
    rows(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(rows, t, threads);
    for (auto& th : pool) th.join();
  }
  const double total = pairwise_sum(terms);
  return std::sqrt(std::max(total, 0.0)) / static_cast<double>(n);
}

double mmce(const PredictionSet& preds, const KernelSpec& kernel, unsigned threads) {
  const TopLabel top = top_label(preds);
  return mmce(top.confidence, top.correct, kernel, threads);
}

double lp_ce(const PredictionSet& preds, double p, std::size_t m) {
  if (!(p >= 1.0 && p <= 2.0)) throw Error(Errc::invalid_argument, "CE_p needs p in [1, 2]");
  return top_label_bins(top_label(preds), m, BinScheme::equal_width).lp_gap(p);
}

double auroc(std::span<const double> in_dist, std::span<const double> ood) {
  if (in_dist.empty() || ood.empty()) {
    throw Error(Errc::invalid_argument, "AUROC needs non-empty in-distribution and OoD scores");
  }
  std::vector<double> sorted(ood.begin(), ood.end());
  for (double v : sorted) {
    if (std::isnan(v)) throw Error(Errc::non_finite, "AUROC: NaN OoD score");
  }
  std::sort(sorted.begin(), sorted.end());
  // Integer counts keep U exact; halves are exact in binary.
  double u = 0.0;
  for (double x : in_dist) {
    if (std::isnan(x)) throw Error(Errc::non_finite, "AUROC: NaN in-distribution score");
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x);
    const auto hi = std::upper_bound(lo, sorted.end(), x);
    u += static_cast<double>(lo - sorted.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return u / (static_cast<double>(in_dist.size()) * static_cast<double>(ood.size()));
}

}  // namespace calibrex
