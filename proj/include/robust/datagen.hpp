#pragma once

#include "robust/ar.hpp"
#include "robust/types.hpp"

#include <cstdint>
#include <optional>

namespace robust {

enum class CorruptionSign { Positive, Symmetric };

/// k* corruptions with magnitudes U(low, high).
struct CorruptionPlan {
  Index k_star = 0;
  double low = 10.0;
  double high = 20.0;
  CorruptionSign sign = CorruptionSign::Positive;
  // Only read by inject_additive; generators that take their own seed use that one.
  std::uint64_t seed = 0;
};

struct ArGenOptions {
  Index burn_in = 100;
  std::optional<VectorXd> forced_w;  // test hook: skip the random draw
  double w_norm = -1.0;              // < 0 means 0.9 / sqrt(d)
  double max_radius = 0.99;
  int max_redraws = 100000;
};

struct CoefficientDraw {
  VectorXd w;
  int redraws = 0;
};

/// Gaussian design, unit-norm w*, N(0, sigma^2) noise, k* corruptions at uniform locations.
/// Errors: InvalidSize, InvalidPlan.
RegressionProblem gen_regression(Index n, Index d, double sigma, const CorruptionPlan& plan, std::uint64_t seed);

/// Uniform direction scaled to `norm`, redrawn until the companion spectral radius is below max_radius.
/// Errors: NonStationary when max_redraws is exhausted.
CoefficientDraw draw_ar_coefficients(Index d, std::uint64_t seed, double norm, double max_radius,
                                     int max_redraws = 100000);

/// Clean stationary AR(d) series of n + d values recorded after burn-in. Errors: InvalidSize.
TimeSeriesRecord gen_ar_series(Index n, Index d, double sigma, std::uint64_t seed, const ArGenOptions& opts = {});

/// y_i = x_i + e*_i on k* locations among the n responses. Errors: InvalidPlan.
TimeSeriesRecord inject_additive(const TimeSeriesRecord& clean, const CorruptionPlan& plan);

/// Corruptions added to the innovations inside the recursion. Errors: InvalidSize, InvalidPlan.
TimeSeriesRecord gen_ar_series_io(Index n, Index d, double sigma, const CorruptionPlan& plan, std::uint64_t seed,
                                  const ArGenOptions& opts = {});

/// Sorted k-subset of [0, n) drawn by a partial Fisher-Yates shuffle of the CorruptionLocations stream.
std::vector<Index> draw_locations(Index n, Index k, std::uint64_t seed);

}  // namespace robust
