#pragma once

#include "robust/types.hpp"

#include <string>
#include <vector>

namespace robust {

enum class CorruptionMode { Clean, Additive, Innovational };

const char* to_string(CorruptionMode mode);
CorruptionMode corruption_mode_from_string(const std::string& s);

struct GroundTruthTs {
  VectorXd w_star;
  double sigma = 1.0;
  CorruptionMode mode = CorruptionMode::Clean;
  // Corruption locations as 0-based response indices (time t = index + 1).
  std::vector<Index> e_locations;
  VectorXd e_values;
  VectorXd clean_values;  // uncorrupted series, same layout as TimeSeriesRecord::values
  VectorXd innovations;   // eps_1..eps_n of the clean recursion

  Index k_star() const { return static_cast<Index>(e_locations.size()); }
};

/// values holds y_{-d+1}, ..., y_0, y_1, ..., y_n (length n + d).
struct TimeSeriesRecord {
  VectorXd values;
  Index d = 1;
  std::optional<GroundTruthTs> truth;

  Index n() const { return values.size() - d; }
};

struct LaggedDesign {
  MatrixXd X;  // d x n, column i = (y_{t-1}, ..., y_{t-d}) with t = i + 1
  VectorXd y;  // y_1..y_n
};

/// Clamps every value to [-level, level]. Errors: InvalidClipLevel when level <= 0.
VectorXd clip_series(const VectorXd& values, double level);

/// Robust scale of the innovations: 1.4826 * MAD(first differences) / sqrt(2).
double mad_sigma(const VectorXd& values);

/// Clip level implied by a policy for a series with n responses; unset for ClipNone.
std::optional<double> clip_level_for(const ClipPolicy& policy, const VectorXd& values, Index n);

/// Column i of X holds the d lags of response i. Errors: TooShort when n < 1.
LaggedDesign build_lagged_design(const TimeSeriesRecord& record);

/// Drops the leading `count` responses (and the matching lags).
TimeSeriesRecord drop_leading(const TimeSeriesRecord& record, Index count);

/**
 * @brief Group hard-thresholding estimator for AR(d) under additive outliers.
 *
 * Clips per config.clip, trims leading responses so d divides n, builds the
 * lagged design from the clipped series and runs the IHT iteration with aligned
 * groups of size d. Default k (config.k unset) is 2k* groups from the ground truth.
 * Errors: TooShort, RankDeficient, InvalidK, InvalidClipLevel, NotDivisible (trimming disabled).
 */
Estimate solve_crtse(const TimeSeriesRecord& record, const SolverConfig& config);

/**
 * @brief Pointwise hard-thresholding estimator for AR(d) under innovational outliers.
 *
 * No clipping. Default k is k* from the ground truth.
 * Errors: TooShort, RankDeficient, InvalidK.
 */
Estimate solve_ioard(const TimeSeriesRecord& record, const SolverConfig& config);

/// Plain least squares on the lagged design of the raw series.
Estimate solve_ar_ols(const TimeSeriesRecord& record);

}  // namespace robust
