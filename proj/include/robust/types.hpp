#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace robust {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Index = Eigen::Index;

/// Planted quantities of a synthetic regression instance.
struct GroundTruthReg {
  VectorXd w_star;
  VectorXd b_star;
  VectorXd eps;
  std::vector<Index> support;  // sorted, 0-based
  double sigma = 0.0;

  Index k_star() const { return static_cast<Index>(support.size()); }
};

/// y = X^T w* + b* + eps with X stored d x n (column i is the covariate x_i).
struct RegressionProblem {
  MatrixXd X;
  VectorXd y;
  std::optional<GroundTruthReg> truth;

  Index n() const { return X.cols(); }
  Index d() const { return X.rows(); }
};

struct ClipNone {};
struct ClipFixed {
  double level;
};
/// level = multiplier * sigma_hat, sigma_hat = 1.4826 * MAD(first differences) / sqrt(2).
/// An unset multiplier means 3 * sqrt(2 log n).
struct ClipAutoMad {
  std::optional<double> multiplier;
};
using ClipPolicy = std::variant<ClipNone, ClipFixed, ClipAutoMad>;

struct SolverConfig {
  // Thresholding parameter. When unset, solvers fall back to the ground truth:
  // k* for pointwise solvers and 2k* groups for the group solver.
  std::optional<Index> k;
  double tol = 1e-8;
  int max_iters = 500;
  std::uint64_t seed = 0;
  ClipPolicy clip = ClipAutoMad{};
  // Group solver only: drop leading samples so that d divides n.
  bool trim_to_multiple = true;
};

enum class Termination { Converged, MaxIters };

inline const char* to_string(Termination t) {
  return t == Termination::Converged ? "Converged" : "MaxIters";
}

struct Estimate {
  VectorXd w;
  VectorXd b;
  int iters = 0;
  Termination termination = Termination::MaxIters;
  double objective = 0.0;  // 0.5 * ||(I - P_X)(y - b)||^2
  Index k = 0;             // thresholding parameter actually used
  // Time-series solvers: leading responses dropped so the group size divides n,
  // and the clip level applied to the series (unset when not clipped).
  Index trimmed = 0;
  std::optional<double> clip_level;
};

struct TraceRow {
  int iter = 0;
  double lambda_norm = 0.0;  // ||(XX^T)^{-1} X (b^t - b*)||
  Index md = 0;              // missed detections
  Index fa = 0;              // false alarms
  Index ci = 0;              // correct identifications
  double b_err = 0.0;
  double objective = 0.0;
  double w_err = 0.0;        // ||w^t - w*||, w^t recomputed from b^t
};

struct DiagnosticTrace {
  std::vector<TraceRow> rows;
};

}  // namespace robust
