#pragma once

#include "robust/linalg.hpp"
#include "robust/types.hpp"

#include <functional>
#include <utility>

namespace robust {

using Thresholder = std::function<VectorXd(const VectorXd&)>;
using IterationObserver = std::function<void(int iter, const VectorXd& b)>;

/**
 * @brief Unit-step projected gradient on f(b) = 0.5 ||(I - P_X)(y - b)||^2.
 *
 * Runs b <- threshold(P_X b + (I - P_X) y) from `b0` until the step norm drops to
 * config.tol or config.max_iters updates were made, then fits w on y - b.
 * The observer, when set, sees b^0 (iter 0) and every iterate after it.
 * Shared by the pointwise and group solvers.
 */
Estimate iterate_thresholded(const Projector& proj, const VectorXd& y, const VectorXd& b0,
                             const Thresholder& threshold, const SolverConfig& config,
                             const IterationObserver& observer = {});

/// HT_k(P b + (I - P) y).
VectorXd crr_step(const Projector& proj, const VectorXd& y, const VectorXd& b, Index k);

/// Same update with an explicit dense projector.
VectorXd crr_step(const MatrixXd& p_dense, const VectorXd& y, const VectorXd& b, Index k);

/// config.k, or k* from the ground truth when unset. Errors: InvalidK.
Index resolve_pointwise_k(const SolverConfig& config, const std::optional<GroundTruthReg>& truth, Index n);

/// Consistent robust regression: pointwise hard thresholding on the corruption vector.
/// Errors: RankDeficient, InvalidK.
Estimate solve_crr(const RegressionProblem& problem, const SolverConfig& config);

/// solve_crr plus per-iteration ground-truth diagnostics. Errors: MissingTruth.
std::pair<Estimate, DiagnosticTrace> solve_crr_traced(const RegressionProblem& problem,
                                                      const SolverConfig& config);

/// Support bookkeeping of one iterate against the planted support.
TraceRow trace_row(const Projector& proj, const VectorXd& y, const VectorXd& b, const GroundTruthReg& truth,
                   int iter);

}  // namespace robust
