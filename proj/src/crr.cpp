#include "robust/crr.hpp"

#include "robust/error.hpp"
#include "robust/thresholding.hpp"

#include <algorithm>
#include <string>

namespace robust {

Estimate iterate_thresholded(const Projector& proj, const VectorXd& y, const VectorXd& b0,
                             const Thresholder& threshold, const SolverConfig& config,
                             const IterationObserver& observer) {
  if (y.size() != proj.n() || b0.size() != proj.n()) {
    throw Error(ErrorCode::InvalidArgs, "shape mismatch between design, response and b0");
  }
  if (config.max_iters < 1 || !(config.tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgs, "need max_iters >= 1 and tol > 0");
  }
  const VectorXd residual = proj.apply_complement(y);
  VectorXd b = b0;
  if (observer) observer(0, b);

  Estimate est;
  for (int it = 1; it <= config.max_iters; ++it) {
    VectorXd next = threshold(proj.apply(b) + residual);
    const double step = (next - b).norm();
    b = std::move(next);
    est.iters = it;
    if (observer) observer(it, b);
    if (step <= config.tol) {
      est.termination = Termination::Converged;
      break;
    }
  }
  est.w = proj.coefficients(y - b);
  est.objective = proj.objective(y, b);
  est.b = std::move(b);
  return est;
}

VectorXd crr_step(const Projector& proj, const VectorXd& y, const VectorXd& b, Index k) {
  return hard_threshold(proj.apply(b) + proj.apply_complement(y), k);
}

VectorXd crr_step(const MatrixXd& p_dense, const VectorXd& y, const VectorXd& b, Index k) {
  if (p_dense.rows() != y.size() || p_dense.cols() != y.size() || b.size() != y.size()) {
    throw Error(ErrorCode::InvalidArgs, "shape mismatch in crr_step");
  }
  return hard_threshold(p_dense * b + (y - p_dense * y), k);
}

Index resolve_pointwise_k(const SolverConfig& config, const std::optional<GroundTruthReg>& truth, Index n) {
  Index k = 0;
  if (config.k) {
    k = *config.k;
  } else if (truth) {
    k = truth->k_star();
  } else {
    throw Error(ErrorCode::InvalidK, "k unset and no ground truth to default from");
  }
  if (k < 0 || k > n) {
    throw Error(ErrorCode::InvalidK, "k=" + std::to_string(k) + " outside [0, " + std::to_string(n) + "]");
  }
  return k;
}

Estimate solve_crr(const RegressionProblem& problem, const SolverConfig& config) {
  if (problem.y.size() != problem.n()) {
    throw Error(ErrorCode::InvalidArgs, "response length does not match design");
  }
  const Index k = resolve_pointwise_k(config, problem.truth, problem.n());
  const Projector proj(problem.X);
  Estimate est = iterate_thresholded(proj, problem.y, VectorXd::Zero(problem.n()),
                                     [k](const VectorXd& v) { return hard_threshold(v, k); }, config);
  est.k = k;
  return est;
}

TraceRow trace_row(const Projector& proj, const VectorXd& y, const VectorXd& b, const GroundTruthReg& truth,
                   int iter) {
  TraceRow row;
  row.iter = iter;
  row.lambda_norm = proj.coefficients(b - truth.b_star).norm();
  const std::vector<Index> est_support = support_of(b);
  std::vector<Index> common;
  std::set_intersection(est_support.begin(), est_support.end(), truth.support.begin(), truth.support.end(),
                        std::back_inserter(common));
  row.ci = static_cast<Index>(common.size());
  row.md = truth.k_star() - row.ci;
  row.fa = static_cast<Index>(est_support.size()) - row.ci;
  row.b_err = (b - truth.b_star).norm();
  row.objective = proj.objective(y, b);
  row.w_err = (proj.coefficients(y - b) - truth.w_star).norm();
  return row;
}

std::pair<Estimate, DiagnosticTrace> solve_crr_traced(const RegressionProblem& problem,
                                                      const SolverConfig& config) {
  if (!problem.truth) {
    throw Error(ErrorCode::MissingTruth, "traced solve needs the planted model");
  }
  const Index k = resolve_pointwise_k(config, problem.truth, problem.n());
  const Projector proj(problem.X);
  DiagnosticTrace trace;
  const GroundTruthReg& truth = *problem.truth;
  Estimate est = iterate_thresholded(
      proj, problem.y, VectorXd::Zero(problem.n()), [k](const VectorXd& v) { return hard_threshold(v, k); },
      config, [&](int it, const VectorXd& b) { trace.rows.push_back(trace_row(proj, problem.y, b, truth, it)); });
  est.k = k;
  return {std::move(est), std::move(trace)};
}

}  // namespace robust
