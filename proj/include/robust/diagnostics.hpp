#pragma once

#include "robust/kernels.hpp"
#include "robust/thresholding.hpp"
#include "robust/types.hpp"

#include <cstdint>
#include <vector>

namespace robust {

inline constexpr std::uint64_t kEnumerationLimit = 1'000'000;

struct SubsetConstants {
  double lambda_k = 0.0;  // strong convexity: min over supports of lambda_min(X_S X_S^T)
  double Lambda_k = 0.0;  // strong smoothness: max over supports of lambda_max(X_S X_S^T)
};

/// Exact SSC/SSS constants over all |S| = k. Errors: TooLarge when C(n, k) > 1e6, InvalidK.
SubsetConstants ssc_sss_exact(const MatrixXd& X, Index k);

/// Exact group analogues over unions of k aligned groups. Errors: TooLarge, InvalidK.
SubsetConstants sgsc_sgss_exact(const MatrixXd& X, Index k, const GroupPartition& part);

/// Extremes over `samples` uniformly drawn supports. One-sided: lambda_k is an upper
/// estimate of the exact constant and Lambda_k a lower estimate.
SubsetConstants ssc_sss_sampled(const MatrixXd& X, Index k, std::uint64_t samples, std::uint64_t seed);

struct TrimmedLsResult {
  VectorXd b;
  VectorXd w;
  std::vector<Index> support;
  double objective = 0.0;
};

/// Global minimizer of 0.5 ||(I - P_X)(y - b)||^2 over k-sparse b by support enumeration.
/// Ties go to the lexicographically smallest support. Errors: TooLarge, InvalidK, RankDeficient.
TrimmedLsResult oracle_trimmed_ls(const MatrixXd& X, const VectorXd& y, Index k);

struct MomentEstimate {
  VectorXd mean;
  VectorXd std_error;
  std::uint64_t samples = 0;
};

/// Monte-Carlo estimate of E[1{|y| > tau} y x], x ~ N(0, I), g ~ N(0, sigma^2), y = x^T lambda + g.
/// Errors: HypothesisViolated when ||lambda|| > sigma / 100 or tau <= 0.
MomentEstimate truncated_moment_mc(const VectorXd& lambda, double sigma, double tau, std::uint64_t n_samples,
                                   std::uint64_t seed,
                                   kernels::MomentEstimator est = kernels::MomentEstimator::ControlVariate);

/// (I + v v^T)^p through the rank-one identity I + ((1 + |v|^2)^p - 1) v v^T / |v|^2.
MatrixXd rank_one_power(const VectorXd& v, double p);

struct MomentQuadrature {
  double c_tau = 0.0;
  VectorXd vec;  // c_tau * D^{-3} lambda
};

/// C_tau by adaptive Gauss-Kronrod quadrature over |y| > tau, returned with C_tau D^{-3} lambda.
/// Errors: HypothesisViolated.
MomentQuadrature truncated_moment_quadrature(const VectorXd& lambda, double sigma, double tau);

/// 2.001 / (sigma sqrt(2 pi)) * (tau + 1/tau) * exp(-tau^2 / (2.001 sigma^2)).
double moment_c_tau_bound(double sigma, double tau);

/// sigma sqrt(k + k*) sqrt(1 + 2e sqrt(6 log(e n / (delta (k + k*))))). Errors: InvalidArgs.
double bound_e0(Index n, Index d, Index k, Index k_star, double sigma, double delta);

/// gamma n (1 + 3e sqrt(6 log(e / gamma))); a soft leading-term diagnostic. Errors: InvalidArgs.
double bound_gaussian_sss_leading(double gamma, Index n);

}  // namespace robust
