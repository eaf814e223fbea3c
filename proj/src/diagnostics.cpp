#include "robust/diagnostics.hpp"

#include "robust/error.hpp"
#include "robust/linalg.hpp"
#include "robust/rng.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

namespace robust {

namespace {

void check_enumeration(std::uint64_t items, Index k) {
  if (k < 0 || static_cast<std::uint64_t>(k) > items) {
    throw Error(ErrorCode::InvalidK, "k=" + std::to_string(k) + " outside [0, " + std::to_string(items) + "]");
  }
  const std::uint64_t count = kernels::binomial(items, static_cast<std::uint64_t>(k));
  if (count > kEnumerationLimit) {
    throw Error(ErrorCode::TooLarge, "C(" + std::to_string(items) + ", " + std::to_string(k) + ") = " +
                                         std::to_string(count) + " exceeds the enumeration limit");
  }
}

SubsetConstants from_kernel(const kernels::SubsetExtrema& e) { return {e.lambda_min, e.lambda_max}; }

void check_hypothesis(const VectorXd& lambda, double sigma, double tau) {
  if (!(sigma > 0.0) || !(tau > 0.0)) {
    throw Error(ErrorCode::HypothesisViolated, "need sigma > 0 and tau > 0");
  }
  if (lambda.norm() > sigma / 100.0) {
    throw Error(ErrorCode::HypothesisViolated,
                "||lambda|| = " + std::to_string(lambda.norm()) + " exceeds sigma/100");
  }
}

}  // namespace

SubsetConstants ssc_sss_exact(const MatrixXd& X, Index k) {
  check_enumeration(static_cast<std::uint64_t>(X.cols()), k);
  std::vector<std::vector<Index>> items(static_cast<std::size_t>(X.cols()));
  for (Index i = 0; i < X.cols(); ++i) items[i] = {i};
  return from_kernel(kernels::parallel::subset_extrema(X, items, k));
}

SubsetConstants sgsc_sgss_exact(const MatrixXd& X, Index k, const GroupPartition& part) {
  if (part.n() != X.cols()) throw Error(ErrorCode::InvalidArgs, "partition does not match the design");
  check_enumeration(static_cast<std::uint64_t>(part.count()), k);
  std::vector<std::vector<Index>> items(static_cast<std::size_t>(part.count()));
  for (Index g = 0; g < part.count(); ++g) {
    for (Index i = part.begin(g); i < part.end(g); ++i) items[g].push_back(i);
  }
  return from_kernel(kernels::parallel::subset_extrema(X, items, k));
}

SubsetConstants ssc_sss_sampled(const MatrixXd& X, Index k, std::uint64_t samples, std::uint64_t seed) {
  const Index n = X.cols();
  if (k < 0 || k > n) throw Error(ErrorCode::InvalidK, "k outside [0, n]");
  if (samples < 1) throw Error(ErrorCode::InvalidArgs, "need at least one sample");
  CounterRng rng(seed, Stream::SupportSampling);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  SubsetConstants out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  MatrixXd gram(X.rows(), X.rows());
  for (std::uint64_t s = 0; s < samples; ++s) {
    std::iota(perm.begin(), perm.end(), Index{0});
    gram.setZero();
    for (Index i = 0; i < k; ++i) {
      std::uniform_int_distribution<Index> pick(i, n - 1);
      std::swap(perm[i], perm[pick(rng)]);
      gram.noalias() += X.col(perm[i]) * X.col(perm[i]).transpose();
    }
    const auto [lo, hi] = symmetric_eig_extrema(gram);
    out.lambda_k = std::min(out.lambda_k, lo);
    out.Lambda_k = std::max(out.Lambda_k, hi);
  }
  return out;
}

TrimmedLsResult oracle_trimmed_ls(const MatrixXd& X, const VectorXd& y, Index k) {
  const Index n = X.cols();
  if (y.size() != n) throw Error(ErrorCode::InvalidArgs, "response length does not match design");
  check_enumeration(static_cast<std::uint64_t>(n), k);
  if (n - k < X.rows()) {
    throw Error(ErrorCode::InvalidK, "n - k must be at least d");
  }
  const kernels::TrimmedSearchResult found = kernels::parallel::trimmed_ls_search(X, y, k);
  if (!found.found) {
    throw Error(ErrorCode::RankDeficient, "every support complement is rank deficient");
  }

  TrimmedLsResult out;
  out.support = found.support;
  MatrixXd xc(X.rows(), n - k);
  VectorXd yc(n - k);
  Index col = 0;
  std::size_t s = 0;
  for (Index i = 0; i < n; ++i) {
    if (s < out.support.size() && out.support[s] == i) {
      ++s;
      continue;
    }
    xc.col(col) = X.col(i);
    yc[col++] = y[i];
  }
  out.w = ols(xc, yc);
  out.b = VectorXd::Zero(n);
  for (Index i : out.support) out.b[i] = y[i] - X.col(i).dot(out.w);
  out.objective = found.objective;
  return out;
}

MomentEstimate truncated_moment_mc(const VectorXd& lambda, double sigma, double tau, std::uint64_t n_samples,
                                   std::uint64_t seed, kernels::MomentEstimator est) {
  check_hypothesis(lambda, sigma, tau);
  if (n_samples < 2) throw Error(ErrorCode::InvalidArgs, "need at least two samples");
  const kernels::MomentSums sums =
      kernels::parallel::truncated_moment(lambda, sigma, tau, n_samples, seed, est);
  const double count = static_cast<double>(sums.count);
  MomentEstimate out;
  out.samples = sums.count;
  out.mean = sums.sum / count;
  const VectorXd var =
      ((sums.sum_sq - count * out.mean.cwiseAbs2()) / (count - 1.0)).cwiseMax(0.0);
  out.std_error = (var / count).cwiseSqrt();
  return out;
}

MatrixXd rank_one_power(const VectorXd& v, double p) {
  const Index d = v.size();
  const double nv2 = v.squaredNorm();
  MatrixXd out = MatrixXd::Identity(d, d);
  if (nv2 == 0.0) return out;
  out += (std::pow(1.0 + nv2, p) - 1.0) / nv2 * (v * v.transpose());
  return out;
}

MomentQuadrature truncated_moment_quadrature(const VectorXd& lambda, double sigma, double tau) {
  check_hypothesis(lambda, sigma, tau);
  const VectorXd v = lambda / sigma;
  const MatrixXd d_inv2 = rank_one_power(v, -1.0);
  const MatrixXd d_inv3 = rank_one_power(v, -1.5);
  const double q = lambda.dot(d_inv2 * lambda);
  const double s2 = sigma * sigma;
  const double norm = 1.0 / (sigma * s2 * std::sqrt(2.0 * std::numbers::pi));

  auto integrand = [&](double y) {
    const double y2 = y * y;
    return y2 * std::exp(-y2 / (2.0 * s2) + y2 * q / (2.0 * s2 * s2)) * norm;
  };
  double err = 0.0;
  const double half = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, tau, std::numeric_limits<double>::infinity(), 20, 1e-10, &err);

  MomentQuadrature out;
  out.c_tau = 2.0 * half;  // the integrand is even
  out.vec = out.c_tau * (d_inv3 * lambda);
  return out;
}

double moment_c_tau_bound(double sigma, double tau) {
  return 2.001 / (sigma * std::sqrt(2.0 * std::numbers::pi)) * (tau + 1.0 / tau) *
         std::exp(-tau * tau / (2.001 * sigma * sigma));
}

double bound_e0(Index n, Index d, Index k, Index k_star, double sigma, double delta) {
  const double kk = static_cast<double>(k + k_star);
  if (n < 1 || d < 1 || k < 0 || k_star < 0 || kk < 1.0 || !(sigma >= 0.0) || !(delta > 0.0)) {
    throw Error(ErrorCode::InvalidArgs, "bound_e0 needs n, d >= 1, k + k* >= 1, sigma >= 0, delta > 0");
  }
  const double inner = std::log(std::numbers::e * static_cast<double>(n) / (delta * kk));
  if (inner < 0.0) throw Error(ErrorCode::InvalidArgs, "log term negative; k + k* too large for n");
  return sigma * std::sqrt(kk) * std::sqrt(1.0 + 2.0 * std::numbers::e * std::sqrt(6.0 * inner));
}

double bound_gaussian_sss_leading(double gamma, Index n) {
  if (!(gamma > 0.0) || gamma > 1.0 || n < 1) {
    throw Error(ErrorCode::InvalidArgs, "need 0 < gamma <= 1 and n >= 1");
  }
  return gamma * static_cast<double>(n) *
         (1.0 + 3.0 * std::numbers::e * std::sqrt(6.0 * std::log(std::numbers::e / gamma)));
}

}  // namespace robust
