#include "doctest.h"

#include "robust/crr.hpp"
#include "robust/datagen.hpp"
#include "robust/diagnostics.hpp"
#include "robust/error.hpp"
#include "robust/linalg.hpp"
#include "test_support.hpp"

#include <boost/math/distributions/normal.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>

using namespace robust;

namespace {

// E[1{|y|>tau} y x] for y = x^T lambda + g: y is N(0, s^2) with s^2 = sigma^2 + |lambda|^2 and
// E[x | y] = lambda y / s^2, so the moment is lambda * E[z^2 1{|z| > tau/s}] for standard z.
VectorXd closed_form_moment(const VectorXd& lambda, double sigma, double tau) {
  const double s = std::sqrt(sigma * sigma + lambda.squaredNorm());
  const double a = tau / s;
  const boost::math::normal_distribution<double> z;
  return lambda * 2.0 * (boost::math::cdf(boost::math::complement(z, a)) + a * boost::math::pdf(z, a));
}

MatrixXd dense_power(const VectorXd& v, double p) {
  const MatrixXd M = MatrixXd::Identity(v.size(), v.size()) + v * v.transpose();
  const Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
  return es.eigenvectors() * es.eigenvalues().array().pow(p).matrix().asDiagonal() * es.eigenvectors().transpose();
}

double objective_at(const MatrixXd& X, const VectorXd& y, const VectorXd& b) {
  return Projector(X).objective(y, b);
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("identity design constants") {
    const MatrixXd I = MatrixXd::Identity(2, 2);
    const SubsetConstants c1 = ssc_sss_exact(I, 1);
    CHECK(c1.lambda_k == doctest::Approx(0.0));
    CHECK(c1.Lambda_k == doctest::Approx(1.0));
    const SubsetConstants c2 = ssc_sss_exact(I, 2);
    CHECK(c2.lambda_k == doctest::Approx(1.0));
    CHECK(c2.Lambda_k == doctest::Approx(1.0));
  }

  TEST_CASE("subset constants are monotone and end at the full Gram spectrum") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const MatrixXd X = test::gaussian_matrix(3, 12, 40 + seed);
      SubsetConstants prev{-1.0, -1.0};
      for (Index k = 1; k <= 12; ++k) {
        const SubsetConstants c = ssc_sss_exact(X, k);
        CHECK(c.lambda_k >= prev.lambda_k - 1e-12);
        CHECK(c.Lambda_k >= prev.Lambda_k - 1e-12);
        prev = c;
      }
      const auto [lo, hi] = symmetric_eig_extrema(X * X.transpose());
      CHECK(std::abs(prev.lambda_k - lo) <= 1e-10);
      CHECK(std::abs(prev.Lambda_k - hi) <= 1e-10);
    }
  }

  TEST_CASE("group constants") {
    const MatrixXd X = test::gaussian_matrix(3, 12, 7);
    const GroupPartition pairs(12, 2);
    const SubsetConstants full = sgsc_sgss_exact(X, 6, pairs);
    const auto [lo, hi] = symmetric_eig_extrema(X * X.transpose());
    CHECK(full.lambda_k == doctest::Approx(lo).epsilon(1e-10));
    CHECK(full.Lambda_k == doctest::Approx(hi).epsilon(1e-10));

    const GroupPartition singles(12, 1);
    for (Index k = 1; k <= 4; ++k) {
      const SubsetConstants g = sgsc_sgss_exact(X, k, singles);
      const SubsetConstants p = ssc_sss_exact(X, k);
      CHECK(g.lambda_k == p.lambda_k);
      CHECK(g.Lambda_k == p.Lambda_k);
    }

    const SubsetConstants g3 = sgsc_sgss_exact(X, 3, pairs);
    const SubsetConstants p6 = ssc_sss_exact(X, 6);
    CHECK(p6.lambda_k <= g3.lambda_k + 1e-12);
    CHECK(g3.Lambda_k <= p6.Lambda_k + 1e-12);
  }

  TEST_CASE("enumeration limits") {
    const MatrixXd X = test::gaussian_matrix(2, 60, 1);
    CHECK_THROWS_AS(ssc_sss_exact(X, 30), Error);
    CHECK_THROWS_AS(ssc_sss_exact(X, 61), Error);
    CHECK_THROWS_AS(oracle_trimmed_ls(X, VectorXd::Zero(60), 30), Error);
  }

  TEST_CASE("sampled constants are one-sided and deterministic") {
    const MatrixXd X = test::gaussian_matrix(3, 8, 2);
    const SubsetConstants exact = ssc_sss_exact(X, 3);
    const SubsetConstants a = ssc_sss_sampled(X, 3, 400, 5);
    const SubsetConstants b = ssc_sss_sampled(X, 3, 400, 5);
    CHECK(a.lambda_k == b.lambda_k);
    CHECK(a.Lambda_k == b.Lambda_k);
    CHECK(a.Lambda_k <= exact.Lambda_k + 1e-12);
    CHECK(a.lambda_k >= exact.lambda_k - 1e-12);
    // 56 supports, 4000 draws: every support is hit with overwhelming probability
    const SubsetConstants all = ssc_sss_sampled(X, 3, 4000, 6);
    CHECK(all.lambda_k == doctest::Approx(exact.lambda_k).epsilon(1e-12));
    CHECK(all.Lambda_k == doctest::Approx(exact.Lambda_k).epsilon(1e-12));
  }

  TEST_CASE("oracle examples") {
    const MatrixXd X = test::gaussian_matrix(2, 9, 3);
    const VectorXd y = test::gaussian_vector(9, 4);
    const TrimmedLsResult r0 = oracle_trimmed_ls(X, y, 0);
    CHECK(r0.support.empty());
    CHECK(r0.b == VectorXd::Zero(9));
    CHECK((r0.w - ols(X, y)).norm() < 1e-12);

    MatrixXd ones(1, 4);
    ones << 1, 1, 1, 1;
    VectorXd y4(4);
    y4 << 1, 1, 1, 100;
    const TrimmedLsResult r = oracle_trimmed_ls(ones, y4, 1);
    CHECK(r.support == std::vector<Index>{3});
    CHECK(r.w[0] == doctest::Approx(1.0));
  }

  TEST_CASE("oracle beats a fine grid search and the solver") {
    // For k = 1 the optimum over b restricted to a grid of values cannot beat the oracle.
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const MatrixXd X = test::gaussian_matrix(1, 6, 60 + seed);
      VectorXd y = test::gaussian_vector(6, 70 + seed);
      y[static_cast<Index>(seed)] += 12.0;
      const TrimmedLsResult r = oracle_trimmed_ls(X, y, 1);
      double grid_best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < 6; ++i) {
        for (int v = -20; v <= 20; ++v) {
          VectorXd b = VectorXd::Zero(6);
          b[i] = v;
          grid_best = std::min(grid_best, objective_at(X, y, b));
        }
      }
      CHECK(r.objective <= grid_best + 1e-12);
      CHECK(r.objective == doctest::Approx(objective_at(X, y, r.b)).epsilon(1e-10));
      CHECK(grid_best - r.objective < 0.5);

      RegressionProblem p{X, y, std::nullopt};
      SolverConfig cfg;
      cfg.k = 1;
      CHECK(r.objective <= solve_crr(p, cfg).objective + 1e-12);
    }
  }

  TEST_CASE("rank-one matrix power") {
    VectorXd v(3);
    v << 0.3, -0.2, 0.5;
    for (double p : {-1.0, -1.5, 0.5, 2.0}) {
      CHECK((rank_one_power(v, p) - dense_power(v, p)).norm() < 1e-12);
    }
    VectorXd u(3);
    u << 0, 1, 0;
    const double c = 0.7;
    const VectorXd got = rank_one_power(c * u, -1.5) * (c * u);
    CHECK((got - c * std::pow(1 + c * c, -1.5) * u).norm() < 1e-14);
  }

  TEST_CASE("quadrature matches the closed-form moment") {
    for (double sigma : {0.5, 1.0, 2.0}) {
      for (double tau : {0.5, 1.0, 2.0}) {
        VectorXd lambda(3);
        lambda << 0.2, -0.1, 0.3;
        lambda *= sigma / 100.0 / lambda.norm();
        const MomentQuadrature q = truncated_moment_quadrature(lambda, sigma, tau);
        const VectorXd exact = closed_form_moment(lambda, sigma, tau);
        CHECK((q.vec - exact).norm() <= 1e-9 * exact.norm());
        // the displayed bound is not scale invariant and only holds for sigma <= 1
        if (sigma <= 1.0) CHECK(q.c_tau <= moment_c_tau_bound(sigma, tau));
      }
    }
    // C_tau depends on tau / sigma only
    VectorXd tiny = VectorXd::Zero(3);
    tiny[0] = 1e-9;
    CHECK(truncated_moment_quadrature(tiny, 0.5, 0.5).c_tau ==
          doctest::Approx(truncated_moment_quadrature(tiny, 2.0, 2.0).c_tau).epsilon(1e-9));
    const MomentQuadrature zero = truncated_moment_quadrature(VectorXd::Zero(3), 1.0, 1.0);
    CHECK(zero.vec == VectorXd::Zero(3));
    CHECK(moment_c_tau_bound(1.0, 1.0) == doctest::Approx(0.9687).epsilon(1e-4));
  }

  TEST_CASE("moment hypothesis checks") {
    CHECK_THROWS_AS(truncated_moment_quadrature(VectorXd::Constant(3, 0.1), 1.0, 1.0), Error);
    CHECK_THROWS_AS(truncated_moment_mc(VectorXd::Zero(3), 1.0, 0.0, 100, 1), Error);
  }

  TEST_CASE("Monte Carlo moment is unbiased at zero and its error shrinks like one over root n") {
    const MomentEstimate zero = truncated_moment_mc(VectorXd::Zero(3), 1.0, 1.0, 400000, 3,
                                                    kernels::MomentEstimator::Plain);
    for (Index i = 0; i < 3; ++i) CHECK(std::abs(zero.mean[i]) <= 3.0 * zero.std_error[i]);

    VectorXd lambda(3);
    lambda << 0.005, 0, 0;
    const MomentEstimate small = truncated_moment_mc(lambda, 1.0, 1.0, 100000, 4);
    const MomentEstimate large = truncated_moment_mc(lambda, 1.0, 1.0, 400000, 4);
    const double ratio = small.std_error.norm() / large.std_error.norm();
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.05));

    const MomentEstimate plain = truncated_moment_mc(lambda, 1.0, 1.0, 400000, 4, kernels::MomentEstimator::Plain);
    CHECK(large.std_error.norm() < plain.std_error.norm());
    const VectorXd exact = closed_form_moment(lambda, 1.0, 1.0);
    for (Index i = 0; i < 3; ++i) CHECK(std::abs(large.mean[i] - exact[i]) <= 4.0 * large.std_error[i]);
  }

  TEST_CASE("coarse bound fixture") {
    const double e0 = bound_e0(4000, 10, 40, 40, 1.0, 0.1);
    const double kk = 80.0;
    const double expect =
        std::sqrt(kk) * std::sqrt(1 + 2 * std::numbers::e *
                                          std::sqrt(6 * std::log(std::numbers::e * 4000 / (0.1 * kk))));
    CHECK(e0 == doctest::Approx(expect).epsilon(1e-14));
    CHECK(e0 == doctest::Approx(54.24).epsilon(1e-3));
    CHECK(bound_e0(4000, 10, 40, 40, 2.0, 0.1) == doctest::Approx(2 * e0).epsilon(1e-14));
    double prev = 0.0;
    for (Index k = 1; k < 200; ++k) {
      const double v = bound_e0(4000, 10, k, 40, 1.0, 0.1);
      CHECK(v >= prev);
      prev = v;
    }
    CHECK_THROWS_AS(bound_e0(4000, 10, 40, 40, 1.0, 0.0), Error);
  }

  TEST_CASE("Gaussian smoothness leading term") {
    CHECK(bound_gaussian_sss_leading(1.0, 50) ==
          doctest::Approx(50 * (1 + 3 * std::numbers::e * std::sqrt(6.0))).epsilon(1e-14));
    double prev = 0.0;
    for (int i = 1; i <= 100; ++i) {
      const double v = bound_gaussian_sss_leading(i / 100.0, 1000);
      CHECK(v > prev);
      prev = v;
    }
    CHECK_THROWS_AS(bound_gaussian_sss_leading(0.0, 10), Error);

    int within = 0;
    const Index n = 12, p = 3;
    const double gamma = 0.5;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const MatrixXd X = test::gaussian_matrix(p, n, 500 + seed);
      const double big = ssc_sss_exact(X, static_cast<Index>(gamma * n)).Lambda_k;
      if (big <= bound_gaussian_sss_leading(gamma, n) + 10 * std::sqrt(static_cast<double>(n * p))) ++within;
    }
    CHECK(within >= 18);
  }
}
