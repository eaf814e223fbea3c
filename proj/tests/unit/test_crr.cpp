#include "doctest.h"

#include "robust/crr.hpp"
#include "robust/datagen.hpp"
#include "robust/diagnostics.hpp"
#include "robust/error.hpp"
#include "robust/thresholding.hpp"
#include "test_support.hpp"

using namespace robust;

namespace {

RegressionProblem gross_instance(Index n, Index d, Index k_star, double sigma, double low, double high,
                                 std::uint64_t seed) {
  CorruptionPlan plan;
  plan.k_star = k_star;
  plan.low = low;
  plan.high = high;
  plan.sign = CorruptionSign::Symmetric;
  return gen_regression(n, d, sigma, plan, seed);
}

}  // namespace

TEST_SUITE("crr_solver") {
  TEST_CASE("step examples") {
    const RegressionProblem clean = gross_instance(30, 3, 0, 0.0, 10, 20, 1);
    const Projector proj(clean.X);
    CHECK(crr_step(proj, clean.y, VectorXd::Zero(30), 3).norm() < 1e-12);

    const VectorXd y = test::gaussian_vector(30, 2);
    CHECK(crr_step(proj, y, test::gaussian_vector(30, 3), 0) == VectorXd::Zero(30));
  }

  TEST_CASE("hand-evaluated step with a rank-one design") {
    // P_X = ones/4, so (I - P_X) y = (-2, -2, -2, 6) and HT_1 keeps the last entry.
    MatrixXd X(1, 4);
    X << 1, 1, 1, 1;
    VectorXd y(4);
    y << 0, 0, 0, 8;
    VectorXd expect = VectorXd::Zero(4);
    expect[3] = 6;
    CHECK((crr_step(Projector(X), y, VectorXd::Zero(4), 1) - expect).norm() < 1e-14);
    CHECK((crr_step(projector(X), y, VectorXd::Zero(4), 1) - expect).norm() < 1e-14);
  }

  TEST_CASE("clean noiseless instance is solved in one iteration") {
    const RegressionProblem p = gross_instance(200, 5, 0, 0.0, 10, 20, 4);
    const Estimate est = solve_crr(p, SolverConfig{});
    CHECK(est.k == 0);
    CHECK(est.iters == 1);
    CHECK(est.termination == Termination::Converged);
    CHECK(est.b == VectorXd::Zero(200));
    CHECK((est.w - p.truth->w_star).norm() < 1e-10);
  }

  TEST_CASE("single gross corruption is recovered exactly") {
    const RegressionProblem p = gross_instance(20, 2, 1, 0.0, 15.0, 15.0 + 1e-9, 5);
    const Estimate est = solve_crr(p, SolverConfig{});
    CHECK(support_of(est.b) == p.truth->support);
    CHECK((est.w - p.truth->w_star).norm() < 1e-8);
    const TrimmedLsResult oracle = oracle_trimmed_ls(p.X, p.y, 1);
    CHECK(oracle.support == p.truth->support);
  }

  TEST_CASE("agrees with the enumeration oracle on small gross instances") {
    int agree = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const RegressionProblem p = gross_instance(12, 2, 2, 0.1, 5.0, 10.0, 100 + seed);
      const Estimate est = solve_crr(p, SolverConfig{});
      const TrimmedLsResult oracle = oracle_trimmed_ls(p.X, p.y, 2);
      CHECK(oracle.objective <= est.objective + 1e-12);
      if (support_of(est.b) == oracle.support) {
        ++agree;
        CHECK((est.w - oracle.w).norm() <= 1e-8);
      }
    }
    CHECK(agree >= 19);
  }

  TEST_CASE("objective does not increase and the solve is deterministic") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const RegressionProblem p = gross_instance(300, 4, 15, 1.0, 10, 20, seed);
      SolverConfig cfg;
      cfg.k = 30;
      const Estimate a = solve_crr(p, cfg);
      const Estimate b = solve_crr(p, cfg);
      const Projector proj(p.X);
      CHECK(a.objective <= proj.objective(p.y, VectorXd::Zero(300)));
      CHECK(a.w == b.w);
      CHECK(a.b == b.b);
      CHECK(a.iters == b.iters);
      CHECK(group_support_size(a.b, GroupPartition(300, 1)) <= 30);
    }
  }

  TEST_CASE("restarting at the converged point stops after one step") {
    const RegressionProblem p = gross_instance(150, 3, 10, 0.5, 10, 20, 8);
    SolverConfig cfg;
    const Estimate est = solve_crr(p, cfg);
    REQUIRE(est.termination == Termination::Converged);
    const Projector proj(p.X);
    const Index k = est.k;
    const VectorXd fixed = crr_step(proj, p.y, est.b, k);
    const Estimate again =
        iterate_thresholded(proj, p.y, fixed, [k](const VectorXd& v) { return hard_threshold(v, k); }, cfg);
    CHECK(again.iters == 1);
    CHECK(again.termination == Termination::Converged);
  }

  TEST_CASE("trace bookkeeping") {
    const RegressionProblem p = gross_instance(60, 2, 4, 0.0, 40, 60, 9);
    const auto [est, trace] = solve_crr_traced(p, SolverConfig{});
    REQUIRE(trace.rows.size() == static_cast<std::size_t>(est.iters) + 1);
    CHECK(trace.rows.front().iter == 0);
    CHECK(trace.rows.front().md == 4);
    CHECK(trace.rows.front().fa == 0);
    CHECK(trace.rows.front().ci == 0);
    const TraceRow last = trace.rows.back();
    CHECK(last.md == 0);
    CHECK(last.fa == 0);
    CHECK(last.lambda_norm < 1e-8);
    for (std::size_t t = 2; t < trace.rows.size(); ++t) {
      CHECK(trace.rows[t].b_err <= trace.rows[t - 1].b_err + 1e-12);
    }

    const TraceRow exact = trace_row(Projector(p.X), p.y, p.truth->b_star, *p.truth, 7);
    CHECK(exact.lambda_norm == 0.0);
    CHECK(exact.md == 0);
    CHECK(exact.fa == 0);

    RegressionProblem bare = p;
    bare.truth.reset();
    CHECK_THROWS_AS(solve_crr_traced(bare, SolverConfig{}), Error);
    CHECK_THROWS_AS(solve_crr(bare, SolverConfig{}), Error);  // k unset, no truth
  }

  TEST_CASE("configuration errors") {
    const RegressionProblem p = gross_instance(20, 2, 1, 0.0, 10, 20, 1);
    SolverConfig cfg;
    cfg.k = 21;
    CHECK_THROWS_AS(solve_crr(p, cfg), Error);
    cfg.k = 1;
    cfg.max_iters = 0;
    CHECK_THROWS_AS(solve_crr(p, cfg), Error);
  }
}
