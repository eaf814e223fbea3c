#include "doctest.h"

#include "robust/datagen.hpp"
#include "robust/error.hpp"
#include "robust/spectral.hpp"

#include <cmath>

using namespace robust;

namespace {

CorruptionPlan plan_of(Index k_star, std::uint64_t seed = 0) {
  CorruptionPlan plan;
  plan.k_star = k_star;
  plan.seed = seed;
  return plan;
}

double sample_variance(const VectorXd& v) {
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_SUITE("datagen") {
  TEST_CASE("regression without corruption") {
    const RegressionProblem p = gen_regression(100, 4, 0.5, plan_of(0), 3);
    CHECK(p.truth->b_star == VectorXd::Zero(100));
    CHECK(p.y == VectorXd(p.X.transpose() * p.truth->w_star + p.truth->eps));
    CHECK(p.truth->w_star.norm() == doctest::Approx(1.0));
  }

  TEST_CASE("regression corruption count and range") {
    const RegressionProblem p = gen_regression(100, 3, 1.0, plan_of(3), 4);
    Index nonzero = 0;
    for (Index i = 0; i < 100; ++i) {
      if (p.truth->b_star[i] != 0.0) {
        ++nonzero;
        CHECK(p.truth->b_star[i] >= 10.0);
        CHECK(p.truth->b_star[i] <= 20.0);
      }
    }
    CHECK(nonzero == 3);
    CHECK(p.truth->support.size() == 3);
  }

  TEST_CASE("generators are deterministic") {
    const RegressionProblem a = gen_regression(50, 3, 1.0, plan_of(5), 9);
    const RegressionProblem b = gen_regression(50, 3, 1.0, plan_of(5), 9);
    CHECK(a.X == b.X);
    CHECK(a.y == b.y);
    CHECK(a.truth->support == b.truth->support);
    const RegressionProblem c = gen_regression(50, 3, 1.0, plan_of(5), 10);
    CHECK(a.y != c.y);

    const TimeSeriesRecord s1 = inject_additive(gen_ar_series(300, 2, 1.0, 5), plan_of(4, 6));
    const TimeSeriesRecord s2 = inject_additive(gen_ar_series(300, 2, 1.0, 5), plan_of(4, 6));
    CHECK(s1.values == s2.values);
    const TimeSeriesRecord i1 = gen_ar_series_io(300, 2, 1.0, plan_of(4), 5);
    const TimeSeriesRecord i2 = gen_ar_series_io(300, 2, 1.0, plan_of(4), 5);
    CHECK(i1.values == i2.values);
  }

  TEST_CASE("changing k* leaves the design untouched") {
    const RegressionProblem a = gen_regression(80, 3, 1.0, plan_of(2), 9);
    const RegressionProblem b = gen_regression(80, 3, 1.0, plan_of(8), 9);
    CHECK(a.X == b.X);
    CHECK(a.truth->w_star == b.truth->w_star);
  }

  TEST_CASE("invalid arguments") {
    CHECK_THROWS_AS(gen_regression(2, 3, 1.0, plan_of(0), 1), Error);
    CHECK_THROWS_AS(gen_regression(10, 3, 1.0, plan_of(11), 1), Error);
    CorruptionPlan bad = plan_of(1);
    bad.low = 5;
    bad.high = 5;
    CHECK_THROWS_AS(gen_regression(10, 3, 1.0, bad, 1), Error);
    CHECK_THROWS_AS(gen_ar_series(1, 1, 1.0, 1), Error);
  }

  TEST_CASE("white noise series has the innovation variance") {
    ArGenOptions opts;
    opts.forced_w = VectorXd::Zero(1);
    const TimeSeriesRecord rec = gen_ar_series(100000, 1, 1.5, 2, opts);
    CHECK(sample_variance(rec.values) == doctest::Approx(2.25).epsilon(0.05));
  }

  TEST_CASE("AR(1) variance matches the closed form") {
    ArGenOptions opts;
    opts.forced_w = VectorXd::Constant(1, 0.5);
    const TimeSeriesRecord rec = gen_ar_series(100000, 1, 1.0, 3, opts);
    CHECK(sample_variance(rec.values) == doctest::Approx(4.0 / 3.0).epsilon(0.05));
  }

  TEST_CASE("stationarity gate") {
    CHECK_THROWS_AS(draw_ar_coefficients(1, 1, 0.995, 0.99, 50), Error);
    int redrawn = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const CoefficientDraw draw = draw_ar_coefficients(2, seed, 1.2, 0.99);
      CHECK(companion_spectral_radius(draw.w) < 0.99);
      CHECK(draw.w.norm() == doctest::Approx(1.2));
      if (draw.redraws > 0) ++redrawn;
    }
    CHECK(redrawn > 0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      CHECK(companion_spectral_radius(gen_ar_series(50, 5, 1.0, seed).truth->w_star) < 0.99);
    }
  }

  TEST_CASE("additive injection") {
    const TimeSeriesRecord clean = gen_ar_series(500, 3, 1.0, 11);
    const TimeSeriesRecord same = inject_additive(clean, plan_of(0, 1));
    CHECK(same.values == clean.values);
    CHECK(same.truth->mode == CorruptionMode::Additive);

    const TimeSeriesRecord rec = inject_additive(clean, plan_of(7, 2));
    const VectorXd diff = rec.values - clean.values;
    Index nonzero = 0;
    for (Index i = 0; i < diff.size(); ++i) {
      if (diff[i] == 0.0) continue;
      ++nonzero;
      CHECK(std::abs(diff[i]) >= 10.0 - 1e-9);
      CHECK(std::abs(diff[i]) <= 20.0 + 1e-9);
    }
    CHECK(nonzero == 7);
    for (std::size_t i = 0; i < 7; ++i) {
      const Index at = rec.truth->e_locations[i] + 3;
      CHECK(diff[at] == doctest::Approx(rec.truth->e_values[static_cast<Index>(i)]).epsilon(1e-12));
    }
    CHECK(rec.truth->clean_values == clean.values);
  }

  TEST_CASE("innovational outliers without propagation") {
    ArGenOptions opts;
    opts.forced_w = VectorXd::Zero(2);
    const TimeSeriesRecord rec = gen_ar_series_io(400, 2, 1.0, plan_of(5), 13, opts);
    const VectorXd diff = rec.values - rec.truth->clean_values;
    Index nonzero = 0;
    for (Index i = 0; i < diff.size(); ++i) nonzero += diff[i] != 0.0;
    CHECK(nonzero == 5);
    for (Index loc : rec.truth->e_locations) CHECK(diff[loc + 2] != 0.0);
    CHECK(rec.truth->e_locations.size() == 5);
  }

  TEST_CASE("innovational outlier propagates through the recursion") {
    ArGenOptions opts;
    opts.forced_w = VectorXd::Constant(1, 0.5);
    const TimeSeriesRecord rec = gen_ar_series_io(300, 1, 1.0, plan_of(1), 17, opts);
    const Index at = rec.truth->e_locations[0] + 1;
    REQUIRE(at + 2 < rec.values.size());
    const double beta = rec.truth->e_values[0];
    const VectorXd diff = rec.values - rec.truth->clean_values;
    CHECK(diff[at] == doctest::Approx(beta).epsilon(1e-12));
    CHECK(diff[at + 1] == doctest::Approx(0.5 * beta).epsilon(1e-12));
    CHECK(diff[at + 2] == doctest::Approx(0.25 * beta).epsilon(1e-12));
    CHECK(diff.head(at).cwiseAbs().maxCoeff() == 0.0);
  }
}
