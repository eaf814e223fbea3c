#include "doctest.h"

#include "robust/kernels.hpp"
#include "test_support.hpp"

#include <omp.h>

using namespace robust;

TEST_SUITE("kernels") {
  TEST_CASE("binomial and combination helpers") {
    CHECK(kernels::binomial(12, 2) == 66);
    CHECK(kernels::binomial(5, 0) == 1);
    CHECK(kernels::binomial(5, 6) == 0);
    CHECK(kernels::binomial(1000, 500) == UINT64_MAX);

    std::vector<Index> comb{0, 1};
    std::uint64_t rank = 0;
    do {
      CHECK(kernels::unrank_combination(6, 2, rank) == comb);
      ++rank;
    } while (kernels::next_combination(comb, 6));
    CHECK(rank == 15);
  }

  TEST_CASE("parallel projection matches the serial reference") {
    const MatrixXd q = test::gaussian_matrix(10000, 4, 1);
    const VectorXd v = test::gaussian_vector(10000, 2);
    const VectorXd a = kernels::serial::project(q, v);
    omp_set_num_threads(1);
    const VectorXd one = kernels::parallel::project(q, v);
    CHECK((one - a).norm() <= 1e-12 * a.norm());
    for (int threads : {2, 4}) {
      omp_set_num_threads(threads);
      CHECK(kernels::parallel::project(q, v) == one);  // chunk order fixes the summation order
    }
  }

  TEST_CASE("truncated moment sums do not depend on the thread count") {
    VectorXd lambda(3);
    lambda << 0.003, -0.001, 0.002;
    for (auto est : {kernels::MomentEstimator::Plain, kernels::MomentEstimator::ControlVariate}) {
      const auto ref = kernels::serial::truncated_moment(lambda, 1.0, 1.0, 200001, 7, est);
      for (int threads : {1, 3}) {
        omp_set_num_threads(threads);
        const auto par = kernels::parallel::truncated_moment(lambda, 1.0, 1.0, 200001, 7, est);
        CHECK(par.count == ref.count);
        CHECK(par.sum == ref.sum);
        CHECK(par.sum_sq == ref.sum_sq);
      }
    }
  }

  TEST_CASE("subset extrema agree") {
    const MatrixXd X = test::gaussian_matrix(3, 12, 4);
    std::vector<std::vector<Index>> items(12);
    for (Index i = 0; i < 12; ++i) items[i] = {i};
    for (Index k = 1; k <= 5; ++k) {
      const auto s = kernels::serial::subset_extrema(X, items, k);
      const auto p = kernels::parallel::subset_extrema(X, items, k);
      CHECK(s.subsets == kernels::binomial(12, k));
      CHECK(p.subsets == s.subsets);
      CHECK(p.lambda_min == s.lambda_min);
      CHECK(p.lambda_max == s.lambda_max);
    }
  }

  TEST_CASE("trimmed search agrees") {
    const MatrixXd X = test::gaussian_matrix(2, 11, 5);
    VectorXd y = test::gaussian_vector(11, 6);
    y[3] += 30;
    y[8] -= 25;
    const auto s = kernels::serial::trimmed_ls_search(X, y, 2);
    const auto p = kernels::parallel::trimmed_ls_search(X, y, 2);
    CHECK(s.found);
    CHECK(s.support == std::vector<Index>{3, 8});
    CHECK(p.support == s.support);
    CHECK(p.rank == s.rank);
    CHECK(p.objective == s.objective);
  }
}
