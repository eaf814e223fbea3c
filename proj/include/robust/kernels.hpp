#pragma once

// Data-parallel inner loops. Every kernel has a plain serial reference in
// kernels::serial and an OpenMP variant in kernels::parallel with the same
// signature. Reductions in the parallel variants combine fixed-size chunk
// partials in chunk order, so their output does not depend on the thread count.

#include "robust/types.hpp"

#include <cstdint>
#include <vector>

namespace robust::kernels {

inline constexpr Index kProjectChunk = 2048;
inline constexpr Index kMomentChunk = Index{1} << 16;

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// The rank-th k-subset of [0, n) in lexicographic order.
std::vector<Index> unrank_combination(Index n, Index k, std::uint64_t rank);

/// Advances to the lexicographic successor; false after the last subset.
bool next_combination(std::vector<Index>& comb, Index n);

enum class MomentEstimator {
  Plain,           // average of 1{|y|>tau} y x
  ControlVariate,  // subtracts the zero-mean term 1{|g|>tau} g x
};

struct MomentSums {
  VectorXd sum;
  VectorXd sum_sq;
  std::uint64_t count = 0;
};

struct SubsetExtrema {
  double lambda_min = 0.0;  // min over subsets of lambda_min(X_S X_S^T)
  double lambda_max = 0.0;  // max over subsets of lambda_max(X_S X_S^T)
  std::uint64_t subsets = 0;
};

struct TrimmedSearchResult {
  bool found = false;
  double objective = 0.0;
  std::uint64_t rank = 0;
  std::vector<Index> support;
  std::uint64_t skipped = 0;  // supports whose complement is rank deficient
};

namespace serial {

/// Q (Q^T v).
VectorXd project(const MatrixXd& q, const VectorXd& v);

MomentSums truncated_moment(const VectorXd& lambda, double sigma, double tau,
                            std::uint64_t n_samples, std::uint64_t seed, MomentEstimator est);

/// Extrema over every union of k items, item j contributing the columns items[j].
SubsetExtrema subset_extrema(const MatrixXd& X, const std::vector<std::vector<Index>>& items, Index k);

/// Exhaustive k-support search minimizing 0.5 ||(I - P_X)(y - b)||^2 with b fitted on S.
TrimmedSearchResult trimmed_ls_search(const MatrixXd& X, const VectorXd& y, Index k);

}  // namespace serial

namespace parallel {

VectorXd project(const MatrixXd& q, const VectorXd& v);

MomentSums truncated_moment(const VectorXd& lambda, double sigma, double tau,
                            std::uint64_t n_samples, std::uint64_t seed, MomentEstimator est);

SubsetExtrema subset_extrema(const MatrixXd& X, const std::vector<std::vector<Index>>& items, Index k);

TrimmedSearchResult trimmed_ls_search(const MatrixXd& X, const VectorXd& y, Index k);

}  // namespace parallel

}  // namespace robust::kernels
