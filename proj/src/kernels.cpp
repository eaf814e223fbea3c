#include "robust/kernels.hpp"

#include "robust/error.hpp"
#include "robust/linalg.hpp"
#include "robust/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace robust::kernels {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > kMax) return kMax;
  }
  return static_cast<std::uint64_t>(acc);
}

std::vector<Index> unrank_combination(Index n, Index k, std::uint64_t rank) {
  std::vector<Index> comb;
  comb.reserve(static_cast<std::size_t>(k));
  Index next = 0;
  for (Index slot = 0; slot < k; ++slot) {
    // Skip leading elements while the block of subsets starting with them lies before rank.
    for (;; ++next) {
      const std::uint64_t block = binomial(static_cast<std::uint64_t>(n - next - 1),
                                           static_cast<std::uint64_t>(k - slot - 1));
      if (rank < block) break;
      rank -= block;
    }
    comb.push_back(next++);
  }
  return comb;
}

bool next_combination(std::vector<Index>& comb, Index n) {
  const Index k = static_cast<Index>(comb.size());
  Index i = k - 1;
  while (i >= 0 && comb[i] == n - k + i) --i;
  if (i < 0) return false;
  ++comb[i];
  for (Index j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  return true;
}

namespace {

MomentSums moment_chunk(const VectorXd& lambda, double sigma, double tau, std::uint64_t count,
                        std::uint64_t seed, std::uint64_t chunk, MomentEstimator est) {
  const Index d = lambda.size();
  CounterRng rng(seed, Stream::Moment, chunk);
  std::normal_distribution<double> normal(0.0, 1.0);
  MomentSums out{VectorXd::Zero(d), VectorXd::Zero(d), count};
  VectorXd x(d);
  for (std::uint64_t s = 0; s < count; ++s) {
    for (Index j = 0; j < d; ++j) x[j] = normal(rng);
    const double g = sigma * normal(rng);
    const double y = x.dot(lambda) + g;
    double z = std::abs(y) > tau ? y : 0.0;
    if (est == MomentEstimator::ControlVariate) z -= std::abs(g) > tau ? g : 0.0;
    for (Index j = 0; j < d; ++j) {
      const double v = z * x[j];
      out.sum[j] += v;
      out.sum_sq[j] += v * v;
    }
  }
  return out;
}

void accumulate(MomentSums& total, const MomentSums& part) {
  total.sum += part.sum;
  total.sum_sq += part.sum_sq;
  total.count += part.count;
}

std::uint64_t chunk_size_of(std::uint64_t c, std::uint64_t n_samples) {
  const auto chunk = static_cast<std::uint64_t>(kMomentChunk);
  return std::min(chunk, n_samples - c * chunk);
}

struct ExtremaAcc {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::uint64_t count = 0;

  void merge(const ExtremaAcc& o) {
    lo = std::min(lo, o.lo);
    hi = std::max(hi, o.hi);
    count += o.count;
  }
};

// Walks `len` consecutive subsets starting at lexicographic rank `first`.
ExtremaAcc extrema_range(const MatrixXd& X, const std::vector<std::vector<Index>>& items, Index k,
                         std::uint64_t first, std::uint64_t len) {
  ExtremaAcc acc;
  const Index m = static_cast<Index>(items.size());
  std::vector<Index> comb = unrank_combination(m, k, first);
  const Index d = X.rows();
  MatrixXd gram(d, d);
  for (std::uint64_t step = 0; step < len; ++step) {
    gram.setZero();
    Index cols = 0;
    for (Index item : comb) {
      for (Index col : items[item]) gram.noalias() += X.col(col) * X.col(col).transpose();
      cols += static_cast<Index>(items[item].size());
    }
    const auto [lo, hi] = symmetric_eig_extrema(gram);
    // a Gram matrix is PSD, and singular when it has fewer columns than rows
    acc.lo = std::min(acc.lo, cols < d ? 0.0 : std::max(lo, 0.0));
    acc.hi = std::max(acc.hi, hi);
    ++acc.count;
    if (step + 1 < len) next_combination(comb, m);
  }
  return acc;
}

SubsetExtrema to_result(const ExtremaAcc& acc) {
  return SubsetExtrema{acc.lo, acc.hi, acc.count};
}

struct TrimmedBest {
  bool found = false;
  double objective = std::numeric_limits<double>::infinity();
  std::uint64_t rank = 0;
  std::vector<Index> support;
  std::uint64_t skipped = 0;

  void offer(double obj, std::uint64_t r, const std::vector<Index>& s) {
    if (!found || obj < objective || (obj == objective && r < rank)) {
      found = true;
      objective = obj;
      rank = r;
      support = s;
    }
  }

  void merge(const TrimmedBest& o) {
    skipped += o.skipped;
    if (o.found) offer(o.objective, o.rank, o.support);
  }
};

double trimmed_objective(const Projector& full, const MatrixXd& X, const VectorXd& y,
                         const std::vector<Index>& support, bool& ok) {
  const Index n = X.cols();
  std::vector<Index> keep;
  keep.reserve(static_cast<std::size_t>(n) - support.size());
  std::size_t s = 0;
  for (Index i = 0; i < n; ++i) {
    if (s < support.size() && support[s] == i) {
      ++s;
    } else {
      keep.push_back(i);
    }
  }
  MatrixXd xc(X.rows(), static_cast<Index>(keep.size()));
  VectorXd yc(static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    xc.col(static_cast<Index>(j)) = X.col(keep[j]);
    yc[static_cast<Index>(j)] = y[keep[j]];
  }
  if (!has_full_row_rank(xc)) {
    ok = false;
    return 0.0;
  }
  ok = true;
  const VectorXd w = ols(xc, yc);
  VectorXd b = VectorXd::Zero(n);
  for (Index i : support) b[i] = y[i] - X.col(i).dot(w);
  return full.objective(y, b);
}

TrimmedBest trimmed_range(const Projector& full, const MatrixXd& X, const VectorXd& y, Index k,
                          std::uint64_t first, std::uint64_t len) {
  TrimmedBest best;
  std::vector<Index> comb = unrank_combination(X.cols(), k, first);
  for (std::uint64_t step = 0; step < len; ++step) {
    bool ok = false;
    const double obj = trimmed_objective(full, X, y, comb, ok);
    if (ok) {
      best.offer(obj, first + step, comb);
    } else {
      ++best.skipped;
    }
    if (step + 1 < len) next_combination(comb, X.cols());
  }
  return best;
}

TrimmedSearchResult to_result(const TrimmedBest& best) {
  return TrimmedSearchResult{best.found, best.objective, best.rank, best.support, best.skipped};
}

constexpr std::uint64_t kSubsetBlock = 1024;

}  // namespace

namespace serial {

VectorXd project(const MatrixXd& q, const VectorXd& v) {
  const VectorXd coef = q.transpose() * v;
  return q * coef;
}

MomentSums truncated_moment(const VectorXd& lambda, double sigma, double tau,
                            std::uint64_t n_samples, std::uint64_t seed, MomentEstimator est) {
  MomentSums total{VectorXd::Zero(lambda.size()), VectorXd::Zero(lambda.size()), 0};
  const auto chunk = static_cast<std::uint64_t>(kMomentChunk);
  const std::uint64_t chunks = (n_samples + chunk - 1) / chunk;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    accumulate(total, moment_chunk(lambda, sigma, tau, chunk_size_of(c, n_samples), seed, c, est));
  }
  return total;
}

SubsetExtrema subset_extrema(const MatrixXd& X, const std::vector<std::vector<Index>>& items, Index k) {
  const std::uint64_t total = binomial(items.size(), static_cast<std::uint64_t>(k));
  return to_result(extrema_range(X, items, k, 0, total));
}

TrimmedSearchResult trimmed_ls_search(const MatrixXd& X, const VectorXd& y, Index k) {
  const Projector full(X);
  const std::uint64_t total = binomial(static_cast<std::uint64_t>(X.cols()), static_cast<std::uint64_t>(k));
  return to_result(trimmed_range(full, X, y, k, 0, total));
}

}  // namespace serial

namespace parallel {

VectorXd project(const MatrixXd& q, const VectorXd& v) {
  const Index n = q.rows();
  const Index d = q.cols();
  const Index chunks = (n + kProjectChunk - 1) / kProjectChunk;
  if (chunks <= 1) return serial::project(q, v);

  MatrixXd partial(d, chunks);
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < chunks; ++c) {
    const Index lo = c * kProjectChunk;
    const Index len = std::min(kProjectChunk, n - lo);
    partial.col(c).noalias() = q.middleRows(lo, len).transpose() * v.segment(lo, len);
  }
  VectorXd coef = VectorXd::Zero(d);
  for (Index c = 0; c < chunks; ++c) coef += partial.col(c);

  VectorXd out(n);
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < chunks; ++c) {
    const Index lo = c * kProjectChunk;
    const Index len = std::min(kProjectChunk, n - lo);
    out.segment(lo, len).noalias() = q.middleRows(lo, len) * coef;
  }
  return out;
}

MomentSums truncated_moment(const VectorXd& lambda, double sigma, double tau,
                            std::uint64_t n_samples, std::uint64_t seed, MomentEstimator est) {
  const auto chunk = static_cast<std::uint64_t>(kMomentChunk);
  const auto chunks = static_cast<std::int64_t>((n_samples + chunk - 1) / chunk);
  std::vector<MomentSums> parts(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const auto uc = static_cast<std::uint64_t>(c);
    parts[uc] = moment_chunk(lambda, sigma, tau, chunk_size_of(uc, n_samples), seed, uc, est);
  }
  MomentSums total{VectorXd::Zero(lambda.size()), VectorXd::Zero(lambda.size()), 0};
  for (const auto& p : parts) accumulate(total, p);
  return total;
}

SubsetExtrema subset_extrema(const MatrixXd& X, const std::vector<std::vector<Index>>& items, Index k) {
  const std::uint64_t total = binomial(items.size(), static_cast<std::uint64_t>(k));
  const auto blocks = static_cast<std::int64_t>((total + kSubsetBlock - 1) / kSubsetBlock);
  std::vector<ExtremaAcc> parts(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::uint64_t first = static_cast<std::uint64_t>(b) * kSubsetBlock;
    parts[static_cast<std::size_t>(b)] =
        extrema_range(X, items, k, first, std::min(kSubsetBlock, total - first));
  }
  ExtremaAcc acc;
  for (const auto& p : parts) acc.merge(p);
  return to_result(acc);
}

TrimmedSearchResult trimmed_ls_search(const MatrixXd& X, const VectorXd& y, Index k) {
  const Projector full(X);
  const std::uint64_t total = binomial(static_cast<std::uint64_t>(X.cols()), static_cast<std::uint64_t>(k));
  const auto blocks = static_cast<std::int64_t>((total + kSubsetBlock - 1) / kSubsetBlock);
  std::vector<TrimmedBest> parts(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::uint64_t first = static_cast<std::uint64_t>(b) * kSubsetBlock;
    parts[static_cast<std::size_t>(b)] =
        trimmed_range(full, X, y, k, first, std::min(kSubsetBlock, total - first));
  }
  TrimmedBest best;
  for (const auto& p : parts) best.merge(p);
  return to_result(best);
}

}  // namespace parallel

}  // namespace robust::kernels
