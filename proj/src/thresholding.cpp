#include "robust/thresholding.hpp"

#include "robust/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace robust {

namespace {

// Indices of the k largest scores; equal scores rank the lower index first.
// nth_element under a strict total order selects exactly that set.
std::vector<Index> top_k(const std::vector<double>& score, Index k) {
  std::vector<Index> idx(score.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  auto before = [&score](Index a, Index b) {
    return score[a] > score[b] || (score[a] == score[b] && a < b);
  };
  if (k < static_cast<Index>(idx.size())) {
    std::nth_element(idx.begin(), idx.begin() + k, idx.end(), before);
  }
  idx.resize(k);
  return idx;
}

}  // namespace

GroupPartition::GroupPartition(Index n, Index group_size) : n_(n), size_(group_size) {
  if (group_size < 1 || n < 0) {
    throw Error(ErrorCode::InvalidArgs, "group size must be >= 1");
  }
  if (n % group_size != 0) {
    throw Error(ErrorCode::NotDivisible,
                std::to_string(group_size) + " does not divide " + std::to_string(n));
  }
}

GroupPartition group_partition(Index n, Index group_size) { return GroupPartition(n, group_size); }

VectorXd hard_threshold(const VectorXd& v, Index k) {
  const Index n = v.size();
  if (k < 0 || k > n) {
    throw Error(ErrorCode::InvalidK, "k=" + std::to_string(k) + " outside [0, " + std::to_string(n) + "]");
  }
  VectorXd out = VectorXd::Zero(n);
  if (k == n) return v;
  if (k == 0) return out;

  std::vector<double> mag(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) mag[i] = std::abs(v[i]);
  for (Index i : top_k(mag, k)) out[i] = v[i];
  return out;
}

VectorXd group_hard_threshold(const VectorXd& v, Index k, const GroupPartition& part) {
  if (v.size() != part.n()) {
    throw Error(ErrorCode::InvalidArgs, "vector length does not match the partition");
  }
  const Index groups = part.count();
  if (k < 0 || k > groups) {
    throw Error(ErrorCode::InvalidK, "k=" + std::to_string(k) + " outside [0, " + std::to_string(groups) + "]");
  }
  if (k == groups) return v;
  VectorXd out = VectorXd::Zero(v.size());
  if (k == 0) return out;

  std::vector<double> norm2(static_cast<std::size_t>(groups));
  for (Index g = 0; g < groups; ++g) {
    norm2[g] = v.segment(part.begin(g), part.group_size()).squaredNorm();
  }
  for (Index g : top_k(norm2, k)) {
    out.segment(part.begin(g), part.group_size()) = v.segment(part.begin(g), part.group_size());
  }
  return out;
}

std::vector<Index> support_of(const VectorXd& v) {
  std::vector<Index> s;
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) s.push_back(i);
  }
  return s;
}

Index group_support_size(const VectorXd& v, const GroupPartition& part) {
  Index count = 0;
  for (Index g = 0; g < part.count(); ++g) {
    if ((v.segment(part.begin(g), part.group_size()).array() != 0.0).any()) ++count;
  }
  return count;
}

}  // namespace robust
