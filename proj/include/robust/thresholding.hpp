#pragma once

#include "robust/types.hpp"

#include <vector>

namespace robust {

/// Aligned blocks {0..d-1}, {d..2d-1}, ... covering [0, n).
class GroupPartition {
 public:
  /// Errors: InvalidArgs when group_size < 1, NotDivisible when group_size does not divide n.
  GroupPartition(Index n, Index group_size);

  Index n() const { return n_; }
  Index group_size() const { return size_; }
  Index count() const { return n_ / size_; }
  Index begin(Index g) const { return g * size_; }
  Index end(Index g) const { return (g + 1) * size_; }
  Index group_of(Index i) const { return i / size_; }

 private:
  Index n_;
  Index size_;
};

/// Errors: InvalidArgs when group_size < 1, NotDivisible when group_size does not divide n.
GroupPartition group_partition(Index n, Index group_size);

/// Keeps the k largest-magnitude entries; ties go to the lower index. Errors: InvalidK.
VectorXd hard_threshold(const VectorXd& v, Index k);

/// Keeps the k groups with largest l2 norm; ties go to the lower group. Errors: InvalidK.
VectorXd group_hard_threshold(const VectorXd& v, Index k, const GroupPartition& part);

/// Sorted indices of the nonzero entries.
std::vector<Index> support_of(const VectorXd& v);

/// Number of groups holding at least one nonzero entry.
Index group_support_size(const VectorXd& v, const GroupPartition& part);

}  // namespace robust
