#ifndef ANISOFRAME_PARTITION_HPP
#define ANISOFRAME_PARTITION_HPP

#include "anisoframe/cover.hpp"

namespace anisoframe {

// Regular partition of unity subordinate to a cover, built by transporting a
// compactly supported mollifier bump to every member and normalizing by the
// pointwise sum (BAPU construction). Normalization turns the sum-to-one
// requirement into an algebraic identity wherever the cover covers.
class PartitionOfUnity {
 public:
  const Cover& cover() const { return cover_; }

  // Raw (un-normalized) bump transported to member i; zero outside member i.
  double raw_bump(int i, const Eigen::VectorXd& xi) const;

  // Sum of raw bumps over the full index range.
  double raw_sum(const Eigen::VectorXd& xi) const;

  // Normalized phi_i(xi) in [0,1]. Zero outside member i.
  double phi(int i, const Eigen::VectorXd& xi) const;

  // Sum of phi_i over the index range: 1 on the covered region, 0 outside.
  double phi_sum(const Eigen::VectorXd& xi) const;

 private:
  friend PartitionOfUnity build_partition(const Cover& c, int probe_count,
                                          unsigned probe_seed);
  explicit PartitionOfUnity(Cover c) : cover_(std::move(c)) {}
  Cover cover_;
};

// Validates that the bump sum is strictly positive on a probe sample of the
// cover's working region, then returns the normalized family.
// Throws CoverNotCovering with a witness point otherwise.
PartitionOfUnity build_partition(const Cover& c, int probe_count = 4096,
                                 unsigned probe_seed = 20240901u);

// Smooth profile exp(1 - 1/(1-t^2)) on |t|<1, 0 outside; peak value 1 at t=0.
double mollifier(double t);

// Anisotropic det-power weights:
//   homogeneous    w_i = |det A|^{s i},       i in Z
//   inhomogeneous  w_0 = 1, w_i = |det A|^{s (i-1)},  i in N.
struct WeightSequence {
  CoverKind kind = CoverKind::homogeneous;
  int s = 0;
  double abs_det = 2.0;

  static WeightSequence homogeneous(const ExpansiveMatrix& m, int s);
  static WeightSequence inhomogeneous(const ExpansiveMatrix& m, int s);
};

double weight(const WeightSequence& w, int i);

// C = |det A|^{|s| * neighbor_gap}; also asserts w_i <= C * w_j on every
// intersecting pair of the (truncated) cover, which is analytic and can only
// fail on an internal bug.
double moderateness_constant(const WeightSequence& w, const Cover& c);

}  // namespace anisoframe

#endif
