#include "anisoframe/partition.hpp"

#include <cmath>
#include <sstream>

namespace anisoframe {

double mollifier(double t) {
  const double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t2));
}

namespace {

// Cell-adapted coordinate mapping the cell onto |t| <= 1: radial for annuli
// (in the cell's own norm), plain ratio for the low box.
double bump_coordinate(const BaseCell& cell, const Eigen::VectorXd& local) {
  const double rho =
      cell.kind == CellKind::annulus ? local.norm()
                                     : local.lpNorm<Eigen::Infinity>();
  if (cell.kind == CellKind::centered_box) return rho / cell.outer_radius;
  const double mid = 0.5 * (cell.inner_radius + cell.outer_radius);
  const double half = 0.5 * (cell.outer_radius - cell.inner_radius);
  return (rho - mid) / half;
}

}  // namespace

double PartitionOfUnity::raw_bump(int i, const Eigen::VectorXd& xi) const {
  const Eigen::VectorXd local = cover_.inv_transform(i) * xi;
  return mollifier(bump_coordinate(cover_.cell_of(i), local));
}

double PartitionOfUnity::raw_sum(const Eigen::VectorXd& xi) const {
  double sum = 0.0;
  for (int i = cover_.i_min(); i <= cover_.i_max(); ++i)
    sum += raw_bump(i, xi);
  return sum;
}

double PartitionOfUnity::phi(int i, const Eigen::VectorXd& xi) const {
  const double num = raw_bump(i, xi);
  if (num == 0.0) return 0.0;
  return num / raw_sum(xi);
}

double PartitionOfUnity::phi_sum(const Eigen::VectorXd& xi) const {
  double sum = 0.0;
  for (int i = cover_.i_min(); i <= cover_.i_max(); ++i) sum += phi(i, xi);
  return sum;
}

PartitionOfUnity build_partition(const Cover& c, int probe_count,
                                 unsigned probe_seed) {
  PartitionOfUnity pou(c);
  const ProbeRegion region = c.default_probe_region();
  const auto probes =
      sample_region_points(region, c.matrix().dim(), probe_count, probe_seed);
  for (const auto& pt : probes) {
    if (pou.raw_sum(pt) <= 0.0) {
      std::ostringstream oss;
      oss << "bump sum vanishes at probe point (";
      for (int a = 0; a < pt.size(); ++a)
        oss << (a ? ", " : "") << pt(a);
      oss << ")";
      throw Error(ErrorCode::CoverNotCovering, oss.str());
    }
  }
  return pou;
}

WeightSequence WeightSequence::homogeneous(const ExpansiveMatrix& m, int s) {
  return WeightSequence{CoverKind::homogeneous, s, m.abs_det()};
}

WeightSequence WeightSequence::inhomogeneous(const ExpansiveMatrix& m, int s) {
  return WeightSequence{CoverKind::inhomogeneous, s, m.abs_det()};
}

double weight(const WeightSequence& w, int i) {
  if (w.kind == CoverKind::inhomogeneous && i < 0)
    throw Error(ErrorCode::NegativeIndexForInhomogeneous,
                "inhomogeneous weights are indexed by i >= 0");
  const int exponent =
      w.kind == CoverKind::homogeneous ? w.s * i : (i == 0 ? 0 : w.s * (i - 1));
  const double base = exponent >= 0 ? w.abs_det : 1.0 / w.abs_det;
  double value = 1.0;
  for (int k = 0; k < std::abs(exponent); ++k) value *= base;
  return value;
}

double moderateness_constant(const WeightSequence& w, const Cover& c) {
  const int gap = neighbor_gap(c);
  const double C = std::pow(w.abs_det, std::abs(w.s) * gap);
  for (int i = c.i_min(); i <= c.i_max(); ++i) {
    for (int j = c.i_min(); j <= c.i_max(); ++j) {
      if (!members_intersect(c, i, j)) continue;
      if (weight(w, i) > C * weight(w, j) * (1.0 + 1e-12))
        throw Error(ErrorCode::AssertionFailure,
                    "moderateness bound violated at pair (" +
                        std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
  return C;
}

}  // namespace anisoframe
