#ifndef ANISOFRAME_COVER_HPP
#define ANISOFRAME_COVER_HPP

#include <optional>
#include <vector>

#include "anisoframe/dilation.hpp"

namespace anisoframe {

// Base cells live in frequency space inside [-1,1]^d.
//   annulus        {r <= |xi|_2   <= R}   (Euclidean; in d=1 this is +-[r,R])
//   centered_box   {     |xi|_inf <= R}   (low-frequency cell, contains 0)
//   box_minus_box  {r <= |xi|_inf <= R}   (sup-norm annulus)
enum class CellKind { annulus, centered_box, box_minus_box };

const char* cell_kind_name(CellKind k);

struct BaseCell {
  CellKind kind = CellKind::annulus;
  double inner_radius = 0.0;  // r
  double outer_radius = 1.0;  // R
  bool origin_excluded = true;
  double shrink = 0.95;  // ratio producing the inner covering set

  static BaseCell annulus(double r, double R, double shrink = 0.95);
  static BaseCell sup_annulus(double r, double R, double shrink = 0.95);
  static BaseCell box(double R, double shrink = 0.95);

  // Membership in base-cell coordinates (closed set; touching counts).
  bool contains(const Eigen::VectorXd& xi, bool shrunk = false) const;

  // Euclidean radius bounds over the cell: 0 < r_e <= |xi| <= R_e for
  // origin-excluded cells. These feed the closed-form series bounds.
  double euclid_inner(int dim) const;
  double euclid_outer(int dim) const;
  double sup_extent() const { return outer_radius; }
  double volume(int dim) const;

  void validate(int dim) const;
};

// Default cells used when a config does not supply one: symmetric Euclidean
// annulus +-[1/(2||A||), 1] in d=1, sup-norm annulus in d>=2, and the unit box
// for the inhomogeneous low-frequency cell. Only validated empirically per
// matrix: the covering proof for general A is external to the artifact.
BaseCell default_base_cell(const ExpansiveMatrix& m);
BaseCell default_low_cell(const ExpansiveMatrix& m);

// Midpoint quadrature over the exact cell geometry (no indicator functions):
// interval pairs in d=1, polar coordinates for Euclidean annuli in d=2, slab
// decompositions for sup-norm cells in any d.
struct QuadratureRule {
  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> weights;
  double volume() const;
};
QuadratureRule cell_quadrature(const BaseCell& cell, int dim, int points_per_axis);

// Deterministic point sample of the closed cell including its boundary.
std::vector<Eigen::VectorXd> cell_samples(const BaseCell& cell, int dim,
                                          int per_axis);

// A Euclidean-radial probe region: the annulus inner <= |xi| <= outer
// (inner = 0 gives a ball). Empty when inner > outer.
struct ProbeRegion {
  double inner = 0.0;
  double outer = 0.0;
  bool empty() const { return inner > outer; }
};

struct CoveringResult {
  bool covered = true;
  std::optional<Eigen::VectorXd> witness;
};

enum class CoverKind { homogeneous, inhomogeneous };

// Indexed family of affine images of the base cell(s):
//   homogeneous    member i     = A^i * base,        i in [i_min, i_max]
//   inhomogeneous  member 0     = low cell,
//                  member i>=1  = A^{i-1} * base.
class Cover {
 public:
  CoverKind kind() const { return kind_; }
  const ExpansiveMatrix& matrix() const { return matrix_; }
  const BaseCell& base() const { return base_; }
  const BaseCell& low() const;
  int i_min() const { return i_min_; }
  int i_max() const { return i_max_; }
  int size() const { return i_max_ - i_min_ + 1; }

  const BaseCell& cell_of(int i) const;
  // T_i: A^i for homogeneous covers, A^{i-1} (T_0 = I) for inhomogeneous.
  const Eigen::MatrixXd& transform(int i) const;
  const Eigen::MatrixXd& inv_transform(int i) const;
  double abs_det_transform(int i) const;

  bool member_contains(int i, const Eigen::VectorXd& xi,
                       bool shrunk = false) const;

  // Euclidean radial span [min |T_i xi|, max |T_i xi|] over sampled cell
  // points; used for probe regions and band selection.
  std::pair<double, double> member_span(int i) const;

  // Region where the truncated cover is expected to cover, with one index of
  // safety margin at each end.
  ProbeRegion default_probe_region() const;

  void check_index(int i) const;

 private:
  friend Cover build_homogeneous(const ExpansiveMatrix& m, const BaseCell& base,
                                 int i_min, int i_max);
  friend Cover build_inhomogeneous(const ExpansiveMatrix& m, const BaseCell& low,
                                   const BaseCell& base, int i_max);

  static Cover make(CoverKind kind, const ExpansiveMatrix& m,
                    const BaseCell& base, std::optional<BaseCell> low,
                    int i_min, int i_max);

  CoverKind kind_ = CoverKind::homogeneous;
  ExpansiveMatrix matrix_;
  BaseCell base_;
  std::optional<BaseCell> low_;
  int i_min_ = 0;
  int i_max_ = 0;
  std::vector<Eigen::MatrixXd> transforms_;      // indexed by i - i_min
  std::vector<Eigen::MatrixXd> inv_transforms_;
  std::vector<double> abs_dets_;
  std::vector<std::pair<double, double>> spans_;
};

Cover build_homogeneous(const ExpansiveMatrix& m, const BaseCell& base,
                        int i_min, int i_max);
Cover build_inhomogeneous(const ExpansiveMatrix& m, const BaseCell& low,
                          const BaseCell& base, int i_max);

// True when every probe point of the region lies in at least one shrunken
// member; otherwise reports the first uncovered probe point.
CoveringResult covering_check(const Cover& c, int probe_grid,
                              std::optional<ProbeRegion> region = std::nullopt);

// Closed-set intersection test between members i and j. Exact for d=1 and for
// sup-norm cells under diagonal matrices; grid-sampled otherwise.
bool members_intersect(const Cover& c, int i, int j, int sample_per_axis = 64);

// Max number of members meeting a single member (including itself).
int admissibility_index(const Cover& c);

// Numerical check of the transition-norm condition on intersecting pairs:
// max ||T_i^{-1} T_j|| over intersecting (i, j).
double transition_norm_bound(const Cover& c);

// Smallest gap such that |i-j| > gap implies member i and member j are
// disjoint (within the truncated index range).
int neighbor_gap(const Cover& c);

// Deterministic log-radial random sample of a probe region (used for
// partition-of-unity probes).
std::vector<Eigen::VectorXd> sample_region_points(const ProbeRegion& region,
                                                  int dim, int count,
                                                  unsigned seed);

}  // namespace anisoframe

#endif
