#include "anisoframe/cover.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

namespace anisoframe {

namespace {

constexpr double kMemberTolRel = 1e-9;
constexpr double kIntervalTolRel = 1e-12;

double sup_norm(const Eigen::VectorXd& xi) { return xi.lpNorm<Eigen::Infinity>(); }

std::vector<double> linspace(double lo, double hi, int n, bool include_ends) {
  std::vector<double> out;
  out.reserve(n);
  if (n == 1) {
    out.push_back(include_ends ? lo : 0.5 * (lo + hi));
    return out;
  }
  if (include_ends) {
    for (int k = 0; k < n; ++k)
      out.push_back(lo + (hi - lo) * static_cast<double>(k) / (n - 1));
  } else {
    for (int k = 0; k < n; ++k)
      out.push_back(lo + (hi - lo) * (k + 0.5) / n);
  }
  return out;
}

// Midpoint tensor rule over an axis-aligned box.
void append_box_rule(QuadratureRule& rule, const Eigen::VectorXd& lo,
                     const Eigen::VectorXd& hi, int n_per_axis) {
  const int d = static_cast<int>(lo.size());
  double cell_weight = 1.0;
  for (int a = 0; a < d; ++a) cell_weight *= (hi(a) - lo(a)) / n_per_axis;
  if (cell_weight <= 0.0) return;
  std::vector<int> idx(d, 0);
  Eigen::VectorXd pt(d);
  while (true) {
    for (int a = 0; a < d; ++a)
      pt(a) = lo(a) + (hi(a) - lo(a)) * (idx[a] + 0.5) / n_per_axis;
    rule.nodes.push_back(pt);
    rule.weights.push_back(cell_weight);
    int a = 0;
    for (; a < d; ++a) {
      if (++idx[a] < n_per_axis) break;
      idx[a] = 0;
    }
    if (a == d) break;
  }
}

bool is_diagonal(const Eigen::MatrixXd& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (r != c && std::abs(m(r, c)) > 1e-14 * scale) return false;
  return true;
}

bool is_sup_kind(CellKind k) {
  return k == CellKind::box_minus_box || k == CellKind::centered_box;
}

}  // namespace

const char* cell_kind_name(CellKind k) {
  switch (k) {
    case CellKind::annulus: return "annulus";
    case CellKind::centered_box: return "centered-box";
    case CellKind::box_minus_box: return "box-minus-box";
  }
  return "?";
}

BaseCell BaseCell::annulus(double r, double R, double shrink) {
  BaseCell c;
  c.kind = CellKind::annulus;
  c.inner_radius = r;
  c.outer_radius = R;
  c.origin_excluded = r > 0.0;
  c.shrink = shrink;
  return c;
}

BaseCell BaseCell::sup_annulus(double r, double R, double shrink) {
  BaseCell c = annulus(r, R, shrink);
  c.kind = CellKind::box_minus_box;
  return c;
}

BaseCell BaseCell::box(double R, double shrink) {
  BaseCell c;
  c.kind = CellKind::centered_box;
  c.inner_radius = 0.0;
  c.outer_radius = R;
  c.origin_excluded = false;
  c.shrink = shrink;
  return c;
}

bool BaseCell::contains(const Eigen::VectorXd& xi, bool shrunk) const {
  const double rho =
      kind == CellKind::annulus ? xi.norm() : sup_norm(xi);
  double lo = kind == CellKind::centered_box ? 0.0 : inner_radius;
  double hi = outer_radius;
  if (shrunk && shrink < 1.0) {
    if (kind == CellKind::centered_box) {
      hi *= shrink;
    } else {
      const double mid = 0.5 * (lo + hi);
      const double half = 0.5 * (hi - lo);
      lo = mid - shrink * half;
      hi = mid + shrink * half;
    }
  }
  const double tol = kMemberTolRel * outer_radius;
  return rho >= lo - tol && rho <= hi + tol;
}

double BaseCell::euclid_inner(int) const {
  return kind == CellKind::centered_box ? 0.0 : inner_radius;
}

double BaseCell::euclid_outer(int dim) const {
  return kind == CellKind::annulus ? outer_radius
                                   : outer_radius * std::sqrt(double(dim));
}

double BaseCell::volume(int dim) const {
  const double r = inner_radius, R = outer_radius;
  switch (kind) {
    case CellKind::annulus:
      if (dim == 1) return 2.0 * (R - r);
      if (dim == 2) return M_PI * (R * R - r * r);
      throw Error(ErrorCode::Unsupported,
                  "Euclidean annulus cells support d <= 2");
    case CellKind::centered_box:
      return std::pow(2.0 * R, dim);
    case CellKind::box_minus_box:
      return std::pow(2.0 * R, dim) - std::pow(2.0 * r, dim);
  }
  return 0.0;
}

void BaseCell::validate(int dim) const {
  if (!(outer_radius > 0.0) || inner_radius < 0.0 ||
      inner_radius >= outer_radius)
    throw Error(ErrorCode::CellOutOfBox, "cell radii must satisfy 0 <= r < R");
  if (sup_extent() > 1.0 + 1e-12)
    throw Error(ErrorCode::CellOutOfBox,
                "cell must lie inside [-1,1]^d, sup extent = " +
                    std::to_string(sup_extent()));
  if (!(shrink > 0.0 && shrink <= 1.0))
    throw Error(ErrorCode::CellOutOfBox, "shrink ratio must lie in (0,1]");
  if (origin_excluded && !(inner_radius > 0.0))
    throw Error(ErrorCode::OriginNotExcluded,
                "origin-excluded cell needs inner radius > 0");
  if (kind == CellKind::annulus && dim > 2)
    throw Error(ErrorCode::Unsupported,
                "Euclidean annulus cells support d <= 2; use box-minus-box");
}

BaseCell default_base_cell(const ExpansiveMatrix& m) {
  const double opnorm = m.power_norm(1);
  const double r = 1.0 / (2.0 * opnorm);
  return m.dim() == 1 ? BaseCell::annulus(r, 1.0)
                      : BaseCell::sup_annulus(r, 1.0);
}

BaseCell default_low_cell(const ExpansiveMatrix& m) {
  (void)m;
  return BaseCell::box(1.0);
}

double QuadratureRule::volume() const {
  double v = 0.0;
  for (double w : weights) v += w;
  return v;
}

QuadratureRule cell_quadrature(const BaseCell& cell, int dim,
                               int points_per_axis) {
  QuadratureRule rule;
  const double r = cell.inner_radius, R = cell.outer_radius;
  const int n = std::max(2, points_per_axis);

  if (dim == 1) {
    Eigen::VectorXd lo(1), hi(1);
    if (cell.kind == CellKind::centered_box) {
      lo << -R;
      hi << R;
      append_box_rule(rule, lo, hi, 2 * n);
    } else {
      lo << r;
      hi << R;
      append_box_rule(rule, lo, hi, n);
      lo << -R;
      hi << -r;
      append_box_rule(rule, lo, hi, n);
    }
    return rule;
  }

  if (cell.kind == CellKind::annulus) {
    if (dim != 2)
      throw Error(ErrorCode::Unsupported,
                  "Euclidean annulus quadrature supports d = 2 only");
    const int n_rho = n, n_theta = 4 * n;
    const double d_rho = (R - r) / n_rho;
    const double d_theta = 2.0 * M_PI / n_theta;
    for (int a = 0; a < n_rho; ++a) {
      const double rho = r + (a + 0.5) * d_rho;
      for (int b = 0; b < n_theta; ++b) {
        const double theta = (b + 0.5) * d_theta;
        Eigen::VectorXd pt(2);
        pt << rho * std::cos(theta), rho * std::sin(theta);
        rule.nodes.push_back(pt);
        rule.weights.push_back(rho * d_rho * d_theta);
      }
    }
    return rule;
  }

  if (cell.kind == CellKind::centered_box || cell.inner_radius == 0.0) {
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim, -R);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(dim, R);
    append_box_rule(rule, lo, hi, 2 * n);
    return rule;
  }

  // Sup-norm annulus: exact slab partition of box(R) \ box(r). Slab j has
  // |xi_a| <= r for a < j, |xi_j| in [r, R], |xi_a| <= R for a > j.
  for (int j = 0; j < dim; ++j) {
    for (int sign = -1; sign <= 1; sign += 2) {
      Eigen::VectorXd lo(dim), hi(dim);
      for (int a = 0; a < j; ++a) { lo(a) = -r; hi(a) = r; }
      if (sign > 0) { lo(j) = r; hi(j) = R; } else { lo(j) = -R; hi(j) = -r; }
      for (int a = j + 1; a < dim; ++a) { lo(a) = -R; hi(a) = R; }
      append_box_rule(rule, lo, hi, n);
    }
  }
  return rule;
}

std::vector<Eigen::VectorXd> cell_samples(const BaseCell& cell, int dim,
                                          int per_axis) {
  std::vector<Eigen::VectorXd> pts;
  const double r = cell.inner_radius, R = cell.outer_radius;
  const int n = std::max(2, per_axis);

  if (dim == 1) {
    const double lo = cell.kind == CellKind::centered_box ? 0.0 : r;
    for (double x : linspace(lo, R, n, true)) {
      Eigen::VectorXd p(1);
      p << x;
      pts.push_back(p);
      if (x != 0.0) {
        p << -x;
        pts.push_back(p);
      }
    }
    return pts;
  }

  if (cell.kind == CellKind::annulus) {
    const int n_theta = 4 * n;
    for (double rho : linspace(r, R, n, true)) {
      for (int b = 0; b < n_theta; ++b) {
        const double theta = 2.0 * M_PI * b / n_theta;
        Eigen::VectorXd p(2);
        p << rho * std::cos(theta), rho * std::sin(theta);
        pts.push_back(p);
      }
    }
    return pts;
  }

  // Sup-norm cells: boundary-inclusive tensor grid filtered by membership.
  std::vector<double> axis = linspace(-R, R, 2 * n, true);
  std::vector<int> idx(dim, 0);
  Eigen::VectorXd p(dim);
  while (true) {
    for (int a = 0; a < dim; ++a) p(a) = axis[idx[a]];
    if (cell.contains(p)) pts.push_back(p);
    int a = 0;
    for (; a < dim; ++a) {
      if (++idx[a] < static_cast<int>(axis.size())) break;
      idx[a] = 0;
    }
    if (a == dim) break;
  }
  return pts;
}

const BaseCell& Cover::low() const {
  if (!low_) throw Error(ErrorCode::IndexOutOfRange, "cover has no low cell");
  return *low_;
}

const BaseCell& Cover::cell_of(int i) const {
  check_index(i);
  if (kind_ == CoverKind::inhomogeneous && i == 0) return *low_;
  return base_;
}

void Cover::check_index(int i) const {
  if (i < i_min_ || i > i_max_)
    throw Error(ErrorCode::IndexOutOfRange,
                "cover index " + std::to_string(i) + " outside [" +
                    std::to_string(i_min_) + "," + std::to_string(i_max_) + "]");
}

const Eigen::MatrixXd& Cover::transform(int i) const {
  check_index(i);
  return transforms_[i - i_min_];
}

const Eigen::MatrixXd& Cover::inv_transform(int i) const {
  check_index(i);
  return inv_transforms_[i - i_min_];
}

double Cover::abs_det_transform(int i) const {
  check_index(i);
  return abs_dets_[i - i_min_];
}

bool Cover::member_contains(int i, const Eigen::VectorXd& xi,
                            bool shrunk) const {
  return cell_of(i).contains(inv_transform(i) * xi, shrunk);
}

std::pair<double, double> Cover::member_span(int i) const {
  check_index(i);
  return spans_[i - i_min_];
}

ProbeRegion Cover::default_probe_region() const {
  ProbeRegion region;
  if (kind_ == CoverKind::homogeneous) {
    const int lo = size() >= 3 ? i_min_ + 1 : i_min_;
    const int hi = size() >= 3 ? i_max_ - 1 : i_max_;
    region.inner = member_span(lo).first;
    region.outer = member_span(hi).second;
  } else {
    region.inner = 0.0;
    region.outer = member_span(std::max(i_max_ - 1, 0)).second;
  }
  return region;
}

Cover build_homogeneous(const ExpansiveMatrix& m, const BaseCell& base,
                        int i_min, int i_max) {
  base.validate(m.dim());
  if (!base.origin_excluded)
    throw Error(ErrorCode::OriginNotExcluded,
                "homogeneous base cell must exclude the origin");
  if (i_min > i_max)
    throw Error(ErrorCode::IndexOutOfRange, "index range is empty");
  return Cover::make(CoverKind::homogeneous, m, base, std::nullopt, i_min,
                     i_max);
}

Cover build_inhomogeneous(const ExpansiveMatrix& m, const BaseCell& low,
                          const BaseCell& base, int i_max) {
  low.validate(m.dim());
  base.validate(m.dim());
  if (low.origin_excluded || low.euclid_inner(m.dim()) > 0.0)
    throw Error(ErrorCode::LowCellMissesOrigin,
                "inhomogeneous low cell must contain the origin");
  if (!base.origin_excluded)
    throw Error(ErrorCode::OriginNotExcluded,
                "inhomogeneous annular cell must exclude the origin");
  if (i_max < 0)
    throw Error(ErrorCode::IndexOutOfRange, "index range is empty");
  return Cover::make(CoverKind::inhomogeneous, m, base, low, 0, i_max);
}

Cover Cover::make(CoverKind kind, const ExpansiveMatrix& m,
                  const BaseCell& base, std::optional<BaseCell> low, int i_min,
                  int i_max) {
  Cover c;
  c.kind_ = kind;
  c.matrix_ = m;
  c.base_ = base;
  c.low_ = std::move(low);
  c.i_min_ = i_min;
  c.i_max_ = i_max;
  for (int i = i_min; i <= i_max; ++i) {
    const int p = kind == CoverKind::homogeneous ? i : (i == 0 ? 0 : i - 1);
    c.transforms_.push_back(power(m, p));
    c.inv_transforms_.push_back(power(m, -p));
    c.abs_dets_.push_back(std::abs(det_power(m, p)));
  }
  for (int i = i_min; i <= i_max; ++i) {
    const BaseCell& cell =
        (kind == CoverKind::inhomogeneous && i == 0) ? *c.low_ : base;
    const auto samples = cell_samples(cell, m.dim(), 24);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    const Eigen::MatrixXd& t = c.transforms_[i - i_min];
    for (const auto& s : samples) {
      const double rho = (t * s).norm();
      lo = std::min(lo, rho);
      hi = std::max(hi, rho);
    }
    if (cell.euclid_inner(m.dim()) == 0.0) lo = 0.0;
    c.spans_.emplace_back(lo, hi);
  }
  return c;
}

CoveringResult covering_check(const Cover& c, int probe_grid,
                              std::optional<ProbeRegion> region_opt) {
  const ProbeRegion region =
      region_opt ? *region_opt : c.default_probe_region();
  CoveringResult result;
  if (region.empty()) return result;

  const int d = c.matrix().dim();
  const int n = std::max(2, probe_grid);
  const std::vector<double> axis = linspace(-region.outer, region.outer, n, true);

  std::vector<int> idx(d, 0);
  Eigen::VectorXd pt(d);
  while (true) {
    for (int a = 0; a < d; ++a) pt(a) = axis[idx[a]];
    const double rho = pt.norm();
    if (rho >= region.inner && rho <= region.outer) {
      bool hit = false;
      for (int i = c.i_min(); i <= c.i_max() && !hit; ++i)
        hit = c.member_contains(i, pt, /*shrunk=*/true);
      if (!hit) {
        result.covered = false;
        result.witness = pt;
        return result;
      }
    }
    int a = 0;
    for (; a < d; ++a) {
      if (++idx[a] < n) break;
      idx[a] = 0;
    }
    if (a == d) break;
  }
  return result;
}

namespace {

// Radial interval of member i in the relevant norm (valid in d=1 for all cell
// kinds, and for scalar matrices with Euclidean annuli).
std::pair<double, double> radial_interval(const Cover& c, int i, double scale) {
  const BaseCell& cell = c.cell_of(i);
  const double lo =
      cell.kind == CellKind::centered_box ? 0.0 : cell.inner_radius;
  return {lo * scale, cell.outer_radius * scale};
}

bool intervals_touch(std::pair<double, double> a, std::pair<double, double> b) {
  const double tol =
      kIntervalTolRel * std::max(std::min(a.second, b.second), 1e-300);
  return std::max(a.first, b.first) <= std::min(a.second, b.second) + tol;
}

}  // namespace

bool members_intersect(const Cover& c, int i, int j, int sample_per_axis) {
  if (i == j) return true;
  const int d = c.matrix().dim();

  if (d == 1) {
    const double si = std::abs(c.transform(i)(0, 0));
    const double sj = std::abs(c.transform(j)(0, 0));
    return intervals_touch(radial_interval(c, i, si), radial_interval(c, j, sj));
  }

  const Eigen::MatrixXd& A = c.matrix().entries();
  const bool diagonal = is_diagonal(A);

  if (diagonal && is_sup_kind(c.cell_of(i).kind) &&
      is_sup_kind(c.cell_of(j).kind)) {
    // Member i = {xi : r_i <= max_k |xi_k| / c_k(i) <= R_i} with per-axis
    // scales c_k = |T_i(k,k)|. The corner of the intersection box maximizes
    // every coordinate at once, so it decides non-emptiness exactly.
    const auto [ri, Ri] = radial_interval(c, i, 1.0);
    const auto [rj, Rj] = radial_interval(c, j, 1.0);
    Eigen::VectorXd ci(d), cj(d), h(d);
    for (int a = 0; a < d; ++a) {
      ci(a) = std::abs(c.transform(i)(a, a));
      cj(a) = std::abs(c.transform(j)(a, a));
      h(a) = std::min(Ri * ci(a), Rj * cj(a));
    }
    bool ok_i = ri == 0.0, ok_j = rj == 0.0;
    for (int a = 0; a < d; ++a) {
      if (!ok_i && h(a) >= ri * ci(a) * (1.0 - kIntervalTolRel)) ok_i = true;
      if (!ok_j && h(a) >= rj * cj(a) * (1.0 - kIntervalTolRel)) ok_j = true;
    }
    return ok_i && ok_j;
  }

  const bool scalar =
      diagonal && [&] {
        for (int a = 1; a < d; ++a)
          if (std::abs(A(a, a) - A(0, 0)) > 1e-14 * std::abs(A(0, 0)))
            return false;
        return true;
      }();
  if (scalar && c.cell_of(i).kind == CellKind::annulus &&
      c.cell_of(j).kind == CellKind::annulus) {
    const double si = std::pow(std::abs(A(0, 0)), double(i - j));
    return intervals_touch(radial_interval(c, i, si), radial_interval(c, j, 1.0));
  }

  // General case: sample each member (boundary included) and test membership
  // in the other. A deliberate approximation; exact affine-image intersection
  // is out of scope.
  for (int pass = 0; pass < 2; ++pass) {
    const int src = pass == 0 ? i : j;
    const int dst = pass == 0 ? j : i;
    const auto samples = cell_samples(c.cell_of(src), d, sample_per_axis);
    const Eigen::MatrixXd& t = c.transform(src);
    for (const auto& s : samples)
      if (c.member_contains(dst, t * s)) return true;
  }
  return false;
}

int admissibility_index(const Cover& c) {
  int best = 1;
  for (int i = c.i_min(); i <= c.i_max(); ++i) {
    int count = 0;
    for (int j = c.i_min(); j <= c.i_max(); ++j)
      if (members_intersect(c, i, j)) ++count;
    best = std::max(best, count);
  }
  return best;
}

double transition_norm_bound(const Cover& c) {
  double bound = 0.0;
  for (int i = c.i_min(); i <= c.i_max(); ++i) {
    for (int j = c.i_min(); j <= c.i_max(); ++j) {
      if (!members_intersect(c, i, j)) continue;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.inv_transform(i) * c.transform(j));
      bound = std::max(bound, svd.singularValues()(0));
    }
  }
  return bound;
}

int neighbor_gap(const Cover& c) {
  int gap = 0;
  for (int i = c.i_min(); i <= c.i_max(); ++i)
    for (int j = i + 1; j <= c.i_max(); ++j)
      if (members_intersect(c, i, j)) gap = std::max(gap, j - i);
  return gap;
}

std::vector<Eigen::VectorXd> sample_region_points(const ProbeRegion& region,
                                                  int dim, int count,
                                                  unsigned seed) {
  std::vector<Eigen::VectorXd> pts;
  if (region.empty()) return pts;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  pts.reserve(count);
  while (static_cast<int>(pts.size()) < count) {
    double rho;
    if (region.inner > 0.0) {
      // Log-radial: even coverage across the scales of the cover.
      rho = region.inner * std::pow(region.outer / region.inner, unif(rng));
    } else {
      rho = region.outer * std::pow(unif(rng), 1.0 / dim);
    }
    Eigen::VectorXd dir(dim);
    if (dim == 1) {
      dir(0) = unif(rng) < 0.5 ? -1.0 : 1.0;
    } else {
      double norm = 0.0;
      do {
        for (int a = 0; a < dim; ++a) dir(a) = gauss(rng);
        norm = dir.norm();
      } while (norm < 1e-12);
      dir /= norm;
    }
    pts.push_back(rho * dir);
  }
  return pts;
}

}  // namespace anisoframe
