#include "anisoframe/cover.hpp"

#include <cmath>

#include "doctest.h"

using namespace anisoframe;

namespace {

ExpansiveMatrix scalar_matrix(double a) {
  Eigen::MatrixXd m(1, 1);
  m << a;
  return validate_expansive(m);
}

ExpansiveMatrix matrix2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return validate_expansive(m);
}

Eigen::VectorXd pt1(double x) {
  Eigen::VectorXd p(1);
  p << x;
  return p;
}

Eigen::VectorXd pt2(double x, double y) {
  Eigen::VectorXd p(2);
  p << x, y;
  return p;
}

// Interval oracle for d=1 covers: member i of {A^i [r,R]} as [r s_i, R s_i].
struct IntervalOracle {
  double r, R, a;
  std::pair<double, double> member(int i) const {
    return {r * std::pow(a, i), R * std::pow(a, i)};
  }
  bool intersect(int i, int j) const {
    const auto mi = member(i), mj = member(j);
    return std::max(mi.first, mj.first) <=
           std::min(mi.second, mj.second) * (1 + 1e-12);
  }
};

}  // namespace

TEST_CASE("homogeneous cover in d=1: members are scaled annuli") {
  const auto m = scalar_matrix(2.0);
  const auto cover =
      build_homogeneous(m, BaseCell::annulus(0.25, 1.0), -4, 4);
  CHECK(cover.size() == 9);
  // cell 2 = +-[1, 4]
  CHECK(cover.member_contains(2, pt1(1.0)));
  CHECK(cover.member_contains(2, pt1(4.0)));
  CHECK(cover.member_contains(2, pt1(-2.5)));
  CHECK_FALSE(cover.member_contains(2, pt1(0.99)));
  CHECK_FALSE(cover.member_contains(2, pt1(4.01)));
}

TEST_CASE("homogeneous cover in d=2 with sup-norm cells") {
  const auto m = matrix2(2, 0, 0, 2);
  const auto cover =
      build_homogeneous(m, BaseCell::sup_annulus(0.25, 1.0), -3, 3);
  // cell -1 = {1/8 <= |xi|_inf <= 1/2}
  CHECK(cover.member_contains(-1, pt2(0.125, 0.0)));
  CHECK(cover.member_contains(-1, pt2(0.5, 0.3)));
  CHECK_FALSE(cover.member_contains(-1, pt2(0.05, 0.05)));
  CHECK_FALSE(cover.member_contains(-1, pt2(0.6, 0.0)));
}

TEST_CASE("cover construction rejects bad cells") {
  const auto m = scalar_matrix(2.0);
  try {
    (void)build_homogeneous(m, BaseCell::annulus(0.0, 1.0), -1, 1);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OriginNotExcluded);
  }
  BaseCell with_origin = BaseCell::box(1.0);
  try {
    (void)build_homogeneous(m, with_origin, -1, 1);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OriginNotExcluded);
  }
  try {
    (void)build_homogeneous(m, BaseCell::annulus(0.25, 1.2), -1, 1);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CellOutOfBox);
  }
}

TEST_CASE("inhomogeneous cover layout") {
  const auto m = scalar_matrix(2.0);
  const auto cover = build_inhomogeneous(m, BaseCell::box(1.0),
                                         BaseCell::annulus(0.5, 1.0), 5);
  // member 1 = +-[1/2, 1], member 3 = +-[2, 4]
  CHECK(cover.member_contains(0, pt1(0.0)));
  CHECK(cover.member_contains(1, pt1(0.75)));
  CHECK_FALSE(cover.member_contains(1, pt1(1.5)));
  CHECK(cover.member_contains(3, pt1(3.0)));
  CHECK(cover.member_contains(3, pt1(-2.0)));
  CHECK_FALSE(cover.member_contains(3, pt1(4.5)));

  try {
    (void)build_inhomogeneous(m, BaseCell::annulus(0.5, 1.0),
                              BaseCell::annulus(0.5, 1.0), 3);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LowCellMissesOrigin);
  }
}

TEST_CASE("inhomogeneous cover under diag(2,3): member 2 = A * base") {
  const auto m = matrix2(2, 0, 0, 3);
  const auto base = BaseCell::sup_annulus(1.0 / 6.0, 1.0);
  const auto cover = build_inhomogeneous(m, BaseCell::box(1.0), base, 4);
  for (double x : {0.2, 0.5, 0.9}) {
    for (double y : {0.0, 0.4, 0.95}) {
      const Eigen::VectorXd p = pt2(x, y);
      const Eigen::VectorXd mapped = m.entries() * p;
      CHECK(cover.member_contains(2, mapped) == base.contains(p));
    }
  }
}

TEST_CASE("covering check against the brute-force grid oracle") {
  const auto m = scalar_matrix(2.0);
  const auto cover =
      build_homogeneous(m, BaseCell::annulus(0.25, 1.0, /*shrink=*/1.0), -4, 4);
  const ProbeRegion region{1.0 / 16.0, 8.0};

  const auto result = covering_check(cover, 4096, region);
  CHECK(result.covered);

  // independent oracle on the same region
  bool oracle_covered = true;
  for (int k = 0; k < 4096; ++k) {
    const double x = -8.0 + 16.0 * k / 4095.0;
    if (std::abs(x) < region.inner || std::abs(x) > region.outer) continue;
    bool hit = false;
    for (int i = -4; i <= 4 && !hit; ++i)
      hit = std::abs(x) >= 0.25 * std::pow(2.0, i) &&
            std::abs(x) <= std::pow(2.0, i);
    oracle_covered &= hit;
  }
  CHECK(oracle_covered == result.covered);
}

TEST_CASE("covering check fails for a single annulus and reports a witness") {
  const auto m = scalar_matrix(2.0);
  const auto cover =
      build_homogeneous(m, BaseCell::annulus(0.25, 1.0, 1.0), 0, 0);
  const auto result = covering_check(cover, 4096, ProbeRegion{1.0 / 16.0, 8.0});
  CHECK_FALSE(result.covered);
  REQUIRE(result.witness.has_value());
  const double w = std::abs((*result.witness)(0));
  CHECK(w >= 1.0 / 16.0);
  CHECK(w <= 8.0);
  CHECK((w < 0.25 || w > 1.0));  // genuinely outside the only member
}

TEST_CASE("empty probe region is vacuously covered") {
  const auto m = scalar_matrix(2.0);
  const auto cover = build_homogeneous(m, BaseCell::annulus(0.25, 1.0), 0, 0);
  const auto result = covering_check(cover, 64, ProbeRegion{2.0, 1.0});
  CHECK(result.covered);
  CHECK_FALSE(result.witness.has_value());
}

TEST_CASE("covering is monotone under range enlargement") {
  const auto m = scalar_matrix(2.0);
  const ProbeRegion region{1.0 / 16.0, 8.0};
  const auto small =
      build_homogeneous(m, BaseCell::annulus(0.25, 1.0, 1.0), -4, 4);
  const auto large =
      build_homogeneous(m, BaseCell::annulus(0.25, 1.0, 1.0), -5, 5);
  CHECK(covering_check(small, 1024, region).covered);
  CHECK(covering_check(large, 1024, region).covered);
}

TEST_CASE("admissibility index matches the interval oracle") {
  const auto m = scalar_matrix(2.0);
  SUBCASE("quarter-to-one annulus: five neighbors (touching counts)") {
    const auto cover =
        build_homogeneous(m, BaseCell::annulus(0.25, 1.0), -4, 4);
    CHECK(admissibility_index(cover) == 5);
    const IntervalOracle oracle{0.25, 1.0, 2.0};
    int best = 0;
    for (int i = -4; i <= 4; ++i) {
      int count = 0;
      for (int j = -4; j <= 4; ++j) count += oracle.intersect(i, j) ? 1 : 0;
      best = std::max(best, count);
    }
    CHECK(best == 5);
  }
  SUBCASE("half-to-one annulus: endpoint touching makes three") {
    const auto cover = build_homogeneous(m, BaseCell::annulus(0.5, 1.0), -4, 4);
    CHECK(admissibility_index(cover) == 3);
  }
  SUBCASE("single member") {
    const auto cover = build_homogeneous(m, BaseCell::annulus(0.25, 1.0), 2, 2);
    CHECK(admissibility_index(cover) == 1);
  }
}

TEST_CASE("admissibility is stable under range enlargement") {
  const auto m = scalar_matrix(2.0);
  const auto small = build_homogeneous(m, BaseCell::annulus(0.25, 1.0), -4, 4);
  const auto large = build_homogeneous(m, BaseCell::annulus(0.25, 1.0), -7, 7);
  CHECK(admissibility_index(small) == admissibility_index(large));
}

TEST_CASE("neighbor gap") {
  SUBCASE("d=1 dyadic") {
    const auto cover = build_homogeneous(scalar_matrix(2.0),
                                         BaseCell::annulus(0.25, 1.0), -4, 4);
    CHECK(neighbor_gap(cover) == 2);
  }
  SUBCASE("d=2 dyadic sup-annulus") {
    const auto cover = build_homogeneous(
        matrix2(2, 0, 0, 2), BaseCell::sup_annulus(0.25, 1.0), -3, 3);
    CHECK(neighbor_gap(cover) == 2);
  }
  SUBCASE("disjoint scaled copies") {
    const auto cover = build_homogeneous(scalar_matrix(4.0),
                                         BaseCell::annulus(0.5, 1.0), -3, 3);
    CHECK(neighbor_gap(cover) == 0);
  }
}

TEST_CASE("neighbor gap is sharp: distance gap intersects, gap+1 does not") {
  const auto cover = build_homogeneous(scalar_matrix(2.0),
                                       BaseCell::annulus(0.25, 1.0), -5, 5);
  const int gap = neighbor_gap(cover);
  bool some_at_gap = false;
  bool none_beyond = true;
  for (int i = cover.i_min(); i <= cover.i_max(); ++i) {
    for (int j = cover.i_min(); j <= cover.i_max(); ++j) {
      if (std::abs(i - j) == gap && members_intersect(cover, i, j))
        some_at_gap = true;
      if (std::abs(i - j) > gap && members_intersect(cover, i, j))
        none_beyond = false;
    }
  }
  CHECK(some_at_gap);
  CHECK(none_beyond);
}

TEST_CASE("member self-similarity: member(i+1) = A member(i)") {
  const auto m = matrix2(2, 0, 0, 3);
  const auto cover =
      build_homogeneous(m, BaseCell::sup_annulus(1.0 / 6.0, 1.0), -2, 2);
  const auto samples = cell_samples(cover.base(), 2, 12);
  for (int i = -2; i <= 1; ++i) {
    for (const auto& s : samples) {
      const Eigen::VectorXd in_member = cover.transform(i) * s;
      CHECK(cover.member_contains(i + 1, m.entries() * in_member));
    }
  }
}

TEST_CASE("non-diagonal matrix covers still behave") {
  const auto m = matrix2(0, 2, 1, 0);
  const auto cover =
      build_homogeneous(m, default_base_cell(m), -4, 4);
  const auto result = covering_check(cover, 96);
  CHECK(result.covered);
  CHECK(admissibility_index(cover) >= 1);
  CHECK(neighbor_gap(cover) >= 1);
  CHECK(transition_norm_bound(cover) >= 1.0);
}

TEST_CASE("transition norms on intersecting pairs stay bounded") {
  const auto cover = build_homogeneous(scalar_matrix(2.0),
                                       BaseCell::annulus(0.25, 1.0), -6, 6);
  // gap 2 means ||A^{j-i}|| <= 2^2 on intersecting pairs
  CHECK(transition_norm_bound(cover) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("default cells follow the operator norm") {
  const auto m = matrix2(2, 0, 0, 3);
  const auto cell = default_base_cell(m);
  CHECK(cell.kind == CellKind::box_minus_box);
  CHECK(cell.inner_radius == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  const auto m1 = scalar_matrix(2.0);
  const auto cell1 = default_base_cell(m1);
  CHECK(cell1.kind == CellKind::annulus);
  CHECK(cell1.inner_radius == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("quadrature rules integrate exactly decomposed cells") {
  SUBCASE("d=1 annulus volume") {
    const auto rule = cell_quadrature(BaseCell::annulus(0.25, 1.0), 1, 64);
    CHECK(rule.volume() == doctest::Approx(1.5).epsilon(1e-12));
  }
  SUBCASE("d=2 polar annulus volume") {
    const auto rule = cell_quadrature(BaseCell::annulus(0.25, 1.0), 2, 64);
    CHECK(rule.volume() ==
          doctest::Approx(M_PI * (1.0 - 0.0625)).epsilon(1e-12));
  }
  SUBCASE("d=2 sup annulus volume") {
    const auto rule = cell_quadrature(BaseCell::sup_annulus(0.25, 1.0), 2, 32);
    CHECK(rule.volume() == doctest::Approx(4.0 - 0.25).epsilon(1e-12));
  }
  SUBCASE("d=3 sup annulus volume") {
    const auto rule = cell_quadrature(BaseCell::sup_annulus(0.5, 1.0), 3, 16);
    CHECK(rule.volume() == doctest::Approx(8.0 - 1.0).epsilon(1e-12));
  }
  SUBCASE("smooth integrand agreement with analytic value") {
    // int_{1/4<=|x|<=1} x^2 dx in d=1: 2*(1/3)(1 - 1/64)
    const auto rule = cell_quadrature(BaseCell::annulus(0.25, 1.0), 1, 512);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
      sum += rule.weights[k] * rule.nodes[k](0) * rule.nodes[k](0);
    CHECK(sum == doctest::Approx(2.0 / 3.0 * (1.0 - 1.0 / 64.0)).epsilon(1e-5));
  }
}
