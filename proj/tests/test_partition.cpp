#include "anisoframe/partition.hpp"

#include <cmath>
#include <random>

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

}  // namespace

TEST_CASE("partition sums to one by construction") {
  const auto m = scalar_matrix(2.0);
  const auto cover = build_homogeneous(m, BaseCell::annulus(0.25, 1.0), -4, 4);
  const auto pou = build_partition(cover);
  CHECK(pou.phi_sum(pt1(0.7)) == doctest::Approx(1.0).epsilon(1e-12));

  const auto probes = sample_region_points(cover.default_probe_region(), 1,
                                           10000, 20240901u);
  double worst = 0.0;
  for (const auto& p : probes) {
    worst = std::max(worst, std::abs(pou.phi_sum(p) - 1.0));
    for (int i = cover.i_min(); i <= cover.i_max(); ++i) {
      const double v = pou.phi(i, p);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("partition support matches the cover members exactly") {
  const auto m = scalar_matrix(2.0);
  const auto cover = build_homogeneous(m, BaseCell::annulus(0.25, 1.0), -3, 3);
  const auto pou = build_partition(cover);
  for (int i = -3; i <= 3; ++i) {
    const double lo = 0.25 * std::pow(2.0, i), hi = std::pow(2.0, i);
    // 1% inside the member: positive; outside: exactly zero
    CHECK(pou.phi(i, pt1(lo * 1.01)) > 0.0);
    CHECK(pou.phi(i, pt1(hi * 0.99)) > 0.0);
    CHECK(pou.phi(i, pt1(lo * 0.99)) == 0.0);
    CHECK(pou.phi(i, pt1(hi * 1.01)) == 0.0);
  }
  CHECK_THROWS_AS((void)pou.phi(5, pt1(0.5)), Error);
}

TEST_CASE("deep inside a member with no overlap the value is exactly one") {
  // base +-[0.4, 1] under A=2: member i has the single-bump core
  // (0.5, 0.8) * 2^i where neither neighbor reaches
  const auto m = scalar_matrix(2.0);
  const auto cover = build_homogeneous(m, BaseCell::annulus(0.4, 1.0), -3, 3);
  const auto pou = build_partition(cover);
  CHECK(pou.phi(0, pt1(0.65)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pou.phi(1, pt1(1.3)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("two-cell overlaps split the unit between the two bumps") {
  const auto m = scalar_matrix(2.0);
  const auto cover = build_homogeneous(m, BaseCell::annulus(0.25, 1.0), -3, 3);
  const auto pou = build_partition(cover);
  // 0.7 lies in members -1 (=[1/8,1/2])? no: [0.125,0.5]; members 0 and 1?
  // member 0 = [0.25,1], member 1 = [0.5,2]: 0.7 is in both, in no others.
  const double a = pou.phi(0, pt1(0.7));
  const double b = pou.phi(1, pt1(0.7));
  CHECK(a > 0.0);
  CHECK(b > 0.0);
  CHECK(a < 1.0);
  CHECK(b < 1.0);
  CHECK(a + b == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("homogeneous self-similarity phi_{i+1}(A xi) = phi_i(xi)") {
  const auto m = scalar_matrix(2.0);
  const auto cover = build_homogeneous(m, BaseCell::annulus(0.25, 1.0), -6, 6);
  const auto pou = build_partition(cover);
  for (int k = 0; k < 1024; ++k) {
    const double x = 0.3 + 0.9 * k / 1024.0;
    for (int i = -2; i <= 1; ++i) {
      const double lhs = pou.phi(i + 1, pt1(2.0 * x * std::pow(2.0, i)));
      const double rhs = pou.phi(i, pt1(x * std::pow(2.0, i)));
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("a cover with holes is rejected when building the partition") {
  // disjoint members: scaled copies under A=4 with a half-to-one annulus
  const auto m = scalar_matrix(4.0);
  const auto cover = build_homogeneous(m, BaseCell::annulus(0.5, 1.0), -2, 2);
  try {
    (void)build_partition(cover);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CoverNotCovering);
  }
}

TEST_CASE("partition works for the axis-swapping matrix") {
  const auto m = matrix2(0, 2, 1, 0);
  const auto cover = build_homogeneous(m, default_base_cell(m), -4, 4);
  const auto pou = build_partition(cover);
  const auto probes = sample_region_points(cover.default_probe_region(), 2,
                                           2000, 7u);
  double worst = 0.0;
  for (const auto& p : probes)
    worst = std::max(worst, std::abs(pou.phi_sum(p) - 1.0));
  CHECK(worst < 1e-10);
}

TEST_CASE("weights follow the det-power laws") {
  const auto m4 = matrix2(2, 0, 0, 2);  // |det| = 4
  const auto homo = WeightSequence::homogeneous(m4, 1);
  CHECK(weight(homo, 3) == doctest::Approx(64.0));
  CHECK(weight(homo, 0) == 1.0);
  CHECK(weight(homo, -2) == doctest::Approx(1.0 / 16.0).epsilon(1e-14));

  const auto zero_s = WeightSequence::homogeneous(m4, 0);
  for (int i = -5; i <= 5; ++i) CHECK(weight(zero_s, i) == 1.0);

  const auto inhomo = WeightSequence::inhomogeneous(m4, 2);
  CHECK(weight(inhomo, 0) == 1.0);  // w_0 := 1
  CHECK(weight(inhomo, 1) == 1.0);  // |det A|^{s(i-1)} with i = 1
  CHECK(weight(inhomo, 3) == doctest::Approx(256.0));
  CHECK_THROWS_AS((void)weight(inhomo, -1), Error);
}

TEST_CASE("weight ratio identity is exact") {
  const auto m = matrix2(2, 0, 0, 3);  // |det| = 6
  for (int s = -2; s <= 2; ++s) {
    const auto w = WeightSequence::homogeneous(m, s);
    for (int i = -6; i <= 6; ++i) {
      for (int j = -6; j <= 6; ++j) {
        const double ratio = weight(w, i) / weight(w, j);
        const double expected = std::pow(6.0, double(s) * (i - j));
        CHECK(std::abs(ratio - expected) <= 1e-12 * std::abs(expected));
      }
    }
  }
}

TEST_CASE("moderateness constant from the neighbor gap") {
  SUBCASE("dyadic d=1: gap 2, |det| = 2, s = 1 gives C = 4") {
    const auto m = scalar_matrix(2.0);
    const auto cover =
        build_homogeneous(m, BaseCell::annulus(0.25, 1.0), -4, 4);
    const auto w = WeightSequence::homogeneous(m, 1);
    CHECK(moderateness_constant(w, cover) == doctest::Approx(4.0));
  }
  SUBCASE("s = 0 gives C = 1") {
    const auto m = scalar_matrix(2.0);
    const auto cover =
        build_homogeneous(m, BaseCell::annulus(0.25, 1.0), -4, 4);
    const auto w = WeightSequence::homogeneous(m, 0);
    CHECK(moderateness_constant(w, cover) == doctest::Approx(1.0));
  }
  SUBCASE("|det| = 6, s = -1, gap 1 gives C = 6") {
    const auto m = matrix2(2, 0, 0, 3);
    const auto cover =
        build_homogeneous(m, BaseCell::sup_annulus(1.0 / 3.0, 1.0), -3, 3);
    REQUIRE(neighbor_gap(cover) == 1);
    const auto w = WeightSequence::homogeneous(m, -1);
    CHECK(moderateness_constant(w, cover) == doctest::Approx(6.0));
  }
}

TEST_CASE("moderateness bound holds on every intersecting pair") {
  const auto m = matrix2(2, 0, 0, 3);
  const auto cover =
      build_homogeneous(m, BaseCell::sup_annulus(1.0 / 6.0, 1.0), -3, 3);
  for (int s = -2; s <= 2; ++s) {
    const auto w = WeightSequence::homogeneous(m, s);
    const double C = moderateness_constant(w, cover);  // asserts internally
    for (int i = cover.i_min(); i <= cover.i_max(); ++i)
      for (int j = cover.i_min(); j <= cover.i_max(); ++j)
        if (members_intersect(cover, i, j))
          CHECK(weight(w, i) <= C * weight(w, j) * (1 + 1e-12));
  }
}

TEST_CASE("mollifier profile") {
  CHECK(mollifier(0.0) == doctest::Approx(1.0));
  CHECK(mollifier(1.0) == 0.0);
  CHECK(mollifier(-1.0) == 0.0);
  CHECK(mollifier(2.0) == 0.0);
  CHECK(mollifier(0.5) > 0.0);
  CHECK(mollifier(0.5) < 1.0);
}
