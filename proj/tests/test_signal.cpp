#include "anisoframe/signal.hpp"

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

SampledSignal gaussian_1d(int n, double omega, double center) {
  SampledSignal g = make_signal({n}, {omega});
  for (int j = 0; j < n; ++j) {
    const double t = omega * j / n;
    g.values[j] = std::exp(-M_PI * (t - center) * (t - center));
  }
  return g;
}

}  // namespace

TEST_CASE("impulse spectrum is flat with modulus n^{-d/2}") {
  SampledSignal g = make_signal({64}, {1.0});
  g.values[0] = 1.0;
  const Spectrum s = forward_spectrum(g);
  for (const auto& v : s.values)
    CHECK(std::abs(v) == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("on-grid exponential occupies a single bin") {
  const int n = 64;
  SampledSignal g = make_signal({n}, {2.0});
  for (int j = 0; j < n; ++j) {
    const double phase = 2.0 * M_PI * 5.0 * j / n;
    g.values[j] = Complex(std::cos(phase), std::sin(phase));
  }
  const Spectrum s = forward_spectrum(g);
  CHECK(std::abs(s.values[5]) == doctest::Approx(8.0).epsilon(1e-12));
  for (int b = 0; b < n; ++b)
    if (b != 5) CHECK(std::abs(s.values[b]) < 1e-11);
}

TEST_CASE("forward-inverse roundtrip is the identity") {
  std::mt19937_64 rng(11u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SUBCASE("d=1") {
    SampledSignal g = make_signal({1024}, {16.0});
    for (auto& v : g.values) v = Complex(gauss(rng), gauss(rng));
    const SampledSignal back = inverse_spectrum(forward_spectrum(g));
    double worst = 0.0;
    for (std::size_t k = 0; k < g.values.size(); ++k)
      worst = std::max(worst, std::abs(back.values[k] - g.values[k]));
    CHECK(worst < 1e-12);
  }
  SUBCASE("d=2") {
    SampledSignal g = make_signal({64, 64}, {8.0, 8.0});
    for (auto& v : g.values) v = Complex(gauss(rng), gauss(rng));
    const SampledSignal back = inverse_spectrum(forward_spectrum(g));
    double worst = 0.0;
    for (std::size_t k = 0; k < g.values.size(); ++k)
      worst = std::max(worst, std::abs(back.values[k] - g.values[k]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("grid sizes must be powers of two") {
  CHECK_THROWS_AS((void)make_signal({100}, {1.0}), Error);
  CHECK_THROWS_AS((void)make_signal({64}, {-1.0}), Error);
}

TEST_CASE("lp norms") {
  SUBCASE("constant one on unit period") {
    SampledSignal g = make_signal({128}, {1.0});
    for (auto& v : g.values) v = 1.0;
    CHECK(lp_norm(g, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lp_norm(g, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lp_norm(g, std::numeric_limits<double>::infinity()) ==
          doctest::Approx(1.0));
  }
  SUBCASE("doubling the grid halves the L1 norm of a one-sample impulse") {
    SampledSignal a = make_signal({256}, {1.0});
    SampledSignal b = make_signal({512}, {1.0});
    a.values[10] = 1.0;
    b.values[10] = 1.0;
    CHECK(lp_norm(a, 1.0) == doctest::Approx(2.0 * lp_norm(b, 1.0)));
  }
  SUBCASE("Gaussian L1 norm matches the closed-form integral") {
    const SampledSignal g = gaussian_1d(1024, 16.0, 8.0);
    CHECK(lp_norm(g, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("invalid exponent") {
    SampledSignal g = make_signal({64}, {1.0});
    CHECK_THROWS_AS((void)lp_norm(g, 0.0), Error);
    CHECK_THROWS_AS((void)lp_norm(g, -2.0), Error);
  }
}

TEST_CASE("band piece vanishes for spectra outside the member") {
  const auto m = scalar_matrix(2.0);
  const auto cover = build_homogeneous(m, BaseCell::annulus(0.4, 1.0), -3, 4);
  const auto pou = build_partition(cover);

  Spectrum s;
  s.grid = {512};
  s.period = {8.0};
  s.values.assign(512, Complex(0.0, 0.0));
  // place mass at |xi| ~ 10, far from member 0 = [0.4, 1]
  for (std::size_t flat = 0; flat < s.values.size(); ++flat) {
    const double xi = s.frequency(flat)(0);
    if (std::abs(std::abs(xi) - 10.0) < 0.5) s.values[flat] = 1.0;
  }
  const SampledSignal piece = band_piece(s, pou, 0);
  for (const auto& v : piece.values) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("band piece is the identity on a single-bump core") {
  const auto m = scalar_matrix(2.0);
  const auto cover = build_homogeneous(m, BaseCell::annulus(0.4, 1.0), -3, 4);
  const auto pou = build_partition(cover);

  // member 2 core = (2, 3.2): bins there see phi_2 = 1
  Spectrum s;
  s.grid = {512};
  s.period = {8.0};
  s.values.assign(512, Complex(0.0, 0.0));
  std::mt19937_64 rng(3u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t flat = 0; flat < s.values.size(); ++flat) {
    const double xi = std::abs(s.frequency(flat)(0));
    if (xi > 2.1 && xi < 3.1) s.values[flat] = Complex(gauss(rng), gauss(rng));
  }
  const SampledSignal g = inverse_spectrum(s);
  const SampledSignal piece = band_piece(s, pou, 2);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.values.size(); ++k)
    worst = std::max(worst, std::abs(piece.values[k] - g.values[k]));
  CHECK(worst < 1e-12);
}

TEST_CASE("Gaussian band piece matches a double-resolution quadrature oracle") {
  const auto m = scalar_matrix(2.0);
  const auto cover = build_homogeneous(m, BaseCell::annulus(0.25, 1.0), -4, 4);
  const auto pou = build_partition(cover);

  const int n = 512;
  const double omega = 16.0, center = 8.0;
  const SampledSignal g = gaussian_1d(n, omega, center);
  const SampledSignal piece = band_piece(g, pou, 1);

  // oracle: analytic spectrum, direct Fourier-series sum at double resolution
  for (int j : {0, 57, 133, 256, 401}) {
    const double t = omega * j / n;
    Complex oracle(0.0, 0.0);
    const int fine = 2 * n;
    for (int b = 0; b < fine; ++b) {
      const int k = b <= fine / 2 - 1 ? b : b - fine;
      const double xi = k / omega;
      Eigen::VectorXd xiv(1);
      xiv << xi;
      // F[exp(-pi (t-c)^2)](xi) = exp(-pi xi^2) exp(-2 pi i c xi)
      const Complex ghat = std::exp(-M_PI * xi * xi) *
                           Complex(std::cos(2 * M_PI * center * xi),
                                   -std::sin(2 * M_PI * center * xi));
      const Complex term = pou.phi(1, xiv) * ghat / omega *
                           Complex(std::cos(2 * M_PI * xi * t),
                                   std::sin(2 * M_PI * xi * t));
      oracle += term;
    }
    CHECK(std::abs(piece.values[j] - oracle) < 1e-8);
  }
}

TEST_CASE("band reconstruction: partition pieces sum back to the signal") {
  const auto m = scalar_matrix(2.0);
  const auto cover = build_homogeneous(m, BaseCell::annulus(0.25, 1.0), -5, 5);
  const auto pou = build_partition(cover);

  SampledSignal f = random_band_limited_signal(
      {1024}, {16.0},
      [&](const Eigen::VectorXd& xi) {
        const double rho = xi.norm();
        return rho > 0.1 && rho < 8.0;
      },
      99u);
  SampledSignal sum = make_signal({1024}, {16.0});
  const Spectrum spec = forward_spectrum(f);
  for (int i = cover.i_min(); i <= cover.i_max(); ++i) {
    const SampledSignal piece = band_piece(spec, pou, i);
    for (std::size_t k = 0; k < sum.values.size(); ++k)
      sum.values[k] += piece.values[k];
  }
  double err = 0.0, ref = 0.0;
  for (std::size_t k = 0; k < sum.values.size(); ++k) {
    err += std::norm(sum.values[k] - f.values[k]);
    ref += std::norm(f.values[k]);
  }
  CHECK(std::sqrt(err / ref) < 1e-8);
}

TEST_CASE("decomposition norm basics") {
  const auto m = scalar_matrix(4.0);  // |det A| = 4
  const auto cover = build_homogeneous(m, BaseCell::annulus(0.125, 1.0), -2, 4);
  const auto pou = build_partition(cover);
  const auto w = WeightSequence::homogeneous(m, 1);

  SUBCASE("zero signal") {
    const SampledSignal zero = make_signal({512}, {4.0});
    CHECK(decomposition_norm(zero, pou, w, 2.0, 2.0).value == 0.0);
  }
  SUBCASE("single surviving band carries weight 64") {
    // member 3 core = (16, 32); band edge 512/(2*4) = 64
    Spectrum s;
    s.grid = {512};
    s.period = {4.0};
    s.values.assign(512, Complex(0.0, 0.0));
    std::mt19937_64 rng(5u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t flat = 0; flat < s.values.size(); ++flat) {
      const double xi = std::abs(s.frequency(flat)(0));
      if (xi > 17.0 && xi < 31.0) s.values[flat] = Complex(gauss(rng), gauss(rng));
    }
    const SampledSignal g = inverse_spectrum(s);
    const auto result = decomposition_norm(g, pou, w, 2.0, 2.0);
    CHECK(result.value ==
          doctest::Approx(64.0 * lp_norm(g, 2.0)).epsilon(1e-10));
    CHECK(result.excluded_mass < 1e-12);
  }
}

TEST_CASE("decomposition norm against an analytic-spectrum oracle") {
  // fixed Gaussian, (p,q) = (2,1), s = 0. The oracle bypasses the FFT path
  // entirely: closed-form spectrum, direct bin sums, Plancherel on the grid.
  const auto m = scalar_matrix(2.0);
  const auto cover = build_homogeneous(m, BaseCell::annulus(0.25, 1.0), -5, 5);
  const auto pou = build_partition(cover);
  const auto w = WeightSequence::homogeneous(m, 0);

  const int n = 1024;
  const double omega = 16.0, center = 8.0;
  const SampledSignal g = gaussian_1d(n, omega, center);
  const auto result = decomposition_norm(g, pou, w, 2.0, 1.0);

  double oracle = 0.0;
  double band2_continuum = 0.0;
  for (int i = cover.i_min(); i <= cover.i_max(); ++i) {
    double sum = 0.0;
    for (int b = 0; b < n; ++b) {
      const int k = b <= n / 2 - 1 ? b : b - n;
      const double xi = k / omega;
      Eigen::VectorXd xiv(1);
      xiv << xi;
      const double f = pou.phi(i, xiv) * std::exp(-M_PI * xi * xi);
      sum += f * f / omega;
    }
    oracle += std::sqrt(sum);

    if (i == 2) {
      // the grid surrogate of a well-resolved band tracks the continuum
      const double lo = 1.0, hi = 4.0;
      const int quad = 40000;
      for (int k = 0; k < quad; ++k) {
        const double xi = lo + (hi - lo) * (k + 0.5) / quad;
        Eigen::VectorXd xiv(1);
        xiv << xi;
        const double f = pou.phi(i, xiv) * std::exp(-M_PI * xi * xi);
        band2_continuum += 2.0 * f * f * (hi - lo) / quad;
      }
    }
  }
  CHECK(result.value == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(result.bands[7].lp ==
        doctest::Approx(std::sqrt(band2_continuum)).epsilon(1e-2));
}

TEST_CASE("decomposition norm properties") {
  const auto m = scalar_matrix(2.0);
  const auto cover = build_homogeneous(m, BaseCell::annulus(0.25, 1.0), -4, 4);
  const auto pou = build_partition(cover);
  const auto w = WeightSequence::homogeneous(m, 1);
  SampledSignal f = random_band_limited_signal(
      {512}, {8.0},
      [&](const Eigen::VectorXd& xi) {
        return xi.norm() > 0.2 && xi.norm() < 6.0;
      },
      17u);

  SUBCASE("quasi-norm homogeneity") {
    const double base = decomposition_norm(f, pou, w, 2.0, 1.5).value;
    SampledSignal scaled = f;
    for (auto& v : scaled.values) v *= -3.25;
    CHECK(decomposition_norm(scaled, pou, w, 2.0, 1.5).value ==
          doctest::Approx(3.25 * base).epsilon(1e-12));
  }
  SUBCASE("monotone in q") {
    const double n_half = decomposition_norm(f, pou, w, 2.0, 0.5).value;
    const double n_one = decomposition_norm(f, pou, w, 2.0, 1.0).value;
    const double n_two = decomposition_norm(f, pou, w, 2.0, 2.0).value;
    const double n_inf =
        decomposition_norm(f, pou, w, 2.0,
                           std::numeric_limits<double>::infinity())
            .value;
    CHECK(n_half >= n_one);
    CHECK(n_one >= n_two);
    CHECK(n_two >= n_inf);
  }
}

TEST_CASE("coefficient norms") {
  const auto m = scalar_matrix(2.0);

  SUBCASE("single coefficient at scale 0 has norm 1") {
    CoefficientArray c;
    c.dim = 1;
    ScaleCoefficients s0;
    s0.i = 0;
    s0.k_min = {0};
    s0.k_max = {0};
    s0.values = {Complex(1.0, 0.0)};
    c.scales.push_back(s0);
    const auto w = WeightSequence::homogeneous(m, 3);
    CHECK(coefficient_norm(c, m, w, 2.0, 2.0) == doctest::Approx(1.0));
  }
  SUBCASE("exponent arithmetic at scale i") {
    CoefficientArray c;
    c.dim = 1;
    ScaleCoefficients s;
    s.i = 4;
    s.k_min = {2};
    s.k_max = {2};
    s.values = {Complex(1.0, 0.0)};
    c.scales.push_back(s);
    const auto w = WeightSequence::homogeneous(m, 0);
    CHECK(coefficient_norm(c, m, w, 2.0, 2.0) == doctest::Approx(1.0));
    // p = 1: |det A|^{i(1/2 - 1)} = 2^{-4/2} = 1/4
    CHECK(coefficient_norm(c, m, w, 1.0, 2.0) ==
          doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("random array matches the brute-force weighted sum") {
    std::mt19937_64 rng(23u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CoefficientArray c;
    c.dim = 1;
    for (int i : {-1, 0, 2}) {
      ScaleCoefficients s;
      s.i = i;
      s.k_min = {-3};
      s.k_max = {4};
      for (int k = 0; k < 8; ++k) s.values.push_back(Complex(gauss(rng), gauss(rng)));
      c.scales.push_back(s);
    }
    const auto w = WeightSequence::homogeneous(m, 1);
    double expected = 0.0;
    for (const auto& s : c.scales) {
      double inner = 0.0;
      for (const auto& v : s.values) inner += std::norm(v);
      const double factor = std::pow(2.0, double(s.i) * (0.5 - 0.5)) *
                            std::pow(2.0, double(s.i));  // det^0 * w_i
      expected += factor * factor * inner;
    }
    CHECK(coefficient_norm(c, m, w, 2.0, 2.0) ==
          doctest::Approx(std::sqrt(expected)).epsilon(1e-12));
  }
  SUBCASE("solidity: entrywise domination is monotone") {
    std::mt19937_64 rng(29u);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    CoefficientArray big, small;
    big.dim = small.dim = 1;
    ScaleCoefficients sb, ss;
    sb.i = ss.i = 1;
    sb.k_min = ss.k_min = {0};
    sb.k_max = ss.k_max = {15};
    for (int k = 0; k < 16; ++k) {
      const double mag = unif(rng);
      sb.values.push_back(Complex(mag, 0.0));
      ss.values.push_back(Complex(mag * unif(rng), 0.0));
    }
    big.scales.push_back(sb);
    small.scales.push_back(ss);
    const auto w = WeightSequence::homogeneous(m, 2);
    for (double p : {0.5, 1.0, 2.0})
      for (double q : {0.5, 1.0, 3.0})
        CHECK(coefficient_norm(small, m, w, p, q) <=
              coefficient_norm(big, m, w, p, q) * (1 + 1e-12));
  }
  SUBCASE("inhomogeneous uses T_0 = identity") {
    const auto w = WeightSequence::inhomogeneous(m, 2);
    CoefficientArray c;
    c.dim = 1;
    ScaleCoefficients s0;
    s0.i = 0;
    s0.k_min = {0};
    s0.k_max = {0};
    s0.values = {Complex(1.0, 0.0)};
    c.scales.push_back(s0);
    CHECK(coefficient_norm(c, m, w, 1.0, 2.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("signal file round trips") {
  const char* tmp = std::getenv("ANISOFRAME_TEST_TMPDIR");
  const std::string dir = tmp ? tmp : ".";
  SampledSignal g = make_signal({64}, {2.0});
  std::mt19937_64 rng(31u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& v : g.values) v = Complex(gauss(rng), gauss(rng));

  for (bool text : {false, true}) {
    const std::string path =
        dir + (text ? "/sig_roundtrip.txt" : "/sig_roundtrip.bin");
    write_signal(g, path, text);
    const SampledSignal back = read_signal(path);
    REQUIRE(back.grid == g.grid);
    CHECK(back.period[0] == doctest::Approx(g.period[0]).epsilon(1e-15));
    double worst = 0.0;
    for (std::size_t k = 0; k < g.values.size(); ++k)
      worst = std::max(worst, std::abs(back.values[k] - g.values[k]));
    CHECK(worst < 1e-15);
  }
  CHECK_THROWS_AS((void)read_signal(dir + "/does_not_exist.bin"), Error);
}

TEST_CASE("coefficient file round trip") {
  const char* tmp = std::getenv("ANISOFRAME_TEST_TMPDIR");
  const std::string dir = tmp ? tmp : ".";
  CoefficientArray c;
  c.dim = 2;
  ScaleCoefficients s;
  s.i = -1;
  s.k_min = {-2, 1};
  s.k_max = {1, 3};
  std::mt19937_64 rng(37u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < 12; ++k) s.values.push_back(Complex(gauss(rng), gauss(rng)));
  c.scales.push_back(s);

  const std::string path = dir + "/coeff_roundtrip.txt";
  write_coefficients(c, path);
  const CoefficientArray back = read_coefficients(path);
  REQUIRE(back.scales.size() == 1);
  CHECK(back.dim == 2);
  CHECK(back.scales[0].i == -1);
  CHECK(back.scales[0].k_min == c.scales[0].k_min);
  CHECK(back.scales[0].k_max == c.scales[0].k_max);
  double worst = 0.0;
  for (std::size_t k = 0; k < s.values.size(); ++k)
    worst = std::max(worst,
                     std::abs(back.scales[0].values[k] - s.values[k]));
  CHECK(worst < 1e-15);
}
