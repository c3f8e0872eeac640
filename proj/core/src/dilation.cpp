#include "anisoframe/dilation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <vector>

namespace anisoframe {

namespace {
constexpr double kExpansiveMarginEps = 1e-9;
constexpr double kGrowthSafety = 1.1;
}  // namespace

double ExpansiveMatrix::lambda_minus() const {
  if (!has_margins())
    throw Error(ErrorCode::InvalidMargin, "spectral margins not set");
  return lambda_minus_;
}

double ExpansiveMatrix::lambda_plus() const {
  if (!has_margins())
    throw Error(ErrorCode::InvalidMargin, "spectral margins not set");
  return lambda_plus_;
}

double ExpansiveMatrix::growth_b() const {
  if (!has_growth())
    throw Error(ErrorCode::InvalidMargin, "growth constant not estimated");
  return growth_b_;
}

double ExpansiveMatrix::power_norm(int i) const {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(power(*this, i));
  return svd.singularValues()(0);
}

ExpansiveMatrix validate_expansive(const Eigen::MatrixXd& entries) {
  if (entries.rows() != entries.cols() || entries.rows() < 1)
    throw Error(ErrorCode::NotSquare,
                "dilation matrix must be square, got " +
                    std::to_string(entries.rows()) + "x" +
                    std::to_string(entries.cols()));
  if (!entries.allFinite())
    throw Error(ErrorCode::NumericalFailure, "matrix has non-finite entries");

  Eigen::EigenSolver<Eigen::MatrixXd> solver(entries, false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NumericalFailure, "eigenvalue solver did not converge");

  const auto eigs = solver.eigenvalues();
  double min_mod = std::abs(eigs(0));
  double max_mod = min_mod;
  for (Eigen::Index k = 1; k < eigs.size(); ++k) {
    const double mod = std::abs(eigs(k));
    min_mod = std::min(min_mod, mod);
    max_mod = std::max(max_mod, mod);
  }
  if (!(min_mod > 1.0 + kExpansiveMarginEps))
    throw Error(ErrorCode::NotExpansive,
                "min |eigenvalue| = " + std::to_string(min_mod) +
                    " is not strictly greater than 1");

  ExpansiveMatrix m;
  m.entries_ = entries;
  m.min_modulus_ = min_mod;
  m.max_modulus_ = max_mod;
  m.det_ = entries.determinant();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(entries);
  if (!lu.isInvertible())
    throw Error(ErrorCode::SingularInverse, "matrix not invertible");
  m.inverse_ = lu.inverse();
  return m;
}

std::pair<double, double> spectral_margins(const ExpansiveMatrix& m,
                                           double margin) {
  if (!(margin > 0.0 && margin < 1.0))
    throw Error(ErrorCode::InvalidMargin,
                "margin must lie in (0,1), got " + std::to_string(margin));
  return {std::sqrt(m.min_modulus()), (1.0 + margin) * m.max_modulus()};
}

ExpansiveMatrix with_margins(ExpansiveMatrix m, double lambda_minus,
                             double lambda_plus) {
  if (!(lambda_minus > 1.0) || !(lambda_minus < m.min_modulus_))
    throw Error(ErrorCode::InvalidMargin,
                "lambda_minus must satisfy 1 < lambda_- < min|eig| = " +
                    std::to_string(m.min_modulus_));
  if (!(lambda_plus > m.max_modulus_))
    throw Error(ErrorCode::InvalidMargin,
                "lambda_plus must exceed max|eig| = " +
                    std::to_string(m.max_modulus_));
  m.lambda_minus_ = lambda_minus;
  m.lambda_plus_ = lambda_plus;
  m.growth_b_ = 0.0;  // margins changed, any cached b is stale
  return m;
}

ExpansiveMatrix with_default_margins(ExpansiveMatrix m, double margin) {
  auto [lm, lp] = spectral_margins(m, margin);
  return with_margins(std::move(m), lm, lp);
}

std::vector<Eigen::VectorXd> unit_sphere_samples(int dim, int count) {
  std::vector<Eigen::VectorXd> pts;
  if (dim == 1) {
    Eigen::VectorXd p(1);
    p(0) = 1.0;
    pts.push_back(p);
    p(0) = -1.0;
    pts.push_back(p);
    return pts;
  }
  if (dim == 2) {
    pts.reserve(count);
    for (int k = 0; k < count; ++k) {
      const double angle = 2.0 * M_PI * k / count;
      Eigen::VectorXd p(2);
      p << std::cos(angle), std::sin(angle);
      pts.push_back(p);
    }
    return pts;
  }
  // Higher dimensions: normalized Gaussian draws from a fixed seed, plus the
  // coordinate axes so axis-aligned extremes are always probed.
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int a = 0; a < dim; ++a) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
    p(a) = 1.0;
    pts.push_back(p);
    p(a) = -1.0;
    pts.push_back(p);
  }
  while (static_cast<int>(pts.size()) < count) {
    Eigen::VectorXd p(dim);
    for (int a = 0; a < dim; ++a) p(a) = gauss(rng);
    const double norm = p.norm();
    if (norm < 1e-8) continue;
    pts.push_back(p / norm);
  }
  return pts;
}

double growth_constant(const ExpansiveMatrix& m, int j_max, int sphere_samples) {
  const double lm = m.lambda_minus();
  const double lp = m.lambda_plus();
  const int d = m.dim();
  if (j_max < 10) j_max = 10;
  if (sphere_samples < 100 * d) sphere_samples = 100 * d;

  const auto sphere = unit_sphere_samples(d, sphere_samples);

  double raw = 1.0;
  Eigen::MatrixXd fwd = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd bwd = Eigen::MatrixXd::Identity(d, d);
  double lm_j = 1.0, lp_j = 1.0;
  for (int j = 0; j <= j_max; ++j) {
    for (const auto& xi : sphere) {
      const double fwd_norm = (fwd * xi).norm();
      const double bwd_norm = (bwd * xi).norm();
      raw = std::max(raw, lm_j / fwd_norm);        // (1/b) lm^j <= |A^j xi|
      raw = std::max(raw, fwd_norm / lp_j);        // |A^j xi| <= b lp^j
      raw = std::max(raw, 1.0 / (lp_j * bwd_norm));  // (1/b) lp^{-j} <= |A^{-j} xi|
      raw = std::max(raw, bwd_norm * lm_j);        // |A^{-j} xi| <= b lm^{-j}
    }
    fwd = fwd * m.entries();
    bwd = bwd * m.inverse();
    lm_j *= lm;
    lp_j *= lp;
  }
  return kGrowthSafety * raw;
}

ExpansiveMatrix with_growth(ExpansiveMatrix m, int j_max, int sphere_samples) {
  m.growth_b_ = growth_constant(m, j_max, sphere_samples);
  return m;
}

Eigen::MatrixXd power(const ExpansiveMatrix& m, int i) {
  const int d = m.dim();
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd& factor = i >= 0 ? m.entries() : m.inverse();
  for (int k = 0; k < std::abs(i); ++k) result = result * factor;
  return result;
}

double det_power(const ExpansiveMatrix& m, int i) {
  const double base = i >= 0 ? m.det() : 1.0 / m.det();
  double result = 1.0;
  for (int k = 0; k < std::abs(i); ++k) result *= base;
  return result;
}

Eigen::MatrixXd dual_lattice_step(const ExpansiveMatrix& m, int i, double delta) {
  if (!(delta > 0.0))
    throw Error(ErrorCode::DeltaNonPositive,
                "lattice density delta must be positive");
  return delta * power(m, -i).transpose();
}

}  // namespace anisoframe
