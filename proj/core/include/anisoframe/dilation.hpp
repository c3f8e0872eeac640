#ifndef ANISOFRAME_DILATION_HPP
#define ANISOFRAME_DILATION_HPP

#include <Eigen/Dense>
#include <utility>

#include "anisoframe/errors.hpp"

namespace anisoframe {

// A validated expansive dilation matrix together with the spectral constants
// every other component consumes: the eigenvalue moduli, a strict margin pair
// lambda_minus < min|eig| <= max|eig| < lambda_plus, and the growth constant b
// of the norm sandwich
//
//   (1/b) lambda_-^j |x| <= |A^j x| <= b lambda_+^j |x|,   j >= 0,
//   (1/b) lambda_+^{-j} |x| <= |A^{-j} x| <= b lambda_-^{-j} |x|.
//
// Values are immutable after construction; the with_* helpers return updated
// copies.
class ExpansiveMatrix {
 public:
  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  const Eigen::MatrixXd& inverse() const { return inverse_; }

  double min_modulus() const { return min_modulus_; }
  double max_modulus() const { return max_modulus_; }
  double det() const { return det_; }
  double abs_det() const { return std::abs(det_); }

  bool has_margins() const { return lambda_minus_ > 0.0; }
  double lambda_minus() const;
  double lambda_plus() const;

  bool has_growth() const { return growth_b_ > 0.0; }
  double growth_b() const;

  // Spectral operator norm ||A^i||, cached per index.
  double power_norm(int i) const;

 private:
  friend ExpansiveMatrix validate_expansive(const Eigen::MatrixXd& entries);
  friend ExpansiveMatrix with_margins(ExpansiveMatrix m, double lambda_minus,
                                      double lambda_plus);
  friend double growth_constant(const ExpansiveMatrix& m, int j_max,
                                int sphere_samples);
  friend ExpansiveMatrix with_growth(ExpansiveMatrix m, int j_max,
                                     int sphere_samples);

  Eigen::MatrixXd entries_;
  Eigen::MatrixXd inverse_;
  double min_modulus_ = 0.0;
  double max_modulus_ = 0.0;
  double det_ = 0.0;
  double lambda_minus_ = 0.0;  // 0 = unset
  double lambda_plus_ = 0.0;
  double growth_b_ = 0.0;  // 0 = unset
};

// Checks squareness, finiteness and min |eigenvalue| > 1 + margin_eps with
// margin_eps = 1e-9; the downstream geometric series need strict expansion.
ExpansiveMatrix validate_expansive(const Eigen::MatrixXd& entries);

// Default margin pair: lambda_- = sqrt(min|eig|), lambda_+ = (1+margin)*max|eig|.
std::pair<double, double> spectral_margins(const ExpansiveMatrix& m,
                                           double margin = 0.05);

// Attaches a margin pair, validating 1 < lambda_- < min|eig| and
// max|eig| < lambda_+.
ExpansiveMatrix with_margins(ExpansiveMatrix m, double lambda_minus,
                             double lambda_plus);
ExpansiveMatrix with_default_margins(ExpansiveMatrix m, double margin = 0.05);

// Smallest b (times safety factor 1.1) such that the four sandwich
// inequalities hold on j = 0..j_max and a deterministic unit-sphere sample.
// The lemma guarantees existence but no formula, so b is estimated.
double growth_constant(const ExpansiveMatrix& m, int j_max = 30,
                       int sphere_samples = 0);
ExpansiveMatrix with_growth(ExpansiveMatrix m, int j_max = 30,
                            int sphere_samples = 0);

// A^i for i of either sign. The inverse is computed once at validation and
// then powered, so accumulation error stays below 1e-10 for |i| <= 20 at the
// condition numbers in scope.
Eigen::MatrixXd power(const ExpansiveMatrix& m, int i);
double det_power(const ExpansiveMatrix& m, int i);

// delta * (A^i)^{-t}: the generator of the translation lattice at scale i.
Eigen::MatrixXd dual_lattice_step(const ExpansiveMatrix& m, int i, double delta);

// Deterministic unit-sphere sample used by growth_constant (exposed for tests).
std::vector<Eigen::VectorXd> unit_sphere_samples(int dim, int count);

}  // namespace anisoframe

#endif
