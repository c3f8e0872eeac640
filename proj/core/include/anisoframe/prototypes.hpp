#ifndef ANISOFRAME_PROTOTYPES_HPP
#define ANISOFRAME_PROTOTYPES_HPP

#include <functional>
#include <map>
#include <vector>

#include "anisoframe/dilation.hpp"

namespace anisoframe {

// Real multivariate polynomial, sparse exponent-map representation. Small:
// used only for exact derivative bookkeeping of the built-in prototypes.
class MultiPoly {
 public:
  explicit MultiPoly(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  bool empty() const { return terms_.empty(); }

  void add_term(const std::vector<int>& exponents, double coeff);
  MultiPoly derivative(int axis) const;
  MultiPoly times_monomial(int axis) const;  // multiply by xi_axis
  MultiPoly scaled(double factor) const;
  MultiPoly plus(const MultiPoly& other) const;

  double eval(const Eigen::VectorXd& xi) const;
  // Lowest total degree with a nonzero coefficient (vanishing order at 0).
  int valuation() const;

 private:
  int dim_;
  std::map<std::vector<int>, double> terms_;
};

enum class PrototypeFamily { annular_hermite_gauss, gauss_lowpass, user_sampled };

const char* prototype_family_name(PrototypeFamily f);

// Prototype functions the wavelet systems are built from. The built-in
// families are Schwartz functions given in frequency by
//   annular-hermite-gauss  psi_hat(xi) = c |xi|^{2L'} exp(-|xi|^2)
//   gauss-lowpass          psi_hat(xi) = c exp(-|xi|^2)
// and have closed-form time values (polynomial times Gaussian).
class Prototype {
 public:
  static Prototype annular(int dim, int vanishing_order, double amplitude = 1.0);
  static Prototype lowpass(int dim, double amplitude = 1.0);
  static Prototype user(int dim, std::function<double(double)> radial_spectrum);

  PrototypeFamily family() const { return family_; }
  int dim() const { return dim_; }
  int vanishing_order() const { return order2_; }  // 2L'
  double amplitude() const { return amplitude_; }
  bool analytic() const { return family_ != PrototypeFamily::user_sampled; }

  double spectrum_radial(double rho) const;
  double spectrum(const Eigen::VectorXd& xi) const;
  double time_value(const Eigen::VectorXd& t) const;
  double l2_norm() const;

 private:
  Prototype() = default;
  PrototypeFamily family_ = PrototypeFamily::gauss_lowpass;
  int dim_ = 1;
  int order2_ = 0;
  double amplitude_ = 1.0;
  std::vector<double> time_poly_;  // polynomial in u = |t|^2
  std::function<double(double)> user_radial_;
};

// Pointwise maximum of |derivative spectra| of a built-in prototype:
//   frame variant  max_{|alpha| <= N, |beta| <= 1} |d^alpha F[d^beta psi](xi)|
//   atom variant   max_{|alpha| <= N} |d^alpha psi_hat(xi)|
// Each entry is an exact polynomial times exp(-|xi|^2).
class DerivativeMax {
 public:
  double operator()(const Eigen::VectorXd& xi) const;
  int valuation() const { return valuation_; }

 private:
  friend DerivativeMax frame_derivative_max(const Prototype& p, int N);
  friend DerivativeMax atom_derivative_max(const Prototype& p, int N);
  std::vector<MultiPoly> polys_;
  int valuation_ = 0;
};

DerivativeMax frame_derivative_max(const Prototype& p, int N);
DerivativeMax atom_derivative_max(const Prototype& p, int N);

// Decay envelope shapes of the summability lemmas:
//   annular  C min{1, rho^L} (1 + rho)^{-N}
//   lowpass  C (1 + rho)^{-K}
struct DecayEnvelope {
  double C = 1.0;
  double L = 0.0;
  double N = 0.0;
  double K = 0.0;
  bool lowpass = false;

  double eval(double rho) const;

  static DecayEnvelope annular_shape(double C, double L, double N);
  static DecayEnvelope lowpass_shape(double C, double K);
};

// Smallest constant C (on a deterministic verification grid) such that
//   gamma(xi) * (1+|xi|)^{extra_decay} <= C min{1,|xi|^L}(1+|xi|)^{-N}
// (annular) or <= C (1+|xi|)^{-K} (lowpass). extra_decay carries the
// (d+1+eps) factor of the atom theorems. Throws ThresholdViolated when the
// prototype's vanishing order cannot support L.
DecayEnvelope fit_envelope(const DerivativeMax& gamma, int dim, bool lowpass,
                           double L, double N_or_K, double extra_decay);

}  // namespace anisoframe

#endif
