#include "anisoframe/prototypes.hpp"

#include <cmath>

#include "anisoframe/errors.hpp"

namespace anisoframe {

void MultiPoly::add_term(const std::vector<int>& exponents, double coeff) {
  if (static_cast<int>(exponents.size()) != dim_)
    throw Error(ErrorCode::SizeMismatch, "exponent rank mismatch");
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(exponents, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }
}

MultiPoly MultiPoly::derivative(int axis) const {
  MultiPoly out(dim_);
  for (const auto& [exp, coeff] : terms_) {
    if (exp[axis] == 0) continue;
    std::vector<int> e = exp;
    e[axis] -= 1;
    out.add_term(e, coeff * exp[axis]);
  }
  return out;
}

MultiPoly MultiPoly::times_monomial(int axis) const {
  MultiPoly out(dim_);
  for (const auto& [exp, coeff] : terms_) {
    std::vector<int> e = exp;
    e[axis] += 1;
    out.add_term(e, coeff);
  }
  return out;
}

MultiPoly MultiPoly::scaled(double factor) const {
  MultiPoly out(dim_);
  for (const auto& [exp, coeff] : terms_) out.add_term(exp, coeff * factor);
  return out;
}

MultiPoly MultiPoly::plus(const MultiPoly& other) const {
  MultiPoly out = *this;
  for (const auto& [exp, coeff] : other.terms_) out.add_term(exp, coeff);
  return out;
}

double MultiPoly::eval(const Eigen::VectorXd& xi) const {
  int max_deg = 0;
  for (const auto& [exp, coeff] : terms_)
    for (int e : exp) max_deg = std::max(max_deg, e);
  // Power table per axis.
  std::vector<std::vector<double>> pow_table(dim_);
  for (int a = 0; a < dim_; ++a) {
    pow_table[a].resize(max_deg + 1);
    pow_table[a][0] = 1.0;
    for (int e = 1; e <= max_deg; ++e)
      pow_table[a][e] = pow_table[a][e - 1] * xi(a);
  }
  double sum = 0.0;
  for (const auto& [exp, coeff] : terms_) {
    double term = coeff;
    for (int a = 0; a < dim_; ++a) term *= pow_table[a][exp[a]];
    sum += term;
  }
  return sum;
}

int MultiPoly::valuation() const {
  int best = std::numeric_limits<int>::max();
  for (const auto& [exp, coeff] : terms_) {
    (void)coeff;
    int deg = 0;
    for (int e : exp) deg += e;
    best = std::min(best, deg);
  }
  return terms_.empty() ? 0 : best;
}

const char* prototype_family_name(PrototypeFamily f) {
  switch (f) {
    case PrototypeFamily::annular_hermite_gauss: return "annular-hermite-gauss";
    case PrototypeFamily::gauss_lowpass: return "gauss-lowpass";
    case PrototypeFamily::user_sampled: return "user-sampled";
  }
  return "?";
}

namespace {

// Repeated Laplacian of p(u) e^{-a u}, u = |t|^2:
//   Delta[p e^{-au}] = [2 d (p' - a p) + 4 u (p'' - 2 a p' + a^2 p)] e^{-au}.
std::vector<double> laplacian_step(const std::vector<double>& p, int dim,
                                   double a) {
  const int deg = static_cast<int>(p.size()) - 1;
  std::vector<double> q(deg + 2, 0.0);
  auto coeff = [&](int k) { return k >= 0 && k <= deg ? p[k] : 0.0; };
  for (int k = 0; k <= deg + 1; ++k) {
    // p'(u) coefficient of u^k is (k+1) p_{k+1}; p'' of u^k is (k+2)(k+1) p_{k+2}.
    const double dp_k = (k + 1) * coeff(k + 1);
    const double dp_km1 = k * coeff(k);  // p' shifted by the 4u factor
    const double d2p_km1 = (k + 1) * k * coeff(k + 1);
    const double p_km1 = coeff(k - 1);
    q[k] += 2.0 * dim * (dp_k - a * coeff(k));
    q[k] += 4.0 * (d2p_km1 - 2.0 * a * dp_km1 + a * a * p_km1);
  }
  while (q.size() > 1 && q.back() == 0.0) q.pop_back();
  return q;
}

double polyval(const std::vector<double>& p, double u) {
  double v = 0.0;
  for (std::size_t k = p.size(); k-- > 0;) v = v * u + p[k];
  return v;
}

// psi_hat as an exact polynomial times exp(-|xi|^2).
MultiPoly spectrum_poly(const Prototype& p) {
  const int d = p.dim();
  MultiPoly poly(d);
  if (p.family() == PrototypeFamily::gauss_lowpass) {
    poly.add_term(std::vector<int>(d, 0), p.amplitude());
    return poly;
  }
  if (p.family() != PrototypeFamily::annular_hermite_gauss)
    throw Error(ErrorCode::Unsupported,
                "derivative bookkeeping needs a built-in prototype");
  // (xi_1^2 + ... + xi_d^2)^{L'} expanded by the multinomial theorem.
  const int lp = p.vanishing_order() / 2;
  std::vector<int> comp(d, 0);
  std::function<void(int, int, double)> expand = [&](int axis, int left,
                                                     double coeff) {
    if (axis == d - 1) {
      comp[axis] = left;
      double c = coeff;
      std::vector<int> exp(d);
      for (int a = 0; a < d; ++a) exp[a] = 2 * comp[a];
      poly.add_term(exp, c);
      return;
    }
    for (int m = 0; m <= left; ++m) {
      comp[axis] = m;
      // binomial factor for this split of the remaining power
      double binom = 1.0;
      for (int k = 1; k <= m; ++k) binom *= static_cast<double>(left - k + 1) / k;
      expand(axis + 1, left - m, coeff * binom);
    }
  };
  expand(0, lp, p.amplitude());
  return poly;
}

// d/dxi_a of q(xi) e^{-|xi|^2}  ->  (dq/dxi_a - 2 xi_a q) e^{-|xi|^2}.
MultiPoly gauss_derivative(const MultiPoly& q, int axis) {
  return q.derivative(axis).plus(q.times_monomial(axis).scaled(-2.0));
}

void enumerate_alpha(int dim, int max_total, const MultiPoly& base,
                     std::vector<MultiPoly>& out) {
  // Mixed partials commute, so each alpha may be derived from any
  // predecessor alpha - e_a.
  std::map<std::vector<int>, MultiPoly> table;
  std::vector<int> zero(dim, 0);
  table.emplace(zero, base);
  out.push_back(base);
  std::vector<std::vector<int>> frontier = {zero};
  for (int total = 1; total <= max_total; ++total) {
    std::vector<std::vector<int>> next;
    for (const auto& alpha : frontier) {
      for (int a = 0; a < dim; ++a) {
        std::vector<int> beta = alpha;
        beta[a] += 1;
        if (table.count(beta)) continue;
        MultiPoly poly = gauss_derivative(table.at(alpha), a);
        table.emplace(beta, poly);
        out.push_back(poly);
        next.push_back(beta);
      }
    }
    frontier = std::move(next);
  }
}

}  // namespace

Prototype Prototype::annular(int dim, int vanishing_order, double amplitude) {
  if (vanishing_order <= 0 || vanishing_order % 2 != 0)
    throw Error(ErrorCode::PrototypeKindMismatch,
                "annular prototype needs a positive even vanishing order");
  Prototype p;
  p.family_ = PrototypeFamily::annular_hermite_gauss;
  p.dim_ = dim;
  p.order2_ = vanishing_order;
  p.amplitude_ = amplitude;
  // (-1/(4 pi^2))^{L'} Delta^{L'} applied to pi^{d/2} e^{-pi^2 |t|^2}.
  std::vector<double> poly = {1.0};
  const double a = M_PI * M_PI;
  for (int k = 0; k < vanishing_order / 2; ++k)
    poly = laplacian_step(poly, dim, a);
  const double front =
      std::pow(-1.0 / (4.0 * M_PI * M_PI), vanishing_order / 2) *
      std::pow(M_PI, dim / 2.0);
  for (auto& c : poly) c *= front * amplitude;
  p.time_poly_ = std::move(poly);
  return p;
}

Prototype Prototype::lowpass(int dim, double amplitude) {
  Prototype p;
  p.family_ = PrototypeFamily::gauss_lowpass;
  p.dim_ = dim;
  p.order2_ = 0;
  p.amplitude_ = amplitude;
  p.time_poly_ = {std::pow(M_PI, dim / 2.0) * amplitude};
  return p;
}

Prototype Prototype::user(int dim, std::function<double(double)> radial_spectrum) {
  Prototype p;
  p.family_ = PrototypeFamily::user_sampled;
  p.dim_ = dim;
  p.user_radial_ = std::move(radial_spectrum);
  return p;
}

double Prototype::spectrum_radial(double rho) const {
  switch (family_) {
    case PrototypeFamily::annular_hermite_gauss:
      return amplitude_ * std::pow(rho, order2_) * std::exp(-rho * rho);
    case PrototypeFamily::gauss_lowpass:
      return amplitude_ * std::exp(-rho * rho);
    case PrototypeFamily::user_sampled:
      return user_radial_(rho);
  }
  return 0.0;
}

double Prototype::spectrum(const Eigen::VectorXd& xi) const {
  return spectrum_radial(xi.norm());
}

double Prototype::time_value(const Eigen::VectorXd& t) const {
  if (!analytic())
    throw Error(ErrorCode::Unsupported,
                "user-sampled prototypes have no closed-form time values");
  const double u = t.squaredNorm();
  return polyval(time_poly_, u) * std::exp(-M_PI * M_PI * u);
}

double Prototype::l2_norm() const {
  if (!analytic())
    throw Error(ErrorCode::Unsupported,
                "user-sampled prototypes have no closed-form L2 norm");
  // ||psi||_2^2 = int |xi|^{4L'} e^{-2|xi|^2} dxi, radially in closed form.
  const double m = 2.0 * order2_ + dim_ - 1.0;
  const double surface = 2.0 * std::pow(M_PI, dim_ / 2.0) / std::tgamma(dim_ / 2.0);
  const double radial =
      std::tgamma((m + 1.0) / 2.0) / (2.0 * std::pow(2.0, (m + 1.0) / 2.0));
  return amplitude_ * std::sqrt(surface * radial);
}

double DerivativeMax::operator()(const Eigen::VectorXd& xi) const {
  double best = 0.0;
  for (const auto& poly : polys_) best = std::max(best, std::abs(poly.eval(xi)));
  return best * std::exp(-xi.squaredNorm());
}

DerivativeMax frame_derivative_max(const Prototype& p, int N) {
  DerivativeMax out;
  const MultiPoly base = spectrum_poly(p);
  const int d = p.dim();
  // beta = 0 and beta = e_a: F[d^beta psi](xi) = (2 pi i xi)^beta psi_hat.
  std::vector<MultiPoly> bases = {base};
  for (int a = 0; a < d; ++a)
    bases.push_back(base.times_monomial(a).scaled(2.0 * M_PI));
  for (const auto& b : bases) enumerate_alpha(d, N, b, out.polys_);
  int val = std::numeric_limits<int>::max();
  for (const auto& poly : out.polys_) val = std::min(val, poly.valuation());
  out.valuation_ = val;
  return out;
}

DerivativeMax atom_derivative_max(const Prototype& p, int N) {
  DerivativeMax out;
  enumerate_alpha(p.dim(), N, spectrum_poly(p), out.polys_);
  int val = std::numeric_limits<int>::max();
  for (const auto& poly : out.polys_) val = std::min(val, poly.valuation());
  out.valuation_ = val;
  return out;
}

double DecayEnvelope::eval(double rho) const {
  if (lowpass) return C * std::pow(1.0 + rho, -K);
  const double head = L == 0.0 ? 1.0 : std::min(1.0, std::pow(rho, L));
  return C * head * std::pow(1.0 + rho, -N);
}

DecayEnvelope DecayEnvelope::annular_shape(double C, double L, double N) {
  DecayEnvelope e;
  e.C = C;
  e.L = L;
  e.N = N;
  e.lowpass = false;
  return e;
}

DecayEnvelope DecayEnvelope::lowpass_shape(double C, double K) {
  DecayEnvelope e;
  e.C = C;
  e.K = K;
  e.lowpass = true;
  return e;
}

DecayEnvelope fit_envelope(const DerivativeMax& gamma, int dim, bool lowpass,
                           double L, double N_or_K, double extra_decay) {
  if (!lowpass && L > 0.0 && L > gamma.valuation() + 1e-12)
    throw Error(ErrorCode::ThresholdViolated,
                "prototype vanishing order " + std::to_string(gamma.valuation()) +
                    " cannot support envelope exponent L = " + std::to_string(L));
  DecayEnvelope env = lowpass ? DecayEnvelope::lowpass_shape(1.0, N_or_K)
                              : DecayEnvelope::annular_shape(1.0, L, N_or_K);
  const auto dirs = unit_sphere_samples(dim, 32 * dim);
  double C = 0.0;
  // Log-radial sweep; the Gaussian factor kills everything well before the
  // outer radius.
  const double rho_min = 1e-4, rho_max = 24.0;
  const int n_rho = 600;
  for (int k = 0; k <= n_rho; ++k) {
    const double rho =
        rho_min * std::pow(rho_max / rho_min, static_cast<double>(k) / n_rho);
    const double denom = env.eval(rho);
    for (const auto& dir : dirs) {
      const double g =
          gamma(rho * dir) * std::pow(1.0 + rho, extra_decay);
      C = std::max(C, g / denom);
    }
  }
  env.C = C * (1.0 + 1e-9);
  return env;
}

}  // namespace anisoframe
