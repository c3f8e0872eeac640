#include "anisoframe/certify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "anisoframe/partition.hpp"

namespace anisoframe {

namespace {

constexpr double kQuadTol = 0.01;
constexpr double kTailConvergent = 1e-6;
constexpr double kGrowthDivergent = 1.5;

double ceil_guarded(double x) { return std::ceil(x - 1e-12); }

double log_base(double base, double x) { return std::log(x) / std::log(base); }

}  // namespace

TheoremParams theorem_params(double p, double q, double p0, double q0,
                             double eps, int d) {
  if (!(eps > 0.0))
    throw Error(ErrorCode::ExponentOutOfRange, "epsilon must be positive");
  if (!(p0 > 0.0 && p0 <= 1.0) || !(q0 > 0.0 && q0 <= 1.0))
    throw Error(ErrorCode::ExponentOutOfRange, "p0, q0 must lie in (0,1]");
  if (!(p >= p0) || !(q >= q0))
    throw Error(ErrorCode::ExponentOutOfRange,
                "need p in [p0, inf] and q in [q0, inf]");
  if (d < 1) throw Error(ErrorCode::ExponentOutOfRange, "dimension must be >= 1");

  TheoremParams tp;
  tp.p = p;
  tp.q = q;
  tp.p0 = p0;
  tp.q0 = q0;
  tp.eps = eps;
  tp.d = d;

  const double min1p = std::min(1.0, p);
  tp.tau = std::min({1.0, p, q});
  tp.n_derivs = static_cast<int>(ceil_guarded((d + eps) / min1p));
  tp.sigma_frame = tp.tau * (tp.n_derivs + d / min1p);
  tp.sigma_atom = p >= 1.0
                      ? tp.tau * (d + 1.0)
                      : tp.tau * (d / p + ceil_guarded((d + eps) / p));
  tp.lambda_decay = 1.0 + d / min1p;
  tp.theta = std::max(1.0 / p - 1.0, 0.0);
  return tp;
}

const char* cert_case_name(CertCase c) {
  switch (c) {
    case CertCase::homo_frame: return "homo-frame";
    case CertCase::homo_atoms: return "homo-atoms";
    case CertCase::inhomo_frame: return "inhomo-frame";
    case CertCase::inhomo_atoms: return "inhomo-atoms";
  }
  return "?";
}

bool is_frame_case(CertCase c) {
  return c == CertCase::homo_frame || c == CertCase::inhomo_frame;
}

bool is_homogeneous_case(CertCase c) {
  return c == CertCase::homo_frame || c == CertCase::homo_atoms;
}

const char* exponent_convention_name(ExponentConvention c) {
  return c == ExponentConvention::stated ? "stated" : "proof";
}

ThresholdSet thresholds(CertCase c, const ExpansiveMatrix& m, int s,
                        const TheoremParams& tp, ExponentConvention convention) {
  ThresholdSet ts;
  ts.tau = tp.tau;
  switch (c) {
    case CertCase::homo_frame:
      ts.a_exponent = s;
      ts.sigma = tp.sigma_frame;
      break;
    case CertCase::homo_atoms:
      ts.a_exponent = tp.theta - s;
      ts.sigma = tp.sigma_atom;
      break;
    case CertCase::inhomo_frame:
      ts.a_exponent =
          convention == ExponentConvention::stated ? s - tp.theta : s;
      ts.sigma = tp.sigma_frame;
      break;
    case CertCase::inhomo_atoms:
      ts.a_exponent =
          convention == ExponentConvention::stated ? s : s - tp.theta;
      ts.sigma = tp.sigma_atom;
      break;
  }
  ts.a = std::pow(m.abs_det(), ts.a_exponent);
  const double lm = m.lambda_minus();
  const double lp = m.lambda_plus();
  ts.L_req = log_base(lm, ts.a);
  ts.N_req = (ts.sigma / ts.tau) * std::log(lp) / std::log(lm) - ts.L_req;
  if (!is_homogeneous_case(c)) ts.K_req = ts.N_req;
  return ts;
}

int recommended_annular_order(double L_env, int n_derivs) {
  const int needed =
      n_derivs + static_cast<int>(ceil_guarded(std::max(0.0, L_env)));
  return std::max(2, needed + (needed % 2));
}

double cell_average(const BaseCell& cell, int dim,
                    const std::function<double(const Eigen::VectorXd&)>& f,
                    int points_per_axis) {
  const auto evaluate = [&](int n) {
    const QuadratureRule rule = cell_quadrature(cell, dim, n);
    double sum = 0.0, vol = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      sum += rule.weights[k] * f(rule.nodes[k]);
      vol += rule.weights[k];
    }
    return sum / vol;
  };
  const int n = std::max(8, points_per_axis);
  const double coarse = evaluate(n / 2);
  const double fine = evaluate(n);
  const double scale = std::max(std::abs(fine), 1e-280);
  if (std::abs(fine - coarse) > kQuadTol * scale)
    throw Error(ErrorCode::QuadratureUnderResolved,
                "grid-halving estimates disagree by " +
                    std::to_string(std::abs(fine - coarse) / scale));
  return fine;
}

double mmn_homogeneous(const ExpansiveMatrix& m, const DecayEnvelope& env,
                       double a, double tau, double sigma, const BaseCell& cell,
                       int mm, int nn, int grid) {
  const int j = nn - mm;
  const Eigen::MatrixXd aj = power(m, j);
  const double avg = cell_average(
      cell, m.dim(), [&](const Eigen::VectorXd& xi) {
        return env.eval((aj * xi).norm());
      },
      grid);
  return std::pow(a, tau * (mm - nn)) *
         std::pow(1.0 + m.power_norm(j), sigma) * std::pow(avg, tau);
}

namespace {

double geometric_denominator(double ratio, const std::string& what) {
  if (!(ratio < 1.0))
    throw Error(ErrorCode::ThresholdViolated,
                what + " series ratio " + std::to_string(ratio) + " is not < 1");
  return 1.0 - ratio;
}

}  // namespace

double analytic_bound_homo(double lambda_minus, double lambda_plus,
                           double growth_b, const DecayEnvelope& env, double a,
                           double tau, double sigma, double r, double R) {
  const double lm = lambda_minus;
  const double lp = lambda_plus;
  const double b = growth_b;
  const double L = env.L, N = env.N, C = env.C;

  const double ratio_L = std::pow(a / std::pow(lm, L), tau);
  const double ratio_N = std::pow(lp, sigma) / std::pow(a * std::pow(lm, N), tau);
  const double den_L = geometric_denominator(ratio_L, "L-side");
  const double den_N = geometric_denominator(ratio_N, "N-side");

  return std::pow(C, tau) * std::pow(1.0 + b, sigma) *
         std::pow(b * std::max(1.0 / r, R), std::max(L, N) * tau) *
         (1.0 / den_L + 2.0 / den_N);
}

double mmn_inhomogeneous(const ExpansiveMatrix& m, const DecayEnvelope& env_low,
                         const DecayEnvelope& env_ann, double a, double tau,
                         double sigma, const BaseCell& low_cell,
                         const BaseCell& ann_cell, int mm, int nn, int grid) {
  if (mm < 0 || nn < 0)
    throw Error(ErrorCode::IndexOutOfRange,
                "inhomogeneous M_mn indices must be >= 0");
  const int d = m.dim();
  if (mm == 0 && nn == 0) {
    const double avg = cell_average(
        low_cell, d,
        [&](const Eigen::VectorXd& xi) { return env_low.eval(xi.norm()); },
        grid);
    return std::pow(2.0, sigma) * std::pow(avg, tau);
  }
  if (nn == 0) {  // m != 0
    const Eigen::MatrixXd am = power(m, -(mm - 1));
    const double avg = cell_average(
        low_cell, d,
        [&](const Eigen::VectorXd& xi) { return env_ann.eval((am * xi).norm()); },
        grid);
    return std::pow(a, tau * mm) *
           std::pow(1.0 + m.power_norm(-(mm - 1)), sigma) * std::pow(avg, tau);
  }
  if (mm == 0) {  // n != 0; integral over Q_n pulled back to the annular cell
    const Eigen::MatrixXd an = power(m, nn - 1);
    const double avg = cell_average(
        ann_cell, d,
        [&](const Eigen::VectorXd& xi) { return env_low.eval((an * xi).norm()); },
        grid);
    return std::pow(a, -tau * nn) *
           std::pow(1.0 + m.power_norm(nn - 1), sigma) * std::pow(avg, tau);
  }
  const Eigen::MatrixXd adiff = power(m, nn - mm);
  const double avg = cell_average(
      ann_cell, d,
      [&](const Eigen::VectorXd& xi) { return env_ann.eval((adiff * xi).norm()); },
      grid);
  return std::pow(a, tau * (mm - nn)) *
         std::pow(1.0 + m.power_norm(nn - mm), sigma) * std::pow(avg, tau);
}

InhomoBounds analytic_bounds_inhomo(double lambda_minus, double lambda_plus,
                                    double growth_b,
                                    const DecayEnvelope& env_low,
                                    const DecayEnvelope& env_ann, double a,
                                    double tau, double sigma, double r, double R,
                                    double R0, double L, double N, double K) {
  const double lm = lambda_minus;
  const double lp = lambda_plus;
  const double b = growth_b;
  // The lemma states both decay hypotheses with a single constant C.
  const double C = std::max(env_low.C, env_ann.C);
  const double Ct = std::pow(C, tau);

  const double ratio_L = std::pow(a / std::pow(lm, L), tau);
  const double ratio_N = std::pow(lp, sigma) / std::pow(a * std::pow(lm, N), tau);
  const double ratio_K = std::pow(lp, sigma) / std::pow(a * std::pow(lm, K), tau);
  const double den_L = geometric_denominator(ratio_L, "L-side");
  const double den_N = geometric_denominator(ratio_N, "N-side");
  const double den_K = geometric_denominator(ratio_K, "K-side");

  InhomoBounds out;
  out.s1_n_zero = std::pow(2.0, sigma) * Ct +
                  std::pow(1.0 + b, sigma) *
                      std::pow(b * lm * R0, L * tau) * Ct / den_L;
  out.s1_n_pos =
      Ct * std::pow(1.0 + b, sigma) *
      std::pow(1.0 + b * lm / std::min(1.0, r), std::max(N, K) * tau) *
      std::pow(1.0 + b * R, L * tau) * (1.0 / den_K + 1.0 / den_N + 1.0 / den_L);
  out.s2_m_zero = std::pow(2.0, sigma) * Ct +
                  Ct * std::pow((1.0 + b) / lp, sigma) *
                      std::pow(b * lm / r, K * tau) / den_K;
  out.s2_m_pos = Ct * std::pow(1.0 + b, sigma) *
                 std::pow(b * lm * std::max(R, R0), L * tau) *
                 std::pow((1.0 + b) / std::min(1.0, r), N * tau) *
                 (1.0 / den_N + 2.0 / den_L);
  return out;
}

MmnTable MmnTable::homogeneous(const ExpansiveMatrix& m,
                               const DecayEnvelope& env, double a, double tau,
                               double sigma, const BaseCell& cell, int grid) {
  MmnTable t;
  t.kind_ = CoverKind::homogeneous;
  t.matrix_ = m;
  t.env_ann_ = env;
  t.a_ = a;
  t.tau_ = tau;
  t.sigma_ = sigma;
  t.ann_cell_ = cell;
  t.grid_ = grid;
  return t;
}

MmnTable MmnTable::inhomogeneous(const ExpansiveMatrix& m,
                                 const DecayEnvelope& env_low,
                                 const DecayEnvelope& env_ann, double a,
                                 double tau, double sigma,
                                 const BaseCell& low_cell,
                                 const BaseCell& ann_cell, int grid) {
  MmnTable t;
  t.kind_ = CoverKind::inhomogeneous;
  t.matrix_ = m;
  t.env_low_ = env_low;
  t.env_ann_ = env_ann;
  t.a_ = a;
  t.tau_ = tau;
  t.sigma_ = sigma;
  t.ann_cell_ = ann_cell;
  t.low_cell_ = low_cell;
  t.grid_ = grid;
  return t;
}

double MmnTable::norm_power(int j) const {
  auto it = norm_cache_.find(j);
  if (it != norm_cache_.end()) return it->second;
  const double v = matrix_.power_norm(j);
  norm_cache_.emplace(j, v);
  return v;
}

double MmnTable::diff_integral(int j) const {
  auto it = diff_integrals_.find(j);
  if (it != diff_integrals_.end()) return it->second;
  const Eigen::MatrixXd aj = power(matrix_, j);
  const double v = cell_average(
      ann_cell_, matrix_.dim(),
      [&](const Eigen::VectorXd& xi) { return env_ann_.eval((aj * xi).norm()); },
      grid_);
  diff_integrals_.emplace(j, v);
  return v;
}

double MmnTable::entry(int mm, int nn) const {
  if (kind_ == CoverKind::homogeneous) {
    const int j = nn - mm;
    return std::pow(a_, -tau_ * j) * std::pow(1.0 + norm_power(j), sigma_) *
           std::pow(diff_integral(j), tau_);
  }
  if (mm < 0 || nn < 0)
    throw Error(ErrorCode::IndexOutOfRange, "inhomogeneous indices are >= 0");
  if (mm == 0 && nn == 0) {
    if (!m00_) {
      const double avg = cell_average(
          *low_cell_, matrix_.dim(),
          [&](const Eigen::VectorXd& xi) { return env_low_->eval(xi.norm()); },
          grid_);
      m00_ = std::pow(2.0, sigma_) * std::pow(avg, tau_);
    }
    return *m00_;
  }
  if (nn == 0) {
    auto it = low_row_integrals_.find(mm);
    double avg;
    if (it != low_row_integrals_.end()) {
      avg = it->second;
    } else {
      const Eigen::MatrixXd am = power(matrix_, -(mm - 1));
      avg = cell_average(
          *low_cell_, matrix_.dim(),
          [&](const Eigen::VectorXd& xi) {
            return env_ann_.eval((am * xi).norm());
          },
          grid_);
      low_row_integrals_.emplace(mm, avg);
    }
    return std::pow(a_, tau_ * mm) *
           std::pow(1.0 + norm_power(-(mm - 1)), sigma_) * std::pow(avg, tau_);
  }
  if (mm == 0) {
    auto it = low_col_integrals_.find(nn);
    double avg;
    if (it != low_col_integrals_.end()) {
      avg = it->second;
    } else {
      const Eigen::MatrixXd an = power(matrix_, nn - 1);
      avg = cell_average(
          ann_cell_, matrix_.dim(),
          [&](const Eigen::VectorXd& xi) {
            return env_low_->eval((an * xi).norm());
          },
          grid_);
      low_col_integrals_.emplace(nn, avg);
    }
    return std::pow(a_, -tau_ * nn) *
           std::pow(1.0 + norm_power(nn - 1), sigma_) * std::pow(avg, tau_);
  }
  const int j = nn - mm;
  return std::pow(a_, -tau_ * j) * std::pow(1.0 + norm_power(j), sigma_) *
         std::pow(diff_integral(j), tau_);
}

const char* sum_verdict_name(SumVerdict v) {
  switch (v) {
    case SumVerdict::convergent: return "convergent";
    case SumVerdict::divergent: return "divergent";
    case SumVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

struct SupSums {
  double sup_row = 0.0;  // sup_n sum_m
  double sup_col = 0.0;  // sup_m sum_n
  double tail_ratio = 0.0;
};

SupSums evaluate_sums(const MmnTable& table, int T) {
  const int lo = table.homogeneous_kind() ? -T : 0;
  SupSums out;
  for (int n = lo; n <= T; ++n) {
    double row = 0.0, ring = 0.0;
    for (int m = lo; m <= T; ++m) {
      const double v = table.entry(m, n);
      row += v;
      if (std::abs(m) == T) ring += v;
    }
    out.sup_row = std::max(out.sup_row, row);
    if (row > 0.0) out.tail_ratio = std::max(out.tail_ratio, ring / row);
  }
  for (int m = lo; m <= T; ++m) {
    double col = 0.0, ring = 0.0;
    for (int n = lo; n <= T; ++n) {
      const double v = table.entry(m, n);
      col += v;
      if (std::abs(n) == T) ring += v;
    }
    out.sup_col = std::max(out.sup_col, col);
    if (col > 0.0) out.tail_ratio = std::max(out.tail_ratio, ring / col);
  }
  return out;
}

}  // namespace

SupSumResult truncated_sup_sums(const MmnTable& table, int T) {
  if (T < 8)
    throw Error(ErrorCode::IndexOutOfRange, "truncation radius must be >= 8");
  const SupSums at_T = evaluate_sums(table, T);
  SupSumResult result;
  result.truncation = T;
  result.sup_row_sum = at_T.sup_row;
  result.sup_col_sum = at_T.sup_col;
  result.tail_ratio = at_T.tail_ratio;

  if (at_T.sup_row == 0.0 && at_T.sup_col == 0.0) {
    result.growth_factor = 1.0;
    result.verdict = SumVerdict::convergent;
    return result;
  }

  const SupSums at_2T = evaluate_sums(table, 2 * T);
  const double grow_row =
      at_T.sup_row > 0.0 ? at_2T.sup_row / at_T.sup_row : 1.0;
  const double grow_col =
      at_T.sup_col > 0.0 ? at_2T.sup_col / at_T.sup_col : 1.0;
  result.growth_factor = std::max(grow_row, grow_col);

  if (result.growth_factor >= kGrowthDivergent)
    result.verdict = SumVerdict::divergent;
  else if (result.tail_ratio < kTailConvergent)
    result.verdict = SumVerdict::convergent;
  else
    result.verdict = SumVerdict::inconclusive;
  return result;
}

namespace {

// int_Q f = |Q| * avg_Q f with the same midpoint rule.
double cell_integral(const BaseCell& cell, int dim,
                     const std::function<double(const Eigen::VectorXd&)>& f,
                     int grid) {
  const QuadratureRule rule = cell_quadrature(cell, dim, std::max(8, grid));
  double vol = 0.0;
  for (double w : rule.weights) vol += w;
  return vol * cell_average(cell, dim, f, grid);
}

struct EnvelopePair {
  DecayEnvelope ann;
  std::optional<DecayEnvelope> low;
};

// Envelopes for the reduced M_mn path, fitted just above the proof-mapped
// thresholds of the case.
EnvelopePair reduction_envelopes(CertCase c, const ExpansiveMatrix& m, int s,
                                 const TheoremParams& tp,
                                 const Prototype& annular,
                                 const std::optional<Prototype>& lowpass) {
  const ThresholdSet ts =
      thresholds(c, m, s, tp, ExponentConvention::proof);
  const bool frame = is_frame_case(c);
  const double extra = frame ? 0.0 : tp.d + 1.0 + tp.eps;

  const DerivativeMax gamma_ann =
      frame ? frame_derivative_max(annular, tp.n_derivs)
            : atom_derivative_max(annular, tp.n_derivs);
  const double L_env =
      std::min<double>(gamma_ann.valuation(), std::max(0.0, ts.L_req + 0.5));
  const double N_env = ts.N_req + 0.5;

  EnvelopePair out{fit_envelope(gamma_ann, tp.d, false, L_env, N_env, extra),
                   std::nullopt};
  if (!is_homogeneous_case(c)) {
    if (!lowpass)
      throw Error(ErrorCode::PrototypeKindMismatch,
                  "inhomogeneous cases need a low-pass prototype");
    const DerivativeMax gamma_low =
        frame ? frame_derivative_max(*lowpass, tp.n_derivs)
              : atom_derivative_max(*lowpass, tp.n_derivs);
    const double K_env = ts.K_req + 0.5;
    out.low = fit_envelope(gamma_low, tp.d, true, 0.0, K_env, extra);
  }
  return out;
}

}  // namespace

NijPair nij_reduction(CertCase c, const ExpansiveMatrix& m, int s,
                      const TheoremParams& tp, const Prototype& annular,
                      const std::optional<Prototype>& lowpass,
                      const BaseCell& ann_cell,
                      const std::optional<BaseCell>& low_cell, int i, int j,
                      int grid) {
  const int d = m.dim();
  const double tau = tp.tau;
  const double two_d = std::pow(2.0, d);
  const bool frame = is_frame_case(c);
  const double sigma = frame ? tp.sigma_frame : tp.sigma_atom;
  const double extra = frame ? 0.0 : tp.d + 1.0 + tp.eps;
  const ThresholdSet proof_ts =
      thresholds(c, m, s, tp, ExponentConvention::proof);
  const EnvelopePair envs =
      reduction_envelopes(c, m, s, tp, annular, lowpass);

  const DerivativeMax gamma_ann =
      frame ? frame_derivative_max(annular, tp.n_derivs)
            : atom_derivative_max(annular, tp.n_derivs);
  const std::function<double(const Eigen::VectorXd&)> rho_ann =
      [&](const Eigen::VectorXd& xi) {
        return gamma_ann(xi) * std::pow(1.0 + xi.norm(), extra);
      };

  NijPair pair;
  if (is_homogeneous_case(c)) {
    const double a = proof_ts.a;
    if (c == CertCase::homo_frame) {
      const Eigen::MatrixXd shift = power(m, j - i);
      const double integral = cell_integral(
          ann_cell, d,
          [&](const Eigen::VectorXd& xi) { return rho_ann(shift * xi); }, grid);
      pair.direct = std::pow(a, tau * (i - j)) *
                    std::pow(1.0 + m.power_norm(j - i), sigma) *
                    std::pow(integral, tau);
      pair.reduced = two_d * mmn_homogeneous(m, envs.ann, a, tau, sigma,
                                             ann_cell, i, j, grid);
    } else {
      const Eigen::MatrixXd shift = power(m, i - j);
      const double integral = cell_integral(
          ann_cell, d,
          [&](const Eigen::VectorXd& xi) { return rho_ann(shift * xi); }, grid);
      pair.direct = std::pow(a, tau * (j - i)) *
                    std::pow(1.0 + m.power_norm(i - j), sigma) *
                    std::pow(integral, tau);
      pair.reduced = two_d * mmn_homogeneous(m, envs.ann, a, tau, sigma,
                                             ann_cell, -i, -j, grid);
    }
    return pair;
  }

  // Inhomogeneous cases.
  if (!lowpass || !low_cell)
    throw Error(ErrorCode::PrototypeKindMismatch,
                "inhomogeneous cases need a low-pass prototype and cell");
  if (i < 0 || j < 0)
    throw Error(ErrorCode::IndexOutOfRange, "inhomogeneous indices are >= 0");
  const DerivativeMax gamma_low =
      frame ? frame_derivative_max(*lowpass, tp.n_derivs)
            : atom_derivative_max(*lowpass, tp.n_derivs);
  const std::function<double(const Eigen::VectorXd&)> rho_low =
      [&](const Eigen::VectorXd& xi) {
        return gamma_low(xi) * std::pow(1.0 + xi.norm(), extra);
      };
  const WeightSequence w = WeightSequence::inhomogeneous(m, s);
  const auto power_of = [&](int idx) { return idx == 0 ? 0 : idx - 1; };
  const double a = proof_ts.a;

  if (c == CertCase::inhomo_frame) {
    // N_ij^1: prototype chosen by i, integration cell by j,
    // argument T_i^{-1} T_j = A^{p_j - p_i}.
    const Eigen::MatrixXd shift = power(m, power_of(j) - power_of(i));
    const BaseCell& cell_j = j == 0 ? *low_cell : ann_cell;
    const auto& rho_i = i == 0 ? rho_low : rho_ann;
    const double integral = cell_integral(
        cell_j, d, [&](const Eigen::VectorXd& xi) { return rho_i(shift * xi); },
        grid);
    pair.direct = std::pow(weight(w, i) / weight(w, j), tau) *
                  std::pow(1.0 + m.power_norm(power_of(j) - power_of(i)), sigma) *
                  std::pow(integral, tau);
    pair.reduced = two_d * std::pow(m.abs_det(), std::abs(double(s)) * tau) *
                   mmn_inhomogeneous(m, *envs.low, envs.ann, a, tau, sigma,
                                     *low_cell, ann_cell, i, j, grid);
    return pair;
  }

  // inhomo-atoms: prototype by j, integration cell by i, argument
  // T_j^{-1} T_i = A^{p_i - p_j}; reduced side transposes (m = j, n = i).
  const Eigen::MatrixXd shift = power(m, power_of(i) - power_of(j));
  const BaseCell& cell_i = i == 0 ? *low_cell : ann_cell;
  const auto& rho_j = j == 0 ? rho_low : rho_ann;
  const double integral = cell_integral(
      cell_i, d, [&](const Eigen::VectorXd& xi) { return rho_j(shift * xi); },
      grid);
  const double det_ratio =
      det_power(m, power_of(j)) / det_power(m, power_of(i));
  pair.direct = std::pow(weight(w, i) / weight(w, j) *
                             std::pow(std::abs(det_ratio), tp.theta),
                         tau) *
                std::pow(1.0 + m.power_norm(power_of(i) - power_of(j)), sigma) *
                std::pow(integral, tau);
  pair.reduced =
      two_d * std::pow(m.abs_det(), std::abs(double(s) - tp.theta) * tau) *
      mmn_inhomogeneous(m, *envs.low, envs.ann, a, tau, sigma, *low_cell,
                        ann_cell, j, i, grid);
  return pair;
}

double delta0_frame(double master_C, double C_Qw, double S1, double S2,
                    double tau) {
  if (!(master_C > 0.0) || !(C_Qw > 0.0))
    throw Error(ErrorCode::NonPositiveConstant,
                "master constant and C_Qw must be positive");
  const double sum = std::pow(S1, 1.0 / tau) + std::pow(S2, 1.0 / tau);
  return 1.0 / (1.0 + master_C * std::pow(C_Qw, 4.0) * sum * sum);
}

double delta0_atoms(double master_C, double S3, double S4, double tau) {
  if (!(master_C > 0.0))
    throw Error(ErrorCode::NonPositiveConstant,
                "master constant must be positive");
  const double sum = std::pow(S3, 1.0 / tau) + std::pow(S4, 1.0 / tau);
  if (sum == 0.0) return 1.0;
  return std::min(1.0, 1.0 / (master_C * sum));
}

namespace {

bool prototype_nonvanishing_on_cell(const Prototype& proto, const BaseCell& cell,
                                    int dim) {
  const double lo = cell.euclid_inner(dim);
  const double hi = cell.euclid_outer(dim);
  for (int k = 0; k <= 64; ++k) {
    const double rho = lo + (hi - lo) * k / 64.0;
    if (!(proto.spectrum_radial(rho) > 0.0)) return false;
  }
  return true;
}

}  // namespace

CertReport certify(const CertifyRequest& request) {
  CertReport report;
  report.cert_case = request.cert_case;
  report.convention = request.convention;
  report.master_C = request.master_C;
  report.master_C_supplied = request.master_C_supplied;
  report.C_Qw = request.C_Qw;
  report.c_qw_provenance = request.c_qw_provenance;

  ExpansiveMatrix m = request.matrix;
  if (!m.has_margins()) m = with_default_margins(std::move(m));
  if (!m.has_growth()) m = with_growth(std::move(m));

  const TheoremParams& tp = request.params;
  const bool homo = is_homogeneous_case(request.cert_case);
  const bool frame = is_frame_case(request.cert_case);
  const ThresholdSet ts =
      thresholds(request.cert_case, m, request.s, tp, request.convention);
  report.limits = ts;

  if (!homo && (!request.lowpass || !request.low_cell)) {
    report.failures.push_back("missing low-pass prototype or low cell");
    return report;
  }

  // Envelope exponents: overrides or thresholds plus margin.
  const double extra = frame ? 0.0 : tp.d + 1.0 + tp.eps;
  const DerivativeMax gamma_ann =
      frame ? frame_derivative_max(request.annular, tp.n_derivs)
            : atom_derivative_max(request.annular, tp.n_derivs);
  const double L_env = request.L_override.value_or(
      std::max(0.0, ts.L_req + request.exponent_margin));
  const double N_env =
      request.N_override.value_or(ts.N_req + request.exponent_margin);

  try {
    report.env_ann = fit_envelope(gamma_ann, tp.d, false, L_env, N_env, extra);
  } catch (const Error& e) {
    report.failures.push_back(std::string("envelope: ") + e.what());
    return report;
  }
  double K_env = std::numeric_limits<double>::quiet_NaN();
  if (!homo) {
    const DerivativeMax gamma_low =
        frame ? frame_derivative_max(*request.lowpass, tp.n_derivs)
              : atom_derivative_max(*request.lowpass, tp.n_derivs);
    K_env = request.K_override.value_or(ts.K_req + request.exponent_margin);
    report.env_low = fit_envelope(gamma_low, tp.d, true, 0.0, K_env, extra);
  }

  report.threshold_rows.push_back(
      {"L", ts.L_req, L_env, L_env > ts.L_req});
  report.threshold_rows.push_back(
      {"N", ts.N_req, N_env, N_env > ts.N_req});
  if (!homo)
    report.threshold_rows.push_back(
        {"K", ts.K_req, K_env, K_env > ts.K_req});
  bool thresholds_ok = true;
  for (const auto& row : report.threshold_rows) thresholds_ok &= row.pass;
  if (!thresholds_ok)
    report.failures.push_back("a decay exponent does not exceed its threshold");

  report.prototype_nonvanishing =
      prototype_nonvanishing_on_cell(request.annular, request.ann_cell, tp.d) &&
      (homo || prototype_nonvanishing_on_cell(*request.lowpass,
                                              *request.low_cell, tp.d));
  if (!report.prototype_nonvanishing)
    report.failures.push_back("prototype vanishes on its cell");

  // Truncated sums against the closed-form bounds.
  const MmnTable table =
      homo ? MmnTable::homogeneous(m, report.env_ann, ts.a, ts.tau, ts.sigma,
                                   request.ann_cell, request.quad_grid)
           : MmnTable::inhomogeneous(m, *report.env_low, report.env_ann, ts.a,
                                     ts.tau, ts.sigma, *request.low_cell,
                                     request.ann_cell, request.quad_grid);
  report.sums = truncated_sup_sums(table, request.trunc_T);
  if (report.sums.verdict != SumVerdict::convergent)
    report.failures.push_back(std::string("truncated sums ") +
                              sum_verdict_name(report.sums.verdict));

  try {
    const double r = request.ann_cell.euclid_inner(tp.d);
    const double R = request.ann_cell.euclid_outer(tp.d);
    if (homo) {
      const double S =
          analytic_bound_homo(m.lambda_minus(), m.lambda_plus(), m.growth_b(),
                              report.env_ann, ts.a, ts.tau, ts.sigma, r, R);
      report.bound_s1 = report.bound_s2 = S;
    } else {
      const double R0 = request.low_cell->euclid_outer(tp.d);
      const InhomoBounds bounds = analytic_bounds_inhomo(
          m.lambda_minus(), m.lambda_plus(), m.growth_b(), *report.env_low,
          report.env_ann, ts.a, ts.tau, ts.sigma, r, R, R0, report.env_ann.L,
          report.env_ann.N, report.env_low->K);
      report.bound_s1 = bounds.s1();
      report.bound_s2 = bounds.s2();
    }
    report.bounds_available = true;
  } catch (const Error& e) {
    report.bounds_available = false;
    report.bound_failure = e.what();
    report.failures.push_back(std::string("analytic bound: ") + e.what());
  }

  if (report.bounds_available) {
    report.sums_within_bounds =
        report.sums.sup_row_sum <= report.bound_s1 * (1.0 + kQuadTol) &&
        report.sums.sup_col_sum <= report.bound_s2 * (1.0 + kQuadTol);
    if (!report.sums_within_bounds)
      report.failures.push_back("truncated sums exceed the analytic bound");
  }

  report.reductions_sound = true;
  const int lo = homo ? -request.nij_reach : 0;
  const int hi = homo ? request.nij_reach : 2 * request.nij_reach;
  for (int i = lo; i <= hi; ++i) {
    for (int j = lo; j <= hi; ++j) {
      const NijPair pair = nij_reduction(
          request.cert_case, m, request.s, tp, request.annular, request.lowpass,
          request.ann_cell, request.low_cell, i, j, request.quad_grid);
      NijSpotCheck check;
      check.i = i;
      check.j = j;
      check.direct = pair.direct;
      check.reduced = pair.reduced;
      check.sound = pair.sound(kQuadTol);
      report.reductions_sound &= check.sound;
      report.nij_checks.push_back(check);
    }
  }
  if (!report.reductions_sound)
    report.failures.push_back("a direct N_ij exceeds its reduced bound");

  const double S1 =
      report.bounds_available ? report.bound_s1 : report.sums.sup_row_sum;
  const double S2 =
      report.bounds_available ? report.bound_s2 : report.sums.sup_col_sum;
  report.delta0 = frame
                      ? delta0_frame(request.master_C, request.C_Qw, S1, S2,
                                     ts.tau)
                      : delta0_atoms(request.master_C, S1, S2, ts.tau);

  report.pass = report.failures.empty();
  return report;
}

}  // namespace anisoframe
