#ifndef ANISOFRAME_CERTIFY_HPP
#define ANISOFRAME_CERTIFY_HPP

#include <optional>
#include <string>

#include "anisoframe/cover.hpp"
#include "anisoframe/prototypes.hpp"

namespace anisoframe {

// Derived parameters shared by the frame and atom theorems.
struct TheoremParams {
  double p = 2.0, q = 2.0;
  double p0 = 1.0, q0 = 1.0;
  double eps = 1.0;
  int d = 1;

  double tau = 1.0;      // min{1, p, q}
  int n_derivs = 2;      // ceil((d+eps)/min{1,p})
  double sigma_frame = 0.0;
  double sigma_atom = 0.0;
  double lambda_decay = 0.0;  // 1 + d/min{1,p}
  double theta = 0.0;         // (1/p - 1)_+
};

TheoremParams theorem_params(double p, double q, double p0, double q0,
                             double eps, int d);

enum class CertCase { homo_frame, homo_atoms, inhomo_frame, inhomo_atoms };
const char* cert_case_name(CertCase c);
bool is_frame_case(CertCase c);
bool is_homogeneous_case(CertCase c);

// The two inhomogeneous theorems state their decay hypotheses with exponents
// (s - theta) for the frame case and s for the atoms case, while their proofs
// instantiate the summability lemma with the opposite pair. Both readings are
// exposed; "stated" follows the theorem statements verbatim.
enum class ExponentConvention { stated, proof };
const char* exponent_convention_name(ExponentConvention c);

// Required strict lower bounds on the decay exponents, all of the form
// L > log_{lambda_-}(a) and N, K > log_{lambda_-}(lambda_+^{sigma/tau} / a)
// with a = |det A|^exponent.
struct ThresholdSet {
  double a = 1.0;
  double a_exponent = 0.0;
  double sigma = 0.0;
  double tau = 1.0;
  double L_req = 0.0;
  double N_req = 0.0;
  double K_req = std::numeric_limits<double>::quiet_NaN();  // inhomogeneous only
};

ThresholdSet thresholds(CertCase c, const ExpansiveMatrix& m, int s,
                        const TheoremParams& tp,
                        ExponentConvention convention = ExponentConvention::stated);

// Smallest even prototype vanishing order whose derivative maxima still
// vanish to order >= L_env after n_derivs differentiations.
int recommended_annular_order(double L_env, int n_derivs);

// Cell average (1/|Q|) int_Q f with a midpoint rule and a grid-halving
// (Richardson) consistency check at 1% tolerance.
double cell_average(const BaseCell& cell, int dim,
                    const std::function<double(const Eigen::VectorXd&)>& f,
                    int points_per_axis);

// Scale-interaction entry of the homogeneous summability lemma in base-cell
// form:
//   M_mn = a^{tau(m-n)} (1 + ||A^{n-m}||)^sigma
//          [ (1/|Q_0|) int_{Q_0} env(|A^{n-m} xi|) dxi ]^tau.
double mmn_homogeneous(const ExpansiveMatrix& m, const DecayEnvelope& env,
                       double a, double tau, double sigma, const BaseCell& cell,
                       int mm, int nn, int grid);

// Closed-form bound S of the homogeneous lemma. Throws ThresholdViolated when
// a geometric-series denominator is not positive.
double analytic_bound_homo(double lambda_minus, double lambda_plus,
                           double growth_b, const DecayEnvelope& env, double a,
                           double tau, double sigma, double r, double R);

// Four-case M_mn of the inhomogeneous lemma (indices m, n >= 0).
double mmn_inhomogeneous(const ExpansiveMatrix& m, const DecayEnvelope& env_low,
                         const DecayEnvelope& env_ann, double a, double tau,
                         double sigma, const BaseCell& low_cell,
                         const BaseCell& ann_cell, int mm, int nn, int grid);

// Case-wise closed-form bounds S_1 (sup over columns) and S_2 (sup over
// rows) of the inhomogeneous lemma.
struct InhomoBounds {
  double s1_n_zero = 0.0;
  double s1_n_pos = 0.0;
  double s2_m_zero = 0.0;
  double s2_m_pos = 0.0;
  double s1() const { return std::max(s1_n_zero, s1_n_pos); }
  double s2() const { return std::max(s2_m_zero, s2_m_pos); }
};

InhomoBounds analytic_bounds_inhomo(double lambda_minus, double lambda_plus,
                                    double growth_b,
                                    const DecayEnvelope& env_low,
                                    const DecayEnvelope& env_ann, double a,
                                    double tau, double sigma, double r, double R,
                                    double R0, double L, double N, double K);

// Cached M_mn evaluator: the quadratures depend only on scale differences, so
// a table of O(T) integrals serves the whole (2T+1)^2 matrix.
class MmnTable {
 public:
  static MmnTable homogeneous(const ExpansiveMatrix& m, const DecayEnvelope& env,
                              double a, double tau, double sigma,
                              const BaseCell& cell, int grid);
  static MmnTable inhomogeneous(const ExpansiveMatrix& m,
                                const DecayEnvelope& env_low,
                                const DecayEnvelope& env_ann, double a,
                                double tau, double sigma,
                                const BaseCell& low_cell,
                                const BaseCell& ann_cell, int grid);

  bool homogeneous_kind() const { return kind_ == CoverKind::homogeneous; }
  // Lowest index of the summation domain (-T for homogeneous, 0 otherwise).
  double entry(int mm, int nn) const;

 private:
  MmnTable() = default;
  CoverKind kind_ = CoverKind::homogeneous;
  ExpansiveMatrix matrix_;
  std::optional<DecayEnvelope> env_low_;
  DecayEnvelope env_ann_;
  double a_ = 1.0, tau_ = 1.0, sigma_ = 0.0;
  BaseCell ann_cell_;
  std::optional<BaseCell> low_cell_;
  int grid_ = 64;

  mutable std::map<int, double> diff_integrals_;   // avg env_ann(|A^j xi|) over ann cell
  mutable std::map<int, double> low_row_integrals_;   // avg env_ann(|A^{-(m-1)} xi|) over low cell
  mutable std::map<int, double> low_col_integrals_;   // avg env_low(|A^{n-1} xi|) over ann cell
  mutable std::map<int, double> norm_cache_;          // ||A^j||
  mutable std::optional<double> m00_;

  double diff_integral(int j) const;
  double norm_power(int j) const;
};

enum class SumVerdict { convergent, divergent, inconclusive };
const char* sum_verdict_name(SumVerdict v);

struct SupSumResult {
  double sup_row_sum = 0.0;  // sup_n sum_m M_mn
  double sup_col_sum = 0.0;  // sup_m sum_n M_mn
  double tail_ratio = 0.0;   // largest last-ring contribution ratio
  double growth_factor = 1.0;  // sup sums at 2T relative to T
  int truncation = 0;
  SumVerdict verdict = SumVerdict::inconclusive;
};

// Partial sup-sums over |m|, |n| <= T (or [0, T]). Convergence is declared
// when the last ring contributes < 1e-6 of the sum; divergence when the
// sup-sum grows by >= 1.5x as T doubles. A heuristic, not a proof.
SupSumResult truncated_sup_sums(const MmnTable& table, int T);

// Dual-path evaluation of the theorem-level interaction entries: the direct
// N_ij quadrature with the exact derivative maxima of the built-in
// prototypes against the reduced 2^d (det-power) M_mn bound with the proofs'
// (m, n, a) mapping. direct <= reduced certifies the reduction step.
struct NijPair {
  double direct = 0.0;
  double reduced = 0.0;
  bool sound(double tol = 0.01) const {
    return direct <= reduced * (1.0 + tol) + 1e-300;
  }
};

NijPair nij_reduction(CertCase c, const ExpansiveMatrix& m, int s,
                      const TheoremParams& tp, const Prototype& annular,
                      const std::optional<Prototype>& lowpass,
                      const BaseCell& ann_cell,
                      const std::optional<BaseCell>& low_cell, int i, int j,
                      int grid);

// Lattice-density thresholds of the master theorems. The master constant C
// is not computable from the paper and must be supplied (default 1 labels
// the result a "relative" delta_0).
double delta0_frame(double master_C, double C_Qw, double S1, double S2,
                    double tau);
double delta0_atoms(double master_C, double S3, double S4, double tau);

struct CertifyRequest {
  CertCase cert_case = CertCase::homo_frame;
  ExponentConvention convention = ExponentConvention::stated;
  ExpansiveMatrix matrix;
  int s = 0;
  TheoremParams params;
  Prototype annular = Prototype::annular(1, 4);
  std::optional<Prototype> lowpass;
  BaseCell ann_cell = BaseCell::annulus(0.25, 1.0);
  std::optional<BaseCell> low_cell;

  // Envelope exponents to certify at; defaults are threshold + margin.
  double exponent_margin = 0.5;
  std::optional<double> L_override, N_override, K_override;

  double master_C = 1.0;
  bool master_C_supplied = false;
  double C_Qw = 1.0;
  std::string c_qw_provenance = "user";

  int quad_grid = 64;
  int trunc_T = 64;
  int nij_reach = 2;  // spot-check |i|,|j| <= reach
};

struct ThresholdRow {
  std::string name;
  double required = 0.0;
  double provided = 0.0;
  bool pass = false;
};

struct NijSpotCheck {
  int i = 0, j = 0;
  double direct = 0.0, reduced = 0.0;
  bool sound = false;
};

struct CertReport {
  CertCase cert_case = CertCase::homo_frame;
  ExponentConvention convention = ExponentConvention::stated;
  ThresholdSet limits;
  std::vector<ThresholdRow> threshold_rows;
  DecayEnvelope env_ann;
  std::optional<DecayEnvelope> env_low;
  bool prototype_nonvanishing = false;
  SupSumResult sums;
  double bound_s1 = 0.0, bound_s2 = 0.0;  // homogeneous: S twice
  bool bounds_available = false;
  std::string bound_failure;
  bool sums_within_bounds = false;
  std::vector<NijSpotCheck> nij_checks;
  bool reductions_sound = false;
  double delta0 = 0.0;
  double master_C = 1.0;
  bool master_C_supplied = false;
  double C_Qw = 1.0;
  std::string c_qw_provenance;
  bool pass = false;
  std::vector<std::string> failures;
};

CertReport certify(const CertifyRequest& request);

}  // namespace anisoframe

#endif
