#ifndef ANISOFRAME_WAVELETS_HPP
#define ANISOFRAME_WAVELETS_HPP

#include <optional>

#include "anisoframe/prototypes.hpp"
#include "anisoframe/signal.hpp"

namespace anisoframe {

// Generalized shift-invariant wavelet system built from the prototype(s):
//   homogeneous    atoms |det A^i|^{1/2} psi(A^{i,t} t - delta k),  i in Z
//   inhomogeneous  low-pass atoms psi'(t - delta k) at scale 0 plus annular
//                  atoms with T_i = A^{i-1} for i >= 1.
// Translation lattices are delta * T_i^{-t} Z^d. Prototypes are real and
// even, so the reflected system coincides with the system itself.
class WaveletSystem {
 public:
  CoverKind kind() const { return kind_; }
  const ExpansiveMatrix& matrix() const { return matrix_; }
  const Prototype& annular_prototype() const { return proto_; }
  const Prototype& lowpass_prototype() const;
  double delta() const { return delta_; }
  int i_lo() const { return i_lo_; }
  int i_hi() const { return i_hi_; }
  bool parseval() const { return parseval_; }

  const Eigen::MatrixXd& transform(int i) const;
  const Eigen::MatrixXd& inv_transform(int i) const;
  double abs_det_transform(int i) const;

  // psi_hat_i(xi) = |det T_i|^{-1/2} psi_hat(T_i^{-1} xi); in Parseval mode
  // the prototype spectrum is divided by sqrt(sum_j |psi_hat(A^{-j} xi)|^2).
  double atom_spectrum(int i, const Eigen::VectorXd& xi) const;

  // Time value of the atom at (i, k); closed form, so usable as a quadrature
  // oracle. Not available in Parseval mode.
  double atom_time(int i, const std::vector<int>& k,
                   const Eigen::VectorXd& t) const;

  // delta * T_i^{-t} k.
  Eigen::VectorXd lattice_point(int i, const std::vector<int>& k) const;

  // Integer k-box whose lattice points tile one period cell [0, Omega)^d.
  struct LatticeWindow {
    std::vector<int> k_min, k_max;
    std::size_t box_size() const;
  };
  LatticeWindow lattice_window(int i, const std::vector<double>& period) const;

  // Truncated Parseval sum sum_{i in range} |psi_hat(A^{-i} xi)|^2 normalized
  // by the full-range sum; 1 where the scale range resolves xi completely.
  double band_coverage(const Eigen::VectorXd& xi) const;

  void check_scale(int i) const;

 private:
  friend WaveletSystem make_system(CoverKind kind, const ExpansiveMatrix& m,
                                   Prototype annular,
                                   std::optional<Prototype> lowpass,
                                   double delta, int i_lo, int i_hi,
                                   bool parseval, std::size_t lattice_cap);

  CoverKind kind_ = CoverKind::homogeneous;
  ExpansiveMatrix matrix_;
  Prototype proto_ = Prototype::lowpass(1);
  std::optional<Prototype> low_;
  double delta_ = 1.0;
  int i_lo_ = 0, i_hi_ = 0;
  bool parseval_ = false;
  std::size_t lattice_cap_ = 1u << 22;
  std::vector<Eigen::MatrixXd> transforms_, inv_transforms_;
  std::vector<double> abs_dets_;

  double parseval_normalizer(const Eigen::VectorXd& xi) const;
  double raw_scale_spectrum(int i, const Eigen::VectorXd& xi) const;
};

WaveletSystem make_system(CoverKind kind, const ExpansiveMatrix& m,
                          Prototype annular,
                          std::optional<Prototype> lowpass, double delta,
                          int i_lo, int i_hi, bool parseval = false,
                          std::size_t lattice_cap = 1u << 22);

// Analysis operator: c_k^{(i)} = (psi_i * f)(delta T_i^{-t} k), computed
// spectrally per scale on a 2x oversampled band piece; off-grid lattice
// points are filled by multilinear interpolation.
CoefficientArray analysis(const WaveletSystem& sys, const SampledSignal& f,
                          int threads = 1);

// Synthesis operator: pointwise sum of translated-dilated atoms over the
// grid, inner k-sum accumulated before the cross-scale sum. Parseval systems
// synthesize spectrally with periodized atoms.
SampledSignal synthesis(const WaveletSystem& sys, const CoefficientArray& c,
                        std::vector<int> grid, std::vector<double> period,
                        int threads = 1);

struct FrameBoundsResult {
  double lower = std::numeric_limits<double>::infinity();
  double upper = 0.0;
  int trials = 0;
  double ratio() const { return trials > 0 ? upper / lower : 0.0; }
};

// Monte-Carlo proxy for the frame property at p = q = 2, s = 0: min and max
// over random band-limited signals of delta^d ||analysis(f)||_2^2 / ||f||_2^2.
// With zero trials returns the (+inf, 0) sentinel.
FrameBoundsResult empirical_frame_bounds(const WaveletSystem& sys,
                                         std::vector<int> grid,
                                         std::vector<double> period, int trials,
                                         unsigned seed = 0xf7a3e5u,
                                         int threads = 1);

}  // namespace anisoframe

#endif
