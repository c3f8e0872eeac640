#ifndef ANISOFRAME_SIGNAL_HPP
#define ANISOFRAME_SIGNAL_HPP

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "anisoframe/partition.hpp"

namespace anisoframe {

using Complex = std::complex<double>;

// Periodized grid samples of a function: values[j] = g(t_j) with
// t_j = (j_a * period_a / grid_a)_a, row-major with axis 0 slowest.
struct SampledSignal {
  std::vector<int> grid;       // per-axis size, powers of two
  std::vector<double> period;  // per-axis spatial extent Omega
  std::vector<Complex> values;

  int dim() const { return static_cast<int>(grid.size()); }
  std::size_t size() const;
  Eigen::VectorXd point(std::size_t flat) const;
};

// Unitary DFT of a SampledSignal in FFT bin order; bin b on an axis of size n
// carries the frequency (b <= n/2-1 ? b : b-n) / Omega.
struct Spectrum {
  std::vector<int> grid;
  std::vector<double> period;
  std::vector<Complex> values;

  int dim() const { return static_cast<int>(grid.size()); }
  std::size_t size() const;
  // Frequency vector of a flat bin index.
  Eigen::VectorXd frequency(std::size_t flat) const;
  // Per-axis representable band edge grid/(2*Omega).
  std::vector<double> band_edge() const;
};

SampledSignal make_signal(std::vector<int> grid, std::vector<double> period);

Spectrum forward_spectrum(const SampledSignal& g);
SampledSignal inverse_spectrum(const Spectrum& s);

// Zero-pad a spectrum to factor-times-finer grids (same frequencies kept,
// unitary scaling adjusted), for oversampled evaluation of band pieces.
Spectrum pad_spectrum(const Spectrum& s, int factor);

// F^{-1}(phi_i * g_hat) on the signal grid.
SampledSignal band_piece(const SampledSignal& g, const PartitionOfUnity& pou,
                         int i);
SampledSignal band_piece(const Spectrum& spec, const PartitionOfUnity& pou,
                         int i);

// True when member i of the cover sticks out of the representable band of
// the grid (reported, not fatal).
bool band_truncated(const Cover& c, int i, const SampledSignal& g);

// Riemann-sum L^p quasi-norm over one period: (prod(Omega/n))^{1/p} * (sum
// |v|^p)^{1/p}; sup norm for p = infinity.
double lp_norm(const SampledSignal& g, double p);

struct BandNormRow {
  int i = 0;
  double weight = 1.0;
  double lp = 0.0;
  bool truncated = false;
};

struct DecompositionNormResult {
  double value = 0.0;
  std::vector<BandNormRow> bands;
  // Relative spectral mass not reproduced by the truncated partition:
  // ||(1 - sum_i phi_i) g_hat||_2 / ||g_hat||_2.
  double excluded_mass = 0.0;
};

// l^q over i of w_i * ||F^{-1}(phi_i g_hat)||_{L^p}.
DecompositionNormResult decomposition_norm(const SampledSignal& g,
                                           const PartitionOfUnity& pou,
                                           const WeightSequence& w, double p_exp,
                                           double q_exp);

// Doubly indexed frame coefficients c_k^{(i)} with finite per-scale k-boxes.
struct ScaleCoefficients {
  int i = 0;
  std::vector<int> k_min;  // inclusive, per axis
  std::vector<int> k_max;
  std::vector<Complex> values;  // row-major over the k-box

  std::size_t size() const { return values.size(); }
  std::size_t flat_index(const std::vector<int>& k) const;
  std::vector<int> k_at(std::size_t flat) const;
};

struct CoefficientArray {
  int dim = 1;
  std::vector<ScaleCoefficients> scales;  // ascending scale index

  const ScaleCoefficients* find_scale(int i) const;
};

// l^q over i of |det T_i|^{1/2 - 1/p} * w_i * ||c^{(i)}||_{l^p}; the
// inhomogeneous variant uses T_0 = identity.
double coefficient_norm(const CoefficientArray& c, const ExpansiveMatrix& m,
                        const WeightSequence& w, double p, double q);

// Deterministic random signal whose spectrum is supported on the bins where
// band_pred holds.
SampledSignal random_band_limited_signal(
    std::vector<int> grid, std::vector<double> period,
    const std::function<bool(const Eigen::VectorXd&)>& band_pred, unsigned seed);

// Signal file formats: a small binary container and a plain-text form.
void write_signal(const SampledSignal& g, const std::string& path, bool text);
SampledSignal read_signal(const std::string& path);

// Coefficient records (i, k-tuple, re, im), one per line.
void write_coefficients(const CoefficientArray& c, const std::string& path);
CoefficientArray read_coefficients(const std::string& path);

}  // namespace anisoframe

#endif
