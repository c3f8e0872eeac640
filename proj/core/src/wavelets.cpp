#include "anisoframe/wavelets.hpp"

#include <algorithm>
#include <cmath>

#include "anisoframe/parallel.hpp"

namespace anisoframe {

namespace {

constexpr int kParsevalScaleReach = 48;

int power_index(CoverKind kind, int i) {
  return kind == CoverKind::homogeneous ? i : (i == 0 ? 0 : i - 1);
}

}  // namespace

const Prototype& WaveletSystem::lowpass_prototype() const {
  if (!low_)
    throw Error(ErrorCode::PrototypeKindMismatch, "system has no low-pass prototype");
  return *low_;
}

void WaveletSystem::check_scale(int i) const {
  if (i < i_lo_ || i > i_hi_)
    throw Error(ErrorCode::IndexOutOfRange,
                "scale " + std::to_string(i) + " outside [" +
                    std::to_string(i_lo_) + "," + std::to_string(i_hi_) + "]");
}

const Eigen::MatrixXd& WaveletSystem::transform(int i) const {
  check_scale(i);
  return transforms_[i - i_lo_];
}

const Eigen::MatrixXd& WaveletSystem::inv_transform(int i) const {
  check_scale(i);
  return inv_transforms_[i - i_lo_];
}

double WaveletSystem::abs_det_transform(int i) const {
  check_scale(i);
  return abs_dets_[i - i_lo_];
}

double WaveletSystem::parseval_normalizer(const Eigen::VectorXd& xi) const {
  // sum_{j in Z} |psi_hat(A^{-j} xi)|^2, truncated where the Gaussian tails
  // vanish. Downward scales walk z -> A z, upward scales z -> A^{-1} z.
  double sum = 0.0;
  Eigen::VectorXd z = xi;
  for (int j = 0; j <= kParsevalScaleReach; ++j) {
    const double v = proto_.spectrum(z);
    sum += v * v;
    z = matrix_.entries() * z;
  }
  z = matrix_.inverse() * xi;
  for (int j = 1; j <= kParsevalScaleReach; ++j) {
    const double v = proto_.spectrum(z);
    sum += v * v;
    z = matrix_.inverse() * z;
  }
  return std::sqrt(sum);
}

double WaveletSystem::raw_scale_spectrum(int i, const Eigen::VectorXd& xi) const {
  const Eigen::VectorXd local = inv_transforms_[i - i_lo_] * xi;
  const Prototype& proto =
      (kind_ == CoverKind::inhomogeneous && i == 0) ? *low_ : proto_;
  return std::pow(abs_dets_[i - i_lo_], -0.5) * proto.spectrum(local);
}

double WaveletSystem::atom_spectrum(int i, const Eigen::VectorXd& xi) const {
  check_scale(i);
  const double base = raw_scale_spectrum(i, xi);
  if (!parseval_ || base == 0.0) return base;
  const double norm = parseval_normalizer(xi);
  return norm > 0.0 ? base / norm : 0.0;
}

double WaveletSystem::atom_time(int i, const std::vector<int>& k,
                                const Eigen::VectorXd& t) const {
  check_scale(i);
  if (parseval_)
    throw Error(ErrorCode::Unsupported,
                "Parseval-normalized atoms have no closed-form time values");
  const Prototype& proto =
      (kind_ == CoverKind::inhomogeneous && i == 0) ? *low_ : proto_;
  Eigen::VectorXd arg = transforms_[i - i_lo_].transpose() * t;
  for (int a = 0; a < arg.size(); ++a) arg(a) -= delta_ * k[a];
  return std::sqrt(abs_dets_[i - i_lo_]) * proto.time_value(arg);
}

Eigen::VectorXd WaveletSystem::lattice_point(int i,
                                             const std::vector<int>& k) const {
  check_scale(i);
  Eigen::VectorXd kv(matrix_.dim());
  for (int a = 0; a < matrix_.dim(); ++a) kv(a) = k[a];
  return delta_ * inv_transforms_[i - i_lo_].transpose() * kv;
}

std::size_t WaveletSystem::LatticeWindow::box_size() const {
  std::size_t n = 1;
  for (std::size_t a = 0; a < k_min.size(); ++a)
    n *= static_cast<std::size_t>(k_max[a] - k_min[a] + 1);
  return n;
}

WaveletSystem::LatticeWindow WaveletSystem::lattice_window(
    int i, const std::vector<double>& period) const {
  check_scale(i);
  const int d = matrix_.dim();
  if (static_cast<int>(period.size()) != d)
    throw Error(ErrorCode::SizeMismatch, "period rank mismatch");

  // k ranges over (1/delta) T_i^t [0, Omega)^d; bound by the box corners.
  const Eigen::MatrixXd map = transforms_[i - i_lo_].transpose() / delta_;
  LatticeWindow window;
  window.k_min.assign(d, 0);
  window.k_max.assign(d, 0);
  const int corners = 1 << d;
  for (int c = 0; c < corners; ++c) {
    Eigen::VectorXd corner(d);
    for (int a = 0; a < d; ++a) corner(a) = (c >> a & 1) ? period[a] : 0.0;
    const Eigen::VectorXd k = map * corner;
    for (int a = 0; a < d; ++a) {
      window.k_min[a] = std::min(window.k_min[a],
                                 static_cast<int>(std::floor(k(a))) - 1);
      window.k_max[a] =
          std::max(window.k_max[a], static_cast<int>(std::ceil(k(a))) + 1);
    }
  }
  if (window.box_size() > lattice_cap_)
    throw Error(ErrorCode::IndexOutOfRange,
                "lattice window at scale " + std::to_string(i) +
                    " exceeds the configured cap");
  return window;
}

double WaveletSystem::band_coverage(const Eigen::VectorXd& xi) const {
  // Annular power indices covered by the scale range.
  const int p_lo = kind_ == CoverKind::homogeneous
                       ? i_lo_
                       : std::max(i_lo_, 1) - 1;
  const int p_hi = kind_ == CoverKind::homogeneous ? i_hi_ : i_hi_ - 1;
  const int reach_lo = kind_ == CoverKind::homogeneous
                           ? -kParsevalScaleReach
                           : std::min(p_lo, 0);
  double total = 0.0, in_range = 0.0;
  if (kind_ == CoverKind::inhomogeneous && low_) {
    const double v = low_->spectrum(xi);
    total += v * v;
    if (i_lo_ == 0) in_range += v * v;
  }
  Eigen::VectorXd z = power(matrix_, -reach_lo) * xi;
  for (int p = reach_lo; p <= kParsevalScaleReach; ++p) {
    const double v = proto_.spectrum(z);
    total += v * v;
    if (p >= p_lo && p <= p_hi) in_range += v * v;
    z = matrix_.inverse() * z;
  }
  return total > 0.0 ? in_range / total : 0.0;
}

WaveletSystem make_system(CoverKind kind, const ExpansiveMatrix& m,
                          Prototype annular, std::optional<Prototype> lowpass,
                          double delta, int i_lo, int i_hi, bool parseval,
                          std::size_t lattice_cap) {
  if (!(delta > 0.0))
    throw Error(ErrorCode::DeltaNonPositive,
                "lattice density delta must be positive");
  if (i_lo > i_hi)
    throw Error(ErrorCode::IndexOutOfRange, "scale range is empty");
  if (annular.family() == PrototypeFamily::gauss_lowpass)
    throw Error(ErrorCode::PrototypeKindMismatch,
                "the annular slot needs a prototype vanishing at 0");
  if (kind == CoverKind::inhomogeneous) {
    if (!lowpass)
      throw Error(ErrorCode::PrototypeKindMismatch,
                  "inhomogeneous systems need a low-pass prototype");
    if (lowpass->family() == PrototypeFamily::annular_hermite_gauss)
      throw Error(ErrorCode::PrototypeKindMismatch,
                  "the low-pass slot must not vanish at the origin");
    if (i_lo < 0)
      throw Error(ErrorCode::IndexOutOfRange,
                  "inhomogeneous scales are indexed by i >= 0");
    if (parseval)
      throw Error(ErrorCode::Unsupported,
                  "Parseval mode is a homogeneous-system experiment");
  }

  WaveletSystem sys;
  sys.kind_ = kind;
  sys.matrix_ = m;
  sys.proto_ = std::move(annular);
  sys.low_ = std::move(lowpass);
  sys.delta_ = delta;
  sys.i_lo_ = i_lo;
  sys.i_hi_ = i_hi;
  sys.parseval_ = parseval;
  sys.lattice_cap_ = lattice_cap;
  for (int i = i_lo; i <= i_hi; ++i) {
    const int p = power_index(kind, i);
    sys.transforms_.push_back(power(m, p));
    sys.inv_transforms_.push_back(power(m, -p));
    sys.abs_dets_.push_back(std::abs(det_power(m, p)));
  }
  return sys;
}

namespace {

// Multilinear interpolation on the periodic fine grid.
Complex interpolate_periodic(const SampledSignal& g, const Eigen::VectorXd& x) {
  const int d = g.dim();
  std::vector<int> base(d);
  std::vector<double> frac(d);
  for (int a = 0; a < d; ++a) {
    const double h = g.period[a] / g.grid[a];
    double u = x(a) / h;
    u -= std::floor(u / g.grid[a]) * g.grid[a];  // wrap into [0, n)
    base[a] = static_cast<int>(std::floor(u)) % g.grid[a];
    frac[a] = u - std::floor(u);
  }
  Complex acc(0.0, 0.0);
  const int corners = 1 << d;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t flat = 0;
    for (int a = 0; a < d; ++a) {
      const int off = c >> a & 1;
      w *= off ? frac[a] : 1.0 - frac[a];
      const int idx = (base[a] + off) % g.grid[a];
      flat = flat * g.grid[a] + idx;
    }
    if (w != 0.0) acc += w * g.values[flat];
  }
  return acc;
}

bool in_period_cell(const Eigen::VectorXd& x, const std::vector<double>& period) {
  for (int a = 0; a < x.size(); ++a) {
    const double tol = 1e-9 * period[a];
    if (x(a) < -tol || x(a) >= period[a] - tol) return false;
  }
  return true;
}

}  // namespace

CoefficientArray analysis(const WaveletSystem& sys, const SampledSignal& f,
                          int threads) {
  if (f.dim() != sys.matrix().dim())
    throw Error(ErrorCode::BandMismatch, "signal rank does not match system");

  const Spectrum padded = pad_spectrum(forward_spectrum(f), 2);
  const int n_scales = sys.i_hi() - sys.i_lo() + 1;

  CoefficientArray out;
  out.dim = f.dim();
  out.scales.resize(n_scales);

  parallel_for(0, n_scales, threads, [&](int si) {
    const int i = sys.i_lo() + si;
    Spectrum filt = padded;
    for (std::size_t flat = 0; flat < filt.values.size(); ++flat) {
      if (filt.values[flat] == Complex(0.0, 0.0)) continue;
      filt.values[flat] *= sys.atom_spectrum(i, filt.frequency(flat));
    }
    const SampledSignal piece = inverse_spectrum(filt);

    const auto window = sys.lattice_window(i, f.period);
    ScaleCoefficients scale;
    scale.i = i;
    scale.k_min = window.k_min;
    scale.k_max = window.k_max;
    scale.values.assign(window.box_size(), Complex(0.0, 0.0));
    for (std::size_t flat = 0; flat < scale.values.size(); ++flat) {
      const auto k = scale.k_at(flat);
      const Eigen::VectorXd x = sys.lattice_point(i, k);
      if (!in_period_cell(x, f.period)) continue;
      scale.values[flat] = interpolate_periodic(piece, x);
    }
    out.scales[si] = std::move(scale);
  });
  return out;
}

namespace {

SampledSignal synthesis_time_domain(const WaveletSystem& sys,
                                    const CoefficientArray& c,
                                    SampledSignal out, int threads) {
  const int d = out.dim();
  // One ring of periodic images; configurations keep the period at least
  // 8x the atom support, so further images are below double precision.
  std::vector<Eigen::VectorXd> images;
  {
    std::vector<int> idx(d, -1);
    while (true) {
      Eigen::VectorXd shift(d);
      for (int a = 0; a < d; ++a) shift(a) = idx[a] * out.period[a];
      images.push_back(shift);
      int a = 0;
      for (; a < d; ++a) {
        if (++idx[a] <= 1) break;
        idx[a] = -1;
      }
      if (a == d) break;
    }
  }

  const int total = static_cast<int>(out.size());
  const int chunks = std::max(1, std::min(threads * 8, total));
  const int chunk_len = (total + chunks - 1) / chunks;
  parallel_for(0, chunks, threads, [&](int chunk) {
    const int begin = chunk * chunk_len;
    const int end = std::min(total, begin + chunk_len);
    for (int flat = begin; flat < end; ++flat) {
      const Eigen::VectorXd t = out.point(static_cast<std::size_t>(flat));
      Complex acc(0.0, 0.0);
      for (const auto& scale : c.scales) {
        Complex scale_acc(0.0, 0.0);
        for (std::size_t kf = 0; kf < scale.values.size(); ++kf) {
          const Complex coeff = scale.values[kf];
          if (coeff == Complex(0.0, 0.0)) continue;
          const auto k = scale.k_at(kf);
          double atom = 0.0;
          for (const auto& shift : images)
            atom += sys.atom_time(scale.i, k, t + shift);
          scale_acc += coeff * atom;
        }
        acc += scale_acc;
      }
      out.values[static_cast<std::size_t>(flat)] = acc;
    }
  });
  return out;
}

SampledSignal synthesis_spectral(const WaveletSystem& sys,
                                 const CoefficientArray& c, SampledSignal out,
                                 int threads) {
  Spectrum spec;
  spec.grid = out.grid;
  spec.period = out.period;
  spec.values.assign(out.size(), Complex(0.0, 0.0));

  double cells = 1.0, omega = 1.0;
  for (std::size_t a = 0; a < out.grid.size(); ++a) {
    cells *= out.grid[a];
    omega *= out.period[a];
  }
  const double series_to_unitary = std::sqrt(cells) / omega;

  std::vector<std::vector<Complex>> partials(c.scales.size());
  parallel_for(0, static_cast<int>(c.scales.size()), threads, [&](int si) {
    const auto& scale = c.scales[si];
    std::vector<Complex> acc(spec.values.size(), Complex(0.0, 0.0));
    std::vector<std::pair<Eigen::VectorXd, Complex>> points;
    for (std::size_t kf = 0; kf < scale.values.size(); ++kf) {
      if (scale.values[kf] == Complex(0.0, 0.0)) continue;
      points.emplace_back(sys.lattice_point(scale.i, scale.k_at(kf)),
                          scale.values[kf]);
    }
    for (std::size_t flat = 0; flat < acc.size(); ++flat) {
      const Eigen::VectorXd xi = spec.frequency(flat);
      const double shape = sys.atom_spectrum(scale.i, xi);
      if (shape == 0.0) continue;
      Complex lattice_sum(0.0, 0.0);
      for (const auto& [x, coeff] : points) {
        const double phase = -2.0 * M_PI * xi.dot(x);
        lattice_sum += coeff * Complex(std::cos(phase), std::sin(phase));
      }
      acc[flat] = shape * lattice_sum;
    }
    partials[si] = std::move(acc);
  });
  // Deterministic reduction: ascending scale order.
  for (const auto& partial : partials)
    for (std::size_t flat = 0; flat < spec.values.size(); ++flat)
      spec.values[flat] += partial[flat];
  for (auto& v : spec.values) v *= series_to_unitary;
  return inverse_spectrum(spec);
}

}  // namespace

SampledSignal synthesis(const WaveletSystem& sys, const CoefficientArray& c,
                        std::vector<int> grid, std::vector<double> period,
                        int threads) {
  SampledSignal out = make_signal(std::move(grid), std::move(period));
  if (c.dim != out.dim())
    throw Error(ErrorCode::SizeMismatch, "coefficient rank mismatch");
  for (const auto& scale : c.scales) sys.check_scale(scale.i);
  if (sys.parseval() || !sys.annular_prototype().analytic())
    return synthesis_spectral(sys, c, std::move(out), threads);
  return synthesis_time_domain(sys, c, std::move(out), threads);
}

FrameBoundsResult empirical_frame_bounds(const WaveletSystem& sys,
                                         std::vector<int> grid,
                                         std::vector<double> period, int trials,
                                         unsigned seed, int threads) {
  FrameBoundsResult result;
  if (trials <= 0) return result;
  result.trials = trials;

  const auto band_pred = [&](const Eigen::VectorXd& xi) {
    if (xi.norm() == 0.0) return false;
    return sys.band_coverage(xi) > 1.0 - 1e-6;
  };

  const int d = static_cast<int>(grid.size());
  for (int trial = 0; trial < trials; ++trial) {
    const SampledSignal f =
        random_band_limited_signal(grid, period, band_pred, seed + 977u * trial);
    const double f_norm2 = lp_norm(f, 2.0);
    if (f_norm2 == 0.0) continue;
    const CoefficientArray coeffs = analysis(sys, f, threads);
    double sum = 0.0;
    for (const auto& scale : coeffs.scales)
      for (const auto& v : scale.values) sum += std::norm(v);
    const double ratio =
        std::pow(sys.delta(), d) * sum / (f_norm2 * f_norm2);
    result.lower = std::min(result.lower, ratio);
    result.upper = std::max(result.upper, ratio);
  }
  return result;
}

}  // namespace anisoframe
