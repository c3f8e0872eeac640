#include "anisoframe/signal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

namespace anisoframe {

namespace {

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

std::size_t total_size(const std::vector<int>& grid) {
  std::size_t n = 1;
  for (int g : grid) n *= static_cast<std::size_t>(g);
  return n;
}

void check_shape(const std::vector<int>& grid,
                 const std::vector<double>& period) {
  if (grid.empty() || grid.size() != period.size())
    throw Error(ErrorCode::SizeMismatch, "grid/period rank mismatch");
  for (std::size_t a = 0; a < grid.size(); ++a) {
    const int n = grid[a];
    if (n < 2 || (n & (n - 1)) != 0)
      throw Error(ErrorCode::SizeMismatch,
                  "grid sizes must be powers of two, got " + std::to_string(n));
    if (!(period[a] > 0.0))
      throw Error(ErrorCode::SizeMismatch, "period must be positive");
  }
}

void fft_inplace(std::vector<Complex>& values, const std::vector<int>& grid,
                 int sign) {
  const std::size_t n = total_size(grid);
  if (values.size() != n)
    throw Error(ErrorCode::SizeMismatch, "value count does not match grid");
  std::vector<int> dims(grid.begin(), grid.end());
  auto* data = reinterpret_cast<fftw_complex*>(values.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), data, data,
                         sign, FFTW_ESTIMATE);
  }
  if (!plan) throw Error(ErrorCode::NumericalFailure, "FFTW plan failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : values) v *= scale;
}

int freq_index(int n, int b) { return b <= n / 2 - 1 ? b : b - n; }

void unflatten(const std::vector<int>& grid, std::size_t flat,
               std::vector<int>& idx) {
  idx.resize(grid.size());
  for (std::size_t a = grid.size(); a-- > 0;) {
    idx[a] = static_cast<int>(flat % grid[a]);
    flat /= grid[a];
  }
}

}  // namespace

std::size_t SampledSignal::size() const { return total_size(grid); }
std::size_t Spectrum::size() const { return total_size(grid); }

Eigen::VectorXd SampledSignal::point(std::size_t flat) const {
  std::vector<int> idx;
  unflatten(grid, flat, idx);
  Eigen::VectorXd t(dim());
  for (int a = 0; a < dim(); ++a) t(a) = period[a] * idx[a] / grid[a];
  return t;
}

Eigen::VectorXd Spectrum::frequency(std::size_t flat) const {
  std::vector<int> idx;
  unflatten(grid, flat, idx);
  Eigen::VectorXd xi(dim());
  for (int a = 0; a < dim(); ++a)
    xi(a) = freq_index(grid[a], idx[a]) / period[a];
  return xi;
}

std::vector<double> Spectrum::band_edge() const {
  std::vector<double> edge(grid.size());
  for (std::size_t a = 0; a < grid.size(); ++a)
    edge[a] = grid[a] / (2.0 * period[a]);
  return edge;
}

SampledSignal make_signal(std::vector<int> grid, std::vector<double> period) {
  check_shape(grid, period);
  SampledSignal g;
  g.values.assign(total_size(grid), Complex(0.0, 0.0));
  g.grid = std::move(grid);
  g.period = std::move(period);
  return g;
}

Spectrum forward_spectrum(const SampledSignal& g) {
  check_shape(g.grid, g.period);
  Spectrum s;
  s.grid = g.grid;
  s.period = g.period;
  s.values = g.values;
  fft_inplace(s.values, s.grid, FFTW_FORWARD);
  return s;
}

SampledSignal inverse_spectrum(const Spectrum& s) {
  check_shape(s.grid, s.period);
  SampledSignal g;
  g.grid = s.grid;
  g.period = s.period;
  g.values = s.values;
  fft_inplace(g.values, g.grid, FFTW_BACKWARD);
  return g;
}

Spectrum pad_spectrum(const Spectrum& s, int factor) {
  if (factor < 1)
    throw Error(ErrorCode::SizeMismatch, "pad factor must be >= 1");
  if (factor == 1) return s;
  Spectrum out;
  out.period = s.period;
  out.grid.resize(s.grid.size());
  for (std::size_t a = 0; a < s.grid.size(); ++a)
    out.grid[a] = s.grid[a] * factor;
  out.values.assign(total_size(out.grid), Complex(0.0, 0.0));

  // Unitary spectra scale with sqrt(total grid size) relative to Fourier
  // series coefficients, so kept bins pick up sqrt(factor^d).
  const double scale =
      std::sqrt(std::pow(static_cast<double>(factor), double(s.dim())));
  std::vector<int> idx;
  for (std::size_t flat = 0; flat < s.values.size(); ++flat) {
    unflatten(s.grid, flat, idx);
    std::size_t out_flat = 0;
    for (std::size_t a = 0; a < s.grid.size(); ++a) {
      const int k = freq_index(s.grid[a], idx[a]);
      const int ob = k >= 0 ? k : k + out.grid[a];
      out_flat = out_flat * out.grid[a] + ob;
    }
    out.values[out_flat] = scale * s.values[flat];
  }
  return out;
}

SampledSignal band_piece(const Spectrum& spec, const PartitionOfUnity& pou,
                         int i) {
  Spectrum filtered = spec;
  for (std::size_t flat = 0; flat < filtered.values.size(); ++flat) {
    if (filtered.values[flat] == Complex(0.0, 0.0)) continue;
    filtered.values[flat] *= pou.phi(i, filtered.frequency(flat));
  }
  return inverse_spectrum(filtered);
}

SampledSignal band_piece(const SampledSignal& g, const PartitionOfUnity& pou,
                         int i) {
  return band_piece(forward_spectrum(g), pou, i);
}

bool band_truncated(const Cover& c, int i, const SampledSignal& g) {
  check_shape(g.grid, g.period);
  double min_edge = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < g.grid.size(); ++a)
    min_edge = std::min(min_edge, g.grid[a] / (2.0 * g.period[a]));
  return c.member_span(i).second > min_edge;
}

double lp_norm(const SampledSignal& g, double p) {
  if (!(p > 0.0))
    throw Error(ErrorCode::InvalidExponent,
                "L^p exponent must be positive, got " + std::to_string(p));
  if (std::isinf(p)) {
    double sup = 0.0;
    for (const auto& v : g.values) sup = std::max(sup, std::abs(v));
    return sup;
  }
  double cell = 1.0;
  for (std::size_t a = 0; a < g.grid.size(); ++a)
    cell *= g.period[a] / g.grid[a];
  double sum = 0.0;
  for (const auto& v : g.values) sum += std::pow(std::abs(v), p);
  return std::pow(cell * sum, 1.0 / p);
}

namespace {

double lq_accumulate(const std::vector<double>& terms, double q) {
  if (std::isinf(q)) {
    double sup = 0.0;
    for (double t : terms) sup = std::max(sup, t);
    return sup;
  }
  double sum = 0.0;
  for (double t : terms) sum += std::pow(t, q);
  return std::pow(sum, 1.0 / q);
}

}  // namespace

DecompositionNormResult decomposition_norm(const SampledSignal& g,
                                           const PartitionOfUnity& pou,
                                           const WeightSequence& w, double p_exp,
                                           double q_exp) {
  if (!(p_exp > 0.0) || !(q_exp > 0.0))
    throw Error(ErrorCode::InvalidExponent, "exponents must be positive");
  const Cover& cover = pou.cover();
  const Spectrum spec = forward_spectrum(g);

  DecompositionNormResult result;
  std::vector<double> terms;
  for (int i = cover.i_min(); i <= cover.i_max(); ++i) {
    BandNormRow row;
    row.i = i;
    row.weight = weight(w, i);
    row.lp = lp_norm(band_piece(spec, pou, i), p_exp);
    row.truncated = band_truncated(cover, i, g);
    terms.push_back(row.weight * row.lp);
    result.bands.push_back(row);
  }
  result.value = lq_accumulate(terms, q_exp);

  double captured = 0.0, total = 0.0;
  for (std::size_t flat = 0; flat < spec.values.size(); ++flat) {
    const double mass = std::norm(spec.values[flat]);
    if (mass == 0.0) continue;
    total += mass;
    const double s = pou.phi_sum(spec.frequency(flat));
    captured += mass * (1.0 - s) * (1.0 - s);
  }
  result.excluded_mass = total > 0.0 ? std::sqrt(captured / total) : 0.0;
  return result;
}

std::size_t ScaleCoefficients::flat_index(const std::vector<int>& k) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < k_min.size(); ++a) {
    if (k[a] < k_min[a] || k[a] > k_max[a])
      throw Error(ErrorCode::IndexOutOfRange, "lattice index outside box");
    flat = flat * (k_max[a] - k_min[a] + 1) + (k[a] - k_min[a]);
  }
  return flat;
}

std::vector<int> ScaleCoefficients::k_at(std::size_t flat) const {
  std::vector<int> k(k_min.size());
  for (std::size_t a = k_min.size(); a-- > 0;) {
    const int w = k_max[a] - k_min[a] + 1;
    k[a] = k_min[a] + static_cast<int>(flat % w);
    flat /= w;
  }
  return k;
}

const ScaleCoefficients* CoefficientArray::find_scale(int i) const {
  for (const auto& s : scales)
    if (s.i == i) return &s;
  return nullptr;
}

double coefficient_norm(const CoefficientArray& c, const ExpansiveMatrix& m,
                        const WeightSequence& w, double p, double q) {
  if (!(p > 0.0) || !(q > 0.0))
    throw Error(ErrorCode::InvalidExponent, "exponents must be positive");
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  std::vector<double> terms;
  for (const auto& scale : c.scales) {
    double inner;
    if (std::isinf(p)) {
      inner = 0.0;
      for (const auto& v : scale.values) inner = std::max(inner, std::abs(v));
    } else {
      double sum = 0.0;
      for (const auto& v : scale.values) sum += std::pow(std::abs(v), p);
      inner = std::pow(sum, 1.0 / p);
    }
    const int power_index = w.kind == CoverKind::homogeneous
                                ? scale.i
                                : (scale.i == 0 ? 0 : scale.i - 1);
    const double abs_det_t = std::abs(det_power(m, power_index));
    terms.push_back(std::pow(abs_det_t, 0.5 - inv_p) * weight(w, scale.i) *
                    inner);
  }
  return lq_accumulate(terms, q);
}

SampledSignal random_band_limited_signal(
    std::vector<int> grid, std::vector<double> period,
    const std::function<bool(const Eigen::VectorXd&)>& band_pred,
    unsigned seed) {
  check_shape(grid, period);
  Spectrum s;
  s.grid = std::move(grid);
  s.period = std::move(period);
  s.values.assign(total_size(s.grid), Complex(0.0, 0.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t flat = 0; flat < s.values.size(); ++flat) {
    const double re = gauss(rng), im = gauss(rng);
    if (band_pred(s.frequency(flat))) s.values[flat] = Complex(re, im);
  }
  return inverse_spectrum(s);
}

namespace {

constexpr char kBinaryMagic[8] = {'A', 'F', 'S', 'I', 'G', '0', '0', '1'};

}  // namespace

void write_signal(const SampledSignal& g, const std::string& path, bool text) {
  std::ofstream out(path, text ? std::ios::out : std::ios::out | std::ios::binary);
  if (!out) throw Error(ErrorCode::InputUnreadable, "cannot open " + path);
  if (text) {
    out << "anisoframe-signal 1\n";
    out << "dim " << g.dim() << "\n";
    out << "grid";
    for (int n : g.grid) out << ' ' << n;
    out << "\nperiod";
    out.precision(17);
    for (double o : g.period) out << ' ' << o;
    out << "\n";
    for (const auto& v : g.values) out << v.real() << ' ' << v.imag() << "\n";
    return;
  }
  out.write(kBinaryMagic, sizeof(kBinaryMagic));
  const std::uint32_t d = static_cast<std::uint32_t>(g.dim());
  out.write(reinterpret_cast<const char*>(&d), sizeof(d));
  for (int n : g.grid) {
    const std::uint32_t v = static_cast<std::uint32_t>(n);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  for (double o : g.period)
    out.write(reinterpret_cast<const char*>(&o), sizeof(o));
  for (const auto& v : g.values) {
    const double re = v.real(), im = v.imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof(re));
    out.write(reinterpret_cast<const char*>(&im), sizeof(im));
  }
}

SampledSignal read_signal(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw Error(ErrorCode::InputUnreadable, "cannot open " + path);
  char magic[8] = {};
  probe.read(magic, sizeof(magic));
  const bool binary =
      probe.gcount() == 8 && std::memcmp(magic, kBinaryMagic, 8) == 0;

  if (binary) {
    std::uint32_t d = 0;
    probe.read(reinterpret_cast<char*>(&d), sizeof(d));
    if (!probe || d == 0 || d > 8)
      throw Error(ErrorCode::InputUnreadable, "bad signal header in " + path);
    std::vector<int> grid(d);
    std::vector<double> period(d);
    for (auto& n : grid) {
      std::uint32_t v = 0;
      probe.read(reinterpret_cast<char*>(&v), sizeof(v));
      n = static_cast<int>(v);
    }
    for (auto& o : period) probe.read(reinterpret_cast<char*>(&o), sizeof(o));
    SampledSignal g = make_signal(grid, period);
    for (auto& v : g.values) {
      double re = 0, im = 0;
      probe.read(reinterpret_cast<char*>(&re), sizeof(re));
      probe.read(reinterpret_cast<char*>(&im), sizeof(im));
      v = Complex(re, im);
    }
    if (!probe)
      throw Error(ErrorCode::InputUnreadable, "truncated signal file " + path);
    return g;
  }

  std::ifstream in(path);
  std::string tag;
  int version = 0;
  in >> tag >> version;
  if (tag != "anisoframe-signal" || version != 1)
    throw Error(ErrorCode::InputUnreadable,
                "unrecognized signal format in " + path);
  int d = 0;
  in >> tag >> d;
  if (tag != "dim" || d <= 0 || d > 8)
    throw Error(ErrorCode::InputUnreadable, "bad dim line in " + path);
  std::vector<int> grid(d);
  std::vector<double> period(d);
  in >> tag;
  for (auto& n : grid) in >> n;
  in >> tag;
  for (auto& o : period) in >> o;
  SampledSignal g = make_signal(grid, period);
  for (auto& v : g.values) {
    double re = 0, im = 0;
    in >> re >> im;
    v = Complex(re, im);
  }
  if (!in)
    throw Error(ErrorCode::InputUnreadable, "truncated signal file " + path);
  return g;
}

void write_coefficients(const CoefficientArray& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InputUnreadable, "cannot open " + path);
  out << "anisoframe-coefficients 1\n";
  out << "dim " << c.dim << "\n";
  out.precision(17);
  for (const auto& scale : c.scales) {
    for (std::size_t flat = 0; flat < scale.values.size(); ++flat) {
      const auto k = scale.k_at(flat);
      out << scale.i;
      for (int ka : k) out << ' ' << ka;
      out << ' ' << scale.values[flat].real() << ' '
          << scale.values[flat].imag() << "\n";
    }
  }
}

CoefficientArray read_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InputUnreadable, "cannot open " + path);
  std::string tag;
  int version = 0;
  in >> tag >> version;
  if (tag != "anisoframe-coefficients" || version != 1)
    throw Error(ErrorCode::InputUnreadable,
                "unrecognized coefficient format in " + path);
  int d = 0;
  in >> tag >> d;
  if (tag != "dim" || d <= 0 || d > 8)
    throw Error(ErrorCode::InputUnreadable, "bad dim line in " + path);

  struct Record {
    std::vector<int> k;
    Complex v;
  };
  std::map<int, std::vector<Record>> per_scale;
  while (true) {
    int i = 0;
    if (!(in >> i)) break;
    Record rec;
    rec.k.resize(d);
    for (auto& ka : rec.k) in >> ka;
    double re = 0, im = 0;
    in >> re >> im;
    if (!in)
      throw Error(ErrorCode::InputUnreadable, "truncated record in " + path);
    rec.v = Complex(re, im);
    per_scale[i].push_back(std::move(rec));
  }

  CoefficientArray c;
  c.dim = d;
  for (auto& [i, records] : per_scale) {
    ScaleCoefficients scale;
    scale.i = i;
    scale.k_min.assign(d, 0);
    scale.k_max.assign(d, 0);
    for (int a = 0; a < d; ++a) {
      scale.k_min[a] = records.front().k[a];
      scale.k_max[a] = records.front().k[a];
      for (const auto& rec : records) {
        scale.k_min[a] = std::min(scale.k_min[a], rec.k[a]);
        scale.k_max[a] = std::max(scale.k_max[a], rec.k[a]);
      }
    }
    std::size_t n = 1;
    for (int a = 0; a < d; ++a)
      n *= static_cast<std::size_t>(scale.k_max[a] - scale.k_min[a] + 1);
    scale.values.assign(n, Complex(0.0, 0.0));
    for (const auto& rec : records)
      scale.values[scale.flat_index(rec.k)] = rec.v;
    c.scales.push_back(std::move(scale));
  }
  return c;
}

}  // namespace anisoframe
