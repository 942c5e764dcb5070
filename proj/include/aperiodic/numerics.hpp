#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "aperiodic/linalg.hpp"

namespace aperiodic {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Counter-based splittable RNG.
//
// A stream is keyed by (seed, index); distinct indices give statistically
// independent substreams, so a Monte-Carlo loop keyed by sample index is
// reproducible regardless of scheduling.  The generator is splitmix64
// (Steele-Lea-Flood) with a per-stream state derived by mixing the key.
// ---------------------------------------------------------------------------
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t index) : seed_(seed), index_(index) {
    state_ = mix(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
    state_ = mix(state_ ^ mix(index + 0x632BE59BD9B4E019ULL));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform on [0,1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  VecD uniform_vec(std::size_t n) {
    VecD v(n);
    for (auto& x : v) x = uniform();
    return v;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_, index_, state_;
};

// ---------------------------------------------------------------------------
// Symbolic test functions with closed-form integral and L^2 norm.
//
// These stand in for C_c test functions: Gaussians are treated as compactly
// supported after truncation at the radius where they drop below 1e-12, and
// that radius is part of the reported support box.
// ---------------------------------------------------------------------------
enum class TestFnKind { gaussian, box, triangle, modulated_gaussian };

inline const char* to_string(TestFnKind k) {
  switch (k) {
    case TestFnKind::gaussian: return "gaussian";
    case TestFnKind::box: return "box";
    case TestFnKind::triangle: return "triangle";
    case TestFnKind::modulated_gaussian: return "modulated-gaussian";
  }
  return "?";
}

struct TestFunction {
  TestFnKind kind = TestFnKind::gaussian;
  int dimension = 1;
  VecD center;      // size == dimension
  double scale = 1.0;
  VecD frequency;   // modulated_gaussian only

  static TestFunction gaussian(int dim, VecD center = {}, double scale = 1.0) {
    return make(TestFnKind::gaussian, dim, std::move(center), scale, {});
  }
  static TestFunction box_fn(int dim, VecD center = {}, double half_width = 1.0) {
    return make(TestFnKind::box, dim, std::move(center), half_width, {});
  }
  static TestFunction triangle(int dim, VecD center = {}, double half_width = 1.0) {
    return make(TestFnKind::triangle, dim, std::move(center), half_width, {});
  }
  static TestFunction modulated_gaussian(int dim, VecD center, double scale, VecD freq) {
    return make(TestFnKind::modulated_gaussian, dim, std::move(center), scale, std::move(freq));
  }

  bool is_real() const { return kind != TestFnKind::modulated_gaussian; }

  double eval_real(const VecD& x) const {
    check_dim(x);
    switch (kind) {
      case TestFnKind::gaussian: {
        return std::exp(-kPi * r2(x) / (scale * scale));
      }
      case TestFnKind::box: {
        for (int i = 0; i < dimension; ++i)
          if (std::abs(x[i] - center[i]) > scale) return 0.0;
        return 1.0;
      }
      case TestFnKind::triangle: {
        double p = 1.0;
        for (int i = 0; i < dimension; ++i) {
          double t = 1.0 - std::abs(x[i] - center[i]) / scale;
          if (t <= 0.0) return 0.0;
          p *= t;
        }
        return p;
      }
      case TestFnKind::modulated_gaussian:
        throw std::logic_error("eval_real on a complex-valued test function");
    }
    return 0.0;
  }

  cplx eval(const VecD& x) const {
    if (kind == TestFnKind::modulated_gaussian) {
      check_dim(x);
      double g = std::exp(-kPi * r2(x) / (scale * scale));
      return g * std::polar(1.0, 2.0 * kPi * dot(frequency, x));
    }
    return cplx(eval_real(x), 0.0);
  }

  cplx integral() const {
    double s = scale;
    switch (kind) {
      case TestFnKind::gaussian: return cplx(std::pow(s, dimension), 0.0);
      case TestFnKind::box: return cplx(std::pow(2.0 * s, dimension), 0.0);
      case TestFnKind::triangle: return cplx(std::pow(s, dimension), 0.0);
      case TestFnKind::modulated_gaussian: {
        // int exp(-pi|x-c|^2/s^2) e^{2 pi i <f,x>} dx
        //   = s^d exp(-pi s^2 |f|^2) e^{2 pi i <f,c>}
        double f2 = dot(frequency, frequency);
        double mag = std::pow(s, dimension) * std::exp(-kPi * s * s * f2);
        return mag * std::polar(1.0, 2.0 * kPi * dot(frequency, center));
      }
    }
    return 0.0;
  }

  double integral_real() const {
    if (!is_real()) throw std::logic_error("integral_real on a complex-valued test function");
    return integral().real();
  }

  double l2_norm_sq() const {
    double s = scale;
    switch (kind) {
      case TestFnKind::gaussian:
      case TestFnKind::modulated_gaussian:
        return std::pow(s / std::sqrt(2.0), dimension);
      case TestFnKind::box:
        return std::pow(2.0 * s, dimension);
      case TestFnKind::triangle:
        return std::pow(2.0 * s / 3.0, dimension);
    }
    return 0.0;
  }

  bool compactly_supported() const {
    return kind == TestFnKind::box || kind == TestFnKind::triangle;
  }

  // Half-width of the support box around the center.  Gaussians are truncated
  // where the envelope drops below 1e-12.
  double support_half_width() const {
    switch (kind) {
      case TestFnKind::box:
      case TestFnKind::triangle:
        return scale;
      case TestFnKind::gaussian:
      case TestFnKind::modulated_gaussian:
        return scale * std::sqrt(12.0 * std::log(10.0) / kPi);  // e^{-pi r^2/s^2} < 1e-12
    }
    return 0.0;
  }

  void support_box(VecD& lo, VecD& hi) const {
    double r = support_half_width();
    lo.resize(dimension);
    hi.resize(dimension);
    for (int i = 0; i < dimension; ++i) {
      lo[i] = center[i] - r;
      hi[i] = center[i] + r;
    }
  }

 private:
  static TestFunction make(TestFnKind k, int dim, VecD center, double scale, VecD freq) {
    if (dim <= 0) throw std::invalid_argument("TestFunction: dimension must be positive");
    if (scale <= 0.0) throw std::invalid_argument("TestFunction: scale must be positive");
    if (center.empty()) center.assign(dim, 0.0);
    if (static_cast<int>(center.size()) != dim)
      throw std::invalid_argument("TestFunction: center dimension mismatch");
    if (k == TestFnKind::modulated_gaussian && static_cast<int>(freq.size()) != dim)
      throw std::invalid_argument("TestFunction: frequency dimension mismatch");
    TestFunction f;
    f.kind = k;
    f.dimension = dim;
    f.center = std::move(center);
    f.scale = scale;
    f.frequency = std::move(freq);
    return f;
  }

  void check_dim(const VecD& x) const {
    if (static_cast<int>(x.size()) != dimension)
      throw std::invalid_argument("TestFunction: argument dimension mismatch");
  }

  double r2(const VecD& x) const {
    double s = 0.0;
    for (int i = 0; i < dimension; ++i) {
      double d = x[i] - center[i];
      s += d * d;
    }
    return s;
  }
};

// ---------------------------------------------------------------------------
// Monte-Carlo statistics.
// ---------------------------------------------------------------------------
struct McStats {
  cplx mean{0.0, 0.0};
  double std_error = 0.0;   // sample sd / sqrt(n), n-1 denominator
  std::size_t n = 0;
};

inline McStats mc_stats(const std::vector<cplx>& xs) {
  if (xs.empty()) throw std::invalid_argument("mc_stats: empty sample");
  cplx sum(0.0, 0.0);
  for (const auto& x : xs) sum += x;
  cplx mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (const auto& x : xs) ss += std::norm(x - mean);
  McStats st;
  st.mean = mean;
  st.n = xs.size();
  st.std_error = xs.size() > 1
                     ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) /
                           std::sqrt(static_cast<double>(xs.size()))
                     : 0.0;
  return st;
}

inline McStats mc_stats(const std::vector<double>& xs) {
  std::vector<cplx> c(xs.begin(), xs.end());
  return mc_stats(c);
}

struct McReport {
  std::size_t n_samples = 0;
  cplx mean{0.0, 0.0};
  double std_error = 0.0;
  cplx reference{0.0, 0.0};
  double z = 0.0;
  bool pass = false;
  double second_moment = 0.0;      // mean |x|^2, logged only
  double tolerance_multiplier = 3.0;
};

inline McReport make_mc_report(const std::vector<cplx>& xs, cplx reference,
                               double tolerance_multiplier = 3.0) {
  McStats st = mc_stats(xs);
  McReport r;
  r.n_samples = st.n;
  r.mean = st.mean;
  r.std_error = st.std_error;
  r.reference = reference;
  double dev = std::abs(st.mean - reference);
  r.z = st.std_error > 0.0 ? dev / st.std_error : (dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  r.tolerance_multiplier = tolerance_multiplier;
  r.pass = dev <= tolerance_multiplier * st.std_error;
  double sm = 0.0;
  for (const auto& x : xs) sm += std::norm(x);
  r.second_moment = sm / static_cast<double>(xs.size());
  return r;
}

inline McReport make_mc_report(const std::vector<double>& xs, double reference,
                               double tolerance_multiplier = 3.0) {
  std::vector<cplx> c(xs.begin(), xs.end());
  return make_mc_report(c, cplx(reference, 0.0), tolerance_multiplier);
}

// ---------------------------------------------------------------------------
// Tensor midpoint quadrature over an axis box.
// ---------------------------------------------------------------------------
template <class F>
double quad_midpoint(const VecD& lo, const VecD& hi, int n_per_axis, F&& f) {
  const int d = static_cast<int>(lo.size());
  double cell = 1.0;
  for (int i = 0; i < d; ++i) cell *= (hi[i] - lo[i]) / n_per_axis;
  std::vector<int> idx(d, 0);
  VecD x(d);
  double sum = 0.0;
  while (true) {
    for (int i = 0; i < d; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * (idx[i] + 0.5) / n_per_axis;
    sum += f(x);
    int k = d - 1;
    while (k >= 0 && ++idx[k] == n_per_axis) idx[k--] = 0;
    if (k < 0) break;
  }
  return sum * cell;
}

template <class F>
cplx quad_midpoint_c(const VecD& lo, const VecD& hi, int n_per_axis, F&& f) {
  const int d = static_cast<int>(lo.size());
  double cell = 1.0;
  for (int i = 0; i < d; ++i) cell *= (hi[i] - lo[i]) / n_per_axis;
  std::vector<int> idx(d, 0);
  VecD x(d);
  double re = 0.0, im = 0.0;
  while (true) {
    for (int i = 0; i < d; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * (idx[i] + 0.5) / n_per_axis;
    cplx v = f(x);
    re += v.real();
    im += v.imag();
    int k = d - 1;
    while (k >= 0 && ++idx[k] == n_per_axis) idx[k--] = 0;
    if (k < 0) break;
  }
  return cplx(re * cell, im * cell);
}

}  // namespace aperiodic
