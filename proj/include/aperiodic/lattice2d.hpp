#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "aperiodic/numerics.hpp"

namespace aperiodic {

// A unimodular planar lattice, stored as column basis vectors.
struct UnimodularLattice2 {
  // columns b1 = (a,c), b2 = (b,d); det = ad - bc = 1
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const { return a * d - b * c; }

  static UnimodularLattice2 integer_lattice() { return UnimodularLattice2{}; }
};

// Haar sample on SL_2(Z) \ SL_2(R):
// tau = x + iy rejection-sampled from the modular fundamental domain
// {|tau| >= 1, |Re tau| <= 1/2} with density ~ y^{-2}, plus a uniform
// rotation.  The lattice is (1/sqrt(y)) (Z (1,0) + Z (x,y)) rotated.
inline UnimodularLattice2 sample_unimodular_lattice(RngStream& stream, int max_tries = 10000) {
  const double y0 = std::sqrt(3.0) / 2.0;
  double x = 0.0, y = 0.0;
  bool ok = false;
  for (int k = 0; k < max_tries; ++k) {
    x = stream.uniform(-0.5, 0.5);
    // y ~ y^{-2} on [y0, inf): inverse CDF
    y = y0 / (1.0 - stream.uniform());
    if (x * x + y * y >= 1.0) {
      ok = true;
      break;
    }
  }
  if (!ok) throw std::runtime_error("sample_unimodular_lattice: rejection cap exceeded");
  double theta = stream.uniform(0.0, 2.0 * kPi);
  double ct = std::cos(theta), st = std::sin(theta);
  double s = 1.0 / std::sqrt(y);
  // unrotated columns: (s, 0), (s x, s y)
  UnimodularLattice2 L;
  L.a = ct * s;
  L.c = st * s;
  L.b = ct * s * x - st * s * y;
  L.d = st * s * x + ct * s * y;
  return L;
}

// Nonzero lattice vectors of norm <= R, enumerated through the integer
// coefficient box obtained from the inverse-basis row norms.
inline std::vector<std::array<double, 2>> lattice_points(const UnimodularLattice2& L, double R,
                                                         std::uint64_t cap = 50'000'000) {
  std::vector<std::array<double, 2>> out;
  if (R < 0.0) throw std::invalid_argument("lattice_points: negative radius");
  // inverse of [[a,b],[c,d]] with det 1: [[d,-b],[-c,a]]
  double det = L.det();
  double i00 = L.d / det, i01 = -L.b / det, i10 = -L.c / det, i11 = L.a / det;
  long long n1max = static_cast<long long>(std::floor(std::sqrt(i00 * i00 + i01 * i01) * R)) + 1;
  long long n2max = static_cast<long long>(std::floor(std::sqrt(i10 * i10 + i11 * i11) * R)) + 1;
  std::uint64_t visits = (2 * static_cast<std::uint64_t>(n1max) + 1) * (2 * static_cast<std::uint64_t>(n2max) + 1);
  if (visits > cap) throw std::runtime_error("lattice_points: enumeration cap exceeded");
  const double R2 = R * R;
  for (long long n1 = -n1max; n1 <= n1max; ++n1)
    for (long long n2 = -n2max; n2 <= n2max; ++n2) {
      if (n1 == 0 && n2 == 0) continue;
      double px = L.a * n1 + L.b * n2;
      double py = L.c * n1 + L.d * n2;
      if (px * px + py * py <= R2) out.push_back({px, py});
    }
  return out;
}

// Visible (primitive) points: gcd of the integer coefficients is 1.
inline std::vector<std::array<double, 2>> visible_points(const UnimodularLattice2& L, double R,
                                                         std::uint64_t cap = 50'000'000) {
  std::vector<std::array<double, 2>> out;
  double det = L.det();
  double i00 = L.d / det, i01 = -L.b / det, i10 = -L.c / det, i11 = L.a / det;
  long long n1max = static_cast<long long>(std::floor(std::sqrt(i00 * i00 + i01 * i01) * R)) + 1;
  long long n2max = static_cast<long long>(std::floor(std::sqrt(i10 * i10 + i11 * i11) * R)) + 1;
  std::uint64_t visits = (2 * static_cast<std::uint64_t>(n1max) + 1) * (2 * static_cast<std::uint64_t>(n2max) + 1);
  if (visits > cap) throw std::runtime_error("visible_points: enumeration cap exceeded");
  const double R2 = R * R;
  for (long long n1 = -n1max; n1 <= n1max; ++n1)
    for (long long n2 = -n2max; n2 <= n2max; ++n2) {
      if (n1 == 0 && n2 == 0) continue;
      if (std::gcd(std::llabs(n1), std::llabs(n2)) != 1) continue;
      double px = L.a * n1 + L.b * n2;
      double py = L.c * n1 + L.d * n2;
      if (px * px + py * py <= R2) out.push_back({px, py});
    }
  return out;
}

enum class ClassicalSiegelMode { all_points, visible };

inline constexpr double kVisibleDensity = 0.60792710185402662866;  // 6/pi^2

// Classical Siegel mean value over random unimodular planar lattices:
//   E sum_{x in L \ 0} f(x) = int f       (all points)
//   E sum_{x visible}  f(x) = (6/pi^2) int f.
inline McReport mc_classical_siegel(const TestFunction& f, ClassicalSiegelMode mode,
                                    std::size_t n_samples, std::uint64_t seed,
                                    double z_mult = 3.0) {
  if (f.dimension != 2) throw std::invalid_argument("mc_classical_siegel: f must be planar");
  double R = f.support_half_width() + norm2(f.center);
  if (R > 10.0) throw std::invalid_argument("mc_classical_siegel: truncation radius exceeds 10");
  std::vector<double> samples;
  samples.reserve(n_samples);
  VecD arg(2);
  for (std::size_t i = 0; i < n_samples; ++i) {
    RngStream stream(seed, i);
    UnimodularLattice2 L = sample_unimodular_lattice(stream);
    auto pts = mode == ClassicalSiegelMode::all_points ? lattice_points(L, R)
                                                       : visible_points(L, R);
    double s = 0.0;
    for (const auto& p : pts) {
      arg[0] = p[0];
      arg[1] = p[1];
      s += f.eval_real(arg);
    }
    samples.push_back(s);
  }
  double constant = mode == ClassicalSiegelMode::all_points ? 1.0 : kVisibleDensity;
  return make_mc_report(samples, constant * f.integral_real(), z_mult);
}

}  // namespace aperiodic
