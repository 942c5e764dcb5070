#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "aperiodic/cps.hpp"
#include "aperiodic/numerics.hpp"

namespace aperiodic {

// ---------------------------------------------------------------------------
// epsilon-duals: frequencies xi with sup_{d in Delta} |xi(d) - 1| <= eps.
// Exact duals of infinite sets are out of reach; everything here is relative
// to a truncated point list and the truncation radius travels with results.
// ---------------------------------------------------------------------------
inline double character_defect(double freq, const std::vector<double>& pts) {
  double worst = 0.0;
  for (double x : pts) {
    double t = freq * x;
    t -= std::round(t);
    worst = std::max(worst, 2.0 * std::abs(std::sin(kPi * t)));
  }
  return worst;
}

inline double character_defect(const VecD& freq, const std::vector<VecD>& pts) {
  double worst = 0.0;
  for (const auto& x : pts) {
    double t = dot(freq, x);
    t -= std::round(t);
    worst = std::max(worst, 2.0 * std::abs(std::sin(kPi * t)));
  }
  return worst;
}

struct EpsDualEntry {
  double freq = 0.0;
  double defect = 0.0;
};

// Candidate generation from the dual lattice of a rank-2 scheme (d = m = 1):
// first coordinates of dual vectors whose internal part is small.  For
// cut-and-project inputs these are exactly the frequencies that can have a
// small defect.
inline std::vector<double> dual_frequency_candidates(const CutProjectScheme& s, double freq_bound,
                                                     double conj_bound) {
  if (s.phys_dim() != 1 || s.internal_dim() != 1)
    throw std::invalid_argument("dual_frequency_candidates: need a 1+1 dimensional scheme");
  // dual basis = B^{-T}
  Mat dual(2, 2);
  const Mat& binv = s.basis_inv();
  dual(0, 0) = binv(0, 0);
  dual(0, 1) = binv(1, 0);
  dual(1, 0) = binv(0, 1);
  dual(1, 1) = binv(1, 1);
  VecD lo{-freq_bound, -conj_bound}, hi{freq_bound, conj_bound};
  std::vector<double> out;
  detail::enumerate_basis_coeffs(dual, dual.inverse(), lo, hi, kDefaultEnumCap,
                                 [&](const std::vector<long long>&, const VecD& z) {
                                   if (std::abs(z[0]) <= freq_bound && std::abs(z[1]) <= conj_bound)
                                     out.push_back(z[0]);
                                 });
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<double> grid_frequency_candidates(double lo, double hi, double spacing = 1.0 / 256.0) {
  std::vector<double> out;
  for (double x = lo; x <= hi + 1e-12; x += spacing) out.push_back(x);
  return out;
}

namespace detail {

// golden-section refinement of the defect around a candidate
inline double polish_frequency(double cand, double half_width, const std::vector<double>& pts) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = cand - half_width, b = cand + half_width;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = character_defect(c, pts), fd = character_defect(d, pts);
  for (int it = 0; it < 60; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = character_defect(c, pts);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = character_defect(d, pts);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// Candidates whose defect over the truncated point list is <= eps, sorted by
// defect.  Candidates are polished by golden-section minimization first.
inline std::vector<EpsDualEntry> epsilon_dual(const std::vector<double>& lambda_points, double eps,
                                              const std::vector<double>& candidates,
                                              bool polish = true, double polish_half_width = 2e-3) {
  std::vector<EpsDualEntry> found;
  for (double cand : candidates) {
    double f = cand;
    if (polish) f = detail::polish_frequency(cand, polish_half_width, lambda_points);
    double d = character_defect(f, lambda_points);
    if (d <= eps) found.push_back(EpsDualEntry{f, d});
  }
  std::sort(found.begin(), found.end(),
            [](const EpsDualEntry& a, const EpsDualEntry& b) { return a.freq < b.freq; });
  // merge duplicates from overlapping candidates
  std::vector<EpsDualEntry> dedup;
  for (const auto& e : found) {
    if (!dedup.empty() && std::abs(e.freq - dedup.back().freq) < 1e-7) {
      if (e.defect < dedup.back().defect) dedup.back() = e;
      continue;
    }
    dedup.push_back(e);
  }
  std::sort(dedup.begin(), dedup.end(),
            [](const EpsDualEntry& a, const EpsDualEntry& b) { return a.defect < b.defect; });
  return dedup;
}

struct RelativeDensityResult {
  bool ok = false;
  double max_gap = 0.0;
};

// Max nearest-neighbor gap of the frequencies inside [lo, hi], counting the
// distance from the window edges to the nearest frequency.
inline RelativeDensityResult check_relative_density(std::vector<double> freqs, double lo, double hi,
                                                    double gap_bound) {
  std::sort(freqs.begin(), freqs.end());
  std::vector<double> in;
  for (double f : freqs)
    if (f >= lo && f <= hi) in.push_back(f);
  RelativeDensityResult r;
  if (in.empty()) {
    r.max_gap = hi - lo;
    r.ok = r.max_gap <= gap_bound;
    return r;
  }
  double g = std::max(in.front() - lo, hi - in.back());
  for (size_t i = 1; i < in.size(); ++i) g = std::max(g, in[i] - in[i - 1]);
  r.max_gap = g;
  r.ok = g <= gap_bound;
  return r;
}

// ---------------------------------------------------------------------------
// Borel sections and approximate eigenfunctions.
//
// A hull sample y in Y is represented by the list of points of P cap H in
// H-coordinates, enumerated within a truncation radius.  The section s(y) is
// the minimal-norm element; translating y by h in H shifts the list by h.
// ---------------------------------------------------------------------------
namespace detail {

inline bool section_prefer(const VecD& a, const VecD& b) {
  // true if a is preferred over b: smaller norm, ties broken toward the
  // lexicographically greater vector (positive first nonzero coordinate)
  double na = 0.0, nb = 0.0;
  for (double x : a) na += x * x;
  for (double x : b) nb += x * x;
  if (std::abs(na - nb) > 1e-12) return na < nb;
  return lex_less(b, a);
}

}  // namespace detail

// s(h^{-1}.y) for the sample with P cap H = `points`: minimal-norm element of
// points + shift.  Returns nullopt when the shifted list has no element
// within `radius` (a truncation artifact, not a property of Y).
inline std::optional<VecD> build_section(const std::vector<VecD>& points, const VecD& shift,
                                         double radius = std::numeric_limits<double>::infinity()) {
  std::optional<VecD> best;
  VecD cand(shift.size());
  for (const auto& p : points) {
    for (size_t i = 0; i < shift.size(); ++i) cand[i] = p[i] + shift[i];
    double n2 = 0.0;
    for (double x : cand) n2 += x * x;
    if (n2 > radius * radius) continue;
    if (!best || detail::section_prefer(cand, *best)) best = cand;
  }
  return best;
}

// phi_xi(y) = conj(xi(s(y))) with xi(h) = e^{2 pi i <freq, h>}.
inline cplx approx_eigenfunction(const VecD& freq, const std::vector<VecD>& points,
                                 const VecD& shift, double radius = std::numeric_limits<double>::infinity()) {
  auto s = build_section(points, shift, radius);
  if (!s) throw std::runtime_error("approx_eigenfunction: sample left the truncated cross section");
  return std::polar(1.0, -2.0 * kPi * dot(freq, *s));
}

struct FolnerResult {
  cplx value{0.0, 0.0};
  double excluded_fraction = 0.0;
};

// psi^{(n)}(y) = |F|^{-1} int_F conj(xi(h)) phi_xi(h^{-1}.y) dh by the tensor
// midpoint rule on the centered box F of the given half-width.  The sample
// h^{-1}.y carries the point list P cap H shifted by -h, so the integrand is
// conj(xi(h)) conj(xi(s(points - h))) = e^{-2 pi i <freq, p>} for the base
// point p of the chosen section element: the h-phases cancel and the average
// stays within the character defect of phi_xi(y).
inline FolnerResult folner_average(const VecD& freq, const std::vector<VecD>& points,
                                   double folner_half_width, int grid_per_axis,
                                   double section_radius) {
  if (grid_per_axis < 8) throw std::invalid_argument("folner_average: grid must be >= 8");
  const int d = static_cast<int>(freq.size());
  std::vector<int> idx(d, 0);
  VecD h(d), minus_h(d);
  cplx sum(0.0, 0.0);
  std::size_t total = 0, excluded = 0;
  while (true) {
    for (int i = 0; i < d; ++i) {
      h[i] = -folner_half_width + 2.0 * folner_half_width * (idx[i] + 0.5) / grid_per_axis;
      minus_h[i] = -h[i];
    }
    ++total;
    auto s = build_section(points, minus_h, section_radius);
    if (!s) {
      ++excluded;
    } else {
      sum += std::polar(1.0, -2.0 * kPi * (dot(freq, h) + dot(freq, *s)));
    }
    int k = d - 1;
    while (k >= 0 && ++idx[k] == grid_per_axis) idx[k--] = 0;
    if (k < 0) break;
  }
  FolnerResult r;
  r.excluded_fraction = static_cast<double>(excluded) / static_cast<double>(total);
  if (excluded < total) sum /= static_cast<double>(total - excluded);
  r.value = sum;
  return r;
}

}  // namespace aperiodic
