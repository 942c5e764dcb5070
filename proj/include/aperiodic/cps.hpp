#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aperiodic/linalg.hpp"
#include "aperiodic/numerics.hpp"

namespace aperiodic {

// Physical regions are half-open boxes [lo, hi); densities add under tiling.
// Windows are closed boxes: the arithmetic window conditions have the form
// |conjugate| <= c and include their boundary points.
struct Box {
  VecD lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains_half_open(const VecD& x) const {
    for (size_t i = 0; i < lo.size(); ++i)
      if (x[i] < lo[i] || x[i] >= hi[i]) return false;
    return true;
  }

  bool contains_closed(const VecD& x) const {
    for (size_t i = 0; i < lo.size(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }

  double volume() const {
    double v = 1.0;
    for (size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
  }
};

struct Window {
  std::vector<Box> boxes;  // finite union of closed axis boxes

  static Window box(VecD lo, VecD hi) {
    Window w;
    w.boxes.push_back(Box{std::move(lo), std::move(hi)});
    return w;
  }
  static Window empty(int dim) {
    Window w;
    (void)dim;
    return w;
  }

  bool is_empty() const { return boxes.empty(); }

  bool contains(const VecD& w) const {
    for (const auto& b : boxes)
      if (b.contains_closed(w)) return true;
    return false;
  }

  // Volume assuming the boxes are disjoint (the only windows built here).
  double volume() const {
    double v = 0.0;
    for (const auto& b : boxes) v += b.volume();
    return v;
  }

  // Bounding box of the union; used for the enumeration superset.
  Box bounding_box() const {
    if (boxes.empty()) throw std::logic_error("Window::bounding_box: empty window");
    Box bb = boxes[0];
    for (const auto& b : boxes)
      for (size_t i = 0; i < bb.lo.size(); ++i) {
        bb.lo[i] = std::min(bb.lo[i], b.lo[i]);
        bb.hi[i] = std::max(bb.hi[i], b.hi[i]);
      }
    return bb;
  }
};

struct PointSet {
  std::vector<VecD> points;  // sorted lexicographically
  Box region;
  double separation = 0.0;   // min pairwise gap; 0 for < 2 points

  size_t size() const { return points.size(); }
};

// A point of the hull X(S) = Gamma \ (R^d x R^m), stored as coordinates with
// respect to the lattice basis, in [0,1)^{d+m}.
struct HullPoint {
  VecD coefficients;
};

class CutProjectScheme {
 public:
  CutProjectScheme(int phys_dim, int internal_dim, Mat basis)
      : d_(phys_dim), m_(internal_dim), basis_(std::move(basis)) {
    if (basis_.rows() != d_ + m_ || basis_.cols() != d_ + m_)
      throw std::invalid_argument("CutProjectScheme: basis must be (d+m)x(d+m)");
    double det = basis_.det();
    if (det == 0.0 || !std::isfinite(det))
      throw std::invalid_argument("CutProjectScheme: basis not invertible");
    covolume_ = std::abs(det);
    basis_inv_ = basis_.inverse();
  }

  int phys_dim() const { return d_; }
  int internal_dim() const { return m_; }
  int total_dim() const { return d_ + m_; }
  const Mat& basis() const { return basis_; }
  const Mat& basis_inv() const { return basis_inv_; }
  double covolume() const { return covolume_; }

  // Gamma = {(a + b sqrt2, a - b sqrt2)}: the canonical arithmetic scheme,
  // covolume 2 sqrt2.
  static CutProjectScheme zsqrt2() {
    Mat b(2, 2);
    b(0, 0) = 1.0; b(0, 1) = std::sqrt(2.0);
    b(1, 0) = 1.0; b(1, 1) = -std::sqrt(2.0);
    return CutProjectScheme(1, 1, std::move(b));
  }

  // Z^d in R^d with trivial internal space.
  static CutProjectScheme integer_lattice(int d) {
    return CutProjectScheme(d, 0, Mat::identity(d));
  }

  // Z[sqrt2]^2 embedded diagonally in R^2 x R^2; rows are ordered
  // (x1, x2, x1*, x2*).  Covolume (2 sqrt2)^2 = 8.
  static CutProjectScheme zsqrt2_pair() {
    const double r = std::sqrt(2.0);
    Mat b(4, 4);
    // columns: a1, b1, a2, b2
    b(0, 0) = 1.0; b(0, 1) = r;
    b(2, 0) = 1.0; b(2, 1) = -r;
    b(1, 2) = 1.0; b(1, 3) = r;
    b(3, 2) = 1.0; b(3, 3) = -r;
    return CutProjectScheme(2, 2, std::move(b));
  }

 private:
  int d_, m_;
  Mat basis_;
  Mat basis_inv_;
  double covolume_ = 0.0;
};

namespace detail {

// Enumerates integer coefficient vectors n with B n inside [lo, hi]
// (closed, callers widen as needed).  The coefficient search box is the
// image of the corners under the basis inverse, inflated by one, which is a
// guaranteed superset; level-by-level interval pruning keeps the visit count
// near the true point count.  Throws if more than `cap` nodes are visited.
template <class F>
void enumerate_basis_coeffs(const Mat& B, const Mat& Binv, const VecD& lo, const VecD& hi,
                            std::uint64_t cap, F&& visit) {
  const int n = B.rows();
  // global coefficient bounds from corner images
  std::vector<long long> nlo(n, 0), nhi(n, 0);
  {
    std::vector<double> cmin(n, 0.0), cmax(n, 0.0);
    std::vector<int> corner(n, 0);
    bool first = true;
    while (true) {
      VecD z(n);
      for (int i = 0; i < n; ++i) z[i] = corner[i] ? hi[i] : lo[i];
      VecD c = Binv.mul(z);
      for (int i = 0; i < n; ++i) {
        if (first || c[i] < cmin[i]) cmin[i] = c[i];
        if (first || c[i] > cmax[i]) cmax[i] = c[i];
      }
      first = false;
      int k = n - 1;
      while (k >= 0 && ++corner[k] == 2) corner[k--] = 0;
      if (k < 0) break;
    }
    for (int i = 0; i < n; ++i) {
      nlo[i] = static_cast<long long>(std::floor(cmin[i])) - 1;
      nhi[i] = static_cast<long long>(std::ceil(cmax[i])) + 1;
    }
  }

  // residual row ranges for coefficients >= level k
  std::vector<std::vector<double>> rmin(n + 1, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> rmax(n + 1, std::vector<double>(n, 0.0));
  for (int k = n - 1; k >= 0; --k)
    for (int j = 0; j < n; ++j) {
      double a = B(j, k) * static_cast<double>(nlo[k]);
      double b = B(j, k) * static_cast<double>(nhi[k]);
      rmin[k][j] = rmin[k + 1][j] + std::min(a, b);
      rmax[k][j] = rmax[k + 1][j] + std::max(a, b);
    }

  std::vector<long long> coeff(n, 0);
  VecD partial(n, 0.0);
  std::uint64_t visited = 0;
  const double eps = 1e-9;

  std::function<void(int, VecD)> dfs = [&](int k, VecD sums) {
    if (++visited > cap)
      throw std::runtime_error("lattice enumeration exceeded the configured candidate cap");
    if (k == n) {
      visit(coeff, sums);
      return;
    }
    // tight bounds for coeff[k] from every row
    double b_lo = static_cast<double>(nlo[k]);
    double b_hi = static_cast<double>(nhi[k]);
    for (int j = 0; j < n; ++j) {
      double c = B(j, k);
      if (c == 0.0) continue;
      double room_lo = lo[j] - sums[j] - rmax[k + 1][j];
      double room_hi = hi[j] - sums[j] - rmin[k + 1][j];
      double t0 = room_lo / c, t1 = room_hi / c;
      if (t0 > t1) std::swap(t0, t1);
      b_lo = std::max(b_lo, t0);
      b_hi = std::min(b_hi, t1);
    }
    long long i0 = static_cast<long long>(std::ceil(b_lo - eps));
    long long i1 = static_cast<long long>(std::floor(b_hi + eps));
    for (long long i = i0; i <= i1; ++i) {
      coeff[k] = i;
      VecD next = sums;
      for (int j = 0; j < n; ++j) next[j] += B(j, k) * static_cast<double>(i);
      dfs(k + 1, std::move(next));
    }
  };
  dfs(0, VecD(n, 0.0));
}

inline bool lex_less(const VecD& a, const VecD& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

inline double min_pairwise_gap(const std::vector<VecD>& pts) {
  // lexicographic sort + window scan pruned by first-coordinate distance
  if (pts.size() < 2) return 0.0;
  std::vector<VecD> s = pts;
  std::sort(s.begin(), s.end(), lex_less);
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < s.size(); ++i) {
    for (size_t j = i + 1; j < s.size(); ++j) {
      double dx0 = s[j][0] - s[i][0];
      if (dx0 * dx0 >= best) break;
      double d2 = 0.0;
      for (size_t k = 0; k < s[i].size(); ++k) {
        double d = s[j][k] - s[i][k];
        d2 += d * d;
      }
      best = std::min(best, d2);
    }
  }
  return std::sqrt(best);
}

}  // namespace detail

inline constexpr std::uint64_t kDefaultEnumCap = 10'000'000;

// All lattice points gamma with pr1(gamma) in phys_region (half-open) and
// pr2(gamma) in window (closed).  Returns (phys, internal) pairs sorted by
// physical part.
inline std::vector<std::pair<VecD, VecD>> enumerate_gamma(const CutProjectScheme& s,
                                                          const Box& phys_region,
                                                          const Window& window,
                                                          std::uint64_t cap = kDefaultEnumCap) {
  std::vector<std::pair<VecD, VecD>> out;
  if (window.is_empty() && s.internal_dim() > 0) return out;
  const int d = s.phys_dim(), m = s.internal_dim();
  VecD lo(d + m), hi(d + m);
  Box wbb;
  if (m > 0) wbb = window.bounding_box();
  for (int i = 0; i < d; ++i) {
    lo[i] = phys_region.lo[i];
    hi[i] = phys_region.hi[i];
  }
  for (int i = 0; i < m; ++i) {
    lo[d + i] = wbb.lo[i];
    hi[d + i] = wbb.hi[i];
  }
  detail::enumerate_basis_coeffs(
      s.basis(), s.basis_inv(), lo, hi, cap,
      [&](const std::vector<long long>&, const VecD& z) {
        VecD phys(z.begin(), z.begin() + d);
        VecD internal(z.begin() + d, z.end());
        if (!phys_region.contains_half_open(phys)) return;
        if (m > 0 && !window.contains(internal)) return;
        out.emplace_back(std::move(phys), std::move(internal));
      });
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return detail::lex_less(a.first, b.first); });
  // pr1 must be injective on the truncation
  for (size_t i = 1; i < out.size(); ++i) {
    double dist = 0.0;
    for (int k = 0; k < d; ++k) dist = std::max(dist, std::abs(out[i].first[k] - out[i - 1].first[k]));
    if (dist < 1e-9)
      throw std::runtime_error("cut-and-project scheme: physical projection not injective on truncation");
  }
  return out;
}

inline PointSet make_point_set(std::vector<VecD> pts, Box region) {
  std::sort(pts.begin(), pts.end(), detail::lex_less);
  PointSet ps;
  ps.separation = detail::min_pairwise_gap(pts);
  ps.points = std::move(pts);
  ps.region = std::move(region);
  return ps;
}

// P = {gamma_1 + g1 : gamma_2 + g2 in W} intersected with the region
// (abelian translation convention).
inline PointSet cut_and_project(const CutProjectScheme& s, const Window& window, const VecD& g1,
                                const VecD& g2, const Box& region,
                                std::uint64_t cap = kDefaultEnumCap) {
  const int d = s.phys_dim(), m = s.internal_dim();
  if (static_cast<int>(g1.size()) != d || static_cast<int>(g2.size()) != m)
    throw std::invalid_argument("cut_and_project: translation dimension mismatch");
  // shift region/window to gamma coordinates
  Box phys = region;
  for (int i = 0; i < d; ++i) {
    phys.lo[i] -= g1[i];
    phys.hi[i] -= g1[i];
  }
  Window w = window;
  for (auto& b : w.boxes)
    for (int i = 0; i < m; ++i) {
      b.lo[i] -= g2[i];
      b.hi[i] -= g2[i];
    }
  std::vector<VecD> pts;
  for (auto& gp : enumerate_gamma(s, phys, w, cap)) {
    VecD p = gp.first;
    for (int i = 0; i < d; ++i) p[i] += g1[i];
    pts.push_back(std::move(p));
  }
  return make_point_set(std::move(pts), region);
}

// Exact Haar sampling on the torus Gamma \ (R^d x R^m): coefficients uniform
// on [0,1)^{d+m}.
inline HullPoint sample_hull(const CutProjectScheme& s, RngStream& stream) {
  return HullPoint{stream.uniform_vec(static_cast<size_t>(s.total_dim()))};
}

inline void hull_to_group(const CutProjectScheme& s, const HullPoint& h, VecD& g1, VecD& g2) {
  VecD z = s.basis().mul(h.coefficients);
  g1.assign(z.begin(), z.begin() + s.phys_dim());
  g2.assign(z.begin() + s.phys_dim(), z.end());
}

inline PointSet pointset_of_hull(const CutProjectScheme& s, const Window& window,
                                 const HullPoint& h, const Box& region,
                                 std::uint64_t cap = kDefaultEnumCap) {
  VecD g1, g2;
  hull_to_group(s, h, g1, g2);
  return cut_and_project(s, window, g1, g2, region, cap);
}

// g.x with g = (a1, a2) acting on the torus: coefficients shift by
// -B^{-1} (a1, a2) mod 1.
inline HullPoint hull_translate(const CutProjectScheme& s, const HullPoint& h, const VecD& a1,
                                const VecD& a2) {
  VecD z(s.total_dim(), 0.0);
  for (int i = 0; i < s.phys_dim(); ++i) z[i] = a1[i];
  for (int i = 0; i < s.internal_dim(); ++i) z[s.phys_dim() + i] = a2[i];
  VecD shift = s.basis_inv().mul(z);
  HullPoint out = h;
  for (int i = 0; i < s.total_dim(); ++i) {
    double c = out.coefficients[i] - shift[i];
    c -= std::floor(c);
    if (c >= 1.0) c = 0.0;  // guard against floor rounding
    out.coefficients[i] = c;
  }
  return out;
}

inline double density(const PointSet& ps) {
  double vol = ps.region.volume();
  if (!(vol > 0.0)) throw std::invalid_argument("density: degenerate region");
  return static_cast<double>(ps.points.size()) / vol;
}

struct MeyerReport {
  bool uniformly_discrete = false;
  double min_gap = 0.0;
  double difference_set_min_gap = 0.0;
  bool meyer = false;
};

// Min gap of P and of the truncated difference set P - P; the Meyer verdict
// requires both to clear r_test.
inline MeyerReport check_meyer(const PointSet& ps, double r_test) {
  MeyerReport r;
  r.min_gap = ps.separation;
  std::vector<VecD> diffs;
  const auto& pts = ps.points;
  diffs.reserve(pts.size() * pts.size());
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      VecD d(pts[i].size());
      for (size_t k = 0; k < d.size(); ++k) d[k] = pts[i][k] - pts[j][k];
      diffs.push_back(std::move(d));
    }
  // P - P is a set: collapse numerically equal differences before measuring
  std::sort(diffs.begin(), diffs.end(), detail::lex_less);
  std::vector<VecD> dedup;
  for (auto& d : diffs) {
    if (!dedup.empty()) {
      double dist = 0.0;
      for (size_t k = 0; k < d.size(); ++k) dist = std::max(dist, std::abs(d[k] - dedup.back()[k]));
      if (dist < 1e-9) continue;
    }
    dedup.push_back(std::move(d));
  }
  r.difference_set_min_gap = detail::min_pairwise_gap(dedup);
  r.uniformly_discrete = ps.points.size() < 2 || r.min_gap > r_test;
  r.meyer = r.uniformly_discrete &&
            (diffs.size() < 2 || r.difference_set_min_gap > r_test);
  return r;
}

// CSV export: header row, one point per row, 17 significant digits.
inline void write_pointset_csv(const PointSet& ps, std::ostream& os) {
  const int d = ps.region.dim();
  for (int i = 0; i < d; ++i) os << (i ? "," : "") << "x" << (i + 1);
  os << "\n";
  os.precision(17);
  for (const auto& p : ps.points) {
    for (int i = 0; i < d; ++i) {
      if (i) os << ",";
      os << p[i];
    }
    os << "\n";
  }
}

}  // namespace aperiodic
