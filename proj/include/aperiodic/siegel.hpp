#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "aperiodic/cps.hpp"
#include "aperiodic/heisenberg.hpp"
#include "aperiodic/numerics.hpp"

namespace aperiodic {

inline PointSet thin_bernoulli(const PointSet& ps, double p, RngStream& stream);

// ---------------------------------------------------------------------------
// Group elements as flat coordinate vectors.  Heisenberg coordinates are
// (u_1..u_n, t, v_1..v_n).
// ---------------------------------------------------------------------------
struct GroupOps {
  enum class Kind { abelian, heisenberg };
  Kind kind = Kind::abelian;
  int dim = 1;
  int heis_n = 0;  // dim == 2*heis_n + 1 when heisenberg

  static GroupOps abelian(int dim) { return GroupOps{Kind::abelian, dim, 0}; }
  static GroupOps heisenberg(int n) { return GroupOps{Kind::heisenberg, 2 * n + 1, n}; }

  VecD id() const { return VecD(dim, 0.0); }

  VecD mul(const VecD& a, const VecD& b) const {
    if (kind == Kind::abelian) {
      VecD c(dim);
      for (int i = 0; i < dim; ++i) c[i] = a[i] + b[i];
      return c;
    }
    HeisPoint pa = unpack(a), pb = unpack(b);
    return pack(heis_mul(pa, pb));
  }

  VecD inv(const VecD& a) const {
    VecD c(dim);
    for (int i = 0; i < dim; ++i) c[i] = -a[i];
    return c;  // same formula in both groups
  }

  HeisPoint unpack(const VecD& a) const {
    HeisPoint p;
    p.u.assign(a.begin(), a.begin() + heis_n);
    p.t = a[heis_n];
    p.v.assign(a.begin() + heis_n + 1, a.end());
    return p;
  }
  VecD pack(const HeisPoint& p) const {
    VecD a(dim);
    for (int i = 0; i < heis_n; ++i) a[i] = p.u[i];
    a[heis_n] = p.t;
    for (int i = 0; i < heis_n; ++i) a[heis_n + 1 + i] = p.v[i];
    return a;
  }
};

// ---------------------------------------------------------------------------
// Transversal data for a coordinate subgroup H < G: the projection
// pi: G -> H\G, the section s with pi(s(q)) = q, and the H-part h(g)
// defined by g = h(g) s(pi(g)).
// ---------------------------------------------------------------------------
struct TransversalSpec {
  std::string name;
  GroupOps group;
  std::vector<int> h_coords;  // coordinates spanning H
  std::vector<int> q_coords;  // complementary coordinates: the H\G chart

  static TransversalSpec trivial(int dim) {
    TransversalSpec t;
    t.name = "trivial";
    t.group = GroupOps::abelian(dim);
    t.q_coords.resize(dim);
    for (int i = 0; i < dim; ++i) t.q_coords[i] = i;
    return t;
  }

  static TransversalSpec abelian_axis(int dim, std::vector<int> h) {
    TransversalSpec t;
    t.name = "abelian-axis";
    t.group = GroupOps::abelian(dim);
    t.h_coords = std::move(h);
    std::sort(t.h_coords.begin(), t.h_coords.end());
    for (int i = 0; i < dim; ++i)
      if (!std::binary_search(t.h_coords.begin(), t.h_coords.end(), i)) t.q_coords.push_back(i);
    return t;
  }

  // H = U x Z in the Heisenberg group; pi(u,t,v) = v.
  static TransversalSpec heisenberg_uz(int n) {
    TransversalSpec t;
    t.name = "heisenberg-uz";
    t.group = GroupOps::heisenberg(n);
    for (int i = 0; i <= n; ++i) t.h_coords.push_back(i);
    for (int i = n + 1; i <= 2 * n; ++i) t.q_coords.push_back(i);
    return t;
  }

  int q_dim() const { return static_cast<int>(q_coords.size()); }

  VecD project(const VecD& g) const {
    VecD q(q_coords.size());
    for (size_t i = 0; i < q_coords.size(); ++i) q[i] = g[q_coords[i]];
    return q;
  }

  VecD section(const VecD& q) const {
    VecD g(group.dim, 0.0);
    for (size_t i = 0; i < q_coords.size(); ++i) g[q_coords[i]] = q[i];
    return g;
  }

  VecD h_part(const VecD& g) const {
    return group.mul(g, group.inv(section(project(g))));
  }

  bool in_H(const VecD& g, double tol = 1e-9) const {
    for (int qc : q_coords)
      if (std::abs(g[qc]) > tol) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Hitting sets and the Siegel-Radon transform.
// ---------------------------------------------------------------------------
struct HittingSet {
  std::vector<VecD> cosets;        // sorted lexicographically, duplicates collapsed
  std::vector<int> multiplicity;   // points of P per coset (logged)
  int total_points = 0;
};

inline HittingSet hitting_set(const PointSet& ps, const TransversalSpec& T,
                              const Box& window_region, double tol = 1e-9) {
  std::vector<VecD> qs;
  qs.reserve(ps.points.size());
  for (const auto& p : ps.points) {
    VecD q = T.project(p);
    if (window_region.contains_half_open(q)) qs.push_back(std::move(q));
  }
  std::sort(qs.begin(), qs.end(), detail::lex_less);
  HittingSet hs;
  for (auto& q : qs) {
    if (!hs.cosets.empty()) {
      double dist = 0.0;
      for (size_t k = 0; k < q.size(); ++k)
        dist = std::max(dist, std::abs(q[k] - hs.cosets.back()[k]));
      if (dist < tol) {
        ++hs.multiplicity.back();
        ++hs.total_points;
        continue;
      }
    }
    hs.cosets.push_back(std::move(q));
    hs.multiplicity.push_back(1);
    ++hs.total_points;
  }
  return hs;
}

namespace detail {

inline Box q_region(const PointSet& ps, const TransversalSpec& T) {
  Box q;
  for (int qc : T.q_coords) {
    q.lo.push_back(ps.region.lo[qc]);
    q.hi.push_back(ps.region.hi[qc]);
  }
  return q;
}

inline void check_covered(const TestFunction& f, const Box& q_region) {
  VecD lo, hi;
  f.support_box(lo, hi);
  for (int i = 0; i < f.dimension; ++i)
    if (lo[i] < q_region.lo[i] || hi[i] > q_region.hi[i])
      throw std::runtime_error("siegel_transform: support of f not covered by the point set region");
}

}  // namespace detail

// Sf(P) = sum over the hitting set pi(P) of f, duplicates collapsed.
inline double siegel_transform(const TestFunction& f, const PointSet& ps,
                               const TransversalSpec& T) {
  Box qreg = detail::q_region(ps, T);
  detail::check_covered(f, qreg);
  HittingSet hs = hitting_set(ps, T, qreg);
  double sum = 0.0;
  for (const auto& q : hs.cosets) sum += f.eval_real(q);
  return sum;
}

// Twisted transform in the section model: sum over s(Y_x) of f(Hg) psi(g.x).
// The hull context supplies psi at the translated hull point of each coset.
inline cplx twisted_siegel_transform(const TestFunction& f, const PointSet& ps,
                                     const TransversalSpec& T,
                                     const std::function<cplx(const VecD&)>& psi_at_coset) {
  Box qreg = detail::q_region(ps, T);
  detail::check_covered(f, qreg);
  HittingSet hs = hitting_set(ps, T, qreg);
  double re = 0.0, im = 0.0;
  for (const auto& q : hs.cosets) {
    cplx fv = f.eval(q);
    cplx pv = psi_at_coset(q);
    re += fv.real() * pv.real() - fv.imag() * pv.imag();
    im += fv.real() * pv.imag() + fv.imag() * pv.real();
  }
  return cplx(re, im);
}

// ---------------------------------------------------------------------------
// Siegel constants.
//
// All constants are for the invariant *probability* measure on the hull.
// trivial H:      sigma(Y) = vol(W) / covol(Gamma)
// lattice:        sigma(Y) = 1 / covol(Gamma)
// compatible pair sigma(Y) = vol(pi_2(W)) / covol(pr(Gamma)), where pr is the
//                 projection onto the quotient coordinates and
//                 covol(pr(Gamma)) = covol(Gamma) / covol(Delta),
//                 Delta = Gamma cap (H_1 x H_2).
// ---------------------------------------------------------------------------
inline double siegel_constant_trivial(const CutProjectScheme& s, const Window& w) {
  if (s.internal_dim() == 0) return 1.0 / s.covolume();  // no window selects
  return (w.is_empty() ? 0.0 : w.volume()) / s.covolume();
}

inline double siegel_constant_lattice(const CutProjectScheme& s) { return 1.0 / s.covolume(); }

struct CompatiblePair {
  std::vector<int> h1_phys_coords;      // coordinates of H_1 inside G_1
  std::vector<int> h2_internal_coords;  // coordinates of H_2 inside G_2
};

inline double delta_covolume(const CutProjectScheme& s, const CompatiblePair& pair) {
  const int d = s.phys_dim();
  std::vector<int> h_rows;
  for (int c : pair.h1_phys_coords) h_rows.push_back(c);
  for (int c : pair.h2_internal_coords) h_rows.push_back(d + c);
  std::sort(h_rows.begin(), h_rows.end());
  // columns supported only on the H rows span Delta (basis must be adapted)
  std::vector<int> cols;
  for (int j = 0; j < s.total_dim(); ++j) {
    bool in_h = true;
    for (int i = 0; i < s.total_dim(); ++i) {
      if (std::binary_search(h_rows.begin(), h_rows.end(), i)) continue;
      if (std::abs(s.basis()(i, j)) > 1e-12) {
        in_h = false;
        break;
      }
    }
    if (in_h) cols.push_back(j);
  }
  if (cols.size() != h_rows.size())
    throw std::runtime_error("siegel_constant: basis is not adapted to the compatible pair");
  Mat sub(static_cast<int>(h_rows.size()), static_cast<int>(cols.size()));
  for (size_t i = 0; i < h_rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) sub(static_cast<int>(i), static_cast<int>(j)) = s.basis()(h_rows[i], cols[j]);
  return std::abs(sub.det());
}

inline double siegel_constant_compatible_pair(const CutProjectScheme& s, const Window& w,
                                              const CompatiblePair& pair) {
  if (w.is_empty()) return 0.0;
  if (w.boxes.size() != 1)
    throw std::invalid_argument("siegel_constant: compatible-pair mode needs a single-box window");
  // vol(pi_2(W)): extents over the internal coordinates not in H_2
  double vol = 1.0;
  for (int i = 0; i < s.internal_dim(); ++i) {
    if (std::find(pair.h2_internal_coords.begin(), pair.h2_internal_coords.end(), i) !=
        pair.h2_internal_coords.end())
      continue;
    vol *= w.boxes[0].hi[i] - w.boxes[0].lo[i];
  }
  double quotient_covol = s.covolume() / delta_covolume(s, pair);
  return vol / quotient_covol;
}

// ---------------------------------------------------------------------------
// Monte-Carlo Siegel formula (trivial H): mean of Sf over Haar hull samples
// against sigma(Y) * integral(f).
// ---------------------------------------------------------------------------
struct SiegelMcResult {
  McReport report;
  double sigma_y = 0.0;
};

inline SiegelMcResult mc_siegel_formula(const CutProjectScheme& s, const Window& w,
                                        const TestFunction& f, std::size_t n_samples,
                                        std::uint64_t seed, double thin_p = 1.0,
                                        double z_mult = 3.0) {
  if (n_samples < 100) throw std::invalid_argument("mc_siegel_formula: need at least 100 samples");
  if (f.dimension != s.phys_dim())
    throw std::invalid_argument("mc_siegel_formula: test function dimension mismatch");
  VecD lo, hi;
  f.support_box(lo, hi);
  Box region{lo, hi};
  for (int i = 0; i < f.dimension; ++i) {
    region.lo[i] -= 0.25;
    region.hi[i] += 0.25;
  }
  TransversalSpec T = TransversalSpec::trivial(s.phys_dim());
  std::vector<double> samples;
  samples.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    RngStream hull_stream(seed, 2 * i);
    HullPoint h = sample_hull(s, hull_stream);
    PointSet ps = pointset_of_hull(s, w, h, region);
    if (thin_p < 1.0) {
      RngStream thin_stream(seed, 2 * i + 1);
      ps = thin_bernoulli(ps, thin_p, thin_stream);
    }
    samples.push_back(siegel_transform(f, ps, T));
  }
  SiegelMcResult out;
  out.sigma_y = siegel_constant_trivial(s, w);
  double ref = thin_p * out.sigma_y * f.integral_real();
  out.report = make_mc_report(samples, ref, z_mult);
  return out;
}

// Mean hitting count |Y_x cap B| against sigma(Y) * vol(B).  For a
// nontrivial transversal the point set is enumerated over fiber_half_width
// in the H directions, which must exceed the covering radius of the fibers.
inline SiegelMcResult mc_hull_intensity(const CutProjectScheme& s, const Window& w,
                                        const TransversalSpec& T, const Box& count_box,
                                        double fiber_half_width, double sigma_y,
                                        std::size_t n_samples, std::uint64_t seed,
                                        double thin_p = 1.0, double z_mult = 3.0) {
  Box region;
  region.lo.resize(s.phys_dim());
  region.hi.resize(s.phys_dim());
  for (size_t i = 0; i < T.q_coords.size(); ++i) {
    region.lo[T.q_coords[i]] = count_box.lo[i];
    region.hi[T.q_coords[i]] = count_box.hi[i];
  }
  for (int hc : T.h_coords) {
    region.lo[hc] = -fiber_half_width;
    region.hi[hc] = fiber_half_width;
  }
  std::vector<double> samples;
  samples.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    RngStream hull_stream(seed, 2 * i);
    HullPoint h = sample_hull(s, hull_stream);
    PointSet ps = pointset_of_hull(s, w, h, region);
    if (thin_p < 1.0) {
      RngStream thin_stream(seed, 2 * i + 1);
      ps = thin_bernoulli(ps, thin_p, thin_stream);
    }
    HittingSet hs = hitting_set(ps, T, count_box);
    samples.push_back(static_cast<double>(hs.cosets.size()));
  }
  SiegelMcResult out;
  out.sigma_y = sigma_y;
  out.report = make_mc_report(samples, thin_p * sigma_y * count_box.volume(), z_mult);
  return out;
}

// ---------------------------------------------------------------------------
// Dual transform (trivial H): S*phi(g) = (1/covol) int_W phi(Gamma(g,w)) dw
// by midpoint quadrature on the window.
// ---------------------------------------------------------------------------
inline cplx dual_transform(const std::function<cplx(const HullPoint&)>& phi, const VecD& g,
                           const CutProjectScheme& s, const Window& w, int grid_per_axis) {
  if (grid_per_axis < 16) throw std::invalid_argument("dual_transform: grid must be >= 16");
  if (w.is_empty()) return cplx(0.0, 0.0);
  cplx total(0.0, 0.0);
  const int d = s.phys_dim(), m = s.internal_dim();
  for (const auto& b : w.boxes) {
    total += quad_midpoint_c(b.lo, b.hi, grid_per_axis, [&](const VecD& wv) -> cplx {
      VecD z(d + m);
      for (int i = 0; i < d; ++i) z[i] = g[i];
      for (int i = 0; i < m; ++i) z[d + i] = wv[i];
      VecD c = s.basis_inv().mul(z);
      for (auto& x : c) {
        x -= std::floor(x);
        if (x >= 1.0) x = 0.0;
      }
      return phi(HullPoint{std::move(c)});
    });
  }
  return total / s.covolume();
}

// <Sf, phi>_X by Monte Carlo against <f, S*phi>_{H\G} by quadrature.
struct DualityResult {
  McReport lhs;
  cplx rhs{0.0, 0.0};
  bool pass = false;
};

inline DualityResult mc_siegel_duality(const CutProjectScheme& s, const Window& w,
                                       const TestFunction& f,
                                       const std::function<cplx(const HullPoint&)>& phi,
                                       std::size_t n_samples, std::uint64_t seed,
                                       int grid_per_axis = 128, double quad_slack = 1e-3,
                                       double z_mult = 3.0) {
  if (n_samples < 100) throw std::invalid_argument("mc_siegel_duality: need at least 100 samples");
  VecD lo, hi;
  f.support_box(lo, hi);
  Box region{lo, hi};
  for (int i = 0; i < f.dimension; ++i) {
    region.lo[i] -= 0.25;
    region.hi[i] += 0.25;
  }
  TransversalSpec T = TransversalSpec::trivial(s.phys_dim());
  std::vector<cplx> samples;
  samples.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    RngStream hull_stream(seed, 2 * i);
    HullPoint h = sample_hull(s, hull_stream);
    PointSet ps = pointset_of_hull(s, w, h, region);
    double sf = siegel_transform(f, ps, T);
    samples.push_back(sf * std::conj(phi(h)));
  }
  // rhs = int f(g) conj(S*phi(g)) dg over the support of f
  VecD flo, fhi;
  f.support_box(flo, fhi);
  cplx rhs = quad_midpoint_c(flo, fhi, grid_per_axis, [&](const VecD& g) -> cplx {
    return f.eval(g) * std::conj(dual_transform(phi, g, s, w, grid_per_axis));
  });
  DualityResult out;
  out.lhs = make_mc_report(samples, rhs, z_mult);
  out.rhs = rhs;
  out.pass = std::abs(out.lhs.mean - rhs) <= z_mult * out.lhs.std_error + quad_slack;
  return out;
}

// ---------------------------------------------------------------------------
// |pi(A) cap pi(B)| <= |A^{-1}A cap BC| for finite instances.
// ---------------------------------------------------------------------------
struct AbcResult {
  std::size_t lhs = 0;
  std::size_t rhs = 0;
  bool holds = false;
  bool covering_verified = false;  // every matched coset has a b a^{-1} factorization over (A cap H) C
};

namespace detail {

struct VecKey {
  std::vector<long long> k;
  bool operator<(const VecKey& o) const { return k < o.k; }
  bool operator==(const VecKey& o) const { return k == o.k; }
};

inline VecKey quantize(const VecD& x, double grid = 1e-6) {
  VecKey key;
  key.k.resize(x.size());
  for (size_t i = 0; i < x.size(); ++i) key.k[i] = llround(x[i] / grid);
  return key;
}

}  // namespace detail

inline AbcResult abc_bound(const std::vector<VecD>& A, const std::vector<VecD>& B,
                           const std::vector<VecD>& C, const TransversalSpec& T) {
  for (const auto& c : C)
    if (!T.in_H(c)) throw std::invalid_argument("abc_bound: C must be contained in H");

  std::set<detail::VecKey> piA, piB, piAB;
  for (const auto& a : A) piA.insert(detail::quantize(T.project(a)));
  for (const auto& b : B) piB.insert(detail::quantize(T.project(b)));
  for (const auto& k : piA)
    if (piB.count(k)) piAB.insert(k);

  std::set<detail::VecKey> invAA;
  for (const auto& a1 : A)
    for (const auto& a2 : A) invAA.insert(detail::quantize(T.group.mul(T.group.inv(a1), a2)));
  std::set<detail::VecKey> BC;
  for (const auto& b : B)
    for (const auto& c : C) BC.insert(detail::quantize(T.group.mul(b, c)));

  AbcResult r;
  r.lhs = piAB.size();
  for (const auto& k : invAA)
    if (BC.count(k)) ++r.rhs;
  r.holds = r.lhs <= r.rhs;

  // covering check: per matched coset, some pair (a, b) with a b^{-1} in (A cap H) C
  std::set<detail::VecKey> AHC;
  for (const auto& a : A) {
    if (!T.in_H(a)) continue;
    for (const auto& c : C) AHC.insert(detail::quantize(T.group.mul(a, c)));
  }
  r.covering_verified = true;
  for (const auto& coset : piAB) {
    bool covered = false;
    for (const auto& a : A) {
      if (detail::quantize(T.project(a)) != coset) continue;
      for (const auto& b : B) {
        if (detail::quantize(T.project(b)) != coset) continue;
        if (AHC.count(detail::quantize(T.group.mul(a, T.group.inv(b))))) {
          covered = true;
          break;
        }
      }
      if (covered) break;
    }
    if (!covered) {
      r.covering_verified = false;
      break;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Thinnings and densities.
// ---------------------------------------------------------------------------
inline PointSet thin_bernoulli(const PointSet& ps, double p, RngStream& stream) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("thin_bernoulli: p must be in [0,1]");
  std::vector<VecD> kept;
  kept.reserve(ps.points.size());
  for (const auto& pt : ps.points)
    if (stream.uniform() < p) kept.push_back(pt);
  return make_point_set(std::move(kept), ps.region);
}

inline double upper_density(const PointSet& ps, const std::vector<Box>& folner_boxes) {
  double best = 0.0;
  for (const auto& b : folner_boxes) {
    std::size_t count = 0;
    for (const auto& p : ps.points)
      if (b.contains_half_open(p)) ++count;
    best = std::max(best, static_cast<double>(count) / b.volume());
  }
  return best;
}

// ---------------------------------------------------------------------------
// Y-periodization for trivial H: TF(x) = sum_{g in Z_x} F(g^{-1}, g.x) with
// F(g, z) = u(g) * phi_W(w(z)).
// ---------------------------------------------------------------------------
inline double periodize_T(const TestFunction& u, const std::optional<TestFunction>& phi_w,
                          const CutProjectScheme& s, const Window& w, const HullPoint& h) {
  if (u.dimension != s.phys_dim())
    throw std::invalid_argument("periodize_T: u dimension mismatch");
  if (phi_w && phi_w->dimension != s.internal_dim())
    throw std::invalid_argument("periodize_T: phi_W dimension mismatch");
  VecD g1, g2;
  hull_to_group(s, h, g1, g2);
  // g ranges over P_x within -supp(u)
  VecD lo, hi;
  u.support_box(lo, hi);
  Box region;
  region.lo.resize(u.dimension);
  region.hi.resize(u.dimension);
  for (int i = 0; i < u.dimension; ++i) {
    region.lo[i] = -hi[i] - 0.25;
    region.hi[i] = -lo[i] + 0.25;
  }
  double sum = 0.0;
  Box phys = region;
  for (int i = 0; i < s.phys_dim(); ++i) {
    phys.lo[i] -= g1[i];
    phys.hi[i] -= g1[i];
  }
  Window wshift = w;
  for (auto& b : wshift.boxes)
    for (int i = 0; i < s.internal_dim(); ++i) {
      b.lo[i] -= g2[i];
      b.hi[i] -= g2[i];
    }
  for (const auto& gp : enumerate_gamma(s, phys, wshift)) {
    VecD g(u.dimension), wz(s.internal_dim());
    for (int i = 0; i < u.dimension; ++i) g[i] = -(gp.first[i] + g1[i]);
    double fw = 1.0;
    if (phi_w) {
      for (int i = 0; i < s.internal_dim(); ++i) wz[i] = gp.second[i] + g2[i];
      fw = phi_w->eval_real(wz);
    }
    sum += u.eval_real(g) * fw;
  }
  return sum;
}

}  // namespace aperiodic
