#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "aperiodic/cps.hpp"
#include "aperiodic/eigenfunctions.hpp"
#include "aperiodic/heisenberg.hpp"
#include "aperiodic/numerics.hpp"

namespace aperiodic {

// ---------------------------------------------------------------------------
// Z[sqrt2] arithmetic.  The Galois conjugate of a + b sqrt2 is a - b sqrt2;
// the rank-2 lattice {(x, x*)} in R^2 has covolume 2 sqrt2.
// ---------------------------------------------------------------------------
struct Zsqrt2 {
  long long a = 0, b = 0;

  double value() const { return a + b * std::sqrt(2.0); }
  double conj() const { return a - b * std::sqrt(2.0); }

  Zsqrt2 operator+(const Zsqrt2& o) const { return {a + o.a, b + o.b}; }
  Zsqrt2 operator-(const Zsqrt2& o) const { return {a - o.a, b - o.b}; }
  Zsqrt2 operator*(const Zsqrt2& o) const { return {a * o.a + 2 * b * o.b, a * o.b + b * o.a}; }
};

// All x in Z[sqrt2] with x in [phys_lo, phys_hi] and x* in [conj_lo, conj_hi]
// (closed intervals), by iterating a = (x + x*)/2 over its integer range.
inline std::vector<Zsqrt2> zsqrt2_window(double phys_lo, double phys_hi, double conj_lo,
                                         double conj_hi) {
  std::vector<Zsqrt2> out;
  if (phys_lo > phys_hi || conj_lo > conj_hi) return out;
  const double r = std::sqrt(2.0);
  const double eps = 1e-9;
  long long a0 = static_cast<long long>(std::ceil((phys_lo + conj_lo) / 2.0 - eps));
  long long a1 = static_cast<long long>(std::floor((phys_hi + conj_hi) / 2.0 + eps));
  for (long long a = a0; a <= a1; ++a) {
    double blo = std::max(phys_lo - a, a - conj_hi) / r;
    double bhi = std::min(phys_hi - a, a - conj_lo) / r;
    long long b0 = static_cast<long long>(std::ceil(blo - eps));
    long long b1 = static_cast<long long>(std::floor(bhi + eps));
    for (long long b = b0; b <= b1; ++b) out.push_back(Zsqrt2{a, b});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Heisenberg approximate lattice Lambda = Lambda_U x Lambda_Z x Lambda_V with
// Lambda_* = {x in Z[sqrt2] : |x*| <= c_*}.  The product condition
// <Lambda_U, Lambda_V> subset Lambda_Z is checked exhaustively on the
// truncation; conjugation is multiplicative, so c_Z >= c_U c_V suffices.
// ---------------------------------------------------------------------------
struct HeisApproxLattice {
  double c_u = 1.0, c_z = 1.0, c_v = 1.0;
  double trunc_radius = 0.0;
  PointSet realized;  // points (u, t, v) with all coordinates in [-trunc, trunc]
};

inline HeisApproxLattice build_heis_lambda(double c_u, double c_z, double c_v, double trunc) {
  if (c_u <= 0.0 || c_v <= 0.0 || c_z <= 0.0)
    throw std::invalid_argument("build_heis_lambda: component windows must be positive");
  auto lu = zsqrt2_window(-trunc, trunc, -c_u, c_u);
  auto lz = zsqrt2_window(-trunc, trunc, -c_z, c_z);
  auto lv = zsqrt2_window(-trunc, trunc, -c_v, c_v);
  // product condition witness search
  for (const auto& u : lu)
    for (const auto& v : lv) {
      Zsqrt2 p = u * v;
      if (std::abs(p.conj()) > c_z + 1e-12) {
        throw std::runtime_error(
            "build_heis_lambda: product condition fails, witness <u,v> = (" +
            std::to_string(u.a) + "+" + std::to_string(u.b) + "sqrt2)(" + std::to_string(v.a) +
            "+" + std::to_string(v.b) + "sqrt2) has |conj| = " + std::to_string(std::abs(p.conj())));
      }
    }
  HeisApproxLattice lat;
  lat.c_u = c_u;
  lat.c_z = c_z;
  lat.c_v = c_v;
  lat.trunc_radius = trunc;
  std::vector<VecD> pts;
  pts.reserve(lu.size() * lz.size() * lv.size());
  for (const auto& u : lu)
    for (const auto& t : lz)
      for (const auto& v : lv) pts.push_back(VecD{u.value(), t.value(), v.value()});
  Box region{VecD{-trunc, -trunc, -trunc}, VecD{trunc, trunc, trunc}};
  lat.realized = make_point_set(std::move(pts), region);
  return lat;
}

// ---------------------------------------------------------------------------
// The arithmetic Heisenberg hull: X = Gamma \ (G x G*) with
// Gamma = {(g, g*) : g in Heis(Z[sqrt2])}.  Mal'cev reduction along the lower
// central series ((u,u*), then (v,v*), then the central (t,t*), each modulo
// the rank-2 lattice {(x, x*)}) identifies X with the coefficient cube
// [0,1)^6, and uniform coefficients are an exact Haar sample.
// ---------------------------------------------------------------------------
struct HeisHullPoint {
  // coefficient order: (u, u*), (t, t*), (v, v*)
  double coeff[6] = {0, 0, 0, 0, 0, 0};
};

struct HeisPair {
  // g1 = (u, t, v), g2 = (u*, t*, v*); components stored flat
  double u = 0, t = 0, v = 0;
  double cu = 0, ct = 0, cv = 0;
};

// A point of the cross section Y: first component in H_1 = U x Z, second
// component anywhere in G_2 (reachable from the window by Delta).
struct HeisYPoint {
  double u = 0, t = 0;        // H_1 coordinates
  double g2u = 0, g2t = 0, g2v = 0;
};

class HeisHullSystem {
 public:
  HeisHullSystem(double c_u, double c_z, double c_v) : c_u_(c_u), c_z_(c_z), c_v_(c_v) {
    if (c_u <= 0 || c_z <= 0 || c_v <= 0)
      throw std::invalid_argument("HeisHullSystem: windows must be positive");
    if (c_z + 1e-12 < c_u * c_v)
      throw std::invalid_argument("HeisHullSystem: product condition needs c_z >= c_u c_v");
  }

  double c_u() const { return c_u_; }
  double c_z() const { return c_z_; }
  double c_v() const { return c_v_; }

  // Siegel constant of the induced (G, UxZ)-system for the invariant
  // probability measure: sigma(Y) = vol(pi_2(W)) / covol(pr_{V x V*} Gamma),
  // and the projected lattice is Z[sqrt2] with covolume 2 sqrt2.
  double sigma_y() const { return 2.0 * c_v_ / (2.0 * std::sqrt(2.0)); }

  HeisHullPoint sample_hull(RngStream& stream) const {
    HeisHullPoint h;
    for (double& c : h.coeff) c = stream.uniform();
    return h;
  }

  HeisPair to_group(const HeisHullPoint& h) const {
    const double r = std::sqrt(2.0);
    HeisPair g;
    g.u = h.coeff[0] + h.coeff[1] * r;
    g.cu = h.coeff[0] - h.coeff[1] * r;
    g.t = h.coeff[2] + h.coeff[3] * r;
    g.ct = h.coeff[2] - h.coeff[3] * r;
    g.v = h.coeff[4] + h.coeff[5] * r;
    g.cv = h.coeff[4] - h.coeff[5] * r;
    return g;
  }

  // Transverse (sigma-hat) sample of Y: H_2-coset position uniform on
  // pi_2(W), Haar on Delta \ (H_1 x H_2) via coefficient reduction.
  HeisYPoint sample_transverse(RngStream& stream) const {
    const double r = std::sqrt(2.0);
    double w = stream.uniform(-c_v_, c_v_);
    double cu0 = stream.uniform(), cu1 = stream.uniform();
    double ct0 = stream.uniform(), ct1 = stream.uniform();
    HeisYPoint y;
    y.u = cu0 + cu1 * r;
    double ustar = cu0 - cu1 * r;
    y.t = ct0 + ct1 * r;
    double tstar = ct0 - ct1 * r;
    y.g2u = ustar;
    y.g2t = tstar + ustar * w;  // (ustar, tstar, 0) * (0, 0, w)
    y.g2v = w;
    return y;
  }

  // P_y cap H in H-coordinates (u, t), enumerated within |.|_inf <= radius.
  // Elements are delta_1 * h_1 for delta in Delta with delta_2 g_2 in W.
  std::vector<VecD> enum_p_cap_h(const HeisYPoint& y, double radius) const {
    std::vector<VecD> out;
    auto dus = zsqrt2_window(-radius - y.u, radius - y.u, -c_u_ - y.g2u, c_u_ - y.g2u);
    for (const auto& du : dus) {
      double q = y.g2t + du.conj() * y.g2v;
      auto dts = zsqrt2_window(-radius - y.t, radius - y.t, -c_z_ - q, c_z_ - q);
      for (const auto& dt : dts) out.push_back(VecD{du.value() + y.u, dt.value() + y.t});
    }
    std::sort(out.begin(), out.end(), detail::lex_less);
    return out;
  }

  struct HitItem {
    double l = 0.0;        // the coset H(0,0,l)
    HeisYPoint lx;         // Y-parametrization of l.x
  };

  // Hitting cosets of x over the V-interval [v_lo, v_hi].  Every candidate
  // gamma_v with the V-window condition is hit (the (u,t) fiber is an
  // unbounded model set); the canonical representative gamma = (0,0,gamma_v)
  // parametrizes l.x.
  std::vector<HitItem> hitting_items(const HeisPair& x, double v_lo, double v_hi) const {
    std::vector<HitItem> out;
    for (const auto& gv : zsqrt2_window(v_lo - x.v, v_hi - x.v, -c_v_ - x.cv, c_v_ - x.cv)) {
      HitItem item;
      item.l = gv.value() + x.v;
      // h1 = (0,0,gv) * x1 * (0,0,-l) in H_1
      // (0,0,c)(u,t,v) = (u, t - u c, v + c); then right-multiply by (0,0,-l)
      double u1 = x.u;
      double t1 = x.t - x.u * gv.value();
      double v1 = x.v + gv.value();       // = l
      // (u, t, v)(0,0,-l) = (u, t - u l, v - l)
      item.lx.u = u1;
      item.lx.t = t1 - u1 * item.l;
      if (std::abs(v1 - item.l) > 1e-9)
        throw std::logic_error("hitting_items: section arithmetic failed");
      // g2' = (0,0,gv*) * x2 = (x2u, x2t - x2u gv*, x2v + gv*)
      item.lx.g2u = x.cu;
      item.lx.g2t = x.ct - x.cu * gv.conj();
      item.lx.g2v = x.cv + gv.conj();
      out.push_back(item);
    }
    std::sort(out.begin(), out.end(), [](const HitItem& a, const HitItem& b) { return a.l < b.l; });
    return out;
  }

 private:
  double c_u_, c_z_, c_v_;
};

// ---------------------------------------------------------------------------
// The approximate eigenfunction psi^(N) for 1 (x) xi, xi(t) = e^{2 pi i w t},
// realized by Folner averaging of the section character over a box in H.
// ---------------------------------------------------------------------------
struct PsiParams {
  double omega = 0.0;          // central frequency of xi
  double folner_half = 4.0;    // box side 8 by default
  int grid_per_axis = 12;
  double enum_radius = 12.0;   // P cap H enumeration radius
  double section_radius = 6.0;
};

class PsiEigenfunction {
 public:
  PsiEigenfunction(const HeisHullSystem& sys, PsiParams params) : sys_(sys), params_(params) {}

  const PsiParams& params() const { return params_; }

  cplx eval_points(const std::vector<VecD>& p_cap_h, double* excluded = nullptr) const {
    VecD freq{0.0, params_.omega};
    FolnerResult r = folner_average(freq, p_cap_h, params_.folner_half, params_.grid_per_axis,
                                    params_.section_radius);
    if (excluded) *excluded = r.excluded_fraction;
    return r.value;
  }

  cplx operator()(const HeisYPoint& y, double* excluded = nullptr) const {
    return eval_points(sys_.enum_p_cap_h(y, params_.enum_radius), excluded);
  }

  // Residual eigen-defect max |psi(h^{-1}.y) - xi(h) psi(y)| over sampled
  // (h, y); h^{-1}.y carries the point list shifted by -h.
  double measure_defect(std::size_t n_y, std::size_t n_h, std::uint64_t seed,
                        double h_half_width = 1.0) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_y; ++i) {
      RngStream stream(seed, i);
      HeisYPoint y = sys_.sample_transverse(stream);
      auto pts = sys_.enum_p_cap_h(y, params_.enum_radius);
      cplx psi_y = eval_points(pts);
      for (std::size_t j = 0; j < n_h; ++j) {
        VecD h{stream.uniform(-h_half_width, h_half_width),
               stream.uniform(-h_half_width, h_half_width)};
        std::vector<VecD> shifted = pts;
        for (auto& p : shifted) {
          p[0] -= h[0];
          p[1] -= h[1];
        }
        cplx psi_hy = eval_points(shifted);
        cplx xi_h = std::polar(1.0, 2.0 * kPi * params_.omega * h[1]);
        worst = std::max(worst, std::abs(psi_hy - xi_h * psi_y));
      }
    }
    return worst;
  }

 private:
  const HeisHullSystem& sys_;
  PsiParams params_;
};

// ---------------------------------------------------------------------------
// Stabilizer check: for s != 0 the translated character
// (l.(1 (x) xi))(u,t) = e^{2 pi i s (t - 2<u,l>)} differs from 1 (x) xi for
// every nonzero l; for s = 0 the stabilizer is everything.
// ---------------------------------------------------------------------------
struct StabilizerReport {
  bool pass = false;
  std::size_t checked = 0;
  double min_witness = 0.0;  // smallest |difference| observed at the probes
};

inline StabilizerReport check_stabilizer(double s, const std::vector<double>& lambda_v) {
  StabilizerReport r;
  r.min_witness = std::numeric_limits<double>::infinity();
  const double probes[3] = {1.0, 0.6180339887498949, 1.7320508075688772};
  bool all_differ = true;
  for (double l : lambda_v) {
    if (l == 0.0) continue;  // fixed by definition
    ++r.checked;
    double witness = 0.0;
    for (double u : probes)
      witness = std::max(witness, std::abs(std::polar(1.0, -4.0 * kPi * s * l * u) - cplx(1.0, 0.0)));
    r.min_witness = std::min(r.min_witness, witness);
    if (witness < 1e-9) all_differ = false;
  }
  if (r.checked == 0) r.min_witness = 0.0;
  r.pass = s != 0.0 && all_differ;
  return r;
}

// ---------------------------------------------------------------------------
// Aperiodic Zak transform: S_psi f(x) = sum_{l in Y_x} f(l) psi(l.x), summed
// over the hitting cosets inside [region_lo, region_hi].
// ---------------------------------------------------------------------------
inline cplx aperiodic_zak(const HeisHullSystem& sys, const TestFunction& f,
                          const std::function<cplx(const HeisYPoint&)>& psi, const HeisPair& x,
                          double region_lo, double region_hi) {
  if (f.dimension != 1) throw std::invalid_argument("aperiodic_zak: f must live on V = R");
  VecD lo, hi;
  f.support_box(lo, hi);
  if (lo[0] < region_lo || hi[0] > region_hi)
    throw std::runtime_error("aperiodic_zak: support of f not inside the region");
  cplx sum(0.0, 0.0);
  for (const auto& item : sys.hitting_items(x, region_lo, region_hi)) {
    cplx fv = f.eval(VecD{item.l});
    if (fv == cplx(0.0, 0.0)) continue;
    sum += fv * psi(item.lx);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Isometry experiment: E |sigma(Y)^{-1/2} S_psi f|^2 against ||f||^2, plus
// the twisted mean (should vanish for nontrivial xi).
// ---------------------------------------------------------------------------
struct IsometryReport {
  std::size_t n_samples = 0;
  double ratio = 0.0;          // E|S^norm f|^2 / ||f||^2
  double ratio_std_error = 0.0;
  double band = 0.0;           // acceptance half-width: max(0.05, 4 psi_defect)
  bool pass_isometry = false;
  McReport mean_report;        // MC mean of S_psi f against 0
  double sigma_y = 0.0;
  double psi_defect = 0.0;
  double epsilon = 0.0;        // character defect of xi on the truncated Lambda_Z
  double folner_half = 0.0;
  double max_excluded_fraction = 0.0;
};

inline IsometryReport mc_isometry(const HeisHullSystem& sys, const TestFunction& f, double omega,
                                  const PsiParams& psi_params, std::size_t n_samples,
                                  std::uint64_t seed, double z_mult = 3.0,
                                  std::size_t defect_samples = 64) {
  if (n_samples < 1000) throw std::invalid_argument("mc_isometry: need at least 10^3 samples");
  PsiEigenfunction psi(sys, psi_params);

  // stabilizer precondition
  std::vector<double> lv;
  for (const auto& z : zsqrt2_window(-20.0, 20.0, -sys.c_v(), sys.c_v())) lv.push_back(z.value());
  StabilizerReport stab = check_stabilizer(omega, lv);
  if (!stab.pass) throw std::runtime_error("mc_isometry: xi fails the stabilizer condition");

  IsometryReport rep;
  rep.sigma_y = sys.sigma_y();
  rep.folner_half = psi_params.folner_half;
  rep.psi_defect = psi.measure_defect(defect_samples, 4, seed ^ 0x5bd1e995u);

  VecD lo, hi;
  f.support_box(lo, hi);
  double region_lo = lo[0] - 0.25, region_hi = hi[0] + 0.25;

  std::vector<cplx> values;
  std::vector<double> sq;
  values.reserve(n_samples);
  sq.reserve(n_samples);
  double max_excl = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    RngStream stream(seed, i);
    HeisPair x = sys.to_group(sys.sample_hull(stream));
    double excl = 0.0;
    cplx s = aperiodic_zak(
        sys, f,
        [&](const HeisYPoint& y) {
          double e = 0.0;
          cplx v = psi(y, &e);
          excl = std::max(excl, e);
          return v;
        },
        x, region_lo, region_hi);
    max_excl = std::max(max_excl, excl);
    values.push_back(s);
    sq.push_back(std::norm(s));
  }
  rep.max_excluded_fraction = max_excl;
  if (max_excl >= 0.01)
    throw std::runtime_error("mc_isometry: more than 1% of translated samples left the truncation");

  rep.n_samples = n_samples;
  McStats sq_stats = mc_stats(sq);
  double denom = rep.sigma_y * f.l2_norm_sq();
  rep.ratio = sq_stats.mean.real() / denom;
  rep.ratio_std_error = sq_stats.std_error / denom;
  rep.band = std::max(0.05, 4.0 * rep.psi_defect);
  rep.pass_isometry = std::abs(rep.ratio - 1.0) <= rep.band;
  rep.mean_report = make_mc_report(values, cplx(0.0, 0.0), z_mult);

  // character defect of xi over the truncated Lambda_Z (reported as epsilon)
  std::vector<double> lz;
  for (const auto& z : zsqrt2_window(-200.0, 200.0, -sys.c_z(), sys.c_z())) lz.push_back(z.value());
  rep.epsilon = character_defect(omega, lz);
  return rep;
}

}  // namespace aperiodic
