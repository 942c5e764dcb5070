#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "aperiodic/numerics.hpp"

namespace aperiodic {

// The (2n+1)-dimensional Heisenberg group G = U x Z x V with
//   (u,t,v)(u',t',v') = (u+u', t+t' + <u,v'> - <u',v>, v+v'),
//   (u,t,v)^{-1} = (-u,-t,-v).
// H = U x Z is a normal abelian subgroup and G = H x| V with the action
//   (u,t).v = (u, t - 2<u,v>).
struct HeisPoint {
  VecD u;
  double t = 0.0;
  VecD v;

  int n() const { return static_cast<int>(u.size()); }
};

inline HeisPoint heis_id(int n) { return HeisPoint{VecD(n, 0.0), 0.0, VecD(n, 0.0)}; }

inline HeisPoint heis_mul(const HeisPoint& a, const HeisPoint& b) {
  if (a.n() != b.n()) throw std::invalid_argument("heis_mul: dimension mismatch");
  HeisPoint c;
  c.u.resize(a.u.size());
  c.v.resize(a.v.size());
  for (size_t i = 0; i < a.u.size(); ++i) c.u[i] = a.u[i] + b.u[i];
  for (size_t i = 0; i < a.v.size(); ++i) c.v[i] = a.v[i] + b.v[i];
  c.t = a.t + b.t + dot(a.u, b.v) - dot(b.u, a.v);
  return c;
}

inline HeisPoint heis_inv(const HeisPoint& g) {
  HeisPoint c = g;
  for (auto& x : c.u) x = -x;
  for (auto& x : c.v) x = -x;
  c.t = -g.t;
  return c;
}

// H-element as (u, t); the H-action on V-coordinates.
struct HElem {
  VecD u;
  double t = 0.0;
};

inline HElem h_action(const HElem& h, const VecD& v) {
  return HElem{h.u, h.t - 2.0 * dot(h.u, v)};
}

// Cocycle alpha(g, Hx) = s(Hx) g s(Hxg)^{-1} for the section s(H(u,t,v)) = (0,0,v).
// Closed form: alpha(g, v0) = (u, t - <u,v> - 2<u,v0>).
inline HElem cocycle_alpha(const HeisPoint& g, const VecD& v0) {
  return HElem{g.u, g.t - dot(g.u, g.v) - 2.0 * dot(g.u, v0)};
}

// Same cocycle computed from the defining product; used to cross-check the
// closed form.
inline HElem cocycle_alpha_by_product(const HeisPoint& g, const VecD& v0) {
  HeisPoint s0{VecD(v0.size(), 0.0), 0.0, v0};
  HeisPoint p = heis_mul(s0, g);
  HeisPoint s1{VecD(v0.size(), 0.0), 0.0, p.v};
  HeisPoint a = heis_mul(p, heis_inv(s1));
  return HElem{a.u, a.t};
}

// Characters.  For the periodic Zak transform the central frequency is a
// nonzero integer; u_freq allows general characters chi (x) xi on H.
struct Character {
  double s = 1.0;   // central frequency
  VecD u_freq;      // optional U-frequency; empty means 0

  cplx operator()(const HElem& h) const {
    double phase = s * h.t;
    if (!u_freq.empty()) phase += dot(u_freq, h.u);
    return std::polar(1.0, 2.0 * kPi * phase);
  }
};

// Schrodinger action in the second (cocycle) model:
//   pi_{s,xi}(g) phi (v0) = e^{2 pi i s (t - <u,v> - 2<u,v0>)} phi(v0 + v).
inline std::function<cplx(const VecD&)> schrodinger_action(
    const HeisPoint& g, std::function<cplx(const VecD&)> phi, double s) {
  if (s == 0.0) throw std::invalid_argument("schrodinger_action: central frequency must be nonzero");
  return [g, phi = std::move(phi), s](const VecD& v0) -> cplx {
    double phase = s * (g.t - dot(g.u, g.v) - 2.0 * dot(g.u, v0));
    VecD shifted(v0.size());
    for (size_t i = 0; i < v0.size(); ++i) shifted[i] = v0[i] + g.v[i];
    return std::polar(1.0, 2.0 * kPi * phase) * phi(shifted);
  };
}

// Classical twisted Zak transform for Gamma_U = Gamma_V = Z^n, central Z:
//   Zf(Gamma(u,t,v)) = e^{2 pi i n (t - <u,v>)} sum_k f(v+k) e^{-4 pi i n <u,k>}.
// The k-sum runs over |k|_inf <= k_trunc.
inline cplx classical_zak(const std::function<cplx(const VecD&)>& f, int n_char,
                          const HeisPoint& x, int k_trunc) {
  if (n_char == 0) throw std::invalid_argument("classical_zak: central character must be nonzero");
  const int n = x.n();
  cplx sum(0.0, 0.0);
  std::vector<int> k(n, -k_trunc);
  VecD arg(n);
  while (true) {
    double ph = 0.0;
    for (int i = 0; i < n; ++i) {
      arg[i] = x.v[i] + k[i];
      ph += x.u[i] * k[i];
    }
    sum += f(arg) * std::polar(1.0, -4.0 * kPi * n_char * ph);
    int j = n - 1;
    while (j >= 0 && ++k[j] > k_trunc) k[j--] = -k_trunc;
    if (j < 0) break;
  }
  double pre = n_char * (x.t - dot(x.u, x.v));
  return std::polar(1.0, 2.0 * kPi * pre) * sum;
}

// Truncation radius for a test function evaluated at arguments v + k with
// |v| <= max_abs_v: the first omitted shell lies outside the support box
// (where Gaussians are below 1e-12).
inline int zak_k_trunc_for(const TestFunction& f, double max_abs_v = 1.0) {
  if (f.dimension < 1) throw std::invalid_argument("zak_k_trunc_for: bad dimension");
  double r = f.support_half_width();
  double c = 0.0;
  for (double ci : f.center) c = std::max(c, std::abs(ci));
  int k = static_cast<int>(std::ceil(r + c + max_abs_v)) + 1;
  if (!f.compactly_supported()) {
    double omitted = (k - c - max_abs_v) / f.scale;  // closest omitted argument, in scale units
    if (std::exp(-kPi * omitted * omitted) >= 1e-12)
      throw std::runtime_error("classical_zak: truncation tail bound violated");
  }
  return k;
}

inline cplx classical_zak(const TestFunction& f, int n_char, const HeisPoint& x) {
  double max_v = 1.0;
  for (double vi : x.v) max_v = std::max(max_v, std::abs(vi));
  int k = zak_k_trunc_for(f, max_v);
  return classical_zak([&f](const VecD& v) { return f.eval(v); }, n_char, x, k);
}

// <Z f1, Z f2> by the tensor midpoint rule over the fundamental cube
// [0,1)^{2n+1}, rescaled by covol(Gamma)^{-1/2} = 1 per factor.
inline cplx zak_inner_product(const std::function<cplx(const VecD&)>& f1,
                              const std::function<cplx(const VecD&)>& f2, int n_char,
                              int grid_per_axis, int k_trunc, int n_dim = 1) {
  if (grid_per_axis < 16) throw std::invalid_argument("zak_inner_product: grid must be >= 16");
  const int dim = 2 * n_dim + 1;
  VecD lo(dim, 0.0), hi(dim, 1.0);
  return quad_midpoint_c(lo, hi, grid_per_axis, [&](const VecD& c) -> cplx {
    HeisPoint x;
    x.u.assign(c.begin(), c.begin() + n_dim);
    x.t = c[n_dim];
    x.v.assign(c.begin() + n_dim + 1, c.end());
    cplx z1 = classical_zak(f1, n_char, x, k_trunc);
    cplx z2 = classical_zak(f2, n_char, x, k_trunc);
    return z1 * std::conj(z2);
  });
}

inline cplx zak_inner_product(const TestFunction& f1, const TestFunction& f2, int n_char,
                              int grid_per_axis) {
  int k = std::max(zak_k_trunc_for(f1), zak_k_trunc_for(f2));
  return zak_inner_product([&](const VecD& v) { return f1.eval(v); },
                           [&](const VecD& v) { return f2.eval(v); }, n_char, grid_per_axis, k,
                           f1.dimension);
}

}  // namespace aperiodic
