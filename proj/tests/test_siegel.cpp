#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "aperiodic/siegel.hpp"

using namespace aperiodic;

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

TEST_CASE("transversal invariants") {
  RngStream stream(11, 0);
  auto check_spec = [&](const TransversalSpec& T) {
    for (int trial = 0; trial < 200; ++trial) {
      VecD g(T.group.dim);
      for (auto& x : g) x = stream.uniform(-5.0, 5.0);
      VecD q = T.project(g);
      VecD q2 = T.project(T.section(q));
      for (size_t i = 0; i < q.size(); ++i) CHECK(q2[i] == Catch::Approx(q[i]).margin(1e-12));
      VecD h = T.h_part(g);
      CHECK(T.in_H(h, 1e-12));
      VecD rebuilt = T.group.mul(h, T.section(T.project(g)));
      for (int i = 0; i < T.group.dim; ++i) CHECK(rebuilt[i] == Catch::Approx(g[i]).margin(1e-12));
    }
  };
  check_spec(TransversalSpec::trivial(2));
  check_spec(TransversalSpec::abelian_axis(3, {0, 2}));
  check_spec(TransversalSpec::heisenberg_uz(1));
}

TEST_CASE("hitting sets") {
  // identity transversal: the hitting set is the point set itself
  std::vector<VecD> pts{{0.5}, {1.5}, {2.5}};
  auto ps = make_point_set(pts, Box{VecD{0.0}, VecD{3.0}});
  auto T = TransversalSpec::trivial(1);
  auto hs = hitting_set(ps, T, Box{VecD{0.0}, VecD{3.0}});
  REQUIRE(hs.cosets.size() == 3);
  CHECK(hs.total_points == 3);

  // Heisenberg projection pi(u,t,v) = v on a product set gives Lambda_V
  auto TH = TransversalSpec::heisenberg_uz(1);
  std::vector<VecD> prod;
  for (double u : {0.0, 1.0})
    for (double t : {0.0, 2.0})
      for (double v : {0.25, 0.75, 1.25}) prod.push_back(VecD{u, t, v});
  auto hps = make_point_set(prod, Box{VecD{-1.0, -1.0, 0.0}, VecD{2.0, 3.0, 2.0}});
  auto hhs = hitting_set(hps, TH, Box{VecD{0.0}, VecD{1.0}});
  REQUIRE(hhs.cosets.size() == 2);  // 0.25 and 0.75; 1.25 outside the region
  CHECK(hhs.cosets[0][0] == Catch::Approx(0.25));
  CHECK(hhs.multiplicity[0] == 4);  // four (u,t) combinations over each v

  // empty input
  auto empty_ps = make_point_set({}, Box{VecD{0.0}, VecD{1.0}});
  CHECK(hitting_set(empty_ps, T, Box{VecD{0.0}, VecD{1.0}}).cosets.empty());
}

TEST_CASE("siegel transform on integer points") {
  std::vector<VecD> pts;
  for (int i = -10; i <= 10; ++i) pts.push_back(VecD{static_cast<double>(i)});
  auto ps = make_point_set(pts, Box{VecD{-10.5}, VecD{10.5}});
  auto T = TransversalSpec::trivial(1);

  // box indicator of [-0.5, 2.5] catches 0, 1, 2
  auto f = TestFunction::box_fn(1, VecD{1.0}, 1.5);
  CHECK(siegel_transform(f, ps, T) == 3.0);

  // support must be covered
  auto wide = TestFunction::gaussian(1, VecD{9.0}, 2.0);
  CHECK_THROWS(siegel_transform(wide, ps, T));

  // box positioned between lattice points sums to zero
  auto off = TestFunction::box_fn(1, VecD{0.5}, 0.25);
  CHECK(siegel_transform(off, ps, T) == 0.0);
}

TEST_CASE("siegel transform against a direct oracle on the zsqrt2 set") {
  auto s = CutProjectScheme::zsqrt2();
  Window w = Window::box(VecD{-1.0}, VecD{1.0});
  Box region{VecD{-8.0}, VecD{8.0}};
  auto ps = cut_and_project(s, w, VecD{0.0}, VecD{0.0}, region);
  auto f = TestFunction::gaussian(1, VecD{0.3}, 1.2);

  // independent oracle: direct double loop over integer coefficients
  double oracle = 0.0;
  for (int a = -30; a <= 30; ++a)
    for (int b = -30; b <= 30; ++b) {
      double phys = a + b * kSqrt2, star = a - b * kSqrt2;
      if (std::abs(star) <= 1.0 && phys >= -8.0 && phys < 8.0) oracle += f.eval_real(VecD{phys});
    }
  CHECK(siegel_transform(f, ps, TransversalSpec::trivial(1)) == Catch::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("twisted transform reduces to the untwisted one for psi = 1") {
  auto s = CutProjectScheme::zsqrt2();
  auto ps = cut_and_project(s, Window::box(VecD{-1.0}, VecD{1.0}), VecD{0.0}, VecD{0.0},
                            Box{VecD{-8.0}, VecD{8.0}});
  auto f = TestFunction::gaussian(1, VecD{0.1}, 1.0);
  auto T = TransversalSpec::trivial(1);
  double untwisted = siegel_transform(f, ps, T);
  cplx twisted = twisted_siegel_transform(f, ps, T, [](const VecD&) { return cplx(1.0, 0.0); });
  CHECK(twisted.real() == untwisted);  // bitwise: identical summation order
  CHECK(twisted.imag() == 0.0);
}

TEST_CASE("twisted mean zero on the lattice hull") {
  // Z^2 hull with H = x-axis; xi(a) = e^{2 pi i a} kills Gamma_H, and the
  // section character is an exact eigenfunction.  E[S_psi f] = 0.
  auto s = CutProjectScheme::integer_lattice(2);
  auto T = TransversalSpec::abelian_axis(2, {0});
  auto f = TestFunction::gaussian(1, VecD{0.0}, 0.8);
  Box region{VecD{-6.0, -4.0}, VecD{6.0, 4.0}};
  const double omega = 1.0;
  const std::size_t n = 4000;
  std::vector<cplx> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream stream(909, i);
    HullPoint h = sample_hull(s, stream);
    PointSet ps = pointset_of_hull(s, Window::empty(0), h, region);
    cplx val = twisted_siegel_transform(f, ps, T, [&](const VecD& coset) -> cplx {
      // P cap H of the translated sample: x-coordinates of points in this coset
      double best = 1e18;
      for (const auto& p : ps.points)
        if (std::abs(p[1] - coset[0]) < 1e-9 && std::abs(p[0]) < std::abs(best)) best = p[0];
      REQUIRE(best < 1e17);
      return std::polar(1.0, -2.0 * kPi * omega * best);
    });
    samples.push_back(val);
  }
  auto rep = make_mc_report(samples, cplx(0.0, 0.0));
  INFO("mean " << rep.mean << " stderr " << rep.std_error);
  CHECK(rep.pass);
}

TEST_CASE("twisted siegel duality on the lattice hull") {
  // Z^2 hull, H = x-axis, xi(a) = e^{2 pi i w a} with integer w.  Here the
  // section character is an exact eigenfunction, Y is the circle {(c0, 0)}
  // with transverse measure dc0 (covolume 1), and both sides of
  //   <S_psi f, phi>_X = <f, S*_psi phi>_{H\G}
  // are computable independently: the left by MC over hull samples, the
  // right by quadrature with S*_psi phi(q) = int_Y phi(s(q)^{-1}.y)
  // conj(psi(y)) dsigma(y).
  auto s = CutProjectScheme::integer_lattice(2);
  auto T = TransversalSpec::abelian_axis(2, {0});
  auto f = TestFunction::gaussian(1, VecD{0.0}, 0.8);
  const double omega = 1.0;
  auto phi = [](const HullPoint& h) {
    return cplx(1.0 + 0.5 * std::cos(2.0 * kPi * h.coefficients[0]) +
                    0.25 * std::sin(2.0 * kPi * (h.coefficients[0] + h.coefficients[1])),
                0.0);
  };
  Box region{VecD{-6.0, -4.0}, VecD{6.0, 4.0}};
  const std::size_t n = 6000;
  std::vector<cplx> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream stream(8181, i);
    HullPoint h = sample_hull(s, stream);
    PointSet ps = pointset_of_hull(s, Window::empty(0), h, region);
    cplx sf = twisted_siegel_transform(f, ps, T, [&](const VecD& coset) -> cplx {
      double best = 1e18;
      for (const auto& p : ps.points)
        if (std::abs(p[1] - coset[0]) < 1e-9 && std::abs(p[0]) < std::abs(best)) best = p[0];
      REQUIRE(best < 1e17);
      return std::polar(1.0, -2.0 * kPi * omega * best);
    });
    samples.push_back(sf * std::conj(phi(h)));
  }
  auto lhs = mc_stats(samples);

  // rhs: outer quadrature over the support of f, inner over Y.  On this hull
  // the section handle above realizes psi(y) = e^{-2 pi i w c0} (the point
  // set is Z^2 + (c0, c1), so the minimal section element is c0 mod 1), and
  // the dual integrand carries conj(psi(y)) = e^{+2 pi i w c0}.
  VecD flo, fhi;
  f.support_box(flo, fhi);
  cplx rhs = quad_midpoint_c(flo, fhi, 256, [&](const VecD& qv) -> cplx {
    double q = qv[0];
    cplx dual = quad_midpoint_c(VecD{0.0}, VecD{1.0}, 256, [&](const VecD& c0v) -> cplx {
      HullPoint y{VecD{c0v[0], 0.0}};
      HullPoint translated = hull_translate(s, y, VecD{0.0, -q}, VecD{});
      return phi(translated) * std::polar(1.0, 2.0 * kPi * omega * c0v[0]);
    });
    return f.eval(qv) * std::conj(dual);
  });

  INFO("lhs " << lhs.mean << " rhs " << rhs << " stderr " << lhs.std_error);
  CHECK(std::abs(lhs.mean - rhs) <= 3.0 * lhs.std_error + 1e-3);
  CHECK(std::abs(rhs) > 0.01);  // the pairing is genuinely nonzero for this phi
}

TEST_CASE("siegel constants") {
  auto s = CutProjectScheme::zsqrt2();
  Window w = Window::box(VecD{-1.0}, VecD{1.0});
  CHECK(siegel_constant_trivial(s, w) == Catch::Approx(1.0 / kSqrt2).epsilon(1e-13));
  CHECK(siegel_constant_trivial(s, Window::empty(1)) == 0.0);
  CHECK(siegel_constant_lattice(s) == Catch::Approx(1.0 / (2.0 * kSqrt2)).epsilon(1e-13));

  // trivial internal space: the constant is the lattice intensity
  CHECK(siegel_constant_trivial(CutProjectScheme::integer_lattice(2), Window::empty(0)) == 1.0);

  auto pair_scheme = CutProjectScheme::zsqrt2_pair();
  Window w2 = Window::box(VecD{-1.0, -1.0}, VecD{1.0, 1.0});
  CompatiblePair pair;
  pair.h1_phys_coords = {0};
  pair.h2_internal_coords = {0};
  CHECK(delta_covolume(pair_scheme, pair) == Catch::Approx(2.0 * kSqrt2).epsilon(1e-12));
  CHECK(siegel_constant_compatible_pair(pair_scheme, w2, pair) ==
        Catch::Approx(1.0 / kSqrt2).epsilon(1e-12));
  CHECK(siegel_constant_compatible_pair(pair_scheme, Window::empty(2), pair) == 0.0);
}

TEST_CASE("monte-carlo siegel formula") {
  auto s = CutProjectScheme::zsqrt2();
  Window w = Window::box(VecD{-1.0}, VecD{1.0});
  auto f = TestFunction::gaussian(1);
  auto res = mc_siegel_formula(s, w, f, 4000, 4242);
  INFO("mean " << res.report.mean.real() << " ref " << res.report.reference.real() << " z "
               << res.report.z);
  CHECK(res.report.pass);
  CHECK(res.sigma_y == Catch::Approx(1.0 / kSqrt2));

  // thinning scales the constant by p
  auto thinned = mc_siegel_formula(s, w, f, 4000, 4242, 0.5);
  CHECK(thinned.report.reference.real() == Catch::Approx(0.5 / kSqrt2));
  CHECK(thinned.report.pass);

  CHECK_THROWS(mc_siegel_formula(s, w, f, 10, 1));
}

TEST_CASE("dual transform") {
  auto s = CutProjectScheme::zsqrt2();
  Window w = Window::box(VecD{-1.0}, VecD{1.0});

  auto one = [](const HullPoint&) { return cplx(1.0, 0.0); };
  cplx sy = dual_transform(one, VecD{0.7}, s, w, 64);
  CHECK(sy.real() == Catch::Approx(siegel_constant_trivial(s, w)).margin(1e-12));  // S*1 = sigma(Y)

  auto zero = [](const HullPoint&) { return cplx(0.0, 0.0); };
  CHECK(std::abs(dual_transform(zero, VecD{0.7}, s, w, 64)) == 0.0);

  // generic phi against a refined-grid oracle
  auto phi = [](const HullPoint& h) {
    return cplx(1.0 + 0.5 * std::cos(2.0 * kPi * h.coefficients[0]) +
                    0.25 * std::cos(2.0 * kPi * (h.coefficients[0] + h.coefficients[1])),
                0.0);
  };
  cplx coarse = dual_transform(phi, VecD{0.3}, s, w, 32);
  cplx fine = dual_transform(phi, VecD{0.3}, s, w, 512);
  CHECK(std::abs(coarse - fine) / std::abs(fine) < 1e-3);
}

TEST_CASE("siegel duality") {
  auto s = CutProjectScheme::zsqrt2();
  Window w = Window::box(VecD{-1.0}, VecD{1.0});
  auto f = TestFunction::gaussian(1);
  auto phi = [](const HullPoint& h) {
    return cplx(1.0 + 0.5 * std::cos(2.0 * kPi * h.coefficients[0]) +
                    0.25 * std::cos(2.0 * kPi * (h.coefficients[0] + h.coefficients[1])),
                0.0);
  };
  auto res = mc_siegel_duality(s, w, f, phi, 3000, 777, 96);
  INFO("lhs " << res.lhs.mean << " rhs " << res.rhs);
  CHECK(res.pass);

  // phi = 1 reduces to the Siegel formula
  auto one = [](const HullPoint&) { return cplx(1.0, 0.0); };
  auto red = mc_siegel_duality(s, w, f, one, 1500, 778, 64);
  CHECK(red.rhs.real() == Catch::Approx(siegel_constant_trivial(s, w) * f.integral_real()).margin(1e-6));
  CHECK(red.pass);
}

TEST_CASE("abc bound") {
  auto T = TransversalSpec::abelian_axis(2, {0});
  std::vector<VecD> e{VecD{0.0, 0.0}};
  auto r = abc_bound(e, e, e, T);
  CHECK(r.lhs == 1);
  CHECK(r.rhs == 1);
  CHECK(r.holds);
  CHECK(r.covering_verified);

  // abelian: A = B = Z^2 cap [-5,5]^2, H = x-axis, C = {0}
  std::vector<VecD> A;
  for (int x = -5; x <= 5; ++x)
    for (int y = -5; y <= 5; ++y) A.push_back(VecD{static_cast<double>(x), static_cast<double>(y)});
  auto r2 = abc_bound(A, A, e, T);
  CHECK(r2.lhs == 11);   // y-values -5..5
  CHECK(r2.rhs == 121);  // (A - A) cap A = A
  CHECK(r2.holds);
  CHECK(r2.covering_verified);

  // Heisenberg: truncated product approximate lattice
  auto TH = TransversalSpec::heisenberg_uz(1);
  std::vector<VecD> H;
  for (int u = -2; u <= 2; ++u)
    for (int t = -2; t <= 2; ++t)
      for (int v = -2; v <= 2; ++v)
        H.push_back(VecD{static_cast<double>(u), static_cast<double>(t), static_cast<double>(v)});
  std::vector<VecD> CH;
  for (int u = -4; u <= 4; ++u)
    for (int t = -8; t <= 8; ++t) CH.push_back(VecD{static_cast<double>(u), static_cast<double>(t), 0.0});
  auto r3 = abc_bound(H, H, CH, TH);
  INFO("heisenberg lhs " << r3.lhs << " rhs " << r3.rhs);
  CHECK(r3.holds);

  // C must live in H
  std::vector<VecD> badC{VecD{0.0, 0.0, 1.0}};
  CHECK_THROWS(abc_bound(H, H, badC, TH));
}

TEST_CASE("thinning and upper density") {
  std::vector<VecD> pts;
  for (int i = 0; i < 20000; ++i) pts.push_back(VecD{i * 0.5});
  auto ps = make_point_set(pts, Box{VecD{-1.0}, VecD{10000.0}});

  RngStream s1(5, 1);
  auto all = thin_bernoulli(ps, 1.0, s1);
  CHECK(all.size() == ps.size());
  RngStream s2(5, 2);
  CHECK(thin_bernoulli(ps, 0.0, s2).size() == 0);
  RngStream s3(5, 3);
  auto half = thin_bernoulli(ps, 0.5, s3);
  double n = static_cast<double>(ps.size());
  CHECK(std::abs(static_cast<double>(half.size()) - 0.5 * n) <= 3.0 * std::sqrt(n * 0.25));

  // deterministic given the stream
  RngStream s4(5, 3);
  auto half2 = thin_bernoulli(ps, 0.5, s4);
  CHECK(half.points == half2.points);

  // upper density of Z with D_n = [0, n]
  std::vector<VecD> zpts;
  for (int i = 0; i <= 1000; ++i) zpts.push_back(VecD{static_cast<double>(i)});
  auto zps = make_point_set(zpts, Box{VecD{-0.5}, VecD{1001.0}});
  std::vector<Box> boxes;
  for (double nn : {10.0, 100.0, 1000.0}) boxes.push_back(Box{VecD{0.0}, VecD{nn}});
  CHECK(upper_density(zps, boxes) >= 1.0);
  CHECK(upper_density(zps, boxes) <= 1.2);

  auto empty_ps = make_point_set({}, Box{VecD{0.0}, VecD{1.0}});
  CHECK(upper_density(empty_ps, boxes) == 0.0);

  RngStream s5(6, 0);
  auto zthin = thin_bernoulli(zps, 0.5, s5);
  CHECK(upper_density(zthin, {Box{VecD{0.0}, VecD{1000.0}}}) == Catch::Approx(0.5).margin(0.06));
}

TEST_CASE("periodization") {
  auto s = CutProjectScheme::zsqrt2();
  Window w = Window::box(VecD{-1.0}, VecD{1.0});
  HullPoint origin{VecD{0.0, 0.0}};

  // phi_W positioned outside the window annihilates F
  auto u = TestFunction::box_fn(1, VecD{0.0}, 3.0);
  auto far = TestFunction::box_fn(1, VecD{5.0}, 0.5);
  CHECK(periodize_T(u, far, s, w, origin) == 0.0);

  // F = u (x) 1 counts the points in the reflected box
  double counted = periodize_T(u, std::nullopt, s, w, origin);
  auto ps = cut_and_project(s, w, VecD{0.0}, VecD{0.0}, Box{VecD{-3.5}, VecD{3.5}});
  double expect = 0.0;
  for (const auto& p : ps.points)
    if (std::abs(-p[0]) <= 3.0) expect += 1.0;
  CHECK(counted == expect);

  // MC mean of TF against int_G int_Z F dnu dm_G with nu = m_W / covol
  auto phiw = TestFunction::triangle(1, VecD{0.0}, 1.0);
  std::vector<double> samples;
  const std::size_t n = 4000;
  for (std::size_t i = 0; i < n; ++i) {
    RngStream stream(2718, i);
    samples.push_back(periodize_T(u, phiw, s, w, sample_hull(s, stream)));
  }
  double phiw_on_window = quad_midpoint(VecD{-1.0}, VecD{1.0}, 4096,
                                        [&](const VecD& x) { return phiw.eval_real(x); });
  double ref = u.integral_real() * phiw_on_window / s.covolume();
  auto rep = make_mc_report(samples, ref);
  INFO("mean " << rep.mean.real() << " ref " << ref << " z " << rep.z);
  CHECK(rep.pass);
}
