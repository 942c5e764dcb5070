#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "aperiodic/lattice2d.hpp"

using namespace aperiodic;

TEST_CASE("haar samples are unimodular and deterministic") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    RngStream s(77, i);
    auto L = sample_unimodular_lattice(s);
    CHECK(std::abs(L.det() - 1.0) <= 1e-12);
  }
  RngStream a(3, 5), b(3, 5);
  auto L1 = sample_unimodular_lattice(a);
  auto L2 = sample_unimodular_lattice(b);
  CHECK(L1.a == L2.a);
  CHECK(L1.b == L2.b);
  CHECK(L1.c == L2.c);
  CHECK(L1.d == L2.d);
}

TEST_CASE("lattice point enumeration on Z^2") {
  auto Z2 = UnimodularLattice2::integer_lattice();
  auto pts = lattice_points(Z2, 1.5);
  CHECK(pts.size() == 8);  // 4 axis neighbours + 4 diagonals

  CHECK(lattice_points(Z2, 0.5).empty());

  // closed under negation
  std::set<std::pair<long long, long long>> keys;
  for (const auto& p : pts) keys.insert({llround(p[0] * 1e9), llround(p[1] * 1e9)});
  for (const auto& p : pts)
    CHECK(keys.count({llround(-p[0] * 1e9), llround(-p[1] * 1e9)}) == 1);
}

TEST_CASE("visible points") {
  auto Z2 = UnimodularLattice2::integer_lattice();
  auto vis = visible_points(Z2, 2.2);
  CHECK(vis.size() == 8);  // (+-2,0),(0,+-2) dropped; (+-1,+-2) has norm sqrt5 > 2.2

  // visible points are lattice points
  auto all = lattice_points(Z2, 2.2);
  std::set<std::pair<long long, long long>> keys;
  for (const auto& p : all) keys.insert({llround(p[0] * 1e9), llround(p[1] * 1e9)});
  for (const auto& p : vis) CHECK(keys.count({llround(p[0] * 1e9), llround(p[1] * 1e9)}) == 1);

  // primitive density at R = 500 within 1% of 6/pi^2
  double R = 500.0;
  auto big = visible_points(Z2, R);
  double density = static_cast<double>(big.size()) / (kPi * R * R);
  CHECK(std::abs(density - kVisibleDensity) / kVisibleDensity < 0.01);
}

TEST_CASE("all points decompose into dilated visible points") {
  // |L cap B_R \ 0| = sum_{k >= 1} |visible cap B_{R/k}|, exactly
  for (std::uint64_t i = 0; i < 25; ++i) {
    RngStream s(123, i);
    auto L = sample_unimodular_lattice(s);
    double R = 4.0;
    auto all = lattice_points(L, R);
    if (all.empty()) continue;
    double shortest = 1e18;
    for (const auto& p : all) shortest = std::min(shortest, std::hypot(p[0], p[1]));
    std::size_t total = 0;
    for (int k = 1; R / k >= shortest - 1e-12; ++k) total += visible_points(L, R / k).size();
    CHECK(total == all.size());
  }
}

TEST_CASE("counting is rotation invariant per lattice") {
  RngStream s(55, 0);
  auto L = sample_unimodular_lattice(s);
  double theta = 0.83;
  UnimodularLattice2 R;
  R.a = std::cos(theta) * L.a - std::sin(theta) * L.c;
  R.c = std::sin(theta) * L.a + std::cos(theta) * L.c;
  R.b = std::cos(theta) * L.b - std::sin(theta) * L.d;
  R.d = std::sin(theta) * L.b + std::cos(theta) * L.d;
  for (double rad : {1.0, 2.0, 3.0})
    CHECK(lattice_points(L, rad).size() == lattice_points(R, rad).size());
}

TEST_CASE("mean point count matches the ball volume") {
  // E |Lambda cap B_R \ 0| = pi R^2, checked at two radii for the scaling
  for (double R : {1.4, 2.0}) {
    const std::size_t n = 20000;
    std::vector<double> counts;
    counts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      RngStream s(4040, i);
      counts.push_back(static_cast<double>(lattice_points(sample_unimodular_lattice(s), R).size()));
    }
    auto rep = make_mc_report(counts, kPi * R * R);
    INFO("R " << R << " mean " << rep.mean.real() << " expected " << kPi * R * R << " z " << rep.z);
    CHECK(rep.pass);
  }
}

TEST_CASE("classical siegel formula, both modes") {
  auto f = TestFunction::gaussian(2);
  auto all = mc_classical_siegel(f, ClassicalSiegelMode::all_points, 20000, 99);
  INFO("all: mean " << all.mean.real() << " z " << all.z);
  CHECK(all.pass);
  CHECK(all.reference.real() == Catch::Approx(1.0));

  auto vis = mc_classical_siegel(f, ClassicalSiegelMode::visible, 20000, 99);
  INFO("visible: mean " << vis.mean.real() << " z " << vis.z);
  CHECK(vis.pass);
  CHECK(vis.reference.real() == Catch::Approx(kVisibleDensity));

  auto far = TestFunction::gaussian(2, VecD{20.0, 0.0}, 1.0);
  CHECK_THROWS(mc_classical_siegel(far, ClassicalSiegelMode::all_points, 1000, 1));
}
