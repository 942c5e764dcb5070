// Acceptance suite: runs every verification criterion at its pinned tolerance
// and prints one pass/fail line per criterion.  Exit code = number of
// failures.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "aperiodic/experiments.hpp"

using namespace aperiodic;

namespace {

int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const std::string& id, bool pass, const std::string& detail) {
  std::printf("%-4s %s  %s\n", id.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return std::string(buf);
}

const double kSqrt2 = std::sqrt(2.0);

// A1: classical Siegel formula over 1e5 random unimodular planar lattices.
void a1() {
  auto t0 = std::chrono::steady_clock::now();
  auto f = TestFunction::gaussian(2);
  auto rep = mc_classical_siegel(f, ClassicalSiegelMode::all_points, 100000, 20260101);
  double secs = seconds_since(t0);
  bool pass = rep.pass && secs < 60.0;
  report("A1", pass,
         fmt("classical Siegel, all points: mean=%.5f ref=1 stderr=%.5f z=%.2f, %.1fs",
             rep.mean.real(), rep.std_error, rep.z, secs));
}

// A2: visible-point constant 6/pi^2, plus the fixed-Z^2 counting oracle.
void a2() {
  auto f = TestFunction::gaussian(2);
  auto rep = mc_classical_siegel(f, ClassicalSiegelMode::visible, 100000, 20260202);
  double R = 500.0;
  auto vis = visible_points(UnimodularLattice2::integer_lattice(), R);
  double counted = static_cast<double>(vis.size()) / (kPi * R * R);
  bool oracle_ok = std::abs(counted - kVisibleDensity) / kVisibleDensity < 0.01;
  report("A2", rep.pass && oracle_ok,
         fmt("visible points: mean=%.5f ref=%.5f z=%.2f; Z^2 oracle density=%.5f",
             rep.mean.real(), kVisibleDensity, rep.z, counted));
}

// A3: zsqrt2 density by exhaustive enumeration and by hull-sample intensity.
void a3() {
  auto s = CutProjectScheme::zsqrt2();
  Window w = Window::box(VecD{-1.0}, VecD{1.0});
  auto ps = cut_and_project(s, w, VecD{0.0}, VecD{0.0}, Box{VecD{-10000.0}, VecD{10000.0}});
  double dens = density(ps);
  double expected = 1.0 / kSqrt2;
  bool exact_ok = std::abs(dens - expected) / expected <= 0.005;

  auto T = TransversalSpec::trivial(1);
  auto mc = mc_hull_intensity(s, w, T, Box{VecD{-50.0}, VecD{50.0}}, 0.0,
                              siegel_constant_trivial(s, w), 10000, 20260303);
  report("A3", exact_ok && mc.report.pass,
         fmt("cut-and-project density: exact=%.6f (ref %.6f), MC mean=%.4f z=%.2f",
             dens, expected, mc.report.mean.real(), mc.report.z));
}

// A4: Siegel duality on the zsqrt2 system.
void a4() {
  auto s = CutProjectScheme::zsqrt2();
  Window w = Window::box(VecD{-1.0}, VecD{1.0});
  auto f = TestFunction::gaussian(1);
  auto phi = [](const HullPoint& h) {
    return cplx(1.0 + 0.5 * std::cos(2.0 * kPi * h.coefficients[0]) +
                    0.25 * std::cos(2.0 * kPi * (h.coefficients[0] + h.coefficients[1])),
                0.0);
  };
  auto res = mc_siegel_duality(s, w, f, phi, 10000, 20260404, 128, 1e-3);
  report("A4", res.pass,
         fmt("Siegel duality: lhs=%.5f rhs=%.5f stderr=%.5f", res.lhs.mean.real(),
             res.rhs.real(), res.lhs.std_error));
}

// A5: classical Zak unitarity at 64 points/axis, with the halving clause.
void a5() {
  auto t0 = std::chrono::steady_clock::now();
  auto f = TestFunction::gaussian(1);
  double ref = f.l2_norm_sq();
  double err64 = std::abs(zak_inner_product(f, f, 1, 64).real() - ref);
  double err128 = std::abs(zak_inner_product(f, f, 1, 128).real() - ref);
  double secs = seconds_since(t0);
  bool close = err64 <= 1e-3;
  bool halves = err128 <= 0.5 * err64;
  report("A5", close && halves && secs < 30.0,
         fmt("Zak unitarity: |<Zf,Zf>-||f||^2| = %.3e at 64/axis, %.3e at 128/axis, %.1fs",
             err64, err128, secs));
}

// A6: explicit Siegel constant for the Z[sqrt2]^2 compatible pair.
void a6() {
  auto s = CutProjectScheme::zsqrt2_pair();
  Window w = Window::box(VecD{-1.0, -1.0}, VecD{1.0, 1.0});
  auto T = TransversalSpec::abelian_axis(2, {0});
  CompatiblePair pair;
  pair.h1_phys_coords = {0};
  pair.h2_internal_coords = {0};
  double sigma = siegel_constant_compatible_pair(s, w, pair);
  auto mc = mc_hull_intensity(s, w, T, Box{VecD{-10.0}, VecD{10.0}}, 10.0, sigma, 10000, 20260606);
  bool const_ok = std::abs(sigma - 1.0 / kSqrt2) < 1e-12;
  report("A6", const_ok && mc.report.pass,
         fmt("compatible-pair constant: sigma=%.6f (ref %.6f), MC mean=%.4f z=%.2f", sigma,
             1.0 / kSqrt2, mc.report.mean.real(), mc.report.z));
}

// A7: the |pi(A) cap pi(B)| <= |A^{-1}A cap BC| bound on randomized instances.
void a7() {
  auto run = [](const std::string& group, std::uint64_t seed) {
    auto cfg = Config::parse_string("experiment = \"check_abc_bound\"\ngroup = \"" + group +
                                    "\"\nn_instances = 50\nset_size = 30\nseed = " +
                                    std::to_string(seed) + "\n");
    return run_experiment(cfg);
  };
  auto ab = run("abelian", 20260707);
  auto he = run("heisenberg", 20260708);
  std::size_t viol = ab.report["violations"].get<std::size_t>() +
                     he.report["violations"].get<std::size_t>();
  report("A7", viol == 0,
         fmt("ABC bound: 100 randomized instances (abelian+Heisenberg), %zu violations", viol));
}

// A8 result is shared with A9-A11 (they use a frequency found here).
double g_omega = 0.0;

void a8() {
  auto scheme = CutProjectScheme::zsqrt2();
  std::vector<double> lambda;
  for (const auto& z : zsqrt2_window(-200.0, 200.0, -1.0, 1.0)) lambda.push_back(z.value());
  std::vector<double> cands = dual_frequency_candidates(scheme, 20.0, 0.6);
  for (double g : grid_frequency_candidates(-20.0, 20.0, 1.0 / 256.0)) cands.push_back(g);
  auto found = epsilon_dual(lambda, 0.5, cands);
  std::size_t nontrivial = 0;
  std::vector<double> freqs;
  double best_defect = 2.0;
  for (const auto& e : found) {
    freqs.push_back(e.freq);
    if (std::abs(e.freq) > 1e-9) {
      ++nontrivial;
      if (e.defect < best_defect) {
        best_defect = e.defect;
        g_omega = e.freq;
      }
    }
  }
  auto density = check_relative_density(freqs, -20.0, 20.0, 2.0);
  bool enough = nontrivial >= 5;
  report("A8", enough && density.ok,
         fmt("eps-dual at R=200, eps=0.5: %zu nontrivial frequencies, max gap %.3f (bound 2)",
             nontrivial, density.max_gap));
}

// A9: eigenfunction modulus bounds and the Folner defect trend.
void a9() {
  HeisHullSystem sys(1.0, 1.0, 1.0);
  double omega = g_omega != 0.0 ? g_omega : (12.0 + 17.0 / kSqrt2) / 2.0;
  const double eps = 0.5;

  PsiParams params;
  params.omega = omega;
  params.folner_half = 4.0;
  PsiEigenfunction psi(sys, params);
  std::size_t violations = 0;
  double min_abs = 2.0, max_abs = 0.0;
  for (std::size_t i = 0; i < 1000; ++i) {
    RngStream stream(20260909, i);
    double a = std::abs(psi(sys.sample_transverse(stream)));
    min_abs = std::min(min_abs, a);
    max_abs = std::max(max_abs, a);
    if (a < 1.0 - eps || a > 1.0 + eps) ++violations;
  }

  std::vector<double> defects;
  for (double half : {1.0, 2.0, 4.0}) {
    PsiParams p = params;
    p.folner_half = half;
    defects.push_back(PsiEigenfunction(sys, p).measure_defect(100, 4, 20260910));
  }
  bool monotone = defects[1] < defects[0] && defects[2] < defects[1];
  report("A9", violations == 0 && monotone,
         fmt("eigenfunction bounds: |psi| in [%.3f, %.3f], %zu violations; defects %.3f > %.3f > %.3f",
             min_abs, max_abs, violations, defects[0], defects[1], defects[2]));
}

// A10 + A11 share one isometry run.
void a10_a11() {
  HeisHullSystem sys(1.0, 1.0, 1.0);
  double omega = g_omega != 0.0 ? g_omega : (12.0 + 17.0 / kSqrt2) / 2.0;
  auto f = TestFunction::gaussian(1, VecD{0.0}, 0.8);
  PsiParams params;
  params.omega = omega;
  auto t0 = std::chrono::steady_clock::now();
  auto rep = mc_isometry(sys, f, omega, params, 10000, 20261010, 3.0, 64);
  double secs = seconds_since(t0);
  report("A10", rep.mean_report.pass,
         fmt("twisted mean zero: |mean|=%.5f stderr=%.5f z=%.2f",
             std::abs(rep.mean_report.mean), rep.mean_report.std_error, rep.mean_report.z));
  report("A11", rep.pass_isometry && secs < 300.0,
         fmt("aperiodic Zak isometry: ratio=%.4f band=%.3f psi_defect=%.3f sigma_Y=%.4f, %.1fs",
             rep.ratio, rep.band, rep.psi_defect, rep.sigma_y, secs));
}

// A12: Bernoulli thinning halves the measured Siegel constant.
void a12() {
  auto s = CutProjectScheme::zsqrt2();
  Window w = Window::box(VecD{-1.0}, VecD{1.0});
  auto T = TransversalSpec::trivial(1);
  auto mc = mc_hull_intensity(s, w, T, Box{VecD{-50.0}, VecD{50.0}}, 0.0,
                              siegel_constant_trivial(s, w), 10000, 20261212, 0.5);
  report("A12", mc.report.pass,
         fmt("Bernoulli thinning p=0.5: mean=%.4f ref=%.4f z=%.2f", mc.report.mean.real(),
             mc.report.reference.real(), mc.report.z));
}

// A13: byte-identical reports under re-runs with the same seed.
void a13() {
  const std::string dir = APERIODIC_CONFIG_DIR;
  bool all_ok = true;
  std::string detail;
  for (const char* name : {"siegel_zsqrt2.toml", "hull_intensity_pair.toml", "zak_unitarity.toml"}) {
    Config cfg = Config::parse_file(dir + "/" + name);
    auto r1 = run_experiment(cfg);
    auto r2 = run_experiment(cfg);
    bool same = r1.report.dump(2) == r2.report.dump(2);
    all_ok = all_ok && same;
    detail += std::string(name) + (same ? " ok; " : " MISMATCH; ");
  }
  report("A13", all_ok, "determinism: " + detail);
}

}  // namespace

int main() {
  std::printf("acceptance suite (library %s)\n", APERIODIC_VERSION);
  a1();
  a2();
  a3();
  a4();
  a5();
  a6();
  a7();
  a8();
  a9();
  a10_a11();
  a12();
  a13();
  std::printf("%d criterio%s failed\n", g_failures, g_failures == 1 ? "n" : "ns");
  return g_failures;
}
