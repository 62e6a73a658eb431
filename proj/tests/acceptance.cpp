#include "tf/analysis.hpp"
#include "tf/atom.hpp"
#include "tf/corrections.hpp"
#include "tf/error.hpp"
#include "tf/molecular.hpp"
#include "tf/ode.hpp"
#include "tf/units.hpp"
#include "tf/universal.hpp"

#include "collocation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace tf;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Tracked {
  std::string name;
  double residual, tolerance, min_phi;
};

std::vector<Tracked> tracked;
const SolverConfig kConfig{};

const TFSolution& track(const std::string& name, const TFSolution& sol) {
  double min_phi = INFINITY;
  double tol = kConfig.residual_tolerance;
  if (sol.is_radial()) {
    for (double v : sol.radial().potential) min_phi = std::min(min_phi, v);
  } else {
    for (double v : sol.grid().potential.values) min_phi = std::min(min_phi, v);
    tol = kConfig.scf_residual_tolerance;
  }
  tracked.push_back({name, sol.residual, tol, min_phi});
  return sol;
}

TFSolution atom(double Z, double N) {
  auto sol = solve_atom(Z, N, kConfig);
  std::ostringstream name;
  name << "atom Z=" << Z << " N=" << N;
  track(name.str(), sol);
  return sol;
}

TFSolution molecule(const std::string& name, const NuclearConfiguration& nuclei, double N, const Grid3D& grid) {
  auto sol = scf_solve(nuclei, N, kConfig, grid);
  track(name, sol);
  return sol;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

NuclearConfiguration h2(double d) { return NuclearConfiguration({{1.0, {0.0, 0.0, 0.0}}, {1.0, {d, 0.0, 0.0}}}); }

Outcome universal_constant() {
  const auto t0 = std::chrono::steady_clock::now();
  const double shooting = solve_universal(0.0, universal_options(kConfig)).initial_slope;
  const double collocation = oracle::universal_by_collocation().initial_slope;
  const double diff = std::abs(shooting - collocation);

  auto rhs = [](double x, const ode::State& s) { return ode::State{s[1], universal_rhs(x, s[0])}; };
  ode::Integrator integ(rhs, 1e3, {144e-9, -432e-12}, -1.0, {1e-13, 1e-300});
  double exact_err = 0.0;
  for (double x : {100.0, 10.0, 1.0}) {
    integ.advance(x);
    exact_err = std::max(exact_err, std::abs(integ.y()[0] / (144.0 / (x * x * x)) - 1.0));
    exact_err = std::max(exact_err, std::abs(integ.y()[1] / (-432.0 / (x * x * x * x)) - 1.0));
  }
  const double t = seconds_since(t0);
  return {diff <= 1e-6 && exact_err <= 1e-10 && t < 1.0,
          fmt("shooting B=%.12f collocation B=%.12f |diff|=%.1e; 144/x^3 rel err %.1e; %.2fs", shooting, collocation,
              diff, exact_err, t)};
}

Outcome residuals() {
  double worst_ratio = 0.0;
  std::string worst;
  bool ok = true;
  for (const auto& s : tracked) {
    ok = ok && s.residual < s.tolerance;
    if (s.residual / s.tolerance > worst_ratio) {
      worst_ratio = s.residual / s.tolerance;
      worst = fmt("%s residual %.2e (tol %.0e)", s.name.c_str(), s.residual, s.tolerance);
    }
  }
  return {ok, fmt("%zu solutions; worst: %s", tracked.size(), worst.c_str())};
}

Outcome virial() {
  double worst = 0.0;
  for (double Z : {1.0, 2.0, 10.0})
    for (double f : {1.0, 0.5}) worst = std::max(worst, virial_check(atom(Z, f * Z)));
  return {worst <= 1e-3, fmt("max |2T-(A-R)|/|E| = %.2e over Z in {1,2,10}, N/Z in {1,0.5}", worst)};
}

Outcome energy_scaling() {
  const auto t0 = std::chrono::steady_clock::now();
  const double e1 = atom(1.0, 1.0).energy.total;
  double worst = 0.0;
  for (double Z : {2.0, 10.0})
    worst = std::max(worst, std::abs(std::pow(Z, -7.0 / 3.0) * atom(Z, Z).energy.total - e1) / std::abs(e1));
  const double t = seconds_since(t0);
  return {worst <= 1e-6 && t < 10.0, fmt("max relative deviation %.2e; E(1,1) = %.12f; %.2fs", worst, e1, t)};
}

Outcome density_scaling() {
  const auto one = atom(1.0, 1.0);
  const auto eight = atom(8.0, 8.0);
  const auto scaled = rescale_density(one, 8.0);
  const auto& direct = eight.radial().density;
  const auto& g = direct.grid;
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = 4.0 * std::numbers::pi * g[i] * g[i] * direct.values[i];
  const auto cum = g.cumulative(f);
  const double head = g.head_correction(f);
  double worst = 0.0, R99 = 0.0;
  for (std::size_t i = 0; i < g.size() && head + cum[i] <= 0.99 * 8.0; ++i) {
    R99 = g[i];
    const auto v = scaled.grid.interpolate(scaled.values, g[i]);
    if (!v) continue;
    worst = std::max(worst, std::abs(*v - direct.values[i]) / direct.values[i]);
  }
  return {worst <= 1e-4 && R99 > 0.0, fmt("max relative deviation %.2e on r <= %.3f (99%% of the charge)", worst, R99)};
}

Outcome chemical_potential() {
  const double Z = 1.0;
  std::vector<double> mu;
  for (double f : {0.25, 0.5, 0.75, 1.0}) mu.push_back(atom(Z, f * Z).mu);
  bool decreasing = true;
  for (std::size_t i = 1; i < mu.size(); ++i) decreasing = decreasing && mu[i] < mu[i - 1];
  double worst = 0.0;
  const double dN = 1e-4;
  for (std::size_t k = 0; k < 3; ++k) {
    const double N = 0.25 * static_cast<double>(k + 1) * Z;
    const double fd = -(solve_atom(Z, N + dN, kConfig).energy.total - solve_atom(Z, N - dN, kConfig).energy.total) / (2 * dN);
    worst = std::max(worst, std::abs(fd - mu[k]) / mu[k]);
  }
  const bool ok = decreasing && std::abs(mu.back()) <= 1e-6 && worst <= 1e-3;
  return {ok, fmt("mu(N/Z=.25,.5,.75,1) = %.6f, %.6f, %.6f, %.1e; -dE/dN vs mu max rel %.1e", mu[0], mu[1], mu[2],
                  mu[3], worst)};
}

Outcome sommerfeld_tail() {
  double worst = 0.0;
  std::string parts;
  for (double Z : {1.0, 10.0}) {
    const double C = tail_constant(atom(Z, Z));
    worst = std::max(worst, std::abs(C - kSommerfeldConstant) / kSommerfeldConstant);
    parts += fmt("Z=%g: %.3f ", Z, C);
  }
  return {worst <= 0.05, parts + fmt("vs 243 pi = %.3f; max rel deviation %.1e", kSommerfeldConstant, worst)};
}

Outcome compact_support() {
  const double Z = 2.0;
  std::vector<double> radii, mus;
  bool ok = true;
  for (double f : {0.75, 0.5, 0.25}) {
    const auto sol = atom(Z, f * Z);
    const auto R = support_radius(sol);
    ok = ok && R.has_value() && std::isfinite(*R);
    radii.push_back(R.value_or(INFINITY));
    mus.push_back(sol.mu);
  }
  for (std::size_t i = 1; i < radii.size(); ++i) ok = ok && mus[i] > mus[i - 1] && radii[i] < radii[i - 1];
  ok = ok && !support_radius(atom(Z, Z)).has_value();
  return {ok, fmt("Z=2: N=1 support radius %.4f; radii %.4f > %.4f > %.4f as mu %.4f < %.4f < %.4f; neutral unbounded",
                  radii[1], radii[0], radii[1], radii[2], mus[0], mus[1], mus[2])};
}

Outcome teller() {
  const auto t0 = std::chrono::steady_clock::now();
  const double E_atom = atom(1.0, 1.0).energy.total;
  std::vector<double> gaps;
  const double seps[] = {0.5, 1.0, 2.0, 5.0};
  for (double d : seps) {
    const auto nuclei = h2(d);
    gaps.push_back(molecule(fmt("H2 d=%g", d), nuclei, 2.0, default_grid(nuclei, kConfig)).energy.total - 2.0 * E_atom);
  }
  bool ok = true;
  for (std::size_t i = 0; i < gaps.size(); ++i) ok = ok && gaps[i] > 0.0 && (i == 0 || gaps[i] < gaps[i - 1]);
  const double t = seconds_since(t0);
  return {ok && t < 600.0, fmt("%zu^3 grid: gaps %.4f, %.4f, %.4f, %.4f at d = 0.5, 1, 2, 5; %.1fs", kConfig.grid3d_extent,
                               gaps[0], gaps[1], gaps[2], gaps[3], t)};
}

Outcome pressure() {
  const double scales[] = {1.0, 1.25, 1.5, 2.0};
  const auto base = h2(1.0);
  std::vector<NuclearConfiguration> geoms;
  for (double l : scales) geoms.push_back(dilate_about_centroid(base, l));
  const auto grid = default_grid(geoms, kConfig);
  std::vector<double> E;
  for (std::size_t i = 0; i < geoms.size(); ++i) E.push_back(molecule(fmt("H2 dilated %g", scales[i]), geoms[i], 2.0, grid).energy.total);
  bool ok = true;
  for (std::size_t i = 1; i < E.size(); ++i) ok = ok && E[i] < E[i - 1];
  return {ok, fmt("H2 (d=1) energies %.6f, %.6f, %.6f, %.6f at l = 1, 1.25, 1.5, 2", E[0], E[1], E[2], E[3])};
}

Outcome cross_validation() {
  const double E_radial = atom(1.0, 1.0).energy.total;
  const auto nucleus = NuclearConfiguration::atom(1.0);
  double err[2];
  std::size_t n[2] = {kConfig.grid3d_extent / 2, kConfig.grid3d_extent};
  for (int k = 0; k < 2; ++k) {
    SolverConfig sc = kConfig;
    sc.grid3d_extent = n[k];
    const auto sol = molecule(fmt("atom Z=1 on %zu^3", n[k]), nucleus, 1.0, default_grid(nucleus, sc));
    err[k] = std::abs(sol.energy.total - E_radial) / std::abs(E_radial);
  }
  const double order = std::log2(err[0] / err[1]);
  return {err[1] <= 0.01 && err[1] < err[0] && order >= 1.5,
          fmt("relative error %.2e (%zu^3) -> %.2e (%zu^3), observed order %.2f", err[0], n[0], err[1], n[1], order)};
}

Outcome convexity() {
  const auto nucleus = NuclearConfiguration::atom(1.0);
  const auto plain = convexity_check(nucleus, 100);
  ConvexityOptions dirac;
  dirac.cD = 0.7386;
  const auto broken = convexity_check(nucleus, 100, dirac);
  return {plain.worst_gap >= -1e-9 && broken.worst_gap < 0.0,
          fmt("min midpoint gap %.2e over 100 pairs; with Dirac (cD=0.7386) min gap %.2e (trial %zu, seed %llu)",
              plain.worst_gap, broken.worst_gap, broken.worst_trial, static_cast<unsigned long long>(broken.seed))};
}

Outcome corrections() {
  const double cW = 1.0 / 9.0, cD = 0.7386;
  const double E_tf = atom(1.0, 1.0).energy.total;
  const auto tfw = minimize_corrected_atom(1.0, 1.0, cW, 0.0, kConfig);
  const auto tfd = minimize_corrected_atom(1.0, 1.0, 0.0, cD, kConfig);
  track("TFW Z=1", tfw);
  track("TFD Z=1", tfd);
  const bool ordering = tfw.energy.total > E_tf && tfd.energy.total < E_tf;

  // Gradient check at the converged TFW density with both corrections on.
  const CorrectedFunctional F(tfw.radial().density.grid, 1.0, cW, cD);
  std::vector<double> phi(tfw.radial().density.values.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = std::sqrt(tfw.radial().density.values[i]);
  const auto g = F.gradient(phi);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double grad_err = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(phi.size()), p = phi, m = phi;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = u(rng) * phi[i];
    const double eps = 1e-4;
    double an = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      p[i] += eps * v[i];
      m[i] -= eps * v[i];
      an += g[i] * v[i];
    }
    const double fd = (F.value(p) - F.value(m)) / (2.0 * eps);
    grad_err = std::max(grad_err, std::abs(fd - an) / std::abs(an));
  }

  std::vector<double> shift;
  for (double Z : {10.0, 20.0, 40.0}) {
    const auto sol = minimize_corrected_atom(Z, Z, cW, 0.0, kConfig);
    track(fmt("TFW Z=%g", Z), sol);
    shift.push_back((sol.energy.total - atom(Z, Z).energy.total) / (Z * Z));
  }
  const auto [lo, hi] = std::minmax_element(shift.begin(), shift.end());
  const double spread = (*hi - *lo) / ((shift[0] + shift[1] + shift[2]) / 3.0);
  return {ordering && grad_err <= 1e-5 && spread <= 0.15,
          fmt("E_TFW=%.6f > E_TF=%.6f > E_TFD=%.6f; gradient vs FD %.1e; (E_TFW-E_TF)/Z^2 = %.4f, %.4f, %.4f "
              "(spread %.1f%%)",
              tfw.energy.total, E_tf, tfd.energy.total, grad_err, shift[0], shift[1], shift[2], 100.0 * spread)};
}

Outcome phi_positivity() {
  double worst = INFINITY;
  std::string where;
  for (const auto& s : tracked)
    if (s.min_phi < worst) {
      worst = s.min_phi;
      where = s.name;
    }
  return {worst >= -1e-10, fmt("%zu solutions; min Phi = %.3e (%s)", tracked.size(), worst, where.c_str())};
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> check;
  };
  // Criteria 2 and 14 inspect every solution produced by the others, so they run last.
  const std::vector<Criterion> criteria = {
      {1, "universal constant", universal_constant},
      {3, "virial identity", virial},
      {4, "energy scaling", energy_scaling},
      {5, "density scaling", density_scaling},
      {6, "chemical potential", chemical_potential},
      {7, "Sommerfeld tail", sommerfeld_tail},
      {8, "compact support", compact_support},
      {9, "Teller instability", teller},
      {10, "pressure positivity", pressure},
      {11, "3D/radial cross-validation", cross_validation},
      {12, "convexity", convexity},
      {13, "corrections", corrections},
      {2, "TF-equation residual", residuals},
      {14, "Phi positivity", phi_positivity},
  };
  std::vector<std::pair<int, std::string>> lines;
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = guarded(c.check);
    failures += r.passed ? 0 : 1;
    lines.push_back({c.id, fmt("%s %2d %-27s %s [%.1fs]", r.passed ? "PASS" : "FAIL", c.id, c.title, r.detail.c_str(),
                               seconds_since(t0))});
    std::fprintf(stderr, "%s\n", lines.back().second.c_str());
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) std::printf("%s\n", l.second.c_str());
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
