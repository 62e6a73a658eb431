#include "tf/atom.hpp"
#include "tf/error.hpp"
#include "tf/molecular.hpp"
#include "tf/poisson.hpp"
#include "tf/units.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace tf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

template <class F>
ScalarField3D sample(const Grid3D& g, F&& f) {
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < g.extents[2]; ++k)
    for (std::size_t j = 0; j < g.extents[1]; ++j)
      for (std::size_t i = 0; i < g.extents[0]; ++i) v[g.index(i, j, k)] = f(g.position(i, j, k));
  return {g, v};
}

double norm(const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

SolverConfig coarse() {
  SolverConfig c;
  c.grid3d_extent = 48;
  return c;
}

NuclearConfiguration h2(double d) { return NuclearConfiguration({{1.0, {0, 0, -0.5 * d}}, {1.0, {0, 0, 0.5 * d}}}); }

} // namespace

TEST_CASE("Poisson: Gaussian, ball and linearity") {
  const std::size_t n = 64;
  const double h = 0.25;
  const auto g = Grid3D::centred_cube({0, 0, 0}, n, h);
  const double box = h * static_cast<double>(n - 1);
  const PoissonSolver solver(g);

  SECTION("Gaussian of width 4h") {
    const double sigma = 4.0 * h;
    const auto src = sample(g, [&](const Vec3& x) {
      const double r = norm(x);
      return std::exp(-r * r / (2 * sigma * sigma)) / std::pow(2 * pi * sigma * sigma, 1.5);
    });
    const auto u = solver.solve(src);
    double worst = 0.0;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const std::size_t i = idx % n, j = (idx / n) % n, k = idx / (n * n);
      const double r = norm(g.position(i, j, k));
      if (r < 3 * sigma || r > box / 4) continue;
      const double exact = std::erf(r / (sigma * std::sqrt(2.0))) / r;
      worst = std::max(worst, std::abs(u.values[idx] - exact) / exact);
    }
    CHECK(worst < 1e-4);
  }
  SECTION("uniform ball") {
    const double R = 2.0;
    auto src = sample(g, [&](const Vec3& x) { return norm(x) < R ? 1.0 : 0.0; });
    const double N = src.integral();
    const auto u = solver.solve(src);
    for (std::size_t i : {0u, 5u, 10u}) {
      const auto x = g.position(i, n / 2, n / 2);
      CHECK_THAT(u.values[g.index(i, n / 2, n / 2)], WithinRel(N / norm(x), 1e-3));
    }
  }
  SECTION("linearity") {
    const auto s1 = sample(g, [](const Vec3& x) { return std::exp(-norm(x)); });
    const auto s2 = sample(g, [](const Vec3& x) { return std::exp(-0.5 * (x[0] - 1) * (x[0] - 1) - x[1] * x[1]); });
    auto s3 = s1;
    for (std::size_t i = 0; i < s3.values.size(); ++i) s3.values[i] = 2.0 * s1.values[i] - 0.7 * s2.values[i];
    const auto u1 = solver.solve(s1), u2 = solver.solve(s2), u3 = solver.solve(s3);
    double worst = 0.0;
    for (std::size_t i = 0; i < u3.values.size(); ++i)
      worst = std::max(worst, std::abs(u3.values[i] - (2.0 * u1.values[i] - 0.7 * u2.values[i])));
    CHECK(worst < 1e-10);
  }
  CHECK_THROWS_AS(PoissonSolver(Grid3D{{0, 0, 0}, {0.1, 0.2, 0.1}, {32, 32, 32}}), ConfigurationError);
}

TEST_CASE("mu bisection") {
  const auto g = Grid3D::centred_cube({0, 0, 0}, 32, 0.5);
  const double c = 0.8;
  const auto phi = sample(g, [&](const Vec3& x) { return std::abs(x[0]) < 2.0 ? c : 0.0; });
  double vol = 0.0;
  for (double p : phi.values) vol += p > 0.0 ? g.cell_volume() : 0.0;
  const double N = kInvGamma32 * std::pow(c / 2, 1.5) * vol;
  CHECK_THAT(mu_bisection(phi, N), WithinRel(c / 2, 1e-10));
  const double full = kInvGamma32 * std::pow(c, 1.5) * vol;
  CHECK_THAT(mu_bisection(phi, full), WithinAbs(0.0, 1e-12));
  CHECK_THROWS_AS(mu_bisection(phi, 1.01 * full), InfeasibleError);
  CHECK_THROWS_AS(mu_bisection(phi, -1.0), DomainError);

  const auto smooth = sample(g, [](const Vec3& x) { return 1.0 / (1.0 + norm(x)); });
  CHECK(mu_bisection(smooth, 0.1) > mu_bisection(smooth, 0.2));
}

TEST_CASE("default grid keeps nuclei off nodes") {
  SolverConfig sc = coarse();
  const auto cfg = NuclearConfiguration({{1.0, {0, 0, 0}}, {2.0, {0, 0, 1.0}}});
  const auto g = default_grid(cfg, sc);
  CHECK(g.extents[0] == 48);
  CHECK(g.is_cubic());
  for (const auto& nuc : cfg.nuclei()) {
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double u = (nuc.position[a] - g.origin[a]) / g.spacing[a];
      d2 += (u - std::round(u)) * (u - std::round(u));
    }
    CHECK(d2 >= 0.01);
    for (int a = 0; a < 3; ++a) {
      CHECK(nuc.position[a] > g.origin[a] + sc.grid3d_padding * atomic_length_scale(nuc.charge) - 1e-9);
    }
  }
}

TEST_CASE("single atom in 3D matches the radial solver") {
  const auto sc = coarse();
  const auto s = scf_solve(NuclearConfiguration::atom(1.0), 1.0, sc);
  const double radial = solve_atom(1.0, 1.0).energy.total;
  CHECK_THAT(s.energy.total, WithinRel(radial, 1e-2));
  CHECK(s.residual < sc.scf_residual_tolerance);
  CHECK_FALSE(s.is_radial());
  const auto& pv = s.grid().potential.values;
  CHECK(*std::min_element(pv.begin(), pv.end()) >= -1e-10);
}

TEST_CASE("3D edge cases") {
  const auto sc = coarse();
  const auto cfg = h2(2.0);
  const auto empty = scf_solve(cfg, 0.0, sc);
  CHECK(empty.energy.total == nuclear_repulsion(cfg));
  const auto& ev = empty.grid().density.values;
  CHECK(*std::max_element(ev.begin(), ev.end()) == 0.0);
  CHECK_THROWS_AS(scf_solve(cfg, -1.0, sc), DomainError);

  SolverConfig tight = sc;
  tight.max_iterations = 2;
  try {
    scf_solve(cfg, 2.0, tight);
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.history().size() == 2);
  }
}

TEST_CASE("diatomic: positivity of Phi, clamping and determinism") {
  const auto sc = coarse();
  const auto a = scf_solve(h2(2.0), 2.0, sc);
  const auto b = scf_solve(h2(2.0), 3.0, sc);
  CHECK(b.clamped);
  CHECK(b.electron_count == 2.0);
  CHECK(a.iterations == b.iterations);
  CHECK(a.energy.total == b.energy.total);
  CHECK(a.grid().density.values == b.grid().density.values);
  const auto& pa = a.grid().potential.values;
  CHECK(*std::min_element(pa.begin(), pa.end()) >= -1e-10);
  CHECK(a.residual < sc.scf_residual_tolerance);
}

TEST_CASE("Teller gap and pressure") {
  const auto sc = coarse();
  CHECK(teller_gap(NuclearConfiguration::atom(3.0), 3.0, sc) == 0.0);
  CHECK_THROWS_AS(teller_gap(h2(1.0), 1.0, sc), DomainError);
  const double g1 = teller_gap(h2(1.0), 2.0, sc);
  CHECK(g1 > 0.0);

  const std::vector<double> one{1.0};
  const auto base = pressure_scan(h2(1.0), one, sc);
  REQUIRE(base.size() == 1);
  CHECK(base[0].scale == 1.0);
  const std::vector<double> bad{1.0, 0.8};
  CHECK_THROWS_AS(pressure_scan(h2(1.0), bad, sc), DomainError);
  const std::vector<double> late{1.5, 2.0};
  CHECK_THROWS_AS(pressure_scan(h2(1.0), late, sc), DomainError);

  const auto d = dilate_about_centroid(NuclearConfiguration({{1.0, {0, 0, 0}}, {3.0, {0, 0, 4}}}), 2.0);
  CHECK_THAT(d[0].position[2], WithinAbs(-3.0, 1e-14));
  CHECK_THAT(d[1].position[2], WithinAbs(5.0, 1e-14));
}
