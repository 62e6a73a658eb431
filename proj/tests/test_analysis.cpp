#include "tf/analysis.hpp"
#include "tf/atom.hpp"
#include "tf/energy.hpp"
#include "tf/error.hpp"
#include "tf/molecular.hpp"
#include "tf/units.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

using namespace tf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

RadialDensity exponential(double Z, double alpha, double N) {
  const double a = atomic_length_scale(Z);
  auto g = RadialGrid::logarithmic(1e-6 * a, 1e3 * a, 2001, false);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::exp(-alpha * g[i] / a);
  RadialDensity rho{g, v};
  const double s = N / rho.electron_count();
  for (double& x : rho.values) x *= s;
  return rho;
}

} // namespace

TEST_CASE("virial identity holds for atoms and flags other densities") {
  for (double Z : {1.0, 2.0, 10.0}) {
    CHECK(virial_check(solve_atom(Z, Z)) < 1e-3);
    CHECK(virial_check(solve_atom(Z, 0.5 * Z)) < 1e-3);
  }
  // Uniform ball of radius 2 holding one electron.
  auto g = RadialGrid::logarithmic(1e-6, 2.0, 2001, false);
  RadialDensity ball{g, std::vector<double>(g.size(), 3.0 / (4.0 * std::numbers::pi * 8.0))};
  CHECK(virial_check(evaluate_energy(ball, NuclearConfiguration::atom(1.0))) > 0.1);
  CHECK(virial_check(EnergyBreakdown{}) == 0.0);
}

TEST_CASE("energy scaling check") {
  const double one[] = {1.0};
  CHECK(scaling_check(one, 1.0) == 0.0);
  const double Zs[] = {1.0, 2.0, 10.0};
  CHECK(scaling_check(Zs, 1.0) <= 1e-6);
  CHECK(scaling_check(Zs, 0.5) <= 1e-6);
  CHECK_THROWS_AS(scaling_check(Zs, 0.0), DomainError);
  CHECK_THROWS_AS(scaling_check(Zs, 1.5), DomainError);
}

TEST_CASE("midpoint convexity of the functional") {
  const auto atom = NuclearConfiguration::atom(1.0);
  const auto rho = exponential(1.0, 1.0, 1.0);
  CHECK(midpoint_gap(rho, rho, atom) == 0.0);
  CHECK(midpoint_gap(rho, exponential(1.0, 0.3, 0.7), atom) > 0.0);

  const auto report = convexity_check(atom, 100);
  CHECK(report.trials == 100);
  CHECK(report.worst_gap >= -1e-9);
  const auto again = convexity_check(atom, 100);
  CHECK(again.worst_gap == report.worst_gap);
  CHECK(again.worst_trial == report.worst_trial);

  ConvexityOptions vw;
  vw.cW = 1.0 / 9.0;
  CHECK(convexity_check(atom, 50, vw).worst_gap >= -1e-9);

  ConvexityOptions dirac;
  dirac.cD = 0.7386;
  CHECK(convexity_check(atom, 100, dirac).worst_gap < 0.0);

  auto bad = rho;
  bad.values[10] = -1e-3;
  CHECK_THROWS_AS(midpoint_gap(rho, bad, atom), DomainError);
  CHECK_THROWS_AS(convexity_check(atom, 0), DomainError);
}

TEST_CASE("midpoint convexity on a Cartesian grid") {
  const NuclearConfiguration h2({{1.0, {0.0, 0.0, 0.0}}, {1.0, {1.0, 0.0, 0.0}}});
  const auto report = convexity_check(h2, 10);
  CHECK(report.worst_gap >= -1e-9);

  SolverConfig sc;
  sc.grid3d_extent = 32;
  ScalarField3D rho(default_grid(h2, sc), 1e-3);
  auto bad = rho;
  bad.values[0] = -1.0;
  CHECK(midpoint_gap(rho, rho, h2) == 0.0);
  CHECK_THROWS_AS(midpoint_gap(rho, bad, h2), DomainError);
}

TEST_CASE("support radius") {
  const auto half = solve_atom(1.0, 0.5);
  const auto R = support_radius(half);
  REQUIRE(R.has_value());
  REQUIRE(half.support_end.has_value());
  CHECK(*R <= *half.support_end);
  CHECK_THAT(*R, WithinRel(*half.support_end, 0.02));

  CHECK_FALSE(support_radius(solve_atom(1.0, 1.0)).has_value());
  CHECK(support_radius(solve_atom(1.0, 0.0)) == 0.0);

  double previous_R = INFINITY, previous_mu = -INFINITY;
  for (double N : {0.9, 0.6, 0.3, 0.1}) {
    const auto sol = solve_atom(1.0, N);
    const auto r = support_radius(sol);
    REQUIRE(r.has_value());
    CHECK(sol.mu > previous_mu);
    CHECK(*r < previous_R);
    previous_R = *r;
    previous_mu = sol.mu;
  }
}

TEST_CASE("analysis suite passes") {
  for (const auto& c : run_checks()) {
    INFO(c.name << ": " << c.value << " (" << c.detail << ")");
    CHECK(c.passed);
  }
}
