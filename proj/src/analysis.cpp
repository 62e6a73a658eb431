#include "tf/analysis.hpp"

#include "tf/atom.hpp"
#include "tf/corrections.hpp"
#include "tf/error.hpp"
#include "tf/molecular.hpp"
#include "tf/poisson.hpp"
#include "tf/units.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace tf {

double virial_check(const EnergyBreakdown& e) {
  if (e.total == 0.0) return 0.0;
  return std::abs(2.0 * e.kinetic - (e.attraction - e.repulsion)) / std::abs(e.total);
}

double virial_check(const TFSolution& sol) { return virial_check(sol.energy); }

double scaling_check(std::span<const double> Z_list, double lambda, const SolverConfig& config) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("scaling_check: lambda must lie in (0, 1]");
  if (Z_list.empty()) return 0.0;
  auto reduced = [&](double Z) { return solve_atom(Z, lambda * Z, config).energy.total / std::pow(Z, 7.0 / 3.0); };
  const double e0 = reduced(Z_list[0]);
  double worst = 0.0;
  for (std::size_t k = 1; k < Z_list.size(); ++k) worst = std::max(worst, std::abs(reduced(Z_list[k]) - e0) / std::abs(e0));
  return worst;
}

namespace {

void check_admissible(std::span<const double> v, const char* who) {
  for (double x : v)
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError(std::string(who) + ": density must be finite and nonnegative");
}

double radial_functional(const RadialDensity& rho, const NuclearConfiguration& config, double cW, double cD) {
  double E = evaluate_energy(rho, config).total;
  if (cW > 0.0) E += weizsacker_energy(rho, cW);
  if (cD > 0.0) E += dirac_energy(rho, cD);
  return E;
}

double grid_functional(const ScalarField3D& rho, const NuclearConfiguration& config, const PoissonSolver& poisson,
                       double cW, double cD) {
  double E = evaluate_energy(rho, config, poisson).total;
  if (cW > 0.0) E += weizsacker_energy(rho, cW);
  if (cD > 0.0) E += dirac_energy(rho, cD);
  return E;
}

template <class Field>
Field midpoint(const Field& a, const Field& b) {
  Field m = a;
  for (std::size_t i = 0; i < m.values.size(); ++i) m.values[i] = 0.5 * (a.values[i] + b.values[i]);
  return m;
}

// Random admissible density: a few decaying exponentials per nucleus,
// normalised to a random fraction in [0.1, 1] of the nuclear charge. Both
// members of a pair share the fraction.
struct DensityDraw {
  std::mt19937_64& rng;

  struct Shape {
    double c[3], alpha[3], fraction;
  };

  Shape draw() {
    std::uniform_real_distribution<double> c(0.0, 1.0), log_alpha(std::log(0.05), std::log(4.0)), frac(0.1, 1.0);
    Shape s{};
    for (int k = 0; k < 3; ++k) {
      s.c[k] = c(rng) + 1e-3;
      s.alpha[k] = std::exp(log_alpha(rng));
    }
    s.fraction = frac(rng);
    return s;
  }

  static double eval(const Shape& s, double r_over_a) {
    double v = 0.0;
    for (int k = 0; k < 3; ++k) v += s.c[k] * std::exp(-s.alpha[k] * r_over_a);
    return v;
  }
};

} // namespace

double midpoint_gap(const RadialDensity& rho1, const RadialDensity& rho2, const NuclearConfiguration& config,
                    double cW, double cD) {
  check_admissible(rho1.values, "midpoint_gap");
  check_admissible(rho2.values, "midpoint_gap");
  if (!(rho1.grid == rho2.grid)) throw DomainError("midpoint_gap: densities live on different grids");
  return 0.5 * (radial_functional(rho1, config, cW, cD) + radial_functional(rho2, config, cW, cD)) -
         radial_functional(midpoint(rho1, rho2), config, cW, cD);
}

double midpoint_gap(const ScalarField3D& rho1, const ScalarField3D& rho2, const NuclearConfiguration& config,
                    double cW, double cD) {
  check_admissible(rho1.values, "midpoint_gap");
  check_admissible(rho2.values, "midpoint_gap");
  if (!(rho1.grid == rho2.grid)) throw DomainError("midpoint_gap: densities live on different grids");
  const PoissonSolver poisson(rho1.grid);
  return 0.5 * (grid_functional(rho1, config, poisson, cW, cD) + grid_functional(rho2, config, poisson, cW, cD)) -
         grid_functional(midpoint(rho1, rho2), config, poisson, cW, cD);
}

ConvexityReport convexity_check(const NuclearConfiguration& config, std::size_t trials,
                                const ConvexityOptions& options) {
  if (trials == 0) throw DomainError("convexity_check: trials must be positive");
  std::mt19937_64 rng(options.seed);
  DensityDraw draw{rng};
  ConvexityReport report{0.0, 0, options.seed, trials};
  bool first = true;
  auto record = [&](double gap, std::size_t t) {
    if (first || gap < report.worst_gap) {
      report.worst_gap = gap;
      report.worst_trial = t;
      first = false;
    }
  };

  if (config.size() == 1) {
    const double Z = config[0].charge;
    const double a = atomic_length_scale(Z);
    const auto grid = RadialGrid::logarithmic(1e-6 * a, 1e3 * a, 2001, false);
    auto make = [&](const DensityDraw::Shape& s) {
      RadialDensity rho{grid, std::vector<double>(grid.size())};
      for (std::size_t i = 0; i < grid.size(); ++i) rho.values[i] = DensityDraw::eval(s, grid[i] / a);
      const double scale = s.fraction * Z / rho.electron_count();
      for (double& v : rho.values) v *= scale;
      return rho;
    };
    for (std::size_t t = 0; t < trials; ++t) {
      const auto s1 = draw.draw();
      auto s2 = draw.draw();
      s2.fraction = s1.fraction;
      record(midpoint_gap(make(s1), make(s2), config, options.cW, options.cD), t);
    }
    return report;
  }

  SolverConfig sc;
  sc.grid3d_extent = options.grid3d_extent;
  const Grid3D grid = default_grid(config, sc);
  const PoissonSolver poisson(grid);
  const auto nuclei = config.nuclei();
  auto make = [&](const std::vector<DensityDraw::Shape>& shapes) {
    ScalarField3D rho(grid);
    for (std::size_t n = 0; n < nuclei.size(); ++n) {
      const double a = atomic_length_scale(nuclei[n].charge);
      ScalarField3D part(grid);
      for (std::size_t k = 0; k < grid.extents[2]; ++k)
        for (std::size_t j = 0; j < grid.extents[1]; ++j)
          for (std::size_t i = 0; i < grid.extents[0]; ++i) {
            const auto x = grid.position(i, j, k);
            const auto& R = nuclei[n].position;
            const double r = std::hypot(x[0] - R[0], x[1] - R[1], x[2] - R[2]);
            part.values[grid.index(i, j, k)] = DensityDraw::eval(shapes[n], r / a);
          }
      const double scale = shapes[n].fraction * nuclei[n].charge / part.integral();
      for (std::size_t i = 0; i < rho.values.size(); ++i) rho.values[i] += scale * part.values[i];
    }
    return rho;
  };
  auto functional = [&](const ScalarField3D& rho) { return grid_functional(rho, config, poisson, options.cW, options.cD); };
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<DensityDraw::Shape> a(nuclei.size()), b(nuclei.size());
    for (auto& s : a) s = draw.draw();
    for (std::size_t n = 0; n < b.size(); ++n) {
      b[n] = draw.draw();
      b[n].fraction = a[n].fraction;
    }
    const auto r1 = make(a), r2 = make(b);
    record(0.5 * (functional(r1) + functional(r2)) - functional(midpoint(r1, r2)), t);
  }
  return report;
}

std::optional<double> support_radius(const TFSolution& sol) {
  if (!sol.is_radial()) throw DomainError("support_radius: radial solutions only");
  if (sol.electron_count == 0.0) return 0.0;
  if (sol.neutral()) return std::nullopt;
  const auto& rho = sol.radial().density;
  const auto& g = rho.grid;
  std::size_t last = g.size();
  for (std::size_t i = g.size(); i-- > 0;)
    if (rho.values[i] >= kSupportThreshold) {
      last = i;
      break;
    }
  if (last == g.size()) return g.front();
  if (last + 1 == g.size()) return std::nullopt;
  // Linear interpolation of the threshold crossing between the two nodes.
  const double r0 = g[last], r1 = g[last + 1], v0 = rho.values[last], v1 = rho.values[last + 1];
  return r0 + (r1 - r0) * (v0 - kSupportThreshold) / (v0 - v1);
}

namespace {

std::string format_list(std::span<const double> v) {
  std::ostringstream os;
  os.precision(6);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

} // namespace

std::vector<CheckResult> run_checks(const SolverConfig& config) {
  std::vector<CheckResult> out;
  const double Zs[] = {1.0, 2.0, 10.0};

  double worst_virial = 0.0;
  for (double Z : Zs)
    for (double frac : {1.0, 0.5}) worst_virial = std::max(worst_virial, virial_check(solve_atom(Z, frac * Z, config)));
  out.push_back({"virial", worst_virial, 1e-3, worst_virial <= 1e-3, "Z in {1,2,10}, N/Z in {1,0.5}"});

  for (double lambda : {1.0, 0.5}) {
    const double dev = scaling_check(Zs, lambda, config);
    out.push_back({lambda == 1.0 ? "scaling" : "scaling_ion", dev, 1e-6, dev <= 1e-6,
                   "Z in {1,2,10}, lambda=" + format_list(std::span<const double>(&lambda, 1))});
  }

  const auto atom = NuclearConfiguration::atom(1.0);
  const auto convex = convexity_check(atom, 100);
  out.push_back({"convexity", convex.worst_gap, -1e-9, convex.worst_gap >= -1e-9,
                 "Z=1, 100 pairs, seed " + std::to_string(convex.seed) + ", worst trial " +
                     std::to_string(convex.worst_trial)});
  ConvexityOptions dirac;
  dirac.cD = 0.7386;
  const auto broken = convexity_check(atom, 100, dirac);
  out.push_back({"convexity_dirac_violation", broken.worst_gap, 0.0, broken.worst_gap < 0.0,
                 "cD=0.7386, violation expected; worst trial " + std::to_string(broken.worst_trial)});

  const double fractions[] = {0.75, 0.5, 0.25};
  std::vector<double> radii, mus;
  bool finite = true;
  for (double f : fractions) {
    const auto sol = solve_atom(1.0, f, config);
    const auto R = support_radius(sol);
    finite = finite && R.has_value();
    radii.push_back(R.value_or(INFINITY));
    mus.push_back(sol.mu);
  }
  bool decreasing = finite;
  for (std::size_t i = 1; i < radii.size(); ++i) decreasing = decreasing && mus[i] > mus[i - 1] && radii[i] < radii[i - 1];
  out.push_back({"compact_support", radii[1], 0.0, decreasing,
                 "Z=1, N in {0.75,0.5,0.25}: radii " + format_list(radii) + ", mu " + format_list(mus)});
  const bool unbounded = !support_radius(solve_atom(1.0, 1.0, config)).has_value();
  out.push_back({"neutral_unbounded_support", unbounded ? 1.0 : 0.0, 1.0, unbounded, "Z=N=1"});
  return out;
}

} // namespace tf
