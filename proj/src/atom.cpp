#include "tf/atom.hpp"

#include "tf/error.hpp"
#include "tf/units.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace tf {

UniversalOptions universal_options(const SolverConfig& config) {
  return {config.radial_xmin, config.radial_xmax, config.radial_node_count, config.ode_tolerance};
}

namespace {

TFSolution empty_atom(double Z, const SolverConfig& config) {
  const double a = atomic_length_scale(Z);
  auto grid = RadialGrid::logarithmic(config.radial_xmin * a, config.radial_xmax * a, config.radial_node_count, true);
  std::vector<double> phi(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) phi[i] = Z / grid[i];
  RadialDensity rho{grid, std::vector<double>(grid.size(), 0.0)};
  TFSolution sol{NuclearConfiguration::atom(Z), RadialFields{std::move(rho), std::move(phi)}};
  // No electrons: any mu above sup Phi is a multiplier; report +inf.
  sol.mu = std::numeric_limits<double>::infinity();
  sol.energy = EnergyBreakdown::make(0.0, 0.0, 0.0, 0.0);
  sol.electron_count = 0.0;
  sol.support_end = 0.0;
  return sol;
}

} // namespace

TFSolution atom_from_universal(double Z, const UniversalSolution& u, const SolverConfig& config) {
  const double a = atomic_length_scale(Z);
  const auto grid = u.grid.scaled(a);
  const bool ion = u.support_end.has_value();
  const double mu = ion ? u.q * Z / (a * *u.support_end) : 0.0;
  const std::size_t edge = ion ? grid.segment_bounds()[1] : grid.size();

  std::vector<double> rho(grid.size(), 0.0), phi(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    if (i <= edge && i < grid.size()) {
      const double w = Z * u.y[i] / r;
      phi[i] = w + mu;
      rho[i] = density_from_potential(w);
    }
    if (ion && i >= edge) {
      phi[i] = u.q * Z / r;
      rho[i] = 0.0;
    }
  }

  const auto config_nuc = NuclearConfiguration::atom(Z);
  RadialDensity density{grid, std::move(rho)};
  TFSolution sol{config_nuc, RadialFields{std::move(density), std::move(phi)}};
  sol.mu = mu;
  sol.electron_count = Z * (1.0 - u.q);
  if (!ion) sol.electron_count = Z;
  if (ion) sol.support_end = a * *u.support_end;
  const auto& d = sol.radial().density;
  sol.energy = evaluate_energy(d, config_nuc);
  sol.residual = tf_residual(d, mu, config_nuc);
  sol.residual_history = {sol.residual};
  if (!(sol.residual < config.residual_tolerance))
    throw ConvergenceError("radial atom residual " + std::to_string(sol.residual) + " above tolerance",
                           sol.residual_history);
  return sol;
}

TFSolution solve_atom(double Z, double N, const SolverConfig& config) {
  config.validate();
  if (!(Z > 0.0) || !std::isfinite(Z)) throw DomainError("nuclear charge must be positive");
  if (!(N >= 0.0) || !std::isfinite(N)) throw DomainError("electron number must be nonnegative");
  const bool clamped = N > Z;
  const double Neff = clamped ? Z : N;
  TFSolution sol = Neff == 0.0 ? empty_atom(Z, config)
                               : atom_from_universal(Z, solve_universal(1.0 - Neff / Z, universal_options(config)),
                                                     config);
  sol.clamped = clamped;
  if (clamped) sol.electron_count = Z;
  return sol;
}

std::vector<ChemicalPotentialSample> chemical_potential_curve(double Z, std::span<const double> samples,
                                                              const SolverConfig& config) {
  std::vector<ChemicalPotentialSample> out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double N = samples[i];
    if (!(N > 0.0) || N > Z) throw DomainError("chemical potential samples must lie in (0, Z]");
    if (i > 0 && !(N > samples[i - 1])) throw DomainError("chemical potential samples must be strictly increasing");
    out.push_back({N, solve_atom(Z, N, config).mu});
  }
  return out;
}

RadialDensity rescale_density(const TFSolution& sol, double Z) {
  if (!sol.is_radial() || sol.config.size() != 1 || sol.config[0].charge != 1.0)
    throw DomainError("rescale_density expects a radial solution at Z = 1");
  if (!(Z > 0.0)) throw DomainError("nuclear charge must be positive");
  const auto& d = sol.radial().density;
  RadialDensity out{d.grid.scaled(1.0 / std::cbrt(Z)), d.values};
  for (auto& v : out.values) v *= Z * Z;
  return out;
}

double tail_constant(const TFSolution& sol) {
  if (!sol.is_radial()) throw DomainError("tail_constant expects a radial solution");
  if (sol.support_end || sol.mu != 0.0 || !sol.neutral())
    throw DomainError("tail_constant needs a neutral atom: an ion has compact support and no tail");
  const auto& d = sol.radial().density;
  const auto& g = d.grid;
  const double rmax = g.back();
  if (rmax / g.front() < 100.0) throw DomainError("radial grid too short to contain an asymptotic window");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i] >= 0.1 * rmax) idx.push_back(i);
  if (idx.size() < 8) throw DomainError("too few nodes in the outer decade for a tail fit");

  const double lam = sommerfeld_exponent();
  constexpr int kTerms = 5;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(idx.size()), kTerms);
  Eigen::VectorXd b(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double r = g[idx[k]];
    const double t = std::pow(r / rmax, -lam);
    const auto row = static_cast<Eigen::Index>(k);
    double tk = 1.0;
    for (int j = 0; j < kTerms; ++j, tk *= t) A(row, j) = tk;
    b(row) = std::pow(r, 6.0) * d.values[idx[k]];
  }
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
  return coef(0);
}

} // namespace tf
