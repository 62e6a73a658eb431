#include "tf/energy.hpp"

#include "tf/error.hpp"
#include "tf/poisson.hpp"
#include "tf/units.hpp"

#include <cmath>
#include <numbers>

namespace tf {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

void require_single_centre(const NuclearConfiguration& config) {
  if (config.size() != 1) throw DomainError("radial densities need a single-nucleus configuration");
}

double guarded(double value, const char* term) {
  if (!std::isfinite(value)) throw DomainError(std::string("non-integrable density: ") + term + " diverges");
  return value;
}

} // namespace

EnergyBreakdown EnergyBreakdown::make(double kinetic, double attraction, double repulsion, double nuclear,
                                      double weizsacker, double dirac) {
  EnergyBreakdown e{kinetic, attraction, repulsion, nuclear, weizsacker, dirac, 0.0};
  e.total = kinetic - attraction + repulsion + nuclear + weizsacker + dirac;
  return e;
}

std::vector<double> hartree_potential(const RadialDensity& density) {
  density.validate();
  const auto& g = density.grid;
  const std::size_t n = g.size();
  std::vector<double> shell(n), inner(n);
  for (std::size_t i = 0; i < n; ++i) {
    shell[i] = kFourPi * g[i] * g[i] * density.values[i];
    inner[i] = kFourPi * g[i] * density.values[i];
  }
  const auto Q = g.cumulative(shell);
  const double q0 = g.head_correction(shell);
  const auto P = g.cumulative(inner);
  const double p_total = P.back() + g.tail_correction(inner);
  std::vector<double> H(n);
  for (std::size_t i = 0; i < n; ++i) H[i] = (q0 + Q[i]) / g[i] + (p_total - P[i]);
  return H;
}

ScalarField3D hartree_potential(const ScalarField3D& density, const PoissonSolver& poisson) {
  return poisson.solve(density);
}

ScalarField3D hartree_potential(const ScalarField3D& density) {
  return PoissonSolver(density.grid).solve(density);
}

EnergyBreakdown evaluate_energy(const RadialDensity& density, const NuclearConfiguration& config) {
  require_single_centre(config);
  density.validate();
  const double Z = config[0].charge;
  const auto& g = density.grid;
  const std::size_t n = g.size();
  const auto H = hartree_potential(density);
  std::vector<double> kin(n), att(n), rep(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = g[i], rho = density.values[i];
    const double w = kFourPi * r * r;
    kin[i] = w * std::pow(rho, 5.0 / 3.0);
    att[i] = w * (Z / r) * rho;
    rep[i] = w * H[i] * rho;
  }
  const double kinetic = guarded(0.6 * kGamma * g.integrate(kin), "kinetic term");
  const double attraction = guarded(g.integrate(att), "attraction term");
  const double repulsion = guarded(0.5 * g.integrate(rep), "repulsion term");
  return EnergyBreakdown::make(kinetic, attraction, repulsion, nuclear_repulsion(config));
}

EnergyBreakdown evaluate_energy(const ScalarField3D& density, const NuclearConfiguration& config,
                                const PoissonSolver& poisson) {
  const auto& g = density.grid;
  const auto H = poisson.solve(density);
  double kin = 0.0, att = 0.0, rep = 0.0;
  for (std::size_t k = 0; k < g.extents[2]; ++k)
    for (std::size_t j = 0; j < g.extents[1]; ++j)
      for (std::size_t i = 0; i < g.extents[0]; ++i) {
        const std::size_t idx = g.index(i, j, k);
        const double rho = density.values[idx];
        if (rho < 0.0 || !std::isfinite(rho)) throw DomainError("density must be finite and nonnegative");
        if (rho == 0.0) continue;
        kin += std::pow(rho, 5.0 / 3.0);
        att += external_potential(config, g.position(i, j, k)) * rho;
        rep += H.values[idx] * rho;
      }
  const double dv = g.cell_volume();
  return EnergyBreakdown::make(0.6 * kGamma * kin * dv, att * dv, 0.5 * rep * dv, nuclear_repulsion(config));
}

EnergyBreakdown evaluate_energy(const ScalarField3D& density, const NuclearConfiguration& config) {
  return evaluate_energy(density, config, PoissonSolver(density.grid));
}

double tf_residual(std::span<const double> rho, std::span<const double> phi, double mu,
                   std::span<const double> weights) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double lhs = kGamma * std::cbrt(rho[i] * rho[i]);
    const double rhs = std::max(0.0, phi[i] - mu);
    num += weights[i] * std::abs(lhs - rhs);
    den += weights[i] * (lhs + rhs);
  }
  return den > 0.0 ? num / den : 0.0;
}

double tf_residual(const RadialDensity& density, double mu, const NuclearConfiguration& config) {
  require_single_centre(config);
  if (mu < 0.0) throw DomainError("chemical potential must be nonnegative");
  const double Z = config[0].charge;
  const auto H = hartree_potential(density);
  const auto& g = density.grid;
  std::vector<double> phi(g.size()), w(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    phi[i] = Z / g[i] - H[i];
    w[i] = kFourPi * g[i] * g[i] * std::abs(g.weights()[i]);
  }
  return tf_residual(density.values, phi, mu, w);
}

double tf_residual(const ScalarField3D& density, double mu, const NuclearConfiguration& config) {
  if (mu < 0.0) throw DomainError("chemical potential must be nonnegative");
  const auto& g = density.grid;
  const auto H = hartree_potential(density);
  std::vector<double> phi(g.size());
  for (std::size_t k = 0; k < g.extents[2]; ++k)
    for (std::size_t j = 0; j < g.extents[1]; ++j)
      for (std::size_t i = 0; i < g.extents[0]; ++i) {
        const std::size_t idx = g.index(i, j, k);
        phi[idx] = external_potential(config, g.position(i, j, k)) - H.values[idx];
      }
  std::vector<double> w(g.size(), g.cell_volume());
  return tf_residual(density.values, phi, mu, w);
}

} // namespace tf
