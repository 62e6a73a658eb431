#pragma once

#include "tf/grid3d.hpp"
#include "tf/nuclear_configuration.hpp"
#include "tf/radial_grid.hpp"

#include <vector>

namespace tf {

class PoissonSolver;

/// The terms of the energy functional. `attraction` is stored as the positive
/// integral of V rho; the optional gradient (von Weizsaecker) and exchange
/// (Dirac) terms are zero for pure Thomas-Fermi.
struct EnergyBreakdown {
  double kinetic = 0.0;
  double attraction = 0.0;
  double repulsion = 0.0;
  double nuclear = 0.0;
  double weizsacker = 0.0;
  double dirac = 0.0;
  double total = 0.0;

  static EnergyBreakdown make(double kinetic, double attraction, double repulsion, double nuclear,
                              double weizsacker = 0.0, double dirac = 0.0);
};

/// (1/r) int_{s<=r} 4 pi s^2 rho ds + int_{s>r} 4 pi s rho ds at every node.
std::vector<double> hartree_potential(const RadialDensity& density);

/// Coulomb potential of a gridded density (delegates to the Poisson solver).
ScalarField3D hartree_potential(const ScalarField3D& density);
ScalarField3D hartree_potential(const ScalarField3D& density, const PoissonSolver& poisson);

/// Energy of a spherically symmetric density centred on the single nucleus of
/// `config` (K must be 1).
EnergyBreakdown evaluate_energy(const RadialDensity& density, const NuclearConfiguration& config);

/// Energy of a gridded density: node quadrature with V evaluated analytically
/// at nodes. Nuclei must not sit on nodes.
EnergyBreakdown evaluate_energy(const ScalarField3D& density, const NuclearConfiguration& config);
EnergyBreakdown evaluate_energy(const ScalarField3D& density, const NuclearConfiguration& config,
                                const PoissonSolver& poisson);

/// Normalised L1 mismatch of gamma rho^(2/3) = [Phi - mu]_+ with Phi = V - Hartree(rho):
/// sum w |lhs - rhs| / sum w (lhs + rhs), 0 when both sides vanish identically.
double tf_residual(const RadialDensity& density, double mu, const NuclearConfiguration& config);
double tf_residual(const ScalarField3D& density, double mu, const NuclearConfiguration& config);

/// Residual for given node values of rho and Phi with quadrature weights w.
double tf_residual(std::span<const double> rho, std::span<const double> phi, double mu,
                   std::span<const double> weights);

} // namespace tf
