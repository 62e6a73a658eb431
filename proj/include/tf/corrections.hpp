#pragma once

#include "tf/grid3d.hpp"
#include "tf/radial_grid.hpp"
#include "tf/solution.hpp"

#include <span>
#include <vector>

namespace tf {

/// cW int |grad sqrt(rho)|^2.
double weizsacker_energy(const RadialDensity& density, double cW);
double weizsacker_energy(const ScalarField3D& density, double cW);

/// -cD int rho^(4/3).
double dirac_energy(const RadialDensity& density, double cD);
double dirac_energy(const ScalarField3D& density, double cD);

/// Discrete radial energy in terms of phi = sqrt(rho) at the nodes of a
/// logarithmic grid (trapezoid weights w_i = 4 pi r_i^3 h):
///   (3/5) gamma sum w phi^(10/3) - sum w (Z/r) phi^2 + (1/2) sum_ij q_i q_j / max(r_i, r_j)
///   + cW sum_edges 4 pi r_i r_{i+1} (phi_{i+1} - phi_i)^2 / (r_{i+1} - r_i) - cD sum w phi^(8/3),
/// with q = w phi^2.
class CorrectedFunctional {
public:
  CorrectedFunctional(RadialGrid grid, double Z, double cW, double cD);

  const RadialGrid& grid() const { return grid_; }
  std::span<const double> weights() const { return w_; }

  EnergyBreakdown energy(std::span<const double> phi) const;
  double value(std::span<const double> phi) const { return energy(phi).total; }
  std::vector<double> gradient(std::span<const double> phi) const;
  double electron_count(std::span<const double> phi) const;
  /// (1/r) sum_{j<=i} q_j + sum_{j>i} q_j / r_j.
  std::vector<double> hartree(std::span<const double> phi) const;

  /// Edge weights of the gradient term (length n - 1).
  std::span<const double> edge_weights() const { return e_; }
  double Z() const { return Z_; }
  double cW() const { return cW_; }
  double cD() const { return cD_; }

private:
  RadialGrid grid_;
  double Z_, cW_, cD_;
  std::vector<double> w_, e_;
};

struct MinimizerReport {
  std::size_t iterations = 0;
  std::vector<double> energies;  // accepted objective values
};

/// Minimises the corrected functional over rho = phi^2 with int rho = N by
/// preconditioned projected gradient descent with Armijo backtracking,
/// starting from the pure Thomas-Fermi atom.
TFSolution minimize_corrected_atom(double Z, double N, double cW, double cD, const SolverConfig& config = {},
                                   MinimizerReport* report = nullptr);

} // namespace tf
