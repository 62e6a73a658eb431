#pragma once

#include "tf/grid3d.hpp"
#include "tf/nuclear_configuration.hpp"
#include "tf/solution.hpp"

#include <span>
#include <utility>
#include <vector>

namespace tf {

/// mu >= 0 with sum_nodes h^3 gamma^(-3/2) [Phi - mu]_+^(3/2) = N. Throws
/// InfeasibleError when N exceeds the count at mu = 0.
double mu_bisection(const ScalarField3D& phi, double N, double tolerance = 1e-12);

/// Same with a fixed part of the density: the count is
/// fixed_charge + sum_nodes h^3 (gamma^(-3/2) [Phi - mu]_+^(3/2) - fixed_density).
double mu_bisection(const ScalarField3D& phi, double N, double tolerance, double fixed_charge,
                    std::span<const double> fixed_density);

/// Cubic grid centred on the nuclei, padded by config.grid3d_padding atomic
/// lengths, with no nucleus closer than a tenth of a cell to a node. Covers
/// every configuration passed in.
Grid3D default_grid(std::span<const NuclearConfiguration> configs, const SolverConfig& config);
Grid3D default_grid(const NuclearConfiguration& nuclei, const SolverConfig& config);

/// Self-consistent 3D Thomas-Fermi solution. N > total charge is clamped.
TFSolution scf_solve(const NuclearConfiguration& nuclei, double N, const SolverConfig& config = {});
TFSolution scf_solve(const NuclearConfiguration& nuclei, double N, const SolverConfig& config, const Grid3D& grid);

/// E_molecule - sum_j E_atom(Z_j, Z_j) for the neutral molecule; 0 for one nucleus.
double teller_gap(const NuclearConfiguration& nuclei, double N, const SolverConfig& config = {});
double teller_gap(const NuclearConfiguration& nuclei, double N, const SolverConfig& config, const Grid3D& grid);

struct PressurePoint {
  double scale;
  double energy;
};

/// Neutral energies of the dilations R_j -> l R_j (about the centroid), all on one grid.
std::vector<PressurePoint> pressure_scan(const NuclearConfiguration& nuclei, std::span<const double> scales,
                                         const SolverConfig& config = {});

/// Dilation of the nuclear positions about their charge-weighted centroid.
NuclearConfiguration dilate_about_centroid(const NuclearConfiguration& nuclei, double scale);

} // namespace tf
