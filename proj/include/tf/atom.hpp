#pragma once

#include "tf/solution.hpp"
#include "tf/universal.hpp"

#include <span>
#include <utility>
#include <vector>

namespace tf {

UniversalOptions universal_options(const SolverConfig& config);

/// Radial Thomas-Fermi atom of nuclear charge Z with N electrons. N > Z is
/// clamped to Z (flagged). Phi(r) = (Z/r) y(r/a) + mu inside the support,
/// (Z - N)/r outside; mu = q Z / (a x0) for ions, 0 for neutral atoms.
TFSolution solve_atom(double Z, double N, const SolverConfig& config = {});

/// Same, reusing an already computed universal solution for q = 1 - N/Z.
TFSolution atom_from_universal(double Z, const UniversalSolution& universal, const SolverConfig& config = {});

struct ChemicalPotentialSample {
  double electrons;
  double mu;
};

/// mu(N) at strictly increasing samples in (0, Z].
std::vector<ChemicalPotentialSample> chemical_potential_curve(double Z, std::span<const double> samples,
                                                              const SolverConfig& config = {});

/// r -> Z^2 rho_sol(Z^(1/3) r) for a solution computed at Z = 1.
RadialDensity rescale_density(const TFSolution& sol, double Z);

/// Estimate of lim r^6 rho(r) by least squares over the outer decade of the
/// grid, r^6 rho = sum_k C_k t^k (k < 5) with t = (r/r_max)^(-lambda).
double tail_constant(const TFSolution& sol);

} // namespace tf
