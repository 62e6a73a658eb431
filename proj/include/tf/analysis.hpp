#pragma once

#include "tf/solution.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tf {

/// |2T - (A - R)| / |E|.
double virial_check(const EnergyBreakdown& energy);
double virial_check(const TFSolution& sol);

/// Max over Z_list of |Z^(-7/3) E(lambda Z, Z) - E_0| / |E_0|, E_0 taken at
/// the first entry. lambda in (0, 1].
double scaling_check(std::span<const double> Z_list, double lambda, const SolverConfig& config = {});

struct ConvexityOptions {
  double cW = 0.0;
  double cD = 0.0;
  std::uint64_t seed = 1;
  std::size_t grid3d_extent = 32; ///< Cartesian grid for K > 1
};

/// (E(rho1) + E(rho2)) / 2 - E((rho1 + rho2) / 2), with E the TF functional
/// plus the optional corrections. Throws DomainError for inadmissible input.
double midpoint_gap(const RadialDensity& rho1, const RadialDensity& rho2, const NuclearConfiguration& config,
                    double cW = 0.0, double cD = 0.0);
double midpoint_gap(const ScalarField3D& rho1, const ScalarField3D& rho2, const NuclearConfiguration& config,
                    double cW = 0.0, double cD = 0.0);

struct ConvexityReport {
  double worst_gap = 0.0;
  std::size_t worst_trial = 0; ///< replay: the pair drawn at this index from `seed`
  std::uint64_t seed = 0;
  std::size_t trials = 0;
};

/// Midpoint gaps over `trials` random admissible pairs (radial for K = 1,
/// Cartesian otherwise). Deterministic for a fixed seed.
ConvexityReport convexity_check(const NuclearConfiguration& config, std::size_t trials,
                                const ConvexityOptions& options = {});

inline constexpr double kSupportThreshold = 1e-12;

/// Smallest radius beyond which the density stays below 1e-12; nullopt
/// (unbounded) for neutral atoms or when the density reaches the grid edge;
/// 0 for an empty atom. Radial solutions only.
std::optional<double> support_radius(const TFSolution& sol);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool passed = false;
  std::string detail;
};

/// The analysis suite: virial, scaling, convexity, compact support.
std::vector<CheckResult> run_checks(const SolverConfig& config = {});

} // namespace tf
