#pragma once

#include "tf/energy.hpp"
#include "tf/grid3d.hpp"
#include "tf/nuclear_configuration.hpp"
#include "tf/radial_grid.hpp"

#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace tf {

/// Numerical knobs shared by every solver. Radial extents are dimensionless
/// (in units of the atomic length scale a(Z)) so that atoms of different Z
/// share one grid up to scaling.
struct SolverConfig {
  std::size_t radial_node_count = 4001;
  double radial_xmin = 1e-6;
  double radial_xmax = 1e3;
  double ode_tolerance = 1e-13;

  std::size_t grid3d_extent = 96;
  double grid3d_spacing = 0.0; ///< 0 selects the spacing from grid3d_padding
  double grid3d_padding = 8.0; ///< box margin around the nuclei, in units of a(Z_j)

  double mixing_alpha = 0.3;
  std::size_t max_iterations = 500;
  double residual_tolerance = 1e-6;     ///< radial solutions
  double scf_residual_tolerance = 1e-4; ///< 3D solutions
  double mu_bisection_tolerance = 1e-12;

  double cW = 0.0; ///< von Weizsaecker coefficient
  double cD = 0.0; ///< Dirac exchange coefficient

  /// Throws ConfigurationError when a field is out of range.
  void validate() const;
};

struct RadialFields {
  RadialDensity density;
  std::vector<double> potential; ///< Phi at the density nodes
};

struct GridFields {
  ScalarField3D density;
  ScalarField3D potential;
};

/// A converged solve.
struct TFSolution {
  NuclearConfiguration config;
  std::variant<RadialFields, GridFields> fields;
  double mu = 0.0;
  EnergyBreakdown energy;
  double electron_count = 0.0;
  bool clamped = false;
  double residual = 0.0;
  std::size_t iterations = 0;
  std::vector<double> residual_history;
  /// Edge of the compact support (radial ions only).
  std::optional<double> support_end;

  TFSolution(NuclearConfiguration c, std::variant<RadialFields, GridFields> f)
      : config(std::move(c)), fields(std::move(f)) {}

  bool is_radial() const { return std::holds_alternative<RadialFields>(fields); }
  const RadialFields& radial() const { return std::get<RadialFields>(fields); }
  const GridFields& grid() const { return std::get<GridFields>(fields); }
  /// Neutral: mu = 0 with a nonempty density.
  bool neutral() const { return electron_count > 0.0 && electron_count == config.total_charge(); }
};

} // namespace tf
