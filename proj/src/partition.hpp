#pragma once

// Atom-centred split of a molecular density, rho = sum_j chi_j rho_j + delta.
// rho_j is the neutral radial atom, chi_j = 1 - window(r / a_j) keeps its core
// and far tail analytic; delta lives on the 3D grid.

#include "tf/energy.hpp"
#include "tf/radial_grid.hpp"
#include "tf/solution.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace tf::detail {

/// Smooth bump: 0 below 0.25, rises to 1 on [0.25, 1.5], 1 up to 4, back to 0 by 7.
double partition_window(double t);

/// Cubic Lagrange interpolation on a uniform logarithmic grid.
class LogTable {
public:
  LogTable() = default;
  LogTable(const RadialGrid& grid, std::vector<double> values);
  double operator()(double r) const { return at_log(std::log(r)); }
  /// Value at r = exp(s).
  double at_log(double s) const;
  double rmin() const { return rmin_; }
  double rmax() const { return rmax_; }

private:
  double rmin_ = 0.0, rmax_ = 0.0, s0_ = 0.0, inv_h_ = 0.0;
  std::vector<double> v_;
};

/// Radial data of one species chi rho_j and the potentials it produces.
struct AtomReference {
  double Z = 0.0;
  double a = 0.0;
  RadialGrid grid;
  std::vector<double> core;     // chi rho at the radial nodes
  double core_charge = 0.0;     // int chi rho
  EnergyBreakdown self;         // kinetic / attraction / repulsion of chi rho alone
  LogTable core_at;             // chi rho
  LogTable grid_part_at;        // window * rho (initial delta)
  LogTable hartree_at;          // H[chi rho]
  LogTable shell_at;            // G(s) = int_0^s H(u) u du

  explicit AtomReference(RadialGrid g) : grid(std::move(g)) {}
  static AtomReference build(double Z, const SolverConfig& config);

  double hartree(double r) const;
  /// Spherical average of H[chi rho] over a sphere of radius t at distance d.
  double hartree_sphere_average(double t, double d) const;
  double shell_integral(double s) const;
};

/// int over the union of cells [lo, hi] (per axis, relative to the singular point) of 1/|x|.
double box_inverse_distance_integral(const Vec3& lo, const Vec3& hi);

} // namespace tf::detail
