#pragma once

#include "tf/grid3d.hpp"

#include <memory>

namespace tf {

/// Cell average of 1/r over a unit cube centred at the origin:
/// 3 ln((sqrt3 + 1)/(sqrt3 - 1)) - pi/2.
double unit_cube_inverse_distance_average();

/// Free-space Coulomb potential of a gridded charge, u(x_i) = sum_j q_j h^3 G(x_i - x_j),
/// evaluated as a zero-padded (2x per axis) FFT convolution. G(0) is the cell
/// average of 1/r. The kernel transform is built once per grid.
class PoissonSolver {
public:
  explicit PoissonSolver(const Grid3D& grid);
  ~PoissonSolver();
  PoissonSolver(PoissonSolver&&) noexcept;
  PoissonSolver& operator=(PoissonSolver&&) noexcept;

  const Grid3D& grid() const;

  /// Potential of `source` on the same grid. Safe to call concurrently.
  ScalarField3D solve(const ScalarField3D& source) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper.
ScalarField3D poisson_solve(const Grid3D& grid, const ScalarField3D& source);

} // namespace tf
