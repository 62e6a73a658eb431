#include "tf/solution.hpp"

#include "tf/error.hpp"

#include <cmath>

namespace tf {

void SolverConfig::validate() const {
  auto fail = [](const char* what) { throw ConfigurationError(what); };
  if (radial_node_count < 256) fail("radial_node_count must be at least 256");
  if (!(radial_xmin > 0.0) || !(radial_xmax > 100.0 * radial_xmin)) fail("radial extent is invalid");
  if (!(ode_tolerance > 0.0)) fail("ode_tolerance must be positive");
  if (grid3d_extent < 32 || grid3d_extent % 2 != 0) fail("grid3d_extent must be even and at least 32");
  if (grid3d_spacing < 0.0) fail("grid3d_spacing must be nonnegative");
  if (!(grid3d_padding > 0.0)) fail("grid3d_padding must be positive");
  if (!(mixing_alpha > 0.0) || mixing_alpha > 1.0) fail("mixing_alpha must lie in (0, 1]");
  if (max_iterations == 0) fail("max_iterations must be positive");
  if (!(residual_tolerance > 0.0) || !(scf_residual_tolerance > 0.0) || !(mu_bisection_tolerance > 0.0))
    fail("tolerances must be positive");
  if (cW < 0.0 || cD < 0.0 || !std::isfinite(cW) || !std::isfinite(cD))
    fail("correction coefficients must be nonnegative");
}

} // namespace tf
