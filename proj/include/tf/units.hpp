#pragma once

#include <cmath>
#include <numbers>

namespace tf {

// Units: hbar^2/2m = 1 and e^2 = 1. In these units the kinetic coefficient of
// the functional is (3/5) * gamma with gamma = (3 pi^2)^(2/3).
inline const double kGamma = std::pow(3.0 * std::numbers::pi * std::numbers::pi, 2.0 / 3.0);

/// gamma^(-3/2) = 1 / (3 pi^2); converts [Phi - mu]_+^(3/2) into a density.
inline const double kInvGamma32 = 1.0 / (3.0 * std::numbers::pi * std::numbers::pi);

/// Length scale of a neutral atom: a = gamma (4 pi)^(-2/3) Z^(-1/3).
inline double atomic_length_scale(double Z) {
  return kGamma * std::pow(4.0 * std::numbers::pi, -2.0 / 3.0) / std::cbrt(Z);
}

/// lim r^6 rho(r) for the neutral atom: gamma^3 (3/pi)^3 = 243 pi.
inline const double kSommerfeldConstant = 243.0 * std::numbers::pi;

/// Density from the local potential, gamma^(-3/2) [w]_+^(3/2).
inline double density_from_potential(double w) {
  return w > 0.0 ? kInvGamma32 * w * std::sqrt(w) : 0.0;
}

} // namespace tf
