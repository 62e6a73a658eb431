#include "tf/corrections.hpp"

#include "tf/atom.hpp"
#include "tf/error.hpp"
#include "tf/units.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tf {

namespace {

constexpr double kPi = std::numbers::pi;

// d f / d s at node i of arbitrary nodes s, from the Lagrange polynomial
// through (up to) five surrounding nodes.
double lagrange_derivative(std::span<const double> s, std::span<const double> f, std::size_t i) {
  const std::size_t n = s.size();
  const std::size_t m = std::min<std::size_t>(5, n);
  std::size_t lo = i >= m / 2 ? i - m / 2 : 0;
  lo = std::min(lo, n - m);
  double d = 0.0;
  for (std::size_t j = lo; j < lo + m; ++j) {
    // l_j'(s_i)
    double lj = 0.0;
    if (j == i) {
      for (std::size_t k = lo; k < lo + m; ++k)
        if (k != j) lj += 1.0 / (s[j] - s[k]);
    } else {
      lj = 1.0 / (s[j] - s[i]);
      for (std::size_t k = lo; k < lo + m; ++k)
        if (k != j && k != i) lj *= (s[i] - s[k]) / (s[j] - s[k]);
    }
    d += lj * f[j];
  }
  return d;
}

double field_value(const ScalarField3D& f, std::size_t i, std::size_t j, std::size_t k) {
  return f.values[f.grid.index(i, j, k)];
}

} // namespace

double weizsacker_energy(const RadialDensity& density, double cW) {
  density.validate();
  const auto& g = density.grid;
  const std::size_t n = g.size();
  if (n < 5) throw DomainError("weizsacker_energy: need at least 5 radial nodes");
  std::vector<double> s(n), phi(n), f(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = std::log(g[i]);
    phi[i] = std::sqrt(density.values[i]);
  }
  // 4 pi r^2 (d phi/dr)^2 = 4 pi (d phi/ds)^2
  for (std::size_t i = 0; i < n; ++i) {
    const double d = lagrange_derivative(s, phi, i);
    f[i] = 4.0 * kPi * d * d;
  }
  return cW * g.integrate(f);
}

double weizsacker_energy(const ScalarField3D& density, double cW) {
  const auto& g = density.grid;
  for (double v : density.values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("weizsacker_energy: negative or non-finite density");
  const auto [nx, ny, nz] = g.extents;
  if (nx < 3 || ny < 3 || nz < 3) throw DomainError("weizsacker_energy: grid too small");
  auto root = [&](std::size_t i, std::size_t j, std::size_t k) { return std::sqrt(field_value(density, i, j, k)); };
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < nz; ++k)
    for (std::size_t j = 0; j + 1 < ny; ++j)
      for (std::size_t i = 0; i + 1 < nx; ++i) {
        const double c = root(i, j, k);
        const double dx = (root(i + 1, j, k) - c) / g.spacing[0];
        const double dy = (root(i, j + 1, k) - c) / g.spacing[1];
        const double dz = (root(i, j, k + 1) - c) / g.spacing[2];
        sum += dx * dx + dy * dy + dz * dz;
      }
  return cW * sum * g.cell_volume();
}

double dirac_energy(const RadialDensity& density, double cD) {
  density.validate();
  const auto& g = density.grid;
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    f[i] = 4.0 * kPi * g[i] * g[i] * std::pow(density.values[i], 4.0 / 3.0);
  return -cD * g.integrate(f);
}

double dirac_energy(const ScalarField3D& density, double cD) {
  double sum = 0.0;
  for (double v : density.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("dirac_energy: negative or non-finite density");
    sum += std::pow(v, 4.0 / 3.0);
  }
  return -cD * sum * density.grid.cell_volume();
}

CorrectedFunctional::CorrectedFunctional(RadialGrid grid, double Z, double cW, double cD)
    : grid_(std::move(grid)), Z_(Z), cW_(cW), cD_(cD) {
  if (!(Z > 0.0)) throw DomainError("CorrectedFunctional: Z must be positive");
  if (!(cW >= 0.0) || !(cD >= 0.0)) throw DomainError("CorrectedFunctional: coefficients must be nonnegative");
  const std::size_t n = grid_.size();
  if (n < 3) throw DomainError("CorrectedFunctional: need at least 3 nodes");
  w_.assign(n, 0.0);
  e_.assign(n - 1, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double r0 = grid_[i], r1 = grid_[i + 1];
    const double h = std::log(r1 / r0);
    w_[i] += 2.0 * kPi * r0 * r0 * r0 * h;
    w_[i + 1] += 2.0 * kPi * r1 * r1 * r1 * h;
    e_[i] = 4.0 * kPi * r0 * r1 / (r1 - r0);
  }
}

std::vector<double> CorrectedFunctional::hartree(std::span<const double> phi) const {
  const std::size_t n = grid_.size();
  std::vector<double> H(n);
  double inner = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    inner += w_[i] * phi[i] * phi[i];
    H[i] = inner / grid_[i];
  }
  double outer = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    H[i] += outer;
    outer += w_[i] * phi[i] * phi[i] / grid_[i];
  }
  return H;
}

double CorrectedFunctional::electron_count(std::span<const double> phi) const {
  double N = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) N += w_[i] * phi[i] * phi[i];
  return N;
}

EnergyBreakdown CorrectedFunctional::energy(std::span<const double> phi) const {
  if (phi.size() != grid_.size()) throw DomainError("CorrectedFunctional: size mismatch");
  const auto H = hartree(phi);
  double kin = 0.0, att = 0.0, rep = 0.0, dir = 0.0, wz = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double a = std::abs(phi[i]);
    const double rho = a * a;
    const double q = w_[i] * rho;
    kin += w_[i] * rho * std::pow(a, 4.0 / 3.0);
    att += q * Z_ / grid_[i];
    rep += q * H[i];
    dir += w_[i] * std::pow(a, 8.0 / 3.0);
  }
  for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
    const double d = phi[i + 1] - phi[i];
    wz += e_[i] * d * d;
  }
  return EnergyBreakdown::make(0.6 * kGamma * kin, att, 0.5 * rep, 0.0, cW_ * wz, cD_ > 0.0 ? -cD_ * dir : 0.0);
}

std::vector<double> CorrectedFunctional::gradient(std::span<const double> phi) const {
  if (phi.size() != grid_.size()) throw DomainError("CorrectedFunctional: size mismatch");
  const std::size_t n = phi.size();
  const auto H = hartree(phi);
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::abs(phi[i]);
    g[i] = 2.0 * w_[i] * phi[i] * (kGamma * std::pow(a, 4.0 / 3.0) - Z_ / grid_[i] + H[i]) -
           (8.0 / 3.0) * cD_ * w_[i] * phi[i] * std::pow(a, 2.0 / 3.0);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double f = 2.0 * cW_ * e_[i] * (phi[i + 1] - phi[i]);
    g[i] -= f;
    g[i + 1] += f;
  }
  return g;
}

namespace {

// Solves the symmetric tridiagonal system (diag d, off-diagonal o) in place.
void solve_tridiagonal(std::vector<double> d, const std::vector<double>& o, std::vector<double>& x) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = o[i - 1] / d[i - 1];
    d[i] -= m * o[i - 1];
    x[i] -= m * x[i - 1];
  }
  x[n - 1] /= d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (x[i] - o[i] * x[i + 1]) / d[i];
}

struct Stationarity {
  double lambda;   // Lagrange multiplier of the normalisation, = -mu
  double residual; // relative size of the projected gradient
};

Stationarity stationarity(const CorrectedFunctional& F, std::span<const double> phi, std::span<const double> g) {
  const auto w = F.weights();
  const auto H = F.hartree(phi);
  double num = 0.0, den = 0.0, pg = 0.0, N = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    pg += phi[i] * g[i];
    N += w[i] * phi[i] * phi[i];
  }
  const double lambda = 0.5 * pg / N;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double a = std::abs(phi[i]);
    num += std::abs(phi[i] * (g[i] - 2.0 * lambda * w[i] * phi[i]));
    den += 2.0 * w[i] * a * a *
           (kGamma * std::pow(a, 4.0 / 3.0) + F.Z() / F.grid()[i] + H[i] + F.cD() * std::pow(a, 2.0 / 3.0));
  }
  const auto e = F.edge_weights();
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double d = phi[i + 1] - phi[i];
    den += 2.0 * F.cW() * e[i] * d * d;
  }
  return {lambda, den > 0.0 ? num / den : 0.0};
}

} // namespace

TFSolution minimize_corrected_atom(double Z, double N, double cW, double cD, const SolverConfig& config,
                                   MinimizerReport* report) {
  config.validate();
  if (!(cW >= 0.0) || !(cD >= 0.0) || !std::isfinite(cW) || !std::isfinite(cD))
    throw DomainError("minimize_corrected_atom: coefficients must be finite and nonnegative");
  TFSolution start = solve_atom(Z, N, config);
  if (start.electron_count == 0.0) return start;
  const double Ne = start.electron_count;

  // Same log step as the Thomas-Fermi grid, extended towards the nucleus so
  // that the unresolved core carries a negligible share of the energy.
  const double a = atomic_length_scale(Z);
  const double h = std::log(config.radial_xmax / config.radial_xmin) / static_cast<double>(config.radial_node_count - 1);
  const double rmin = 1e-12 * a, rmax = config.radial_xmax * a;
  const auto n = static_cast<std::size_t>(std::ceil(std::log(rmax / rmin) / h)) + 1;
  CorrectedFunctional F(RadialGrid::logarithmic(rmin, rmax, n, false), Z, cW, cD);
  const auto& grid = F.grid();
  const auto w = F.weights();
  const auto e = F.edge_weights();

  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) phi[i] = std::sqrt(start.radial().density.at(grid[i]));
  auto normalise = [&](std::vector<double>& p) {
    for (double& v : p) v = std::abs(v);
    const double c = std::sqrt(Ne / F.electron_count(p));
    for (double& v : p) v *= c;
  };
  normalise(phi);

  double E = F.value(phi);
  auto g = F.gradient(phi);
  auto st = stationarity(F, phi, g);
  std::vector<double> history{st.residual}, energies{E};
  std::vector<double> diag(n), off(n - 1), d1(n), d2(n), trial(n);
  std::size_t it = 0;
  for (; st.residual >= config.residual_tolerance; ++it) {
    if (it == config.max_iterations)
      throw ConvergenceError("minimize_corrected_atom: iteration limit reached", history);
    // Preconditioner: gradient-term Laplacian plus the local curvature of the
    // Thomas-Fermi part of the Lagrangian.
    const auto H = F.hartree(phi);
    const double mu = -st.lambda;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = grid[i];
      const double local = (4.0 / 3.0) * kGamma * std::pow(std::abs(phi[i]), 4.0 / 3.0) +
                           std::max(mu - (Z / r - H[i]), 0.0);
      diag[i] = 2.0 * w[i] * std::max(local, 1e-8 * Z / r);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      off[i] = -2.0 * cW * e[i];
      diag[i] += 2.0 * cW * e[i];
      diag[i + 1] += 2.0 * cW * e[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      d1[i] = g[i];
      d2[i] = w[i] * phi[i];
    }
    solve_tridiagonal(diag, off, d1);
    solve_tridiagonal(diag, off, d2);
    double a1 = 0.0, a2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      a1 += w[i] * phi[i] * d1[i];
      a2 += w[i] * phi[i] * d2[i];
    }
    const double c = a1 / a2;
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d1[i] = -d1[i] + c * d2[i];
      slope += g[i] * d1[i];
    }
    if (!(slope < 0.0)) throw ConvergenceError("minimize_corrected_atom: no descent direction", history);

    double t = 1.0, Et = 0.0;
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = phi[i] + t * d1[i];
      normalise(trial);
      Et = F.value(trial);
      if (Et <= E + 1e-4 * t * slope) break;
      t *= 0.5;
      if (t < 1e-12) {
        // Rounding floor: accept if the energy can no longer change measurably.
        if (std::abs(slope) <= 1e-14 * std::abs(E)) {
          Et = E;
          break;
        }
        throw ConvergenceError("minimize_corrected_atom: line search stagnated", history);
      }
    }
    if (Et == E && t < 1e-12) break;
    phi.swap(trial);
    E = Et;
    g = F.gradient(phi);
    st = stationarity(F, phi, g);
    history.push_back(st.residual);
    energies.push_back(E);
  }

  const auto H = F.hartree(phi);
  std::vector<double> rho(n), pot(n);
  for (std::size_t i = 0; i < n; ++i) {
    rho[i] = phi[i] * phi[i];
    pot[i] = Z / grid[i] - H[i];
  }
  TFSolution sol{start.config, RadialFields{RadialDensity{grid, std::move(rho)}, std::move(pot)}};
  sol.mu = -st.lambda;
  sol.energy = F.energy(phi);
  sol.electron_count = Ne;
  sol.clamped = start.clamped;
  sol.residual = st.residual;
  sol.iterations = it;
  sol.residual_history = std::move(history);
  if (report) {
    report->iterations = it;
    report->energies = std::move(energies);
  }
  return sol;
}

} // namespace tf
