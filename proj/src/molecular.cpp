#include "tf/molecular.hpp"

#include "partition.hpp"
#include "tf/atom.hpp"
#include "tf/error.hpp"
#include "tf/poisson.hpp"
#include "tf/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace tf {

namespace {

using detail::AtomReference;

constexpr double kFourPi = 4.0 * std::numbers::pi;

struct MuSolve {
  double mu;
  bool feasible;
};

// Safeguarded Newton on count(mu) = N over [0, max Phi]; count is nonincreasing.
MuSolve solve_mu(std::span<const double> phi, double cell, double N, double tol, double fixed_charge,
                 std::span<const double> fixed_density, double guess) {
  double fixed_sum = 0.0;
  for (double f : fixed_density) fixed_sum += f;
  auto count = [&](double mu, double* slope) {
    double c = 0.0, d = 0.0;
    for (double p : phi) {
      const double w = p - mu;
      if (w > 0.0) {
        const double sw = std::sqrt(w);
        c += w * sw;
        d += sw;
      }
    }
    if (slope) *slope = -1.5 * kInvGamma32 * cell * d;
    return fixed_charge + cell * (kInvGamma32 * c - fixed_sum);
  };
  const double f0 = count(0.0, nullptr) - N;
  if (f0 < -tol) return {0.0, false};
  if (f0 <= tol) return {0.0, true};
  double lo = 0.0, hi = *std::max_element(phi.begin(), phi.end());
  if (count(hi, nullptr) - N > tol) return {hi, true};
  double mu = std::clamp(guess, lo, hi);
  for (int it = 0; it < 200; ++it) {
    double slope = 0.0;
    const double f = count(mu, &slope) - N;
    if (std::abs(f) <= tol) break;
    if (f > 0.0) lo = mu;
    else hi = mu;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) break;
    double next = slope < 0.0 ? mu - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    mu = next;
  }
  return {mu, true};
}

// Everything about a geometry that does not depend on delta.
struct Partition {
  Grid3D grid;
  std::vector<const AtomReference*> ref;  // per nucleus
  std::vector<double> V, Hc, core, core53, delta0;
  double fixed_charge = 0.0;
  std::vector<double> cusp_weight;  // Z_j * sum_{k != j} chi_k rho_k(R_j) * (box integral - node sum of 1/r)
  EnergyBreakdown fixed;            // self, cross and exterior terms
};

// Non-additive kinetic energy of the fixed parts outside the grid box, on
// successively coarser shells of the same node count.
double exterior_kinetic(const NuclearConfiguration& nuclei, const std::vector<const AtomReference*>& ref,
                        const Grid3D& grid) {
  if (nuclei.size() < 2) return 0.0;
  const std::size_t n = grid.extents[0];
  const double h = grid.spacing[0];
  const Vec3 centre{grid.origin[0] + 0.5 * h * static_cast<double>(n - 1),
                    grid.origin[1] + 0.5 * h * static_cast<double>(n - 1),
                    grid.origin[2] + 0.5 * h * static_cast<double>(n - 1)};
  double acc = 0.0;
  double inner = 0.5 * h * static_cast<double>(n);
  for (int level = 1; level <= 4; ++level) {
    const double hl = h * std::ldexp(1.0, level);
    const auto g = Grid3D::centred_cube(centre, n, hl);
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
          const auto x = g.position(i, j, k);
          if (std::abs(x[0] - centre[0]) < inner && std::abs(x[1] - centre[1]) < inner &&
              std::abs(x[2] - centre[2]) < inner)
            continue;
          double c = 0.0, c53 = 0.0;
          for (std::size_t a = 0; a < nuclei.size(); ++a) {
            const double r = distance(x, nuclei[a].position);
            const double v = r < ref[a]->core_at.rmax() ? std::max(ref[a]->core_at(r), 0.0) : 0.0;
            c += v;
            c53 += std::pow(v, 5.0 / 3.0);
          }
          sum += std::pow(c, 5.0 / 3.0) - c53;
        }
    acc += sum * hl * hl * hl;
    inner = 0.5 * hl * static_cast<double>(n);
  }
  return 0.6 * kGamma * acc;
}

Partition build_partition(const NuclearConfiguration& nuclei, const SolverConfig& config, const Grid3D& grid,
                          std::map<double, AtomReference>& cache) {
  Partition P;
  P.grid = grid;
  for (const auto& nuc : nuclei.nuclei()) {
    auto it = cache.find(nuc.charge);
    if (it == cache.end()) it = cache.emplace(nuc.charge, AtomReference::build(nuc.charge, config)).first;
    P.ref.push_back(&it->second);
  }
  const std::size_t K = nuclei.size(), M = grid.size();
  P.V.assign(M, 0.0);
  P.Hc.assign(M, 0.0);
  P.core.assign(M, 0.0);
  P.core53.assign(M, 0.0);
  P.delta0.assign(M, 0.0);
  std::vector<double> inv_sum(K, 0.0);
  for (std::size_t k = 0; k < grid.extents[2]; ++k)
    for (std::size_t j = 0; j < grid.extents[1]; ++j)
      for (std::size_t i = 0; i < grid.extents[0]; ++i) {
        const auto x = grid.position(i, j, k);
        const std::size_t idx = grid.index(i, j, k);
        for (std::size_t a = 0; a < K; ++a) {
          const auto& R = *P.ref[a];
          const double r = distance(x, nuclei[a].position);
          if (r == 0.0) throw SingularityError("a nucleus sits on a grid node");
          const double s = std::log(r);
          const double c = std::max(R.core_at.at_log(s), 0.0);
          P.V[idx] += nuclei[a].charge / r;
          P.Hc[idx] += r < R.hartree_at.rmax() ? R.hartree_at.at_log(s) : R.core_charge / r;
          P.core[idx] += c;
          P.core53[idx] += std::pow(c, 5.0 / 3.0);
          P.delta0[idx] += std::max(R.grid_part_at.at_log(s), 0.0);
          inv_sum[a] += 1.0 / r;
        }
      }

  const double h = grid.spacing[0], cell = grid.cell_volume();
  EnergyBreakdown& E = P.fixed;
  for (std::size_t a = 0; a < K; ++a) {
    const auto& R = *P.ref[a];
    P.fixed_charge += R.core_charge;
    E.kinetic += R.self.kinetic;
    E.attraction += R.self.attraction;
    E.repulsion += R.self.repulsion;
  }
  P.cusp_weight.assign(K, 0.0);
  for (std::size_t a = 0; a < K; ++a) {
    const auto& Ra = *P.ref[a];
    double others = 0.0;
    for (std::size_t b = 0; b < K; ++b) {
      if (b == a) continue;
      const auto& Rb = *P.ref[b];
      const double d = distance(nuclei[a].position, nuclei[b].position);
      others += std::max(Rb.core_at(d), 0.0);
      E.attraction += nuclei[a].charge * Rb.hartree(d);
      if (b > a) {
        std::vector<double> f(Ra.grid.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
          const double t = Ra.grid[i];
          f[i] = kFourPi * t * t * Ra.core[i] * Rb.hartree_sphere_average(t, d);
        }
        E.repulsion += Ra.grid.integrate(f);
      }
    }
    const auto& X = nuclei[a].position;
    Vec3 lo, hi;
    for (int ax = 0; ax < 3; ++ax) {
      lo[ax] = grid.origin[ax] - 0.5 * h - X[ax];
      hi[ax] = grid.origin[ax] + (static_cast<double>(grid.extents[ax]) - 0.5) * h - X[ax];
    }
    const double D = detail::box_inverse_distance_integral(lo, hi) - cell * inv_sum[a];
    P.cusp_weight[a] = nuclei[a].charge * others * D;
  }
  E.kinetic += exterior_kinetic(nuclei, P.ref, grid);
  E.nuclear = nuclear_repulsion(nuclei);
  return P;
}

EnergyBreakdown partition_energy(const Partition& P, std::span<const double> delta, std::span<const double> Hdelta) {
  const double cell = P.grid.cell_volume();
  double K = 0.0, A = 0.0, R = 0.0;
  for (std::size_t n = 0; n < delta.size(); ++n) {
    const double rho = std::max(P.core[n] + delta[n], 0.0);
    K += std::pow(rho, 5.0 / 3.0) - P.core53[n];
    A += P.V[n] * delta[n];
    R += (P.Hc[n] + 0.5 * Hdelta[n]) * delta[n];
  }
  double cusp = 0.0;
  for (double c : P.cusp_weight) cusp += c;
  const auto& F = P.fixed;
  return EnergyBreakdown::make(F.kinetic + 0.6 * kGamma * cell * K, F.attraction + cell * A - cusp,
                               F.repulsion + cell * R, F.nuclear);
}

TFSolution empty_molecule(const NuclearConfiguration& nuclei, const SolverConfig& config, const Grid3D& grid) {
  std::vector<double> phi(grid.size());
  for (std::size_t k = 0; k < grid.extents[2]; ++k)
    for (std::size_t j = 0; j < grid.extents[1]; ++j)
      for (std::size_t i = 0; i < grid.extents[0]; ++i)
        phi[grid.index(i, j, k)] = external_potential(nuclei, grid.position(i, j, k));
  TFSolution sol(nuclei, GridFields{ScalarField3D(grid, std::vector<double>(grid.size(), 0.0)),
                                    ScalarField3D(grid, std::move(phi))});
  (void)config;
  sol.mu = std::numeric_limits<double>::infinity();
  sol.energy = EnergyBreakdown::make(0.0, 0.0, 0.0, nuclear_repulsion(nuclei));
  return sol;
}

} // namespace

double mu_bisection(const ScalarField3D& phi, double N, double tolerance, double fixed_charge,
                    std::span<const double> fixed_density) {
  if (!(N >= 0.0)) throw DomainError("electron number must be nonnegative");
  if (!fixed_density.empty() && fixed_density.size() != phi.values.size())
    throw DomainError("fixed density does not match the potential grid");
  const auto r = solve_mu(phi.values, phi.grid.cell_volume(), N, tolerance, fixed_charge, fixed_density, 0.0);
  if (!r.feasible) throw InfeasibleError("electron number exceeds the count at mu = 0");
  return r.mu;
}

double mu_bisection(const ScalarField3D& phi, double N, double tolerance) {
  return mu_bisection(phi, N, tolerance, 0.0, {});
}

Grid3D default_grid(std::span<const NuclearConfiguration> configs, const SolverConfig& config) {
  config.validate();
  if (configs.empty()) throw DomainError("no nuclear configuration given");
  Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  for (const auto& c : configs)
    for (const auto& nuc : c.nuclei()) {
      const double pad = config.grid3d_padding * atomic_length_scale(nuc.charge);
      for (int ax = 0; ax < 3; ++ax) {
        lo[ax] = std::min(lo[ax], nuc.position[ax] - pad);
        hi[ax] = std::max(hi[ax], nuc.position[ax] + pad);
      }
    }
  const std::size_t n = config.grid3d_extent;
  double width = 0.0;
  Vec3 centre;
  for (int ax = 0; ax < 3; ++ax) {
    width = std::max(width, hi[ax] - lo[ax]);
    centre[ax] = 0.5 * (lo[ax] + hi[ax]);
  }
  const double h = config.grid3d_spacing > 0.0 ? config.grid3d_spacing : width / static_cast<double>(n - 1);
  // Keep nuclei at least a tenth of a cell away from every node.
  auto clear = [&](const Grid3D& g) {
    for (const auto& c : configs)
      for (const auto& nuc : c.nuclei()) {
        double d2 = 0.0;
        for (int ax = 0; ax < 3; ++ax) {
          const double u = (nuc.position[ax] - g.origin[ax]) / h;
          const double f = u - std::round(u);
          d2 += f * f;
        }
        if (d2 < 0.01) return false;
      }
    return true;
  };
  for (int attempt = 0; attempt < 16; ++attempt) {
    const double t = 0.137 * attempt;
    const Vec3 shifted{centre[0] + t * h, centre[1] + 0.61 * t * h, centre[2] + 0.37 * t * h};
    auto g = Grid3D::centred_cube(shifted, n, h);
    if (clear(g)) {
      g.validate();
      return g;
    }
  }
  throw ConfigurationError("could not place the grid with all nuclei off the nodes");
}

Grid3D default_grid(const NuclearConfiguration& nuclei, const SolverConfig& config) {
  return default_grid(std::span(&nuclei, 1), config);
}

TFSolution scf_solve(const NuclearConfiguration& nuclei, double N, const SolverConfig& config) {
  return scf_solve(nuclei, N, config, default_grid(nuclei, config));
}

TFSolution scf_solve(const NuclearConfiguration& nuclei, double N, const SolverConfig& config, const Grid3D& grid) {
  config.validate();
  grid.validate();
  if (!(N >= 0.0) || !std::isfinite(N)) throw DomainError("electron number must be nonnegative");
  const double Ztot = nuclei.total_charge();
  const bool clamped = N > Ztot;
  const double Neff = clamped ? Ztot : N;
  if (Neff == 0.0) {
    auto sol = empty_molecule(nuclei, config, grid);
    return sol;
  }

  std::map<double, AtomReference> cache;
  const Partition P = build_partition(nuclei, config, grid, cache);
  const PoissonSolver poisson(grid);
  const std::size_t M = grid.size();
  const double cell = grid.cell_volume();
  const std::vector<double> weights(M, cell);

  std::vector<double> delta = P.delta0, phi(M), rho(M), target(M);
  ScalarField3D dfield(grid, delta);
  double mu = 0.0, previous = std::numeric_limits<double>::infinity();
  std::vector<double> history;
  ScalarField3D H;
  for (std::size_t it = 0;; ++it) {
    dfield.values = delta;
    H = poisson.solve(dfield);
    for (std::size_t n = 0; n < M; ++n) {
      phi[n] = P.V[n] - P.Hc[n] - H.values[n];
      rho[n] = P.core[n] + delta[n];
    }
    const auto m = solve_mu(phi, cell, Neff, config.mu_bisection_tolerance, P.fixed_charge, P.core, mu);
    mu = m.mu;
    const double res = tf_residual(rho, phi, mu, weights);
    history.push_back(res);
    if (res < config.scf_residual_tolerance) break;
    if (it + 1 >= config.max_iterations)
      throw ConvergenceError("3D self-consistency did not converge in " + std::to_string(config.max_iterations) +
                                 " iterations (residual " + std::to_string(res) + ")",
                             history);
    const double alpha = res > previous ? 0.5 * config.mixing_alpha : config.mixing_alpha;
    previous = res;
    for (std::size_t n = 0; n < M; ++n) {
      const double fresh = density_from_potential(phi[n] - mu);
      delta[n] += alpha * (fresh - rho[n]);
    }
  }

  TFSolution sol(nuclei, GridFields{ScalarField3D(grid, rho), ScalarField3D(grid, phi)});
  sol.mu = mu;
  sol.energy = partition_energy(P, delta, H.values);
  sol.electron_count = Neff;
  sol.clamped = clamped;
  sol.residual = history.back();
  sol.iterations = history.size();
  sol.residual_history = std::move(history);
  return sol;
}

double teller_gap(const NuclearConfiguration& nuclei, double N, const SolverConfig& config, const Grid3D& grid) {
  if (std::abs(N - nuclei.total_charge()) > 1e-12 * nuclei.total_charge())
    throw DomainError("teller_gap is defined for the neutral molecule only");
  if (nuclei.size() == 1) return 0.0;
  double atoms = 0.0;
  for (const auto& nuc : nuclei.nuclei()) atoms += solve_atom(nuc.charge, nuc.charge, config).energy.total;
  return scf_solve(nuclei, N, config, grid).energy.total - atoms;
}

double teller_gap(const NuclearConfiguration& nuclei, double N, const SolverConfig& config) {
  if (nuclei.size() == 1) return teller_gap(nuclei, N, config, Grid3D{});
  return teller_gap(nuclei, N, config, default_grid(nuclei, config));
}

NuclearConfiguration dilate_about_centroid(const NuclearConfiguration& nuclei, double scale) {
  Vec3 c{0, 0, 0};
  const double Z = nuclei.total_charge();
  for (const auto& nuc : nuclei.nuclei())
    for (int ax = 0; ax < 3; ++ax) c[ax] += nuc.charge * nuc.position[ax] / Z;
  std::vector<Nucleus> out;
  for (const auto& nuc : nuclei.nuclei()) {
    Vec3 p;
    for (int ax = 0; ax < 3; ++ax) p[ax] = c[ax] + scale * (nuc.position[ax] - c[ax]);
    out.push_back({nuc.charge, p});
  }
  return NuclearConfiguration(std::move(out));
}

std::vector<PressurePoint> pressure_scan(const NuclearConfiguration& nuclei, std::span<const double> scales,
                                         const SolverConfig& config) {
  if (scales.empty() || scales.front() != 1.0) throw DomainError("pressure scan scales must start at 1");
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (!(scales[i] > scales[i - 1])) throw DomainError("pressure scan scales must be strictly increasing");
  std::vector<NuclearConfiguration> geoms;
  for (double l : scales) geoms.push_back(dilate_about_centroid(nuclei, l));
  const Grid3D grid = default_grid(geoms, config);
  std::vector<PressurePoint> out;
  for (std::size_t i = 0; i < scales.size(); ++i)
    out.push_back({scales[i], scf_solve(geoms[i], nuclei.total_charge(), config, grid).energy.total});
  return out;
}

} // namespace tf
