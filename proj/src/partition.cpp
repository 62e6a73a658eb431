#include "partition.hpp"

#include "tf/atom.hpp"
#include "tf/error.hpp"
#include "tf/units.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tf::detail {

namespace {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double f = std::exp(-1.0 / t), g = std::exp(-1.0 / (1.0 - t));
  return f / (f + g);
}

// Antiderivative of 1/|x| in all three variables.
double F(double x, double y, double z) {
  const double r = std::sqrt(x * x + y * y + z * z);
  if (r == 0.0) return 0.0;
  double acc = 0.0;
  auto log_term = [&](double p, double q, double s) {
    // p q ln(s + r); vanishes with p q.
    if (p == 0.0 || q == 0.0) return 0.0;
    return p * q * std::log(s + r);
  };
  auto atan_term = [&](double p, double q, double s) {
    // (p^2/2) atan(q s / (p r)); vanishes with p.
    if (p == 0.0) return 0.0;
    return 0.5 * p * p * std::atan(q * s / (p * r));
  };
  acc += log_term(y, z, x) + log_term(x, z, y) + log_term(x, y, z);
  acc -= atan_term(x, y, z) + atan_term(y, x, z) + atan_term(z, x, y);
  return acc;
}

// int_[0,a]x[0,b]x[0,c] 1/|x| for a, b, c >= 0.
double octant(double a, double b, double c) {
  return F(a, b, c) - F(0, b, c) - F(a, 0, c) - F(a, b, 0) + F(0, 0, c) + F(0, b, 0) + F(a, 0, 0);
}

} // namespace

double partition_window(double t) {
  if (t <= 0.25 || t >= 7.0) return 0.0;
  if (t < 1.5) return smooth_step((t - 0.25) / 1.25);
  if (t <= 4.0) return 1.0;
  return 1.0 - smooth_step((t - 4.0) / 3.0);
}

LogTable::LogTable(const RadialGrid& grid, std::vector<double> values) : v_(std::move(values)) {
  const auto n = grid.nodes();
  rmin_ = n.front();
  rmax_ = n.back();
  s0_ = std::log(rmin_);
  inv_h_ = static_cast<double>(n.size() - 1) / std::log(rmax_ / rmin_);
}

double LogTable::at_log(double s) const {
  const double u = (s - s0_) * inv_h_;
  const auto last = static_cast<std::ptrdiff_t>(v_.size()) - 1;
  auto j = static_cast<std::ptrdiff_t>(std::floor(u)) - 1;
  j = std::clamp<std::ptrdiff_t>(j, 0, last - 3);
  const double t = u - static_cast<double>(j);
  const double* v = v_.data() + j;
  // Nodes at t = 0, 1, 2, 3.
  const double l0 = -(t - 1) * (t - 2) * (t - 3) / 6.0;
  const double l1 = t * (t - 2) * (t - 3) / 2.0;
  const double l2 = -t * (t - 1) * (t - 3) / 2.0;
  const double l3 = t * (t - 1) * (t - 2) / 6.0;
  return l0 * v[0] + l1 * v[1] + l2 * v[2] + l3 * v[3];
}

AtomReference AtomReference::build(double Z, const SolverConfig& config) {
  const auto sol = solve_atom(Z, Z, config);
  const auto& rho = sol.radial().density;
  AtomReference ref(rho.grid);
  ref.Z = Z;
  ref.a = atomic_length_scale(Z);
  const std::size_t n = rho.grid.size();
  ref.core.resize(n);
  std::vector<double> part(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = partition_window(rho.grid[i] / ref.a);
    ref.core[i] = (1.0 - w) * rho.values[i];
    part[i] = w * rho.values[i];
  }
  const RadialDensity core{ref.grid, ref.core};
  ref.core_charge = core.electron_count();
  ref.self = evaluate_energy(core, NuclearConfiguration::atom(Z));
  const auto H = hartree_potential(core);
  std::vector<double> Hu(n);
  for (std::size_t i = 0; i < n; ++i) Hu[i] = H[i] * ref.grid[i];
  auto G = ref.grid.cumulative(Hu);
  // H is finite at the origin: int_0^rmin H u du = H(0) rmin^2 / 2.
  const double head = 0.5 * H[0] * ref.grid[0] * ref.grid[0];
  for (auto& g : G) g += head;
  ref.core_at = LogTable(ref.grid, ref.core);
  ref.grid_part_at = LogTable(ref.grid, std::move(part));
  ref.hartree_at = LogTable(ref.grid, H);
  ref.shell_at = LogTable(ref.grid, std::move(G));
  return ref;
}

double AtomReference::hartree(double r) const {
  if (r >= hartree_at.rmax()) return core_charge / r;
  if (r <= hartree_at.rmin()) return hartree_at(hartree_at.rmin());
  return hartree_at(r);
}

double AtomReference::shell_integral(double s) const {
  if (s <= shell_at.rmin()) return 0.5 * hartree(0.0) * s * s;
  if (s >= shell_at.rmax()) return shell_at(shell_at.rmax()) + core_charge * (s - shell_at.rmax());
  return shell_at(s);
}

double AtomReference::hartree_sphere_average(double t, double d) const {
  if (t <= 0.0) return hartree(d);
  return (shell_integral(t + d) - shell_integral(std::abs(t - d))) / (2.0 * t * d);
}

double box_inverse_distance_integral(const Vec3& lo, const Vec3& hi) {
  double acc = 0.0;
  for (int sx = 0; sx < 2; ++sx)
    for (int sy = 0; sy < 2; ++sy)
      for (int sz = 0; sz < 2; ++sz) {
        const double a = sx ? hi[0] : -lo[0];
        const double b = sy ? hi[1] : -lo[1];
        const double c = sz ? hi[2] : -lo[2];
        if (a < 0.0 || b < 0.0 || c < 0.0) throw DomainError("singular point outside the integration box");
        acc += octant(a, b, c);
      }
  return acc;
}

} // namespace tf::detail
