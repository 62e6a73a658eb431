#include "tf/universal.hpp"

#include "tf/error.hpp"
#include "tf/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace tf {

namespace {

// Integration starts off the singular origin at this x using the series.
constexpr double kSeriesEnd = 1e-4;
// Shooting classification horizon; the bracketing solutions separate well before.
constexpr double kShootingHorizon = 1e3;
constexpr double kSlopeGuessLow = 1.0;
constexpr double kSlopeGuessHigh = 2.0;
// Outward and inward solutions are joined here (both y and y' continuous).
constexpr double kMatchPoint = 4.0;

ode::State rhs(double x, const ode::State& s) { return {s[1], universal_rhs(x, s[0])}; }
using RhsFn = ode::State (*)(double, const ode::State&);

ode::Integrator<RhsFn> start_from_origin(double B, double tol) {
  const OriginSeries series(B);
  return ode::Integrator<RhsFn>(&rhs, kSeriesEnd, {series.value(kSeriesEnd), series.derivative(kSeriesEnd)},
                                1e-6, {tol, 1e-300});
}

// +1: slope too steep (y crosses zero); -1: too shallow (y turns upward); 0: undecided.
int classify(double B, double tol) {
  auto integ = start_from_origin(B, tol);
  int verdict = 0;
  integ.advance(kShootingHorizon, [&](double, const ode::State& s) {
    if (s[0] < 0.0) verdict = 1;
    else if (s[1] > 0.0) verdict = -1;
    return verdict != 0;
  });
  return verdict;
}

struct Bracket {
  double lo;
  double hi;
};

Bracket neutral_bracket(double tol) {
  double lo = kSlopeGuessLow, hi = kSlopeGuessHigh;
  if (classify(lo, tol) != -1 || classify(hi, tol) != 1)
    throw ConvergenceError("neutral shooting bracket [1, 2] does not straddle the solution");
  for (int it = 0; it < 200 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const int v = classify(mid, tol);
    if (v == 1) hi = mid;
    else if (v == -1) lo = mid;
    else return {mid, mid};
  }
  return {lo, hi};
}

// y and y' at every node from the series (x < kSeriesEnd) and the integrator;
// stops recording after `stop` fires. Returns the number of recorded nodes.
template <class Stop>
std::size_t record_outward(double B, double tol, std::span<const double> x, std::vector<double>& y,
                           std::vector<double>& dy, Stop&& stop) {
  const OriginSeries series(B);
  std::size_t i = 0;
  for (; i < x.size() && x[i] <= kSeriesEnd; ++i) {
    y[i] = series.value(x[i]);
    dy[i] = series.derivative(x[i]);
  }
  auto integ = start_from_origin(B, tol);
  for (; i < x.size(); ++i) {
    bool stopped = integ.advance(x[i], [&](double xx, const ode::State& s) { return stop(xx, s); });
    if (stopped) return i;
    y[i] = integ.y()[0];
    dy[i] = integ.y()[1];
  }
  return i;
}

ode::Integrator<RhsFn> start_from_tail(double c, double x_start, double tol) {
  const SommerfeldSeries tail(c);
  return ode::Integrator<RhsFn>(&rhs, x_start, {tail.value(x_start), tail.derivative(x_start)}, -1e-2 * x_start,
                                {tol, 1e-300});
}

ode::State outward_state(double B, double x, double tol) {
  auto integ = start_from_origin(B, tol);
  integ.advance(x);
  return integ.y();
}

ode::State inward_state(double c, double x_start, double x, double tol) {
  auto integ = start_from_tail(c, x_start, tol);
  integ.advance(x);
  return integ.y();
}

} // namespace

double sommerfeld_exponent() { return 0.5 * (std::sqrt(73.0) - 7.0); }

double universal_rhs(double x, double y) {
  const double yp = std::max(y, 0.0);
  return yp * std::sqrt(yp) / std::sqrt(x);
}

OriginSeries::OriginSeries(double B, std::size_t terms) : c_(std::max<std::size_t>(terms, 4), 0.0) {
  // y'' = y^(3/2)/sqrt(x) in t = sqrt(x): k(k-2) c_k / 4 = p_{k-3}, p = (sum c t^k)^(3/2).
  const std::size_t n = c_.size();
  std::vector<double> p(n, 0.0);
  c_[0] = 1.0;
  c_[1] = 0.0;
  c_[2] = -B;
  p[0] = 1.0;
  for (std::size_t k = 3; k < n; ++k) {
    const std::size_t m = k - 3;
    if (m > 0) {
      double acc = 0.0;
      for (std::size_t j = 1; j <= m; ++j)
        acc += (2.5 * static_cast<double>(j) - static_cast<double>(m)) * c_[j] * p[m - j];
      p[m] = acc / static_cast<double>(m);
    }
    c_[k] = 4.0 * p[m] / static_cast<double>(k * (k - 2));
  }
}

double OriginSeries::value(double x) const {
  const double t = std::sqrt(x);
  double acc = 0.0;
  for (std::size_t k = c_.size(); k-- > 0;) acc = acc * t + c_[k];
  return acc;
}

double OriginSeries::derivative(double x) const {
  // dy/dx = sum_{k>=2} k c_k t^(k-2) / 2
  const double t = std::sqrt(x);
  double acc = 0.0;
  for (std::size_t k = c_.size(); k-- > 2;) acc = acc * t + 0.5 * static_cast<double>(k) * c_[k];
  return acc;
}

SommerfeldSeries::SommerfeldSeries(double c, std::size_t terms) : c_(c), a_(std::max<std::size_t>(terms, 2), 0.0) {
  // 144 x^-3 (1+e) solves the ODE iff a_k [(3 + k lam)(4 + k lam) - 18] = 12 r_k,
  // where r_k collects the a_1..a_{k-1} part of the k-th coefficient of (1+e)^(3/2).
  const double lam = sommerfeld_exponent();
  const std::size_t n = a_.size();
  std::vector<double> A(n + 1, 0.0), g(n + 1, 0.0);
  A[0] = 1.0;
  A[1] = 1.0;
  g[0] = 1.0;
  g[1] = 1.5;
  a_[0] = 1.0; // a_1
  for (std::size_t k = 2; k <= n; ++k) {
    double r = 0.0;
    for (std::size_t j = 1; j < k; ++j)
      r += (2.5 * static_cast<double>(j) - static_cast<double>(k)) * A[j] * g[k - j];
    r /= static_cast<double>(k);
    const double kl = static_cast<double>(k) * lam;
    A[k] = 12.0 * r / ((3.0 + kl) * (4.0 + kl) - 18.0);
    g[k] = r + 1.5 * A[k];
    a_[k - 1] = A[k];
  }
}

double SommerfeldSeries::value(double x) const {
  const double u = c_ * std::pow(x, -sommerfeld_exponent());
  double e = 0.0;
  for (std::size_t k = a_.size(); k-- > 0;) e = (e + a_[k]) * u;
  return 144.0 / (x * x * x) * (1.0 + e);
}

double SommerfeldSeries::derivative(double x) const {
  const double lam = sommerfeld_exponent();
  const double u = c_ * std::pow(x, -lam);
  double e = 0.0, ue_prime = 0.0;
  double uk = 1.0;
  for (std::size_t k = 0; k < a_.size(); ++k) {
    uk *= u;
    e += a_[k] * uk;
    ue_prime += static_cast<double>(k + 1) * a_[k] * uk;
  }
  return 144.0 / (x * x * x * x) * (-3.0 * (1.0 + e) - lam * ue_prime);
}

double neutral_initial_slope(double ode_tolerance) {
  const auto b = neutral_bracket(ode_tolerance);
  return 0.5 * (b.lo + b.hi);
}

std::optional<ZeroCrossing> zero_crossing(double B, double ode_tolerance) {
  auto integ = start_from_origin(B, ode_tolerance);
  bool crossed = false;
  integ.advance(kShootingHorizon, [&](double, const ode::State& s) {
    if (s[0] < 0.0) {
      crossed = true;
      return true;
    }
    return s[1] > 0.0;
  });
  if (!crossed) return std::nullopt;
  // Bisection on the length of the final step.
  double lo = 0.0, hi = integ.x() - integ.previous_x();
  ode::State at = integ.previous_y();
  for (int it = 0; it < 200 && hi - lo > 1e-15 * integ.x(); ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto s = integ.step_from_previous(mid);
    if (s[0] > 0.0) lo = mid;
    else hi = mid;
    at = s;
  }
  const double h = 0.5 * (lo + hi);
  at = integ.step_from_previous(h);
  return ZeroCrossing{integ.previous_x() + h, at[1]};
}

namespace {

UniversalSolution solve_neutral(const UniversalOptions& opt) {
  const double tol = opt.ode_tolerance;
  const auto bracket = neutral_bracket(tol);
  UniversalSolution sol{RadialGrid::logarithmic(opt.xmin, opt.xmax, opt.node_count, true), {}, {}, 0.0, std::nullopt};
  const auto x = sol.grid.nodes();
  const std::size_t n = x.size();
  sol.initial_slope = 0.5 * (bracket.lo + bracket.hi);
  sol.q = 0.0;

  // Join an outward shot at x_m with an inward solution started on the
  // asymptotic series: Newton on (B, c) for continuity of y and y'.
  std::size_t im = 0;
  while (im + 1 < n && x[im + 1] <= kMatchPoint) ++im;
  const double xm = x[im];
  const double x_start = std::max(1e4, 10.0 * opt.xmax);
  double B = sol.initial_slope;
  double c = -13.27;
  auto mismatch = [&](double b, double cc) {
    const auto o = outward_state(b, xm, tol);
    const auto i = inward_state(cc, x_start, xm, tol);
    return std::array<double, 2>{o[0] - i[0], o[1] - i[1]};
  };
  auto F = mismatch(B, c);
  for (int it = 0; it < 30; ++it) {
    const double hB = 1e-7 * B, hc = 1e-7 * std::abs(c);
    const auto FB = mismatch(B + hB, c);
    const auto Fc = mismatch(B, c + hc);
    const double J00 = (FB[0] - F[0]) / hB, J10 = (FB[1] - F[1]) / hB;
    const double J01 = (Fc[0] - F[0]) / hc, J11 = (Fc[1] - F[1]) / hc;
    const double det = J00 * J11 - J01 * J10;
    if (det == 0.0 || !std::isfinite(det)) throw ConvergenceError("singular Jacobian in neutral matching");
    const double dB = (F[0] * J11 - F[1] * J01) / det;
    const double dc = (J00 * F[1] - J10 * F[0]) / det;
    B -= dB;
    c -= dc;
    F = mismatch(B, c);
    if (std::abs(dB) < 1e-14 * B && std::abs(dc) < 1e-12 * std::abs(c)) break;
  }
  if (!(std::abs(B - sol.initial_slope) < 1e-8)) throw ConvergenceError("neutral matching drifted from the shooting slope");
  sol.initial_slope = B;
  sol.asymptotic_coefficient = c;
  sol.match_point = xm;

  sol.y.assign(n, 0.0);
  sol.dy.assign(n, 0.0);
  record_outward(B, tol, x.first(im + 1), sol.y, sol.dy, [](double, const ode::State&) { return false; });
  if (im + 1 == n) return sol;

  auto integ = start_from_tail(c, x_start, tol);
  for (std::size_t i = n; i-- > im + 1;) {
    integ.advance(x[i]);
    sol.y[i] = integ.y()[0];
    sol.dy[i] = integ.y()[1];
  }
  integ.advance(xm);
  sol.match_slope_error = std::abs(integ.y()[1] - sol.dy[im]) / std::abs(sol.dy[im]);
  return sol;
}

UniversalSolution solve_ion(double q, const UniversalOptions& opt) {
  const double tol = opt.ode_tolerance;
  const auto neutral = neutral_bracket(tol);
  auto q_of = [&](double B) {
    const auto zc = zero_crossing(B, tol);
    return zc ? -zc->x0 * zc->slope : 0.0;
  };
  double lo = neutral.hi, hi = 2.0 * neutral.hi;
  for (int it = 0; q_of(hi) < q; ++it) {
    if (it > 60) throw ConvergenceError("could not bracket the ionic shooting slope");
    lo = hi;
    hi *= 2.0;
  }
  double B = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    B = 0.5 * (lo + hi);
    if (B <= lo || B >= hi) break;
    const double qm = q_of(B);
    if (std::abs(qm - q) < 1e-12) break;
    if (qm < q) lo = B;
    else hi = B;
  }
  const auto zc = zero_crossing(B, tol);
  if (!zc) throw ConvergenceError("ionic shooting lost its zero crossing");
  const double x0 = zc->x0;
  if (!(x0 > 10.0 * opt.xmin)) throw ConvergenceError("ionic support edge falls below the radial grid");

  const double log_step = std::log(x0 / opt.xmin) / static_cast<double>(opt.node_count - 1);
  const double breaks[] = {opt.xmin, x0, 4.0 * x0};
  UniversalSolution sol{RadialGrid::segmented(breaks, log_step, false), {}, {}, B, std::nullopt};
  sol.q = -x0 * zc->slope;
  sol.support_end = x0;
  const auto x = sol.grid.nodes();
  const std::size_t edge = sol.grid.segment_bounds()[1];
  sol.y.assign(x.size(), 0.0);
  sol.dy.assign(x.size(), 0.0);
  record_outward(B, tol, x.first(edge), sol.y, sol.dy, [](double, const ode::State&) { return false; });
  sol.y[edge] = 0.0;
  sol.dy[edge] = zc->slope;
  for (std::size_t i = 0; i < edge; ++i) sol.y[i] = std::max(sol.y[i], 0.0);
  return sol;
}

} // namespace

UniversalSolution solve_universal(double q, const UniversalOptions& options) {
  if (!(q >= 0.0 && q < 1.0)) throw DomainError("ionisation q must lie in [0, 1)");
  if (options.node_count < 256) throw ConfigurationError("universal grid needs at least 256 nodes");
  return q == 0.0 ? solve_neutral(options) : solve_ion(q, options);
}

} // namespace tf
