#pragma once

#include "tf/radial_grid.hpp"

#include <optional>
#include <vector>

namespace tf {

/// Exponent of the leading correction to the Sommerfeld tail,
/// y = 144 x^-3 (1 + c x^-lambda + ...), lambda = (sqrt(73) - 7) / 2.
double sommerfeld_exponent();

/// Right-hand side of y'' = y^(3/2) / sqrt(x) (y clipped at 0).
double universal_rhs(double x, double y);

/// Power series y = sum_k c_k t^k in t = sqrt(x) for y(0) = 1, y'(0) = -B.
class OriginSeries {
public:
  OriginSeries(double B, std::size_t terms = 24);
  double value(double x) const;
  double derivative(double x) const;
  const std::vector<double>& coefficients() const { return c_; }

private:
  std::vector<double> c_;
};

/// Large-x expansion y = 144 x^-3 (1 + sum_k a_k u^k), u = c x^-lambda, a_1 = 1.
class SommerfeldSeries {
public:
  explicit SommerfeldSeries(double c, std::size_t terms = 8);
  double value(double x) const;
  double derivative(double x) const;
  double coefficient() const { return c_; }
  const std::vector<double>& expansion() const { return a_; }

private:
  double c_;
  std::vector<double> a_;
};

struct UniversalOptions {
  double xmin = 1e-6;
  double xmax = 1e3;
  std::size_t node_count = 4001;
  double ode_tolerance = 1e-13;
};

/// Solution of y'' = y^(3/2)/sqrt(x), y(0) = 1, on a log grid in x.
/// Neutral (q = 0): y decays like 144/x^3. Ionised (q > 0): y(x0) = 0 with
/// -x0 y'(x0) = q; nodes beyond x0 carry y = 0.
struct UniversalSolution {
  RadialGrid grid;
  std::vector<double> y;
  std::vector<double> dy;
  double initial_slope = 0.0; ///< B = -y'(0)
  std::optional<double> support_end; ///< x0 for ions
  double q = 0.0;
  double asymptotic_coefficient = 0.0; ///< c of the Sommerfeld tail (neutral)
  double match_point = 0.0;            ///< neutral: hand-over from shooting to the tail
  double match_slope_error = 0.0;      ///< relative y' mismatch at the hand-over
};

/// -y'(0) of the neutral solution by bisection on the shooting slope.
double neutral_initial_slope(double ode_tolerance = 1e-13);

/// First zero of the solution with initial slope -B, or nullopt if the
/// solution turns upward (B below the neutral slope) before crossing zero.
struct ZeroCrossing {
  double x0;
  double slope; ///< y'(x0)
};
std::optional<ZeroCrossing> zero_crossing(double B, double ode_tolerance = 1e-13);

/// Solve for q in [0, 1). Throws DomainError for q outside, ConvergenceError
/// if the shooting bracket cannot be established.
UniversalSolution solve_universal(double q, const UniversalOptions& options = {});

} // namespace tf
