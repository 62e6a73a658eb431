#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <cstddef>

#include "tf/error.hpp"

namespace tf::ode {

using State = std::array<double, 2>;

struct StepResult {
  State y;
  double error; ///< scaled error norm; <= 1 means acceptable
};

/// One Dormand-Prince 5(4) step of size h (h may be negative).
template <class F> StepResult dopri5_step(F&& f, double x, const State& y, double h, double rtol, double atol) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto axpy = [](const State& base, double h, std::initializer_list<std::pair<double, const State*>> terms) {
    State out = base;
    for (const auto& [c, k] : terms)
      for (std::size_t i = 0; i < 2; ++i) out[i] += h * c * (*k)[i];
    return out;
  };

  const State k1 = f(x, y);
  const State k2 = f(x + c2 * h, axpy(y, h, {{a21, &k1}}));
  const State k3 = f(x + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
  const State k4 = f(x + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const State k5 = f(x + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const State k6 = f(x + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  const State y5 = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const State k7 = f(x + h, y5);

  double err = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
    err = std::max(err, std::abs(e) / sc);
  }
  return {y5, err};
}

struct Tolerance {
  double rtol = 1e-13;
  double atol = 1e-300;
};

/// Adaptive integrator state that can be advanced to successive targets while
/// keeping its step-size estimate.
template <class F> class Integrator {
public:
  Integrator(F f, double x, State y, double h, Tolerance tol) : f_(std::move(f)), x_(x), y_(y), h_(h), tol_(tol) {}

  double x() const { return x_; }
  const State& y() const { return y_; }
  double previous_x() const { return xp_; }
  const State& previous_y() const { return yp_; }

  /// Advance to x_end, or until stop(x, y) is true after an accepted step.
  /// Returns true if stopped early.
  template <class Stop> bool advance(double x_end, Stop&& stop) {
    const double dir = x_end > x_ ? 1.0 : -1.0;
    h_ = dir * std::abs(h_);
    while (dir * (x_end - x_) > 0.0) {
      double h = h_;
      bool last = false;
      if (dir * (x_ + h - x_end) >= 0.0) {
        h = x_end - x_;
        last = true;
      }
      const auto step = dopri5_step(f_, x_, y_, h, tol_.rtol, tol_.atol);
      if (!std::isfinite(step.error) || step.error > 1.0) {
        const double fac = std::isfinite(step.error) ? std::max(0.2, 0.9 * std::pow(step.error, -0.2)) : 0.2;
        h_ = h * fac;
        if (std::abs(h_) < 1e-15 * std::max(1.0, std::abs(x_)))
          throw ConvergenceError("ODE step size underflow at x = " + std::to_string(x_));
        continue;
      }
      xp_ = x_;
      yp_ = y_;
      x_ = last ? x_end : x_ + h;
      y_ = step.y;
      const double fac = step.error == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(step.error, -0.2));
      if (!last || fac < 1.0) h_ = h * fac;
      if (stop(x_, y_)) return true;
    }
    return false;
  }

  bool advance(double x_end) {
    return advance(x_end, [](double, const State&) { return false; });
  }

  /// Single step from the previous accepted point, used for event refinement.
  State step_from_previous(double h) const { return dopri5_step(f_, xp_, yp_, h, tol_.rtol, tol_.atol).y; }

private:
  F f_;
  double x_;
  State y_;
  double h_;
  Tolerance tol_;
  double xp_ = 0.0;
  State yp_{};
};

} // namespace tf::ode
