#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace tf {

/// Logarithmically spaced radial nodes, possibly split into segments at
/// prescribed break radii (each break is a node shared by the two adjacent
/// segments). Quadrature works in s = ln r with a 4th-order interval rule per
/// segment, a power-law correction for [0, r_0] and, on open grids, a
/// power-law tail correction for [r_max, inf).
class RadialGrid {
public:
  /// `node_count` nodes on [rmin, rmax].
  static RadialGrid logarithmic(double rmin, double rmax, std::size_t node_count,
                                bool open_tail = true);

  /// Segments [breaks[k], breaks[k+1]] with a log step close to `log_step`.
  static RadialGrid segmented(std::span<const double> breaks, double log_step, bool open_tail);

  std::span<const double> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  double operator[](std::size_t i) const { return nodes_[i]; }
  double front() const { return nodes_.front(); }
  double back() const { return nodes_.back(); }
  bool open_tail() const { return open_tail_; }

  /// Node indices at which segments start, plus the final node index.
  std::span<const std::size_t> segment_bounds() const { return bounds_; }

  /// Same segment structure with every node multiplied by `factor`.
  RadialGrid scaled(double factor) const;

  /// Quadrature weights for int f(r) dr over [r_0, r_max] (no end corrections).
  const std::vector<double>& weights() const { return weights_; }

  /// int_0^inf f(r) dr using the node values of f.
  double integrate(std::span<const double> f) const;

  /// C_i = int_{r_0}^{r_i} f(r) dr.
  std::vector<double> cumulative(std::span<const double> f) const;

  /// int_0^{r_0} f via a power-law fit on the first nodes (0 if not fittable).
  double head_correction(std::span<const double> f) const;

  /// int_{r_max}^inf f via a power-law fit on the last nodes (open grids only).
  double tail_correction(std::span<const double> f) const;

  /// Cubic Lagrange interpolation in ln r within the segment containing r.
  /// Outside [r_0, r_max] returns nullopt.
  std::optional<double> interpolate(std::span<const double> values, double r) const;

  bool operator==(const RadialGrid& o) const {
    return nodes_ == o.nodes_ && bounds_ == o.bounds_ && open_tail_ == o.open_tail_;
  }

private:
  RadialGrid(std::vector<double> nodes, std::vector<std::size_t> bounds, bool open_tail);
  void build_weights();

  std::vector<double> nodes_;
  std::vector<std::size_t> bounds_;
  bool open_tail_ = true;
  std::vector<double> weights_;
};

/// Fit f ~ C r^p by least squares in log-log over the given nodes. Returns
/// nullopt if any value is nonpositive or non-finite.
struct PowerLaw {
  double coefficient;
  double exponent;
  double operator()(double r) const;
};
std::optional<PowerLaw> fit_power_law(std::span<const double> r, std::span<const double> f);

/// Electron density on a radial grid, centred on a nucleus.
struct RadialDensity {
  RadialGrid grid;
  std::vector<double> values;

  /// int 4 pi r^2 rho dr.
  double electron_count() const;
  /// Density at arbitrary r (0 outside closed grids, power-law extrapolation
  /// below r_0 and beyond an open r_max).
  double at(double r) const;
  /// Throws DomainError on negative / non-finite values or size mismatch.
  void validate() const;
};

} // namespace tf
