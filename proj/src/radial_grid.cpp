#include "tf/radial_grid.hpp"

#include "tf/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tf {

namespace {

constexpr std::size_t kFitNodes = 8;

// Coefficients (x 1/24) of the 4-point interval rule on a uniform grid.
constexpr double kFirst[4] = {9.0, 19.0, -5.0, 1.0};
constexpr double kInner[4] = {-1.0, 13.0, 13.0, -1.0};
constexpr double kLast[4] = {1.0, -5.0, 19.0, 9.0};

double segment_step(std::span<const double> nodes, std::size_t lo, std::size_t hi) {
  return std::log(nodes[hi] / nodes[lo]) / static_cast<double>(hi - lo);
}

// Integral of F over interval [i, i+1] of a segment [lo, hi] in units of h.
template <class Fn> double interval_integral(Fn&& F, std::size_t i, std::size_t lo, std::size_t hi) {
  const std::size_t m = hi - lo;
  if (m < 3) return 0.5 * (F(i) + F(i + 1));
  const double* c = kInner;
  std::size_t first = i - 1;
  if (i == lo) {
    c = kFirst;
    first = lo;
  } else if (i + 1 == hi) {
    c = kLast;
    first = hi - 3;
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < 4; ++k) acc += c[k] * F(first + k);
  return acc / 24.0;
}

} // namespace

double PowerLaw::operator()(double r) const { return coefficient * std::pow(r, exponent); }

std::optional<PowerLaw> fit_power_law(std::span<const double> r, std::span<const double> f) {
  const std::size_t n = std::min(r.size(), f.size());
  if (n < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(f[i] > 0.0) || !std::isfinite(f[i])) return std::nullopt;
    const double x = std::log(r[i]);
    const double y = std::log(f[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dn = static_cast<double>(n);
  const double det = dn * sxx - sx * sx;
  if (det == 0.0) return std::nullopt;
  const double p = (dn * sxy - sx * sy) / det;
  const double lnC = (sy - p * sx) / dn;
  return PowerLaw{std::exp(lnC), p};
}

RadialGrid::RadialGrid(std::vector<double> nodes, std::vector<std::size_t> bounds, bool open_tail)
    : nodes_(std::move(nodes)), bounds_(std::move(bounds)), open_tail_(open_tail) {
  build_weights();
}

RadialGrid RadialGrid::logarithmic(double rmin, double rmax, std::size_t node_count, bool open_tail) {
  if (!(rmin > 0.0) || !(rmax > rmin) || node_count < 4)
    throw ConfigurationError("radial grid needs 0 < rmin < rmax and at least 4 nodes");
  std::vector<double> nodes(node_count);
  const double h = std::log(rmax / rmin) / static_cast<double>(node_count - 1);
  for (std::size_t i = 0; i < node_count; ++i) nodes[i] = rmin * std::exp(h * static_cast<double>(i));
  nodes.back() = rmax;
  return RadialGrid(std::move(nodes), {0, node_count - 1}, open_tail);
}

RadialGrid RadialGrid::segmented(std::span<const double> breaks, double log_step, bool open_tail) {
  if (breaks.size() < 2 || !(breaks.front() > 0.0) || !(log_step > 0.0))
    throw ConfigurationError("segmented radial grid needs >= 2 positive breaks");
  std::vector<double> nodes{breaks.front()};
  std::vector<std::size_t> bounds{0};
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k], b = breaks[k + 1];
    if (!(b > a)) throw ConfigurationError("radial grid breaks must be strictly increasing");
    const double len = std::log(b / a);
    const auto m = std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(len / log_step - 1e-9)));
    const double h = len / static_cast<double>(m);
    for (std::size_t i = 1; i < m; ++i) nodes.push_back(a * std::exp(h * static_cast<double>(i)));
    nodes.push_back(b);
    bounds.push_back(nodes.size() - 1);
  }
  return RadialGrid(std::move(nodes), std::move(bounds), open_tail);
}

RadialGrid RadialGrid::scaled(double factor) const {
  std::vector<double> nodes(nodes_);
  for (auto& r : nodes) r *= factor;
  return RadialGrid(std::move(nodes), bounds_, open_tail_);
}

void RadialGrid::build_weights() {
  weights_.assign(nodes_.size(), 0.0);
  for (std::size_t s = 0; s + 1 < bounds_.size(); ++s) {
    const std::size_t lo = bounds_[s], hi = bounds_[s + 1];
    const double h = segment_step(nodes_, lo, hi);
    const std::size_t m = hi - lo;
    for (std::size_t i = lo; i < hi; ++i) {
      if (m < 3) {
        weights_[i] += 0.5 * h;
        weights_[i + 1] += 0.5 * h;
        continue;
      }
      const double* c = kInner;
      std::size_t first = i - 1;
      if (i == lo) {
        c = kFirst;
        first = lo;
      } else if (i + 1 == hi) {
        c = kLast;
        first = hi - 3;
      }
      for (std::size_t k = 0; k < 4; ++k) weights_[first + k] += h * c[k] / 24.0;
    }
  }
  // dr = r ds
  for (std::size_t i = 0; i < nodes_.size(); ++i) weights_[i] *= nodes_[i];
}

double RadialGrid::head_correction(std::span<const double> f) const {
  const std::size_t n = std::min(kFitNodes, bounds_.size() > 1 ? bounds_[1] + 1 : nodes_.size());
  const auto fit = fit_power_law(std::span(nodes_).first(n), f.first(n));
  if (!fit) return f[0] == 0.0 ? 0.0 : 0.5 * f[0] * nodes_[0];
  if (fit->exponent <= -1.0)
    throw DomainError("integrand not integrable at r -> 0 (power " + std::to_string(fit->exponent) + ")");
  return fit->coefficient * std::pow(nodes_[0], fit->exponent + 1.0) / (fit->exponent + 1.0);
}

namespace {

// ln f = a + p s + b exp(-k s) through five samples m nodes apart ending at
// the last node (s = ln r); integrated term by term from r_max to infinity.
std::optional<double> drifting_power_tail(std::span<const double> r, std::span<const double> f, std::size_t m) {
  const std::size_t n = r.size();
  if (m == 0 || 4 * m + 1 > n) return std::nullopt;
  double L[5], s[5];
  for (std::size_t i = 0; i < 5; ++i) {
    const std::size_t j = n - 1 - (4 - i) * m;
    if (!(f[j] > 0.0)) return std::nullopt;
    L[i] = std::log(f[j]);
    s[i] = std::log(r[j]);
  }
  const double d = s[1] - s[0];
  const double D1 = L[3] - 2.0 * L[2] + L[1], D2 = L[4] - 2.0 * L[3] + L[2];
  if (std::abs(D1) < 1e-9 || !(D2 / D1 > 0.0 && D2 / D1 < 1.0)) return std::nullopt;
  const double k = -std::log(D2 / D1) / d;
  const double g = std::exp(-k * d) - 1.0;
  const double e2 = std::exp(-k * s[2]), e3 = std::exp(-k * s[3]);
  const double b = ((L[4] - L[3]) - (L[3] - L[2])) / ((e3 - e2) * g);
  const double p = ((L[4] - L[3]) - b * e3 * g) / d;
  if (p >= -1.0) throw DomainError("integrand not integrable at r -> inf (power " + std::to_string(p) + ")");
  const double R = r[n - 1];
  const double u = b * std::exp(-k * s[4]);
  if (!(std::abs(u) < 1.0)) return std::nullopt;
  double acc = 0.0, term = 1.0;
  for (int j = 0; j < 40; ++j) {
    if (j > 0) term *= u / j;
    acc += term / (-(p + 1.0 - j * k));
  }
  return f[n - 1] * std::exp(-u) * R * acc;
}

} // namespace

double RadialGrid::tail_correction(std::span<const double> f) const {
  if (!open_tail_) return 0.0;
  const std::size_t last_seg = bounds_[bounds_.size() - 2];
  const auto r = std::span(nodes_).subspan(last_seg);
  const auto ft = f.subspan(last_seg);
  const double h = std::log(r[1] / r[0]);
  const auto m = static_cast<std::size_t>(std::max(1.0, std::round(0.05 / h)));
  if (const auto t = drifting_power_tail(r, ft, m)) return *t;
  const std::size_t n = std::min(kFitNodes, nodes_.size() - last_seg);
  const std::size_t first = nodes_.size() - n;
  const auto fit = fit_power_law(std::span(nodes_).subspan(first, n), f.subspan(first, n));
  if (!fit) return 0.0;
  if (fit->exponent >= -1.0)
    throw DomainError("integrand not integrable at r -> inf (power " + std::to_string(fit->exponent) + ")");
  const double rmax = nodes_.back();
  return -fit->coefficient * std::pow(rmax, fit->exponent + 1.0) / (fit->exponent + 1.0);
}

double RadialGrid::integrate(std::span<const double> f) const {
  if (f.size() != nodes_.size()) throw DomainError("integrand size does not match the radial grid");
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * f[i];
  return head_correction(f) + acc + tail_correction(f);
}

std::vector<double> RadialGrid::cumulative(std::span<const double> f) const {
  if (f.size() != nodes_.size()) throw DomainError("integrand size does not match the radial grid");
  std::vector<double> out(nodes_.size(), 0.0);
  auto F = [&](std::size_t j) { return f[j] * nodes_[j]; };
  for (std::size_t s = 0; s + 1 < bounds_.size(); ++s) {
    const std::size_t lo = bounds_[s], hi = bounds_[s + 1];
    const double h = segment_step(nodes_, lo, hi);
    for (std::size_t i = lo; i < hi; ++i) out[i + 1] = out[i] + h * interval_integral(F, i, lo, hi);
  }
  return out;
}

std::optional<double> RadialGrid::interpolate(std::span<const double> values, double r) const {
  if (r < nodes_.front() || r > nodes_.back()) return std::nullopt;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
  std::size_t j = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  if (j + 1 >= nodes_.size()) return values.back();
  // Segment containing interval [j, j+1].
  auto sb = std::upper_bound(bounds_.begin(), bounds_.end(), j);
  const std::size_t hi = *sb;
  const std::size_t lo = *(sb - 1);
  if (hi - lo < 3) {
    const double t = std::log(r / nodes_[j]) / std::log(nodes_[j + 1] / nodes_[j]);
    return values[j] + t * (values[j + 1] - values[j]);
  }
  std::size_t first = j == lo ? lo : j - 1;
  if (first + 3 > hi) first = hi - 3;
  const double s = std::log(r);
  double sk[4];
  for (int k = 0; k < 4; ++k) sk[k] = std::log(nodes_[first + k]);
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    double l = 1.0;
    for (int m = 0; m < 4; ++m)
      if (m != k) l *= (s - sk[m]) / (sk[k] - sk[m]);
    acc += l * values[first + k];
  }
  return acc;
}

double RadialDensity::electron_count() const {
  std::vector<double> f(values.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 4.0 * std::numbers::pi * grid[i] * grid[i] * values[i];
  return grid.integrate(f);
}

double RadialDensity::at(double r) const {
  if (r < grid.front()) {
    const std::size_t n = std::min<std::size_t>(kFitNodes, grid.size());
    auto fit = fit_power_law(grid.nodes().first(n), std::span(values).first(n));
    return fit ? (*fit)(r) : values.front();
  }
  if (r > grid.back()) {
    if (!grid.open_tail()) return 0.0;
    const std::size_t n = std::min<std::size_t>(kFitNodes, grid.size());
    const std::size_t first = grid.size() - n;
    auto fit = fit_power_law(grid.nodes().subspan(first, n), std::span(values).subspan(first, n));
    return fit ? (*fit)(r) : 0.0;
  }
  return std::max(0.0, *grid.interpolate(values, r));
}

void RadialDensity::validate() const {
  if (values.size() != grid.size()) throw DomainError("density size does not match its grid");
  for (double v : values)
    if (!std::isfinite(v) || v < 0.0) throw DomainError("density must be finite and nonnegative");
}

} // namespace tf
