#include "tf/grid3d.hpp"

#include "tf/error.hpp"

namespace tf {

void Grid3D::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (extents[a] < 32) throw ConfigurationError("3D grid needs at least 32 nodes per axis");
    if (!(spacing[a] > 0.0)) throw ConfigurationError("3D grid spacing must be positive");
  }
}

Grid3D Grid3D::centred_cube(const Vec3& centre, std::size_t n, double spacing) {
  Grid3D g;
  const double half = 0.5 * spacing * static_cast<double>(n - 1);
  for (int a = 0; a < 3; ++a) {
    g.origin[a] = centre[a] - half;
    g.spacing[a] = spacing;
    g.extents[a] = n;
  }
  return g;
}

ScalarField3D::ScalarField3D(Grid3D g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw DomainError("field size does not match its grid");
}

double ScalarField3D::integral() const {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc * grid.cell_volume();
}

} // namespace tf
