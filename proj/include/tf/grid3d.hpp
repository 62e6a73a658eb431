#pragma once

#include "tf/nuclear_configuration.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace tf {

/// Uniform Cartesian grid. Node (i, j, k) sits at origin + (i, j, k) * spacing
/// and is stored at index i + nx * (j + ny * k).
struct Grid3D {
  Vec3 origin{};
  std::array<double, 3> spacing{};
  std::array<std::size_t, 3> extents{};

  std::size_t size() const { return extents[0] * extents[1] * extents[2]; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return i + extents[0] * (j + extents[1] * k);
  }
  Vec3 position(std::size_t i, std::size_t j, std::size_t k) const {
    return {origin[0] + spacing[0] * static_cast<double>(i), origin[1] + spacing[1] * static_cast<double>(j),
            origin[2] + spacing[2] * static_cast<double>(k)};
  }
  double cell_volume() const { return spacing[0] * spacing[1] * spacing[2]; }
  bool is_cubic() const { return spacing[0] == spacing[1] && spacing[1] == spacing[2]; }

  /// Throws ConfigurationError unless every extent >= 32 and spacings > 0.
  void validate() const;

  /// Cube of n^3 nodes with the given spacing, centred on `centre`.
  static Grid3D centred_cube(const Vec3& centre, std::size_t n, double spacing);

  bool operator==(const Grid3D&) const = default;
};

struct ScalarField3D {
  Grid3D grid;
  std::vector<double> values;

  ScalarField3D() = default;
  explicit ScalarField3D(Grid3D g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  ScalarField3D(Grid3D g, std::vector<double> v);

  /// Node sum times cell volume.
  double integral() const;
};

} // namespace tf
