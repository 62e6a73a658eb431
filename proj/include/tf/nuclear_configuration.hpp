#pragma once

#include <array>
#include <span>
#include <vector>

namespace tf {

using Vec3 = std::array<double, 3>;

double distance(const Vec3& a, const Vec3& b);

struct Nucleus {
  double charge;
  Vec3 position;

  bool operator==(const Nucleus&) const = default;
};

/// The K nuclei of a molecule. Construction validates: K >= 1, every charge
/// positive and finite, positions pairwise distinct.
class NuclearConfiguration {
public:
  explicit NuclearConfiguration(std::vector<Nucleus> nuclei);

  static NuclearConfiguration atom(double Z, Vec3 position = {0.0, 0.0, 0.0});

  std::span<const Nucleus> nuclei() const { return nuclei_; }
  std::size_t size() const { return nuclei_.size(); }
  const Nucleus& operator[](std::size_t i) const { return nuclei_[i]; }

  /// Sum of charges, ascending index order.
  double total_charge() const { return total_Z_; }

  /// Positions multiplied by `scale` about the origin.
  NuclearConfiguration dilated(double scale) const;

  bool operator==(const NuclearConfiguration& o) const { return nuclei_ == o.nuclei_; }

private:
  std::vector<Nucleus> nuclei_;
  double total_Z_ = 0.0;
};

/// V(x) = sum_j Z_j / |x - R_j|. Throws SingularityError at a nucleus.
double external_potential(const NuclearConfiguration& config, const Vec3& x);

/// U = sum_{i<j} Z_i Z_j / |R_i - R_j|.
double nuclear_repulsion(const NuclearConfiguration& config);

} // namespace tf
