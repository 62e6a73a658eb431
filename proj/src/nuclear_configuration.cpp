#include "tf/nuclear_configuration.hpp"

#include "tf/error.hpp"

#include <cmath>
#include <string>

namespace tf {

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

NuclearConfiguration::NuclearConfiguration(std::vector<Nucleus> nuclei) : nuclei_(std::move(nuclei)) {
  if (nuclei_.empty()) throw DomainError("a nuclear configuration needs at least one nucleus");
  for (std::size_t i = 0; i < nuclei_.size(); ++i) {
    const auto& n = nuclei_[i];
    if (!(n.charge > 0.0) || !std::isfinite(n.charge))
      throw DomainError("nucleus " + std::to_string(i) + ": charge must be positive and finite");
    for (double c : n.position)
      if (!std::isfinite(c)) throw DomainError("nucleus " + std::to_string(i) + ": non-finite position");
    for (std::size_t j = 0; j < i; ++j)
      if (nuclei_[j].position == n.position)
        throw DomainError("nucleus " + std::to_string(i) + " duplicates the position of nucleus " +
                          std::to_string(j));
  }
  for (const auto& n : nuclei_) total_Z_ += n.charge;
}

NuclearConfiguration NuclearConfiguration::atom(double Z, Vec3 position) {
  return NuclearConfiguration({Nucleus{Z, position}});
}

NuclearConfiguration NuclearConfiguration::dilated(double scale) const {
  auto nuclei = nuclei_;
  for (auto& n : nuclei)
    for (auto& c : n.position) c *= scale;
  return NuclearConfiguration(std::move(nuclei));
}

double external_potential(const NuclearConfiguration& config, const Vec3& x) {
  double v = 0.0;
  for (const auto& n : config.nuclei()) {
    const double d = distance(x, n.position);
    if (d == 0.0) throw SingularityError("external potential evaluated at a nuclear position");
    v += n.charge / d;
  }
  return v;
}

double nuclear_repulsion(const NuclearConfiguration& config) {
  double u = 0.0;
  const auto nuc = config.nuclei();
  for (std::size_t i = 0; i < nuc.size(); ++i)
    for (std::size_t j = i + 1; j < nuc.size(); ++j)
      u += nuc[i].charge * nuc[j].charge / distance(nuc[i].position, nuc[j].position);
  return u;
}

} // namespace tf
