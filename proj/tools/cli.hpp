#pragma once

#include "tf/nuclear_configuration.hpp"
#include "tf/solution.hpp"

#include <iosfwd>
#include <string>

namespace tf::cli {

inline constexpr int kFormatVersion = 1;

/// Runs the command line; 0 on success, 1 on solver failure, 2 on usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// {"nuclei":[{"Z":..., "R":[x,y,z]}, ...]} with an optional "N".
struct MoleculeFile {
  NuclearConfiguration nuclei;
  std::optional<double> electrons;
};

/// Throws ParseError naming the line or the offending field; validation
/// failures of the configuration propagate as DomainError.
MoleculeFile parse_molecule(const std::string& text);
MoleculeFile parse_molecule_file(const std::string& path);
std::string molecule_to_json(const NuclearConfiguration& nuclei);

/// JSON result record of a solve.
std::string result_json(const std::string& command, const TFSolution& sol, const SolverConfig& config);

/// CSV profile with header r,rho,phi.
std::string radial_profile_csv(const TFSolution& sol);

/// Writes <prefix>.json plus <prefix>_density.bin and <prefix>_potential.bin.
void write_grid_fields(const std::string& prefix, const TFSolution& sol);

} // namespace tf::cli
