#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qio/eom.hpp"
#include "qio/qec.hpp"

namespace qio::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 1;
inline constexpr int kExitNumerical = 2;

/// Runs one command; argv[0] is the program name. Returns the exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "d<X1>/dt = -0.1 <Y1> + 20 <Z1X2>" lines, one per variable.
std::string format_equations(const GeneratorMatrix& g);

/// Dense code state (Pi + x X Pi + y Y Pi + z Z Pi) / Tr(Pi) for a logical Bloch vector.
DensityMatrix encoded_density_matrix(const StabilizerCode& code, const BlochVector& logical);

}  // namespace qio::cli
