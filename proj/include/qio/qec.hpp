#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "qio/eom.hpp"
#include "qio/linalg.hpp"
#include "qio/pauli.hpp"
#include "qio/sim.hpp"

namespace qio {

/// One round of commuting syndrome measurements followed by a conditional
/// Pauli correction. Outcome patterns are bit masks: bit j set means
/// syndrome j read -1.
struct RecoveryStage {
  std::vector<PauliString> syndromes;
  std::vector<PauliString> recoveries;  // indexed by outcome mask, size 2^syndromes
};

/// A code described by its recovery stages (applied in order) and its logical
/// observables. Construction verifies that syndromes commute and that each
/// recovery flips exactly the syndromes its outcome pattern reports.
class StabilizerCode {
 public:
  StabilizerCode(std::size_t n, std::vector<RecoveryStage> stages, PauliPolynomial logical_x,
                 PauliPolynomial logical_z);

  std::size_t n_sites() const { return n_; }
  const std::vector<RecoveryStage>& stages() const { return stages_; }
  /// Independent stabilizer generators: every syndrome of every stage.
  std::vector<PauliString> stabilizers() const;

  /// "xbar", "ybar", "zbar" with ybar = i xbar zbar.
  const PauliPolynomial& logical(const std::string& name) const;
  const std::map<std::string, PauliPolynomial>& logicals() const { return logicals_; }
  /// Levels of concatenation this code was built with (1 for a base code).
  int levels() const { return levels_; }

 private:
  friend StabilizerCode concatenate(const StabilizerCode&, int);
  std::size_t n_;
  std::vector<RecoveryStage> stages_;
  std::map<std::string, PauliPolynomial> logicals_;
  int levels_ = 1;
};

/// Three-qubit bit-flip code: syndromes Z1Z2, Z1Z3; recoveries I, X1, X2, X3;
/// xbar = X1X2X3, zbar = Z1Z2Z3.
StabilizerCode bitflip3();

/// Each qubit of `code` replaced by a copy of the level-(levels-1) code. Inner
/// blocks are corrected first, then the lifted outer stage. levels <= 3.
StabilizerCode concatenate(const StabilizerCode& code, int levels);

/// Measurement efficiency and recovery efficiency, both in [0, 1].
struct RecoveryChannel {
  double eta_meas = 1.0;
  double eta_rec = 1.0;

  RecoveryChannel() = default;
  RecoveryChannel(double meas, double rec);
  bool perfect() const { return eta_meas == 1.0 && eta_rec == 1.0; }
};

/// Heisenberg-picture action of the recovery channel. For one stage,
///   rho -> sum_s [eta_rec R_s K_s rho K_s R_s + (1 - eta_rec) K_s rho K_s],
/// with K_s = sqrt(prod_j (I + s_j eta_meas S_j) / 2).
class RecoveryAdjoint {
 public:
  RecoveryAdjoint(const StabilizerCode& code, RecoveryChannel ch);

  PauliPolynomial apply(const PauliString& s) const;
  PauliPolynomial apply(const PauliPolynomial& p) const;
  /// Kraus operators of one stage (both branches), for explicit simulation.
  std::vector<PauliPolynomial> kraus(std::size_t stage) const;
  std::size_t n_sites() const { return n_; }

 private:
  PauliPolynomial apply_stage(std::size_t stage, const PauliString& s) const;
  PauliPolynomial apply_stage(std::size_t stage, const PauliPolynomial& p) const;

  std::size_t n_;
  RecoveryChannel channel_;
  std::vector<RecoveryStage> stages_;
  std::vector<std::vector<PauliPolynomial>> measurement_;  // K_s per stage and outcome
  mutable std::vector<std::unordered_map<PauliString, PauliPolynomial>> cache_;
};

/// Logical expectations after recovery as polynomials in the physical
/// expectations before recovery.
struct DecodingFunctional {
  std::map<std::string, PauliPolynomial> observables;

  const PauliPolynomial& operator[](const std::string& name) const;
  /// Strings (excluding the identity) that appear in any observable.
  VariableSet strings() const;
};

DecodingFunctional decode_functional(const StabilizerCode& code, const RecoveryChannel& ch);

/// Level-by-level substitution: every letter of the base decode formula is
/// replaced by the inner code's decoded logical on the matching block.
DecodingFunctional substitute_decode(const DecodingFunctional& base, const DecodingFunctional& inner,
                                     std::size_t inner_sites);

/// Affine map on an expectation vector: after = matrix * before + offset.
struct AffineMap {
  VariableSet variables;
  Matrix matrix;
  Vector offset;

  Vector apply(std::span<const double> v) const;
};

/// Recovery as an affine map on `vars`, extended to the closure of `vars`
/// under the recovery adjoint when necessary.
AffineMap recovery_superoperator(const StabilizerCode& code, const RecoveryChannel& ch,
                                 const VariableSet& vars, std::size_t max_dim = kDefaultMaxClosure);

/// Row vector and constant of a polynomial over `vars`.
struct LinearFunctional {
  Vector row;
  double offset = 0.0;

  double operator()(std::span<const double> v) const;
};
LinearFunctional linear_functional(const PauliPolynomial& p, const VariableSet& vars);

/// Induced dynamics of the decoded observables.
struct LogicalDynamics {
  GeneratorMatrix generator;  // on the closure of the decode strings
  DecodingFunctional decode;
  std::map<std::string, LinearFunctional> readout;

  /// Dimension of span{d, dA, dA^2, ...} over the listed observables' rows.
  std::size_t coupled_dimension(const std::vector<std::string>& names) const;
  /// Auxiliary variables for one observable: coupled_dimension({name}) - 1.
  std::size_t auxiliary_count(const std::string& name) const;
  /// Orthonormal basis (rows) of that span and the generator it induces.
  Matrix krylov_basis(const std::vector<std::string>& names) const;
  Matrix induced_generator(const std::vector<std::string>& names) const;
  /// Generator expressed in an arbitrary spanning set of rows W: M W = W A.
  Matrix induced_generator(const Matrix& rows) const;
};

LogicalDynamics logical_dynamics(const StabilizerCode& code, const RecoveryChannel& ch,
                                 const LindbladModel& m, std::size_t max_dim = kDefaultMaxClosure);

/// Expectations of `vars` in the encoded state
///   rho = (Pi + x X Pi + y Y Pi + z Z Pi) / Tr(Pi),
/// with Pi the code-space projector.
Vector encode(const StabilizerCode& code, const BlochVector& logical, const VariableSet& vars);

/// Initial condition for run_cycles.
using CycleInitial = std::variant<BlochVector, Amplitudes>;

struct CycleResult {
  VariableSet variables;       // closure under the generator and the recovery
  std::vector<BlochVector> logical;  // entry c is (xbar, ybar, zbar) after c cycles
};

/// Repeats "evolve for dt, then recover" n_cycles times on the physical
/// closure vector. Entry 0 holds the logical values of the initial state.
CycleResult run_cycles(const StabilizerCode& code, const RecoveryChannel& ch, const LindbladModel& m,
                       double dt, std::size_t n_cycles, const CycleInitial& initial,
                       std::size_t max_dim = kDefaultMaxClosure);

/// CSV `cycle,xbar,ybar,zbar` with 12 significant digits.
void write_cycles_csv(std::ostream& os, const CycleResult& r);

}  // namespace qio
