#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qio/matrix.hpp"
#include "qio/pauli.hpp"

namespace qio {

// Brute-force Hilbert-space machinery. Nothing here goes through the
// Heisenberg-picture generator: operators act on computational basis indices
// directly, so these routines serve as the independent reference for the
// expectation-value dynamics.

using Amplitudes = std::vector<std::complex<double>>;
using BlochVector = std::array<double, 3>;

/// Largest register the oracle will allocate a density matrix for.
inline constexpr std::size_t kOracleMaxSites = 10;

/// Basis-index form of a Pauli string: P|j> = phase * (-1)^{popcount(z & j)} |j ^ x>.
/// Site 0 is the most significant bit of the basis index.
struct IndexedPauli {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  std::complex<double> phase{1.0, 0.0};

  static IndexedPauli from(const PauliString& s);
  std::complex<double> sign(std::uint64_t j) const {
    return (std::popcount(z & j) & 1) ? -phase : phase;
  }
};

/// A Pauli polynomial prepared for repeated application to dense matrices.
class IndexedOperator {
 public:
  IndexedOperator() = default;
  explicit IndexedOperator(const PauliPolynomial& op);

  /// out += scale * (op * m)
  void apply_left(const ComplexMatrix& m, ComplexMatrix& out, std::complex<double> scale = 1.0) const;
  /// out += scale * (m * op)
  void apply_right(const ComplexMatrix& m, ComplexMatrix& out, std::complex<double> scale = 1.0) const;
  /// op |psi>
  Amplitudes apply(std::span<const std::complex<double>> psi) const;
  bool empty() const { return terms_.empty(); }

 private:
  std::vector<std::pair<IndexedPauli, std::complex<double>>> terms_;
};

/// 2^n x 2^n density operator.
class DensityMatrix {
 public:
  /// Validates hermiticity and unit trace to 1e-10 and positivity to -1e-8.
  DensityMatrix(std::size_t n_sites, ComplexMatrix entries);

  static DensityMatrix from_amplitudes(std::span<const std::complex<double>> psi);
  static DensityMatrix maximally_mixed(std::size_t n_sites);
  static DensityMatrix product(std::span<const BlochVector> bloch);

  std::size_t n_sites() const { return n_; }
  std::size_t dim() const { return entries_.rows(); }
  const ComplexMatrix& entries() const { return entries_; }

 private:
  struct Unchecked {};
  DensityMatrix(std::size_t n_sites, ComplexMatrix entries, Unchecked)
      : n_(n_sites), entries_(std::move(entries)) {}
  friend class MasterEquationOracle;

  std::size_t n_;
  ComplexMatrix entries_;
};

/// Register size implied by an amplitude list (which must have length 2^n).
std::size_t sites_for_dimension(std::size_t dim);

/// Tr(P rho).
double expectation(const PauliString& p, const ComplexMatrix& rho);
/// <psi|P|psi>.
double expectation(const PauliString& p, std::span<const std::complex<double>> psi);

/// Expectation values of each string for a normalized pure state. Throws
/// InvalidStateError when | ||psi|| - 1 | > 1e-9.
Vector expectations_from_state(std::span<const std::complex<double>> psi,
                               std::span<const PauliString> vars);
Vector expectations_from_state(const DensityMatrix& rho, std::span<const PauliString> vars);

/// True when rho + shift * I admits a Cholesky factorization.
bool is_positive_semidefinite(const ComplexMatrix& rho, double shift);

/// Dense drho/dt for a Lindblad model.
class MasterEquationOracle {
 public:
  explicit MasterEquationOracle(const LindbladModel& m);

  std::size_t n_sites() const { return n_; }
  ComplexMatrix rhs(const ComplexMatrix& rho) const;
  double rate_scale() const { return rate_scale_; }

 private:
  std::size_t n_;
  IndexedOperator hamiltonian_;
  struct Channel {
    double rate = 0.0;
    IndexedOperator op;
    IndexedOperator op_dag;
    IndexedOperator jump;  // op^dag op
    // Set when op is a single scaled string a P: the channel then acts as
    // rate |a|^2 (P rho P - rho) and is applied in one pass.
    bool single = false;
    IndexedPauli string;
    double weight = 0.0;
  };
  std::vector<Channel> channels_;
  double rate_scale_;
};

/// Applies one Kraus-form channel rho -> sum_k K_k rho K_k^dag with Kraus
/// operators given as Pauli polynomials.
ComplexMatrix apply_kraus(std::span<const PauliPolynomial> kraus, const ComplexMatrix& rho);

}  // namespace qio
