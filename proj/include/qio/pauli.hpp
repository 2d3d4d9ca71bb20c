#pragma once

#include <bit>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qio/errors.hpp"
#include "qio/linalg.hpp"

namespace qio {

enum class Letter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(Letter l);

/// Tensor product of single-qubit Pauli operators on up to 64 sites.
///
/// Each site is stored as two bits (an X bit and a Z bit, Y having both set)
/// packed into a pair of words, so products and commutation tests are a few
/// popcounts. Site 0 is the leftmost letter of the textual form.
class PauliString {
 public:
  static constexpr std::size_t kMaxSites = 64;

  PauliString() = default;
  /// Identity on n sites.
  explicit PauliString(std::size_t n_sites);

  /// Parses an uppercase letter string such as "XIZ".
  static PauliString parse(std::string_view letters);
  /// Single non-identity letter at `site` (0-based).
  static PauliString single(std::size_t n_sites, std::size_t site, Letter l);
  static PauliString from_masks(std::size_t n_sites, std::uint64_t x, std::uint64_t z);

  std::size_t n_sites() const { return n_; }
  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }

  Letter letter(std::size_t site) const;
  PauliString with(std::size_t site, Letter l) const;

  std::size_t weight() const { return static_cast<std::size_t>(std::popcount(x_ | z_)); }
  bool is_identity() const { return (x_ | z_) == 0; }
  bool commutes_with(const PauliString& o) const;

  /// "XIZ" form.
  std::string to_string() const;
  /// Compact 1-based form such as "Z1X2"; "I" for the identity.
  std::string label() const;

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.n_ == b.n_ && a.x_ == b.x_ && a.z_ == b.z_;
  }
  /// Lexicographic by site with I < X < Y < Z.
  friend bool operator<(const PauliString& a, const PauliString& b);

 private:
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
  std::uint32_t n_ = 0;
};

/// A Pauli string multiplied by a phase i^quarter_turns.
struct ScaledPauli {
  int quarter_turns = 0;  // 0..3
  PauliString string;

  std::complex<double> phase() const;
};

/// Site-wise product p * q with its accumulated phase.
ScaledPauli multiply(const PauliString& p, const PauliString& q);

/// Complex linear combination of Pauli strings on a fixed number of sites.
/// Coefficients whose magnitude falls below pauli_drop times the largest one
/// are removed after every arithmetic operation.
class PauliPolynomial {
 public:
  using Coefficient = std::complex<double>;
  using TermMap = std::map<PauliString, Coefficient>;

  PauliPolynomial() = default;
  explicit PauliPolynomial(std::size_t n_sites) : n_(n_sites) {}
  PauliPolynomial(const PauliString& s, Coefficient c = 1.0);

  static PauliPolynomial identity(std::size_t n_sites, Coefficient c = 1.0);

  std::size_t n_sites() const { return n_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  Coefficient coefficient(const PauliString& s) const;
  double max_abs_coefficient() const;

  /// Accumulates c into the coefficient of s; exact cancellations are erased.
  void add_term(const PauliString& s, Coefficient c);
  /// Drops coefficients below drop * max |coefficient|.
  void prune(double drop = kDefaultTolerances.pauli_drop);

  /// Conjugate transpose (Pauli strings are hermitian).
  PauliPolynomial adjoint() const;
  bool is_hermitian(double tol = 1e-12) const;

  PauliPolynomial& operator+=(const PauliPolynomial& o);
  PauliPolynomial& operator-=(const PauliPolynomial& o);
  PauliPolynomial& operator*=(Coefficient s);

  friend PauliPolynomial operator+(PauliPolynomial a, const PauliPolynomial& b) { return a += b; }
  friend PauliPolynomial operator-(PauliPolynomial a, const PauliPolynomial& b) { return a -= b; }
  friend PauliPolynomial operator*(PauliPolynomial a, Coefficient s) { return a *= s; }
  friend PauliPolynomial operator*(Coefficient s, PauliPolynomial a) { return a *= s; }
  friend PauliPolynomial operator*(const PauliPolynomial& a, const PauliPolynomial& b);

  friend bool operator==(const PauliPolynomial&, const PauliPolynomial&) = default;

 private:
  void require_sites(const PauliPolynomial& o) const;

  std::size_t n_ = 0;
  TermMap terms_;
};

/// p q - q p: zero when the strings commute, otherwise 2 * phase * (p q).
PauliPolynomial commutator(const PauliString& p, const PauliString& q);
PauliPolynomial commutator(const PauliPolynomial& a, const PauliPolynomial& b);
PauliPolynomial anticommutator(const PauliPolynomial& a, const PauliPolynomial& b);

/// Coefficient of the all-identity string. Tr(poly) = 2^n times this value.
std::complex<double> identity_coefficient(const PauliPolynomial& poly);

/// Normalized trace Tr(a b) / 2^n, computed without expanding the product.
std::complex<double> normalized_trace_product(const PauliPolynomial& a, const PauliPolynomial& b);

/// Tensor product of operators on disjoint registers (a's sites first).
PauliPolynomial tensor(const PauliPolynomial& a, const PauliPolynomial& b);

/// Moves every site of `p` to position offset + site in an n_sites register.
PauliPolynomial embed(const PauliPolynomial& p, std::size_t n_sites, std::size_t offset);

/// One dissipative channel rate * D[op].
struct Dissipator {
  double rate = 0.0;
  PauliPolynomial op;
};

/// Hamiltonian plus Lindblad dissipators (hbar = 1).
class LindbladModel {
 public:
  LindbladModel(std::size_t n_sites, PauliPolynomial hamiltonian,
                std::vector<Dissipator> dissipators = {});

  std::size_t n_sites() const { return n_; }
  const PauliPolynomial& hamiltonian() const { return hamiltonian_; }
  const std::vector<Dissipator>& dissipators() const { return dissipators_; }

  /// c^dagger c for each dissipator, precomputed.
  const std::vector<PauliPolynomial>& jump_products() const { return jump_products_; }
  /// Upper bound on the superoperator norm, used for step-size control.
  double rate_scale() const;

 private:
  std::size_t n_;
  PauliPolynomial hamiltonian_;
  std::vector<Dissipator> dissipators_;
  std::vector<PauliPolynomial> jump_products_;
};

/// Heisenberg-picture generator: d<P>/dt as a polynomial,
///   i[H, P] + sum rate (c^dag P c - 1/2 {c^dag c, P}).
/// For a Pauli string the result has real coefficients; an imaginary part
/// larger than hermitian_imag raises AlgebraError.
PauliPolynomial adjoint_generator(const PauliString& p, const LindbladModel& m,
                                  const Tolerances& tol = kDefaultTolerances);
PauliPolynomial adjoint_generator(const PauliPolynomial& p, const LindbladModel& m,
                                  const Tolerances& tol = kDefaultTolerances);

}  // namespace qio

template <>
struct std::hash<qio::PauliString> {
  std::size_t operator()(const qio::PauliString& s) const noexcept {
    std::uint64_t h = s.x_mask() * 0x9E3779B97F4A7C15ull;
    h ^= s.z_mask() + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
    h ^= s.n_sites();
    return static_cast<std::size_t>(h);
  }
};
