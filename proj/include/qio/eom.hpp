#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "qio/linalg.hpp"
#include "qio/oracle.hpp"
#include "qio/pauli.hpp"
#include "qio/state_space.hpp"

namespace qio {

/// Ordered, duplicate-free list of non-identity Pauli strings labelling the
/// entries of a real expectation vector.
class VariableSet {
 public:
  VariableSet() = default;
  VariableSet(std::initializer_list<PauliString> strings);
  explicit VariableSet(std::span<const PauliString> strings);

  static VariableSet parse(std::initializer_list<std::string_view> letters);

  /// Appends s; returns false when s is already present.
  bool add(const PauliString& s);
  bool contains(const PauliString& s) const { return index_.contains(s); }
  std::size_t index_of(const PauliString& s) const;

  std::size_t size() const { return strings_.size(); }
  bool empty() const { return strings_.empty(); }
  std::size_t n_sites() const { return strings_.empty() ? 0 : strings_.front().n_sites(); }
  const PauliString& operator[](std::size_t i) const { return strings_[i]; }
  std::span<const PauliString> strings() const { return strings_; }
  auto begin() const { return strings_.begin(); }
  auto end() const { return strings_.end(); }

  std::vector<std::string> labels() const;

  friend bool operator==(const VariableSet& a, const VariableSet& b) {
    return a.strings_ == b.strings_;
  }

 private:
  std::vector<PauliString> strings_;
  std::unordered_map<PauliString, std::size_t> index_;
};

/// Closure exceeded its size limit; carries what had been discovered.
class ClosureOverflowError : public NumericalError {
 public:
  ClosureOverflowError(const std::string& what, VariableSet partial)
      : NumericalError(what), partial_(std::move(partial)) {}
  const VariableSet& partial() const { return partial_; }

 private:
  VariableSet partial_;
};

/// A variable's derivative involves a string outside the variable set.
class NotClosedError : public NumericalError {
 public:
  NotClosedError(const std::string& what, PauliString escaping)
      : NumericalError(what), escaping_(escaping) {}
  const PauliString& escaping() const { return escaping_; }

 private:
  PauliString escaping_;
};

inline constexpr std::size_t kDefaultMaxClosure = 4096;

/// Linear map acting on the expectation vector labelled by `variables`.
/// For a generator, a(i, j) is the coefficient of variables[j] in d<variables[i]>/dt.
struct GeneratorMatrix {
  VariableSet variables;
  Matrix a;
};

/// Smallest superset of `seeds` closed under the adjoint generator; seeds
/// first, then strings in breadth-first discovery order.
VariableSet closure(const VariableSet& seeds, const LindbladModel& m,
                    std::size_t max_dim = kDefaultMaxClosure);

/// Generic breadth-first closure under any linear map on observables.
VariableSet closure_under(const VariableSet& seeds,
                          const std::function<PauliPolynomial(const PauliString&)>& map,
                          std::size_t max_dim = kDefaultMaxClosure);

GeneratorMatrix build_generator(const VariableSet& vars, const LindbladModel& m,
                                const Tolerances& tol = kDefaultTolerances);

/// Splits the generator into the interest block and the rest and factors the
/// couplings A12 = B1 C2, A21 = B2 C1 through an SVD with the square roots of
/// the singular values split evenly between the two factors.
struct PartitionResult {
  InterconnectedModel model;
  VariableSet interest;     // sys1 labels, in the requested order
  VariableSet environment;  // sys2 labels, generator order
};

PartitionResult partition_and_factor(const GeneratorMatrix& g, const VariableSet& interest,
                                     const Tolerances& tol = kDefaultTolerances);

/// Rank-revealing split a = left * right (left: rows x r, right: r x cols).
struct CouplingFactor {
  Matrix left;
  Matrix right;
};
CouplingFactor factor_coupling(const Matrix& a, double rank_relative = kDefaultTolerances.rank_relative);

/// Per-qubit Bloch vectors of a product state.
struct ProductState {
  std::vector<BlochVector> bloch;
};

using StateSpec = std::variant<ProductState, Amplitudes>;

/// Expectation values <P> for each variable in the described initial state.
Vector initial_expectations(const StateSpec& spec, const VariableSet& vars);

}  // namespace qio
