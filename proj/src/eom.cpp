#include "qio/eom.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace qio {

VariableSet::VariableSet(std::initializer_list<PauliString> strings) {
  for (const auto& s : strings)
    if (!add(s)) throw DimensionError("duplicate variable " + s.label());
}

VariableSet::VariableSet(std::span<const PauliString> strings) {
  for (const auto& s : strings)
    if (!add(s)) throw DimensionError("duplicate variable " + s.label());
}

VariableSet VariableSet::parse(std::initializer_list<std::string_view> letters) {
  VariableSet v;
  for (auto l : letters)
    if (!v.add(PauliString::parse(l))) throw DimensionError("duplicate variable " + std::string(l));
  return v;
}

bool VariableSet::add(const PauliString& s) {
  if (s.is_identity()) throw DimensionError("the identity is not a dynamical variable");
  if (!strings_.empty() && s.n_sites() != strings_.front().n_sites())
    throw DimensionError("variables act on different register sizes");
  if (index_.contains(s)) return false;
  index_.emplace(s, strings_.size());
  strings_.push_back(s);
  return true;
}

std::size_t VariableSet::index_of(const PauliString& s) const {
  const auto it = index_.find(s);
  if (it == index_.end()) throw DimensionError("variable " + s.label() + " not in set");
  return it->second;
}

std::vector<std::string> VariableSet::labels() const {
  std::vector<std::string> out;
  out.reserve(strings_.size());
  for (const auto& s : strings_) out.push_back(s.label());
  return out;
}

// ---------------------------------------------------------------------------

VariableSet closure_under(const VariableSet& seeds,
                          const std::function<PauliPolynomial(const PauliString&)>& map,
                          std::size_t max_dim) {
  if (seeds.empty()) throw DimensionError("closure needs at least one seed");
  if (max_dim < seeds.size()) throw DimensionError("closure limit is smaller than the seed set");
  VariableSet out = seeds;
  std::size_t cursor = 0;
  while (cursor < out.size()) {
    const PauliPolynomial image = map(out[cursor++]);
    for (const auto& [s, c] : image.terms()) {
      if (s.is_identity()) continue;
      if (out.add(s) && out.size() > max_dim) {
        throw ClosureOverflowError("closure exceeds " + std::to_string(max_dim) + " variables", out);
      }
    }
  }
  return out;
}

VariableSet closure(const VariableSet& seeds, const LindbladModel& m, std::size_t max_dim) {
  if (!seeds.empty() && seeds.n_sites() != m.n_sites())
    throw DimensionError("seed strings and model act on different register sizes");
  return closure_under(
      seeds, [&m](const PauliString& s) { return adjoint_generator(s, m); }, max_dim);
}

GeneratorMatrix build_generator(const VariableSet& vars, const LindbladModel& m,
                                const Tolerances& tol) {
  if (!vars.empty() && vars.n_sites() != m.n_sites())
    throw DimensionError("variables and model act on different register sizes");
  const std::size_t n = vars.size();
  GeneratorMatrix g{vars, Matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    const PauliPolynomial row = adjoint_generator(vars[i], m, tol);
    for (const auto& [s, c] : row.terms()) {
      if (s.is_identity()) {
        throw UnsupportedAffineError("d<" + vars[i].label() +
                                     ">/dt has a constant term; affine generators are not supported");
      }
    }
    for (const auto& [s, c] : row.terms()) {
      if (!vars.contains(s)) {
        throw NotClosedError("d<" + vars[i].label() + ">/dt involves " + s.label() +
                                 ", which is not in the variable set",
                             s);
      }
      g.a(i, vars.index_of(s)) = c.real();
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

CouplingFactor factor_coupling(const Matrix& a, double rank_relative) {
  if (a.rows() == 0 || a.cols() == 0 || max_abs(a) == 0.0)
    return {Matrix(a.rows(), 0), Matrix(0, a.cols())};
  const auto d = svd(a);
  const double smax = d.s.front();
  std::size_t r = 0;
  while (r < d.s.size() && d.s[r] > rank_relative * smax) ++r;
  CouplingFactor f{Matrix(a.rows(), r), Matrix(r, a.cols())};
  for (std::size_t k = 0; k < r; ++k) {
    const double root = std::sqrt(d.s[k]);
    for (std::size_t i = 0; i < a.rows(); ++i) f.left(i, k) = d.u(i, k) * root;
    for (std::size_t j = 0; j < a.cols(); ++j) f.right(k, j) = d.v(j, k) * root;
  }
  return f;
}

PartitionResult partition_and_factor(const GeneratorMatrix& g, const VariableSet& interest,
                                     const Tolerances& tol) {
  if (interest.empty()) throw DimensionError("interest set is empty");
  if (interest.size() >= g.variables.size())
    throw DimensionError("interest set must be a proper subset of the variables");
  std::vector<std::size_t> idx1, idx2;
  for (const auto& s : interest) idx1.push_back(g.variables.index_of(s));
  VariableSet env;
  for (std::size_t j = 0; j < g.variables.size(); ++j) {
    if (!interest.contains(g.variables[j])) {
      idx2.push_back(j);
      env.add(g.variables[j]);
    }
  }
  const Matrix a1 = g.a.select(idx1, idx1);
  const Matrix a12 = g.a.select(idx1, idx2);
  const Matrix a21 = g.a.select(idx2, idx1);
  const Matrix a2 = g.a.select(idx2, idx2);
  auto f12 = factor_coupling(a12, tol.rank_relative);
  auto f21 = factor_coupling(a21, tol.rank_relative);
  PartitionResult out;
  out.model.sys1 = StateSpaceModel(a1, std::move(f12.left), std::move(f21.right), interest.labels());
  out.model.sys2 = StateSpaceModel(a2, std::move(f21.left), std::move(f12.right), env.labels());
  out.interest = interest;
  out.environment = std::move(env);
  return out;
}

// ---------------------------------------------------------------------------

Vector initial_expectations(const StateSpec& spec, const VariableSet& vars) {
  if (const auto* amps = std::get_if<Amplitudes>(&spec))
    return expectations_from_state(*amps, vars.strings());
  const auto& prod = std::get<ProductState>(spec);
  for (const auto& b : prod.bloch) {
    if (std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]) > 1.0 + 1e-9)
      throw InvalidStateError("Bloch vector longer than 1");
  }
  Vector out;
  out.reserve(vars.size());
  for (const auto& v : vars) {
    if (v.n_sites() != prod.bloch.size())
      throw DimensionError("product state has " + std::to_string(prod.bloch.size()) +
                           " qubits, variable " + v.to_string() + " needs " +
                           std::to_string(v.n_sites()));
    double value = 1.0;
    for (std::size_t k = 0; k < v.n_sites() && value != 0.0; ++k) {
      const Letter l = v.letter(k);
      if (l != Letter::I) value *= prod.bloch[k][static_cast<int>(l) - 1];
    }
    out.push_back(value);
  }
  return out;
}

}  // namespace qio
