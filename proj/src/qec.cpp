#include "qio/qec.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace qio {

namespace {

PauliString embed_string(const PauliString& s, std::size_t n_sites, std::size_t offset) {
  const PauliPolynomial p = embed(PauliPolynomial(s), n_sites, offset);
  return p.terms().begin()->first;
}

// Strips round-off imaginary parts from a polynomial that must be hermitian.
PauliPolynomial real_part(const PauliPolynomial& p, const char* what) {
  const double scale = std::max(1.0, p.max_abs_coefficient());
  PauliPolynomial out(p.n_sites());
  for (const auto& [s, c] : p.terms()) {
    if (std::abs(c.imag()) > 1e-10 * scale)
      throw AlgebraError(std::string(what) + " has a non-real coefficient on " + s.label());
    if (c.real() != 0.0) out.add_term(s, c.real());
  }
  return out;
}

void require_commuting(const PauliPolynomial& a, const PauliPolynomial& b, const std::string& what) {
  PauliPolynomial c = commutator(a, b);
  c.prune(1e-12);
  if (c.max_abs_coefficient() > 1e-12) throw AlgebraError(what);
}

}  // namespace

// ---------------------------------------------------------------------------

StabilizerCode::StabilizerCode(std::size_t n, std::vector<RecoveryStage> stages,
                               PauliPolynomial logical_x, PauliPolynomial logical_z)
    : n_(n), stages_(std::move(stages)) {
  if (n == 0 || n > PauliString::kMaxSites) throw DimensionError("code size out of range");
  std::vector<PauliString> all;
  for (const auto& st : stages_) {
    if (st.syndromes.empty() || st.syndromes.size() > 16)
      throw InvalidModelError("a recovery stage needs between 1 and 16 syndromes");
    if (st.recoveries.size() != (std::size_t{1} << st.syndromes.size()))
      throw InvalidModelError("a stage needs one recovery per syndrome outcome pattern");
    for (const auto& s : st.syndromes) {
      if (s.n_sites() != n) throw DimensionError("syndrome acts on the wrong register size");
      if (s.is_identity()) throw InvalidModelError("the identity is not a syndrome");
      all.push_back(s);
    }
    for (std::size_t mask = 0; mask < st.recoveries.size(); ++mask) {
      const PauliString& r = st.recoveries[mask];
      if (r.n_sites() != n) throw DimensionError("recovery acts on the wrong register size");
      for (std::size_t j = 0; j < st.syndromes.size(); ++j) {
        const bool flips = (mask >> j) & 1u;
        if (r.commutes_with(st.syndromes[j]) == flips)
          throw AlgebraError("recovery " + r.label() + " does not return outcome pattern " +
                             std::to_string(mask) + " to the code space");
      }
    }
  }
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (!all[i].commutes_with(all[j]))
        throw AlgebraError("syndromes " + all[i].label() + " and " + all[j].label() + " do not commute");

  if (logical_x.n_sites() != n || logical_z.n_sites() != n)
    throw DimensionError("logical operators act on the wrong register size");
  if (!logical_x.is_hermitian() || !logical_z.is_hermitian())
    throw AlgebraError("logical operators must be hermitian");
  for (const auto& s : all) {
    require_commuting(PauliPolynomial(s), logical_x, "logical X does not commute with " + s.label());
    require_commuting(PauliPolynomial(s), logical_z, "logical Z does not commute with " + s.label());
  }
  PauliPolynomial ac = anticommutator(logical_x, logical_z);
  ac.prune(1e-12);
  if (ac.max_abs_coefficient() > 1e-12) throw AlgebraError("logical X and Z must anticommute");
  PauliPolynomial y = (logical_x * logical_z) * std::complex<double>(0.0, 1.0);
  logicals_.emplace("xbar", std::move(logical_x));
  logicals_.emplace("ybar", real_part(y, "logical Y"));
  logicals_.emplace("zbar", std::move(logical_z));
}

std::vector<PauliString> StabilizerCode::stabilizers() const {
  std::vector<PauliString> out;
  for (const auto& st : stages_) out.insert(out.end(), st.syndromes.begin(), st.syndromes.end());
  return out;
}

const PauliPolynomial& StabilizerCode::logical(const std::string& name) const {
  const auto it = logicals_.find(name);
  if (it == logicals_.end()) throw DimensionError("unknown logical observable " + name);
  return it->second;
}

StabilizerCode bitflip3() {
  RecoveryStage st;
  st.syndromes = {PauliString::parse("ZZI"), PauliString::parse("ZIZ")};
  // mask bit 0: Z1Z2 = -1, bit 1: Z1Z3 = -1
  st.recoveries = {PauliString::parse("III"), PauliString::parse("IXI"), PauliString::parse("IIX"),
                   PauliString::parse("XII")};
  return StabilizerCode(3, {st}, PauliPolynomial(PauliString::parse("XXX")),
                        PauliPolynomial(PauliString::parse("ZZZ")));
}

namespace {

// Replaces every letter of `s` by the inner logical operator on its block.
PauliPolynomial lift(const PauliString& s, const StabilizerCode& inner) {
  const std::size_t m = inner.n_sites();
  const std::size_t total = s.n_sites() * m;
  PauliPolynomial out = PauliPolynomial::identity(total);
  for (std::size_t b = 0; b < s.n_sites(); ++b) {
    const Letter l = s.letter(b);
    if (l == Letter::I) continue;
    const char* name = l == Letter::X ? "xbar" : l == Letter::Y ? "ybar" : "zbar";
    out = out * embed(inner.logical(name), total, b * m);
  }
  return out;
}

PauliPolynomial lift(const PauliPolynomial& p, const StabilizerCode& inner) {
  PauliPolynomial out(p.n_sites() * inner.n_sites());
  for (const auto& [s, c] : p.terms()) out += lift(s, inner) * c;
  return out;
}

PauliString lift_single(const PauliString& s, const StabilizerCode& inner, bool require_positive) {
  const PauliPolynomial p = lift(s, inner);
  if (p.size() != 1) throw AlgebraError("lifted operator " + s.label() + " is not a single string");
  const auto& [str, c] = *p.terms().begin();
  if (std::abs(std::abs(c) - 1.0) > 1e-12 || std::abs(c.imag()) > 1e-12 ||
      (require_positive && c.real() < 0.0))
    throw AlgebraError("lifted operator " + s.label() + " carries a sign");
  return str;
}

}  // namespace

StabilizerCode concatenate(const StabilizerCode& code, int levels) {
  if (code.levels() != 1) throw InvalidModelError("concatenate expects a base code");
  if (levels < 1 || levels > 3) throw DimensionError("concatenation levels must be between 1 and 3");
  if (levels == 1) return code;
  const StabilizerCode inner = concatenate(code, levels - 1);
  const std::size_t m = inner.n_sites();
  const std::size_t total = code.n_sites() * m;
  if (total > PauliString::kMaxSites) throw DimensionError("concatenated code exceeds 64 qubits");

  std::vector<RecoveryStage> stages;
  for (std::size_t b = 0; b < code.n_sites(); ++b) {
    for (const auto& st : inner.stages()) {
      RecoveryStage e;
      for (const auto& s : st.syndromes) e.syndromes.push_back(embed_string(s, total, b * m));
      for (const auto& r : st.recoveries) e.recoveries.push_back(embed_string(r, total, b * m));
      stages.push_back(std::move(e));
    }
  }
  for (const auto& st : code.stages()) {
    RecoveryStage top;
    for (const auto& s : st.syndromes) top.syndromes.push_back(lift_single(s, inner, true));
    for (const auto& r : st.recoveries) top.recoveries.push_back(lift_single(r, inner, false));
    stages.push_back(std::move(top));
  }
  StabilizerCode out(total, std::move(stages), lift(code.logical("xbar"), inner),
                     lift(code.logical("zbar"), inner));
  out.levels_ = levels;
  return out;
}

// ---------------------------------------------------------------------------

RecoveryChannel::RecoveryChannel(double meas, double rec) : eta_meas(meas), eta_rec(rec) {
  if (!(meas >= 0.0 && meas <= 1.0)) throw InvalidModelError("eta_meas must lie in [0, 1]");
  if (!(rec >= 0.0 && rec <= 1.0)) throw InvalidModelError("eta_rec must lie in [0, 1]");
}

RecoveryAdjoint::RecoveryAdjoint(const StabilizerCode& code, RecoveryChannel ch)
    : n_(code.n_sites()), channel_(RecoveryChannel(ch.eta_meas, ch.eta_rec)), stages_(code.stages()) {
  // sqrt((I + s eta S) / 2) = a I + s b S for an involution S.
  const double up = std::sqrt((1.0 + channel_.eta_meas) / 2.0);
  const double down = std::sqrt((1.0 - channel_.eta_meas) / 2.0);
  const double a = 0.5 * (up + down), b = 0.5 * (up - down);
  for (const auto& st : stages_) {
    std::vector<PauliPolynomial> ks;
    for (std::size_t mask = 0; mask < st.recoveries.size(); ++mask) {
      PauliPolynomial k = PauliPolynomial::identity(n_);
      for (std::size_t j = 0; j < st.syndromes.size(); ++j) {
        const double sign = ((mask >> j) & 1u) ? -1.0 : 1.0;
        PauliPolynomial factor = PauliPolynomial::identity(n_, a);
        factor.add_term(st.syndromes[j], sign * b);
        k = k * factor;
      }
      ks.push_back(std::move(k));
    }
    measurement_.push_back(std::move(ks));
  }
  cache_.resize(stages_.size());
}

PauliPolynomial RecoveryAdjoint::apply_stage(std::size_t stage, const PauliString& s) const {
  auto& cache = cache_[stage];
  if (const auto it = cache.find(s); it != cache.end()) return it->second;
  const auto& st = stages_[stage];
  PauliPolynomial out(n_);
  const PauliPolynomial ps(s);
  for (std::size_t mask = 0; mask < st.recoveries.size(); ++mask) {
    const double w = st.recoveries[mask].commutes_with(s) ? 1.0 : 1.0 - 2.0 * channel_.eta_rec;
    if (w == 0.0) continue;
    const auto& k = measurement_[stage][mask];
    out += (k * ps * k) * w;
  }
  out = real_part(out, "recovered observable");
  cache.emplace(s, out);
  return out;
}

PauliPolynomial RecoveryAdjoint::apply_stage(std::size_t stage, const PauliPolynomial& p) const {
  PauliPolynomial out(n_);
  for (const auto& [s, c] : p.terms()) out += apply_stage(stage, s) * c;
  return out;
}

PauliPolynomial RecoveryAdjoint::apply(const PauliString& s) const { return apply(PauliPolynomial(s)); }

PauliPolynomial RecoveryAdjoint::apply(const PauliPolynomial& p) const {
  if (p.n_sites() != n_) throw DimensionError("observable acts on the wrong register size");
  PauliPolynomial out = p;
  for (std::size_t k = stages_.size(); k-- > 0;) out = apply_stage(k, out);
  return out;
}

std::vector<PauliPolynomial> RecoveryAdjoint::kraus(std::size_t stage) const {
  if (stage >= stages_.size()) throw DimensionError("no such recovery stage");
  std::vector<PauliPolynomial> out;
  const auto& st = stages_[stage];
  for (std::size_t mask = 0; mask < st.recoveries.size(); ++mask) {
    const auto& k = measurement_[stage][mask];
    if (channel_.eta_rec > 0.0)
      out.push_back(PauliPolynomial(st.recoveries[mask]) * k * std::sqrt(channel_.eta_rec));
    if (channel_.eta_rec < 1.0) out.push_back(k * std::sqrt(1.0 - channel_.eta_rec));
  }
  return out;
}

// ---------------------------------------------------------------------------

const PauliPolynomial& DecodingFunctional::operator[](const std::string& name) const {
  const auto it = observables.find(name);
  if (it == observables.end()) throw DimensionError("decode functional has no observable " + name);
  return it->second;
}

VariableSet DecodingFunctional::strings() const {
  VariableSet v;
  for (const auto& [name, p] : observables)
    for (const auto& [s, c] : p.terms())
      if (!s.is_identity()) v.add(s);
  return v;
}

DecodingFunctional decode_functional(const StabilizerCode& code, const RecoveryChannel& ch) {
  const RecoveryAdjoint adj(code, ch);
  DecodingFunctional out;
  for (const auto& [name, l] : code.logicals()) out.observables.emplace(name, adj.apply(l));
  return out;
}

DecodingFunctional substitute_decode(const DecodingFunctional& base, const DecodingFunctional& inner,
                                     std::size_t inner_sites) {
  DecodingFunctional out;
  for (const auto& [name, p] : base.observables) {
    const std::size_t total = p.n_sites() * inner_sites;
    PauliPolynomial acc(total);
    for (const auto& [s, c] : p.terms()) {
      PauliPolynomial term;
      for (std::size_t b = 0; b < s.n_sites(); ++b) {
        const Letter l = s.letter(b);
        const PauliPolynomial block =
            l == Letter::I ? PauliPolynomial::identity(inner_sites)
                           : inner[l == Letter::X ? "xbar" : l == Letter::Y ? "ybar" : "zbar"];
        term = b == 0 ? block : tensor(term, block);
      }
      acc += term * c;
    }
    out.observables.emplace(name, std::move(acc));
  }
  return out;
}

// ---------------------------------------------------------------------------

Vector AffineMap::apply(std::span<const double> v) const {
  Vector out = matrix * v;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += offset[i];
  return out;
}

LinearFunctional linear_functional(const PauliPolynomial& p, const VariableSet& vars) {
  LinearFunctional f{Vector(vars.size(), 0.0), 0.0};
  for (const auto& [s, c] : p.terms()) {
    if (std::abs(c.imag()) > 1e-10 * std::max(1.0, std::abs(c)))
      throw AlgebraError("functional of a non-hermitian polynomial");
    if (s.is_identity())
      f.offset += c.real();
    else
      f.row[vars.index_of(s)] += c.real();
  }
  return f;
}

double LinearFunctional::operator()(std::span<const double> v) const {
  if (v.size() != row.size()) throw DimensionError("functional applied to a vector of the wrong size");
  double acc = offset;
  for (std::size_t i = 0; i < v.size(); ++i) acc += row[i] * v[i];
  return acc;
}

AffineMap recovery_superoperator(const StabilizerCode& code, const RecoveryChannel& ch,
                                 const VariableSet& vars, std::size_t max_dim) {
  if (!vars.empty() && vars.n_sites() != code.n_sites())
    throw DimensionError("variables and code act on different register sizes");
  const RecoveryAdjoint adj(code, ch);
  const auto map = [&adj](const PauliString& s) { return adj.apply(s); };
  AffineMap out;
  out.variables = closure_under(vars, map, max_dim);
  const std::size_t n = out.variables.size();
  out.matrix = Matrix(n, n);
  out.offset.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const LinearFunctional f = linear_functional(map(out.variables[i]), out.variables);
    for (std::size_t j = 0; j < n; ++j) out.matrix(i, j) = f.row[j];
    out.offset[i] = f.offset;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

Vector row_times(std::span<const double> r, const Matrix& a) {
  Vector out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    if (r[i] != 0.0)
      for (std::size_t j = 0; j < a.cols(); ++j) out[j] += r[i] * a(i, j);
  return out;
}

// Adds the component of w orthogonal to `basis`; false when w already lies in its span.
bool extend_basis(std::vector<Vector>& basis, Vector w) {
  const double scale = norm2(w);
  if (scale == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis) {
      const double c = dot(q, w);
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * q[i];
    }
  const double rest = norm2(w);
  if (rest <= 1e-10 * scale) return false;
  for (double& x : w) x /= rest;
  basis.push_back(std::move(w));
  return true;
}

}  // namespace

Matrix LogicalDynamics::krylov_basis(const std::vector<std::string>& names) const {
  std::vector<Vector> basis;
  const std::size_t n = generator.variables.size();
  for (const auto& name : names) {
    const auto it = readout.find(name);
    if (it == readout.end()) throw DimensionError("no readout for " + name);
    Vector w = it->second.row;
    for (std::size_t guard = 0; guard <= n && extend_basis(basis, w); ++guard)
      w = row_times(basis.back(), generator.a);
  }
  Matrix out(basis.size(), n);
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (std::size_t j = 0; j < n; ++j) out(k, j) = basis[k][j];
  return out;
}

std::size_t LogicalDynamics::coupled_dimension(const std::vector<std::string>& names) const {
  return krylov_basis(names).rows();
}

std::size_t LogicalDynamics::auxiliary_count(const std::string& name) const {
  const std::size_t d = coupled_dimension({name});
  return d == 0 ? 0 : d - 1;
}

Matrix LogicalDynamics::induced_generator(const std::vector<std::string>& names) const {
  const Matrix k = krylov_basis(names);
  return k * generator.a * k.transpose();
}

Matrix LogicalDynamics::induced_generator(const Matrix& rows) const {
  if (rows.cols() != generator.variables.size())
    throw DimensionError("coordinate rows do not match the generator dimension");
  const Matrix wt = rows.transpose();
  const Matrix gram = rows * wt;
  const Matrix m = rows * generator.a * wt * inverse(gram);
  // The rows must span an invariant subspace for the induced generator to be exact.
  const Matrix residual = m * rows - rows * generator.a;
  if (max_abs(residual) > 1e-9 * std::max(1.0, max_abs(generator.a)))
    throw NotClosedError("coordinate rows do not span an invariant subspace",
                         generator.variables.empty() ? PauliString() : generator.variables[0]);
  return m;
}

LogicalDynamics logical_dynamics(const StabilizerCode& code, const RecoveryChannel& ch,
                                 const LindbladModel& m, std::size_t max_dim) {
  if (m.n_sites() != code.n_sites()) throw DimensionError("model and code act on different registers");
  LogicalDynamics out;
  out.decode = decode_functional(code, ch);
  VariableSet seeds = out.decode.strings();
  if (seeds.empty()) seeds.add(code.logical("zbar").terms().begin()->first);
  const VariableSet vars = closure(seeds, m, max_dim);
  out.generator = build_generator(vars, m);
  for (const auto& [name, p] : out.decode.observables)
    out.readout.emplace(name, linear_functional(p, vars));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Tr(Q Pi) / Tr(Pi) for a Pauli string Q and the code projector Pi: the sign
// of Q when +-Q belongs to the stabilizer group, zero otherwise.
class StabilizerGroup {
 public:
  explicit StabilizerGroup(const std::vector<PauliString>& gens) : gens_(gens) {
    for (std::size_t g = 0; g < gens.size(); ++g) {
      Row r{gens[g].x_mask(), gens[g].z_mask(), std::uint64_t{1} << g};
      reduce(r);
      if (r.x == 0 && r.z == 0) continue;  // dependent generator
      rows_.push_back(r);
    }
  }

  double value(const PauliString& q) const {
    Row r{q.x_mask(), q.z_mask(), 0};
    reduce(r);
    if (r.x != 0 || r.z != 0) return 0.0;
    PauliString acc(q.n_sites());
    int turns = 0;
    for (std::size_t g = 0; g < gens_.size(); ++g) {
      if (!((r.combo >> g) & 1u)) continue;
      const ScaledPauli p = multiply(acc, gens_[g]);
      turns += p.quarter_turns;
      acc = p.string;
    }
    // acc * i^turns is a product of code stabilizers, so it equals +1 on the code space.
    turns %= 4;
    if (turns == 0) return 1.0;
    if (turns == 2) return -1.0;
    throw AlgebraError("stabilizer product has an imaginary phase");
  }

 private:
  struct Row {
    std::uint64_t x, z, combo;
  };
  static int pivot(const Row& r) {
    if (r.x) return std::countr_zero(r.x);
    if (r.z) return 64 + std::countr_zero(r.z);
    return -1;
  }
  static bool has_bit(const Row& r, int bit) {
    return bit < 64 ? ((r.x >> bit) & 1u) : ((r.z >> (bit - 64)) & 1u);
  }
  void reduce(Row& r) const {
    for (const auto& row : rows_) {
      if (has_bit(r, pivot(row))) {
        r.x ^= row.x;
        r.z ^= row.z;
        r.combo ^= row.combo;
      }
    }
  }
  // Rows are kept so that each pivot is absent from later rows.
  std::vector<PauliString> gens_;
  std::vector<Row> rows_;
};

}  // namespace

Vector encode(const StabilizerCode& code, const BlochVector& logical, const VariableSet& vars) {
  const double len = std::sqrt(logical[0] * logical[0] + logical[1] * logical[1] + logical[2] * logical[2]);
  if (len > 1.0 + 1e-9) throw InvalidStateError("logical Bloch vector longer than 1");
  if (!vars.empty() && vars.n_sites() != code.n_sites())
    throw DimensionError("variables and code act on different register sizes");
  const StabilizerGroup group(code.stabilizers());
  const std::array<std::pair<const char*, double>, 3> parts{
      {{"xbar", logical[0]}, {"ybar", logical[1]}, {"zbar", logical[2]}}};
  Vector out(vars.size(), 0.0);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    std::complex<double> acc = group.value(vars[i]);
    for (const auto& [name, weight] : parts) {
      if (weight == 0.0) continue;
      for (const auto& [s, c] : code.logical(name).terms()) {
        const ScaledPauli q = multiply(vars[i], s);
        acc += weight * c * q.phase() * group.value(q.string);
      }
    }
    out[i] = acc.real();
  }
  return out;
}

CycleResult run_cycles(const StabilizerCode& code, const RecoveryChannel& ch, const LindbladModel& m,
                       double dt, std::size_t n_cycles, const CycleInitial& initial, std::size_t max_dim) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DimensionError("cycle duration must be positive");
  if (m.n_sites() != code.n_sites()) throw DimensionError("model and code act on different registers");
  const RecoveryAdjoint adj(code, ch);
  const auto recover = [&adj](const PauliString& s) { return adj.apply(s); };

  VariableSet vars = decode_functional(code, ch).strings();
  for (const auto& [name, p] : code.logicals())
    for (const auto& [s, c] : p.terms())
      if (!s.is_identity()) vars.add(s);
  for (;;) {
    const std::size_t before = vars.size();
    vars = closure_under(closure(vars, m, max_dim), recover, max_dim);
    if (vars.size() == before) break;
  }

  const GeneratorMatrix gen = build_generator(vars, m);
  const Matrix step = expm(gen.a * dt);
  const AffineMap rec = recovery_superoperator(code, ch, vars, max_dim);
  if (!(rec.variables == vars)) throw NotClosedError("recovery closure changed unexpectedly", vars[0]);

  Vector v;
  if (const auto* b = std::get_if<BlochVector>(&initial)) {
    v = encode(code, *b, vars);
  } else {
    const auto& psi = std::get<Amplitudes>(initial);
    if (psi.size() != (std::size_t{1} << code.n_sites()))
      throw DimensionError("initial amplitudes do not match the code size");
    v = expectations_from_state(psi, vars.strings());
  }
  std::array<LinearFunctional, 3> readout{linear_functional(code.logical("xbar"), vars),
                                          linear_functional(code.logical("ybar"), vars),
                                          linear_functional(code.logical("zbar"), vars)};
  CycleResult out;
  out.variables = vars;
  auto record = [&] { out.logical.push_back({readout[0](v), readout[1](v), readout[2](v)}); };
  record();
  for (std::size_t c = 0; c < n_cycles; ++c) {
    v = rec.apply(step * v);
    for (double x : v)
      if (!std::isfinite(x)) throw IntegrationError("cycle iteration became non-finite");
    record();
  }
  return out;
}

void write_cycles_csv(std::ostream& os, const CycleResult& r) {
  os << "cycle,xbar,ybar,zbar\n";
  char buf[128];
  for (std::size_t c = 0; c < r.logical.size(); ++c) {
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%.12g\n", c, r.logical[c][0], r.logical[c][1],
                  r.logical[c][2]);
    os << buf;
  }
}

}  // namespace qio
