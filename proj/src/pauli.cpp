#include "qio/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace qio {

namespace {

constexpr std::uint64_t bit(std::size_t site) { return std::uint64_t{1} << site; }

std::uint64_t site_mask(std::size_t n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

int letter_rank(bool x, bool z) {
  // I < X < Y < Z
  if (!x && !z) return 0;
  if (x && !z) return 1;
  if (x && z) return 2;
  return 3;
}

int popcount(std::uint64_t v) { return std::popcount(v); }

}  // namespace

char to_char(Letter l) {
  switch (l) {
    case Letter::I: return 'I';
    case Letter::X: return 'X';
    case Letter::Y: return 'Y';
    case Letter::Z: return 'Z';
  }
  return '?';
}

PauliString::PauliString(std::size_t n_sites) : n_(static_cast<std::uint32_t>(n_sites)) {
  if (n_sites == 0 || n_sites > kMaxSites)
    throw DimensionError("Pauli strings support 1.." + std::to_string(kMaxSites) + " sites");
}

PauliString PauliString::parse(std::string_view letters) {
  PauliString s(letters.size());
  for (std::size_t k = 0; k < letters.size(); ++k) {
    switch (letters[k]) {
      case 'I': break;
      case 'X': s.x_ |= bit(k); break;
      case 'Y': s.x_ |= bit(k); s.z_ |= bit(k); break;
      case 'Z': s.z_ |= bit(k); break;
      default:
        throw DimensionError("invalid Pauli letter '" + std::string(1, letters[k]) + "' in \"" +
                             std::string(letters) + "\"");
    }
  }
  return s;
}

PauliString PauliString::single(std::size_t n_sites, std::size_t site, Letter l) {
  return PauliString(n_sites).with(site, l);
}

PauliString PauliString::from_masks(std::size_t n_sites, std::uint64_t x, std::uint64_t z) {
  PauliString s(n_sites);
  const auto m = site_mask(n_sites);
  if ((x | z) & ~m) throw DimensionError("Pauli mask exceeds register size");
  s.x_ = x;
  s.z_ = z;
  return s;
}

Letter PauliString::letter(std::size_t site) const {
  if (site >= n_) throw DimensionError("site index out of range");
  const bool x = x_ & bit(site), z = z_ & bit(site);
  return static_cast<Letter>(letter_rank(x, z));
}

PauliString PauliString::with(std::size_t site, Letter l) const {
  if (site >= n_) throw DimensionError("site index out of range");
  PauliString s = *this;
  s.x_ &= ~bit(site);
  s.z_ &= ~bit(site);
  if (l == Letter::X || l == Letter::Y) s.x_ |= bit(site);
  if (l == Letter::Z || l == Letter::Y) s.z_ |= bit(site);
  return s;
}

bool PauliString::commutes_with(const PauliString& o) const {
  if (n_ != o.n_) throw DimensionError("Pauli strings act on different register sizes");
  return ((popcount(x_ & o.z_) + popcount(z_ & o.x_)) & 1) == 0;
}

std::string PauliString::to_string() const {
  std::string out(n_, 'I');
  for (std::size_t k = 0; k < n_; ++k) out[k] = to_char(letter(k));
  return out;
}

std::string PauliString::label() const {
  if (is_identity()) return "I";
  std::string out;
  for (std::size_t k = 0; k < n_; ++k) {
    const Letter l = letter(k);
    if (l == Letter::I) continue;
    out += to_char(l);
    out += std::to_string(k + 1);
  }
  return out;
}

bool operator<(const PauliString& a, const PauliString& b) {
  if (a.n_ != b.n_) return a.n_ < b.n_;
  const std::uint64_t diff = (a.x_ ^ b.x_) | (a.z_ ^ b.z_);
  if (diff == 0) return false;
  const auto site = static_cast<std::size_t>(std::countr_zero(diff));
  const int ra = letter_rank(a.x_ & bit(site), a.z_ & bit(site));
  const int rb = letter_rank(b.x_ & bit(site), b.z_ & bit(site));
  return ra < rb;
}

std::complex<double> ScaledPauli::phase() const {
  switch (quarter_turns & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

ScaledPauli multiply(const PauliString& p, const PauliString& q) {
  if (p.n_sites() != q.n_sites()) throw DimensionError("Pauli product of mismatched sizes");
  // With P = i^{x.z} X^x Z^z, the product picks up i^{x1z1 + x2z2 - x3z3} from
  // the Y conventions and (-1)^{z1.x2} from moving Z^z1 past X^x2.
  const std::uint64_t x1 = p.x_mask(), z1 = p.z_mask(), x2 = q.x_mask(), z2 = q.z_mask();
  const std::uint64_t x3 = x1 ^ x2, z3 = z1 ^ z2;
  const int k = popcount(x1 & z1) + popcount(x2 & z2) + 2 * popcount(z1 & x2) - popcount(x3 & z3);
  return {((k % 4) + 4) % 4, PauliString::from_masks(p.n_sites(), x3, z3)};
}

// ---------------------------------------------------------------------------
// PauliPolynomial

PauliPolynomial::PauliPolynomial(const PauliString& s, Coefficient c) : n_(s.n_sites()) {
  if (c != Coefficient{}) terms_.emplace(s, c);
}

PauliPolynomial PauliPolynomial::identity(std::size_t n_sites, Coefficient c) {
  return PauliPolynomial(PauliString(n_sites), c);
}

PauliPolynomial::Coefficient PauliPolynomial::coefficient(const PauliString& s) const {
  const auto it = terms_.find(s);
  return it == terms_.end() ? Coefficient{} : it->second;
}

double PauliPolynomial::max_abs_coefficient() const {
  double best = 0.0;
  for (const auto& [s, c] : terms_) best = std::max(best, std::abs(c));
  return best;
}

void PauliPolynomial::add_term(const PauliString& s, Coefficient c) {
  if (n_ == 0) n_ = s.n_sites();
  if (s.n_sites() != n_) throw DimensionError("term size does not match polynomial");
  if (c == Coefficient{}) return;
  auto [it, inserted] = terms_.try_emplace(s, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Coefficient{}) terms_.erase(it);
  }
}

void PauliPolynomial::prune(double drop) {
  const double cutoff = drop * max_abs_coefficient();
  std::erase_if(terms_, [cutoff](const auto& kv) { return std::abs(kv.second) <= cutoff; });
}

PauliPolynomial PauliPolynomial::adjoint() const {
  PauliPolynomial out(n_);
  for (const auto& [s, c] : terms_) out.terms_.emplace_hint(out.terms_.end(), s, std::conj(c));
  return out;
}

bool PauliPolynomial::is_hermitian(double tol) const {
  const double scale = std::max(1.0, max_abs_coefficient());
  return std::all_of(terms_.begin(), terms_.end(),
                     [&](const auto& kv) { return std::abs(kv.second.imag()) <= tol * scale; });
}

void PauliPolynomial::require_sites(const PauliPolynomial& o) const {
  if (n_ != 0 && o.n_ != 0 && n_ != o.n_)
    throw DimensionError("polynomials act on different register sizes");
}

PauliPolynomial& PauliPolynomial::operator+=(const PauliPolynomial& o) {
  require_sites(o);
  if (n_ == 0) n_ = o.n_;
  for (const auto& [s, c] : o.terms_) add_term(s, c);
  prune();
  return *this;
}

PauliPolynomial& PauliPolynomial::operator-=(const PauliPolynomial& o) {
  require_sites(o);
  if (n_ == 0) n_ = o.n_;
  for (const auto& [s, c] : o.terms_) add_term(s, -c);
  prune();
  return *this;
}

PauliPolynomial& PauliPolynomial::operator*=(Coefficient s) {
  if (s == Coefficient{}) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, c] : terms_) c *= s;
  return *this;
}

PauliPolynomial operator*(const PauliPolynomial& a, const PauliPolynomial& b) {
  a.require_sites(b);
  std::unordered_map<PauliString, PauliPolynomial::Coefficient> acc;
  acc.reserve(a.size() * b.size());
  for (const auto& [sa, ca] : a.terms_) {
    for (const auto& [sb, cb] : b.terms_) {
      const auto prod = multiply(sa, sb);
      acc[prod.string] += ca * cb * prod.phase();
    }
  }
  PauliPolynomial out(a.n_ != 0 ? a.n_ : b.n_);
  for (const auto& [s, c] : acc)
    if (c != PauliPolynomial::Coefficient{}) out.terms_.emplace(s, c);
  out.prune();
  return out;
}

PauliPolynomial commutator(const PauliString& p, const PauliString& q) {
  if (p.n_sites() != q.n_sites()) throw DimensionError("commutator of mismatched sizes");
  if (p.commutes_with(q)) return PauliPolynomial(p.n_sites());
  const auto prod = multiply(p, q);
  return PauliPolynomial(prod.string, 2.0 * prod.phase());
}

PauliPolynomial commutator(const PauliPolynomial& a, const PauliPolynomial& b) {
  PauliPolynomial out(a.n_sites() != 0 ? a.n_sites() : b.n_sites());
  for (const auto& [sa, ca] : a.terms())
    for (const auto& [sb, cb] : b.terms())
      if (!sa.commutes_with(sb)) {
        const auto prod = multiply(sa, sb);
        out.add_term(prod.string, 2.0 * ca * cb * prod.phase());
      }
  out.prune();
  return out;
}

PauliPolynomial anticommutator(const PauliPolynomial& a, const PauliPolynomial& b) {
  PauliPolynomial out(a.n_sites() != 0 ? a.n_sites() : b.n_sites());
  for (const auto& [sa, ca] : a.terms())
    for (const auto& [sb, cb] : b.terms())
      if (sa.commutes_with(sb)) {
        const auto prod = multiply(sa, sb);
        out.add_term(prod.string, 2.0 * ca * cb * prod.phase());
      }
  out.prune();
  return out;
}

std::complex<double> identity_coefficient(const PauliPolynomial& poly) {
  if (poly.n_sites() == 0) return {};
  return poly.coefficient(PauliString(poly.n_sites()));
}

std::complex<double> normalized_trace_product(const PauliPolynomial& a, const PauliPolynomial& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  std::complex<double> acc{};
  for (const auto& [s, c] : small.terms()) acc += c * large.coefficient(s);
  return acc;
}

PauliPolynomial tensor(const PauliPolynomial& a, const PauliPolynomial& b) {
  const std::size_t na = a.n_sites(), nb = b.n_sites();
  PauliPolynomial out(na + nb);
  for (const auto& [sa, ca] : a.terms())
    for (const auto& [sb, cb] : b.terms())
      out.add_term(PauliString::from_masks(na + nb, sa.x_mask() | (sb.x_mask() << na),
                                           sa.z_mask() | (sb.z_mask() << na)),
                   ca * cb);
  out.prune();
  return out;
}

PauliPolynomial embed(const PauliPolynomial& p, std::size_t n_sites, std::size_t offset) {
  if (offset + p.n_sites() > n_sites) throw DimensionError("embedding exceeds register size");
  PauliPolynomial out(n_sites);
  for (const auto& [s, c] : p.terms())
    out.add_term(PauliString::from_masks(n_sites, s.x_mask() << offset, s.z_mask() << offset), c);
  return out;
}

// ---------------------------------------------------------------------------
// LindbladModel

LindbladModel::LindbladModel(std::size_t n_sites, PauliPolynomial hamiltonian,
                             std::vector<Dissipator> dissipators)
    : n_(n_sites), hamiltonian_(std::move(hamiltonian)), dissipators_(std::move(dissipators)) {
  if (n_sites == 0 || n_sites > PauliString::kMaxSites)
    throw InvalidModelError("model register size out of range");
  if (hamiltonian_.n_sites() == 0) hamiltonian_ = PauliPolynomial(n_sites);
  if (hamiltonian_.n_sites() != n_sites)
    throw InvalidModelError("Hamiltonian acts on " + std::to_string(hamiltonian_.n_sites()) +
                            " sites, model has " + std::to_string(n_sites));
  if (!hamiltonian_.is_hermitian()) throw InvalidModelError("Hamiltonian is not hermitian");
  // Drop the imaginary round-off so i[H, P] is exactly anti-hermitian.
  PauliPolynomial real_h(n_sites);
  for (const auto& [s, c] : hamiltonian_.terms()) real_h.add_term(s, c.real());
  hamiltonian_ = std::move(real_h);
  jump_products_.reserve(dissipators_.size());
  for (auto& d : dissipators_) {
    if (!(d.rate >= 0.0) || !std::isfinite(d.rate))
      throw InvalidModelError("dissipator rate must be finite and non-negative");
    if (d.op.n_sites() == 0) d.op = PauliPolynomial(n_sites);
    if (d.op.n_sites() != n_sites) throw InvalidModelError("collapse operator size mismatch");
    jump_products_.push_back(d.op.adjoint() * d.op);
  }
}

double LindbladModel::rate_scale() const {
  double s = 0.0;
  for (const auto& [p, c] : hamiltonian_.terms()) s += 2.0 * std::abs(c);
  for (const auto& d : dissipators_) {
    double l1 = 0.0;
    for (const auto& [p, c] : d.op.terms()) l1 += std::abs(c);
    s += 2.0 * d.rate * l1 * l1;
  }
  return s;
}

PauliPolynomial adjoint_generator(const PauliPolynomial& p, const LindbladModel& m,
                                  const Tolerances& tol) {
  if (p.n_sites() != 0 && p.n_sites() != m.n_sites())
    throw DimensionError("observable and model act on different register sizes");
  const std::size_t n = m.n_sites();
  PauliPolynomial out(n);
  out += commutator(m.hamiltonian(), p) * std::complex<double>(0.0, 1.0);
  const auto& jumps = m.jump_products();
  for (std::size_t k = 0; k < m.dissipators().size(); ++k) {
    const auto& d = m.dissipators()[k];
    if (d.rate == 0.0 || d.op.empty()) continue;
    PauliPolynomial term = d.op.adjoint() * p * d.op;
    term -= anticommutator(jumps[k], p) * 0.5;
    out += term * d.rate;
  }
  out.prune(tol.pauli_drop);
  return out;
}

PauliPolynomial adjoint_generator(const PauliString& p, const LindbladModel& m,
                                  const Tolerances& tol) {
  if (p.n_sites() != m.n_sites())
    throw DimensionError("observable and model act on different register sizes");
  PauliPolynomial raw = adjoint_generator(PauliPolynomial(p), m, tol);
  const double scale = std::max(1.0, raw.max_abs_coefficient());
  PauliPolynomial out(m.n_sites());
  for (const auto& [s, c] : raw.terms()) {
    if (std::abs(c.imag()) > tol.hermitian_imag * scale)
      throw AlgebraError("d<" + p.label() + ">/dt has imaginary coefficient on " + s.label());
    if (c.real() != 0.0) out.add_term(s, c.real());
  }
  out.prune(tol.pauli_drop);
  return out;
}

}  // namespace qio
