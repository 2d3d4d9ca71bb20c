#include "qio/oracle.hpp"

#include <cmath>
#include <string>

namespace qio {

namespace {

std::uint64_t reverse_sites(std::uint64_t mask, std::size_t n) {
  std::uint64_t out = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (mask & (std::uint64_t{1} << k)) out |= std::uint64_t{1} << (n - 1 - k);
  return out;
}

void check_oracle_size(std::size_t n) {
  if (n == 0 || n > kOracleMaxSites)
    throw DimensionError("oracle supports 1.." + std::to_string(kOracleMaxSites) + " qubits, got " +
                         std::to_string(n));
}

}  // namespace

IndexedPauli IndexedPauli::from(const PauliString& s) {
  const std::size_t n = s.n_sites();
  IndexedPauli p;
  p.x = reverse_sites(s.x_mask(), n);
  p.z = reverse_sites(s.z_mask(), n);
  // Y = i X Z on each site.
  static constexpr std::complex<double> kTurns[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  p.phase = kTurns[std::popcount(s.x_mask() & s.z_mask()) & 3];
  return p;
}

IndexedOperator::IndexedOperator(const PauliPolynomial& op) {
  terms_.reserve(op.size());
  for (const auto& [s, c] : op.terms()) terms_.emplace_back(IndexedPauli::from(s), c);
}

void IndexedOperator::apply_left(const ComplexMatrix& m, ComplexMatrix& out,
                                 std::complex<double> scale) const {
  const std::size_t d = m.rows();
  for (const auto& [p, c] : terms_) {
    const auto f = scale * c;
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t src = i ^ p.x;
      const auto w = f * p.sign(src);
      const auto in = m.row(src);
      auto o = out.row(i);
      for (std::size_t j = 0; j < d; ++j) o[j] += w * in[j];
    }
  }
}

void IndexedOperator::apply_right(const ComplexMatrix& m, ComplexMatrix& out,
                                  std::complex<double> scale) const {
  const std::size_t d = m.rows();
  std::vector<std::complex<double>> colw(d);
  for (const auto& [p, c] : terms_) {
    const auto f = scale * c;
    for (std::size_t j = 0; j < d; ++j) colw[j] = f * p.sign(j);
    for (std::size_t i = 0; i < d; ++i) {
      const auto in = m.row(i);
      auto o = out.row(i);
      for (std::size_t j = 0; j < d; ++j) o[j] += in[j ^ p.x] * colw[j];
    }
  }
}

Amplitudes IndexedOperator::apply(std::span<const std::complex<double>> psi) const {
  Amplitudes out(psi.size());
  for (const auto& [p, c] : terms_)
    for (std::size_t j = 0; j < psi.size(); ++j) out[j ^ p.x] += c * p.sign(j) * psi[j];
  return out;
}

// ---------------------------------------------------------------------------

std::size_t sites_for_dimension(std::size_t dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0)
    throw InvalidStateError("state dimension " + std::to_string(dim) + " is not a power of two");
  return static_cast<std::size_t>(std::countr_zero(dim));
}

bool is_positive_semidefinite(const ComplexMatrix& rho, double shift) {
  const std::size_t d = rho.rows();
  ComplexMatrix l(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    double diag = rho(j, j).real() + shift;
    for (std::size_t k = 0; k < j; ++k) diag -= std::norm(l(j, k));
    if (!(diag > 0.0)) return false;
    const double root = std::sqrt(diag);
    l(j, j) = root;
    for (std::size_t i = j + 1; i < d; ++i) {
      std::complex<double> acc = rho(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * std::conj(l(j, k));
      l(i, j) = acc / root;
    }
  }
  return true;
}

DensityMatrix::DensityMatrix(std::size_t n_sites, ComplexMatrix entries)
    : n_(n_sites), entries_(std::move(entries)) {
  check_oracle_size(n_sites);
  const std::size_t d = std::size_t{1} << n_sites;
  if (entries_.rows() != d || entries_.cols() != d)
    throw DimensionError("density matrix must be 2^n x 2^n");
  std::complex<double> tr{};
  for (std::size_t i = 0; i < d; ++i) {
    tr += entries_(i, i);
    for (std::size_t j = i; j < d; ++j)
      if (std::abs(entries_(i, j) - std::conj(entries_(j, i))) > 1e-10)
        throw InvalidStateError("density matrix is not hermitian");
  }
  if (std::abs(tr - 1.0) > 1e-10) throw InvalidStateError("density matrix trace is not 1");
  if (!is_positive_semidefinite(entries_, 1e-8))
    throw InvalidStateError("density matrix is not positive semidefinite");
}

DensityMatrix DensityMatrix::from_amplitudes(std::span<const std::complex<double>> psi) {
  const std::size_t n = sites_for_dimension(psi.size());
  check_oracle_size(n);
  double norm = 0.0;
  for (const auto& a : psi) norm += std::norm(a);
  if (std::abs(std::sqrt(norm) - 1.0) > 1e-9) throw InvalidStateError("amplitudes are not normalized");
  ComplexMatrix rho(psi.size(), psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    for (std::size_t j = 0; j < psi.size(); ++j) rho(i, j) = psi[i] * std::conj(psi[j]);
  return DensityMatrix(n, std::move(rho), Unchecked{});
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t n_sites) {
  check_oracle_size(n_sites);
  const std::size_t d = std::size_t{1} << n_sites;
  ComplexMatrix rho(d, d);
  for (std::size_t i = 0; i < d; ++i) rho(i, i) = 1.0 / static_cast<double>(d);
  return DensityMatrix(n_sites, std::move(rho), Unchecked{});
}

DensityMatrix DensityMatrix::product(std::span<const BlochVector> bloch) {
  check_oracle_size(bloch.size());
  ComplexMatrix rho = ComplexMatrix::identity(1);
  for (const auto& b : bloch) {
    const double r = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    if (r > 1.0 + 1e-9) throw InvalidStateError("Bloch vector longer than 1");
    // (I + x X + y Y + z Z) / 2 in the |0>, |1> basis.
    ComplexMatrix q{{0.5 * (1.0 + b[2]), {0.5 * b[0], -0.5 * b[1]}},
                    {{0.5 * b[0], 0.5 * b[1]}, 0.5 * (1.0 - b[2])}};
    ComplexMatrix next(rho.rows() * 2, rho.cols() * 2);
    for (std::size_t i = 0; i < rho.rows(); ++i)
      for (std::size_t j = 0; j < rho.cols(); ++j)
        for (std::size_t p = 0; p < 2; ++p)
          for (std::size_t s = 0; s < 2; ++s) next(2 * i + p, 2 * j + s) = rho(i, j) * q(p, s);
    rho = std::move(next);
  }
  return DensityMatrix(bloch.size(), std::move(rho), Unchecked{});
}

double expectation(const PauliString& p, const ComplexMatrix& rho) {
  const auto ip = IndexedPauli::from(p);
  std::complex<double> acc{};
  for (std::size_t i = 0; i < rho.rows(); ++i) {
    const std::size_t k = i ^ ip.x;
    acc += ip.sign(k) * rho(k, i);
  }
  return acc.real();
}

double expectation(const PauliString& p, std::span<const std::complex<double>> psi) {
  const auto ip = IndexedPauli::from(p);
  std::complex<double> acc{};
  for (std::size_t k = 0; k < psi.size(); ++k) acc += std::conj(psi[k ^ ip.x]) * ip.sign(k) * psi[k];
  return acc.real();
}

Vector expectations_from_state(std::span<const std::complex<double>> psi,
                               std::span<const PauliString> vars) {
  const std::size_t n = sites_for_dimension(psi.size());
  double norm = 0.0;
  for (const auto& a : psi) norm += std::norm(a);
  if (std::abs(std::sqrt(norm) - 1.0) > 1e-9) throw InvalidStateError("amplitudes are not normalized");
  Vector out;
  out.reserve(vars.size());
  for (const auto& v : vars) {
    if (v.n_sites() != n) throw DimensionError("variable " + v.to_string() + " does not match state size");
    out.push_back(expectation(v, psi));
  }
  return out;
}

Vector expectations_from_state(const DensityMatrix& rho, std::span<const PauliString> vars) {
  Vector out;
  out.reserve(vars.size());
  for (const auto& v : vars) {
    if (v.n_sites() != rho.n_sites())
      throw DimensionError("variable " + v.to_string() + " does not match state size");
    out.push_back(expectation(v, rho.entries()));
  }
  return out;
}

// ---------------------------------------------------------------------------

MasterEquationOracle::MasterEquationOracle(const LindbladModel& m)
    : n_(m.n_sites()), hamiltonian_(m.hamiltonian()), rate_scale_(m.rate_scale()) {
  check_oracle_size(n_);
  for (std::size_t k = 0; k < m.dissipators().size(); ++k) {
    const auto& d = m.dissipators()[k];
    if (d.rate == 0.0 || d.op.empty()) continue;
    Channel ch;
    ch.rate = d.rate;
    ch.op = IndexedOperator(d.op);
    ch.op_dag = IndexedOperator(d.op.adjoint());
    ch.jump = IndexedOperator(m.jump_products()[k]);
    if (d.op.size() == 1) {
      const auto& [s, c] = *d.op.terms().begin();
      ch.single = true;
      ch.string = IndexedPauli::from(s);
      ch.weight = d.rate * std::norm(c);
    }
    channels_.push_back(std::move(ch));
  }
}

ComplexMatrix MasterEquationOracle::rhs(const ComplexMatrix& rho) const {
  const std::size_t d = rho.rows();
  const std::complex<double> minus_i{0.0, -1.0};
  ComplexMatrix out(d, d);
  hamiltonian_.apply_left(rho, out, minus_i);
  hamiltonian_.apply_right(rho, out, -minus_i);
  ComplexMatrix tmp(d, d);
  std::vector<double> sign_col(d);
  for (const auto& ch : channels_) {
    if (ch.single) {
      // (P rho P)(i, j) = phase^2 sgn(i ^ x) sgn(j) rho(i ^ x, j ^ x), phase^2 = +-1.
      const auto& p = ch.string;
      const double phase2 = (p.phase * p.phase).real();
      for (std::size_t i = 0; i < d; ++i) sign_col[i] = (std::popcount(p.z & i) & 1) ? -1.0 : 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double si = ch.weight * phase2 * ((std::popcount(p.z & (i ^ p.x)) & 1) ? -1.0 : 1.0);
        const auto in = rho.row(i ^ p.x);
        const auto own = rho.row(i);
        auto o = out.row(i);
        for (std::size_t j = 0; j < d; ++j)
          o[j] += si * sign_col[j] * in[j ^ p.x] - ch.weight * own[j];
      }
      continue;
    }
    std::fill(tmp.data().begin(), tmp.data().end(), std::complex<double>{});
    ch.op.apply_left(rho, tmp);
    ch.op_dag.apply_right(tmp, out, ch.rate);
    ch.jump.apply_left(rho, out, -0.5 * ch.rate);
    ch.jump.apply_right(rho, out, -0.5 * ch.rate);
  }
  return out;
}

ComplexMatrix apply_kraus(std::span<const PauliPolynomial> kraus, const ComplexMatrix& rho) {
  const std::size_t d = rho.rows();
  ComplexMatrix out(d, d);
  ComplexMatrix tmp(d, d);
  for (const auto& k : kraus) {
    std::fill(tmp.data().begin(), tmp.data().end(), std::complex<double>{});
    IndexedOperator(k).apply_left(rho, tmp);
    IndexedOperator(k.adjoint()).apply_right(tmp, out);
  }
  return out;
}

}  // namespace qio
