#pragma once

// Shared helpers for the test binaries. Everything that acts as a reference
// here goes through Eigen's dense matrices, never through the library's own
// linear algebra or Pauli machinery.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qio/linalg.hpp"
#include "qio/oracle.hpp"
#include "qio/pauli.hpp"
#include "qio/qec.hpp"
#include "qio/state_space.hpp"

namespace qio::ref {

using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using cd = std::complex<double>;

inline CMat single_site(Letter l) {
  CMat m(2, 2);
  switch (l) {
    case Letter::I: m << 1, 0, 0, 1; break;
    case Letter::X: m << 0, 1, 1, 0; break;
    case Letter::Y: m << 0, cd(0, -1), cd(0, 1), 0; break;
    case Letter::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

/// Dense matrix of a Pauli string, site 0 as the most significant factor.
inline CMat dense(const PauliString& p) {
  CMat out = CMat::Identity(1, 1);
  for (std::size_t k = 0; k < p.n_sites(); ++k) {
    CMat next = Eigen::kroneckerProduct(out, single_site(p.letter(k))).eval();
    out = next;
  }
  return out;
}

inline CMat dense(const PauliPolynomial& poly) {
  const Eigen::Index d = Eigen::Index{1} << poly.n_sites();
  CMat out = CMat::Zero(d, d);
  for (const auto& [s, c] : poly.terms()) out += c * dense(s);
  return out;
}

inline CMat to_eigen(const ComplexMatrix& m) {
  CMat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

inline RMat to_eigen(const Matrix& m) {
  RMat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

inline ComplexMatrix from_eigen(const CMat& m) {
  ComplexMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

inline Matrix from_eigen(const RMat& m) {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

/// Heisenberg-picture Lindblad generator applied to a dense observable.
inline CMat dense_adjoint_generator(const CMat& p, const LindbladModel& m) {
  const CMat h = dense(m.hamiltonian());
  CMat out = cd(0, 1) * (h * p - p * h);
  for (const auto& d : m.dissipators()) {
    const CMat c = dense(d.op);
    const CMat cd_ = c.adjoint();
    out += d.rate * (cd_ * p * c - 0.5 * (cd_ * c * p + p * cd_ * c));
  }
  return out;
}

inline double trace_expectation(const CMat& op, const CMat& rho) { return (op * rho).trace().real(); }

inline PauliString random_string(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<int> letter(0, 3);
  PauliString p(n);
  for (std::size_t k = 0; k < n; ++k) p = p.with(k, static_cast<Letter>(letter(rng)));
  return p;
}

inline PauliPolynomial random_polynomial(std::mt19937& rng, std::size_t n, std::size_t terms, bool hermitian) {
  std::normal_distribution<double> g;
  PauliPolynomial out(n);
  for (std::size_t t = 0; t < terms; ++t)
    out.add_term(random_string(rng, n), hermitian ? cd(g(rng), 0.0) : cd(g(rng), g(rng)));
  return out;
}

/// Random Hamiltonian plus one or two dissipators, some with complex jump operators.
inline LindbladModel random_model(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> rate(0.1, 2.0);
  std::vector<Dissipator> diss;
  diss.push_back({rate(rng), random_polynomial(rng, n, 2, false)});
  diss.push_back({rate(rng), random_polynomial(rng, n, 1, true)});
  return LindbladModel(n, random_polynomial(rng, n, 3, true), diss);
}

inline Amplitudes random_state(std::mt19937& rng, std::size_t n) {
  std::normal_distribution<double> g;
  Amplitudes psi(std::size_t{1} << n);
  double norm = 0.0;
  for (auto& a : psi) {
    a = {g(rng), g(rng)};
    norm += std::norm(a);
  }
  for (auto& a : psi) a /= std::sqrt(norm);
  return psi;
}

inline CMat projector(const Amplitudes& psi) {
  Eigen::VectorXcd v(psi.size());
  for (std::size_t k = 0; k < psi.size(); ++k) v(static_cast<Eigen::Index>(k)) = psi[k];
  return v * v.adjoint();
}

/// Random mixed state: a convex mixture of a few random pure states.
inline CMat random_density(std::mt19937& rng, std::size_t n, int mixtures = 3) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  const Eigen::Index d = Eigen::Index{1} << n;
  CMat rho = CMat::Zero(d, d);
  double total = 0.0;
  for (int k = 0; k < mixtures; ++k) {
    const double w = u(rng);
    rho += w * projector(random_state(rng, n));
    total += w;
  }
  return rho / total;
}

inline RMat random_matrix(std::mt19937& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> g;
  RMat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

/// Random stable system: a Gaussian matrix shifted so that its spectral
/// abscissa sits between -1.5 and -0.1. The spectrum comes from Eigen.
inline StateSpaceModel random_stable_system(std::mt19937& rng, std::size_t n, std::size_t inputs,
                                            std::size_t outputs) {
  const auto ni = static_cast<Eigen::Index>(n);
  RMat a = random_matrix(rng, ni, ni);
  const double abscissa = Eigen::EigenSolver<RMat>(a).eigenvalues().real().maxCoeff();
  std::uniform_real_distribution<double> margin(0.1, 1.5);
  a -= (abscissa + margin(rng)) * RMat::Identity(ni, ni);
  return StateSpaceModel(from_eigen(a), from_eigen(random_matrix(rng, ni, static_cast<Eigen::Index>(inputs))),
                         from_eigen(random_matrix(rng, static_cast<Eigen::Index>(outputs), ni)));
}

/// Reference gramian from Eigen: solves the Kronecker-vectorised equation
/// (I (x) A + A (x) I) vec(P) = -vec(Q) with a full-pivot LU.
inline RMat reference_lyapunov(const RMat& a, const RMat& q) {
  const Eigen::Index n = a.rows();
  const RMat id = RMat::Identity(n, n);
  const RMat k = Eigen::kroneckerProduct(id, a).eval() + Eigen::kroneckerProduct(a, id).eval();
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(q.data(), n * n);
  const Eigen::VectorXd x = k.fullPivLu().solve(rhs);
  return Eigen::Map<const RMat>(x.data(), n, n);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double best = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) best = std::max(best, std::abs(a[k] - b[k]));
  return best;
}

/// Basis-index masks of a Pauli string: P|j> = phase (-1)^{|sign & j|} |j ^ flip>,
/// with site 0 as the most significant bit to match dense().
struct IndexMasks {
  std::uint64_t flip = 0;
  std::uint64_t sign = 0;
};

inline IndexMasks index_masks(const PauliString& p) {
  const std::size_t n = p.n_sites();
  IndexMasks m;
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - k);
    const Letter l = p.letter(k);
    if (l == Letter::X || l == Letter::Y) m.flip |= bit;
    if (l == Letter::Z || l == Letter::Y) m.sign |= bit;
  }
  return m;
}

inline double parity_sign(std::uint64_t mask, std::uint64_t j) { return (std::popcount(mask & j) & 1) ? -1.0 : 1.0; }

/// P rho P^dagger by permuting basis indices. The global phase of P cancels.
inline CMat conjugate_by(const PauliString& p, const CMat& rho) {
  const IndexMasks m = index_masks(p);
  const Eigen::Index d = rho.rows();
  CMat out(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto ii = static_cast<std::uint64_t>(i);
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto jj = static_cast<std::uint64_t>(j);
      out(static_cast<Eigen::Index>(ii ^ m.flip), static_cast<Eigen::Index>(jj ^ m.flip)) =
          parity_sign(m.sign, ii) * parity_sign(m.sign, jj) * rho(i, j);
    }
  }
  return out;
}

/// sqrt(prod_j (I + s_j eta S_j) / 2) for one outcome pattern. Z-type
/// syndromes are diagonal, so the root is taken entrywise; anything else
/// goes through Eigen's matrix square root.
inline CMat measurement_operator(const std::vector<PauliString>& syndromes, unsigned mask, double eta) {
  const std::size_t n = syndromes.front().n_sites();
  const Eigen::Index d = Eigen::Index{1} << n;
  bool diagonal = true;
  for (const auto& s : syndromes) diagonal = diagonal && index_masks(s).flip == 0;
  if (diagonal) {
    CMat root = CMat::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      double w = 1.0;
      for (std::size_t j = 0; j < syndromes.size(); ++j) {
        const double sj = (mask >> j & 1u) ? -1.0 : 1.0;
        w *= 0.5 * (1.0 + sj * eta * parity_sign(index_masks(syndromes[j]).sign, static_cast<std::uint64_t>(i)));
      }
      root(i, i) = std::sqrt(std::max(w, 0.0));
    }
    return root;
  }
  CMat prod = CMat::Identity(d, d);
  for (std::size_t j = 0; j < syndromes.size(); ++j) {
    const double sj = (mask >> j & 1u) ? -1.0 : 1.0;
    prod = prod * (0.5 * (CMat::Identity(d, d) + sj * eta * dense(syndromes[j])));
  }
  return prod.sqrt();
}

/// Explicit Schroedinger-picture recovery: for every stage and outcome,
/// eta_rec R K rho K R + (1 - eta_rec) K rho K.
inline CMat dense_recover(const StabilizerCode& code, double eta_meas, double eta_rec, const CMat& rho_in) {
  CMat rho = rho_in;
  for (const auto& st : code.stages()) {
    CMat next = CMat::Zero(rho.rows(), rho.cols());
    for (unsigned mask = 0; mask < st.recoveries.size(); ++mask) {
      const CMat k = measurement_operator(st.syndromes, mask, eta_meas);
      const bool diagonal = (k - CMat(k.diagonal().asDiagonal())).norm() == 0.0;
      const CMat measured = diagonal ? CMat(k.diagonal().asDiagonal() * rho * k.diagonal().conjugate().asDiagonal())
                                     : CMat(k * rho * k.adjoint());
      next += eta_rec * conjugate_by(st.recoveries[mask], measured) + (1.0 - eta_rec) * measured;
    }
    rho = next;
  }
  return rho;
}

/// Tr(P rho) = sum_k phase (-1)^{|sign & k|} rho(k, k ^ flip).
inline double string_expectation(const PauliString& p, const CMat& rho) {
  const IndexMasks m = index_masks(p);
  int ys = 0;
  for (std::size_t k = 0; k < p.n_sites(); ++k) ys += p.letter(k) == Letter::Y;
  static const cd turns[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  cd acc = 0.0;
  for (Eigen::Index k = 0; k < rho.rows(); ++k) {
    const auto kk = static_cast<std::uint64_t>(k);
    acc += parity_sign(m.sign, kk) * rho(k, static_cast<Eigen::Index>(kk ^ m.flip));
  }
  return (turns[ys % 4] * acc).real();
}

inline double dense_expectation(const PauliPolynomial& op, const CMat& rho) {
  double acc = 0.0;
  for (const auto& [s, c] : op.terms()) acc += (c * string_expectation(s, rho)).real();
  return acc;
}

}  // namespace qio::ref
