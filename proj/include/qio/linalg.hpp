#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "qio/matrix.hpp"

namespace qio {

/// Numerical thresholds shared by every module. The defaults are the values
/// the test and acceptance suites are pinned against.
struct Tolerances {
  // Pauli algebra.
  double pauli_drop = 1e-14;       // relative to the largest coefficient
  double hermitian_imag = 1e-12;   // imaginary residue allowed in d<P>/dt
  // Factorizations.
  double rank_relative = 1e-10;    // coupling factor rank threshold
  double eig_convergence = 1e-12;
  int eig_max_iterations = 100;    // QR iterations per eigenvalue
  int svd_max_sweeps = 80;
  int jacobi_max_sweeps = 80;
  double psd_drop = 1e-15;         // gramian eigenvalues dropped below this * lambda_max
  double psd_indefinite = 1e-6;    // lambda_min < -this * lambda_max is an error
  double symmetric = 1e-10;
  double lyapunov_residual = 1e-8;
  // Stability and balancing.
  double hurwitz_margin = 1e-10;   // Re(lambda) <= -margin * ||A||
  double minimality = 1e-12;       // Hankel values below this * sigma_1 are removed
  double degenerate_gap = 1e-8;    // sigma_k / sigma_{k+1} >= 1 + gap
};

inline constexpr Tolerances kDefaultTolerances{};

/// LU factorization with partial pivoting.
template <typename T>
class LuDecomposition {
 public:
  explicit LuDecomposition(BasicMatrix<T> a);
  BasicMatrix<T> solve(const BasicMatrix<T>& b) const;
  std::vector<T> solve(std::span<const T> b) const;
  std::size_t order() const { return lu_.rows(); }

 private:
  BasicMatrix<T> lu_;
  std::vector<std::size_t> perm_;
};

extern template class LuDecomposition<double>;
extern template class LuDecomposition<std::complex<double>>;

Matrix lu_solve(const Matrix& a, const Matrix& b);
ComplexMatrix lu_solve(const ComplexMatrix& a, const ComplexMatrix& b);
Vector lu_solve(const Matrix& a, std::span<const double> b);
Matrix inverse(const Matrix& a);

/// All eigenvalues of a real square matrix (Hessenberg reduction followed by
/// Francis double-shift QR). Complex pairs are returned adjacently.
std::vector<std::complex<double>> eigenvalues(const Matrix& a,
                                              const Tolerances& tol = kDefaultTolerances);

/// Largest real part among the eigenvalues of a.
double spectral_abscissa(const Matrix& a, const Tolerances& tol = kDefaultTolerances);

/// True when every eigenvalue has Re <= -margin * ||a||_inf.
bool is_hurwitz(const Matrix& a, const Tolerances& tol = kDefaultTolerances);

/// Throws NotHurwitzError naming `what` unless is_hurwitz(a).
void require_hurwitz(const Matrix& a, const char* what, const Tolerances& tol = kDefaultTolerances);

/// Thin singular value decomposition a = U diag(s) V^T with s descending.
struct SvdResult {
  Matrix u;  // rows(a) x min(rows, cols), orthonormal columns
  Vector s;
  Matrix v;  // cols(a) x min(rows, cols), orthonormal columns
};

/// One-sided (Hestenes) Jacobi SVD.
SvdResult svd(const Matrix& a, const Tolerances& tol = kDefaultTolerances);

/// Singular values of a complex matrix, descending.
Vector singular_values(const ComplexMatrix& a, const Tolerances& tol = kDefaultTolerances);

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues ascend; column j of `vectors` pairs with values[j].
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};
SymmetricEigen symmetric_eigen(const Matrix& a, const Tolerances& tol = kDefaultTolerances);

/// Returns L with full column rank such that L L^T approximates the
/// symmetric positive semidefinite matrix a. Eigen-directions below
/// drop * lambda_max are discarded.
Matrix symmetric_psd_sqrt_factor(const Matrix& a, double drop = kDefaultTolerances.psd_drop,
                                 const Tolerances& tol = kDefaultTolerances);

/// Solves A P + P A^T + Q = 0 for Hurwitz A and symmetric Q.
Matrix lyapunov_solve(const Matrix& a, const Matrix& q, const Tolerances& tol = kDefaultTolerances);

/// Frobenius norm of A P + P A^T + Q.
double lyapunov_residual(const Matrix& a, const Matrix& p, const Matrix& q);

/// Matrix exponential, scaling and squaring with a degree-6 diagonal Pade
/// approximant.
Matrix expm(const Matrix& a);

/// Kronecker product.
Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace qio
