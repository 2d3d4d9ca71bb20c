#include "qio/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qio {

// ---------------------------------------------------------------------------
// LU

template <typename T>
LuDecomposition<T>::LuDecomposition(BasicMatrix<T> a) : lu_(std::move(a)) {
  if (!lu_.is_square()) throw DimensionError("LU factorization requires a square matrix");
  const std::size_t n = lu_.rows();
  perm_.resize(n);
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const double scale = max_abs(lu_);
  const double tiny = std::numeric_limits<double>::epsilon() * static_cast<double>(n) * scale;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best <= tiny || best == 0.0) {
      throw SingularMatrixError("matrix is singular to working precision (pivot " +
                                std::to_string(k) + ")");
    }
    if (piv != k) {
      std::swap(perm_[k], perm_[piv]);
      auto rk = lu_.row(k);
      auto rp = lu_.row(piv);
      std::swap_ranges(rk.begin(), rk.end(), rp.begin());
    }
    const T pivot = lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const T f = lu_(i, k) / pivot;
      lu_(i, k) = f;
      if (f == T{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
}

template <typename T>
std::vector<T> LuDecomposition<T>::solve(std::span<const T> b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw DimensionError("LU solve: right-hand side length mismatch");
  std::vector<T> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) {
    T acc = x[i];
    for (std::size_t j = 0; j < i; ++j) acc -= lu_(i, j) * x[j];
    x[i] = acc;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    T acc = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= lu_(ii, j) * x[j];
    x[ii] = acc / lu_(ii, ii);
  }
  return x;
}

template <typename T>
BasicMatrix<T> LuDecomposition<T>::solve(const BasicMatrix<T>& b) const {
  if (b.rows() != lu_.rows()) throw DimensionError("LU solve: right-hand side rows mismatch");
  BasicMatrix<T> x(b.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    const auto col = b.col(j);
    const auto sol = solve(std::span<const T>(col));
    for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = sol[i];
  }
  return x;
}

template class LuDecomposition<double>;
template class LuDecomposition<std::complex<double>>;

Matrix lu_solve(const Matrix& a, const Matrix& b) { return LuDecomposition<double>(a).solve(b); }

ComplexMatrix lu_solve(const ComplexMatrix& a, const ComplexMatrix& b) {
  return LuDecomposition<std::complex<double>>(a).solve(b);
}

Vector lu_solve(const Matrix& a, std::span<const double> b) {
  return LuDecomposition<double>(a).solve(b);
}

Matrix inverse(const Matrix& a) { return lu_solve(a, Matrix::identity(a.rows())); }

// ---------------------------------------------------------------------------
// Eigenvalues

namespace {

Matrix hessenberg(Matrix h) {
  const std::size_t n = h.rows();
  if (n < 3) return h;
  std::vector<double> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha += h(i, k) * h(i, k);
    alpha = std::sqrt(alpha);
    if (alpha == 0.0) continue;
    if (h(k + 1, k) > 0) alpha = -alpha;
    double vnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = h(i, k);
      if (i == k + 1) v[i] -= alpha;
      vnorm += v[i] * v[i];
    }
    if (vnorm == 0.0) continue;
    vnorm = std::sqrt(vnorm);
    for (std::size_t i = k + 1; i < n; ++i) v[i] /= vnorm;
    // H <- (I - 2vv^T) H
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) dot += v[i] * h(i, j);
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= 2.0 * v[i] * dot;
    }
    // H <- H (I - 2vv^T)
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) dot += h(i, j) * v[j];
      for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= 2.0 * dot * v[j];
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
  return h;
}

double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Matrix& a_in, const Tolerances& tol) {
  if (!a_in.is_square()) throw DimensionError("eigenvalues require a square matrix");
  const int n = static_cast<int>(a_in.rows());
  std::vector<std::complex<double>> out;
  if (n == 0) return out;
  if (!all_finite(a_in)) throw ConvergenceError("eigenvalues: non-finite input", 0);
  Matrix h = hessenberg(a_in);
  // Francis double-shift QR on the upper Hessenberg matrix; 1-based indexing
  // below mirrors the classic formulation.
  auto a = [&h](int i, int j) -> double& { return h(i - 1, j - 1); };
  std::vector<double> wr(n + 1), wi(n + 1);
  const double eps = tol.eig_convergence;
  double anorm = 0.0;
  for (int i = 1; i <= n; ++i)
    for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(a(i, j));
  int nn = n;
  double t = 0.0;
  int total_iterations = 0;
  while (nn >= 1) {
    int its = 0;
    int l;
    do {
      for (l = nn; l >= 2; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn--] = 0.0;
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          double p = 0.5 * (y - x);
          double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = -(wi[nn] = z);
          }
          nn -= 2;
        } else {
          if (its >= tol.eig_max_iterations) {
            throw ConvergenceError("QR eigenvalue iteration did not converge", total_iterations);
          }
          if (its > 0 && its % 10 == 0) {
            // Exceptional shift.
            t += x;
            for (int i = 1; i <= nn; ++i) a(i, i) -= x;
            double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          ++total_iterations;
          int m;
          double p = 0, q = 0, r = 0, z;
          for (m = nn - 2; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                      std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = a(k + 2, k - 1);
              if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k != nn - 1) {
                  p += r * a(k + 2, j);
                  a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k != nn - 1) {
                  p += z * a(i, k + 2);
                  a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  out.reserve(n);
  for (int i = 1; i <= n; ++i) out.emplace_back(wr[i], wi[i]);
  return out;
}

double spectral_abscissa(const Matrix& a, const Tolerances& tol) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& ev : eigenvalues(a, tol)) best = std::max(best, ev.real());
  return best;
}

bool is_hurwitz(const Matrix& a, const Tolerances& tol) {
  if (a.rows() == 0) return true;
  return spectral_abscissa(a, tol) <= -tol.hurwitz_margin * inf_norm(a);
}

void require_hurwitz(const Matrix& a, const char* what, const Tolerances& tol) {
  if (a.rows() == 0) return;
  const double abscissa = spectral_abscissa(a, tol);
  if (abscissa > -tol.hurwitz_margin * inf_norm(a)) {
    throw NotHurwitzError(std::string(what) + " is not Hurwitz (max real part " +
                              std::to_string(abscissa) + ")",
                          abscissa);
  }
}

// ---------------------------------------------------------------------------
// SVD

namespace {

// Extends the first `filled` orthonormal rows of `basis` (each of length m)
// to `count` orthonormal rows by Gram-Schmidt over the unit vectors.
void complete_orthonormal_rows(Matrix& basis, std::size_t filled, std::size_t count) {
  const std::size_t m = basis.cols();
  std::size_t next_unit = 0;
  for (std::size_t r = filled; r < count; ++r) {
    while (next_unit < m) {
      std::vector<double> cand(m, 0.0);
      cand[next_unit++] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t q = 0; q < r; ++q) {
          double dot = 0.0;
          for (std::size_t i = 0; i < m; ++i) dot += basis(q, i) * cand[i];
          for (std::size_t i = 0; i < m; ++i) cand[i] -= dot * basis(q, i);
        }
      }
      const double nrm = norm2(cand);
      if (nrm > 1e-8) {
        for (std::size_t i = 0; i < m; ++i) basis(r, i) = cand[i] / nrm;
        break;
      }
    }
  }
}

}  // namespace

SvdResult svd(const Matrix& a, const Tolerances& tol) {
  if (a.rows() < a.cols()) {
    SvdResult t = svd(a.transpose(), tol);
    return {std::move(t.v), std::move(t.s), std::move(t.u)};
  }
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  // Rows of `w` are the working columns of A; rows of `vt` are columns of V.
  Matrix w = a.transpose();
  Matrix vt = Matrix::identity(n);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < tol.svd_max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        auto wp = w.row(p);
        auto wq = w.row(q);
        for (std::size_t i = 0; i < m; ++i) {
          alpha += wp[i] * wp[i];
          beta += wq[i] * wq[i];
          gamma += wp[i] * wq[i];
        }
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = sign_of(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double up = wp[i], uq = wq[i];
          wp[i] = c * up - s * uq;
          wq[i] = s * up + c * uq;
        }
        auto vp = vt.row(p);
        auto vq = vt.row(q);
        for (std::size_t i = 0; i < n; ++i) {
          const double up = vp[i], uq = vq[i];
          vp[i] = c * up - s * uq;
          vq[i] = s * up + c * uq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(w.row(j));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  SvdResult out;
  out.s.resize(n);
  Matrix ut(n, m);
  Matrix vsorted(n, n);
  const double smax = n > 0 ? sigma[order[0]] : 0.0;
  std::size_t nonzero = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.s[k] = sigma[j];
    for (std::size_t i = 0; i < n; ++i) vsorted(k, i) = vt(j, i);
    if (sigma[j] > eps * smax * static_cast<double>(m) && sigma[j] > 0.0) {
      for (std::size_t i = 0; i < m; ++i) ut(k, i) = w(j, i) / sigma[j];
      ++nonzero;
    }
  }
  complete_orthonormal_rows(ut, nonzero, n);
  out.u = ut.transpose();
  out.v = vsorted.transpose();
  return out;
}

Vector singular_values(const ComplexMatrix& a, const Tolerances& tol) {
  const std::size_t m = a.rows(), n = a.cols();
  // Real embedding [[Re, -Im], [Im, Re]] doubles each singular value.
  Matrix e(2 * m, 2 * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto v = a(i, j);
      e(i, j) = v.real();
      e(i, j + n) = -v.imag();
      e(i + m, j) = v.imag();
      e(i + m, j + n) = v.real();
    }
  }
  const auto r = svd(e, tol);
  Vector s;
  s.reserve(std::min(m, n));
  for (std::size_t k = 0; k < r.s.size(); k += 2) s.push_back(r.s[k]);
  return s;
}

// ---------------------------------------------------------------------------
// Symmetric eigen-decomposition

SymmetricEigen symmetric_eigen(const Matrix& a_in, const Tolerances& tol) {
  if (!a_in.is_square()) throw DimensionError("symmetric_eigen requires a square matrix");
  const std::size_t n = a_in.rows();
  Matrix a = a_in;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
  Matrix v = Matrix::identity(n);
  const double total = frobenius_norm(a);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < tol.jacobi_max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= eps * total || off == 0.0) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= eps * eps * total) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = sign_of(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

Matrix symmetric_psd_sqrt_factor(const Matrix& a, double drop, const Tolerances& tol) {
  if (!a.is_square()) throw DimensionError("square-root factor requires a square matrix");
  const std::size_t n = a.rows();
  const double scale = std::max(1.0, max_abs(a));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol.symmetric * scale)
        throw DimensionError("square-root factor requires a symmetric matrix");
  const auto eig = symmetric_eigen(a, tol);
  if (n == 0) return Matrix(0, 0);
  const double lmax = eig.values.back();
  if (lmax <= 0.0) {
    if (eig.values.front() < -tol.psd_indefinite * scale)
      throw IndefiniteError("matrix is negative definite");
    return Matrix(n, 0);
  }
  if (eig.values.front() < -tol.psd_indefinite * lmax)
    throw IndefiniteError("matrix is significantly indefinite (lambda_min = " +
                          std::to_string(eig.values.front()) + ")");
  std::vector<std::size_t> keep;
  for (std::size_t k = n; k-- > 0;)
    if (eig.values[k] > drop * lmax) keep.push_back(k);
  Matrix l(n, keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const double root = std::sqrt(eig.values[keep[c]]);
    for (std::size_t i = 0; i < n; ++i) l(i, c) = eig.vectors(i, keep[c]) * root;
  }
  return l;
}

// ---------------------------------------------------------------------------
// Lyapunov

double lyapunov_residual(const Matrix& a, const Matrix& p, const Matrix& q) {
  return frobenius_norm(a * p + p * a.transpose() + q);
}

Matrix lyapunov_solve(const Matrix& a, const Matrix& q, const Tolerances& tol) {
  if (!a.is_square() || !q.is_square() || a.rows() != q.rows())
    throw DimensionError("lyapunov_solve: A and Q must be square and conformable");
  const std::size_t n = a.rows();
  if (n == 0) return Matrix(0, 0);
  require_hurwitz(a, "Lyapunov operator", tol);
  const std::size_t nn = n * n;
  // Row-major vectorization: unknown (i, j) sits at i * n + j.
  Matrix k(nn, nn);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = i * n + j;
      for (std::size_t m = 0; m < n; ++m) {
        k(row, m * n + j) += a(i, m);
        k(row, i * n + m) += a(j, m);
      }
    }
  }
  std::vector<double> rhs(nn);
  for (std::size_t idx = 0; idx < nn; ++idx) rhs[idx] = -q.data()[idx];
  const auto sol = lu_solve(k, rhs);
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p(i, j) = 0.5 * (sol[i * n + j] + sol[j * n + i]);
  const double qn = frobenius_norm(q);
  const double res = lyapunov_residual(a, p, q);
  if (res > tol.lyapunov_residual * std::max(qn, std::numeric_limits<double>::min())) {
    if (qn == 0.0 && res == 0.0) return p;
    throw ResidualError("Lyapunov residual " + std::to_string(res) + " exceeds tolerance");
  }
  return p;
}

// ---------------------------------------------------------------------------
// Matrix exponential

Matrix expm(const Matrix& a) {
  if (!a.is_square()) throw DimensionError("expm requires a square matrix");
  const std::size_t n = a.rows();
  const double norm = one_norm(a);
  if (!std::isfinite(norm)) throw OverflowError("expm: non-finite matrix norm");
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  if (squarings > 1000) throw OverflowError("expm: norm too large for scaling and squaring");
  const Matrix as = a * std::ldexp(1.0, -squarings);
  constexpr int kOrder = 6;
  double c = 1.0;
  Matrix power = Matrix::identity(n);
  Matrix num = Matrix::identity(n);
  Matrix den = Matrix::identity(n);
  for (int k = 1; k <= kOrder; ++k) {
    c *= static_cast<double>(kOrder - k + 1) / static_cast<double>(k * (2 * kOrder - k + 1));
    power = as * power;
    num += power * c;
    den += power * ((k % 2 == 0) ? c : -c);
  }
  Matrix e = lu_solve(den, num);
  for (int s = 0; s < squarings; ++s) e = e * e;
  if (!all_finite(e)) throw OverflowError("expm: result overflowed");
  return e;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
  return k;
}

}  // namespace qio
