// Test-side dense linear algebra oracles: Gaussian elimination with partial
// pivoting, Cholesky factorization, and a Jacobi eigensolver for symmetric
// matrices. Deliberately independent of the library's sparse solvers so the
// two implementations can check each other.

#ifndef PME_TESTS_SUPPORT_DENSE_HPP
#define PME_TESTS_SUPPORT_DENSE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace test_support {

class DenseMatrix {
 public:
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> a_;
};

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(DenseMatrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw std::invalid_argument("dense_solve: shape mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) < 1e-300) throw std::runtime_error("dense_solve: singular matrix");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * x[j];
    x[k] = s / a(k, k);
  }
  return x;
}

/// Cholesky factor L (lower triangular, A = L L^T); throws if A is not
/// symmetric positive definite to working precision.
inline DenseMatrix dense_cholesky(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("dense_cholesky: not square");
  DenseMatrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(s > 0.0)) throw std::runtime_error("dense_cholesky: not positive definite");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

/// Solves L L^T x = b given the Cholesky factor.
inline std::vector<double> cholesky_solve(const DenseMatrix& l, std::vector<double> b) {
  const std::size_t n = l.rows();
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

/// All eigenvalues of a symmetric matrix by the cyclic Jacobi method,
/// returned in ascending order.
inline std::vector<double> jacobi_eigenvalues(DenseMatrix a, std::size_t max_sweeps = 100) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("jacobi_eigenvalues: not square");
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-28) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
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
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

/// Largest eigenvalue of the symmetric generalized problem M v = lambda K v
/// with K positive definite, via L^{-1} M L^{-T} where K = L L^T.
inline double generalized_max_eigenvalue(const DenseMatrix& m, const DenseMatrix& k) {
  const std::size_t n = m.rows();
  const DenseMatrix l = dense_cholesky(k);
  // columns of L^{-T}: solve L L^T z = e_j gives K^{-1} e_j; instead build
  // B = L^{-1} M L^{-T} column by column.
  DenseMatrix b(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    // y = L^{-T} e_j: solve L^T y = e_j (back substitution)
    std::vector<double> y(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
      double s = (i == j) ? 1.0 : 0.0;
      for (std::size_t kk = i + 1; kk < n; ++kk) s -= l(kk, i) * y[kk];
      y[i] = s / l(i, i);
    }
    std::vector<double> my = m.apply(y);
    // column j of B = L^{-1} (M y) (forward substitution)
    std::vector<double> col(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = my[i];
      for (std::size_t kk = 0; kk < i; ++kk) s -= l(i, kk) * col[kk];
      col[i] = s / l(i, i);
    }
    for (std::size_t i = 0; i < n; ++i) b(i, j) = col[i];
  }
  // symmetrize against roundoff before the Jacobi sweep
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (b(i, j) + b(j, i));
      b(i, j) = b(j, i) = avg;
    }
  std::vector<double> eig = jacobi_eigenvalues(b);
  return eig.back();
}

}  // namespace test_support

#endif  // PME_TESTS_SUPPORT_DENSE_HPP
