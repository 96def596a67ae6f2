// Sparse linear algebra for the discretisations: CSR matrices, a direct banded
// LU (with reverse Cuthill-McKee reordering) and an ILU(0)-preconditioned
// BiCGSTAB, behind two entry points:
//   solve(A, b)      - general square systems (Newton Jacobians), residual
//                      contract ||Ax-b||_inf <= 1e-12 * max(1, ||b||_inf)
//   solve_spd(A, b)  - conjugate-gradient solve for SPD Gram systems to
//                      relative residual 1e-12
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pme/common.hpp"

namespace pme {

using Vector = std::vector<double>;

inline double norm_inf(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double norm_2(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// y += s * x
inline void axpy(double s, const Vector& x, Vector& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed-row sparse matrix with sorted, duplicate-free columns per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> trip) {
    for (const Triplet& t : trip)
      if (t.row >= rows || t.col >= cols)
        throw misuse_error("SparseMatrix::from_triplets: index out of range");
    SparseMatrix a;
    a.rows_ = rows;
    a.cols_ = cols;
    a.row_ptr_.assign(rows + 1, 0);
    std::sort(trip.begin(), trip.end(), [](const Triplet& l, const Triplet& r) {
      return l.row != r.row ? l.row < r.row : l.col < r.col;
    });
    a.col_.reserve(trip.size());
    a.val_.reserve(trip.size());
    for (std::size_t i = 0; i < trip.size();) {
      std::size_t j = i;
      double s = 0.0;
      while (j < trip.size() && trip[j].row == trip[i].row && trip[j].col == trip[i].col)
        s += trip[j++].value;
      a.col_.push_back(trip[i].col);
      a.val_.push_back(s);
      ++a.row_ptr_[trip[i].row + 1];
      i = j;
    }
    for (std::size_t r = 0; r < rows; ++r) a.row_ptr_[r + 1] += a.row_ptr_[r];
    return a;
  }

  static SparseMatrix diagonal(const Vector& d) {
    std::vector<Triplet> t;
    t.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
    return from_triplets(d.size(), d.size(), std::move(t));
  }

  static SparseMatrix identity(std::size_t n) { return diagonal(Vector(n, 1.0)); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return val_.size(); }
  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const { return col_; }
  const std::vector<double>& values() const { return val_; }
  std::vector<double>& values() { return val_; }

  double coeff(std::size_t i, std::size_t j) const {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      if (col_[p] == j) return val_[p];
    return 0.0;
  }

  void apply(const Vector& x, Vector& y) const {
    if (x.size() != cols_) throw misuse_error("SparseMatrix::apply: size mismatch");
    y.assign(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += val_[p] * x[col_[p]];
      y[i] = s;
    }
  }

  Vector apply(const Vector& x) const {
    Vector y;
    apply(x, y);
    return y;
  }

  /// Leading block with the first `r` rows and `c` columns.
  SparseMatrix top_left(std::size_t r, std::size_t c) const {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < std::min(r, rows_); ++i)
      for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
        if (col_[p] < c) t.push_back({i, col_[p], val_[p]});
    return from_triplets(r, c, std::move(t));
  }

  /// A * diag(s): scales column j by s[j]; the pattern is unchanged.
  SparseMatrix scaled_columns(const Vector& s) const {
    if (s.size() != cols_) throw misuse_error("scaled_columns: size mismatch");
    SparseMatrix a = *this;
    for (std::size_t p = 0; p < a.val_.size(); ++p) a.val_[p] *= s[a.col_[p]];
    return a;
  }

  /// A + diag(d); inserts missing diagonal entries.
  SparseMatrix plus_diagonal(const Vector& d) const {
    if (rows_ != cols_ || d.size() != rows_) throw misuse_error("plus_diagonal: size mismatch");
    std::vector<Triplet> t;
    t.reserve(nnz() + rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
        t.push_back({i, col_[p], val_[p]});
    for (std::size_t i = 0; i < rows_; ++i) t.push_back({i, i, d[i]});
    return from_triplets(rows_, cols_, std::move(t));
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_;
  std::vector<double> val_;
};

namespace detail {

/// Reverse Cuthill-McKee ordering of the symmetrised pattern; perm[new] = old.
inline std::vector<std::size_t> rcm_ordering(const SparseMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) {
      const std::size_t j = a.col_idx()[p];
      if (j != i) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
    }
  for (auto& l : adj) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> queue;
  auto degree_less = [&](std::size_t l, std::size_t r) {
    return adj[l].size() != adj[r].size() ? adj[l].size() < adj[r].size() : l < r;
  };
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    // pick the minimum-degree node of this component as BFS root
    std::size_t root = start;
    {
      std::vector<std::size_t> comp{start};
      std::vector<char> mark(n, 0);
      mark[start] = 1;
      for (std::size_t q = 0; q < comp.size(); ++q)
        for (std::size_t j : adj[comp[q]])
          if (!mark[j] && !seen[j]) {
            mark[j] = 1;
            comp.push_back(j);
          }
      root = *std::min_element(comp.begin(), comp.end(), degree_less);
    }
    queue.assign(1, root);
    seen[root] = 1;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t u = queue[q];
      order.push_back(u);
      std::vector<std::size_t> next;
      for (std::size_t j : adj[u])
        if (!seen[j]) {
          seen[j] = 1;
          next.push_back(j);
        }
      std::sort(next.begin(), next.end(), degree_less);
      queue.insert(queue.end(), next.begin(), next.end());
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

inline SparseMatrix permute_symmetric(const SparseMatrix& a, const std::vector<std::size_t>& perm,
                                      std::vector<std::size_t>& inv) {
  const std::size_t n = a.rows();
  inv.assign(n, 0);
  for (std::size_t k = 0; k < n; ++k) inv[perm[k]] = k;
  std::vector<Triplet> t;
  t.reserve(a.nnz());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
      t.push_back({inv[i], inv[a.col_idx()[p]], a.values()[p]});
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

}  // namespace detail

/// Banded LU factorisation with partial pivoting after an RCM reordering.
/// Factor once, solve many right-hand sides; throws solver_error on singularity.
class BandLU {
 public:
  explicit BandLU(const SparseMatrix& a) {
    if (a.rows() != a.cols()) throw misuse_error("BandLU: matrix must be square");
    n_ = a.rows();
    if (n_ == 0) return;
    perm_ = detail::rcm_ordering(a);
    SparseMatrix ap = detail::permute_symmetric(a, perm_, inv_);
    std::size_t band = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t p = ap.row_ptr()[i]; p < ap.row_ptr()[i + 1]; ++p) {
        const std::size_t j = ap.col_idx()[p];
        band = std::max(band, i > j ? i - j : j - i);
      }
    kl_ = ku_ = band;
    ldab_ = 2 * kl_ + ku_ + 1;
    ab_.assign(ldab_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t p = ap.row_ptr()[i]; p < ap.row_ptr()[i + 1]; ++p)
        at(i, ap.col_idx()[p]) = ap.values()[p];
    factorize();
  }

  std::size_t bandwidth() const { return kl_; }

  Vector solve(const Vector& b) const {
    if (b.size() != n_) throw misuse_error("BandLU::solve: size mismatch");
    Vector y(n_);
    for (std::size_t i = 0; i < n_; ++i) y[i] = b[perm_[i]];
    // forward elimination with the recorded row interchanges
    for (std::size_t j = 0; j < n_; ++j) {
      if (ipiv_[j] != j) std::swap(y[j], y[ipiv_[j]]);
      const std::size_t iend = std::min(n_ - 1, j + kl_);
      for (std::size_t i = j + 1; i <= iend; ++i) y[i] -= cat(i, j) * y[j];
    }
    // back substitution (upper bandwidth ku + kl after pivoting)
    for (std::size_t jj = n_; jj-- > 0;) {
      y[jj] /= cat(jj, jj);
      const std::size_t top = jj > ku_ + kl_ ? jj - (ku_ + kl_) : 0;
      for (std::size_t i = top; i < jj; ++i) y[i] -= cat(i, jj) * y[jj];
    }
    Vector x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[perm_[i]] = y[i];
    return x;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return ab_[j * ldab_ + (kl_ + ku_ + i - j)]; }
  double cat(std::size_t i, std::size_t j) const { return ab_[j * ldab_ + (kl_ + ku_ + i - j)]; }

  void factorize() {
    ipiv_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      const std::size_t km = std::min(kl_, n_ - 1 - j);
      std::size_t jp = j;
      double pmax = std::abs(cat(j, j));
      for (std::size_t i = j + 1; i <= j + km; ++i)
        if (std::abs(cat(i, j)) > pmax) {
          pmax = std::abs(cat(i, j));
          jp = i;
        }
      ipiv_[j] = jp;
      if (pmax == 0.0) throw solver_error("BandLU: matrix is singular");
      const std::size_t cend = std::min(n_ - 1, j + ku_ + kl_);
      if (jp != j)
        for (std::size_t c = j; c <= cend; ++c) std::swap(at(j, c), at(jp, c));
      const double piv = cat(j, j);
      for (std::size_t i = j + 1; i <= j + km; ++i) at(i, j) /= piv;
      for (std::size_t c = j + 1; c <= cend; ++c) {
        const double u = cat(j, c);
        if (u == 0.0) continue;
        for (std::size_t i = j + 1; i <= j + km; ++i) at(i, c) -= cat(i, j) * u;
      }
    }
  }

  std::size_t n_ = 0, kl_ = 0, ku_ = 0, ldab_ = 1;
  std::vector<double> ab_;
  std::vector<std::size_t> ipiv_, perm_, inv_;
};

namespace detail {

/// ILU(0): incomplete LU on the unchanged sparsity pattern (rows must hold
/// their diagonal). Used only as a BiCGSTAB preconditioner.
class ILU0 {
 public:
  explicit ILU0(const SparseMatrix& a) : a_(&a), lu_(a.values()) {
    const std::size_t n = a.rows();
    diag_.assign(n, npos);
    const auto& rp = a.row_ptr();
    const auto& ci = a.col_idx();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t p = rp[i]; p < rp[i + 1]; ++p)
        if (ci[p] == i) diag_[i] = p;
    for (std::size_t i = 0; i < n; ++i)
      if (diag_[i] == npos) throw solver_error("ILU0: empty diagonal entry");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t p = rp[i]; p < rp[i + 1] && ci[p] < i; ++p) {
        const std::size_t k = ci[p];
        double piv = lu_[diag_[k]];
        if (std::abs(piv) < 1e-300) piv = piv < 0 ? -1e-300 : 1e-300;
        const double lik = lu_[p] / piv;
        lu_[p] = lik;
        // subtract lik * (row k, columns > k) from row i on the shared pattern
        std::size_t q = diag_[k] + 1;
        std::size_t r = p + 1;
        while (q < rp[k + 1] && r < rp[i + 1]) {
          if (ci[q] < ci[r])
            ++q;
          else if (ci[q] > ci[r])
            ++r;
          else
            lu_[r++] -= lik * lu_[q++];
        }
      }
    }
  }

  void apply(const Vector& z, Vector& out) const {
    const std::size_t n = a_->rows();
    const auto& rp = a_->row_ptr();
    const auto& ci = a_->col_idx();
    out = z;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t p = rp[i]; p < rp[i + 1] && ci[p] < i; ++p) out[i] -= lu_[p] * out[ci[p]];
    for (std::size_t ii = n; ii-- > 0;) {
      for (std::size_t p = diag_[ii] + 1; p < rp[ii + 1]; ++p) out[ii] -= lu_[p] * out[ci[p]];
      double piv = lu_[diag_[ii]];
      if (std::abs(piv) < 1e-300) piv = piv < 0 ? -1e-300 : 1e-300;
      out[ii] /= piv;
    }
  }

 private:
  const SparseMatrix* a_;
  std::vector<double> lu_;
  std::vector<std::size_t> diag_;
};

/// Preconditioned BiCGSTAB; returns true when ||b - A x||_2 <= target was reached.
inline bool bicgstab(const SparseMatrix& a, const ILU0& prec, const Vector& b, Vector& x,
                     double target, std::size_t max_iter) {
  const std::size_t n = b.size();
  x.assign(n, 0.0);
  Vector r = b;
  if (norm_2(r) <= target) return true;
  const Vector rhat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  Vector v(n, 0.0), p(n, 0.0), phat(n), s(n), shat(n), t(n);
  double best = norm_2(r);
  std::size_t since_best = 0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const double rho_new = dot(rhat, r);
    if (std::abs(rho_new) < 1e-300) return false;  // breakdown
    const double beta = (rho_new / rho) * (alpha / omega);
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    prec.apply(p, phat);
    a.apply(phat, v);
    const double rv = dot(rhat, v);
    if (std::abs(rv) < 1e-300) return false;
    alpha = rho_new / rv;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm_2(s) <= target) {
      axpy(alpha, phat, x);
      return true;
    }
    prec.apply(s, shat);
    a.apply(shat, t);
    const double tt = dot(t, t);
    if (tt < 1e-300) return false;
    omega = dot(t, s) / tt;
    if (std::abs(omega) < 1e-300) return false;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * phat[i] + omega * shat[i];
      r[i] = s[i] - omega * t[i];
    }
    const double rn = norm_2(r);
    if (rn <= target) return true;
    if (rn < 0.9 * best) {
      best = rn;
      since_best = 0;
    } else if (++since_best > 80) {
      return false;  // stagnation
    }
    rho = rho_new;
  }
  return false;
}

inline double solve_contract(const Vector& b) { return 1e-12 * std::max(1.0, norm_inf(b)); }

inline bool contract_ok(const SparseMatrix& a, const Vector& x, const Vector& b, double bound) {
  Vector r = a.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return norm_inf(r) <= bound;
}

}  // namespace detail

struct SolveOptions {
  std::size_t direct_threshold = 64;  ///< below this size go straight to banded LU
  std::size_t max_krylov = 600;
  bool allow_iterative = true;
};

/// General square solve meeting ||Ax-b||_inf <= 1e-12 * max(1, ||b||_inf).
/// ILU(0)-BiCGSTAB first (large systems), banded LU with iterative refinement
/// as the robust path; throws solver_error when the contract cannot be met.
inline Vector solve(const SparseMatrix& a, const Vector& b, const SolveOptions& opts = {}) {
  if (a.rows() != a.cols()) throw misuse_error("solve: matrix must be square");
  if (b.size() != a.rows()) throw misuse_error("solve: right-hand side size mismatch");
  const std::size_t n = a.rows();
  if (n == 0) return {};
  const double bound = detail::solve_contract(b);

  if (opts.allow_iterative && n > opts.direct_threshold) {
    bool usable = true;
    Vector x(n, 0.0), r = b, dx;
    try {
      const detail::ILU0 prec(a);
      for (int pass = 0; pass < 3 && usable; ++pass) {
        if (norm_inf(r) <= bound) return x;
        usable = detail::bicgstab(a, prec, r, dx, 0.25 * bound, opts.max_krylov);
        if (!usable) break;
        axpy(1.0, dx, x);
        r = a.apply(x);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
      }
      if (usable && norm_inf(r) <= bound) return x;
    } catch (const solver_error&) {
      // fall through to the direct path
    }
  }

  BandLU lu(a);
  Vector x = lu.solve(b);
  for (int pass = 0; pass < 10; ++pass) {
    Vector r = a.apply(x);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    if (norm_inf(r) <= bound) return x;
    Vector dx = lu.solve(r);
    axpy(1.0, dx, x);
  }
  if (detail::contract_ok(a, x, b, bound)) return x;
  throw solver_error("solve: residual contract not met after iterative refinement");
}

/// Jacobi-preconditioned conjugate gradients to relative residual 1e-12.
/// Detects indefiniteness through the conjugate-direction curvature.
inline Vector solve_spd(const SparseMatrix& a, const Vector& b, double rel_tol = 1e-12) {
  if (a.rows() != a.cols()) throw misuse_error("solve_spd: matrix must be square");
  if (b.size() != a.rows()) throw misuse_error("solve_spd: right-hand side size mismatch");
  const std::size_t n = a.rows();
  if (n == 0) return {};
  const double bnorm = norm_2(b);
  Vector x(n, 0.0);
  if (bnorm == 0.0) return x;

  Vector dinv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.coeff(i, i);
    if (d <= 0.0) throw solver_error("solve_spd: matrix is not symmetric positive definite");
    dinv[i] = 1.0 / d;
  }

  const double target = rel_tol * bnorm;
  const std::size_t max_iter = 40 * n + 1000;
  for (int pass = 0; pass < 4; ++pass) {
    Vector r = a.apply(x);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    if (norm_2(r) <= target) return x;
    Vector z(n), q(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    Vector p = z;
    double rz = dot(r, z);
    bool improved = false;
    for (std::size_t it = 0; it < max_iter; ++it) {
      a.apply(p, q);
      const double pq = dot(p, q);
      if (pq <= 0.0)
        throw solver_error("solve_spd: matrix is not symmetric positive definite");
      const double alpha = rz / pq;
      axpy(alpha, p, x);
      axpy(-alpha, q, r);
      improved = true;
      if (norm_2(r) <= 0.5 * target) break;
      for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (!improved) break;
  }
  Vector r = a.apply(x);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  if (norm_2(r) <= target) return x;
  throw solver_error("solve_spd: conjugate gradients did not reach the residual target");
}

}  // namespace pme
