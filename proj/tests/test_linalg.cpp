// Sparse matrix and linear solver tests, checked against independent dense
// factorizations from tests/support/dense.hpp.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pme/linalg.hpp"
#include "support/dense.hpp"

using pme::SparseMatrix;
using pme::Triplet;
using pme::Vector;
using test_support::DenseMatrix;

namespace {

// deterministic pseudo-random stream for reproducible matrices
struct Lcg {
  std::uint64_t state;
  explicit Lcg(std::uint64_t seed) : state(seed) {}
  double unit() {  // in [0, 1)
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return double(state >> 11) / 9007199254740992.0;
  }
  double symmetric() { return 2.0 * unit() - 1.0; }
};

// random sparse strictly diagonally dominant matrix plus its dense mirror
std::pair<SparseMatrix, DenseMatrix> random_dominant(std::size_t n, std::uint64_t seed) {
  Lcg rng(seed);
  std::vector<Triplet> trips;
  DenseMatrix dense(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int k = 0; k < 4; ++k) {
      const std::size_t j = std::size_t(rng.unit() * double(n));
      if (j == i || j >= n) continue;
      const double v = rng.symmetric();
      trips.push_back({i, j, v});
      dense(i, j) += v;
      row_sum += std::abs(v);
    }
    const double d = row_sum + 1.0 + rng.unit();
    trips.push_back({i, i, d});
    dense(i, i) += d;
  }
  return {SparseMatrix::from_triplets(n, n, std::move(trips)), std::move(dense)};
}

// graph Laplacian of a cycle plus identity: sparse SPD with known structure
std::pair<SparseMatrix, DenseMatrix> cycle_laplacian(std::size_t n) {
  std::vector<Triplet> trips;
  DenseMatrix dense(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    trips.push_back({i, i, 3.0});
    dense(i, i) += 3.0;
    trips.push_back({i, j, -1.0});
    trips.push_back({j, i, -1.0});
    dense(i, j) += -1.0;
    dense(j, i) += -1.0;
  }
  return {SparseMatrix::from_triplets(n, n, std::move(trips)), std::move(dense)};
}

double max_abs_diff(const Vector& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("triplet assembly sums duplicates and sorts columns") {
  std::vector<Triplet> trips = {{0, 1, 2.0}, {0, 1, 3.0}, {1, 0, -1.0}, {0, 0, 1.0}};
  SparseMatrix a = SparseMatrix::from_triplets(2, 2, trips);
  CHECK(a.coeff(0, 0) == 1.0);
  CHECK(a.coeff(0, 1) == 5.0);
  CHECK(a.coeff(1, 0) == -1.0);
  CHECK(a.coeff(1, 1) == 0.0);
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), pme::misuse_error);
}

TEST_CASE("apply matches a dense mirror") {
  auto [a, dense] = random_dominant(17, 42);
  Lcg rng(7);
  Vector x(17);
  for (double& v : x) v = rng.symmetric();
  const Vector y = a.apply(x);
  const std::vector<double> yd = dense.apply(x);
  CHECK(max_abs_diff(y, yd) < 1e-13);
}

TEST_CASE("diagonal, identity, scaled_columns, plus_diagonal, top_left") {
  SparseMatrix d = SparseMatrix::diagonal({2.0, 3.0});
  CHECK(d.coeff(0, 0) == 2.0);
  CHECK(d.coeff(1, 1) == 3.0);
  CHECK(SparseMatrix::identity(3).coeff(2, 2) == 1.0);

  SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 1, 3.0}});
  SparseMatrix s = a.scaled_columns({10.0, 100.0});
  CHECK(s.coeff(0, 0) == 10.0);
  CHECK(s.coeff(0, 1) == 200.0);
  CHECK(s.coeff(1, 1) == 300.0);

  SparseMatrix p = a.plus_diagonal({5.0, 5.0});
  CHECK(p.coeff(0, 0) == 6.0);
  CHECK(p.coeff(1, 1) == 8.0);
  CHECK(p.coeff(0, 1) == 2.0);

  SparseMatrix t = a.top_left(1, 2);
  CHECK(t.rows() == 1);
  CHECK(t.cols() == 2);
  CHECK(t.coeff(0, 1) == 2.0);
}

TEST_CASE("direct solve matches dense elimination on small systems") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    auto [a, dense] = random_dominant(40, seed);
    Lcg rng(seed * 97);
    Vector b(40);
    for (double& v : b) v = rng.symmetric();
    const Vector x = pme::solve(a, b);
    const std::vector<double> xd = test_support::dense_solve(dense, b);
    CHECK(max_abs_diff(x, xd) < 1e-9);
    Vector r = a.apply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    CHECK(pme::norm_inf(r) <= 1e-12 * std::max(1.0, pme::norm_inf(b)));
  }
}

TEST_CASE("iterative solve meets the residual contract on larger systems") {
  auto [a, dense] = random_dominant(300, 11);
  Lcg rng(13);
  Vector b(300);
  for (double& v : b) v = rng.symmetric();
  const Vector x = pme::solve(a, b);
  Vector r = a.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  CHECK(pme::norm_inf(r) <= 1e-12 * std::max(1.0, pme::norm_inf(b)));
  const std::vector<double> xd = test_support::dense_solve(dense, b);
  CHECK(max_abs_diff(x, xd) < 1e-8);
}

TEST_CASE("banded factorization solves repeated right-hand sides") {
  auto [a, dense] = cycle_laplacian(25);
  pme::BandLU lu(a);
  for (std::uint64_t seed : {5ull, 6ull}) {
    Lcg rng(seed);
    Vector b(25);
    for (double& v : b) v = rng.symmetric();
    const Vector x = lu.solve(b);
    const std::vector<double> xd = test_support::dense_solve(dense, b);
    CHECK(max_abs_diff(x, xd) < 1e-10);
  }
}

TEST_CASE("reordering recovers a narrow band on a shuffled path graph") {
  // path graph 0-1-...-n-1 with vertices renumbered by a stride permutation:
  // the natural numbering has bandwidth ~n/2, the reordered factor should be
  // narrow again.
  const std::size_t n = 64;
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = (i * 37) % n;
  std::vector<Triplet> trips;
  for (std::size_t i = 0; i < n; ++i) trips.push_back({perm[i], perm[i], 2.1});
  for (std::size_t i = 0; i + 1 < n; ++i) {
    trips.push_back({perm[i], perm[i + 1], -1.0});
    trips.push_back({perm[i + 1], perm[i], -1.0});
  }
  SparseMatrix a = SparseMatrix::from_triplets(n, n, std::move(trips));
  pme::BandLU lu(a);
  CHECK(lu.bandwidth() <= 2);
  Vector b(n, 1.0);
  const Vector x = lu.solve(b);
  Vector r = a.apply(x);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  CHECK(pme::norm_inf(r) < 1e-10);
}

TEST_CASE("symmetric positive definite solve matches a dense factorization") {
  auto [a, dense] = cycle_laplacian(120);
  Lcg rng(21);
  Vector b(120);
  for (double& v : b) v = rng.symmetric();
  const Vector x = pme::solve_spd(a, b);
  const DenseMatrix l = test_support::dense_cholesky(dense);
  const std::vector<double> xd = test_support::cholesky_solve(l, b);
  CHECK(max_abs_diff(x, xd) < 1e-9);
}

TEST_CASE("solver failure modes raise typed errors") {
  // exactly singular: second row is zero
  SparseMatrix s = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, 1.0}});
  CHECK_THROWS_AS(pme::solve(s, {1.0, 1.0}), pme::solver_error);
  // indefinite matrix rejected by the positive definite path
  SparseMatrix ind = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, -1.0}});
  CHECK_THROWS_AS(pme::solve_spd(ind, {1.0, 1.0}), pme::solver_error);
  // shape misuse
  SparseMatrix rect = SparseMatrix::from_triplets(2, 3, {{0, 0, 1.0}});
  CHECK_THROWS_AS(pme::solve(rect, {1.0, 1.0}), pme::misuse_error);
  SparseMatrix ok = SparseMatrix::identity(2);
  CHECK_THROWS_AS(pme::solve(ok, {1.0, 1.0, 1.0}), pme::misuse_error);
}

TEST_CASE("vector helpers") {
  Vector x = {1.0, -3.0, 2.0};
  CHECK(pme::norm_inf(x) == 3.0);
  CHECK(pme::norm_2(Vector{3.0, 4.0}) == Catch::Approx(5.0));
  CHECK(pme::dot(Vector{1.0, 2.0}, Vector{3.0, 4.0}) == 11.0);
  Vector y = {1.0, 1.0, 1.0};
  pme::axpy(2.0, x, y);
  CHECK(y[0] == 3.0);
  CHECK(y[1] == -5.0);
  CHECK(y[2] == 5.0);
}
