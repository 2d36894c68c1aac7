#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "rank1part/matrix.hpp"

using namespace rank1part;
using Catch::Approx;

namespace {

DataMatrix random_rows(int m, int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Matrix a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = dist(gen);
  return DataMatrix(a);
}

}  // namespace

TEST_CASE("build_similarity: identical rows get similarity one") {
  Matrix a(3, 2);
  a << 1.0, 2.0, 1.0, 2.0, 5.0, -1.0;
  const SimilarityMatrix s = build_similarity(DataMatrix(a));
  REQUIRE(s.values(0, 1) == 1.0);
  REQUIRE(s.values(1, 0) == 1.0);
  REQUIRE(s.values(0, 2) < 1.0);
}

TEST_CASE("build_similarity: identity rows with sigma 1") {
  Matrix a(2, 2);
  a << 1.0, 0.0, 0.0, 1.0;
  const SimilarityMatrix s = build_similarity(DataMatrix(a), 1.0);
  // squared distance 2, exp(-2/2)
  REQUIRE(s.values(0, 1) == Approx(std::exp(-1.0)).epsilon(1e-14));
  REQUIRE(s.values(0, 0) == 1.0);
  REQUIRE(s.values(1, 1) == 1.0);
  REQUIRE(s.sigma == 1.0);
}

TEST_CASE("build_similarity: random rows match a direct double loop") {
  const DataMatrix a = random_rows(10, 4, 42);
  const SimilarityMatrix s = build_similarity(a);
  REQUIRE(s.sigma > 0.0);
  for (int i = 0; i < 10; ++i) {
    REQUIRE(s.values(i, i) == 1.0);
    for (int j = 0; j < 10; ++j) {
      if (i == j) continue;
      double d2 = 0.0;
      for (int k = 0; k < 4; ++k) {
        const double d = a.values(i, k) - a.values(j, k);
        d2 += d * d;
      }
      const double expected = std::exp(-d2 / (2.0 * s.sigma * s.sigma));
      REQUIRE(s.values(i, j) == Approx(expected).margin(1e-12));
      REQUIRE(s.values(i, j) == s.values(j, i));
      REQUIRE(s.values(i, j) > 0.0);
      REQUIRE(s.values(i, j) < 1.0);
    }
  }
}

TEST_CASE("build_similarity: all rows identical is degenerate") {
  Matrix a = Matrix::Constant(4, 3, 2.5);
  REQUIRE_THROWS_AS(build_similarity(DataMatrix(a)), DegenerateInputError);
}

TEST_CASE("build_similarity: permutation equivariance") {
  const DataMatrix a = random_rows(8, 5, 7);
  const SimilarityMatrix s = build_similarity(a);
  std::vector<int> perm{3, 1, 7, 0, 5, 2, 6, 4};
  Matrix b(8, 5);
  for (int i = 0; i < 8; ++i) b.row(i) = a.values.row(perm[i]);
  const SimilarityMatrix sp = build_similarity(DataMatrix(b));
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      REQUIRE(sp.values(i, j) == Approx(s.values(perm[i], perm[j])).margin(1e-13));
}

TEST_CASE("normalized_laplacian: identity similarity gives zero") {
  SimilarityMatrix s;
  s.values = Matrix::Identity(4, 4);
  s.sigma = 1.0;
  const LaplacianMatrix l = normalized_laplacian(s);
  REQUIRE(l.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("normalized_laplacian: 2x2 all-ones") {
  SimilarityMatrix s;
  s.values = Matrix::Constant(2, 2, 1.0);
  s.sigma = 1.0;
  const LaplacianMatrix l = normalized_laplacian(s);
  REQUIRE(l.values(0, 0) == Approx(0.5).margin(1e-15));
  REQUIRE(l.values(0, 1) == Approx(-0.5).margin(1e-15));
  REQUIRE(l.values(1, 0) == Approx(-0.5).margin(1e-15));
  REQUIRE(l.values(1, 1) == Approx(0.5).margin(1e-15));
}

TEST_CASE("normalized_laplacian: spectrum and kernel vector on random similarity") {
  const DataMatrix a = random_rows(8, 3, 11);
  const SimilarityMatrix s = build_similarity(a);
  const LaplacianMatrix l = normalized_laplacian(s);

  REQUIRE((l.values - l.values.transpose()).cwiseAbs().maxCoeff() == 0.0);

  const auto eigenvalues = oracles::jacobi_eigenvalues(l.values);
  REQUIRE(eigenvalues.front() >= -1e-10);
  REQUIRE(eigenvalues.back() <= 2.0 + 1e-10);
  REQUIRE(std::abs(eigenvalues.front()) <= 1e-10);

  const Vector sqrt_d = l.degrees.array().sqrt();
  REQUIRE((l.values * sqrt_d).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("sinkhorn_knopp_ds: all-ones balances to 1/m") {
  SimilarityMatrix s;
  s.values = Matrix::Constant(5, 5, 1.0);
  s.sigma = 1.0;
  const ScalingResult r = sinkhorn_knopp_ds(s);
  REQUIRE((r.values.array() - 0.2).abs().maxCoeff() <= 1e-9);
}

TEST_CASE("sinkhorn_knopp_ds: doubly stochastic input is a fixed point") {
  SimilarityMatrix s;
  s.values = Matrix(2, 2);
  s.values << 0.25, 0.75, 0.75, 0.25;
  s.sigma = 1.0;
  const ScalingResult r = sinkhorn_knopp_ds(s);
  REQUIRE((r.values - s.values).cwiseAbs().maxCoeff() <= 1e-9);
  REQUIRE(r.row_scale(0) == Approx(r.row_scale(1)).epsilon(1e-9));
  REQUIRE(r.col_scale(0) == Approx(r.col_scale(1)).epsilon(1e-9));
}

TEST_CASE("sinkhorn_knopp_ds: 2x2 example against the reference iteration") {
  Matrix m(2, 2);
  m << 2.0, 1.0, 1.0, 2.0;
  SimilarityMatrix s;
  s.values = m;
  s.sigma = 1.0;
  const ScalingResult r = sinkhorn_knopp_ds(s, 1e-12);
  REQUIRE((r.values.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  REQUIRE((r.values.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  REQUIRE((r.values - r.values.transpose()).cwiseAbs().maxCoeff() <= 1e-10);

  // independent alternating normalization run to fixed point
  Matrix g = m;
  for (int it = 0; it < 1000; ++it) {
    for (int i = 0; i < 2; ++i) g.row(i) /= g.row(i).sum();
    for (int j = 0; j < 2; ++j) g.col(j) /= g.col(j).sum();
  }
  REQUIRE((r.values - g).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("sinkhorn_knopp_ds: invariant under positive rescaling") {
  const DataMatrix a = random_rows(6, 4, 3);
  const SimilarityMatrix s = build_similarity(a);
  const double tol = 1e-10;
  const ScalingResult r1 = sinkhorn_knopp_ds(s, tol);
  SimilarityMatrix scaled;
  scaled.values = 7.5 * s.values;
  scaled.sigma = s.sigma;
  const ScalingResult r2 = sinkhorn_knopp_ds(scaled, tol);
  REQUIRE((r1.values - r2.values).cwiseAbs().maxCoeff() <= 2.0 * tol);
}

TEST_CASE("sinkhorn_knopp_ds: reports non-convergence with residual") {
  Matrix m(3, 3);
  m << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0;
  SimilarityMatrix s;
  s.values = m;
  s.sigma = 1.0;
  try {
    sinkhorn_knopp_ds(s, 1e-12, 1);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    REQUIRE(e.residual() > 0.0);
  }
}

TEST_CASE("column_stochastic: identity and arithmetic example") {
  REQUIRE((column_stochastic(DataMatrix(Matrix::Identity(3, 3))) - Matrix::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  Matrix a(2, 2);
  a << 1.0, 3.0, 1.0, 1.0;
  const Matrix cs = column_stochastic(DataMatrix(a));
  REQUIRE(cs(0, 0) == 0.5);
  REQUIRE(cs(0, 1) == 0.75);
  REQUIRE(cs(1, 0) == 0.5);
  REQUIRE(cs(1, 1) == 0.25);
}

TEST_CASE("column_stochastic: random positive columns sum to one") {
  const DataMatrix a = random_rows(7, 5, 19);
  const Matrix cs = column_stochastic(a);
  for (int j = 0; j < 5; ++j) REQUIRE(std::abs(cs.col(j).sum() - 1.0) <= 1e-12);
}

TEST_CASE("column_stochastic: zero column is degenerate") {
  Matrix a = Matrix::Zero(3, 2);
  a(0, 0) = 1.0;
  REQUIRE_THROWS_AS(column_stochastic(DataMatrix(a)), DegenerateInputError);
}

TEST_CASE("shift_to_nonnegative") {
  Matrix a(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  const auto [same, zero_offset] = shift_to_nonnegative(DataMatrix(a));
  REQUIRE(zero_offset == 0.0);
  REQUIRE((same.values - a).cwiseAbs().maxCoeff() == 0.0);

  a(1, 0) = -2.0;
  const auto [shifted, offset] = shift_to_nonnegative(DataMatrix(a));
  REQUIRE(offset == Approx(2.01));
  REQUIRE(shifted.values.minCoeff() == Approx(0.01));
}

TEST_CASE("matrix csv round trip with missing entries") {
  Matrix values(2, 3);
  values << 1.5, 0.0, -2.25, 1e-17, 4.0, 123456.789;
  Mask mask = Mask::Constant(2, 3, true);
  mask(0, 1) = false;
  const DataMatrix a(values, mask);

  const auto path = std::filesystem::temp_directory_path() / "r1p_matrix_roundtrip.csv";
  write_matrix_csv(path.string(), a);
  const DataMatrix b = read_matrix_csv(path.string());
  REQUIRE(b.rows() == 2);
  REQUIRE(b.cols() == 3);
  REQUIRE(b.mask.has_value());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) {
      REQUIRE(b.observed(i, j) == a.observed(i, j));
      if (a.observed(i, j)) REQUIRE(b.values(i, j) == a.values(i, j));
    }
  std::filesystem::remove(path);
}

TEST_CASE("matrix csv errors carry line diagnostics") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "r1p_matrix_bad.csv";
  {
    std::ofstream out(path);
    out << "2,2\n1.0,2.0\n3.0,oops\n";
  }
  try {
    read_matrix_csv(path.string());
    FAIL("expected IoError");
  } catch (const IoError& e) {
    REQUIRE(std::string(e.what()).find(":3") != std::string::npos);
  }
  std::filesystem::remove(path);
  REQUIRE_THROWS_AS(read_matrix_csv((dir / "r1p_does_not_exist.csv").string()), IoError);
}

TEST_CASE("DataMatrix validates mask coverage and finiteness") {
  Matrix values = Matrix::Ones(2, 2);
  Mask mask = Mask::Constant(2, 2, true);
  mask(1, 0) = false;
  mask(1, 1) = false;
  REQUIRE_THROWS_AS(DataMatrix(values, mask), ArgumentError);

  values(0, 0) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(DataMatrix(values), ArgumentError);
}
