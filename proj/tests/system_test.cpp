#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "kaczmarz/analysis.hpp"
#include "kaczmarz/generators.hpp"
#include "kaczmarz/io.hpp"
#include "kaczmarz/system.hpp"
#include "oracles.hpp"

using kaczmarz::DenseMatrix;
using kaczmarz::NormalizedSystem;
using kaczmarz::Vector;

TEST(NormalizeSystem, DiagonalScaling) {
  DenseMatrix a(2, 2, {2.0, 0.0, 0.0, 4.0});
  const NormalizedSystem sys = kaczmarz::normalize_system(a, Vector{2.0, 8.0});
  EXPECT_EQ(sys.A(0, 0), 1.0);
  EXPECT_EQ(sys.A(0, 1), 0.0);
  EXPECT_EQ(sys.A(1, 0), 0.0);
  EXPECT_EQ(sys.A(1, 1), 1.0);
  EXPECT_EQ(sys.b, (Vector{1.0, 2.0}));
  EXPECT_EQ(sys.row_scales, (Vector{2.0, 4.0}));
}

TEST(NormalizeSystem, IdentityUnchanged) {
  const NormalizedSystem sys =
      kaczmarz::normalize_system(DenseMatrix::identity(2), Vector{0.0, 0.0});
  EXPECT_EQ(sys.A(0, 0), 1.0);
  EXPECT_EQ(sys.A(1, 1), 1.0);
  EXPECT_EQ(sys.b, (Vector{0.0, 0.0}));
  EXPECT_EQ(sys.row_scales, (Vector{1.0, 1.0}));
}

TEST(NormalizeSystem, ThreeFourFiveRow) {
  DenseMatrix a(1, 2, {3.0, 4.0});
  const NormalizedSystem sys = kaczmarz::normalize_system(a, Vector{10.0});
  EXPECT_DOUBLE_EQ(sys.A(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(sys.A(0, 1), 0.8);
  EXPECT_DOUBLE_EQ(sys.b[0], 2.0);
  EXPECT_DOUBLE_EQ(sys.row_scales[0], 5.0);
}

TEST(NormalizeSystem, ZeroRowThrowsWithIndex) {
  DenseMatrix a(3, 2, {1.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  try {
    kaczmarz::normalize_system(a, Vector{1.0, 1.0, 1.0});
    FAIL() << "expected ZeroRowError";
  } catch (const kaczmarz::ZeroRowError& e) {
    EXPECT_EQ(e.row(), 1u);
  }
}

TEST(NormalizeSystem, RejectsMismatchedRhs) {
  EXPECT_THROW(
      kaczmarz::normalize_system(DenseMatrix::identity(2), Vector{1.0}),
      std::invalid_argument);
}

TEST(NormalizeSystem, UnitRowInvariant) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sys = oracles::random_system(gen, 8, 5);
    for (std::size_t i = 0; i < sys.row_count(); ++i)
      EXPECT_NEAR(kaczmarz::l2_norm(sys.A.row(i)), 1.0, 1e-12);
  }
}

// Residuals of the raw and normalized systems differ row-wise by the
// positive factor 1/row_scale, so sign patterns and zero sets agree.
TEST(NormalizeSystem, PreservesSolutionSet) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 30; ++trial) {
    const DenseMatrix a_raw = oracles::random_matrix(gen, 7, 4);
    const Vector b_raw = oracles::random_vector(gen, 7);
    const Vector x = oracles::random_vector(gen, 4);
    const NormalizedSystem sys = kaczmarz::normalize_system(a_raw, b_raw);

    const Vector r_norm = kaczmarz::residual(sys, x);
    for (std::size_t i = 0; i < 7; ++i) {
      const double r_raw = oracles::naive_dot(a_raw.row(i), x) - b_raw[i];
      EXPECT_NEAR(r_norm[i], r_raw / sys.row_scales[i],
                  1e-12 * (1.0 + std::abs(r_raw)));
      if (std::abs(r_raw) > 1e-10)
        EXPECT_EQ(r_norm[i] > 0.0, r_raw > 0.0);
    }
  }
}

TEST(Gram, IdentityRows) {
  const auto sys = oracles::identity_system(2);
  const kaczmarz::GramMatrix q = kaczmarz::gram(sys);
  EXPECT_EQ(q(0, 0), 1.0);
  EXPECT_EQ(q(0, 1), 0.0);
  EXPECT_EQ(q(1, 0), 0.0);
  EXPECT_EQ(q(1, 1), 1.0);
}

TEST(Gram, ThreeRowFixture) {
  const auto sys = oracles::three_row_system();
  const kaczmarz::GramMatrix q = kaczmarz::gram(sys);
  const double s = std::sqrt(0.5);
  EXPECT_NEAR(q(0, 2), s, 1e-15);
  EXPECT_NEAR(q(1, 2), s, 1e-15);
  EXPECT_NEAR(q(2, 2), 1.0, 1e-15);
  EXPECT_EQ(q(0, 1), 0.0);
}

TEST(Gram, MatchesNaiveRecompute) {
  std::mt19937_64 gen(42);
  const auto sys = oracles::random_system(gen, 5, 3);
  const kaczmarz::GramMatrix q = kaczmarz::gram(sys);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(q(i, i), 1.0, 1e-12);
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_EQ(q(i, j), q(j, i));  // symmetric exactly as stored
      double direct = 0.0;
      for (std::size_t k = 0; k < 3; ++k) direct += sys.A(i, k) * sys.A(j, k);
      EXPECT_NEAR(q(i, j), direct, 1e-14);
      EXPECT_LE(std::abs(q(i, j)), 1.0 + 1e-12);
    }
  }
}

TEST(Residual, Examples) {
  const auto eye = oracles::identity_system(2);
  EXPECT_EQ(kaczmarz::residual(eye, Vector{1.0, 1.0}), (Vector{1.0, 1.0}));

  const NormalizedSystem offset = kaczmarz::normalize_system(
      DenseMatrix::identity(2), Vector{1.0, 2.0});
  EXPECT_EQ(kaczmarz::residual(offset, Vector{1.0, 2.0}), (Vector{0.0, 0.0}));

  const auto three = oracles::three_row_system();
  const Vector r = kaczmarz::residual(three, Vector{1.0, -1.0});
  EXPECT_DOUBLE_EQ(r[0], 1.0);
  EXPECT_DOUBLE_EQ(r[1], -1.0);
  EXPECT_NEAR(r[2], 0.0, 1e-15);
}

TEST(Residual, TinyAtStoredSolution) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sys = oracles::random_system(gen, 9, 4);
    const Vector r = kaczmarz::residual(sys, *sys.solution);
    EXPECT_LE(kaczmarz::linf_norm(r), 1e-10);
  }
}

TEST(GenGaussian, DeterministicPerSeed) {
  const auto a = kaczmarz::gen_gaussian(3, 2, 42);
  const auto b = kaczmarz::gen_gaussian(3, 2, 42);
  EXPECT_EQ(a.A.entries(), b.A.entries());
  EXPECT_EQ(a.b, b.b);
  const auto c = kaczmarz::gen_gaussian(3, 2, 43);
  EXPECT_NE(a.A.entries(), c.A.entries());
}

TEST(GenGaussian, UnitRowsAndStoredSolution) {
  const auto sys = kaczmarz::gen_gaussian(40, 17, 7);
  for (std::size_t i = 0; i < sys.row_count(); ++i)
    EXPECT_NEAR(kaczmarz::l2_norm(sys.A.row(i)), 1.0, 1e-12);
  ASSERT_TRUE(sys.solution.has_value());
  EXPECT_EQ(*sys.solution, Vector(17, 0.0));
  EXPECT_EQ(sys.b, Vector(40, 0.0));
}

TEST(GenGaussian, CustomSolutionGivesConsistentRhs) {
  std::mt19937_64 gen(5);
  const Vector x_star = oracles::random_vector(gen, 6);
  const auto sys = kaczmarz::gen_gaussian(14, 6, 99, x_star);
  ASSERT_TRUE(sys.solution.has_value());
  EXPECT_EQ(*sys.solution, x_star);
  EXPECT_LE(kaczmarz::linf_norm(kaczmarz::residual(sys, x_star)), 1e-10);
}

TEST(GenGaussian, RejectsBadShapes) {
  EXPECT_THROW(kaczmarz::gen_gaussian(3, 5, 1), kaczmarz::GeneratorError);
  EXPECT_THROW(kaczmarz::gen_gaussian(0, 0, 1), kaczmarz::GeneratorError);
}

// Small square Gaussian matrices are badly conditioned: sigma_min well below
// the unit row scale. Cross-validated against the Jacobi oracle at small n.
TEST(GenGaussian, SigmaMinSmallAndCrossValidated) {
  const auto sys = kaczmarz::gen_gaussian(200, 200, 321);
  const auto spectral = kaczmarz::smallest_singular(sys);
  EXPECT_TRUE(spectral.converged);
  EXPECT_LT(spectral.sigma_min, 0.1);

  const auto small = kaczmarz::gen_gaussian(20, 20, 321);
  const auto small_spectral = kaczmarz::smallest_singular(small);
  const auto eig = oracles::jacobi_eigen(small.A.gramian());
  const double sigma_oracle = std::sqrt(eig.values.front());
  EXPECT_NEAR(small_spectral.sigma_min, sigma_oracle,
              1e-8 * sigma_oracle);
}

TEST(GenGaussianShifted, DiagonallyDominantInstances) {
  for (std::size_t n : {2ul, 20ul}) {
    const auto sys = kaczmarz::gen_gaussian_shifted(n, 100.0, 17);
    for (std::size_t i = 0; i < n; ++i) {
      double off = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) off += std::abs(sys.A(i, j));
      EXPECT_GT(std::abs(sys.A(i, i)), off);
    }
  }
}

TEST(GenGaussianShifted, DeterministicPerSeed) {
  const auto a = kaczmarz::gen_gaussian_shifted(6, 100.0, 3);
  const auto b = kaczmarz::gen_gaussian_shifted(6, 100.0, 3);
  EXPECT_EQ(a.A.entries(), b.A.entries());
}

TEST(GenGaussianShifted, SigmaMinAtUnitScale) {
  const auto sys = kaczmarz::gen_gaussian_shifted(200, 100.0, 29);
  const auto spectral = kaczmarz::smallest_singular(sys);
  EXPECT_TRUE(spectral.converged);
  EXPECT_GE(spectral.sigma_min, 0.2);
  EXPECT_LE(spectral.sigma_min, 5.0);
}

TEST(GenGaussianShifted, RejectsBadArguments) {
  EXPECT_THROW(kaczmarz::gen_gaussian_shifted(0, 100.0, 1),
               kaczmarz::GeneratorError);
  EXPECT_THROW(kaczmarz::gen_gaussian_shifted(5, 0.0, 1),
               kaczmarz::GeneratorError);
}

TEST(MatrixIo, RoundTripIsExact) {
  const auto dir = oracles::make_temp_dir("io");
  std::mt19937_64 gen(77);
  DenseMatrix a = oracles::random_matrix(gen, 6, 4);
  a(0, 0) = 1e-17;
  a(1, 2) = -3.25e300;
  const Vector b = oracles::random_vector(gen, 6);

  kaczmarz::write_matrix(dir / "a.txt", a);
  kaczmarz::write_rhs(dir / "b.txt", b);
  const DenseMatrix a2 = kaczmarz::read_matrix(dir / "a.txt");
  const Vector b2 = kaczmarz::read_rhs(dir / "b.txt");
  EXPECT_EQ(a.entries(), a2.entries());
  EXPECT_EQ(b, b2);
  std::filesystem::remove_all(dir);
}

TEST(MatrixIo, ReportsLineNumbers) {
  const auto dir = oracles::make_temp_dir("io_bad");
  const auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name);
    out << text;
  };

  write("no_header.txt", "not numbers\n");
  write("short_row.txt", "2 3\n1 2 3\n4 5\n");
  write("bad_number.txt", "1 2\n1 oops\n");
  write("missing_rows.txt", "3 2\n1 2\n");
  write("trailing.txt", "1 2\n1 2 3\n");

  const auto expect_line = [&](const std::string& name, std::size_t line) {
    try {
      kaczmarz::read_matrix(dir / name);
      FAIL() << name;
    } catch (const kaczmarz::BadMatrixFile& e) {
      EXPECT_EQ(e.line(), line) << name;
    }
  };
  expect_line("no_header.txt", 1);
  expect_line("short_row.txt", 3);
  expect_line("bad_number.txt", 2);
  expect_line("missing_rows.txt", 3);
  expect_line("trailing.txt", 2);

  EXPECT_THROW(kaczmarz::read_matrix(dir / "absent.txt"), kaczmarz::IoError);
  std::filesystem::remove_all(dir);
}
