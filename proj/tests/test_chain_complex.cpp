#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include <chainsvd/chain_complex.hpp>
#include <chainsvd/matrix.hpp>

#include "fixtures.hpp"

using namespace chainsvd;

TEST_CASE("construction derives dimensions and rejects shape mismatches") {
  const ChainComplex c = fixtures::complex();
  CHECK(c.n() == 3);
  CHECK(c.dims() == std::vector<std::size_t>{3, 5, 5, 3});
  CHECK(c.dim(2) == 5);
  CHECK(c.differential(1).rows() == 3);

  CHECK_THROWS_AS(ChainComplex({}), StructuralError);
  try {
    ChainComplex two({DenseMatrix(3, 5), DenseMatrix(4, 2)});
    FAIL("mismatched shapes were accepted");
  } catch (const StructuralError& e) {
    CHECK(std::string(e.what()).find("differential 2") != std::string::npos);
  }
}

TEST_CASE("prime field complexes must share one modulus") {
  const PrimeFieldMatrix a(2, 2, 5);
  const PrimeFieldMatrix b5(2, 2, 5);
  const PrimeFieldMatrix b7(2, 2, 7);
  CHECK_NOTHROW(PrimeFieldComplex({a, b5}));
  CHECK_THROWS_AS(PrimeFieldComplex({a, b7}), StructuralError);
}

TEST_CASE("validate measures composition failure in each arithmetic") {
  CHECK(validate(fixtures::complex()) == 0.0);
  CHECK(validate(fixtures::rational_complex()) == 0.0);

  auto bumped = fixtures::maps();
  bumped[1](0, 0) += 0.5;
  CHECK(validate(ChainComplex(bumped)) > 1e-5);

  RationalComplex rc = fixtures::rational_complex();
  auto diffs = rc.differentials();
  diffs[0](0, 0) += 1;
  CHECK(validate(RationalComplex(diffs)) > 0.0);

  // A single differential composes with nothing.
  CHECK(validate(ChainComplex({DenseMatrix(2, 3, {1, 2, 3, 4, 5, 6})})) == 0.0);
}

TEST_CASE("laplacian assembles the two-sided product with boundary cases") {
  const ChainComplex c = fixtures::complex();
  const DenseMatrix a1 = c.differential(1);
  const DenseMatrix a3 = c.differential(3);

  const DenseMatrix d0 = laplacian(c, 0);
  CHECK((d0 - a1 * a1.transpose()).max_abs() == 0.0);

  const DenseMatrix d3 = laplacian(c, 3);
  CHECK((d3 - a3.transpose() * a3).max_abs() == 0.0);

  const DenseMatrix a2 = c.differential(2);
  const DenseMatrix d1 = laplacian(c, 1);
  CHECK((d1 - (a1.transpose() * a1 + a2 * a2.transpose())).max_abs() == 0.0);
  CHECK((d1 - d1.transpose()).max_abs() == 0.0);

  CHECK_THROWS_AS(laplacian(c, 4), StructuralError);
}

TEST_CASE("laplacians are positive semidefinite") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  DenseMatrix b1(4, 6);
  DenseMatrix b2(6, 3);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 6; ++c) b1(r, c) = dist(rng);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 3; ++c) b2(r, c) = dist(rng);
  // Not a complex, but the Laplacian is PSD regardless.
  const ChainComplex c({b1, b2});
  for (std::size_t i = 0; i <= 2; ++i) {
    const SymmetricEigen e = sym_eig(laplacian(c, i));
    CHECK(e.eigenvalues.back() > -1e-10 * std::max(1.0, e.eigenvalues.front()));
  }
}

TEST_CASE("homology_from_ranks implements c_i = r_i + r_{i+1} + h_i") {
  CHECK(homology_from_ranks({3, 5, 5, 3}, {2, 2, 2}) ==
        std::vector<std::size_t>{1, 1, 1, 1});
  CHECK(homology_from_ranks({2, 2}, {2}) == std::vector<std::size_t>{0, 0});

  CHECK_THROWS_AS(homology_from_ranks({3, 5}, {4}), RankDecisionError);
  CHECK_THROWS_AS(homology_from_ranks({3}, {}), StructuralError);
  CHECK_THROWS_AS(homology_from_ranks({3, 5, 5}, {2}), StructuralError);
}

TEST_CASE("ranks_from_homology inverts the recursion or reports infeasibility") {
  CHECK(ranks_from_homology({3, 5, 5, 3}, {1, 1, 1, 1}) ==
        std::vector<std::size_t>{2, 2, 2});
  CHECK(ranks_from_homology({1, 3}, {0, 2}) == std::vector<std::size_t>{1});

  try {
    ranks_from_homology({1, 3}, {0, 0});
    FAIL("infeasible request was accepted");
  } catch (const InfeasibleRankError& e) {
    CHECK(std::string(e.what()) == "The rank conditions cannot be satisfied.");
  }
  CHECK_THROWS_AS(ranks_from_homology({3, 5, 5, 3}, {0, 0, 0, 1}),
                  InfeasibleRankError);
  CHECK_THROWS_AS(ranks_from_homology({3, 5}, {1}), StructuralError);
}

TEST_CASE("rank and homology recursions are mutually inverse") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> rank_dist(0, 6);
  std::uniform_int_distribution<std::size_t> extra(0, 4);
  std::uniform_int_distribution<std::size_t> len(1, 6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = len(rng);
    std::vector<std::size_t> ranks(n);
    for (auto& r : ranks) r = rank_dist(rng);
    std::vector<std::size_t> dims(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      const std::size_t r_in = i >= 1 ? ranks[i - 1] : 0;
      const std::size_t r_out = i < n ? ranks[i] : 0;
      dims[i] = r_in + r_out + extra(rng);
    }
    const auto homology = homology_from_ranks(dims, ranks);
    CHECK(ranks_from_homology(dims, homology) == ranks);
  }
}

TEST_CASE("exact_homology needs a true complex and matches the fixture") {
  CHECK(exact_homology(fixtures::rational_complex()) ==
        std::vector<std::size_t>{1, 1, 1, 1});

  auto diffs = fixtures::rational_complex().differentials();
  diffs[0](0, 0) += 1;
  CHECK_THROWS_AS(exact_homology(RationalComplex(diffs)), StructuralError);
}

TEST_CASE("field conversions round-trip") {
  const RationalComplex rc = fixtures::rational_complex();
  const ChainComplex c = to_double(rc);
  CHECK(c.dims() == rc.dims());
  CHECK(c.differential(2)(0, 0) == -43.0);

  const RationalComplex back = rationalize(c);
  CHECK(back.differential(1) == rc.differential(1));
  CHECK(back.differential(2) == rc.differential(2));
  CHECK(back.differential(3) == rc.differential(3));

  PrimeFieldComplex pf({PrimeFieldMatrix::from_integers(
      2, 2, 7, std::array<long long, 4>{1, 2, 3, 4})});
  const ChainComplex cd = to_double(pf);
  CHECK(cd.differential(1)(1, 1) == 4.0);
}

TEST_CASE("thresholds reject out-of-range values") {
  CHECK_NOTHROW(Thresholds{}.check());
  Thresholds t;
  t.rank_threshold = 0.0;
  CHECK_THROWS_AS(t.check(), StructuralError);
  t.rank_threshold = 1.0;
  CHECK_THROWS_AS(t.check(), StructuralError);
  t = Thresholds{};
  t.compose_tol = -1e-9;
  CHECK_THROWS_AS(t.check(), StructuralError);
  t = Thresholds{};
  t.eigen_match_rel_tol = 2.0;
  CHECK_THROWS_AS(t.check(), StructuralError);
}
