#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include <chainsvd/complex_svd.hpp>
#include <chainsvd/generators.hpp>

#include "fixtures.hpp"
#include "rank_oracle.hpp"

using namespace chainsvd;

TEST_CASE("random_complex hits the requested homology and ranks exactly") {
  const std::vector<std::size_t> homology = {1, 2, 0, 1};
  const std::vector<std::size_t> ranks = {3, 2, 4};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    const RationalComplex c = random_complex(homology, ranks, cfg);

    CHECK(c.dims() == std::vector<std::size_t>{4, 7, 6, 5});
    CHECK(validate(c) == 0.0);
    CHECK(exact_homology(c) == homology);
    for (std::size_t i = 1; i <= c.n(); ++i) {
      CHECK(exact_rank(c.differential(i)) == ranks[i - 1]);
    }
  }
}

TEST_CASE("random_complex entries are integers") {
  const RationalComplex c = random_complex({1, 1}, {2});
  for (std::size_t i = 1; i <= c.n(); ++i) {
    const RationalMatrix& m = c.differential(i);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t col = 0; col < m.cols(); ++col) {
        CHECK(m(r, col).get_den() == 1);
      }
    }
  }
}

TEST_CASE("random_complex is deterministic in its config") {
  GeneratorConfig cfg;
  cfg.seed = 314;
  const RationalComplex a = random_complex({0, 1, 2}, {3, 1}, cfg);
  const RationalComplex b = random_complex({0, 1, 2}, {3, 1}, cfg);
  for (std::size_t i = 1; i <= a.n(); ++i) {
    CHECK(a.differential(i) == b.differential(i));
  }
  cfg.seed = 315;
  const RationalComplex other = random_complex({0, 1, 2}, {3, 1}, cfg);
  CHECK_FALSE(other.differential(1) == a.differential(1));
}

TEST_CASE("random_complex honors the tuning knobs") {
  GeneratorConfig cfg;
  cfg.seed = 9;
  cfg.unimodular_steps = 1;
  cfg.coefficient_bound = 1;
  const RationalComplex c = random_complex({1, 1, 1}, {2, 3}, cfg);
  CHECK(validate(c) == 0.0);
  CHECK(exact_homology(c) == std::vector<std::size_t>{1, 1, 1});
}

TEST_CASE("random_complex rejects malformed requests") {
  CHECK_THROWS_AS(random_complex({1}, {}), StructuralError);
  CHECK_THROWS_AS(random_complex({1, 1, 1}, {2}), StructuralError);
  GeneratorConfig cfg;
  cfg.coefficient_bound = 0;
  CHECK_THROWS_AS(random_complex({1, 1}, {2}, cfg), StructuralError);
}

TEST_CASE("random_complex covers the exact edge profile") {
  // No homology anywhere: a two-term complex given by one invertible map.
  const RationalComplex c = random_complex({0, 0}, {4});
  CHECK(c.dims() == std::vector<std::size_t>{4, 4});
  CHECK(exact_rank(c.differential(1)) == 4);
  CHECK(exact_homology(c) == std::vector<std::size_t>{0, 0});
}

TEST_CASE("hollow triangle chain complex") {
  const RationalComplex tri = stanley_reisner_from_generators(3, {0b111});
  CHECK(tri.dims() == std::vector<std::size_t>{3, 3});
  CHECK(validate(tri) == 0.0);
  CHECK(exact_homology(tri) == std::vector<std::size_t>{1, 1});

  // Boundary of edge {v_j, v_k} is v_k - v_j with alternating signs.
  const RationalMatrix& d1 = tri.differential(1);
  for (std::size_t c = 0; c < 3; ++c) {
    Rational sum = 0;
    std::size_t nonzero = 0;
    for (std::size_t r = 0; r < 3; ++r) {
      if (d1(r, c) != 0) {
        ++nonzero;
        sum += d1(r, c);
      }
    }
    CHECK(nonzero == 2);
    CHECK(sum == 0);
  }
}

TEST_CASE("full simplex has the homology of a point") {
  const RationalComplex full = stanley_reisner_from_generators(3, {});
  CHECK(full.dims() == std::vector<std::size_t>{3, 3, 1});
  CHECK(validate(full) == 0.0);
  CHECK(exact_homology(full) == std::vector<std::size_t>{1, 0, 0});
}

TEST_CASE("stanley_reisner_from_generators validates input") {
  CHECK_THROWS_AS(stanley_reisner_from_generators(2, {}), StructuralError);
  CHECK_THROWS_AS(stanley_reisner_from_generators(17, {}), StructuralError);
  // A mask with a bit beyond the variable count is malformed.
  CHECK_THROWS_AS(stanley_reisner_from_generators(3, {0b1000}),
                  StructuralError);
}

TEST_CASE("random Stanley-Reisner complexes are complexes with oracle homology") {
  for (std::size_t vars = 4; vars <= 8; ++vars) {
    GeneratorConfig cfg;
    cfg.seed = 100 + vars;
    const RationalComplex c = stanley_reisner_chain(vars, 2 * vars, cfg);
    CHECK(c.dims().front() == vars);
    CHECK(validate(c) == 0.0);
    CHECK(exact_homology(c) == oracle::homology(c));
  }
}

TEST_CASE("stanley_reisner_chain is deterministic and size-bounded") {
  GeneratorConfig cfg;
  cfg.seed = 55;
  const RationalComplex a = stanley_reisner_chain(6, 10, cfg);
  const RationalComplex b = stanley_reisner_chain(6, 10, cfg);
  REQUIRE(a.dims() == b.dims());
  for (std::size_t i = 1; i <= a.n(); ++i) {
    CHECK(a.differential(i) == b.differential(i));
  }
  // Entries of a simplicial boundary matrix are -1, 0, or 1.
  for (std::size_t i = 1; i <= a.n(); ++i) {
    const RationalMatrix& m = a.differential(i);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t col = 0; col < m.cols(); ++col) {
        CHECK(abs(m(r, col).get_num()) <= 1);
        CHECK(m(r, col).get_den() == 1);
      }
    }
  }
}

TEST_CASE("perturb is deterministic, proportional, and zero-preserving") {
  const ChainComplex c = fixtures::complex();

  const ChainComplex p1 = perturb(c, 1e-3, 99);
  const ChainComplex p2 = perturb(c, 1e-3, 99);
  for (std::size_t i = 1; i <= 3; ++i) {
    CHECK((p1.differential(i) - p2.differential(i)).max_abs() == 0.0);
  }
  const ChainComplex p3 = perturb(c, 1e-3, 100);
  CHECK((p1.differential(1) - p3.differential(1)).max_abs() > 0.0);

  // Relative error stays within the requested band and zeros stay zero.
  std::vector<DenseMatrix> with_zero = fixtures::maps();
  with_zero[0](0, 0) = 0.0;
  const ChainComplex cz(with_zero);
  const ChainComplex pz = perturb(cz, 1e-3, 5);
  CHECK(pz.differential(1)(0, 0) == 0.0);
  double worst_rel = 0.0;
  for (std::size_t i = 1; i <= 3; ++i) {
    const DenseMatrix& orig = cz.differential(i);
    const DenseMatrix& noisy = pz.differential(i);
    for (std::size_t r = 0; r < orig.rows(); ++r) {
      for (std::size_t col = 0; col < orig.cols(); ++col) {
        if (orig(r, col) == 0.0) continue;
        worst_rel = std::max(worst_rel,
                             std::abs(noisy(r, col) / orig(r, col) - 1.0));
      }
    }
  }
  CHECK(worst_rel <= 1e-3);
  CHECK(worst_rel > 0.0);
}

TEST_CASE("perturb noise scale is honored at the extremes") {
  const ChainComplex c = fixtures::complex();

  const ChainComplex tiny = perturb(c, 1e-12, 1);
  double drift = 0.0;
  for (std::size_t i = 1; i <= 3; ++i) {
    const DenseMatrix diff = tiny.differential(i) - c.differential(i);
    drift = std::max(drift, diff.max_abs() / c.differential(i).max_abs());
  }
  CHECK(drift <= 1e-12);

  // Half-magnitude noise destroys the near-complex property measurably.
  const ChainComplex loud = perturb(c, 0.5, 1);
  CHECK(validate(loud) > 1e-3);

  CHECK_THROWS_AS(perturb(c, 0.0, 1), StructuralError);
  CHECK_THROWS_AS(perturb(c, 1.0, 1), StructuralError);
  CHECK_THROWS_AS(perturb(c, -0.1, 1), StructuralError);
}
