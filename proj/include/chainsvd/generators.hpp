#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <chainsvd/chain_complex.hpp>

namespace chainsvd {

struct GeneratorConfig {
  std::uint64_t seed = 0;
  /// Elementary column/row operations applied per space; 0 means the
  /// default of 3 * c_i.
  std::size_t unimodular_steps = 0;
  /// Coefficients of the elementary operations are nonzero integers in
  /// [-coefficient_bound, coefficient_bound].
  long coefficient_bound = 2;
};

/// Random integer chain complex with exactly the requested homology
/// dimensions h_0..h_n and differential ranks r_1..r_n.  Starts from the
/// block normal form with globally distinct positive integer diagonals and
/// conjugates by random unimodular matrices (products of elementary
/// operations), so compositions stay exactly zero and every rank is exact.
/// Deterministic in the config.
RationalComplex random_complex(const std::vector<std::size_t>& homology,
                               const std::vector<std::size_t>& ranks,
                               const GeneratorConfig& cfg = {});

/// Simplicial chain complex (non-reduced, real coefficients, faces ordered
/// lexicographically) of the Stanley-Reisner complex on `vars` vertices
/// whose non-faces are generated by `monomial_count` random distinct
/// squarefree monomials of degree 2..min(5, vars-1).  Draws that leave no
/// edges are retried with a derived seed; persistent failure is an error.
/// vars must lie in [3, 16].
RationalComplex stanley_reisner_chain(std::size_t vars,
                                      std::size_t monomial_count,
                                      const GeneratorConfig& cfg = {});

/// Simplicial chain complex of the Stanley-Reisner complex with an
/// explicit generator set (bitmask per monomial over `vars` vertices).
/// Building block of stanley_reisner_chain, exposed for fixed fixtures.
RationalComplex stanley_reisner_from_generators(
    std::size_t vars, const std::vector<std::uint32_t>& generator_masks);

/// Multiplies every entry by (1 + delta) with delta drawn uniformly from
/// [-rel_eps, rel_eps] per entry.  Zero entries stay zero.  rel_eps must
/// lie in (0, 1).  Deterministic in the seed.
ChainComplex perturb(const ChainComplex& c, double rel_eps,
                     std::uint64_t seed);

}  // namespace chainsvd
