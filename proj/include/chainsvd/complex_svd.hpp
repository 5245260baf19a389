#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <chainsvd/chain_complex.hpp>

namespace chainsvd {

enum class SvdMethod { projection, laplacian };

/// Simultaneous SVD of a chain complex: one orthogonal change of basis
/// U_i per space such that every U_{i-1}^t A_i U_i is the sparse normal
/// form with a single positive diagonal block.
///
/// singular_values[i-1] holds the diagonal of that block for A_i, sorted
/// non-increasing; its length is profile.rank[i-1].
struct ComplexSVD {
  std::vector<DenseMatrix> bases;                     // U_0..U_n
  std::vector<std::vector<double>> singular_values;   // levels 1..n
  RankProfile profile;
  SvdMethod method = SvdMethod::projection;
  double normal_form_residual = 0.0;
  double input_compose_residual = 0.0;

  std::size_t n() const { return singular_values.size(); }
  std::vector<std::size_t> dims() const;
};

/// Numerical rank of a non-increasing singular value list: the first
/// 1-based index j < cap with threshold * sigma_j >= sigma_{j+1}
/// (a relative gap), cap if no gap occurs, 0 for empty or zero spectra.
std::size_t rank_decision(std::span<const double> sigma, std::size_t cap,
                          double threshold);

/// Length of the longest common prefix on which the two sorted lists agree
/// to the given relative tolerance, element by element.
std::size_t stable_singular_values(std::span<const double> a,
                                   std::span<const double> b, double rel_tol);

/// Simultaneous SVD by successive projection: level by level, project the
/// next differential onto the orthogonal complement of what is already
/// explained, take a full SVD, and split off the rows that feed the next
/// level.  Numerical ranks come from rank_decision at t.rank_threshold.
ComplexSVD svd_by_projection(const std::vector<DenseMatrix>& b,
                             const Thresholds& t = {});

/// Simultaneous SVD through chain Laplacians: eigendecompose every
/// Delta_i, match eigenvalues across neighbouring levels to locate the
/// squared singular values, and conjugate.  Aborts when a Laplacian has a
/// repeated nonzero eigenvalue (relative gap below t.eigen_match_rel_tol)
/// or when the conjugated differentials fail to come out diagonal.
ComplexSVD svd_by_laplacian(const std::vector<DenseMatrix>& b,
                            const Thresholds& t = {});

/// The normal form of level i in [1, n]: a c_{i-1} x c_i matrix carrying
/// singular_values[i-1] on the diagonal block that starts at row
/// rank[i-2] (0 for i = 1), column 0.
DenseMatrix sigma_bar(const ComplexSVD& d, std::size_t i);

/// max_i ||U_{i-1}^t B_i U_i - sigma_bar_i||_max normalized by the largest
/// singular value (or by max(1, max_i ||B_i||_max) when all levels have
/// rank zero).
double normal_form_residual(const std::vector<DenseMatrix>& b,
                            const ComplexSVD& d);

/// Flips basis columns in compensating pairs until every det U_i = +1.
/// Pure: returns the adjusted decomposition, which represents the same
/// normal form.  Throws SignFreedomError when the sign pattern admits no
/// solution (this requires every homology dimension along an affected
/// stretch to vanish).
ComplexSVD make_special_orthogonal(const ComplexSVD& d);

/// Projects an approximate complex onto a genuine one with the prescribed
/// homology dimensions: derives the forced rank profile, runs the
/// successive-projection sweep with those ranks, and rebuilds each
/// differential as U_{i-1} sigma_bar_i U_i^t.  The result composes to zero
/// up to roundoff by construction.
ChainComplex project_to_complex(const std::vector<DenseMatrix>& b,
                                const std::vector<std::size_t>& homology);

}  // namespace chainsvd
