#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include <chainsvd/chain_complex.hpp>

namespace chainsvd {

/// The Moore-Penrose duals A_1^+..A_n^+ of a complex's differentials.
/// maps[i-1] has shape c_i x c_{i-1}; consecutive maps compose to
/// (approximately) zero in ascending order: A_{i+1}^+ A_i^+ ~ 0.
template <class Mat>
struct BasicPseudoinverse {
  std::vector<std::size_t> dims;  // c_0..c_n of the source complex
  std::vector<Mat> maps;
};

using PseudoinverseComplex = BasicPseudoinverse<DenseMatrix>;
using RationalPseudoinverse = BasicPseudoinverse<RationalMatrix>;
using PrimeFieldPseudoinverse = BasicPseudoinverse<PrimeFieldMatrix>;

/// Normalized defects of the four Moore-Penrose identities.  Float inputs
/// give residuals; exact inputs give 0.0 / 1.0 flags per identity.
struct PenroseResiduals {
  double reproduce_m = 0.0;     // M P M = M
  double reproduce_pinv = 0.0;  // P M P = P
  double symmetry_mp = 0.0;     // (M P)^t = M P
  double symmetry_pm = 0.0;     // (P M)^t = P M

  double max() const {
    return std::max(std::max(reproduce_m, reproduce_pinv),
                    std::max(symmetry_mp, symmetry_pm));
  }
};

/// Pseudoinverse of a real matrix at a caller-chosen rank r: invert the r
/// leading singular values, zero the rest.  Rejects r above min(rows,
/// cols) and spectra where sigma_r < 1e-13 * sigma_1 (the inversion would
/// amplify noise, not information).
DenseMatrix pinv_float(const DenseMatrix& m, std::size_t rank);

/// Pseudoinverse of every differential at the ranks fixed by a profile.
PseudoinverseComplex pinv_complex(const ChainComplex& c,
                                  const RankProfile& profile);

/// Exact Moore-Penrose pseudoinverse over the rationals via the full-rank
/// factorization M = F G:  M^+ = G^t (G G^t)^{-1} (F^t F)^{-1} F^t.
/// Always exists over an ordered field.
RationalMatrix pinv_exact_rational(const RationalMatrix& m);

/// Moore-Penrose pseudoinverse over F_p.  Exists iff ker M meets its
/// orthogonal complement trivially and likewise for im M; violations throw
/// FieldConditionError naming the failed condition.
PrimeFieldMatrix pinv_prime_field(const PrimeFieldMatrix& m);

/// Orthogonal projector onto the harmonic subspace at level i in [0, n]:
/// id - A_i^+ A_i - A_{i+1} A_{i+1}^+ with missing terms omitted.  Its
/// trace approximates h_i and it annihilates im A_{i+1} and (ker A_i)^perp.
DenseMatrix homology_projector(const ChainComplex& c,
                               const RankProfile& profile, std::size_t i);

PenroseResiduals penrose_residuals(const DenseMatrix& m,
                                   const DenseMatrix& pinv);
PenroseResiduals penrose_residuals(const RationalMatrix& m,
                                   const RationalMatrix& pinv);
PenroseResiduals penrose_residuals(const PrimeFieldMatrix& m,
                                   const PrimeFieldMatrix& pinv);

/// Exact pseudoinverse of every differential of an exact complex.
RationalPseudoinverse pinv_complex_exact(const RationalComplex& c);
PrimeFieldPseudoinverse pinv_complex_exact(const PrimeFieldComplex& c);

}  // namespace chainsvd
