#pragma once

#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <chainsvd/matrix.hpp>

namespace chainsvd {

/// A finite chain complex presented by its differentials
///
///   C_0 <-- A_1 -- C_1 <-- A_2 -- ... <-- A_n -- C_n
///
/// where A_i has shape c_{i-1} x c_i.  Construction derives the space
/// dimensions c_0..c_n from the matrices and rejects incompatible shapes;
/// whether consecutive differentials actually compose to zero is measured
/// separately by validate().  At least one differential is required, and
/// zero-dimensional spaces are allowed.
template <class Mat>
class BasicComplex {
 public:
  explicit BasicComplex(std::vector<Mat> differentials)
      : diffs_(std::move(differentials)) {
    if (diffs_.empty()) {
      throw StructuralError("a chain complex needs at least one differential");
    }
    dims_.reserve(diffs_.size() + 1);
    dims_.push_back(diffs_.front().rows());
    for (std::size_t i = 0; i < diffs_.size(); ++i) {
      if (diffs_[i].rows() != dims_[i]) {
        throw StructuralError(
            "differential " + std::to_string(i + 1) + " has " +
            std::to_string(diffs_[i].rows()) + " rows but differential " +
            std::to_string(i) + " has " + std::to_string(dims_[i]) +
            " columns");
      }
      dims_.push_back(diffs_[i].cols());
    }
    if constexpr (std::is_same_v<Mat, PrimeFieldMatrix>) {
      for (std::size_t i = 1; i < diffs_.size(); ++i) {
        if (diffs_[i].modulus() != diffs_[0].modulus()) {
          throw StructuralError("differential " + std::to_string(i + 1) +
                                " uses a different modulus");
        }
      }
    }
  }

  /// Number of differentials n (the complex has n+1 spaces).
  std::size_t n() const { return diffs_.size(); }

  /// Space dimensions c_0..c_n.
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t dim(std::size_t i) const { return dims_.at(i); }

  /// Differential A_i for i in [1, n].
  const Mat& differential(std::size_t i) const { return diffs_.at(i - 1); }
  const std::vector<Mat>& differentials() const { return diffs_; }

 private:
  std::vector<Mat> diffs_;
  std::vector<std::size_t> dims_;
};

using ChainComplex = BasicComplex<DenseMatrix>;
using RationalComplex = BasicComplex<RationalMatrix>;
using PrimeFieldComplex = BasicComplex<PrimeFieldMatrix>;

/// Numerical ranks r_1..r_n of the differentials together with the
/// homology dimensions h_0..h_n they induce.
struct RankProfile {
  std::vector<std::size_t> rank;
  std::vector<std::size_t> homology;

  friend bool operator==(const RankProfile&, const RankProfile&) = default;
};

/// Tolerances shared by the floating-point pipelines.  All three must be
/// strictly positive and below one.
struct Thresholds {
  double rank_threshold = 1e-4;
  double eigen_match_rel_tol = 1e-4;
  double compose_tol = 1e-8;

  void check() const;
};

/// Largest normalized composition residual
/// max_i ||A_i A_{i+1}||_max / max(1, ||A_i||_F ||A_{i+1}||_F); zero for
/// n = 1.  A value above a composition tolerance means the matrices are
/// only approximately a complex.
double validate(const ChainComplex& c);

/// Exact composition check: 0.0 when every product A_i A_{i+1} vanishes
/// identically, otherwise the total number of nonzero product entries.
double validate(const RationalComplex& c);
double validate(const PrimeFieldComplex& c);

/// Chain Laplacian  A_i^t A_i + A_{i+1} A_{i+1}^t  at level i in [0, n],
/// with missing outer differentials treated as zero.  The result is
/// symmetrized exactly.
DenseMatrix laplacian(const ChainComplex& c, std::size_t i);

/// h_i = c_i - r_i - r_{i+1} with virtual r_0 = r_{n+1} = 0.
/// A negative h_i means the ranks are inconsistent with the dimensions.
std::vector<std::size_t> homology_from_ranks(
    const std::vector<std::size_t>& dims, const std::vector<std::size_t>& ranks);

/// Inverse recursion r_{i+1} = c_i - r_i - h_i, feasible only when it
/// closes with r_{n+1} = 0 and never goes negative.
std::vector<std::size_t> ranks_from_homology(
    const std::vector<std::size_t>& dims,
    const std::vector<std::size_t>& homology);

/// Exact homology dimensions of an exact complex (validate(c) must be 0).
std::vector<std::size_t> exact_homology(const RationalComplex& c);

ChainComplex to_double(const RationalComplex& c);
ChainComplex to_double(const PrimeFieldComplex& c);
RationalComplex rationalize(const ChainComplex& c);

}  // namespace chainsvd
