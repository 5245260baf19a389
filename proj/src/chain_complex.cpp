#include <chainsvd/chain_complex.hpp>

#include <algorithm>
#include <cmath>

#include "eigen_support.hpp"

namespace chainsvd {

void Thresholds::check() const {
  for (double t : {rank_threshold, eigen_match_rel_tol, compose_tol}) {
    if (!(t > 0.0) || !(t < 1.0)) {
      throw StructuralError("thresholds must lie strictly between 0 and 1");
    }
  }
}

double validate(const ChainComplex& c) {
  double worst = 0.0;
  for (std::size_t i = 1; i < c.n(); ++i) {
    const DenseMatrix& a = c.differential(i);
    const DenseMatrix& b = c.differential(i + 1);
    const double scale =
        std::max(1.0, a.frobenius_norm() * b.frobenius_norm());
    worst = std::max(worst, (a * b).max_abs() / scale);
  }
  return worst;
}

double validate(const RationalComplex& c) {
  std::size_t nonzero = 0;
  for (std::size_t i = 1; i < c.n(); ++i) {
    nonzero += (c.differential(i) * c.differential(i + 1)).count_nonzero();
  }
  return static_cast<double>(nonzero);
}

double validate(const PrimeFieldComplex& c) {
  std::size_t nonzero = 0;
  for (std::size_t i = 1; i < c.n(); ++i) {
    nonzero += (c.differential(i) * c.differential(i + 1)).count_nonzero();
  }
  return static_cast<double>(nonzero);
}

DenseMatrix laplacian(const ChainComplex& c, std::size_t i) {
  if (i > c.n()) {
    throw StructuralError("laplacian level " + std::to_string(i) +
                          " exceeds top level " + std::to_string(c.n()));
  }
  const auto size = static_cast<Eigen::Index>(c.dim(i));
  detail::EMatrix delta = detail::EMatrix::Zero(size, size);
  if (i >= 1) {
    detail::EMatrix a = detail::to_eigen(c.differential(i));
    delta += a.transpose() * a;
  }
  if (i + 1 <= c.n()) {
    detail::EMatrix a = detail::to_eigen(c.differential(i + 1));
    delta += a * a.transpose();
  }
  delta = ((delta + delta.transpose()) / 2.0).eval();
  return detail::from_eigen(delta);
}

std::vector<std::size_t> homology_from_ranks(
    const std::vector<std::size_t>& dims,
    const std::vector<std::size_t>& ranks) {
  if (dims.size() < 2 || ranks.size() + 1 != dims.size()) {
    throw StructuralError(
        "expected dimensions c_0..c_n and ranks r_1..r_n with n >= 1");
  }
  const std::size_t n = ranks.size();
  std::vector<std::size_t> homology(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const long long r_in = i >= 1 ? static_cast<long long>(ranks[i - 1]) : 0;
    const long long r_out = i < n ? static_cast<long long>(ranks[i]) : 0;
    const long long h = static_cast<long long>(dims[i]) - r_in - r_out;
    if (h < 0) {
      throw RankDecisionError(
          "ranks force a negative homology dimension at level " +
          std::to_string(i));
    }
    homology[i] = static_cast<std::size_t>(h);
  }
  return homology;
}

std::vector<std::size_t> ranks_from_homology(
    const std::vector<std::size_t>& dims,
    const std::vector<std::size_t>& homology) {
  if (dims.size() < 2 || homology.size() != dims.size()) {
    throw StructuralError(
        "expected dimensions c_0..c_n and homology h_0..h_n with n >= 1");
  }
  const std::size_t n = dims.size() - 1;
  std::vector<std::size_t> ranks(n);
  long long r = 0;  // r_i while processing level i
  for (std::size_t i = 0; i < n; ++i) {
    const long long next = static_cast<long long>(dims[i]) - r -
                           static_cast<long long>(homology[i]);
    if (next < 0) throw InfeasibleRankError();
    ranks[i] = static_cast<std::size_t>(next);
    r = next;
  }
  if (static_cast<long long>(dims[n]) - r -
          static_cast<long long>(homology[n]) !=
      0) {
    throw InfeasibleRankError();
  }
  return ranks;
}

std::vector<std::size_t> exact_homology(const RationalComplex& c) {
  if (validate(c) != 0.0) {
    throw StructuralError(
        "exact_homology requires compositions to vanish exactly");
  }
  std::vector<std::size_t> ranks(c.n());
  for (std::size_t i = 1; i <= c.n(); ++i) {
    ranks[i - 1] = exact_rank(c.differential(i));
  }
  return homology_from_ranks(c.dims(), ranks);
}

ChainComplex to_double(const RationalComplex& c) {
  std::vector<DenseMatrix> diffs;
  diffs.reserve(c.n());
  for (const RationalMatrix& m : c.differentials()) diffs.push_back(to_double(m));
  return ChainComplex(std::move(diffs));
}

ChainComplex to_double(const PrimeFieldComplex& c) {
  std::vector<DenseMatrix> diffs;
  diffs.reserve(c.n());
  for (const PrimeFieldMatrix& m : c.differentials()) {
    DenseMatrix d(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t col = 0; col < m.cols(); ++col) {
        d(r, col) = static_cast<double>(m(r, col));
      }
    }
    diffs.push_back(std::move(d));
  }
  return ChainComplex(std::move(diffs));
}

RationalComplex rationalize(const ChainComplex& c) {
  std::vector<RationalMatrix> diffs;
  diffs.reserve(c.n());
  for (const DenseMatrix& m : c.differentials()) diffs.push_back(rationalize(m));
  return RationalComplex(std::move(diffs));
}

}  // namespace chainsvd
