#include <chainsvd/pseudoinverse.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "eigen_support.hpp"

namespace chainsvd {

namespace {

constexpr double kPinvConditionTol = 1e-13;

// Reduced row echelon form over the rationals; returns the pivot columns
// and leaves `a` reduced in place.
std::vector<std::size_t> rref(RationalMatrix& a) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
    std::size_t pivot = a.rows();
    for (std::size_t r = row; r < a.rows(); ++r) {
      if (sgn(a(r, col)) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot == a.rows()) continue;
    if (pivot != row) {
      for (std::size_t c = 0; c < a.cols(); ++c) {
        std::swap(a(row, c), a(pivot, c));
      }
    }
    const Rational inv = 1 / a(row, col);
    for (std::size_t c = col; c < a.cols(); ++c) a(row, c) *= inv;
    for (std::size_t r = 0; r < a.rows(); ++r) {
      if (r == row || sgn(a(r, col)) == 0) continue;
      const Rational factor = a(r, col);
      for (std::size_t c = col; c < a.cols(); ++c) {
        a(r, c) -= factor * a(row, c);
      }
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::optional<RationalMatrix> try_invert(const RationalMatrix& m) {
  const std::size_t n = m.rows();
  RationalMatrix aug(n, 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) aug(r, c) = m(r, c);
    aug(r, n + r) = 1;
  }
  // Singular inputs push pivots into the identity half.
  const std::vector<std::size_t> pivots = rref(aug);
  if (pivots.size() < n || pivots[n - 1] >= n) return std::nullopt;
  RationalMatrix inv(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) inv(r, c) = aug(r, n + c);
  }
  return inv;
}

std::vector<std::size_t> rref_mod_p(PrimeFieldMatrix& a) {
  const std::uint64_t p = a.modulus();
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
    std::size_t pivot = a.rows();
    for (std::size_t r = row; r < a.rows(); ++r) {
      if (a(r, col) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot == a.rows()) continue;
    if (pivot != row) {
      for (std::size_t c = 0; c < a.cols(); ++c) {
        const std::uint64_t tmp = a(row, c);
        a.set(row, c, a(pivot, c));
        a.set(pivot, c, tmp);
      }
    }
    const std::uint64_t inv = fp::inv(a(row, col), p);
    for (std::size_t c = col; c < a.cols(); ++c) {
      a.set(row, c, fp::mul(a(row, c), inv, p));
    }
    for (std::size_t r = 0; r < a.rows(); ++r) {
      if (r == row || a(r, col) == 0) continue;
      const std::uint64_t factor = a(r, col);
      for (std::size_t c = col; c < a.cols(); ++c) {
        a.set(r, c, fp::sub(a(r, c), fp::mul(factor, a(row, c), p), p));
      }
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::optional<PrimeFieldMatrix> try_invert_mod_p(const PrimeFieldMatrix& m) {
  const std::size_t n = m.rows();
  const std::uint64_t p = m.modulus();
  PrimeFieldMatrix aug(n, 2 * n, p);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) aug.set(r, c, m(r, c));
    aug.set(r, n + r, 1);
  }
  const std::vector<std::size_t> pivots = rref_mod_p(aug);
  if (pivots.size() < n || pivots[n - 1] >= n) return std::nullopt;
  PrimeFieldMatrix inv(n, n, p);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) inv.set(r, c, aug(r, n + c));
  }
  return inv;
}

double normalized_defect(const detail::EMatrix& defect,
                         const detail::EMatrix& reference) {
  const double scale =
      reference.size() > 0
          ? std::max(1.0, reference.cwiseAbs().maxCoeff())
          : 1.0;
  const double worst = defect.size() > 0 ? defect.cwiseAbs().maxCoeff() : 0.0;
  return worst / scale;
}

void check_profile(const ChainComplex& c, const RankProfile& profile) {
  if (profile.rank.size() != c.n() ||
      profile.homology.size() != c.n() + 1 ||
      homology_from_ranks(c.dims(), profile.rank) != profile.homology) {
    throw StructuralError(
        "rank profile is inconsistent with the complex dimensions");
  }
}

}  // namespace

DenseMatrix pinv_float(const DenseMatrix& m, std::size_t rank) {
  if (rank > std::min(m.rows(), m.cols())) {
    throw StructuralError("requested rank exceeds the matrix dimensions");
  }
  if (rank == 0 || m.rows() == 0 || m.cols() == 0) {
    return DenseMatrix(m.cols(), m.rows());
  }
  detail::FullSVD f = detail::svd_full(detail::to_eigen(m));
  const double top = f.sigma(0);
  const double cut = f.sigma(static_cast<Eigen::Index>(rank) - 1);
  if (cut < kPinvConditionTol * top || cut == 0.0) {
    throw NumericalError(
        "pseudoinverse at rank " + std::to_string(rank) +
        " is ill conditioned: sigma_r/sigma_1 = " +
        std::to_string(top > 0.0 ? cut / top : 0.0));
  }
  detail::EMatrix out = detail::EMatrix::Zero(
      static_cast<Eigen::Index>(m.cols()), static_cast<Eigen::Index>(m.rows()));
  for (std::size_t k = 0; k < rank; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    out += (1.0 / f.sigma(kk)) * f.v.col(kk) * f.u.col(kk).transpose();
  }
  return detail::from_eigen(out);
}

PseudoinverseComplex pinv_complex(const ChainComplex& c,
                                  const RankProfile& profile) {
  check_profile(c, profile);
  PseudoinverseComplex out;
  out.dims = c.dims();
  out.maps.reserve(c.n());
  for (std::size_t i = 1; i <= c.n(); ++i) {
    out.maps.push_back(pinv_float(c.differential(i), profile.rank[i - 1]));
  }
  return out;
}

RationalMatrix pinv_exact_rational(const RationalMatrix& m) {
  RationalMatrix reduced = m;
  const std::vector<std::size_t> pivots = rref(reduced);
  const std::size_t r = pivots.size();
  if (r == 0) return RationalMatrix(m.cols(), m.rows());

  // Full-rank factorization M = F G with F the pivot columns of M and G
  // the nonzero rows of the reduced form; then
  // M^+ = G^t (G G^t)^{-1} (F^t F)^{-1} F^t.
  RationalMatrix f(m.rows(), r);
  for (std::size_t c = 0; c < r; ++c) {
    for (std::size_t row = 0; row < m.rows(); ++row) {
      f(row, c) = m(row, pivots[c]);
    }
  }
  RationalMatrix g(r, m.cols());
  for (std::size_t row = 0; row < r; ++row) {
    for (std::size_t c = 0; c < m.cols(); ++c) g(row, c) = reduced(row, c);
  }

  const RationalMatrix gt = g.transpose();
  const RationalMatrix ft = f.transpose();
  auto ggt_inv = try_invert(g * gt);
  auto ftf_inv = try_invert(ft * f);
  if (!ggt_inv || !ftf_inv) {
    // Gram matrices of full-rank factors are positive definite over the
    // rationals; reaching this means the elimination above is broken.
    throw NumericalError("rational Gram matrix unexpectedly singular");
  }
  return gt * (*ggt_inv) * (*ftf_inv) * ft;
}

PrimeFieldMatrix pinv_prime_field(const PrimeFieldMatrix& m) {
  const std::uint64_t p = m.modulus();
  PrimeFieldMatrix reduced = m;
  const std::vector<std::size_t> pivots = rref_mod_p(reduced);
  const std::size_t r = pivots.size();
  if (r == 0) return PrimeFieldMatrix(m.cols(), m.rows(), p);

  PrimeFieldMatrix f(m.rows(), r, p);
  for (std::size_t c = 0; c < r; ++c) {
    for (std::size_t row = 0; row < m.rows(); ++row) {
      f.set(row, c, m(row, pivots[c]));
    }
  }
  PrimeFieldMatrix g(r, m.cols(), p);
  for (std::size_t row = 0; row < r; ++row) {
    for (std::size_t c = 0; c < m.cols(); ++c) g.set(row, c, reduced(row, c));
  }

  const PrimeFieldMatrix gt = g.transpose();
  const PrimeFieldMatrix ft = f.transpose();
  auto ggt_inv = try_invert_mod_p(g * gt);
  if (!ggt_inv) {
    throw FieldConditionError(
        "pseudoinverse does not exist over F_" + std::to_string(p) +
        ": the kernel meets its orthogonal complement (G G^t is singular)");
  }
  auto ftf_inv = try_invert_mod_p(ft * f);
  if (!ftf_inv) {
    throw FieldConditionError(
        "pseudoinverse does not exist over F_" + std::to_string(p) +
        ": the image meets its orthogonal complement (F^t F is singular)");
  }
  return gt * (*ggt_inv) * (*ftf_inv) * ft;
}

DenseMatrix homology_projector(const ChainComplex& c,
                               const RankProfile& profile, std::size_t i) {
  check_profile(c, profile);
  if (i > c.n()) {
    throw StructuralError("projector level out of range");
  }
  const auto size = static_cast<Eigen::Index>(c.dim(i));
  detail::EMatrix pi = detail::EMatrix::Identity(size, size);
  if (i >= 1) {
    const detail::EMatrix a = detail::to_eigen(c.differential(i));
    const detail::EMatrix ap =
        detail::to_eigen(pinv_float(c.differential(i), profile.rank[i - 1]));
    pi -= ap * a;
  }
  if (i + 1 <= c.n()) {
    const detail::EMatrix a = detail::to_eigen(c.differential(i + 1));
    const detail::EMatrix ap =
        detail::to_eigen(pinv_float(c.differential(i + 1), profile.rank[i]));
    pi -= a * ap;
  }
  return detail::from_eigen(pi);
}

PenroseResiduals penrose_residuals(const DenseMatrix& m,
                                   const DenseMatrix& pinv) {
  if (pinv.rows() != m.cols() || pinv.cols() != m.rows()) {
    throw StructuralError("pseudoinverse shape must be the transpose shape");
  }
  const detail::EMatrix a = detail::to_eigen(m);
  const detail::EMatrix p = detail::to_eigen(pinv);
  const detail::EMatrix ap = a * p;
  const detail::EMatrix pa = p * a;
  PenroseResiduals out;
  out.reproduce_m = normalized_defect(ap * a - a, a);
  out.reproduce_pinv = normalized_defect(pa * p - p, p);
  out.symmetry_mp = normalized_defect(ap.transpose() - ap, ap);
  out.symmetry_pm = normalized_defect(pa.transpose() - pa, pa);
  return out;
}

PenroseResiduals penrose_residuals(const RationalMatrix& m,
                                   const RationalMatrix& pinv) {
  if (pinv.rows() != m.cols() || pinv.cols() != m.rows()) {
    throw StructuralError("pseudoinverse shape must be the transpose shape");
  }
  const RationalMatrix mp = m * pinv;
  const RationalMatrix pm = pinv * m;
  PenroseResiduals out;
  out.reproduce_m = (mp * m == m) ? 0.0 : 1.0;
  out.reproduce_pinv = (pm * pinv == pinv) ? 0.0 : 1.0;
  out.symmetry_mp = (mp.transpose() == mp) ? 0.0 : 1.0;
  out.symmetry_pm = (pm.transpose() == pm) ? 0.0 : 1.0;
  return out;
}

PenroseResiduals penrose_residuals(const PrimeFieldMatrix& m,
                                   const PrimeFieldMatrix& pinv) {
  if (pinv.rows() != m.cols() || pinv.cols() != m.rows()) {
    throw StructuralError("pseudoinverse shape must be the transpose shape");
  }
  const PrimeFieldMatrix mp = m * pinv;
  const PrimeFieldMatrix pm = pinv * m;
  PenroseResiduals out;
  out.reproduce_m = (mp * m == m) ? 0.0 : 1.0;
  out.reproduce_pinv = (pm * pinv == pinv) ? 0.0 : 1.0;
  out.symmetry_mp = (mp.transpose() == mp) ? 0.0 : 1.0;
  out.symmetry_pm = (pm.transpose() == pm) ? 0.0 : 1.0;
  return out;
}

RationalPseudoinverse pinv_complex_exact(const RationalComplex& c) {
  RationalPseudoinverse out;
  out.dims = c.dims();
  out.maps.reserve(c.n());
  for (std::size_t i = 1; i <= c.n(); ++i) {
    out.maps.push_back(pinv_exact_rational(c.differential(i)));
  }
  return out;
}

PrimeFieldPseudoinverse pinv_complex_exact(const PrimeFieldComplex& c) {
  PrimeFieldPseudoinverse out;
  out.dims = c.dims();
  out.maps.reserve(c.n());
  for (std::size_t i = 1; i <= c.n(); ++i) {
    out.maps.push_back(pinv_prime_field(c.differential(i)));
  }
  return out;
}

}  // namespace chainsvd
