#include <chainsvd/complex_svd.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "eigen_support.hpp"

namespace chainsvd {

namespace {

using detail::EMatrix;

// Conjugated differentials count as diagonal when every entry outside the
// expected block stays below this fraction of the largest singular value.
constexpr double kDiagonalityRelTol = 1e-6;

// Laplacian eigenvalues below this fraction of the spectral radius are
// treated as kernel (zero) eigenvalues.
constexpr double kZeroEigenvalueCutoff = 1e-8;

std::vector<std::size_t> chain_dims(const std::vector<DenseMatrix>& b) {
  if (b.empty()) {
    throw StructuralError("at least one differential is required");
  }
  std::vector<std::size_t> dims;
  dims.reserve(b.size() + 1);
  dims.push_back(b.front().rows());
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i].rows() != dims[i]) {
      throw StructuralError(
          "differential " + std::to_string(i + 1) + " has " +
          std::to_string(b[i].rows()) + " rows but the previous level has " +
          std::to_string(dims[i]) + " columns");
    }
    dims.push_back(b[i].cols());
  }
  return dims;
}

double compose_residual(const std::vector<DenseMatrix>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    const double scale =
        std::max(1.0, b[i].frobenius_norm() * b[i + 1].frobenius_norm());
    worst = std::max(worst, (b[i] * b[i + 1]).max_abs() / scale);
  }
  return worst;
}

EMatrix stack_rows(const EMatrix& top, const EMatrix& bottom) {
  EMatrix out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

struct SweepResult {
  std::vector<EMatrix> bases;                      // U_0..U_n
  std::vector<std::vector<double>> full_spectra;   // all sigma per level
  std::vector<std::size_t> ranks;                  // r_1..r_n
};

// Shared core of svd_by_projection and project_to_complex: walk the
// complex left to right, at each level decompose the part of B_i that is
// not already explained by the image of B_{i-1}, and split the right
// factor into the rows kept for the normal form (Q) and the rows passed
// on (P).  `choose_rank` sees the singular values and the admissible cap.
template <class RankRule>
SweepResult projection_sweep(const std::vector<DenseMatrix>& b,
                             const std::vector<std::size_t>& dims,
                             RankRule&& choose_rank) {
  const std::size_t n = b.size();
  SweepResult result;
  result.bases.resize(n + 1);
  result.full_spectra.resize(n);
  result.ranks.resize(n);

  EMatrix p = EMatrix::Identity(static_cast<Eigen::Index>(dims[0]),
                                static_cast<Eigen::Index>(dims[0]));
  EMatrix q(0, static_cast<Eigen::Index>(dims[0]));
  std::size_t rank_prev = 0;

  for (std::size_t i = 1; i <= n; ++i) {
    const EMatrix projected = p * detail::to_eigen(b[i - 1]);
    detail::FullSVD f = detail::svd_full(projected);

    const std::size_t cap =
        std::min(dims[i - 1] - rank_prev, dims[i]);
    std::vector<double> sigma(f.sigma.data(), f.sigma.data() + f.sigma.size());
    const std::size_t rank = choose_rank(sigma, cap, i);
    result.full_spectra[i - 1] = std::move(sigma);
    result.ranks[i - 1] = rank;

    const EMatrix vt = f.v.transpose();
    const auto split = static_cast<Eigen::Index>(rank);
    const EMatrix q_next = vt.topRows(split);
    const EMatrix p_next = vt.bottomRows(vt.rows() - split);

    // U_{i-1}^t = [ Q_{i-1} ; U~^t P_{i-1} ]
    result.bases[i - 1] = stack_rows(q, f.u.transpose() * p).transpose();
    if (i == n) result.bases[n] = f.v;

    p = p_next;
    q = q_next;
    rank_prev = rank;
  }
  return result;
}

EMatrix sigma_bar_eigen(const std::vector<std::size_t>& dims,
                        const std::vector<std::size_t>& ranks,
                        const std::vector<std::vector<double>>& sigma,
                        std::size_t i) {
  EMatrix out = EMatrix::Zero(static_cast<Eigen::Index>(dims[i - 1]),
                              static_cast<Eigen::Index>(dims[i]));
  const std::size_t row0 = i >= 2 ? ranks[i - 2] : 0;
  for (std::size_t k = 0; k < ranks[i - 1]; ++k) {
    out(static_cast<Eigen::Index>(row0 + k), static_cast<Eigen::Index>(k)) =
        sigma[i - 1][k];
  }
  return out;
}

double residual_against_normal_form(const std::vector<DenseMatrix>& b,
                                    const std::vector<EMatrix>& bases,
                                    const std::vector<std::size_t>& dims,
                                    const std::vector<std::size_t>& ranks,
                                    const std::vector<std::vector<double>>& sigma) {
  double sigma_max = 0.0;
  for (const auto& level : sigma) {
    if (!level.empty()) sigma_max = std::max(sigma_max, level.front());
  }
  double fallback = 1.0;
  for (const DenseMatrix& m : b) fallback = std::max(fallback, m.max_abs());
  const double scale = sigma_max > 0.0 ? sigma_max : fallback;

  double worst = 0.0;
  for (std::size_t i = 1; i <= b.size(); ++i) {
    const EMatrix conj =
        bases[i - 1].transpose() * detail::to_eigen(b[i - 1]) * bases[i];
    const EMatrix expected = sigma_bar_eigen(dims, ranks, sigma, i);
    const double defect = (conj - expected).cwiseAbs().maxCoeff();
    worst = std::max(worst, defect);
  }
  return worst / scale;
}

std::vector<std::vector<double>> truncate_spectra(
    const std::vector<std::vector<double>>& full,
    const std::vector<std::size_t>& ranks) {
  std::vector<std::vector<double>> out(full.size());
  for (std::size_t i = 0; i < full.size(); ++i) {
    out[i].assign(full[i].begin(),
                  full[i].begin() + static_cast<std::ptrdiff_t>(ranks[i]));
  }
  return out;
}

ComplexSVD assemble(const std::vector<DenseMatrix>& b,
                    const std::vector<std::size_t>& dims, SweepResult sweep,
                    SvdMethod method, double input_residual) {
  ComplexSVD d;
  d.method = method;
  d.input_compose_residual = input_residual;
  d.profile.rank = sweep.ranks;
  try {
    d.profile.homology = homology_from_ranks(dims, sweep.ranks);
  } catch (const RankDecisionError& e) {
    throw RankDecisionError(e.what(), sweep.full_spectra);
  }
  d.singular_values = truncate_spectra(sweep.full_spectra, sweep.ranks);
  d.bases.reserve(sweep.bases.size());
  for (const EMatrix& u : sweep.bases) d.bases.push_back(detail::from_eigen(u));
  d.normal_form_residual = residual_against_normal_form(
      b, sweep.bases, dims, d.profile.rank, d.singular_values);
  return d;
}

}  // namespace

std::vector<std::size_t> ComplexSVD::dims() const {
  std::vector<std::size_t> out;
  out.reserve(bases.size());
  for (const DenseMatrix& u : bases) out.push_back(u.rows());
  return out;
}

std::size_t rank_decision(std::span<const double> sigma, std::size_t cap,
                          double threshold) {
  if (!(threshold > 0.0) || !(threshold < 1.0)) {
    throw StructuralError("rank threshold must lie strictly between 0 and 1");
  }
  if (sigma.empty() || sigma.front() == 0.0) return 0;
  const std::size_t limit = std::min(cap, sigma.size());
  for (std::size_t j = 1; j < limit; ++j) {
    if (threshold * sigma[j - 1] >= sigma[j]) return j;
  }
  return limit;
}

std::size_t stable_singular_values(std::span<const double> a,
                                   std::span<const double> b, double rel_tol) {
  const std::size_t len = std::min(a.size(), b.size());
  for (std::size_t j = 0; j < len; ++j) {
    const double tol = rel_tol * std::max(a[j], b[j]);
    if (std::abs(a[j] - b[j]) > tol) return j;
  }
  return len;
}

ComplexSVD svd_by_projection(const std::vector<DenseMatrix>& b,
                             const Thresholds& t) {
  t.check();
  const std::vector<std::size_t> dims = chain_dims(b);
  const double input_residual = compose_residual(b);

  SweepResult sweep = projection_sweep(
      b, dims,
      [&](const std::vector<double>& sigma, std::size_t cap, std::size_t) {
        return rank_decision(sigma, cap, t.rank_threshold);
      });
  return assemble(b, dims, std::move(sweep), SvdMethod::projection,
                  input_residual);
}

ComplexSVD svd_by_laplacian(const std::vector<DenseMatrix>& b,
                            const Thresholds& t) {
  t.check();
  const std::vector<std::size_t> dims = chain_dims(b);
  const double input_residual = compose_residual(b);
  const std::size_t n = b.size();

  // Eigendecompose every Laplacian Delta_i = B_i^t B_i + B_{i+1} B_{i+1}^t.
  std::vector<std::vector<double>> lambda(n + 1);
  std::vector<EMatrix> q(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const auto size = static_cast<Eigen::Index>(dims[i]);
    EMatrix delta = EMatrix::Zero(size, size);
    if (i >= 1) {
      const EMatrix a = detail::to_eigen(b[i - 1]);
      delta += a.transpose() * a;
    }
    if (i + 1 <= n) {
      const EMatrix a = detail::to_eigen(b[i]);
      delta += a * a.transpose();
    }
    SymmetricEigen eig = sym_eig(detail::from_eigen(delta));
    lambda[i] = std::move(eig.eigenvalues);
    q[i] = detail::to_eigen(eig.q);
  }

  // Number of eigenvalues above the kernel cutoff, per level.
  std::vector<std::size_t> nonzero_count(n + 1, 0);
  for (std::size_t i = 0; i <= n; ++i) {
    const double top = lambda[i].empty() ? 0.0 : lambda[i].front();
    const double cutoff = kZeroEigenvalueCutoff * std::max(top, 0.0);
    if (top <= 0.0) continue;
    for (double v : lambda[i]) {
      if (v > cutoff) ++nonzero_count[i];
    }
  }

  // The matching below identifies eigenvalues by value alone, so any
  // repeated nonzero eigenvalue inside one spectrum is ambiguous.
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j + 1 < nonzero_count[i]; ++j) {
      const double hi = lambda[i][j];
      const double lo = lambda[i][j + 1];
      if (hi - lo < t.eigen_match_rel_tol * hi) {
        throw DegenerateSpectrumError(
            "repeated nonzero eigenvalue in Laplacian spectrum at level " +
                std::to_string(i) + ": " + std::to_string(hi) + " vs " +
                std::to_string(lo),
            i, hi, lo);
      }
    }
  }

  // Greedy two-pointer matching of neighbouring spectra; matched values
  // are the squared singular values shared by Delta_{i-1} and Delta_i.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> matches(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const std::vector<double>& a = lambda[i - 1];
    const std::vector<double>& bb = lambda[i];
    const std::size_t na = nonzero_count[i - 1];
    const std::size_t nb = nonzero_count[i];
    std::size_t ia = 0;
    std::size_t ib = 0;
    while (ia < na && ib < nb) {
      const double va = a[ia];
      const double vb = bb[ib];
      if (std::abs(va - vb) <= t.eigen_match_rel_tol * std::max(va, vb)) {
        // Ties broken by the nearest value: prefer the next candidate on
        // either side if it is strictly closer and still admissible.
        if (ib + 1 < nb && std::abs(bb[ib + 1] - va) < std::abs(vb - va) &&
            std::abs(bb[ib + 1] - va) <=
                t.eigen_match_rel_tol * std::max(va, bb[ib + 1])) {
          ++ib;
          continue;
        }
        if (ia + 1 < na && std::abs(a[ia + 1] - vb) < std::abs(va - vb) &&
            std::abs(a[ia + 1] - vb) <=
                t.eigen_match_rel_tol * std::max(a[ia + 1], vb)) {
          ++ia;
          continue;
        }
        matches[i - 1].emplace_back(ia, ib);
        ++ia;
        ++ib;
      } else if (va > vb) {
        ++ia;
      } else {
        ++ib;
      }
    }
  }

  std::vector<std::size_t> ranks(n);
  for (std::size_t i = 0; i < n; ++i) ranks[i] = matches[i].size();

  // Permute each eigenbasis to [matched-left | matched-right | rest].
  // matched-left are the eigenvectors whose eigenvalues also occur one
  // level down (they span the coimage of B_i); matched-right occur one
  // level up (image of B_{i+1}).  Both groups keep their descending order
  // so that the k-th matched pair lines up across the two levels.
  std::vector<EMatrix> bases(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const std::size_t size = dims[i];
    std::vector<char> taken(lambda[i].size(), 0);
    std::vector<std::size_t> order;
    order.reserve(size);
    if (i >= 1) {
      for (const auto& [ia, ib] : matches[i - 1]) {
        if (taken[ib]) {
          throw RankDecisionError(
              "eigenvalue matched on both sides at level " +
                  std::to_string(i),
              lambda);
        }
        taken[ib] = 1;
        order.push_back(ib);
      }
    }
    if (i < n) {
      for (const auto& [ia, ib] : matches[i]) {
        if (taken[ia]) {
          throw RankDecisionError(
              "eigenvalue matched on both sides at level " +
                  std::to_string(i),
              lambda);
        }
        taken[ia] = 1;
        order.push_back(ia);
      }
    }
    for (std::size_t j = 0; j < lambda[i].size(); ++j) {
      if (!taken[j]) order.push_back(j);
    }
    EMatrix permuted(static_cast<Eigen::Index>(size),
                     static_cast<Eigen::Index>(size));
    for (std::size_t j = 0; j < order.size(); ++j) {
      permuted.col(static_cast<Eigen::Index>(j)) =
          q[i].col(static_cast<Eigen::Index>(order[j]));
    }
    bases[i] = std::move(permuted);
  }

  ComplexSVD d;
  d.method = SvdMethod::laplacian;
  d.input_compose_residual = input_residual;
  d.profile.rank = ranks;
  try {
    d.profile.homology = homology_from_ranks(dims, ranks);
  } catch (const RankDecisionError& e) {
    throw RankDecisionError(e.what(), lambda);
  }

  // Conjugate level by level; make the diagonal nonnegative by flipping
  // coimage columns (this never disturbs the levels already fixed), then
  // read off the singular values and the off-pattern mass.
  d.singular_values.assign(n, {});
  double sigma_max = 0.0;
  double off_max = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    EMatrix conj =
        bases[i - 1].transpose() * detail::to_eigen(b[i - 1]) * bases[i];
    const std::size_t row0 = i >= 2 ? ranks[i - 2] : 0;
    std::vector<double>& sigma = d.singular_values[i - 1];
    sigma.resize(ranks[i - 1]);
    for (std::size_t k = 0; k < ranks[i - 1]; ++k) {
      const auto rk = static_cast<Eigen::Index>(row0 + k);
      const auto ck = static_cast<Eigen::Index>(k);
      if (conj(rk, ck) < 0.0) {
        bases[i].col(ck) = -bases[i].col(ck);
        conj.col(ck) = -conj.col(ck);
      }
      sigma[k] = conj(rk, ck);
      if (sigma[k] == 0.0) {
        throw NumericalError(
            "matched eigenvalue produced a zero singular value at level " +
            std::to_string(i));
      }
      sigma_max = std::max(sigma_max, sigma[k]);
      conj(rk, ck) = 0.0;  // what remains is off-pattern mass
    }
    if (conj.size() > 0) {
      off_max = std::max(off_max, conj.cwiseAbs().maxCoeff());
    }
  }
  if (off_max > kDiagonalityRelTol * sigma_max) {
    throw NumericalError(
        "conjugated differentials are not diagonal: off-pattern mass " +
        std::to_string(off_max) + " against largest singular value " +
        std::to_string(sigma_max));
  }

  d.bases.reserve(bases.size());
  for (const EMatrix& u : bases) d.bases.push_back(detail::from_eigen(u));
  d.normal_form_residual = residual_against_normal_form(
      b, bases, dims, d.profile.rank, d.singular_values);
  return d;
}

DenseMatrix sigma_bar(const ComplexSVD& d, std::size_t i) {
  if (i < 1 || i > d.n()) {
    throw StructuralError("sigma_bar level out of range");
  }
  return detail::from_eigen(
      sigma_bar_eigen(d.dims(), d.profile.rank, d.singular_values, i));
}

double normal_form_residual(const std::vector<DenseMatrix>& b,
                            const ComplexSVD& d) {
  const std::vector<std::size_t> dims = chain_dims(b);
  if (dims != d.dims() || b.size() != d.n()) {
    throw StructuralError(
        "decomposition shape does not match the given differentials");
  }
  std::vector<EMatrix> bases;
  bases.reserve(d.bases.size());
  for (const DenseMatrix& u : d.bases) bases.push_back(detail::to_eigen(u));
  return residual_against_normal_form(b, bases, dims, d.profile.rank,
                                      d.singular_values);
}

ComplexSVD make_special_orthogonal(const ComplexSVD& d) {
  const std::size_t n = d.n();
  if (d.bases.size() != n + 1) {
    throw StructuralError("decomposition is missing basis matrices");
  }
  const std::vector<std::size_t> dims = d.dims();

  std::vector<EMatrix> bases;
  bases.reserve(n + 1);
  for (const DenseMatrix& u : d.bases) bases.push_back(detail::to_eigen(u));

  // Parity of each basis: true when det U_i = -1.
  std::vector<char> parity(n + 1, 0);
  for (std::size_t i = 0; i <= n; ++i) {
    if (bases[i].rows() == 0) continue;
    parity[i] = bases[i].determinant() < 0.0 ? 1 : 0;
  }

  // Two kinds of flips keep the normal form intact: negating a homology
  // column of one U_i (possible when h_i >= 1), and negating column k of
  // U_i together with column r_{i-1}+k of U_{i-1} (possible when r_i >= 1,
  // flipping both parities).  Paired flips connect neighbouring levels, so
  // parity can be shuttled along stretches of positive rank; each stretch
  // needs either even total parity or one homology column to dump it on.
  std::vector<std::pair<std::size_t, std::size_t>> segments;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    const bool edge_right = i < n && d.profile.rank[i] >= 1;
    if (!edge_right) {
      segments.emplace_back(start, i);
      start = i + 1;
    }
  }

  for (const auto& [a, z] : segments) {
    int total = 0;
    for (std::size_t i = a; i <= z; ++i) total ^= parity[i];
    if (total != 0) {
      std::size_t donor = n + 1;
      for (std::size_t i = a; i <= z; ++i) {
        if (d.profile.homology[i] >= 1) {
          donor = i;
          break;
        }
      }
      if (donor == n + 1) {
        throw SignFreedomError(
            "cannot reach determinant +1 on levels " + std::to_string(a) +
            ".." + std::to_string(z) +
            ": odd sign parity and no homology column to absorb it");
      }
      // The homology columns sit at the tail of U_i.
      bases[donor].col(static_cast<Eigen::Index>(dims[donor] - 1)) =
          -bases[donor].col(static_cast<Eigen::Index>(dims[donor] - 1));
      parity[donor] ^= 1;
    }
    int carry = 0;
    for (std::size_t i = a; i < z; ++i) {
      if ((parity[i] ^ carry) != 0) {
        // Paired flip across the differential between levels i and i+1.
        const std::size_t row_col = i >= 1 ? d.profile.rank[i - 1] : 0;
        bases[i].col(static_cast<Eigen::Index>(row_col)) =
            -bases[i].col(static_cast<Eigen::Index>(row_col));
        bases[i + 1].col(0) = -bases[i + 1].col(0);
        carry = 1;
      } else {
        carry = 0;
      }
    }
  }

  ComplexSVD out = d;
  out.bases.clear();
  out.bases.reserve(n + 1);
  for (const EMatrix& u : bases) out.bases.push_back(detail::from_eigen(u));
  return out;
}

ChainComplex project_to_complex(const std::vector<DenseMatrix>& b,
                                const std::vector<std::size_t>& homology) {
  const std::vector<std::size_t> dims = chain_dims(b);
  const std::vector<std::size_t> ranks = ranks_from_homology(dims, homology);

  SweepResult sweep = projection_sweep(
      b, dims,
      [&](const std::vector<double>& sigma, std::size_t cap, std::size_t i) {
        const std::size_t rank = ranks[i - 1];
        if (rank > std::min(cap, sigma.size())) {
          throw StructuralError(
              "prescribed rank exceeds the available singular values at "
              "level " +
              std::to_string(i));
        }
        return rank;
      });

  const std::vector<std::vector<double>> sigma =
      truncate_spectra(sweep.full_spectra, ranks);
  std::vector<DenseMatrix> diffs;
  diffs.reserve(b.size());
  for (std::size_t i = 1; i <= b.size(); ++i) {
    const EMatrix a = sweep.bases[i - 1] *
                      sigma_bar_eigen(dims, ranks, sigma, i) *
                      sweep.bases[i].transpose();
    diffs.push_back(detail::from_eigen(a));
  }
  return ChainComplex(std::move(diffs));
}

}  // namespace chainsvd
