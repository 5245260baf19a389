// Internal bridge between the public row-major matrix type and Eigen.
// Not installed; include only from library sources.
#pragma once

#include <Eigen/Dense>
#include <lapacke.h>

#include <chainsvd/errors.hpp>
#include <chainsvd/matrix.hpp>

namespace chainsvd::detail {

using EMatrix = Eigen::MatrixXd;
using ERowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline EMatrix to_eigen(const DenseMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) {
    return EMatrix(static_cast<Eigen::Index>(m.rows()),
                   static_cast<Eigen::Index>(m.cols()));
  }
  return Eigen::Map<const ERowMajor>(m.entries().data(),
                                     static_cast<Eigen::Index>(m.rows()),
                                     static_cast<Eigen::Index>(m.cols()));
}

inline DenseMatrix from_eigen(const EMatrix& e) {
  DenseMatrix out(static_cast<std::size_t>(e.rows()),
                  static_cast<std::size_t>(e.cols()));
  for (Eigen::Index r = 0; r < e.rows(); ++r) {
    for (Eigen::Index c = 0; c < e.cols(); ++c) {
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = e(r, c);
    }
  }
  return out;
}

struct FullSVD {
  EMatrix u;                  // rows x rows
  Eigen::VectorXd sigma;      // min(rows, cols), non-increasing
  EMatrix v;                  // cols x cols
};

// Full SVD that tolerates empty and zero matrices (identity factors, zero
// spectrum) and applies a deterministic sign convention: the
// largest-magnitude entry of each column of V is made positive, with the
// paired U column flipped along; trailing kernel columns of U are
// normalized the same way on their own.
inline FullSVD svd_full(const EMatrix& m) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  FullSVD out;
  if (rows == 0 || cols == 0) {
    out.u = EMatrix::Identity(rows, rows);
    out.v = EMatrix::Identity(cols, cols);
    out.sigma = Eigen::VectorXd(0);
    return out;
  }
  if (m.cwiseAbs().maxCoeff() == 0.0) {
    out.u = EMatrix::Identity(rows, rows);
    out.v = EMatrix::Identity(cols, cols);
    out.sigma = Eigen::VectorXd::Zero(std::min(rows, cols));
    return out;
  }
  // LAPACK's divide-and-conquer driver is considerably faster than Eigen's
  // at the sizes this library targets; fall back to Eigen on the rare
  // convergence failure.
  {
    ERowMajor a = m;
    ERowMajor u(rows, rows);
    ERowMajor vt(cols, cols);
    Eigen::VectorXd sigma(std::min(rows, cols));
    const lapack_int info = LAPACKE_dgesdd(
        LAPACK_ROW_MAJOR, 'A', static_cast<lapack_int>(rows),
        static_cast<lapack_int>(cols), a.data(),
        static_cast<lapack_int>(cols), sigma.data(), u.data(),
        static_cast<lapack_int>(rows), vt.data(),
        static_cast<lapack_int>(cols));
    if (info == 0) {
      out.u = u;
      out.v = vt.transpose();
      out.sigma = std::move(sigma);
    }
  }
  if (out.u.rows() == 0) {
    Eigen::BDCSVD<EMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) {
      throw NumericalError("singular value decomposition did not converge");
    }
    out.u = svd.matrixU();
    out.v = svd.matrixV();
    out.sigma = svd.singularValues();
  }

  const Eigen::Index k = std::min(rows, cols);
  auto dominant_sign = [](const auto& column) {
    Eigen::Index at = 0;
    column.cwiseAbs().maxCoeff(&at);
    return column(at) < 0.0 ? -1.0 : 1.0;
  };
  for (Eigen::Index j = 0; j < k; ++j) {
    const double s = dominant_sign(out.v.col(j));
    if (s < 0.0) {
      out.v.col(j) = -out.v.col(j);
      out.u.col(j) = -out.u.col(j);
    }
  }
  for (Eigen::Index j = k; j < rows; ++j) {
    if (dominant_sign(out.u.col(j)) < 0.0) out.u.col(j) = -out.u.col(j);
  }
  for (Eigen::Index j = k; j < cols; ++j) {
    if (dominant_sign(out.v.col(j)) < 0.0) out.v.col(j) = -out.v.col(j);
  }
  return out;
}

}  // namespace chainsvd::detail
