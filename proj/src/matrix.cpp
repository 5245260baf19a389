#include <chainsvd/matrix.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <utility>

#include "eigen_support.hpp"

namespace chainsvd {

namespace {

void check_shape(std::size_t rows, std::size_t cols, std::size_t entries) {
  if (entries != rows * cols) {
    throw StructuralError("entry count " + std::to_string(entries) +
                          " does not match shape " + std::to_string(rows) +
                          "x" + std::to_string(cols));
  }
}

void check_compatible(std::size_t lhs_cols, std::size_t rhs_rows) {
  if (lhs_cols != rhs_rows) {
    throw StructuralError("cannot multiply: " + std::to_string(lhs_cols) +
                          " columns against " + std::to_string(rhs_rows) +
                          " rows");
  }
}

void check_same_shape(std::size_t ar, std::size_t ac, std::size_t br,
                      std::size_t bc) {
  if (ar != br || ac != bc) {
    throw StructuralError("shape mismatch: " + std::to_string(ar) + "x" +
                          std::to_string(ac) + " vs " + std::to_string(br) +
                          "x" + std::to_string(bc));
  }
}

}  // namespace

Rational rational_from_string(const std::string& text) {
  if (text.empty()) throw ParseError("empty rational literal");
  mpq_class q;
  if (mpq_set_str(q.get_mpq_t(), text.c_str(), 10) != 0) {
    throw ParseError("malformed rational literal '" + text + "'");
  }
  if (sgn(Rational(q.get_den())) == 0) {
    throw ParseError("zero denominator in rational literal '" + text + "'");
  }
  q.canonicalize();
  return q;
}

std::string rational_to_string(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                          23ull, 29ull, 31ull, 37ull}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++s;
  }
  // These witnesses decide primality for every 64-bit integer.
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                          23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = fp::pow(a % n, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 0; i + 1 < s; ++i) {
      x = fp::mul(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace fp {

std::uint64_t pow(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
  std::uint64_t result = 1 % p;
  base %= p;
  while (exp > 0) {
    if (exp & 1) result = mul(result, base, p);
    base = mul(base, base, p);
    exp >>= 1;
  }
  return result;
}

std::uint64_t inv(std::uint64_t a, std::uint64_t p) {
  if (a % p == 0) throw StructuralError("zero has no inverse mod p");
  return pow(a, p - 2, p);
}

}  // namespace fp

// ---------------------------------------------------------------------------
// DenseMatrix

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  check_shape(rows_, cols_, entries_.size());
  for (double e : entries_) {
    if (!std::isfinite(e)) {
      throw StructuralError("matrix entries must be finite");
    }
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

DenseMatrix DenseMatrix::block(std::size_t row0, std::size_t col0,
                               std::size_t nrows, std::size_t ncols) const {
  if (row0 + nrows > rows_ || col0 + ncols > cols_) {
    throw StructuralError("block exceeds matrix bounds");
  }
  DenseMatrix b(nrows, ncols);
  for (std::size_t r = 0; r < nrows; ++r) {
    for (std::size_t c = 0; c < ncols; ++c) {
      b(r, c) = (*this)(row0 + r, col0 + c);
    }
  }
  return b;
}

double DenseMatrix::frobenius_norm() const {
  double sum = 0.0;
  for (double e : entries_) sum += e * e;
  return std::sqrt(sum);
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double e : entries_) m = std::max(m, std::abs(e));
  return m;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  check_compatible(a.cols(), b.rows());
  if (a.rows() == 0 || a.cols() == 0 || b.cols() == 0) {
    return DenseMatrix(a.rows(), b.cols());
  }
  return detail::from_eigen(detail::to_eigen(a) * detail::to_eigen(b));
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  check_same_shape(a.rows(), a.cols(), b.rows(), b.cols());
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.entries_.size(); ++i) {
    out.entries_[i] += b.entries_[i];
  }
  return out;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  check_same_shape(a.rows(), a.cols(), b.rows(), b.cols());
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.entries_.size(); ++i) {
    out.entries_[i] -= b.entries_[i];
  }
  return out;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
  DenseMatrix out = a;
  for (double& e : out.entries_) e *= s;
  return out;
}

// ---------------------------------------------------------------------------
// RationalMatrix

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, Rational(0)) {}

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols,
                               std::vector<Rational> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  check_shape(rows_, cols_, entries_.size());
  for (Rational& e : entries_) e.canonicalize();
}

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::from_integers(
    std::size_t rows, std::size_t cols, std::span<const long long> entries) {
  check_shape(rows, cols, entries.size());
  std::vector<Rational> values;
  values.reserve(entries.size());
  for (long long e : entries) {
    values.emplace_back(Rational(static_cast<long>(e)));
  }
  return RationalMatrix(rows, cols, std::move(values));
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

bool RationalMatrix::is_zero() const { return count_nonzero() == 0; }

std::size_t RationalMatrix::count_nonzero() const {
  std::size_t count = 0;
  for (const Rational& e : entries_) {
    if (sgn(e) != 0) ++count;
  }
  return count;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  check_compatible(a.cols(), b.rows());
  RationalMatrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Rational& ark = a(r, k);
      if (sgn(ark) == 0) continue;
      for (std::size_t c = 0; c < b.cols(); ++c) {
        out(r, c) += ark * b(k, c);
      }
    }
  }
  return out;
}

RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b) {
  check_same_shape(a.rows(), a.cols(), b.rows(), b.cols());
  RationalMatrix out = a;
  for (std::size_t i = 0; i < out.entries_.size(); ++i) {
    out.entries_[i] += b.entries_[i];
  }
  return out;
}

RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
  check_same_shape(a.rows(), a.cols(), b.rows(), b.cols());
  RationalMatrix out = a;
  for (std::size_t i = 0; i < out.entries_.size(); ++i) {
    out.entries_[i] -= b.entries_[i];
  }
  return out;
}

bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    if (a.entries_[i] != b.entries_[i]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// PrimeFieldMatrix

PrimeFieldMatrix::PrimeFieldMatrix(std::size_t rows, std::size_t cols,
                                   std::uint64_t modulus)
    : rows_(rows), cols_(cols), modulus_(modulus),
      entries_(rows * cols, 0) {
  if (!is_prime(modulus_)) {
    throw StructuralError("modulus " + std::to_string(modulus_) +
                          " is not prime");
  }
}

PrimeFieldMatrix::PrimeFieldMatrix(std::size_t rows, std::size_t cols,
                                   std::uint64_t modulus,
                                   std::vector<std::uint64_t> entries)
    : PrimeFieldMatrix(rows, cols, modulus) {
  check_shape(rows, cols, entries.size());
  for (std::uint64_t& e : entries) e %= modulus_;
  entries_ = std::move(entries);
}

PrimeFieldMatrix PrimeFieldMatrix::identity(std::size_t n,
                                            std::uint64_t modulus) {
  PrimeFieldMatrix m(n, n, modulus);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
  return m;
}

PrimeFieldMatrix PrimeFieldMatrix::from_integers(
    std::size_t rows, std::size_t cols, std::uint64_t modulus,
    std::span<const long long> entries) {
  check_shape(rows, cols, entries.size());
  PrimeFieldMatrix m(rows, cols, modulus);
  const auto p = static_cast<long long>(modulus);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    long long e = entries[i] % p;
    if (e < 0) e += p;
    m.entries_[i] = static_cast<std::uint64_t>(e);
  }
  return m;
}

PrimeFieldMatrix PrimeFieldMatrix::transpose() const {
  PrimeFieldMatrix t(cols_, rows_, modulus_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      t.entries_[c * rows_ + r] = (*this)(r, c);
    }
  }
  return t;
}

bool PrimeFieldMatrix::is_zero() const { return count_nonzero() == 0; }

std::size_t PrimeFieldMatrix::count_nonzero() const {
  std::size_t count = 0;
  for (std::uint64_t e : entries_) {
    if (e != 0) ++count;
  }
  return count;
}

PrimeFieldMatrix operator*(const PrimeFieldMatrix& a,
                           const PrimeFieldMatrix& b) {
  check_compatible(a.cols(), b.rows());
  if (a.modulus() != b.modulus()) {
    throw StructuralError("cannot multiply matrices over different fields");
  }
  const std::uint64_t p = a.modulus();
  PrimeFieldMatrix out(a.rows(), b.cols(), p);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const std::uint64_t ark = a(r, k);
      if (ark == 0) continue;
      for (std::size_t c = 0; c < b.cols(); ++c) {
        out.entries_[r * out.cols_ + c] = fp::add(
            out.entries_[r * out.cols_ + c], fp::mul(ark, b(k, c), p), p);
      }
    }
  }
  return out;
}

PrimeFieldMatrix operator+(const PrimeFieldMatrix& a,
                           const PrimeFieldMatrix& b) {
  check_same_shape(a.rows(), a.cols(), b.rows(), b.cols());
  if (a.modulus() != b.modulus()) {
    throw StructuralError("cannot add matrices over different fields");
  }
  PrimeFieldMatrix out = a;
  for (std::size_t i = 0; i < out.entries_.size(); ++i) {
    out.entries_[i] = fp::add(out.entries_[i], b.entries_[i], a.modulus());
  }
  return out;
}

PrimeFieldMatrix operator-(const PrimeFieldMatrix& a,
                           const PrimeFieldMatrix& b) {
  check_same_shape(a.rows(), a.cols(), b.rows(), b.cols());
  if (a.modulus() != b.modulus()) {
    throw StructuralError("cannot subtract matrices over different fields");
  }
  PrimeFieldMatrix out = a;
  for (std::size_t i = 0; i < out.entries_.size(); ++i) {
    out.entries_[i] = fp::sub(out.entries_[i], b.entries_[i], a.modulus());
  }
  return out;
}

bool operator==(const PrimeFieldMatrix& a, const PrimeFieldMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
         a.modulus_ == b.modulus_ && a.entries_ == b.entries_;
}

// ---------------------------------------------------------------------------
// Decompositions and exact ranks

PlainSVD svd_plain(const DenseMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw StructuralError("svd_plain requires a nonempty matrix");
  }
  detail::FullSVD f = detail::svd_full(detail::to_eigen(m));
  PlainSVD out;
  out.u = detail::from_eigen(f.u);
  out.v = detail::from_eigen(f.v);
  out.singular_values.assign(f.sigma.data(), f.sigma.data() + f.sigma.size());
  return out;
}

SymmetricEigen sym_eig(const DenseMatrix& s) {
  if (s.rows() != s.cols()) {
    throw StructuralError("sym_eig requires a square matrix");
  }
  detail::EMatrix e = detail::to_eigen(s);
  if (e.rows() > 0) {
    const double scale = e.cwiseAbs().maxCoeff();
    const double drift = (e - e.transpose()).cwiseAbs().maxCoeff();
    if (drift > 1e-10 * std::max(scale, 1e-300)) {
      throw StructuralError("matrix is not symmetric to working precision");
    }
    e = ((e + e.transpose()) / 2.0).eval();
  }
  Eigen::SelfAdjointEigenSolver<detail::EMatrix> solver(e);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigendecomposition did not converge");
  }
  // Eigen sorts ascending; expose non-increasing order, keeping the
  // original relative order of tied eigenvalues so that e.g. a zero
  // matrix yields the identity basis.
  const Eigen::Index n = e.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) order[static_cast<std::size_t>(j)] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) {
                     return solver.eigenvalues()(x) > solver.eigenvalues()(y);
                   });
  SymmetricEigen out;
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  detail::EMatrix q(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.eigenvalues[static_cast<std::size_t>(j)] = solver.eigenvalues()(src);
    q.col(j) = solver.eigenvectors().col(src);
    Eigen::Index at = 0;
    q.col(j).cwiseAbs().maxCoeff(&at);
    if (q(at, j) < 0.0) q.col(j) = -q.col(j);
  }
  out.q = detail::from_eigen(q);
  return out;
}

std::size_t exact_rank(const RationalMatrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (rows == 0 || cols == 0) return 0;

  // Clear denominators row by row, then run fraction-free elimination on
  // integers (each update is an exact division by the previous pivot).
  std::vector<std::vector<mpz_class>> a(rows, std::vector<mpz_class>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    mpz_class lcm = 1;
    for (std::size_t c = 0; c < cols; ++c) {
      mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(),
              m(r, c).get_den().get_mpz_t());
    }
    for (std::size_t c = 0; c < cols; ++c) {
      a[r][c] = m(r, c).get_num() * (lcm / m(r, c).get_den());
    }
  }

  mpz_class prev = 1;
  std::size_t rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t pivot = rows;
    for (std::size_t r = row; r < rows; ++r) {
      if (a[r][col] == 0) continue;
      if (pivot == rows ||
          cmp(abs(a[r][col]), abs(a[pivot][col])) < 0) {
        pivot = r;
      }
    }
    if (pivot == rows) continue;
    std::swap(a[row], a[pivot]);
    for (std::size_t r = row + 1; r < rows; ++r) {
      for (std::size_t c = col + 1; c < cols; ++c) {
        a[r][c] = (a[row][col] * a[r][c] - a[r][col] * a[row][c]) / prev;
      }
      a[r][col] = 0;
    }
    prev = a[row][col];
    ++rank;
    ++row;
  }
  return rank;
}

std::size_t exact_rank_mod_p(const PrimeFieldMatrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  if (rows == 0 || cols == 0) return 0;
  const std::uint64_t p = m.modulus();

  std::vector<std::vector<std::uint64_t>> a(rows,
                                            std::vector<std::uint64_t>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) a[r][c] = m(r, c);
  }

  std::size_t rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t pivot = rows;
    for (std::size_t r = row; r < rows; ++r) {
      if (a[r][col] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot == rows) continue;
    std::swap(a[row], a[pivot]);
    const std::uint64_t inv = fp::inv(a[row][col], p);
    for (std::size_t r = row + 1; r < rows; ++r) {
      if (a[r][col] == 0) continue;
      const std::uint64_t factor = fp::mul(a[r][col], inv, p);
      for (std::size_t c = col; c < cols; ++c) {
        a[r][c] = fp::sub(a[r][c], fp::mul(factor, a[row][c], p), p);
      }
    }
    ++rank;
    ++row;
  }
  return rank;
}

// ---------------------------------------------------------------------------
// Domain conversions

DenseMatrix to_double(const RationalMatrix& m) {
  DenseMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out(r, c) = m(r, c).get_d();
    }
  }
  return out;
}

RationalMatrix rationalize(const DenseMatrix& m) {
  RationalMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out(r, c) = Rational(m(r, c));
    }
  }
  return out;
}

PrimeFieldMatrix reduce_mod(const RationalMatrix& m, std::uint64_t p) {
  PrimeFieldMatrix out(m.rows(), m.cols(), p);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const Rational& q = m(r, c);
      const std::uint64_t den = mpz_fdiv_ui(q.get_den().get_mpz_t(), p);
      if (den == 0) {
        throw StructuralError(
            "entry denominator divisible by " + std::to_string(p) +
            " at (" + std::to_string(r) + ", " + std::to_string(c) + ")");
      }
      const std::uint64_t num = mpz_fdiv_ui(q.get_num().get_mpz_t(), p);
      out.set(r, c, fp::mul(num, fp::inv(den, p), p));
    }
  }
  return out;
}

}  // namespace chainsvd
