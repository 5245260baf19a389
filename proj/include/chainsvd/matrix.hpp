#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include <chainsvd/errors.hpp>

namespace chainsvd {

/// Arbitrary-precision rational scalar.  GMP keeps values canonical
/// (coprime numerator/denominator, positive denominator) under arithmetic.
using Rational = mpq_class;

/// Parses "p/q" or "p" with arbitrary-precision integers p, q.
/// Throws ParseError on malformed text or zero denominator.
Rational rational_from_string(const std::string& text);

/// Renders canonically as "p/q", or "p" when the denominator is one.
std::string rational_to_string(const Rational& value);

/// Deterministic Miller-Rabin primality test, exact for all 64-bit inputs.
bool is_prime(std::uint64_t n);

/// Dense real matrix with row-major storage.  Entries are finite on
/// construction; dimensions may be zero (empty matrices take part in
/// degenerate chain complexes).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return entries_[r * cols_ + c];
  }

  std::span<const double> entries() const { return entries_; }

  DenseMatrix transpose() const;
  DenseMatrix block(std::size_t row0, std::size_t col0, std::size_t nrows,
                    std::size_t ncols) const;

  double frobenius_norm() const;
  double max_abs() const;
  bool is_zero() const { return max_abs() == 0.0; }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
  friend DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
  friend DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
  friend DenseMatrix operator*(double s, const DenseMatrix& a);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

/// Dense matrix over the rationals, row-major, canonical entries.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols);
  RationalMatrix(std::size_t rows, std::size_t cols,
                 std::vector<Rational> entries);

  static RationalMatrix identity(std::size_t n);
  static RationalMatrix from_integers(std::size_t rows, std::size_t cols,
                                      std::span<const long long> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  const Rational& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }
  Rational& operator()(std::size_t r, std::size_t c) {
    return entries_[r * cols_ + c];
  }

  RationalMatrix transpose() const;
  bool is_zero() const;
  std::size_t count_nonzero() const;

  friend RationalMatrix operator*(const RationalMatrix& a,
                                  const RationalMatrix& b);
  friend RationalMatrix operator+(const RationalMatrix& a,
                                  const RationalMatrix& b);
  friend RationalMatrix operator-(const RationalMatrix& a,
                                  const RationalMatrix& b);
  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> entries_;
};

/// Modular arithmetic helpers on reduced residues.
namespace fp {

inline std::uint64_t add(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  std::uint64_t s = a + b;
  return (s >= p || s < a) ? s - p : s;
}

inline std::uint64_t sub(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return a >= b ? a - b : a + (p - b);
}

inline std::uint64_t neg(std::uint64_t a, std::uint64_t p) {
  return a == 0 ? 0 : p - a;
}

inline std::uint64_t mul(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(
      static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t pow(std::uint64_t base, std::uint64_t exp, std::uint64_t p);

/// Multiplicative inverse of a nonzero residue modulo a prime.
std::uint64_t inv(std::uint64_t a, std::uint64_t p);

}  // namespace fp

/// Dense matrix over the prime field F_p.  Entries are reduced residues
/// in [0, p); the modulus is validated to be prime on construction.
class PrimeFieldMatrix {
 public:
  PrimeFieldMatrix(std::size_t rows, std::size_t cols, std::uint64_t modulus);
  PrimeFieldMatrix(std::size_t rows, std::size_t cols, std::uint64_t modulus,
                   std::vector<std::uint64_t> entries);

  static PrimeFieldMatrix identity(std::size_t n, std::uint64_t modulus);
  static PrimeFieldMatrix from_integers(std::size_t rows, std::size_t cols,
                                        std::uint64_t modulus,
                                        std::span<const long long> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t modulus() const { return modulus_; }

  std::uint64_t operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }
  void set(std::size_t r, std::size_t c, std::uint64_t value) {
    entries_[r * cols_ + c] = value % modulus_;
  }

  PrimeFieldMatrix transpose() const;
  bool is_zero() const;
  std::size_t count_nonzero() const;

  friend PrimeFieldMatrix operator*(const PrimeFieldMatrix& a,
                                    const PrimeFieldMatrix& b);
  friend PrimeFieldMatrix operator+(const PrimeFieldMatrix& a,
                                    const PrimeFieldMatrix& b);
  friend PrimeFieldMatrix operator-(const PrimeFieldMatrix& a,
                                    const PrimeFieldMatrix& b);
  friend bool operator==(const PrimeFieldMatrix& a, const PrimeFieldMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::uint64_t modulus_ = 2;
  std::vector<std::uint64_t> entries_;
};

/// Full singular value decomposition M = U diag(sigma) V^t with square
/// orthogonal factors and singular values sorted non-increasing.
struct PlainSVD {
  DenseMatrix u;
  std::vector<double> singular_values;
  DenseMatrix v;
};

/// Eigendecomposition S = Q diag(lambda) Q^t of a symmetric matrix with
/// eigenvalues sorted non-increasing.
struct SymmetricEigen {
  std::vector<double> eigenvalues;
  DenseMatrix q;
};

/// Full SVD of a nonempty matrix.  Column signs follow a deterministic
/// convention (largest-magnitude entry of each right-singular column is
/// positive) so repeated runs agree bit for bit.
PlainSVD svd_plain(const DenseMatrix& m);

/// Symmetric eigendecomposition.  Inputs may deviate from exact symmetry
/// by at most 1e-10 * max|entry|; larger drift is rejected.
SymmetricEigen sym_eig(const DenseMatrix& s);

/// Exact rank over the rationals (fraction-free Bareiss elimination).
std::size_t exact_rank(const RationalMatrix& m);

/// Exact rank over F_p (Gaussian elimination).
std::size_t exact_rank_mod_p(const PrimeFieldMatrix& m);

/// Nearest-double image of a rational matrix.
DenseMatrix to_double(const RationalMatrix& m);

/// Exact rational image of a double matrix (doubles are dyadic rationals).
RationalMatrix rationalize(const DenseMatrix& m);

/// Reduction modulo p.  Fails if p divides the denominator of any entry.
PrimeFieldMatrix reduce_mod(const RationalMatrix& m, std::uint64_t p);

}  // namespace chainsvd
