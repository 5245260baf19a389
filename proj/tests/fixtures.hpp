// Shared fixture: a 3 <- 5 <- 5 <- 3 integer complex used across the test
// suites, with reference values frozen at 4 to 6 significant digits and
// exact rational values alongside.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include <chainsvd/chain_complex.hpp>

namespace fixtures {

inline constexpr std::array<long long, 15> kA1 = {
    14, -4, 16,  3,  -9,   //
    14, -5, 20,  9,  1,    //
    4,  1,  -4,  -12, -24,
};

inline constexpr std::array<long long, 25> kA2 = {
    -43, -50, -27, -51, 9,    //
    12,  -24, 36,  0,   -12,  //
    35,  34,  27,  39,  -9,   //
    -3,  -10, 3,   -6,  -1,   //
    -11, -10, -9,  -12, 3,
};

inline constexpr std::array<long long, 15> kA3 = {
    -8, -16, -12,  //
    -5, -1,  -15,  //
    -1, 13,  -14,  //
    12, 12,  28,   //
    -1, 25,  -24,
};

// Reference singular values, 5 significant digits.
inline const std::vector<std::vector<double>> kSigma = {
    {34.489, 28.714},
    {114.08, 47.193},
    {45.993, 35.209},
};

inline const std::vector<std::size_t> kRanks = {2, 2, 2};
inline const std::vector<std::size_t> kHomology = {1, 1, 1, 1};

// U_1 to 4 valid digits.  Each column is determined only up
// to sign, so comparisons must be sign-insensitive per column.
inline constexpr std::array<double, 25> kU1 = {
    -.5694, .1646,  -.7702, -.1318, .1950,   //
    .1862,  .0303,  .0679,  -.9710, .1301,   //
    -.7448, -.1213, .6010,  -.0706, .2537,   //
    -.2631, -.4289, -.0790, -.1821, -.8411,  //
    .1309,  -.8794, -.1862, .0404,  .4162,
};

// Floating pseudoinverse of A_1 to 6 valid digits.
inline constexpr std::array<double, 15> kPinvA1Float = {
    .0121907,   .0114627,   .0050431,    //
    -.00328525, -.00426002, .00115014,   //
    .013141,    .0170401,   -.00460058,  //
    .00142545,  .00836608,  -.0144655,   //
    -.00981498, .00248076,  -.0291523,
};

// Exact pseudoinverse of A_1 over the rationals.
inline const std::array<const char*, 15> kPinvA1Exact = {
    "5978/490373",  "5621/490373",  "2473/490373",    //
    "-1611/490373", "-2089/490373", "564/490373",     //
    "6444/490373",  "8356/490373",  "-2256/490373",   //
    "699/490373",   "8205/980746",  "-14187/980746",  //
    "-4813/490373", "2433/980746",  "-28591/980746",
};

inline chainsvd::DenseMatrix dense(std::size_t rows, std::size_t cols,
                                   std::span<const long long> entries) {
  std::vector<double> e(entries.begin(), entries.end());
  return chainsvd::DenseMatrix(rows, cols, std::move(e));
}

inline std::vector<chainsvd::DenseMatrix> maps() {
  return {dense(3, 5, kA1), dense(5, 5, kA2), dense(5, 3, kA3)};
}

inline chainsvd::ChainComplex complex() {
  return chainsvd::ChainComplex(maps());
}

inline chainsvd::RationalComplex rational_complex() {
  using chainsvd::RationalMatrix;
  return chainsvd::RationalComplex({RationalMatrix::from_integers(3, 5, kA1),
                                    RationalMatrix::from_integers(5, 5, kA2),
                                    RationalMatrix::from_integers(5, 3, kA3)});
}

inline bool close_rel(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

// Column-wise comparison up to a global sign per column.
inline bool columns_match_up_to_sign(const chainsvd::DenseMatrix& got,
                                     std::span<const double> expected,
                                     double abs_tol) {
  const std::size_t rows = got.rows();
  const std::size_t cols = got.cols();
  if (expected.size() != rows * cols) return false;
  for (std::size_t c = 0; c < cols; ++c) {
    for (double sign : {1.0, -1.0}) {
      bool all = true;
      for (std::size_t r = 0; r < rows && all; ++r) {
        all = std::abs(sign * got(r, c) - expected[r * cols + c]) <= abs_tol;
      }
      if (all) goto next_column;
    }
    return false;
  next_column:;
  }
  return true;
}

}  // namespace fixtures
