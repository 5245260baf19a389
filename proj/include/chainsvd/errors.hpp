#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace chainsvd {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatches, invalid construction arguments,
/// violated preconditions.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A floating-point routine could not produce a trustworthy result
/// (non-convergence, ill-conditioned rank, diagonalisation failure).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Document or text input that could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Numerical rank choices turned out to be mutually inconsistent
/// (negative homology dimension).  Carries the spectra that led to the
/// decision so callers can inspect or re-threshold them.
class RankDecisionError : public Error {
 public:
  explicit RankDecisionError(const std::string& message,
                             std::vector<std::vector<double>> spectra = {})
      : Error(message), spectra(std::move(spectra)) {}

  std::vector<std::vector<double>> spectra;
};

/// The requested homology dimensions admit no rank profile.
class InfeasibleRankError : public Error {
 public:
  InfeasibleRankError() : Error("The rank conditions cannot be satisfied.") {}
};

/// A Laplacian spectrum contains a repeated nonzero eigenvalue, so the
/// eigenvalue-matching strategy cannot identify singular values reliably.
class DegenerateSpectrumError : public Error {
 public:
  DegenerateSpectrumError(const std::string& message, std::size_t level,
                          double value_a, double value_b)
      : Error(message), level(level), value_a(value_a), value_b(value_b) {}

  std::size_t level = 0;
  double value_a = 0.0;
  double value_b = 0.0;
};

/// No combination of admissible sign flips can make every basis special
/// orthogonal.
class SignFreedomError : public Error {
 public:
  using Error::Error;
};

/// A pseudoinverse over a prime field does not exist because a kernel or
/// image intersects its own orthogonal complement nontrivially.
class FieldConditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace chainsvd
