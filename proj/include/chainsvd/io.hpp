#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include <chainsvd/chain_complex.hpp>

namespace chainsvd {

enum class Field { real53, rational, prime_field };

/// A chain complex together with its coefficient field, as carried by the
/// JSON document format (schema_version "1"):
///
///   { "schema_version": "1",
///     "field": "R53" | "QQ" | "Fp",
///     "modulus": 101,                      // Fp only
///     "ranks": [c_0, ..., c_n],
///     "differentials": [A_1, ..., A_n] }   // row-major 2-D arrays
///
/// R53 entries are JSON numbers, QQ entries strings "p/q" (or "p"), Fp
/// entries reduced residues.  Serialization round-trips bit-exactly for
/// QQ and Fp and to full double precision for R53.
struct ComplexDocument {
  std::variant<ChainComplex, RationalComplex, PrimeFieldComplex> complex;

  explicit ComplexDocument(ChainComplex c) : complex(std::move(c)) {}
  explicit ComplexDocument(RationalComplex c) : complex(std::move(c)) {}
  explicit ComplexDocument(PrimeFieldComplex c) : complex(std::move(c)) {}

  Field field() const { return static_cast<Field>(complex.index()); }
  std::uint64_t modulus() const;
  const std::vector<std::size_t>& dims() const;
  std::size_t n() const { return dims().size() - 1; }
};

ComplexDocument parse_complex_document(std::string_view text);
std::string serialize_complex_document(const ComplexDocument& doc);

ComplexDocument load_complex_document(const std::filesystem::path& path);
void save_complex_document(const ComplexDocument& doc,
                           const std::filesystem::path& path);

}  // namespace chainsvd
