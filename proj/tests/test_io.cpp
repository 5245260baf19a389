#include <doctest.h>

#include <array>
#include <filesystem>
#include <string>
#include <variant>

#include <chainsvd/generators.hpp>
#include <chainsvd/io.hpp>

#include "fixtures.hpp"

using namespace chainsvd;

namespace {

// Handwritten documents, mutated per test so each failure mode is isolated.
const char* kRationalDoc = R"({
  "schema_version": "1",
  "field": "QQ",
  "ranks": [1, 2],
  "differentials": [[["1", "1/2"]]]
})";

const char* kRealDoc = R"({
  "schema_version": "1",
  "field": "R53",
  "ranks": [1, 1],
  "differentials": [[[2.5]]]
})";

const char* kPrimeDoc = R"({
  "schema_version": "1",
  "field": "Fp",
  "modulus": 7,
  "ranks": [1, 1],
  "differentials": [[[3]]]
})";

std::string swap_once(std::string text, const std::string& from,
                      const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("rational documents round-trip bit-exactly") {
  GeneratorConfig cfg;
  cfg.seed = 17;
  const RationalComplex c = random_complex({1, 0, 1}, {2, 3}, cfg);
  const ComplexDocument doc{c};
  CHECK(doc.field() == Field::rational);
  CHECK(doc.n() == 2);
  CHECK(doc.modulus() == 0);

  const std::string text = serialize_complex_document(doc);
  const ComplexDocument back = parse_complex_document(text);
  REQUIRE(back.field() == Field::rational);
  const auto& rc = std::get<RationalComplex>(back.complex);
  for (std::size_t i = 1; i <= c.n(); ++i) {
    CHECK(rc.differential(i) == c.differential(i));
  }

  // Awkward fractions survive.
  RationalMatrix m(1, 2);
  m(0, 0) = Rational(-7, 3);
  m(0, 1) = rational_from_string("12345678901234567890/7");
  const ComplexDocument frac{RationalComplex({m})};
  const ComplexDocument fback =
      parse_complex_document(serialize_complex_document(frac));
  CHECK(std::get<RationalComplex>(fback.complex).differential(1) == m);
}

TEST_CASE("prime field documents round-trip with their modulus") {
  const PrimeFieldMatrix a = PrimeFieldMatrix::from_integers(
      2, 3, 101, std::array<long long, 6>{1, -5, 40, 100, 0, 7});
  const ComplexDocument doc{PrimeFieldComplex({a})};
  CHECK(doc.field() == Field::prime_field);
  CHECK(doc.modulus() == 101);

  const std::string text = serialize_complex_document(doc);
  CHECK(text.find("\"modulus\": 101") != std::string::npos);
  const ComplexDocument back = parse_complex_document(text);
  CHECK(std::get<PrimeFieldComplex>(back.complex).differential(1) == a);
}

TEST_CASE("floating documents round-trip to full double precision") {
  const ChainComplex c = perturb(fixtures::complex(), 1e-3, 3);
  const ComplexDocument doc{c};
  CHECK(doc.field() == Field::real53);
  CHECK(doc.modulus() == 0);

  const ComplexDocument back =
      parse_complex_document(serialize_complex_document(doc));
  const auto& cc = std::get<ChainComplex>(back.complex);
  for (std::size_t i = 1; i <= c.n(); ++i) {
    CHECK((cc.differential(i) - c.differential(i)).max_abs() == 0.0);
  }
}

TEST_CASE("parser rejects structurally broken JSON") {
  CHECK_NOTHROW(parse_complex_document(kRationalDoc));

  CHECK_THROWS_AS(parse_complex_document(""), ParseError);
  CHECK_THROWS_AS(parse_complex_document("{"), ParseError);
  CHECK_THROWS_AS(parse_complex_document("[1, 2]"), ParseError);
  const std::string good = kRationalDoc;
  CHECK_THROWS_AS(parse_complex_document(good.substr(0, good.size() / 2)),
                  ParseError);
}

TEST_CASE("parser pins the schema version to the string \"1\"") {
  CHECK_THROWS_WITH_AS(
      parse_complex_document(swap_once(kRationalDoc, "\"1\",", "\"2\",")),
      "unsupported or missing schema_version; expected \"1\"", ParseError);
  CHECK_THROWS_AS(
      parse_complex_document(swap_once(kRationalDoc, "\"1\",", "1,")),
      ParseError);
  CHECK_THROWS_AS(
      parse_complex_document(
          swap_once(kRationalDoc, "\"schema_version\"", "\"version\"")),
      ParseError);
}

TEST_CASE("parser rejects unknown or missing fields") {
  CHECK_THROWS_AS(
      parse_complex_document(swap_once(kRationalDoc, "\"QQ\"", "\"GF9\"")),
      ParseError);
  CHECK_THROWS_AS(
      parse_complex_document(swap_once(kRationalDoc, "\"field\"", "\"ring\"")),
      ParseError);
}

TEST_CASE("parser enforces rank and shape consistency") {
  // Too few ranks.
  CHECK_THROWS_AS(
      parse_complex_document(swap_once(kRationalDoc, "[1, 2]", "[2]")),
      ParseError);
  // Ranks disagreeing with the differential's shape.
  CHECK_THROWS_AS(
      parse_complex_document(swap_once(kRationalDoc, "[1, 2]", "[1, 3]")),
      ParseError);
  CHECK_THROWS_AS(
      parse_complex_document(swap_once(kRationalDoc, "[1, 2]", "[2, 2]")),
      ParseError);
  // Negative and non-integer ranks.
  CHECK_THROWS_AS(
      parse_complex_document(swap_once(kRationalDoc, "[1, 2]", "[1, -2]")),
      ParseError);
  CHECK_THROWS_AS(
      parse_complex_document(swap_once(kRationalDoc, "[1, 2]", "[1, 2.5]")),
      ParseError);
  // Wrong number of differentials for the rank list.
  CHECK_THROWS_AS(
      parse_complex_document(
          swap_once(kRationalDoc, "\"ranks\": [1, 2]", "\"ranks\": [1, 2, 1]")),
      ParseError);
  // Missing pieces.
  CHECK_THROWS_AS(
      parse_complex_document(swap_once(kRationalDoc, "\"ranks\"", "\"sizes\"")),
      ParseError);
  CHECK_THROWS_AS(
      parse_complex_document(
          swap_once(kRationalDoc, "\"differentials\"", "\"maps\"")),
      ParseError);
}

TEST_CASE("field-specific entry rules are enforced") {
  // QQ entries must be rational strings.
  CHECK_THROWS_AS(
      parse_complex_document(swap_once(kRationalDoc, "\"1/2\"", "0.5")),
      ParseError);
  CHECK_THROWS_AS(
      parse_complex_document(swap_once(kRationalDoc, "\"1/2\"", "\"1/0\"")),
      ParseError);
  CHECK_THROWS_AS(
      parse_complex_document(swap_once(kRationalDoc, "\"1/2\"", "\"x\"")),
      ParseError);

  // R53 entries must be numbers, never strings.
  CHECK_NOTHROW(parse_complex_document(kRealDoc));
  CHECK_THROWS_AS(
      parse_complex_document(swap_once(kRealDoc, "2.5", "\"2.5\"")),
      ParseError);

  // Fp documents need a prime modulus and integer entries.
  CHECK_NOTHROW(parse_complex_document(kPrimeDoc));
  CHECK_THROWS_AS(
      parse_complex_document(
          swap_once(kPrimeDoc, "\"modulus\": 7", "\"modulus\": 6")),
      ParseError);
  CHECK_THROWS_AS(
      parse_complex_document(
          swap_once(kPrimeDoc, "\"modulus\": 7", "\"modulus\": 1")),
      ParseError);
  CHECK_THROWS_AS(
      parse_complex_document(
          swap_once(kPrimeDoc, "\"modulus\": 7,\n", "")),
      ParseError);
  CHECK_THROWS_AS(
      parse_complex_document(swap_once(kPrimeDoc, "[[[3]]]", "[[[3.5]]]")),
      ParseError);
}

TEST_CASE("file round-trip and filesystem failures") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "chainsvd_io_test";
  fs::create_directories(dir);
  const fs::path path = dir / "doc.json";

  const ComplexDocument doc{fixtures::rational_complex()};
  save_complex_document(doc, path);
  const ComplexDocument back = load_complex_document(path);
  CHECK(std::get<RationalComplex>(back.complex).differential(2) ==
        fixtures::rational_complex().differential(2));

  CHECK_THROWS_AS(load_complex_document(dir / "missing.json"), ParseError);
  CHECK_THROWS_AS(save_complex_document(doc, dir / "nope" / "doc.json"),
                  ParseError);
  fs::remove_all(dir);
}
