#include <chainsvd/io.hpp>

#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace chainsvd {

namespace {

using nlohmann::json;

std::string location(std::size_t diff, std::size_t row) {
  return "differential " + std::to_string(diff + 1) + ", row " +
         std::to_string(row);
}

std::vector<std::size_t> parse_ranks(const json& j) {
  if (!j.contains("ranks") || !j["ranks"].is_array()) {
    throw ParseError("document needs a 'ranks' array");
  }
  std::vector<std::size_t> ranks;
  for (const json& v : j["ranks"]) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ParseError("'ranks' entries must be non-negative integers");
    }
    ranks.push_back(v.get<std::size_t>());
  }
  if (ranks.size() < 2) {
    throw ParseError("'ranks' must list at least two dimensions");
  }
  return ranks;
}

const json& differential_at(const json& j, std::size_t i,
                            std::size_t expected_rows) {
  const json& d = j["differentials"][i];
  if (!d.is_array() || d.size() != expected_rows) {
    throw ParseError("differential " + std::to_string(i + 1) +
                     " must be an array of " + std::to_string(expected_rows) +
                     " rows");
  }
  return d;
}

const json& row_at(const json& d, std::size_t diff, std::size_t r,
                   std::size_t expected_cols) {
  const json& row = d[r];
  if (!row.is_array() || row.size() != expected_cols) {
    throw ParseError(location(diff, r) + " must hold " +
                     std::to_string(expected_cols) + " entries");
  }
  return row;
}

ComplexDocument parse_document(const json& j) {
  if (!j.is_object()) throw ParseError("document must be a JSON object");
  if (!j.contains("schema_version") || !j["schema_version"].is_string() ||
      j["schema_version"].get<std::string>() != "1") {
    throw ParseError("unsupported or missing schema_version; expected \"1\"");
  }
  if (!j.contains("field") || !j["field"].is_string()) {
    throw ParseError("document needs a 'field' string");
  }
  const std::string field = j["field"].get<std::string>();
  const std::vector<std::size_t> ranks = parse_ranks(j);
  const std::size_t n = ranks.size() - 1;
  if (!j.contains("differentials") || !j["differentials"].is_array() ||
      j["differentials"].size() != n) {
    throw ParseError("document needs " + std::to_string(n) +
                     " differentials to match its ranks");
  }

  try {
    if (field == "R53") {
      std::vector<DenseMatrix> diffs;
      for (std::size_t i = 0; i < n; ++i) {
        const json& d = differential_at(j, i, ranks[i]);
        std::vector<double> entries;
        entries.reserve(ranks[i] * ranks[i + 1]);
        for (std::size_t r = 0; r < ranks[i]; ++r) {
          const json& row = row_at(d, i, r, ranks[i + 1]);
          for (const json& e : row) {
            if (!e.is_number()) {
              throw ParseError(location(i, r) +
                               ": R53 entries must be numbers");
            }
            entries.push_back(e.get<double>());
          }
        }
        diffs.emplace_back(ranks[i], ranks[i + 1], std::move(entries));
      }
      return ComplexDocument(ChainComplex(std::move(diffs)));
    }
    if (field == "QQ") {
      std::vector<RationalMatrix> diffs;
      for (std::size_t i = 0; i < n; ++i) {
        const json& d = differential_at(j, i, ranks[i]);
        std::vector<Rational> entries;
        entries.reserve(ranks[i] * ranks[i + 1]);
        for (std::size_t r = 0; r < ranks[i]; ++r) {
          const json& row = row_at(d, i, r, ranks[i + 1]);
          for (const json& e : row) {
            if (!e.is_string()) {
              throw ParseError(location(i, r) +
                               ": QQ entries must be strings like \"p/q\"");
            }
            entries.push_back(rational_from_string(e.get<std::string>()));
          }
        }
        diffs.emplace_back(ranks[i], ranks[i + 1], std::move(entries));
      }
      return ComplexDocument(RationalComplex(std::move(diffs)));
    }
    if (field == "Fp") {
      if (!j.contains("modulus") || !j["modulus"].is_number_integer() ||
          j["modulus"].get<long long>() < 2) {
        throw ParseError("Fp documents need a prime 'modulus'");
      }
      const auto p = j["modulus"].get<std::uint64_t>();
      std::vector<PrimeFieldMatrix> diffs;
      for (std::size_t i = 0; i < n; ++i) {
        const json& d = differential_at(j, i, ranks[i]);
        std::vector<long long> entries;
        entries.reserve(ranks[i] * ranks[i + 1]);
        for (std::size_t r = 0; r < ranks[i]; ++r) {
          const json& row = row_at(d, i, r, ranks[i + 1]);
          for (const json& e : row) {
            if (!e.is_number_integer()) {
              throw ParseError(location(i, r) +
                               ": Fp entries must be integers");
            }
            entries.push_back(e.get<long long>());
          }
        }
        diffs.push_back(PrimeFieldMatrix::from_integers(
            ranks[i], ranks[i + 1], p, entries));
      }
      return ComplexDocument(PrimeFieldComplex(std::move(diffs)));
    }
  } catch (const StructuralError& e) {
    // Construction-level violations (non-prime modulus, bad shapes) make
    // the document unparseable as a complex.
    throw ParseError(e.what());
  }
  throw ParseError("unknown field '" + field +
                   "'; expected R53, QQ, or Fp");
}

}  // namespace

std::uint64_t ComplexDocument::modulus() const {
  if (const auto* c = std::get_if<PrimeFieldComplex>(&complex)) {
    return c->differential(1).modulus();
  }
  return 0;
}

const std::vector<std::size_t>& ComplexDocument::dims() const {
  return std::visit([](const auto& c) -> const std::vector<std::size_t>& {
    return c.dims();
  }, complex);
}

ComplexDocument parse_complex_document(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return parse_document(j);
}

std::string serialize_complex_document(const ComplexDocument& doc) {
  json j;
  j["schema_version"] = "1";
  j["ranks"] = doc.dims();
  json diffs = json::array();

  if (const auto* c = std::get_if<ChainComplex>(&doc.complex)) {
    j["field"] = "R53";
    for (const DenseMatrix& m : c->differentials()) {
      json rows = json::array();
      for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t col = 0; col < m.cols(); ++col) row.push_back(m(r, col));
        rows.push_back(std::move(row));
      }
      diffs.push_back(std::move(rows));
    }
  } else if (const auto* c = std::get_if<RationalComplex>(&doc.complex)) {
    j["field"] = "QQ";
    for (const RationalMatrix& m : c->differentials()) {
      json rows = json::array();
      for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t col = 0; col < m.cols(); ++col) {
          row.push_back(rational_to_string(m(r, col)));
        }
        rows.push_back(std::move(row));
      }
      diffs.push_back(std::move(rows));
    }
  } else {
    const auto& pf = std::get<PrimeFieldComplex>(doc.complex);
    j["field"] = "Fp";
    j["modulus"] = pf.differential(1).modulus();
    for (const PrimeFieldMatrix& m : pf.differentials()) {
      json rows = json::array();
      for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t col = 0; col < m.cols(); ++col) row.push_back(m(r, col));
        rows.push_back(std::move(row));
      }
      diffs.push_back(std::move(rows));
    }
  }
  j["differentials"] = std::move(diffs);
  return j.dump(2) + "\n";
}

ComplexDocument load_complex_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_complex_document(buffer.str());
}

void save_complex_document(const ComplexDocument& doc,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ParseError("cannot open file for writing: " + path.string());
  }
  out << serialize_complex_document(doc);
  if (!out) {
    throw ParseError("failed while writing: " + path.string());
  }
}

}  // namespace chainsvd
