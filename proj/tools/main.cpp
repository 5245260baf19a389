// Command line interface: validate, decompose, invert, project, generate,
// and benchmark chain complexes stored as JSON documents.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <chainsvd/complex_svd.hpp>
#include <chainsvd/generators.hpp>
#include <chainsvd/io.hpp>
#include <chainsvd/pseudoinverse.hpp>

namespace {

using namespace chainsvd;
using nlohmann::json;

std::string fmt6(double v) {
  char buffer[48];
  std::snprintf(buffer, sizeof buffer, "%.6g", v);
  return buffer;
}

std::string join(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(values[i]);
  }
  return out;
}

std::string join6(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt6(values[i]);
  }
  return out;
}

// Sign of the determinant via Gaussian elimination with partial pivoting.
// The bases returned by the decompositions are orthogonal, so the value is
// always close to +1 or -1.
double determinant_sign(const DenseMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1.0;
  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) a[r][c] = m(r, c);
  }
  double sign = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0) return 0.0;
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      sign = -sign;
    }
    if (a[col][col] < 0.0) sign = -sign;
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return sign;
}

const char* field_name(Field f) {
  switch (f) {
    case Field::real53: return "R53";
    case Field::rational: return "QQ";
    default: return "Fp";
  }
}

// Exact documents can feed the floating-point pipelines after conversion.
ChainComplex as_double(const ComplexDocument& doc, bool note) {
  if (const auto* c = std::get_if<ChainComplex>(&doc.complex)) return *c;
  if (note) {
    std::cerr << "note: converting " << field_name(doc.field())
              << " entries to double precision\n";
  }
  if (const auto* c = std::get_if<RationalComplex>(&doc.complex)) {
    return to_double(*c);
  }
  return to_double(std::get<PrimeFieldComplex>(doc.complex));
}

json matrix_json(const DenseMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json matrix_json(const RationalMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      row.push_back(rational_to_string(m(r, c)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json matrix_json(const PrimeFieldMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open file for writing: " + path.string());
  out << text;
  if (!out) throw ParseError("failed while writing: " + path.string());
}

struct ValidateArgs {
  std::string input;
};

int cmd_validate(const ValidateArgs& args) {
  const ComplexDocument doc = load_complex_document(args.input);
  std::cout << "field: " << field_name(doc.field()) << "\n";
  std::cout << "ranks: " << join(doc.dims()) << "\n";
  double residual = 0.0;
  bool pass = false;
  if (const auto* c = std::get_if<ChainComplex>(&doc.complex)) {
    residual = validate(*c);
    pass = residual <= Thresholds{}.compose_tol;
    std::cout << "composition residual = " << fmt6(residual) << "\n";
  } else if (const auto* c = std::get_if<RationalComplex>(&doc.complex)) {
    residual = validate(*c);
    pass = residual == 0.0;
    std::cout << "nonzero composition entries = " << fmt6(residual) << "\n";
  } else {
    const auto& pf = std::get<PrimeFieldComplex>(doc.complex);
    residual = validate(pf);
    pass = residual == 0.0;
    std::cout << "nonzero composition entries = " << fmt6(residual) << "\n";
  }
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : 2;
}

struct SvdArgs {
  std::string input;
  std::string output;
  std::string method = "projection";
  double threshold = 0.0;  // 0 = default for the chosen method
  bool special_orthogonal = false;
};

int cmd_svd(const SvdArgs& args) {
  const ComplexDocument doc = load_complex_document(args.input);
  const ChainComplex c = as_double(doc, true);

  Thresholds t;
  if (args.threshold > 0.0) {
    if (args.method == "laplacian") {
      t.eigen_match_rel_tol = args.threshold;
    } else {
      t.rank_threshold = args.threshold;
    }
  }
  ComplexSVD d = args.method == "laplacian"
                     ? svd_by_laplacian(c.differentials(), t)
                     : svd_by_projection(c.differentials(), t);
  if (args.special_orthogonal) d = make_special_orthogonal(d);

  if (d.input_compose_residual > t.compose_tol) {
    std::cerr << "warning: input composition residual "
              << fmt6(d.input_compose_residual)
              << " exceeds " << fmt6(t.compose_tol)
              << "; the input is only approximately a complex\n";
  }
  std::cout << "method: " << args.method << "\n";
  std::cout << "c = " << join(c.dims()) << "\n";
  std::cout << "r = " << join(d.profile.rank) << "\n";
  std::cout << "h = " << join(d.profile.homology) << "\n";
  for (std::size_t i = 1; i <= d.n(); ++i) {
    std::cout << "Sigma_" << i << " = " << join6(d.singular_values[i - 1])
              << "\n";
  }
  std::cout << "normal form residual = " << fmt6(d.normal_form_residual)
            << "\n";
  if (args.special_orthogonal) {
    std::cout << "determinants:";
    for (const DenseMatrix& u : d.bases) {
      std::cout << (determinant_sign(u) >= 0.0 ? " +1" : " -1");
    }
    std::cout << "\n";
  }

  if (!args.output.empty()) {
    json out;
    out["schema_version"] = "1";
    out["kind"] = "svd";
    out["method"] = args.method;
    out["ranks"] = c.dims();
    out["rank_profile"] = {{"rank", d.profile.rank},
                           {"homology", d.profile.homology}};
    out["singular_values"] = d.singular_values;
    json bases = json::array();
    for (const DenseMatrix& u : d.bases) bases.push_back(matrix_json(u));
    out["bases"] = std::move(bases);
    out["normal_form_residual"] = d.normal_form_residual;
    out["input_compose_residual"] = d.input_compose_residual;
    write_text(args.output, out.dump(2) + "\n");
  }
  return 0;
}

struct PinvArgs {
  std::string input;
  std::string output;
  bool exact = false;
};

int cmd_pinv(const PinvArgs& args) {
  const ComplexDocument doc = load_complex_document(args.input);
  json out;
  out["schema_version"] = "1";
  out["kind"] = "pseudoinverse";
  out["ranks"] = doc.dims();

  if (args.exact) {
    if (doc.field() == Field::real53) {
      throw StructuralError(
          "exact pseudoinverse requires a QQ or Fp document");
    }
    json maps = json::array();
    if (const auto* c = std::get_if<RationalComplex>(&doc.complex)) {
      out["field"] = "QQ";
      const RationalPseudoinverse pi = pinv_complex_exact(*c);
      for (std::size_t i = 1; i <= c->n(); ++i) {
        const PenroseResiduals res =
            penrose_residuals(c->differential(i), pi.maps[i - 1]);
        std::cout << "map " << i << ": Penrose identities "
                  << (res.max() == 0.0 ? "hold exactly" : "FAILED") << "\n";
        maps.push_back(matrix_json(pi.maps[i - 1]));
      }
    } else {
      const auto& pf = std::get<PrimeFieldComplex>(doc.complex);
      out["field"] = "Fp";
      out["modulus"] = pf.differential(1).modulus();
      const PrimeFieldPseudoinverse pi = pinv_complex_exact(pf);
      for (std::size_t i = 1; i <= pf.n(); ++i) {
        const PenroseResiduals res =
            penrose_residuals(pf.differential(i), pi.maps[i - 1]);
        std::cout << "map " << i << ": Penrose identities "
                  << (res.max() == 0.0 ? "hold exactly" : "FAILED") << "\n";
        maps.push_back(matrix_json(pi.maps[i - 1]));
      }
    }
    out["maps"] = std::move(maps);
  } else {
    const ChainComplex c = as_double(doc, true);
    const ComplexSVD d = svd_by_projection(c.differentials());
    const PseudoinverseComplex pi = pinv_complex(c, d.profile);
    out["field"] = "R53";
    out["rank_profile"] = {{"rank", d.profile.rank},
                           {"homology", d.profile.homology}};
    json maps = json::array();
    for (std::size_t i = 1; i <= c.n(); ++i) {
      const PenroseResiduals res =
          penrose_residuals(c.differential(i), pi.maps[i - 1]);
      std::cout << "map " << i << ": max Penrose residual = "
                << fmt6(res.max()) << "\n";
      maps.push_back(matrix_json(pi.maps[i - 1]));
    }
    out["maps"] = std::move(maps);
  }
  if (!args.output.empty()) write_text(args.output, out.dump(2) + "\n");
  return 0;
}

struct ProjectArgs {
  std::string input;
  std::string output;
  std::vector<std::size_t> homology;
};

int cmd_project(const ProjectArgs& args) {
  const ComplexDocument doc = load_complex_document(args.input);
  const ChainComplex c = as_double(doc, true);
  const std::vector<std::size_t> ranks =
      ranks_from_homology(c.dims(), args.homology);
  const ChainComplex projected =
      project_to_complex(c.differentials(), args.homology);
  std::cout << "c = " << join(projected.dims()) << "\n";
  std::cout << "r = " << join(ranks) << "\n";
  std::cout << "h = " << join(args.homology) << "\n";
  std::cout << "composition residual = " << fmt6(validate(projected)) << "\n";
  if (!args.output.empty()) {
    save_complex_document(ComplexDocument(projected), args.output);
  }
  return 0;
}

struct GenerateRandomArgs {
  std::vector<std::size_t> homology;
  std::vector<std::size_t> ranks;
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_generate_random(const GenerateRandomArgs& args) {
  GeneratorConfig cfg;
  cfg.seed = args.seed;
  const RationalComplex c = random_complex(args.homology, args.ranks, cfg);
  std::ostream& info = args.output.empty() ? std::cerr : std::cout;
  info << "c = " << join(c.dims()) << "\n";
  info << "h = " << join(exact_homology(c)) << "\n";
  const ComplexDocument doc{c};
  if (args.output.empty()) {
    std::cout << serialize_complex_document(doc);
  } else {
    save_complex_document(doc, args.output);
  }
  return 0;
}

struct GenerateSRArgs {
  std::size_t vars = 0;
  std::size_t monomials = 0;
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_generate_sr(const GenerateSRArgs& args) {
  if (args.monomials < 1) {
    throw StructuralError("at least one monomial generator is required");
  }
  GeneratorConfig cfg;
  cfg.seed = args.seed;
  const RationalComplex c =
      stanley_reisner_chain(args.vars, args.monomials, cfg);
  std::ostream& info = args.output.empty() ? std::cerr : std::cout;
  info << "c = " << join(c.dims()) << "\n";
  info << "h = " << join(exact_homology(c)) << "\n";
  const ComplexDocument doc{c};
  if (args.output.empty()) {
    std::cout << serialize_complex_document(doc);
  } else {
    save_complex_document(doc, args.output);
  }
  return 0;
}

struct BenchArgs {
  std::string suite;
  std::size_t repeats = 1;
};

template <class F>
double time_best(std::size_t repeats, F&& run) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t rep = 0; rep < std::max<std::size_t>(repeats, 1); ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    run();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

int cmd_bench(const BenchArgs& args) {
  bool all_pass = true;
  std::printf("%-4s %-18s %-16s %12s %12s  %s\n", "case", "c", "h",
              "proj(s)", "lapl(s)", "agree");
  if (args.suite == "table1") {
    const std::vector<std::pair<std::vector<std::size_t>,
                                std::vector<std::size_t>>> rows = {
        {{7, 21, 28, 14}, {2, 3, 2, 1}},
        {{8, 27, 35, 17}, {3, 6, 4, 2}},
        {{9, 33, 42, 20}, {4, 9, 6, 3}},
        {{10, 39, 49, 23}, {5, 12, 8, 4}},
        {{11, 45, 56, 26}, {6, 15, 10, 5}},
        {{12, 51, 63, 29}, {7, 18, 12, 6}},
    };
    std::size_t index = 0;
    for (const auto& [dims, homology] : rows) {
      ++index;
      const std::vector<std::size_t> ranks =
          ranks_from_homology(dims, homology);
      GeneratorConfig cfg;
      cfg.seed = 1000 + index;
      // Unit coefficients keep the condition number low enough for the
      // Laplacian method, which squares the singular value spread.
      cfg.coefficient_bound = 1;
      const RationalComplex exact = random_complex(homology, ranks, cfg);
      const ChainComplex c = to_double(exact);
      ComplexSVD dp;
      ComplexSVD dl;
      const double tp = time_best(args.repeats, [&] {
        dp = svd_by_projection(c.differentials());
      });
      const double tl = time_best(args.repeats, [&] {
        dl = svd_by_laplacian(c.differentials());
      });
      const std::vector<std::size_t> oracle = exact_homology(exact);
      const bool pass =
          dp.profile.homology == oracle && dl.profile.homology == oracle;
      all_pass = all_pass && pass;
      std::printf("%-4zu %-18s %-16s %12.3e %12.3e  %s\n", index,
                  join(dims).c_str(), join(oracle).c_str(), tp, tl,
                  pass ? "PASS" : "FAIL");
    }
  } else if (args.suite == "table2") {
    const std::vector<std::pair<std::size_t, std::size_t>> rows = {
        {8, 20}, {9, 21}, {10, 23}};
    std::size_t index = 0;
    for (const auto& [vars, monomials] : rows) {
      ++index;
      GeneratorConfig cfg;
      cfg.seed = 2000 + index;
      const RationalComplex exact =
          stanley_reisner_chain(vars, monomials, cfg);
      const ChainComplex c = to_double(exact);
      ComplexSVD dp;
      const double tp = time_best(args.repeats, [&] {
        dp = svd_by_projection(c.differentials());
      });
      const std::vector<std::size_t> oracle = exact_homology(exact);
      const bool pass = dp.profile.homology == oracle;
      all_pass = all_pass && pass;
      std::printf("%-4zu %-18s %-16s %12.3e %12s  %s\n", index,
                  join(c.dims()).c_str(), join(oracle).c_str(), tp, "-",
                  pass ? "PASS" : "FAIL");
    }
  } else {
    throw StructuralError("unknown suite '" + args.suite +
                          "'; expected table1 or table2");
  }
  return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"singular value decompositions of chain complexes"};
  app.require_subcommand(1);

  ValidateArgs validate_args;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "check that a document is a complex");
  validate_cmd->add_option("--input", validate_args.input, "JSON document")
      ->required();

  SvdArgs svd_args;
  CLI::App* svd_cmd =
      app.add_subcommand("svd", "simultaneous SVD of a complex");
  svd_cmd->add_option("--input", svd_args.input, "JSON document")->required();
  svd_cmd->add_option("--output", svd_args.output, "decomposition JSON");
  svd_cmd->add_option("--method", svd_args.method, "projection or laplacian")
      ->check(CLI::IsMember({"projection", "laplacian"}));
  svd_cmd->add_option("--threshold", svd_args.threshold,
                      "rank gap threshold (projection) or eigenvalue "
                      "matching tolerance (laplacian)");
  svd_cmd->add_flag("--special-orthogonal", svd_args.special_orthogonal,
                    "normalize every basis to determinant +1");

  PinvArgs pinv_args;
  CLI::App* pinv_cmd =
      app.add_subcommand("pinv", "pseudoinverse complex");
  pinv_cmd->add_option("--input", pinv_args.input, "JSON document")
      ->required();
  pinv_cmd->add_option("--output", pinv_args.output, "pseudoinverse JSON");
  pinv_cmd->add_flag("--exact", pinv_args.exact,
                     "exact pseudoinverse over QQ or Fp");

  ProjectArgs project_args;
  CLI::App* project_cmd = app.add_subcommand(
      "project", "project near-complex onto a complex with given homology");
  project_cmd->add_option("--input", project_args.input, "JSON document")
      ->required();
  project_cmd->add_option("--output", project_args.output, "output document");
  project_cmd
      ->add_option("--homology", project_args.homology,
                   "comma separated homology dimensions h_0,...,h_n")
      ->required()
      ->delimiter(',');

  CLI::App* generate_cmd =
      app.add_subcommand("generate", "generate test complexes");
  generate_cmd->require_subcommand(1);
  GenerateRandomArgs random_args;
  CLI::App* random_cmd = generate_cmd->add_subcommand(
      "random", "random integer complex with prescribed homology and ranks");
  random_cmd
      ->add_option("--homology", random_args.homology,
                   "comma separated h_0,...,h_n")
      ->required()
      ->delimiter(',');
  random_cmd
      ->add_option("--ranks", random_args.ranks, "comma separated r_1,...,r_n")
      ->required()
      ->delimiter(',');
  random_cmd->add_option("--seed", random_args.seed, "RNG seed");
  random_cmd->add_option("--output", random_args.output, "output document");

  GenerateSRArgs sr_args;
  CLI::App* sr_cmd = generate_cmd->add_subcommand(
      "stanley-reisner", "simplicial chain complex of a random "
                         "Stanley-Reisner complex");
  sr_cmd->add_option("--vars", sr_args.vars, "number of vertices (3..16)")
      ->required();
  sr_cmd->add_option("--monomials", sr_args.monomials,
                     "number of monomial generators")
      ->required();
  sr_cmd->add_option("--seed", sr_args.seed, "RNG seed");
  sr_cmd->add_option("--output", sr_args.output, "output document");

  BenchArgs bench_args;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "benchmark the decomposition methods");
  bench_cmd->add_option("--suite", bench_args.suite, "table1 or table2")
      ->required()
      ->check(CLI::IsMember({"table1", "table2"}));
  bench_cmd->add_option("--repeats", bench_args.repeats,
                        "timing repetitions per case");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(validate_args);
    if (svd_cmd->parsed()) return cmd_svd(svd_args);
    if (pinv_cmd->parsed()) return cmd_pinv(pinv_args);
    if (project_cmd->parsed()) return cmd_project(project_args);
    if (random_cmd->parsed()) return cmd_generate_random(random_args);
    if (sr_cmd->parsed()) return cmd_generate_sr(sr_args);
    if (bench_cmd->parsed()) return cmd_bench(bench_args);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InfeasibleRankError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
