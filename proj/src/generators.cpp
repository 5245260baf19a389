#include <chainsvd/generators.hpp>

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>
#include <string>
#include <utility>

namespace chainsvd {

namespace {

// mt19937_64 with hand-rolled reductions, so the same seed produces the
// same complex on every platform and standard library.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  // Nonzero integer in [-bound, bound].
  long coefficient(long bound) {
    long v = static_cast<long>(below(static_cast<std::size_t>(2 * bound))) -
             bound;
    if (v >= 0) ++v;
    return v;
  }

  // Uniform in [0, 1) with full 53-bit resolution.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

using IntGrid = std::vector<std::vector<mpz_class>>;  // row-major

RationalMatrix to_rational(const IntGrid& grid, std::size_t rows,
                           std::size_t cols) {
  RationalMatrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = Rational(grid[r][c]);
  }
  return out;
}

}  // namespace

RationalComplex random_complex(const std::vector<std::size_t>& homology,
                               const std::vector<std::size_t>& ranks,
                               const GeneratorConfig& cfg) {
  if (homology.size() < 2) {
    throw StructuralError(
        "need homology dimensions h_0..h_n with n >= 1");
  }
  if (ranks.size() + 1 != homology.size()) {
    throw StructuralError("expected one rank per differential");
  }
  if (cfg.coefficient_bound < 1) {
    throw StructuralError("coefficient bound must be at least 1");
  }
  const std::size_t n = ranks.size();

  std::vector<std::size_t> dims(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    dims[i] = (i >= 1 ? ranks[i - 1] : 0) + (i < n ? ranks[i] : 0) +
              homology[i];
  }

  // Start from the normal form: level i carries a diagonal block whose
  // entries are globally distinct positive integers, placed so that
  // consecutive products vanish by the block pattern.
  std::vector<IntGrid> m(n);
  std::size_t base = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    m[i - 1].assign(dims[i - 1], std::vector<mpz_class>(dims[i], 0));
    const std::size_t row0 = i >= 2 ? ranks[i - 2] : 0;
    for (std::size_t k = 0; k < ranks[i - 1]; ++k) {
      m[i - 1][row0 + k][k] = static_cast<long>(base + ranks[i - 1] - k);
    }
    base += ranks[i - 1];
  }

  // Conjugate by a random unimodular change of basis in every space:
  // products of elementary operations, applied as a column operation on
  // the incoming differential and the inverse row operation on the
  // outgoing one, so compositions stay exactly zero.
  SeededRng rng(cfg.seed);
  for (std::size_t space = 0; space <= n; ++space) {
    const std::size_t size = dims[space];
    if (size == 0) continue;
    IntGrid* in = space >= 1 ? &m[space - 1] : nullptr;    // columns
    IntGrid* out = space < n ? &m[space] : nullptr;        // rows
    const std::size_t steps =
        cfg.unimodular_steps > 0 ? cfg.unimodular_steps : 3 * size;
    for (std::size_t step = 0; step < steps; ++step) {
      const std::size_t kind = size == 1 ? 9 : rng.below(10);
      if (kind < 8) {
        const std::size_t j = rng.below(size);
        std::size_t k = rng.below(size - 1);
        if (k >= j) ++k;
        const long a = rng.coefficient(cfg.coefficient_bound);
        if (in != nullptr) {
          for (std::size_t r = 0; r < dims[space - 1]; ++r) {
            (*in)[r][k] += a * (*in)[r][j];
          }
        }
        if (out != nullptr) {
          for (std::size_t c = 0; c < dims[space + 1]; ++c) {
            (*out)[j][c] -= a * (*out)[k][c];
          }
        }
      } else if (kind == 8) {
        const std::size_t j = rng.below(size);
        std::size_t k = rng.below(size - 1);
        if (k >= j) ++k;
        if (in != nullptr) {
          for (std::size_t r = 0; r < dims[space - 1]; ++r) {
            std::swap((*in)[r][j], (*in)[r][k]);
          }
        }
        if (out != nullptr) std::swap((*out)[j], (*out)[k]);
      } else {
        const std::size_t j = rng.below(size);
        if (in != nullptr) {
          for (std::size_t r = 0; r < dims[space - 1]; ++r) {
            (*in)[r][j] = -(*in)[r][j];
          }
        }
        if (out != nullptr) {
          for (std::size_t c = 0; c < dims[space + 1]; ++c) {
            (*out)[j][c] = -(*out)[j][c];
          }
        }
      }
    }
  }

  std::vector<RationalMatrix> diffs;
  diffs.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    diffs.push_back(to_rational(m[i - 1], dims[i - 1], dims[i]));
  }
  return RationalComplex(std::move(diffs));
}

RationalComplex stanley_reisner_from_generators(
    std::size_t vars, const std::vector<std::uint32_t>& generator_masks) {
  if (vars < 3 || vars > 16) {
    throw StructuralError("vertex count must lie in [3, 16]");
  }
  const std::uint32_t all = (1u << vars) - 1;
  for (std::uint32_t g : generator_masks) {
    if (g == 0 || (g & ~all) != 0) {
      throw StructuralError("generator mask out of range");
    }
  }

  // A vertex set is a face iff no generator monomial divides it.
  std::vector<std::vector<std::uint32_t>> faces_by_dim;
  for (std::uint32_t s = 1; s <= all; ++s) {
    bool excluded = false;
    for (std::uint32_t g : generator_masks) {
      if ((s & g) == g) {
        excluded = true;
        break;
      }
    }
    if (excluded) continue;
    const std::size_t dim = static_cast<std::size_t>(std::popcount(s)) - 1;
    if (faces_by_dim.size() <= dim) faces_by_dim.resize(dim + 1);
    faces_by_dim[dim].push_back(s);
  }
  if (faces_by_dim.size() < 2) {
    throw StructuralError(
        "Stanley-Reisner complex has no faces of dimension >= 1");
  }

  // Lexicographic order on the sorted vertex tuples.
  auto vertices_of = [&](std::uint32_t s) {
    std::vector<std::size_t> v;
    for (std::size_t bit = 0; bit < vars; ++bit) {
      if (s & (1u << bit)) v.push_back(bit);
    }
    return v;
  };
  for (auto& level : faces_by_dim) {
    std::sort(level.begin(), level.end(),
              [&](std::uint32_t x, std::uint32_t y) {
                return vertices_of(x) < vertices_of(y);
              });
  }

  const std::size_t top = faces_by_dim.size() - 1;
  std::vector<RationalMatrix> diffs;
  diffs.reserve(top);
  for (std::size_t d = 1; d <= top; ++d) {
    std::vector<std::uint32_t>& lower = faces_by_dim[d - 1];
    std::vector<std::uint32_t>& upper = faces_by_dim[d];
    std::vector<std::size_t> row_of(1u << vars, 0);
    for (std::size_t r = 0; r < lower.size(); ++r) row_of[lower[r]] = r;

    RationalMatrix a(lower.size(), upper.size());
    for (std::size_t c = 0; c < upper.size(); ++c) {
      const std::vector<std::size_t> verts = vertices_of(upper[c]);
      for (std::size_t j = 0; j < verts.size(); ++j) {
        const std::uint32_t sub = upper[c] & ~(1u << verts[j]);
        a(row_of[sub], c) = (j % 2 == 0) ? 1 : -1;
      }
    }
    diffs.push_back(std::move(a));
  }
  return RationalComplex(std::move(diffs));
}

RationalComplex stanley_reisner_chain(std::size_t vars,
                                      std::size_t monomial_count,
                                      const GeneratorConfig& cfg) {
  if (vars < 3 || vars > 16) {
    throw StructuralError("vertex count must lie in [3, 16]");
  }
  const std::size_t lo = 2;
  const std::size_t hi = std::min<std::size_t>(5, vars - 1);

  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    // Derived seed per attempt keeps retries deterministic.
    SeededRng rng(cfg.seed + attempt * 0x9e3779b97f4a7c15ull);

    std::vector<std::uint32_t> masks;
    std::size_t draws = 0;
    const std::size_t draw_cap = 200 * (monomial_count + 1);
    while (masks.size() < monomial_count && draws < draw_cap) {
      ++draws;
      const std::size_t degree = lo + rng.below(hi - lo + 1);
      std::vector<std::size_t> idx(vars);
      std::iota(idx.begin(), idx.end(), 0);
      std::uint32_t mask = 0;
      for (std::size_t t = 0; t < degree; ++t) {
        std::swap(idx[t], idx[t + rng.below(vars - t)]);
        mask |= 1u << idx[t];
      }
      if (std::find(masks.begin(), masks.end(), mask) == masks.end()) {
        masks.push_back(mask);
      }
    }
    if (masks.size() < monomial_count) continue;

    // Keep only the minimal monomials; the rest are redundant non-faces.
    std::vector<std::uint32_t> minimal;
    for (std::uint32_t m : masks) {
      bool dominated = false;
      for (std::uint32_t other : masks) {
        if (other != m && (m & other) == other) {
          dominated = true;
          break;
        }
      }
      if (!dominated) minimal.push_back(m);
    }

    try {
      return stanley_reisner_from_generators(vars, minimal);
    } catch (const StructuralError&) {
      continue;  // the draw left no edges; retry with the derived seed
    }
  }
  throw StructuralError(
      "could not draw a Stanley-Reisner complex with " +
      std::to_string(monomial_count) + " distinct generators on " +
      std::to_string(vars) + " vertices after 100 attempts");
}

ChainComplex perturb(const ChainComplex& c, double rel_eps,
                     std::uint64_t seed) {
  if (!(rel_eps > 0.0) || !(rel_eps < 1.0)) {
    throw StructuralError("perturbation size must lie strictly in (0, 1)");
  }
  SeededRng rng(seed);
  std::vector<DenseMatrix> diffs;
  diffs.reserve(c.n());
  for (std::size_t i = 1; i <= c.n(); ++i) {
    DenseMatrix a = c.differential(i);
    for (std::size_t r = 0; r < a.rows(); ++r) {
      for (std::size_t col = 0; col < a.cols(); ++col) {
        const double delta = rel_eps * (2.0 * rng.unit() - 1.0);
        a(r, col) *= 1.0 + delta;  // exact zeros stay zero
      }
    }
    diffs.push_back(std::move(a));
  }
  return ChainComplex(std::move(diffs));
}

}  // namespace chainsvd
