#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "stmod/diagram_cohomology.hpp"
#include "stmod/graded_dga.hpp"

using namespace stmod;

namespace {

// Exhaustive law checks on one algebra window.  Returns the number of
// verified identities so the suite can certify its own coverage.
std::size_t check_algebra_laws(const GradedAlgebra& g) {
  std::size_t cases = 0;
  for (int d = g.lo(); d <= g.hi(); ++d)
    for (std::size_t i = 0; i < g.dim(d); ++i) {
      GradedElement b = g.basis_element(d, i);
      REQUIRE(g.equal(g.multiply(g.unit(), b), b));
      REQUIRE(g.equal(g.multiply(b, g.unit()), b));
      ++cases;
    }

  for (int d1 = g.lo(); d1 <= g.hi(); ++d1)
    for (int d2 = g.lo(); d2 <= g.hi(); ++d2)
      for (int d3 = g.lo(); d3 <= g.hi(); ++d3) {
        if (!g.dim_known(d1 + d2) || !g.dim_known(d2 + d3) || !g.dim_known(d1 + d2 + d3))
          continue;
        for (std::size_t i = 0; i < g.dim(d1); ++i)
          for (std::size_t j = 0; j < g.dim(d2); ++j)
            for (std::size_t k = 0; k < g.dim(d3); ++k) {
              GradedElement a = g.basis_element(d1, i);
              GradedElement b = g.basis_element(d2, j);
              GradedElement c = g.basis_element(d3, k);
              REQUIRE(g.equal(g.multiply(g.multiply(a, b), c), g.multiply(a, g.multiply(b, c))));
              ++cases;
            }
      }

  for (int k = g.lo(); k <= g.hi() + 1; ++k) {
    if (!g.d_known(k) || !g.d_known(k - 1)) continue;
    ZMat sq = g.d_matrix(k - 1) * g.d_matrix(k);
    for (std::size_t i = 0; i < sq.rows(); ++i)
      for (std::size_t j = 0; j < sq.cols(); ++j)
        REQUIRE(coeff_reduce(sq.at(i, j), g.mod()) == 0);
    ++cases;
  }

  for (int d1 = g.lo(); d1 <= g.hi(); ++d1)
    for (int d2 = g.lo(); d2 <= g.hi(); ++d2) {
      int dt = d1 + d2;
      if (!g.dim_known(dt) || !g.dim_known(d1 - 1 + d2) || !g.dim_known(dt - 1)) continue;
      if (!g.d_known(d1) || !g.d_known(d2)) continue;
      bool dt_zero = g.dim(dt) == 0;
      if (!dt_zero && !g.d_known(dt)) continue;
      Int sgn = (d1 % 2 + 2) % 2 == 0 ? 1 : -1;
      for (std::size_t i = 0; i < g.dim(d1); ++i)
        for (std::size_t j = 0; j < g.dim(d2); ++j) {
          GradedElement a = g.basis_element(d1, i), b = g.basis_element(d2, j);
          GradedElement lhs = dt_zero ? g.zero(dt - 1) : g.d_of(g.multiply(a, b));
          GradedElement rhs =
              g.add(g.multiply(g.d_of(a), b), g.scale(g.multiply(a, g.d_of(b)), sgn));
          REQUIRE(g.equal(lhs, rhs));
          ++cases;
        }
    }
  return cases;
}

VectDiagram random_vect_diagram(const FiniteCategory& cat, std::uint64_t p, std::mt19937& rng) {
  // dims only: generator matrices stay zero, which is always functorial
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i < cat.n_objects; ++i) dims.push_back(rng() % 3);
  return vect_diagram(cat, p, dims);
}

}  // namespace

TEST_CASE("algebra laws hold on every constructed window") {
  std::size_t cases = 0;
  for (std::uint64_t p : {2ull, 3ull, 5ull}) {
    GradedAlgebra a = periodic_endo_dga(p, -5, 5);
    GradedAlgebra l = laurent_dga(p, -5, 5);
    cases += check_algebra_laws(a);
    cases += check_algebra_laws(l);
    cases += check_algebra_laws(mod_p_resolution_dga(p));
    cases += check_algebra_laws(truncated_endo_dga(p));
    cases += check_algebra_laws(reduce_mod_p(a, static_cast<long long>(p)));
    cases += check_algebra_laws(tensor_with_mod_p_resolution(l, static_cast<long long>(p)));
    cases += check_algebra_laws(connective_cover(a));
    cases += check_algebra_laws(postnikov_section(connective_cover(a), 2));
    cases += check_algebra_laws(postnikov_section(connective_cover(l), 2));
  }
  INFO("identities checked: " << cases);
  REQUIRE(cases >= 1000);
}

TEST_CASE("obstruction complex differentials square to zero") {
  std::mt19937 rng(2024);
  std::size_t cases = 0;
  for (std::uint64_t p : {2ull, 3ull}) {
    for (const char* name : {"arrow_1", "arrow_2", "coequalizer", "discrete_2"}) {
      FiniteCategory cat = category_by_name(name);
      std::vector<std::pair<VectDiagram, VectDiagram>> pairs;
      for (std::size_t i = 0; i < cat.n_objects; ++i)
        for (std::size_t j = 0; j < cat.n_objects; ++j)
          pairs.emplace_back(skyscraper_diagram(cat, p, i), skyscraper_diagram(cat, p, j));
      for (int t = 0; t < 6; ++t)
        pairs.emplace_back(random_vect_diagram(cat, p, rng), random_vect_diagram(cat, p, rng));
      for (const auto& [a, b] : pairs) {
        BarComplex bc = bar_complex(a, b, 4);
        for (std::size_t n = 0; n + 1 < bc.delta.size(); ++n) {
          const FpMat& d0 = bc.delta[n];
          const FpMat& d1 = bc.delta[n + 1];
          REQUIRE(d1.cols() == d0.rows());
          for (std::size_t i = 0; i < d1.rows(); ++i)
            for (std::size_t k = 0; k < d0.cols(); ++k) {
              std::uint64_t acc = 0;
              for (std::size_t j = 0; j < d0.rows(); ++j)
                acc = (acc + d1.at(i, j) * d0.at(j, k)) % p;
              REQUIRE(acc == 0);
            }
          ++cases;
        }
      }
    }
  }
  INFO("composites checked: " << cases);
  REQUIRE(cases >= 200);
}

TEST_CASE("smith form transforms reconstruct the input exactly") {
  std::mt19937_64 rng(77);
  std::size_t cases = 0;
  for (int t = 0; t < 400; ++t) {
    std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
    ZMat a(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        a.at(i, j) = Int(static_cast<long long>(rng() % 41)) - 20;
    Snf f = smith_normal_form(a);
    REQUIRE(f.l * a * f.r == f.s);
    REQUIRE(f.l * f.linv == ZMat::identity(r));
    REQUIRE(f.r * f.rinv == ZMat::identity(c));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        if (i != j) REQUIRE(f.s.at(i, j) == 0);
    for (std::size_t i = 0; i + 1 < std::min(r, c); ++i) {
      if (f.s.at(i + 1, i + 1) == 0) continue;
      REQUIRE(f.s.at(i, i) != 0);
      REQUIRE(f.s.at(i + 1, i + 1) % f.s.at(i, i) == 0);
    }
    ++cases;
  }
  REQUIRE(cases == 400);
}

TEST_CASE("local smith form over a prime power reconstructs mod M") {
  std::mt19937_64 rng(78);
  std::size_t cases = 0;
  for (std::uint64_t q : {2ull, 3ull, 5ull})
    for (std::uint64_t e : {1ull, 2ull, 3ull})
      for (int t = 0; t < 40; ++t) {
        Int M = 1;
        for (std::uint64_t i = 0; i < e; ++i) M *= q;
        std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
        ZMat a(r, c);
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j)
            a.at(i, j) = Int(static_cast<long long>(rng() % 50));
        detail::LocalSnf f = detail::local_snf_mod(a, M, Int(static_cast<long long>(q)));
        ZMat lar = f.l * a * f.r;
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j)
            REQUIRE((lar.at(i, j) - f.s.at(i, j)) % M == 0);
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) {
            if (i != j) REQUIRE(f.s.at(i, j) % M == 0);
            // every diagonal entry is a power of q, possibly q^0 = 1, or 0 mod M
            if (i == j && f.s.at(i, j) % M != 0) {
              Int v = f.s.at(i, j) % M;
              while (v % q == 0) v /= static_cast<long long>(q);
              REQUIRE(v == 1);
            }
          }
        ++cases;
      }
  REQUIRE(cases == 360);
}

TEST_CASE("modular solvers return verified solutions and lattices") {
  std::mt19937_64 rng(79);
  std::size_t solved = 0, checked = 0;
  for (int t = 0; t < 200; ++t) {
    std::size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
    std::uint64_t q = (t % 2 == 0) ? 2 : 3;
    Int ann = (t % 4 < 2) ? Int(static_cast<long long>(q)) : Int(static_cast<long long>(q * q));
    ZMat a(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        a.at(i, j) = Int(static_cast<long long>(rng() % 20));
    std::vector<Int> target_ann(r, ann);
    std::vector<Int> x0;
    for (std::size_t j = 0; j < c; ++j)
      x0.push_back(Int(static_cast<long long>(rng() % 9)));
    std::vector<Int> b = a.apply(x0);  // solvable by construction

    std::optional<std::vector<Int>> x = z_solve_mod(a, b, target_ann);
    REQUIRE(x.has_value());
    std::vector<Int> ax = a.apply(*x);
    for (std::size_t i = 0; i < r; ++i) REQUIRE((ax[i] - b[i]) % ann == 0);
    ++solved;

    ZMat lat = solution_lattice_rows(a, target_ann);
    for (std::size_t v = 0; v < lat.rows(); ++v) {
      std::vector<Int> row;
      for (std::size_t j = 0; j < c; ++j) row.push_back(lat.at(v, j));
      std::vector<Int> av = a.apply(row);
      for (std::size_t i = 0; i < r; ++i) REQUIRE(av[i] % ann == 0);
      ++checked;
    }
  }
  REQUIRE(solved == 200);
  REQUIRE(checked >= 200);
}
