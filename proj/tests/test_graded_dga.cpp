#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stmod/graded_dga.hpp"

using namespace stmod;

namespace {

bool poly_equal(const Poly& a, const Poly& b, long long mod) {
  return poly_add(a, poly_scale(b, Int(-1), mod), mod).is_zero();
}

std::vector<Word> all_words(int letters, std::size_t maxlen) {
  std::vector<Word> out{Word{}};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= maxlen; ++len) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (int g = 0; g < letters; ++g) {
        Word w = out[i];
        w.push_back(g);
        out.push_back(std::move(w));
      }
    begin = end;
  }
  return out;
}

// termination measure: total distance of every e from the left end, then length
std::pair<long long, std::size_t> potential(const Word& w, int e) {
  long long s = 0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] == e) s += static_cast<long long>(i);
  return {s, w.size()};
}

Word splice(const Word& w, std::size_t at, std::size_t cut, const Word& ins) {
  Word out(w.begin(), w.begin() + at);
  out.insert(out.end(), ins.begin(), ins.end());
  out.insert(out.end(), w.begin() + at + cut, w.end());
  return out;
}

// closed forms for the periodic algebra: slot 0 of degree n is x^n (y^-n for
// negative n), slot 1 is e*x^(n-1)
struct Mono {
  bool epart;
  int power;  // exponent of the trailing x-power, negatives mean y
};

Mono slot_mono(int deg, std::size_t i) { return {i == 1, i == 1 ? deg - 1 : deg}; }

bool odd(int m) { return ((m % 2) + 2) % 2 == 1; }

std::vector<Int> oracle_product(int d1, std::size_t i, int d2, std::size_t j) {
  Mono a = slot_mono(d1, i), b = slot_mono(d2, j);
  std::vector<Int> out(2, Int(0));
  if (!a.epart && !b.epart) {
    out[0] = 1;
  } else if (!a.epart && b.epart) {
    out[1] = odd(a.power) ? -1 : 1;
    if (odd(a.power)) out[0] = 1;
  } else if (a.epart && !b.epart) {
    out[1] = 1;
  } else {
    if (!odd(a.power + 1)) out[1] = 1;  // left factor e*x^(m-1), m = power+1
  }
  return out;
}

bool same_structure(const GradedAlgebra& a, const GradedAlgebra& b) {
  if (a.mod() != b.mod() || a.lo() != b.lo() || a.hi() != b.hi()) return false;
  if (a.lo_cut() != b.lo_cut() || a.hi_cut() != b.hi_cut()) return false;
  for (int d = a.lo(); d <= a.hi(); ++d)
    if (a.names(d) != b.names(d)) return false;
  for (int k = a.lo() + 1; k <= a.hi(); ++k)
    if (!(a.d_matrix(k) == b.d_matrix(k))) return false;
  if (a.unit().coords != b.unit().coords) return false;
  for (int d1 = a.lo(); d1 <= a.hi(); ++d1)
    for (int d2 = a.lo(); d2 <= a.hi(); ++d2) {
      if (!a.can_multiply(d1, d2)) continue;
      for (std::size_t i = 0; i < a.dim(d1); ++i)
        for (std::size_t j = 0; j < a.dim(d2); ++j) {
          GradedElement pa = a.multiply(a.basis_element(d1, i), a.basis_element(d2, j));
          GradedElement pb = b.multiply(b.basis_element(d1, i), b.basis_element(d2, j));
          if (pa.coords != pb.coords) return false;
        }
    }
  return true;
}

std::size_t name_index(const HomologyRing& h, int d, const std::string& nm) {
  const auto& v = h.names.at(d);
  auto it = std::find(v.begin(), v.end(), nm);
  REQUIRE(it != v.end());
  return static_cast<std::size_t>(it - v.begin());
}

std::vector<Int> anticommutator(const HomologyRing& h, int d1, std::size_t i, int d2,
                                std::size_t j) {
  const std::vector<Int>& ab = h.product(d1, i, d2, j);
  const std::vector<Int>& ba = h.product(d2, j, d1, i);
  std::vector<Int> out(ab.size());
  for (std::size_t c = 0; c < ab.size(); ++c) out[c] = coeff_reduce(ab[c] + ba[c], h.p);
  return out;
}

}  // namespace

TEST_CASE("word names and degrees") {
  Presentation pr = presentation_periodic_endo(3);
  CHECK(word_name(pr, {}) == "1");
  CHECK(word_name(pr, {0, 0}) == "x^2");
  CHECK(word_name(pr, {1, 0}) == "e*x");
  CHECK(word_name(pr, {1, 2, 2, 2}) == "e*y^3");
  CHECK(word_degree(pr, {0, 0}) == 2);
  CHECK(word_degree(pr, {1, 2, 2}) == -1);
  CHECK(word_degree(pr, {}) == 0);
  CHECK_THROWS_AS(word_degree(pr, {5}), BadInput);
}

TEST_CASE("reduction strategies agree and land on normal forms") {
  struct Sys {
    Presentation pr;
    int letters;
  };
  std::vector<Sys> systems = {{presentation_periodic_endo(3), 3},
                              {presentation_truncated_endo(3), 2},
                              {presentation_laurent(5), 2}};
  for (const Sys& sys : systems) {
    for (const Word& w : all_words(sys.letters, 6)) {
      Poly a = reduce_full(word_poly(w), sys.pr, ReduceOrder::Leftmost);
      Poly b = reduce_full(word_poly(w), sys.pr, ReduceOrder::Rightmost);
      REQUIRE(poly_equal(a, b, sys.pr.mod));
      for (std::uint64_t seed : {1u, 7u, 42u}) {
        Poly c = reduce_full(word_poly(w), sys.pr, ReduceOrder::Seeded, seed);
        REQUIRE(poly_equal(a, c, sys.pr.mod));
      }
      for (const auto& [t, c] : a.terms) REQUIRE(is_irreducible(t, sys.pr.rules));
    }
  }
}

TEST_CASE("pinned reductions in the periodic presentation") {
  Presentation pr = presentation_periodic_endo(3);
  const int X = 0, E = 1, Y = 2;
  Poly ye = reduce_full(word_poly({Y, E}), pr);
  Poly want = poly_add(word_poly({}), word_poly({E, Y}, Int(-1)), 0);
  CHECK(poly_equal(ye, want, 0));
  Poly xe = reduce_full(word_poly({X, E}), pr);
  CHECK(poly_equal(xe, poly_add(word_poly({X, X}), word_poly({E, X}, Int(-1)), 0), 0));
  CHECK(reduce_full(word_poly({E, E}), pr).is_zero());
  CHECK(poly_equal(reduce_full(word_poly({X, Y}), pr), word_poly({}), 0));
  CHECK(poly_equal(reduce_full(word_poly({Y, E, X}), pr),
                   poly_add(word_poly({X}), word_poly({E}, Int(-1)), 0), 0));
}

TEST_CASE("every rewrite step lowers the termination measure") {
  for (const auto& [pr, letters, e] :
       {std::tuple{presentation_periodic_endo(2), 3, 1},
        std::tuple{presentation_truncated_endo(2), 2, 1}}) {
    for (const Word& w : all_words(letters, 5)) {
      auto before = potential(w, e);
      for (const auto& [at, r] : occurrences(w, pr.rules)) {
        const Rule& rule = pr.rules[r];
        for (const auto& [rhs, c] : rule.rhs.terms) {
          Word next = splice(w, at, rule.lhs.size(), rhs);
          REQUIRE(potential(next, e) < before);
        }
      }
    }
  }
}

TEST_CASE("basis enumeration matches the closed-form monomial bases") {
  Presentation pr = presentation_periodic_endo(5);
  auto basis = enumerate_basis(pr, -5, 5);
  for (int n = -5; n <= 5; ++n) {
    REQUIRE(basis.at(n).size() == 2);
    std::string xpow = n == 0 ? "1"
                     : n > 0  ? (n == 1 ? "x" : "x^" + std::to_string(n))
                              : (n == -1 ? "y" : "y^" + std::to_string(-n));
    int k = n - 1;
    std::string epart = k == 0 ? "e"
                      : k > 0  ? (k == 1 ? "e*x" : "e*x^" + std::to_string(k))
                               : (k == -1 ? "e*y" : "e*y^" + std::to_string(-k));
    CHECK(word_name(pr, basis.at(n)[0]) == xpow);
    CHECK(word_name(pr, basis.at(n)[1]) == epart);
  }

  Presentation lt = presentation_laurent(3);
  auto lb = enumerate_basis(lt, -3, 3);
  REQUIRE(lb.at(-3).size() == 1);
  CHECK(word_name(lt, lb.at(-3)[0]) == "y^3");

  Presentation tr = presentation_truncated_endo(3);
  auto tb = enumerate_basis(tr, 0, 3);
  std::vector<std::vector<std::string>> want = {{"1"}, {"x", "e"}, {"x^2", "e*x"}, {"e*x^2"}};
  for (int n = 0; n <= 3; ++n) {
    REQUIRE(tb.at(n).size() == want[n].size());
    for (std::size_t i = 0; i < want[n].size(); ++i)
      CHECK(word_name(tr, tb.at(n)[i]) == want[n][i]);
  }
}

TEST_CASE("expressing reduced polynomials in an enumerated basis") {
  Presentation pr = presentation_periodic_endo(3);
  auto basis = enumerate_basis(pr, -1, 1);
  Poly ye = reduce_full(word_poly({2, 1}), pr);
  std::vector<Int> c = express_in_basis(ye, basis.at(0), 0);
  CHECK(c == std::vector<Int>{Int(1), Int(-1)});
  CHECK_THROWS_AS(express_in_basis(word_poly({}), basis.at(1), 0), BadInput);
}

TEST_CASE("periodic algebra structure constants match the closed forms") {
  GradedAlgebra g = periodic_endo_dga(3, -5, 5);
  REQUIRE(g.mod() == 0);
  CHECK(g.unit().coords == std::vector<Int>{Int(1), Int(0)});
  for (int d1 = -5; d1 <= 5; ++d1)
    for (int d2 = -5; d2 <= 5; ++d2) {
      if (!g.can_multiply(d1, d2)) continue;
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
          GradedElement p = g.multiply(g.basis_element(d1, i), g.basis_element(d2, j));
          REQUIRE(p.coords == oracle_product(d1, i, d2, j));
        }
    }
  for (long long p : {2, 3, 5}) {
    GradedAlgebra a = periodic_endo_dga(p, -4, 4);
    for (int k = -3; k <= 4; ++k) {
      ZMat want(2, 2);
      want.at(0, 1) = p;
      CHECK(a.d_matrix(k) == want);
    }
  }
}

TEST_CASE("trusted homology of the presented algebras") {
  for (long long p : {2, 3, 5}) {
    GradedAlgebra a = periodic_endo_dga(p, -5, 5);
    REQUIRE(a.h_lo() == -4);
    REQUIRE(a.h_hi() == 4);
    for (int k = -4; k <= 4; ++k) {
      GroupType t = a.homology_type(k);
      CHECK(t.order() == p);
      CHECK(t.is_elementary(static_cast<std::uint64_t>(p)));
    }
    CHECK_THROWS_AS(a.homology_type(-5), OutsideTrustedWindow);
    CHECK_THROWS_AS(a.homology_type(5), OutsideTrustedWindow);

    GradedAlgebra l = laurent_dga(p, -4, 4);
    for (int k = -3; k <= 3; ++k) CHECK(l.homology_type(k).order() == p);

    GradedAlgebra m = mod_p_resolution_dga(p);
    CHECK(m.homology_type(0).to_string() == "Z/" + std::to_string(p));
    CHECK(m.homology_type(1).is_trivial());

    GradedAlgebra tr = truncated_endo_dga(p);
    CHECK(tr.homology_type(0).order() == p);
    CHECK(tr.homology_type(1).order() == p);
    CHECK(tr.homology_type(2).order() == p);
    CHECK(tr.homology_type(3).is_trivial());
  }
}

TEST_CASE("presentation and window validation") {
  CHECK_THROWS_AS(laurent_dga(4, -2, 2), BadInput);
  {
    Presentation pr;
    pr.gens = {{"", 1}};
    CHECK_THROWS_AS(validate_presentation(pr), BadInput);
  }
  {
    Presentation pr;
    pr.gens = {{"a", 1}};
    pr.rules.push_back({{}, Poly{}});
    CHECK_THROWS_AS(validate_presentation(pr), BadInput);
  }
  {
    Presentation pr;
    pr.gens = {{"x", 1}, {"y", -1}};
    pr.rules.push_back({{0, 0}, word_poly({0})});
    CHECK_THROWS_AS(validate_presentation(pr), BadInput);
  }
  {
    Presentation pr;
    pr.gens = {{"x", 1}};
    pr.diff[0] = word_poly({0});
    CHECK_THROWS_AS(validate_presentation(pr), BadInput);
  }
  {
    Presentation pr;
    pr.gens = {{"a", 1}, {"b", -1}};
    pr.rules.push_back({{0, 1}, word_poly({0, 0, 1, 1})});
    CHECK_THROWS_AS(reduce_full(word_poly({0, 1}), pr, ReduceOrder::Leftmost, 0, 500),
                    RewriteDiverged);
  }
  {
    Presentation pr;
    pr.gens = {{"u", 0}};
    CHECK_THROWS_AS(enumerate_basis(pr, 0, 0, 100), TooLarge);
  }
  CHECK_THROWS_AS(GradedAlgebra(0, 1, 0, false, false), BadWindow);
  CHECK_THROWS_AS(GradedAlgebra(0, 1, 2, false, false), BadWindow);
  CHECK_THROWS_AS(build_from_presentation(presentation_truncated_endo(3), 0, 2, false, false),
                  BadInput);
  {
    GradedAlgebra g(2, 0, 0, false, false);
    g.set_degree(0, {"1"});
    g.set_product(0, 0, 0, 0, {Int(0)});
    g.set_unit({Int(1)});
    CHECK_THROWS_AS(g.validate(), BadInput);
  }
  CHECK_THROWS_AS(reduce_mod_p(laurent_dga(3, -2, 2), 3), NotFree);
  CHECK_THROWS_AS(postnikov_section(periodic_endo_dga(2, -3, 3), 1), NotConnective);
  CHECK_THROWS_AS(connective_cover(mod_p_resolution_dga(2)), BadWindow);
  {
    GradedAlgebra ca = connective_cover(periodic_endo_dga(2, -3, 3));
    CHECK_THROWS_AS(postnikov_section(ca, 3), BadWindow);
    CHECK_THROWS_AS(postnikov_section(ca, -1), BadInput);
  }
  CHECK_THROWS_AS(tensor_with_mod_p_resolution(laurent_dga(3, -2, 2), 2), BadInput);
  CHECK_THROWS_AS(tensor_with_mod_p_resolution(periodic_endo_dga(3, -2, 2), 4), BadInput);
  CHECK_THROWS_AS(homology_ring_of(laurent_dga(3, -2, 2), 2), BadInput);
}

TEST_CASE("connective cover preserves nonnegative homology") {
  for (long long p : {2, 3}) {
    GradedAlgebra a = periodic_endo_dga(p, -4, 4);
    GradedAlgebra ca = connective_cover(a);
    REQUIRE(ca.lo() == 0);
    REQUIRE_FALSE(ca.lo_cut());
    REQUIRE(ca.hi_cut());
    CHECK(ca.names(0) == std::vector<std::string>{"1"});
    CHECK(ca.dim(1) == 2);
    {
      ZMat want(1, 2);
      want.at(0, 1) = p;
      CHECK(ca.d_matrix(1) == want);
    }
    for (int i = 0; i <= ca.h_hi(); ++i)
      CHECK(ca.homology_type(i) == a.homology_type(i));

    GradedAlgebra l = laurent_dga(p, -4, 4);
    GradedAlgebra cl = connective_cover(l);
    for (int i = 0; i <= cl.h_hi(); ++i)
      CHECK(cl.homology_type(i) == l.homology_type(i));
  }
}

TEST_CASE("postnikov sections truncate homology and keep free terms") {
  for (long long p : {2, 3}) {
    GradedAlgebra ca = connective_cover(periodic_endo_dga(p, -4, 4));
    for (int n : {1, 2}) {
      GradedAlgebra s = postnikov_section(ca, n);
      REQUIRE(s.lo() == 0);
      REQUIRE(s.hi() == n + 1);
      REQUIRE_FALSE(s.lo_cut());
      REQUIRE_FALSE(s.hi_cut());
      for (int i = 0; i <= n; ++i) CHECK(s.homology_type(i) == ca.homology_type(i));
      CHECK(s.homology_type(n + 1).is_trivial());
    }
    GradedAlgebra s2 = postnikov_section(ca, 2);
    CHECK(s2.names(3) == std::vector<std::string>{"e*x^2"});
    {
      ZMat want(2, 1);
      want.at(0, 0) = p;
      CHECK(s2.d_matrix(3) == want);
    }
    CHECK(same_structure(s2, truncated_endo_dga(p)));
  }
}

TEST_CASE("second section of the covered laurent algebra is a truncated polynomial ring") {
  for (long long p : {2, 3, 5}) {
    GradedAlgebra cl = connective_cover(laurent_dga(p, -3, 3));
    GradedAlgebra s = postnikov_section(cl, 2);
    REQUIRE(s.dim(0) == 1);
    REQUIRE(s.dim(1) == 1);
    REQUIRE(s.dim(2) == 1);
    REQUIRE(s.dim(3) == 0);
    CHECK(s.names(1) == std::vector<std::string>{"x"});
    CHECK(s.names(2) == std::vector<std::string>{"x^2"});
    GradedElement x = s.basis_element(1, 0);
    CHECK(s.multiply(x, x).coords == std::vector<Int>{Int(1)});
    CHECK(s.multiply(x, s.basis_element(2, 0)).coords.empty());
    for (int k = 1; k <= 3; ++k) CHECK(s.d_matrix(k) == ZMat(s.dim(k - 1), s.dim(k)));
    CHECK(s.homology_type(0).order() == p);
    CHECK(s.homology_type(1).order() == p);
    CHECK(s.homology_type(2).order() == p);
    CHECK(s.homology_type(3).is_trivial());
  }
}

TEST_CASE("tensoring with the two-term resolution follows the sign rule") {
  for (long long p : {2, 3}) {
    GradedAlgebra ca = connective_cover(periodic_endo_dga(p, -4, 4));
    GradedAlgebra t = tensor_with_mod_p_resolution(ca, p);
    REQUIRE(t.lo() == 0);
    REQUIRE(t.hi() == 4);
    for (int d = 1; d <= 4; ++d) REQUIRE(t.dim(d) == ca.dim(d) + ca.dim(d - 1));
    REQUIRE(t.dim(0) == 1);
    CHECK(t.name(1, 2) == "f");

    std::size_t off1 = ca.dim(1);
    GradedElement f = t.basis_element(1, off1);
    GradedElement x = t.basis_element(1, 0);
    CHECK(t.is_zero_elem(t.multiply(f, f)));
    GradedElement fx = t.multiply(f, x);
    GradedElement xf = t.multiply(x, f);
    CHECK(t.is_zero_elem(t.add(fx, xf)));
    REQUIRE(fx.coords.size() == t.dim(2));
    CHECK(fx.coords[ca.dim(2)] == 1);

    std::vector<Int> df = t.d_of(f).coords;
    std::vector<Int> want(t.dim(0), Int(0));
    want[0] = coeff_reduce(Int(p), t.mod());
    CHECK(df == want);
  }
}

TEST_CASE("both reduction models yield matching homology invariants") {
  for (long long p : {2, 3}) {
    GradedAlgebra a = periodic_endo_dga(p, -5, 5);
    HomologyRing h1 = tensor_homology_ring(a, DerivedTensorModel::DegreewiseReduction, p);
    HomologyRing h2 = tensor_homology_ring(a, DerivedTensorModel::ResolutionTensor, p);
    int lo = std::max(h1.lo, h2.lo), hi = std::min(h1.hi, h2.hi);
    REQUIRE(lo <= -2);
    REQUIRE(hi >= 2);
    for (int d = lo; d <= hi; ++d) CHECK(h1.dim(d) == h2.dim(d));
    CHECK(homology_ring_well_defined(h1));
    CHECK(homology_ring_well_defined(h2));
    CHECK_FALSE(is_graded_commutative(h1, lo, hi).commutative);
    CHECK_FALSE(is_graded_commutative(h2, lo, hi).commutative);
    CHECK(degree_one_graded_center(h1).trivial());
    CHECK(degree_one_graded_center(h2).trivial());
  }
}

TEST_CASE("reduced periodic homology is never graded commutative") {
  for (long long p : {2, 3, 5}) {
    GradedAlgebra a = periodic_endo_dga(p, -5, 5);
    HomologyRing h = tensor_homology_ring(a, DerivedTensorModel::DegreewiseReduction, p);
    CHECK(homology_ring_well_defined(h));

    CommutativityResult r = is_graded_commutative(h, h.lo, h.hi);
    CHECK_FALSE(r.commutative);
    REQUIRE(r.witness.has_value());

    std::size_t ie = name_index(h, 1, "[e]");
    std::size_t ix = name_index(h, 1, "[x]");
    std::size_t ixx = name_index(h, 2, "[x^2]");
    std::vector<Int> anti = anticommutator(h, 1, ie, 1, ix);
    std::vector<Int> want(h.dim(2), Int(0));
    want[ixx] = 1;
    CHECK(anti == want);

    CHECK(degree_one_graded_center(h).trivial());
  }
}

TEST_CASE("laurent-side homology commutes exactly at p = 2") {
  for (long long p : {2, 3, 5}) {
    GradedAlgebra l = laurent_dga(p, -5, 5);
    HomologyRing h = homology_ring_of(tensor_with_mod_p_resolution(l, p), p);
    CHECK(homology_ring_well_defined(h));

    CommutativityResult r = is_graded_commutative(h, h.lo, h.hi);
    CHECK(r.commutative == (p == 2));
    if (p != 2) REQUIRE(r.witness.has_value());

    CenterBasis c = degree_one_graded_center(h);
    REQUIRE(c.ambient_dim == 2);
    std::size_t iff = name_index(h, 1, "[f]");
    if (p == 2) {
      CHECK(c.full());
    } else {
      REQUIRE(c.basis.size() == 1);
      std::vector<std::uint64_t> want(2, 0);
      want[iff] = 1;
      CHECK(c.basis[0] == want);
    }
  }
}

TEST_CASE("degree-one center agrees with brute force") {
  for (long long p : {2, 3, 5}) {
    for (int side : {0, 1}) {
      HomologyRing h =
          side == 0
              ? tensor_homology_ring(periodic_endo_dga(p, -5, 5),
                                     DerivedTensorModel::DegreewiseReduction, p)
              : homology_ring_of(tensor_with_mod_p_resolution(laurent_dga(p, -5, 5), p), p);
      CenterBasis c = degree_one_graded_center(h);
      std::size_t n1 = h.dim(1), n2 = h.dim(2);

      std::set<std::vector<std::uint64_t>> brute;
      std::vector<std::uint64_t> w(n1, 0);
      while (true) {
        bool central = true;
        for (std::size_t j = 0; j < n1 && central; ++j)
          for (std::size_t ccoord = 0; ccoord < n2; ++ccoord) {
            Int s = 0;
            for (std::size_t i = 0; i < n1; ++i)
              s += Int(w[i]) * (h.product(1, i, 1, j)[ccoord] + h.product(1, j, 1, i)[ccoord]);
            if (coeff_reduce(s, p) != 0) {
              central = false;
              break;
            }
          }
        if (central) brute.insert(w);
        std::size_t k = 0;
        while (k < n1 && ++w[k] == static_cast<std::uint64_t>(p)) w[k++] = 0;
        if (k == n1) break;
      }

      std::set<std::vector<std::uint64_t>> span;
      std::vector<std::uint64_t> coef(c.basis.size(), 0);
      while (true) {
        std::vector<std::uint64_t> v(n1, 0);
        for (std::size_t b = 0; b < c.basis.size(); ++b)
          for (std::size_t i = 0; i < n1; ++i)
            v[i] = (v[i] + coef[b] * c.basis[b][i]) % static_cast<std::uint64_t>(p);
        span.insert(v);
        std::size_t k = 0;
        while (k < coef.size() && ++coef[k] == static_cast<std::uint64_t>(p)) coef[k++] = 0;
        if (k == coef.size()) break;
      }

      CHECK(brute == span);
    }
  }
}

TEST_CASE("truncated quotients keep the dichotomy at the prime two") {
  for (long long p : {2, 3}) {
    GradedAlgebra s = postnikov_section(connective_cover(laurent_dga(p, -3, 3)), 2);
    HomologyRing hq = homology_ring_of(s, p);
    CHECK(is_graded_commutative(hq, 0, 3).commutative == (p == 2));

    HomologyRing ht =
        tensor_homology_ring(truncated_endo_dga(p), DerivedTensorModel::DegreewiseReduction, p);
    CHECK_FALSE(is_graded_commutative(ht, 0, 3).commutative);
  }
}

TEST_CASE("homology ring access is limited to the trusted range") {
  HomologyRing h = tensor_homology_ring(periodic_endo_dga(3, -3, 3),
                                        DerivedTensorModel::DegreewiseReduction, 3);
  REQUIRE(h.lo == -2);
  REQUIRE(h.hi == 2);
  CHECK_THROWS_AS(h.dim(3), OutsideTrustedWindow);
  CHECK(h.product_known(1, 1));
  CHECK_FALSE(h.product_known(2, 2));
  CHECK_THROWS_AS(h.product(2, 0, 2, 0), OutsideTrustedWindow);

  HomologyRing hm = homology_ring_of(mod_p_resolution_dga(3), 3);
  CHECK_THROWS_AS(degree_one_graded_center(hm), OutsideTrustedWindow);
}

TEST_CASE("endomorphism complex comparison certifies the presentations") {
  for (long long p : {2, 3}) {
    for (RingKind kind : {RingKind::Zpsq, RingKind::Eps}) {
      BaseRing r(kind, static_cast<std::uint64_t>(p));
      EndComparisonReport rep = end_complex_comparison(r, -6, 6);
      CHECK(rep.all_ok);
      CHECK(rep.even_cycle_shape_ok);
      REQUIRE(rep.relations.size() == (kind == RingKind::Zpsq ? 7 : 5));
      for (const EndRelationCheck& c : rep.relations) CHECK(c.holds);
      std::set<int> seen;
      for (const EndHomologyRow& row : rep.rows) {
        CHECK(row.generator_hits);
        CHECK(row.type.order() == p);
        seen.insert(row.n);
      }
      for (int n = -4; n <= 4; ++n) REQUIRE(seen.count(n) == 1);
      if (kind == RingKind::Eps) {
        bool found = false;
        for (const EndRelationCheck& c : rep.relations) found |= c.name == "p*1 = 0";
        CHECK(found);
      }
    }
  }
  CHECK_THROWS_AS(end_complex_comparison(BaseRing(RingKind::Zpsq, 2), -1, 6),
                  OutsideTrustedWindow);
}
