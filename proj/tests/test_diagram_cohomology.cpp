#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

#include "stmod/diagram_cohomology.hpp"

using namespace stmod;

namespace {

VectDiagram random_diagram(const FiniteCategory& cat, std::uint64_t p, std::size_t max_dim,
                           std::mt19937& rng) {
  // random dims, random generator maps; composites are filled in by
  // factoring, and parallel factorizations through a common left factor are
  // reconciled inside its kernel
  std::uniform_int_distribution<std::size_t> dd(0, max_dim);
  std::uniform_int_distribution<std::uint64_t> vv(0, p - 1);
  std::vector<bool> is_composite(cat.mor.size(), false);
  for (std::size_t f = 0; f < cat.mor.size(); ++f)
    for (std::size_t g = 0; g < cat.mor.size(); ++g)
      if (cat.composable(g, f) && !cat.is_id(f) && !cat.is_id(g))
        is_composite[cat.comp[g][f]] = true;

  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<std::size_t> dims(cat.n_objects);
    for (auto& d : dims) d = dd(rng);
    VectDiagram d = vect_diagram(cat, p, dims);
    std::vector<bool> done(cat.mor.size(), false);
    for (std::size_t m = 0; m < cat.mor.size(); ++m) {
      if (cat.is_id(m)) {
        done[m] = true;
        continue;
      }
      if (is_composite[m]) continue;
      for (std::size_t r = 0; r < d.mat[m].rows(); ++r)
        for (std::size_t c = 0; c < d.mat[m].cols(); ++c) d.mat[m].at(r, c) = vv(rng);
      done[m] = true;
    }
    std::vector<std::size_t> via(cat.mor.size(), FiniteCategory::npos);
    bool progress = true, ok = true;
    for (int sweep = 0; progress && ok; ++sweep) {
      if (sweep > 100) {
        ok = false;
        break;
      }
      progress = false;
      for (std::size_t f = 0; f < cat.mor.size() && ok; ++f)
        for (std::size_t g = 0; g < cat.mor.size() && ok; ++g) {
          if (!cat.composable(g, f) || cat.is_id(f) || cat.is_id(g)) continue;
          if (!done[f] || !done[g]) continue;
          std::size_t m = cat.comp[g][f];
          FpMat prod = d.mat[g] * d.mat[f];
          if (!done[m]) {
            d.mat[m] = prod;
            done[m] = true;
            via[m] = g;
            progress = true;
          } else if (!(d.mat[m] == prod)) {
            if (via[m] != g) {
              ok = false;  // conflicting factorizations, resample
              break;
            }
            // same left factor: rebuild f as a particular solution of
            // g * f = m plus random noise from ker(g)
            FpMat ker = fp_kernel_basis(d.mat[g]);
            FpMat coeff(p, ker.cols(), d.mat[f].cols());
            for (std::size_t r = 0; r < coeff.rows(); ++r)
              for (std::size_t c = 0; c < coeff.cols(); ++c) coeff.at(r, c) = vv(rng);
            FpMat shift = ker * coeff;
            bool solved = true;
            FpMat nf(p, d.mat[f].rows(), d.mat[f].cols());
            for (std::size_t c = 0; c < nf.cols() && solved; ++c) {
              std::vector<std::uint64_t> col(d.mat[m].rows());
              for (std::size_t r = 0; r < col.size(); ++r) col[r] = d.mat[m].at(r, c);
              auto sol = fp_solve(d.mat[g], col);
              if (!sol) {
                solved = false;
                break;
              }
              for (std::size_t r = 0; r < nf.rows(); ++r)
                nf.at(r, c) = ((*sol)[r] + shift.at(r, c)) % p;
            }
            if (!solved) {
              ok = false;
              break;
            }
            d.mat[f] = nf;
            progress = true;
          }
        }
    }
    if (!ok) continue;
    try {
      d.validate();
      return d;
    } catch (const BadInput&) {
      continue;
    }
  }
  throw Error("internal: could not sample a functorial diagram");
}

std::size_t hom_dim(const VectDiagram& a, const VectDiagram& b) {
  return natural_transformation_dim(a, b);
}

}  // namespace

TEST_CASE("catalog categories have the expected shape") {
  FiniteCategory a1 = category_arrow(1);
  CHECK(a1.n_objects == 2);
  CHECK(a1.mor.size() == 3);
  CHECK(a1.hom_set(0, 1).size() == 1);
  CHECK(a1.hom_set(1, 0).empty());
  CHECK(a1.degree == std::vector<int>{0, 1});

  FiniteCategory a2 = category_arrow(2);
  CHECK(a2.n_objects == 3);
  CHECK(a2.mor.size() == 6);

  FiniteCategory cq = category_coequalizer();
  CHECK(cq.n_objects == 3);
  CHECK(cq.mor.size() == 7);
  std::size_t non_id = 0;
  for (std::size_t m = 0; m < cq.mor.size(); ++m)
    if (!cq.is_id(m)) ++non_id;
  CHECK(non_id == 4);
  CHECK(cq.hom_set(0, 1).size() == 2);
  CHECK(cq.hom_set(1, 2).size() == 1);
  CHECK(cq.hom_set(0, 2).size() == 1);
  // both parallel arrows compose with the collapse arrow to the same morphism
  std::size_t a = cq.hom_set(0, 1)[0], b = cq.hom_set(0, 1)[1];
  std::size_t c = cq.hom_set(1, 2)[0];
  CHECK(cq.compose(c, a) == cq.compose(c, b));
  CHECK(cq.compose(c, a) == cq.hom_set(0, 2)[0]);

  FiniteCategory d3 = category_discrete(3);
  CHECK(d3.mor.size() == 3);
  CHECK(d3.hom_set(0, 1).empty());
}

TEST_CASE("free quiver categories enumerate paths and reject cycles") {
  // chain graph reproduces the linear category
  FiniteCategory q = category_free_quiver(3, {{0, 1}, {1, 2}});
  CHECK(q.n_objects == 3);
  CHECK(q.mor.size() == 6);
  CHECK(q.hom_set(0, 2).size() == 1);
  CHECK(q.degree == std::vector<int>{0, 1, 2});

  // two parallel edges then one more: four paths from 0 to 2
  FiniteCategory par = category_free_quiver(3, {{0, 1}, {0, 1}, {1, 2}});
  CHECK(par.hom_set(0, 1).size() == 2);
  CHECK(par.hom_set(0, 2).size() == 2);

  // commuting-square shape: two distinct paths corner to corner
  FiniteCategory sq = category_free_quiver(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  CHECK(sq.hom_set(0, 3).size() == 2);

  CHECK_THROWS_AS(category_free_quiver(2, {{0, 1}, {1, 0}}), InvalidPresentation);
  CHECK_THROWS_AS(category_free_quiver(1, {{0, 0}}), InvalidPresentation);
  CHECK_THROWS_AS(category_free_quiver(2, {{0, 5}}), InvalidPresentation);
}

TEST_CASE("custom categories are validated") {
  FiniteCategory cq = category_coequalizer();
  // a faithful clone passes
  FiniteCategory ok = category_custom(cq.n_objects, cq.mor, cq.identity, cq.comp, cq.degree);
  CHECK(ok.kind == "custom");

  // break identity neutrality
  auto bad = cq.comp;
  bad[3][0] = 4;  // a after id0 claimed to be b
  CHECK_THROWS_AS(category_custom(cq.n_objects, cq.mor, cq.identity, bad, cq.degree),
                  InvalidPresentation);

  // composite recorded for a non-composable pair
  bad = cq.comp;
  bad[3][5] = 6;
  CHECK_THROWS_AS(category_custom(cq.n_objects, cq.mor, cq.identity, bad, cq.degree),
                  InvalidPresentation);

  // composite with wrong endpoints
  bad = cq.comp;
  bad[5][3] = 3;
  CHECK_THROWS_AS(category_custom(cq.n_objects, cq.mor, cq.identity, bad, cq.degree),
                  InvalidPresentation);

  // degree function must strictly increase along non-identities
  CHECK_THROWS_AS(category_custom(cq.n_objects, cq.mor, cq.identity, cq.comp, {0, 0, 1}),
                  InvalidPresentation);

  // identity morphism of object 1 not an endomap of 1
  CHECK_THROWS_AS(category_custom(cq.n_objects, cq.mor, {0, 0, 2}, cq.comp, cq.degree),
                  InvalidPresentation);
}

TEST_CASE("diagram validation catches broken functors") {
  FiniteCategory cq = category_coequalizer();
  std::size_t a = cq.hom_set(0, 1)[0], c = cq.hom_set(1, 2)[0], d = cq.hom_set(0, 2)[0];

  VectDiagram v = vect_diagram(cq, 2, {1, 1, 1});
  v.validate();  // all-zero non-identity maps are functorial here? composite must be zero too
  FpMat one(2, 1, 1);
  one.at(0, 0) = 1;
  v.set_map(a, one);
  v.set_map(c, one);
  CHECK_THROWS_AS(v.validate(), BadInput);  // composite still zero
  v.set_map(d, one);
  CHECK_THROWS_AS(v.validate(), BadInput);  // other parallel arrow composes to zero through c

  VectDiagram w = vect_diagram(cq, 2, {1, 1, 1});
  w.set_map(d, one);
  CHECK_THROWS_AS(w.validate(), BadInput);

  CHECK_THROWS_AS(vect_diagram(cq, 4, {1, 1, 1}).validate(), BadInput);
  CHECK_THROWS_AS(v.set_map(a, FpMat(2, 2, 2)), BadInput);

  // identity slot tampered
  VectDiagram u = vect_diagram(cq, 3, {2, 0, 0});
  u.mat[cq.identity[0]].at(0, 1) = 1;
  CHECK_THROWS_AS(u.validate(), BadInput);
}

TEST_CASE("representable diagrams have the adjunction dimensions") {
  std::mt19937 rng(2026);
  for (std::uint64_t p : {2ull, 3ull}) {
    for (const FiniteCategory& cat :
         {category_arrow(2), category_coequalizer(), category_free_quiver(3, {{0, 1}, {0, 2}})}) {
      for (std::size_t i = 0; i < cat.n_objects; ++i) {
        for (std::size_t x : {1, 2}) {
          VectDiagram f = free_diagram(cat, p, i, x);
          for (std::size_t j = 0; j < cat.n_objects; ++j)
            CHECK(f.dim[j] == cat.hom_set(i, j).size() * x);
          for (int t = 0; t < 3; ++t) {
            VectDiagram b = random_diagram(cat, p, 2, rng);
            CHECK(hom_dim(f, b) == x * b.dim[i]);
          }
        }
      }
    }
  }
}

TEST_CASE("representable diagrams are projective") {
  std::mt19937 rng(7);
  for (std::uint64_t p : {2ull, 3ull}) {
    for (const FiniteCategory& cat : {category_arrow(2), category_coequalizer()}) {
      for (std::size_t i = 0; i < cat.n_objects; ++i) {
        VectDiagram f = free_diagram(cat, p, i, 1);
        for (int t = 0; t < 3; ++t) {
          VectDiagram b = random_diagram(cat, p, 2, rng);
          std::vector<std::size_t> ext = ext_groups(f, b, 3);
          for (int n = 1; n <= 3; ++n) CHECK(ext[n] == 0);
        }
      }
    }
  }
}

TEST_CASE("representable structure maps on the coequalizer shape") {
  FiniteCategory cq = category_coequalizer();
  VectDiagram f0 = free_diagram(cq, 5, 0, 1);
  CHECK(f0.dim == std::vector<std::size_t>{1, 2, 1});
  std::size_t a = cq.hom_set(0, 1)[0], b = cq.hom_set(0, 1)[1], c = cq.hom_set(1, 2)[0];
  // the two parallel arrows include the generator into different coordinates
  CHECK(f0.mat[a].at(0, 0) + f0.mat[b].at(0, 0) == 1);
  CHECK(f0.mat[a].at(1, 0) + f0.mat[b].at(1, 0) == 1);
  // the collapse arrow identifies both coordinates
  CHECK(f0.mat[c].at(0, 0) == 1);
  CHECK(f0.mat[c].at(0, 1) == 1);

  VectDiagram f1 = free_diagram(cq, 5, 1, 1);
  CHECK(f1.dim == std::vector<std::size_t>{0, 1, 1});
  CHECK(f1.mat[c].at(0, 0) == 1);

  VectDiagram f2 = free_diagram(cq, 5, 2, 1);
  CHECK(f2.dim == std::vector<std::size_t>{0, 0, 1});
}

TEST_CASE("chain levels of the cochain complex have the predicted sizes") {
  FiniteCategory a1 = category_arrow(1);
  VectDiagram d = free_diagram(a1, 2, 0, 1);  // k -> k with the identity
  CHECK(d.dim == std::vector<std::size_t>{1, 1});
  BarComplex bc = bar_complex(d, d, 2);
  // level 0: one block per object
  CHECK(bc.level_dim[0] == 2);
  // level 1: one block per morphism, identities included
  CHECK(bc.level_dim[1] == 3);
  CHECK(bc.chains[1].size() == 3);
  // level 2: three composable pairs start at 0, one at 1
  CHECK(bc.chains[2].size() == 4);
}

TEST_CASE("mapping dimensions on the two-object chain") {
  FiniteCategory a1 = category_arrow(1);
  VectDiagram d = skyscraper_diagram(a1, 3, 0);  // k -> 0
  VectDiagram e = skyscraper_diagram(a1, 3, 1);  // 0 -> k
  std::vector<std::size_t> ext = ext_groups(d, e, 4);
  CHECK(ext == std::vector<std::size_t>{0, 1, 0, 0, 0});
  // no maps backwards even at the derived level
  std::vector<std::size_t> back = ext_groups(e, d, 4);
  CHECK(back == std::vector<std::size_t>{0, 0, 0, 0, 0});
  CHECK(ho_dimension_collapsed(d, e) == 1);
  CHECK(ho_dimension_collapsed(e, d) == 0);
  CHECK(ho_dimension_collapsed(d, d) == 1);
}

TEST_CASE("the coequalizer shape concentrates its obstruction in level two") {
  for (std::uint64_t p : {2ull, 3ull, 5ull}) {
    FiniteCategory cq = category_coequalizer();
    VectDiagram d = skyscraper_diagram(cq, p, 0);
    VectDiagram e = skyscraper_diagram(cq, p, 2);
    std::vector<std::size_t> ext = ext_groups(d, e, 5);
    CHECK(ext == std::vector<std::size_t>{0, 0, 1, 0, 0, 0});
  }
}

TEST_CASE("no cohomology above level two on the coequalizer shape") {
  std::mt19937 rng(11);
  FiniteCategory cq = category_coequalizer();
  for (std::uint64_t p : {2ull, 3ull}) {
    for (int t = 0; t < 4; ++t) {
      VectDiagram d = random_diagram(cq, p, 2, rng);
      VectDiagram e = random_diagram(cq, p, 2, rng);
      std::vector<std::size_t> ext = ext_groups(d, e, 4);
      CHECK(ext[3] == 0);
      CHECK(ext[4] == 0);
    }
  }
}

TEST_CASE("resolution bookkeeping on the coequalizer shape") {
  // skyscraper at 1 has the two-step resolution by representables at 2 and 1;
  // skyscraper at 0 has the three-step one.  Euler characteristics must match
  // the alternating sums of the adjunction dimensions.
  std::mt19937 rng(23);
  FiniteCategory cq = category_coequalizer();
  for (std::uint64_t p : {2ull, 3ull}) {
    for (int t = 0; t < 4; ++t) {
      VectDiagram bdiag = random_diagram(cq, p, 2, rng);
      auto euler = [&](const VectDiagram& d) {
        std::vector<std::size_t> ext = ext_groups(d, bdiag, 4);
        long s = 0;
        for (std::size_t n = 0; n < ext.size(); ++n)
          s += (n % 2 ? -1 : 1) * static_cast<long>(ext[n]);
        return s;
      };
      VectDiagram s1 = skyscraper_diagram(cq, p, 1);
      long lhs1 = euler(s1);
      long rhs1 = static_cast<long>(bdiag.dim[1]) - static_cast<long>(bdiag.dim[2]);
      CHECK(lhs1 == rhs1);
      VectDiagram s0 = skyscraper_diagram(cq, p, 0);
      long lhs0 = euler(s0);
      long rhs0 = static_cast<long>(bdiag.dim[0]) - 2 * static_cast<long>(bdiag.dim[1]) +
                  static_cast<long>(bdiag.dim[2]);
      CHECK(lhs0 == rhs0);
      // the skyscraper at 1 already has a length-one resolution
      CHECK(ext_groups(s1, bdiag, 3)[2] == 0);
      CHECK(ext_groups(s1, bdiag, 3)[3] == 0);
    }
  }
}

TEST_CASE("cohomological dimension certificates") {
  CdReport a1 = certify_cd(category_arrow(1), 3);
  CHECK(a1.lower == 1);
  REQUIRE(a1.upper.has_value());
  CHECK(*a1.upper == 1);
  REQUIRE(a1.value.has_value());
  CHECK(*a1.value == 1);
  CHECK(a1.witness.find("Ext^1") != std::string::npos);

  CdReport a3 = certify_cd(category_arrow(3), 3);
  CHECK(a3.value == std::optional<std::size_t>(1));

  CdReport cq = certify_cd(category_coequalizer(), 4);
  CHECK(cq.lower == 2);
  CHECK(cq.upper == std::optional<std::size_t>(2));
  CHECK(cq.value == std::optional<std::size_t>(2));

  CdReport pt = certify_cd(category_arrow(0), 2);
  CHECK(pt.value == std::optional<std::size_t>(0));
  CdReport disc = certify_cd(category_discrete(2), 2);
  CHECK(disc.value == std::optional<std::size_t>(0));

  FiniteCategory quiv = category_free_quiver(3, {{0, 1}, {0, 1}, {1, 2}});
  CdReport qr = certify_cd(quiv, 3);
  CHECK(qr.value == std::optional<std::size_t>(1));

  // custom categories only get lower bounds
  FiniteCategory c = category_coequalizer();
  FiniteCategory clone = category_custom(c.n_objects, c.mor, c.identity, c.comp, c.degree);
  CdReport cr = certify_cd(clone, 4);
  CHECK(cr.lower == 2);
  CHECK_FALSE(cr.upper.has_value());
  CHECK_FALSE(cr.value.has_value());

  // caller-chosen probe pairs
  std::vector<std::pair<VectDiagram, VectDiagram>> pairs;
  pairs.emplace_back(skyscraper_diagram(category_arrow(1), 2, 0),
                     skyscraper_diagram(category_arrow(1), 2, 0));
  CdReport weak = certify_cd(category_arrow(1), 3, 2, &pairs);
  CHECK(weak.lower == 0);  // this pair only witnesses level zero
  CHECK_FALSE(weak.value.has_value());
}

TEST_CASE("mapping tables collapse exactly for short categories") {
  FiniteCategory a2 = category_arrow(2);
  VectDiagram d = skyscraper_diagram(a2, 2, 0);
  VectDiagram e = skyscraper_diagram(a2, 2, 2);
  E2Table t = spectral_sequence_E2(d, e, 3, 2);
  CHECK(t.collapsed);
  REQUIRE(t.entry.size() == 3);
  for (std::size_t q = 0; q < t.entry.size(); ++q) {
    CHECK(t.entry[q].size() == 4);
    CHECK(t.entry[q] == t.entry[0]);
  }

  FiniteCategory cq = category_coequalizer();
  E2Table u = spectral_sequence_E2(skyscraper_diagram(cq, 2, 0), skyscraper_diagram(cq, 2, 2), 3, 1);
  CHECK_FALSE(u.collapsed);
  CHECK(u.entry[0][2] == 1);
  CHECK_THROWS_AS(ho_dimension_collapsed(skyscraper_diagram(cq, 2, 0), skyscraper_diagram(cq, 2, 2)),
                  CdTooLarge);

  // identity-on-free case: everything is in the left column
  VectDiagram f = free_diagram(a2, 3, 0, 1);
  CHECK(ho_dimension_collapsed(f, f) == 1);
  std::vector<std::size_t> ext = ext_groups(f, f, 2);
  CHECK(ext == std::vector<std::size_t>{1, 0, 0});
}

TEST_CASE("mismatched inputs are rejected") {
  VectDiagram d = skyscraper_diagram(category_arrow(1), 2, 0);
  VectDiagram e = skyscraper_diagram(category_coequalizer(), 2, 0);
  CHECK_THROWS_AS(bar_complex(d, e, 1), CategoryMismatch);
  CHECK_THROWS_AS(natural_transformation_dim(d, e), CategoryMismatch);
  VectDiagram d3 = skyscraper_diagram(category_arrow(1), 3, 0);
  CHECK_THROWS_AS(bar_complex(d, d3, 1), RingMismatch);
  CHECK_THROWS_AS(ext_groups(d, d, -1), BadInput);
  CHECK_THROWS_AS(bar_complex(d, d, -1), BadInput);

  VectDiagram big = free_diagram(category_coequalizer(), 2, 0, 2);
  CHECK_THROWS_AS(bar_complex(big, big, 6, 50), TooLarge);
}

TEST_CASE("path categories and linear categories give matching invariants") {
  FiniteCategory a2 = category_arrow(2);
  FiniteCategory q = category_free_quiver(3, {{0, 1}, {1, 2}});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      std::vector<std::size_t> ea =
          ext_groups(skyscraper_diagram(a2, 2, i), skyscraper_diagram(a2, 2, j), 3);
      std::vector<std::size_t> eq =
          ext_groups(skyscraper_diagram(q, 2, i), skyscraper_diagram(q, 2, j), 3);
      CHECK(ea == eq);
    }
}

TEST_CASE("derived mapping dimensions are sums of the two columns") {
  // on chain categories the table collapses, so the dimension must agree with
  // a direct count for diagrams where the answer is known in closed form
  FiniteCategory a1 = category_arrow(1);
  for (std::uint64_t p : {2ull, 3ull}) {
    VectDiagram id1 = free_diagram(a1, p, 0, 1);   // k = k
    VectDiagram s0 = skyscraper_diagram(a1, p, 0);  // k -> 0
    VectDiagram s1 = skyscraper_diagram(a1, p, 1);  // 0 -> k
    CHECK(ho_dimension_collapsed(id1, id1) == 1);
    CHECK(ho_dimension_collapsed(s1, s1) == 1);
    CHECK(ho_dimension_collapsed(s0, s0) == 1);
    // naturality forces the nonzero slot through a zero space
    CHECK(ho_dimension_collapsed(id1, s1) == 0);
    CHECK(ho_dimension_collapsed(s0, id1) == 0);
    // the projection and the inclusion each leave one class
    CHECK(ho_dimension_collapsed(id1, s0) == 1);
    CHECK(ho_dimension_collapsed(s1, id1) == 1);
  }
}
