#pragma once

// Diagrams of modules indexed by a finite direct category: latching objects
// along the degree function, cofibrant replacement by free cylinders,
// lifting multiplication by p through free covers, and exact homotopy class
// counts for maps of diagrams.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "stmod/diagram_cohomology.hpp"
#include "stmod/stable_modules.hpp"

namespace stmod {

struct ModDiagram {
  FiniteCategory cat;
  std::vector<FgModule> ob;
  std::vector<ModuleMap> map;  // one per morphism

  const BaseRing& ring() const {
    if (ob.empty()) throw BadInput("diagram has no objects");
    return ob[0].ring;
  }

  void set_map(std::size_t m, const ModuleMap& f) {
    if (f.src() != ob[cat.mor[m].src] || f.dst() != ob[cat.mor[m].dst])
      throw BadInput("structure map endpoints mismatch");
    map[m] = f;
  }

  void validate() const {
    cat.validate();
    if (ob.size() != cat.n_objects || map.size() != cat.mor.size())
      throw BadInput("diagram data does not match the category");
    for (std::size_t i = 1; i < ob.size(); ++i)
      if (ob[i].ring != ob[0].ring) throw RingMismatch("objects over different rings");
    for (std::size_t m = 0; m < map.size(); ++m)
      if (map[m].src() != ob[cat.mor[m].src] || map[m].dst() != ob[cat.mor[m].dst])
        throw BadInput("structure map " + std::to_string(m) + " has wrong endpoints");
    for (std::size_t i = 0; i < cat.n_objects; ++i)
      if (map[cat.identity[i]] != ModuleMap::identity(ob[i]))
        throw BadInput("identity morphism does not act as the identity");
    for (std::size_t f = 0; f < map.size(); ++f)
      for (std::size_t g = 0; g < map.size(); ++g) {
        if (!cat.composable(g, f)) continue;
        if (map[cat.comp[g][f]] != map[g] * map[f])
          throw BadInput("diagram is not functorial on the pair (" + std::to_string(g) + ", " +
                         std::to_string(f) + ")");
      }
  }
};

inline ModDiagram mod_diagram(const FiniteCategory& cat, std::vector<FgModule> obs) {
  ModDiagram d;
  d.cat = cat;
  d.ob = std::move(obs);
  if (d.ob.size() != cat.n_objects) throw BadInput("one module per object is required");
  for (std::size_t m = 0; m < cat.mor.size(); ++m)
    d.map.emplace_back(d.ob[cat.mor[m].src], d.ob[cat.mor[m].dst]);
  for (std::size_t i = 0; i < cat.n_objects; ++i)
    d.map[cat.identity[i]] = ModuleMap::identity(d.ob[i]);
  return d;
}

// k-linear diagrams become module diagrams with trivial free part.
inline ModDiagram embed_diagram(const VectDiagram& v, const BaseRing& ring) {
  if (v.p != ring.p()) throw RingMismatch("diagram prime differs from the ring");
  std::vector<FgModule> obs;
  for (std::size_t i = 0; i < v.cat.n_objects; ++i) obs.emplace_back(ring, 0, v.dim[i]);
  ModDiagram d = mod_diagram(v.cat, std::move(obs));
  for (std::size_t m = 0; m < v.cat.mor.size(); ++m) {
    if (v.cat.is_id(m)) continue;
    for (std::size_t r = 0; r < v.mat[m].rows(); ++r)
      for (std::size_t c = 0; c < v.mat[m].cols(); ++c)
        d.map[m].set(r, c, v.mat[m].at(r, c));
  }
  d.validate();
  return d;
}

inline bool is_natural_map(const ModDiagram& d, const ModDiagram& e,
                           const std::vector<ModuleMap>& f) {
  if (d.cat != e.cat) throw CategoryMismatch("diagrams live over different categories");
  if (f.size() != d.cat.n_objects) throw BadInput("one component per object is required");
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i].src() != d.ob[i] || f[i].dst() != e.ob[i])
      throw BadInput("component " + std::to_string(i) + " has wrong endpoints");
  for (std::size_t m = 0; m < d.cat.mor.size(); ++m) {
    if (d.cat.is_id(m)) continue;
    std::size_t i = d.cat.mor[m].src, j = d.cat.mor[m].dst;
    if (e.map[m] * f[i] != f[j] * d.map[m]) return false;
  }
  return true;
}

namespace detail {

// generator bookkeeping for an iterated direct sum
struct SumBlocks {
  std::vector<FgModule> parts;
  FgModule total;
  std::vector<std::size_t> free_off, vect_off;

  SumBlocks(const BaseRing& ring, std::vector<FgModule> ps)
      : parts(std::move(ps)), total(ring, 0, 0) {
    std::size_t f = 0, v = 0;
    for (const FgModule& m : parts) {
      if (m.ring != ring) throw RingMismatch("direct sum over different rings");
      free_off.push_back(f);
      vect_off.push_back(v);
      f += m.free_rank;
      v += m.vect_dim;
    }
    total = FgModule(ring, f, v);
  }

  std::size_t index(std::size_t t, std::size_t i) const {
    return parts[t].is_free_gen(i) ? free_off[t] + i
                                   : total.free_rank + vect_off[t] + (i - parts[t].free_rank);
  }

  ModuleMap incl(std::size_t t) const {
    ModuleMap f(parts[t], total);
    for (std::size_t i = 0; i < parts[t].total_gens(); ++i) f.set(index(t, i), i, 1);
    return f;
  }

  ModuleMap proj(std::size_t t) const {
    ModuleMap f(total, parts[t]);
    for (std::size_t i = 0; i < parts[t].total_gens(); ++i) f.set(i, index(t, i), 1);
    return f;
  }
};

// Presentation of the colimit over all non-identity arrows into object i,
// using only the arrows' sources and the maps between them; the slot at i is
// never read, so partially rebuilt diagrams can use it.
struct LatchingPresentation {
  std::vector<std::size_t> arrows;  // non-identity morphisms with target i
  SumBlocks blocks;                 // (+) of their sources
  Cokernel colim;                   // proj : blocks.total ->> latching object
};

inline LatchingPresentation latching_presentation(const FiniteCategory& cat,
                                                  const BaseRing& ring,
                                                  const std::vector<FgModule>& ob,
                                                  const std::vector<ModuleMap>& map,
                                                  std::size_t i) {
  if (!cat.has_degrees())
    throw NotDirectReedy("latching objects need a degree function on the category");
  std::vector<std::size_t> arrows;
  for (std::size_t m = 0; m < cat.mor.size(); ++m)
    if (cat.mor[m].dst == i && !cat.is_id(m)) arrows.push_back(m);
  std::vector<FgModule> parts;
  for (std::size_t a : arrows) parts.push_back(ob[cat.mor[a].src]);
  SumBlocks x(ring, parts);

  // one relation block per factorization alpha = beta o gamma with beta and
  // gamma both non-identity
  std::vector<std::pair<std::size_t, std::size_t>> facts;  // (beta, gamma)
  for (std::size_t b : arrows)
    for (std::size_t g = 0; g < cat.mor.size(); ++g) {
      if (cat.is_id(g) || !cat.composable(b, g)) continue;
      facts.emplace_back(b, g);
    }
  std::vector<FgModule> relparts;
  for (auto& [b, g] : facts) relparts.push_back(ob[cat.mor[g].src]);
  SumBlocks rsrc(ring, relparts);

  auto slot_of = [&](std::size_t m) {
    return static_cast<std::size_t>(std::find(arrows.begin(), arrows.end(), m) - arrows.begin());
  };
  ModuleMap rel(rsrc.total, x.total);
  for (std::size_t t = 0; t < facts.size(); ++t) {
    auto [b, g] = facts[t];
    std::size_t alpha = cat.comp[b][g];
    ModuleMap term = x.incl(slot_of(alpha)) * rsrc.proj(t) -
                     x.incl(slot_of(b)) * (map[g] * rsrc.proj(t));
    rel = rel + term;
  }
  Cokernel l = cokernel_of(rel);
  return LatchingPresentation{std::move(arrows), std::move(x), std::move(l)};
}

inline ZMat zmat_vstack(const ZMat& a, const ZMat& b) { return detail::vstack(a, b); }

}  // namespace detail

struct Latching {
  FgModule object;
  ModuleMap to_value;  // canonical map into d(i)
  ModuleMap cover;     // (+) of the arrow sources ->> latching object
};

inline Latching latching_object(const ModDiagram& d, std::size_t i) {
  if (i >= d.cat.n_objects) throw BadInput("object index out of range");
  detail::LatchingPresentation lp =
      detail::latching_presentation(d.cat, d.ring(), d.ob, d.map, i);
  ModuleMap assembled(lp.blocks.total, d.ob[i]);
  for (std::size_t t = 0; t < lp.arrows.size(); ++t)
    assembled = assembled + d.map[lp.arrows[t]] * lp.blocks.proj(t);
  // factor through the colimit projection
  ZMat sys = precompose_matrix(lp.colim.proj, d.ob[i]);
  auto sol = z_solve_mod(sys, hom_encode(assembled), hom_ann(lp.blocks.total, d.ob[i]));
  if (!sol) throw Error("internal: canonical latching map does not factor");
  ModuleMap lam = hom_decode(lp.colim.module, d.ob[i], *sol);
  if (lam * lp.colim.proj != assembled)
    throw Error("internal: latching factorization check failed");
  return Latching{lp.colim.module, lam, lp.colim.proj};
}

inline bool is_reedy_cofibrant(const ModDiagram& d) {
  for (std::size_t i = 0; i < d.cat.n_objects; ++i)
    if (!is_injective(latching_object(d, i).to_value)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// cofibrant replacement

struct Replacement {
  ModDiagram diagram;            // Reedy cofibrant
  std::vector<ModuleMap> proj;   // objectwise split surjection onto the input
};

// At each object, in degree order, the value is padded with the free hull of
// the rebuilt latching object; latching maps then embed by construction.
inline Replacement cofibrant_replacement(const ModDiagram& d) {
  const BaseRing& ring = d.ring();
  const FiniteCategory& cat = d.cat;
  if (!cat.has_degrees())
    throw NotDirectReedy("replacement needs a degree function on the category");
  std::vector<std::size_t> order(cat.n_objects);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cat.degree[a] < cat.degree[b]; });

  ModDiagram r = d;
  std::vector<ModuleMap> proj;
  for (std::size_t i = 0; i < cat.n_objects; ++i) proj.push_back(ModuleMap::identity(d.ob[i]));

  for (std::size_t i : order) {
    detail::LatchingPresentation lp =
        detail::latching_presentation(cat, ring, r.ob, r.map, i);
    ModuleMap hull = hull_inclusion(lp.colim.module);
    const FgModule& pad = hull.dst();
    FgModule nob = direct_sum(d.ob[i], pad);

    ModuleMap incl_val(d.ob[i], nob), incl_pad(pad, nob);
    for (std::size_t g = 0; g < d.ob[i].total_gens(); ++g)
      incl_val.set(ds_index_a(d.ob[i], pad, g), g, 1);
    for (std::size_t g = 0; g < pad.total_gens(); ++g)
      incl_pad.set(ds_index_b(d.ob[i], pad, g), g, 1);

    for (std::size_t t = 0; t < lp.arrows.size(); ++t) {
      std::size_t a = lp.arrows[t];
      std::size_t j = cat.mor[a].src;
      ModuleMap dpart = d.map[a] * proj[j];
      ModuleMap epart = hull * (lp.colim.proj * lp.blocks.incl(t));
      r.map[a] = incl_val * dpart + incl_pad * epart;
    }
    r.ob[i] = nob;
    r.map[cat.identity[i]] = ModuleMap::identity(nob);
    ModuleMap pr(nob, d.ob[i]);
    for (std::size_t g = 0; g < d.ob[i].total_gens(); ++g)
      pr.set(g, ds_index_a(d.ob[i], pad, g), 1);
    proj[i] = pr;
  }
  r.validate();
  return Replacement{std::move(r), std::move(proj)};
}

// ---------------------------------------------------------------------------
// free covers

struct FreeCover {
  ModDiagram cover;               // objectwise free
  std::vector<ModuleMap> counit;  // natural objectwise surjection onto d
};

// One block per morphism alpha : i -> j, holding the free cover of d(i); the
// structure map of m sends the block of alpha identically onto the block of
// m o alpha, and the counit evaluates d(alpha) after the cover projection.
inline FreeCover free_cover_diagram(const ModDiagram& d) {
  const BaseRing& ring = d.ring();
  const FiniteCategory& cat = d.cat;
  std::vector<ModuleMap> covers;  // per object: free cover of d(i)
  for (std::size_t i = 0; i < cat.n_objects; ++i) covers.push_back(canonical_cover(d.ob[i]));

  std::vector<std::vector<std::size_t>> blocks(cat.n_objects);  // morphisms into j
  for (std::size_t m = 0; m < cat.mor.size(); ++m) blocks[cat.mor[m].dst].push_back(m);
  std::vector<detail::SumBlocks> sums;
  for (std::size_t j = 0; j < cat.n_objects; ++j) {
    std::vector<FgModule> parts;
    for (std::size_t m : blocks[j]) parts.push_back(covers[cat.mor[m].src].src());
    sums.emplace_back(ring, std::move(parts));
  }
  auto slot = [&](std::size_t j, std::size_t m) {
    return static_cast<std::size_t>(
        std::find(blocks[j].begin(), blocks[j].end(), m) - blocks[j].begin());
  };

  std::vector<FgModule> obs;
  for (std::size_t j = 0; j < cat.n_objects; ++j) obs.push_back(sums[j].total);
  ModDiagram f = mod_diagram(cat, std::move(obs));
  for (std::size_t m = 0; m < cat.mor.size(); ++m) {
    if (cat.is_id(m)) continue;
    std::size_t j = cat.mor[m].src, j2 = cat.mor[m].dst;
    ModuleMap g(f.ob[j], f.ob[j2]);
    for (std::size_t t = 0; t < blocks[j].size(); ++t) {
      std::size_t a = blocks[j][t];
      g = g + sums[j2].incl(slot(j2, cat.comp[m][a])) * sums[j].proj(t);
    }
    f.map[m] = g;
  }
  f.validate();

  std::vector<ModuleMap> counit;
  for (std::size_t j = 0; j < cat.n_objects; ++j) {
    ModuleMap e(f.ob[j], d.ob[j]);
    for (std::size_t t = 0; t < blocks[j].size(); ++t) {
      std::size_t a = blocks[j][t];
      e = e + d.map[a] * covers[cat.mor[a].src] * sums[j].proj(t);
    }
    if (!is_surjective(e)) throw Error("internal: counit of the free cover is not onto");
    counit.push_back(e);
  }
  FreeCover out{std::move(f), std::move(counit)};
  if (!is_natural_map(out.cover, d, out.counit))
    throw Error("internal: counit of the free cover is not natural");
  return out;
}

// ---------------------------------------------------------------------------
// lifting multiplication by p

// Solves the square  A --top--> F,  A >--incl--> B,  F --onto->> B,  p : B -> B
// for a map B -> F making both triangles commute.  With no top map given only
// the bottom triangle is prescribed.
inline ModuleMap lift_p_through_free(const ModuleMap& incl, const ModuleMap& onto,
                                     const ModuleMap* top = nullptr) {
  if (incl.ring() != onto.ring()) throw RingMismatch("lift data over different rings");
  if (incl.dst() != onto.dst()) throw BadInput("inclusion and surjection target different modules");
  if (!is_injective(incl)) throw NotInjective("left edge of the lifting square must be injective");
  if (!is_surjective(onto)) throw NotSurjective("right edge of the lifting square must be onto");
  if (onto.src().vect_dim != 0) throw NotFree("lift target must be a free module");
  const FgModule& b = incl.dst();
  const FgModule& f = onto.src();
  std::uint64_t p_in_ring = b.ring.from_int(static_cast<long long>(b.ring.p()));
  ModuleMap ptimes = ModuleMap::identity(b).scaled(p_in_ring);

  ZMat sys = postcompose_matrix(onto, b);
  std::vector<Int> rhs = hom_encode(ptimes);
  std::vector<Int> ann = hom_ann(b, b);
  if (top) {
    if (top->src() != incl.src() || top->dst() != f)
      throw BadInput("top map endpoints do not fit the square");
    if (onto * *top != ptimes * incl) throw BadInput("the lifting square does not commute");
    sys = detail::zmat_vstack(sys, precompose_matrix(incl, f));
    std::vector<Int> r2 = hom_encode(*top);
    rhs.insert(rhs.end(), r2.begin(), r2.end());
    std::vector<Int> a2 = hom_ann(incl.src(), f);
    ann.insert(ann.end(), a2.begin(), a2.end());
  }
  auto sol = z_solve_mod(sys, rhs, ann);
  if (!sol) throw NoLift("multiplication by p does not lift through the free cover");
  ModuleMap lift = hom_decode(b, f, *sol);
  if (onto * lift != ptimes) throw Error("internal: lift fails the bottom triangle");
  if (top && lift * incl != *top) throw Error("internal: lift fails the top triangle");
  return lift;
}

// ---------------------------------------------------------------------------
// factoring p through an objectwise free diagram

struct PTimesFactorization {
  ModDiagram replaced;              // Reedy cofibrant version of the input
  std::vector<ModuleMap> to_input;  // objectwise surjections onto the input
  ModDiagram mid;                   // objectwise free
  std::vector<ModuleMap> into;      // natural, replaced -> mid
  std::vector<ModuleMap> onto;      // natural, mid -> replaced
  bool replaced_input = false;
};

// All components are solved jointly: each must project to p times the
// identity and commute with every structure map.  Solving object by object
// in degree order is not sound, because a valid choice at a low degree can
// leave a later extension problem with no solution even though a compatible
// global family exists.  Over F_p[e] multiplication by p is literally zero
// and the zero factorization is returned.
inline PTimesFactorization null_homotopy_of_p(const ModDiagram& d, bool allow_replacement = true) {
  const BaseRing& ring = d.ring();
  const FiniteCategory& cat = d.cat;
  PTimesFactorization out;
  if (is_reedy_cofibrant(d)) {
    out.replaced = d;
    for (std::size_t i = 0; i < cat.n_objects; ++i)
      out.to_input.push_back(ModuleMap::identity(d.ob[i]));
  } else if (!allow_replacement) {
    throw NotReedyCofibrant("a latching map fails to be injective");
  } else {
    Replacement r = cofibrant_replacement(d);
    out.replaced = std::move(r.diagram);
    out.to_input = std::move(r.proj);
    out.replaced_input = true;
  }
  const ModDiagram& base = out.replaced;
  FreeCover fc = free_cover_diagram(base);

  std::uint64_t p_in_ring = ring.from_int(static_cast<long long>(ring.p()));
  std::vector<ModuleMap> sigma;
  for (std::size_t i = 0; i < cat.n_objects; ++i)
    sigma.emplace_back(base.ob[i], fc.cover.ob[i]);

  if (ring.kind() != RingKind::Eps) {
    std::vector<std::size_t> off(cat.n_objects, 0);
    std::size_t total = 0;
    for (std::size_t i = 0; i < cat.n_objects; ++i) {
      off[i] = total;
      total += hom_ann(base.ob[i], fc.cover.ob[i]).size();
    }
    std::size_t total_rows = 0;
    for (std::size_t i = 0; i < cat.n_objects; ++i)
      total_rows += hom_ann(base.ob[i], base.ob[i]).size();
    for (std::size_t m = 0; m < cat.mor.size(); ++m) {
      if (cat.is_id(m)) continue;
      total_rows += hom_ann(base.ob[cat.mor[m].src], fc.cover.ob[cat.mor[m].dst]).size();
    }

    ZMat sys(total_rows, total);
    std::vector<Int> rhs;
    std::vector<Int> ann;
    rhs.reserve(total_rows);
    ann.reserve(total_rows);
    std::size_t r0 = 0;
    for (std::size_t i = 0; i < cat.n_objects; ++i) {
      ZMat blk = postcompose_matrix(fc.counit[i], base.ob[i]);
      for (std::size_t r = 0; r < blk.rows(); ++r)
        for (std::size_t c = 0; c < blk.cols(); ++c) sys.at(r0 + r, off[i] + c) = blk.at(r, c);
      std::vector<Int> enc = hom_encode(ModuleMap::identity(base.ob[i]).scaled(p_in_ring));
      rhs.insert(rhs.end(), enc.begin(), enc.end());
      std::vector<Int> a = hom_ann(base.ob[i], base.ob[i]);
      ann.insert(ann.end(), a.begin(), a.end());
      r0 += blk.rows();
    }
    for (std::size_t m = 0; m < cat.mor.size(); ++m) {
      if (cat.is_id(m)) continue;
      std::size_t j = cat.mor[m].src, i = cat.mor[m].dst;
      ZMat pre = precompose_matrix(base.map[m], fc.cover.ob[i]);
      ZMat post = postcompose_matrix(fc.cover.map[m], base.ob[j]);
      for (std::size_t r = 0; r < pre.rows(); ++r) {
        for (std::size_t c = 0; c < pre.cols(); ++c) sys.at(r0 + r, off[i] + c) = pre.at(r, c);
        for (std::size_t c = 0; c < post.cols(); ++c) sys.at(r0 + r, off[j] + c) = -post.at(r, c);
      }
      std::vector<Int> a = hom_ann(base.ob[j], fc.cover.ob[i]);
      for (std::size_t r = 0; r < pre.rows(); ++r) rhs.emplace_back(0);
      ann.insert(ann.end(), a.begin(), a.end());
      r0 += pre.rows();
    }

    auto sol = z_solve_mod(sys, rhs, ann);
    if (!sol) throw NoLift("no natural factorization of multiplication by p through the free cover");
    for (std::size_t i = 0; i < cat.n_objects; ++i) {
      std::size_t n = hom_ann(base.ob[i], fc.cover.ob[i]).size();
      std::vector<Int> slice(sol->begin() + off[i], sol->begin() + off[i] + n);
      sigma[i] = hom_decode(base.ob[i], fc.cover.ob[i], slice);
    }
  }

  for (std::size_t i = 0; i < cat.n_objects; ++i) {
    ModuleMap ptimes = ModuleMap::identity(base.ob[i]).scaled(p_in_ring);
    if (fc.counit[i] * sigma[i] != ptimes)
      throw Error("internal: factorization misses p at object " + std::to_string(i));
  }
  if (!is_natural_map(base, fc.cover, sigma))
    throw Error("internal: factorization is not natural");

  out.mid = std::move(fc.cover);
  out.into = std::move(sigma);
  out.onto = std::move(fc.counit);
  return out;
}

// ---------------------------------------------------------------------------
// natural transformation groups in hom coordinates

struct NatHomSystem {
  std::vector<std::size_t> offset;  // coordinate offset per object
  std::vector<Int> ann;             // concatenated hom annihilators
  ZMat sys;                         // naturality rows
  std::vector<Int> sys_ann;         // per-row annihilators of the rows
  ZMat lattice;                     // rows: integer lattice of solutions
};

inline NatHomSystem natural_hom_system(const ModDiagram& d, const ModDiagram& e) {
  if (d.cat != e.cat) throw CategoryMismatch("diagrams live over different categories");
  if (d.ring() != e.ring()) throw RingMismatch("diagrams over different rings");
  const FiniteCategory& cat = d.cat;
  NatHomSystem s;
  for (std::size_t i = 0; i < cat.n_objects; ++i) {
    s.offset.push_back(s.ann.size());
    std::vector<Int> a = hom_ann(d.ob[i], e.ob[i]);
    s.ann.insert(s.ann.end(), a.begin(), a.end());
  }
  std::size_t rows = 0;
  for (std::size_t m = 0; m < cat.mor.size(); ++m) {
    if (cat.is_id(m)) continue;
    rows += hom_ann(d.ob[cat.mor[m].src], e.ob[cat.mor[m].dst]).size();
  }
  s.sys = ZMat(rows, s.ann.size());
  std::size_t r0 = 0;
  for (std::size_t m = 0; m < cat.mor.size(); ++m) {
    if (cat.is_id(m)) continue;
    std::size_t i = cat.mor[m].src, j = cat.mor[m].dst;
    ZMat post = postcompose_matrix(e.map[m], d.ob[i]);
    ZMat pre = precompose_matrix(d.map[m], e.ob[j]);
    for (std::size_t r = 0; r < post.rows(); ++r) {
      for (std::size_t c = 0; c < post.cols(); ++c) s.sys.at(r0 + r, s.offset[i] + c) += post.at(r, c);
      for (std::size_t c = 0; c < pre.cols(); ++c) s.sys.at(r0 + r, s.offset[j] + c) -= pre.at(r, c);
    }
    std::vector<Int> a = hom_ann(d.ob[i], e.ob[j]);
    s.sys_ann.insert(s.sys_ann.end(), a.begin(), a.end());
    r0 += a.size();
  }
  if (rows == 0) {
    s.lattice = ZMat::identity(s.ann.size());
  } else {
    s.lattice = solution_lattice_rows(s.sys, s.sys_ann);
  }
  return s;
}

inline std::vector<ModuleMap> nat_coords_to_map(const ModDiagram& d, const ModDiagram& e,
                                                const NatHomSystem& s,
                                                const std::vector<Int>& x) {
  std::vector<ModuleMap> f;
  for (std::size_t i = 0; i < d.cat.n_objects; ++i) {
    std::size_t n = hom_ann(d.ob[i], e.ob[i]).size();
    std::vector<Int> part(x.begin() + s.offset[i], x.begin() + s.offset[i] + n);
    f.push_back(hom_decode(d.ob[i], e.ob[i], part));
  }
  return f;
}

// ---------------------------------------------------------------------------
// homotopy classes of diagram maps

struct DiagramClassCount {
  std::size_t dim = 0;      // log_p of the class count
  Int count = 1;
  Int hom_count = 1;        // natural transformations before the quotient
  bool enumerated = false;  // literal enumeration cross-check ran
};

// Classes of maps j(d) -> j(e) in the homotopy category: the source is made
// Reedy cofibrant, and a map is null exactly when it factors naturally
// through the free cover of the target, which is the path object criterion
// componentwise.  Counting is exact lattice arithmetic; small groups are
// additionally enumerated element by element.
inline DiagramClassCount brute_force_ho_classes(const BaseRing& ring, const VectDiagram& dv,
                                                const VectDiagram& ev,
                                                const Int& enumeration_guard = Int(4096),
                                                std::size_t coord_cap = 4000) {
  if (dv.cat.kind != "arrow")
    throw BadInput("class counting is pinned to the chain categories");
  if (dv.cat != ev.cat) throw CategoryMismatch("diagrams live over different categories");
  if (dv.p != ring.p() || ev.p != ring.p())
    throw RingMismatch("diagram prime differs from the ring");

  ModDiagram d = embed_diagram(dv, ring);
  ModDiagram e = embed_diagram(ev, ring);
  if (!is_reedy_cofibrant(d)) {
    d = cofibrant_replacement(d).diagram;
    if (!is_reedy_cofibrant(d)) throw Error("internal: replacement is not Reedy cofibrant");
  }
  FreeCover fc = free_cover_diagram(e);
  NatHomSystem se = natural_hom_system(d, e);
  NatHomSystem sf = natural_hom_system(d, fc.cover);
  if (se.ann.size() > coord_cap || sf.ann.size() > coord_cap)
    throw TooLarge("hom coordinate space exceeds the cap");

  // postcomposition with the counit, block diagonal over objects
  ZMat comp(se.ann.size(), sf.ann.size());
  for (std::size_t i = 0; i < d.cat.n_objects; ++i) {
    ZMat blk = postcompose_matrix(fc.counit[i], d.ob[i]);
    for (std::size_t r = 0; r < blk.rows(); ++r)
      for (std::size_t c = 0; c < blk.cols(); ++c)
        comp.at(se.offset[i] + r, sf.offset[i] + c) = blk.at(r, c);
  }
  ZMat killed(sf.lattice.rows(), se.ann.size());
  for (std::size_t r = 0; r < sf.lattice.rows(); ++r) {
    std::vector<Int> img = comp.apply(sf.lattice.row(r));
    for (std::size_t c = 0; c < img.size(); ++c) killed.at(r, c) = img[c];
  }
  Subquotient classes(se.ann.size(), se.lattice, killed, se.ann);
  GroupType g = classes.group();
  if (!g.is_elementary(ring.p()) && !g.is_trivial())
    throw Error("internal: class group is not an F_p vector space");

  DiagramClassCount out;
  out.dim = g.torsion.size();
  out.count = g.order();
  Subquotient homs(se.ann.size(), se.lattice, ZMat(0, se.ann.size()), se.ann);
  out.hom_count = homs.group().order();

  Int tot_e = 1, tot_f = 1;
  for (const Int& a : se.ann) tot_e *= a;
  for (const Int& a : sf.ann) tot_f *= a;
  if (tot_e <= enumeration_guard && tot_f <= enumeration_guard) {
    auto solutions = [](const ZMat& sys, const std::vector<Int>& sys_ann,
                        const std::vector<Int>& ann) {
      std::vector<std::vector<Int>> sols;
      std::vector<Int> x(ann.size(), Int(0));
      while (true) {
        bool good = true;
        for (std::size_t r = 0; r < sys.rows() && good; ++r) {
          Int acc = 0;
          for (std::size_t c = 0; c < sys.cols(); ++c) acc += sys.at(r, c) * x[c];
          if (sys_ann[r] != 0) {
            acc %= sys_ann[r];
            if (acc < 0) acc += sys_ann[r];
          }
          if (acc != 0) good = false;
        }
        if (good) sols.push_back(x);
        std::size_t k = 0;
        while (k < x.size()) {
          x[k] += 1;
          if (x[k] < ann[k]) break;
          x[k] = 0;
          ++k;
        }
        if (k == x.size()) break;
      }
      return sols;
    };
    std::vector<std::vector<Int>> hom_e = solutions(se.sys, se.sys_ann, se.ann);
    std::vector<std::vector<Int>> hom_f = solutions(sf.sys, sf.sys_ann, sf.ann);
    if (Int(hom_e.size()) != out.hom_count)
      throw Error("internal: enumerated hom count disagrees with the lattice count");
    std::set<std::vector<Int>> null_images;
    for (const std::vector<Int>& y : hom_f) {
      std::vector<Int> img = comp.apply(y);
      for (std::size_t c = 0; c < img.size(); ++c) {
        img[c] %= se.ann[c];
        if (img[c] < 0) img[c] += se.ann[c];
      }
      null_images.insert(img);
    }
    Int lit = Int(hom_e.size()) / Int(null_images.size());
    if (lit * Int(null_images.size()) != Int(hom_e.size()) || lit != out.count)
      throw Error("internal: enumerated class count disagrees with the lattice count");
    out.enumerated = true;
  }
  return out;
}

}  // namespace stmod
