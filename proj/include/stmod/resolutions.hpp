#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "stmod/homology.hpp"
#include "stmod/stable_modules.hpp"

namespace stmod {

// ---------------------------------------------------------------------------
// Bounded slice of a chain complex of modules (differential lowers degree).
// A side marked "cut" means the complex continues past that edge and the
// missing terms are unknown; an uncut side is genuinely zero beyond the edge.
// Data within two degrees of a cut edge is kept but not trusted.
// ---------------------------------------------------------------------------

class WindowedComplex {
 public:
  WindowedComplex(const BaseRing& ring, int lo, int hi, bool lo_cut = false, bool hi_cut = false)
      : ring_(ring), lo_(lo), hi_(hi), lo_cut_(lo_cut), hi_cut_(hi_cut) {
    if (lo > hi) throw BadWindow("empty degree window");
    terms_.assign(static_cast<std::size_t>(hi - lo) + 1, FgModule(ring, 0, 0));
    rebuild_diffs();
  }

  const BaseRing& ring() const { return ring_; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  bool lo_cut() const { return lo_cut_; }
  bool hi_cut() const { return hi_cut_; }

  FgModule term(int k) const {
    if (k < lo_ || k > hi_) return FgModule(ring_, 0, 0);
    return terms_[static_cast<std::size_t>(k - lo_)];
  }

  void set_term(int k, const FgModule& m) {
    need(k);
    if (m.ring != ring_) throw RingMismatch("term over a different ring");
    terms_[static_cast<std::size_t>(k - lo_)] = m;
    if (k > lo_) diffs_[static_cast<std::size_t>(k - lo_ - 1)] = ModuleMap(m, term(k - 1));
    if (k < hi_) diffs_[static_cast<std::size_t>(k - lo_)] = ModuleMap(term(k + 1), m);
  }

  // d(k): term(k) -> term(k-1); zero map outside the stored range
  ModuleMap d(int k) const {
    if (k <= lo_ || k > hi_) return ModuleMap(term(k), term(k - 1));
    return diffs_[static_cast<std::size_t>(k - lo_ - 1)];
  }

  void set_d(int k, const ModuleMap& f) {
    if (k <= lo_ || k > hi_) throw BadWindow("differential outside the window");
    if (f.src() != term(k) || f.dst() != term(k - 1))
      throw BadInput("differential endpoints do not match the terms");
    diffs_[static_cast<std::size_t>(k - lo_ - 1)] = f;
  }

  void validate() const {
    for (int k = lo_ + 2; k <= hi_; ++k)
      if (!(d(k - 1) * d(k)).is_zero()) throw CompositionNonzero("d of d is nonzero");
  }

  // term data reflects the modeled object at degree k
  bool trusts(int k) const {
    if (k < lo_) return !lo_cut_;
    if (k > hi_) return !hi_cut_;
    return k >= lo_ + (lo_cut_ ? 2 : 0) && k <= hi_ - (hi_cut_ ? 2 : 0);
  }

  // the modeled object is known to vanish at degree k
  bool known_zero(int k) const {
    if (k < lo_) return !lo_cut_;
    if (k > hi_) return !hi_cut_;
    return term(k).is_zero();
  }

 private:
  void need(int k) const {
    if (k < lo_ || k > hi_) throw BadWindow("degree outside the window");
  }

  void rebuild_diffs() {
    diffs_.clear();
    for (int k = lo_ + 1; k <= hi_; ++k) diffs_.push_back(ModuleMap(term(k), term(k - 1)));
  }

  BaseRing ring_;
  int lo_, hi_;
  bool lo_cut_, hi_cut_;
  std::vector<FgModule> terms_;
  std::vector<ModuleMap> diffs_;  // diffs_[k-lo-1]: term(k) -> term(k-1)
};

inline WindowedComplex module_complex(const FgModule& m, int at = 0) {
  WindowedComplex c(m.ring, at, at);
  c.set_term(at, m);
  return c;
}

// Doubly infinite resolution by frees, materialized on [lo, hi].  Degrees 0
// and -1 carry R^{f+v}; every other degree carries R^v.  The degree -1 cycles
// are R^f + u*R^v, a copy of the module itself.
inline WindowedComplex complete_resolution(const FgModule& m, int lo, int hi) {
  if (!(lo < 0 && 0 < hi)) throw BadWindow("window must straddle degree 0");
  const BaseRing& R = m.ring;
  std::size_t f = m.free_rank, v = m.vect_dim;
  WindowedComplex c(R, lo, hi, true, true);
  for (int k = lo; k <= hi; ++k)
    c.set_term(k, (k == 0 || k == -1) ? FgModule(R, f + v, 0) : FgModule(R, v, 0));
  for (int k = lo + 1; k <= hi; ++k) {
    ModuleMap d(c.term(k), c.term(k - 1));
    if (k == 0) {
      for (std::size_t i = 0; i < f; ++i) d.set(i, i, 1);
      for (std::size_t j = 0; j < v; ++j) d.set(f + j, f + j, R.radical());
    } else if (k == 1) {
      for (std::size_t j = 0; j < v; ++j) d.set(f + j, j, R.radical());
    } else if (k == -1) {
      for (std::size_t j = 0; j < v; ++j) d.set(j, f + j, R.radical());
    } else {
      for (std::size_t j = 0; j < v; ++j) d.set(j, j, R.radical());
    }
    c.set_d(k, d);
  }
  c.validate();
  return c;
}

// Underlying complex of abelian groups.
inline GradedGroupComplex group_complex(const WindowedComplex& c) {
  GradedGroupComplex g(c.lo(), c.hi());
  for (int k = c.lo(); k <= c.hi(); ++k) g.set_group(k, group_ann(c.term(k)));
  for (int k = c.lo() + 1; k <= c.hi(); ++k) g.set_d(k, group_matrix(c.d(k)));
  return g;
}

// ---------------------------------------------------------------------------
// Hom complex of two windowed complexes.  Degree n part is the product over k
// of hom(X_k, Y_{n+k}); the differential is (df)_k = d_Y f_k + (-1)^{n+1}
// f_{k-1} d_X.  Homology is claimed only on degrees where every slot that
// could be nonzero is either trusted on both sides or known to vanish; the
// computation there restricts cycles to trusted slots and divides by the
// restriction of the full boundary group, so cut-edge artifacts never enter.
// ---------------------------------------------------------------------------

struct HomElement {
  int deg = 0;
  int klo = 0;                   // comps[i]: X_{klo+i} -> Y_{deg+klo+i}
  std::vector<ModuleMap> comps;  // spans the source window
};

class HomComplex {
 public:
  HomComplex(const WindowedComplex& x, const WindowedComplex& y)
      : x_(x), y_(y), lo_(y.lo() - x.hi()), hi_(y.hi() - x.lo()), gg_(lo_, hi_) {
    if (x.ring() != y.ring()) throw RingMismatch("hom complex over different rings");
    slots_.resize(static_cast<std::size_t>(hi_ - lo_) + 1);
    offs_.resize(slots_.size());
    dims_.resize(slots_.size());
    for (int n = lo_; n <= hi_; ++n) {
      std::size_t idx = static_cast<std::size_t>(n - lo_);
      std::vector<Int> ann;
      for (int k = x_.lo(); k <= x_.hi(); ++k) {
        if (x_.term(k).is_zero() || y_.term(n + k).is_zero()) continue;
        std::vector<Int> a = hom_ann(x_.term(k), y_.term(n + k));
        slots_[idx].push_back(k);
        offs_[idx].push_back(ann.size());
        dims_[idx].push_back(a.size());
        ann.insert(ann.end(), a.begin(), a.end());
      }
      gg_.set_group(n, ann);
    }
    for (int n = lo_ + 1; n <= hi_; ++n) gg_.set_d(n, build_d(n));
    gg_.validate();
  }

  const WindowedComplex& source() const { return x_; }
  const WindowedComplex& target() const { return y_; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  const GradedGroupComplex& groups() const { return gg_; }

  const std::vector<int>& slot_ks(int n) const {
    static const std::vector<int> empty;
    if (n < lo_ || n > hi_) return empty;
    return slots_[static_cast<std::size_t>(n - lo_)];
  }

  std::size_t slot_offset(int n, int k) const { return offs_[idx(n)][slot_pos(n, k)]; }
  std::size_t slot_dim(int n, int k) const { return dims_[idx(n)][slot_pos(n, k)]; }

  bool slot_trusted(int n, int k) const {
    return x_.trusts(k) && y_.trusts(n + k) && !x_.term(k).is_zero() &&
           !y_.term(n + k).is_zero();
  }

  std::vector<int> trusted_slot_ks(int n) const {
    std::vector<int> out;
    for (int k : slot_ks(n))
      if (slot_trusted(n, k)) out.push_back(k);
    return out;
  }

  bool trusted(int n) const {
    if (!trusted_slot_ks(n).empty()) return true;
    // otherwise the degree must be known to vanish outright
    for (int k = x_.lo(); k <= x_.hi(); ++k)
      if (!x_.known_zero(k) && !y_.known_zero(n + k)) return false;
    for (int j = y_.lo(); j <= y_.hi(); ++j)
      if (!y_.known_zero(j) && !x_.known_zero(j - n)) return false;
    return true;
  }

  std::vector<int> trusted_degrees() const {
    std::vector<int> out;
    for (int n = lo_; n <= hi_; ++n)
      if (trusted(n)) out.push_back(n);
    return out;
  }

  HomElement zero_element(int n) const {
    HomElement e;
    e.deg = n;
    e.klo = x_.lo();
    for (int k = x_.lo(); k <= x_.hi(); ++k)
      e.comps.push_back(ModuleMap(x_.term(k), y_.term(n + k)));
    return e;
  }

  ModuleMap component(const HomElement& e, int k) const {
    long i = static_cast<long>(k) - e.klo;
    if (i < 0 || i >= static_cast<long>(e.comps.size()))
      return ModuleMap(x_.term(k), y_.term(e.deg + k));
    return e.comps[static_cast<std::size_t>(i)];
  }

  void set_component(HomElement& e, int k, const ModuleMap& f) const {
    long i = static_cast<long>(k) - e.klo;
    if (i < 0 || i >= static_cast<long>(e.comps.size()))
      throw BadInput("component outside the source window");
    if (f.src() != x_.term(k) || f.dst() != y_.term(e.deg + k))
      throw BadInput("component endpoints do not match the complexes");
    e.comps[static_cast<std::size_t>(i)] = f;
  }

  std::vector<Int> encode(const HomElement& e) const {
    std::vector<Int> c;
    for (int k : slot_ks(e.deg)) {
      std::vector<Int> part = hom_encode(component(e, k));
      c.insert(c.end(), part.begin(), part.end());
    }
    return c;
  }

  HomElement decode(int n, const std::vector<Int>& c) const {
    if (c.size() != gg_.dim(n)) throw BadInput("hom coordinate length mismatch");
    HomElement e = zero_element(n);
    for (int k : slot_ks(n)) {
      std::size_t off = slot_offset(n, k), dn = slot_dim(n, k);
      std::vector<Int> part(c.begin() + off, c.begin() + off + dn);
      set_component(e, k, hom_decode(x_.term(k), y_.term(n + k), part));
    }
    return e;
  }

  HomElement d_of(const HomElement& e) const {
    HomElement out = zero_element(e.deg - 1);
    bool flip = e.deg % 2 == 0;  // (-1)^(deg+1)
    std::uint64_t sgn = x_.ring().from_int(flip ? -1 : 1);
    for (int k = x_.lo(); k <= x_.hi(); ++k) {
      ModuleMap t = y_.d(e.deg + k) * component(e, k) +
                    (component(e, k - 1) * x_.d(k)).scaled(sgn);
      set_component(out, k, t);
    }
    return out;
  }

  struct TrustedCycles {
    std::vector<int> ks;          // trusted slots, ascending
    std::vector<Int> ann;         // annihilator per trusted coordinate
    ZMat rows{0, 0};              // lattice basis of the cycle group, one row each
  };

  // Cycle lattice over the trusted slots: conditions are imposed wherever
  // both contributing slots are trusted or known zero.
  TrustedCycles trusted_cycles(int n) const {
    if (!trusted(n)) throw OutsideTrustedWindow("cycles requested outside the trusted range");
    TrustedCycles out;
    out.ks = trusted_slot_ks(n);
    if (out.ks.empty()) return out;
    std::vector<int> inner = out.ks;

    std::vector<std::size_t> in_off;
    std::vector<Int> in_ann;
    for (int k : inner) {
      in_off.push_back(in_ann.size());
      std::vector<Int> a = hom_ann(x_.term(k), y_.term(n + k));
      in_ann.insert(in_ann.end(), a.begin(), a.end());
    }
    std::size_t in_dim = in_ann.size();
    auto in_pos = [&](int k) -> long {
      for (std::size_t i = 0; i < inner.size(); ++i)
        if (inner[i] == k) return static_cast<long>(i);
      return -1;
    };
    auto usable = [&](int k) {
      return slot_trusted(n, k) || x_.known_zero(k) || y_.known_zero(n + k);
    };

    // cycle conditions at degree n-1 targets
    Int sgn = n % 2 == 0 ? -1 : 1;
    std::vector<ZMat> cond_blocks;
    std::vector<Int> cond_ann;
    std::size_t cond_rows = 0;
    for (int k = inner.front(); k <= inner.back() + 1; ++k) {
      if (!usable(k) || !usable(k - 1)) continue;
      if (in_pos(k) < 0 && in_pos(k - 1) < 0) continue;
      FgModule tx = x_.term(k), ty = y_.term(n - 1 + k);
      if (tx.is_zero() || ty.is_zero()) continue;
      std::vector<Int> tann = hom_ann(tx, ty);
      ZMat rows(tann.size(), in_dim);
      if (long s = in_pos(k); s >= 0) {
        ZMat blk = postcompose_matrix(y_.d(n + k), tx);
        for (std::size_t i = 0; i < blk.rows(); ++i)
          for (std::size_t j = 0; j < blk.cols(); ++j)
            rows.at(i, in_off[static_cast<std::size_t>(s)] + j) = blk.at(i, j);
      }
      if (long s = in_pos(k - 1); s >= 0) {
        ZMat blk = precompose_matrix(x_.d(k), y_.term(n - 1 + k)).scaled(sgn);
        for (std::size_t i = 0; i < blk.rows(); ++i)
          for (std::size_t j = 0; j < blk.cols(); ++j)
            rows.at(i, in_off[static_cast<std::size_t>(s)] + j) = blk.at(i, j);
      }
      cond_blocks.push_back(rows);
      cond_ann.insert(cond_ann.end(), tann.begin(), tann.end());
      cond_rows += tann.size();
    }
    ZMat cond(cond_rows, in_dim);
    std::size_t at = 0;
    for (const ZMat& b : cond_blocks) {
      for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < in_dim; ++j) cond.at(at + i, j) = b.at(i, j);
      at += b.rows();
    }
    out.ann = in_ann;
    out.rows = solution_lattice_rows(cond, cond_ann);
    return out;
  }

  // Homology over the trusted slots: cycles as above, and the boundary group
  // is the restriction of the full window's boundaries.
  Subquotient trusted_homology(int n) const {
    TrustedCycles tc = trusted_cycles(n);
    std::vector<int> inner = tc.ks;
    if (inner.empty()) return Subquotient(0, ZMat(0, 0), ZMat(0, 0), {});
    std::vector<std::size_t> in_off;
    std::size_t in_dim = 0;
    for (int k : inner) {
      in_off.push_back(in_dim);
      in_dim += slot_dim(n, k);
    }

    // boundaries from the full window, restricted to the trusted slots
    ZMat dfull = gg_.d(n + 1);
    ZMat rels(dfull.cols(), in_dim);
    for (std::size_t c = 0; c < dfull.cols(); ++c)
      for (std::size_t s = 0; s < inner.size(); ++s) {
        std::size_t fo = slot_offset(n, inner[s]), dn = slot_dim(n, inner[s]);
        for (std::size_t r = 0; r < dn; ++r) rels.at(c, in_off[s] + r) = dfull.at(fo + r, c);
      }
    return Subquotient(in_dim, tc.rows, rels, tc.ann);
  }

  GroupType homology_type(int n) const { return trusted_homology(n).group(); }

  // zero-extend trusted-slot coordinates to full window coordinates
  std::vector<Int> extend_trusted(int n, const std::vector<Int>& v) const {
    std::vector<int> inner = trusted_slot_ks(n);
    std::vector<Int> full(gg_.dim(n), Int(0));
    std::size_t at = 0;
    for (int k : inner) {
      std::size_t fo = slot_offset(n, k), dn = slot_dim(n, k);
      for (std::size_t r = 0; r < dn; ++r) full[fo + r] = v[at + r];
      at += dn;
    }
    if (at != v.size()) throw BadInput("trusted coordinate length mismatch");
    return full;
  }

  std::vector<Int> restrict_trusted(int n, const std::vector<Int>& full) const {
    if (full.size() != gg_.dim(n)) throw BadInput("full coordinate length mismatch");
    std::vector<Int> out;
    for (int k : trusted_slot_ks(n)) {
      std::size_t fo = slot_offset(n, k), dn = slot_dim(n, k);
      for (std::size_t r = 0; r < dn; ++r) out.push_back(full[fo + r]);
    }
    return out;
  }

 private:
  std::size_t idx(int n) const {
    if (n < lo_ || n > hi_) throw BadWindow("degree outside the hom window");
    return static_cast<std::size_t>(n - lo_);
  }

  std::size_t slot_pos(int n, int k) const {
    const std::vector<int>& ks = slots_[idx(n)];
    for (std::size_t i = 0; i < ks.size(); ++i)
      if (ks[i] == k) return i;
    throw BadInput("no slot at that position");
  }

  ZMat build_d(int n) const {
    ZMat m(gg_.dim(n - 1), gg_.dim(n));
    Int sgn = n % 2 == 0 ? -1 : 1;  // (-1)^(n+1)
    for (int k : slot_ks(n)) {
      std::size_t c0 = slot_offset(n, k);
      const std::vector<int>& tks = slot_ks(n - 1);
      auto has = [&](int kk) {
        for (int t : tks)
          if (t == kk) return true;
        return false;
      };
      if (has(k)) {
        ZMat blk = postcompose_matrix(y_.d(n + k), x_.term(k));
        std::size_t r0 = slot_offset(n - 1, k);
        for (std::size_t i = 0; i < blk.rows(); ++i)
          for (std::size_t j = 0; j < blk.cols(); ++j) m.at(r0 + i, c0 + j) = blk.at(i, j);
      }
      if (has(k + 1)) {
        ZMat blk = precompose_matrix(x_.d(k + 1), y_.term(n + k)).scaled(sgn);
        std::size_t r0 = slot_offset(n - 1, k + 1);
        for (std::size_t i = 0; i < blk.rows(); ++i)
          for (std::size_t j = 0; j < blk.cols(); ++j) m.at(r0 + i, c0 + j) = blk.at(i, j);
      }
    }
    return m;
  }

  WindowedComplex x_, y_;
  int lo_, hi_;
  GradedGroupComplex gg_;
  std::vector<std::vector<int>> slots_;
  std::vector<std::vector<std::size_t>> offs_;
  std::vector<std::vector<std::size_t>> dims_;
};

// degree n part of f o g, components (f o g)_k = f_{k+|g|} g_k
inline HomElement hom_compose(const WindowedComplex& z, const HomElement& f, const HomElement& g) {
  HomElement out;
  out.deg = f.deg + g.deg;
  out.klo = g.klo;
  for (std::size_t i = 0; i < g.comps.size(); ++i) {
    int k = g.klo + static_cast<int>(i);
    ModuleMap r(g.comps[i].src(), z.term(out.deg + k));
    long fi = static_cast<long>(k) + g.deg - f.klo;
    if (fi >= 0 && fi < static_cast<long>(f.comps.size()))
      r = f.comps[static_cast<std::size_t>(fi)] * g.comps[i];
    out.comps.push_back(r);
  }
  return out;
}

inline HomElement hom_add(const HomElement& a, const HomElement& b) {
  if (a.deg != b.deg || a.klo != b.klo || a.comps.size() != b.comps.size())
    throw BadInput("hom element shape mismatch");
  HomElement out = a;
  for (std::size_t i = 0; i < out.comps.size(); ++i) out.comps[i] = a.comps[i] + b.comps[i];
  return out;
}

inline HomElement hom_scaled(const HomElement& a, std::uint64_t c) {
  HomElement out = a;
  for (ModuleMap& f : out.comps) f = f.scaled(c);
  return out;
}

inline bool equal_on_trusted(const HomComplex& h, const HomElement& a, const HomElement& b) {
  if (a.deg != b.deg) return false;
  for (int k : h.trusted_slot_ks(a.deg))
    if (h.component(a, k) != h.component(b, k)) return false;
  return true;
}

inline GroupType homology_of_hom(const HomComplex& h, int n) { return h.homology_type(n); }

// F_p-dimension of the degree n homology (all homology here is p-torsion)
inline std::size_t homology_fp_dim(const HomComplex& h, int n) {
  GroupType t = homology_of_hom(h, n);
  if (!t.is_elementary(h.source().ring().p()))
    throw Error("homology is not elementary p-torsion");
  return t.torsion.size();
}

// ---------------------------------------------------------------------------
// Degree-preserving chain maps between windowed complexes, and the maps they
// induce between hom complexes.
// ---------------------------------------------------------------------------

struct ComplexMap {
  WindowedComplex x, y;
  std::map<int, ModuleMap> comps;

  ComplexMap(const WindowedComplex& from, const WindowedComplex& to) : x(from), y(to) {
    if (from.ring() != to.ring()) throw RingMismatch("chain map over different rings");
  }

  ModuleMap comp(int k) const {
    auto it = comps.find(k);
    if (it != comps.end()) return it->second;
    return ModuleMap(x.term(k), y.term(k));
  }

  void set(int k, const ModuleMap& f) {
    if (f.src() != x.term(k) || f.dst() != y.term(k))
      throw BadInput("chain map component endpoints mismatch");
    comps.insert_or_assign(k, f);
  }

  void validate() const {
    int lo = std::min(x.lo(), y.lo()), hi = std::max(x.hi(), y.hi());
    for (int k = lo; k <= hi + 1; ++k)
      if (y.d(k) * comp(k) != comp(k - 1) * x.d(k))
        throw NotChainMap("square does not commute");
  }
};

// (g o -): Hom(Z, X) -> Hom(Z, Y) for g: X -> Y; per-degree matrices
inline std::map<int, ZMat> hom_postcompose_chain(const HomComplex& a, const HomComplex& b,
                                                 const ComplexMap& g) {
  std::map<int, ZMat> out;
  int lo = std::max(a.lo(), b.lo()), hi = std::min(a.hi(), b.hi());
  for (int n = lo; n <= hi; ++n) {
    ZMat m(b.groups().dim(n), a.groups().dim(n));
    for (int k : a.slot_ks(n)) {
      bool present = false;
      for (int t : b.slot_ks(n)) present = present || t == k;
      if (!present) continue;
      ZMat blk = postcompose_matrix(g.comp(n + k), a.source().term(k));
      std::size_t r0 = b.slot_offset(n, k), c0 = a.slot_offset(n, k);
      for (std::size_t i = 0; i < blk.rows(); ++i)
        for (std::size_t j = 0; j < blk.cols(); ++j) m.at(r0 + i, c0 + j) = blk.at(i, j);
    }
    out.emplace(n, std::move(m));
  }
  return out;
}

// (- o g): Hom(Y, W) -> Hom(X, W) for g: X -> Y
inline std::map<int, ZMat> hom_precompose_chain(const HomComplex& a, const HomComplex& b,
                                                const ComplexMap& g) {
  std::map<int, ZMat> out;
  int lo = std::max(a.lo(), b.lo()), hi = std::min(a.hi(), b.hi());
  for (int n = lo; n <= hi; ++n) {
    ZMat m(b.groups().dim(n), a.groups().dim(n));
    for (int k : a.slot_ks(n)) {
      bool present = false;
      for (int t : b.slot_ks(n)) present = present || t == k;
      if (!present) continue;
      ZMat blk = precompose_matrix(g.comp(k), a.target().term(n + k));
      std::size_t r0 = b.slot_offset(n, k), c0 = a.slot_offset(n, k);
      for (std::size_t i = 0; i < blk.rows(); ++i)
        for (std::size_t j = 0; j < blk.cols(); ++j) m.at(r0 + i, c0 + j) = blk.at(i, j);
    }
    out.emplace(n, std::move(m));
  }
  return out;
}

inline void verify_hom_chain_map(const HomComplex& a, const HomComplex& b,
                                 const std::map<int, ZMat>& l) {
  for (auto& [n, ln] : l) {
    auto prev = l.find(n - 1);
    if (prev == l.end()) continue;
    ZMat lhs = prev->second * a.groups().d(n);
    ZMat rhs = b.groups().d(n) * ln;
    const std::vector<Int>& ann = b.groups().ann(n - 1);
    for (std::size_t i = 0; i < lhs.rows(); ++i)
      for (std::size_t j = 0; j < lhs.cols(); ++j) {
        Int diff = lhs.at(i, j) - rhs.at(i, j);
        if (ann[i] != 0) diff %= ann[i];
        if (diff != 0) throw NotChainMap("induced hom square does not commute");
      }
  }
}

struct InducedOnHomology {
  GroupType src_type, dst_type;
  FpMat matrix;  // columns: images of source homology generators
  bool iso = false;
};

inline InducedOnHomology induced_trusted(const HomComplex& a, const HomComplex& b,
                                         const std::map<int, ZMat>& l, int n) {
  Subquotient sa = a.trusted_homology(n);
  Subquotient sb = b.trusted_homology(n);
  std::uint64_t p = a.source().ring().p();
  if (!sa.group().is_elementary(p) || !sb.group().is_elementary(p))
    throw Error("expected p-torsion homology on the trusted range");
  auto it = l.find(n);
  ZMat ln = it == l.end() ? ZMat(b.groups().dim(n), a.groups().dim(n)) : it->second;

  // trusted target rows must not mix in untrusted source slots
  {
    std::vector<char> in_src(a.groups().dim(n), 0);
    for (int k : a.trusted_slot_ks(n)) {
      std::size_t fo = a.slot_offset(n, k);
      for (std::size_t r = 0; r < a.slot_dim(n, k); ++r) in_src[fo + r] = 1;
    }
    const std::vector<Int>& bann = b.groups().ann(n);
    for (int k : b.trusted_slot_ks(n)) {
      std::size_t fo = b.slot_offset(n, k);
      for (std::size_t r = 0; r < b.slot_dim(n, k); ++r)
        for (std::size_t j = 0; j < ln.cols(); ++j) {
          if (in_src[j]) continue;
          Int e = ln.at(fo + r, j);
          if (bann[fo + r] != 0) e %= bann[fo + r];
          if (e != 0) throw Error("trusted induced map reads untrusted slots");
        }
    }
  }

  InducedOnHomology out;
  out.src_type = sa.group();
  out.dst_type = sb.group();
  out.matrix = FpMat(p, sb.num_gens(), sa.num_gens());
  for (std::size_t i = 0; i < sa.num_gens(); ++i) {
    std::vector<Int> full = a.extend_trusted(n, sa.representative(i));
    std::vector<Int> img = b.restrict_trusted(n, ln.apply(full));
    if (!sb.contains(img)) throw Error("image of a homology class is not a cycle");
    std::vector<Int> cc = sb.class_coords(img);
    for (std::size_t r = 0; r < cc.size(); ++r)
      out.matrix.set(r, i, cc[r].convert_to<long long>());
  }
  out.iso = out.src_type == out.dst_type &&
            fp_rank(out.matrix) == sa.num_gens();
  return out;
}

// ---------------------------------------------------------------------------
// Comparison certificates: post-composition with the cover P_0 ->> M and
// pre-composition with the syzygy inclusion ker(P_0 ->> M) -> P_0 are honest
// chain maps even on a cut window, and both induce isomorphisms on trusted
// homology.  Together they pin the endomorphism complex's homology to the
// stable endomorphism groups.
// ---------------------------------------------------------------------------

struct QuasiIsoRow {
  int n = 0;
  std::size_t dim_end = 0, dim_cover = 0, dim_syzygy = 0;
  FpMat cover_matrix, syzygy_matrix;
  bool cover_iso = false, syzygy_iso = false;
};

struct QuasiIsoReport {
  int lo = 0, hi = 0;  // certified degree range
  std::vector<QuasiIsoRow> rows;
  bool all_iso = true;
};

inline ModuleMap syzygy_inclusion(const FgModule& m, const FgModule& p0) {
  // ker(canonical cover) = u * (k-generator block) inside R^{f+v}
  FgModule s(m.ring, 0, m.vect_dim);
  ModuleMap inc(s, p0);
  for (std::size_t j = 0; j < m.vect_dim; ++j) inc.set(m.free_rank + j, j, m.ring.radical());
  return inc;
}

inline QuasiIsoReport check_pi_quasi_iso(const FgModule& m, int lo, int hi) {
  if (lo > -2 || hi < 2)
    throw OutsideTrustedWindow("window leaves no trusted degrees around 0");
  WindowedComplex p = complete_resolution(m, lo, hi);
  WindowedComplex mc = module_complex(m, 0);
  FgModule om = loop_of(m);
  WindowedComplex oc = module_complex(om, 0);

  ComplexMap cover(p, mc);
  cover.set(0, canonical_cover(m));
  cover.validate();
  ComplexMap syz(oc, p);
  syz.set(0, syzygy_inclusion(m, p.term(0)));
  syz.validate();

  HomComplex end(p, p), hcover(p, mc), hsyz(oc, p);
  std::map<int, ZMat> lc = hom_postcompose_chain(end, hcover, cover);
  std::map<int, ZMat> ls = hom_precompose_chain(end, hsyz, syz);
  verify_hom_chain_map(end, hcover, lc);
  verify_hom_chain_map(end, hsyz, ls);

  QuasiIsoReport rep;
  rep.lo = std::max(2 - hi, lo + 2);
  rep.hi = std::min(-lo - 2, hi - 2);
  for (int n = rep.lo; n <= rep.hi; ++n) {
    if (!end.trusted(n) || !hcover.trusted(n) || !hsyz.trusted(n))
      throw OutsideTrustedWindow("certified range exceeds the trusted degrees");
    QuasiIsoRow row;
    row.n = n;
    InducedOnHomology a = induced_trusted(end, hcover, lc, n);
    InducedOnHomology b = induced_trusted(end, hsyz, ls, n);
    row.dim_end = a.src_type.torsion.size();
    row.dim_cover = a.dst_type.torsion.size();
    row.dim_syzygy = b.dst_type.torsion.size();
    row.cover_matrix = a.matrix;
    row.syzygy_matrix = b.matrix;
    row.cover_iso = a.iso;
    row.syzygy_iso = b.iso;
    rep.rows.push_back(row);
    rep.all_iso = rep.all_iso && a.iso && b.iso;
  }
  return rep;
}

}  // namespace stmod
