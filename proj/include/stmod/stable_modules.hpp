#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "stmod/homology.hpp"
#include "stmod/matrix.hpp"
#include "stmod/rings.hpp"

namespace stmod {

// A finitely generated module over Z/p^2 or F_p[e]/(e^2) in canonical form
// R^free_rank (+) k^vect_dim.  Generator order: free generators first.
struct FgModule {
  BaseRing ring;
  std::size_t free_rank = 0;
  std::size_t vect_dim = 0;

  FgModule(BaseRing r, std::size_t f, std::size_t v) : ring(r), free_rank(f), vect_dim(v) {}

  std::size_t total_gens() const { return free_rank + vect_dim; }
  bool is_free_gen(std::size_t i) const { return i < free_rank; }
  bool is_zero() const { return total_gens() == 0; }

  Int size() const {
    Int s = 1;
    for (std::size_t i = 0; i < 2 * free_rank + vect_dim; ++i) s *= ring.p();
    return s;
  }

  FgModule gamma() const { return FgModule(ring, 0, vect_dim); }

  bool operator==(const FgModule& o) const {
    return ring == o.ring && free_rank == o.free_rank && vect_dim == o.vect_dim;
  }
  bool operator!=(const FgModule& o) const { return !(*this == o); }

  std::string to_string() const {
    return "(free " + std::to_string(free_rank) + ", vect " + std::to_string(vect_dim) + ")";
  }
};

inline FgModule direct_sum(const FgModule& a, const FgModule& b) {
  if (a.ring != b.ring) throw RingMismatch("direct sum over different rings");
  return FgModule(a.ring, a.free_rank + b.free_rank, a.vect_dim + b.vect_dim);
}

// Generator index of the a-part / b-part inside a (+) b.
inline std::size_t ds_index_a(const FgModule& a, const FgModule& b, std::size_t i) {
  return i < a.free_rank ? i : b.free_rank + i;
}
inline std::size_t ds_index_b(const FgModule& a, const FgModule& b, std::size_t i) {
  return i < b.free_rank ? a.free_rank + i : a.free_rank + a.vect_dim + i;
}

// A homomorphism between canonical-form modules, stored as a matrix over the
// ring (columns = images of source generators).  Entries in rows belonging to
// k generators are kept reduced mod p; entries of free rows in columns of k
// generators are radical multiples.
class ModuleMap {
 public:
  ModuleMap(const FgModule& src, const FgModule& dst)
      : src_(src), dst_(dst), m_(src.ring, dst.total_gens(), src.total_gens()) {
    if (src.ring != dst.ring) throw RingMismatch("map between modules over different rings");
  }

  static ModuleMap identity(const FgModule& m) {
    ModuleMap f(m, m);
    for (std::size_t i = 0; i < m.total_gens(); ++i) f.m_.at(i, i) = 1;
    return f;
  }

  const FgModule& src() const { return src_; }
  const FgModule& dst() const { return dst_; }
  const BaseRing& ring() const { return src_.ring; }
  const RMat& matrix() const { return m_; }

  std::uint64_t at(std::size_t i, std::size_t j) const { return m_.at(i, j); }

  void set(std::size_t i, std::size_t j, std::uint64_t v) {
    m_.at(i, j) = normalize(i, v);
    check_entry(i, j);
  }

  void set_from_int(std::size_t i, std::size_t j, long long v) { set(i, j, ring().from_int(v)); }

  void validate() const {
    for (std::size_t i = 0; i < dst_.total_gens(); ++i)
      for (std::size_t j = 0; j < src_.total_gens(); ++j) check_entry(i, j);
  }

  bool operator==(const ModuleMap& o) const {
    return src_ == o.src_ && dst_ == o.dst_ && m_ == o.m_;
  }
  bool operator!=(const ModuleMap& o) const { return !(*this == o); }

  bool is_zero() const { return m_.is_zero(); }

  friend ModuleMap operator*(const ModuleMap& f, const ModuleMap& g) {
    if (g.dst_ != f.src_) throw BadInput("composition source/target mismatch");
    ModuleMap h(g.src_, f.dst_);
    RMat prod = f.m_ * g.m_;
    for (std::size_t i = 0; i < h.dst_.total_gens(); ++i)
      for (std::size_t j = 0; j < h.src_.total_gens(); ++j)
        h.m_.at(i, j) = h.normalize(i, prod.at(i, j));
    return h;
  }

  friend ModuleMap operator+(const ModuleMap& f, const ModuleMap& g) {
    if (f.src_ != g.src_ || f.dst_ != g.dst_) throw BadInput("map sum mismatch");
    ModuleMap h(f.src_, f.dst_);
    for (std::size_t i = 0; i < f.dst_.total_gens(); ++i)
      for (std::size_t j = 0; j < f.src_.total_gens(); ++j)
        h.m_.at(i, j) = h.normalize(i, f.ring().add(f.m_.at(i, j), g.m_.at(i, j)));
    return h;
  }

  friend ModuleMap operator-(const ModuleMap& f, const ModuleMap& g) {
    if (f.src_ != g.src_ || f.dst_ != g.dst_) throw BadInput("map diff mismatch");
    ModuleMap h(f.src_, f.dst_);
    for (std::size_t i = 0; i < f.dst_.total_gens(); ++i)
      for (std::size_t j = 0; j < f.src_.total_gens(); ++j)
        h.m_.at(i, j) = h.normalize(i, f.ring().sub(f.m_.at(i, j), g.m_.at(i, j)));
    return h;
  }

  ModuleMap scaled(std::uint64_t c) const {
    ModuleMap h(src_, dst_);
    for (std::size_t i = 0; i < dst_.total_gens(); ++i)
      for (std::size_t j = 0; j < src_.total_gens(); ++j)
        h.m_.at(i, j) = h.normalize(i, ring().mul(m_.at(i, j), c));
    return h;
  }

  // Elements are per-generator ring values, k coordinates reduced mod p.
  std::vector<std::uint64_t> apply(const std::vector<std::uint64_t>& x) const {
    std::vector<std::uint64_t> y = m_.apply(x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = normalize(i, y[i]);
    return y;
  }

 private:
  std::uint64_t normalize(std::size_t row, std::uint64_t v) const {
    return dst_.is_free_gen(row) ? v : ring().residue(v);
  }

  void check_entry(std::size_t i, std::size_t j) const {
    std::uint64_t v = m_.at(i, j);
    if (!dst_.is_free_gen(i)) {
      if (v >= ring().p()) throw InvalidPresentation("k-row entry not reduced");
    } else if (!src_.is_free_gen(j) && !ring().in_radical(v)) {
      throw InvalidPresentation("k generator must land in the radical of a free summand");
    }
  }

  FgModule src_, dst_;
  RMat m_;
};

// ---------------------------------------------------------------------------
// Abelian-group encodings.  Each module is a finite abelian group with one
// Z generator per free summand (annihilator p^2) over Z/p^2, two generators
// (unit and radical part, annihilator p each) over F_p[e], and one generator
// of annihilator p per k summand.  Module maps become integer matrices.
// ---------------------------------------------------------------------------

inline std::size_t group_dim(const FgModule& m) {
  std::size_t per_free = m.ring.kind() == RingKind::Zpsq ? 1 : 2;
  return per_free * m.free_rank + m.vect_dim;
}

inline std::vector<Int> group_ann(const FgModule& m) {
  std::vector<Int> a;
  Int p = m.ring.p();
  if (m.ring.kind() == RingKind::Zpsq) {
    for (std::size_t i = 0; i < m.free_rank; ++i) a.push_back(p * p);
  } else {
    for (std::size_t i = 0; i < 2 * m.free_rank; ++i) a.push_back(p);
  }
  for (std::size_t i = 0; i < m.vect_dim; ++i) a.push_back(p);
  return a;
}

inline std::vector<Int> element_to_group(const FgModule& m, const std::vector<std::uint64_t>& x) {
  if (x.size() != m.total_gens()) throw BadInput("element length mismatch");
  std::vector<Int> g;
  for (std::size_t i = 0; i < m.free_rank; ++i) {
    if (m.ring.kind() == RingKind::Zpsq) {
      g.push_back(x[i]);
    } else {
      g.push_back(m.ring.lo(x[i]));
      g.push_back(m.ring.hi(x[i]));
    }
  }
  for (std::size_t i = 0; i < m.vect_dim; ++i) g.push_back(x[m.free_rank + i]);
  return g;
}

inline std::vector<std::uint64_t> group_to_element(const FgModule& m, const std::vector<Int>& g) {
  if (g.size() != group_dim(m)) throw BadInput("group coordinate length mismatch");
  auto reduce = [](const Int& v, std::uint64_t mod) {
    Int r = v % mod;
    if (r < 0) r += mod;
    return static_cast<std::uint64_t>(r);
  };
  std::vector<std::uint64_t> x(m.total_gens());
  std::uint64_t p = m.ring.p();
  std::size_t pos = 0;
  for (std::size_t i = 0; i < m.free_rank; ++i) {
    if (m.ring.kind() == RingKind::Zpsq) {
      x[i] = reduce(g[pos++], p * p);
    } else {
      std::uint64_t lo = reduce(g[pos], p), hi = reduce(g[pos + 1], p);
      pos += 2;
      x[i] = m.ring.from_parts(lo, hi);
    }
  }
  for (std::size_t i = 0; i < m.vect_dim; ++i) x[m.free_rank + i] = reduce(g[pos++], p);
  return x;
}

inline ZMat group_matrix(const ModuleMap& f) {
  const FgModule& s = f.src();
  const FgModule& d = f.dst();
  ZMat m(group_dim(d), group_dim(s));
  std::size_t gs = group_dim(s);
  for (std::size_t j = 0; j < gs; ++j) {
    std::vector<Int> basis(gs, Int(0));
    basis[j] = 1;
    std::vector<Int> img = element_to_group(d, f.apply(group_to_element(s, basis)));
    for (std::size_t i = 0; i < img.size(); ++i) m.at(i, j) = img[i];
  }
  return m;
}

inline bool is_injective(const ModuleMap& f) {
  ZMat sol = solution_lattice_rows(group_matrix(f), group_ann(f.dst()));
  return Subquotient(group_dim(f.src()), sol, ZMat(0, group_dim(f.src())), group_ann(f.src()))
      .group()
      .is_trivial();
}

inline bool is_surjective(const ModuleMap& f) {
  ZMat img = group_matrix(f).transpose();
  Subquotient image(group_dim(f.dst()), img, ZMat(0, group_dim(f.dst())), group_ann(f.dst()));
  return image.group().order() == f.dst().size();
}

// ---------------------------------------------------------------------------
// Presentations: canonical form of a cokernel with projection witness.
// ---------------------------------------------------------------------------

struct Presented {
  FgModule module;
  ModuleMap proj;  // free cover R^rows -> module
};

inline Presented from_presentation(const BaseRing& ring, const RMat& pres) {
  if (pres.ring() != ring) throw RingMismatch("presentation over the wrong ring");
  ChainDiag f = chain_diagonalize(pres);
  std::size_t rows = pres.rows();
  std::size_t v = f.n_rad;
  std::size_t free = rows - f.n_unit - f.n_rad;
  FgModule m(ring, free, v);
  FgModule cover(ring, rows, 0);
  ModuleMap proj(cover, m);
  // cokernel coordinates are the zero rows (free generators) and the u-rows
  // (k generators) of the diagonal form, read off through the row transform
  for (std::size_t r = 0; r < free; ++r)
    for (std::size_t j = 0; j < rows; ++j)
      proj.set(r, j, f.u.at(f.n_unit + f.n_rad + r, j));
  for (std::size_t r = 0; r < v; ++r)
    for (std::size_t j = 0; j < rows; ++j)
      proj.set(free + r, j, ring.residue(f.u.at(f.n_unit + r, j)));
  return Presented{m, proj};
}

// Canonical surjection R^{f+v} ->> M (identity on free generators, residue on
// k generators).
inline ModuleMap canonical_cover(const FgModule& m) {
  FgModule cover(m.ring, m.total_gens(), 0);
  ModuleMap s(cover, m);
  for (std::size_t i = 0; i < m.total_gens(); ++i) s.set(i, i, 1);
  return s;
}

// Embedding M >-> R^{f+v}: free generators go to basis vectors, k generators
// to radical multiples.
inline ModuleMap hull_inclusion(const FgModule& m) {
  FgModule hull(m.ring, m.total_gens(), 0);
  ModuleMap inc(m, hull);
  for (std::size_t i = 0; i < m.free_rank; ++i) inc.set(i, i, 1);
  for (std::size_t i = 0; i < m.vect_dim; ++i)
    inc.set(m.free_rank + i, m.free_rank + i, m.ring.radical());
  return inc;
}

struct Cokernel {
  FgModule module;
  ModuleMap proj;  // N ->> coker
};

inline Cokernel cokernel_of(const ModuleMap& f) {
  const BaseRing& R = f.ring();
  const FgModule& n = f.dst();
  std::size_t rows = n.total_gens();
  // relations of N itself: u * (k generator)
  RMat pres(R, rows, f.src().total_gens() + n.vect_dim);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < f.src().total_gens(); ++j) pres.at(i, j) = f.at(i, j);
  for (std::size_t j = 0; j < n.vect_dim; ++j)
    pres.at(n.free_rank + j, f.src().total_gens() + j) = R.radical();
  Presented p = from_presentation(R, pres);
  ModuleMap proj(n, p.module);
  for (std::size_t i = 0; i < p.module.total_gens(); ++i)
    for (std::size_t j = 0; j < rows; ++j) proj.set(i, j, p.proj.at(i, j));
  proj.validate();
  return Cokernel{p.module, proj};
}

struct Kernel {
  FgModule module;
  ModuleMap incl;  // ker >-> M
};

inline Kernel kernel_of(const ModuleMap& f) {
  const BaseRing& R = f.ring();
  const FgModule& m = f.src();
  // group-level solutions generate the kernel as a module
  ZMat sol = solution_lattice_rows(group_matrix(f), group_ann(f.dst()));
  std::size_t t = sol.rows();
  FgModule cover(R, t, 0);
  ModuleMap g(cover, m);
  for (std::size_t j = 0; j < t; ++j) {
    std::vector<std::uint64_t> el = group_to_element(m, sol.row(j));
    for (std::size_t i = 0; i < m.total_gens(); ++i) g.set(i, j, el[i]);
  }
  // relations among the chosen generators
  ZMat rel = solution_lattice_rows(group_matrix(g), group_ann(m));
  RMat pres(R, t, rel.rows());
  for (std::size_t j = 0; j < rel.rows(); ++j) {
    std::vector<std::uint64_t> el = group_to_element(cover, rel.row(j));
    for (std::size_t i = 0; i < t; ++i) pres.at(i, j) = el[i];
  }
  Presented p = from_presentation(R, pres);
  // sections of the new generators inside R^t, pushed through g
  ChainDiag cd = chain_diagonalize(pres);
  ModuleMap incl(p.module, m);
  std::size_t n_drop = cd.n_unit + cd.n_rad;
  for (std::size_t r = 0; r < p.module.total_gens(); ++r) {
    std::size_t row = r < p.module.free_rank ? n_drop + r
                                             : cd.n_unit + (r - p.module.free_rank);
    std::vector<std::uint64_t> lift(t);
    for (std::size_t i = 0; i < t; ++i) lift[i] = cd.uinv.at(i, row);
    std::vector<std::uint64_t> img = g.apply(lift);
    for (std::size_t i = 0; i < m.total_gens(); ++i) incl.set(i, r, img[i]);
  }
  incl.validate();
  return Kernel{p.module, incl};
}

inline FgModule suspension(const FgModule& m) { return cokernel_of(hull_inclusion(m)).module; }

inline FgModule loop_of(const FgModule& m) { return kernel_of(canonical_cover(m)).module; }

// ---------------------------------------------------------------------------
// The abelian group Hom(M, N): one generator per unconstrained matrix slot.
// ---------------------------------------------------------------------------

struct HomSlot {
  std::size_t row, col;
  int part;  // 0: unit coefficient, 1: radical coefficient (split free slots)
};

inline std::vector<HomSlot> hom_slots(const FgModule& m, const FgModule& n) {
  if (m.ring != n.ring) throw RingMismatch("hom over different rings");
  std::vector<HomSlot> s;
  bool split = m.ring.kind() == RingKind::Eps;
  for (std::size_t i = 0; i < n.total_gens(); ++i)
    for (std::size_t j = 0; j < m.total_gens(); ++j) {
      if (n.is_free_gen(i) && m.is_free_gen(j)) {
        s.push_back({i, j, 0});
        if (split) s.push_back({i, j, 1});
      } else {
        s.push_back({i, j, 0});
      }
    }
  return s;
}

inline std::vector<Int> hom_ann(const FgModule& m, const FgModule& n) {
  std::vector<Int> a;
  Int p = m.ring.p();
  bool zp = m.ring.kind() == RingKind::Zpsq;
  for (const HomSlot& s : hom_slots(m, n)) {
    bool full = n.is_free_gen(s.row) && m.is_free_gen(s.col);
    a.push_back(full && zp ? p * p : p);
  }
  return a;
}

inline Int hom_size(const FgModule& m, const FgModule& n) {
  Int sz = 1;
  for (const Int& a : hom_ann(m, n)) sz *= a;
  return sz;
}

inline std::vector<Int> hom_encode(const ModuleMap& f) {
  const FgModule& m = f.src();
  const FgModule& n = f.dst();
  std::vector<Int> c;
  for (const HomSlot& s : hom_slots(m, n)) {
    std::uint64_t v = f.at(s.row, s.col);
    bool full = n.is_free_gen(s.row) && m.is_free_gen(s.col);
    if (!full) {
      // k-row slots store residues; free-row slots over k columns store u*c
      c.push_back(n.is_free_gen(s.row) ? f.ring().radical_quotient(v) : v);
    } else if (m.ring.kind() == RingKind::Zpsq) {
      c.push_back(v);
    } else {
      c.push_back(s.part == 0 ? m.ring.lo(v) : m.ring.hi(v));
    }
  }
  return c;
}

inline ModuleMap hom_decode(const FgModule& m, const FgModule& n, const std::vector<Int>& c) {
  std::vector<HomSlot> slots = hom_slots(m, n);
  if (c.size() != slots.size()) throw BadInput("hom coordinate length mismatch");
  std::vector<Int> ann = hom_ann(m, n);
  ModuleMap f(m, n);
  for (std::size_t t = 0; t < slots.size(); ++t) {
    const HomSlot& s = slots[t];
    Int r = c[t] % ann[t];
    if (r < 0) r += ann[t];
    std::uint64_t v = static_cast<std::uint64_t>(r);
    bool full = n.is_free_gen(s.row) && m.is_free_gen(s.col);
    if (!full) {
      if (n.is_free_gen(s.row)) v = m.ring.from_parts(0, v);
      f.set(s.row, s.col, v);
    } else if (m.ring.kind() == RingKind::Zpsq) {
      f.set(s.row, s.col, v);
    } else {
      std::uint64_t prev = f.at(s.row, s.col);
      f.set(s.row, s.col,
            s.part == 0 ? m.ring.from_parts(v, m.ring.hi(prev))
                        : m.ring.from_parts(m.ring.lo(prev), v));
    }
  }
  return f;
}

// Integer matrix of (g o -) : Hom(M, N) -> Hom(M, N').
inline ZMat postcompose_matrix(const ModuleMap& g, const FgModule& m) {
  std::vector<HomSlot> slots = hom_slots(m, g.src());
  std::vector<Int> out_ann = hom_ann(m, g.dst());
  ZMat mat(out_ann.size(), slots.size());
  for (std::size_t j = 0; j < slots.size(); ++j) {
    std::vector<Int> basis(slots.size(), Int(0));
    basis[j] = 1;
    std::vector<Int> img = hom_encode(g * hom_decode(m, g.src(), basis));
    for (std::size_t i = 0; i < img.size(); ++i) mat.at(i, j) = img[i];
  }
  return mat;
}

// Integer matrix of (- o h) : Hom(M, N) -> Hom(M', N).
inline ZMat precompose_matrix(const ModuleMap& h, const FgModule& n) {
  std::vector<HomSlot> slots = hom_slots(h.dst(), n);
  std::vector<Int> out_ann = hom_ann(h.src(), n);
  ZMat mat(out_ann.size(), slots.size());
  for (std::size_t j = 0; j < slots.size(); ++j) {
    std::vector<Int> basis(slots.size(), Int(0));
    basis[j] = 1;
    std::vector<Int> img = hom_encode(hom_decode(h.dst(), n, basis) * h);
    for (std::size_t i = 0; i < img.size(); ++i) mat.at(i, j) = img[i];
  }
  return mat;
}

// ---------------------------------------------------------------------------
// Stable homs: Hom(M, N) modulo maps factoring through a projective.  A map
// factors through a projective iff it extends along M >-> R^{f+v}, so the
// stable hom group is coker(Hom(R^{f+v}, N) -> Hom(M, N)).
// ---------------------------------------------------------------------------

struct StableHom {
  std::size_t dim = 0;               // F_p dimension of the stable hom space
  std::vector<ModuleMap> reps;       // maps representing a basis
  Subquotient classes;               // quotient presentation over hom coordinates
};

inline StableHom stable_hom(const FgModule& m, const FgModule& n) {
  if (m.ring != n.ring) throw RingMismatch("stable hom over different rings");
  ModuleMap inc = hull_inclusion(m);
  FgModule hull = inc.dst();
  ZMat restrict_mat = precompose_matrix(inc, n);
  std::size_t dim = hom_ann(m, n).size();
  Subquotient q(dim, ZMat::identity(dim), restrict_mat.transpose(), hom_ann(m, n));
  StableHom out{0, {}, q};
  GroupType g = q.group();
  if (!g.is_elementary(m.ring.p()))
    throw Error("stable hom group is not elementary, internal inconsistency");
  out.dim = g.torsion.size();
  for (std::size_t i = 0; i < q.num_gens(); ++i)
    out.reps.push_back(hom_decode(m, n, q.representative(i)));
  return out;
}

inline bool factors_through_projective(const ModuleMap& f) {
  ModuleMap inc = hull_inclusion(f.src());
  ZMat restrict_mat = precompose_matrix(inc, f.dst());
  return z_solve_mod(restrict_mat, hom_encode(f), hom_ann(f.src(), f.dst())).has_value();
}

inline bool stably_equal(const ModuleMap& f, const ModuleMap& g) {
  return factors_through_projective(f - g);
}

// ---------------------------------------------------------------------------
// Path objects and homotopy classes.
// ---------------------------------------------------------------------------

struct PathObject {
  FgModule base;   // M
  FgModule total;  // PM = M (+) F
  ModuleMap into;  // M -> PM
  ModuleMap onto;  // PM -> M (+) M
};

inline PathObject path_object(const FgModule& m) {
  FgModule f(m.ring, m.total_gens(), 0);
  FgModule pm = direct_sum(m, f);
  FgModule mm = direct_sum(m, m);
  ModuleMap s = canonical_cover(m);

  ModuleMap into(m, pm);
  for (std::size_t i = 0; i < m.total_gens(); ++i)
    into.set(ds_index_a(m, f, i), i, 1);

  ModuleMap onto(pm, mm);
  for (std::size_t i = 0; i < m.total_gens(); ++i) {
    // first component: project to the M part; second: M part + s(F part)
    onto.set(ds_index_a(m, m, i), ds_index_a(m, f, i), 1);
    onto.set(ds_index_b(m, m, i), ds_index_a(m, f, i), 1);
  }
  for (std::size_t j = 0; j < f.total_gens(); ++j)
    for (std::size_t i = 0; i < m.total_gens(); ++i)
      onto.set(ds_index_b(m, m, i), ds_index_b(m, f, j), s.at(i, j));
  onto.validate();
  return PathObject{m, pm, into, onto};
}

// Right homotopy through the path object identifies f, g : M -> N exactly
// when g - f factors through the canonical cover of N.
struct HomotopyClasses {
  Int count = 0;
  std::vector<ModuleMap> reps;  // lexicographically least element per class
};

inline HomotopyClasses homotopy_classes(const FgModule& m, const FgModule& n,
                                        std::uint64_t guard = 1u << 16) {
  if (m.ring != n.ring) throw RingMismatch("homotopy classes over different rings");
  Int total = hom_size(m, n);
  if (total > guard) throw TooLarge("hom set of size " + total.str() + " exceeds guard");
  std::vector<Int> ann = hom_ann(m, n);
  std::size_t dim = ann.size();

  // subgroup of null-homotopic maps: images of Hom(M, F) under s o -
  ModuleMap s = canonical_cover(n);
  ZMat post = postcompose_matrix(s, m);
  std::set<std::vector<std::uint64_t>> null_maps;
  std::vector<std::vector<std::uint64_t>> frontier;
  auto reduce_vec = [&](std::vector<Int> v) {
    std::vector<std::uint64_t> r(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      Int x = v[i] % ann[i];
      if (x < 0) x += ann[i];
      r[i] = static_cast<std::uint64_t>(x);
    }
    return r;
  };
  std::vector<std::vector<std::uint64_t>> gens;
  for (std::size_t j = 0; j < post.cols(); ++j) gens.push_back(reduce_vec(post.col(j)));
  std::vector<std::uint64_t> zero(dim, 0);
  null_maps.insert(zero);
  frontier.push_back(zero);
  while (!frontier.empty()) {
    std::vector<std::vector<std::uint64_t>> next;
    for (const auto& v : frontier)
      for (const auto& g : gens) {
        std::vector<std::uint64_t> w(dim);
        for (std::size_t i = 0; i < dim; ++i) {
          Int sum = Int(v[i]) + Int(g[i]);
          w[i] = static_cast<std::uint64_t>(sum % ann[i]);
        }
        if (null_maps.insert(w).second) next.push_back(w);
      }
    frontier = std::move(next);
  }

  // enumerate the full hom box in lexicographic order; each unclaimed element
  // starts a class and claims its coset
  HomotopyClasses out;
  std::set<std::vector<std::uint64_t>> claimed;
  std::vector<std::uint64_t> cur(dim, 0);
  while (true) {
    if (!claimed.count(cur)) {
      std::vector<Int> as_int(cur.begin(), cur.end());
      out.reps.push_back(hom_decode(m, n, as_int));
      out.count += 1;
      for (const auto& nu : null_maps) {
        std::vector<std::uint64_t> w(dim);
        for (std::size_t i = 0; i < dim; ++i)
          w[i] = static_cast<std::uint64_t>((Int(cur[i]) + Int(nu[i])) % ann[i]);
        claimed.insert(w);
      }
    }
    bool done = false;
    std::size_t i = dim;
    while (true) {
      if (i == 0) { done = true; break; }
      --i;
      ++cur[i];
      if (Int(cur[i]) < ann[i]) break;
      cur[i] = 0;
    }
    if (done) break;
  }
  return out;
}

// Exact class count |Hom(M,N)| / |null-homotopic|, computed by lattice
// arithmetic; agrees with literal enumeration and with p^(stable dim).
inline Int stable_class_count(const FgModule& m, const FgModule& n) {
  return stable_hom(m, n).classes.group().order();
}

// ---------------------------------------------------------------------------
// Decomposition of injections into the five basic summands.
// ---------------------------------------------------------------------------

struct InjectionSummands {
  std::size_t id_r = 0;      // R = R
  std::size_t id_k = 0;      // k = k
  std::size_t k_to_r = 0;    // k >-> R, 1 |-> u
  std::size_t zero_r = 0;    // 0 -> R
  std::size_t zero_k = 0;    // 0 -> k
  ModuleMap target_change, target_change_inv;  // automorphism of N
  ModuleMap source_change, source_change_inv;  // automorphism of M
  ModuleMap block;                             // the canonical direct sum form
};

namespace detail {

// elementary automorphism e_j |-> e_j + c e_i
inline ModuleMap elem_axpy(const FgModule& x, std::size_t i, std::size_t j, std::uint64_t c) {
  ModuleMap e = ModuleMap::identity(x);
  e.set(i, j, c);
  return e;
}

inline ModuleMap elem_swap(const FgModule& x, std::size_t i, std::size_t j) {
  if (x.is_free_gen(i) != x.is_free_gen(j)) throw BadInput("swap across summand types");
  ModuleMap e = ModuleMap::identity(x);
  e.set(i, i, 0);
  e.set(j, j, 0);
  e.set(i, j, 1);
  e.set(j, i, 1);
  return e;
}

inline ModuleMap elem_scale(const FgModule& x, std::size_t i, std::uint64_t c) {
  ModuleMap e = ModuleMap::identity(x);
  e.set(i, i, x.is_free_gen(i) ? c : x.ring.residue(c));
  return e;
}

}  // namespace detail

inline InjectionSummands decompose_injection(const ModuleMap& j) {
  if (!is_injective(j)) throw NotInjective("map has nontrivial kernel");
  const BaseRing& R = j.ring();
  const FgModule& M = j.src();
  const FgModule& N = j.dst();
  std::size_t a = M.free_rank, b = M.vect_dim, c = N.free_rank, d = N.vect_dim;

  ModuleMap W = j;
  ModuleMap H = ModuleMap::identity(N), Hinv = H;
  ModuleMap G = ModuleMap::identity(M), Ginv = G;

  auto trow = [&](const ModuleMap& e, const ModuleMap& einv) {
    W = e * W;
    H = e * H;
    Hinv = Hinv * einv;
  };
  auto scol = [&](const ModuleMap& e, const ModuleMap& einv) {
    W = W * e;
    G = G * e;
    Ginv = einv * Ginv;
  };
  auto trow_axpy = [&](std::size_t i, std::size_t k, std::uint64_t cc) {
    // row_i += cc * row_k
    trow(detail::elem_axpy(N, i, k, cc), detail::elem_axpy(N, i, k, R.neg(cc)));
  };
  auto trow_swap = [&](std::size_t i, std::size_t k) {
    if (i == k) return;
    ModuleMap e = detail::elem_swap(N, i, k);
    trow(e, e);
  };
  auto trow_scale = [&](std::size_t i, std::uint64_t cc) {
    trow(detail::elem_scale(N, i, cc), detail::elem_scale(N, i, R.inv(cc)));
  };
  auto scol_axpy = [&](std::size_t i, std::size_t k, std::uint64_t cc) {
    // col_i += cc * col_k   (automorphism entry sits at (k, i))
    scol(detail::elem_axpy(M, k, i, cc), detail::elem_axpy(M, k, i, R.neg(cc)));
  };
  auto scol_swap = [&](std::size_t i, std::size_t k) {
    if (i == k) return;
    ModuleMap e = detail::elem_swap(M, i, k);
    scol(e, e);
  };

  std::size_t placed_idr = 0;
  // phase 1: unit pivots in the free-to-free block give R = R summands
  while (true) {
    std::size_t pi = c, pj = a;
    for (std::size_t i = placed_idr; i < c && pi == c; ++i)
      for (std::size_t jj = placed_idr; jj < a; ++jj)
        if (R.is_unit(W.at(i, jj))) { pi = i; pj = jj; break; }
    if (pi == c) break;
    trow_swap(placed_idr, pi);
    scol_swap(placed_idr, pj);
    trow_scale(placed_idr, R.inv(W.at(placed_idr, placed_idr)));
    for (std::size_t i = 0; i < c + d; ++i) {
      if (i == placed_idr) continue;
      std::uint64_t v = W.at(i, placed_idr);
      if (v) trow_axpy(i, placed_idr, R.neg(v));  // free or k target rows both fine
    }
    for (std::size_t jj = 0; jj < a + b; ++jj) {
      if (jj == placed_idr) continue;
      std::uint64_t v = W.at(placed_idr, jj);
      if (!v) continue;
      // adding a free column into a k column demands a radical coefficient;
      // entries in this row over k columns are radical multiples already
      scol_axpy(jj, placed_idr, R.neg(v));
    }
    ++placed_idr;
  }

  std::size_t placed_idk = 0;
  // phase 2: unit pivots in the k-to-k block give k = k summands
  while (true) {
    std::size_t pi = d, pj = b;
    for (std::size_t i = placed_idk; i < d && pi == d; ++i)
      for (std::size_t jj = placed_idk; jj < b; ++jj)
        if (W.at(c + i, a + jj) != 0) { pi = i; pj = jj; break; }
    if (pi == d) break;
    trow_swap(c + placed_idk, c + pi);
    scol_swap(a + placed_idk, a + pj);
    std::size_t prow = c + placed_idk, pcol = a + placed_idk;
    trow_scale(prow, fp_inv(W.at(prow, pcol), R.p()));
    for (std::size_t i = 0; i < c + d; ++i) {
      if (i == prow) continue;
      std::uint64_t v = W.at(i, pcol);
      if (!v) continue;
      // free target rows hold radical multiples here; k into free rows needs
      // a radical coefficient, which u*quotient provides
      if (i < c) trow_axpy(i, prow, R.neg(R.mul(R.radical(), R.radical_quotient(v))));
      else trow_axpy(i, prow, R.neg(v));
    }
    for (std::size_t jj = 0; jj < a + b; ++jj) {
      if (jj == pcol) continue;
      std::uint64_t v = W.at(prow, jj);
      if (v) scol_axpy(jj, pcol, R.neg(v));  // k column into anything is unconstrained
    }
    ++placed_idk;
  }

  std::size_t placed_ktor = 0;
  // phase 3: remaining k columns must hit the radical of free summands
  for (std::size_t jj = placed_idk; jj < b; ++jj) {
    std::size_t pcol = a + jj;
    std::size_t pi = c;
    for (std::size_t i = placed_idr + placed_ktor; i < c; ++i)
      if (W.at(i, pcol) != 0) { pi = i; break; }
    if (pi == c) throw NotInjective("k generator dies stably, map not injective");
    std::size_t prow = placed_idr + placed_ktor;
    trow_swap(prow, pi);
    scol_swap(pcol, a + placed_idk + placed_ktor);
    pcol = a + placed_idk + placed_ktor;
    trow_scale(prow, fp_inv(R.radical_quotient(W.at(prow, pcol)), R.p()));
    for (std::size_t k2 = 0; k2 < a + b; ++k2) {
      if (k2 == pcol) continue;
      std::uint64_t v = W.at(prow, k2);
      if (!v) continue;
      // entries in this free row are radical; cancel via the mod-p negation
      // of their radical quotient
      scol_axpy(k2, pcol, (R.p() - R.radical_quotient(v)) % R.p());
    }
    for (std::size_t i = 0; i < c; ++i) {
      if (i == prow) continue;
      std::uint64_t v = W.at(i, pcol);
      if (v) trow_axpy(i, prow, R.neg(R.radical_quotient(v)));
    }
    ++placed_ktor;
  }

  // every remaining free column would contain a radical kernel element
  for (std::size_t jj = placed_idr; jj < a; ++jj)
    throw NotInjective("free generator dies stably, map not injective");

  InjectionSummands out{placed_idr, placed_idk, placed_ktor,
                        c - placed_idr - placed_ktor, d - placed_idk,
                        H, Hinv, Ginv, G, W};
  // the working matrix now IS the canonical block form; verify
  ModuleMap expect(M, N);
  for (std::size_t t = 0; t < out.id_r; ++t) expect.set(t, t, 1);
  for (std::size_t t = 0; t < out.id_k; ++t) expect.set(c + t, a + t, 1);
  for (std::size_t t = 0; t < out.k_to_r; ++t)
    expect.set(out.id_r + t, a + out.id_k + t, R.radical());
  if (!(W == expect)) throw Error("injection decomposition failed to reach block form");
  if (!(H * j * G == W)) throw Error("injection decomposition witness mismatch");
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration helpers (exhaustive oracles; callers guard sizes).
// ---------------------------------------------------------------------------

inline std::vector<std::vector<std::uint64_t>> all_elements(const FgModule& m,
                                                            std::uint64_t guard = 1u << 16) {
  if (m.size() > guard) throw TooLarge("module too large to enumerate");
  std::vector<std::uint64_t> radix(m.total_gens());
  for (std::size_t i = 0; i < m.total_gens(); ++i)
    radix[i] = m.is_free_gen(i) ? m.ring.size() : m.ring.p();
  std::vector<std::vector<std::uint64_t>> out;
  std::vector<std::uint64_t> cur(m.total_gens(), 0);
  while (true) {
    out.push_back(cur);
    std::size_t i = m.total_gens();
    bool done = true;
    while (i > 0) {
      --i;
      if (++cur[i] < radix[i]) { done = false; break; }
      cur[i] = 0;
    }
    if (done) break;
  }
  return out;
}

inline std::vector<ModuleMap> all_module_maps(const FgModule& m, const FgModule& n,
                                              std::uint64_t guard = 1u << 16) {
  Int total = hom_size(m, n);
  if (total > guard) throw TooLarge("hom set too large to enumerate");
  std::vector<Int> ann = hom_ann(m, n);
  std::vector<ModuleMap> out;
  std::vector<Int> cur(ann.size(), Int(0));
  while (true) {
    out.push_back(hom_decode(m, n, cur));
    std::size_t i = ann.size();
    bool done = true;
    while (i > 0) {
      --i;
      if (++cur[i] < ann[i]) { done = false; break; }
      cur[i] = 0;
    }
    if (done) break;
  }
  return out;
}

}  // namespace stmod
