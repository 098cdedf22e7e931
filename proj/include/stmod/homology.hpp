#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "stmod/matrix.hpp"

namespace stmod {

// Isomorphism type of a finitely generated abelian group.
struct GroupType {
  std::vector<Int> torsion;  // invariant factors > 1, each divides the next
  std::size_t free_rank = 0;

  bool is_trivial() const { return torsion.empty() && free_rank == 0; }
  bool is_finite() const { return free_rank == 0; }

  Int order() const {
    if (free_rank) return 0;
    Int o = 1;
    for (const Int& t : torsion) o *= t;
    return o;
  }

  bool is_elementary(std::uint64_t p) const {
    if (free_rank) return false;
    for (const Int& t : torsion)
      if (t != p) return false;
    return true;
  }

  bool operator==(const GroupType& o) const {
    return torsion == o.torsion && free_rank == o.free_rank;
  }
  bool operator!=(const GroupType& o) const { return !(*this == o); }

  std::string to_string() const {
    if (is_trivial()) return "0";
    std::string s;
    for (const Int& t : torsion) {
      if (!s.empty()) s += " + ";
      s += "Z/" + t.str();
    }
    for (std::size_t i = 0; i < free_rank; ++i) {
      if (!s.empty()) s += " + ";
      s += "Z";
    }
    return s;
  }
};

namespace detail {

inline ZMat vstack(const ZMat& a, const ZMat& b) {
  if (a.cols() != b.cols() && a.rows() && b.rows()) throw BadInput("vstack width mismatch");
  std::size_t c = a.rows() ? a.cols() : b.cols();
  ZMat m(a.rows() + b.rows(), c);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < c; ++j) m.at(i, j) = a.at(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < c; ++j) m.at(a.rows() + i, j) = b.at(i, j);
  return m;
}

inline ZMat ann_rows(const std::vector<Int>& ann) {
  std::size_t n = ann.size(), k = 0;
  for (const Int& a : ann)
    if (a != 0) ++k;
  ZMat m(k, n);
  std::size_t r = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (ann[i] != 0) m.at(r++, i) = ann[i];
  return m;
}

}  // namespace detail

// A subquotient S/T of the group  G = (+)_i Z/ann_i  (ann_i = 0 meaning Z).
// S is generated by the given subgroup rows, T by the relation rows; both are
// taken together with the ambient identifications.  Produces canonical
// generators with invariant-factor orders, plus coordinate maps in both
// directions.
class Subquotient {
 public:
  Subquotient(std::size_t ambient_dim, const ZMat& subgroup_rows, const ZMat& relation_rows,
              const std::vector<Int>& ambient_ann)
      : n_(ambient_dim) {
    if (ambient_ann.size() != n_) throw BadInput("annihilator vector length mismatch");
    if ((subgroup_rows.rows() && subgroup_rows.cols() != n_) ||
        (relation_rows.rows() && relation_rows.cols() != n_))
      throw BadInput("generator width mismatch");
    ZMat sub = subgroup_rows.rows() ? subgroup_rows : ZMat(0, n_);
    ZMat rel_in = relation_rows.rows() ? relation_rows : ZMat(0, n_);
    ZMat arows = detail::ann_rows(ambient_ann);
    basis_ = lattice_basis(detail::vstack(sub, arows));
    ZMat rel = lattice_basis(detail::vstack(rel_in, arows));
    std::size_t s = basis_.rows();
    ZMat m(rel.rows(), s);
    for (std::size_t i = 0; i < rel.rows(); ++i) {
      auto c = lattice_coords(basis_, rel.row(i));
      if (!c) throw BadInput("relations do not lie in the subgroup");
      for (std::size_t j = 0; j < s; ++j) m.at(i, j) = (*c)[j];
    }
    Snf f = smith_normal_form(m);
    vt_ = f.r.transpose();
    newbasis_ = f.rinv * basis_;  // rows: generators adapted to the relations
    for (std::size_t i = 0; i < s; ++i) {
      Int d = f.diag(i);
      if (d == 1) continue;
      kept_.push_back(i);
      orders_.push_back(d);
      if (d == 0)
        ++type_.free_rank;
      else
        type_.torsion.push_back(d);
    }
  }

  const GroupType& group() const { return type_; }
  std::size_t num_gens() const { return kept_.size(); }
  const std::vector<Int>& gen_orders() const { return orders_; }

  // Ambient vector representing the i-th canonical generator.
  std::vector<Int> representative(std::size_t i) const {
    if (i >= kept_.size()) throw BadInput("generator index out of range");
    return newbasis_.row(kept_[i]);
  }

  bool contains(const std::vector<Int>& v) const {
    return lattice_coords(basis_, v).has_value();
  }

  // Coordinates of the class of v over the canonical generators.
  // Torsion coordinates are reduced into [0, order).
  std::vector<Int> class_coords(const std::vector<Int>& v) const {
    auto lam = lattice_coords(basis_, v);
    if (!lam) throw BadInput("vector is not in the subgroup");
    std::vector<Int> mu = vt_.apply(*lam);
    std::vector<Int> out(kept_.size());
    for (std::size_t i = 0; i < kept_.size(); ++i) {
      Int c = mu[kept_[i]];
      if (orders_[i] != 0) {
        c %= orders_[i];
        if (c < 0) c += orders_[i];
      }
      out[i] = c;
    }
    return out;
  }

  bool is_zero_class(const std::vector<Int>& v) const {
    for (const Int& c : class_coords(v))
      if (c != 0) return false;
    return true;
  }

 private:
  std::size_t n_;
  ZMat basis_;     // rows: basis of the subgroup lattice (ambient coords)
  ZMat newbasis_;  // rows: relation-adapted generators
  ZMat vt_;
  std::vector<std::size_t> kept_;
  std::vector<Int> orders_;  // per kept generator, 0 = infinite
  GroupType type_;
};

// A chain complex of finitely generated abelian groups concentrated in
// degrees [lo, hi].  Degree k carries (+)_i Z/ann[k][i]; d maps degree k to
// degree k-1.
class GradedGroupComplex {
 public:
  GradedGroupComplex(int lo, int hi) : lo_(lo), hi_(hi) {
    if (hi < lo) throw BadWindow("degree range is empty");
    ann_.resize(hi - lo + 1);
    d_.resize(hi - lo, ZMat(0, 0));
  }

  int lo() const { return lo_; }
  int hi() const { return hi_; }
  bool in_range(int k) const { return k >= lo_ && k <= hi_; }

  std::size_t dim(int k) const { return in_range(k) ? ann_[k - lo_].size() : 0; }

  void set_group(int k, std::vector<Int> ann) {
    need(k);
    ann_[k - lo_] = std::move(ann);
  }

  const std::vector<Int>& ann(int k) const {
    need(k);
    return ann_[k - lo_];
  }

  // d_k : C_k -> C_{k-1}, stored for lo < k <= hi
  void set_d(int k, ZMat m) {
    if (k <= lo_ || k > hi_) throw BadWindow("differential index out of range");
    d_[k - lo_ - 1] = std::move(m);
  }

  ZMat d(int k) const {
    if (k > lo_ && k <= hi_) return d_[k - lo_ - 1];
    // boundary maps in or out of the window are zero
    return ZMat(dim(k - 1), dim(k));
  }

  // v lies in the annihilator lattice of degree k (i.e. represents 0)?
  bool is_ambient_zero(int k, const std::vector<Int>& v) const {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Int& a = ann(k)[i];
      if (a == 0) {
        if (v[i] != 0) return false;
      } else if (v[i] % a != 0) {
        return false;
      }
    }
    return true;
  }

  void validate() const {
    for (int k = lo_ + 1; k <= hi_; ++k) {
      const ZMat& m = d_[k - lo_ - 1];
      if (m.rows() != dim(k - 1) || m.cols() != dim(k))
        throw BadInput("differential shape mismatch at degree " + std::to_string(k));
      // well-defined on torsion generators
      for (std::size_t j = 0; j < dim(k); ++j) {
        const Int& a = ann(k)[j];
        if (a == 0) continue;
        std::vector<Int> col = m.col(j);
        for (Int& v : col) v *= a;
        if (!is_ambient_zero(k - 1, col))
          throw BadInput("differential not well defined at degree " + std::to_string(k));
      }
      if (k > lo_ + 1) {
        ZMat dd = d_[k - lo_ - 2] * m;
        for (std::size_t j = 0; j < dim(k); ++j)
          if (!is_ambient_zero(k - 2, dd.col(j)))
            throw CompositionNonzero("d o d != 0 at degree " + std::to_string(k));
      }
    }
  }

  // Generating rows for the cycle subgroup in degree k.
  ZMat cycle_rows(int k) const {
    need(k);
    if (k == lo_) return ZMat::identity(dim(k));
    return solution_lattice_rows(d(k), ann(k - 1));
  }

  ZMat boundary_rows(int k) const {
    need(k);
    if (k >= hi_) return ZMat(0, dim(k));
    return d(k + 1).transpose();
  }

  Subquotient homology_at(int k) const {
    need(k);
    return Subquotient(dim(k), cycle_rows(k), boundary_rows(k), ann(k));
  }

  GroupType homology_type(int k) const { return homology_at(k).group(); }

 private:
  void need(int k) const {
    if (!in_range(k)) throw BadWindow("degree " + std::to_string(k) + " outside range");
  }

  int lo_, hi_;
  std::vector<std::vector<Int>> ann_;
  std::vector<ZMat> d_;
};

// Degreewise homomorphism of graded group complexes over a shared window.
class ChainMapZ {
 public:
  ChainMapZ(const GradedGroupComplex& x, const GradedGroupComplex& y)
      : lo_(std::max(x.lo(), y.lo())), hi_(std::min(x.hi(), y.hi())) {
    if (hi_ < lo_) throw BadWindow("chain map window is empty");
    f_.resize(hi_ - lo_ + 1, ZMat(0, 0));
  }

  int lo() const { return lo_; }
  int hi() const { return hi_; }

  void set(int k, ZMat m) {
    need(k);
    f_[k - lo_] = std::move(m);
  }

  ZMat at(int k) const {
    need(k);
    return f_[k - lo_];
  }

  // Commutation with d is required away from the window edges, where the
  // truncated complexes genuinely agree.
  void validate(const GradedGroupComplex& x, const GradedGroupComplex& y) const {
    for (int k = lo_; k <= hi_; ++k) {
      const ZMat& m = f_[k - lo_];
      if (m.rows() != y.dim(k) || m.cols() != x.dim(k))
        throw BadInput("chain map shape mismatch at degree " + std::to_string(k));
      for (std::size_t j = 0; j < x.dim(k); ++j) {
        const Int& a = x.ann(k)[j];
        if (a == 0) continue;
        std::vector<Int> col = m.col(j);
        for (Int& v : col) v *= a;
        if (!y.is_ambient_zero(k, col))
          throw BadInput("chain map not well defined at degree " + std::to_string(k));
      }
    }
    for (int k = lo_ + 1; k <= hi_; ++k) {
      ZMat lhs = y.d(k) * f_[k - lo_];
      ZMat rhs = f_[k - 1 - lo_] * x.d(k);
      ZMat diff = lhs - rhs;
      for (std::size_t j = 0; j < diff.cols(); ++j)
        if (!y.is_ambient_zero(k - 1, diff.col(j)))
          throw NotChainMap("square fails at degree " + std::to_string(k));
    }
  }

  // Matrix of the induced map H_k(X) -> H_k(Y) over canonical generators
  // (columns indexed by generators of H_k(X)).
  ZMat induced(int k, const GradedGroupComplex& x, const GradedGroupComplex& y) const {
    need(k);
    Subquotient hx = x.homology_at(k);
    Subquotient hy = y.homology_at(k);
    ZMat m(hy.num_gens(), hx.num_gens());
    const ZMat& fk = f_[k - lo_];
    for (std::size_t j = 0; j < hx.num_gens(); ++j) {
      std::vector<Int> img = fk.apply(hx.representative(j));
      std::vector<Int> c = hy.class_coords(img);
      for (std::size_t i = 0; i < c.size(); ++i) m.at(i, j) = c[i];
    }
    return m;
  }

  // The induced map is an isomorphism on H_k.  Requires finite homology.
  bool induced_iso(int k, const GradedGroupComplex& x, const GradedGroupComplex& y) const {
    need(k);
    Subquotient hx = x.homology_at(k);
    Subquotient hy = y.homology_at(k);
    if (!hx.group().is_finite() || !hy.group().is_finite())
      throw BadInput("isomorphism test requires finite homology");
    if (hx.group() != hy.group()) return false;
    if (hx.group().is_trivial()) return true;
    // surjectivity: images generate H_k(Y); orders then force bijectivity
    ZMat img = induced(k, x, y);
    Subquotient image(hy.num_gens(), img.transpose(), ZMat(0, hy.num_gens()),
                      hy.gen_orders());
    return image.group().order() == hy.group().order();
  }

 private:
  void need(int k) const {
    if (k < lo_ || k > hi_) throw BadWindow("degree " + std::to_string(k) + " outside range");
  }

  int lo_, hi_;
  std::vector<ZMat> f_;
};

}  // namespace stmod
