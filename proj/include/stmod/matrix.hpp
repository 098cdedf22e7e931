#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "stmod/errors.hpp"
#include "stmod/rings.hpp"

namespace stmod {

using Int = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Integer matrices.  Column convention throughout: an (m x n) matrix maps
// Z^n -> Z^m acting on column vectors.
// ---------------------------------------------------------------------------

class ZMat {
 public:
  ZMat() : rows_(0), cols_(0) {}
  ZMat(std::size_t r, std::size_t c) : rows_(r), cols_(c), a_(r * c) {}

  static ZMat identity(std::size_t n) {
    ZMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Int& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Int& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  bool is_zero() const {
    for (const Int& v : a_)
      if (v != 0) return false;
    return true;
  }

  bool operator==(const ZMat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

  ZMat transpose() const {
    ZMat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  friend ZMat operator*(const ZMat& a, const ZMat& b) {
    if (a.cols_ != b.rows_) throw BadInput("matrix product shape mismatch");
    ZMat c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Int& aik = a.at(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c.at(i, j) += aik * b.at(k, j);
      }
    return c;
  }

  friend ZMat operator+(const ZMat& a, const ZMat& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw BadInput("matrix sum shape mismatch");
    ZMat c(a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.a_.size(); ++i) c.a_[i] = a.a_[i] + b.a_[i];
    return c;
  }

  friend ZMat operator-(const ZMat& a, const ZMat& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw BadInput("matrix diff shape mismatch");
    ZMat c(a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.a_.size(); ++i) c.a_[i] = a.a_[i] - b.a_[i];
    return c;
  }

  ZMat scaled(const Int& c) const {
    ZMat r = *this;
    for (Int& v : r.a_) v *= c;
    return r;
  }

  std::vector<Int> apply(const std::vector<Int>& x) const {
    if (x.size() != cols_) throw BadInput("matrix apply shape mismatch");
    std::vector<Int> y(rows_, Int(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (at(i, j) != 0) y[i] += at(i, j) * x[j];
    return y;
  }

  std::vector<Int> col(std::size_t j) const {
    std::vector<Int> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = at(i, j);
    return v;
  }

  std::vector<Int> row(std::size_t i) const {
    std::vector<Int> v(cols_);
    for (std::size_t j = 0; j < cols_; ++j) v[j] = at(i, j);
    return v;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<Int> a_;
};

inline ZMat zmat_from(std::initializer_list<std::initializer_list<long long>> rows) {
  std::size_t r = rows.size(), c = r ? rows.begin()->size() : 0;
  ZMat m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw BadInput("ragged matrix literal");
    std::size_t j = 0;
    for (long long v : row) m.at(i, j++) = v;
    ++i;
  }
  return m;
}

// Smith normal form s = l * a * r with l, r unimodular.  Diagonal entries are
// nonnegative and each divides the next.  Pivot choice is canonical (smallest
// absolute value, then smallest row, then smallest column), so the output is
// deterministic.
struct Snf {
  ZMat s, l, linv, r, rinv;
  std::size_t rank = 0;
  std::vector<Int> invariants;  // the nonzero diagonal entries
  Int diag(std::size_t i) const {
    return i < std::min(s.rows(), s.cols()) ? s.at(i, i) : Int(0);
  }
};

namespace detail {

struct OpMats {
  ZMat fwd, inv;  // fwd * inv = identity, maintained together
};

inline void row_swap(ZMat& m, std::size_t i, std::size_t j) {
  for (std::size_t k = 0; k < m.cols(); ++k) std::swap(m.at(i, k), m.at(j, k));
}
inline void col_swap(ZMat& m, std::size_t i, std::size_t j) {
  for (std::size_t k = 0; k < m.rows(); ++k) std::swap(m.at(k, i), m.at(k, j));
}
inline void row_axpy(ZMat& m, std::size_t i, std::size_t j, const Int& c) {
  // row_i += c * row_j
  for (std::size_t k = 0; k < m.cols(); ++k) m.at(i, k) += c * m.at(j, k);
}
inline void col_axpy(ZMat& m, std::size_t i, std::size_t j, const Int& c) {
  // col_i += c * col_j
  for (std::size_t k = 0; k < m.rows(); ++k) m.at(k, i) += c * m.at(k, j);
}
inline void row_negate(ZMat& m, std::size_t i) {
  for (std::size_t k = 0; k < m.cols(); ++k) m.at(i, k) = -m.at(i, k);
}
inline void col_negate(ZMat& m, std::size_t i) {
  for (std::size_t k = 0; k < m.rows(); ++k) m.at(k, i) = -m.at(k, i);
}

}  // namespace detail

inline Snf smith_normal_form(const ZMat& a) {
  using namespace detail;
  Snf f;
  f.s = a;
  std::size_t m = a.rows(), n = a.cols();
  f.l = ZMat::identity(m);
  f.linv = ZMat::identity(m);
  f.r = ZMat::identity(n);
  f.rinv = ZMat::identity(n);

  auto rswap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    row_swap(f.s, i, j); row_swap(f.l, i, j); col_swap(f.linv, i, j);
  };
  auto cswap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    col_swap(f.s, i, j); col_swap(f.r, i, j); row_swap(f.rinv, i, j);
  };
  auto raxpy = [&](std::size_t i, std::size_t j, const Int& c) {
    // s_row_i += c * s_row_j
    row_axpy(f.s, i, j, c); row_axpy(f.l, i, j, c); col_axpy(f.linv, j, i, -c);
  };
  auto caxpy = [&](std::size_t i, std::size_t j, const Int& c) {
    // s_col_i += c * s_col_j
    col_axpy(f.s, i, j, c); col_axpy(f.r, i, j, c); row_axpy(f.rinv, j, i, -c);
  };
  auto rneg = [&](std::size_t i) {
    row_negate(f.s, i); row_negate(f.l, i); col_negate(f.linv, i);
  };

  std::size_t t = 0;
  while (t < std::min(m, n)) {
    // canonical pivot: min |value|, then min row, then min col
    std::size_t pi = m, pj = n;
    Int best = 0;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j) {
        const Int& v = f.s.at(i, j);
        if (v == 0) continue;
        Int av = abs(v);
        if (pi == m || av < best) { best = av; pi = i; pj = j; }
      }
    if (pi == m) break;  // submatrix is zero
    rswap(t, pi);
    cswap(t, pj);

    bool clean = false;
    while (!clean) {
      clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (f.s.at(i, t) == 0) continue;
        Int q = f.s.at(i, t) / f.s.at(t, t);
        if (q != 0) raxpy(i, t, -q);
        if (f.s.at(i, t) != 0) { rswap(t, i); clean = false; }
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (f.s.at(t, j) == 0) continue;
        Int q = f.s.at(t, j) / f.s.at(t, t);
        if (q != 0) caxpy(j, t, -q);
        if (f.s.at(t, j) != 0) { cswap(t, j); clean = false; }
      }
      if (!clean) continue;
      // divisibility fixup: pivot must divide every remaining entry
      for (std::size_t i = t + 1; i < m && clean; ++i)
        for (std::size_t j = t + 1; j < n && clean; ++j)
          if (f.s.at(i, j) % f.s.at(t, t) != 0) {
            raxpy(t, i, 1);
            clean = false;
          }
    }
    if (f.s.at(t, t) < 0) rneg(t);
    ++t;
  }
  for (std::size_t i = 0; i < std::min(m, n); ++i)
    if (f.s.at(i, i) != 0) {
      f.invariants.push_back(f.s.at(i, i));
      f.rank = i + 1;
    }
  return f;
}

// Particular integer solution of a * x = b, if one exists.
inline std::optional<std::vector<Int>> z_solve(const ZMat& a, const std::vector<Int>& b) {
  if (b.size() != a.rows()) throw BadInput("z_solve shape mismatch");
  Snf f = smith_normal_form(a);
  std::vector<Int> lb = f.l.apply(b);
  std::vector<Int> y(a.cols(), Int(0));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Int d = f.diag(i);
    if (d == 0) {
      if (lb[i] != 0) return std::nullopt;
    } else {
      if (lb[i] % d != 0) return std::nullopt;
      if (i < a.cols()) y[i] = lb[i] / d;
    }
  }
  return f.r.apply(y);
}

// Basis of the integer kernel lattice, as matrix columns.
inline ZMat z_kernel(const ZMat& a) {
  Snf f = smith_normal_form(a);
  std::size_t n = a.cols();
  std::size_t k = n - f.rank;
  ZMat ker(n, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i) ker.at(i, j) = f.r.at(i, f.rank + j);
  return ker;
}

// Row-style Hermite basis of the lattice spanned by the given rows.
// Pivots are positive, entries above a pivot are reduced into [0, pivot).
inline ZMat lattice_basis(const ZMat& gens) {
  ZMat m = gens;
  std::size_t rows = m.rows(), cols = m.cols();
  std::size_t r = 0;
  std::vector<std::size_t> pivot_cols;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    // euclid within column c on rows >= r
    while (true) {
      std::size_t pi = rows;
      Int best = 0;
      for (std::size_t i = r; i < rows; ++i) {
        if (m.at(i, c) == 0) continue;
        Int av = abs(m.at(i, c));
        if (pi == rows || av < best) { best = av; pi = i; }
      }
      if (pi == rows) break;
      detail::row_swap(m, r, pi);
      bool again = false;
      for (std::size_t i = r + 1; i < rows; ++i) {
        if (m.at(i, c) == 0) continue;
        Int q = m.at(i, c) / m.at(r, c);
        detail::row_axpy(m, i, r, -q);
        if (m.at(i, c) != 0) again = true;
      }
      if (!again) break;
    }
    if (r < rows && m.at(r, c) != 0) {
      if (m.at(r, c) < 0) detail::row_negate(m, r);
      pivot_cols.push_back(c);
      ++r;
    }
  }
  // reduce above pivots
  for (std::size_t k = 0; k < pivot_cols.size(); ++k) {
    std::size_t c = pivot_cols[k];
    const Int& piv = m.at(k, c);
    for (std::size_t i = 0; i < k; ++i) {
      Int q = m.at(i, c) / piv;
      if (m.at(i, c) - q * piv < 0) q -= 1;  // floor division
      if (q != 0) detail::row_axpy(m, i, k, -q);
    }
  }
  ZMat basis(r, cols);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < cols; ++j) basis.at(i, j) = m.at(i, j);
  return basis;
}

namespace detail {

inline Int mod_inverse(Int a, const Int& m) {
  Int r0 = m, r1 = a % m;
  if (r1 < 0) r1 += m;
  Int t0 = 0, t1 = 1;
  while (r1 != 0) {
    Int q = r0 / r1;
    r0 -= q * r1;
    std::swap(r0, r1);
    t0 -= q * t1;
    std::swap(t0, t1);
  }
  if (r0 != 1) throw BadInput("element is not invertible");
  t0 %= m;
  if (t0 < 0) t0 += m;
  return t0;
}

// m = q^e with q prime, or nullopt
inline std::optional<Int> prime_power_base(const Int& m) {
  if (m < 2) return std::nullopt;
  Int q = 0;
  for (Int d = 2; d * d <= m; ++d)
    if (m % d == 0) { q = d; break; }
  if (q == 0) q = m;
  Int rest = m;
  while (rest % q == 0) rest /= q;
  if (rest != 1) return std::nullopt;
  return q;
}

// Diagonalization s = l * a * r over Z/M for a prime power M = q^e.  Every
// intermediate entry is reduced into [0, M), so entry sizes never grow; the
// pivot of least q-valuation divides the whole remaining block, which is why
// one clearing pass per pivot suffices.  Only l and r are tracked.
struct LocalSnf {
  ZMat s, l, r;
};

inline LocalSnf local_snf_mod(const ZMat& a, const Int& M, const Int& q) {
  std::size_t m = a.rows(), n = a.cols();
  LocalSnf f;
  f.s = a;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Int& v = f.s.at(i, j);
      v %= M;
      if (v < 0) v += M;
    }
  f.l = ZMat::identity(m);
  f.r = ZMat::identity(n);

  auto val = [&](Int x) {
    std::size_t v = 0;
    while (x % q == 0) { x /= q; ++v; }
    return v;
  };

  for (std::size_t t = 0; t < std::min(m, n); ++t) {
    std::size_t pi = m, pj = n, pv = 0;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j) {
        if (f.s.at(i, j) == 0) continue;
        std::size_t v = val(f.s.at(i, j));
        if (pi == m || v < pv) { pv = v; pi = i; pj = j; }
      }
    if (pi == m) break;
    if (pi != t) { row_swap(f.s, t, pi); row_swap(f.l, t, pi); }
    if (pj != t) { col_swap(f.s, t, pj); col_swap(f.r, t, pj); }

    Int qv = 1;
    for (std::size_t k = 0; k < pv; ++k) qv *= q;
    Int uinv = mod_inverse(f.s.at(t, t) / qv, M);
    for (std::size_t k = 0; k < n; ++k) f.s.at(t, k) = f.s.at(t, k) * uinv % M;
    for (std::size_t k = 0; k < m; ++k) f.l.at(t, k) = f.l.at(t, k) * uinv % M;

    for (std::size_t i = t + 1; i < m; ++i) {
      if (f.s.at(i, t) == 0) continue;
      Int c = f.s.at(i, t) / qv;
      for (std::size_t k = 0; k < n; ++k) {
        Int& v = f.s.at(i, k);
        v = (v - c * f.s.at(t, k)) % M;
        if (v < 0) v += M;
      }
      for (std::size_t k = 0; k < m; ++k) {
        Int& v = f.l.at(i, k);
        v = (v - c * f.l.at(t, k)) % M;
        if (v < 0) v += M;
      }
    }
    for (std::size_t j = t + 1; j < n; ++j) {
      if (f.s.at(t, j) == 0) continue;
      Int c = f.s.at(t, j) / qv;
      for (std::size_t k = 0; k < m; ++k) {
        Int& v = f.s.at(k, j);
        v = (v - c * f.s.at(k, t)) % M;
        if (v < 0) v += M;
      }
      for (std::size_t k = 0; k < n; ++k) {
        Int& v = f.r.at(k, j);
        v = (v - c * f.r.at(k, t)) % M;
        if (v < 0) v += M;
      }
    }
  }
  return f;
}

// Shared setup for the modular solvers: all annihilators must be nonzero with
// a prime power lcm, and each row gets scaled by lcm / ann so every equation
// is taken mod the same modulus.
struct ModSystem {
  bool usable = false;
  Int M = 1, q = 0;
  ZMat a;
  std::vector<Int> b;
};

inline ModSystem modular_system(const ZMat& a, const std::vector<Int>* b,
                                const std::vector<Int>& target_ann) {
  ModSystem out;
  Int M = 1;
  for (const Int& t : target_ann) {
    if (t == 0) return out;
    M = M / gcd(M, t) * t;
  }
  if (M == 1) return out;
  auto q = prime_power_base(M);
  if (!q) return out;
  out.usable = true;
  out.M = M;
  out.q = *q;
  out.a = a;
  if (b) out.b = *b;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Int scale = M / target_ann[i];
    if (scale == 1) continue;
    for (std::size_t j = 0; j < a.cols(); ++j) out.a.at(i, j) *= scale;
    if (b) out.b[i] *= scale;
  }
  return out;
}

}  // namespace detail

// Rows generating the lattice {x : a*x lies in the annihilator lattice of the
// target}, i.e. solutions of a*x = 0 modulo per-coordinate annihilators
// (entry 0 meaning an honest Z coordinate).
inline ZMat solution_lattice_rows(const ZMat& a, const std::vector<Int>& target_ann) {
  if (target_ann.size() != a.rows()) throw BadInput("annihilator vector length mismatch");
  std::size_t n = a.cols();
  detail::ModSystem ms = detail::modular_system(a, nullptr, target_ann);
  if (ms.usable) {
    detail::LocalSnf f = detail::local_snf_mod(ms.a, ms.M, ms.q);
    std::size_t m = a.rows();
    ZMat gens(2 * n, n);
    for (std::size_t t = 0; t < n; ++t) {
      Int d = t < std::min(m, n) ? f.s.at(t, t) : Int(0);
      Int step = d == 0 ? Int(1) : ms.M / d;
      for (std::size_t i = 0; i < n; ++i) gens.at(t, i) = f.r.at(i, t) * step % ms.M;
    }
    for (std::size_t t = 0; t < n; ++t) gens.at(n + t, t) = ms.M;
    return lattice_basis(gens);
  }
  std::vector<std::size_t> tor;
  for (std::size_t i = 0; i < a.rows(); ++i)
    if (target_ann[i] != 0) tor.push_back(i);
  ZMat aug(a.rows(), n + tor.size());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = a.at(i, j);
  for (std::size_t j = 0; j < tor.size(); ++j) aug.at(tor[j], n + j) = target_ann[tor[j]];
  ZMat ker = z_kernel(aug);
  ZMat rows(ker.cols(), n);
  for (std::size_t j = 0; j < ker.cols(); ++j)
    for (std::size_t i = 0; i < n; ++i) rows.at(j, i) = ker.at(i, j);
  return rows;
}

// Particular solution of a*x = b modulo per-coordinate annihilators.
inline std::optional<std::vector<Int>> z_solve_mod(const ZMat& a, const std::vector<Int>& b,
                                                   const std::vector<Int>& target_ann) {
  if (target_ann.size() != a.rows()) throw BadInput("annihilator vector length mismatch");
  std::size_t n = a.cols();
  detail::ModSystem ms = detail::modular_system(a, &b, target_ann);
  if (ms.usable) {
    detail::LocalSnf f = detail::local_snf_mod(ms.a, ms.M, ms.q);
    std::vector<Int> lb = f.l.apply(ms.b);
    for (Int& v : lb) {
      v %= ms.M;
      if (v < 0) v += ms.M;
    }
    std::vector<Int> y(n, Int(0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
      Int d = i < std::min(a.rows(), n) ? f.s.at(i, i) : Int(0);
      if (d == 0) {
        if (lb[i] != 0) return std::nullopt;
      } else {
        if (lb[i] % d != 0) return std::nullopt;
        y[i] = lb[i] / d;
      }
    }
    std::vector<Int> x = f.r.apply(y);
    for (Int& v : x) {
      v %= ms.M;
      if (v < 0) v += ms.M;
    }
    return x;
  }
  std::vector<std::size_t> tor;
  for (std::size_t i = 0; i < a.rows(); ++i)
    if (target_ann[i] != 0) tor.push_back(i);
  ZMat aug(a.rows(), n + tor.size());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = a.at(i, j);
  for (std::size_t j = 0; j < tor.size(); ++j) aug.at(tor[j], n + j) = target_ann[tor[j]];
  auto sol = z_solve(aug, b);
  if (!sol) return std::nullopt;
  sol->resize(n);
  return sol;
}

// Coordinates of v over the rows of a lattice basis, if v lies in the lattice.
inline std::optional<std::vector<Int>> lattice_coords(const ZMat& basis_rows,
                                                      const std::vector<Int>& v) {
  return z_solve(basis_rows.transpose(), v);
}

// ---------------------------------------------------------------------------
// Matrices over F_p.
// ---------------------------------------------------------------------------

class FpMat {
 public:
  FpMat() : p_(2), rows_(0), cols_(0) {}
  FpMat(std::uint64_t p, std::size_t r, std::size_t c) : p_(p), rows_(r), cols_(c), a_(r * c) {}

  std::uint64_t p() const { return p_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  std::uint64_t at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  void set(std::size_t i, std::size_t j, long long v) {
    long long m = v % static_cast<long long>(p_);
    if (m < 0) m += static_cast<long long>(p_);
    at(i, j) = static_cast<std::uint64_t>(m);
  }

  friend FpMat operator*(const FpMat& a, const FpMat& b) {
    if (a.p_ != b.p_) throw RingMismatch("F_p matrix product over different primes");
    if (a.cols_ != b.rows_) throw BadInput("F_p matrix product shape mismatch");
    FpMat c(a.p_, a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        std::uint64_t aik = a.at(i, k);
        if (!aik) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          c.at(i, j) = (c.at(i, j) + aik * b.at(k, j)) % a.p_;
      }
    return c;
  }

  bool operator==(const FpMat& o) const {
    return p_ == o.p_ && rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

 private:
  std::uint64_t p_;
  std::size_t rows_, cols_;
  std::vector<std::uint64_t> a_;
};

struct Rref {
  FpMat m;
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;
};

inline std::uint64_t fp_inv(std::uint64_t a, std::uint64_t p) {
  long long t = 0, nt = 1, r = static_cast<long long>(p), nr = static_cast<long long>(a % p);
  while (nr != 0) {
    long long q = r / nr;
    long long tmp = t - q * nt; t = nt; nt = tmp;
    tmp = r - q * nr; r = nr; nr = tmp;
  }
  if (r != 1) throw BadInput("not invertible mod p");
  if (t < 0) t += static_cast<long long>(p);
  return static_cast<std::uint64_t>(t);
}

inline Rref rref_fp(const FpMat& in) {
  Rref out;
  out.m = in;
  FpMat& m = out.m;
  std::uint64_t p = m.p();
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t pi = m.rows();
    for (std::size_t i = r; i < m.rows(); ++i)
      if (m.at(i, c) != 0) { pi = i; break; }
    if (pi == m.rows()) continue;
    if (pi != r)
      for (std::size_t k = 0; k < m.cols(); ++k) std::swap(m.at(r, k), m.at(pi, k));
    std::uint64_t s = fp_inv(m.at(r, c), p);
    for (std::size_t k = c; k < m.cols(); ++k) m.at(r, k) = m.at(r, k) * s % p;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m.at(i, c) == 0) continue;
      std::uint64_t f = m.at(i, c);
      for (std::size_t k = c; k < m.cols(); ++k)
        m.at(i, k) = (m.at(i, k) + (p - f) * m.at(r, k)) % p;
    }
    out.pivots.push_back(c);
    ++r;
  }
  out.rank = r;
  return out;
}

inline std::size_t fp_rank(const FpMat& m) { return rref_fp(m).rank; }

// Kernel basis as matrix columns.
inline FpMat fp_kernel_basis(const FpMat& m) {
  Rref rr = rref_fp(m);
  std::uint64_t p = m.p();
  std::vector<bool> is_pivot(m.cols(), false);
  for (std::size_t c : rr.pivots) is_pivot[c] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  FpMat ker(p, m.cols(), free_cols.size());
  for (std::size_t j = 0; j < free_cols.size(); ++j) {
    std::size_t fc = free_cols[j];
    ker.at(fc, j) = 1;
    for (std::size_t i = 0; i < rr.rank; ++i) {
      std::uint64_t v = rr.m.at(i, fc);
      if (v) ker.at(rr.pivots[i], j) = p - v;
    }
  }
  return ker;
}

inline std::optional<std::vector<std::uint64_t>> fp_solve(const FpMat& a,
                                                          const std::vector<std::uint64_t>& b) {
  if (b.size() != a.rows()) throw BadInput("fp_solve shape mismatch");
  std::uint64_t p = a.p();
  FpMat aug(p, a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, a.cols()) = b[i] % p;
  }
  Rref rr = rref_fp(aug);
  std::vector<std::uint64_t> x(a.cols(), 0);
  for (std::size_t i = 0; i < rr.rank; ++i) {
    if (rr.pivots[i] == a.cols()) return std::nullopt;  // inconsistent
    x[rr.pivots[i]] = rr.m.at(i, a.cols());
  }
  return x;
}

// ---------------------------------------------------------------------------
// Matrices over a chain ring (Z/p^2 or F_p[e]/(e^2)).
// ---------------------------------------------------------------------------

class RMat {
 public:
  RMat(BaseRing ring, std::size_t r, std::size_t c)
      : ring_(ring), rows_(r), cols_(c), a_(r * c, 0) {}

  static RMat identity(BaseRing ring, std::size_t n) {
    RMat m(ring, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  const BaseRing& ring() const { return ring_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  std::uint64_t at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  void set_from_int(std::size_t i, std::size_t j, long long v) { at(i, j) = ring_.from_int(v); }

  bool is_zero() const {
    for (std::uint64_t v : a_)
      if (v) return false;
    return true;
  }

  bool operator==(const RMat& o) const {
    return ring_ == o.ring_ && rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

  friend RMat operator*(const RMat& a, const RMat& b) {
    if (a.ring_ != b.ring_) throw RingMismatch("matrix product over different rings");
    if (a.cols_ != b.rows_) throw BadInput("matrix product shape mismatch");
    RMat c(a.ring_, a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        std::uint64_t aik = a.at(i, k);
        if (!aik) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          c.at(i, j) = a.ring_.add(c.at(i, j), a.ring_.mul(aik, b.at(k, j)));
      }
    return c;
  }

  friend RMat operator+(const RMat& a, const RMat& b) {
    if (a.ring_ != b.ring_ || a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw BadInput("matrix sum mismatch");
    RMat c(a.ring_, a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.a_.size(); ++i) c.a_[i] = a.ring_.add(a.a_[i], b.a_[i]);
    return c;
  }

  friend RMat operator-(const RMat& a, const RMat& b) {
    if (a.ring_ != b.ring_ || a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw BadInput("matrix diff mismatch");
    RMat c(a.ring_, a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.a_.size(); ++i) c.a_[i] = a.ring_.sub(a.a_[i], b.a_[i]);
    return c;
  }

  RMat scaled(std::uint64_t c) const {
    RMat r = *this;
    for (std::uint64_t& v : r.a_) v = ring_.mul(v, c);
    return r;
  }

  std::vector<std::uint64_t> apply(const std::vector<std::uint64_t>& x) const {
    if (x.size() != cols_) throw BadInput("matrix apply shape mismatch");
    std::vector<std::uint64_t> y(rows_, 0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        y[i] = ring_.add(y[i], ring_.mul(at(i, j), x[j]));
    return y;
  }

 private:
  BaseRing ring_;
  std::size_t rows_, cols_;
  std::vector<std::uint64_t> a_;
};

// Over either chain ring every matrix is equivalent to
// diag(1,...,1, u,...,u, 0,...,0) with invertible u*a*v = d.
// n_unit counts the 1 blocks, n_rad the u blocks.
struct ChainDiag {
  RMat d, u, uinv, v, vinv;
  std::size_t n_unit = 0, n_rad = 0;
};

inline ChainDiag chain_diagonalize(const RMat& a) {
  const BaseRing& R = a.ring();
  std::size_t m = a.rows(), n = a.cols();
  ChainDiag f{a, RMat::identity(R, m), RMat::identity(R, m), RMat::identity(R, n),
              RMat::identity(R, n)};
  RMat& s = f.d;

  auto rswap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < n; ++k) std::swap(s.at(i, k), s.at(j, k));
    for (std::size_t k = 0; k < m; ++k) std::swap(f.u.at(i, k), f.u.at(j, k));
    for (std::size_t k = 0; k < m; ++k) std::swap(f.uinv.at(k, i), f.uinv.at(k, j));
  };
  auto cswap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < m; ++k) std::swap(s.at(k, i), s.at(k, j));
    for (std::size_t k = 0; k < n; ++k) std::swap(f.v.at(k, i), f.v.at(k, j));
    for (std::size_t k = 0; k < n; ++k) std::swap(f.vinv.at(i, k), f.vinv.at(j, k));
  };
  auto rscale = [&](std::size_t i, std::uint64_t c) {
    std::uint64_t ci = R.inv(c);
    for (std::size_t k = 0; k < n; ++k) s.at(i, k) = R.mul(c, s.at(i, k));
    for (std::size_t k = 0; k < m; ++k) f.u.at(i, k) = R.mul(c, f.u.at(i, k));
    for (std::size_t k = 0; k < m; ++k) f.uinv.at(k, i) = R.mul(f.uinv.at(k, i), ci);
  };
  auto raxpy = [&](std::size_t i, std::size_t j, std::uint64_t c) {
    // row_i += c * row_j
    for (std::size_t k = 0; k < n; ++k) s.at(i, k) = R.add(s.at(i, k), R.mul(c, s.at(j, k)));
    for (std::size_t k = 0; k < m; ++k) f.u.at(i, k) = R.add(f.u.at(i, k), R.mul(c, f.u.at(j, k)));
    std::uint64_t nc = R.neg(c);
    for (std::size_t k = 0; k < m; ++k)
      f.uinv.at(k, j) = R.add(f.uinv.at(k, j), R.mul(nc, f.uinv.at(k, i)));
  };
  auto caxpy = [&](std::size_t i, std::size_t j, std::uint64_t c) {
    // col_i += c * col_j
    for (std::size_t k = 0; k < m; ++k) s.at(k, i) = R.add(s.at(k, i), R.mul(c, s.at(k, j)));
    for (std::size_t k = 0; k < n; ++k) f.v.at(k, i) = R.add(f.v.at(k, i), R.mul(c, f.v.at(k, j)));
    std::uint64_t nc = R.neg(c);
    for (std::size_t k = 0; k < n; ++k)
      f.vinv.at(j, k) = R.add(f.vinv.at(j, k), R.mul(nc, f.vinv.at(i, k)));
  };

  std::size_t t = 0;
  // phase 1: unit pivots
  while (t < std::min(m, n)) {
    std::size_t pi = m, pj = n;
    for (std::size_t i = t; i < m && pi == m; ++i)
      for (std::size_t j = t; j < n; ++j)
        if (R.is_unit(s.at(i, j))) { pi = i; pj = j; break; }
    if (pi == m) break;
    rswap(t, pi);
    cswap(t, pj);
    rscale(t, R.inv(s.at(t, t)));
    for (std::size_t i = t + 1; i < m; ++i)
      if (s.at(i, t)) raxpy(i, t, R.neg(s.at(i, t)));
    for (std::size_t j = t + 1; j < n; ++j)
      if (s.at(t, j)) caxpy(j, t, R.neg(s.at(t, j)));
    ++t;
  }
  f.n_unit = t;
  // phase 2: all remaining entries are radical multiples
  while (t < std::min(m, n)) {
    std::size_t pi = m, pj = n;
    for (std::size_t i = t; i < m && pi == m; ++i)
      for (std::size_t j = t; j < n; ++j)
        if (s.at(i, j)) { pi = i; pj = j; break; }
    if (pi == m) break;
    rswap(t, pi);
    cswap(t, pj);
    // pivot = u*h with h a unit mod p; rescale by a lift of h^-1 so pivot = u
    std::uint64_t h = R.radical_quotient(s.at(t, t));
    rscale(t, fp_inv(h, R.p()));
    // entries u*c clear against pivot u via plain scalar c
    for (std::size_t i = t + 1; i < m; ++i)
      if (s.at(i, t)) raxpy(i, t, R.neg(R.radical_quotient(s.at(i, t))));
    for (std::size_t j = t + 1; j < n; ++j)
      if (s.at(t, j)) caxpy(j, t, R.neg(R.radical_quotient(s.at(t, j))));
    ++t;
  }
  f.n_rad = t - f.n_unit;
  return f;
}

// Particular solution of a * x = b over the chain ring, if one exists.
inline std::optional<std::vector<std::uint64_t>> chain_solve(const RMat& a,
                                                             const std::vector<std::uint64_t>& b) {
  if (b.size() != a.rows()) throw BadInput("chain_solve shape mismatch");
  const BaseRing& R = a.ring();
  ChainDiag f = chain_diagonalize(a);
  std::vector<std::uint64_t> ub = f.u.apply(b);
  std::vector<std::uint64_t> y(a.cols(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (i < f.n_unit) {
      y[i] = ub[i];
    } else if (i < f.n_unit + f.n_rad) {
      if (!R.in_radical(ub[i])) return std::nullopt;
      y[i] = R.radical_quotient(ub[i]);
    } else if (ub[i] != 0) {
      return std::nullopt;
    }
  }
  return f.v.apply(y);
}

}  // namespace stmod
