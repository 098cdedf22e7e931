#pragma once

// Finite index categories, diagrams of F_p vector spaces, and the cochain
// complex over morphism chains whose cohomology gives Ext in the diagram
// category.  Levels are unnormalized: chains include identity morphisms.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stmod/matrix.hpp"

namespace stmod {

struct Morphism {
  std::size_t src = 0, dst = 0;
  std::string name;
};

struct FiniteCategory {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::string kind = "custom";
  std::size_t n_objects = 0;
  std::vector<Morphism> mor;
  std::vector<std::size_t> identity;           // object -> identity morphism
  std::vector<std::vector<std::size_t>> comp;  // comp[g][f] = g after f
  std::vector<int> degree;                     // empty when no Reedy grading

  bool is_id(std::size_t m) const { return identity[mor[m].src] == m && mor[m].src == mor[m].dst; }
  bool composable(std::size_t g, std::size_t f) const { return mor[f].dst == mor[g].src; }

  std::size_t compose(std::size_t g, std::size_t f) const {
    if (!composable(g, f)) throw InvalidPresentation("morphisms are not composable");
    return comp[g][f];
  }

  bool has_degrees() const { return !degree.empty(); }

  std::vector<std::size_t> hom_set(std::size_t i, std::size_t j) const {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < mor.size(); ++m)
      if (mor[m].src == i && mor[m].dst == j) out.push_back(m);
    return out;
  }

  bool operator==(const FiniteCategory& o) const {
    auto ends = [](const std::vector<Morphism>& v) {
      std::vector<std::pair<std::size_t, std::size_t>> e;
      for (const Morphism& m : v) e.emplace_back(m.src, m.dst);
      return e;
    };
    return n_objects == o.n_objects && ends(mor) == ends(o.mor) && identity == o.identity &&
           comp == o.comp;
  }
  bool operator!=(const FiniteCategory& o) const { return !(*this == o); }

  void validate() const {
    if (identity.size() != n_objects)
      throw InvalidPresentation("one identity morphism per object is required");
    for (const Morphism& m : mor)
      if (m.src >= n_objects || m.dst >= n_objects)
        throw InvalidPresentation("morphism endpoint out of range");
    for (std::size_t i = 0; i < n_objects; ++i) {
      std::size_t e = identity[i];
      if (e >= mor.size() || mor[e].src != i || mor[e].dst != i)
        throw InvalidPresentation("identity of object " + std::to_string(i) + " is not an endomap");
    }
    if (comp.size() != mor.size())
      throw InvalidPresentation("composition table has the wrong shape");
    for (const auto& row : comp)
      if (row.size() != mor.size()) throw InvalidPresentation("composition table has the wrong shape");
    for (std::size_t f = 0; f < mor.size(); ++f)
      for (std::size_t g = 0; g < mor.size(); ++g) {
        std::size_t c = comp[g][f];
        if (!composable(g, f)) {
          if (c != npos)
            throw InvalidPresentation("composite defined for a non-composable pair");
          continue;
        }
        if (c >= mor.size() || mor[c].src != mor[f].src || mor[c].dst != mor[g].dst)
          throw InvalidPresentation("composite of " + std::to_string(g) + " after " +
                                    std::to_string(f) + " has wrong endpoints");
      }
    for (std::size_t f = 0; f < mor.size(); ++f) {
      if (comp[identity[mor[f].dst]][f] != f || comp[f][identity[mor[f].src]] != f)
        throw InvalidPresentation("identity is not neutral on morphism " + std::to_string(f));
    }
    for (std::size_t f = 0; f < mor.size(); ++f)
      for (std::size_t g = 0; g < mor.size(); ++g) {
        if (!composable(g, f)) continue;
        for (std::size_t h = 0; h < mor.size(); ++h) {
          if (!composable(h, g)) continue;
          if (comp[h][comp[g][f]] != comp[comp[h][g]][f])
            throw InvalidPresentation("composition is not associative");
        }
      }
    if (!degree.empty()) {
      if (degree.size() != n_objects)
        throw InvalidPresentation("degree function must cover every object");
      for (int d : degree)
        if (d < 0) throw InvalidPresentation("degrees must be non-negative");
      for (std::size_t m = 0; m < mor.size(); ++m)
        if (!is_id(m) && degree[mor[m].dst] <= degree[mor[m].src])
          throw InvalidPresentation("non-identity morphism " + std::to_string(m) +
                                    " does not raise degree");
    }
  }
};

inline FiniteCategory category_discrete(std::size_t n) {
  FiniteCategory c;
  c.kind = "discrete";
  c.n_objects = n;
  for (std::size_t i = 0; i < n; ++i) {
    c.identity.push_back(i);
    c.mor.push_back({i, i, "id" + std::to_string(i)});
  }
  c.comp.assign(n, std::vector<std::size_t>(n, FiniteCategory::npos));
  for (std::size_t i = 0; i < n; ++i) c.comp[i][i] = i;
  c.degree.assign(n, 0);
  c.validate();
  return c;
}

// Linear chain 0 -> 1 -> ... -> n with one morphism per ordered pair.
inline FiniteCategory category_arrow(int n) {
  if (n < 0) throw InvalidPresentation("chain length must be non-negative");
  FiniteCategory c;
  c.kind = "arrow";
  c.n_objects = static_cast<std::size_t>(n) + 1;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> idx;
  for (std::size_t i = 0; i < c.n_objects; ++i)
    for (std::size_t j = i; j < c.n_objects; ++j) {
      idx[{i, j}] = c.mor.size();
      c.mor.push_back({i, j,
                       i == j ? "id" + std::to_string(i)
                              : std::to_string(i) + "->" + std::to_string(j)});
    }
  for (std::size_t i = 0; i < c.n_objects; ++i) c.identity.push_back(idx[{i, i}]);
  c.comp.assign(c.mor.size(), std::vector<std::size_t>(c.mor.size(), FiniteCategory::npos));
  for (std::size_t f = 0; f < c.mor.size(); ++f)
    for (std::size_t g = 0; g < c.mor.size(); ++g)
      if (c.composable(g, f)) c.comp[g][f] = idx[{c.mor[f].src, c.mor[g].dst}];
  for (std::size_t i = 0; i < c.n_objects; ++i) c.degree.push_back(static_cast<int>(i));
  c.validate();
  return c;
}

// Three objects, two parallel arrows, their common target arrow, and the
// single composite.
inline FiniteCategory category_coequalizer() {
  FiniteCategory c;
  c.kind = "coequalizer";
  c.n_objects = 3;
  c.mor = {{0, 0, "id0"}, {1, 1, "id1"}, {2, 2, "id2"},
           {0, 1, "a"},   {0, 1, "b"},   {1, 2, "c"},   {0, 2, "c*a"}};
  c.identity = {0, 1, 2};
  const std::size_t A = 3, B = 4, C = 5, D = 6;
  c.comp.assign(7, std::vector<std::size_t>(7, FiniteCategory::npos));
  for (std::size_t m = 0; m < 7; ++m) {
    c.comp[m][c.identity[c.mor[m].src]] = m;
    c.comp[c.identity[c.mor[m].dst]][m] = m;
  }
  c.comp[C][A] = D;
  c.comp[C][B] = D;
  c.degree = {0, 1, 2};
  c.validate();
  return c;
}

// Free category on an acyclic directed graph: morphisms are the paths.
inline FiniteCategory category_free_quiver(
    std::size_t n_objects, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
    std::size_t cap = 10000) {
  for (const auto& [s, t] : edges)
    if (s >= n_objects || t >= n_objects)
      throw InvalidPresentation("edge endpoint out of range");
  std::vector<std::size_t> indeg(n_objects, 0);
  for (const auto& [s, t] : edges) ++indeg[t];
  std::vector<std::size_t> order, q;
  for (std::size_t i = 0; i < n_objects; ++i)
    if (indeg[i] == 0) q.push_back(i);
  std::vector<int> depth(n_objects, 0);
  while (!q.empty()) {
    std::size_t v = q.back();
    q.pop_back();
    order.push_back(v);
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (edges[e].first == v) {
        depth[edges[e].second] = std::max(depth[edges[e].second], depth[v] + 1);
        if (--indeg[edges[e].second] == 0) q.push_back(edges[e].second);
      }
  }
  if (order.size() != n_objects)
    throw InvalidPresentation("quiver has a directed cycle");

  FiniteCategory c;
  c.kind = "free_quiver";
  c.n_objects = n_objects;
  // paths keyed by (start, edge list); generated by length
  using Path = std::pair<std::size_t, std::vector<std::size_t>>;
  std::map<Path, std::size_t> idx;
  std::vector<Path> paths;
  auto path_end = [&](const Path& p) {
    return p.second.empty() ? p.first : edges[p.second.back()].second;
  };
  auto path_name = [&](const Path& p) {
    if (p.second.empty()) return "id" + std::to_string(p.first);
    std::string s;
    for (std::size_t e : p.second) {
      if (!s.empty()) s = "." + s;
      s = "e" + std::to_string(e) + s;
    }
    return s;
  };
  for (std::size_t i = 0; i < n_objects; ++i) {
    paths.push_back({i, {}});
    idx[paths.back()] = i;
    c.identity.push_back(i);
  }
  for (std::size_t at = 0; at < paths.size(); ++at) {
    Path p = paths[at];
    std::size_t end = path_end(p);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (edges[e].first != end) continue;
      Path q2 = p;
      q2.second.push_back(e);
      if (paths.size() >= cap) throw TooLarge("path enumeration exceeded the cap");
      idx[q2] = paths.size();
      paths.push_back(q2);
    }
  }
  for (const Path& p : paths)
    c.mor.push_back({p.first, path_end(p), path_name(p)});
  c.comp.assign(paths.size(), std::vector<std::size_t>(paths.size(), FiniteCategory::npos));
  for (std::size_t f = 0; f < paths.size(); ++f)
    for (std::size_t g = 0; g < paths.size(); ++g) {
      if (!c.composable(g, f)) continue;
      Path joined = paths[f];
      joined.second.insert(joined.second.end(), paths[g].second.begin(), paths[g].second.end());
      c.comp[g][f] = idx.at(joined);
    }
  for (std::size_t i = 0; i < n_objects; ++i) c.degree.push_back(depth[i]);
  c.validate();
  return c;
}

inline FiniteCategory category_custom(std::size_t n_objects, std::vector<Morphism> mor,
                                      std::vector<std::size_t> identity,
                                      std::vector<std::vector<std::size_t>> comp,
                                      std::vector<int> degree = {}) {
  FiniteCategory c;
  c.kind = "custom";
  c.n_objects = n_objects;
  c.mor = std::move(mor);
  c.identity = std::move(identity);
  c.comp = std::move(comp);
  c.degree = std::move(degree);
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// diagrams of F_p vector spaces

struct VectDiagram {
  FiniteCategory cat;
  std::uint64_t p = 2;
  std::vector<std::size_t> dim;
  std::vector<FpMat> mat;  // one per morphism

  bool is_zero() const {
    for (std::size_t d : dim)
      if (d) return false;
    return true;
  }

  void set_map(std::size_t m, const FpMat& f) {
    if (f.rows() != dim[cat.mor[m].dst] || f.cols() != dim[cat.mor[m].src])
      throw BadInput("structure map shape mismatch");
    mat[m] = f;
  }

  void validate() const {
    cat.validate();
    if (!BaseRing::is_prime(p)) throw BadInput("diagram modulus must be prime");
    if (dim.size() != cat.n_objects || mat.size() != cat.mor.size())
      throw BadInput("diagram data does not match the category");
    for (std::size_t m = 0; m < mat.size(); ++m)
      if (mat[m].rows() != dim[cat.mor[m].dst] || mat[m].cols() != dim[cat.mor[m].src] ||
          mat[m].p() != p)
        throw BadInput("structure map " + std::to_string(m) + " has the wrong shape");
    for (std::size_t i = 0; i < cat.n_objects; ++i) {
      const FpMat& e = mat[cat.identity[i]];
      for (std::size_t r = 0; r < e.rows(); ++r)
        for (std::size_t c = 0; c < e.cols(); ++c)
          if (e.at(r, c) != (r == c ? 1u : 0u))
            throw BadInput("identity morphism does not act as the identity");
    }
    for (std::size_t f = 0; f < mat.size(); ++f)
      for (std::size_t g = 0; g < mat.size(); ++g) {
        if (!cat.composable(g, f)) continue;
        if (!(mat[cat.comp[g][f]] == mat[g] * mat[f]))
          throw BadInput("diagram is not functorial on the pair (" + std::to_string(g) + ", " +
                         std::to_string(f) + ")");
      }
  }
};

inline VectDiagram vect_diagram(const FiniteCategory& cat, std::uint64_t p,
                                std::vector<std::size_t> dims) {
  VectDiagram d;
  d.cat = cat;
  d.p = p;
  d.dim = std::move(dims);
  if (d.dim.size() != cat.n_objects) throw BadInput("one dimension per object is required");
  for (std::size_t m = 0; m < cat.mor.size(); ++m)
    d.mat.emplace_back(p, d.dim[cat.mor[m].dst], d.dim[cat.mor[m].src]);
  for (std::size_t i = 0; i < cat.n_objects; ++i) {
    FpMat e(p, d.dim[i], d.dim[i]);
    for (std::size_t r = 0; r < d.dim[i]; ++r) e.at(r, r) = 1;
    d.mat[cat.identity[i]] = e;
  }
  return d;
}

inline VectDiagram skyscraper_diagram(const FiniteCategory& cat, std::uint64_t p,
                                      std::size_t obj, std::size_t d = 1) {
  std::vector<std::size_t> dims(cat.n_objects, 0);
  dims.at(obj) = d;
  VectDiagram out = vect_diagram(cat, p, std::move(dims));
  out.validate();
  return out;
}

// Representable diagram generated at i with fiber dimension x: the value at j
// has one block of size x per morphism i -> j, and structure maps place the
// block of f into the block of m*f.
inline VectDiagram free_diagram(const FiniteCategory& cat, std::uint64_t p, std::size_t i,
                                std::size_t x) {
  if (i >= cat.n_objects) throw BadInput("generating object out of range");
  std::vector<std::vector<std::size_t>> homs(cat.n_objects);
  std::vector<std::size_t> dims(cat.n_objects);
  for (std::size_t j = 0; j < cat.n_objects; ++j) {
    homs[j] = cat.hom_set(i, j);
    dims[j] = homs[j].size() * x;
  }
  VectDiagram d = vect_diagram(cat, p, std::move(dims));
  auto block_of = [&](std::size_t j, std::size_t m) {
    auto it = std::find(homs[j].begin(), homs[j].end(), m);
    return static_cast<std::size_t>(it - homs[j].begin());
  };
  for (std::size_t m = 0; m < cat.mor.size(); ++m) {
    std::size_t js = cat.mor[m].src, jt = cat.mor[m].dst;
    FpMat f(p, d.dim[jt], d.dim[js]);
    for (std::size_t b = 0; b < homs[js].size(); ++b) {
      std::size_t tgt = block_of(jt, cat.comp[m][homs[js][b]]);
      for (std::size_t t = 0; t < x; ++t) f.at(tgt * x + t, b * x + t) = 1;
    }
    d.mat[m] = f;
  }
  d.validate();
  return d;
}

// ---------------------------------------------------------------------------
// the cochain complex over morphism chains

struct BarChain {
  std::size_t start = 0;
  std::vector<std::size_t> steps;  // composable morphisms, identities included
};

struct BarComplex {
  std::uint64_t p = 2;
  std::vector<std::size_t> src_dim, dst_dim;              // per object
  std::vector<std::vector<BarChain>> chains;              // per level
  std::vector<std::vector<std::size_t>> offset;           // block offsets per level
  std::vector<std::size_t> level_dim;
  std::vector<FpMat> delta;                               // delta[n]: level n -> n+1
};

inline BarComplex bar_complex(const VectDiagram& a, const VectDiagram& b, int max_level,
                              std::size_t cap = 200000) {
  if (a.cat != b.cat) throw CategoryMismatch("diagrams live over different categories");
  if (a.p != b.p) throw RingMismatch("diagrams over different primes");
  if (max_level < 0) throw BadInput("chain level must be non-negative");
  const FiniteCategory& cat = a.cat;

  BarComplex bc;
  bc.p = a.p;
  bc.src_dim = a.dim;
  bc.dst_dim = b.dim;

  auto chain_end = [&](const BarChain& c) {
    return c.steps.empty() ? c.start : cat.mor[c.steps.back()].dst;
  };
  auto block_dim = [&](const BarChain& c) { return a.dim[c.start] * b.dim[chain_end(c)]; };

  for (int lvl = 0; lvl <= max_level + 1; ++lvl) {
    std::vector<BarChain> cur;
    if (lvl == 0) {
      for (std::size_t i = 0; i < cat.n_objects; ++i) cur.push_back({i, {}});
    } else {
      for (const BarChain& c : bc.chains[lvl - 1]) {
        std::size_t end = chain_end(c);
        for (std::size_t m = 0; m < cat.mor.size(); ++m) {
          if (cat.mor[m].src != end) continue;
          BarChain ext = c;
          ext.steps.push_back(m);
          cur.push_back(std::move(ext));
        }
      }
    }
    std::vector<std::size_t> off;
    std::size_t total = 0;
    for (const BarChain& c : cur) {
      off.push_back(total);
      total += block_dim(c);
      if (total > cap) throw TooLarge("chain complex dimension exceeds the cap");
    }
    bc.chains.push_back(std::move(cur));
    bc.offset.push_back(std::move(off));
    bc.level_dim.push_back(total);
  }

  std::map<std::vector<std::size_t>, std::size_t> key;
  auto chain_key = [](const BarChain& c) {
    std::vector<std::size_t> k{c.start};
    k.insert(k.end(), c.steps.begin(), c.steps.end());
    return k;
  };

  for (int n = 0; n <= max_level; ++n) {
    key.clear();
    for (std::size_t t = 0; t < bc.chains[n].size(); ++t) key[chain_key(bc.chains[n][t])] = t;
    FpMat m(bc.p, bc.level_dim[n + 1], bc.level_dim[n]);
    std::uint64_t neg = bc.p - 1;
    for (std::size_t tc = 0; tc < bc.chains[n + 1].size(); ++tc) {
      const BarChain& sigma = bc.chains[n + 1][tc];
      std::size_t send = chain_end(sigma);
      std::size_t rows = b.dim[send], cols = a.dim[sigma.start];
      std::size_t toff = bc.offset[n + 1][tc];
      for (int j = 0; j <= n + 1; ++j) {
        std::uint64_t sgn = (j % 2 == 0) ? 1 : neg;
        BarChain tau;
        if (j == 0) {
          tau.start = cat.mor[sigma.steps[0]].dst;
          tau.steps.assign(sigma.steps.begin() + 1, sigma.steps.end());
        } else if (j == n + 1) {
          tau.start = sigma.start;
          tau.steps.assign(sigma.steps.begin(), sigma.steps.end() - 1);
        } else {
          tau.start = sigma.start;
          tau.steps.assign(sigma.steps.begin(), sigma.steps.end());
          tau.steps[j - 1] = cat.comp[sigma.steps[j]][sigma.steps[j - 1]];
          tau.steps.erase(tau.steps.begin() + j);
        }
        std::size_t ts = key.at(chain_key(tau));
        std::size_t soff = bc.offset[n][ts];
        std::size_t tcols = a.dim[tau.start];
        if (j == 0) {
          const FpMat& f = a.mat[sigma.steps[0]];  // A(i0) -> A(i1)
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
              for (std::size_t c2 = 0; c2 < tcols; ++c2) {
                std::uint64_t v = f.at(c2, c);
                if (!v) continue;
                std::size_t ri = toff + r * cols + c, ci = soff + r * tcols + c2;
                m.at(ri, ci) = (m.at(ri, ci) + sgn * v) % bc.p;
              }
        } else if (j == n + 1) {
          const FpMat& g = b.mat[sigma.steps.back()];  // B(i_n) -> B(i_{n+1})
          std::size_t trows = b.dim[chain_end(tau)];
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
              for (std::size_t r2 = 0; r2 < trows; ++r2) {
                std::uint64_t v = g.at(r, r2);
                if (!v) continue;
                std::size_t ri = toff + r * cols + c, ci = soff + r2 * cols + c;
                m.at(ri, ci) = (m.at(ri, ci) + sgn * v) % bc.p;
              }
        } else {
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
              std::size_t ri = toff + r * cols + c, ci = soff + r * cols + c;
              m.at(ri, ci) = (m.at(ri, ci) + sgn) % bc.p;
            }
        }
      }
    }
    bc.delta.push_back(std::move(m));
  }

  for (std::size_t n = 0; n + 1 < bc.delta.size(); ++n) {
    FpMat sq = bc.delta[n + 1] * bc.delta[n];
    for (std::size_t r = 0; r < sq.rows(); ++r)
      for (std::size_t c = 0; c < sq.cols(); ++c)
        if (sq.at(r, c) != 0) throw Error("internal: coboundary does not square to zero");
  }
  return bc;
}

// Dimension of the space of natural transformations a -> b, solved directly
// from the commuting-square conditions.
inline std::size_t natural_transformation_dim(const VectDiagram& a, const VectDiagram& b) {
  if (a.cat != b.cat) throw CategoryMismatch("diagrams live over different categories");
  if (a.p != b.p) throw RingMismatch("diagrams over different primes");
  const FiniteCategory& cat = a.cat;
  std::vector<std::size_t> off(cat.n_objects);
  std::size_t total = 0;
  for (std::size_t i = 0; i < cat.n_objects; ++i) {
    off[i] = total;
    total += a.dim[i] * b.dim[i];
  }
  std::size_t rows = 0;
  for (std::size_t m = 0; m < cat.mor.size(); ++m)
    rows += b.dim[cat.mor[m].dst] * a.dim[cat.mor[m].src];
  FpMat sys(a.p, rows, total);
  std::size_t row0 = 0;
  for (std::size_t m = 0; m < cat.mor.size(); ++m) {
    std::size_t i = cat.mor[m].src, j = cat.mor[m].dst;
    // B(m) phi_i - phi_j A(m) = 0 entrywise
    for (std::size_t r = 0; r < b.dim[j]; ++r)
      for (std::size_t c = 0; c < a.dim[i]; ++c) {
        std::size_t ri = row0 + r * a.dim[i] + c;
        for (std::size_t r2 = 0; r2 < b.dim[i]; ++r2) {
          std::uint64_t v = b.mat[m].at(r, r2);
          if (v) {
            std::size_t ci = off[i] + r2 * a.dim[i] + c;
            sys.at(ri, ci) = (sys.at(ri, ci) + v) % a.p;
          }
        }
        for (std::size_t c2 = 0; c2 < a.dim[j]; ++c2) {
          std::uint64_t v = a.mat[m].at(c2, c);
          if (v) {
            std::size_t ci = off[j] + r * a.dim[j] + c2;
            sys.at(ri, ci) = (sys.at(ri, ci) + (a.p - v)) % a.p;
          }
        }
      }
    row0 += b.dim[j] * a.dim[i];
  }
  return total - fp_rank(sys);
}

inline std::vector<std::size_t> ext_groups(const VectDiagram& a, const VectDiagram& b,
                                           int max_n, std::size_t cap = 200000) {
  if (max_n < 0) throw BadInput("ext level must be non-negative");
  BarComplex bc = bar_complex(a, b, max_n, cap);
  std::vector<std::size_t> rank;
  for (int n = 0; n <= max_n; ++n) rank.push_back(fp_rank(bc.delta[n]));
  std::vector<std::size_t> out;
  for (int n = 0; n <= max_n; ++n) {
    std::size_t h = bc.level_dim[n] - rank[n] - (n ? rank[n - 1] : 0);
    out.push_back(h);
  }
  if (out[0] != natural_transformation_dim(a, b))
    throw Error("internal: chain-level and direct natural transformation counts disagree");
  return out;
}

// ---------------------------------------------------------------------------
// cohomological dimension certification

// Upper bounds carried by the construction of the catalog categories: no
// non-identity morphisms forces 0; free path categories give 1; the coequalizer
// shape gives 2 via its two-stage filtration by supported subdiagrams.
inline std::optional<std::size_t> catalog_cd_upper(const FiniteCategory& cat) {
  bool any = false;
  for (std::size_t m = 0; m < cat.mor.size(); ++m)
    if (!cat.is_id(m)) any = true;
  if (!any) return 0;
  if (cat.kind == "arrow" || cat.kind == "free_quiver") return 1;
  if (cat.kind == "coequalizer") return 2;
  return std::nullopt;
}

struct CdReport {
  std::size_t probed = 0;
  std::size_t lower = 0;
  std::optional<std::size_t> upper;
  std::optional<std::size_t> value;
  std::string witness;
};

inline CdReport certify_cd(const FiniteCategory& cat, std::size_t bound, std::uint64_t p = 2,
                           const std::vector<std::pair<VectDiagram, VectDiagram>>* pairs = nullptr) {
  std::vector<std::pair<VectDiagram, VectDiagram>> def;
  std::vector<std::string> labels;
  if (!pairs) {
    for (std::size_t i = 0; i < cat.n_objects; ++i)
      for (std::size_t j = 0; j < cat.n_objects; ++j) {
        def.emplace_back(skyscraper_diagram(cat, p, i), skyscraper_diagram(cat, p, j));
        labels.push_back("point diagrams at " + std::to_string(i) + " and " + std::to_string(j));
      }
    pairs = &def;
  } else {
    for (std::size_t k = 0; k < pairs->size(); ++k)
      labels.push_back("pair " + std::to_string(k));
  }

  CdReport rep;
  rep.probed = bound;
  rep.upper = catalog_cd_upper(cat);
  for (std::size_t k = 0; k < pairs->size(); ++k) {
    std::vector<std::size_t> ext =
        ext_groups((*pairs)[k].first, (*pairs)[k].second, static_cast<int>(bound));
    for (std::size_t n = 0; n <= bound; ++n)
      if (ext[n] > 0 && n >= rep.lower) {
        rep.lower = n;
        rep.witness = "Ext^" + std::to_string(n) + " nonzero for " + labels[k];
      }
  }
  if (rep.upper && rep.lower == *rep.upper) rep.value = rep.lower;
  return rep;
}

// ---------------------------------------------------------------------------
// the two-column mapping table

struct E2Table {
  std::size_t max_p = 0, max_q = 0;
  bool collapsed = false;
  std::vector<std::vector<std::size_t>> entry;  // entry[q][p]
};

// Rows are constant in q: the shift functor on the coefficient category is
// isomorphic to the identity.
inline E2Table spectral_sequence_E2(const VectDiagram& d, const VectDiagram& e,
                                    std::size_t max_p, std::size_t max_q) {
  E2Table t;
  t.max_p = max_p;
  t.max_q = max_q;
  std::optional<std::size_t> upper = catalog_cd_upper(d.cat);
  t.collapsed = upper && *upper <= 1;
  std::vector<std::size_t> row = ext_groups(d, e, static_cast<int>(max_p));
  for (std::size_t q = 0; q <= max_q; ++q) t.entry.push_back(row);
  return t;
}

// Total mapping dimension when the table is concentrated in two columns.
inline std::size_t ho_dimension_collapsed(const VectDiagram& d, const VectDiagram& e) {
  std::optional<std::size_t> upper = catalog_cd_upper(d.cat);
  if (!upper || *upper > 1)
    throw CdTooLarge("mapping dimension needs a certified two-column table");
  std::vector<std::size_t> ext = ext_groups(d, e, 1);
  return ext[0] + ext[1];
}

}  // namespace stmod
