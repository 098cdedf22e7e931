#pragma once
// Construction-time rewriting for finitely presented graded algebras.  Words
// are sequences of generator indices; rules replace an occurrence of a
// left-hand side word inside a term by an integer polynomial.  Reduction
// repeats until no term contains any left-hand side.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "stmod/errors.hpp"
#include "stmod/matrix.hpp"

namespace stmod {

using Word = std::vector<int>;

struct Generator {
  std::string name;
  int degree = 0;
};

// finitely supported integer combination of words
struct Poly {
  std::map<Word, Int> terms;
  bool is_zero() const { return terms.empty(); }
};

struct Rule {
  Word lhs;
  Poly rhs;
};

enum class ReduceOrder { Leftmost, Rightmost, Seeded };

struct Presentation {
  std::vector<Generator> gens;
  std::vector<Rule> rules;
  std::map<int, Poly> diff;  // generator index -> image, one degree lower
  long long mod = 0;         // 0 for integer coefficients, otherwise a prime
};

inline Int coeff_reduce(const Int& c, long long mod) {
  if (mod == 0) return c;
  Int r = c % mod;
  if (r < 0) r += mod;
  return r;
}

inline void poly_add_term(Poly& p, const Word& w, const Int& c, long long mod) {
  auto it = p.terms.find(w);
  Int v = coeff_reduce((it == p.terms.end() ? Int(0) : it->second) + c, mod);
  if (v == 0) {
    if (it != p.terms.end()) p.terms.erase(it);
  } else if (it != p.terms.end()) {
    it->second = v;
  } else {
    p.terms.emplace(w, v);
  }
}

inline Poly poly_add(const Poly& a, const Poly& b, long long mod) {
  Poly out;
  for (const auto& [w, c] : a.terms) poly_add_term(out, w, c, mod);
  for (const auto& [w, c] : b.terms) poly_add_term(out, w, c, mod);
  return out;
}

inline Poly poly_scale(const Poly& a, const Int& s, long long mod) {
  Poly out;
  for (const auto& [w, c] : a.terms) poly_add_term(out, w, c * s, mod);
  return out;
}

inline Poly word_poly(const Word& w, const Int& c = Int(1)) {
  Poly p;
  if (c != 0) p.terms.emplace(w, c);
  return p;
}

inline Poly poly_mul(const Poly& a, const Poly& b, long long mod) {
  Poly out;
  for (const auto& [wa, ca] : a.terms)
    for (const auto& [wb, cb] : b.terms) {
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      poly_add_term(out, w, ca * cb, mod);
    }
  return out;
}

inline int word_degree(const Presentation& pres, const Word& w) {
  int d = 0;
  for (int g : w) {
    if (g < 0 || static_cast<std::size_t>(g) >= pres.gens.size())
      throw BadInput("word uses an unknown generator");
    d += pres.gens[static_cast<std::size_t>(g)].degree;
  }
  return d;
}

inline std::string word_name(const Presentation& pres, const Word& w) {
  if (w.empty()) return "1";
  std::string out;
  std::size_t i = 0;
  while (i < w.size()) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    if (!out.empty()) out += "*";
    out += pres.gens[static_cast<std::size_t>(w[i])].name;
    if (j - i > 1) out += "^" + std::to_string(j - i);
    i = j;
  }
  return out;
}

inline bool word_matches_at(const Word& w, const Word& pat, std::size_t at) {
  if (pat.empty() || at + pat.size() > w.size()) return false;
  for (std::size_t i = 0; i < pat.size(); ++i)
    if (w[at + i] != pat[i]) return false;
  return true;
}

// all (position, rule) occurrences, ordered by position then rule index
inline std::vector<std::pair<std::size_t, std::size_t>> occurrences(
    const Word& w, const std::vector<Rule>& rules) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t at = 0; at < w.size(); ++at)
    for (std::size_t r = 0; r < rules.size(); ++r)
      if (word_matches_at(w, rules[r].lhs, at)) out.emplace_back(at, r);
  return out;
}

inline bool is_irreducible(const Word& w, const std::vector<Rule>& rules) {
  for (std::size_t at = 0; at < w.size(); ++at)
    for (const Rule& r : rules)
      if (word_matches_at(w, r.lhs, at)) return false;
  return true;
}

// Reduce until every term is irreducible.  The order picks which occurrence
// is replaced next; every terminating confluent system gives the same result
// for all three orders.
inline Poly reduce_full(const Poly& input, const Presentation& pres,
                        ReduceOrder order = ReduceOrder::Leftmost,
                        std::uint64_t seed = 0, std::size_t max_steps = 1000000) {
  std::mt19937_64 rng(seed);
  Poly q;
  for (const auto& [w, c] : input.terms) poly_add_term(q, w, c, pres.mod);

  struct Site {
    Word word;
    std::size_t pos = 0, rule = 0;
  };
  for (std::size_t step = 0; step < max_steps; ++step) {
    std::vector<Site> sites;
    bool found = false;
    for (const auto& [w, c] : q.terms) {
      auto occ = occurrences(w, pres.rules);
      if (occ.empty()) continue;
      found = true;
      if (order == ReduceOrder::Leftmost) {
        sites.push_back({w, occ.front().first, occ.front().second});
        break;
      }
      if (order == ReduceOrder::Rightmost) {
        sites.clear();
        sites.push_back({w, occ.back().first, occ.back().second});
        continue;  // keep the last term that has an occurrence
      }
      for (const auto& [pos, rule] : occ) sites.push_back({w, pos, rule});
    }
    if (!found) return q;
    const Site& s = order == ReduceOrder::Seeded
                        ? sites[std::uniform_int_distribution<std::size_t>(
                              0, sites.size() - 1)(rng)]
                        : sites.front();
    Int c = q.terms.at(s.word);
    q.terms.erase(s.word);
    const Rule& r = pres.rules[s.rule];
    Word pre(s.word.begin(), s.word.begin() + static_cast<long>(s.pos));
    Word post(s.word.begin() + static_cast<long>(s.pos + r.lhs.size()), s.word.end());
    for (const auto& [rw, rc] : r.rhs.terms) {
      Word nw = pre;
      nw.insert(nw.end(), rw.begin(), rw.end());
      nw.insert(nw.end(), post.begin(), post.end());
      poly_add_term(q, nw, c * rc, pres.mod);
    }
  }
  throw RewriteDiverged("reduction exceeded the step limit");
}

// Leibniz extension of the generator differentials to a word.
inline Poly diff_word(const Presentation& pres, const Word& w) {
  Poly out;
  int prefix_deg = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    auto it = pres.diff.find(w[j]);
    if (it != pres.diff.end() && !it->second.is_zero()) {
      Int s = ((prefix_deg % 2) + 2) % 2 == 0 ? 1 : -1;
      Word pre(w.begin(), w.begin() + static_cast<long>(j));
      Word post(w.begin() + static_cast<long>(j) + 1, w.end());
      for (const auto& [dw, dc] : it->second.terms) {
        Word nw = pre;
        nw.insert(nw.end(), dw.begin(), dw.end());
        nw.insert(nw.end(), post.begin(), post.end());
        poly_add_term(out, nw, s * dc, pres.mod);
      }
    }
    prefix_deg += pres.gens[static_cast<std::size_t>(w[j])].degree;
  }
  return out;
}

inline Poly diff_poly(const Presentation& pres, const Poly& p) {
  Poly out;
  for (const auto& [w, c] : p.terms)
    out = poly_add(out, poly_scale(diff_word(pres, w), c, pres.mod), pres.mod);
  return out;
}

inline void validate_presentation(const Presentation& pres) {
  if (pres.mod < 0 || (pres.mod != 0 && !BaseRing::is_prime(static_cast<std::uint64_t>(pres.mod))))
    throw BadInput("coefficient modulus must be 0 or a prime");
  for (const Generator& g : pres.gens)
    if (g.name.empty()) throw BadInput("generator needs a name");
  for (const Rule& r : pres.rules) {
    if (r.lhs.empty()) throw BadInput("rule left-hand side must be a nonempty word");
    int d = word_degree(pres, r.lhs);
    for (const auto& [w, c] : r.rhs.terms)
      if (word_degree(pres, w) != d) throw BadInput("rule is not degree homogeneous");
  }
  for (const auto& [g, img] : pres.diff) {
    if (g < 0 || static_cast<std::size_t>(g) >= pres.gens.size())
      throw BadInput("differential on an unknown generator");
    int d = pres.gens[static_cast<std::size_t>(g)].degree;
    for (const auto& [w, c] : img.terms)
      if (word_degree(pres, w) != d - 1)
        throw BadInput("differential must lower degree by one");
  }
}

// Irreducible words by degree.  Explores words whose every prefix stays
// within the window padded by the largest generator degree; the cap guards
// presentations whose irreducible language is infinite.
inline std::map<int, std::vector<Word>> enumerate_basis(const Presentation& pres,
                                                        int lo, int hi,
                                                        std::size_t cap = 200000) {
  if (lo > hi) throw BadWindow("basis window is empty");
  int pad = 0;
  for (const Generator& g : pres.gens) pad = std::max(pad, std::abs(g.degree));
  std::map<int, std::vector<Word>> out;
  if (lo <= 0 && 0 <= hi) out[0].push_back(Word{});
  std::vector<Word> frontier{Word{}};
  std::size_t seen = 1;
  while (!frontier.empty()) {
    std::vector<Word> next;
    for (const Word& w : frontier)
      for (int g = 0; g < static_cast<int>(pres.gens.size()); ++g) {
        Word nw = w;
        nw.push_back(g);
        if (!is_irreducible(nw, pres.rules)) continue;
        int d = word_degree(pres, nw);
        if (d < lo - pad || d > hi + pad) continue;
        if (++seen > cap) throw TooLarge("basis enumeration exceeded the word cap");
        if (d >= lo && d <= hi) out[d].push_back(nw);
        next.push_back(nw);
      }
    frontier = std::move(next);
  }
  for (auto& [d, words] : out)
    std::sort(words.begin(), words.end(), [](const Word& a, const Word& b) {
      if (a.size() != b.size()) return a.size() < b.size();
      return a < b;
    });
  return out;
}

inline std::vector<Int> express_in_basis(const Poly& p, const std::vector<Word>& basis,
                                         long long mod) {
  std::vector<Int> out(basis.size(), Int(0));
  for (const auto& [w, c] : p.terms) {
    auto it = std::find(basis.begin(), basis.end(), w);
    if (it == basis.end()) throw BadInput("reduced word is not a basis element");
    out[static_cast<std::size_t>(it - basis.begin())] = coeff_reduce(c, mod);
  }
  return out;
}

// The four presentations used throughout: indices match declaration order.

inline Presentation presentation_periodic_endo(long long p) {
  Presentation pr;
  pr.gens = {{"x", 1}, {"e", 1}, {"y", -1}};
  const int X = 0, E = 1, Y = 2;
  pr.rules.push_back({{E, E}, Poly{}});
  pr.rules.push_back({{X, Y}, word_poly({})});
  pr.rules.push_back({{Y, X}, word_poly({})});
  {
    Poly rhs = poly_add(word_poly({X, X}), word_poly({E, X}, Int(-1)), 0);
    pr.rules.push_back({{X, E}, rhs});
  }
  {
    Poly rhs = poly_add(word_poly({}), word_poly({E, Y}, Int(-1)), 0);
    pr.rules.push_back({{Y, E}, rhs});
  }
  pr.diff[E] = word_poly({}, Int(p));
  return pr;
}

inline Presentation presentation_laurent(long long p) {
  Presentation pr;
  pr.gens = {{"x", 1}, {"y", -1}};
  const int X = 0, Y = 1;
  pr.rules.push_back({{X, Y}, word_poly({})});
  pr.rules.push_back({{Y, X}, word_poly({})});
  pr.mod = p;
  return pr;
}

inline Presentation presentation_mod_p_resolution(long long p) {
  Presentation pr;
  pr.gens = {{"f", 1}};
  pr.rules.push_back({{0, 0}, Poly{}});
  pr.diff[0] = word_poly({}, Int(p));
  return pr;
}

inline Presentation presentation_truncated_endo(long long p) {
  Presentation pr;
  pr.gens = {{"x", 1}, {"e", 1}};
  const int X = 0, E = 1;
  pr.rules.push_back({{E, E}, Poly{}});
  {
    Poly rhs = poly_add(word_poly({X, X}), word_poly({E, X}, Int(-1)), 0);
    pr.rules.push_back({{X, E}, rhs});
  }
  pr.rules.push_back({{X, X, X}, Poly{}});
  pr.diff[E] = word_poly({}, Int(p));
  return pr;
}

}  // namespace stmod
