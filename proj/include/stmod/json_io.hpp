#pragma once

// JSON serialization for modules, maps, categories, diagrams, and algebra
// presentations.  Every document carries "schema": 1; readers reject other
// versions so old tools fail loudly on new files.

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "stmod/diagram_homotopy.hpp"
#include "stmod/rewrite.hpp"

namespace stmod {

using Json = nlohmann::ordered_json;

static constexpr int kSchemaVersion = 1;

namespace jsdetail {

inline const Json& field(const Json& j, const std::string& key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw BadInput(where + ": missing field \"" + key + "\"");
  return *it;
}

inline void check_schema(const Json& j, const std::string& where) {
  if (!j.is_object()) throw BadInput(where + ": expected a JSON object");
  const Json& s = field(j, "schema", where);
  if (!s.is_number_integer() || s.get<int>() != kSchemaVersion)
    throw BadInput(where + ": unsupported schema version");
}

inline std::size_t index_of(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    throw BadInput(where + ": expected a nonnegative integer");
  return j.get<std::size_t>();
}

}  // namespace jsdetail

// ---------------------------------------------------------------------------
// rings and modules

inline Json ring_to_json(const BaseRing& r) {
  Json j;
  j["kind"] = r.kind() == RingKind::Zpsq ? "Z/p^2" : "F_p[e]";
  j["p"] = r.p();
  return j;
}

inline BaseRing ring_from_json(const Json& j) {
  if (!j.is_object()) throw BadInput("ring: expected a JSON object");
  std::string kind = jsdetail::field(j, "kind", "ring").get<std::string>();
  std::uint64_t p = jsdetail::field(j, "p", "ring").get<std::uint64_t>();
  if (kind == "Z/p^2") return BaseRing(RingKind::Zpsq, p);
  if (kind == "F_p[e]") return BaseRing(RingKind::Eps, p);
  throw BadInput("ring: unknown kind \"" + kind + "\" (use \"Z/p^2\" or \"F_p[e]\")");
}

inline Json module_to_json(const FgModule& m) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["ring"] = ring_to_json(m.ring);
  j["free_rank"] = m.free_rank;
  j["vect_dim"] = m.vect_dim;
  return j;
}

inline FgModule module_from_json(const Json& j) {
  jsdetail::check_schema(j, "module");
  BaseRing ring = ring_from_json(jsdetail::field(j, "ring", "module"));
  std::size_t f = jsdetail::index_of(jsdetail::field(j, "free_rank", "module"), "module.free_rank");
  std::size_t v = jsdetail::index_of(jsdetail::field(j, "vect_dim", "module"), "module.vect_dim");
  return FgModule(ring, f, v);
}

inline Json map_to_json(const ModuleMap& f) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["source"] = module_to_json(f.src());
  j["target"] = module_to_json(f.dst());
  Json rows = Json::array();
  for (std::size_t i = 0; i < f.dst().total_gens(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < f.src().total_gens(); ++k) row.push_back(f.at(i, k));
    rows.push_back(std::move(row));
  }
  j["entries"] = std::move(rows);
  return j;
}

inline ModuleMap map_from_json(const Json& j) {
  jsdetail::check_schema(j, "map");
  FgModule src = module_from_json(jsdetail::field(j, "source", "map"));
  FgModule dst = module_from_json(jsdetail::field(j, "target", "map"));
  const Json& rows = jsdetail::field(j, "entries", "map");
  if (!rows.is_array() || rows.size() != dst.total_gens())
    throw BadInput("map: entries must have one row per target generator");
  ModuleMap f(src, dst);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Json& row = rows[i];
    if (!row.is_array() || row.size() != src.total_gens())
      throw BadInput("map: row " + std::to_string(i) + " has the wrong length");
    for (std::size_t k = 0; k < row.size(); ++k) f.set(i, k, row[k].get<long long>());
  }
  return f;
}

// ---------------------------------------------------------------------------
// categories

inline Json category_to_json(const FiniteCategory& c) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = c.kind;
  j["objects"] = c.n_objects;
  Json mor = Json::array();
  for (const Morphism& m : c.mor) {
    Json e;
    e["name"] = m.name;
    e["src"] = m.src;
    e["dst"] = m.dst;
    mor.push_back(std::move(e));
  }
  j["morphisms"] = std::move(mor);
  j["identity"] = c.identity;
  Json comp = Json::array();
  for (std::size_t g = 0; g < c.mor.size(); ++g)
    for (std::size_t f = 0; f < c.mor.size(); ++f)
      if (c.composable(g, f)) comp.push_back(Json::array({g, f, c.comp[g][f]}));
  j["composition"] = std::move(comp);
  if (c.has_degrees()) j["degree"] = c.degree;
  return j;
}

inline FiniteCategory category_from_json(const Json& j) {
  jsdetail::check_schema(j, "category");
  FiniteCategory c;
  c.kind = j.value("kind", std::string("custom"));
  c.n_objects = jsdetail::index_of(jsdetail::field(j, "objects", "category"), "category.objects");
  const Json& mor = jsdetail::field(j, "morphisms", "category");
  if (!mor.is_array()) throw BadInput("category: morphisms must be an array");
  for (std::size_t m = 0; m < mor.size(); ++m) {
    Morphism e;
    e.name = mor[m].value("name", "m" + std::to_string(m));
    e.src = jsdetail::index_of(jsdetail::field(mor[m], "src", "morphism"), "morphism.src");
    e.dst = jsdetail::index_of(jsdetail::field(mor[m], "dst", "morphism"), "morphism.dst");
    c.mor.push_back(std::move(e));
  }
  const Json& idj = jsdetail::field(j, "identity", "category");
  for (const Json& v : idj) c.identity.push_back(jsdetail::index_of(v, "category.identity"));
  c.comp.assign(c.mor.size(), std::vector<std::size_t>(c.mor.size(), FiniteCategory::npos));
  const Json& comp = jsdetail::field(j, "composition", "category");
  for (const Json& t : comp) {
    if (!t.is_array() || t.size() != 3)
      throw BadInput("category: composition entries must be triples [g, f, g*f]");
    std::size_t g = jsdetail::index_of(t[0], "composition");
    std::size_t f = jsdetail::index_of(t[1], "composition");
    std::size_t gf = jsdetail::index_of(t[2], "composition");
    if (g >= c.mor.size() || f >= c.mor.size() || gf >= c.mor.size())
      throw BadInput("category: composition triple [" + std::to_string(g) + ", " +
                     std::to_string(f) + ", " + std::to_string(gf) + "] is out of range");
    c.comp[g][f] = gf;
  }
  if (j.contains("degree")) {
    for (const Json& v : j["degree"]) c.degree.push_back(v.get<int>());
  }
  c.validate();
  return c;
}

// Catalog lookup: "arrow_3", "coequalizer", "discrete_2", "point".
inline FiniteCategory category_by_name(const std::string& name) {
  if (name == "coequalizer") return category_coequalizer();
  if (name == "point") return category_discrete(1);
  auto tail = [&](const std::string& prefix) -> long long {
    if (name.rfind(prefix, 0) != 0) return -1;
    std::string rest = name.substr(prefix.size());
    if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos) return -1;
    return std::stoll(rest);
  };
  long long n = tail("arrow_");
  if (n >= 0) return category_arrow(static_cast<std::size_t>(n));
  n = tail("discrete_");
  if (n >= 0) return category_discrete(static_cast<std::size_t>(n));
  throw BadInput("unknown category name \"" + name +
                 "\" (use arrow_<n>, discrete_<n>, point, coequalizer, or a JSON file)");
}

// ---------------------------------------------------------------------------
// diagrams

inline Json vect_diagram_to_json(const VectDiagram& d) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["p"] = d.p;
  j["category"] = category_to_json(d.cat);
  j["dims"] = d.dim;
  Json maps = Json::array();
  for (std::size_t m = 0; m < d.mat.size(); ++m) {
    if (d.cat.is_id(m)) continue;
    Json e;
    e["morphism"] = m;
    Json rows = Json::array();
    for (std::size_t r = 0; r < d.mat[m].rows(); ++r) {
      Json row = Json::array();
      for (std::size_t c = 0; c < d.mat[m].cols(); ++c) row.push_back(d.mat[m].at(r, c));
      rows.push_back(std::move(row));
    }
    e["matrix"] = std::move(rows);
    maps.push_back(std::move(e));
  }
  j["maps"] = std::move(maps);
  return j;
}

inline VectDiagram vect_diagram_from_json(const Json& j, const FiniteCategory* cat = nullptr) {
  jsdetail::check_schema(j, "diagram");
  FiniteCategory c = cat ? *cat : category_from_json(jsdetail::field(j, "category", "diagram"));
  std::uint64_t p = jsdetail::field(j, "p", "diagram").get<std::uint64_t>();
  std::vector<std::size_t> dims;
  for (const Json& v : jsdetail::field(j, "dims", "diagram"))
    dims.push_back(jsdetail::index_of(v, "diagram.dims"));
  VectDiagram d = vect_diagram(c, p, dims);
  if (j.contains("maps"))
    for (const Json& e : j["maps"]) {
      std::size_t m = jsdetail::index_of(jsdetail::field(e, "morphism", "diagram.maps"),
                                         "diagram.maps.morphism");
      if (m >= c.mor.size()) throw BadInput("diagram: morphism index out of range");
      const Json& rows = jsdetail::field(e, "matrix", "diagram.maps");
      FpMat f(p, d.dim[c.mor[m].dst], d.dim[c.mor[m].src]);
      if (!rows.is_array() || rows.size() != f.rows())
        throw BadInput("diagram: matrix for morphism " + std::to_string(m) +
                       " has the wrong number of rows");
      for (std::size_t r = 0; r < f.rows(); ++r) {
        if (!rows[r].is_array() || rows[r].size() != f.cols())
          throw BadInput("diagram: matrix row " + std::to_string(r) + " has the wrong length");
        for (std::size_t cc = 0; cc < f.cols(); ++cc) f.set(r, cc, rows[r][cc].get<long long>());
      }
      d.set_map(m, f);
    }
  d.validate();
  return d;
}

inline Json mod_diagram_to_json(const ModDiagram& d) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["ring"] = ring_to_json(d.ring());
  j["category"] = category_to_json(d.cat);
  Json obs = Json::array();
  for (const FgModule& m : d.ob) {
    Json e;
    e["free_rank"] = m.free_rank;
    e["vect_dim"] = m.vect_dim;
    obs.push_back(std::move(e));
  }
  j["objects"] = std::move(obs);
  Json maps = Json::array();
  for (std::size_t m = 0; m < d.map.size(); ++m) {
    if (d.cat.is_id(m) || d.map[m].is_zero()) continue;
    Json e;
    e["morphism"] = m;
    Json rows = Json::array();
    for (std::size_t r = 0; r < d.ob[d.cat.mor[m].dst].total_gens(); ++r) {
      Json row = Json::array();
      for (std::size_t c = 0; c < d.ob[d.cat.mor[m].src].total_gens(); ++c)
        row.push_back(d.map[m].at(r, c));
      rows.push_back(std::move(row));
    }
    e["entries"] = std::move(rows);
    maps.push_back(std::move(e));
  }
  j["maps"] = std::move(maps);
  return j;
}

inline ModDiagram mod_diagram_from_json(const Json& j) {
  jsdetail::check_schema(j, "diagram");
  BaseRing ring = ring_from_json(jsdetail::field(j, "ring", "diagram"));
  FiniteCategory c = category_from_json(jsdetail::field(j, "category", "diagram"));
  std::vector<FgModule> obs;
  for (const Json& e : jsdetail::field(j, "objects", "diagram")) {
    std::size_t f = jsdetail::index_of(jsdetail::field(e, "free_rank", "diagram.objects"),
                                       "objects.free_rank");
    std::size_t v = jsdetail::index_of(jsdetail::field(e, "vect_dim", "diagram.objects"),
                                       "objects.vect_dim");
    obs.emplace_back(ring, f, v);
  }
  ModDiagram d = mod_diagram(c, std::move(obs));
  if (j.contains("maps"))
    for (const Json& e : j["maps"]) {
      std::size_t m = jsdetail::index_of(jsdetail::field(e, "morphism", "diagram.maps"),
                                         "diagram.maps.morphism");
      if (m >= c.mor.size()) throw BadInput("diagram: morphism index out of range");
      const Json& rows = jsdetail::field(e, "entries", "diagram.maps");
      ModuleMap f(d.ob[c.mor[m].src], d.ob[c.mor[m].dst]);
      if (!rows.is_array() || rows.size() != f.dst().total_gens())
        throw BadInput("diagram: entries for morphism " + std::to_string(m) +
                       " have the wrong number of rows");
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!rows[r].is_array() || rows[r].size() != f.src().total_gens())
          throw BadInput("diagram: entry row " + std::to_string(r) + " has the wrong length");
        for (std::size_t cc = 0; cc < rows[r].size(); ++cc)
          f.set(r, cc, rows[r][cc].get<long long>());
      }
      d.set_map(m, f);
    }
  d.validate();
  return d;
}

// ---------------------------------------------------------------------------
// algebra presentations
//
// {"schema": 1, "mod": p, "generators": [{"name": "x", "degree": 1}, ...],
//  "rules": [{"lhs": ["e","e"], "rhs": []},
//            {"lhs": ["y","x"], "rhs": [{"word": [], "coeff": 1}]}],
//  "differential": {"e": [{"word": [], "coeff": 2}]}}

namespace jsdetail {

inline Word word_from_json(const Json& j, const std::map<std::string, int>& gen_index) {
  Word w;
  if (!j.is_array()) throw BadInput("presentation: a word must be an array of generator names");
  for (const Json& s : j) {
    std::string name = s.get<std::string>();
    auto it = gen_index.find(name);
    if (it == gen_index.end())
      throw BadInput("presentation: unknown generator \"" + name + "\"");
    w.push_back(it->second);
  }
  return w;
}

inline Poly poly_from_json(const Json& j, const std::map<std::string, int>& gen_index,
                           long long mod) {
  Poly p;
  if (!j.is_array()) throw BadInput("presentation: a combination must be an array of terms");
  for (const Json& t : j) {
    Word w = word_from_json(field(t, "word", "presentation term"), gen_index);
    long long c = field(t, "coeff", "presentation term").get<long long>();
    poly_add_term(p, w, Int(c), mod);
  }
  return p;
}

}  // namespace jsdetail

inline Presentation presentation_from_json(const Json& j) {
  jsdetail::check_schema(j, "presentation");
  Presentation pres;
  pres.mod = j.value("mod", 0ll);
  std::map<std::string, int> gen_index;
  for (const Json& g : jsdetail::field(j, "generators", "presentation")) {
    Generator gen;
    gen.name = jsdetail::field(g, "name", "generator").get<std::string>();
    gen.degree = jsdetail::field(g, "degree", "generator").get<int>();
    if (gen_index.count(gen.name))
      throw BadInput("presentation: duplicate generator \"" + gen.name + "\"");
    gen_index[gen.name] = static_cast<int>(pres.gens.size());
    pres.gens.push_back(std::move(gen));
  }
  if (j.contains("rules"))
    for (const Json& r : j["rules"]) {
      Rule rule;
      rule.lhs = jsdetail::word_from_json(jsdetail::field(r, "lhs", "rule"), gen_index);
      rule.rhs = jsdetail::poly_from_json(jsdetail::field(r, "rhs", "rule"), gen_index, pres.mod);
      pres.rules.push_back(std::move(rule));
    }
  if (j.contains("differential"))
    for (auto it = j["differential"].begin(); it != j["differential"].end(); ++it) {
      auto g = gen_index.find(it.key());
      if (g == gen_index.end())
        throw BadInput("presentation: differential of unknown generator \"" + it.key() + "\"");
      pres.diff[g->second] = jsdetail::poly_from_json(it.value(), gen_index, pres.mod);
    }
  return pres;
}

// ---------------------------------------------------------------------------
// files

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadInput("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw BadInput(path + ": " + e.what());
  }
  return j;
}

}  // namespace stmod
