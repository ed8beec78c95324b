#include "soatk/fincat.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace soatk::fincat {

bool FiniteCategory::has_object(const std::string& o) const {
  return std::find(objects.begin(), objects.end(), o) != objects.end();
}

const Morphism* FiniteCategory::find(const std::string& id) const {
  for (const auto& m : morphisms)
    if (m.id == id) return &m;
  return nullptr;
}

const Morphism& FiniteCategory::mor(const std::string& id) const {
  const Morphism* m = find(id);
  if (!m) throw std::invalid_argument("fincat: unknown morphism " + id);
  return *m;
}

std::string FiniteCategory::compose(const std::string& g, const std::string& f) const {
  if (is_identity(f)) return g;
  if (is_identity(g)) return f;
  auto it = compose_table.find({g, f});
  if (it == compose_table.end())
    throw std::invalid_argument("fincat: composite missing for (" + g + ", " + f + ")");
  return it->second;
}

bool FiniteCategory::is_identity(const std::string& id) const {
  for (const auto& [o, m] : identity)
    if (m == id) return true;
  return false;
}

std::vector<std::string> FiniteCategory::non_identity_morphisms() const {
  std::vector<std::string> out;
  for (const auto& m : morphisms)
    if (!is_identity(m.id)) out.push_back(m.id);
  return out;
}

ValidationReport validate_category(const FiniteCategory& c) {
  ValidationReport rep;
  auto complain = [&](std::string law, std::string witness) {
    rep.violations.push_back({std::move(law), std::move(witness)});
  };

  std::set<std::string> objset(c.objects.begin(), c.objects.end());
  if (objset.size() != c.objects.size()) complain("objects distinct", "duplicate object id");
  std::set<std::string> morset;
  for (const auto& m : c.morphisms) {
    if (!morset.insert(m.id).second) complain("morphisms distinct", m.id);
    if (!objset.count(m.src)) complain("src exists", m.id + " src " + m.src);
    if (!objset.count(m.tgt)) complain("tgt exists", m.id + " tgt " + m.tgt);
  }
  for (const auto& o : c.objects) {
    auto it = c.identity.find(o);
    if (it == c.identity.end()) {
      complain("identity assigned", o);
      continue;
    }
    const Morphism* m = c.find(it->second);
    if (!m || m->src != o || m->tgt != o) complain("identity endpoints", o);
  }

  auto endpoints_ok = [&](const std::string& id) { return c.find(id) != nullptr; };

  // Composition total on composable pairs, with consistent endpoints.
  for (const auto& g : c.morphisms)
    for (const auto& f : c.morphisms) {
      if (f.tgt != g.src) continue;
      if (c.is_identity(f.id) || c.is_identity(g.id)) continue;
      auto it = c.compose_table.find({g.id, f.id});
      if (it == c.compose_table.end()) {
        complain("composition not total", "(" + g.id + ", " + f.id + ")");
        continue;
      }
      if (!endpoints_ok(it->second)) {
        complain("composite exists", it->second);
        continue;
      }
      const Morphism& gf = c.mor(it->second);
      if (gf.src != f.src || gf.tgt != g.tgt)
        complain("composite endpoints", "(" + g.id + ", " + f.id + ") -> " + it->second);
    }

  // Identity laws.
  for (const auto& m : c.morphisms) {
    if (!endpoints_ok(m.id)) continue;
    try {
      if (c.compose(m.id, c.identity.at(m.src)) != m.id) complain("right identity", m.id);
      if (c.compose(c.identity.at(m.tgt), m.id) != m.id) complain("left identity", m.id);
    } catch (const std::exception&) {
      // missing identity already reported
    }
  }

  // Associativity over all composable triples.
  for (const auto& h : c.morphisms)
    for (const auto& g : c.morphisms)
      for (const auto& f : c.morphisms) {
        if (f.tgt != g.src || g.tgt != h.src) continue;
        try {
          const std::string lhs = c.compose(h.id, c.compose(g.id, f.id));
          const std::string rhs = c.compose(c.compose(h.id, g.id), f.id);
          if (lhs != rhs)
            complain("associativity", "(" + h.id + ", " + g.id + ", " + f.id + ")");
        } catch (const std::exception&) {
          // totality violation already reported
        }
      }
  return rep;
}

const std::vector<Elem>& SetDiagram::at(const std::string& obj) const {
  static const std::vector<Elem> empty;
  auto it = value.find(obj);
  return it == value.end() ? empty : it->second;
}

Elem SetDiagram::apply(const std::string& m, const Elem& e) const {
  if (base.is_identity(m)) return e;
  const auto& fn = action.at(m);
  auto it = fn.find(e);
  if (it == fn.end()) throw std::invalid_argument("fincat: action of " + m + " undefined at " + e.str());
  return it->second;
}

std::size_t SetDiagram::total_size() const {
  std::size_t n = 0;
  for (const auto& [o, v] : value) n += v.size();
  return n;
}

void SetDiagram::sort_values() {
  for (auto& [o, v] : value) std::sort(v.begin(), v.end());
}

ValidationReport validate_diagram(const SetDiagram& x) {
  ValidationReport rep = validate_category(x.base);
  auto complain = [&](std::string law, std::string witness) {
    rep.violations.push_back({std::move(law), std::move(witness)});
  };
  for (const auto& [o, v] : x.value) {
    if (!x.base.has_object(o)) complain("value over objects", o);
    for (const auto& e : v)
      if (e.obj != o) complain("element tag matches object", e.str());
  }
  for (const auto& id : x.base.non_identity_morphisms()) {
    const Morphism& m = x.base.mor(id);
    auto it = x.action.find(id);
    if (it == x.action.end()) {
      if (!x.at(m.src).empty()) complain("action defined", id);
      continue;
    }
    for (const auto& e : x.at(m.src)) {
      auto jt = it->second.find(e);
      if (jt == it->second.end()) {
        complain("action total", id + " at " + e.str());
        continue;
      }
      const auto& tv = x.at(m.tgt);
      if (!std::binary_search(tv.begin(), tv.end(), jt->second))
        complain("action lands in target", id + " at " + e.str());
    }
  }
  // Functoriality: action respects composition.
  for (const auto& g : x.base.non_identity_morphisms())
    for (const auto& f : x.base.non_identity_morphisms()) {
      const Morphism& mf = x.base.mor(f);
      const Morphism& mg = x.base.mor(g);
      if (mf.tgt != mg.src) continue;
      std::string gf;
      try {
        gf = x.base.compose(g, f);
      } catch (const std::exception&) {
        continue;
      }
      for (const auto& e : x.at(mf.src)) {
        try {
          if (x.apply(gf, e) != x.apply(g, x.apply(f, e)))
            complain("functoriality", "(" + g + ", " + f + ") at " + e.str());
        } catch (const std::exception&) {
          // totality violation already reported
        }
      }
    }
  return rep;
}

Elem DiagramMap::apply(const Elem& e) const {
  auto it = comp.find(e.obj);
  if (it == comp.end()) throw std::invalid_argument("fincat: map has no component at " + e.obj);
  auto jt = it->second.find(e);
  if (jt == it->second.end()) throw std::invalid_argument("fincat: map undefined at " + e.str());
  return jt->second;
}

ValidationReport validate_map(const SetDiagram& a, const SetDiagram& b, const DiagramMap& f) {
  ValidationReport rep;
  auto complain = [&](std::string law, std::string witness) {
    rep.violations.push_back({std::move(law), std::move(witness)});
  };
  for (const auto& o : a.base.objects) {
    const auto& tv = b.at(o);
    for (const auto& e : a.at(o)) {
      Elem img;
      try {
        img = f.apply(e);
      } catch (const std::exception&) {
        complain("component total", e.str());
        continue;
      }
      if (!std::binary_search(tv.begin(), tv.end(), img))
        complain("component lands in target", e.str());
    }
  }
  for (const auto& id : a.base.non_identity_morphisms()) {
    const Morphism& m = a.base.mor(id);
    for (const auto& e : a.at(m.src)) {
      try {
        if (f.apply(a.apply(id, e)) != b.apply(id, f.apply(e)))
          complain("naturality", id + " at " + e.str());
      } catch (const std::exception&) {
        complain("naturality evaluable", id + " at " + e.str());
      }
    }
  }
  return rep;
}

DiagramMap identity_map(const SetDiagram& a) {
  DiagramMap f;
  for (const auto& [o, v] : a.value) {
    auto& c = f.comp[o];
    for (const auto& e : v) c[e] = e;
  }
  return f;
}

DiagramMap compose_maps(const DiagramMap& g, const DiagramMap& f) {
  DiagramMap h;
  for (const auto& [o, fn] : f.comp) {
    auto& c = h.comp[o];
    for (const auto& [e, v] : fn) c[e] = g.apply(v);
  }
  return h;
}

Elem ColimitPresentation::apex_of(const Elem& e) const {
  auto it = cocone.find(e.obj);
  if (it == cocone.end()) throw std::invalid_argument("fincat: cocone has no component at " + e.obj);
  return it->second.at(e);
}

ColimitPresentation colim_set(const SetDiagram& x) {
  // Union-find over the disjoint union, which is canonical because elements
  // carry their object tag.
  std::vector<Elem> all;
  for (const auto& o : x.base.objects)
    for (const auto& e : x.at(o)) all.push_back(e);
  std::sort(all.begin(), all.end());
  std::map<Elem, std::size_t> index;
  for (std::size_t i = 0; i < all.size(); ++i) index[all[i]] = i;

  std::vector<std::size_t> parent(all.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<std::size_t> rank_(all.size(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  };

  for (const auto& id : x.base.non_identity_morphisms()) {
    const Morphism& m = x.base.mor(id);
    for (const auto& e : x.at(m.src)) unite(index.at(e), index.at(x.apply(id, e)));
  }

  std::map<std::size_t, std::vector<Elem>> groups;
  for (std::size_t i = 0; i < all.size(); ++i) groups[find(i)].push_back(all[i]);

  ColimitPresentation out;
  std::map<std::size_t, Elem> rep_of;
  for (auto& [root, members] : groups) {
    std::sort(members.begin(), members.end());
    rep_of[root] = members.front();  // lexicographically least member
    out.classes.push_back(members);
  }
  std::sort(out.classes.begin(), out.classes.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  for (const auto& cls : out.classes) out.apex.push_back(cls.front());
  for (const auto& o : x.base.objects) {
    auto& c = out.cocone[o];
    for (const auto& e : x.at(o)) c[e] = rep_of.at(find(index.at(e)));
  }
  return out;
}

Orbit orbit_over_point(const SetDiagram& x, const Elem& p) {
  const ColimitPresentation col = colim_set(x);
  if (!std::binary_search(col.apex.begin(), col.apex.end(), p))
    throw std::invalid_argument("fincat: point not in apex: " + p.str());
  Orbit orb;
  orb.diagram.base = x.base;
  orb.point = p;
  for (const auto& o : x.base.objects) {
    auto& v = orb.diagram.value[o];
    for (const auto& e : x.at(o))
      if (col.apex_of(e) == p) v.push_back(e);
    std::sort(v.begin(), v.end());
  }
  for (const auto& id : x.base.non_identity_morphisms()) {
    const Morphism& m = x.base.mor(id);
    auto& fn = orb.diagram.action[id];
    for (const auto& e : orb.diagram.at(m.src)) fn[e] = x.apply(id, e);
  }
  orb.projection = identity_map(orb.diagram);  // inclusion
  return orb;
}

bool is_orbit(const SetDiagram& x) { return colim_set(x).apex.size() == 1; }

PullbackResult pullback_set(const SetDiagram& a, const SetDiagram& b, const SetDiagram& c,
                            const DiagramMap& f, const DiagramMap& g) {
  if (a.base.objects != c.base.objects || b.base.objects != c.base.objects)
    throw std::invalid_argument("fincat: pullback over mismatched bases");
  PullbackResult out;
  out.apex.base = a.base;
  std::map<Elem, std::pair<Elem, Elem>> parts;
  for (const auto& o : a.base.objects) {
    auto& v = out.apex.value[o];
    for (const auto& ea : a.at(o))
      for (const auto& eb : b.at(o))
        if (f.apply(ea) == g.apply(eb)) {
          Elem e{o, "(" + ea.label + "|" + eb.label + ")"};
          v.push_back(e);
          parts[e] = {ea, eb};
        }
    std::sort(v.begin(), v.end());
  }
  for (const auto& id : a.base.non_identity_morphisms()) {
    const Morphism& m = a.base.mor(id);
    auto& fn = out.apex.action[id];
    for (const auto& e : out.apex.at(m.src)) {
      const auto& [ea, eb] = parts.at(e);
      const Elem ia = a.apply(id, ea);
      const Elem ib = b.apply(id, eb);
      fn[e] = Elem{m.tgt, "(" + ia.label + "|" + ib.label + ")"};
    }
  }
  for (const auto& [e, pr] : parts) {
    out.to_a.comp[e.obj][e] = pr.first;
    out.to_b.comp[e.obj][e] = pr.second;
  }
  for (const auto& o : a.base.objects) {
    out.to_a.comp.try_emplace(o);
    out.to_b.comp.try_emplace(o);
  }
  return out;
}

namespace {

FiniteCategory make_poset(const std::vector<std::string>& objs,
                          const std::vector<std::pair<std::string, std::string>>& gens) {
  FiniteCategory c;
  c.objects = objs;
  for (const auto& o : objs) {
    const std::string id = "id_" + o;
    c.morphisms.push_back({id, o, o});
    c.identity[o] = id;
  }
  // Closure under composition; poset shapes here have no parallel composites.
  std::map<std::pair<std::string, std::string>, std::string> arrow;  // (src,tgt) -> id
  for (const auto& [s, t] : gens) {
    const std::string id = s + "_to_" + t;
    c.morphisms.push_back({id, s, t});
    arrow[{s, t}] = id;
  }
  bool grew = true;
  while (grew) {
    grew = false;
    auto snapshot = arrow;
    for (const auto& [st1, f] : snapshot)
      for (const auto& [st2, g] : snapshot) {
        if (st1.second != st2.first) continue;
        auto key = std::make_pair(st1.first, st2.second);
        if (!arrow.count(key)) {
          const std::string id = key.first + "_to_" + key.second;
          c.morphisms.push_back({id, key.first, key.second});
          arrow[key] = id;
          grew = true;
        }
        c.compose_table[{arrow[{st2.first, st2.second}], f}] = arrow[key];
      }
  }
  return c;
}

}  // namespace

FiniteCategory terminal_category() { return make_poset({"*"}, {}); }

FiniteCategory walking_arrow() { return make_poset({"a", "b"}, {{"a", "b"}}); }

FiniteCategory span_category() { return make_poset({"a", "b", "c"}, {{"c", "a"}, {"c", "b"}}); }

FiniteCategory chain2() { return make_poset({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}); }

FiniteCategory parallel_pair() {
  FiniteCategory c;
  c.objects = {"a", "b"};
  c.morphisms = {{"id_a", "a", "a"}, {"id_b", "b", "b"}, {"f", "a", "b"}, {"g", "a", "b"}};
  c.identity = {{"a", "id_a"}, {"b", "id_b"}};
  return c;
}

nlohmann::ordered_json category_to_json(const FiniteCategory& c) {
  nlohmann::ordered_json j;
  j["objects"] = c.objects;
  auto& ms = j["morphisms"] = nlohmann::ordered_json::array();
  for (const auto& m : c.morphisms)
    ms.push_back({{"id", m.id}, {"src", m.src}, {"tgt", m.tgt}});
  auto& ids = j["identities"] = nlohmann::ordered_json::object();
  for (const auto& [o, m] : c.identity) ids[o] = m;
  auto& comp = j["compose"] = nlohmann::ordered_json::array();
  for (const auto& [gf, h] : c.compose_table)
    comp.push_back({gf.first, gf.second, h});
  return j;
}

FiniteCategory category_from_json(const nlohmann::ordered_json& j) {
  FiniteCategory c;
  for (const auto& o : j.at("objects")) c.objects.push_back(o.get<std::string>());
  for (const auto& m : j.at("morphisms"))
    c.morphisms.push_back({m.at("id").get<std::string>(), m.at("src").get<std::string>(),
                           m.at("tgt").get<std::string>()});
  for (auto it = j.at("identities").begin(); it != j.at("identities").end(); ++it)
    c.identity[it.key()] = it.value().get<std::string>();
  if (j.contains("compose"))
    for (const auto& t : j.at("compose"))
      c.compose_table[{t.at(0).get<std::string>(), t.at(1).get<std::string>()}] =
          t.at(2).get<std::string>();
  return c;
}

nlohmann::ordered_json diagram_to_json(const SetDiagram& d) {
  nlohmann::ordered_json j;
  auto& els = j["elements"] = nlohmann::ordered_json::object();
  for (const auto& o : d.base.objects) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : d.at(o)) arr.push_back(e.label);
    els[o] = arr;
  }
  auto& act = j["actions"] = nlohmann::ordered_json::object();
  for (const auto& [m, fn] : d.action) {
    auto obj = nlohmann::ordered_json::object();
    for (const auto& [e, v] : fn) obj[e.label] = v.label;
    act[m] = obj;
  }
  return j;
}

SetDiagram diagram_from_json(const nlohmann::ordered_json& j, const FiniteCategory& base) {
  SetDiagram d;
  d.base = base;
  const auto& els = j.at("elements");
  for (auto it = els.begin(); it != els.end(); ++it) {
    auto& v = d.value[it.key()];
    for (const auto& l : it.value()) v.push_back(Elem{it.key(), l.get<std::string>()});
    std::sort(v.begin(), v.end());
  }
  if (j.contains("actions")) {
    const auto& act = j.at("actions");
    for (auto it = act.begin(); it != act.end(); ++it) {
      const Morphism& m = base.mor(it.key());
      auto& fn = d.action[it.key()];
      for (auto jt = it.value().begin(); jt != it.value().end(); ++jt)
        fn[Elem{m.src, jt.key()}] = Elem{m.tgt, jt.value().get<std::string>()};
    }
  }
  return d;
}

}  // namespace soatk::fincat
