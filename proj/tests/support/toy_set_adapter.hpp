#pragma once

// A finite-set cell adapter for exercising the engine at the set level.
// Objects are sorted element lists, maps are total functions, lifts are
// found by exhaustive function enumeration.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "soatk/soa.hpp"

namespace soatk::testsupport {

class SetAdapter : public soa::CellAdapter {
 public:
  using Elems = std::vector<std::string>;
  using Fn = std::map<std::string, std::string>;

  soa::Obj add_object(Elems e) {
    std::sort(e.begin(), e.end());
    objs_.push_back(std::move(e));
    return {objs_.size() - 1};
  }
  soa::Map add_map(soa::Obj s, soa::Obj d, Fn fn) {
    maps_.push_back({s.ix, d.ix, std::move(fn)});
    return {maps_.size() - 1};
  }
  const Elems& elems(soa::Obj o) const { return objs_[o.ix]; }
  const Fn& fn(soa::Map m) const { return maps_[m.ix].fn; }

  soa::Obj src(soa::Map m) const override { return {maps_[m.ix].src}; }
  soa::Obj dst(soa::Map m) const override { return {maps_[m.ix].dst}; }

  soa::Map identity(soa::Obj o) override {
    Fn fn;
    for (const auto& e : objs_[o.ix]) fn[e] = e;
    return add_map(o, o, std::move(fn));
  }

  soa::Map compose(soa::Map g, soa::Map f) override {
    Fn fn;
    for (const auto& [k, v] : maps_[f.ix].fn) fn[k] = maps_[g.ix].fn.at(v);
    return add_map(src(f), dst(g), std::move(fn));
  }

  bool equal(soa::Map a, soa::Map b) const override {
    // Structural: replay creates fresh handles for identical data.
    return objs_[maps_[a.ix].src] == objs_[maps_[b.ix].src] &&
           objs_[maps_[a.ix].dst] == objs_[maps_[b.ix].dst] && maps_[a.ix].fn == maps_[b.ix].fn;
  }

  Coproduct coproduct(std::span<const soa::Obj> parts) override {
    Elems apex;
    std::vector<Fn> fns(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i)
      for (const auto& e : objs_[parts[i].ix]) {
        const std::string tagged = std::to_string(i) + ":" + e;
        apex.push_back(tagged);
        fns[i][e] = tagged;
      }
    const soa::Obj ap = add_object(std::move(apex));
    Coproduct c{ap, {}};
    for (std::size_t i = 0; i < parts.size(); ++i)
      c.in.push_back(add_map(parts[i], ap, std::move(fns[i])));
    return c;
  }

  soa::Map fold(const Coproduct& cop, std::span<const soa::Map> legs) override {
    if (legs.size() != cop.in.size()) throw soa::EngineError("SetAdapter::fold: arity mismatch");
    Fn fn;
    soa::Obj target = legs.empty() ? cop.apex : dst(legs[0]);
    for (std::size_t i = 0; i < legs.size(); ++i)
      for (const auto& [e, tagged] : maps_[cop.in[i].ix].fn)
        fn[tagged] = maps_[legs[i].ix].fn.at(e);
    return add_map(cop.apex, target, std::move(fn));
  }

  Pushout pushout(soa::Map cells, soa::Map attach) override {
    // apex = (Z ⊔ B) / (attach(a) ~ cells(a)); classes named by least member.
    // Copies: add_object below may reallocate objs_.
    const Elems z = objs_[maps_[attach.ix].dst];
    const Elems b = objs_[maps_[cells.ix].dst];
    std::vector<std::string> all;
    for (const auto& e : z) all.push_back("z:" + e);
    for (const auto& e : b) all.push_back("b:" + e);
    std::sort(all.begin(), all.end());
    std::map<std::string, std::size_t> ix;
    for (std::size_t i = 0; i < all.size(); ++i) ix[all[i]] = i;
    std::vector<std::size_t> parent(all.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    for (const auto& e : objs_[maps_[cells.ix].src]) {
      const auto a = find(ix.at("z:" + maps_[attach.ix].fn.at(e)));
      const auto c = find(ix.at("b:" + maps_[cells.ix].fn.at(e)));
      if (a != c) parent[std::max(a, c)] = std::min(a, c);
    }
    std::map<std::size_t, std::string> rep;
    for (std::size_t i = 0; i < all.size(); ++i) {
      const auto r = find(i);
      if (!rep.count(r) || all[i] < rep[r]) rep[r] = all[i];
    }
    Elems apex;
    for (const auto& [r, name] : rep) apex.push_back(name);
    const soa::Obj ap = add_object(std::move(apex));
    Fn from_z, from_b;
    for (const auto& e : z) from_z[e] = rep.at(find(ix.at("z:" + e)));
    for (const auto& e : b) from_b[e] = rep.at(find(ix.at("b:" + e)));
    return {ap, add_map({maps_[attach.ix].dst}, ap, std::move(from_z)),
            add_map({maps_[cells.ix].dst}, ap, std::move(from_b))};
  }

  soa::Map pushout_induced(const Pushout& po, soa::Map base_leg, soa::Map cells_leg) override {
    Fn fn;
    for (const auto& [e, v] : maps_[po.from_base.ix].fn) fn[v] = maps_[base_leg.ix].fn.at(e);
    for (const auto& [e, v] : maps_[po.from_cells.ix].fn) {
      const std::string img = maps_[cells_leg.ix].fn.at(e);
      auto it = fn.find(v);
      if (it != fn.end() && it->second != img)
        throw soa::EngineError("SetAdapter::pushout_induced: legs do not agree");
      fn[v] = img;
    }
    return add_map(po.apex, dst(base_leg), std::move(fn));
  }

  std::optional<soa::Map> find_lift(soa::Map l, soa::Map top, soa::Map p,
                                    soa::Map bottom) override {
    const auto& dom = objs_[maps_[l.ix].dst];
    const auto& cod = objs_[maps_[p.ix].src];
    // Enumerate all functions dom -> cod in lexicographic order.
    if (dom.empty()) {
      return add_map(dst(l), src(p), {});
    }
    if (cod.empty()) return std::nullopt;
    std::vector<std::size_t> pick(dom.size(), 0);
    while (true) {
      Fn fn;
      for (std::size_t i = 0; i < dom.size(); ++i) fn[dom[i]] = cod[pick[i]];
      bool ok = true;
      for (const auto& [e, v] : maps_[l.ix].fn)
        if (fn.at(v) != maps_[top.ix].fn.at(e)) ok = false;
      if (ok)
        for (const auto& e : dom)
          if (maps_[p.ix].fn.at(fn.at(e)) != maps_[bottom.ix].fn.at(e)) ok = false;
      if (ok) return add_map(dst(l), src(p), std::move(fn));
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == cod.size()) pick[i++] = 0;
      if (i == pick.size()) return std::nullopt;
    }
  }

  std::optional<soa::Map> factor_through(soa::Map map, soa::Map via) override {
    Fn fn;
    for (const auto& [e, v] : maps_[map.ix].fn) {
      std::optional<std::string> pre;
      for (const auto& [z, img] : maps_[via.ix].fn)
        if (img == v && (!pre || z < *pre)) pre = z;
      if (!pre) return std::nullopt;
      fn[e] = *pre;
    }
    for (const auto& e : objs_[maps_[map.ix].src])
      if (!fn.count(e)) return std::nullopt;
    return add_map(src(map), src(via), std::move(fn));
  }

 private:
  struct MapData {
    std::size_t src, dst;
    Fn fn;
  };
  std::vector<Elems> objs_;
  std::vector<MapData> maps_;
};

/// Matching system over explicit set-level generators: squares are found by
/// exhaustive enumeration and cells are attached for exactly the squares
/// without lifts.
class SetMatchingSystem : public soa::MatchingSystem {
 public:
  SetMatchingSystem(SetAdapter& a, std::vector<soa::Map> generators)
      : a_(a), gens_(std::move(generators)) {}

  bool functorial() const override { return false; }

  std::vector<soa::GenSquare> all_squares(soa::Map rho) {
    std::vector<soa::GenSquare> out;
    for (const auto& gen : gens_) {
      const auto tops = all_functions(a_.src(gen), a_.src(rho));
      const auto bottoms = all_functions(a_.dst(gen), a_.dst(rho));
      for (const auto& t : tops)
        for (const auto& b : bottoms)
          if (a_.equal(a_.compose(rho, t), a_.compose(b, gen))) out.push_back({gen, t, b});
    }
    return out;
  }

  std::vector<soa::GenSquare> probe_failures(soa::Map rho) override {
    std::vector<soa::GenSquare> out;
    for (const auto& sq : all_squares(rho))
      if (!a_.find_lift(sq.gen, sq.top, rho, sq.bottom)) out.push_back(sq);
    return out;
  }

  std::vector<soa::GenSquare> aggregate(soa::Map rho) override { return probe_failures(rho); }

  std::optional<SquareFactorization> factor_square(const soa::GenSquare& sq, soa::Map rho,
                                                   const soa::MatchData& m) override {
    (void)rho;
    // An aggregated square factors through its own summand.
    for (std::size_t i = 0; i < m.squares.size(); ++i) {
      const auto& c = m.squares[i];
      if (a_.equal(c.gen, sq.gen) && a_.equal(c.top, sq.top) && a_.equal(c.bottom, sq.bottom))
        return SquareFactorization{a_.compose(m.dom_cop.in[i], a_.identity(a_.src(sq.gen))),
                                   a_.compose(m.cod_cop.in[i], a_.identity(a_.dst(sq.gen)))};
    }
    return std::nullopt;
  }

 private:
  std::vector<soa::Map> all_functions(soa::Obj from, soa::Obj to) {
    const auto& dom = a_.elems(from);
    const auto& cod = a_.elems(to);
    std::vector<soa::Map> out;
    if (dom.empty()) {
      out.push_back(a_.add_map(from, to, {}));
      return out;
    }
    if (cod.empty()) return out;
    std::vector<std::size_t> pick(dom.size(), 0);
    while (true) {
      SetAdapter::Fn fn;
      for (std::size_t i = 0; i < dom.size(); ++i) fn[dom[i]] = cod[pick[i]];
      out.push_back(a_.add_map(from, to, std::move(fn)));
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == cod.size()) pick[i++] = 0;
      if (i == pick.size()) return out;
    }
  }

  SetAdapter& a_;
  std::vector<soa::Map> gens_;
};

}  // namespace soatk::testsupport
