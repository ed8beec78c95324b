#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "soatk/equichain.hpp"

namespace soatk::equichain {

using fincat::Elem;

namespace {

bool module_diagrams_equal(const ModuleDiagram& a, const ModuleDiagram& b) {
  if (a.base.objects != b.base.objects || a.p != b.p || a.basis != b.basis) return false;
  for (const auto& id : a.base.non_identity_morphisms())
    if (a.act(id) != b.act(id)) return false;
  return true;
}

bool chains_equal(const ChainDiagram& a, const ChainDiagram& b) {
  if (a.base.objects != b.base.objects || a.p != b.p) return false;
  const int lo = std::min(a.lo, b.lo), hi = std::max(a.hi, b.hi);
  for (int n = lo; n <= hi; ++n) {
    if (!module_diagrams_equal(a.at(n), b.at(n))) return false;
    for (const auto& o : a.base.objects)
      if (a.diff_mat(n, o) != b.diff_mat(n, o)) return false;
  }
  return true;
}

/// Classifier of a square with parts a : P -> Z_{n-1}, b : P -> Y_n, as a
/// natural map P -> W via the per-object kernel presentation of W.
std::optional<ModuleMap> w_classifier(const MatchingObject& mo, const ModuleDiagram& pt,
                                      const ModuleMap& a, const ModuleMap& b) {
  ModuleMap phi;
  for (const auto& o : pt.base.objects) {
    const std::size_t wd = mo.w.dim(o);
    const fp::Mat tx = mo.to_x.comp.count(o) ? mo.to_x.comp.at(o) : fp::Mat::zero(0, wd, pt.p);
    const fp::Mat ty = mo.to_y.comp.count(o) ? mo.to_y.comp.at(o) : fp::Mat::zero(0, wd, pt.p);
    const fp::Mat k = tx.vcat(ty);
    const fp::Mat am = a.at(o, tx.rows(), pt.dim(o), pt.p);
    const fp::Mat bm = b.at(o, ty.rows(), pt.dim(o), pt.p);
    auto sol = fp::Solver(k).solve_matrix(am.vcat(bm));
    if (!sol) return std::nullopt;
    phi.comp[o] = *sol;
  }
  return phi;
}

std::string canonical_orbit_signature(const fincat::SetDiagram& d) {
  std::map<Elem, std::size_t> index;
  std::ostringstream os;
  for (const auto& o : d.base.objects) {
    os << "|" << o << ":" << d.at(o).size();
    std::size_t i = 0;
    for (const auto& e : d.at(o)) index[e] = i++;
  }
  for (const auto& id : d.base.non_identity_morphisms()) {
    const auto& m = d.base.mor(id);
    os << "|" << id << ":";
    for (const auto& e : d.at(m.src)) os << index.at(d.apply(id, e)) << ",";
  }
  return os.str();
}

struct FlatIndex {
  // Flat layout of a chain map dom -> cod: degrees dom.lo..dom.hi, objects in
  // base order, row-major component entries.
  const ChainDiagram* dom;
  const ChainDiagram* cod;
  std::map<std::pair<int, std::string>, std::size_t> offset;
  std::size_t total = 0;

  FlatIndex(const ChainDiagram& d, const ChainDiagram& c) : dom(&d), cod(&c) {
    for (int n = d.lo; n <= d.hi; ++n)
      for (const auto& o : d.base.objects) {
        offset[{n, o}] = total;
        total += c.dim(n, o) * d.dim(n, o);
      }
  }

  std::size_t at(int n, const std::string& o, std::size_t i, std::size_t j) const {
    return offset.at({n, o}) + i * dom->dim(n, o) + j;
  }
  bool in_range(int n) const { return n >= dom->lo && n <= dom->hi; }

  ChainMap unflatten(const fp::Mat& x) const {
    ChainMap f;
    for (int n = dom->lo; n <= dom->hi; ++n) {
      ModuleMap m;
      bool nonzero = false;
      for (const auto& o : dom->base.objects) {
        fp::Mat c(cod->dim(n, o), dom->dim(n, o), dom->p);
        for (std::size_t i = 0; i < c.rows(); ++i)
          for (std::size_t j = 0; j < c.cols(); ++j) c.set(i, j, x.at(at(n, o, i, j), 0));
        if (!c.is_zero()) nonzero = true;
        m.comp[o] = c;
      }
      if (nonzero) f.comp[n] = std::move(m);
    }
    return f;
  }
};

struct AffineSystem {
  std::vector<std::vector<unsigned>> rows;
  std::vector<unsigned> rhs;
  std::size_t vars;
  unsigned p;

  AffineSystem(std::size_t v, unsigned prime) : vars(v), p(prime) {}

  std::vector<unsigned>& fresh_row(unsigned b) {
    rows.emplace_back(vars, 0);
    rhs.push_back(b % p);
    return rows.back();
  }

  std::optional<fp::Mat> solve() const {
    if (rows.empty()) return fp::Mat::zero(vars, 1, p);
    fp::Mat a = fp::Mat::from_rows(rows, p);
    fp::Mat b(rows.size(), 1, p);
    for (std::size_t i = 0; i < rhs.size(); ++i) b.set(i, 0, rhs[i]);
    return fp::Solver(a).solve(b);
  }
};

/// Chain + naturality constraints for h : dom -> cod, optional triangles:
///   post: q∘h = q_rhs with q : cod -> w;
///   pre:  h∘r = r_rhs with r : e -> dom.
std::optional<ChainMap> solve_chain_hom(const ChainDiagram& dom, const ChainDiagram& cod,
                                        const ChainDiagram* w, const ChainMap* q,
                                        const ChainMap* q_rhs, const ChainDiagram* e,
                                        const ChainMap* r, const ChainMap* r_rhs) {
  const unsigned p = dom.p;
  FlatIndex fx(dom, cod);
  AffineSystem sys(fx.total, p);

  for (int n = dom.lo; n <= dom.hi; ++n) {
    // Naturality at degree n.
    for (const auto& id : dom.base.non_identity_morphisms()) {
      const auto& mor = dom.base.mor(id);
      const fp::Mat ad = dom.at(n).act(id);
      const fp::Mat ac = cod.at(n).act(id);
      for (std::size_t i = 0; i < cod.dim(n, mor.tgt); ++i)
        for (std::size_t j = 0; j < dom.dim(n, mor.src); ++j) {
          auto& row = sys.fresh_row(0);
          for (std::size_t k = 0; k < dom.dim(n, mor.tgt); ++k) {
            const std::size_t idx = fx.at(n, mor.tgt, i, k);
            row[idx] = (row[idx] + ad.at(k, j)) % p;
          }
          for (std::size_t k = 0; k < cod.dim(n, mor.src); ++k) {
            const std::size_t idx = fx.at(n, mor.src, k, j);
            row[idx] = (row[idx] + (p - ac.at(i, k) % p)) % p;
          }
        }
    }
  }
  // Chain condition d_cod∘h_n = h_{n-1}∘d_dom at every degree touching vars.
  for (int n = dom.lo; n <= dom.hi + 1; ++n) {
    for (const auto& o : dom.base.objects) {
      const fp::Mat dc = cod.diff_mat(n, o);
      const fp::Mat dd = dom.diff_mat(n, o);
      const std::size_t out_rows = cod.dim(n - 1, o);
      const std::size_t out_cols = dom.dim(n, o);
      for (std::size_t i = 0; i < out_rows; ++i)
        for (std::size_t j = 0; j < out_cols; ++j) {
          auto& row = sys.fresh_row(0);
          if (fx.in_range(n))
            for (std::size_t k = 0; k < cod.dim(n, o); ++k) {
              const std::size_t idx = fx.at(n, o, k, j);
              row[idx] = (row[idx] + dc.at(i, k)) % p;
            }
          if (fx.in_range(n - 1))
            for (std::size_t k = 0; k < dom.dim(n - 1, o); ++k) {
              const std::size_t idx = fx.at(n - 1, o, i, k);
              row[idx] = (row[idx] + (p - dd.at(k, j) % p)) % p;
            }
        }
    }
  }
  if (q) {
    for (int n = dom.lo; n <= dom.hi; ++n)
      for (const auto& o : dom.base.objects) {
        const fp::Mat qm = q->at(n, o, w->dim(n, o), cod.dim(n, o), p);
        const fp::Mat rm = q_rhs->at(n, o, w->dim(n, o), dom.dim(n, o), p);
        for (std::size_t i = 0; i < qm.rows(); ++i)
          for (std::size_t j = 0; j < dom.dim(n, o); ++j) {
            auto& row = sys.fresh_row(rm.at(i, j));
            for (std::size_t k = 0; k < cod.dim(n, o); ++k) {
              const std::size_t idx = fx.at(n, o, k, j);
              row[idx] = (row[idx] + qm.at(i, k)) % p;
            }
          }
      }
  }
  if (r) {
    for (int n = e->lo; n <= e->hi; ++n)
      for (const auto& o : dom.base.objects) {
        const fp::Mat rmat = r->at(n, o, dom.dim(n, o), e->dim(n, o), p);
        const fp::Mat rrhs = r_rhs->at(n, o, cod.dim(n, o), e->dim(n, o), p);
        for (std::size_t i = 0; i < cod.dim(n, o); ++i)
          for (std::size_t j = 0; j < e->dim(n, o); ++j) {
            auto& row = sys.fresh_row(rrhs.at(i, j));
            if (fx.in_range(n))
              for (std::size_t k = 0; k < dom.dim(n, o); ++k) {
                const std::size_t idx = fx.at(n, o, i, k);
                row[idx] = (row[idx] + rmat.at(k, j)) % p;
              }
          }
      }
  }
  auto x = sys.solve();
  if (!x) return std::nullopt;
  return fx.unflatten(*x);
}

}  // namespace

// ---------------------------------------------------------------------------
// ChainAdapter

soa::Obj ChainAdapter::add_object(ChainDiagram x) {
  objs_.push_back(std::move(x));
  return {objs_.size() - 1};
}

soa::Map ChainAdapter::add_map(soa::Obj s, soa::Obj d, ChainMap f) {
  maps_.push_back({s.ix, d.ix, std::move(f)});
  return {maps_.size() - 1};
}

soa::Map ChainAdapter::identity(soa::Obj o) {
  return add_map(o, o, identity_chain_map(objs_[o.ix]));
}

soa::Map ChainAdapter::compose(soa::Map g, soa::Map f) {
  ChainMap h = compose_chain_maps(objs_[maps_[f.ix].src], objs_[maps_[f.ix].dst],
                                  objs_[maps_[g.ix].dst], maps_[g.ix].fn, maps_[f.ix].fn);
  return add_map({maps_[f.ix].src}, {maps_[g.ix].dst}, std::move(h));
}

bool ChainAdapter::equal(soa::Map a, soa::Map b) const {
  const auto& ma = maps_[a.ix];
  const auto& mb = maps_[b.ix];
  if (!chains_equal(objs_[ma.src], objs_[mb.src]) || !chains_equal(objs_[ma.dst], objs_[mb.dst]))
    return false;
  return chain_maps_equal(objs_[ma.src], objs_[ma.dst], ma.fn, mb.fn);
}

ChainAdapter::Coproduct ChainAdapter::coproduct(std::span<const soa::Obj> parts) {
  ChainDiagram apex;
  fincat::FiniteCategory base =
      parts.empty() ? fincat::terminal_category() : objs_[parts[0].ix].base;
  if (parts.empty() && !objs_.empty()) base = objs_[0].base;
  apex.base = base;
  apex.p = p_;
  apex.lo = 0;
  apex.hi = -1;
  for (const auto& pt : parts) {
    const auto& c = objs_[pt.ix];
    if (apex.lo > apex.hi) {
      apex.lo = c.lo;
      apex.hi = c.hi;
    } else if (c.lo <= c.hi) {
      apex.lo = std::min(apex.lo, c.lo);
      apex.hi = std::max(apex.hi, c.hi);
    }
  }
  // Degreewise direct sums with summand-tagged labels.
  std::vector<ChainMap> inj(parts.size());
  for (int n = apex.lo; n <= apex.hi; ++n) {
    ModuleDiagram level = zero_module(base, p_);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const ModuleDiagram part_level = objs_[parts[i].ix].at(n);
      for (const auto& o : base.objects) {
        if (!part_level.basis.count(o)) continue;
        for (const auto& l : part_level.basis.at(o))
          level.basis[o].push_back("s" + std::to_string(i) + "." + l);
      }
    }
    for (const auto& id : base.non_identity_morphisms()) {
      const auto& mor = base.mor(id);
      fp::Mat a = fp::Mat::zero(level.dim(mor.tgt), level.dim(mor.src), p_);
      std::size_t ro = 0, co = 0;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto& c = objs_[parts[i].ix];
        const fp::Mat ai = c.at(n).act(id);
        for (std::size_t r = 0; r < ai.rows(); ++r)
          for (std::size_t cc = 0; cc < ai.cols(); ++cc) a.set(ro + r, co + cc, ai.at(r, cc));
        ro += c.dim(n, mor.tgt);
        co += c.dim(n, mor.src);
      }
      level.action[id] = a;
    }
    apex.level[n] = level;
  }
  for (int n = apex.lo; n <= apex.hi; ++n) {
    ModuleMap d;
    for (const auto& o : base.objects) {
      fp::Mat m = fp::Mat::zero(0, 0, p_);
      // Block diagonal of summand differentials.
      std::size_t rows = 0, cols = 0;
      for (const auto& pt : parts) {
        rows += objs_[pt.ix].dim(n - 1, o);
        cols += objs_[pt.ix].dim(n, o);
      }
      m = fp::Mat::zero(rows, cols, p_);
      std::size_t ro = 0, co = 0;
      for (const auto& pt : parts) {
        const fp::Mat di = objs_[pt.ix].diff_mat(n, o);
        for (std::size_t r = 0; r < di.rows(); ++r)
          for (std::size_t c = 0; c < di.cols(); ++c) m.set(ro + r, co + c, di.at(r, c));
        ro += di.rows();
        co += di.cols();
      }
      d.comp[o] = m;
    }
    if (n > apex.lo) apex.diff[n] = d;
  }
  const soa::Obj apex_obj = add_object(apex);
  Coproduct out{apex_obj, {}};
  for (std::size_t i = 0; i < parts.size(); ++i) {
    ChainMap f;
    for (int n = apex.lo; n <= apex.hi; ++n) {
      ModuleMap m;
      bool nonzero = false;
      for (const auto& o : base.objects) {
        std::size_t before = 0;
        for (std::size_t k = 0; k < i; ++k) before += objs_[parts[k].ix].dim(n, o);
        const std::size_t mine = objs_[parts[i].ix].dim(n, o);
        fp::Mat inm = fp::Mat::zero(objs_[apex_obj.ix].dim(n, o), mine, p_);
        for (std::size_t r = 0; r < mine; ++r) inm.set(before + r, r, 1);
        if (!inm.is_zero()) nonzero = true;
        m.comp[o] = inm;
      }
      if (nonzero) f.comp[n] = std::move(m);
    }
    out.in.push_back(add_map(parts[i], apex_obj, std::move(f)));
  }
  return out;
}

soa::Map ChainAdapter::fold(const Coproduct& cop, std::span<const soa::Map> legs) {
  if (legs.size() != cop.in.size()) throw soa::EngineError("ChainAdapter::fold: arity mismatch");
  const ChainDiagram& apex = objs_[cop.apex.ix];
  soa::Obj target = legs.empty() ? cop.apex : dst(legs[0]);
  const ChainDiagram& tchain = objs_[target.ix];
  ChainMap f;
  for (int n = apex.lo; n <= apex.hi; ++n) {
    ModuleMap m;
    bool nonzero = false;
    for (const auto& o : apex.base.objects) {
      fp::Mat block = fp::Mat::zero(tchain.dim(n, o), 0, p_);
      for (std::size_t i = 0; i < legs.size(); ++i) {
        const auto& part = objs_[maps_[legs[i].ix].src];
        block = block.hcat(
            maps_[legs[i].ix].fn.at(n, o, tchain.dim(n, o), part.dim(n, o), p_));
      }
      if (block.cols() != apex.dim(n, o))
        throw soa::EngineError("ChainAdapter::fold: layout mismatch");
      if (!block.is_zero()) nonzero = true;
      m.comp[o] = block;
    }
    if (nonzero) f.comp[n] = std::move(m);
  }
  return add_map(cop.apex, target, std::move(f));
}

ChainAdapter::Pushout ChainAdapter::pushout(soa::Map cells, soa::Map attach) {
  const ChainDiagram a = objs_[maps_[cells.ix].src];
  const ChainDiagram b = objs_[maps_[cells.ix].dst];
  const ChainDiagram z = objs_[maps_[attach.ix].dst];
  const ChainMap cmap = maps_[cells.ix].fn;
  const ChainMap amap = maps_[attach.ix].fn;
  const int lo = std::min(z.lo, b.lo), hi = std::max(z.hi, b.hi);

  // Per (degree, object): quotient of Z ⊕ B by the span of
  // (attach(x), -cells(x)) over basis x of A; basis = non-pivot coordinates.
  struct Quot {
    fp::Mat pi;        // quotient projection (q x m)
    fp::Mat section;   // representatives (m x q), standard vectors
    std::vector<std::size_t> keep;  // original coordinates kept
  };
  std::map<std::pair<int, std::string>, Quot> quots;
  for (int n = lo; n <= hi; ++n)
    for (const auto& o : z.base.objects) {
      const std::size_t zd = z.dim(n, o), bd = b.dim(n, o), ad = a.dim(n, o);
      const std::size_t m = zd + bd;
      const fp::Mat am = amap.at(n, o, zd, ad, p_);
      const fp::Mat cm = cmap.at(n, o, bd, ad, p_);
      // Rows of the relation subspace.
      std::vector<std::vector<unsigned>> rel;
      for (std::size_t j = 0; j < ad; ++j) {
        std::vector<unsigned> v(m, 0);
        for (std::size_t i = 0; i < zd; ++i) v[i] = am.at(i, j);
        for (std::size_t i = 0; i < bd; ++i) v[zd + i] = (p_ - cm.at(i, j) % p_) % p_;
        rel.push_back(std::move(v));
      }
      Quot q;
      if (rel.empty()) {
        q.pi = fp::Mat::identity(m, p_);
        q.section = fp::Mat::identity(m, p_);
        q.keep.resize(m);
        for (std::size_t i = 0; i < m; ++i) q.keep[i] = i;
      } else {
        const fp::Mat rm = fp::Mat::from_rows(rel, p_);
        // rref rows describe the subspace; pivots are eliminated coordinates.
        const fp::Mat rt = rm.transpose();
        // kernel trick: quotient basis = coordinates not pivotal in rref(rm).
        fp::Mat rr = rm;
        // Compute rref via Solver on transpose? Use pivot_columns of rm.
        const auto pivots = rm.pivot_columns();
        std::vector<bool> is_pivot(m, false);
        for (auto c : pivots) is_pivot[c] = true;
        for (std::size_t c = 0; c < m; ++c)
          if (!is_pivot[c]) q.keep.push_back(c);
        const std::size_t qd = q.keep.size();
        q.section = fp::Mat::zero(m, qd, p_);
        for (std::size_t j = 0; j < qd; ++j) q.section.set(q.keep[j], j, 1);
        // pi: e_c -> its class. For kept c: unit vector. For pivot c: read the
        // rref row with that pivot: e_c = -sum over kept coords of row entries.
        q.pi = fp::Mat::zero(qd, m, p_);
        // Recompute rref rows of rm.
        fp::Mat ident = fp::Mat::identity(m, p_);
        (void)ident;
        (void)rt;
        (void)rr;
        // Solve for each pivot column using the row echelon form.
        // Build rref by rank-revealing: reuse kernel_basis of rm^T? Simpler:
        // Solver of rm^T gives little; do direct elimination here.
        std::vector<std::vector<unsigned>> rows = rel;
        std::size_t r = 0;
        std::vector<std::pair<std::size_t, std::size_t>> pivot_rows;  // (row, col)
        for (std::size_t c = 0; c < m && r < rows.size(); ++c) {
          std::size_t sel = r;
          while (sel < rows.size() && rows[sel][c] == 0) ++sel;
          if (sel == rows.size()) continue;
          std::swap(rows[sel], rows[r]);
          // normalize
          unsigned inv = 1;
          {
            unsigned v = rows[r][c] % p_, e = p_ - 2, acc = 1, basev = v;
            while (e) {
              if (e & 1) acc = acc * basev % p_;
              basev = basev * basev % p_;
              e >>= 1;
            }
            inv = acc;
          }
          for (auto& x : rows[r]) x = x * inv % p_;
          for (std::size_t rr2 = 0; rr2 < rows.size(); ++rr2) {
            if (rr2 == r || rows[rr2][c] == 0) continue;
            const unsigned f = rows[rr2][c];
            for (std::size_t cc = 0; cc < m; ++cc)
              rows[rr2][cc] = (rows[rr2][cc] + (p_ - f) * rows[r][cc]) % p_;
          }
          pivot_rows.push_back({r, c});
          ++r;
        }
        std::map<std::size_t, std::size_t> kept_index;
        for (std::size_t j = 0; j < qd; ++j) kept_index[q.keep[j]] = j;
        for (std::size_t j = 0; j < qd; ++j) q.pi.set(j, q.keep[j], 1);
        for (const auto& [prow, pcol] : pivot_rows) {
          // e_{pcol} ≡ -sum_{kept c} rows[prow][c] e_c
          for (std::size_t c = 0; c < m; ++c) {
            if (c == pcol || rows[prow][c] == 0) continue;
            auto it = kept_index.find(c);
            if (it == kept_index.end())
              continue;  // other pivot columns have zero entries after rref
            q.pi.set(it->second, pcol, (p_ - rows[prow][c]) % p_);
          }
        }
      }
      quots[{n, o}] = std::move(q);
    }

  ChainDiagram apex;
  apex.base = z.base;
  apex.p = p_;
  apex.lo = lo;
  apex.hi = hi;
  for (int n = lo; n <= hi; ++n) {
    ModuleDiagram level = zero_module(z.base, p_);
    const ModuleDiagram z_level = z.at(n);
    const ModuleDiagram b_level = b.at(n);
    for (const auto& o : z.base.objects) {
      const auto& q = quots.at({n, o});
      const std::size_t zd = z.dim(n, o);
      for (auto c : q.keep) {
        if (c < zd)
          level.basis[o].push_back("z." + z_level.basis.at(o)[c]);
        else
          level.basis[o].push_back("c." + b_level.basis.at(o)[c - zd]);
      }
    }
    for (const auto& id : z.base.non_identity_morphisms()) {
      const auto& mor = z.base.mor(id);
      const auto& qs = quots.at({n, mor.src});
      const auto& qt = quots.at({n, mor.tgt});
      const fp::Mat big = z.at(n).act(id).dsum(b.at(n).act(id));
      level.action[id] = qt.pi * big * qs.section;
    }
    apex.level[n] = level;
  }
  for (int n = lo + 1; n <= hi; ++n) {
    ModuleMap d;
    for (const auto& o : z.base.objects) {
      const auto& qn = quots.at({n, o});
      const auto& qn1 = quots.at({n - 1, o});
      const fp::Mat big = z.diff_mat(n, o).dsum(b.diff_mat(n, o));
      d.comp[o] = qn1.pi * big * qn.section;
    }
    apex.diff[n] = d;
  }
  const soa::Obj apex_obj = add_object(apex);

  ChainMap from_z, from_b;
  for (int n = lo; n <= hi; ++n) {
    ModuleMap mz, mb;
    bool nz = false, nb = false;
    for (const auto& o : z.base.objects) {
      const auto& q = quots.at({n, o});
      const std::size_t zd = z.dim(n, o), bd = b.dim(n, o);
      fp::Mat iz = fp::Mat::zero(zd + bd, zd, p_);
      for (std::size_t i = 0; i < zd; ++i) iz.set(i, i, 1);
      fp::Mat ib = fp::Mat::zero(zd + bd, bd, p_);
      for (std::size_t i = 0; i < bd; ++i) ib.set(zd + i, i, 1);
      mz.comp[o] = q.pi * iz;
      mb.comp[o] = q.pi * ib;
      if (!mz.comp[o].is_zero()) nz = true;
      if (!mb.comp[o].is_zero()) nb = true;
    }
    if (nz) from_z.comp[n] = std::move(mz);
    if (nb) from_b.comp[n] = std::move(mb);
  }
  return {apex_obj, add_map({maps_[attach.ix].dst}, apex_obj, std::move(from_z)),
          add_map({maps_[cells.ix].dst}, apex_obj, std::move(from_b))};
}

soa::Map ChainAdapter::pushout_induced(const Pushout& po, soa::Map base_leg, soa::Map cells_leg) {
  const ChainDiagram& apex = objs_[po.apex.ix];
  const ChainDiagram& z = objs_[maps_[po.from_base.ix].src];
  const ChainDiagram& b = objs_[maps_[po.from_cells.ix].src];
  const ChainDiagram& t = objs_[maps_[base_leg.ix].dst];
  const ChainMap& u = maps_[base_leg.ix].fn;
  const ChainMap& v = maps_[cells_leg.ix].fn;
  ChainMap f;
  for (int n = apex.lo; n <= apex.hi; ++n) {
    ModuleMap m;
    bool nonzero = false;
    const ModuleDiagram apex_level = apex.at(n);
    const ModuleDiagram z_level = z.at(n);
    const ModuleDiagram b_level = b.at(n);
    for (const auto& o : apex.base.objects) {
      const std::size_t zd = z.dim(n, o);
      fp::Mat out = fp::Mat::zero(t.dim(n, o), apex.dim(n, o), p_);
      const fp::Mat um = u.at(n, o, t.dim(n, o), zd, p_);
      const fp::Mat vm = v.at(n, o, t.dim(n, o), b.dim(n, o), p_);
      static const std::vector<std::string> kEmpty;
      const auto& labels = apex_level.basis.count(o) ? apex_level.basis.at(o) : kEmpty;
      for (std::size_t j = 0; j < labels.size(); ++j) {
        const std::string& l = labels[j];
        if (l.rfind("z.", 0) == 0) {
          const auto& zl = z_level.basis.at(o);
          const auto it = std::find(zl.begin(), zl.end(), l.substr(2));
          const std::size_t c = static_cast<std::size_t>(it - zl.begin());
          for (std::size_t i = 0; i < out.rows(); ++i) out.set(i, j, um.at(i, c));
        } else {
          const auto& bl = b_level.basis.at(o);
          const auto it = std::find(bl.begin(), bl.end(), l.substr(2));
          const std::size_t c = static_cast<std::size_t>(it - bl.begin());
          for (std::size_t i = 0; i < out.rows(); ++i) out.set(i, j, vm.at(i, c));
        }
      }
      if (!out.is_zero()) nonzero = true;
      m.comp[o] = out;
    }
    if (nonzero) f.comp[n] = std::move(m);
  }
  return add_map(po.apex, dst(base_leg), std::move(f));
}

std::optional<soa::Map> ChainAdapter::find_lift(soa::Map l, soa::Map top, soa::Map p,
                                                soa::Map bottom) {
  const ChainDiagram& dom = objs_[maps_[l.ix].dst];
  const ChainDiagram& cod = objs_[maps_[p.ix].src];
  const ChainDiagram& w = objs_[maps_[p.ix].dst];
  const ChainDiagram& e = objs_[maps_[l.ix].src];
  auto h = solve_chain_hom(dom, cod, &w, &maps_[p.ix].fn, &maps_[bottom.ix].fn, &e,
                           &maps_[l.ix].fn, &maps_[top.ix].fn);
  if (!h) return std::nullopt;
  return add_map(dst(l), src(p), std::move(*h));
}

std::optional<soa::Map> ChainAdapter::factor_through(soa::Map map, soa::Map via) {
  const ChainDiagram& dom = objs_[maps_[map.ix].src];
  const ChainDiagram& cod = objs_[maps_[via.ix].src];
  const ChainDiagram& w = objs_[maps_[via.ix].dst];
  // h : dom -> cod with via∘h = map.
  ChainMap empty_map;
  auto h = solve_chain_hom(dom, cod, &w, &maps_[via.ix].fn, &maps_[map.ix].fn, nullptr, nullptr,
                           nullptr);
  (void)empty_map;
  if (!h) return std::nullopt;
  return add_map(src(map), src(via), std::move(*h));
}

nlohmann::ordered_json ChainAdapter::obj_payload(soa::Obj o) const {
  return chain_to_json(objs_[o.ix]);
}

nlohmann::ordered_json ChainAdapter::map_payload(soa::Map m) const {
  return chain_map_to_json(objs_[maps_[m.ix].src], objs_[maps_[m.ix].dst], maps_[m.ix].fn);
}

// ---------------------------------------------------------------------------
// Matching systems

std::vector<fincat::Orbit> instance_orbits(const ChainAdapter& a, soa::Map f, std::size_t cap) {
  const ChainDiagram& x = a.chain(a.src(f));
  const ChainDiagram& y = a.chain(a.dst(f));
  std::vector<fincat::Orbit> pool;
  std::set<std::string> seen;
  auto add_orbits_of = [&](const ModuleDiagram& m) {
    fincat::SetDiagram um;
    try {
      um = underlying_sets(m, cap);
    } catch (const std::exception&) {
      return;  // cap guard: skip oversized instance levels
    }
    const auto col = fincat::colim_set(um);
    for (const auto& pt : col.apex) {
      fincat::Orbit orb = fincat::orbit_over_point(um, pt);
      const std::string sig = canonical_orbit_signature(orb.diagram);
      if (seen.insert(sig).second) pool.push_back(std::move(orb));
    }
  };
  // The constant singleton orbit probes the objectwise structure everywhere.
  {
    fincat::SetDiagram one;
    one.base = x.base;
    for (const auto& o : x.base.objects) one.value[o] = {Elem{o, "pt"}};
    for (const auto& id : x.base.non_identity_morphisms()) {
      const auto& mor = x.base.mor(id);
      one.action[id][Elem{mor.src, "pt"}] = Elem{mor.tgt, "pt"};
    }
    if (fincat::is_orbit(one)) {
      fincat::Orbit orb{one, fincat::identity_map(one), fincat::colim_set(one).apex.front()};
      const std::string sig = canonical_orbit_signature(one);
      if (seen.insert(sig).second) pool.push_back(std::move(orb));
    }
  }
  for (int n = x.lo; n <= x.hi; ++n) add_orbits_of(x.at(n));
  for (int n = y.lo; n <= y.hi; ++n) add_orbits_of(y.at(n));
  const ChainMap& fm = a.chain_map(f);
  for (int n = std::min(x.lo, y.lo); n <= std::max(x.hi, y.hi) + 1; ++n) {
    MatchingObject mo = matching_w(x, y, fm, n);
    if (mo.w.total_dim() > 0) add_orbits_of(mo.w);
  }
  return pool;
}

EquiMatchingSystem::EquiMatchingSystem(ChainAdapter& a, CellClass cls, soa::Map f)
    : a_(a), cls_(cls), f_(f) {
  pool_ = instance_orbits(a_, f_);
}

namespace {

MatchingObject j_matching_object(const ChainDiagram& y, int n) {
  MatchingObject mo;
  mo.w = y.at(n);
  mo.to_y = identity_module_map(mo.w);
  for (const auto& o : y.base.objects)
    mo.to_x.comp[o] = fp::Mat::zero(0, mo.w.dim(o), y.p);
  return mo;
}

}  // namespace

std::vector<soa::GenSquare> EquiMatchingSystem::failures_impl(soa::Map rho, bool stop_at_first) {
  // Copies: build_square below grows the adapter arenas.
  const ChainDiagram z = a_.chain(a_.src(rho));
  const ChainDiagram y = a_.chain(a_.dst(rho));
  const ChainMap rm = a_.chain_map(rho);
  std::vector<soa::GenSquare> out;

  const int nlo = std::min(z.lo, y.lo);
  const int nhi = std::max(z.hi, y.hi) + 1;
  for (int n = nlo; n <= nhi; ++n) {
    MatchingObject mo =
        cls_ == CellClass::I ? matching_w(z, y, rm, n) : j_matching_object(y, n);
    if (mo.w.total_dim() == 0) continue;
    for (const auto& t : pool_) {
      const ModuleDiagram pt = free_on_orbit(t, a_.p());
      if (pt.total_dim() == 0) continue;
      HomSpace hom_pw = module_hom_space(pt, mo.w);
      if (hom_pw.dimension() == 0) continue;
      HomSpace hom_pz = module_hom_space(pt, z.at(n));
      // lambda: u -> classifier(d∘u, rho∘u) in hom_pw coordinates.
      fp::Mat lambda(hom_pw.dimension(), hom_pz.dimension(), a_.p());
      for (std::size_t i = 0; i < hom_pz.dimension(); ++i) {
        const ModuleMap u = hom_pz.basis_element(i);
        ModuleMap du, ru;
        for (const auto& o : z.base.objects) {
          const fp::Mat um = u.at(o, z.dim(n, o), pt.dim(o), a_.p());
          du.comp[o] = z.diff_mat(n, o) * um;
          ru.comp[o] = rm.at(n, o, y.dim(n, o), z.dim(n, o), a_.p()) * um;
        }
        auto phi = cls_ == CellClass::I ? w_classifier(mo, pt, du, ru)
                                        : std::optional<ModuleMap>(ru);
        if (!phi) throw std::logic_error("equichain: lift image escaped the matching object");
        auto c = hom_pw.coords(*phi);
        if (!c) throw std::logic_error("equichain: classifier escaped the hom space");
        for (std::size_t r = 0; r < hom_pw.dimension(); ++r) lambda.set(r, i, c->at(r, 0));
      }
      // Greedy cokernel representatives: hom basis directions not reached.
      fp::Mat span = lambda;
      for (std::size_t j = 0; j < hom_pw.dimension(); ++j) {
        fp::Mat ej = fp::Mat::zero(hom_pw.dimension(), 1, a_.p());
        ej.set(j, 0, 1);
        if (fp::Solver(span).solve(ej)) continue;
        span = span.hcat(ej);
        // Build the generator square of this failing direction.
        const ModuleMap phi = hom_pw.basis_element(j);
        ModuleMap apart, bpart;
        for (const auto& o : z.base.objects) {
          const std::size_t wd = mo.w.dim(o);
          const fp::Mat pm = phi.at(o, wd, pt.dim(o), a_.p());
          if (cls_ == CellClass::I) {
            apart.comp[o] = mo.to_x.comp.count(o)
                                ? mo.to_x.comp.at(o) * pm
                                : fp::Mat::zero(z.dim(n - 1, o), pt.dim(o), a_.p());
          }
          bpart.comp[o] = mo.to_y.comp.count(o)
                              ? mo.to_y.comp.at(o) * pm
                              : fp::Mat::zero(y.dim(n, o), pt.dim(o), a_.p());
        }
        out.push_back(build_square(rho, pt, n, apart, bpart));
        if (stop_at_first) return out;
      }
    }
  }
  return out;
}

soa::GenSquare EquiMatchingSystem::build_square(soa::Map rho, const ModuleDiagram& pt, int n,
                                                const ModuleMap& apart, const ModuleMap& bpart) {
  const ChainDiagram z = a_.chain(a_.src(rho));
  const ChainDiagram y = a_.chain(a_.dst(rho));
  ChainDiagram sph = cls_ == CellClass::I
                         ? sphere(pt, n)
                         : ChainDiagram{pt.base, pt.p, 0, -1, {}, {}};
  ChainDiagram dsk = disk(pt, n);
  const soa::Obj so = a_.add_object(sph);
  const soa::Obj dk = a_.add_object(dsk);
  ChainMap genf;
  if (cls_ == CellClass::I) genf = sphere_to_disk(pt, n);
  const soa::Map gen = a_.add_map(so, dk, genf);

  ChainMap topf;
  if (cls_ == CellClass::I) {
    ModuleMap m;
    for (const auto& o : z.base.objects)
      m.comp[o] = apart.at(o, z.dim(n - 1, o), pt.dim(o), pt.p);
    topf.comp[n - 1] = m;
  }
  const soa::Map top = a_.add_map(so, a_.src(rho), topf);

  ChainMap botf;
  ModuleMap bn, bn1;
  for (const auto& o : y.base.objects) {
    const fp::Mat bm = bpart.at(o, y.dim(n, o), pt.dim(o), pt.p);
    bn.comp[o] = bm;
    bn1.comp[o] = y.diff_mat(n, o) * bm;
  }
  botf.comp[n] = bn;
  botf.comp[n - 1] = bn1;
  const soa::Map bottom = a_.add_map(dk, a_.dst(rho), botf);
  return {gen, top, bottom};
}

std::vector<soa::GenSquare> EquiMatchingSystem::probe_failures(soa::Map rho) {
  return failures_impl(rho, false);
}

std::vector<soa::GenSquare> EquiMatchingSystem::aggregate(soa::Map rho) {
  return failures_impl(rho, false);
}

namespace {

int disk_top_degree(const ChainDiagram& d) { return d.hi; }

}  // namespace

std::optional<soa::MatchingSystem::SquareFactorization> EquiMatchingSystem::factor_square(
    const soa::GenSquare& sq, soa::Map rho, const soa::MatchData& m) {
  auto sol = solve_against_cells(sq, rho, m);
  if (!sol) return std::nullopt;
  return SquareFactorization{sol->first, sol->second};
}

std::optional<std::pair<soa::Map, soa::Map>> EquiMatchingSystem::solve_against_cells(
    const soa::GenSquare& sq, soa::Map rho, const soa::MatchData& m) {
  const ChainDiagram z = a_.chain(a_.src(rho));
  const ChainDiagram y = a_.chain(a_.dst(rho));
  const ChainMap rm = a_.chain_map(rho);
  const ChainDiagram dsk = a_.chain(a_.dst(sq.gen));
  const int n = disk_top_degree(dsk);
  const ModuleDiagram psq = dsk.at(n);

  MatchingObject mo = cls_ == CellClass::I ? matching_w(z, y, rm, n) : j_matching_object(y, n);
  HomSpace hom_pw = module_hom_space(psq, mo.w);

  // Classifier of sq.
  ModuleMap apart, bpart;
  const ChainMap topf = a_.chain_map(sq.top);
  const ChainMap botf = a_.chain_map(sq.bottom);
  for (const auto& o : z.base.objects) {
    apart.comp[o] = topf.at(n - 1, o, z.dim(n - 1, o), psq.dim(o), a_.p());
    bpart.comp[o] = botf.at(n, o, y.dim(n, o), psq.dim(o), a_.p());
  }
  auto phi_sq = cls_ == CellClass::I ? w_classifier(mo, psq, apart, bpart)
                                     : std::optional<ModuleMap>(bpart);
  if (!phi_sq) return std::nullopt;
  auto psi = hom_pw.coords(*phi_sq);
  if (!psi) return std::nullopt;

  // Unknown blocks: one hom space per same-degree cell.
  std::vector<std::size_t> cells;  // indices into m.squares
  std::vector<HomSpace> homs;
  std::vector<ModuleDiagram> pts;
  fp::Mat big(hom_pw.dimension(), 0, a_.p());
  for (std::size_t j = 0; j < m.squares.size(); ++j) {
    const ChainDiagram dj = a_.chain(a_.dst(m.squares[j].gen));
    if (disk_top_degree(dj) != n) continue;
    const ModuleDiagram pj = dj.at(n);
    HomSpace hj = module_hom_space(psq, pj);
    if (hj.dimension() == 0) continue;
    // Classifier of cell j.
    ModuleMap aj, bj;
    const ChainMap tj = a_.chain_map(m.squares[j].top);
    const ChainMap bjf = a_.chain_map(m.squares[j].bottom);
    for (const auto& o : z.base.objects) {
      aj.comp[o] = tj.at(n - 1, o, z.dim(n - 1, o), pj.dim(o), a_.p());
      bj.comp[o] = bjf.at(n, o, y.dim(n, o), pj.dim(o), a_.p());
    }
    auto phi_j = cls_ == CellClass::I ? w_classifier(mo, pj, aj, bj)
                                      : std::optional<ModuleMap>(bj);
    if (!phi_j) return std::nullopt;
    // Columns: coords(phi_j ∘ basis element of Hom(psq, pj)).
    fp::Mat lj(hom_pw.dimension(), hj.dimension(), a_.p());
    for (std::size_t i = 0; i < hj.dimension(); ++i) {
      const ModuleMap w = hj.basis_element(i);
      const ModuleMap comp = compose_module_maps(psq, pj, mo.w, *phi_j, w);
      auto c = hom_pw.coords(comp);
      if (!c) return std::nullopt;
      for (std::size_t r = 0; r < hom_pw.dimension(); ++r) lj.set(r, i, c->at(r, 0));
    }
    big = big.hcat(lj);
    cells.push_back(j);
    homs.push_back(std::move(hj));
    pts.push_back(pj);
  }
  auto x = fp::Solver(big).solve(*psi);
  if (!x) return std::nullopt;

  // Split the solution into per-cell module maps.
  std::vector<ModuleMap> ws(cells.size());
  std::size_t pos = 0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    fp::Mat c(homs[k].dimension(), 1, a_.p());
    for (std::size_t i = 0; i < homs[k].dimension(); ++i) c.set(i, 0, x->at(pos++, 0));
    ws[k] = homs[k].unflatten(homs[k].basis * c);
  }

  // Assemble u : sphere/empty -> dom_cop.apex and v : disk -> cod_cop.apex.
  const ChainDiagram dom_apex = a_.chain(m.dom_cop.apex);
  const ChainDiagram cod_apex = a_.chain(m.cod_cop.apex);
  auto offsets_at = [&](int deg, const std::string& o, bool dom_side) {
    // Offset of each summand's rows at (deg, o) in the coproduct layout.
    std::vector<std::size_t> off(m.squares.size() + 1, 0);
    for (std::size_t j = 0; j < m.squares.size(); ++j) {
      const ChainDiagram cj = a_.chain(dom_side ? a_.src(m.squares[j].gen)
                                                : a_.dst(m.squares[j].gen));
      off[j + 1] = off[j] + cj.dim(deg, o);
    }
    return off;
  };

  ChainMap uf, vf;
  if (cls_ == CellClass::I) {
    ModuleMap um;
    for (const auto& o : z.base.objects) {
      fp::Mat col = fp::Mat::zero(dom_apex.dim(n - 1, o), psq.dim(o), a_.p());
      const auto off = offsets_at(n - 1, o, true);
      for (std::size_t k = 0; k < cells.size(); ++k) {
        const fp::Mat wm = ws[k].at(o, pts[k].dim(o), psq.dim(o), a_.p());
        for (std::size_t i = 0; i < wm.rows(); ++i)
          for (std::size_t jj = 0; jj < wm.cols(); ++jj)
            col.set(off[cells[k]] + i, jj, wm.at(i, jj));
      }
      um.comp[o] = col;
    }
    uf.comp[n - 1] = um;
  }
  for (int deg : {n, n - 1}) {
    ModuleMap vm;
    for (const auto& o : z.base.objects) {
      fp::Mat col = fp::Mat::zero(cod_apex.dim(deg, o), psq.dim(o), a_.p());
      const auto off = offsets_at(deg, o, false);
      for (std::size_t k = 0; k < cells.size(); ++k) {
        const ChainDiagram dj = a_.chain(a_.dst(m.squares[cells[k]].gen));
        if (dj.dim(deg, o) == 0) continue;
        const fp::Mat wm = ws[k].at(o, pts[k].dim(o), psq.dim(o), a_.p());
        for (std::size_t i = 0; i < wm.rows(); ++i)
          for (std::size_t jj = 0; jj < wm.cols(); ++jj)
            col.set(off[cells[k]] + i, jj, wm.at(i, jj));
      }
      vm.comp[o] = col;
    }
    vf.comp[deg] = vm;
  }
  const soa::Map u = a_.add_map(a_.src(sq.gen), m.dom_cop.apex, std::move(uf));
  const soa::Map v = a_.add_map(a_.dst(sq.gen), m.cod_cop.apex, std::move(vf));

  // Contracts.
  if (!a_.equal(a_.compose(m.t_dom, u), sq.top)) return std::nullopt;
  if (!a_.equal(a_.compose(m.t_cod, v), sq.bottom)) return std::nullopt;
  if (!a_.equal(a_.compose(m.s, u), a_.compose(v, sq.gen))) return std::nullopt;
  return std::make_pair(u, v);
}

std::optional<soa::MatchingSystem::Transport> EquiMatchingSystem::transport(
    const soa::MapOfMaps& g, soa::Map xi, soa::Map rho1, soa::Map rho2,
    const soa::MatchData& m1, const soa::MatchData& m2) {
  (void)rho1;
  // Route each cell of m1 through m2's cells: transported squares must factor
  // through t(rho2); the canonical linear solve keeps transport compositional.
  std::vector<soa::Map> us, vs;
  for (const auto& sq : m1.squares) {
    const soa::Map top2 = a_.compose(xi, sq.top);
    const soa::Map bot2 = a_.compose(g.bottom, sq.bottom);
    soa::GenSquare tsq{sq.gen, top2, bot2};
    auto sol = solve_against_cells(tsq, rho2, m2);
    if (!sol) return std::nullopt;
    us.push_back(sol->first);
    vs.push_back(sol->second);
  }
  // h1 = fold of u-legs, h2 = fold of v-legs over m1's coproducts.
  soa::Map h1 = a_.fold(m1.dom_cop, us);
  soa::Map h2 = a_.fold(m1.cod_cop, vs);
  return Transport{h1, h2};
}

std::vector<soa::GenSquare> EquiMatchingSystem::orbit_family(soa::Map rho, std::size_t cap) {
  const ChainDiagram z = a_.chain(a_.src(rho));
  const ChainDiagram y = a_.chain(a_.dst(rho));
  const ChainMap rm = a_.chain_map(rho);
  std::vector<soa::GenSquare> out;
  const int nlo = std::min(z.lo, y.lo);
  const int nhi = std::max(z.hi, y.hi) + 1;
  for (int n = nlo; n <= nhi; ++n) {
    MatchingObject mo = cls_ == CellClass::I ? matching_w(z, y, rm, n) : j_matching_object(y, n);
    if (mo.w.total_dim() == 0) continue;
    const fincat::SetDiagram uw = underlying_sets(mo.w, cap);
    const auto col = fincat::colim_set(uw);
    for (const auto& pt : col.apex) {
      const fincat::Orbit orb = fincat::orbit_over_point(uw, pt);
      const ModuleDiagram po = free_on_orbit(orb, a_.p());
      const ModuleMap phi = adjoint_module_map(orb.diagram, mo.w, orb.projection);
      ModuleMap apart, bpart;
      for (const auto& o : z.base.objects) {
        const fp::Mat pm = phi.at(o, mo.w.dim(o), po.dim(o), a_.p());
        if (cls_ == CellClass::I)
          apart.comp[o] = mo.to_x.comp.count(o)
                              ? mo.to_x.comp.at(o) * pm
                              : fp::Mat::zero(z.dim(n - 1, o), po.dim(o), a_.p());
        bpart.comp[o] = mo.to_y.comp.count(o)
                            ? mo.to_y.comp.at(o) * pm
                            : fp::Mat::zero(y.dim(n, o), po.dim(o), a_.p());
      }
      out.push_back(build_square(rho, po, n, apart, bpart));
    }
  }
  return out;
}

std::vector<soa::GenSquare> EquiMatchingSystem::squares_of_orbit(soa::Map rho,
                                                                 const fincat::Orbit& t, int n,
                                                                 std::size_t cap) {
  const ChainDiagram z = a_.chain(a_.src(rho));
  const ChainDiagram y = a_.chain(a_.dst(rho));
  const ChainMap rm = a_.chain_map(rho);
  MatchingObject mo = cls_ == CellClass::I ? matching_w(z, y, rm, n) : j_matching_object(y, n);
  const ModuleDiagram pt = free_on_orbit(t, a_.p());
  HomSpace hom_pw = module_hom_space(pt, mo.w);
  std::size_t count = 1;
  for (std::size_t i = 0; i < hom_pw.dimension(); ++i) {
    count *= a_.p();
    if (count > cap) throw std::runtime_error("equichain: square space exceeds cap");
  }
  std::vector<soa::GenSquare> out;
  for (const auto& c : fp::all_columns(hom_pw.dimension(), a_.p())) {
    const ModuleMap phi = hom_pw.unflatten(hom_pw.basis * c);
    ModuleMap apart, bpart;
    for (const auto& o : z.base.objects) {
      const fp::Mat pm = phi.at(o, mo.w.dim(o), pt.dim(o), a_.p());
      if (cls_ == CellClass::I)
        apart.comp[o] = mo.to_x.comp.count(o)
                            ? mo.to_x.comp.at(o) * pm
                            : fp::Mat::zero(z.dim(n - 1, o), pt.dim(o), a_.p());
      bpart.comp[o] = mo.to_y.comp.count(o)
                          ? mo.to_y.comp.at(o) * pm
                          : fp::Mat::zero(y.dim(n, o), pt.dim(o), a_.p());
    }
    out.push_back(build_square(rho, pt, n, apart, bpart));
  }
  return out;
}

FactorizeOutcome factorize_equivariant(ChainAdapter& a, soa::Map f, CellClass cls,
                                       const soa::Budget& b) {
  auto system = std::make_shared<EquiMatchingSystem>(a, cls, f);
  FactorizeOutcome out{soa::soa_factorize(a, *system, f, b), system};
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::ordered_json mat_to_json(const fp::Mat& m) {
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m.at(i, j));
    rows.push_back(row);
  }
  return nlohmann::ordered_json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

fp::Mat mat_from_json(const nlohmann::ordered_json& j, unsigned p) {
  fp::Mat m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(), p);
  const auto& data = j.at("data");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t jj = 0; jj < m.cols(); ++jj)
      m.set(i, jj, data.at(i).at(jj).get<unsigned>());
  return m;
}

}  // namespace

nlohmann::ordered_json chain_to_json(const ChainDiagram& x) {
  nlohmann::ordered_json j;
  j["p"] = x.p;
  j["lo"] = x.lo;
  j["hi"] = x.hi;
  auto& levels = j["levels"] = nlohmann::ordered_json::object();
  for (int n = x.lo; n <= x.hi; ++n) {
    auto lvl = nlohmann::ordered_json::object();
    for (const auto& o : x.base.objects) {
      auto m = nlohmann::ordered_json::object();
      auto b = nlohmann::ordered_json::array();
      const ModuleDiagram mod = x.at(n);
      if (mod.basis.count(o))
        for (const auto& l : mod.basis.at(o)) b.push_back(l);
      m["basis"] = b;
      lvl[o] = m;
    }
    auto acts = nlohmann::ordered_json::object();
    for (const auto& id : x.base.non_identity_morphisms()) acts[id] = mat_to_json(x.at(n).act(id));
    lvl["actions"] = acts;
    levels[std::to_string(n)] = lvl;
  }
  auto& diffs = j["differentials"] = nlohmann::ordered_json::object();
  for (int n = x.lo + 1; n <= x.hi; ++n) {
    auto d = nlohmann::ordered_json::object();
    for (const auto& o : x.base.objects) d[o] = mat_to_json(x.diff_mat(n, o));
    diffs[std::to_string(n)] = d;
  }
  return j;
}

ChainDiagram chain_from_json(const nlohmann::ordered_json& j, const fincat::FiniteCategory& base,
                             unsigned p) {
  ChainDiagram x;
  x.base = base;
  x.p = p;
  x.lo = j.at("lo").get<int>();
  x.hi = j.at("hi").get<int>();
  for (int n = x.lo; n <= x.hi; ++n) {
    const auto& lvl = j.at("levels").at(std::to_string(n));
    ModuleDiagram m = zero_module(base, p);
    for (const auto& o : base.objects) {
      if (!lvl.contains(o)) continue;
      for (const auto& l : lvl.at(o).at("basis")) m.basis[o].push_back(l.get<std::string>());
    }
    if (lvl.contains("actions"))
      for (const auto& id : base.non_identity_morphisms())
        if (lvl.at("actions").contains(id))
          m.action[id] = mat_from_json(lvl.at("actions").at(id), p);
    x.level[n] = m;
  }
  if (j.contains("differentials"))
    for (int n = x.lo + 1; n <= x.hi; ++n) {
      const std::string key = std::to_string(n);
      if (!j.at("differentials").contains(key)) continue;
      ModuleMap d;
      for (const auto& o : base.objects)
        if (j.at("differentials").at(key).contains(o))
          d.comp[o] = mat_from_json(j.at("differentials").at(key).at(o), p);
      x.diff[n] = d;
    }
  return x;
}

nlohmann::ordered_json chain_map_to_json(const ChainDiagram& x, const ChainDiagram& y,
                                         const ChainMap& f) {
  nlohmann::ordered_json j;
  auto& comps = j["components"] = nlohmann::ordered_json::object();
  const int lo = std::min(x.lo, y.lo), hi = std::max(x.hi, y.hi);
  for (int n = lo; n <= hi; ++n) {
    auto c = nlohmann::ordered_json::object();
    bool nonzero = false;
    for (const auto& o : x.base.objects) {
      const fp::Mat m = f.at(n, o, y.dim(n, o), x.dim(n, o), x.p);
      if (!m.is_zero()) nonzero = true;
      c[o] = mat_to_json(m);
    }
    if (nonzero) comps[std::to_string(n)] = c;
  }
  return j;
}

ChainMap chain_map_from_json(const nlohmann::ordered_json& j, unsigned p) {
  ChainMap f;
  if (!j.contains("components")) return f;
  for (auto it = j.at("components").begin(); it != j.at("components").end(); ++it) {
    const int n = std::stoi(it.key());
    ModuleMap m;
    for (auto jt = it.value().begin(); jt != it.value().end(); ++jt)
      m.comp[jt.key()] = mat_from_json(jt.value(), p);
    f.comp[n] = m;
  }
  return f;
}

}  // namespace soatk::equichain
