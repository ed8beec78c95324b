#include "soatk/soa.hpp"

#include <stdexcept>

namespace soatk::soa {

nlohmann::ordered_json CellAdapter::obj_payload(Obj o) const {
  return nlohmann::ordered_json{{"obj", o.ix}};
}

nlohmann::ordered_json CellAdapter::map_payload(Map m) const {
  return nlohmann::ordered_json{{"map", m.ix}};
}

namespace {

MatchData build_match(CellAdapter& a, Map rho, std::vector<GenSquare> squares) {
  MatchData md;
  md.squares = std::move(squares);
  std::vector<Obj> doms, cods;
  std::vector<Map> tops, bottoms, gens_to_cod;
  doms.reserve(md.squares.size());
  for (const auto& sq : md.squares) {
    doms.push_back(a.src(sq.gen));
    cods.push_back(a.dst(sq.gen));
  }
  md.dom_cop = a.coproduct(doms);
  md.cod_cop = a.coproduct(cods);
  for (std::size_t i = 0; i < md.squares.size(); ++i) {
    tops.push_back(md.squares[i].top);
    bottoms.push_back(md.squares[i].bottom);
    gens_to_cod.push_back(a.compose(md.cod_cop.in[i], md.squares[i].gen));
  }
  md.s = a.fold(md.dom_cop, gens_to_cod);
  md.t_dom = a.fold(md.dom_cop, tops);
  md.t_cod = a.fold(md.cod_cop, bottoms);
  (void)rho;
  return md;
}

void check_square(CellAdapter& a, Map p, const GenSquare& sq) {
  if (!a.equal(a.compose(p, sq.top), a.compose(sq.bottom, sq.gen)))
    throw EngineError("soa: input square does not commute");
}

}  // namespace

Map FactorizationCertificate::tail_inclusion(CellAdapter& a, std::size_t beta) const {
  Map acc = a.identity(stage_object(a, beta));
  for (std::size_t i = beta; i < stages.size(); ++i) acc = a.compose(stages[i].inclusion, acc);
  return acc;
}

Obj FactorizationCertificate::stage_object(CellAdapter& a, std::size_t beta) const {
  if (beta == 0) return domain;
  return a.dst(stages[beta - 1].inclusion);
}

FactorizationCertificate soa_factorize(CellAdapter& a, MatchingSystem& m, Map f,
                                       const Budget& b) {
  if (b.stage_limit < 0) throw EngineError("soa: negative stage limit");
  FactorizationCertificate cert;
  cert.f = f;
  cert.domain = a.src(f);
  cert.codomain = a.dst(f);

  Map rho = f;
  const bool use_probes = b.probes != "none";
  for (int beta = 0;; ++beta) {
    if (use_probes && m.probe_failures(rho).empty()) {
      cert.stabilized = true;
      break;
    }
    if (beta == b.stage_limit) {
      cert.stabilized = false;
      break;
    }
    StageRecord st;
    st.rho = rho;
    auto squares = m.aggregate(rho);
    if (squares.empty())
      throw EngineError("soa: matching system aggregated no squares while probes fail");
    for (const auto& sq : squares) check_square(a, rho, sq);
    st.match = build_match(a, rho, std::move(squares));
    st.po = a.pushout(st.match.s, st.match.t_dom);
    st.inclusion = st.po.from_base;
    st.rho_next = a.pushout_induced(st.po, rho, st.match.t_cod);
    rho = st.rho_next;
    cert.stages.push_back(std::move(st));
  }
  cert.stages_used = static_cast<int>(cert.stages.size());
  cert.delta = rho;

  Map gamma = a.identity(cert.domain);
  for (const auto& st : cert.stages) gamma = a.compose(st.inclusion, gamma);
  cert.gamma = gamma;

  if (!a.equal(a.compose(cert.delta, cert.gamma), f))
    throw EngineError("soa: exactness delta∘gamma = f failed");
  return cert;
}

std::vector<RlpResult> verify_rlp(CellAdapter& a, Map p, std::span<const GenSquare> squares) {
  std::vector<RlpResult> out;
  out.reserve(squares.size());
  for (const auto& sq : squares) {
    check_square(a, p, sq);
    RlpResult r{sq, std::nullopt, ""};
    r.lift = a.find_lift(sq.gen, sq.top, p, sq.bottom);
    if (r.lift) {
      // Both triangles exact by construction; re-check defensively.
      if (!a.equal(a.compose(*r.lift, sq.gen), sq.top) ||
          !a.equal(a.compose(p, *r.lift), sq.bottom))
        throw EngineError("soa: adapter returned an invalid lift");
    } else {
      r.counterexample = "exhausted";
    }
    out.push_back(std::move(r));
  }
  return out;
}

bool replay_certificate(CellAdapter& a, const FactorizationCertificate& c) {
  Map rho = c.f;
  Map gamma = a.identity(c.domain);
  for (const auto& st : c.stages) {
    if (!a.equal(rho, st.rho)) return false;
    MatchData md = build_match(a, rho, st.match.squares);
    if (!a.equal(md.s, st.match.s) || !a.equal(md.t_dom, st.match.t_dom) ||
        !a.equal(md.t_cod, st.match.t_cod))
      return false;
    auto po = a.pushout(md.s, md.t_dom);
    if (!a.equal(po.from_base, st.po.from_base) || !a.equal(po.from_cells, st.po.from_cells))
      return false;
    Map next = a.pushout_induced(po, rho, md.t_cod);
    if (!a.equal(next, st.rho_next)) return false;
    gamma = a.compose(po.from_base, gamma);
    rho = next;
  }
  if (!a.equal(gamma, c.gamma) || !a.equal(rho, c.delta)) return false;
  return a.equal(a.compose(c.delta, c.gamma), c.f);
}

LiftResult lift_through_factorization(CellAdapter& a, MatchingSystem& m,
                                      const FactorizationCertificate& c,
                                      const GenSquare& square) {
  if (!c.stabilized) throw EngineError("soa: lift extraction requires a stabilized certificate");
  check_square(a, c.delta, square);

  // Least stage where the top map factors through Z_beta -> Z_last.
  for (std::size_t beta = 0; beta <= c.stages.size(); ++beta) {
    const Map tail = c.tail_inclusion(a, beta);
    auto h_beta = a.factor_through(square.top, tail);
    if (!h_beta) continue;

    // rho_beta at this stage.
    const Map rho_beta = beta == c.stages.size() ? c.delta : c.stages[beta].rho;
    GenSquare at_stage{square.gen, *h_beta, square.bottom};
    if (!a.equal(a.compose(rho_beta, at_stage.top), a.compose(at_stage.bottom, at_stage.gen)))
      continue;  // factored top does not give a commuting square at this stage

    if (beta < c.stages.size()) {
      // The proof's route: factor through t(rho_beta), compose with the
      // stage cell inclusion B -> Z_{beta+1} -> Z_last.
      auto fac = m.factor_square(at_stage, rho_beta, c.stages[beta].match);
      if (fac) {
        const Map into_next = a.compose(c.stages[beta].po.from_cells, fac->v);
        const Map lift = a.compose(c.tail_inclusion(a, beta + 1), into_next);
        if (a.equal(a.compose(lift, square.gen), square.top) &&
            a.equal(a.compose(c.delta, lift), square.bottom))
          return {lift, beta, true};
      }
    }
    // The square already lifts against rho_beta; push the direct lift forward.
    if (auto d = a.find_lift(at_stage.gen, at_stage.top, rho_beta, at_stage.bottom)) {
      const Map lift = a.compose(tail, *d);
      if (a.equal(a.compose(lift, square.gen), square.top) &&
          a.equal(a.compose(c.delta, lift), square.bottom))
        return {lift, beta, false};
    }
  }
  throw EngineError("soa: no stage admits the factorization (smallness violated)");
}

InducedResult induced_map(CellAdapter& a, MatchingSystem& m, const MapOfMaps& g,
                          const FactorizationCertificate& c1,
                          const FactorizationCertificate& c2) {
  if (!m.functorial())
    throw EngineError("soa: induced_map refused, matching system is not functorial");
  if (!a.equal(a.compose(c2.f, g.top), a.compose(g.bottom, c1.f)))
    throw EngineError("soa: g is not a morphism of maps");

  const std::size_t n = std::max(c1.stages.size(), c2.stages.size());
  InducedResult res;
  res.xi.push_back(g.top);
  Map xi = g.top;

  for (std::size_t beta = 0; beta < n; ++beta) {
    const bool has1 = beta < c1.stages.size();
    const bool has2 = beta < c2.stages.size();
    if (!has1) {
      // Z1 is stable from here; only compose with c2's inclusion.
      xi = a.compose(c2.stages[beta].inclusion, xi);
    } else if (has2) {
      const auto& st1 = c1.stages[beta];
      const auto& st2 = c2.stages[beta];
      auto tr = m.transport(g, xi, st1.rho, st2.rho, st1.match, st2.match);
      if (!tr) throw EngineError("soa: transport failed at stage " + std::to_string(beta));
      // Contracts that make the induced pushout map well defined.
      if (!a.equal(a.compose(st2.match.t_dom, tr->h1), a.compose(xi, st1.match.t_dom)) ||
          !a.equal(a.compose(st2.match.t_cod, tr->h2), a.compose(g.bottom, st1.match.t_cod)) ||
          !a.equal(a.compose(st2.match.s, tr->h1), a.compose(tr->h2, st1.match.s)))
        throw EngineError("soa: transport contracts violated at stage " + std::to_string(beta));
      const Map base_leg = a.compose(st2.inclusion, xi);
      const Map cells_leg = a.compose(st2.po.from_cells, tr->h2);
      xi = a.pushout_induced(st1.po, base_leg, cells_leg);
    } else {
      // c2 is already stable: route each of c1's cells through a lift
      // against delta2 (exists by stabilization).
      const auto& st1 = c1.stages[beta];
      std::vector<Map> legs;
      legs.reserve(st1.match.squares.size());
      for (const auto& sq : st1.match.squares) {
        const Map top2 = a.compose(xi, sq.top);
        const Map bot2 = a.compose(g.bottom, sq.bottom);
        auto d = a.find_lift(sq.gen, top2, c2.delta, bot2);
        if (!d)
          throw EngineError("soa: stabilized target certificate rejects a transported square");
        legs.push_back(*d);
      }
      const Map cells_leg = a.fold(st1.match.cod_cop, legs);
      xi = a.pushout_induced(st1.po, xi, cells_leg);
    }
    res.xi.push_back(xi);
  }

  // Functoriality squares of the final map.
  if (!a.equal(a.compose(res.final(), c1.gamma), a.compose(c2.gamma, g.top)))
    throw EngineError("soa: xi does not commute with gamma");
  if (!a.equal(a.compose(c2.delta, res.final()), a.compose(g.bottom, c1.delta)))
    throw EngineError("soa: xi does not commute with delta");
  return res;
}

}  // namespace soatk::soa
