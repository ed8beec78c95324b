#pragma once

// The generic factorization engine: iterate pushouts of matched cell maps
// to a budgeted stage, certify the result, extract lifts, and build the
// induced maps between factorizations of a functorial matching system.
//
// The engine is written against an abstract CellAdapter. Adapters with
// dual() == true implement the coproduct/pushout/colimit slots by products,
// pullbacks and limits; the engine code is unchanged and the certificate is
// then read in the opposite category.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vendor_json_fwd.hpp"

namespace soatk::soa {

struct Obj {
  std::size_t ix{static_cast<std::size_t>(-1)};
  bool valid() const { return ix != static_cast<std::size_t>(-1); }
};
struct Map {
  std::size_t ix{static_cast<std::size_t>(-1)};
  bool valid() const { return ix != static_cast<std::size_t>(-1); }
};

class CellAdapter {
 public:
  virtual ~CellAdapter() = default;

  /// True when (coproduct, pushout, colimit) are realized by
  /// (product, pullback, limit) of the underlying category.
  virtual bool dual() const { return false; }

  virtual Obj src(Map) const = 0;
  virtual Obj dst(Map) const = 0;
  virtual Map identity(Obj) = 0;
  virtual Map compose(Map g, Map f) = 0;  // g after f
  virtual bool equal(Map, Map) const = 0;

  struct Coproduct {
    Obj apex;
    std::vector<Map> in;  // component -> apex
  };
  virtual Coproduct coproduct(std::span<const Obj> parts) = 0;
  /// Universal map out of a coproduct given one leg per component.
  virtual Map fold(const Coproduct& cop, std::span<const Map> legs) = 0;

  struct Pushout {
    Obj apex;
    Map from_base;   // Z -> apex
    Map from_cells;  // B -> apex
  };
  /// Pushout of cells : A -> B along attach : A -> Z.
  virtual Pushout pushout(Map cells, Map attach) = 0;
  /// Universal map out of a pushout; legs must commute with the span.
  virtual Map pushout_induced(const Pushout& po, Map base_leg, Map cells_leg) = 0;

  /// Diagonal d : dst(l) -> src(p) with d∘l = top and p∘d = bottom.
  virtual std::optional<Map> find_lift(Map l, Map top, Map p, Map bottom) = 0;
  /// Factor `map` through `via` (same codomain): h with via∘h = map.
  virtual std::optional<Map> factor_through(Map map, Map via) = 0;

  virtual std::string describe(Obj) const { return "obj"; }
  virtual nlohmann::ordered_json obj_payload(Obj) const;
  virtual nlohmann::ordered_json map_payload(Map) const;
};

/// A commuting square gen -> f: top : src(gen) -> src(f),
/// bottom : dst(gen) -> dst(f), with f∘top = bottom∘gen.
struct GenSquare {
  Map gen, top, bottom;
};

struct MatchData {
  std::vector<GenSquare> squares;  // the generator squares S(f) aggregates
  CellAdapter::Coproduct dom_cop;  // ∐ src(gen)
  CellAdapter::Coproduct cod_cop;  // ∐ dst(gen)
  Map s;                           // S(f) : dom_cop.apex -> cod_cop.apex
  Map t_dom;                       // dom_cop.apex -> src(f)
  Map t_cod;                       // cod_cop.apex -> dst(f)
};

struct MapOfMaps {
  Map top, bottom;  // f2∘top = bottom∘f1
};

class MatchingSystem {
 public:
  virtual ~MatchingSystem() = default;

  virtual bool functorial() const = 0;

  /// Probe squares of rho that currently admit no lift; empty means the
  /// stabilization test passes. This is the budget's probe set.
  virtual std::vector<GenSquare> probe_failures(Map rho) = 0;

  /// Squares whose cells the next stage attaches. Must be nonempty whenever
  /// probe_failures(rho) is, and every aggregated square factors through the
  /// resulting t by its own summand.
  virtual std::vector<GenSquare> aggregate(Map rho) = 0;

  /// Factor an arbitrary commuting generator square into rho through the
  /// stage's match data: returns (u, v) with t_dom∘u = top, t_cod∘v = bottom
  /// and s∘u = v∘gen. nullopt when the square does not factor.
  struct SquareFactorization {
    Map u, v;
  };
  virtual std::optional<SquareFactorization> factor_square(const GenSquare& sq, Map rho,
                                                           const MatchData& m) = 0;

  /// For functorial systems: carry stage data of rho1 across g to rho2.
  /// Returns (h1 : A1 -> A2, h2 : B1 -> B2) satisfying
  ///   t2_dom∘h1 = xi∘t1_dom, t2_cod∘h2 = g.bottom∘t1_cod, s2∘h1 = h2∘s1.
  struct Transport {
    Map h1, h2;
  };
  virtual std::optional<Transport> transport(const MapOfMaps& g, Map xi, Map rho1, Map rho2,
                                             const MatchData& m1, const MatchData& m2) {
    (void)g;
    (void)xi;
    (void)rho1;
    (void)rho2;
    (void)m1;
    (void)m2;
    return std::nullopt;
  }
};

struct Budget {
  int stage_limit = 8;
  /// "system": stabilization probes come from the matching system;
  /// "none": never test, run to the stage limit.
  std::string probes = "system";
};

struct StageRecord {
  Map rho;       // Z_beta -> Y before the step
  MatchData match;
  CellAdapter::Pushout po;
  Map inclusion;  // Z_beta -> Z_{beta+1} (= po.from_base)
  Map rho_next;   // Z_{beta+1} -> Y
};

struct FactorizationCertificate {
  Map f;
  Obj domain, codomain;
  std::vector<StageRecord> stages;
  Map gamma;  // X -> Z_last, composite of stage inclusions
  Map delta;  // rho at the last stage
  bool stabilized = false;
  int stages_used = 0;

  /// Composite Z_beta -> Z_last of the recorded inclusions.
  Map tail_inclusion(CellAdapter& a, std::size_t beta) const;
  /// Z_beta as an object (domain for beta == 0).
  Obj stage_object(CellAdapter& a, std::size_t beta) const;
};

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

FactorizationCertificate soa_factorize(CellAdapter& a, MatchingSystem& m, Map f, const Budget& b);

struct RlpResult {
  GenSquare square;
  std::optional<Map> lift;      // both triangles exact when present
  std::string counterexample;   // proof-of-exhaustion tag when absent
};

/// For each square, an explicit diagonal or a counterexample tag.
/// Throws EngineError on a non-commuting input square.
std::vector<RlpResult> verify_rlp(CellAdapter& a, Map p, std::span<const GenSquare> squares);

/// delta∘gamma == f and every recorded pushout re-executes to the same maps.
bool replay_certificate(CellAdapter& a, const FactorizationCertificate& c);

struct LiftResult {
  Map lift;
  std::size_t stage;            // stage where the top map factors
  bool via_cells;               // true: the proof's route through t and the cell inclusion
};

/// The proof's lift for a generator square into delta. Requires c.stabilized.
LiftResult lift_through_factorization(CellAdapter& a, MatchingSystem& m,
                                      const FactorizationCertificate& c, const GenSquare& square);

struct InducedResult {
  std::vector<Map> xi;  // xi_beta for beta = 0..max_stages, last entry final
  Map final() const { return xi.back(); }
};

/// Stagewise induced map xi^g between certificates of one functorial system.
/// Refuses (throws EngineError) for non-functorial systems.
InducedResult induced_map(CellAdapter& a, MatchingSystem& m, const MapOfMaps& g,
                          const FactorizationCertificate& c1, const FactorizationCertificate& c2);

}  // namespace soatk::soa
