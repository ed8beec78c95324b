#pragma once

// Diagrams of F_p vector spaces over a finite shape D, bounded chain
// complexes of them, orbit-free modules, resolutions, and the matching
// systems generated by sphere -> disk cells. Instantiates the factorization
// engine for both generating classes.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "soatk/fincat.hpp"
#include "soatk/fplin.hpp"
#include "soatk/soa.hpp"

namespace soatk::equichain {

struct ModuleDiagram {
  fincat::FiniteCategory base;
  unsigned p = 2;
  std::map<std::string, std::vector<std::string>> basis;  // object -> basis labels
  std::map<std::string, fp::Mat> action;                  // non-identity morphism -> matrix

  std::size_t dim(const std::string& obj) const;
  /// Action matrix of any morphism (identities included, composites allowed).
  fp::Mat act(const std::string& mor) const;
  std::size_t total_dim() const;
};

ModuleDiagram zero_module(const fincat::FiniteCategory& base, unsigned p);
fincat::ValidationReport validate_module(const ModuleDiagram& m);

/// Per-object matrices of a map of module diagrams; absent component = zero.
struct ModuleMap {
  std::map<std::string, fp::Mat> comp;

  fp::Mat at(const std::string& obj, std::size_t rows, std::size_t cols, unsigned p) const;
};

ModuleMap zero_module_map();
ModuleMap identity_module_map(const ModuleDiagram& m);
ModuleMap compose_module_maps(const ModuleDiagram& a, const ModuleDiagram& b,
                              const ModuleDiagram& c, const ModuleMap& g, const ModuleMap& f);
bool module_map_natural(const ModuleDiagram& dom, const ModuleDiagram& cod, const ModuleMap& f);
bool module_maps_equal(const ModuleDiagram& dom, const ModuleDiagram& cod, const ModuleMap& a,
                       const ModuleMap& b);
ModuleDiagram direct_sum(const ModuleDiagram& a, const ModuleDiagram& b, ModuleMap* in_a,
                         ModuleMap* in_b);

/// Flattening scheme for Hom(M, N): objects in base order, row-major entries.
struct HomSpace {
  ModuleDiagram dom, cod;
  fp::Mat basis;  // columns = basis vectors of the hom space, flat coordinates

  std::size_t flat_dim() const;
  std::size_t dimension() const { return basis.cols(); }
  ModuleMap unflatten(const fp::Mat& flat_col) const;
  fp::Mat flatten(const ModuleMap& f) const;
  ModuleMap basis_element(std::size_t i) const;
  /// Coordinates of f in this basis (solves; f must be natural).
  std::optional<fp::Mat> coords(const ModuleMap& f) const;
};

HomSpace module_hom_space(const ModuleDiagram& m, const ModuleDiagram& n);

/// Underlying set diagram U M: one tagged element per vector, label "v"+digits.
/// Guarded: throws when any value set would exceed the cap.
fincat::SetDiagram underlying_sets(const ModuleDiagram& m, std::size_t cap = 4096);

/// Vector of the element named by an underlying-set label.
fp::Mat vector_of_label(const ModuleDiagram& m, const std::string& obj, const std::string& label);

/// P_T = R(T): free module diagram on an orbit, 0/1 incidence actions.
ModuleDiagram free_on_orbit(const fincat::Orbit& t, unsigned p);
ModuleDiagram free_on_set_diagram(const fincat::SetDiagram& t, unsigned p);

/// Adjunction: module map P_T -> M from a set-diagram map T -> U M.
ModuleMap adjoint_module_map(const fincat::SetDiagram& t, const ModuleDiagram& m,
                             const fincat::DiagramMap& f);
/// All set-diagram maps T -> U M (backtracking; small instances only).
std::vector<fincat::DiagramMap> enumerate_set_maps(const fincat::SetDiagram& t,
                                                   const fincat::SetDiagram& um);

struct Resolution {
  ModuleDiagram px;
  ModuleMap eps;                      // px -> x
  std::vector<fincat::Orbit> orbits;  // one per apex point, in apex order
  std::vector<ModuleMap> inclusions;  // P_{T_x} -> px summand inclusions
};

/// P X = ⊕_x P_{T_x} over apex points of colim U X, eps induced by adjoints.
Resolution resolution(const ModuleDiagram& x);

/// psi with eps∘psi = phi, built by the chain T -> T_x -> U P_{T_x} -> U P X.
ModuleMap factor_through_resolution(const fincat::Orbit& t, const ModuleMap& phi,
                                    const ModuleDiagram& x, const Resolution& res);

// ---------------------------------------------------------------------------
// Chain complexes of module diagrams.

struct ChainDiagram {
  fincat::FiniteCategory base;
  unsigned p = 2;
  int lo = 0, hi = -1;                 // empty range = zero complex
  std::map<int, ModuleDiagram> level;  // degree -> module diagram
  std::map<int, ModuleMap> diff;       // d_n : X_n -> X_{n-1}

  ModuleDiagram at(int n) const;  // zero module outside the range
  std::size_t dim(int n, const std::string& obj) const;
  fp::Mat diff_mat(int n, const std::string& obj) const;
};

fincat::ValidationReport validate_chain(const ChainDiagram& x);

struct ChainMap {
  std::map<int, ModuleMap> comp;  // absent degree = zero

  fp::Mat at(int n, const std::string& obj, std::size_t rows, std::size_t cols, unsigned p) const;
};

bool chain_map_valid(const ChainDiagram& x, const ChainDiagram& y, const ChainMap& f);
bool chain_maps_equal(const ChainDiagram& x, const ChainDiagram& y, const ChainMap& a,
                      const ChainMap& b);
ChainMap compose_chain_maps(const ChainDiagram& x, const ChainDiagram& y, const ChainDiagram& z,
                            const ChainMap& g, const ChainMap& f);
ChainMap identity_chain_map(const ChainDiagram& x);

/// Sphere and disk on a module diagram: P concentrated in degree n-1, and
/// P in degrees n, n-1 with the identity differential.
ChainDiagram sphere(const ModuleDiagram& p_t, int n);
ChainDiagram disk(const ModuleDiagram& p_t, int n);
ChainMap sphere_to_disk(const ModuleDiagram& p_t, int n);

/// Homology dimensions per degree at one object (exact ranks).
std::map<int, std::size_t> homology_dims(const ChainDiagram& x, const std::string& obj);
/// Induced map on homology is an isomorphism at every object and degree.
bool is_quasi_iso(const ChainDiagram& x, const ChainDiagram& y, const ChainMap& f);
bool is_levelwise_surjection(const ChainDiagram& x, const ChainDiagram& y, const ChainMap& f);

/// Degreewise hom complex hom(P_T, X) with induced differentials, presented
/// over the terminal shape.
ChainDiagram hom_orbit_complex(const fincat::Orbit& t, const ChainDiagram& x);

// ---------------------------------------------------------------------------
// The cell adapter and matching systems.

class ChainAdapter : public soa::CellAdapter {
 public:
  explicit ChainAdapter(unsigned p) : p_(p) {}

  soa::Obj add_object(ChainDiagram x);
  soa::Map add_map(soa::Obj s, soa::Obj d, ChainMap f);
  const ChainDiagram& chain(soa::Obj o) const { return objs_[o.ix]; }
  const ChainMap& chain_map(soa::Map m) const { return maps_[m.ix].fn; }
  unsigned p() const { return p_; }

  soa::Obj src(soa::Map m) const override { return {maps_[m.ix].src}; }
  soa::Obj dst(soa::Map m) const override { return {maps_[m.ix].dst}; }
  soa::Map identity(soa::Obj o) override;
  soa::Map compose(soa::Map g, soa::Map f) override;
  bool equal(soa::Map a, soa::Map b) const override;
  Coproduct coproduct(std::span<const soa::Obj> parts) override;
  soa::Map fold(const Coproduct& cop, std::span<const soa::Map> legs) override;
  Pushout pushout(soa::Map cells, soa::Map attach) override;
  soa::Map pushout_induced(const Pushout& po, soa::Map base_leg, soa::Map cells_leg) override;
  std::optional<soa::Map> find_lift(soa::Map l, soa::Map top, soa::Map p,
                                    soa::Map bottom) override;
  std::optional<soa::Map> factor_through(soa::Map map, soa::Map via) override;

  nlohmann::ordered_json obj_payload(soa::Obj) const override;
  nlohmann::ordered_json map_payload(soa::Map) const override;

 private:
  struct MapData {
    std::size_t src, dst;
    ChainMap fn;
  };
  unsigned p_;
  std::vector<ChainDiagram> objs_;
  std::vector<MapData> maps_;
};

/// The matching object of degree n for rho : Z -> Y, with its projections:
/// W_n = Z_{n-1}(Z) ×_{Y_{n-1}} Y_n. The cycle restriction on the domain
/// side is what makes generator squares biject with maps T -> U W_n.
struct MatchingObject {
  ModuleDiagram w;
  ModuleMap to_x;  // lands in degree n-1 cycles of the domain
  ModuleMap to_y;  // lands in Y_n
};

MatchingObject matching_w(const ChainDiagram& z, const ChainDiagram& y, const ChainMap& rho,
                          int n);

enum class CellClass { I, J };

/// Probe pool: deduplicated instance orbits (from colim U of the levels of
/// X, Y and the matching objects of f) plus the constant singleton orbit.
std::vector<fincat::Orbit> instance_orbits(const ChainAdapter& a, soa::Map f,
                                           std::size_t cap = 4096);

class EquiMatchingSystem : public soa::MatchingSystem {
 public:
  EquiMatchingSystem(ChainAdapter& a, CellClass cls, soa::Map f);

  bool functorial() const override { return true; }
  std::vector<soa::GenSquare> probe_failures(soa::Map rho) override;
  std::vector<soa::GenSquare> aggregate(soa::Map rho) override;
  std::optional<SquareFactorization> factor_square(const soa::GenSquare& sq, soa::Map rho,
                                                   const soa::MatchData& m) override;
  std::optional<Transport> transport(const soa::MapOfMaps& g, soa::Map xi, soa::Map rho1,
                                     soa::Map rho2, const soa::MatchData& m1,
                                     const soa::MatchData& m2) override;

  CellClass cell_class() const { return cls_; }
  const std::vector<fincat::Orbit>& probe_pool() const { return pool_; }

  /// The paper's full family for rho: one sphere->disk (class I) or 0->disk
  /// (class J) square per degree and per apex point of the relevant colimit.
  /// Cap-guarded; intended for input-sized maps.
  std::vector<soa::GenSquare> orbit_family(soa::Map rho, std::size_t cap = 4096);

  /// All generator squares of one probe orbit in a given degree, enumerated
  /// as points of the square space (cap-guarded).
  std::vector<soa::GenSquare> squares_of_orbit(soa::Map rho, const fincat::Orbit& t, int n,
                                               std::size_t cap = 4096);

 private:
  std::vector<soa::GenSquare> failures_impl(soa::Map rho, bool stop_at_first);
  soa::GenSquare build_square(soa::Map rho, const ModuleDiagram& pt, int n, const ModuleMap& apart,
                              const ModuleMap& bpart);
  std::optional<std::pair<soa::Map, soa::Map>> solve_against_cells(const soa::GenSquare& sq,
                                                                   soa::Map rho,
                                                                   const soa::MatchData& m);

  ChainAdapter& a_;
  CellClass cls_;
  soa::Map f_;
  std::vector<fincat::Orbit> pool_;
};

struct FactorizeOutcome {
  soa::FactorizationCertificate certificate;
  std::shared_ptr<EquiMatchingSystem> system;
};

/// soa_factorize with the class-I or class-J system of f.
FactorizeOutcome factorize_equivariant(ChainAdapter& a, soa::Map f, CellClass cls,
                                       const soa::Budget& b);

nlohmann::ordered_json chain_to_json(const ChainDiagram& x);
ChainDiagram chain_from_json(const nlohmann::ordered_json& j, const fincat::FiniteCategory& base,
                             unsigned p);
nlohmann::ordered_json chain_map_to_json(const ChainDiagram& x, const ChainDiagram& y,
                                         const ChainMap& f);
ChainMap chain_map_from_json(const nlohmann::ordered_json& j, unsigned p);

}  // namespace soatk::equichain
