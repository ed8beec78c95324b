#pragma once

// Finite categories and set-valued diagrams: the combinatorial substrate.
// Elements are tagged (object, label) pairs so disjoint unions are canonical;
// colimit classes are named by their lexicographically least member.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vendor_json_fwd.hpp"

namespace soatk::fincat {

struct Morphism {
  std::string id, src, tgt;
  bool operator==(const Morphism& o) const = default;
};

struct FiniteCategory {
  std::vector<std::string> objects;
  std::vector<Morphism> morphisms;  // identities included
  std::map<std::string, std::string> identity;                        // object -> morphism id
  std::map<std::pair<std::string, std::string>, std::string> compose_table;  // (g, f) -> g∘f

  bool has_object(const std::string& o) const;
  const Morphism* find(const std::string& id) const;
  const Morphism& mor(const std::string& id) const;
  /// g∘f from the table; throws if the pair is absent.
  std::string compose(const std::string& g, const std::string& f) const;
  bool is_identity(const std::string& id) const;
  std::vector<std::string> non_identity_morphisms() const;
};

struct Violation {
  std::string law;
  std::string witness;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_category(const FiniteCategory& c);

/// Tagged element of a diagram's value set: (object id, label).
struct Elem {
  std::string obj, label;
  auto operator<=>(const Elem&) const = default;
  std::string str() const { return obj + ":" + label; }
};

struct SetDiagram {
  FiniteCategory base;
  std::map<std::string, std::vector<Elem>> value;          // object -> sorted elements
  std::map<std::string, std::map<Elem, Elem>> action;      // non-identity morphism -> function

  const std::vector<Elem>& at(const std::string& obj) const;
  /// Apply the action of morphism m (identities act trivially).
  Elem apply(const std::string& m, const Elem& e) const;
  std::size_t total_size() const;
  void sort_values();
};

ValidationReport validate_diagram(const SetDiagram& x);

struct DiagramMap {
  std::map<std::string, std::map<Elem, Elem>> comp;  // object -> function

  Elem apply(const Elem& e) const;
};

/// Every naturality square of f : a -> b commutes and components land in b.
ValidationReport validate_map(const SetDiagram& a, const SetDiagram& b, const DiagramMap& f);

DiagramMap identity_map(const SetDiagram& a);
DiagramMap compose_maps(const DiagramMap& g, const DiagramMap& f);

struct ColimitPresentation {
  std::vector<Elem> apex;                            // canonical class representatives, sorted
  std::map<std::string, std::map<Elem, Elem>> cocone;  // object -> value set -> apex
  std::vector<std::vector<Elem>> classes;            // partition certificate, sorted

  Elem apex_of(const Elem& e) const;
};

/// Coequalizer of the disjoint union by x ~ action(m)(x).
ColimitPresentation colim_set(const SetDiagram& x);

struct Orbit {
  SetDiagram diagram;
  DiagramMap projection;  // inclusion into the ambient diagram
  Elem point;             // apex element it lies over
};

/// Objectwise fiber of the colimit cocone over apex point p.
Orbit orbit_over_point(const SetDiagram& x, const Elem& p);

bool is_orbit(const SetDiagram& x);

struct PullbackResult {
  SetDiagram apex;
  DiagramMap to_a, to_b;
};

/// Objectwise fiber product of f : A -> C and g : B -> C.
PullbackResult pullback_set(const SetDiagram& a, const SetDiagram& b, const SetDiagram& c,
                            const DiagramMap& f, const DiagramMap& g);

// Small ready-made shapes used throughout tests and corpora.
FiniteCategory terminal_category();
FiniteCategory walking_arrow();   // a -> b
FiniteCategory span_category();   // a <- c -> b  (legs out of c)
FiniteCategory parallel_pair();   // a => b
FiniteCategory chain2();          // a -> b -> c

nlohmann::ordered_json category_to_json(const FiniteCategory& c);
FiniteCategory category_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json diagram_to_json(const SetDiagram& d);
SetDiagram diagram_from_json(const nlohmann::ordered_json& j, const FiniteCategory& base);

}  // namespace soatk::fincat
