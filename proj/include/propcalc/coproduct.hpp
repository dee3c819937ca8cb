#pragma once

// Elements of a coproduct P v Free(M) represented by graphs with two label
// alphabets: P-vertices carry elements of P = Free(atoms), M-vertices carry
// generator names. Collapsing merges pairs of P-vertices into one.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "propcalc/free_prop.hpp"

namespace propcalc {

struct MixedGraph {
  Graph graph;  // vertex labels are ignored
  std::map<int, PropElement> p_labels;
  std::map<int, std::string> m_labels;

  bool is_p(int id) const { return p_labels.count(id) > 0; }
  /// Throws InvalidGraph unless the graph is valid, labels partition the
  /// vertices and P-label boundaries match vertex arities.
  void check() const;

  friend bool operator==(const MixedGraph&, const MixedGraph&) = default;
  friend auto operator<=>(const MixedGraph&, const MixedGraph&) = default;
};

/// JSON: the graph format with "alphabet": "P"|"M" per vertex. A P-vertex
/// carries either "label" (an atom, read as its corolla) or "element" (a
/// labeled graph).
MixedGraph mixed_from_json(const Json& j);
Json mixed_to_json(const MixedGraph& g);

/// Canonical representative: P-labels are normalized under the action of
/// the symmetric groups on their boundary (rewiring the host ports to
/// match), then the host graph is canonicalized.
MixedGraph canonical_mixed(const MixedGraph& g);

/// True iff contracting {u,v} keeps the graph acyclic, i.e. no directed
/// path between u and v passes through a third vertex.
bool mergeable(const MixedGraph& g, int u, int v);

/// Replace u and v by one P-vertex (keeping u's id) labeled by the
/// two-vertex subgraph evaluated in P. The new vertex takes the external
/// inputs of u then v, and the external outputs of u then v.
MixedGraph merge(const MixedGraph& g, int u, int v);

enum class CollapseStrategy { greedy, exhaustive };

struct MergeStep {
  MixedGraph before;  // canonical
  int u = 0;
  int v = 0;
};

struct CollapseResult {
  MixedGraph form;  // canonical and irreducible
  std::vector<MergeStep> steps;
};

/// Greedy: repeatedly merge the first mergeable pair in canonical order.
CollapseResult collapse_greedy(const MixedGraph& g);
/// Every irreducible form reachable by some merge sequence, sorted, each
/// with one sequence reaching it. Throws ResourceLimit past max_states.
std::vector<CollapseResult> collapse_exhaustive(const MixedGraph& g, std::size_t max_states = 200000);

/// Expansion into Free(atoms + M); atoms are prefixed "P:" and M-labels "M:".
PropElement expand_all(const MixedGraph& g);

struct WitnessBounds {
  int max_vertices = 6;
  int max_p = 6;          // cap on P-vertices
  int max_arity = 2;      // per vertex input and output counts
  int max_boundary = 2;   // graph inputs and outputs
};

struct Witness {
  MixedGraph graph;
  std::vector<CollapseResult> forms;  // at least two, all expand_all-equal
};

/// Smallest mixed graph (by vertex count, then boundary, then enumeration
/// order) with at least two irreducible collapse results. Every reported
/// witness has been checked to expand to a single element.
std::optional<Witness> non_confluence_witness(const WitnessBounds& bounds);

/// Short description of a P-label: its atoms, sorted and joined by '+'.
std::string describe_label(const PropElement& e);

}  // namespace propcalc
