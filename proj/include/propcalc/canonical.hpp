#pragma once

// Canonical labeling, isomorphism, hashing and exhaustive enumeration of
// (m,n)-graphs with a prescribed vertex profile.
//
// Vertices reachable from a graph input are ordered by the lexicographically
// minimal label of an edge path reaching them. A path label is the sequence
//   (graph input index, in-port at v1, out-port at v1, in-port at v2, ...)
// ending with the in-port of the target vertex; shorter prefixes sort first.
// The remaining vertices that reach a graph output are ordered by the mirrored
// output-path labels, and whatever is left is placed by a minimal
// serialization search.

#include <cstdint>
#include <functional>
#include <vector>

#include "propcalc/graph.hpp"

namespace propcalc {

class Unreachable : public Error {
 public:
  explicit Unreachable(int vertex)
      : Error("vertex " + std::to_string(vertex) + " admits no path from a graph input"),
        vertex_(vertex) {}
  int vertex() const { return vertex_; }

 private:
  int vertex_;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

struct PathLabel {
  int vertex = 0;
  std::vector<int> label;
};

/// Minimal input-path labels of every vertex, sorted by label.
/// Throws Unreachable when some vertex has no path from a graph input.
std::vector<PathLabel> input_path_labels(const Graph& g);
std::vector<int> input_path_order(const Graph& g);

/// Mirror image: paths from a vertex to a graph output, read from the output.
std::vector<PathLabel> output_path_labels(const Graph& g);
std::vector<int> output_path_order(const Graph& g);

enum class CanonicalMethod { empty, input_path, output_path, mixed };
const char* to_string(CanonicalMethod m);

struct CanonicalForm {
  Graph graph;             // vertices renamed 1..r in canonical order, edges sorted
  std::vector<int> order;  // vertex ids of the source graph, in canonical order
  CanonicalMethod method = CanonicalMethod::empty;

  friend bool operator==(const CanonicalForm& a, const CanonicalForm& b) {
    return a.graph == b.graph;
  }
  friend auto operator<=>(const CanonicalForm& a, const CanonicalForm& b) {
    return a.graph <=> b.graph;
  }
};

/// Label- and boundary-preserving canonical form.
CanonicalForm canonicalize(const Graph& g);
bool is_isomorphic(const Graph& g, const Graph& h);
std::uint64_t graph_hash(const Graph& g);
/// Digest of a graph taken as-is (apply to canonical graphs).
std::uint64_t digest(const Graph& g);

/// A graph whose vertex ids 1..r are the vertex numbering. Isomorphisms of
/// numbered graphs preserve the numbering, so two numbered graphs are
/// isomorphic exactly when they are equal.
struct NumberedGraph {
  Graph graph;

  friend auto operator<=>(const NumberedGraph&, const NumberedGraph&) = default;
};

/// Number the vertices of g in the given order (order[i] receives number i+1).
NumberedGraph number_by(const Graph& g, const std::vector<int>& order);
/// Renumbering by w: the vertex numbered i receives number w(i).
NumberedGraph renumber(const NumberedGraph& g, const Permutation& w);

/// True iff no non-identity renumbering of g is isomorphic to g.
/// Requires every vertex to have at least one input.
bool free_action_check(const NumberedGraph& g);

struct Arity {
  int in = 0;
  int out = 0;
  friend auto operator<=>(const Arity&, const Arity&) = default;
};

struct EnumerationLimits {
  int max_vertices = 8;
  int max_edges = 14;
};

/// Defaults, with max_vertices overridable by PROPCALC_MAX_VERTICES.
EnumerationLimits default_limits();

/// Calls `visit` on every numbered (m,n)-graph whose vertex i has arity
/// arities[i-1], in a deterministic order. An unbalanced profile yields nothing.
void for_each_numbered_graph(const std::vector<Arity>& arities, int m, int n,
                             const std::function<void(const NumberedGraph&)>& visit,
                             const EnumerationLimits& limits = default_limits());

/// Materialized enumeration. With upto_iso, one canonical representative per
/// isomorphism class of the unnumbered graph, sorted by canonical form.
std::vector<NumberedGraph> enumerate_graphs(const std::vector<Arity>& arities, int m, int n,
                                            bool upto_iso,
                                            const EnumerationLimits& limits = default_limits());

}  // namespace propcalc
