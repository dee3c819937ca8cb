#pragma once

// Free props on a signature. An element of Free(M)(m,n) is an isomorphism
// class of M-labeled (m,n)-graphs, stored as its canonical labeled graph.

#include <algorithm>
#include <concepts>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "propcalc/canonical.hpp"
#include "propcalc/graph.hpp"
#include "propcalc/json_io.hpp"

namespace propcalc {

struct Generator {
  std::string name;
  int m = 0;  // inputs
  int n = 0;  // outputs

  friend auto operator<=>(const Generator&, const Generator&) = default;
};

class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<Generator> generators);

  const std::vector<Generator>& generators() const { return generators_; }
  const Generator* find(const std::string& name) const;
  const Generator& at(const std::string& name) const;  // throws UnknownGenerator
  bool contains(const std::string& name) const { return find(name) != nullptr; }
  void add(Generator g);

  /// Disjoint union; names must not clash.
  friend Signature operator+(const Signature& a, const Signature& b);

 private:
  std::vector<Generator> generators_;
};

Signature signature_from_json(const Json& j);
Json signature_to_json(const Signature& sig);

/// Throws UnknownGenerator / ArityMismatch unless every vertex of g carries a
/// generator of sig with matching arity.
void check_labels(const Signature& sig, const Graph& g);

class PropElement {
 public:
  PropElement() = default;
  /// Canonicalizes g; every vertex must be labeled.
  explicit PropElement(const Graph& g);

  const Graph& graph() const { return graph_; }
  int m() const { return graph_.m; }
  int n() const { return graph_.n; }
  std::size_t vertex_count() const { return graph_.vertices.size(); }
  std::uint64_t hash() const { return digest(graph_); }

  friend bool operator==(const PropElement&, const PropElement&) = default;
  friend auto operator<=>(const PropElement&, const PropElement&) = default;

 private:
  Graph graph_;
};

Graph corolla_graph(const std::string& label, int m, int n);
PropElement corolla(const Signature& sig, const std::string& name);

PropElement pelem_identity(int n);
PropElement pelem_hcompose(const PropElement& a, const PropElement& b);
PropElement pelem_vcompose(const PropElement& top, const PropElement& bottom);
PropElement pelem_permute_inputs(const PropElement& e, const Permutation& w);
PropElement pelem_permute_outputs(const PropElement& e, const Permutation& w);

/// Result of splicing graphs into the vertices of an outer graph.
struct Substitution {
  Graph graph;
  /// New vertex id -> (outer vertex id, inner vertex id).
  std::map<int, std::pair<int, int>> origin;
};

/// Replace each outer vertex v by inner.at(v), whose boundary must equal the
/// arity of v, and splice boundary wires. Inner vertices keep their labels.
Substitution substitute(const Graph& outer, const std::map<int, Graph>& inner);

/// An element of Free(Free(M)): an outer graph whose vertices carry
/// elements of Free(M). Outer labels are ignored.
struct NestedElement {
  Graph outer;
  std::map<int, PropElement> labels;
};

/// The monad multiplication: substitute and canonicalize.
PropElement expand(const NestedElement& e);
PropElement expand(const Graph& outer, const std::map<int, PropElement>& labels);

/// Monad unit at Free(M): the corolla carrying e.
NestedElement unit_nested(const PropElement& e);
/// Label every vertex of e by the corolla of its own label.
NestedElement corolla_nested(const PropElement& e);

/// Three-level nesting, an element of Free(Free(Free(M))).
struct Nested2 {
  Graph outer;
  std::map<int, NestedElement> labels;
};

/// Multiply the inner levels first: expand every label, then the outer graph.
PropElement expand_inner_first(const Nested2& e);
/// Multiply the outer levels first: splice the label outer graphs into the
/// outer graph, keeping innermost labels, then expand.
PropElement expand_outer_first(const Nested2& e);

NestedElement nested_from_json(const Json& j);
Json nested_to_json(const NestedElement& e);

/// Interface a prop must offer for homomorphisms out of a free prop.
/// permutation(w) is the (k,k) morphism routing wire i to wire w(i).
template <class T>
concept PropTarget = requires(const T& t, const typename T::Value& a, const Permutation& w) {
  { t.identity(0) } -> std::convertible_to<typename T::Value>;
  { t.hcompose(a, a) } -> std::convertible_to<typename T::Value>;
  { t.vcompose(a, a) } -> std::convertible_to<typename T::Value>;
  { t.permutation(w) } -> std::convertible_to<typename T::Value>;
  { t.boundary(a) } -> std::convertible_to<std::pair<int, int>>;
};

/// Evaluate a labeled graph in a target prop, given the image of each
/// vertex. The graph is cut into layers along a topological order; each
/// layer routes the open wires by a permutation and applies one vertex
/// tensored with an identity.
template <PropTarget T>
typename T::Value evaluate_layers(const T& target, const Graph& g,
                                  const std::function<typename T::Value(const Vertex&)>& phi) {
  using Value = typename T::Value;
  std::map<Port, Port> source_of;
  for (const auto& e : g.edges) source_of[e.dst] = e.src;
  std::vector<Port> open;
  for (int i = 1; i <= g.m; ++i) open.push_back(Port::input(i));
  Value current = target.identity(g.m);

  // Route `wanted` (sources currently open) to the front, keeping the rest.
  auto route = [&](const std::vector<Port>& wanted) {
    const int k = static_cast<int>(open.size());
    std::vector<int> old_pos;
    std::vector<bool> taken(k, false);
    for (const auto& s : wanted) {
      auto it = std::find(open.begin(), open.end(), s);
      if (it == open.end()) throw InvalidGraph("source " + to_string(s) + " is not available");
      int p = static_cast<int>(it - open.begin());
      old_pos.push_back(p);
      taken[p] = true;
    }
    for (int p = 0; p < k; ++p) {
      if (!taken[p]) old_pos.push_back(p);
    }
    Permutation w(k);
    std::vector<Port> reordered;
    for (int q = 0; q < k; ++q) {
      w[old_pos[q]] = q + 1;
      reordered.push_back(open[old_pos[q]]);
    }
    current = target.vcompose(current, target.permutation(w));
    open = std::move(reordered);
  };

  for (int id : topological_order(g)) {
    const Vertex& v = *g.find_vertex(id);
    std::vector<Port> wanted;
    for (int k = 1; k <= v.in; ++k) wanted.push_back(source_of.at(Port::vin(id, k)));
    route(wanted);
    Value image = phi(v);
    if (target.boundary(image) != std::pair<int, int>{v.in, v.out}) {
      throw ArityMismatch("image of vertex " + std::to_string(id) + " has the wrong boundary");
    }
    const int rest = static_cast<int>(open.size()) - v.in;
    current = target.vcompose(current, target.hcompose(image, target.identity(rest)));
    std::vector<Port> next;
    for (int k = 1; k <= v.out; ++k) next.push_back(Port::vout(id, k));
    next.insert(next.end(), open.begin() + v.in, open.end());
    open = std::move(next);
  }
  std::vector<Port> wanted;
  for (int j = 1; j <= g.n; ++j) wanted.push_back(source_of.at(Port::output(j)));
  route(wanted);
  return current;
}

/// The free prop itself as a target.
struct FreePropTarget {
  using Value = PropElement;
  Value identity(int n) const { return pelem_identity(n); }
  Value hcompose(const Value& a, const Value& b) const { return pelem_hcompose(a, b); }
  Value vcompose(const Value& top, const Value& bottom) const { return pelem_vcompose(top, bottom); }
  Value permutation(const Permutation& w) const;
  std::pair<int, int> boundary(const Value& a) const { return {a.m(), a.n()}; }
};

/// The unique prop morphism out of Free(sig) extending a generator assignment.
template <PropTarget T>
class Homomorphism {
 public:
  using Value = typename T::Value;

  Homomorphism(Signature sig, T target, std::map<std::string, Value> assignment)
      : sig_(std::move(sig)), target_(std::move(target)), assignment_(std::move(assignment)) {
    for (const auto& [name, value] : assignment_) {
      const Generator& gen = sig_.at(name);
      if (target_.boundary(value) != std::pair<int, int>{gen.m, gen.n}) {
        throw ArityMismatch("assignment for '" + name + "' has the wrong boundary");
      }
    }
    for (const auto& gen : sig_.generators()) {
      if (!assignment_.count(gen.name)) {
        throw UnknownGenerator("no assignment for generator '" + gen.name + "'");
      }
    }
  }

  Value operator()(const PropElement& e) const { return apply(e.graph()); }

  /// Apply to any labeled representative.
  Value apply(const Graph& g) const {
    check_labels(sig_, g);
    return evaluate_layers<T>(target_, g,
                              [&](const Vertex& v) { return assignment_.at(*v.label); });
  }

  const T& target() const { return target_; }
  const Signature& signature() const { return sig_; }

 private:
  Signature sig_;
  T target_;
  std::map<std::string, Value> assignment_;
};

template <PropTarget T>
Homomorphism<T> extend_morphism(const Signature& sig, T target,
                                std::map<std::string, typename T::Value> assignment) {
  return Homomorphism<T>(sig, std::move(target), std::move(assignment));
}

struct BasisCount {
  int r = 0;
  long long numbered = 0;
  long long iso = 0;
};

/// Numbered and isomorphism-class counts of sig-labeled (m,n)-graphs with
/// r = 0..max_r vertices. Numbered graphs number their vertices 1..r, so a
/// label sequence and its reorderings contribute separately.
std::vector<BasisCount> count_basis(const Signature& sig, int m, int n, int max_r,
                                    const EnumerationLimits& limits = default_limits());

/// Every sig-labeled (m,n)-graph with exactly r vertices, one canonical
/// representative per isomorphism class.
std::vector<PropElement> basis_elements(const Signature& sig, int m, int n, int r,
                                        const EnumerationLimits& limits = default_limits());

/// Graph with some vertices M-labeled and the others numbered 1..k.
struct PartialLabeledGraph {
  Graph graph;  // vertex labels are ignored
  std::map<int, std::string> labels;
  std::map<int, int> numbering;

  /// Read labels of the form "#k" as numbers and all others as M-labels.
  static PartialLabeledGraph from_marked(const Graph& g);
  /// Graph with numbered vertices marked "#k".
  Graph marked() const;
  /// Throws InvalidGraph unless labels and numbering partition the vertices
  /// and the numbering is onto 1..k.
  void check() const;
};

int filtration_degree(const PartialLabeledGraph& g);
std::vector<PartialLabeledGraph> filter_upto(const std::vector<PartialLabeledGraph>& items, int e);

/// All 2^r ways of choosing the M-labeled subset of g's vertices. Chosen
/// vertices keep their label (or `fallback` when unlabeled); the others are
/// numbered in increasing id order.
std::vector<PartialLabeledGraph> partial_labelings(const Graph& g, const std::string& fallback = "x");

}  // namespace propcalc
