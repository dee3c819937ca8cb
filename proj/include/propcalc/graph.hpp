#pragma once

// Directed (m,n)-graphs: finite acyclic port graphs with m numbered global
// inputs and n numbered global outputs. Every port (boundary position or
// vertex port) is the endpoint of exactly one edge. Ports are 1-based.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "propcalc/error.hpp"

namespace propcalc {

/// Source kinds come first so that sorting edges by source puts graph
/// inputs before vertex outputs.
enum class PortKind : std::uint8_t { input, vout, output, vin };

struct Port {
  PortKind kind = PortKind::input;
  int vertex = 0;  // 0 for boundary ports
  int index = 1;

  static Port input(int i) { return {PortKind::input, 0, i}; }
  static Port output(int j) { return {PortKind::output, 0, j}; }
  static Port vin(int v, int k) { return {PortKind::vin, v, k}; }
  static Port vout(int v, int k) { return {PortKind::vout, v, k}; }

  bool is_boundary() const { return kind == PortKind::input || kind == PortKind::output; }
  bool is_source() const { return kind == PortKind::input || kind == PortKind::vout; }

  friend auto operator<=>(const Port&, const Port&) = default;
};

std::string to_string(const Port& p);

struct Vertex {
  int id = 0;
  int in = 0;   // arity
  int out = 0;  // coarity
  std::optional<std::string> label;

  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

struct Edge {
  Port src;
  Port dst;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Graph {
  int m = 0;
  int n = 0;
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;

  const Vertex* find_vertex(int id) const;
  Vertex* find_vertex(int id);
  int max_vertex_id() const;
  std::size_t vertex_count() const { return vertices.size(); }

  /// Sort vertices by id and edges by (src kind, id, index).
  void normalize();

  friend auto operator<=>(const Graph&, const Graph&) = default;
};

/// Invariant violations reported by validate(). These are data, not faults.
struct Violation {
  enum class Condition {
    bad_boundary,       // negative m or n
    bad_vertex,         // negative arity or duplicate id
    dangling_port,      // edge endpoint does not exist
    wrong_direction,    // src is not a source port or dst not a target port
    input_coverage,     // graph input not the src of exactly one edge
    output_coverage,    // graph output not the dst of exactly one edge
    vertex_in_coverage,
    vertex_out_coverage,
    acyclicity,
  };
  Condition condition;
  std::string detail;
};

std::string to_string(Violation::Condition c);

std::vector<Violation> validate(const Graph& g);
bool is_valid(const Graph& g);
/// Throws InvalidGraph listing the first violation.
void require_valid(const Graph& g, const char* what = "graph");

/// 1-based permutation: w[i-1] is the image of i.
using Permutation = std::vector<int>;

bool is_permutation(const Permutation& w);
Permutation identity_permutation(int n);
Permutation inverse(const Permutation& w);
/// (a ∘ b)(i) = a(b(i)).
Permutation compose(const Permutation& a, const Permutation& b);
/// Block sum: a acts on 1..|a|, b on |a|+1..|a|+|b|.
Permutation block_sum(const Permutation& a, const Permutation& b);

Graph identity(int n);

/// Disjoint union; h's boundary indices are shifted by g's and h's vertex ids
/// are offset by g's largest id.
Graph hcompose(const Graph& g, const Graph& h);

/// Plug the outputs of `top` into the inputs of `bottom`.
Graph vcompose(const Graph& top, const Graph& bottom);

/// Right action on inputs: input i of the result is input w(i) of g.
Graph permute_inputs(const Graph& g, const Permutation& w);
/// Left action on outputs: output j of g becomes output w(j) of the result.
Graph permute_outputs(const Graph& g, const Permutation& w);

/// Reassign vertex ids through `ids` (old id -> new id, must be injective).
Graph rename_vertices(const Graph& g, const std::vector<std::pair<int, int>>& ids);

/// Topological order of vertex ids (Kahn, ties broken by smallest id).
/// Throws InvalidGraph when g has a directed cycle.
std::vector<int> topological_order(const Graph& g);

}  // namespace propcalc
