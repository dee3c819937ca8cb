#pragma once

// JSON interchange for graphs:
//   {"m": int, "n": int,
//    "vertices": [{"id": int, "in": int, "out": int, "label": string?}],
//    "edges": [{"src": ["input", i] | ["vout", vid, k],
//               "dst": ["output", j] | ["vin", vid, k]}]}
// Field order is fixed; vertices are sorted by id and edges by source.

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "propcalc/graph.hpp"

namespace propcalc {

using Json = nlohmann::ordered_json;

Json port_to_json(const Port& p);
Port port_from_json(const Json& j);

Json graph_to_json(const Graph& g);
Graph graph_from_json(const Json& j);

/// Compact single-line serialization.
std::string serialize_graph(const Graph& g);
Graph parse_graph(std::string_view text);

/// A graph file optionally carrying a trailing "source" citation.
struct GraphDocument {
  Graph graph;
  std::optional<std::string> source;
};

std::string serialize_document(const GraphDocument& doc);
GraphDocument parse_document(std::string_view text);

Json parse_json(std::string_view text);
std::string read_file(const std::string& path);

}  // namespace propcalc
