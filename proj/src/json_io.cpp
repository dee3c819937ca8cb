#include "propcalc/json_io.hpp"

#include <fstream>
#include <sstream>

namespace propcalc {

Json port_to_json(const Port& p) {
  switch (p.kind) {
    case PortKind::input: return Json::array({"input", p.index});
    case PortKind::output: return Json::array({"output", p.index});
    case PortKind::vin: return Json::array({"vin", p.vertex, p.index});
    case PortKind::vout: return Json::array({"vout", p.vertex, p.index});
  }
  return Json();
}

Port port_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_string()) throw ParseError("port must be an array");
  const auto kind = j[0].get<std::string>();
  auto integer = [&](std::size_t i) {
    if (i >= j.size() || !j[i].is_number_integer()) {
      throw ParseError("port " + j.dump() + ": expected integer at position " + std::to_string(i));
    }
    return j[i].get<int>();
  };
  if (kind == "input" || kind == "output") {
    if (j.size() != 2) throw ParseError("boundary port takes one index: " + j.dump());
    return kind == "input" ? Port::input(integer(1)) : Port::output(integer(1));
  }
  if (kind == "vin" || kind == "vout") {
    if (j.size() != 3) throw ParseError("vertex port takes a vertex id and an index: " + j.dump());
    return kind == "vin" ? Port::vin(integer(1), integer(2)) : Port::vout(integer(1), integer(2));
  }
  throw ParseError("unknown port kind '" + kind + "'");
}

Json graph_to_json(const Graph& graph) {
  Graph g = graph;
  g.normalize();
  Json out;
  out["m"] = g.m;
  out["n"] = g.n;
  Json vs = Json::array();
  for (const auto& v : g.vertices) {
    Json jv;
    jv["id"] = v.id;
    jv["in"] = v.in;
    jv["out"] = v.out;
    if (v.label) jv["label"] = *v.label;
    vs.push_back(std::move(jv));
  }
  out["vertices"] = std::move(vs);
  Json es = Json::array();
  for (const auto& e : g.edges) {
    Json je;
    je["src"] = port_to_json(e.src);
    je["dst"] = port_to_json(e.dst);
    es.push_back(std::move(je));
  }
  out["edges"] = std::move(es);
  return out;
}

namespace {

int require_int(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_number_integer()) {
    throw ParseError(std::string("missing integer field '") + key + "'");
  }
  return j[key].get<int>();
}

}  // namespace

Graph graph_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("graph must be a JSON object");
  Graph g;
  g.m = require_int(j, "m");
  g.n = require_int(j, "n");
  if (!j.contains("vertices") || !j["vertices"].is_array()) {
    throw ParseError("missing array field 'vertices'");
  }
  if (!j.contains("edges") || !j["edges"].is_array()) throw ParseError("missing array field 'edges'");
  for (const auto& jv : j["vertices"]) {
    Vertex v;
    v.id = require_int(jv, "id");
    v.in = require_int(jv, "in");
    v.out = require_int(jv, "out");
    if (jv.contains("label")) {
      if (!jv["label"].is_string()) throw ParseError("vertex label must be a string");
      v.label = jv["label"].get<std::string>();
    }
    g.vertices.push_back(std::move(v));
  }
  for (const auto& je : j["edges"]) {
    if (!je.is_object() || !je.contains("src") || !je.contains("dst")) {
      throw ParseError("edge must have 'src' and 'dst'");
    }
    g.edges.push_back({port_from_json(je["src"]), port_from_json(je["dst"])});
  }
  g.normalize();
  return g;
}

std::string serialize_graph(const Graph& g) { return graph_to_json(g).dump(); }

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

Graph parse_graph(std::string_view text) { return graph_from_json(parse_json(text)); }

std::string serialize_document(const GraphDocument& doc) {
  Json j = graph_to_json(doc.graph);
  if (doc.source) j["source"] = *doc.source;
  return j.dump() + "\n";
}

GraphDocument parse_document(std::string_view text) {
  Json j = parse_json(text);
  GraphDocument doc{graph_from_json(j), std::nullopt};
  if (j.contains("source")) {
    if (!j["source"].is_string()) throw ParseError("'source' must be a string");
    doc.source = j["source"].get<std::string>();
  }
  return doc;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace propcalc
