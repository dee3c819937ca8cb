#include "propcalc/free_prop.hpp"

#include <functional>
#include <set>

namespace propcalc {

Signature::Signature(std::vector<Generator> generators) {
  for (auto& g : generators) add(std::move(g));
}

const Generator* Signature::find(const std::string& name) const {
  for (const auto& g : generators_) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

const Generator& Signature::at(const std::string& name) const {
  const Generator* g = find(name);
  if (g == nullptr) throw UnknownGenerator("unknown generator '" + name + "'");
  return *g;
}

void Signature::add(Generator g) {
  if (g.m < 0 || g.n < 0) throw ArityMismatch("generator '" + g.name + "' has negative arity");
  if (contains(g.name)) throw ArityMismatch("duplicate generator '" + g.name + "'");
  generators_.push_back(std::move(g));
}

Signature operator+(const Signature& a, const Signature& b) {
  Signature out = a;
  for (const auto& g : b.generators()) out.add(g);
  return out;
}

Signature signature_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("generators") || !j["generators"].is_array()) {
    throw ParseError("signature must have a 'generators' array");
  }
  Signature sig;
  for (const auto& jg : j["generators"]) {
    if (!jg.is_object() || !jg.contains("name") || !jg["name"].is_string() || !jg.contains("m") ||
        !jg["m"].is_number_integer() || !jg.contains("n") || !jg["n"].is_number_integer()) {
      throw ParseError("generator must have string 'name' and integer 'm', 'n'");
    }
    try {
      sig.add({jg["name"].get<std::string>(), jg["m"].get<int>(), jg["n"].get<int>()});
    } catch (const ArityMismatch& e) {
      throw ParseError(e.what());
    }
  }
  return sig;
}

Json signature_to_json(const Signature& sig) {
  Json gens = Json::array();
  for (const auto& g : sig.generators()) {
    Json jg;
    jg["name"] = g.name;
    jg["m"] = g.m;
    jg["n"] = g.n;
    gens.push_back(std::move(jg));
  }
  Json out;
  out["generators"] = std::move(gens);
  return out;
}

void check_labels(const Signature& sig, const Graph& g) {
  for (const auto& v : g.vertices) {
    if (!v.label) throw UnknownGenerator("vertex " + std::to_string(v.id) + " is unlabeled");
    const Generator& gen = sig.at(*v.label);
    if (gen.m != v.in || gen.n != v.out) {
      throw ArityMismatch("vertex " + std::to_string(v.id) + " labeled '" + gen.name +
                          "' has arity (" + std::to_string(v.in) + "," + std::to_string(v.out) +
                          "), generator has (" + std::to_string(gen.m) + "," +
                          std::to_string(gen.n) + ")");
    }
  }
}

PropElement::PropElement(const Graph& g) {
  for (const auto& v : g.vertices) {
    if (!v.label) throw UnknownGenerator("vertex " + std::to_string(v.id) + " is unlabeled");
  }
  graph_ = canonicalize(g).graph;
}

Graph corolla_graph(const std::string& label, int m, int n) {
  Graph g;
  g.m = m;
  g.n = n;
  g.vertices.push_back({1, m, n, label});
  for (int i = 1; i <= m; ++i) g.edges.push_back({Port::input(i), Port::vin(1, i)});
  for (int j = 1; j <= n; ++j) g.edges.push_back({Port::vout(1, j), Port::output(j)});
  g.normalize();
  return g;
}

PropElement corolla(const Signature& sig, const std::string& name) {
  const Generator& g = sig.at(name);
  return PropElement(corolla_graph(name, g.m, g.n));
}

PropElement pelem_identity(int n) { return PropElement(identity(n)); }

PropElement pelem_hcompose(const PropElement& a, const PropElement& b) {
  return PropElement(hcompose(a.graph(), b.graph()));
}

PropElement pelem_vcompose(const PropElement& top, const PropElement& bottom) {
  return PropElement(vcompose(top.graph(), bottom.graph()));
}

PropElement pelem_permute_inputs(const PropElement& e, const Permutation& w) {
  return PropElement(permute_inputs(e.graph(), w));
}

PropElement pelem_permute_outputs(const PropElement& e, const Permutation& w) {
  return PropElement(permute_outputs(e.graph(), w));
}

PropElement FreePropTarget::permutation(const Permutation& w) const {
  return PropElement(permute_outputs(propcalc::identity(static_cast<int>(w.size())), w));
}

Substitution substitute(const Graph& outer, const std::map<int, Graph>& inner) {
  require_valid(outer, "outer graph");
  std::map<Port, Port> outer_src;
  for (const auto& e : outer.edges) outer_src[e.dst] = e.src;
  std::map<int, std::map<Port, Port>> inner_src;
  std::map<std::pair<int, int>, int> fresh;
  Substitution out;
  out.graph.m = outer.m;
  out.graph.n = outer.n;
  for (const auto& v : outer.vertices) {
    auto it = inner.find(v.id);
    if (it == inner.end()) {
      throw BoundaryMismatch("no inner graph for vertex " + std::to_string(v.id));
    }
    const Graph& h = it->second;
    require_valid(h, "inner graph");
    if (h.m != v.in || h.n != v.out) {
      throw BoundaryMismatch("inner graph (" + std::to_string(h.m) + "," + std::to_string(h.n) +
                             ") does not fit vertex " + std::to_string(v.id) + " of arity (" +
                             std::to_string(v.in) + "," + std::to_string(v.out) + ")");
    }
    auto& srcs = inner_src[v.id];
    for (const auto& e : h.edges) srcs[e.dst] = e.src;
    for (const auto& u : h.vertices) {
      const int id = static_cast<int>(out.graph.vertices.size()) + 1;
      fresh[{v.id, u.id}] = id;
      out.origin[id] = {v.id, u.id};
      out.graph.vertices.push_back({id, u.in, u.out, u.label});
    }
  }
  // A source of the outer graph resolves to a source of the result by
  // following through-wires of inner graphs upstream.
  std::function<Port(const Port&)> resolve = [&](const Port& s) -> Port {
    if (s.kind == PortKind::input) return s;
    const Port inner_s = inner_src.at(s.vertex).at(Port::output(s.index));
    if (inner_s.kind == PortKind::vout) {
      return Port::vout(fresh.at({s.vertex, inner_s.vertex}), inner_s.index);
    }
    return resolve(outer_src.at(Port::vin(s.vertex, inner_s.index)));
  };
  for (int j = 1; j <= outer.n; ++j) {
    out.graph.edges.push_back({resolve(outer_src.at(Port::output(j))), Port::output(j)});
  }
  for (const auto& v : outer.vertices) {
    const Graph& h = inner.at(v.id);
    for (const auto& e : h.edges) {
      if (e.dst.kind != PortKind::vin) continue;
      Port src = e.src.kind == PortKind::vout
                     ? Port::vout(fresh.at({v.id, e.src.vertex}), e.src.index)
                     : resolve(outer_src.at(Port::vin(v.id, e.src.index)));
      out.graph.edges.push_back({src, Port::vin(fresh.at({v.id, e.dst.vertex}), e.dst.index)});
    }
  }
  out.graph.normalize();
  return out;
}

PropElement expand(const Graph& outer, const std::map<int, PropElement>& labels) {
  std::map<int, Graph> inner;
  for (const auto& [id, e] : labels) inner.emplace(id, e.graph());
  return PropElement(substitute(outer, inner).graph);
}

PropElement expand(const NestedElement& e) { return expand(e.outer, e.labels); }

NestedElement unit_nested(const PropElement& e) {
  return {corolla_graph("*", e.m(), e.n()), {{1, e}}};
}

NestedElement corolla_nested(const PropElement& e) {
  NestedElement out{e.graph(), {}};
  for (const auto& v : e.graph().vertices) {
    out.labels.emplace(v.id, PropElement(corolla_graph(*v.label, v.in, v.out)));
  }
  return out;
}

PropElement expand_inner_first(const Nested2& e) {
  std::map<int, PropElement> flat;
  for (const auto& [id, nested] : e.labels) flat.emplace(id, expand(nested));
  return expand(e.outer, flat);
}

PropElement expand_outer_first(const Nested2& e) {
  std::map<int, Graph> inner;
  for (const auto& [id, nested] : e.labels) inner.emplace(id, nested.outer);
  Substitution s = substitute(e.outer, inner);
  std::map<int, PropElement> labels;
  for (const auto& [id, from] : s.origin) {
    labels.emplace(id, e.labels.at(from.first).labels.at(from.second));
  }
  return expand(s.graph, labels);
}

NestedElement nested_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("outer") || !j.contains("inner") || !j["inner"].is_object()) {
    throw ParseError("nested element must have 'outer' and an 'inner' object");
  }
  NestedElement e{graph_from_json(j["outer"]), {}};
  for (const auto& [key, value] : j["inner"].items()) {
    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw ParseError("inner keys must be vertex ids, got '" + key + "'");
    }
    e.labels.emplace(id, PropElement(graph_from_json(value)));
  }
  return e;
}

Json nested_to_json(const NestedElement& e) {
  Json out;
  out["outer"] = graph_to_json(e.outer);
  Json inner = Json::object();
  for (const auto& [id, el] : e.labels) inner[std::to_string(id)] = graph_to_json(el.graph());
  out["inner"] = std::move(inner);
  return out;
}

namespace {

long long factorial(int r) {
  long long f = 1;
  for (int i = 2; i <= r; ++i) f *= i;
  return f;
}

// Calls visit on every non-decreasing sequence of generator indices of length r.
void for_each_multiset(int kinds, int r, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> seq;
  std::function<void(int)> rec = [&](int lo) {
    if (static_cast<int>(seq.size()) == r) {
      visit(seq);
      return;
    }
    for (int k = lo; k < kinds; ++k) {
      seq.push_back(k);
      rec(k);
      seq.pop_back();
    }
  };
  rec(0);
}

void label_graph(Graph& g, const Signature& sig, const std::vector<int>& seq) {
  for (auto& v : g.vertices) v.label = sig.generators()[seq[v.id - 1]].name;
}

}  // namespace

std::vector<BasisCount> count_basis(const Signature& sig, int m, int n, int max_r,
                                    const EnumerationLimits& limits) {
  std::vector<BasisCount> table;
  const int kinds = static_cast<int>(sig.generators().size());
  for (int r = 0; r <= max_r; ++r) {
    BasisCount row{r, 0, 0};
    for_each_multiset(kinds, r, [&](const std::vector<int>& seq) {
      std::vector<Arity> arities;
      for (int k : seq) arities.push_back({sig.generators()[k].m, sig.generators()[k].n});
      long long orderings = factorial(r);
      for (std::size_t i = 0, j = 0; i < seq.size(); i = j) {
        while (j < seq.size() && seq[j] == seq[i]) ++j;
        orderings /= factorial(static_cast<int>(j - i));
      }
      long long numbered = 0;
      std::set<Graph> classes;
      for_each_numbered_graph(
          arities, m, n,
          [&](const NumberedGraph& ng) {
            ++numbered;
            Graph g = ng.graph;
            label_graph(g, sig, seq);
            classes.insert(canonicalize(g).graph);
          },
          limits);
      row.numbered += numbered * orderings;
      row.iso += static_cast<long long>(classes.size());
    });
    table.push_back(row);
  }
  return table;
}

std::vector<PropElement> basis_elements(const Signature& sig, int m, int n, int r,
                                        const EnumerationLimits& limits) {
  std::set<PropElement> out;
  const int kinds = static_cast<int>(sig.generators().size());
  for_each_multiset(kinds, r, [&](const std::vector<int>& seq) {
    std::vector<Arity> arities;
    for (int k : seq) arities.push_back({sig.generators()[k].m, sig.generators()[k].n});
    for_each_numbered_graph(
        arities, m, n,
        [&](const NumberedGraph& ng) {
          Graph g = ng.graph;
          label_graph(g, sig, seq);
          out.insert(PropElement(g));
        },
        limits);
  });
  return {out.begin(), out.end()};
}

PartialLabeledGraph PartialLabeledGraph::from_marked(const Graph& g) {
  PartialLabeledGraph p;
  p.graph = g;
  for (const auto& v : g.vertices) {
    if (v.label && !v.label->empty() && (*v.label)[0] == '#') {
      try {
        p.numbering[v.id] = std::stoi(v.label->substr(1));
      } catch (const std::exception&) {
        throw ParseError("bad numbering label '" + *v.label + "'");
      }
    } else if (v.label) {
      p.labels[v.id] = *v.label;
    } else {
      throw InvalidGraph("vertex " + std::to_string(v.id) + " is neither labeled nor numbered");
    }
  }
  p.check();
  return p;
}

Graph PartialLabeledGraph::marked() const {
  Graph g = graph;
  for (auto& v : g.vertices) {
    if (auto it = labels.find(v.id); it != labels.end()) {
      v.label = it->second;
    } else {
      v.label = "#" + std::to_string(numbering.at(v.id));
    }
  }
  return g;
}

void PartialLabeledGraph::check() const {
  require_valid(graph);
  std::set<int> numbers;
  for (const auto& v : graph.vertices) {
    const bool labeled = labels.count(v.id) > 0;
    const bool numbered = numbering.count(v.id) > 0;
    if (labeled == numbered) {
      throw InvalidGraph("vertex " + std::to_string(v.id) +
                         " must be either labeled or numbered, not both or neither");
    }
    if (numbered) numbers.insert(numbering.at(v.id));
  }
  if (labels.size() + numbering.size() != graph.vertices.size()) {
    throw InvalidGraph("labeling refers to unknown vertices");
  }
  int expect = 1;
  for (int k : numbers) {
    if (k != expect++) throw InvalidGraph("numbering must be onto 1..k");
  }
  if (numbers.size() != numbering.size()) throw InvalidGraph("numbering must be injective");
}

int filtration_degree(const PartialLabeledGraph& g) { return static_cast<int>(g.labels.size()); }

std::vector<PartialLabeledGraph> filter_upto(const std::vector<PartialLabeledGraph>& items, int e) {
  std::vector<PartialLabeledGraph> out;
  for (const auto& p : items) {
    if (filtration_degree(p) <= e) out.push_back(p);
  }
  return out;
}

std::vector<PartialLabeledGraph> partial_labelings(const Graph& g, const std::string& fallback) {
  require_valid(g);
  Graph base = g;
  base.normalize();
  const std::size_t r = base.vertices.size();
  if (r > 20) throw ResourceLimit("too many vertices for subset enumeration");
  std::vector<PartialLabeledGraph> out;
  for (unsigned long mask = 0; mask < (1UL << r); ++mask) {
    PartialLabeledGraph p;
    p.graph = base;
    int next = 1;
    for (std::size_t i = 0; i < r; ++i) {
      const Vertex& v = base.vertices[i];
      if ((mask >> i) & 1UL) {
        p.labels[v.id] = v.label.value_or(fallback);
      } else {
        p.numbering[v.id] = next++;
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace propcalc
