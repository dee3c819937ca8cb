#include "propcalc/coproduct.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace propcalc {

void MixedGraph::check() const {
  require_valid(graph, "mixed graph");
  for (const auto& v : graph.vertices) {
    const bool p = p_labels.count(v.id) > 0;
    const bool m = m_labels.count(v.id) > 0;
    if (p == m) {
      throw InvalidGraph("vertex " + std::to_string(v.id) + " must carry exactly one alphabet");
    }
    if (p) {
      const PropElement& e = p_labels.at(v.id);
      if (e.m() != v.in || e.n() != v.out) {
        throw BoundaryMismatch("P-label of vertex " + std::to_string(v.id) +
                               " does not match its arity");
      }
    }
  }
  if (p_labels.size() + m_labels.size() != graph.vertices.size()) {
    throw InvalidGraph("labels refer to unknown vertices");
  }
}

MixedGraph mixed_from_json(const Json& j) {
  MixedGraph g;
  g.graph = graph_from_json(j);
  for (const auto& jv : j["vertices"]) {
    const int id = jv["id"].get<int>();
    if (!jv.contains("alphabet") || !jv["alphabet"].is_string()) {
      throw ParseError("mixed vertex " + std::to_string(id) + " needs an 'alphabet'");
    }
    const auto alphabet = jv["alphabet"].get<std::string>();
    const Vertex& v = *g.graph.find_vertex(id);
    if (alphabet == "M") {
      if (!v.label) throw ParseError("M-vertex " + std::to_string(id) + " needs a label");
      g.m_labels[id] = *v.label;
    } else if (alphabet == "P") {
      if (jv.contains("element")) {
        g.p_labels[id] = PropElement(graph_from_json(jv["element"]));
      } else if (v.label) {
        g.p_labels[id] = PropElement(corolla_graph(*v.label, v.in, v.out));
      } else {
        throw ParseError("P-vertex " + std::to_string(id) + " needs a label or an element");
      }
    } else {
      throw ParseError("unknown alphabet '" + alphabet + "'");
    }
  }
  for (auto& v : g.graph.vertices) v.label.reset();
  g.check();
  return g;
}

namespace {

// The atom name when e is a corolla with straight boundary wiring.
std::optional<std::string> corolla_atom(const PropElement& e) {
  if (e.vertex_count() != 1) return std::nullopt;
  const Vertex& v = e.graph().vertices.front();
  if (PropElement(corolla_graph(*v.label, v.in, v.out)) == e) return v.label;
  return std::nullopt;
}

}  // namespace

Json mixed_to_json(const MixedGraph& g) {
  Graph labeled = g.graph;
  for (auto& v : labeled.vertices) {
    v.label.reset();
    if (auto it = g.m_labels.find(v.id); it != g.m_labels.end()) v.label = it->second;
    if (auto it = g.p_labels.find(v.id); it != g.p_labels.end()) v.label = corolla_atom(it->second);
  }
  Json j = graph_to_json(labeled);
  for (auto& jv : j["vertices"]) {
    const int id = jv["id"].get<int>();
    if (g.is_p(id)) {
      jv["alphabet"] = "P";
      if (!jv.contains("label")) jv["element"] = graph_to_json(g.p_labels.at(id).graph());
    } else {
      jv["alphabet"] = "M";
    }
  }
  return j;
}

namespace {

struct Orientation {
  Permutation in;   // sigma: new in-port i is old in-port sigma(i)
  Permutation out;  // tau: old out-port j becomes new out-port tau(j)
  PropElement label;
};

// Orientations of a P-label minimizing its serialization.
std::vector<Orientation> minimal_orientations(const PropElement& e) {
  auto factorial = [](int k) {
    long long f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  if (factorial(e.m()) * factorial(e.n()) > 40320) {
    throw ResourceLimit("P-label boundary too large to normalize");
  }
  std::vector<Orientation> best;
  std::string best_key;
  Permutation sigma = identity_permutation(e.m());
  do {
    PropElement turned_in = pelem_permute_inputs(e, sigma);
    Permutation tau = identity_permutation(e.n());
    do {
      PropElement turned = pelem_permute_outputs(turned_in, tau);
      std::string key = serialize_graph(turned.graph());
      if (best.empty() || key < best_key) {
        best.clear();
        best_key = std::move(key);
        best.push_back({sigma, tau, turned});
      } else if (key == best_key) {
        best.push_back({sigma, tau, turned});
      }
    } while (std::next_permutation(tau.begin(), tau.end()));
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return best;
}

Graph reorient(const Graph& host, int id, const Orientation& o) {
  Graph g = host;
  Permutation sigma_inv = inverse(o.in);
  for (auto& e : g.edges) {
    if (e.dst.kind == PortKind::vin && e.dst.vertex == id) e.dst.index = sigma_inv[e.dst.index - 1];
    if (e.src.kind == PortKind::vout && e.src.vertex == id) e.src.index = o.out[e.src.index - 1];
  }
  return g;
}

}  // namespace

MixedGraph canonical_mixed(const MixedGraph& g) {
  g.check();
  std::vector<int> p_ids;
  std::vector<std::vector<Orientation>> choices;
  long long combos = 1;
  for (const auto& [id, e] : g.p_labels) {
    p_ids.push_back(id);
    choices.push_back(minimal_orientations(e));
    combos *= static_cast<long long>(choices.back().size());
    if (combos > 4096) throw ResourceLimit("too many symmetric P-label orientations");
  }
  Graph base = g.graph;
  for (auto& v : base.vertices) {
    if (auto it = g.m_labels.find(v.id); it != g.m_labels.end()) v.label = "M:" + it->second;
  }
  std::optional<CanonicalForm> best;
  std::function<void(std::size_t, const Graph&)> rec = [&](std::size_t k, const Graph& host) {
    if (k == p_ids.size()) {
      CanonicalForm cf = canonicalize(host);
      if (!best || cf.graph < best->graph) best = std::move(cf);
      return;
    }
    for (const auto& o : choices[k]) {
      Graph next = reorient(host, p_ids[k], o);
      next.find_vertex(p_ids[k])->label = "P:" + serialize_graph(o.label.graph());
      rec(k + 1, next);
    }
  };
  rec(0, base);

  MixedGraph out;
  out.graph = best->graph;
  for (auto& v : out.graph.vertices) {
    const int old_id = best->order[v.id - 1];
    const std::string& tag = *v.label;
    if (tag.rfind("M:", 0) == 0) {
      out.m_labels[v.id] = g.m_labels.at(old_id);
    } else {
      out.p_labels[v.id] = PropElement(parse_graph(tag.substr(2)));
    }
    v.label.reset();
  }
  return out;
}

namespace {

// successors[v] = vertices with an edge from v.
std::map<int, std::set<int>> successors(const Graph& g) {
  std::map<int, std::set<int>> succ;
  for (const auto& v : g.vertices) succ[v.id];
  for (const auto& e : g.edges) {
    if (e.src.kind == PortKind::vout && e.dst.kind == PortKind::vin) {
      succ[e.src.vertex].insert(e.dst.vertex);
    }
  }
  return succ;
}

// Is there a path from `from` to `to` whose first step avoids a direct edge
// into `to`, i.e. one that visits a third vertex?
bool indirect_path(const std::map<int, std::set<int>>& succ, int from, int to) {
  std::set<int> seen;
  std::vector<int> stack;
  for (int w : succ.at(from)) {
    if (w != to) stack.push_back(w);
  }
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    if (x == to) return true;
    if (!seen.insert(x).second) continue;
    for (int w : succ.at(x)) stack.push_back(w);
  }
  return false;
}

void require_p_pair(const MixedGraph& g, int u, int v) {
  if (u == v) throw PreconditionViolation("merge needs two distinct vertices");
  if (!g.is_p(u) || !g.is_p(v)) {
    throw PreconditionViolation("vertices " + std::to_string(u) + " and " + std::to_string(v) +
                                " must both be P-vertices");
  }
}

}  // namespace

bool mergeable(const MixedGraph& g, int u, int v) {
  require_p_pair(g, u, v);
  auto succ = successors(g.graph);
  return !indirect_path(succ, u, v) && !indirect_path(succ, v, u);
}

MixedGraph merge(const MixedGraph& g, int u, int v) {
  if (!mergeable(g, u, v)) {
    throw PreconditionViolation("vertices " + std::to_string(u) + " and " + std::to_string(v) +
                                " are not mergeable");
  }
  const Vertex& vu = *g.graph.find_vertex(u);
  const Vertex& vv = *g.graph.find_vertex(v);
  std::map<Port, Port> src_of;
  std::map<Port, Port> dst_of;
  for (const auto& e : g.graph.edges) {
    src_of[e.dst] = e.src;
    dst_of[e.src] = e.dst;
  }
  auto inside = [&](const Port& p) { return !p.is_boundary() && (p.vertex == u || p.vertex == v); };

  // Local two-vertex graph: local vertex 1 is u, 2 is v.
  Graph local;
  local.vertices = {{1, vu.in, vu.out, {}}, {2, vv.in, vv.out, {}}};
  auto local_id = [&](int id) { return id == u ? 1 : 2; };
  std::vector<Port> ext_in_src;    // host source feeding each new in-port
  std::vector<Port> ext_out_dst;   // host target of each new out-port
  for (const Vertex* x : {&vu, &vv}) {
    for (int k = 1; k <= x->in; ++k) {
      const Port s = src_of.at(Port::vin(x->id, k));
      if (inside(s)) {
        local.edges.push_back({Port::vout(local_id(s.vertex), s.index), Port::vin(local_id(x->id), k)});
      } else {
        ext_in_src.push_back(s);
        local.edges.push_back({Port::input(static_cast<int>(ext_in_src.size())),
                               Port::vin(local_id(x->id), k)});
      }
    }
  }
  for (const Vertex* x : {&vu, &vv}) {
    for (int k = 1; k <= x->out; ++k) {
      const Port t = dst_of.at(Port::vout(x->id, k));
      if (inside(t)) continue;
      ext_out_dst.push_back(t);
      local.edges.push_back({Port::vout(local_id(x->id), k),
                             Port::output(static_cast<int>(ext_out_dst.size()))});
    }
  }
  local.m = static_cast<int>(ext_in_src.size());
  local.n = static_cast<int>(ext_out_dst.size());
  local.normalize();
  PropElement label = expand(local, {{1, g.p_labels.at(u)}, {2, g.p_labels.at(v)}});

  MixedGraph out;
  out.m_labels = g.m_labels;
  out.p_labels = g.p_labels;
  out.p_labels.erase(v);
  out.p_labels[u] = label;
  out.graph.m = g.graph.m;
  out.graph.n = g.graph.n;
  for (const auto& x : g.graph.vertices) {
    if (x.id == v) continue;
    if (x.id == u) {
      out.graph.vertices.push_back({u, local.m, local.n, {}});
    } else {
      out.graph.vertices.push_back(x);
    }
  }
  for (const auto& e : g.graph.edges) {
    if (inside(e.src) || inside(e.dst)) continue;
    out.graph.edges.push_back(e);
  }
  for (int i = 0; i < local.m; ++i) out.graph.edges.push_back({ext_in_src[i], Port::vin(u, i + 1)});
  for (int j = 0; j < local.n; ++j) out.graph.edges.push_back({Port::vout(u, j + 1), ext_out_dst[j]});
  out.graph.normalize();
  out.check();
  return out;
}

namespace {

std::vector<std::pair<int, int>> mergeable_pairs(const MixedGraph& canonical) {
  std::vector<int> ps;
  for (const auto& [id, e] : canonical.p_labels) ps.push_back(id);
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      if (mergeable(canonical, ps[i], ps[j])) out.emplace_back(ps[i], ps[j]);
    }
  }
  return out;
}

}  // namespace

CollapseResult collapse_greedy(const MixedGraph& g) {
  CollapseResult result;
  MixedGraph current = canonical_mixed(g);
  for (;;) {
    auto pairs = mergeable_pairs(current);
    if (pairs.empty()) break;
    auto [u, v] = pairs.front();
    result.steps.push_back({current, u, v});
    current = canonical_mixed(merge(current, u, v));
  }
  result.form = std::move(current);
  return result;
}

std::vector<CollapseResult> collapse_exhaustive(const MixedGraph& g, std::size_t max_states) {
  MixedGraph start = canonical_mixed(g);
  std::map<MixedGraph, std::optional<MergeStep>> parent;
  parent.emplace(start, std::nullopt);
  std::deque<MixedGraph> queue{start};
  std::vector<MixedGraph> irreducible;
  while (!queue.empty()) {
    MixedGraph current = std::move(queue.front());
    queue.pop_front();
    auto pairs = mergeable_pairs(current);
    if (pairs.empty()) {
      irreducible.push_back(current);
      continue;
    }
    for (auto [u, v] : pairs) {
      MixedGraph next = canonical_mixed(merge(current, u, v));
      if (parent.count(next)) continue;
      if (parent.size() >= max_states) {
        throw ResourceLimit("exhaustive collapse exceeded " + std::to_string(max_states) + " states");
      }
      parent.emplace(next, MergeStep{current, u, v});
      queue.push_back(std::move(next));
    }
  }
  std::sort(irreducible.begin(), irreducible.end());
  std::vector<CollapseResult> out;
  for (auto& form : irreducible) {
    CollapseResult r;
    for (const MixedGraph* at = &form; parent.at(*at);) {
      const MergeStep& step = *parent.at(*at);
      r.steps.push_back(step);
      at = &parent.find(step.before)->first;
    }
    std::reverse(r.steps.begin(), r.steps.end());
    r.form = std::move(form);
    out.push_back(std::move(r));
  }
  return out;
}

PropElement expand_all(const MixedGraph& g) {
  g.check();
  std::map<int, PropElement> labels;
  for (const auto& [id, e] : g.p_labels) {
    Graph inner = e.graph();
    for (auto& v : inner.vertices) v.label = "P:" + *v.label;
    labels.emplace(id, PropElement(inner));
  }
  for (const auto& [id, name] : g.m_labels) {
    const Vertex& v = *g.graph.find_vertex(id);
    labels.emplace(id, PropElement(corolla_graph("M:" + name, v.in, v.out)));
  }
  return expand(g.graph, labels);
}

std::string describe_label(const PropElement& e) {
  std::vector<std::string> atoms;
  for (const auto& v : e.graph().vertices) atoms.push_back(*v.label);
  std::sort(atoms.begin(), atoms.end());
  std::string out;
  for (const auto& a : atoms) {
    if (!out.empty()) out += "+";
    out += a;
  }
  return out;
}

namespace {

// Non-decreasing sequences of arity types of length r.
void for_each_profile(const std::vector<Arity>& types, int r,
                      const std::function<void(const std::vector<Arity>&)>& visit) {
  std::vector<Arity> seq;
  std::function<void(std::size_t)> rec = [&](std::size_t lo) {
    if (static_cast<int>(seq.size()) == r) {
      visit(seq);
      return;
    }
    for (std::size_t k = lo; k < types.size(); ++k) {
      seq.push_back(types[k]);
      rec(k);
      seq.pop_back();
    }
  };
  rec(0);
}

}  // namespace

std::optional<Witness> non_confluence_witness(const WitnessBounds& bounds) {
  std::vector<Arity> types;
  for (int a = 0; a <= bounds.max_arity; ++a) {
    for (int b = 0; b <= bounds.max_arity; ++b) types.push_back({a, b});
  }
  EnumerationLimits limits{bounds.max_vertices, bounds.max_vertices * bounds.max_arity + 2 * bounds.max_boundary};
  for (int r = 1; r <= bounds.max_vertices; ++r) {
    for (int total = 0; total <= 2 * bounds.max_boundary; ++total) {
      for (int m = 0; m <= bounds.max_boundary; ++m) {
        const int n = total - m;
        if (n < 0 || n > bounds.max_boundary) continue;
        std::optional<Witness> found;
        for_each_profile(types, r, [&](const std::vector<Arity>& profile) {
          if (found) return;
          for (const auto& shape : enumerate_graphs(profile, m, n, true, limits)) {
            for (unsigned mask = 0; mask < (1U << r) && !found; ++mask) {
              const int p_count = __builtin_popcount(mask);
              if (p_count > bounds.max_p) continue;
              MixedGraph g;
              g.graph = shape.graph;
              for (int i = 0; i < r; ++i) {
                const Vertex& v = g.graph.vertices[i];
                if ((mask >> i) & 1U) {
                  g.p_labels[v.id] =
                      PropElement(corolla_graph("p" + std::to_string(v.id), v.in, v.out));
                } else {
                  g.m_labels[v.id] = "x" + std::to_string(v.id);
                }
              }
              // With at most two P-vertices a single merge is possible, so
              // the search still runs but cannot branch.
              auto forms = collapse_exhaustive(g, 20000);
              if (forms.size() < 2) continue;
              const PropElement expanded = expand_all(g);
              for (const auto& f : forms) {
                if (expand_all(f.form) != expanded) {
                  throw Error("merge changed the expansion of a mixed graph");
                }
              }
              found = Witness{g, std::move(forms)};
            }
            if (found) return;
          }
        });
        if (found) return found;
      }
    }
  }
  return std::nullopt;
}

}  // namespace propcalc
