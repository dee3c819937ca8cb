#include "propcalc/canonical.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <string>

namespace propcalc {

const char* to_string(CanonicalMethod m) {
  switch (m) {
    case CanonicalMethod::empty: return "empty";
    case CanonicalMethod::input_path: return "input-path";
    case CanonicalMethod::output_path: return "output-path";
    case CanonicalMethod::mixed: return "mixed";
  }
  return "?";
}

namespace {

// Flat port numbering of a valid graph. Sources are the graph inputs
// [0,m) followed by vertex out-ports; targets are the graph outputs [0,n)
// followed by vertex in-ports. Ports are 0-based here.
struct Wiring {
  int m = 0, n = 0, r = 0;
  std::vector<int> ids;
  std::vector<int> in, out, label;
  std::vector<int> in_off, out_off;
  std::vector<int> src_of, tgt_of;
  std::vector<int> src_owner, src_port, tgt_owner, tgt_port;
  int max_port = 0;

  int target_of_vin(int v, int k) const { return n + in_off[v] + k; }
  int source_of_vout(int v, int k) const { return m + out_off[v] + k; }
};

Wiring build_wiring(const Graph& g) {
  require_valid(g);
  Wiring w;
  w.m = g.m;
  w.n = g.n;
  w.r = static_cast<int>(g.vertices.size());
  std::map<int, int> index_of;
  std::set<std::optional<std::string>> alphabet;
  for (const auto& v : g.vertices) alphabet.insert(v.label);
  int total_in = 0, total_out = 0;
  for (const auto& v : g.vertices) {
    index_of[v.id] = static_cast<int>(w.ids.size());
    w.ids.push_back(v.id);
    w.in.push_back(v.in);
    w.out.push_back(v.out);
    w.label.push_back(static_cast<int>(std::distance(alphabet.begin(), alphabet.find(v.label))));
    w.in_off.push_back(total_in);
    w.out_off.push_back(total_out);
    total_in += v.in;
    total_out += v.out;
    w.max_port = std::max({w.max_port, v.in, v.out});
  }
  w.max_port = std::max({w.max_port, g.m, g.n});
  const int sources = g.m + total_out;
  const int targets = g.n + total_in;
  w.src_of.assign(targets, -1);
  w.tgt_of.assign(sources, -1);
  w.src_owner.assign(sources, -1);
  w.src_port.assign(sources, 0);
  w.tgt_owner.assign(targets, -1);
  w.tgt_port.assign(targets, 0);
  for (int i = 0; i < g.m; ++i) w.src_port[i] = i;
  for (int j = 0; j < g.n; ++j) w.tgt_port[j] = j;
  for (int v = 0; v < w.r; ++v) {
    for (int k = 0; k < w.out[v]; ++k) {
      w.src_owner[w.source_of_vout(v, k)] = v;
      w.src_port[w.source_of_vout(v, k)] = k;
    }
    for (int k = 0; k < w.in[v]; ++k) {
      w.tgt_owner[w.target_of_vin(v, k)] = v;
      w.tgt_port[w.target_of_vin(v, k)] = k;
    }
  }
  auto src_index = [&](const Port& p) {
    return p.kind == PortKind::input ? p.index - 1
                                     : w.source_of_vout(index_of.at(p.vertex), p.index - 1);
  };
  auto tgt_index = [&](const Port& p) {
    return p.kind == PortKind::output ? p.index - 1
                                      : w.target_of_vin(index_of.at(p.vertex), p.index - 1);
  };
  for (const auto& e : g.edges) {
    int s = src_index(e.src), t = tgt_index(e.dst);
    w.src_of[t] = s;
    w.tgt_of[s] = t;
  }
  return w;
}

std::vector<int> topo_indices(const Wiring& w) {
  std::vector<int> indeg(w.r, 0);
  for (int v = 0; v < w.r; ++v) {
    for (int k = 0; k < w.in[v]; ++k) {
      if (w.src_owner[w.src_of[w.target_of_vin(v, k)]] >= 0) ++indeg[v];
    }
  }
  std::vector<int> order, ready;
  for (int v = w.r - 1; v >= 0; --v) {
    if (indeg[v] == 0) ready.push_back(v);
  }
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (int k = 0; k < w.out[v]; ++k) {
      int u = w.tgt_owner[w.tgt_of[w.source_of_vout(v, k)]];
      if (u >= 0 && --indeg[u] == 0) ready.push_back(u);
    }
  }
  return order;
}

using Label = std::vector<int>;

// Minimal input-path label per vertex index; empty optional when unreachable.
std::vector<std::optional<Label>> input_labels(const Wiring& w) {
  std::vector<std::optional<Label>> lab(w.r);
  for (int v : topo_indices(w)) {
    for (int k = 0; k < w.in[v]; ++k) {
      int s = w.src_of[w.target_of_vin(v, k)];
      Label cand;
      if (s < w.m) {
        cand = {s + 1, k + 1};
      } else {
        int u = w.src_owner[s];
        if (!lab[u]) continue;
        cand = *lab[u];
        cand.push_back(w.src_port[s] + 1);
        cand.push_back(k + 1);
      }
      if (!lab[v] || cand < *lab[v]) lab[v] = std::move(cand);
    }
  }
  return lab;
}

std::vector<std::optional<Label>> output_labels(const Wiring& w) {
  std::vector<std::optional<Label>> lab(w.r);
  auto topo = topo_indices(w);
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    int v = *it;
    for (int k = 0; k < w.out[v]; ++k) {
      int t = w.tgt_of[w.source_of_vout(v, k)];
      Label cand;
      if (t < w.n) {
        cand = {t + 1, k + 1};
      } else {
        int u = w.tgt_owner[t];
        if (!lab[u]) continue;
        cand = *lab[u];
        cand.push_back(w.tgt_port[t] + 1);
        cand.push_back(k + 1);
      }
      if (!lab[v] || cand < *lab[v]) lab[v] = std::move(cand);
    }
  }
  return lab;
}

std::vector<PathLabel> sorted_labels(const Wiring& w, const std::vector<std::optional<Label>>& lab) {
  std::vector<PathLabel> out;
  for (int v = 0; v < w.r; ++v) {
    if (!lab[v]) throw Unreachable(w.ids[v]);
    out.push_back({w.ids[v], *lab[v]});
  }
  std::sort(out.begin(), out.end(),
            [](const PathLabel& a, const PathLabel& b) { return a.label < b.label; });
  return out;
}

std::vector<int> vertices_of(const std::vector<PathLabel>& labels) {
  std::vector<int> order;
  for (const auto& p : labels) order.push_back(p.vertex);
  return order;
}

// Serialization of a vertex placed at position p, referring only to
// vertices already placed (positions < p). Edges towards unplaced vertices
// are recorded when the other endpoint is placed.
void append_block(const Wiring& w, const std::vector<int>& pos, int v, std::vector<int>& key) {
  const int stride = w.max_port + 1;
  key.push_back(w.label[v]);
  key.push_back(w.in[v]);
  key.push_back(w.out[v]);
  for (int k = 0; k < w.in[v]; ++k) {
    int s = w.src_of[w.target_of_vin(v, k)];
    if (s < w.m) {
      key.push_back(0);
      key.push_back(s + 1);
    } else if (int u = w.src_owner[s]; pos[u] >= 0) {
      key.push_back(1);
      key.push_back(pos[u] * stride + w.src_port[s]);
    } else {
      key.push_back(2);
      key.push_back(0);
    }
  }
  for (int k = 0; k < w.out[v]; ++k) {
    int t = w.tgt_of[w.source_of_vout(v, k)];
    if (t < w.n) {
      key.push_back(0);
      key.push_back(t + 1);
    } else if (int u = w.tgt_owner[t]; pos[u] >= 0) {
      key.push_back(1);
      key.push_back(pos[u] * stride + w.tgt_port[t]);
    } else {
      key.push_back(2);
      key.push_back(0);
    }
  }
}

// Branch-and-bound over orderings of the free vertices: at each depth only
// candidates with the minimal block survive, and partial keys exceeding the
// best complete key are cut.
struct Search {
  const Wiring& w;
  std::vector<int> free;
  std::vector<int> pos;
  std::vector<int> order;
  std::vector<int> key;
  std::vector<int> best_key;
  std::vector<int> best_order;
  bool have_best = false;

  void run(std::size_t depth) {
    if (depth == free.size()) {
      if (!have_best || key < best_key) {
        best_key = key;
        best_order = order;
        have_best = true;
      }
      return;
    }
    const int p = static_cast<int>(order.size());
    std::vector<std::pair<std::vector<int>, int>> blocks;
    for (int v : free) {
      if (pos[v] >= 0) continue;
      std::vector<int> b;
      pos[v] = p;
      append_block(w, pos, v, b);
      pos[v] = -1;
      blocks.emplace_back(std::move(b), v);
    }
    const auto& min_block =
        std::min_element(blocks.begin(), blocks.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; })
            ->first;
    const std::vector<int> chosen_block = min_block;
    for (const auto& [b, v] : blocks) {
      if (b != chosen_block) continue;
      const std::size_t mark = key.size();
      key.insert(key.end(), b.begin(), b.end());
      if (have_best) {
        const std::size_t len = std::min(key.size(), best_key.size());
        if (std::lexicographical_compare(best_key.begin(), best_key.begin() + len, key.begin(),
                                         key.begin() + len)) {
          key.resize(mark);
          continue;
        }
      }
      pos[v] = p;
      order.push_back(v);
      run(depth + 1);
      order.pop_back();
      pos[v] = -1;
      key.resize(mark);
    }
  }
};

Graph rename_to_positions(const Graph& g, const std::vector<int>& order_ids) {
  std::vector<std::pair<int, int>> ids;
  for (std::size_t i = 0; i < order_ids.size(); ++i) {
    ids.emplace_back(order_ids[i], static_cast<int>(i) + 1);
  }
  return rename_vertices(g, ids);
}

}  // namespace

std::vector<PathLabel> input_path_labels(const Graph& g) {
  Wiring w = build_wiring(g);
  return sorted_labels(w, input_labels(w));
}

std::vector<int> input_path_order(const Graph& g) { return vertices_of(input_path_labels(g)); }

std::vector<PathLabel> output_path_labels(const Graph& g) {
  Wiring w = build_wiring(g);
  return sorted_labels(w, output_labels(w));
}

std::vector<int> output_path_order(const Graph& g) { return vertices_of(output_path_labels(g)); }

CanonicalForm canonicalize(const Graph& g) {
  Wiring w = build_wiring(g);
  CanonicalForm cf;
  if (w.r == 0) {
    cf.graph = g;
    cf.graph.normalize();
    cf.method = CanonicalMethod::empty;
    return cf;
  }
  auto in_lab = input_labels(w);
  auto out_lab = output_labels(w);

  std::vector<int> group_in, group_out, group_free, isolated;
  for (int v = 0; v < w.r; ++v) {
    if (in_lab[v]) {
      group_in.push_back(v);
    } else if (out_lab[v]) {
      group_out.push_back(v);
    } else if (w.in[v] == 0 && w.out[v] == 0) {
      isolated.push_back(v);
    } else {
      group_free.push_back(v);
    }
  }
  std::sort(group_in.begin(), group_in.end(),
            [&](int a, int b) { return *in_lab[a] < *in_lab[b]; });
  std::sort(group_out.begin(), group_out.end(),
            [&](int a, int b) { return *out_lab[a] < *out_lab[b]; });
  // Isolated vertices are interchangeable up to their label.
  std::stable_sort(isolated.begin(), isolated.end(),
                   [&](int a, int b) { return w.label[a] < w.label[b]; });

  Search search{w, group_free, std::vector<int>(w.r, -1), {}, {}, {}, {}, false};
  for (int v : group_in) search.order.push_back(v);
  for (int v : group_out) search.order.push_back(v);
  for (std::size_t p = 0; p < search.order.size(); ++p) {
    search.pos[search.order[p]] = static_cast<int>(p);
  }
  std::vector<int> order = search.order;
  if (!group_free.empty()) {
    search.run(0);
    order = search.best_order;
  }
  order.insert(order.end(), isolated.begin(), isolated.end());

  for (int v : order) cf.order.push_back(w.ids[v]);
  cf.graph = rename_to_positions(g, cf.order);
  if (group_in.size() == static_cast<std::size_t>(w.r)) {
    cf.method = CanonicalMethod::input_path;
  } else if (group_out.size() == static_cast<std::size_t>(w.r)) {
    cf.method = CanonicalMethod::output_path;
  } else {
    cf.method = CanonicalMethod::mixed;
  }
  return cf;
}

bool is_isomorphic(const Graph& g, const Graph& h) { return canonicalize(g) == canonicalize(h); }

std::uint64_t digest(const Graph& g) {
  // FNV-1a over a flat integer/byte encoding.
  std::uint64_t hash = 1469598103934665603ULL;
  auto mix_byte = [&](unsigned char c) {
    hash ^= c;
    hash *= 1099511628211ULL;
  };
  auto mix_int = [&](long long x) {
    for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>((x >> (8 * i)) & 0xff));
  };
  mix_int(g.m);
  mix_int(g.n);
  mix_int(static_cast<long long>(g.vertices.size()));
  for (const auto& v : g.vertices) {
    mix_int(v.id);
    mix_int(v.in);
    mix_int(v.out);
    if (v.label) {
      mix_int(static_cast<long long>(v.label->size()));
      for (char c : *v.label) mix_byte(static_cast<unsigned char>(c));
    } else {
      mix_int(-1);
    }
  }
  for (const auto& e : g.edges) {
    for (const Port* p : {&e.src, &e.dst}) {
      mix_int(static_cast<int>(p->kind));
      mix_int(p->vertex);
      mix_int(p->index);
    }
  }
  return hash;
}

std::uint64_t graph_hash(const Graph& g) { return digest(canonicalize(g).graph); }

NumberedGraph number_by(const Graph& g, const std::vector<int>& order) {
  if (order.size() != g.vertices.size()) {
    throw PreconditionViolation("numbering must cover every vertex");
  }
  return {rename_to_positions(g, order)};
}

NumberedGraph renumber(const NumberedGraph& g, const Permutation& w) {
  if (w.size() != g.graph.vertices.size() || !is_permutation(w)) {
    throw BoundaryMismatch("renumbering must be a permutation of the vertex numbers");
  }
  std::vector<std::pair<int, int>> ids;
  for (std::size_t i = 0; i < w.size(); ++i) ids.emplace_back(static_cast<int>(i) + 1, w[i]);
  return {rename_vertices(g.graph, ids)};
}

bool free_action_check(const NumberedGraph& g) {
  const int r = static_cast<int>(g.graph.vertices.size());
  for (int i = 1; i <= r; ++i) {
    const Vertex* v = g.graph.find_vertex(i);
    if (v == nullptr) throw PreconditionViolation("numbered graph ids must be 1..r");
    if (v->in == 0) {
      throw PreconditionViolation("vertex " + std::to_string(i) + " has no inputs");
    }
  }
  require_valid(g.graph);
  Graph base = g.graph;
  base.normalize();
  Permutation w = identity_permutation(r);
  while (std::next_permutation(w.begin(), w.end())) {
    if (renumber(g, w).graph == base) return false;
  }
  return true;
}

EnumerationLimits default_limits() {
  EnumerationLimits limits;
  if (const char* env = std::getenv("PROPCALC_MAX_VERTICES")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0 && v <= 30) limits.max_vertices = static_cast<int>(v);
  }
  return limits;
}

void for_each_numbered_graph(const std::vector<Arity>& arities, int m, int n,
                             const std::function<void(const NumberedGraph&)>& visit,
                             const EnumerationLimits& limits) {
  if (m < 0 || n < 0) throw PreconditionViolation("boundary counts must be non-negative");
  const int r = static_cast<int>(arities.size());
  if (r > limits.max_vertices) {
    throw ResourceLimit("enumeration of " + std::to_string(r) + " vertices exceeds cap of " +
                        std::to_string(limits.max_vertices));
  }
  std::vector<Port> sources, targets;
  std::vector<int> src_owner, tgt_owner;
  for (int i = 1; i <= m; ++i) {
    sources.push_back(Port::input(i));
    src_owner.push_back(-1);
  }
  for (int j = 1; j <= n; ++j) {
    targets.push_back(Port::output(j));
    tgt_owner.push_back(-1);
  }
  for (int v = 0; v < r; ++v) {
    if (arities[v].in < 0 || arities[v].out < 0) {
      throw PreconditionViolation("arities must be non-negative");
    }
    for (int k = 1; k <= arities[v].out; ++k) {
      sources.push_back(Port::vout(v + 1, k));
      src_owner.push_back(v);
    }
    for (int k = 1; k <= arities[v].in; ++k) {
      targets.push_back(Port::vin(v + 1, k));
      tgt_owner.push_back(v);
    }
  }
  if (sources.size() != targets.size()) return;
  if (static_cast<int>(sources.size()) > limits.max_edges) {
    throw ResourceLimit("enumeration with " + std::to_string(sources.size()) +
                        " edges exceeds cap of " + std::to_string(limits.max_edges));
  }

  Graph proto;
  proto.m = m;
  proto.n = n;
  for (int v = 0; v < r; ++v) proto.vertices.push_back({v + 1, arities[v].in, arities[v].out, {}});

  const std::size_t count = targets.size();
  std::vector<int> assigned(count, -1);
  std::vector<bool> used(count, false);
  // reach[v] has bit u set when u is reachable from v by a non-empty path.
  std::vector<std::uint32_t> reach(r, 0);

  std::function<void(std::size_t)> rec = [&](std::size_t t) {
    if (t == count) {
      NumberedGraph g{proto};
      for (std::size_t k = 0; k < count; ++k) g.graph.edges.push_back({sources[assigned[k]], targets[k]});
      g.graph.normalize();
      visit(g);
      return;
    }
    const int v = tgt_owner[t];
    for (std::size_t s = 0; s < count; ++s) {
      if (used[s]) continue;
      const int u = src_owner[s];
      std::vector<std::uint32_t> saved;
      if (u >= 0 && v >= 0) {
        if (u == v || ((reach[v] >> u) & 1U)) continue;
        saved = reach;
        const std::uint32_t add = reach[v] | (1U << v);
        for (int x = 0; x < r; ++x) {
          if (x == u || ((reach[x] >> u) & 1U)) reach[x] |= add;
        }
      }
      used[s] = true;
      assigned[t] = static_cast<int>(s);
      rec(t + 1);
      used[s] = false;
      if (!saved.empty()) reach = std::move(saved);
    }
  };
  rec(0);
}

std::vector<NumberedGraph> enumerate_graphs(const std::vector<Arity>& arities, int m, int n,
                                            bool upto_iso, const EnumerationLimits& limits) {
  std::vector<NumberedGraph> out;
  if (!upto_iso) {
    for_each_numbered_graph(arities, m, n, [&](const NumberedGraph& g) { out.push_back(g); },
                            limits);
    return out;
  }
  std::set<Graph> classes;
  for_each_numbered_graph(
      arities, m, n, [&](const NumberedGraph& g) { classes.insert(canonicalize(g.graph).graph); },
      limits);
  for (const auto& g : classes) out.push_back({g});
  return out;
}

}  // namespace propcalc
