#include "propcalc/graph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>

namespace propcalc {

std::string to_string(const Port& p) {
  switch (p.kind) {
    case PortKind::input:
      return "input " + std::to_string(p.index);
    case PortKind::output:
      return "output " + std::to_string(p.index);
    case PortKind::vin:
      return "vin(" + std::to_string(p.vertex) + "," + std::to_string(p.index) + ")";
    case PortKind::vout:
      return "vout(" + std::to_string(p.vertex) + "," + std::to_string(p.index) + ")";
  }
  return "?";
}

std::string to_string(Violation::Condition c) {
  using C = Violation::Condition;
  switch (c) {
    case C::bad_boundary: return "bad_boundary";
    case C::bad_vertex: return "bad_vertex";
    case C::dangling_port: return "dangling_port";
    case C::wrong_direction: return "wrong_direction";
    case C::input_coverage: return "input_coverage";
    case C::output_coverage: return "output_coverage";
    case C::vertex_in_coverage: return "vertex_in_coverage";
    case C::vertex_out_coverage: return "vertex_out_coverage";
    case C::acyclicity: return "acyclicity";
  }
  return "unknown";
}

const Vertex* Graph::find_vertex(int id) const {
  for (const auto& v : vertices) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

Vertex* Graph::find_vertex(int id) {
  for (auto& v : vertices) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

int Graph::max_vertex_id() const {
  int best = 0;
  for (const auto& v : vertices) best = std::max(best, v.id);
  return best;
}

void Graph::normalize() {
  std::sort(vertices.begin(), vertices.end(),
            [](const Vertex& a, const Vertex& b) { return a.id < b.id; });
  std::sort(edges.begin(), edges.end());
}

namespace {

bool port_exists(const Graph& g, const std::map<int, const Vertex*>& by_id, const Port& p) {
  switch (p.kind) {
    case PortKind::input:
      return p.index >= 1 && p.index <= g.m;
    case PortKind::output:
      return p.index >= 1 && p.index <= g.n;
    case PortKind::vin:
    case PortKind::vout: {
      auto it = by_id.find(p.vertex);
      if (it == by_id.end()) return false;
      int bound = p.kind == PortKind::vin ? it->second->in : it->second->out;
      return p.index >= 1 && p.index <= bound;
    }
  }
  return false;
}

}  // namespace

std::vector<Violation> validate(const Graph& g) {
  using C = Violation::Condition;
  std::vector<Violation> out;
  if (g.m < 0 || g.n < 0) {
    out.push_back({C::bad_boundary, "negative boundary (" + std::to_string(g.m) + "," +
                                        std::to_string(g.n) + ")"});
    return out;
  }
  std::map<int, const Vertex*> by_id;
  for (const auto& v : g.vertices) {
    if (v.in < 0 || v.out < 0) {
      out.push_back({C::bad_vertex, "vertex " + std::to_string(v.id) + " has negative arity"});
    }
    if (!by_id.emplace(v.id, &v).second) {
      out.push_back({C::bad_vertex, "duplicate vertex id " + std::to_string(v.id)});
    }
  }

  std::map<Port, int> hits;
  std::map<int, std::vector<int>> succ;
  for (const auto& e : g.edges) {
    bool ok = true;
    if (!e.src.is_source() || e.dst.is_source()) {
      out.push_back({C::wrong_direction, "edge " + to_string(e.src) + " -> " + to_string(e.dst)});
      ok = false;
    }
    for (const Port* p : {&e.src, &e.dst}) {
      if (!port_exists(g, by_id, *p)) {
        out.push_back({C::dangling_port, "edge endpoint " + to_string(*p) + " does not exist"});
        ok = false;
      }
    }
    if (!ok) continue;
    ++hits[e.src];
    ++hits[e.dst];
    if (e.src.kind == PortKind::vout && e.dst.kind == PortKind::vin) {
      succ[e.src.vertex].push_back(e.dst.vertex);
    }
  }

  auto check = [&](const Port& p, C cond) {
    int h = 0;
    if (auto it = hits.find(p); it != hits.end()) h = it->second;
    if (h != 1) {
      out.push_back({cond, to_string(p) + " is an endpoint of " + std::to_string(h) +
                               " edges (expected exactly one)"});
    }
  };
  for (int i = 1; i <= g.m; ++i) check(Port::input(i), C::input_coverage);
  for (int j = 1; j <= g.n; ++j) check(Port::output(j), C::output_coverage);
  for (const auto& [id, v] : by_id) {
    for (int k = 1; k <= v->in; ++k) check(Port::vin(id, k), C::vertex_in_coverage);
    for (int k = 1; k <= v->out; ++k) check(Port::vout(id, k), C::vertex_out_coverage);
  }

  // Directed cycle detection by depth-first search (0 new, 1 on stack, 2 done).
  std::map<int, int> state;
  std::vector<int> stack;
  std::function<bool(int)> dfs = [&](int v) -> bool {
    state[v] = 1;
    stack.push_back(v);
    for (int w : succ[v]) {
      if (state[w] == 1) {
        std::string cyc;
        auto it = std::find(stack.begin(), stack.end(), w);
        for (; it != stack.end(); ++it) cyc += std::to_string(*it) + " -> ";
        cyc += std::to_string(w);
        out.push_back({C::acyclicity, "directed cycle " + cyc});
        return true;
      }
      if (state[w] == 0 && dfs(w)) return true;
    }
    stack.pop_back();
    state[v] = 2;
    return false;
  };
  for (const auto& [id, v] : by_id) {
    if (state[id] == 0 && dfs(id)) break;
  }
  return out;
}

bool is_valid(const Graph& g) { return validate(g).empty(); }

void require_valid(const Graph& g, const char* what) {
  auto violations = validate(g);
  if (!violations.empty()) {
    throw InvalidGraph(std::string("invalid ") + what + ": " +
                       to_string(violations.front().condition) + ": " +
                       violations.front().detail);
  }
}

bool is_permutation(const Permutation& w) {
  std::vector<bool> seen(w.size() + 1, false);
  for (int x : w) {
    if (x < 1 || x > static_cast<int>(w.size()) || seen[x]) return false;
    seen[x] = true;
  }
  return true;
}

Permutation identity_permutation(int n) {
  Permutation w(n);
  for (int i = 0; i < n; ++i) w[i] = i + 1;
  return w;
}

Permutation inverse(const Permutation& w) {
  Permutation inv(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) inv[w[i] - 1] = static_cast<int>(i) + 1;
  return inv;
}

Permutation compose(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) throw BoundaryMismatch("permutation sizes differ");
  Permutation c(a.size());
  for (std::size_t i = 0; i < b.size(); ++i) c[i] = a[b[i] - 1];
  return c;
}

Permutation block_sum(const Permutation& a, const Permutation& b) {
  Permutation c = a;
  int shift = static_cast<int>(a.size());
  for (int x : b) c.push_back(x + shift);
  return c;
}

Graph identity(int n) {
  if (n < 0) throw BoundaryMismatch("identity of negative size");
  Graph g;
  g.m = g.n = n;
  for (int i = 1; i <= n; ++i) g.edges.push_back({Port::input(i), Port::output(i)});
  return g;
}

namespace {

Port shift_port(Port p, int in_shift, int out_shift, int id_shift) {
  switch (p.kind) {
    case PortKind::input: p.index += in_shift; break;
    case PortKind::output: p.index += out_shift; break;
    case PortKind::vin:
    case PortKind::vout: p.vertex += id_shift; break;
  }
  return p;
}

}  // namespace

Graph hcompose(const Graph& g, const Graph& h) {
  require_valid(g, "left operand");
  require_valid(h, "right operand");
  Graph r;
  r.m = g.m + h.m;
  r.n = g.n + h.n;
  int off = g.max_vertex_id();
  r.vertices = g.vertices;
  r.edges = g.edges;
  for (auto v : h.vertices) {
    v.id += off;
    r.vertices.push_back(std::move(v));
  }
  for (const auto& e : h.edges) {
    r.edges.push_back({shift_port(e.src, g.m, g.n, off), shift_port(e.dst, g.m, g.n, off)});
  }
  r.normalize();
  return r;
}

Graph vcompose(const Graph& top, const Graph& bottom) {
  if (top.n != bottom.m) {
    throw BoundaryMismatch("vertical composite: top has " + std::to_string(top.n) +
                           " outputs but bottom has " + std::to_string(bottom.m) + " inputs");
  }
  require_valid(top, "top operand");
  require_valid(bottom, "bottom operand");
  Graph r;
  r.m = top.m;
  r.n = bottom.n;
  int off = top.max_vertex_id();

  // Fusion: the source feeding top output j replaces bottom input j. Both
  // operands are valid, so a resolved source is never another fusion token.
  std::vector<Port> feeds(top.n + 1);
  for (const auto& e : top.edges) {
    if (e.dst.kind == PortKind::output) {
      feeds[e.dst.index] = e.src;
    } else {
      r.edges.push_back(e);
    }
  }
  r.vertices = top.vertices;
  for (auto v : bottom.vertices) {
    v.id += off;
    r.vertices.push_back(std::move(v));
  }
  for (const auto& e : bottom.edges) {
    Port src = e.src.kind == PortKind::input ? feeds[e.src.index] : shift_port(e.src, 0, 0, off);
    r.edges.push_back({src, shift_port(e.dst, 0, 0, off)});
  }
  r.normalize();
  return r;
}

Graph permute_inputs(const Graph& g, const Permutation& w) {
  if (static_cast<int>(w.size()) != g.m || !is_permutation(w)) {
    throw BoundaryMismatch("input permutation must be a bijection of {1.." + std::to_string(g.m) +
                           "}");
  }
  Permutation inv = inverse(w);
  Graph r = g;
  for (auto& e : r.edges) {
    if (e.src.kind == PortKind::input) e.src.index = inv[e.src.index - 1];
  }
  r.normalize();
  return r;
}

Graph permute_outputs(const Graph& g, const Permutation& w) {
  if (static_cast<int>(w.size()) != g.n || !is_permutation(w)) {
    throw BoundaryMismatch("output permutation must be a bijection of {1.." + std::to_string(g.n) +
                           "}");
  }
  Graph r = g;
  for (auto& e : r.edges) {
    if (e.dst.kind == PortKind::output) e.dst.index = w[e.dst.index - 1];
  }
  r.normalize();
  return r;
}

Graph rename_vertices(const Graph& g, const std::vector<std::pair<int, int>>& ids) {
  std::map<int, int> to(ids.begin(), ids.end());
  auto map_id = [&](int id) {
    auto it = to.find(id);
    if (it == to.end()) throw InvalidGraph("rename: vertex " + std::to_string(id) + " unmapped");
    return it->second;
  };
  Graph r = g;
  for (auto& v : r.vertices) v.id = map_id(v.id);
  for (auto& e : r.edges) {
    if (!e.src.is_boundary()) e.src.vertex = map_id(e.src.vertex);
    if (!e.dst.is_boundary()) e.dst.vertex = map_id(e.dst.vertex);
  }
  r.normalize();
  return r;
}

std::vector<int> topological_order(const Graph& g) {
  std::map<int, int> indeg;
  std::map<int, std::vector<int>> succ;
  for (const auto& v : g.vertices) indeg[v.id] = 0;
  for (const auto& e : g.edges) {
    if (e.src.kind == PortKind::vout && e.dst.kind == PortKind::vin) {
      succ[e.src.vertex].push_back(e.dst.vertex);
      ++indeg[e.dst.vertex];
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (const auto& [id, d] : indeg) {
    if (d == 0) ready.push(id);
  }
  std::vector<int> order;
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int w : succ[v]) {
      if (--indeg[w] == 0) ready.push(w);
    }
  }
  if (order.size() != g.vertices.size()) throw InvalidGraph("graph has a directed cycle");
  return order;
}

}  // namespace propcalc
