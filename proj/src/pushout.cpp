#include "propcalc/pushout.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "propcalc/canonical.hpp"

namespace propcalc {

bool FiniteSetMap::injective() const {
  std::set<int> seen(map.begin(), map.end());
  return seen.size() == map.size();
}

bool FiniteSetMap::surjective() const {
  std::set<int> seen(map.begin(), map.end());
  return static_cast<int>(seen.size()) == target;
}

void FiniteSetMap::check() const {
  if (source < 0 || target < 0 || static_cast<int>(map.size()) != source) {
    throw PreconditionViolation("map is not total");
  }
  for (int x : map) {
    if (x < 0 || x >= target) throw PreconditionViolation("map value out of range");
  }
}

FiniteSetMap FiniteSetMap::identity(int size) {
  FiniteSetMap f{size, size, std::vector<int>(size)};
  std::iota(f.map.begin(), f.map.end(), 0);
  return f;
}

FiniteSetMap compose(const FiniteSetMap& f, const FiniteSetMap& g) {
  if (f.target != g.source) throw PreconditionViolation("maps do not compose");
  FiniteSetMap r{f.source, g.target, {}};
  for (int x : f.map) r.map.push_back(g.map[x]);
  return r;
}

int SetDiagram::add_object(int size) {
  sizes.push_back(size);
  return static_cast<int>(sizes.size()) - 1;
}

void SetDiagram::add_arrow(int from, int to, FiniteSetMap f) {
  if (from < 0 || to < 0 || from >= static_cast<int>(sizes.size()) ||
      to >= static_cast<int>(sizes.size())) {
    throw PreconditionViolation("arrow between unknown objects");
  }
  f.check();
  if (f.source != sizes[from] || f.target != sizes[to]) {
    throw PreconditionViolation("arrow does not match object sizes");
  }
  arrows.push_back({from, to, std::move(f)});
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

Colimit colimit(const SetDiagram& d) {
  std::vector<int> offset(d.sizes.size() + 1, 0);
  for (std::size_t k = 0; k < d.sizes.size(); ++k) offset[k + 1] = offset[k] + d.sizes[k];
  UnionFind uf(offset.back());
  for (const auto& a : d.arrows) {
    for (int x = 0; x < a.f.source; ++x) uf.unite(offset[a.from] + x, offset[a.to] + a.f.map[x]);
  }
  // Classes numbered by first appearance in the disjoint union.
  std::map<int, int> number;
  Colimit c;
  c.legs.resize(d.sizes.size());
  for (std::size_t k = 0; k < d.sizes.size(); ++k) {
    for (int x = 0; x < d.sizes[k]; ++x) {
      const int root = uf.find(offset[k] + x);
      auto [it, fresh] = number.emplace(root, static_cast<int>(number.size()));
      c.legs[k].push_back(it->second);
    }
  }
  c.size = static_cast<int>(number.size());
  return c;
}

Colimit pushout(const FiniteSetMap& f, const FiniteSetMap& g) {
  if (f.source != g.source) throw PreconditionViolation("span legs have different sources");
  SetDiagram d;
  const int a = d.add_object(f.source);
  const int b = d.add_object(f.target);
  const int c = d.add_object(g.target);
  d.add_arrow(a, b, f);
  d.add_arrow(a, c, g);
  return colimit(d);
}

int CubeDiagram::vertex_size(unsigned mask) const {
  int size = 1;
  for (int k = 0; k < n; ++k) size *= (mask >> k & 1u) ? i.target : i.source;
  return size;
}

std::vector<int> CubeDiagram::decode(unsigned mask, int index) const {
  std::vector<int> t(n);
  for (int k = n - 1; k >= 0; --k) {
    const int base = (mask >> k & 1u) ? i.target : i.source;
    t[k] = index % base;
    index /= base;
  }
  return t;
}

int CubeDiagram::encode(unsigned mask, const std::vector<int>& tuple) const {
  int index = 0;
  for (int k = 0; k < n; ++k) index = index * ((mask >> k & 1u) ? i.target : i.source) + tuple[k];
  return index;
}

int CubeDiagram::to_terminal(unsigned mask, int index) const {
  std::vector<int> t = decode(mask, index);
  for (int k = 0; k < n; ++k) {
    if (!(mask >> k & 1u)) t[k] = i.map[t[k]];
  }
  return encode(terminal(), t);
}

PuncturedColimit punctured_colimit(const CubeDiagram& c) {
  c.i.check();
  if (c.n < 0 || c.n > 12) throw ResourceLimit("cube dimension out of range");
  PuncturedColimit out;
  if (c.n == 0) return out;
  const unsigned top = c.terminal();
  SetDiagram d;
  for (unsigned mask = 0; mask < top; ++mask) d.add_object(c.vertex_size(mask));
  for (unsigned mask = 0; mask < top; ++mask) {
    for (int k = 0; k < c.n; ++k) {
      const unsigned up = mask | (1u << k);
      if (up == mask || up == top) continue;
      FiniteSetMap f{d.sizes[mask], d.sizes[up], {}};
      for (int x = 0; x < d.sizes[mask]; ++x) {
        std::vector<int> t = c.decode(mask, x);
        t[k] = c.i.map[t[k]];
        f.map.push_back(c.encode(up, t));
      }
      d.add_arrow(static_cast<int>(mask), static_cast<int>(up), std::move(f));
    }
  }
  out.colim = colimit(d);
  out.lambda.assign(out.colim.size, -1);
  out.representative_mask.assign(out.colim.size, -1);
  out.representative_index.assign(out.colim.size, -1);
  for (unsigned mask = 0; mask < top; ++mask) {
    for (int x = 0; x < d.sizes[mask]; ++x) {
      const int cls = out.colim.legs[mask][x];
      const int image = c.to_terminal(mask, x);
      if (out.lambda[cls] == -1) {
        out.lambda[cls] = image;
        out.representative_mask[cls] = static_cast<int>(mask);
        out.representative_index[cls] = x;
      } else if (out.lambda[cls] != image) {
        throw Error("cube faces do not commute");
      }
    }
  }
  return out;
}

IteratedReport iterated_identity_check(const FiniteSetMap& i, int n) {
  if (n < 2) throw PreconditionViolation("iterated identity needs n >= 2");
  i.check();
  const int ks = i.source;
  const int ls = i.target;
  CubeDiagram cube{i, n};
  CubeDiagram prev_cube{i, n - 1};
  const PuncturedColimit lhs = punctured_colimit(cube);
  const PuncturedColimit prev = punctured_colimit(prev_cube);
  const int prev_size = prev.colim.size;
  const int power = prev_cube.vertex_size(prev_cube.terminal());  // |L|^{n-1}

  // Span L_{n-1} x L <- L_{n-1} x K -> L^{n-1} x K.
  FiniteSetMap f{prev_size * ks, prev_size * ls, {}};
  FiniteSetMap g{prev_size * ks, power * ks, {}};
  for (int c = 0; c < prev_size; ++c) {
    for (int k = 0; k < ks; ++k) {
      f.map.push_back(c * ls + i.map[k]);
      g.map.push_back(prev.lambda[c] * ks + k);
    }
  }
  const Colimit rhs = pushout(f, g);

  IteratedReport report;
  report.lhs_size = lhs.colim.size;
  report.rhs_size = rhs.size;
  report.bijection.assign(rhs.size, -1);
  report.well_defined = true;
  auto assign = [&](int rhs_class, int lhs_class) {
    int& slot = report.bijection[rhs_class];
    if (slot == -1) {
      slot = lhs_class;
    } else if (slot != lhs_class) {
      report.well_defined = false;
    }
  };
  // Every element of every punctured (n-1)-cube vertex, extended by an L
  // coordinate, lands in vertex mask + top bit of the n-cube.
  const unsigned last = 1u << (n - 1);
  for (unsigned mask = 0; mask < prev_cube.terminal(); ++mask) {
    for (int x = 0; x < prev_cube.vertex_size(mask); ++x) {
      std::vector<int> t = prev_cube.decode(mask, x);
      t.push_back(0);
      const int c = prev.colim.legs[mask][x];
      for (int l = 0; l < ls; ++l) {
        t.back() = l;
        assign(rhs.legs[1][c * ls + l], lhs.colim.legs[mask | last][cube.encode(mask | last, t)]);
      }
    }
  }
  const unsigned side = last - 1;  // L^{n-1} x K
  for (int t_index = 0; t_index < power; ++t_index) {
    std::vector<int> t = prev_cube.decode(prev_cube.terminal(), t_index);
    t.push_back(0);
    for (int k = 0; k < ks; ++k) {
      t.back() = k;
      assign(rhs.legs[2][t_index * ks + k], lhs.colim.legs[side][cube.encode(side, t)]);
    }
  }
  std::set<int> hit(report.bijection.begin(), report.bijection.end());
  report.bijective = report.well_defined && !hit.count(-1) &&
                     static_cast<int>(hit.size()) == rhs.size && rhs.size == lhs.colim.size;

  // lambda on the pushout: (c, l) -> (lambda(c), l), (t, k) -> (t, i(k)).
  report.commutes_with_lambda = report.well_defined;
  for (int c = 0; c < prev_size && report.commutes_with_lambda; ++c) {
    for (int l = 0; l < ls; ++l) {
      const int cls = report.bijection[rhs.legs[1][c * ls + l]];
      report.commutes_with_lambda = report.commutes_with_lambda && cls >= 0 &&
                                    lhs.lambda[cls] == prev.lambda[c] * ls + l;
    }
  }
  for (int t_index = 0; t_index < power && report.commutes_with_lambda; ++t_index) {
    for (int k = 0; k < ks; ++k) {
      const int cls = report.bijection[rhs.legs[2][t_index * ks + k]];
      report.commutes_with_lambda = report.commutes_with_lambda && cls >= 0 &&
                                    lhs.lambda[cls] == t_index * ls + i.map[k];
    }
  }
  return report;
}

CoequalizerReport reflexive_coequalizer_check(const FiniteSetMap& u, const FiniteSetMap& s) {
  u.check();
  s.check();
  if (u.source != s.source) throw PreconditionViolation("span legs have different sources");
  const int ss = u.source, as = u.target, ts = s.target;
  CoequalizerReport report;
  const Colimit po = pushout(s, u);  // legs S, T, A
  report.pushout_size = po.size;

  // X1 = T + S + A, X0 = T + A.
  FiniteSetMap d0{ts + ss + as, ts + as, {}}, d1{ts + ss + as, ts + as, {}}, s0{ts + as, ts + ss + as, {}};
  for (int x = 0; x < ts; ++x) {
    d0.map.push_back(x);
    d1.map.push_back(x);
  }
  for (int x = 0; x < ss; ++x) {
    d0.map.push_back(ts + u.map[x]);
    d1.map.push_back(s.map[x]);
  }
  for (int x = 0; x < as; ++x) {
    d0.map.push_back(ts + x);
    d1.map.push_back(ts + x);
  }
  for (int x = 0; x < ts; ++x) s0.map.push_back(x);
  for (int x = 0; x < as; ++x) s0.map.push_back(ts + ss + x);
  const FiniteSetMap id = FiniteSetMap::identity(ts + as);
  report.reflexive = compose(s0, d0).map == id.map && compose(s0, d1).map == id.map;

  SetDiagram d;
  const int x1 = d.add_object(ts + ss + as);
  const int x0 = d.add_object(ts + as);
  d.add_arrow(x1, x0, d0);
  d.add_arrow(x1, x0, d1);
  const Colimit co = colimit(d);
  report.coequalizer_size = co.size;

  std::vector<int> to_co(po.size, -1);
  bool consistent = true;
  auto assign = [&](int p, int q) {
    if (to_co[p] == -1) {
      to_co[p] = q;
    } else if (to_co[p] != q) {
      consistent = false;
    }
  };
  for (int x = 0; x < ts; ++x) assign(po.legs[1][x], co.legs[x0][x]);
  for (int x = 0; x < as; ++x) assign(po.legs[2][x], co.legs[x0][ts + x]);
  for (int x = 0; x < ss; ++x) assign(po.legs[0][x], co.legs[x0][s.map[x]]);
  std::set<int> hit(to_co.begin(), to_co.end());
  report.agree = consistent && !hit.count(-1) && static_cast<int>(hit.size()) == co.size &&
                 po.size == co.size;
  return report;
}

namespace {

PropElement relabel(const PropElement& e, const std::function<std::string(const std::string&)>& fn) {
  Graph g = e.graph();
  for (auto& v : g.vertices) v.label = fn(*v.label);
  return PropElement(g);
}

std::string strip_tag(const std::string& s) { return s.substr(2); }

int count_prefix(const PropElement& e, char tag) {
  int count = 0;
  for (const auto& v : e.graph().vertices) count += (*v.label)[0] == tag ? 1 : 0;
  return count;
}

std::vector<PropElement> bounded_elements(const Signature& sig, int m, int n, int max_vertices,
                                          std::size_t max_elements) {
  std::vector<PropElement> all;
  for (int r = 0; r <= max_vertices; ++r) {
    auto layer = basis_elements(sig, m, n, r);
    all.insert(all.end(), layer.begin(), layer.end());
    if (all.size() > max_elements) throw ResourceLimit("filtration enumeration too large");
  }
  return all;
}

std::map<PropElement, int> index_of(const std::vector<PropElement>& items) {
  std::map<PropElement, int> idx;
  for (const auto& e : items) idx.emplace(e, static_cast<int>(idx.size()));
  return idx;
}

FiniteSetMap map_into(const std::vector<PropElement>& source, const std::map<PropElement, int>& target,
                      const std::function<PropElement(const PropElement&)>& fn) {
  FiniteSetMap f{static_cast<int>(source.size()), static_cast<int>(target.size()), {}};
  for (const auto& e : source) {
    auto it = target.find(fn(e));
    if (it == target.end()) throw Error("filtration map leaves its corner");
    f.map.push_back(it->second);
  }
  return f;
}

std::size_t image_size(const FiniteSetMap& f) { return std::set<int>(f.map.begin(), f.map.end()).size(); }

}  // namespace

bool FiltrationReport::ok() const {
  if (!nested || !exhausts || !coequalizer_matches) return false;
  return std::all_of(squares.begin(), squares.end(), [](const SquareReport& s) { return s.ok(); });
}

FiltrationReport filtration_square_check(const FiltrationInstance& inst, const FiltrationBounds& bounds) {
  std::set<std::string> l_names, k_only;
  for (const auto& g : inst.l.generators()) l_names.insert(g.name);
  for (const auto& g : inst.k.generators()) {
    const Generator* h = inst.l.find(g.name);
    if (h == nullptr || h->m != g.m || h->n != g.n) {
      throw PreconditionViolation("K is not a sub-signature of L at '" + g.name + "'");
    }
  }
  for (const auto& g : inst.m0.generators()) {
    if (l_names.count(g.name)) throw PreconditionViolation("M0 and L share the name '" + g.name + "'");
  }
  if (bounds.max_degree < 0 || bounds.max_vertices < 0) throw PreconditionViolation("negative bound");
  std::set<std::string> new_names = l_names;  // L minus K
  for (const auto& g : inst.k.generators()) new_names.erase(g.name);

  // Tagged alphabet: P-side labels "P:", K-slots "K:", L-slots "L:".
  Signature tagged, plain;
  for (const auto& g : inst.m0.generators()) {
    tagged.add({"P:" + g.name, g.m, g.n});
    plain.add(g);
  }
  for (const auto& g : inst.k.generators()) {
    tagged.add({"P:" + g.name, g.m, g.n});
    tagged.add({"K:" + g.name, g.m, g.n});
  }
  for (const auto& g : inst.l.generators()) {
    tagged.add({"L:" + g.name, g.m, g.n});
    plain.add(g);
  }
  auto degree = [&](const PropElement& e) {
    int count = 0;
    for (const auto& v : e.graph().vertices) count += new_names.count(*v.label) ? 1 : 0;
    return count;
  };
  auto forget = [](const PropElement& e) { return relabel(e, strip_tag); };

  FiltrationReport report;
  report.nested = report.exhausts = report.coequalizer_matches = true;
  for (const auto& [m, n] : bounds.boundaries) {
    const auto tagged_all = bounded_elements(tagged, m, n, bounds.max_vertices, bounds.max_elements);
    const auto plain_all = bounded_elements(plain, m, n, bounds.max_vertices, bounds.max_elements);

    // E_q: images of tagged graphs without K-slots and at most q L-slots.
    std::set<PropElement> previous;
    for (int q = 0; q <= bounds.max_vertices; ++q) {
      std::set<PropElement> image, filtered;
      for (const auto& e : tagged_all) {
        if (count_prefix(e, 'K') == 0 && count_prefix(e, 'L') <= q) image.insert(forget(e));
      }
      for (const auto& e : plain_all) {
        if (degree(e) <= q) filtered.insert(e);
      }
      report.nested = report.nested && std::includes(image.begin(), image.end(), previous.begin(), previous.end());
      report.coequalizer_matches = report.coequalizer_matches && image == filtered;
      if (q == bounds.max_vertices) {
        report.exhausts = report.exhausts && image == std::set<PropElement>(plain_all.begin(), plain_all.end());
      }
      previous = std::move(image);
    }

    for (int deg = 0; deg <= bounds.max_degree; ++deg) {
      std::vector<PropElement> u, v, c, d;
      for (const auto& e : tagged_all) {
        const int p = count_prefix(e, 'K');
        const int q = count_prefix(e, 'L');
        if (p == 0 && q == deg) v.push_back(e);
        if (p >= 1 && p + q == deg) u.push_back(e);
      }
      for (const auto& e : plain_all) {
        const int k = degree(e);
        if (k <= deg - 1) c.push_back(e);
        if (k <= deg) d.push_back(e);
      }
      const auto v_index = index_of(v), c_index = index_of(c), d_index = index_of(d);
      const FiniteSetMap d0 = map_into(u, v_index, [](const PropElement& e) {
        return relabel(e, [](const std::string& s) { return s[0] == 'K' ? "L:" + s.substr(2) : s; });
      });
      const FiniteSetMap d1 = map_into(u, c_index, forget);
      const FiniteSetMap v_to_d = map_into(v, d_index, forget);
      const FiniteSetMap c_to_d = map_into(c, d_index, [](const PropElement& e) { return e; });
      const Colimit po = pushout(d0, d1);  // legs U, V, C

      SquareReport sq;
      sq.degree = deg;
      sq.m = m;
      sq.n = n;
      sq.u = u.size();
      sq.v = v.size();
      sq.c = c.size();
      sq.d = d.size();
      sq.image_in_v = image_size(d0);
      sq.image_in_c = image_size(d1);
      sq.pushout = static_cast<std::size_t>(po.size);
      sq.cardinality_identity = sq.d == sq.c + sq.v - sq.image_in_v;

      std::vector<int> induced(po.size, -1);
      bool consistent = true;
      auto assign = [&](int cls, int target) {
        if (induced[cls] == -1) {
          induced[cls] = target;
        } else if (induced[cls] != target) {
          consistent = false;
        }
      };
      for (std::size_t x = 0; x < v.size(); ++x) assign(po.legs[1][x], v_to_d.map[x]);
      for (std::size_t x = 0; x < c.size(); ++x) assign(po.legs[2][x], c_to_d.map[x]);
      std::set<int> hit(induced.begin(), induced.end());
      sq.pushout_is_d = consistent && !hit.count(-1) && hit.size() == d.size() &&
                        static_cast<std::size_t>(po.size) == d.size();
      report.squares.push_back(sq);
    }
  }
  return report;
}

Json filtration_report_to_json(const FiltrationReport& r) {
  Json squares = Json::array();
  for (const auto& s : r.squares) {
    Json j;
    j["degree"] = s.degree;
    j["m"] = s.m;
    j["n"] = s.n;
    j["U"] = s.u;
    j["V"] = s.v;
    j["C"] = s.c;
    j["D"] = s.d;
    j["image_d0"] = s.image_in_v;
    j["image_d1"] = s.image_in_c;
    j["pushout"] = s.pushout;
    j["cardinality_identity"] = s.cardinality_identity;
    j["pushout_is_D"] = s.pushout_is_d;
    squares.push_back(std::move(j));
  }
  Json out;
  out["squares"] = std::move(squares);
  out["nested"] = r.nested;
  out["exhausts"] = r.exhausts;
  out["coequalizer_matches"] = r.coequalizer_matches;
  out["ok"] = r.ok();
  return out;
}

}  // namespace propcalc
