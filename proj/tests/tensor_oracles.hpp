#pragma once

// Reference implementations for tensor evaluation that share no code with
// the contraction engine: a sum over all edge colourings, entrywise
// Kronecker and matrix products, and wire tracing for identity assignments.

#include <random>

#include "propcalc/tensor.hpp"
#include "test_support.hpp"

namespace testing_support {

/// Every arity label random_graph can produce with max_arity 2.
inline Signature random_graph_signature(int variants = 2) {
  std::vector<Generator> gens;
  for (int a = 0; a <= 2; ++a) {
    for (int b = 0; b <= 2; ++b) {
      for (int k = 0; k < variants; ++k) gens.push_back({arity_label(a, b, k), a, b});
    }
  }
  return Signature(gens);
}

inline RatTensor random_matrix(std::mt19937& rng, int rows, int cols) {
  std::uniform_int_distribution<int> num(-3, 3), den(1, 3);
  RatTensor r = RatTensor::matrix(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      r.at(i, j) = mpq_class(num(rng), den(rng));
      r.at(i, j).canonicalize();
    }
  }
  return r;
}

inline AlgebraAssignment random_assignment(std::mt19937& rng, int d, const Signature& sig) {
  AlgebraAssignment a;
  a.dim = d;
  for (const auto& g : sig.generators()) {
    a.matrices[g.name] = random_matrix(rng, int_pow(d, g.n), int_pow(d, g.m));
  }
  return a;
}

inline RatTensor naive_kron(const RatTensor& a, const RatTensor& b) {
  RatTensor r = RatTensor::matrix(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < r.rows(); ++i) {
    for (int j = 0; j < r.cols(); ++j) {
      r.at(i, j) = a.at(i / b.rows(), j / b.cols()) * b.at(i % b.rows(), j % b.cols());
    }
  }
  return r;
}

inline RatTensor naive_matmul(const RatTensor& a, const RatTensor& b) {
  RatTensor r = RatTensor::matrix(a.rows(), b.cols());
  for (int j = 0; j < b.cols(); ++j) {
    for (int i = 0; i < a.rows(); ++i) {
      mpq_class s = 0;
      for (int k = 0; k < a.cols(); ++k) s += a.at(i, k) * b.at(k, j);
      r.at(i, j) = s;
    }
  }
  return r;
}

inline RatTensor naive_kron_power(const RatTensor& f, int k) {
  RatTensor r = RatTensor::matrix(1, 1);
  r.at(0, 0) = 1;
  for (int i = 0; i < k; ++i) r = naive_kron(r, f);
  return r;
}

/// Sum over all assignments of values in [0,d) to the edges of g of the
/// product of generator entries; boundary edges fix the row and column.
inline RatTensor brute_force_eval(const Graph& g, const AlgebraAssignment& a) {
  const int d = a.dim;
  const int e = static_cast<int>(g.edges.size());
  int rows = 1, cols = 1;
  for (int j = 0; j < g.n; ++j) rows *= d;
  for (int i = 0; i < g.m; ++i) cols *= d;
  RatTensor r = RatTensor::matrix(rows, cols);
  std::vector<int> value(e, 0);
  for (;;) {
    std::vector<int> in(g.m), out(g.n);
    for (int k = 0; k < e; ++k) {
      if (g.edges[k].src.kind == PortKind::input) in[g.edges[k].src.index - 1] = value[k];
      if (g.edges[k].dst.kind == PortKind::output) out[g.edges[k].dst.index - 1] = value[k];
    }
    mpq_class w = 1;
    for (const auto& v : g.vertices) {
      std::vector<int> x(v.in), y(v.out);
      for (int k = 0; k < e; ++k) {
        if (g.edges[k].dst.kind == PortKind::vin && g.edges[k].dst.vertex == v.id) {
          x[g.edges[k].dst.index - 1] = value[k];
        }
        if (g.edges[k].src.kind == PortKind::vout && g.edges[k].src.vertex == v.id) {
          y[g.edges[k].src.index - 1] = value[k];
        }
      }
      int row = 0, col = 0;
      for (int t : y) row = row * d + t;
      for (int t : x) col = col * d + t;
      w *= a.matrices.at(*v.label).at(row, col);
      if (w == 0) break;
    }
    int row = 0, col = 0;
    for (int t : out) row = row * d + t;
    for (int t : in) col = col * d + t;
    r.at(row, col) += w;
    int k = 0;
    while (k < e && ++value[k] == d) value[k++] = 0;
    if (k == e) break;
  }
  return r;
}

/// For a graph whose vertices all have equal in- and out-arity, follow
/// input i through port k -> port k of each vertex; returns the output
/// reached by each input.
inline std::vector<int> trace_wires(const Graph& g) {
  std::map<Port, Port> next;
  for (const auto& e : g.edges) next[e.src] = e.dst;
  std::vector<int> w;
  for (int i = 1; i <= g.m; ++i) {
    Port p = next.at(Port::input(i));
    while (p.kind == PortKind::vin) p = next.at(Port::vout(p.vertex, p.index));
    w.push_back(p.index);
  }
  return w;
}

/// Entry (y,x) is 1 iff digit w(i) of y equals digit i of x.
inline RatTensor wire_matrix(int d, const std::vector<int>& w) {
  const int k = static_cast<int>(w.size());
  int size = 1;
  for (int i = 0; i < k; ++i) size *= d;
  RatTensor r = RatTensor::matrix(size, size);
  auto digit = [&](int index, int pos) {  // pos 1-based, most significant first
    for (int t = k; t > pos; --t) index /= d;
    return index % d;
  };
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      bool ok = true;
      for (int i = 1; i <= k; ++i) ok = ok && digit(y, w[i - 1]) == digit(x, i);
      if (ok) r.at(y, x) = 1;
    }
  }
  return r;
}

/// A uniformly chosen step of Kahn's algorithm at each point.
inline std::vector<int> random_topological_order(std::mt19937& rng, const Graph& g) {
  std::map<int, int> indegree;
  std::multimap<int, int> succ;
  for (const auto& v : g.vertices) indegree[v.id] = 0;
  for (const auto& e : g.edges) {
    if (e.src.kind == PortKind::vout && e.dst.kind == PortKind::vin) {
      ++indegree[e.dst.vertex];
      succ.emplace(e.src.vertex, e.dst.vertex);
    }
  }
  std::vector<int> ready, order;
  for (const auto& [id, k] : indegree) {
    if (k == 0) ready.push_back(id);
  }
  while (!ready.empty()) {
    std::size_t pick = std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(rng);
    const int id = ready[pick];
    ready.erase(ready.begin() + static_cast<long>(pick));
    order.push_back(id);
    auto [lo, hi] = succ.equal_range(id);
    for (auto it = lo; it != hi; ++it) {
      if (--indegree[it->second] == 0) ready.push_back(it->second);
    }
  }
  return order;
}

/// Random invertible rational matrix (retry until the inverse exists).
inline RatTensor random_invertible(std::mt19937& rng, int d) {
  for (;;) {
    RatTensor f = random_matrix(rng, d, d);
    try {
      inverse_matrix(f);
      return f;
    } catch (const Error&) {
    }
  }
}

}  // namespace testing_support
