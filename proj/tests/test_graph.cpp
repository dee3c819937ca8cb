#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "propcalc/canonical.hpp"
#include "propcalc/graph.hpp"
#include "propcalc/json_io.hpp"
#include "test_support.hpp"

using namespace propcalc;
using namespace testing_support;

namespace {

bool has_condition(const Graph& g, Violation::Condition c) {
  for (const auto& v : validate(g)) {
    if (v.condition == c) return true;
  }
  return false;
}

// Wire-tracing oracle for vertex-free graphs: output j -> input index.
std::vector<int> trace(const Graph& g) {
  std::vector<int> out(g.n, 0);
  for (const auto& e : g.edges) {
    if (e.src.kind == PortKind::input && e.dst.kind == PortKind::output) {
      out[e.dst.index - 1] = e.src.index;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("identity graphs") {
  CHECK(identity(0).vertices.empty());
  CHECK(identity(0).edges.empty());
  CHECK(is_valid(identity(0)));
  Graph two = identity(2);
  CHECK(two.edges.size() == 2);
  CHECK(trace(two) == std::vector<int>{1, 2});
  CHECK(is_valid(identity(5)));
}

TEST_CASE("validate accepts the 4-input 2-output fixture") {
  Graph g = load_graph("fig1");
  CHECK(validate(g).empty());
  CHECK(g.m == 4);
  CHECK(g.n == 2);
  CHECK(g.vertices.size() == 5);
}

TEST_CASE("validate reports a directed cycle") {
  Graph g = load_graph("fig1");
  // Let t feed x instead of output 1 and hand input 1 to output 1: the edge
  // between x and t now runs both ways, closing x -> t -> x.
  for (auto& e : g.edges) {
    if (e.src == Port::input(1)) {
      e.src = Port::vout(4, 1);
    } else if (e.src == Port::vout(4, 1)) {
      e.src = Port::input(1);
    }
  }
  CHECK(has_condition(g, Violation::Condition::acyclicity));
  CHECK_THROWS_AS(require_valid(g), InvalidGraph);
}

TEST_CASE("validate reports coverage and dangling errors") {
  Graph g = identity(2);
  g.edges.pop_back();
  CHECK(has_condition(g, Violation::Condition::input_coverage));
  CHECK(has_condition(g, Violation::Condition::output_coverage));

  Graph h = load_graph("fig7");
  h.edges.push_back({Port::vout(9, 1), Port::output(3)});
  CHECK(has_condition(h, Violation::Condition::dangling_port));

  Graph k = identity(1);
  k.edges[0] = {Port::output(1), Port::input(1)};
  CHECK(has_condition(k, Violation::Condition::wrong_direction));

  Graph dup = load_graph("fig7");
  dup.vertices.push_back(dup.vertices.front());
  CHECK(has_condition(dup, Violation::Condition::bad_vertex));
}

TEST_CASE("horizontal composite of the figure operands") {
  Graph left = load_graph("fig2-left");
  Graph right = load_graph("fig2-right");
  Graph h = hcompose(left, right);
  CHECK(is_valid(h));
  CHECK(h.m == 3);
  CHECK(h.n == 3);
  CHECK(brute_force_isomorphic(h, load_graph("fig2h")));
  // Left operand keeps its ids, right operand is offset by the left maximum.
  CHECK(h.find_vertex(1)->label == "p");
  CHECK(h.find_vertex(4)->label == "s");
}

TEST_CASE("vertical composite of the figure operands") {
  Graph v = vcompose(load_graph("fig2-right"), load_graph("fig2-left"));
  CHECK(is_valid(v));
  CHECK(v.m == 1);
  CHECK(v.n == 1);
  CHECK(brute_force_isomorphic(v, load_graph("fig2v")));
  CHECK_THROWS_AS(vcompose(load_graph("fig2-left"), load_graph("fig2-left")), BoundaryMismatch);
}

TEST_CASE("units of composition") {
  std::mt19937 rng(7);
  for (int i = 0; i < 50; ++i) {
    Graph g = random_graph(rng, 2, 2);
    CHECK(brute_force_isomorphic(hcompose(g, identity(0)), g));
    CHECK(brute_force_isomorphic(hcompose(identity(0), g), g));
    CHECK(brute_force_isomorphic(vcompose(identity(2), g), g));
    CHECK(brute_force_isomorphic(vcompose(g, identity(2)), g));
  }
  CHECK(hcompose(identity(1), identity(1)) == identity(2));
}

TEST_CASE("permutation actions on identity wires") {
  Graph swap = permute_inputs(identity(2), {2, 1});
  CHECK(trace(swap) == std::vector<int>{2, 1});
  CHECK(permute_inputs(load_graph("fig1"), identity_permutation(4)) == load_graph("fig1"));
  CHECK_THROWS_AS(permute_inputs(identity(2), {1, 2, 3}), BoundaryMismatch);

  std::mt19937 rng(11);
  for (int i = 0; i < 30; ++i) {
    Permutation s = random_permutation(rng, 3);
    Permutation t = random_permutation(rng, 3);
    Graph composite = vcompose(permute_inputs(identity(3), s), permute_inputs(identity(3), t));
    CHECK(composite == permute_inputs(identity(3), compose(t, s)));
  }
}

TEST_CASE("output permutations compose as a left action") {
  Graph g = load_graph("fig1");
  Permutation w1 = {2, 1};
  Permutation w2 = {2, 1};
  CHECK(permute_outputs(permute_outputs(g, w1), w2) == permute_outputs(g, compose(w2, w1)));
  // Explicit relabeling: output j of the result is fed by what fed output
  // w^-1(j) of g.
  Graph p = permute_outputs(g, {2, 1});
  std::map<int, Port> before, after;
  for (const auto& e : g.edges) {
    if (e.dst.kind == PortKind::output) before[e.dst.index] = e.src;
  }
  for (const auto& e : p.edges) {
    if (e.dst.kind == PortKind::output) after[e.dst.index] = e.src;
  }
  CHECK(after[1] == before[2]);
  CHECK(after[2] == before[1]);
}

TEST_CASE("randomized closure, associativity, interchange, equivariance") {
  std::mt19937 rng(2024);
  for (int i = 0; i < 200; ++i) {
    Graph a = random_graph(rng, 2, 2);
    Graph b = random_graph(rng, 1, 1);
    Graph c = random_graph(rng, 2, 1);
    Graph d = random_graph(rng, 1, 2);
    CHECK(is_valid(hcompose(a, b)));
    CHECK(is_valid(vcompose(a, c)));
    CHECK(brute_force_isomorphic(hcompose(hcompose(a, b), c), hcompose(a, hcompose(b, c))));
    CHECK(brute_force_isomorphic(vcompose(vcompose(d, a), c), vcompose(d, vcompose(a, c))));
    // a:(2,2) c:(2,1), b:(1,1) d:(1,2)
    CHECK(brute_force_isomorphic(vcompose(hcompose(a, b), hcompose(c, b)),
                                 hcompose(vcompose(a, c), vcompose(b, b))));
    Permutation w = random_permutation(rng, 2);
    CHECK(brute_force_isomorphic(vcompose(permute_outputs(a, w), permute_inputs(c, inverse(w))),
                                 vcompose(a, c)));
    Permutation u = random_permutation(rng, 2);
    Permutation v = random_permutation(rng, 1);
    CHECK(brute_force_isomorphic(hcompose(permute_inputs(a, u), permute_inputs(b, v)),
                                 permute_inputs(hcompose(a, b), block_sum(u, v))));
    CHECK(brute_force_isomorphic(hcompose(permute_outputs(a, u), permute_outputs(d, u)),
                                 permute_outputs(hcompose(a, d), block_sum(u, u))));
  }
}

TEST_CASE("vertical composition leaves no fused through-wire artifacts") {
  std::mt19937 rng(5);
  for (int i = 0; i < 100; ++i) {
    Graph top = random_graph(rng, 3, 3, {2, 2, true, 1});
    Graph mid = permute_inputs(identity(3), random_permutation(rng, 3));
    Graph bottom = random_graph(rng, 3, 2, {2, 2, true, 1});
    Graph v = vcompose(vcompose(top, mid), bottom);
    CHECK(is_valid(v));
    for (const auto& e : v.edges) {
      CHECK(e.src.is_source());
      CHECK(!e.dst.is_source());
    }
    CHECK(v.edges.size() == static_cast<std::size_t>(v.m) + [&] {
      std::size_t outs = 0;
      for (const auto& x : v.vertices) outs += x.out;
      return outs;
    }());
  }
}

TEST_CASE("fixtures round-trip byte-exactly") {
  for (const char* name :
       {"fig1", "fig2-left", "fig2-right", "fig2h", "fig2v", "fig7", "fig8", "nonacyclic-p2"}) {
    CAPTURE(name);
    const std::string text = read_file(fixture_path(name));
    GraphDocument doc = parse_document(text);
    CHECK(doc.source.has_value());
    CHECK(serialize_document(doc) == text);
    CHECK(is_valid(doc.graph));
  }
}

TEST_CASE("graph JSON rejects malformed documents") {
  CHECK_THROWS_AS(parse_graph("{"), ParseError);
  CHECK_THROWS_AS(parse_graph(R"({"m":1})"), ParseError);
  CHECK_THROWS_AS(parse_graph(R"({"m":1,"n":1,"vertices":[],"edges":[{"src":["bogus",1],"dst":["output",1]}]})"),
                  ParseError);
  Graph g = parse_graph(R"({"m":1,"n":1,"vertices":[],"edges":[{"src":["input",1],"dst":["output",1]}]})");
  CHECK(g == identity(1));
}
