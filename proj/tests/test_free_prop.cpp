#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "propcalc/free_prop.hpp"
#include "test_support.hpp"

using namespace propcalc;
using namespace testing_support;

namespace {

Signature small_signature() {
  return Signature({{"a", 1, 1}, {"m", 2, 1}, {"s", 1, 2}, {"u", 0, 1}, {"c", 1, 0}});
}

// Relabel a random graph so that it is an element of small_signature().
Graph relabel_for(const Signature& sig, Graph g) {
  for (auto& v : g.vertices) {
    v.label.reset();
    for (const auto& gen : sig.generators()) {
      if (gen.m == v.in && gen.n == v.out) v.label = gen.name;
    }
  }
  return g;
}

// Random graph all of whose vertices carry a generator of sig.
Graph random_labeled(std::mt19937& rng, const Signature& sig, int m, int n, int max_vertices) {
  for (;;) {
    Graph g = relabel_for(sig, random_graph(rng, m, n, {max_vertices, 2, true, 1}));
    bool complete = true;
    for (const auto& v : g.vertices) complete = complete && v.label.has_value();
    if (complete) return g;
  }
}

PropElement random_element(std::mt19937& rng, int m, int n, int max_vertices = 3) {
  RandomGraphOptions opt{max_vertices, 2, true, 2};
  return PropElement(random_graph(rng, m, n, opt));
}

NestedElement random_nested(std::mt19937& rng, int m, int n) {
  NestedElement e{random_graph(rng, m, n, {2, 2, true, 1}), {}};
  for (const auto& v : e.outer.vertices) e.labels.emplace(v.id, random_element(rng, v.in, v.out, 2));
  return e;
}

}  // namespace

TEST_CASE("signatures and labels") {
  Signature sig = small_signature();
  CHECK(sig.at("m").m == 2);
  CHECK_THROWS_AS(sig.at("zz"), UnknownGenerator);
  CHECK_THROWS_AS(sig.add({"a", 1, 1}), ArityMismatch);
  Json j = signature_to_json(sig);
  CHECK(signature_from_json(j).generators() == sig.generators());
  CHECK_THROWS_AS(signature_from_json(parse_json(R"({"gens":[]})")), ParseError);
  Graph bad = corolla_graph("m", 1, 1);
  CHECK_THROWS_AS(check_labels(sig, bad), ArityMismatch);
  CHECK_THROWS_AS(check_labels(sig, corolla_graph("q", 1, 1)), UnknownGenerator);
}

TEST_CASE("corollas") {
  Signature sig = small_signature();
  PropElement c = corolla(sig, "m");
  CHECK(c.m() == 2);
  CHECK(c.n() == 1);
  CHECK(c.vertex_count() == 1);
  for (const auto& g : sig.generators()) CHECK(is_valid(corolla(sig, g.name).graph()));
  CHECK_THROWS_AS(corolla(sig, "nope"), UnknownGenerator);
  // Unit law for the nested corolla.
  CHECK(expand(unit_nested(c)) == c);
}

TEST_CASE("labeled vertical composite of the figure operands") {
  PropElement top(load_graph("fig2-right"));
  PropElement bottom(load_graph("fig2-left"));
  CHECK(pelem_vcompose(top, bottom) == PropElement(load_graph("fig2v")));
  CHECK(pelem_hcompose(bottom, top) == PropElement(load_graph("fig2h")));
  CHECK(pelem_hcompose(top, pelem_identity(0)) == top);
  CHECK(pelem_hcompose(top, bottom) != pelem_hcompose(bottom, top));
}

TEST_CASE("expansion of the universal composition fixture") {
  Json doc = load_json("fig4");
  NestedElement e = nested_from_json(doc);
  PropElement expected(graph_from_json(doc["expected"]));
  CHECK(expected.vertex_count() == 4);
  CHECK(expand(e) == expected);
  CHECK(brute_force_isomorphic(substitute(e.outer, {{1, e.labels.at(1).graph()},
                                                    {2, e.labels.at(2).graph()}})
                                   .graph,
                               graph_from_json(doc["expected"])));
}

TEST_CASE("substitution errors") {
  Graph outer = corolla_graph("X", 2, 1);
  CHECK_THROWS_AS(substitute(outer, {}), BoundaryMismatch);
  CHECK_THROWS_AS(substitute(outer, {{1, identity(1)}}), BoundaryMismatch);
}

TEST_CASE("substitution resolves chains of through-wires") {
  // Outer: two vertices in sequence, both replaced by identity wires.
  Graph outer;
  outer.m = 1;
  outer.n = 1;
  outer.vertices = {{1, 1, 1, {}}, {2, 1, 1, {}}};
  outer.edges = {{Port::input(1), Port::vin(1, 1)},
                 {Port::vout(1, 1), Port::vin(2, 1)},
                 {Port::vout(2, 1), Port::output(1)}};
  Substitution s = substitute(outer, {{1, identity(1)}, {2, identity(1)}});
  CHECK(s.graph == identity(1));
}

TEST_CASE("monad laws on random nestings") {
  std::mt19937 rng(41);
  for (int i = 0; i < 300; ++i) {
    const int m = std::uniform_int_distribution<int>(0, 2)(rng);
    const int n = std::uniform_int_distribution<int>(0, 2)(rng);
    PropElement e = random_element(rng, m, n, 4);
    CHECK(expand(unit_nested(e)) == e);
    CHECK(expand(corolla_nested(e)) == e);

    Nested2 deep{random_graph(rng, m, n, {2, 2, true, 1}), {}};
    for (const auto& v : deep.outer.vertices) deep.labels.emplace(v.id, random_nested(rng, v.in, v.out));
    CHECK(expand_inner_first(deep) == expand_outer_first(deep));
  }
}

TEST_CASE("interchange and equivariance in the free prop") {
  std::mt19937 rng(43);
  for (int i = 0; i < 300; ++i) {
    PropElement a = random_element(rng, 1, 2);
    PropElement b = random_element(rng, 1, 1);
    PropElement c = random_element(rng, 2, 1);
    PropElement d = random_element(rng, 1, 2);
    CHECK(pelem_vcompose(pelem_hcompose(a, b), pelem_hcompose(c, d)) ==
          pelem_hcompose(pelem_vcompose(a, c), pelem_vcompose(b, d)));
    Permutation w = random_permutation(rng, 2);
    CHECK(pelem_vcompose(pelem_permute_outputs(a, w), pelem_permute_inputs(c, inverse(w))) ==
          pelem_vcompose(a, c));
  }
}

TEST_CASE("homomorphism into the free prop itself") {
  Signature sig = small_signature();
  std::map<std::string, PropElement> unit;
  for (const auto& g : sig.generators()) unit.emplace(g.name, corolla(sig, g.name));
  auto phi = extend_morphism(sig, FreePropTarget{}, unit);
  std::mt19937 rng(47);
  for (int i = 0; i < 100; ++i) {
    PropElement e(random_labeled(rng, sig, 2, 2, 4));
    CHECK(phi(e) == e);
  }
}

TEST_CASE("homomorphism sending generators to two-vertex elements") {
  Signature sig = small_signature();
  Signature target({{"p", 1, 1}, {"q", 2, 1}, {"r", 1, 2}, {"k", 0, 1}, {"z", 1, 0}});
  std::map<std::string, PropElement> images = {
      {"a", pelem_vcompose(corolla(target, "p"), corolla(target, "p"))},
      {"m", pelem_vcompose(corolla(target, "q"), corolla(target, "p"))},
      {"s", pelem_vcompose(corolla(target, "p"), corolla(target, "r"))},
      {"u", pelem_vcompose(corolla(target, "k"), corolla(target, "p"))},
      {"c", pelem_vcompose(corolla(target, "p"), corolla(target, "z"))},
  };
  auto phi = extend_morphism(sig, FreePropTarget{}, images);
  for (const auto& g : sig.generators()) CHECK(phi(corolla(sig, g.name)).vertex_count() == 2);

  std::mt19937 rng(53);
  for (int i = 0; i < 150; ++i) {
    Graph g = random_labeled(rng, sig, 1, 2, 4);
    // Oracle: substitute the images directly.
    std::map<int, PropElement> labels;
    for (const auto& v : g.vertices) labels.emplace(v.id, images.at(*v.label));
    PropElement expected = expand(g, labels);
    CHECK(phi(PropElement(g)) == expected);
    CHECK(phi.apply(shuffle_ids(rng, g)) == expected);
    CHECK(phi(PropElement(g)).vertex_count() == 2 * g.vertices.size());
  }
  std::map<std::string, PropElement> wrong = images;
  wrong["a"] = corolla(target, "q");
  CHECK_THROWS_AS(extend_morphism(sig, FreePropTarget{}, wrong), ArityMismatch);
}

TEST_CASE("homomorphisms agreeing on corollas agree on small bases") {
  Signature sig({{"a", 1, 1}, {"m", 2, 1}, {"s", 1, 2}});
  std::map<std::string, PropElement> images = {
      {"a", pelem_permute_outputs(corolla(sig, "s"), {2, 1})},
      {"m", corolla(sig, "m")},
      {"s", pelem_vcompose(corolla(sig, "s"), pelem_hcompose(corolla(sig, "a"), corolla(sig, "a")))},
  };
  images["a"] = pelem_vcompose(images["a"], corolla(sig, "m"));
  auto phi = extend_morphism(sig, FreePropTarget{}, images);
  for (int r = 0; r <= 3; ++r) {
    for (const auto& e : basis_elements(sig, 1, 1, r)) {
      std::map<int, PropElement> labels;
      for (const auto& v : e.graph().vertices) labels.emplace(v.id, images.at(*v.label));
      CHECK(phi(e) == expand(e.graph(), labels));
    }
  }
}

TEST_CASE("basis counts") {
  auto chains = count_basis(Signature({{"a", 1, 1}}), 1, 1, 3);
  REQUIRE(chains.size() == 4);
  for (int r = 0; r <= 3; ++r) CHECK(chains[r].iso == 1);
  CHECK(chains[3].numbered == 6);

  auto scattered = count_basis(Signature({{"c", 0, 0}}), 0, 0, 4);
  for (const auto& row : scattered) CHECK(row.iso == 1);

  Signature sig({{"m", 2, 1}, {"s", 1, 2}});
  auto table = count_basis(sig, 1, 1, 2);
  // Oracle: brute-force port matchings over every ordered label sequence.
  long long numbered = 0;
  std::vector<Graph> labeled;
  for (const auto& first : sig.generators()) {
    for (const auto& second : sig.generators()) {
      for (Graph g : brute_force_graphs({{first.m, first.n}, {second.m, second.n}}, 1, 1)) {
        g.find_vertex(1)->label = first.name;
        g.find_vertex(2)->label = second.name;
        labeled.push_back(g);
        ++numbered;
      }
    }
  }
  CHECK(table[2].numbered == numbered);
  CHECK(table[2].iso == static_cast<long long>(brute_force_classes(labeled)));
  CHECK(table[2].numbered == 2 * table[2].iso);
}

TEST_CASE("partial labelings and filtration degree") {
  PartialLabeledGraph fig8 = PartialLabeledGraph::from_marked(load_graph("fig8"));
  CHECK(filtration_degree(fig8) == 3);
  CHECK(fig8.numbering.size() == 2);
  CHECK(fig8.marked() == load_graph("fig8"));

  Graph three = load_graph("fig2-left");
  auto all = partial_labelings(three);
  CHECK(all.size() == 8);
  std::vector<int> by_degree(4, 0);
  for (const auto& p : all) {
    p.check();
    ++by_degree[filtration_degree(p)];
  }
  CHECK(by_degree == std::vector<int>{1, 3, 3, 1});
  CHECK(filter_upto(all, 1).size() == 4);
  CHECK(filtration_degree(all.front()) == 0);

  PartialLabeledGraph broken = fig8;
  broken.numbering[2] = 3;
  CHECK_THROWS_AS(broken.check(), InvalidGraph);
}
