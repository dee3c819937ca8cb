#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>
#include <random>
#include <set>

#include "propcalc/pushout.hpp"

using namespace propcalc;

namespace {

long long ipow(long long b, int e) {
  long long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

long long choose(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Every map {0..k-1} -> {0..l-1}.
void for_each_map(int k, int l, const std::function<void(const FiniteSetMap&)>& visit) {
  FiniteSetMap f{k, l, std::vector<int>(k, 0)};
  if (k > 0 && l == 0) return;
  for (;;) {
    visit(f);
    int p = 0;
    while (p < k && ++f.map[p] == l) f.map[p++] = 0;
    if (p == k) return;
  }
}

// Orbits of the punctured cube computed by flooding an explicit relation
// on (mask, tuple) pairs.
int brute_force_orbits(const FiniteSetMap& i, int n) {
  using Node = std::pair<unsigned, std::vector<int>>;
  const unsigned top = (1u << n) - 1;
  std::set<Node> nodes;
  std::function<void(unsigned, std::vector<int>&, int)> fill = [&](unsigned mask, std::vector<int>& t, int k) {
    if (k == n) {
      nodes.insert({mask, t});
      return;
    }
    const int size = (mask >> k & 1u) ? i.target : i.source;
    for (int x = 0; x < size; ++x) {
      t[k] = x;
      fill(mask, t, k + 1);
    }
  };
  for (unsigned mask = 0; mask < top; ++mask) {
    std::vector<int> t(n);
    fill(mask, t, 0);
  }
  auto neighbours = [&](const Node& a) {
    std::vector<Node> out;
    for (int k = 0; k < n; ++k) {
      if (a.first >> k & 1u) continue;
      const unsigned up = a.first | (1u << k);
      if (up == top) continue;
      Node b{up, a.second};
      b.second[k] = i.map[b.second[k]];
      out.push_back(b);
    }
    // and backwards
    for (int k = 0; k < n; ++k) {
      if (!(a.first >> k & 1u)) continue;
      for (int x = 0; x < i.source; ++x) {
        if (i.map[x] != a.second[k]) continue;
        Node b{a.first & ~(1u << k), a.second};
        b.second[k] = x;
        out.push_back(b);
      }
    }
    return out;
  };
  std::set<Node> seen;
  int orbits = 0;
  for (const auto& start : nodes) {
    if (seen.count(start)) continue;
    ++orbits;
    std::vector<Node> stack{start};
    seen.insert(start);
    while (!stack.empty()) {
      Node a = stack.back();
      stack.pop_back();
      for (const auto& b : neighbours(a)) {
        if (seen.insert(b).second) stack.push_back(b);
      }
    }
  }
  return orbits;
}

// Connected components of B + C joined along a.
int span_components(const FiniteSetMap& f, const FiniteSetMap& g) {
  std::vector<std::vector<int>> adj(f.target + g.target);
  for (int a = 0; a < f.source; ++a) {
    adj[f.map[a]].push_back(f.target + g.map[a]);
    adj[f.target + g.map[a]].push_back(f.map[a]);
  }
  std::vector<bool> seen(adj.size(), false);
  int comps = 0;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (seen[s]) continue;
    ++comps;
    std::vector<int> stack{static_cast<int>(s)};
    seen[s] = true;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y : adj[x]) {
        if (!seen[y]) {
          seen[y] = true;
          stack.push_back(y);
        }
      }
    }
  }
  return comps;
}

FiniteSetMap random_map(std::mt19937& rng, int k, int l) {
  FiniteSetMap f{k, l, {}};
  for (int x = 0; x < k; ++x) f.map.push_back(std::uniform_int_distribution<int>(0, l - 1)(rng));
  return f;
}

Signature unary(std::initializer_list<const char*> names) {
  Signature s;
  for (const char* n : names) s.add({n, 1, 1});
  return s;
}

}  // namespace

TEST_CASE("finite set maps and the colimit engine") {
  FiniteSetMap f{3, 2, {0, 1, 1}};
  CHECK(!f.injective());
  CHECK(f.surjective());
  CHECK_THROWS_AS((FiniteSetMap{2, 2, {0, 2}}.check()), PreconditionViolation);
  CHECK(compose(f, FiniteSetMap{2, 1, {0, 0}}).map == std::vector<int>{0, 0, 0});

  SetDiagram empty;
  CHECK(colimit(empty).size == 0);
  SetDiagram coeq;
  const int x = coeq.add_object(2), y = coeq.add_object(3);
  coeq.add_arrow(x, y, {2, 3, {0, 1}});
  coeq.add_arrow(x, y, {2, 3, {1, 2}});
  CHECK(colimit(coeq).size == 1);
  CHECK_THROWS_AS(coeq.add_arrow(x, y, {3, 3, {0, 0, 0}}), PreconditionViolation);

  std::mt19937 rng(1);
  for (int t = 0; t < 300; ++t) {
    const int a = std::uniform_int_distribution<int>(0, 4)(rng);
    const int b = std::uniform_int_distribution<int>(1, 4)(rng);
    const int c = std::uniform_int_distribution<int>(1, 4)(rng);
    FiniteSetMap f1 = random_map(rng, a, b), g1 = random_map(rng, a, c);
    CHECK(pushout(f1, g1).size == span_components(f1, g1));
  }
}

TEST_CASE("small punctured cubes") {
  // n = 1: the punctured cube is K alone.
  FiniteSetMap i{2, 3, {2, 0}};
  PuncturedColimit one = punctured_colimit({i, 1});
  CHECK(one.colim.size == 2);
  for (int x = 0; x < 2; ++x) CHECK(one.lambda[one.colim.legs[0][x]] == i.map[x]);
  CHECK(punctured_colimit({i, 0}).colim.size == 0);
  // 1 inside 2, n = 2.
  PuncturedColimit two = punctured_colimit({FiniteSetMap{1, 2, {0}}, 2});
  CHECK(two.colim.size == 3);
  // 2 -> 1, n = 2, against orbit flooding.
  FiniteSetMap fold{2, 1, {0, 0}};
  CHECK(punctured_colimit({fold, 2}).colim.size == brute_force_orbits(fold, 2));
}

TEST_CASE("cube cardinalities for injective maps") {
  int cases = 0;
  for (int l = 0; l <= 3; ++l) {
    for (int k = 0; k <= l; ++k) {
      for_each_map(k, l, [&](const FiniteSetMap& i) {
        if (!i.injective()) return;
        for (int n = 1; n <= 4; ++n) {
          PuncturedColimit p = punctured_colimit({i, n});
          CHECK(p.colim.size == ipow(l, n) - ipow(l - k, n));
          // lambda is onto the tuples meeting i(K), one to one
          std::set<int> image(p.lambda.begin(), p.lambda.end());
          CHECK(image.size() == p.lambda.size());
          std::set<int> in_k(i.map.begin(), i.map.end());
          CubeDiagram cube{i, n};
          for (int t = 0; t < cube.vertex_size(cube.terminal()); ++t) {
            auto digits = cube.decode(cube.terminal(), t);
            bool meets = false;
            for (int dgt : digits) meets = meets || in_k.count(dgt);
            CHECK(image.count(t) == (meets ? 1u : 0u));
          }
          ++cases;
        }
      });
    }
  }
  CHECK(cases == 4 * 24);  // 24 injections with |L| <= 3
}

TEST_CASE("lambda and injectivity of i") {
  int converse_failures = 0;
  for (int l = 0; l <= 3; ++l) {
    for (int k = 0; k <= 3; ++k) {
      for_each_map(k, l, [&](const FiniteSetMap& i) {
        for (int n = 1; n <= 3; ++n) {
          PuncturedColimit p = punctured_colimit({i, n});
          std::set<int> image(p.lambda.begin(), p.lambda.end());
          const bool lambda_injective = image.size() == p.lambda.size();
          if (n == 1 || i.injective()) {
            CHECK(lambda_injective == i.injective());
          } else if (lambda_injective) {
            ++converse_failures;
          }
          CHECK(p.colim.size == brute_force_orbits(i, n));
        }
      });
    }
  }
  // For n >= 2 a non-injective i can still give an injective lambda: with
  // i: 2 -> 1 the punctured square collapses to one point.
  CHECK(converse_failures > 0);
  PuncturedColimit fold = punctured_colimit({FiniteSetMap{2, 1, {0, 0}}, 2});
  CHECK(fold.colim.size == 1);
}

TEST_CASE("iterated pushout-product identity") {
  FiniteSetMap small{1, 2, {0}};
  IteratedReport r = iterated_identity_check(small, 2);
  CHECK(r.ok());
  CHECK(r.lhs_size == 3);
  CHECK(r.rhs_size == 3);
  FiniteSetMap big{2, 3, {0, 1}};
  IteratedReport r4 = iterated_identity_check(big, 4);
  CHECK(r4.ok());
  CHECK(r4.lhs_size == 80);
  for (int l = 1; l <= 3; ++l) {
    FiniteSetMap iso = FiniteSetMap::identity(l);
    for (int n = 2; n <= 3; ++n) {
      IteratedReport ri = iterated_identity_check(iso, n);
      CHECK(ri.ok());
      CHECK(ri.lhs_size == ipow(l, n));
    }
  }
  for (int l = 0; l <= 3; ++l) {
    for (int k = 0; k <= 3; ++k) {
      for_each_map(k, l, [&](const FiniteSetMap& i) {
        for (int n = 2; n <= 3; ++n) CHECK(iterated_identity_check(i, n).ok());
      });
    }
  }
  CHECK_THROWS_AS(iterated_identity_check(small, 1), PreconditionViolation);
}

TEST_CASE("pushouts are reflexive coequalizers") {
  std::mt19937 rng(2);
  for (int t = 0; t < 300; ++t) {
    const int s = std::uniform_int_distribution<int>(0, 4)(rng);
    const int a = std::uniform_int_distribution<int>(1, 4)(rng);
    const int b = std::uniform_int_distribution<int>(1, 4)(rng);
    FiniteSetMap u = random_map(rng, s, a), sm = random_map(rng, s, b);
    CoequalizerReport r = reflexive_coequalizer_check(u, sm);
    CHECK(r.reflexive);
    CHECK(r.agree);
    CHECK(r.coequalizer_size == span_components(sm, u));
  }
}

TEST_CASE("filtration squares on chains with K empty") {
  FiltrationInstance inst{unary({"a"}), Signature(), unary({"b"})};
  FiltrationBounds bounds;  // degrees <= 2, at most 4 vertices, (1,1)
  FiltrationReport r = filtration_square_check(inst, bounds);
  CHECK(r.ok());
  REQUIRE(r.squares.size() == 3);
  for (const auto& s : r.squares) {
    long long d = 0, c = 0, v = 0;
    for (int len = 0; len <= 4; ++len) {
      for (int q = 0; q <= s.degree; ++q) d += choose(len, q);
      for (int q = 0; q < s.degree; ++q) c += choose(len, q);
      v += choose(len, s.degree);
    }
    CHECK(s.d == static_cast<std::size_t>(d));
    CHECK(s.c == static_cast<std::size_t>(c));
    CHECK(s.v == static_cast<std::size_t>(v));
    CHECK(s.u == 0);
  }
}

TEST_CASE("filtration squares on chains with K nonempty") {
  FiltrationInstance inst{unary({"a"}), unary({"k"}), unary({"k", "b"})};
  FiltrationReport r = filtration_square_check(inst, {2, 4, {{1, 1}}});
  CHECK(r.ok());
  for (const auto& s : r.squares) {
    const int n = s.degree;
    long long d = 0, v = 0, u = 0, image = 0;
    for (int len = 0; len <= 4; ++len) {
      for (int q = 0; q <= n; ++q) d += choose(len, q) * ipow(2, len - q);
      v += choose(len, n) * ipow(2, len);
      if (len >= n) {
        u += choose(len, n) * ipow(2, len - n) * (ipow(3, n) - ipow(2, n));
        image += choose(len, n) * ipow(2, len - n) * (ipow(2, n) - 1);
      }
    }
    CHECK(s.d == static_cast<std::size_t>(d));
    CHECK(s.v == static_cast<std::size_t>(v));
    CHECK(s.u == static_cast<std::size_t>(u));
    // d0 forgets which L-slots came from K; its image is the V-graphs with
    // some slot labeled k
    CHECK(s.image_in_v == static_cast<std::size_t>(image));
  }
}

TEST_CASE("filtration squares when K = L") {
  FiltrationInstance inst{unary({"a"}), unary({"k"}), unary({"k"})};
  FiltrationReport r = filtration_square_check(inst, {2, 3, {{1, 1}}});
  CHECK(r.ok());
  for (const auto& s : r.squares) {
    CHECK(s.d == r.squares[0].d);  // j_n is a bijection
    if (s.degree > 0) CHECK(s.c == s.d);
  }
}

TEST_CASE("filtration squares with branching generators") {
  Signature m0({{"m", 2, 1}});
  Signature k({{"e", 1, 1}});
  Signature l({{"e", 1, 1}, {"s", 1, 2}});
  FiltrationReport r = filtration_square_check({m0, k, l}, {2, 4, {{1, 1}, {2, 1}, {1, 2}}});
  CHECK(r.ok());
  CHECK(r.squares.size() == 9);
  std::size_t biggest = 0;
  for (const auto& s : r.squares) biggest = std::max(biggest, s.d);
  CHECK(biggest > 20);
  Json j = filtration_report_to_json(r);
  CHECK(j["ok"] == true);
  CHECK(j["squares"].size() == 9);

  CHECK_THROWS_AS(filtration_square_check({m0, Signature({{"x", 1, 1}}), l}, {}), PreconditionViolation);
  CHECK_THROWS_AS(filtration_square_check({Signature({{"e", 1, 1}}), k, l}, {}), PreconditionViolation);
}
