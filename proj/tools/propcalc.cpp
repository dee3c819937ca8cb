// propcalc: command-line front end. Every subcommand prints JSON on stdout;
// diagnostics go to stderr. Exit status: 0 success, 1 domain error or failed
// check, 2 malformed input or usage.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "propcalc/coproduct.hpp"
#include "propcalc/pushout.hpp"
#include "propcalc/tensor.hpp"

#ifndef PROPCALC_FIXTURE_DIR
#define PROPCALC_FIXTURE_DIR "fixtures"
#endif

using namespace propcalc;

namespace {

const std::vector<std::string> kGraphFixtures = {"fig1", "fig2-left", "fig2-right", "fig2h", "fig2v",
                                                 "fig7", "fig8", "nonacyclic-p2"};

std::string fixture_dir() {
  if (const char* env = std::getenv("PROPCALC_FIXTURES")) return env;
  return PROPCALC_FIXTURE_DIR;
}

std::string fixture_file(const std::string& name) { return fixture_dir() + "/" + name + ".json"; }

Graph load_graph(const std::string& path) { return parse_document(read_file(path)).graph; }

void emit(const Json& j) { std::cout << j.dump() << "\n"; }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::pair<int, int> parse_pair(const std::string& s) {
  auto parts = split(s, ':');
  if (parts.size() != 2) throw ParseError("expected a:b, got '" + s + "'");
  try {
    return {std::stoi(parts[0]), std::stoi(parts[1])};
  } catch (const std::exception&) {
    throw ParseError("expected a:b, got '" + s + "'");
  }
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json collapse_result_json(const CollapseResult& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps) steps.push_back({{"u", s.u}, {"v", s.v}, {"before", mixed_to_json(s.before)}});
  return {{"form", mixed_to_json(r.form)},
          {"steps", std::move(steps)},
          {"expansion", graph_to_json(expand_all(r.form).graph())}};
}

// Generator arities from an assignment's matrix shapes (d >= 2).
Signature infer_signature(const AlgebraAssignment& a) {
  if (a.dim < 2) throw ParseError("cannot infer arities at dim 1; pass --sig");
  auto log_d = [&](int size) {
    int k = 0;
    long long p = 1;
    while (p < size) {
      p *= a.dim;
      ++k;
    }
    if (p != size) throw ParseError("matrix size " + std::to_string(size) + " is not a power of dim");
    return k;
  };
  Signature sig;
  for (const auto& [name, m] : a.matrices) sig.add({name, log_d(m.cols()), log_d(m.rows())});
  return sig;
}

// A finite set map K -> L from token lists; `spec` is "k=l,..." or empty
// for the inclusion by name.
FiniteSetMap token_map(const std::vector<std::string>& k, const std::vector<std::string>& l,
                       const std::string& spec) {
  auto index_in_l = [&](const std::string& name) {
    auto it = std::find(l.begin(), l.end(), name);
    if (it == l.end()) throw PreconditionViolation("'" + name + "' is not an element of L");
    return static_cast<int>(it - l.begin());
  };
  FiniteSetMap f{static_cast<int>(k.size()), static_cast<int>(l.size()), {}};
  std::map<std::string, std::string> explicit_map;
  for (const auto& item : split(spec, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("map entries look like k=l");
    explicit_map[item.substr(0, eq)] = item.substr(eq + 1);
  }
  for (const auto& name : k) {
    auto it = explicit_map.find(name);
    f.map.push_back(index_in_l(it == explicit_map.end() ? name : it->second));
  }
  return f;
}

// Quick battery over the fixtures and small instances of every module.
Json selftest(bool& all_ok) {
  std::vector<std::pair<std::string, std::function<bool()>>> checks = {
      {"fixtures_valid",
       [] {
         for (const auto& name : kGraphFixtures) {
           if (!is_valid(load_graph(fixture_file(name)))) return false;
         }
         mixed_from_json(parse_json(read_file(fixture_file("remark-witness")))).check();
         nested_from_json(parse_json(read_file(fixture_file("fig4"))));
         return true;
       }},
      {"fixtures_round_trip",
       [] {
         for (const auto& name : kGraphFixtures) {
           const std::string text = read_file(fixture_file(name));
           if (serialize_document(parse_document(text)) != text) return false;
         }
         return true;
       }},
      {"fig7_order",
       [] { return canonicalize(load_graph(fixture_file("fig7"))).order == std::vector<int>{1, 4, 2, 5, 3}; }},
      {"figure_composites",
       [] {
         Graph left = load_graph(fixture_file("fig2-left"));
         Graph right = load_graph(fixture_file("fig2-right"));
         return is_isomorphic(hcompose(left, right), load_graph(fixture_file("fig2h"))) &&
                is_isomorphic(vcompose(right, left), load_graph(fixture_file("fig2v")));
       }},
      {"universal_composition",
       [] {
         Json doc = parse_json(read_file(fixture_file("fig4")));
         return expand(nested_from_json(doc)) == PropElement(graph_from_json(doc["expected"]));
       }},
      {"non_confluence_fixture",
       [] {
         auto forms = collapse_exhaustive(mixed_from_json(parse_json(read_file(fixture_file("remark-witness")))));
         return forms.size() == 2 && expand_all(forms[0].form) == expand_all(forms[1].form);
       }},
      {"tensor_vertical_composite",
       [] {
         Signature sig({{"s", 1, 2}, {"p", 2, 1}});
         AlgebraAssignment a;
         a.dim = 2;
         a.matrices["s"] = matrix_from_json(parse_json(R"([[1,0],[0,1],["1/2",0],[0,3]])"));
         a.matrices["p"] = matrix_from_json(parse_json(R"([[1,2,0,1],[0,1,1,"-1"]])"));
         return evaluate(pelem_vcompose(corolla(sig, "s"), corolla(sig, "p")), a) ==
                matmul(a.matrices["p"], a.matrices["s"]);
       }},
      {"cube_cardinality",
       [] {
         return punctured_colimit({FiniteSetMap{1, 2, {0}}, 2}).colim.size == 3 &&
                iterated_identity_check(FiniteSetMap{2, 3, {0, 1}}, 4).ok();
       }},
      {"filtration_square",
       [] {
         return filtration_square_check({Signature({{"a", 1, 1}}), Signature(), Signature({{"b", 1, 1}})},
                                        {2, 3, {{1, 1}}})
             .ok();
       }},
  };
  Json out = Json::object();
  all_ok = true;
  for (const auto& [name, check] : checks) {
    bool ok = false;
    try {
      ok = check();
    } catch (const std::exception& e) {
      std::cerr << name << ": " << e.what() << "\n";
    }
    out[name] = ok;
    all_ok = all_ok && ok;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact computation in free props"};
  app.require_subcommand(1);
  int status = 0;

  auto* validate_cmd = app.add_subcommand("validate", "Check graph well-formedness");
  std::string graph_path;
  validate_cmd->add_option("graph", graph_path, "graph JSON")->required();
  validate_cmd->callback([&] {
    Graph g = load_graph(graph_path);
    Json violations = Json::array();
    for (const auto& v : validate(g)) {
      violations.push_back({{"condition", to_string(v.condition)}, {"detail", v.detail}});
    }
    emit({{"valid", violations.empty()}, {"violations", violations}});
    if (!violations.empty()) status = 1;
  });

  auto* compose_cmd = app.add_subcommand("compose", "Horizontal or vertical composite");
  std::string first_path, second_path, mode = "h";
  bool canonical_out = false;
  compose_cmd->add_option("first", first_path, "left (h) or top (v) operand")->required();
  compose_cmd->add_option("second", second_path, "right (h) or bottom (v) operand")->required();
  compose_cmd->add_option("--mode", mode, "h or v")->check(CLI::IsMember({"h", "v"}));
  compose_cmd->add_flag("--canonical", canonical_out, "print the canonical representative");
  compose_cmd->callback([&] {
    Graph a = load_graph(first_path), b = load_graph(second_path);
    Graph r = mode == "h" ? hcompose(a, b) : vcompose(a, b);
    emit(graph_to_json(canonical_out ? canonicalize(r).graph : r));
  });

  auto* canon_cmd = app.add_subcommand("canon", "Canonical form and vertex order");
  canon_cmd->add_option("graph", graph_path, "graph JSON")->required();
  canon_cmd->callback([&] {
    CanonicalForm c = canonicalize(load_graph(graph_path));
    emit({{"order", c.order},
          {"method", to_string(c.method)},
          {"hash", hex(digest(c.graph))},
          {"graph", graph_to_json(c.graph)}});
  });

  auto* iso_cmd = app.add_subcommand("iso", "Isomorphism test");
  iso_cmd->add_option("first", first_path, "first graph")->required();
  iso_cmd->add_option("second", second_path, "second graph")->required();
  iso_cmd->callback([&] {
    emit({{"isomorphic", is_isomorphic(load_graph(first_path), load_graph(second_path))}});
  });

  auto* enum_cmd = app.add_subcommand("enum", "Enumerate graphs with a vertex profile (JSON lines)");
  std::string arities_spec;
  int m = 0, n = 0;
  bool upto_iso = false;
  enum_cmd->add_option("--arities", arities_spec, "in:out,in:out,...");
  enum_cmd->add_option("--m", m, "graph inputs")->required();
  enum_cmd->add_option("--n", n, "graph outputs")->required();
  enum_cmd->add_flag("--upto-iso", upto_iso, "one representative per class");
  enum_cmd->callback([&] {
    std::vector<Arity> arities;
    for (const auto& item : split(arities_spec, ',')) {
      auto [a, b] = parse_pair(item);
      arities.push_back({a, b});
    }
    for (const auto& g : enumerate_graphs(arities, m, n, upto_iso)) std::cout << graph_to_json(g.graph).dump() << "\n";
  });

  auto* count_cmd = app.add_subcommand("count", "Basis counts of Free(sig)(m,n) by vertex count");
  std::string sig_path;
  int max_r = 3;
  count_cmd->add_option("--sig", sig_path, "signature JSON")->required();
  count_cmd->add_option("--m", m, "graph inputs")->required();
  count_cmd->add_option("--n", n, "graph outputs")->required();
  count_cmd->add_option("--max-r", max_r, "largest vertex count");
  count_cmd->callback([&] {
    Json rows = Json::array();
    for (const auto& row : count_basis(signature_from_json(parse_json(read_file(sig_path))), m, n, max_r)) {
      rows.push_back({{"r", row.r}, {"numbered", row.numbered}, {"iso", row.iso}});
    }
    emit(rows);
  });

  auto* expand_cmd = app.add_subcommand("expand", "Flatten a graph of graphs");
  std::string nested_path;
  expand_cmd->add_option("nested", nested_path, "{outer, inner} JSON")->required();
  expand_cmd->callback([&] {
    emit(graph_to_json(expand(nested_from_json(parse_json(read_file(nested_path)))).graph()));
  });

  auto* map_cmd = app.add_subcommand("map", "Apply the free-prop morphism given on generators");
  std::string assignment_path;
  map_cmd->add_option("element", graph_path, "labeled graph")->required();
  map_cmd->add_option("--assignment", assignment_path, "{\"images\": {gen: graph}}")->required();
  map_cmd->callback([&] {
    Json j = parse_json(read_file(assignment_path));
    if (!j.is_object() || !j.contains("images") || !j["images"].is_object()) {
      throw ParseError("assignment must have an 'images' object");
    }
    Signature sig;
    std::map<std::string, PropElement> images;
    for (const auto& [name, value] : j["images"].items()) {
      PropElement e(graph_from_json(value));
      sig.add({name, e.m(), e.n()});
      images.emplace(name, e);
    }
    auto phi = extend_morphism(sig, FreePropTarget{}, images);
    emit(graph_to_json(phi.apply(load_graph(graph_path)).graph()));
  });

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate an element in End_{Q^d}");
  std::string algebra_path, order_spec;
  eval_cmd->add_option("element", graph_path, "labeled graph")->required();
  eval_cmd->add_option("--algebra", algebra_path, "assignment JSON")->required();
  eval_cmd->add_option("--order", order_spec, "contraction order as vertex ids");
  eval_cmd->callback([&] {
    AlgebraAssignment a = assignment_from_json(parse_json(read_file(algebra_path)));
    std::optional<std::vector<int>> order;
    if (!order_spec.empty()) {
      order.emplace();
      for (const auto& item : split(order_spec, ',')) {
        try {
          order->push_back(std::stoi(item));
        } catch (const std::exception&) {
          throw ParseError("bad vertex id '" + item + "' in --order");
        }
      }
    }
    RatTensor t = evaluate(load_graph(graph_path), a, order);
    emit({{"rows", t.rows()}, {"cols", t.cols()}, {"matrix", matrix_to_json(t)}});
  });

  auto* morph_cmd = app.add_subcommand("check-morphism", "Is f a morphism of algebras, per generator");
  std::string f_path, phi_a_path, phi_b_path;
  morph_cmd->add_option("--f", f_path, "matrix JSON, dim B x dim A")->required();
  morph_cmd->add_option("--phiA", phi_a_path, "source assignment")->required();
  morph_cmd->add_option("--phiB", phi_b_path, "target assignment")->required();
  morph_cmd->add_option("--sig", sig_path, "signature (otherwise inferred from phiA)");
  morph_cmd->callback([&] {
    RatTensor f = matrix_from_json(parse_json(read_file(f_path)));
    AlgebraAssignment a = assignment_from_json(parse_json(read_file(phi_a_path)));
    AlgebraAssignment b = assignment_from_json(parse_json(read_file(phi_b_path)));
    Signature sig = sig_path.empty() ? infer_signature(a) : signature_from_json(parse_json(read_file(sig_path)));
    Json per = Json::object();
    bool all = true;
    for (const auto& g : sig.generators()) {
      const bool ok = morphism_prop_membership(f, a, b, g);
      per[g.name] = ok;
      all = all && ok;
    }
    emit({{"generators", per}, {"morphism", all}});
  });

  auto* collapse_cmd = app.add_subcommand("collapse", "Collapse P-vertices of a mixed graph");
  std::string mixed_path, strategy = "greedy";
  collapse_cmd->add_option("mixed", mixed_path, "mixed graph JSON")->required();
  collapse_cmd->add_option("--strategy", strategy, "greedy or exhaustive")
      ->check(CLI::IsMember({"greedy", "exhaustive"}));
  collapse_cmd->callback([&] {
    MixedGraph g = mixed_from_json(parse_json(read_file(mixed_path)));
    Json forms = Json::array();
    if (strategy == "greedy") {
      forms.push_back(collapse_result_json(collapse_greedy(g)));
    } else {
      for (const auto& r : collapse_exhaustive(g)) forms.push_back(collapse_result_json(r));
    }
    emit({{"strategy", strategy}, {"count", forms.size()}, {"forms", forms}});
  });

  auto* witness_cmd = app.add_subcommand("witness", "Search for a non-confluent mixed graph");
  WitnessBounds wb;
  witness_cmd->add_option("--max-vertices", wb.max_vertices, "vertex cap");
  witness_cmd->add_option("--max-p", wb.max_p, "cap on P-vertices");
  witness_cmd->add_option("--max-arity", wb.max_arity, "per-vertex arity cap");
  witness_cmd->add_option("--max-boundary", wb.max_boundary, "graph input/output cap");
  witness_cmd->callback([&] {
    auto w = non_confluence_witness(wb);
    if (!w) {
      emit({{"found", false}});
      return;
    }
    Json forms = Json::array();
    for (const auto& r : w->forms) forms.push_back(collapse_result_json(r));
    emit({{"found", true}, {"graph", mixed_to_json(w->graph)}, {"forms", forms}});
  });

  auto* cube_cmd = app.add_subcommand("cube", "Punctured-cube colimit L_n(L/K) and its lambda");
  std::string k_spec, l_spec, map_spec;
  int cube_n = 2;
  cube_cmd->add_option("--K", k_spec, "comma-separated elements of K");
  cube_cmd->add_option("--L", l_spec, "comma-separated elements of L")->required();
  cube_cmd->add_option("--n", cube_n, "cube dimension");
  cube_cmd->add_option("--map", map_spec, "k=l pairs; default is the inclusion by name");
  cube_cmd->callback([&] {
    auto k = split(k_spec, ','), l = split(l_spec, ',');
    FiniteSetMap i = token_map(k, l, map_spec);
    CubeDiagram cube{i, cube_n};
    PuncturedColimit p = punctured_colimit(cube);
    Json lambda = Json::array();
    for (int t : p.lambda) {
      Json tuple = Json::array();
      for (int x : cube.decode(cube.terminal(), t)) tuple.push_back(l[x]);
      lambda.push_back(tuple);
    }
    std::set<int> image(p.lambda.begin(), p.lambda.end());
    Json out = {{"n", cube_n},
                {"K", k},
                {"L", l},
                {"i_injective", i.injective()},
                {"size", p.colim.size},
                {"terminal_size", cube.vertex_size(cube.terminal())},
                {"lambda", lambda},
                {"lambda_injective", image.size() == p.lambda.size()}};
    if (cube_n >= 2) {
      IteratedReport r = iterated_identity_check(i, cube_n);
      out["iterated"] = {{"ok", r.ok()}, {"lhs", r.lhs_size}, {"rhs", r.rhs_size}};
    }
    emit(out);
  });

  auto* filt_cmd = app.add_subcommand("filtration-check", "Verify the filtration pushout squares");
  std::string sig_k_path, sig_l_path, base_path, boundary_spec = "1:1";
  FiltrationBounds fb;
  filt_cmd->add_option("--sigK", sig_k_path, "signature K")->required();
  filt_cmd->add_option("--sigL", sig_l_path, "signature L")->required();
  filt_cmd->add_option("--base", base_path, "signature M0")->required();
  filt_cmd->add_option("--max-degree", fb.max_degree, "largest filtration degree");
  filt_cmd->add_option("--max-vertices", fb.max_vertices, "vertex cap");
  filt_cmd->add_option("--boundary", boundary_spec, "m:n,m:n,...");
  filt_cmd->callback([&] {
    fb.boundaries.clear();
    for (const auto& item : split(boundary_spec, ',')) fb.boundaries.push_back(parse_pair(item));
    FiltrationInstance inst{signature_from_json(parse_json(read_file(base_path))),
                            signature_from_json(parse_json(read_file(sig_k_path))),
                            signature_from_json(parse_json(read_file(sig_l_path)))};
    FiltrationReport r = filtration_square_check(inst, fb);
    emit(filtration_report_to_json(r));
    if (!r.ok()) status = 1;
  });

  auto* self_cmd = app.add_subcommand("selftest", "Run the built-in checks");
  self_cmd->callback([&] {
    bool ok = false;
    Json checks = selftest(ok);
    emit({{"checks", checks}, {"ok", ok}});
    if (!ok) status = 1;
  });

  auto* fixture_cmd = app.add_subcommand("fixture", "Print or list bundled fixtures");
  std::string fixture_name;
  fixture_cmd->add_option("name", fixture_name, "fixture name; omit to list");
  fixture_cmd->callback([&] {
    if (fixture_name.empty()) {
      std::vector<std::string> names;
      for (const auto& entry : std::filesystem::directory_iterator(fixture_dir())) {
        if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
      }
      std::sort(names.begin(), names.end());
      emit(names);
    } else {
      std::cout << read_file(fixture_file(fixture_name));
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ParseError& e) {
    std::cerr << "malformed input: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "malformed input: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return status;
}
