#pragma once

// Finite-set models of multifold pushout-products and of the filtration
// pushouts of Env(Free(L) v_{Free(K)} P). Sets are {0..size-1}; all
// colimits go through one union-find engine.

#include <string>
#include <utility>
#include <vector>

#include "propcalc/free_prop.hpp"

namespace propcalc {

struct FiniteSetMap {
  int source = 0;
  int target = 0;
  std::vector<int> map;  // size source, values in [0, target)

  bool injective() const;
  bool surjective() const;
  /// Throws PreconditionViolation unless the map is total and in range.
  void check() const;
  static FiniteSetMap identity(int size);
};

/// g o f
FiniteSetMap compose(const FiniteSetMap& f, const FiniteSetMap& g);

struct SetDiagram {
  struct Arrow {
    int from = 0;
    int to = 0;
    FiniteSetMap f;
  };
  std::vector<int> sizes;
  std::vector<Arrow> arrows;

  int add_object(int size);
  void add_arrow(int from, int to, FiniteSetMap f);
};

struct Colimit {
  int size = 0;
  std::vector<std::vector<int>> legs;  // legs[object][element] = class
};

/// Disjoint union of all objects modulo x ~ f(x) for every arrow.
Colimit colimit(const SetDiagram& d);

/// Pushout of B <-f- A -g-> C; legs in the order A, B, C.
Colimit pushout(const FiniteSetMap& f, const FiniteSetMap& g);

/// The cube of i: K -> L. Vertex `mask` has factor L in coordinate k when
/// bit k is set and K otherwise; tuples are mixed-radix, coordinate 0 most
/// significant.
struct CubeDiagram {
  FiniteSetMap i;
  int n = 0;

  int vertex_size(unsigned mask) const;
  std::vector<int> decode(unsigned mask, int index) const;
  int encode(unsigned mask, const std::vector<int>& tuple) const;
  /// Image of a tuple of vertex `mask` in L^n.
  int to_terminal(unsigned mask, int index) const;
  unsigned terminal() const { return (1u << n) - 1; }
};

struct PuncturedColimit {
  Colimit colim;               // objects are the masks 0 .. 2^n - 2
  std::vector<int> lambda;     // class -> tuple index in L^n
  std::vector<int> representative_mask;
  std::vector<int> representative_index;
};

/// L_n(L/K) with its map lambda into L^n. For n = 0 the diagram is empty
/// and so is the result.
PuncturedColimit punctured_colimit(const CubeDiagram& c);

struct IteratedReport {
  int lhs_size = 0;          // |L_n|
  int rhs_size = 0;          // |L_{n-1} x L  +_{L_{n-1} x K}  L^{n-1} x K|
  std::vector<int> bijection;  // rhs class -> lhs class
  bool well_defined = false;
  bool bijective = false;
  bool commutes_with_lambda = false;
  bool ok() const { return well_defined && bijective && commutes_with_lambda; }
};

/// Compares L_n(L/K) with the pushout-product of lambda_{n-1} and i, both
/// built by the colimit engine, through an explicit map of generators.
IteratedReport iterated_identity_check(const FiniteSetMap& i, int n);

struct CoequalizerReport {
  int pushout_size = 0;
  int coequalizer_size = 0;
  bool reflexive = false;  // d0 s0 = d1 s0 = id
  bool agree = false;      // induced map pushout -> coequalizer is a bijection under T and A
};

/// The pushout of T <-s- S -u-> A against the coequalizer of
/// d0 = (id, u, id), d1 = (id, s, id): T + S + A -> T + A.
CoequalizerReport reflexive_coequalizer_check(const FiniteSetMap& u, const FiniteSetMap& s);

/// K, L and M0 as signatures: K must be a sub-signature of L and M0 must
/// share no names with L. The prop P is Free(M0 + K) with u the inclusion.
struct FiltrationInstance {
  Signature m0;
  Signature k;
  Signature l;
};

struct FiltrationBounds {
  int max_degree = 2;
  int max_vertices = 4;
  std::vector<std::pair<int, int>> boundaries{{1, 1}};
  std::size_t max_elements = 2000000;
};

struct SquareReport {
  int degree = 0;
  int m = 0;
  int n = 0;
  std::size_t u = 0;
  std::size_t v = 0;
  std::size_t c = 0;
  std::size_t d = 0;
  std::size_t image_in_v = 0;  // |d0(U)|
  std::size_t image_in_c = 0;  // |d1(U)|
  std::size_t pushout = 0;
  bool cardinality_identity = false;  // |D| = |C| + |V| - |d0(U)|
  bool pushout_is_d = false;          // induced map is well defined and bijective
  bool ok() const { return cardinality_identity && pushout_is_d; }
};

struct FiltrationReport {
  std::vector<SquareReport> squares;
  // With E_n the image of the degree-n tagged graphs (at most n L-slots)
  // in the plain enumeration:
  bool nested = false;               // E_{n-1} inside E_n up to max_vertices
  bool exhausts = false;             // E_{max_vertices} is everything
  bool coequalizer_matches = false;  // E_n equals D_n, the degree filter
  bool ok() const;
};

FiltrationReport filtration_square_check(const FiltrationInstance& inst, const FiltrationBounds& bounds);
Json filtration_report_to_json(const FiltrationReport& r);

}  // namespace propcalc
