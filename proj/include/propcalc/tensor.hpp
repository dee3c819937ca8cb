#pragma once

// Exact evaluation of prop elements in endomorphism props End_X with
// X = Q^d. A morphism X^{(x)m} -> X^{(x)n} is a d^n x d^m matrix whose row
// index enumerates output values and column index input values, first
// tensor factor most significant.

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "propcalc/free_prop.hpp"

namespace propcalc {

class RatTensor {
 public:
  RatTensor() = default;
  explicit RatTensor(std::vector<int> shape);
  static RatTensor matrix(int rows, int cols);

  const std::vector<int>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  int rows() const;  // rank-2 only
  int cols() const;

  mpq_class& at(int row, int col);
  const mpq_class& at(int row, int col) const;
  mpq_class& flat(std::size_t i) { return data_[i]; }
  const mpq_class& flat(std::size_t i) const { return data_[i]; }

  friend bool operator==(const RatTensor& a, const RatTensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  std::vector<int> shape_;
  std::vector<mpq_class> data_;
};

std::string to_string(const mpq_class& q);
mpq_class parse_rational(const std::string& text);  // "p/q" or "p"

int int_pow(int base, int exp);

RatTensor identity_matrix(int size);
RatTensor kron(const RatTensor& a, const RatTensor& b);
RatTensor kron_power(const RatTensor& a, int k);
/// a * b (apply b first).
RatTensor matmul(const RatTensor& a, const RatTensor& b);
RatTensor inverse_matrix(const RatTensor& a);  // throws Error when singular
/// Matrix on (Q^d)^{(x)k} sending wire i to wire w(i).
RatTensor permutation_matrix(int d, const Permutation& w);
/// Reindex input axes: new input i is old input w(i).
RatTensor permute_input_axes(const RatTensor& a, int d, const Permutation& w);
/// Reindex output axes: old output j becomes output w(j).
RatTensor permute_output_axes(const RatTensor& a, int d, const Permutation& w);

RatTensor matrix_from_json(const Json& j);
Json matrix_to_json(const RatTensor& a);

struct EvalLimits {
  int max_dim = 4;
  std::size_t max_entries = std::size_t{1} << 22;
};

/// A prop morphism Free(sig) -> End_{Q^d}, given on generators.
struct AlgebraAssignment {
  int dim = 1;
  std::map<std::string, RatTensor> matrices;
};

AlgebraAssignment assignment_from_json(const Json& j);
Json assignment_to_json(const AlgebraAssignment& a);

/// Contract the tensor network of a labeled graph. `order` must be a
/// topological order of the vertices; by default the smallest-id one.
RatTensor evaluate(const Graph& g, const AlgebraAssignment& a,
                   const std::optional<std::vector<int>>& order = std::nullopt,
                   const EvalLimits& limits = {});
RatTensor evaluate(const PropElement& e, const AlgebraAssignment& a, const EvalLimits& limits = {});

/// End_{Q^d} as a target for homomorphisms out of free props.
struct EndMorphism {
  int m = 0;
  int n = 0;
  RatTensor matrix;
  friend bool operator==(const EndMorphism&, const EndMorphism&) = default;
};

struct EndTarget {
  using Value = EndMorphism;
  int dim = 1;
  Value identity(int n) const;
  Value hcompose(const Value& a, const Value& b) const;
  Value vcompose(const Value& top, const Value& bottom) const;
  Value permutation(const Permutation& w) const;
  std::pair<int, int> boundary(const Value& a) const { return {a.m, a.n}; }
  /// Wrap a generator matrix of a signature generator.
  Value wrap(const Generator& g, const RatTensor& matrix) const;
};

Homomorphism<EndTarget> algebra_morphism(const Signature& sig, const AlgebraAssignment& a);

struct MorphismReport {
  int checked = 0;
  std::vector<std::string> violations;
};

/// Check that evaluation sends hcompose to kron, vcompose (when the
/// boundaries fit) to matmul and the Sigma-actions to axis permutations.
MorphismReport eval_is_morphism(const AlgebraAssignment& a,
                                const std::vector<std::pair<PropElement, PropElement>>& samples);

/// f^{(x)n} phiA(g) = phiB(g) f^{(x)m} for g of arity (m,n).
bool morphism_prop_membership(const RatTensor& f, const AlgebraAssignment& phi_a,
                              const AlgebraAssignment& phi_b, const Generator& g);
/// The same square for an arbitrary element, evaluated on both sides.
bool square_commutes(const RatTensor& f, const AlgebraAssignment& phi_a,
                     const AlgebraAssignment& phi_b, const PropElement& e);

/// phiA(g) = (f^{-1})^{(x)n} phiB(g) f^{(x)m}, for invertible square f.
AlgebraAssignment transport(const RatTensor& f, const AlgebraAssignment& phi_b, const Signature& sig);

class InconsistentDiagram : public Error {
 public:
  using Error::Error;
};

struct DiagramArrow {
  std::string name;
  std::string source;
  std::string target;
  RatTensor matrix;  // dim(target) x dim(source)
};

/// composite = second o first
struct DiagramComposite {
  std::string first;
  std::string second;
  std::string composite;
};

struct Diagram {
  std::map<std::string, AlgebraAssignment> objects;
  std::vector<DiagramArrow> arrows;
  std::vector<DiagramComposite> composites;

  /// Throws InconsistentDiagram on unknown objects, shape mismatches or a
  /// composition entry that does not hold.
  void check() const;
  /// The sub-diagram on the given objects (arrows and composites among them).
  Diagram restrict_to(const std::vector<std::string>& names) const;
};

/// Per generator: does the family (phi_X(g))_X lie in the diagram
/// endomorphism prop, i.e. does every arrow's square commute?
std::map<std::string, bool> diagram_end_check(const Diagram& d, const Signature& sig);

}  // namespace propcalc
