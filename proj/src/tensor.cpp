#include "propcalc/tensor.hpp"

#include <algorithm>
#include <set>

namespace propcalc {

RatTensor::RatTensor(std::vector<int> shape) : shape_(std::move(shape)) {
  std::size_t total = 1;
  for (int s : shape_) {
    if (s < 0) throw BoundaryMismatch("negative tensor dimension");
    total *= static_cast<std::size_t>(s);
  }
  data_.assign(total, mpq_class(0));
}

RatTensor RatTensor::matrix(int rows, int cols) { return RatTensor({rows, cols}); }

int RatTensor::rows() const {
  if (shape_.size() != 2) throw BoundaryMismatch("tensor is not a matrix");
  return shape_[0];
}

int RatTensor::cols() const {
  if (shape_.size() != 2) throw BoundaryMismatch("tensor is not a matrix");
  return shape_[1];
}

mpq_class& RatTensor::at(int row, int col) {
  return data_[static_cast<std::size_t>(row) * shape_[1] + col];
}

const mpq_class& RatTensor::at(int row, int col) const {
  return data_[static_cast<std::size_t>(row) * shape_[1] + col];
}

std::string to_string(const mpq_class& q) { return q.get_str(); }

mpq_class parse_rational(const std::string& text) {
  mpq_class q;
  if (text.empty() || q.set_str(text, 10) != 0) throw ParseError("bad rational '" + text + "'");
  if (q.get_den() == 0) throw ParseError("zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

int int_pow(int base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) {
    r *= base;
    if (r > (1LL << 30)) throw ResourceLimit("tensor dimension overflow");
  }
  return static_cast<int>(r);
}

RatTensor identity_matrix(int size) {
  RatTensor r = RatTensor::matrix(size, size);
  for (int i = 0; i < size; ++i) r.at(i, i) = 1;
  return r;
}

RatTensor kron(const RatTensor& a, const RatTensor& b) {
  RatTensor r = RatTensor::matrix(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      if (a.at(i, j) == 0) continue;
      for (int k = 0; k < b.rows(); ++k) {
        for (int l = 0; l < b.cols(); ++l) {
          r.at(i * b.rows() + k, j * b.cols() + l) = a.at(i, j) * b.at(k, l);
        }
      }
    }
  }
  return r;
}

RatTensor kron_power(const RatTensor& a, int k) {
  RatTensor r = identity_matrix(1);
  for (int i = 0; i < k; ++i) r = kron(r, a);
  return r;
}

RatTensor matmul(const RatTensor& a, const RatTensor& b) {
  if (a.cols() != b.rows()) {
    throw BoundaryMismatch("matrix product of " + std::to_string(a.rows()) + "x" +
                           std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                           std::to_string(b.cols()));
  }
  RatTensor r = RatTensor::matrix(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      if (a.at(i, k) == 0) continue;
      for (int j = 0; j < b.cols(); ++j) r.at(i, j) += a.at(i, k) * b.at(k, j);
    }
  }
  return r;
}

RatTensor inverse_matrix(const RatTensor& a) {
  const int n = a.rows();
  if (a.cols() != n) throw BoundaryMismatch("only square matrices are invertible");
  RatTensor work = a;
  RatTensor inv = identity_matrix(n);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    while (pivot < n && work.at(pivot, col) == 0) ++pivot;
    if (pivot == n) throw Error("matrix is singular");
    if (pivot != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(work.at(pivot, j), work.at(col, j));
        std::swap(inv.at(pivot, j), inv.at(col, j));
      }
    }
    const mpq_class scale = work.at(col, col);
    for (int j = 0; j < n; ++j) {
      work.at(col, j) /= scale;
      inv.at(col, j) /= scale;
    }
    for (int i = 0; i < n; ++i) {
      if (i == col || work.at(i, col) == 0) continue;
      const mpq_class factor = work.at(i, col);
      for (int j = 0; j < n; ++j) {
        work.at(i, j) -= factor * work.at(col, j);
        inv.at(i, j) -= factor * inv.at(col, j);
      }
    }
  }
  return inv;
}

namespace {

std::vector<int> digits(int index, int d, int k) {
  std::vector<int> out(k);
  for (int i = k - 1; i >= 0; --i) {
    out[i] = index % d;
    index /= d;
  }
  return out;
}

int from_digits(const std::vector<int>& ds, int d) {
  int index = 0;
  for (int x : ds) index = index * d + x;
  return index;
}

}  // namespace

RatTensor permutation_matrix(int d, const Permutation& w) {
  if (!is_permutation(w)) throw BoundaryMismatch("not a permutation");
  const int k = static_cast<int>(w.size());
  const int size = int_pow(d, k);
  RatTensor r = RatTensor::matrix(size, size);
  for (int x = 0; x < size; ++x) {
    auto in = digits(x, d, k);
    std::vector<int> out(k);
    for (int i = 0; i < k; ++i) out[w[i] - 1] = in[i];
    r.at(from_digits(out, d), x) = 1;
  }
  return r;
}

RatTensor permute_input_axes(const RatTensor& a, int d, const Permutation& w) {
  const int k = static_cast<int>(w.size());
  if (!is_permutation(w) || int_pow(d, k) != a.cols()) throw BoundaryMismatch("bad input permutation");
  RatTensor r = RatTensor::matrix(a.rows(), a.cols());
  for (int col = 0; col < a.cols(); ++col) {
    auto fresh = digits(col, d, k);
    std::vector<int> old(k);
    for (int i = 0; i < k; ++i) old[w[i] - 1] = fresh[i];
    const int old_col = from_digits(old, d);
    for (int row = 0; row < a.rows(); ++row) r.at(row, col) = a.at(row, old_col);
  }
  return r;
}

RatTensor permute_output_axes(const RatTensor& a, int d, const Permutation& w) {
  const int k = static_cast<int>(w.size());
  if (!is_permutation(w) || int_pow(d, k) != a.rows()) throw BoundaryMismatch("bad output permutation");
  RatTensor r = RatTensor::matrix(a.rows(), a.cols());
  for (int row = 0; row < a.rows(); ++row) {
    auto old = digits(row, d, k);
    std::vector<int> fresh(k);
    for (int j = 0; j < k; ++j) fresh[w[j] - 1] = old[j];
    const int new_row = from_digits(fresh, d);
    for (int col = 0; col < a.cols(); ++col) r.at(new_row, col) = a.at(row, col);
  }
  return r;
}

RatTensor matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ParseError("matrix must be a list of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  RatTensor r = RatTensor::matrix(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols) {
      throw ParseError("matrix rows must have equal length");
    }
    for (int k = 0; k < cols; ++k) {
      const Json& x = j[i][k];
      if (x.is_string()) {
        r.at(i, k) = parse_rational(x.get<std::string>());
      } else if (x.is_number_integer()) {
        r.at(i, k) = mpq_class(x.get<long>());
      } else {
        throw ParseError("matrix entries must be rational strings or integers");
      }
    }
  }
  return r;
}

Json matrix_to_json(const RatTensor& a) {
  Json rows = Json::array();
  for (int i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < a.cols(); ++k) row.push_back(to_string(a.at(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

AlgebraAssignment assignment_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_integer() ||
      !j.contains("matrices") || !j["matrices"].is_object()) {
    throw ParseError("assignment must have integer 'dim' and object 'matrices'");
  }
  AlgebraAssignment a;
  a.dim = j["dim"].get<int>();
  if (a.dim < 1) throw ParseError("dim must be positive");
  for (const auto& [name, value] : j["matrices"].items()) a.matrices[name] = matrix_from_json(value);
  return a;
}

Json assignment_to_json(const AlgebraAssignment& a) {
  Json j;
  j["dim"] = a.dim;
  Json ms = Json::object();
  for (const auto& [name, m] : a.matrices) ms[name] = matrix_to_json(m);
  j["matrices"] = std::move(ms);
  return j;
}

namespace {

const RatTensor& generator_matrix(const AlgebraAssignment& a, const Vertex& v) {
  if (!v.label) throw UnknownGenerator("vertex " + std::to_string(v.id) + " is unlabeled");
  auto it = a.matrices.find(*v.label);
  if (it == a.matrices.end()) throw UnknownGenerator("no matrix assigned to '" + *v.label + "'");
  if (it->second.rows() != int_pow(a.dim, v.out) || it->second.cols() != int_pow(a.dim, v.in)) {
    throw ArityMismatch("matrix for '" + *v.label + "' is " + std::to_string(it->second.rows()) +
                        "x" + std::to_string(it->second.cols()) + ", expected " +
                        std::to_string(int_pow(a.dim, v.out)) + "x" +
                        std::to_string(int_pow(a.dim, v.in)));
  }
  return it->second;
}

}  // namespace

RatTensor evaluate(const Graph& g, const AlgebraAssignment& a,
                   const std::optional<std::vector<int>>& order, const EvalLimits& limits) {
  require_valid(g);
  const int d = a.dim;
  if (d < 1 || d > limits.max_dim) {
    throw ResourceLimit("dimension " + std::to_string(d) + " outside 1.." +
                        std::to_string(limits.max_dim));
  }
  std::vector<int> seq = order ? *order : topological_order(g);
  std::map<Port, Port> source_of;
  for (const auto& e : g.edges) source_of[e.dst] = e.src;

  const int in_size = int_pow(d, g.m);
  std::vector<Port> open;
  for (int i = 1; i <= g.m; ++i) open.push_back(Port::input(i));
  // state[open_index * in_size + input_index]
  std::vector<mpq_class> state(static_cast<std::size_t>(in_size) * in_size, mpq_class(0));
  for (int x = 0; x < in_size; ++x) state[static_cast<std::size_t>(x) * in_size + x] = 1;

  std::set<int> done;
  for (int id : seq) {
    const Vertex* v = g.find_vertex(id);
    if (v == nullptr || done.count(id)) throw InvalidGraph("order is not a vertex ordering");
    const RatTensor& mat = generator_matrix(a, *v);
    std::vector<int> picked;
    for (int k = 1; k <= v->in; ++k) {
      const Port s = source_of.at(Port::vin(id, k));
      auto it = std::find(open.begin(), open.end(), s);
      if (it == open.end()) throw InvalidGraph("order is not topological at vertex " + std::to_string(id));
      picked.push_back(static_cast<int>(it - open.begin()));
    }
    std::vector<int> rest;
    for (int p = 0; p < static_cast<int>(open.size()); ++p) {
      if (std::find(picked.begin(), picked.end(), p) == picked.end()) rest.push_back(p);
    }
    const int k = static_cast<int>(open.size());
    const int old_size = int_pow(d, k);
    const int out_size = int_pow(d, v->out);
    const std::size_t new_entries =
        static_cast<std::size_t>(int_pow(d, static_cast<int>(rest.size()))) * out_size * in_size;
    if (new_entries > limits.max_entries) throw ResourceLimit("contraction state too large");
    std::vector<mpq_class> next(new_entries, mpq_class(0));
    for (int old = 0; old < old_size; ++old) {
      const std::size_t base = static_cast<std::size_t>(old) * in_size;
      bool zero = true;
      for (int x = 0; x < in_size && zero; ++x) zero = state[base + x] == 0;
      if (zero) continue;
      auto ds = digits(old, d, k);
      int col = 0;
      for (int p : picked) col = col * d + ds[p];
      int rest_index = 0;
      for (int p : rest) rest_index = rest_index * d + ds[p];
      for (int y = 0; y < out_size; ++y) {
        const mpq_class& coef = mat.at(y, col);
        if (coef == 0) continue;
        const std::size_t target = (static_cast<std::size_t>(rest_index) * out_size + y) * in_size;
        for (int x = 0; x < in_size; ++x) next[target + x] += coef * state[base + x];
      }
    }
    std::vector<Port> reopened;
    for (int p : rest) reopened.push_back(open[p]);
    for (int j = 1; j <= v->out; ++j) reopened.push_back(Port::vout(id, j));
    open = std::move(reopened);
    state = std::move(next);
    done.insert(id);
  }
  if (done.size() != g.vertices.size()) throw InvalidGraph("order misses vertices");

  std::vector<int> position(g.n);
  for (int j = 1; j <= g.n; ++j) {
    const Port s = source_of.at(Port::output(j));
    position[j - 1] = static_cast<int>(std::find(open.begin(), open.end(), s) - open.begin());
  }
  const int k = static_cast<int>(open.size());
  RatTensor result = RatTensor::matrix(int_pow(d, g.n), in_size);
  for (int idx = 0; idx < int_pow(d, k); ++idx) {
    auto ds = digits(idx, d, k);
    int row = 0;
    for (int j = 0; j < g.n; ++j) row = row * d + ds[position[j]];
    for (int x = 0; x < in_size; ++x) {
      result.at(row, x) = state[static_cast<std::size_t>(idx) * in_size + x];
    }
  }
  return result;
}

RatTensor evaluate(const PropElement& e, const AlgebraAssignment& a, const EvalLimits& limits) {
  return evaluate(e.graph(), a, std::nullopt, limits);
}

EndMorphism EndTarget::identity(int n) const { return {n, n, identity_matrix(int_pow(dim, n))}; }

EndMorphism EndTarget::hcompose(const Value& a, const Value& b) const {
  return {a.m + b.m, a.n + b.n, kron(a.matrix, b.matrix)};
}

EndMorphism EndTarget::vcompose(const Value& top, const Value& bottom) const {
  if (top.n != bottom.m) throw BoundaryMismatch("vertical composite boundary mismatch");
  return {top.m, bottom.n, matmul(bottom.matrix, top.matrix)};
}

EndMorphism EndTarget::permutation(const Permutation& w) const {
  const int k = static_cast<int>(w.size());
  return {k, k, permutation_matrix(dim, w)};
}

EndMorphism EndTarget::wrap(const Generator& g, const RatTensor& matrix) const {
  if (matrix.rows() != int_pow(dim, g.n) || matrix.cols() != int_pow(dim, g.m)) {
    throw ArityMismatch("matrix for '" + g.name + "' has the wrong shape");
  }
  return {g.m, g.n, matrix};
}

Homomorphism<EndTarget> algebra_morphism(const Signature& sig, const AlgebraAssignment& a) {
  EndTarget target{a.dim};
  std::map<std::string, EndMorphism> images;
  for (const auto& g : sig.generators()) {
    auto it = a.matrices.find(g.name);
    if (it == a.matrices.end()) throw UnknownGenerator("no matrix assigned to '" + g.name + "'");
    images.emplace(g.name, target.wrap(g, it->second));
  }
  return extend_morphism(sig, target, std::move(images));
}

namespace {

Permutation cyclic_shift(int k) {
  Permutation w(k);
  for (int i = 0; i < k; ++i) w[i] = (i + 1) % k + 1;
  return w;
}

}  // namespace

MorphismReport eval_is_morphism(const AlgebraAssignment& a,
                                const std::vector<std::pair<PropElement, PropElement>>& samples) {
  MorphismReport report;
  const int d = a.dim;
  auto record = [&](bool ok, const std::string& what, std::size_t index) {
    ++report.checked;
    if (!ok) report.violations.push_back(what + " fails on sample " + std::to_string(index));
  };
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& [x, y] = samples[i];
    const RatTensor ex = evaluate(x, a);
    const RatTensor ey = evaluate(y, a);
    record(evaluate(pelem_hcompose(x, y), a) == kron(ex, ey), "hcompose", i);
    if (x.n() == y.m()) record(evaluate(pelem_vcompose(x, y), a) == matmul(ey, ex), "vcompose", i);
    if (x.m() > 1) {
      Permutation w = cyclic_shift(x.m());
      record(evaluate(pelem_permute_inputs(x, w), a) == permute_input_axes(ex, d, w),
             "permute_inputs", i);
    }
    if (x.n() > 1) {
      Permutation w = cyclic_shift(x.n());
      record(evaluate(pelem_permute_outputs(x, w), a) == permute_output_axes(ex, d, w),
             "permute_outputs", i);
    }
  }
  return report;
}

namespace {

void check_intertwiner(const RatTensor& f, const AlgebraAssignment& phi_a,
                       const AlgebraAssignment& phi_b) {
  if (f.rows() != phi_b.dim || f.cols() != phi_a.dim) {
    throw BoundaryMismatch("f must be " + std::to_string(phi_b.dim) + "x" +
                           std::to_string(phi_a.dim));
  }
}

}  // namespace

bool morphism_prop_membership(const RatTensor& f, const AlgebraAssignment& phi_a,
                              const AlgebraAssignment& phi_b, const Generator& g) {
  check_intertwiner(f, phi_a, phi_b);
  Vertex v{1, g.m, g.n, g.name};
  const RatTensor& a = generator_matrix(phi_a, v);
  const RatTensor& b = generator_matrix(phi_b, v);
  return matmul(kron_power(f, g.n), a) == matmul(b, kron_power(f, g.m));
}

bool square_commutes(const RatTensor& f, const AlgebraAssignment& phi_a,
                     const AlgebraAssignment& phi_b, const PropElement& e) {
  check_intertwiner(f, phi_a, phi_b);
  return matmul(kron_power(f, e.n()), evaluate(e, phi_a)) ==
         matmul(evaluate(e, phi_b), kron_power(f, e.m()));
}

AlgebraAssignment transport(const RatTensor& f, const AlgebraAssignment& phi_b, const Signature& sig) {
  const RatTensor f_inv = inverse_matrix(f);
  AlgebraAssignment out;
  out.dim = f.cols();
  for (const auto& g : sig.generators()) {
    Vertex v{1, g.m, g.n, g.name};
    out.matrices[g.name] =
        matmul(matmul(kron_power(f_inv, g.n), generator_matrix(phi_b, v)), kron_power(f, g.m));
  }
  return out;
}

void Diagram::check() const {
  std::map<std::string, const DiagramArrow*> by_name;
  for (const auto& a : arrows) {
    if (!objects.count(a.source) || !objects.count(a.target)) {
      throw InconsistentDiagram("arrow '" + a.name + "' refers to an unknown object");
    }
    if (a.matrix.rows() != objects.at(a.target).dim || a.matrix.cols() != objects.at(a.source).dim) {
      throw InconsistentDiagram("arrow '" + a.name + "' has the wrong shape");
    }
    if (!by_name.emplace(a.name, &a).second) {
      throw InconsistentDiagram("duplicate arrow '" + a.name + "'");
    }
  }
  for (const auto& c : composites) {
    auto find = [&](const std::string& name) {
      auto it = by_name.find(name);
      if (it == by_name.end()) throw InconsistentDiagram("unknown arrow '" + name + "'");
      return it->second;
    };
    const DiagramArrow* first = find(c.first);
    const DiagramArrow* second = find(c.second);
    const DiagramArrow* comp = find(c.composite);
    if (first->target != second->source || comp->source != first->source ||
        comp->target != second->target) {
      throw InconsistentDiagram("composite '" + c.composite + "' has mismatched ends");
    }
    if (matmul(second->matrix, first->matrix) != comp->matrix) {
      throw InconsistentDiagram("'" + c.second + "' o '" + c.first + "' is not '" + c.composite + "'");
    }
  }
}

Diagram Diagram::restrict_to(const std::vector<std::string>& names) const {
  std::set<std::string> keep(names.begin(), names.end());
  Diagram out;
  std::set<std::string> kept_arrows;
  for (const auto& name : keep) {
    auto it = objects.find(name);
    if (it == objects.end()) throw InconsistentDiagram("unknown object '" + name + "'");
    out.objects.emplace(name, it->second);
  }
  for (const auto& a : arrows) {
    if (keep.count(a.source) && keep.count(a.target)) {
      out.arrows.push_back(a);
      kept_arrows.insert(a.name);
    }
  }
  for (const auto& c : composites) {
    if (kept_arrows.count(c.first) && kept_arrows.count(c.second) && kept_arrows.count(c.composite)) {
      out.composites.push_back(c);
    }
  }
  return out;
}

std::map<std::string, bool> diagram_end_check(const Diagram& d, const Signature& sig) {
  d.check();
  std::map<std::string, bool> out;
  for (const auto& g : sig.generators()) {
    bool ok = true;
    for (const auto& a : d.arrows) {
      ok = ok && morphism_prop_membership(a.matrix, d.objects.at(a.source), d.objects.at(a.target), g);
    }
    out[g.name] = ok;
  }
  return out;
}

}  // namespace propcalc
