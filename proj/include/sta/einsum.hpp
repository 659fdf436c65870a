#pragma once

// Index-notation expressions over tensors and their nested-loop reference
// semantics. Every other execution path is checked against execute_reference.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "sta/algebra.hpp"
#include "sta/tensor.hpp"

namespace sta {

enum class IndexRole { contracted, summed, mapped, batch, external };

inline const char* to_string(IndexRole r) {
  switch (r) {
    case IndexRole::contracted: return "contracted";
    case IndexRole::summed: return "summed";
    case IndexRole::mapped: return "mapped";
    case IndexRole::batch: return "batch";
    case IndexRole::external: return "external";
  }
  return "?";
}

struct IndexInfo {
  char c;
  IndexRole role;
  std::int64_t dim;
  bool diagonal;  // repeated within at least one tensor
  bool in_output, in_lhs, in_rhs;
};

struct IndexClassification {
  std::vector<IndexInfo> indices;  // order of first appearance: output, lhs, rhs

  const IndexInfo& operator[](char c) const {
    for (const auto& i : indices)
      if (i.c == c) return i;
    throw std::out_of_range(std::string("unknown index character '") + c + "'");
  }
  std::string chars_with(IndexRole r) const {
    std::string s;
    for (const auto& i : indices)
      if (i.role == r) s += i.c;
    return s;
  }
  std::string chars() const {
    std::string s;
    for (const auto& i : indices) s += i.c;
    return s;
  }
};

/// Index string plus the dimensions it labels.
struct IndexedShape {
  std::string indices;
  std::vector<std::int64_t> dims;
};

inline IndexClassification classify_indices(const IndexedShape& out, const IndexedShape& lhs,
                                             const IndexedShape* rhs = nullptr) {
  IndexClassification cls;
  auto visit = [&](const IndexedShape& t, int which) {
    if (t.indices.size() != t.dims.size())
      throw std::invalid_argument("index string '" + t.indices + "' does not match the tensor order");
    for (std::size_t d = 0; d < t.indices.size(); ++d) {
      const char c = t.indices[d];
      auto it = std::find_if(cls.indices.begin(), cls.indices.end(), [&](const IndexInfo& i) { return i.c == c; });
      if (it == cls.indices.end()) {
        cls.indices.push_back({c, IndexRole::mapped, t.dims[d], false, false, false, false});
        it = cls.indices.end() - 1;
      } else if (it->dim != t.dims[d]) {
        throw std::invalid_argument(std::string("index '") + c + "' has inconsistent dimensions " +
                                    std::to_string(it->dim) + " and " + std::to_string(t.dims[d]));
      }
      bool& seen = which == 0 ? it->in_output : which == 1 ? it->in_lhs : it->in_rhs;
      if (std::count(t.indices.begin(), t.indices.end(), c) > 1) it->diagonal = true;
      seen = true;
    }
  };
  visit(out, 0);
  visit(lhs, 1);
  if (rhs) visit(*rhs, 2);
  for (auto& i : cls.indices) {
    const int operands = int(i.in_lhs) + int(i.in_rhs);
    if (i.in_output) {
      i.role = operands == 2 ? IndexRole::batch : operands == 1 ? IndexRole::external : IndexRole::mapped;
    } else {
      i.role = operands == 2 ? IndexRole::contracted : IndexRole::summed;
    }
  }
  return cls;
}

template <class T>
IndexedShape shape_of(const IndexedTensor<T>& t) {
  return {t.indices, t.tensor->dims()};
}

/// output (=|+=) coefficient * f(lhs, rhs). Without a function the output
/// structure's multiplication (binary) or the identity (unary) is used.
template <class TC, class TA = TC, class TB = TA>
struct Expression {
  IndexedTensor<TC> output;
  IndexedTensor<TA> lhs;
  std::optional<IndexedTensor<TB>> rhs;
  std::optional<TC> coefficient;
  std::function<TC(const TA&)> unary;
  std::function<TC(const TA&, const TB&)> binary;
  bool accumulate = false;

  bool is_binary() const { return rhs.has_value(); }
  IndexClassification classify() const {
    const IndexedShape r = rhs ? shape_of(*rhs) : IndexedShape{};
    return classify_indices(shape_of(output), shape_of(lhs), rhs ? &r : nullptr);
  }
};

template <class T>
struct EvalOptions {
  std::optional<T> coefficient;
  bool accumulate = false;
};

namespace detail {

struct LoopSpace {
  std::string chars;
  std::vector<std::int64_t> dims;

  int slot(char c) const { return static_cast<int>(chars.find(c)); }
  std::vector<int> slots(const std::string& idx) const {
    std::vector<int> s;
    for (char c : idx) s.push_back(slot(c));
    return s;
  }
};

inline LoopSpace loop_space(const IndexClassification& cls) {
  LoopSpace sp;
  for (const auto& i : cls.indices) {
    sp.chars += i.c;
    sp.dims.push_back(i.dim);
  }
  return sp;
}

inline void gather(std::span<const std::int64_t> val, const std::vector<int>& slots, std::vector<std::int64_t>& out) {
  for (std::size_t d = 0; d < slots.size(); ++d) out[d] = val[slots[d]];
}

/// Enumerates assignments of every loop character. With a driver, only the
/// driver's logical entries are visited (consistent with its diagonals) and
/// the remaining characters are looped densely.
template <class TD, class Body>
void for_each_assignment(const LoopSpace& sp, const Tensor<TD>* driver, const std::string& driver_idx,
                         Body&& body) {
  const std::size_t n = sp.chars.size();
  std::vector<std::int64_t> val(n, 0);
  std::vector<int> dslots = driver ? sp.slots(driver_idx) : std::vector<int>{};
  std::vector<char> bound(n, 0);
  for (int s : dslots) bound[s] = 1;
  std::vector<int> free;
  for (std::size_t s = 0; s < n; ++s)
    if (!bound[s]) free.push_back(static_cast<int>(s));

  auto run_free = [&] {
    for (int s : free) val[s] = 0;
    while (true) {
      body(std::span<const std::int64_t>(val));
      std::size_t f = free.size();
      while (f > 0) {
        const int s = free[f - 1];
        if (++val[s] < sp.dims[s]) break;
        val[s] = 0;
        --f;
      }
      if (f == 0) return;
    }
  };

  if (!driver) {
    run_free();
    return;
  }
  std::vector<char> set(n, 0);
  driver->for_each_logical([&](std::span<const std::int64_t> idx, const TD&) {
    std::fill(set.begin(), set.end(), 0);
    for (std::size_t d = 0; d < dslots.size(); ++d) {
      const int s = dslots[d];
      if (set[s] && val[s] != idx[d]) return;
      val[s] = idx[d];
      set[s] = 1;
    }
    run_free();
  });
}

/// Resets every output position selected by the index pattern (only the
/// diagonal when characters repeat).
template <class T>
void reset_pattern(Tensor<T>& t, const std::string& idx) {
  bool repeated = false;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      if (idx[a] == idx[b]) repeated = true;
  if (!repeated) {
    t.clear();
    return;
  }
  std::vector<std::int64_t> multi(idx.size());
  auto on_pattern = [&](std::int64_t lin) {
    t.unravel_into(lin, multi);
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b)
        if (idx[a] == idx[b] && multi[a] != multi[b]) return false;
    return true;
  };
  if (t.is_sparse()) {
    std::vector<IndexValuePair<T>> kept;
    for (const auto& e : t.entries())
      if (!on_pattern(e.index)) kept.push_back(e);
    t.assign_sorted(std::move(kept));
  } else {
    auto data = t.dense_data();
    for (std::int64_t i = 0; i < t.size(); ++i)
      if (on_pattern(i)) data[static_cast<std::size_t>(i)] = t.structure().zero();
  }
}

/// Per-position accumulator over the output tensor's linear index space.
template <class T>
class OutputAccumulator {
 public:
  explicit OutputAccumulator(const Tensor<T>& out)
      : out_(out), acc_(static_cast<std::size_t>(out.size())), touched_(static_cast<std::size_t>(out.size()), 0) {}

  /// Combines `v` into the canonical position for multi-index `idx`; other
  /// symmetric images are skipped.
  void add(std::span<const std::int64_t> idx, const T& v) {
    if (out_.is_symmetric() && !out_.is_canonical(idx)) return;
    add_linear(out_.linearize(idx), v);
  }
  void add_linear(std::int64_t lin, const T& v) {
    const auto i = static_cast<std::size_t>(lin);
    if (touched_[i]) {
      if (!out_.structure().has_add())
        throw std::invalid_argument("output structure has no addition to combine terms");
      acc_[i] = out_.structure().add(acc_[i], v);
    } else {
      acc_[i] = v;
      touched_[i] = 1;
    }
  }

  /// Writes the accumulated values into `t` (the tensor this was built for).
  void commit(Tensor<T>& t, const std::string& out_idx, bool accumulate) {
    if (accumulate && !t.structure().has_add())
      throw std::invalid_argument("accumulation requires an output structure with addition");
    if (!accumulate) reset_pattern(t, out_idx);
    std::vector<IndexValuePair<T>> updates;
    for (std::size_t i = 0; i < acc_.size(); ++i)
      if (touched_[i]) updates.push_back({static_cast<std::int64_t>(i), acc_[i]});
    t.set_entries(std::move(updates), accumulate);
  }

 private:
  const Tensor<T>& out_;
  std::vector<T> acc_;
  std::vector<char> touched_;
};

/// f(a, b), or the output structure's product when no function is given.
template <class TC, class TA, class TB>
TC combine_binary(const Expression<TC, TA, TB>& e, const Structure<TC>& out, const TA& a, const TB& b) {
  if (e.binary) return e.binary(a, b);
  if constexpr (std::is_same_v<TA, TC> && std::is_same_v<TB, TC>) {
    if (!out.has_mul()) throw std::invalid_argument("output structure has no multiplication");
    return out.mul(a, b);
  } else {
    throw std::invalid_argument("operand types differ from the output type; supply a function");
  }
}

template <class TC, class TA, class TB>
TC combine(const Expression<TC, TA, TB>& e, const Structure<TC>& out, const TA& a, const TB* b) {
  TC term;
  if (b) {
    term = combine_binary(e, out, a, *b);
  } else {
    if (e.unary) {
      term = e.unary(a);
    } else if constexpr (std::is_same_v<TA, TC>) {
      term = a;
    } else {
      throw std::invalid_argument("operand type differs from the output type; supply a function");
    }
  }
  if (e.coefficient) {
    if (!out.has_mul()) throw std::invalid_argument("a coefficient requires an output multiplication");
    term = out.mul(*e.coefficient, term);
  }
  return term;
}

}  // namespace detail

/// Nested loops over every distinct index character. Sparse operands drive the
/// loop so absent entries are never visited.
template <class TC, class TA, class TB>
void execute_reference(const Expression<TC, TA, TB>& e) {
  if (!e.output.tensor || !e.lhs.tensor || (e.rhs && !e.rhs->tensor))
    throw std::invalid_argument("expression refers to a null tensor");
  if (e.rhs && e.unary) throw std::invalid_argument("unary function given for a binary expression");
  if (!e.rhs && e.binary) throw std::invalid_argument("binary function given for a unary expression");
  const IndexClassification cls = e.classify();
  const detail::LoopSpace sp = detail::loop_space(cls);

  Tensor<TC>& C = *e.output.tensor;
  const Tensor<TA>& A = *e.lhs.tensor;
  const Tensor<TB>* B = e.rhs ? e.rhs->tensor : nullptr;
  const auto cs = sp.slots(e.output.indices);
  const auto as = sp.slots(e.lhs.indices);
  const auto bs = B ? sp.slots(e.rhs->indices) : std::vector<int>{};
  std::vector<std::int64_t> ci(cs.size()), ai(as.size()), bi(bs.size());

  detail::OutputAccumulator<TC> acc(C);
  auto body = [&](std::span<const std::int64_t> val) {
    detail::gather(val, as, ai);
    const std::optional<TA> va = A.find(ai);
    if (!va) return;
    std::optional<TB> vb;
    if (B) {
      detail::gather(val, bs, bi);
      vb = B->find(bi);
      if (!vb) return;
    }
    detail::gather(val, cs, ci);
    acc.add(ci, detail::combine(e, C.structure(), *va, B ? &*vb : nullptr));
  };
  if (A.is_sparse()) {
    detail::for_each_assignment(sp, &A, e.lhs.indices, body);
  } else if (B && B->is_sparse()) {
    detail::for_each_assignment(sp, B, e.rhs->indices, body);
  } else {
    detail::for_each_assignment(sp, static_cast<const Tensor<TA>*>(nullptr), {}, body);
  }
  acc.commit(C, e.output.indices, e.accumulate);
}

// Convenience forms over a single element type.

template <class T>
Expression<T> contraction(IndexedTensor<T> out, IndexedTensor<T> a, IndexedTensor<T> b, EvalOptions<T> opt = {}) {
  Expression<T> e{out, a, b, opt.coefficient, {}, {}, opt.accumulate};
  return e;
}

template <class T>
Expression<T> assignment(IndexedTensor<T> out, IndexedTensor<T> a, EvalOptions<T> opt = {}) {
  Expression<T> e{out, a, std::nullopt, opt.coefficient, {}, {}, opt.accumulate};
  return e;
}

/// out = coefficient * a * b (or += with accumulate).
template <class T>
void contract(IndexedTensor<T> out, IndexedTensor<T> a, IndexedTensor<T> b, EvalOptions<T> opt = {}) {
  execute_reference(contraction(out, a, b, opt));
}

/// out = coefficient * a, summing over characters missing from the output and
/// replicating over characters missing from a.
template <class T>
void assign(IndexedTensor<T> out, IndexedTensor<T> a, EvalOptions<T> opt = {}) {
  execute_reference(assignment(out, a, opt));
}

/// out (=|+=) f(in), partial sums combined with the output structure's add.
template <class TC, class TA>
void apply_function(IndexedTensor<TC> out, IndexedTensor<TA> in, const Function<TC, TA>& f,
                    bool accumulate = false) {
  Expression<TC, TA, TA> e{out, in, std::nullopt, std::nullopt, f.body(), {}, accumulate};
  execute_reference(e);
}

/// out (=|+=) f(in1, in2).
template <class TC, class TA, class TB>
void apply_function(IndexedTensor<TC> out, IndexedTensor<TA> in1, IndexedTensor<TB> in2,
                    const Function<TC, TA, TB>& f, bool accumulate = false) {
  Expression<TC, TA, TB> e{out, in1, in2, std::nullopt, {}, f.body(), accumulate};
  execute_reference(e);
}

/// Sets every position selected by the index pattern to `value`. For sparse
/// tensors writing the additive identity removes the entries.
template <class T>
void fill(IndexedTensor<T> t, const T& value, bool accumulate = false) {
  Tensor<T> scalar({}, t.tensor->structure(), Storage::dense);
  scalar.write({{0, value}});
  execute_reference(assignment(t, scalar[""], EvalOptions<T>{std::nullopt, accumulate}));
}

/// Applies a transform elementwise. Only the last operand is modified, in
/// place, at its canonical positions; absent sparse entries are skipped.
template <class A>
void apply_transform(const Transform<A>& t, IndexedTensor<A> x) {
  const IndexClassification cls = classify_indices(shape_of(x), shape_of(x));
  const auto sp = detail::loop_space(cls);
  Tensor<A>& X = *x.tensor;
  const auto xs = sp.slots(x.indices);
  std::vector<std::int64_t> xi(xs.size());
  std::vector<IndexValuePair<A>> updates;
  std::vector<char> seen(static_cast<std::size_t>(X.size()), 0);
  auto body = [&](std::span<const std::int64_t> val) {
    detail::gather(val, xs, xi);
    if (X.is_symmetric() && !X.is_canonical(xi)) return;
    const std::int64_t lin = X.linearize(xi);
    if (seen[static_cast<std::size_t>(lin)]) return;
    auto v = X.find_canonical(lin);
    if (!v) return;
    seen[static_cast<std::size_t>(lin)] = 1;
    t.body()(*v);
    updates.push_back({lin, *v});
  };
  if (X.is_sparse()) detail::for_each_assignment(sp, &X, x.indices, body);
  else detail::for_each_assignment(sp, static_cast<const Tensor<A>*>(nullptr), {}, body);
  X.set_entries(std::move(updates), false);
}

template <class A, class B>
void apply_transform(const Transform<A, B>& t, IndexedTensor<A> a, IndexedTensor<B> x) {
  const IndexedShape as = shape_of(a);
  const IndexClassification cls = classify_indices(shape_of(x), shape_of(x), &as);
  const auto sp = detail::loop_space(cls);
  const Tensor<A>& TA_ = *a.tensor;
  Tensor<B>& X = *x.tensor;
  const auto aslots = sp.slots(a.indices);
  const auto xs = sp.slots(x.indices);
  std::vector<std::int64_t> ai(aslots.size()), xi(xs.size());
  // Current values of modified target positions; repeated visits see earlier
  // updates, matching an in-place loop.
  std::vector<std::optional<B>> cur(static_cast<std::size_t>(X.size()));
  std::vector<std::int64_t> order;
  auto body = [&](std::span<const std::int64_t> val) {
    detail::gather(val, aslots, ai);
    auto va = TA_.find(ai);
    if (!va) return;
    detail::gather(val, xs, xi);
    if (X.is_symmetric() && !X.is_canonical(xi)) return;
    const std::int64_t lin = X.linearize(xi);
    auto& slot = cur[static_cast<std::size_t>(lin)];
    if (!slot) {
      slot = X.find_canonical(lin);
      if (!slot) return;
      order.push_back(lin);
    }
    t.body()(*va, *slot);
  };
  if (X.is_sparse()) detail::for_each_assignment(sp, &X, x.indices, body);
  else if (TA_.is_sparse()) detail::for_each_assignment(sp, &TA_, a.indices, body);
  else detail::for_each_assignment(sp, static_cast<const Tensor<B>*>(nullptr), {}, body);
  std::vector<IndexValuePair<B>> updates;
  for (auto lin : order) updates.push_back({lin, *cur[static_cast<std::size_t>(lin)]});
  X.set_entries(std::move(updates), false);
}

template <class A, class B, class C>
void apply_transform(const Transform<A, B, C>& t, IndexedTensor<A> a, IndexedTensor<B> b, IndexedTensor<C> x) {
  const IndexedShape as = shape_of(a), bs = shape_of(b);
  IndexedShape ab{a.indices + b.indices, as.dims};
  ab.dims.insert(ab.dims.end(), bs.dims.begin(), bs.dims.end());
  const IndexClassification cls = classify_indices(shape_of(x), ab);
  const auto sp = detail::loop_space(cls);
  const Tensor<A>& TA_ = *a.tensor;
  const Tensor<B>& TB_ = *b.tensor;
  Tensor<C>& X = *x.tensor;
  const auto aslots = sp.slots(a.indices);
  const auto bslots = sp.slots(b.indices);
  const auto xs = sp.slots(x.indices);
  std::vector<std::int64_t> ai(aslots.size()), bi(bslots.size()), xi(xs.size());
  std::vector<std::optional<C>> cur(static_cast<std::size_t>(X.size()));
  std::vector<std::int64_t> order;
  auto body = [&](std::span<const std::int64_t> val) {
    detail::gather(val, aslots, ai);
    auto va = TA_.find(ai);
    if (!va) return;
    detail::gather(val, bslots, bi);
    auto vb = TB_.find(bi);
    if (!vb) return;
    detail::gather(val, xs, xi);
    if (X.is_symmetric() && !X.is_canonical(xi)) return;
    const std::int64_t lin = X.linearize(xi);
    auto& slot = cur[static_cast<std::size_t>(lin)];
    if (!slot) {
      slot = X.find_canonical(lin);
      if (!slot) return;
      order.push_back(lin);
    }
    t.body()(*va, *vb, *slot);
  };
  if (X.is_sparse()) detail::for_each_assignment(sp, &X, x.indices, body);
  else if (TA_.is_sparse()) detail::for_each_assignment(sp, &TA_, a.indices, body);
  else if (TB_.is_sparse()) detail::for_each_assignment(sp, &TB_, b.indices, body);
  else detail::for_each_assignment(sp, static_cast<const Tensor<C>*>(nullptr), {}, body);
  std::vector<IndexValuePair<C>> updates;
  for (auto lin : order) updates.push_back({lin, *cur[static_cast<std::size_t>(lin)]});
  X.set_entries(std::move(updates), false);
}

}  // namespace sta
