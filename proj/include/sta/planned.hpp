#pragma once

// Planned execution of binary expressions: operands are folded into a
// batch of sparse x dense matrix products, each product is replayed on the
// virtual grid, and results are scattered back through the output pattern.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "sta/einsum.hpp"
#include "sta/planner.hpp"
#include "sta/simgrid.hpp"
#include "sta/tensor.hpp"
#include "sta/world.hpp"

namespace sta {

namespace detail {

/// Mixed-radix position of a character group within its folded dimension.
struct CharGroup {
  std::vector<int> slots;
  std::vector<std::int64_t> dims;
  std::int64_t size = 1;

  std::int64_t index(std::span<const std::int64_t> val) const {
    std::int64_t x = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) x = x * dims[i] + val[slots[i]];
    return x;
  }
  void decode(std::int64_t x, std::vector<std::int64_t>& val) const {
    for (std::size_t i = slots.size(); i-- > 0;) {
      val[slots[i]] = x % dims[i];
      x /= dims[i];
    }
  }
};

struct FoldLayout {
  LoopSpace sp;
  CharGroup batch, rows, inner, cols, mapped;
  bool swapped = false;  // the folded sparse side is the right operand
};

inline CharGroup make_group(const LoopSpace& sp, const std::string& chars) {
  CharGroup g;
  for (char c : chars) {
    g.slots.push_back(sp.slot(c));
    g.dims.push_back(sp.dims[sp.slot(c)]);
    g.size *= g.dims.back();
  }
  return g;
}

inline std::string chars_in(const IndexClassification& cls, IndexRole role, const std::string& within) {
  std::string s;
  for (const auto& i : cls.indices)
    if (i.role == role && within.find(i.c) != std::string::npos) s += i.c;
  return s;
}

/// Binds one operand entry's characters; false when a repeated character
/// takes two different values.
inline bool bind(const std::vector<int>& slots, std::span<const std::int64_t> idx, std::vector<std::int64_t>& val,
                 std::vector<char>& set) {
  std::fill(set.begin(), set.end(), 0);
  for (std::size_t d = 0; d < slots.size(); ++d) {
    const int s = slots[d];
    if (set[s] && val[s] != idx[d]) return false;
    val[s] = idx[d];
    set[s] = 1;
  }
  return true;
}

template <class TS>
struct FoldedSparse {
  // One CSR matrix (rows x inner) per batch index.
  std::vector<CsrPattern> pattern;
  std::vector<std::vector<TS>> values;
  std::int64_t nnz = 0;
};

template <class TS>
FoldedSparse<TS> fold_sparse(const Tensor<TS>& t, const std::string& idx, const FoldLayout& L) {
  const auto slots = L.sp.slots(idx);
  std::vector<std::int64_t> val(L.sp.chars.size(), 0);
  std::vector<char> set(val.size(), 0);
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, TS> acc;
  t.for_each_logical([&](std::span<const std::int64_t> ix, const TS& v) {
    if (!bind(slots, ix, val, set)) return;
    const auto key = std::make_tuple(L.batch.index(val), L.rows.index(val), L.inner.index(val));
    auto [it, inserted] = acc.try_emplace(key, v);
    if (!inserted) {
      if (!t.structure().has_add()) throw std::invalid_argument("operand summation needs an additive structure");
      it->second = t.structure().add(it->second, v);
    }
  });
  FoldedSparse<TS> out;
  out.pattern.resize(static_cast<std::size_t>(L.batch.size));
  out.values.resize(out.pattern.size());
  for (auto& p : out.pattern) {
    p.m = L.rows.size;
    p.k = L.inner.size;
    p.row_ptr.assign(static_cast<std::size_t>(p.m + 1), 0);
  }
  for (const auto& [key, v] : acc) {
    const auto [b, i, k] = key;
    auto& p = out.pattern[static_cast<std::size_t>(b)];
    ++p.row_ptr[static_cast<std::size_t>(i + 1)];
    p.col.push_back(k);
    out.values[static_cast<std::size_t>(b)].push_back(v);
  }
  for (auto& p : out.pattern)
    for (std::size_t i = 1; i < p.row_ptr.size(); ++i) p.row_ptr[i] += p.row_ptr[i - 1];
  out.nnz = static_cast<std::int64_t>(acc.size());
  return out;
}

template <class TD>
struct FoldedDense {
  std::vector<std::vector<TD>> values;  // per batch, inner x cols
  std::vector<std::vector<char>> present;
  bool all_present = true;
};

template <class TD>
FoldedDense<TD> fold_dense(const Tensor<TD>& t, const std::string& idx, const FoldLayout& L) {
  const auto slots = L.sp.slots(idx);
  std::vector<std::int64_t> val(L.sp.chars.size(), 0);
  std::vector<char> set(val.size(), 0);
  const std::size_t block = static_cast<std::size_t>(L.inner.size * L.cols.size);
  FoldedDense<TD> out;
  out.values.assign(static_cast<std::size_t>(L.batch.size), std::vector<TD>(block, t.structure().zero()));
  out.present.assign(out.values.size(), std::vector<char>(block, 0));
  t.for_each_logical([&](std::span<const std::int64_t> ix, const TD& v) {
    if (!bind(slots, ix, val, set)) return;
    const auto b = static_cast<std::size_t>(L.batch.index(val));
    const auto pos = static_cast<std::size_t>(L.inner.index(val) * L.cols.size + L.cols.index(val));
    if (out.present[b][pos]) {
      if (!t.structure().has_add()) throw std::invalid_argument("operand summation needs an additive structure");
      out.values[b][pos] = t.structure().add(out.values[b][pos], v);
    } else {
      out.values[b][pos] = v;
      out.present[b][pos] = 1;
    }
  });
  for (const auto& p : out.present)
    if (std::find(p.begin(), p.end(), 0) != p.end()) out.all_present = false;
  return out;
}

template <class TC, class TA, class TB>
FoldLayout fold_layout(const Expression<TC, TA, TB>& e, const IndexClassification& cls) {
  FoldLayout L;
  L.sp = loop_space(cls);
  const Tensor<TA>& A = *e.lhs.tensor;
  const Tensor<TB>& B = *e.rhs->tensor;
  L.swapped = !A.is_sparse() && B.is_sparse();
  const std::string& s_idx = L.swapped ? e.rhs->indices : e.lhs.indices;
  const std::string& d_idx = L.swapped ? e.lhs.indices : e.rhs->indices;
  L.batch = make_group(L.sp, cls.chars_with(IndexRole::batch));
  L.rows = make_group(L.sp, chars_in(cls, IndexRole::external, s_idx));
  L.inner = make_group(L.sp, cls.chars_with(IndexRole::contracted));
  L.cols = make_group(L.sp, chars_in(cls, IndexRole::external, d_idx));
  L.mapped = make_group(L.sp, cls.chars_with(IndexRole::mapped));
  return L;
}

template <class TC, class TA, class TB>
void check_planned(const Expression<TC, TA, TB>& e) {
  if (!e.rhs) throw std::invalid_argument("planned execution needs a binary expression");
  if (!e.output.tensor || !e.lhs.tensor || !e.rhs->tensor) throw std::invalid_argument("expression refers to a null tensor");
  if (e.unary) throw std::invalid_argument("unary function given for a binary expression");
}

using PlanChooser = std::function<ContractionPlan(const ProblemShape&)>;

template <class TC, class TA, class TB>
SimReport planned_eval(const Expression<TC, TA, TB>& e, const VirtualWorld& world, const PlanChooser& choose,
                       ContractionPlan* plan_out) {
  check_planned(e);
  const IndexClassification cls = e.classify();
  const FoldLayout L = fold_layout(e, cls);
  Tensor<TC>& C = *e.output.tensor;
  const Structure<TC>& out = C.structure();

  OutputAccumulator<TC> acc(C);
  std::vector<std::int64_t> val(L.sp.chars.size(), 0);
  const auto cslots = L.sp.slots(e.output.indices);
  std::vector<std::int64_t> ci(cslots.size());
  SimReport total;
  ContractionPlan plan;

  auto run = [&](const auto& S, const std::string& s_idx, const auto& D, const std::string& d_idx, auto mul) {
    using TS = typename std::decay_t<decltype(S)>::value_type;
    using TD = typename std::decay_t<decltype(D)>::value_type;
    const FoldedSparse<TS> fs = fold_sparse(S, s_idx, L);
    const FoldedDense<TD> fd = fold_dense(D, d_idx, L);

    ProblemShape shape;
    shape.m = L.rows.size;
    shape.k = L.inner.size;
    shape.n = L.cols.size;
    shape.batch = L.batch.size;
    shape.z = double(fs.nnz) / double(L.batch.size);
    shape.p = world.p;
    plan = choose(shape);
    const ProblemShape& ps = plan.shape;
    if (ps.m != shape.m || ps.k != shape.k || ps.n != shape.n || ps.batch != shape.batch)
      throw std::invalid_argument("plan does not match the expression's folded shape");
    if (plan.grid.size() != world.p || ps.p != world.p)
      throw std::invalid_argument("plan grid " + plan.grid.str() + " does not match the world size");
    if (!plan.costs.feasible) throw std::invalid_argument("plan violates the memory limit");

    FoldedProblem<TC, TS, TD> fp;
    fp.n = shape.n;
    fp.mul = mul;
    fp.out = &out;
    if constexpr (std::is_same_v<TC, TS> && std::is_same_v<TC, TD>) {
      if (!e.binary) fp.kernel = out.kernel();
    }
    for (std::int64_t b = 0; b < L.batch.size; ++b) {
      fp.a = fs.pattern[static_cast<std::size_t>(b)];
      fp.a_val = fs.values[static_cast<std::size_t>(b)];
      fp.b = fd.values[static_cast<std::size_t>(b)];
      fp.b_present = fd.all_present ? std::vector<char>{} : fd.present[static_cast<std::size_t>(b)];
      SimReport rep;
      const FoldedResult<TC> res = replay_summa(fp, plan.grid, &rep);
      total.merge(rep);

      L.batch.decode(b, val);
      for (std::int64_t i = 0; i < shape.m; ++i) {
        L.rows.decode(i, val);
        for (std::int64_t j = 0; j < shape.n; ++j) {
          const auto pos = static_cast<std::size_t>(i * shape.n + j);
          if (!res.touched[pos]) continue;
          L.cols.decode(j, val);
          TC v = res.c[pos];
          if (e.coefficient) {
            if (!out.has_mul()) throw std::invalid_argument("a coefficient requires an output multiplication");
            v = out.mul(*e.coefficient, v);
          }
          for (std::int64_t r = 0; r < L.mapped.size; ++r) {
            L.mapped.decode(r, val);
            gather(val, cslots, ci);
            acc.add(ci, v);
          }
        }
      }
    }
  };

  const Tensor<TA>& A = *e.lhs.tensor;
  const Tensor<TB>& B = *e.rhs->tensor;
  if (!L.swapped) {
    run(A, e.lhs.indices, B, e.rhs->indices, [&e, &out](const TA& a, const TB& b) {
      return combine_binary(e, out, a, b);
    });
  } else {
    run(B, e.rhs->indices, A, e.lhs.indices, [&e, &out](const TB& b, const TA& a) {
      return combine_binary(e, out, a, b);
    });
  }
  acc.commit(C, e.output.indices, e.accumulate);
  total.grid = plan.grid;
  total.predicted_W = plan.costs.W_grid;
  total.finalize();
  if (plan_out) *plan_out = plan;
  return total;
}

}  // namespace detail

/// Executes a binary expression on the plan's virtual grid. The output equals
/// execute_reference up to floating-point reassociation.
template <class TC, class TA, class TB>
SimReport execute_planned(const Expression<TC, TA, TB>& e, const ContractionPlan& plan, const VirtualWorld& world) {
  return detail::planned_eval(e, world, [&](const ProblemShape&) { return plan; }, nullptr);
}

/// Folds the expression, lets the planner pick a grid and executes on it.
template <class TC, class TA, class TB>
SimReport execute_auto(const Expression<TC, TA, TB>& e, const VirtualWorld& world, const PlannerConfig& cfg = {},
                       double memory = std::numeric_limits<double>::infinity(), ContractionPlan* plan_out = nullptr) {
  return detail::planned_eval(
      e, world,
      [&](ProblemShape s) {
        s.memory = memory;
        return choose_plan(s, cfg);
      },
      plan_out);
}

/// Folded shape of a binary expression, as the planner sees it.
template <class TC, class TA, class TB>
ProblemShape folded_shape(const Expression<TC, TA, TB>& e, int p) {
  detail::check_planned(e);
  const IndexClassification cls = e.classify();
  const detail::FoldLayout L = detail::fold_layout(e, cls);
  ProblemShape s;
  s.m = L.rows.size;
  s.k = L.inner.size;
  s.n = L.cols.size;
  s.batch = L.batch.size;
  s.p = p;
  std::int64_t nnz = 0;
  if (L.swapped) nnz = detail::fold_sparse(*e.rhs->tensor, e.rhs->indices, L).nnz;
  else nnz = detail::fold_sparse(*e.lhs.tensor, e.lhs.indices, L).nnz;
  s.z = double(nnz) / double(L.batch.size);
  return s;
}

/// Evaluates expressions either with the reference loops or on a virtual
/// grid, keeping the plan and replay report of every planned contraction.
class Executor {
 public:
  static Executor reference() { return Executor(); }
  static Executor planned(const VirtualWorld& world, PlannerConfig cfg = {},
                          double memory = std::numeric_limits<double>::infinity()) {
    Executor x;
    x.world_ = world;
    x.planned_ = true;
    x.cfg_ = cfg;
    x.memory_ = memory;
    return x;
  }

  bool is_planned() const { return planned_; }

  /// Binary expressions run planned when this executor is planned; unary ones
  /// always use the reference loops.
  template <class TC, class TA, class TB>
  void eval(const Expression<TC, TA, TB>& e) {
    if (!planned_ || !e.rhs) {
      execute_reference(e);
      return;
    }
    ContractionPlan plan;
    reports_.push_back(execute_auto(e, world_, cfg_, memory_, &plan));
    plans_.push_back(plan);
  }

  template <class T>
  void contract(IndexedTensor<T> out, IndexedTensor<T> a, IndexedTensor<T> b, EvalOptions<T> opt = {}) {
    eval(contraction(out, a, b, opt));
  }
  template <class T>
  void assign(IndexedTensor<T> out, IndexedTensor<T> a, EvalOptions<T> opt = {}) {
    eval(assignment(out, a, opt));
  }

  const std::vector<SimReport>& reports() const { return reports_; }
  const std::vector<ContractionPlan>& plans() const { return plans_; }
  void clear_reports() {
    reports_.clear();
    plans_.clear();
  }

 private:
  Executor() = default;
  bool planned_ = false;
  VirtualWorld world_{};
  PlannerConfig cfg_{};
  double memory_ = std::numeric_limits<double>::infinity();
  std::vector<SimReport> reports_;
  std::vector<ContractionPlan> plans_;
};

}  // namespace sta
