#pragma once

// Algebraic structures (set, monoid, group, semiring, ring) over fixed-size
// element types, plus user-defined elementwise functions and transforms.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace sta {

enum class StructureKind { set, monoid, group, semiring, ring };

constexpr std::string_view to_string(StructureKind k) {
  switch (k) {
    case StructureKind::set: return "set";
    case StructureKind::monoid: return "monoid";
    case StructureKind::group: return "group";
    case StructureKind::semiring: return "semiring";
    case StructureKind::ring: return "ring";
  }
  return "?";
}

/// Selects a vectorized local kernel for structures whose operators are known.
enum class KernelTag { generic, real_ring, tropical_i32 };

template <class T>
bool bytes_equal(const T& a, const T& b) {
  if constexpr (std::equality_comparable<T>) {
    return a == b;
  } else {
    return std::memcmp(&a, &b, sizeof(T)) == 0;
  }
}

/// Operator/identity bundle for one element type. Which members are present is
/// fixed by the kind: set has nothing, monoid adds (+, 0), group adds -x,
/// semiring adds (*, 1) to a monoid, ring has everything.
template <class T>
class Structure {
  static_assert(std::is_trivially_copyable_v<T>,
                "tensor elements must be statically sized and copyable by bytes");

 public:
  using value_type = T;
  using BinaryOp = std::function<T(const T&, const T&)>;
  using UnaryOp = std::function<T(const T&)>;
  using AbsMap = std::function<double(const T&)>;
  using EqualFn = std::function<bool(const T&, const T&)>;

  static Structure set() { return Structure(StructureKind::set); }

  static Structure monoid(T add_id, BinaryOp add) {
    Structure s(StructureKind::monoid);
    s.add_id_ = add_id;
    s.add_ = require(std::move(add), "additive operator");
    return s;
  }

  static Structure group(T add_id, BinaryOp add, UnaryOp inv) {
    Structure s = monoid(add_id, std::move(add));
    s.kind_ = StructureKind::group;
    s.inv_ = require(std::move(inv), "additive inverse");
    return s;
  }

  static Structure semiring(T add_id, BinaryOp add, T mul_id, BinaryOp mul) {
    Structure s = monoid(add_id, std::move(add));
    s.kind_ = StructureKind::semiring;
    s.mul_id_ = mul_id;
    s.mul_ = require(std::move(mul), "multiplicative operator");
    return s;
  }

  static Structure ring(T add_id, BinaryOp add, UnaryOp inv, T mul_id, BinaryOp mul) {
    Structure s = semiring(add_id, std::move(add), mul_id, std::move(mul));
    s.kind_ = StructureKind::ring;
    s.inv_ = require(std::move(inv), "additive inverse");
    return s;
  }

  StructureKind kind() const { return kind_; }
  static constexpr std::size_t elem_size() { return sizeof(T); }

  bool has_add() const { return kind_ != StructureKind::set; }
  bool has_inverse() const { return kind_ == StructureKind::group || kind_ == StructureKind::ring; }
  bool has_mul() const { return kind_ == StructureKind::semiring || kind_ == StructureKind::ring; }

  const T& add_id() const {
    if (!add_id_) throw std::logic_error("structure has no additive identity");
    return *add_id_;
  }
  const T& mul_id() const {
    if (!mul_id_) throw std::logic_error("structure has no multiplicative identity");
    return *mul_id_;
  }
  T add(const T& a, const T& b) const {
    if (!add_) throw std::logic_error("structure has no additive operator");
    return add_(a, b);
  }
  T inv(const T& a) const {
    if (!inv_) throw std::logic_error("structure has no additive inverse");
    return inv_(a);
  }
  T mul(const T& a, const T& b) const {
    if (!mul_) throw std::logic_error("structure has no multiplicative operator");
    return mul_(a, b);
  }

  bool equal(const T& a, const T& b) const { return equal_ ? equal_(a, b) : bytes_equal(a, b); }
  bool is_add_id(const T& x) const { return add_id_ && equal(x, *add_id_); }

  /// Zero element used for fills: the additive identity if any, else T{}.
  T zero() const { return add_id_ ? *add_id_ : T{}; }

  bool has_abs() const { return static_cast<bool>(abs_); }
  double abs(const T& x) const {
    if (!abs_) throw std::logic_error("structure has no absolute-value map");
    return abs_(x);
  }

  Structure with_abs(AbsMap f) const {
    Structure s = *this;
    s.abs_ = std::move(f);
    return s;
  }
  /// Replaces element equality (used for the implicit-zero test and axiom checks).
  Structure with_equality(EqualFn f) const {
    Structure s = *this;
    s.equal_ = std::move(f);
    return s;
  }
  Structure with_kernel(KernelTag tag) const {
    Structure s = *this;
    s.kernel_ = tag;
    return s;
  }
  KernelTag kernel() const { return kernel_; }

 private:
  explicit Structure(StructureKind k) : kind_(k) {}

  template <class F>
  static F require(F f, const char* what) {
    if (!f) throw std::invalid_argument(std::string("missing ") + what);
    return f;
  }

  StructureKind kind_;
  std::optional<T> add_id_;
  BinaryOp add_;
  UnaryOp inv_;
  std::optional<T> mul_id_;
  BinaryOp mul_;
  AbsMap abs_;
  EqualFn equal_;
  KernelTag kernel_ = KernelTag::generic;
};

// ---------------------------------------------------------------------------
// Built-in structures

template <class T = double>
Structure<T> standard_ring() {
  static_assert(std::is_arithmetic_v<T>);
  auto s = Structure<T>::ring(
      T(0), [](const T& a, const T& b) { return T(a + b); }, [](const T& a) { return T(-a); },
      T(1), [](const T& a, const T& b) { return T(a * b); });
  s = s.with_abs([](const T& x) { return std::abs(static_cast<double>(x)); });
  if constexpr (std::is_same_v<T, double>) s = s.with_kernel(KernelTag::real_ring);
  return s;
}

/// Min-plus semiring on integers. The additive identity is half the largest
/// representable value so that adding two identities cannot overflow.
/// Products involving the identity saturate to it, which keeps the identity
/// annihilating under multiplication.
template <class T = std::int32_t>
Structure<T> tropical_semiring(T max_int = std::numeric_limits<T>::max()) {
  static_assert(std::is_integral_v<T>);
  const T inf = max_int / 2;
  auto s = Structure<T>::semiring(
      inf, [](const T& a, const T& b) { return a < b ? a : b; }, T(0),
      [inf](const T& a, const T& b) { return (a == inf || b == inf) ? inf : T(a + b); });
  s = s.with_abs([inf](const T& x) { return x == inf ? 0.0 : static_cast<double>(x); });
  if constexpr (std::is_same_v<T, std::int32_t>) {
    if (max_int == std::numeric_limits<T>::max()) s = s.with_kernel(KernelTag::tropical_i32);
  }
  return s;
}

/// Path weight plus hop count; used by the hop-aware shortest path semiring.
struct PathElement {
  std::int32_t w = 0;
  std::int32_t h = 0;
  friend bool operator==(const PathElement&, const PathElement&) = default;
};

inline constexpr std::int32_t kPathInfinity = std::numeric_limits<std::int32_t>::max() / 2;

/// Min-plus on weights; the hop count travels with the winner of the min.
/// On equal weights the second operand wins. Elements are compared by weight
/// only, since hop counts merely annotate which path achieved a distance.
inline Structure<PathElement> path_semiring() {
  auto s = Structure<PathElement>::semiring(
      PathElement{kPathInfinity, 0},
      [](const PathElement& a, const PathElement& b) { return a.w < b.w ? a : b; },
      PathElement{0, 0},
      [](const PathElement& a, const PathElement& b) {
        if (a.w == kPathInfinity || b.w == kPathInfinity) return PathElement{kPathInfinity, 0};
        return PathElement{a.w + b.w, a.h + b.h};
      });
  return s.with_equality([](const PathElement& a, const PathElement& b) { return a.w == b.w; });
}

// ---------------------------------------------------------------------------
// Axiom validation

struct AxiomResult {
  std::string name;
  bool checked = false;
  bool passed = true;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double max_violation = 0.0;  // relative, only meaningful for floating types
};

struct AxiomReport {
  std::vector<AxiomResult> results;

  bool all_passed() const {
    for (const auto& r : results)
      if (r.checked && !r.passed) return false;
    return true;
  }
  const AxiomResult& operator[](std::string_view name) const {
    for (const auto& r : results)
      if (r.name == name) return r;
    throw std::out_of_range("no axiom named " + std::string(name));
  }
};

namespace detail {

template <class T>
struct AxiomAccumulator {
  const Structure<T>& s;
  double tol;
  AxiomResult r;

  // `scale` is the magnitude of the terms that were combined, so that
  // cancellation does not inflate the relative violation.
  void check(const T& lhs, const T& rhs, double scale) {
    r.checked = true;
    ++r.cases;
    if constexpr (std::is_floating_point_v<T>) {
      const double diff = std::abs(static_cast<double>(lhs) - static_cast<double>(rhs));
      const double denom = std::max({scale, std::abs(double(lhs)), std::abs(double(rhs))});
      const double v = denom > 0 ? diff / denom : diff;
      if (v > r.max_violation) r.max_violation = v;
      if (v > tol) {
        ++r.failures;
        r.passed = false;
      }
    } else {
      (void)scale;
      if (!s.equal(lhs, rhs)) {
        ++r.failures;
        r.passed = false;
        r.max_violation = 1.0;
      }
    }
  }
};

template <class T>
double mag(const T& x) {
  if constexpr (std::is_arithmetic_v<T>) return std::abs(static_cast<double>(x));
  else return 0.0;
}

}  // namespace detail

/// Checks the structure's axioms exhaustively over all triples drawn from
/// `samples`. Floating types report the largest relative violation and pass
/// when it is within `rel_tol`; other types must satisfy the laws exactly.
template <class T>
AxiomReport check_axioms(const Structure<T>& s, std::span<const T> samples, double rel_tol = 1e-12) {
  if (samples.empty()) throw std::invalid_argument("check_axioms needs at least one sample");
  using Acc = detail::AxiomAccumulator<T>;
  using detail::mag;
  auto make = [&](const char* name) { return Acc{s, rel_tol, AxiomResult{name}}; };
  Acc assoc = make("add_associativity"), comm = make("add_commutativity"),
      ident = make("add_identity"), inverse = make("add_inverse"),
      mul_ident = make("mul_identity"), distrib = make("distributivity"),
      annihil = make("annihilation");

  if (s.has_add()) {
    const T& zero = s.add_id();
    for (const T& a : samples) {
      ident.check(s.add(zero, a), a, mag(a));
      ident.check(s.add(a, zero), a, mag(a));
      if (s.has_inverse()) inverse.check(s.add(a, s.inv(a)), zero, mag(a));
      if (s.has_mul()) {
        mul_ident.check(s.mul(s.mul_id(), a), a, mag(a));
        mul_ident.check(s.mul(a, s.mul_id()), a, mag(a));
        annihil.check(s.mul(zero, a), zero, mag(a));
        annihil.check(s.mul(a, zero), zero, mag(a));
      }
      for (const T& b : samples) {
        comm.check(s.add(a, b), s.add(b, a), mag(a) + mag(b));
        for (const T& c : samples) {
          assoc.check(s.add(s.add(a, b), c), s.add(a, s.add(b, c)), mag(a) + mag(b) + mag(c));
          if (s.has_mul()) {
            const double sc = mag(a) * (mag(b) + mag(c));
            distrib.check(s.mul(a, s.add(b, c)), s.add(s.mul(a, b), s.mul(a, c)), sc);
            distrib.check(s.mul(s.add(b, c), a), s.add(s.mul(b, a), s.mul(c, a)), sc);
          }
        }
      }
    }
  }
  AxiomReport rep;
  for (Acc* acc : {&assoc, &comm, &ident, &inverse, &mul_ident, &distrib, &annihil})
    rep.results.push_back(acc->r);
  return rep;
}

template <class T>
AxiomReport check_axioms(const Structure<T>& s, const std::vector<T>& samples, double rel_tol = 1e-12) {
  return check_axioms(s, std::span<const T>(samples), rel_tol);
}

// ---------------------------------------------------------------------------
// User-defined elementwise functions and transforms

/// Elementwise function `(Out) <- (In...)` with one or two operands. Partial
/// results are combined with the output tensor's additive operator.
template <class Out, class... In>
class Function {
  static_assert(sizeof...(In) == 1 || sizeof...(In) == 2, "functions take one or two operands");

 public:
  using Body = std::function<Out(const In&...)>;
  static constexpr int arity = sizeof...(In);

  explicit Function(Body body, bool distributive = true) : body_(std::move(body)) {
    if (!body_) throw std::invalid_argument("empty function body");
    if (!distributive)
      throw std::invalid_argument("non-distributive functions are not supported");
  }

  Out operator()(const In&... x) const { return body_(x...); }
  const Body& body() const { return body_; }

 private:
  Body body_;
};

namespace detail {
template <class... Ts>
struct transform_signature;
template <class A>
struct transform_signature<A> {
  using type = void(A&);
};
template <class A, class B>
struct transform_signature<A, B> {
  using type = void(const A&, B&);
};
template <class A, class B, class C>
struct transform_signature<A, B, C> {
  using type = void(const A&, const B&, C&);
};
}  // namespace detail

/// Elementwise transform; the last operand is modified in place and the
/// others are read-only.
template <class... Ts>
class Transform {
  static_assert(sizeof...(Ts) >= 1 && sizeof...(Ts) <= 3, "transforms take one to three operands");

 public:
  using Body = std::function<typename detail::transform_signature<Ts...>::type>;
  static constexpr int arity = sizeof...(Ts);

  explicit Transform(Body body) : body_(std::move(body)) {
    if (!body_) throw std::invalid_argument("empty transform body");
  }
  const Body& body() const { return body_; }

 private:
  Body body_;
};

}  // namespace sta
