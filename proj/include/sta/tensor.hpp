#pragma once

// Tensors of arbitrary order over an algebraic structure, stored either as a
// dense row-major array or as a sorted list of (linear index, value) pairs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sta/algebra.hpp"
#include "sta/world.hpp"

namespace sta {

/// Relation of dimension i to dimension i+1.
enum class Sym { NS, SY, SH, AS };
enum class Storage { dense, sparse };

template <class T>
struct IndexValuePair {
  std::int64_t index;
  T value;
  friend bool operator==(const IndexValuePair&, const IndexValuePair&) = default;
};

template <class T>
class Tensor;

/// A tensor labelled with one index character per dimension. Repeated
/// characters select a diagonal.
template <class T>
struct IndexedTensor {
  Tensor<T>* tensor;
  std::string indices;
};

/// Advances a row-major multi-index; returns false after the last one.
inline bool next_index(std::vector<std::int64_t>& idx, std::span<const std::int64_t> dims) {
  for (std::size_t d = idx.size(); d-- > 0;) {
    if (++idx[d] < dims[d]) return true;
    idx[d] = 0;
  }
  return false;
}

template <class T>
class Tensor {
 public:
  using value_type = T;
  using Entry = IndexValuePair<T>;
  using Sampler = std::function<T(std::mt19937_64&)>;

  Tensor(std::vector<std::int64_t> dims, Structure<T> structure, Storage storage = Storage::dense,
         std::vector<Sym> sym = {}, const VirtualWorld* world = nullptr)
      : dims_(std::move(dims)),
        sym_(std::move(sym)),
        storage_(storage),
        structure_(std::move(structure)),
        world_(world) {
    if (sym_.empty()) sym_.assign(dims_.size(), Sym::NS);
    validate_shape();
    strides_.assign(dims_.size(), 1);
    for (std::size_t d = dims_.size(); d-- > 1;) strides_[d - 1] = strides_[d] * dims_[d];
    size_ = 1;
    for (auto n : dims_) size_ *= n;
    if (storage_ == Storage::dense) dense_.assign(static_cast<std::size_t>(size_), structure_.zero());
  }

  int order() const { return static_cast<int>(dims_.size()); }
  const std::vector<std::int64_t>& dims() const { return dims_; }
  const std::vector<Sym>& sym() const { return sym_; }
  std::int64_t size() const { return size_; }
  bool is_sparse() const { return storage_ == Storage::sparse; }
  Storage storage() const { return storage_; }
  const Structure<T>& structure() const { return structure_; }
  const VirtualWorld* world() const { return world_; }
  bool is_symmetric() const { return !groups_.empty(); }

  /// Stored element count: entries for sparse tensors, all positions for dense.
  std::int64_t nnz() const { return is_sparse() ? std::int64_t(sparse_.size()) : size_; }

  IndexedTensor<T> operator[](std::string_view indices) {
    if (static_cast<int>(indices.size()) != order())
      throw std::invalid_argument("index string '" + std::string(indices) + "' does not match order " +
                                  std::to_string(order()));
    return IndexedTensor<T>{this, std::string(indices)};
  }

  std::int64_t linearize(std::span<const std::int64_t> idx) const {
    std::int64_t lin = 0;
    for (std::size_t d = 0; d < idx.size(); ++d) lin += idx[d] * strides_[d];
    return lin;
  }
  std::vector<std::int64_t> unravel(std::int64_t lin) const {
    std::vector<std::int64_t> idx(dims_.size());
    unravel_into(lin, idx);
    return idx;
  }
  void unravel_into(std::int64_t lin, std::span<std::int64_t> idx) const {
    for (std::size_t d = 0; d < dims_.size(); ++d) {
      idx[d] = lin / strides_[d];
      lin %= strides_[d];
    }
  }

  struct Canonical {
    std::int64_t linear;
    bool negate;       // antisymmetric image with odd permutation
    bool forced_zero;  // repeated index inside an SH/AS group
  };

  /// Maps an index tuple to the storage owner: each symmetric group is sorted
  /// ascending.
  Canonical canonicalize(std::span<const std::int64_t> idx) const {
    if (groups_.empty()) return {linearize(idx), false, false};
    std::int64_t buf[16];
    std::vector<std::int64_t> heap;
    std::int64_t* c = buf;
    if (idx.size() > 16) {
      heap.assign(idx.begin(), idx.end());
      c = heap.data();
    } else {
      std::copy(idx.begin(), idx.end(), c);
    }
    bool negate = false, zero = false;
    for (const auto& g : groups_) {
      int swaps = 0;
      for (int i = g.first + 1; i <= g.last; ++i)
        for (int j = i; j > g.first && c[j - 1] > c[j]; --j) {
          std::swap(c[j - 1], c[j]);
          ++swaps;
        }
      if (g.tag != Sym::SY)
        for (int i = g.first; i < g.last; ++i)
          if (c[i] == c[i + 1]) zero = true;
      if (g.tag == Sym::AS && (swaps & 1)) negate = !negate;
    }
    return {linearize(std::span<const std::int64_t>(c, idx.size())), negate, zero};
  }

  bool is_canonical(std::span<const std::int64_t> idx) const {
    for (const auto& g : groups_)
      for (int i = g.first; i < g.last; ++i) {
        if (idx[i] > idx[i + 1]) return false;
        if (g.tag != Sym::SY && idx[i] == idx[i + 1]) return false;
      }
    return true;
  }

  /// Logical value at a multi-index, or nullopt when a sparse tensor has no
  /// entry there. Mirrored indices of symmetric tensors resolve to their owner.
  std::optional<T> find(std::span<const std::int64_t> idx) const {
    const Canonical c = canonicalize(idx);
    if (c.forced_zero) {
      if (is_sparse()) return std::nullopt;
      return structure_.zero();
    }
    std::optional<T> v = find_canonical(c.linear);
    if (v && c.negate) v = structure_.inv(*v);
    return v;
  }

  std::optional<T> find_canonical(std::int64_t lin) const {
    if (!is_sparse()) return dense_[static_cast<std::size_t>(lin)];
    auto it = std::lower_bound(sparse_.begin(), sparse_.end(), lin,
                               [](const Entry& e, std::int64_t i) { return e.index < i; });
    if (it == sparse_.end() || it->index != lin) return std::nullopt;
    return it->value;
  }

  /// Value at a multi-index; absent sparse entries read as the additive identity.
  T at(std::span<const std::int64_t> idx) const {
    check_range(idx);
    auto v = find(idx);
    return v ? *v : structure_.add_id();
  }
  T at(std::initializer_list<std::int64_t> idx) const {
    return at(std::span<const std::int64_t>(idx.begin(), idx.size()));
  }

  /// Bulk read by linear global index.
  std::vector<T> read(std::span<const std::int64_t> indices) const {
    std::vector<T> out;
    out.reserve(indices.size());
    std::vector<std::int64_t> idx(dims_.size());
    for (auto lin : indices) {
      if (lin < 0 || lin >= size_) throw std::out_of_range("read index " + std::to_string(lin) + " out of range");
      unravel_into(lin, idx);
      auto v = find(idx);
      out.push_back(v ? *v : structure_.add_id());
    }
    return out;
  }
  std::vector<T> read(std::initializer_list<std::int64_t> indices) const {
    return read(std::span<const std::int64_t>(indices.begin(), indices.size()));
  }
  T read(std::int64_t lin) const { return read({lin}).front(); }

  /// Value of an order-0 tensor.
  T value() const {
    if (order() != 0) throw std::logic_error("value() requires an order-0 tensor");
    return read(0);
  }

  /// Bulk write of index-value pairs. For symmetric tensors only canonical
  /// (ascending within each symmetric group) indices are accepted.
  void write(std::span<const Entry> pairs, bool accumulate = false) {
    std::vector<std::int64_t> idx(dims_.size());
    for (const auto& p : pairs) {
      if (p.index < 0 || p.index >= size_)
        throw std::out_of_range("write index " + std::to_string(p.index) + " out of range");
      if (!groups_.empty()) {
        unravel_into(p.index, idx);
        if (!is_canonical(idx)) {
          const Canonical c = canonicalize(idx);
          if (c.forced_zero) throw std::invalid_argument("write to the forced-zero diagonal of an SH/AS tensor");
          throw std::invalid_argument("write to non-canonical index of a symmetric tensor");
        }
      }
    }
    set_entries(std::vector<Entry>(pairs.begin(), pairs.end()), accumulate);
  }
  void write(std::initializer_list<Entry> pairs, bool accumulate = false) {
    write(std::span<const Entry>(pairs.begin(), pairs.size()), accumulate);
  }

  /// Stores values at canonical linear indices without validation. Sparse
  /// tensors drop entries equal to the additive identity.
  void set_entries(std::vector<Entry> updates, bool accumulate) {
    if (!is_sparse()) {
      for (const auto& u : updates) {
        T& slot = dense_[static_cast<std::size_t>(u.index)];
        slot = accumulate ? structure_.add(slot, u.value) : u.value;
      }
      return;
    }
    std::stable_sort(updates.begin(), updates.end(),
                     [](const Entry& a, const Entry& b) { return a.index < b.index; });
    std::vector<Entry> merged;
    merged.reserve(sparse_.size() + updates.size());
    auto e = sparse_.begin();
    auto u = updates.begin();
    while (e != sparse_.end() || u != updates.end()) {
      if (u == updates.end() || (e != sparse_.end() && e->index < u->index)) {
        merged.push_back(*e++);
        continue;
      }
      const std::int64_t lin = u->index;
      std::optional<T> cur;
      if (e != sparse_.end() && e->index == lin) cur = (e++)->value;
      for (; u != updates.end() && u->index == lin; ++u)
        cur = (accumulate && cur) ? structure_.add(*cur, u->value) : u->value;
      if (!structure_.is_add_id(*cur)) merged.push_back({lin, *cur});
    }
    sparse_ = std::move(merged);
  }

  /// Replaces sparse storage with entries already sorted by index.
  void assign_sorted(std::vector<Entry> entries) {
    if (!is_sparse()) throw std::logic_error("assign_sorted requires sparse storage");
    std::erase_if(entries, [&](const Entry& e) { return structure_.is_add_id(e.value); });
    sparse_ = std::move(entries);
  }

  /// Resets every element to the additive identity (dense) or drops all
  /// entries (sparse).
  void clear() {
    if (is_sparse()) sparse_.clear();
    else std::fill(dense_.begin(), dense_.end(), structure_.zero());
  }

  std::span<const Entry> entries() const { return sparse_; }
  std::span<T> dense_data() { return dense_; }
  std::span<const T> dense_data() const { return dense_; }

  /// Calls fn(linear, value) for each stored canonical element in ascending
  /// index order. Dense tensors visit every canonical position.
  template <class Fn>
  void for_each_stored(Fn&& fn) const {
    if (is_sparse()) {
      for (const auto& e : sparse_) fn(e.index, e.value);
      return;
    }
    if (groups_.empty()) {
      for (std::int64_t i = 0; i < size_; ++i) fn(i, dense_[static_cast<std::size_t>(i)]);
      return;
    }
    std::vector<std::int64_t> idx(dims_.size());
    for (std::int64_t i = 0; i < size_; ++i) {
      unravel_into(i, idx);
      if (is_canonical(idx)) fn(i, dense_[static_cast<std::size_t>(i)]);
    }
  }

  /// Calls fn(multi_index, value) for every logical element: all positions of
  /// a dense tensor, and every symmetric image of each sparse entry.
  template <class Fn>
  void for_each_logical(Fn&& fn) const {
    std::vector<std::int64_t> idx(dims_.size());
    if (!is_sparse()) {
      if (size_ == 0) return;
      do {
        fn(std::span<const std::int64_t>(idx), *find(idx));
      } while (next_index(idx, dims_));
      return;
    }
    for (const auto& e : sparse_) {
      unravel_into(e.index, idx);
      if (groups_.empty()) {
        fn(std::span<const std::int64_t>(idx), e.value);
      } else {
        expand_images(idx, 0, false, e.value, fn);
      }
    }
  }

  /// Keeps exactly the sparse entries for which keep(value) holds.
  void sparsify(const std::function<bool(const T&)>& keep) {
    if (!is_sparse()) throw std::logic_error("sparsify requires a sparse tensor");
    std::erase_if(sparse_, [&](const Entry& e) { return !keep(e.value); });
  }

  /// Each canonical position becomes nonzero independently with probability
  /// `density`, with values drawn from `sampler`. Deterministic given the seed.
  void fill_random(double density, std::uint64_t seed, const Sampler& sampler) {
    if (!(density > 0.0 && density <= 1.0)) throw std::invalid_argument("density must lie in (0, 1]");
    std::mt19937_64 rng(seed);
    clear();
    std::vector<std::int64_t> idx(dims_.size());
    auto canonical_at = [&](std::int64_t lin) {
      if (groups_.empty()) return true;
      unravel_into(lin, idx);
      return is_canonical(idx);
    };
    if (!is_sparse()) {
      std::bernoulli_distribution keep(density);
      for (std::int64_t i = 0; i < size_; ++i) {
        if (!canonical_at(i)) continue;
        if (density < 1.0 && !keep(rng)) continue;
        dense_[static_cast<std::size_t>(i)] = sampler(rng);
      }
      return;
    }
    // Geometric gaps between successes give the same distribution as one
    // Bernoulli trial per position.
    std::geometric_distribution<std::int64_t> gap(density);
    std::vector<Entry> out;
    for (std::int64_t i = density < 1.0 ? gap(rng) : 0; i < size_;) {
      if (canonical_at(i)) {
        T v = sampler(rng);
        if (!structure_.is_add_id(v)) out.push_back({i, v});
      }
      i += 1 + (density < 1.0 ? gap(rng) : 0);
    }
    sparse_ = std::move(out);
  }

  /// Sum of |x| over all logical elements.
  double norm1() const {
    double s = 0.0;
    for_each_logical([&](std::span<const std::int64_t>, const T& v) { s += structure_.abs(v); });
    return s;
  }
  /// Frobenius norm over all logical elements.
  double norm2() const {
    double s = 0.0;
    for_each_logical([&](std::span<const std::int64_t>, const T& v) {
      const double a = structure_.abs(v);
      s += a * a;
    });
    return std::sqrt(s);
  }

 private:
  struct Group {
    int first;
    int last;  // inclusive
    Sym tag;
  };

  void validate_shape() {
    if (sym_.size() != dims_.size()) throw std::invalid_argument("symmetry list length must equal the order");
    for (auto n : dims_)
      if (n <= 0) throw std::invalid_argument("tensor dimensions must be positive");
    if (!sym_.empty() && sym_.back() != Sym::NS)
      throw std::invalid_argument("the last dimension's symmetry must be NS");
    for (std::size_t i = 0; i + 1 < sym_.size(); ++i) {
      if (sym_[i] == Sym::NS) continue;
      if (dims_[i] != dims_[i + 1])
        throw std::invalid_argument("symmetric dimensions " + std::to_string(i) + " and " +
                                    std::to_string(i + 1) + " differ in length");
      if (sym_[i] == Sym::AS && !structure_.has_inverse())
        throw std::invalid_argument("antisymmetry requires an additive inverse");
      if (!groups_.empty() && groups_.back().last == static_cast<int>(i)) {
        if (groups_.back().tag != sym_[i])
          throw std::invalid_argument("mixed symmetry tags within one symmetric group");
        groups_.back().last = static_cast<int>(i) + 1;
      } else {
        groups_.push_back({static_cast<int>(i), static_cast<int>(i) + 1, sym_[i]});
      }
    }
  }

  void check_range(std::span<const std::int64_t> idx) const {
    if (idx.size() != dims_.size()) throw std::out_of_range("index tuple has the wrong length");
    for (std::size_t d = 0; d < idx.size(); ++d)
      if (idx[d] < 0 || idx[d] >= dims_[d]) throw std::out_of_range("index out of range");
  }

  template <class Fn>
  void expand_images(std::vector<std::int64_t>& idx, std::size_t g, bool negate, const T& v, Fn& fn) const {
    if (g == groups_.size()) {
      fn(std::span<const std::int64_t>(idx), negate ? structure_.inv(v) : v);
      return;
    }
    const auto& grp = groups_[g];
    auto first = idx.begin() + grp.first;
    auto last = idx.begin() + grp.last + 1;
    std::vector<std::int64_t> sorted(first, last);
    do {
      std::copy(sorted.begin(), sorted.end(), first);
      bool odd = false;
      if (grp.tag == Sym::AS)
        for (std::size_t a = 0; a < sorted.size(); ++a)
          for (std::size_t b = a + 1; b < sorted.size(); ++b)
            if (sorted[a] > sorted[b]) odd = !odd;
      expand_images(idx, g + 1, negate != odd, v, fn);
    } while (std::next_permutation(sorted.begin(), sorted.end()));
    std::sort(first, last);
  }

  std::vector<std::int64_t> dims_;
  std::vector<std::int64_t> strides_;
  std::vector<Sym> sym_;
  std::vector<Group> groups_;
  std::int64_t size_ = 1;
  Storage storage_;
  Structure<T> structure_;
  const VirtualWorld* world_;
  std::vector<T> dense_;
  std::vector<Entry> sparse_;
};

/// Copy of `t` holding the same logical values in the requested storage.
template <class T>
Tensor<T> with_storage(const Tensor<T>& t, Storage storage) {
  Tensor<T> out(t.dims(), t.structure(), storage, t.sym(), t.world());
  std::vector<IndexValuePair<T>> entries;
  t.for_each_stored([&](std::int64_t i, const T& v) { entries.push_back({i, v}); });
  out.set_entries(std::move(entries), false);
  return out;
}

}  // namespace sta
