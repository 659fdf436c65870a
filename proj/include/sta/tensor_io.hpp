#pragma once

// Text formats for sparse tensors of arithmetic elements.
//
// Matrix Market coordinate files (order 2, 1-based on disk). A "symmetric"
// header yields an SY tensor whose entries are stored at i <= j.
//
// Higher orders use a plain format, 0-based:
//   order d1 ... dN nnz
//   i1 ... iN value

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "sta/tensor.hpp"

namespace sta {

template <class T>
Tensor<T> read_matrix_market(std::istream& in, const Structure<T>& s) {
  static_assert(std::is_arithmetic_v<T>);
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw std::runtime_error("missing MatrixMarket banner");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (object != "matrix" || format != "coordinate") throw std::runtime_error("only coordinate matrices are supported");
  if (field == "complex") throw std::runtime_error("complex matrices are not supported");
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") throw std::runtime_error("unsupported symmetry '" + symmetry + "'");
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  std::int64_t rows = 0, cols = 0, nnz = 0;
  std::istringstream size(line);
  if (!(size >> rows >> cols >> nnz)) throw std::runtime_error("bad size line");
  if (symmetric && rows != cols) throw std::runtime_error("symmetric matrix must be square");
  Tensor<T> t({rows, cols}, s, Storage::sparse, symmetric ? std::vector<Sym>{Sym::SY, Sym::NS} : std::vector<Sym>{});
  std::vector<IndexValuePair<T>> e;
  for (std::int64_t n = 0; n < nnz; ++n) {
    std::int64_t i, j;
    T v = T(1);
    if (!(in >> i >> j)) throw std::runtime_error("truncated entry list");
    if (field != "pattern" && !(in >> v)) throw std::runtime_error("missing entry value");
    if (i < 1 || i > rows || j < 1 || j > cols) throw std::runtime_error("entry index out of range");
    --i;
    --j;
    if (symmetric && i > j) std::swap(i, j);
    e.push_back({i * cols + j, v});
  }
  t.write(e, true);
  return t;
}

template <class T>
void write_matrix_market(std::ostream& os, const Tensor<T>& t) {
  static_assert(std::is_arithmetic_v<T>);
  if (t.order() != 2) throw std::invalid_argument("Matrix Market needs an order-2 tensor");
  const bool symmetric = t.sym()[0] == Sym::SY;
  std::vector<std::pair<std::int64_t, T>> entries;
  t.for_each_stored([&](std::int64_t i, const T& v) {
    if (!t.structure().is_add_id(v)) entries.push_back({i, v});
  });
  os << "%%MatrixMarket matrix coordinate " << (std::is_integral_v<T> ? "integer" : "real") << ' '
     << (symmetric ? "symmetric" : "general") << '\n';
  os << t.dims()[0] << ' ' << t.dims()[1] << ' ' << entries.size() << '\n';
  os.precision(17);
  for (const auto& [lin, v] : entries) {
    std::int64_t i = lin / t.dims()[1], j = lin % t.dims()[1];
    if (symmetric) std::swap(i, j);  // stored upper triangle, written as lower
    os << i + 1 << ' ' << j + 1 << ' ' << v << '\n';
  }
}

template <class T>
Tensor<T> read_tensor_text(std::istream& in, const Structure<T>& s) {
  static_assert(std::is_arithmetic_v<T>);
  int order = 0;
  if (!(in >> order) || order < 0) throw std::runtime_error("bad tensor header");
  std::vector<std::int64_t> dims(static_cast<std::size_t>(order));
  for (auto& d : dims)
    if (!(in >> d)) throw std::runtime_error("bad tensor header");
  std::int64_t nnz = 0;
  if (!(in >> nnz)) throw std::runtime_error("bad tensor header");
  Tensor<T> t(dims, s, Storage::sparse);
  std::vector<IndexValuePair<T>> e;
  std::vector<std::int64_t> idx(dims.size());
  for (std::int64_t n = 0; n < nnz; ++n) {
    for (std::size_t d = 0; d < dims.size(); ++d) {
      if (!(in >> idx[d])) throw std::runtime_error("truncated entry list");
      if (idx[d] < 0 || idx[d] >= dims[d]) throw std::runtime_error("entry index out of range");
    }
    T v;
    if (!(in >> v)) throw std::runtime_error("missing entry value");
    e.push_back({t.linearize(idx), v});
  }
  t.write(e, true);
  return t;
}

template <class T>
void write_tensor_text(std::ostream& os, const Tensor<T>& t) {
  std::vector<std::pair<std::int64_t, T>> entries;
  t.for_each_stored([&](std::int64_t i, const T& v) {
    if (!t.structure().is_add_id(v)) entries.push_back({i, v});
  });
  os << t.order();
  for (auto d : t.dims()) os << ' ' << d;
  os << ' ' << entries.size() << '\n';
  os.precision(17);
  for (const auto& [lin, v] : entries) {
    for (auto i : t.unravel(lin)) os << i << ' ';
    os << v << '\n';
  }
}

}  // namespace sta
