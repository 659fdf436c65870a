#include "sta/simgrid.hpp"

#include <sstream>

namespace sta {

void SimReport::resize(int p) {
  for (auto* v : {&nnz, &sent, &received, &a_words, &a_received, &b_words, &c_words}) v->assign(static_cast<std::size_t>(p), 0);
}

void SimReport::finalize() {
  const std::size_t p = nnz.size();
  max_nnz = p ? *std::max_element(nnz.begin(), nnz.end()) : 0;
  const double total_nnz = std::accumulate(nnz.begin(), nnz.end(), 0.0);
  mean_nnz = p ? total_nnz / double(p) : 0.0;
  balance_ratio = mean_nnz > 0 ? double(max_nnz) / mean_nnz : 1.0;
  total_words = std::accumulate(sent.begin(), sent.end(), std::int64_t{0});
  max_words = 0;
  for (std::size_t r = 0; r < sent.size(); ++r) max_words = std::max(max_words, sent[r] + received[r]);
  max_a_words = a_words.empty() ? 0 : *std::max_element(a_words.begin(), a_words.end());
}

void SimReport::merge(const SimReport& other) {
  if (nnz.empty()) {
    const double w = predicted_W;
    *this = other;
    predicted_W += w;
    return;
  }
  if (other.nnz.size() != nnz.size()) throw std::invalid_argument("cannot merge reports of different process counts");
  auto add = [](std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
  };
  add(nnz, other.nnz);
  add(sent, other.sent);
  add(received, other.received);
  add(a_words, other.a_words);
  add(a_received, other.a_received);
  add(b_words, other.b_words);
  add(c_words, other.c_words);
  predicted_W += other.predicted_W;
  finalize();
}

nlohmann::json SimReport::to_json() const {
  return {
      {"grid", sta::to_json(grid)},
      {"nnz", nnz},
      {"sent", sent},
      {"received", received},
      {"a_words", a_words},
      {"a_received", a_received},
      {"b_words", b_words},
      {"c_words", c_words},
      {"max_nnz", max_nnz},
      {"mean_nnz", mean_nnz},
      {"balance_ratio", balance_ratio},
      {"total_words", total_words},
      {"max_words", max_words},
      {"max_a_words", max_a_words},
      {"predicted_W", predicted_W},
  };
}

std::string SimReport::csv_header() {
  return "m,k,n,z,p,p1,p2,p3,predicted_W,max_words,total_words,balance_ratio";
}

std::string SimReport::csv_row(const ProblemShape& s) const {
  std::ostringstream os;
  os << s.m << ',' << s.k << ',' << s.n << ',' << s.z << ',' << s.p << ',' << grid.p1 << ',' << grid.p2 << ','
     << grid.p3 << ',' << predicted_W << ',' << max_words << ',' << total_words << ',' << balance_ratio;
  return os.str();
}

namespace detail {

void check_grid_map(const GridMap& map, std::size_t order) {
  if (map.dim_to_grid.size() != order) throw std::invalid_argument("grid map must name one entry per dimension");
  std::vector<char> used(map.grid_dims.size(), 0);
  for (int g : map.grid_dims)
    if (g < 1) throw std::invalid_argument("grid dimensions must be positive");
  for (int g : map.dim_to_grid) {
    if (g < 0) continue;
    if (g >= static_cast<int>(map.grid_dims.size())) throw std::invalid_argument("grid map names an unknown grid dimension");
    if (used[g]) throw std::invalid_argument("two tensor dimensions map to the same grid dimension");
    used[g] = 1;
  }
}

int owner_rank(const GridMap& map, std::span<const std::int64_t> idx) {
  std::vector<std::int64_t> coord(map.grid_dims.size(), 0);
  for (std::size_t d = 0; d < idx.size(); ++d)
    if (map.dim_to_grid[d] >= 0) coord[map.dim_to_grid[d]] = idx[d] % map.grid_dims[map.dim_to_grid[d]];
  std::int64_t r = 0;
  for (std::size_t g = 0; g < coord.size(); ++g) r = r * map.grid_dims[g] + coord[g];
  return static_cast<int>(r);
}

std::vector<std::int64_t> dense_counts(const GridMap& map, const std::vector<std::int64_t>& dims) {
  int q = 1;
  for (int g : map.grid_dims) q *= g;
  std::int64_t unmapped = 1;
  // Per grid dimension, the number of indices in each residue class.
  std::vector<std::vector<std::int64_t>> per(map.grid_dims.size());
  for (std::size_t g = 0; g < per.size(); ++g) per[g].assign(static_cast<std::size_t>(map.grid_dims[g]), 1);
  for (std::size_t d = 0; d < dims.size(); ++d) {
    const int g = map.dim_to_grid[d];
    if (g < 0) {
      unmapped *= dims[d];
      continue;
    }
    for (int r = 0; r < map.grid_dims[g]; ++r) per[g][r] = r < dims[d] ? (dims[d] - r + map.grid_dims[g] - 1) / map.grid_dims[g] : 0;
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(q), 0);
  for (int rank = 0; rank < q; ++rank) {
    std::int64_t c = unmapped;
    int rem = rank;
    for (std::size_t g = per.size(); g-- > 0;) {
      c *= per[g][rem % map.grid_dims[g]];
      rem /= map.grid_dims[g];
    }
    counts[rank] = c;
  }
  return counts;
}

}  // namespace detail

SimReport balance_report(const Assignment& as) {
  SimReport r;
  r.resize(static_cast<int>(as.counts.size()));
  r.nnz = as.counts;
  if (as.grid_dims.size() == 3) r.grid = {as.grid_dims[0], as.grid_dims[1], as.grid_dims[2]};
  r.finalize();
  return r;
}

std::vector<std::int64_t> PermutationRecord::inverse(std::int64_t length) const {
  const auto& p = perms.at(length);
  std::vector<std::int64_t> inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[static_cast<std::size_t>(p[i])] = static_cast<std::int64_t>(i);
  return inv;
}

namespace {

std::int64_t residue_count(std::int64_t len, std::int64_t q, std::int64_t r) {
  return r < len ? (len - r + q - 1) / q : 0;
}

}  // namespace

SimReport summa_traffic(const CsrPattern& a, std::int64_t n, const Grid& g) {
  const int p1 = g.p1, p2 = g.p2, p3 = g.p3;
  SimReport rep;
  rep.grid = g;
  rep.resize(g.size());

  // Initial owner of A(i,k): layer k mod p1, row class i mod p2, and within
  // the row class the sub-panel (k / p1) mod p3.
  std::vector<std::int64_t> own_a(static_cast<std::size_t>(g.size()), 0);
  for (std::int64_t i = 0; i < a.m; ++i)
    for (std::int64_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e) {
      const std::int64_t k = a.col[e];
      ++own_a[g.rank(int(k % p1), int(i % p2), int((k / p1) % p3))];
    }
  rep.nnz = own_a;

  for (int x = 0; x < p1; ++x)
    for (int y = 0; y < p2; ++y)
      for (int c = 0; c < p3; ++c) {
        const auto r = static_cast<std::size_t>(g.rank(x, y, c));
        // A: ring all-gather of block (x,y) along p3.
        if (p3 > 1) {
          std::int64_t total = 0;
          for (int cc = 0; cc < p3; ++cc) total += own_a[g.rank(x, y, cc)];
          const std::int64_t recv = total - own_a[r];
          const std::int64_t sent = total - own_a[g.rank(x, y, (c + 1) % p3)];
          rep.received[r] += recv;
          rep.sent[r] += sent;
          rep.a_words[r] += recv + sent;
          rep.a_received[r] += recv;
        }
        // B: elements (k,j) with k = x (mod p1), j = c (mod p3); the piece
        // with (k / p1) = b (mod p2) starts on process (x,b,c).
        if (p2 > 1) {
          const std::int64_t cols = residue_count(n, p3, c);
          auto piece = [&](int b) {
            std::int64_t rows = 0;
            for (std::int64_t k = x; k < a.k; k += p1)
              if ((k / p1) % p2 == b) ++rows;
            return rows * cols;
          };
          std::int64_t total = 0;
          for (int b = 0; b < p2; ++b) total += piece(b);
          const std::int64_t recv = total - piece(y);
          const std::int64_t sent = total - piece((y + 1) % p2);
          rep.received[r] += recv;
          rep.sent[r] += sent;
          rep.b_words[r] += recv + sent;
        }
        // C: reduce-scatter of block (y,c) along p1; layer x keeps elements
        // e = x (mod p1) of the block.
        if (p1 > 1) {
          const std::int64_t s = residue_count(a.m, p2, y) * residue_count(n, p3, c);
          const std::int64_t keep = residue_count(s, p1, x);
          rep.received[r] += s - keep;
          rep.sent[r] += s - keep;
          rep.c_words[r] += 2 * (s - keep);
        }
      }
  rep.finalize();
  return rep;
}

}  // namespace sta
