#include "qbp/code.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>

namespace qbp {

ParityCheckMatrix ParityCheckMatrix::from_entries(
    int m, int n, const std::vector<std::pair<int, int>>& entries) {
  if (m <= 0 || n <= 0) throw std::invalid_argument("parity check matrix must be non-empty");
  ParityCheckMatrix H;
  H.rows = m;
  H.cols = n;
  H.row_bits.resize(m);
  H.col_checks.resize(n);
  for (auto [i, j] : entries) {
    if (i < 0 || i >= m || j < 0 || j >= n)
      throw std::invalid_argument("parity check entry out of range");
    H.row_bits[i].push_back(j);
    H.col_checks[j].push_back(i);
  }
  for (auto& r : H.row_bits) {
    std::sort(r.begin(), r.end());
    if (std::adjacent_find(r.begin(), r.end()) != r.end())
      throw std::invalid_argument("duplicate parity check entry");
  }
  for (auto& c : H.col_checks) std::sort(c.begin(), c.end());
  return H;
}

bool ParityCheckMatrix::has_entry(int i, int j) const {
  const auto& r = row_bits[i];
  return std::binary_search(r.begin(), r.end(), j);
}

int ParityCheckMatrix::num_edges() const {
  int e = 0;
  for (const auto& r : row_bits) e += static_cast<int>(r.size());
  return e;
}

bool ParityCheckMatrix::is_regular(int bit_degree, int check_degree) const {
  for (const auto& r : row_bits)
    if (static_cast<int>(r.size()) != check_degree) return false;
  for (const auto& c : col_checks)
    if (static_cast<int>(c.size()) != bit_degree) return false;
  return true;
}

void CodeSpec::validate() const {
  if (n <= 0 || bit_degree <= 0 || check_degree <= 0)
    throw std::invalid_argument("code spec fields must be positive");
  if ((static_cast<long long>(n) * bit_degree) % check_degree != 0)
    throw std::invalid_argument("n * bit_degree must be divisible by check_degree");
  if (num_checks() < bit_degree)
    throw std::invalid_argument("too few checks for the requested bit degree");
}

namespace {

// Distance (in Tanner graph edges) from bit `b` to every check, on the
// partially built graph. Unreached checks get kGirthInfinite.
std::vector<int> check_distances(int b, const std::vector<std::vector<int>>& bit_adj,
                                 const std::vector<std::vector<int>>& check_adj) {
  const int m = static_cast<int>(check_adj.size());
  const int n = static_cast<int>(bit_adj.size());
  std::vector<int> dist_check(m, kGirthInfinite), dist_bit(n, kGirthInfinite);
  dist_bit[b] = 0;
  std::deque<std::pair<int, bool>> q;  // (node, is_check)
  q.emplace_back(b, false);
  while (!q.empty()) {
    auto [v, is_check] = q.front();
    q.pop_front();
    if (is_check) {
      for (int nb : check_adj[v])
        if (dist_bit[nb] == kGirthInfinite) {
          dist_bit[nb] = dist_check[v] + 1;
          q.emplace_back(nb, false);
        }
    } else {
      for (int nc : bit_adj[v])
        if (dist_check[nc] == kGirthInfinite) {
          dist_check[nc] = dist_bit[v] + 1;
          q.emplace_back(nc, true);
        }
    }
  }
  return dist_check;
}

ParityCheckMatrix peg_attempt(const CodeSpec& spec, uint64_t seed, bool& ok) {
  const int n = spec.n, m = spec.num_checks();
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> bit_adj(n), check_adj(m);
  std::vector<int> check_deg(m, 0);
  ok = true;
  for (int b = 0; b < n && ok; ++b) {
    for (int e = 0; e < spec.bit_degree; ++e) {
      auto dist = check_distances(b, bit_adj, check_adj);
      // candidates: not full, not already attached to this bit, at the
      // greatest distance from b; then least loaded; then seeded pick.
      int best_dist = -1, best_deg = spec.check_degree;
      std::vector<int> cand;
      for (int c = 0; c < m; ++c) {
        if (check_deg[c] >= spec.check_degree) continue;
        if (std::find(bit_adj[b].begin(), bit_adj[b].end(), c) != bit_adj[b].end()) continue;
        int d = dist[c];
        if (d > best_dist || (d == best_dist && check_deg[c] < best_deg)) {
          best_dist = d;
          best_deg = check_deg[c];
          cand.clear();
        }
        if (d == best_dist && check_deg[c] == best_deg) cand.push_back(c);
      }
      if (cand.empty()) {
        ok = false;
        break;
      }
      int pick = cand[rng() % cand.size()];
      bit_adj[b].push_back(pick);
      check_adj[pick].push_back(b);
      ++check_deg[pick];
    }
  }
  std::vector<std::pair<int, int>> entries;
  if (ok)
    for (int c = 0; c < m; ++c)
      for (int b : check_adj[c]) entries.emplace_back(c, b);
  return ok ? ParityCheckMatrix::from_entries(m, n, entries) : ParityCheckMatrix{};
}

}  // namespace

ConstructionResult construct_regular_code(const CodeSpec& spec) {
  spec.validate();
  constexpr int kRestartBudget = 40;
  ConstructionResult best;
  best.girth = -1;
  for (int attempt = 0; attempt < kRestartBudget; ++attempt) {
    bool ok = false;
    ParityCheckMatrix H = peg_attempt(spec, spec.seed + 0x9e3779b97f4a7c15ull * attempt, ok);
    if (!ok) continue;
    int g = girth(H);
    if (g > best.girth) {
      best.H = std::move(H);
      best.girth = g;
      best.restarts = attempt;
    }
    if (spec.target_girth == 0 || best.girth >= spec.target_girth) {
      best.girth_target_met = true;
      return best;
    }
  }
  if (best.girth < 0) throw std::runtime_error("regular code construction failed every attempt");
  best.girth_target_met = spec.target_girth == 0 || best.girth >= spec.target_girth;
  return best;
}

int girth(const ParityCheckMatrix& H) {
  // BFS from every bit node; a non-tree edge at depth d closes a cycle of
  // length dist[u] + dist[w] + 1. The minimum over all roots is exact.
  const int n = H.cols, m = H.rows;
  int best = kGirthInfinite;
  std::vector<int> dist(n + m), parent(n + m);
  for (int root = 0; root < n; ++root) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(parent.begin(), parent.end(), -1);
    dist[root] = 0;
    std::deque<int> q{root};  // bits are [0,n), checks are n + c
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      const bool is_bit = v < n;
      const auto& nbrs = is_bit ? H.col_checks[v] : H.row_bits[v - n];
      for (int u : nbrs) {
        int w = is_bit ? n + u : u;
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          parent[w] = v;
          q.push_back(w);
        } else if (w != parent[v] && parent[w] != v) {
          if (dist[v] + dist[w] + 1 < best) best = dist[v] + dist[w] + 1;
        }
      }
    }
  }
  if (best == kGirthInfinite) return kGirthInfinite;
  return best % 2 ? best - 1 : best;  // bipartite: odd estimate rounds down
}

RankDeficientError::RankDeficientError(std::vector<int> rows_)
    : std::runtime_error([&] {
        std::string msg = "parity check matrix is rank deficient; dependent rows:";
        for (int r : rows_) msg += " " + std::to_string(r);
        return msg;
      }()),
      dependent_rows(std::move(rows_)) {}

SystematicForm to_systematic(const ParityCheckMatrix& H) {
  const int m = H.rows, n = H.cols;
  Gf2Matrix A(m, n);
  for (int i = 0; i < m; ++i)
    for (int j : H.row_bits[i]) A.set(i, j, true);

  // Sequential elimination: each row claims a pivot column after the
  // previously found pivots are cleared out of it. Rows that reduce to
  // zero are dependent on earlier ones.
  std::vector<int> pivot_col(m, -1);
  std::vector<int> dependent;
  for (int r = 0; r < m; ++r) {
    for (int r2 = 0; r2 < r; ++r2)
      if (pivot_col[r2] >= 0 && A.get(r, pivot_col[r2])) A.xor_rows(r, r2);
    // prefer the rightmost set column: an input already in [P | I] form
    // then pivots on its identity block and keeps the natural column order
    int pc = -1;
    for (int c = n - 1; c >= 0; --c)
      if (A.get(r, c)) {
        pc = c;
        break;
      }
    if (pc < 0) {
      dependent.push_back(r);
      continue;
    }
    pivot_col[r] = pc;
    for (int r2 = 0; r2 < r; ++r2)
      if (A.get(r2, pc)) A.xor_rows(r2, r);
  }
  if (!dependent.empty()) throw RankDeficientError(std::move(dependent));

  SystematicForm sf;
  sf.k = n - m;
  std::vector<char> is_pivot(n, 0);
  for (int r = 0; r < m; ++r) is_pivot[pivot_col[r]] = 1;
  sf.perm.reserve(n);
  for (int c = 0; c < n; ++c)
    if (!is_pivot[c]) sf.perm.push_back(c);
  for (int r = 0; r < m; ++r) sf.perm.push_back(pivot_col[r]);

  sf.p = Gf2Matrix(m, sf.k);
  for (int r = 0; r < m; ++r)
    for (int j = 0; j < sf.k; ++j) sf.p.set(r, j, A.get(r, sf.perm[j]));
  return sf;
}

RowReduction drop_dependent_rows(const ParityCheckMatrix& H) {
  const int m = H.rows, n = H.cols;
  Gf2Matrix A(m, n);
  for (int i = 0; i < m; ++i)
    for (int j : H.row_bits[i]) A.set(i, j, true);
  std::vector<int> pivot_col(m, -1);
  RowReduction out;
  for (int r = 0; r < m; ++r) {
    for (int r2 = 0; r2 < r; ++r2)
      if (pivot_col[r2] >= 0 && A.get(r, pivot_col[r2])) A.xor_rows(r, r2);
    for (int c = 0; c < n; ++c)
      if (A.get(r, c)) {
        pivot_col[r] = c;
        break;
      }
    if (pivot_col[r] < 0) out.dropped_rows.push_back(r);
  }
  if (out.dropped_rows.empty()) {
    out.H = H;
    return out;
  }
  if (static_cast<int>(out.dropped_rows.size()) == m)
    throw std::invalid_argument("parity check matrix has rank zero");
  std::vector<std::pair<int, int>> entries;
  int kept = 0;
  for (int i = 0; i < m; ++i) {
    if (pivot_col[i] < 0) continue;
    for (int j : H.row_bits[i]) entries.emplace_back(kept, j);
    ++kept;
  }
  out.H = ParityCheckMatrix::from_entries(kept, n, entries);
  return out;
}

GeneratorMatrix generator(const ParityCheckMatrix& H) {
  SystematicForm sf = to_systematic(H);
  GeneratorMatrix G;
  G.k = sf.k;
  G.n = H.cols;
  G.perm = sf.perm;
  G.g = Gf2Matrix(sf.k, H.cols);
  for (int r = 0; r < sf.k; ++r) {
    G.g.set(r, r, true);
    for (int c = 0; c < H.rows; ++c) G.g.set(r, sf.k + c, sf.p.get(c, r));
  }
  return G;
}

Bits encode(const Bits& u, const GeneratorMatrix& G) {
  if (static_cast<int>(u.size()) != G.k) throw std::invalid_argument("message length != K");
  Bits c(G.n, 0);
  for (int r = 0; r < G.k; ++r)
    if (u[r])
      for (int j = 0; j < G.n; ++j)
        if (G.g.get(r, j)) c[G.perm[j]] ^= 1;
  return c;
}

Bits syndrome(const Bits& x, const ParityCheckMatrix& H) {
  if (static_cast<int>(x.size()) != H.cols) throw std::invalid_argument("word length != N");
  Bits s(H.rows, 0);
  for (int i = 0; i < H.rows; ++i)
    for (int j : H.row_bits[i]) s[i] ^= x[j] & 1;
  return s;
}

std::vector<Bits> all_codewords(const GeneratorMatrix& G) {
  if (G.k > 24) throw std::invalid_argument("codeword enumeration limited to K <= 24");
  std::vector<Bits> out;
  out.reserve(size_t(1) << G.k);
  for (uint32_t msg = 0; msg < (uint32_t(1) << G.k); ++msg) {
    Bits u(G.k);
    for (int i = 0; i < G.k; ++i) u[i] = (msg >> i) & 1;
    out.push_back(encode(u, G));
  }
  return out;
}

}  // namespace qbp
