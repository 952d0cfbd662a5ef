#include "qbp/qgem.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qbp {

namespace {

// Kuhn augmenting-path matching on the eligible-cell grid graph,
// bipartitioned by checkerboard color.
struct CellMatcher {
  int lx, ly;
  std::vector<char> eligible;  // by cell index y*lx + x
  std::vector<int> match;      // cell -> matched cell or -1

  CellMatcher(int lx_, int ly_) : lx(lx_), ly(ly_), eligible(lx * ly, 0), match(lx * ly, -1) {}

  std::vector<int> neighbors(int cell) const {
    int x = cell % lx, y = cell / lx;
    std::vector<std::pair<int, int>> ranked;  // (penalty, cell)
    const int dx[] = {0, -1, 1, 0}, dy[] = {-1, 0, 0, 1};
    for (int d = 0; d < 4; ++d) {
      int nx = x + dx[d], ny = y + dy[d];
      if (nx < 0 || nx >= lx || ny < 0 || ny >= ly || !eligible[ny * lx + nx]) continue;
      // a b-pair that coincides with an a- or c-domino creates a 4-cycle;
      // explore the conflict-free edges first to keep those rare
      bool conflict = (dx[d] == 0) ? (std::min(y, ny) % 2 == 0) : (std::min(x, nx) % 2 == 0);
      ranked.emplace_back(conflict ? 1 : 0, ny * lx + nx);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](auto& a, auto& b) { return a.first < b.first; });
    std::vector<int> out;
    for (auto& [p, c] : ranked) out.push_back(c);
    return out;
  }

  bool augment(int u, std::vector<char>& visited) {
    for (int v : neighbors(u)) {
      if (visited[v]) continue;
      visited[v] = 1;
      if (match[v] == -1 || augment(match[v], visited)) {
        match[u] = v;
        match[v] = u;
        return true;
      }
    }
    return false;
  }

  bool run() {
    for (int c = 0; c < lx * ly; ++c) {
      int x = c % lx, y = c / lx;
      if (!eligible[c] || (x + y) % 2 != 0 || match[c] != -1) continue;
      std::vector<char> visited(lx * ly, 0);
      if (!augment(c, visited)) return false;
    }
    for (int c = 0; c < lx * ly; ++c)
      if (eligible[c] && match[c] == -1) return false;
    return true;
  }
};

struct SlotWires {
  std::vector<int> a, b, c, e;
};

SlotWires cell_wires(const ChimeraGraph& g, int x, int y, SchemaType t, bool a_at_b_slot) {
  CellSlots s = schema_slots(t);
  SlotWires w;
  if (a_at_b_slot) {
    // odd-height bottom row: a takes the vertical b wire so it can chain
    // upward into the neighbor's b slot; b shifts onto the a wire.
    w.a = {g.qubit(x, y, s.b_left)};
    w.b = {g.qubit(x, y, s.a_left), g.qubit(x, y, s.b_right)};
  } else {
    w.a = {g.qubit(x, y, s.a_left)};
    w.b = {g.qubit(x, y, s.b_left), g.qubit(x, y, s.b_right)};
  }
  w.c = {g.qubit(x, y, s.c_right)};
  w.e = {g.qubit(x, y, s.e_left), g.qubit(x, y, s.e_right)};
  return w;
}

// Level-II role chains over the idle (k1/k6) qubits of a 3x3 block.
// A runs down column 0, E down column 1, B across row 0, C across row 2;
// the extra intra-cell hops give every role pair a shared coupler and
// reach the host cells at relative (0,1), (2,0) and (2,1).
std::vector<int> role_qubits(const ChimeraGraph& g, int x0, int y0, int role) {
  std::vector<int> q;
  switch (role) {
    case 0:  // A
      for (int r = 0; r < 3; ++r) q.push_back(g.qubit(x0, y0 + r, 1));
      q.push_back(g.qubit(x0, y0 + 1, 6));
      break;
    case 1:  // B
      for (int c = 0; c < 3; ++c) q.push_back(g.qubit(x0 + c, y0, 6));
      q.push_back(g.qubit(x0 + 2, y0, 1));
      break;
    case 2:  // C
      for (int c = 0; c < 3; ++c) q.push_back(g.qubit(x0 + c, y0 + 2, 6));
      q.push_back(g.qubit(x0 + 2, y0 + 2, 1));
      q.push_back(g.qubit(x0 + 2, y0 + 1, 1));
      break;
    default:  // E (ancilla)
      for (int r = 0; r < 3; ++r) q.push_back(g.qubit(x0 + 1, y0 + r, 1));
      q.push_back(g.qubit(x0 + 1, y0 + 1, 6));
      break;
  }
  return q;
}

constexpr std::pair<int, int> kHostRel[3] = {{0, 1}, {2, 0}, {2, 1}};  // (dx, dy) for A, B, C

}  // namespace

int qgem_block_length(int lx, int ly, int ensembles) {
  return (3 * lx * ly + 3 * ensembles) / 2;
}

QgemCode build_qgem_code(int lx, int ly, int ensembles) {
  if (lx < 2 || lx % 2 != 0) throw std::invalid_argument("lx must be even and >= 2");
  if (ly < 2) throw std::invalid_argument("ly must be >= 2");
  if (ensembles < 0) throw std::invalid_argument("negative ensemble count");
  const bool odd = ly % 2 != 0;
  if (odd && (ly < 3 || ensembles != 0))
    throw std::invalid_argument("odd ly requires ly >= 3 and no ensembles");
  if (!odd && ensembles % 2 != 0)
    throw std::invalid_argument("ensemble count must be even");

  const int m1 = lx * ly;
  QgemLayout layout;
  layout.lx = lx;
  layout.ly = ly;
  layout.ensembles = ensembles;
  layout.level1.resize(m1);
  for (int y = 0; y < ly; ++y)
    for (int x = 0; x < lx; ++x) {
      auto& c = layout.level1[y * lx + x];
      c.x = x;
      c.y = y;
      c.a_at_b_slot = odd && y == ly - 1;
    }

  // pick block origins, balancing host colors across the checkerboard
  if (ensembles > 0) {
    std::vector<std::pair<int, int>> par[2];
    for (int by = 0; by + 3 <= ly; by += 3)
      for (int bx = 0; bx + 3 <= lx; bx += 3) par[(bx + by) % 2].emplace_back(bx, by);
    if (ensembles / 2 > static_cast<int>(std::min(par[0].size(), par[1].size())))
      throw std::invalid_argument("ensemble count exceeds balanced block capacity");
    std::vector<std::pair<int, int>> blocks;
    for (int p = 0; p < 2; ++p)
      blocks.insert(blocks.end(), par[p].begin(), par[p].begin() + ensembles / 2);
    std::sort(blocks.begin(), blocks.end(),
              [](auto& a, auto& b) { return std::tie(a.second, a.first) < std::tie(b.second, b.first); });
    layout.level2.resize(ensembles);
    for (int t = 0; t < ensembles; ++t) {
      layout.level2[t].x0 = blocks[t].first;
      layout.level2[t].y0 = blocks[t].second;
    }
  }

  std::vector<std::pair<int, int>> entries;  // (check, bit)
  int next_bit = 0;
  auto place = [&](int cell, int& slot_field, int bit) {
    slot_field = bit;
    entries.emplace_back(cell, bit);
  };

  // vertical a-dominoes (rows paired top-down); odd ly leaves the last
  // row to pair its a wire with the row above's b slot
  const int a_rows = odd ? ly - 1 : ly;  // rows covered by full dominoes
  for (int y = 0; y + 1 < a_rows; y += 2)
    for (int x = 0; x < lx; ++x) {
      int bit = next_bit++;
      place(y * lx + x, layout.level1[y * lx + x].bit_a, bit);
      place((y + 1) * lx + x, layout.level1[(y + 1) * lx + x].bit_a, bit);
    }
  if (odd)
    for (int x = 0; x < lx; ++x) {
      int bit = next_bit++;
      place((ly - 1) * lx + x, layout.level1[(ly - 1) * lx + x].bit_a, bit);
      place((ly - 2) * lx + x, layout.level1[(ly - 2) * lx + x].bit_b, bit);
    }

  // horizontal c-dominoes
  for (int x = 0; x + 1 < lx; x += 2)
    for (int y = 0; y < ly; ++y) {
      int bit = next_bit++;
      place(y * lx + x, layout.level1[y * lx + x].bit_c, bit);
      place(y * lx + x + 1, layout.level1[y * lx + x + 1].bit_c, bit);
    }

  // b-matching over the cells whose b slot is still free
  CellMatcher matcher(lx, ly);
  for (int c = 0; c < m1; ++c) matcher.eligible[c] = 1;
  if (odd)
    for (int x = 0; x < lx; ++x) matcher.eligible[(ly - 2) * lx + x] = 0;
  for (const auto& blk : layout.level2)
    for (const auto& [dx, dy] : kHostRel)
      matcher.eligible[(blk.y0 + dy) * lx + (blk.x0 + dx)] = 0;
  if (!matcher.run())
    throw std::runtime_error("qgem construction: no perfect b-matching for these parameters");
  std::vector<std::pair<int, int>> pairs;
  for (int c = 0; c < m1; ++c)
    if (matcher.eligible[c] && matcher.match[c] > c) pairs.emplace_back(c, matcher.match[c]);
  std::sort(pairs.begin(), pairs.end());
  for (auto [u, v] : pairs) {
    int bit = next_bit++;
    place(u, layout.level1[u].bit_b, bit);
    place(v, layout.level1[v].bit_b, bit);
  }

  // Level-II bits: one per role, shared with the host cell's b slot
  for (int t = 0; t < ensembles; ++t) {
    auto& blk = layout.level2[t];
    int* roles[3] = {&blk.bit_a, &blk.bit_b, &blk.bit_c};
    for (int r = 0; r < 3; ++r) {
      int bit = next_bit++;
      *roles[r] = bit;
      entries.emplace_back(m1 + t, bit);
      int host = (blk.y0 + kHostRel[r].second) * lx + (blk.x0 + kHostRel[r].first);
      place(host, layout.level1[host].bit_b, bit);
    }
  }

  QgemCode code;
  code.H = ParityCheckMatrix::from_entries(m1 + ensembles, next_bit, entries);
  code.layout = std::move(layout);
  if (code.H.cols != qgem_block_length(lx, ly, ensembles))
    throw std::logic_error("qgem construction: block length mismatch");
  return code;
}

namespace {

std::optional<QgemLayout> recover_structured(const ParityCheckMatrix& H, const ChimeraGraph& g) {
  if (H.rows < 4 || !H.is_regular(2, 3) || 2 * H.cols != 3 * H.rows) return std::nullopt;
  for (int ly = 2; ly <= g.L; ++ly)
    for (int lx = 2; lx <= g.L; lx += 2) {
      int e = H.rows - lx * ly;
      if (e < 0) continue;
      try {
        QgemCode cand = build_qgem_code(lx, ly, e);
        if (cand.H == H) {
          bool clean = true;
          for (int y = 0; y < ly && clean; ++y)
            for (int x = 0; x < lx && clean; ++x)
              if (!g.cell_defect_free(x, y)) clean = false;
          if (!clean) continue;
          cand.layout.grid = g.L;
          return cand.layout;
        }
      } catch (const std::exception&) {
        // not a valid parameter combination; keep scanning
      }
    }
  return std::nullopt;
}

PlacementResult greedy_place(const ParityCheckMatrix& H, const ChimeraGraph& g) {
  PlacementResult res;
  res.layout.lx = g.L;
  res.layout.ly = g.L;
  res.layout.grid = g.L;
  res.layout.level1.resize(H.rows);

  for (int b = 0; b < H.cols; ++b)
    if (H.col_checks[b].size() > 2) {
      res.diagnostic = "bit " + std::to_string(b) + " has degree > 2; no wire pairing exists";
      for (int m = 0; m < H.rows; ++m) res.unplaced_checks.push_back(m);
      return res;
    }

  std::map<std::pair<int, int>, int> cell_of;  // occupied cells -> check
  std::vector<char> placed(H.rows, 0);
  // slot of each bit within its placed check(s): 0=a, 1=b, 2=c
  std::map<std::pair<int, int>, int> slot_of;  // (check, bit) -> slot

  auto slots_at = [&](int m) { return &res.layout.level1[m]; };

  for (int m = 0; m < H.rows; ++m) {
    const auto& bits = H.row_bits[m];
    if (bits.size() > 3) {
      res.unplaced_checks.push_back(m);
      res.diagnostic = "check " + std::to_string(m) + " has degree > 3";
      continue;
    }

    // constraints from already-placed partners
    struct Need {
      int bit;
      int slot;                                 // forced slot, or -1
      std::vector<std::pair<int, int>> cells;   // allowed cells, empty = anywhere
    };
    std::vector<Need> needs;
    bool infeasible = false;
    for (int b : bits) {
      Need nd{b, -1, {}};
      for (int m2 : H.col_checks[b]) {
        if (m2 == m || !placed[m2]) continue;
        int ps = slot_of.at({m2, b});
        auto* l2 = slots_at(m2);
        int px = l2->x, py = l2->y;
        std::vector<std::pair<int, int>> allowed;
        if (ps == 0) {  // a: vertical wire
          allowed = {{px, py - 1}, {px, py + 1}};
          nd.slot = 0;
        } else if (ps == 2) {  // c: horizontal wire
          allowed = {{px - 1, py}, {px + 1, py}};
          nd.slot = 2;
        } else {  // b: either direction
          allowed = {{px, py - 1}, {px, py + 1}, {px - 1, py}, {px + 1, py}};
          nd.slot = 1;
        }
        if (nd.cells.empty()) {
          nd.cells = allowed;
        } else {
          infeasible = true;  // a bit can only pair two checks
        }
      }
      needs.push_back(std::move(nd));
    }

    std::vector<std::pair<int, int>> candidates;
    if (!infeasible) {
      bool constrained = false;
      for (const auto& nd : needs)
        if (!nd.cells.empty()) {
          if (!constrained) {
            candidates = nd.cells;
            constrained = true;
          } else {
            std::vector<std::pair<int, int>> merged;
            for (auto& c : candidates)
              if (std::find(nd.cells.begin(), nd.cells.end(), c) != nd.cells.end())
                merged.push_back(c);
            candidates = std::move(merged);
          }
        }
      if (!constrained)
        for (int y = 0; y < g.L; ++y)
          for (int x = 0; x < g.L; ++x) candidates.emplace_back(x, y);
    }

    bool done = false;
    for (auto [x, y] : candidates) {
      if (x < 0 || x >= g.L || y < 0 || y >= g.L) continue;
      if (cell_of.count({x, y}) || !g.cell_defect_free(x, y)) continue;
      // assign forced slots first, then fill the rest a, c, b
      int taken = 0;  // bitmask over slots
      std::vector<int> assign(bits.size(), -1);
      bool ok = true;
      for (size_t i = 0; i < needs.size(); ++i)
        if (needs[i].slot >= 0) {
          if (taken & (1 << needs[i].slot)) {
            ok = false;
            break;
          }
          taken |= 1 << needs[i].slot;
          assign[i] = needs[i].slot;
        }
      if (ok)
        for (size_t i = 0; i < needs.size(); ++i)
          if (assign[i] < 0) {
            for (int s : {0, 2, 1})
              if (!(taken & (1 << s))) {
                taken |= 1 << s;
                assign[i] = s;
                break;
              }
            if (assign[i] < 0) ok = false;
          }
      if (!ok) continue;
      auto* l1 = slots_at(m);
      l1->x = x;
      l1->y = y;
      for (size_t i = 0; i < bits.size(); ++i) {
        slot_of[{m, bits[i]}] = assign[i];
        (assign[i] == 0 ? l1->bit_a : assign[i] == 1 ? l1->bit_b : l1->bit_c) = bits[i];
      }
      cell_of[{x, y}] = m;
      placed[m] = 1;
      done = true;
      break;
    }
    if (!done) {
      res.unplaced_checks.push_back(m);
      if (res.diagnostic.empty())
        res.diagnostic = "no feasible cell for check " + std::to_string(m) +
                         " (wire directions or occupancy conflict)";
    }
  }

  res.ok = res.unplaced_checks.empty();
  if (res.ok) res.diagnostic.clear();
  return res;
}

}  // namespace

PlacementResult place_checks(const ParityCheckMatrix& H, const ChimeraGraph& g) {
  if (auto structured = recover_structured(H, g)) {
    PlacementResult res;
    res.ok = true;
    res.layout = std::move(*structured);
    return res;
  }
  if (H.rows > g.L * g.L) {
    // only Level-I cells are available to the greedy placer
    PlacementResult res;
    res.diagnostic = "code has " + std::to_string(H.rows) + " checks but the grid holds " +
                     std::to_string(g.L * g.L) + " cells";
    for (int m = 0; m < H.rows; ++m) res.unplaced_checks.push_back(m);
    return res;
  }
  return greedy_place(H, g);
}

std::vector<std::vector<int>> level1_embed(const ChimeraGraph& g, int x, int y, SchemaType t) {
  SlotWires w = cell_wires(g, x, y, t, false);
  return {w.a, w.b, w.c, w.e};
}

EmbedResult embed_with_layout(const QuadraticBinaryProblem& logical, const AncillaPlan& plan,
                              const ParityCheckMatrix& H, const ChimeraGraph& g,
                              const QgemLayout& layout, double jferro) {
  if (jferro <= 0) throw std::invalid_argument("jferro must be positive");
  if (static_cast<int>(plan.checks.size()) != H.rows)
    throw std::invalid_argument("ancilla plan does not match H");
  if (plan.num_bits != H.cols) throw std::invalid_argument("ancilla plan bit count mismatch");

  ChimeraEmbedding emb;
  emb.jferro = jferro;
  emb.chains.resize(logical.num_vars);
  emb.kind.assign(logical.num_vars, ChainKind::Level1);
  emb.level1_checks = static_cast<int>(layout.level1.size());
  emb.level2_checks = static_cast<int>(layout.level2.size());

  auto extend = [&](int var, const std::vector<int>& qubits) {
    if (var < 0) return;
    if (var >= logical.num_vars) throw std::invalid_argument("layout references unknown variable");
    auto& ch = emb.chains[var];
    ch.insert(ch.end(), qubits.begin(), qubits.end());
  };

  for (size_t m = 0; m < layout.level1.size(); ++m) {
    const auto& c = layout.level1[m];
    if (plan.checks[m].count != 1)
      throw std::runtime_error("check " + std::to_string(m) +
                               " needs " + std::to_string(plan.checks[m].count) +
                               " ancillae; the cell schema provides one");
    SlotWires w = cell_wires(g, c.x, c.y, c.schema, c.a_at_b_slot);
    extend(c.bit_a, w.a);
    extend(c.bit_b, w.b);
    extend(c.bit_c, w.c);
    extend(plan.checks[m].first, w.e);
    emb.cell_roles[{c.x, c.y}] = c.schema == SchemaType::A   ? "A"
                                 : c.schema == SchemaType::B ? "B"
                                 : c.schema == SchemaType::C ? "C"
                                                             : "D";
  }
  for (size_t t = 0; t < layout.level2.size(); ++t) {
    const auto& blk = layout.level2[t];
    size_t m = layout.level1.size() + t;
    if (plan.checks[m].count != 1)
      throw std::runtime_error("ensemble check ancilla count must be 1");
    extend(blk.bit_a, role_qubits(g, blk.x0, blk.y0, 0));
    extend(blk.bit_b, role_qubits(g, blk.x0, blk.y0, 1));
    extend(blk.bit_c, role_qubits(g, blk.x0, blk.y0, 2));
    extend(plan.checks[m].first, role_qubits(g, blk.x0, blk.y0, 3));
    for (int v : {blk.bit_a, blk.bit_b, blk.bit_c, plan.checks[m].first})
      emb.kind[v] = ChainKind::Level2;
  }
  for (auto& ch : emb.chains) {
    std::sort(ch.begin(), ch.end());
    ch.erase(std::unique(ch.begin(), ch.end()), ch.end());
  }

  VerifyReport rep = verify_embedding(emb, logical, g);
  if (!rep.pass) {
    std::ostringstream os;
    os << "embedding verification failed:";
    for (const auto& v : rep.violations) os << "\n  " << v;
    throw std::runtime_error(os.str());
  }

  QuadraticBinaryProblem ising =
      logical.convention == Convention::Ising ? logical : qubo_to_ising(logical);

  HardwareProblem hw;
  hw.grid = g.L;
  hw.jferro = jferro;
  hw.logical_offset = ising.offset;
  std::set<int> used;
  for (const auto& ch : emb.chains) used.insert(ch.begin(), ch.end());
  hw.qubit_of_var.assign(used.begin(), used.end());
  for (size_t i = 0; i < hw.qubit_of_var.size(); ++i)
    hw.var_of_qubit[hw.qubit_of_var[i]] = static_cast<int>(i);
  hw.ising.convention = Convention::Ising;
  hw.ising.num_vars = static_cast<int>(hw.qubit_of_var.size());
  hw.ising.linear.assign(hw.ising.num_vars, 0.0);

  for (int v = 0; v < logical.num_vars; ++v) {
    double per = ising.linear[v] / (jferro * static_cast<double>(emb.chains[v].size()));
    for (int q : emb.chains[v]) hw.ising.linear[hw.var_of_qubit.at(q)] += per;
  }
  for (const auto& [key, J] : ising.quadratic) {
    if (std::abs(J) / jferro > 1.0 + 1e-12)
      throw std::runtime_error("logical coupler exceeds |J_F|; raise jferro");
    auto [u, v] = key;
    bool placed = false;
    for (int q : emb.chains[u]) {
      for (int r : emb.chains[v])
        if (g.has_coupler(q, r)) {
          hw.ising.add_quadratic(hw.var_of_qubit.at(q), hw.var_of_qubit.at(r), J / jferro);
          placed = true;
          break;
        }
      if (placed) break;
    }
    if (!placed) throw std::logic_error("verified embedding lost a coupler");
  }
  for (const auto& ch : emb.chains)
    for (size_t i = 0; i < ch.size(); ++i)
      for (size_t j = i + 1; j < ch.size(); ++j)
        if (g.has_coupler(ch[i], ch[j])) {
          hw.ising.add_quadratic(hw.var_of_qubit.at(ch[i]), hw.var_of_qubit.at(ch[j]), -1.0);
          ++hw.chain_edge_count;
        }

  return {std::move(emb), std::move(hw)};
}

EmbedResult embed_code(const QuadraticBinaryProblem& logical, const AncillaPlan& plan,
                       const ParityCheckMatrix& H, const ChimeraGraph& g, double jferro) {
  PlacementResult placement = place_checks(H, g);
  if (!placement.ok) {
    std::ostringstream os;
    os << "placement failed: " << placement.diagnostic << " (" << placement.unplaced_checks.size()
       << " of " << H.rows << " checks unplaced)";
    throw std::runtime_error(os.str());
  }
  return embed_with_layout(logical, plan, H, g, placement.layout, jferro);
}

}  // namespace qbp
