#include "qbp/chimera.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qbp {

ChimeraGraph::ChimeraGraph(int grid, std::vector<int> defective)
    : L(grid), defects(std::move(defective)) {
  if (L < 1) throw std::invalid_argument("chimera grid must be >= 1");
  std::sort(defects.begin(), defects.end());
  defects.erase(std::unique(defects.begin(), defects.end()), defects.end());
  for (int d : defects)
    if (d < 0 || d >= total_sites()) throw std::invalid_argument("defect id out of range");
}

void ChimeraGraph::locate(int id, int& x, int& y, int& k) const {
  k = id & 7;
  int cell = id >> 3;
  x = cell % L;
  y = cell / L;
}

bool ChimeraGraph::is_defective(int id) const {
  return std::binary_search(defects.begin(), defects.end(), id);
}

bool ChimeraGraph::has_qubit(int id) const {
  return id >= 0 && id < total_sites() && !is_defective(id);
}

bool ChimeraGraph::has_coupler(int a, int b) const {
  if (a == b || !has_qubit(a) || !has_qubit(b)) return false;
  int xa, ya, ka, xb, yb, kb;
  locate(a, xa, ya, ka);
  locate(b, xb, yb, kb);
  if (xa == xb && ya == yb) return (ka < 4) != (kb < 4);  // intra-cell bipartite
  if (ka != kb) return false;
  if (ka < 4) return xa == xb && std::abs(ya - yb) == 1;  // left: vertical
  return ya == yb && std::abs(xa - xb) == 1;              // right: horizontal
}

bool ChimeraGraph::cell_defect_free(int x, int y) const {
  for (int k = 0; k < 8; ++k)
    if (is_defective(qubit(x, y, k))) return false;
  return true;
}

std::vector<std::pair<int, int>> cell_neighbors(int x, int y, int L) {
  std::vector<std::pair<int, int>> out;
  const int dx[] = {0, -1, 1, 0}, dy[] = {-1, 0, 0, 1};
  for (int d = 0; d < 4; ++d) {
    int nx = x + dx[d], ny = y + dy[d];
    if (nx >= 0 && nx < L && ny >= 0 && ny < L) out.emplace_back(nx, ny);
  }
  return out;
}

CellSlots schema_slots(SchemaType t) {
  // Left side holds {a, one b qubit, one e qubit}, right side {c, the
  // other b and e qubits}; the schema name fixes which pair stays idle.
  int il, ir;
  switch (t) {
    case SchemaType::A: il = 1, ir = 6; break;
    case SchemaType::B: il = 1, ir = 5; break;
    case SchemaType::C: il = 2, ir = 6; break;
    default:            il = 2, ir = 5; break;  // D
  }
  CellSlots s;
  s.idle_left = il;
  s.idle_right = ir;
  s.a_left = 0;
  s.b_left = (il == 1) ? 2 : 1;
  s.e_left = 3;
  s.c_right = 7;
  s.b_right = 4;
  s.e_right = (ir == 6) ? 5 : 6;
  return s;
}

int ChimeraEmbedding::qubits_used() const {
  std::set<int> used;
  for (const auto& ch : chains) used.insert(ch.begin(), ch.end());
  return static_cast<int>(used.size());
}

VerifyReport verify_embedding(const ChimeraEmbedding& emb, const QuadraticBinaryProblem& logical,
                              const ChimeraGraph& g) {
  VerifyReport rep;
  auto fail = [&](std::string msg) { rep.violations.push_back(std::move(msg)); };

  if (static_cast<int>(emb.chains.size()) < logical.num_vars)
    fail("embedding covers fewer variables than the problem");

  std::map<int, int> owner;  // qubit -> variable
  for (size_t v = 0; v < emb.chains.size(); ++v) {
    const auto& ch = emb.chains[v];
    bool active = static_cast<int>(v) < logical.num_vars;
    if (ch.empty()) {
      if (active) fail("variable " + std::to_string(v) + " has an empty chain");
      continue;
    }
    for (int q : ch) {
      if (!g.has_qubit(q)) {
        fail("chain " + std::to_string(v) + " uses missing qubit " + std::to_string(q));
        continue;
      }
      auto [it, fresh] = owner.emplace(q, static_cast<int>(v));
      if (!fresh)
        fail("qubit " + std::to_string(q) + " shared by chains " + std::to_string(it->second) +
             " and " + std::to_string(v));
    }
    // connectivity by BFS over couplers restricted to the chain
    std::set<int> members(ch.begin(), ch.end());
    std::set<int> seen{ch[0]};
    std::queue<int> bfs;
    bfs.push(ch[0]);
    while (!bfs.empty()) {
      int q = bfs.front();
      bfs.pop();
      for (int r : members)
        if (!seen.count(r) && g.has_coupler(q, r)) {
          seen.insert(r);
          bfs.push(r);
        }
    }
    if (seen.size() != members.size())
      fail("chain " + std::to_string(v) + " is not connected");
    size_t cap = 4;
    if (v < emb.kind.size() && emb.kind[v] == ChainKind::Level2) cap = 9;
    if (ch.size() < 1 || ch.size() > cap)
      fail("chain " + std::to_string(v) + " length " + std::to_string(ch.size()) +
           " outside [1, " + std::to_string(cap) + "]");
  }

  for (const auto& [key, J] : logical.quadratic) {
    (void)J;
    auto [u, v] = key;
    if (u >= static_cast<int>(emb.chains.size()) || v >= static_cast<int>(emb.chains.size()) ||
        emb.chains[u].empty() || emb.chains[v].empty())
      continue;  // already reported above
    bool found = false;
    for (int q : emb.chains[u]) {
      for (int r : emb.chains[v])
        if (g.has_coupler(q, r)) {
          found = true;
          break;
        }
      if (found) break;
    }
    if (!found)
      fail("no physical coupler for logical pair (" + std::to_string(u) + ", " +
           std::to_string(v) + ")");
  }

  rep.pass = rep.violations.empty();
  return rep;
}

UnembedResult unembed(std::span<const int8_t> physical, const HardwareProblem& hw,
                      const ChimeraEmbedding& emb, const QuadraticBinaryProblem& logical,
                      BrokenChainPolicy) {
  if (physical.size() != hw.qubit_of_var.size())
    throw std::invalid_argument("physical sample size mismatch");
  UnembedResult out;
  out.logical.assign(logical.num_vars, 0);
  for (int v = 0; v < logical.num_vars; ++v) {
    int up = 0, down = 0;
    for (int q : emb.chains[v]) {
      int8_t s = physical[hw.var_of_qubit.at(q)];
      (s > 0 ? up : down)++;
    }
    if (up > 0 && down > 0) ++out.broken_chains;
    int spin;
    if (up != down) {
      spin = up > down ? 1 : -1;
    } else {
      // tie: take the value favored by the variable's own bias; an exactly
      // zero bias falls back to bit 0 (spin -1). In both conventions a
      // negative bias prefers the high value.
      spin = logical.linear[v] < 0 ? 1 : -1;
    }
    out.logical[v] =
        logical.convention == Convention::Ising ? static_cast<int8_t>(spin)
                                                : static_cast<int8_t>((spin + 1) / 2);
  }
  return out;
}

std::vector<int8_t> extend_logical(std::span<const int8_t> logical_values,
                                   const QuadraticBinaryProblem& logical,
                                   const HardwareProblem& hw, const ChimeraEmbedding& emb) {
  if (static_cast<int>(logical_values.size()) != logical.num_vars)
    throw std::invalid_argument("logical assignment size mismatch");
  std::vector<int8_t> phys(hw.qubit_of_var.size(), -1);
  for (int v = 0; v < logical.num_vars; ++v) {
    int8_t val = logical_values[v];
    int8_t spin = logical.convention == Convention::Ising ? val
                                                          : static_cast<int8_t>(val ? 1 : -1);
    for (int q : emb.chains[v]) phys[hw.var_of_qubit.at(q)] = spin;
  }
  return phys;
}

long long capacity(long long n_q) {
  if (n_q < 0) throw std::invalid_argument("negative qubit count");
  return 5 * n_q / 24;
}

std::string embedding_to_json(const ChimeraEmbedding& emb) {
  nlohmann::json j;
  j["jferro"] = emb.jferro;
  j["chains"] = emb.chains;
  std::vector<std::string> kinds;
  for (auto k : emb.kind) kinds.push_back(k == ChainKind::Level2 ? "level2" : "level1");
  j["chain_kind"] = kinds;
  auto roles = nlohmann::json::array();
  for (const auto& [cell, role] : emb.cell_roles)
    roles.push_back({{"x", cell.first}, {"y", cell.second}, {"schema", role}});
  j["cells"] = roles;
  j["level1_checks"] = emb.level1_checks;
  j["level2_checks"] = emb.level2_checks;
  return j.dump(2);
}

std::string hardware_to_json(const HardwareProblem& hw) {
  nlohmann::json j;
  j["topology"] = {{"chimera", hw.grid}};
  j["jferro"] = hw.jferro;
  j["chain_edge_count"] = hw.chain_edge_count;
  j["logical_offset"] = hw.logical_offset;
  j["convention"] = "ising";
  // keyed by physical qubit id so the payload is loadable as a plain
  // problem over the full site range
  j["num_vars"] = 8 * hw.grid * hw.grid;
  auto lin = nlohmann::json::array();
  for (int v = 0; v < hw.ising.num_vars; ++v)
    if (hw.ising.linear[v] != 0.0) lin.push_back({hw.qubit_of_var[v], hw.ising.linear[v]});
  j["linear"] = lin;
  auto quad = nlohmann::json::array();
  for (const auto& [key, J] : hw.ising.quadratic)
    quad.push_back({hw.qubit_of_var[key.first], hw.qubit_of_var[key.second], J});
  j["quadratic"] = quad;
  j["offset"] = hw.ising.offset;
  return j.dump(2);
}

}  // namespace qbp
