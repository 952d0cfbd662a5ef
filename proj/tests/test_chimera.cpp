#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "qbp/chimera.hpp"
#include "qbp/qgem.hpp"
#include "qbp/rng.hpp"

using namespace qbp;

TEST_CASE("chimera graph structure") {
  ChimeraGraph g(16);
  CHECK(g.total_sites() == 2048);
  CHECK(g.qubit(0, 0, 0) == 0);
  CHECK(g.qubit(3, 2, 5) == 8 * (2 * 16 + 3) + 5);
  int x, y, k;
  g.locate(g.qubit(7, 11, 6), x, y, k);
  CHECK(x == 7);
  CHECK(y == 11);
  CHECK(k == 6);

  // intra-cell: complete bipartite left x right, nothing within a side
  int intra = 0;
  for (int a = 0; a < 8; ++a)
    for (int b = a + 1; b < 8; ++b)
      if (g.has_coupler(g.qubit(2, 2, a), g.qubit(2, 2, b))) {
        ++intra;
        CHECK((a < 4) != (b < 4));
      }
  CHECK(intra == 16);

  // inter-cell: left couples vertically at same k, right horizontally
  CHECK(g.has_coupler(g.qubit(2, 2, 1), g.qubit(2, 3, 1)));
  CHECK_FALSE(g.has_coupler(g.qubit(2, 2, 1), g.qubit(3, 2, 1)));
  CHECK(g.has_coupler(g.qubit(2, 2, 5), g.qubit(3, 2, 5)));
  CHECK_FALSE(g.has_coupler(g.qubit(2, 2, 5), g.qubit(2, 3, 5)));
  CHECK_FALSE(g.has_coupler(g.qubit(2, 2, 1), g.qubit(2, 3, 2)));  // k mismatch
  CHECK_FALSE(g.has_coupler(g.qubit(0, 0, 1), g.qubit(0, 2, 1)));  // not adjacent
}

TEST_CASE("defects remove qubits and cells") {
  ChimeraGraph g(2, {g.qubit(1, 0, 3)});
  CHECK(g.num_qubits() == 31);
  CHECK_FALSE(g.has_qubit(g.qubit(1, 0, 3)));
  CHECK_FALSE(g.has_coupler(g.qubit(1, 0, 3), g.qubit(1, 0, 4)));
  CHECK_FALSE(g.cell_defect_free(1, 0));
  CHECK(g.cell_defect_free(0, 0));
}

TEST_CASE("cell neighbors") {
  auto corner = cell_neighbors(0, 0, 16);
  CHECK(corner.size() == 2);
  CHECK(std::find(corner.begin(), corner.end(), std::pair{1, 0}) != corner.end());
  CHECK(std::find(corner.begin(), corner.end(), std::pair{0, 1}) != corner.end());
  CHECK(cell_neighbors(2, 3, 16).size() == 4);
  CHECK(cell_neighbors(15, 15, 16).size() == 2);
  CHECK(cell_neighbors(0, 7, 16).size() == 3);
}

TEST_CASE("capacity formula") {
  CHECK(capacity(10000) == 2083);
  CHECK(capacity(100000) == 20833);
  CHECK(capacity(1000000) == 208333);
  CHECK(capacity(2048) == 426);
  for (long long n = 1; n < 500; ++n) CHECK(capacity(n + 1) >= capacity(n));
}

TEST_CASE("type A schema matches the reference wiring") {
  auto s = schema_slots(SchemaType::A);
  CHECK(s.a_left == 0);
  CHECK(s.b_left == 2);
  CHECK(s.b_right == 4);
  CHECK(s.c_right == 7);
  CHECK(s.e_left == 3);
  CHECK(s.e_right == 5);
  CHECK(s.idle_left == 1);
  CHECK(s.idle_right == 6);
}

TEST_CASE("every schema uses six qubits and leaves one idle per side") {
  for (auto t : {SchemaType::A, SchemaType::B, SchemaType::C, SchemaType::D}) {
    auto s = schema_slots(t);
    std::set<int> left{s.a_left, s.b_left, s.e_left, s.idle_left};
    std::set<int> right{s.b_right, s.c_right, s.e_right, s.idle_right};
    CHECK(left == std::set<int>{0, 1, 2, 3});
    CHECK(right == std::set<int>{4, 5, 6, 7});
  }
}

TEST_CASE("level1_embed realizes all six couplings under the verifier") {
  ChimeraGraph g(1);
  ParityCheckMatrix H = ParityCheckMatrix::from_entries(1, 3, {{0, 0}, {0, 1}, {0, 2}});
  auto [sat, plan] = build_satisfier(H);
  auto logical = qubo_to_ising(sat);
  for (auto t : {SchemaType::A, SchemaType::B, SchemaType::C, SchemaType::D}) {
    auto chains = level1_embed(g, 0, 0, t);
    REQUIRE(chains.size() == 4);
    ChimeraEmbedding emb;
    emb.chains = chains;
    emb.kind.assign(4, ChainKind::Level1);
    auto rep = verify_embedding(emb, logical, g);
    INFO("schema ", static_cast<int>(t), ": ",
         rep.violations.empty() ? "" : rep.violations.front());
    CHECK(rep.pass);
    int used = 0;
    for (const auto& c : chains) used += static_cast<int>(c.size());
    CHECK(used == 6);
    for (const auto& c : chains) CHECK(c.size() <= 2);
  }
}

TEST_CASE("verifier flags broken embeddings") {
  ChimeraGraph g(2);
  ParityCheckMatrix H = ParityCheckMatrix::from_entries(1, 3, {{0, 0}, {0, 1}, {0, 2}});
  auto [sat, plan] = build_satisfier(H);
  auto logical = qubo_to_ising(sat);
  auto chains = level1_embed(g, 0, 0, SchemaType::A);

  ChimeraEmbedding disconnected;
  disconnected.chains = chains;
  disconnected.kind.assign(4, ChainKind::Level1);
  // stretch chain b to a qubit with no coupler into the rest of the chain
  disconnected.chains[1].push_back(g.qubit(1, 1, 0));
  std::sort(disconnected.chains[1].begin(), disconnected.chains[1].end());
  auto r1 = verify_embedding(disconnected, logical, g);
  CHECK_FALSE(r1.pass);

  ChimeraEmbedding shared;
  shared.chains = chains;
  shared.kind.assign(4, ChainKind::Level1);
  shared.chains[3].push_back(shared.chains[0][0]);  // qubit in two chains
  std::sort(shared.chains[3].begin(), shared.chains[3].end());
  auto r2 = verify_embedding(shared, logical, g);
  CHECK_FALSE(r2.pass);

  ChimeraEmbedding missing;
  missing.chains = chains;
  missing.kind.assign(4, ChainKind::Level1);
  missing.chains[2].clear();  // active variable without a chain
  auto r3 = verify_embedding(missing, logical, g);
  CHECK_FALSE(r3.pass);
}

TEST_CASE("single check places Level-I at the origin") {
  ChimeraGraph g(1);
  ParityCheckMatrix H = ParityCheckMatrix::from_entries(1, 3, {{0, 0}, {0, 1}, {0, 2}});
  auto pr = place_checks(H, g);
  REQUIRE(pr.ok);
  REQUIRE(pr.layout.level1.size() == 1);
  CHECK(pr.layout.level1[0].x == 0);
  CHECK(pr.layout.level1[0].y == 0);
  CHECK(pr.layout.level2.empty());
}

TEST_CASE("420-bit structured code: 256 Level-I + 24 Level-II") {
  auto code = build_qgem_code(16, 16, 24);
  CHECK(code.H.cols == 420);
  CHECK(code.H.rows == 280);
  CHECK(code.H.is_regular(2, 3));
  ChimeraGraph g(16);
  auto pr = place_checks(code.H, g);
  REQUIRE(pr.ok);
  CHECK(pr.layout.level1.size() == 256);
  CHECK(pr.layout.level2.size() == 24);
}

TEST_CASE("more than 256 checks forces a Level-II placement") {
  auto code = build_qgem_code(16, 16, 2);  // 258 checks
  CHECK(code.H.rows == 258);
  ChimeraGraph g(16);
  auto pr = place_checks(code.H, g);
  REQUIRE(pr.ok);
  CHECK(pr.layout.level2.size() >= 1);
}

TEST_CASE("level-II chains stay within their bounds") {
  auto code = build_qgem_code(16, 16, 24);
  ChimeraGraph g(16);
  auto [sat, plan] = build_satisfier(code.H);
  auto res = embed_code(qubo_to_ising(sat), plan, code.H, g);
  const auto& emb = res.embedding;
  CHECK(emb.level1_checks == 256);
  CHECK(emb.level2_checks == 24);
  for (size_t v = 0; v < emb.chains.size(); ++v) {
    if (emb.chains[v].empty()) continue;
    size_t bound = emb.kind[v] == ChainKind::Level1 ? 4 : 9;
    CHECK(emb.chains[v].size() <= bound);
    if (emb.kind[v] == ChainKind::Level2) CHECK(emb.chains[v].size() >= 3);
  }
  CHECK(emb.qubits_used() <= 2048);
}

TEST_CASE("embed_code normalizes couplers to [-1, 1] with chains at -1") {
  auto code = build_qgem_code(4, 3, 0);
  ChimeraGraph g(4);
  auto [sat, plan] = build_satisfier(code.H);
  auto res = embed_code(qubo_to_ising(sat), plan, code.H, g, 8.0);
  double max_abs = 0.0;
  bool saw_minus_one = false;
  for (const auto& [k, J] : res.hardware.ising.quadratic) {
    CHECK(std::abs(J) <= 1.0 + 1e-12);
    max_abs = std::max(max_abs, std::abs(J));
    if (J == -1.0) saw_minus_one = true;
    // every emitted coupler must exist in hardware
    CHECK(g.has_coupler(res.hardware.qubit_of_var[k.first], res.hardware.qubit_of_var[k.second]));
  }
  CHECK(max_abs == doctest::Approx(1.0));
  CHECK(saw_minus_one);
}

TEST_CASE("one-check code on a 1x1 graph uses 6 qubits") {
  ParityCheckMatrix H = ParityCheckMatrix::from_entries(1, 3, {{0, 0}, {0, 1}, {0, 2}});
  ChimeraGraph g(1);
  auto [sat, plan] = build_satisfier(H);
  auto res = embed_code(qubo_to_ising(sat), plan, H, g);
  CHECK(res.embedding.qubits_used() == 6);
}

TEST_CASE("chain-uniform energy identity") {
  auto code = build_qgem_code(6, 5, 0);  // 30 checks
  CHECK(code.H.rows == 30);
  ChimeraGraph g(6);
  auto [sat, plan] = build_satisfier(code.H);
  auto logical = qubo_to_ising(sat);
  auto res = embed_code(logical, plan, code.H, g, 8.0);
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int8_t> s(logical.num_vars);
    for (auto& v : s) v = (rng.next() & 1) ? 1 : -1;
    auto phys = extend_logical(s, logical, res.hardware, res.embedding);
    double lhs = res.hardware.ising.energy(phys);
    double rhs = logical.energy(s) / 8.0 + res.hardware.chain_constant();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("unembed round trips and repairs broken chains") {
  auto code = build_qgem_code(4, 3, 0);
  ChimeraGraph g(4);
  auto [sat, plan] = build_satisfier(code.H);
  auto logical = qubo_to_ising(sat);
  auto res = embed_code(logical, plan, code.H, g);
  Rng rng(31337);
  std::vector<int8_t> s(logical.num_vars);
  for (auto& v : s) v = (rng.next() & 1) ? 1 : -1;
  auto phys = extend_logical(s, logical, res.hardware, res.embedding);
  auto un = unembed(phys, res.hardware, res.embedding, logical);
  CHECK(un.broken_chains == 0);
  CHECK(un.logical == s);

  // break one multi-qubit chain: majority must still win
  int victim = -1;
  for (size_t v = 0; v < res.embedding.chains.size(); ++v)
    if (res.embedding.chains[v].size() == 3) victim = static_cast<int>(v);
  REQUIRE(victim >= 0);
  int q = res.embedding.chains[victim][0];
  auto broken = phys;
  int dense = res.hardware.var_of_qubit.at(q);
  broken[dense] = static_cast<int8_t>(-broken[dense]);
  auto un2 = unembed(broken, res.hardware, res.embedding, logical);
  CHECK(un2.broken_chains == 1);
  CHECK(un2.logical == s);
}

TEST_CASE("even chain ties follow the bias sign") {
  ParityCheckMatrix H = ParityCheckMatrix::from_entries(1, 3, {{0, 0}, {0, 1}, {0, 2}});
  ChimeraGraph g(1);
  auto [sat, plan] = build_satisfier(H);
  auto logical = qubo_to_ising(sat);
  auto res = embed_code(logical, plan, H, g);
  // bit b lives on a length-2 chain; disagree its two qubits
  int two = -1;
  for (size_t v = 0; v < res.embedding.chains.size(); ++v)
    if (res.embedding.chains[v].size() == 2) {
      two = static_cast<int>(v);
      break;
    }
  REQUIRE(two >= 0);
  std::vector<int8_t> s(logical.num_vars, -1);
  auto phys = extend_logical(s, logical, res.hardware, res.embedding);
  int d0 = res.hardware.var_of_qubit.at(res.embedding.chains[two][0]);
  phys[d0] = static_cast<int8_t>(-phys[d0]);
  auto un = unembed(phys, res.hardware, res.embedding, logical);
  CHECK(un.broken_chains == 1);
  int8_t expect = logical.linear[two] < 0 ? 1 : -1;
  CHECK(un.logical[two] == expect);
}

TEST_CASE("placer skips defective cells") {
  ChimeraGraph g(2, {0});  // cell (0,0) carries a defect
  ParityCheckMatrix H = ParityCheckMatrix::from_entries(1, 3, {{0, 0}, {0, 1}, {0, 2}});
  auto pr = place_checks(H, g);
  REQUIRE(pr.ok);
  bool at_origin = pr.layout.level1[0].x == 0 && pr.layout.level1[0].y == 0;
  CHECK_FALSE(at_origin);
}

TEST_CASE("embedding and hardware JSON exports") {
  auto code = build_qgem_code(4, 3, 0);
  ChimeraGraph g(4);
  auto [sat, plan] = build_satisfier(code.H);
  auto res = embed_code(qubo_to_ising(sat), plan, code.H, g);
  auto ej = nlohmann::json::parse(embedding_to_json(res.embedding));
  CHECK(ej.at("jferro").get<double>() == 8.0);
  CHECK(ej.at("chains").size() >= code.H.cols);
  auto hj = nlohmann::json::parse(hardware_to_json(res.hardware));
  CHECK(hj.at("topology").at("chimera").get<int>() == 4);
}
