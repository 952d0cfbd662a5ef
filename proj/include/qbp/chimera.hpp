#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qbp/qubo.hpp"

namespace qbp {

// L x L grid of 8-qubit unit cells. Within a cell, qubits k < 4 ("left")
// and k >= 4 ("right") form a complete bipartite coupler set. Left qubits
// couple to the same-k qubit of vertically adjacent cells, right qubits to
// the same-k qubit of horizontally adjacent cells. Qubit id = 8(yL + x) + k.
struct ChimeraGraph {
  int L = 16;
  std::vector<int> defects;  // sorted physical ids

  explicit ChimeraGraph(int grid = 16, std::vector<int> defective = {});

  int total_sites() const { return 8 * L * L; }
  int num_qubits() const { return total_sites() - static_cast<int>(defects.size()); }
  int qubit(int x, int y, int k) const { return 8 * (y * L + x) + k; }
  void locate(int id, int& x, int& y, int& k) const;
  bool is_defective(int id) const;
  bool has_qubit(int id) const;
  bool has_coupler(int a, int b) const;
  bool cell_defect_free(int x, int y) const;
};

// Λ(x, y): in-grid cells at Manhattan distance 1.
std::vector<std::pair<int, int>> cell_neighbors(int x, int y, int L);

// Level-I unit cell schemas, named by their idle qubit pair.
enum class SchemaType { A, B, C, D };  // idle (1,6), (1,5), (2,6), (2,5)

struct CellSlots {
  int a_left;      // bit a, singleton
  int b_left, b_right;  // bit b, intra-cell chain
  int c_right;     // bit c, singleton
  int e_left, e_right;  // ancilla chain
  int idle_left, idle_right;
};
CellSlots schema_slots(SchemaType t);

enum class ChainKind { Level1, Level2 };

struct ChimeraEmbedding {
  // logical variable -> sorted physical qubit ids (empty = unused var)
  std::vector<std::vector<int>> chains;
  std::vector<ChainKind> kind;
  double jferro = 8.0;
  std::map<std::pair<int, int>, std::string> cell_roles;  // (x,y) -> schema label
  int level1_checks = 0;
  int level2_checks = 0;

  int qubits_used() const;
};

struct HardwareProblem {
  int grid = 0;
  double jferro = 0.0;
  QuadraticBinaryProblem ising;    // dense variables over used qubits
  std::vector<int> qubit_of_var;   // dense index -> physical id
  std::unordered_map<int, int> var_of_qubit;
  long long chain_edge_count = 0;
  double logical_offset = 0.0;  // offset of the Ising form of the source problem

  // E_hw(physical) = E_logical(chain-uniform) / |J_F| + chain_constant()
  double chain_constant() const {
    return -static_cast<double>(chain_edge_count) - logical_offset / jferro;
  }
};

struct VerifyReport {
  bool pass = false;
  std::vector<std::string> violations;
};

VerifyReport verify_embedding(const ChimeraEmbedding& emb, const QuadraticBinaryProblem& logical,
                              const ChimeraGraph& g);

enum class BrokenChainPolicy { MajorityVote };

struct UnembedResult {
  std::vector<int8_t> logical;  // values in the logical problem's convention
  int broken_chains = 0;
};

// Physical sample is indexed by the hardware problem's dense variables
// (Ising spins). Broken chains resolve by majority vote; even ties go to
// the value preferred by the variable's own linear bias, falling back to
// bit 0.
UnembedResult unembed(std::span<const int8_t> physical, const HardwareProblem& hw,
                      const ChimeraEmbedding& emb, const QuadraticBinaryProblem& logical,
                      BrokenChainPolicy policy = BrokenChainPolicy::MajorityVote);

// Chain-uniform extension of a logical assignment to the physical
// variables (spins).
std::vector<int8_t> extend_logical(std::span<const int8_t> logical_values,
                                   const QuadraticBinaryProblem& logical,
                                   const HardwareProblem& hw, const ChimeraEmbedding& emb);

// Largest decodable block length on N_Q qubits: floor(5 N_Q / 24).
long long capacity(long long n_q);

std::string embedding_to_json(const ChimeraEmbedding& emb);
std::string hardware_to_json(const HardwareProblem& hw);

}  // namespace qbp
