#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qbp/gf2.hpp"

namespace qbp {

using Bits = std::vector<uint8_t>;

// Sparse binary parity check matrix together with its Tanner graph
// adjacency (per-row bit lists and per-column check lists).
struct ParityCheckMatrix {
  int rows = 0;  // M, check nodes
  int cols = 0;  // N, bit nodes
  std::vector<std::vector<int>> row_bits;    // N(c_m), sorted, no duplicates
  std::vector<std::vector<int>> col_checks;  // M(b_n), sorted, no duplicates

  static ParityCheckMatrix from_entries(int m, int n,
                                        const std::vector<std::pair<int, int>>& entries);

  bool has_entry(int i, int j) const;
  int num_edges() const;
  bool is_regular(int bit_degree, int check_degree) const;
  bool operator==(const ParityCheckMatrix& o) const {
    return rows == o.rows && cols == o.cols && row_bits == o.row_bits;
  }
};

struct CodeSpec {
  int n = 0;
  int bit_degree = 2;
  int check_degree = 3;
  uint64_t seed = 0;
  int target_girth = 0;  // 0 = unconstrained

  int num_checks() const { return n * bit_degree / check_degree; }
  // Throws std::invalid_argument on an infeasible degree combination.
  void validate() const;
};

struct ConstructionResult {
  ParityCheckMatrix H;
  int girth = 0;
  bool girth_target_met = true;
  int restarts = 0;
};

inline constexpr int kGirthInfinite = std::numeric_limits<int>::max();

// Progressive-edge-growth style greedy construction of a regular code.
// Deterministic for a fixed seed; restarts on derived seeds while the
// target girth is unmet, returning the best attempt found.
ConstructionResult construct_regular_code(const CodeSpec& spec);

// Shortest cycle length in the Tanner graph (always even), or
// kGirthInfinite for forests.
int girth(const ParityCheckMatrix& H);

struct RankDeficientError : std::runtime_error {
  std::vector<int> dependent_rows;
  explicit RankDeficientError(std::vector<int> rows_);
};

// Column-permuted reduced form H_perm = [P | I_{N-K}].
// perm[j] = original column sitting at permuted position j.
struct SystematicForm {
  int k = 0;       // N - M
  Gf2Matrix p;     // (N-K) x K
  std::vector<int> perm;
};

SystematicForm to_systematic(const ParityCheckMatrix& H);

struct GeneratorMatrix {
  int k = 0;
  int n = 0;
  Gf2Matrix g;  // K x N over the permuted column order, [I_K | P^T]
  std::vector<int> perm;

  // Original-column positions holding the message bits.
  std::vector<int> message_positions() const {
    return std::vector<int>(perm.begin(), perm.begin() + k);
  }
};

GeneratorMatrix generator(const ParityCheckMatrix& H);

// Drops GF(2)-dependent rows, reporting which ones went. The codebook is
// unchanged (dropped checks are implied by the kept ones). Any code whose
// bit degrees are all even carries at least the all-rows dependency, so
// encoding a (2,3)-regular code goes through this first.
struct RowReduction {
  ParityCheckMatrix H;
  std::vector<int> dropped_rows;
};
RowReduction drop_dependent_rows(const ParityCheckMatrix& H);

// c = uG mapped back to the original column order; syndrome(c, H) = 0.
Bits encode(const Bits& u, const GeneratorMatrix& G);

Bits syndrome(const Bits& x, const ParityCheckMatrix& H);

// Enumerate all 2^K codewords (K <= 24); test/oracle helper.
std::vector<Bits> all_codewords(const GeneratorMatrix& G);

}  // namespace qbp
