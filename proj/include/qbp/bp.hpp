#pragma once

#include <vector>

#include "qbp/code.hpp"

namespace qbp {

// Min-sum message state over the Tanner edges of a fixed H.
// LLR convention: log(Pr(bit=0)/Pr(bit=1)); BPSK maps 0 -> -1, 1 -> +1.
struct LlrState {
  const ParityCheckMatrix* H = nullptr;
  std::vector<double> prior;          // per bit
  std::vector<double> bit_to_check;   // per edge, row-major over H.row_bits
  std::vector<double> check_to_bit;   // per edge, same layout
  int iteration = 0;

  LlrState(const ParityCheckMatrix& h, std::vector<double> priors);
  // edge index of (check m, position e in N(c_m))
  int edge(int m, int e) const { return edge_base_[m] + e; }

 private:
  std::vector<int> edge_base_;
};

std::vector<double> init_llr(const std::vector<double>& y, double sigma2);

// Z_{c->b} = prod sgn * min |.| over the other incoming messages.
void check_update(LlrState& s);
// Z_{b->c} = prior_b + sum of the other check messages.
void bit_update(LlrState& s);
// Z_b = prior_b + sum of all check messages; bit 0 iff Z_b >= 0.
Bits decide(const LlrState& s);
std::vector<double> posterior_llr(const LlrState& s);

struct BpResult {
  Bits decoded;
  int iterations = 0;
  bool converged = false;
};

BpResult decode(const std::vector<double>& y, const ParityCheckMatrix& H, double sigma2,
                int max_iters);

}  // namespace qbp
