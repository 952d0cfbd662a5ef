#include "qbp/bp.hpp"

#include <cmath>
#include <stdexcept>

namespace qbp {

LlrState::LlrState(const ParityCheckMatrix& h, std::vector<double> priors)
    : H(&h), prior(std::move(priors)) {
  if (static_cast<int>(prior.size()) != h.cols)
    throw std::invalid_argument("prior length != N");
  edge_base_.resize(h.rows + 1, 0);
  for (int m = 0; m < h.rows; ++m)
    edge_base_[m + 1] = edge_base_[m] + static_cast<int>(h.row_bits[m].size());
  bit_to_check.assign(edge_base_[h.rows], 0.0);
  check_to_bit.assign(edge_base_[h.rows], 0.0);
  // Step 1: Z_{b->c} starts at the priors.
  for (int m = 0; m < h.rows; ++m)
    for (size_t e = 0; e < h.row_bits[m].size(); ++e)
      bit_to_check[edge(m, static_cast<int>(e))] = prior[h.row_bits[m][e]];
}

std::vector<double> init_llr(const std::vector<double>& y, double sigma2) {
  if (sigma2 <= 0.0) throw std::invalid_argument("sigma2 must be positive");
  std::vector<double> llr(y.size());
  for (size_t i = 0; i < y.size(); ++i) llr[i] = -2.0 * y[i] / sigma2;
  return llr;
}

void check_update(LlrState& s) {
  const auto& H = *s.H;
  for (int m = 0; m < H.rows; ++m) {
    const int deg = static_cast<int>(H.row_bits[m].size());
    // sign product and two smallest magnitudes over the incoming messages
    double min1 = HUGE_VAL, min2 = HUGE_VAL;
    int min1_pos = -1, neg_count = 0;
    for (int e = 0; e < deg; ++e) {
      double z = s.bit_to_check[s.edge(m, e)];
      if (z < 0 || (z == 0 && std::signbit(z))) ++neg_count;
      double a = std::fabs(z);
      if (a < min1) {
        min2 = min1;
        min1 = a;
        min1_pos = e;
      } else if (a < min2) {
        min2 = a;
      }
    }
    for (int e = 0; e < deg; ++e) {
      double z = s.bit_to_check[s.edge(m, e)];
      int sgn_excl = neg_count - (z < 0 ? 1 : 0);
      double mag = (e == min1_pos) ? min2 : min1;
      if (deg == 1) mag = 0.0;  // degenerate: empty product/min
      s.check_to_bit[s.edge(m, e)] = ((sgn_excl & 1) ? -1.0 : 1.0) * mag;
    }
  }
}

void bit_update(LlrState& s) {
  const auto& H = *s.H;
  std::vector<double> total(H.cols, 0.0);
  for (int m = 0; m < H.rows; ++m)
    for (size_t e = 0; e < H.row_bits[m].size(); ++e)
      total[H.row_bits[m][e]] += s.check_to_bit[s.edge(m, static_cast<int>(e))];
  for (int m = 0; m < H.rows; ++m)
    for (size_t e = 0; e < H.row_bits[m].size(); ++e) {
      int b = H.row_bits[m][e];
      int idx = s.edge(m, static_cast<int>(e));
      s.bit_to_check[idx] = s.prior[b] + total[b] - s.check_to_bit[idx];
    }
  ++s.iteration;
}

std::vector<double> posterior_llr(const LlrState& s) {
  const auto& H = *s.H;
  std::vector<double> z = s.prior;
  for (int m = 0; m < H.rows; ++m)
    for (size_t e = 0; e < H.row_bits[m].size(); ++e)
      z[H.row_bits[m][e]] += s.check_to_bit[s.edge(m, static_cast<int>(e))];
  return z;
}

Bits decide(const LlrState& s) {
  std::vector<double> z = posterior_llr(s);
  Bits x(z.size());
  for (size_t i = 0; i < z.size(); ++i) x[i] = z[i] >= 0.0 ? 0 : 1;
  return x;
}

BpResult decode(const std::vector<double>& y, const ParityCheckMatrix& H, double sigma2,
                int max_iters) {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (static_cast<int>(y.size()) != H.cols) throw std::invalid_argument("y length != N");
  LlrState s(H, init_llr(y, sigma2));
  BpResult res;
  for (int it = 0; it < max_iters; ++it) {
    check_update(s);
    res.decoded = decide(s);
    res.iterations = it + 1;
    Bits syn = syndrome(res.decoded, H);
    if (std::all_of(syn.begin(), syn.end(), [](uint8_t b) { return b == 0; })) {
      res.converged = true;
      return res;
    }
    bit_update(s);
  }
  res.converged = false;
  return res;
}

}  // namespace qbp
