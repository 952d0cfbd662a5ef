#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbp/code.hpp"

namespace qbp {

struct ChannelConfig {
  enum class Mode { Awgn, Trace };
  Mode mode = Mode::Awgn;
  double snr_db = 0.0;                // AWGN mode
  std::vector<double> trace_snr_db;   // Trace mode, per subcarrier
  uint64_t seed = 0;

  void validate() const;
};

struct ReceivedVector {
  std::vector<double> y;
  std::vector<double> sigma2;  // per symbol
};

// BPSK: 0 -> -1, 1 -> +1; unit symbol energy.
std::vector<double> modulate_bpsk(const Bits& bits);

// Per-symbol SNR convention: sigma^2 = 10^(-snr_db/10) at Es = 1.
double snr_to_sigma2(double snr_db);

// y = x + n. Trace mode assigns bits to subcarriers round-robin after a
// seeded interleaving permutation; each bit records its subcarrier's
// sigma^2. Deterministic per seed.
ReceivedVector transmit(const std::vector<double>& symbols, const ChannelConfig& cfg);

// Pr(q = 1 | y) = 1 / (1 + exp(-2 y / sigma^2))
double posterior_prob(double y, double sigma2);
std::vector<double> posterior_probs(const ReceivedVector& rv);

// CSV, one SNR in dB per line.
std::vector<double> load_trace(const std::string& path);

// CSV with header "y,sigma2".
void save_received(const ReceivedVector& rv, const std::string& path);
ReceivedVector load_received(const std::string& path);

}  // namespace qbp
