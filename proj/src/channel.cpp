#include "qbp/channel.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qbp/rng.hpp"

namespace qbp {

void ChannelConfig::validate() const {
  if (mode == Mode::Trace) {
    if (trace_snr_db.empty()) throw std::invalid_argument("empty trace");
    for (double s : trace_snr_db)
      if (!std::isfinite(s)) throw std::invalid_argument("non-finite trace SNR");
  } else if (!std::isfinite(snr_db)) {
    throw std::invalid_argument("non-finite SNR");
  }
}

std::vector<double> modulate_bpsk(const Bits& bits) {
  std::vector<double> x(bits.size());
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) throw std::invalid_argument("non-binary input");
    x[i] = bits[i] ? 1.0 : -1.0;
  }
  return x;
}

double snr_to_sigma2(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

ReceivedVector transmit(const std::vector<double>& symbols, const ChannelConfig& cfg) {
  cfg.validate();
  for (double s : symbols)
    if (s != -1.0 && s != 1.0) throw std::invalid_argument("symbols must be BPSK (+/-1)");
  const size_t n = symbols.size();
  ReceivedVector rv;
  rv.y.resize(n);
  rv.sigma2.resize(n);
  // separate interleaver and noise streams so a one-subcarrier trace is
  // bit-identical to plain AWGN at the same seed
  Rng noise(derive_seed(cfg.seed, 0x5b7cull));
  if (cfg.mode == ChannelConfig::Mode::Awgn) {
    double s2 = snr_to_sigma2(cfg.snr_db);
    for (size_t i = 0; i < n; ++i) rv.sigma2[i] = s2;
  } else {
    // seeded interleaver: permute bit positions, then assign subcarriers
    // round-robin along the permuted order
    Rng il(derive_seed(cfg.seed, 0x11eaull));
    std::vector<size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[il.below(i)]);
    const size_t sc = cfg.trace_snr_db.size();
    for (size_t slot = 0; slot < n; ++slot)
      rv.sigma2[perm[slot]] = snr_to_sigma2(cfg.trace_snr_db[slot % sc]);
  }
  for (size_t i = 0; i < n; ++i) rv.y[i] = symbols[i] + std::sqrt(rv.sigma2[i]) * noise.gaussian();
  return rv;
}

double posterior_prob(double y, double sigma2) {
  if (sigma2 <= 0) throw std::invalid_argument("sigma2 must be positive");
  return 1.0 / (1.0 + std::exp(-2.0 * y / sigma2));
}

std::vector<double> posterior_probs(const ReceivedVector& rv) {
  if (rv.y.size() != rv.sigma2.size()) throw std::invalid_argument("length mismatch");
  std::vector<double> p(rv.y.size());
  for (size_t i = 0; i < p.size(); ++i) p[i] = posterior_prob(rv.y[i], rv.sigma2[i]);
  return p;
}

std::vector<double> load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> snrs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // trim whitespace; skip blank lines
    size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    size_t b = line.find_last_not_of(" \t\r");
    std::string tok = line.substr(a, b - a + 1);
    try {
      size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument("trailing characters");
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
      snrs.push_back(v);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": invalid SNR value '" +
                               tok + "'");
    }
  }
  if (snrs.empty()) throw std::runtime_error(path + ": empty trace");
  return snrs;
}

void save_received(const ReceivedVector& rv, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "y,sigma2\n";
  out.precision(17);
  for (size_t i = 0; i < rv.y.size(); ++i) out << rv.y[i] << "," << rv.sigma2[i] << "\n";
}

ReceivedVector load_received(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.find("y") == std::string::npos)
    throw std::runtime_error(path + ": missing header");
  ReceivedVector rv;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string ys, ss2;
    if (!std::getline(ss, ys, ',') || !std::getline(ss, ss2))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed row");
    rv.y.push_back(std::stod(ys));
    rv.sigma2.push_back(std::stod(ss2));
    if (rv.sigma2.back() <= 0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": sigma2 must be positive");
  }
  return rv;
}

}  // namespace qbp
