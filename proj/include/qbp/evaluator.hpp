#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qbp/anneal.hpp"
#include "qbp/channel.hpp"
#include "qbp/chimera.hpp"
#include "qbp/code.hpp"
#include "qbp/qgem.hpp"
#include "qbp/qubo.hpp"

namespace qbp {

struct RankedSolution {
  std::vector<int8_t> assignment;  // bits + ancillae, QUBO values
  double energy = 0.0;
  int bit_errors = 0;  // over message positions vs the transmitted word
  int codeword_errors = 0;  // over all N bits (logged, not used by Eq. 16)
  int occurrences = 0;
  double cdf = 0.0;  // F(R_i)
};

struct InstanceDistribution {
  int id = 0;
  Bits transmitted;
  std::vector<RankedSolution> ranks;  // energies non-decreasing
  int total_reads = 0;
};

// Distinct assignments sorted by (energy, assignment); errors counted
// against the transmitted codeword at the message positions.
InstanceDistribution rank_solutions(const SampleSet& samples, const Bits& transmitted,
                                    const std::vector<int>& message_positions);

// Eq.-style estimators over the ranked empirical distribution.
// pr_rmin uses 1-based rank i over the CDF vector F.
double pr_rmin(int i, int n_a, const std::vector<double>& F);
double expected_bit_errors(const InstanceDistribution& dist, int n_a);
double ber(const InstanceDistribution& dist, int n_a, int k);
// probability the best of n_a reads decodes this block error-free
double zero_error_mass(const InstanceDistribution& dist, int n_a);
double frame_error_free_prob(const std::vector<InstanceDistribution>& blocks, int n_a);
// Average frame error over C(N_ins, N_F/N_B) frames; enumerates exactly
// up to `budget` frames, then switches to seeded subsampling.
double fer(const std::vector<InstanceDistribution>& instances, long long n_f_bits, int n_b_bits,
           int n_a, long long budget = 100000, uint64_t seed = 0);

double throughput(double n_k_bits, double t_c_seconds, double fer_value);
double fpga_throughput(double n_k_bits, double f_clk_hz, double n_iters, double n_clk_per_iter,
                       double fer_value);

enum class Backend { Sa, Exhaustive, Embedded };

struct CodeSource {
  std::string alist_path;  // load if non-empty
  bool structured = false;  // else build_qgem_code(lx, ly, ensembles)
  int lx = 0, ly = 0, ensembles = 0;
  CodeSpec spec;  // random construction fallback (spec.n > 0)
};

ParityCheckMatrix load_code(const CodeSource& src);

// One decoding pipeline instance: satisfier/plan (and, for the embedded
// backend, the placement) are computed once per code.
class QbpDecoder {
 public:
  QbpDecoder(const ParityCheckMatrix& H, Backend backend, double jferro = 8.0, int grid = 16);

  struct Output {
    SampleSet samples;         // QUBO assignments over bits + ancillae
    double broken_fraction = 0.0;  // embedded backend only
  };
  // p: per-bit posteriors Pr(q=1|y)
  Output decode(const std::vector<double>& p, ObjectiveWeights w, const AnnealConfig& cfg) const;

  const ParityCheckMatrix& H() const { return *h_; }
  const AncillaPlan& plan() const { return plan_; }

 private:
  const ParityCheckMatrix* h_;
  Backend backend_;
  double jferro_;
  QuadraticBinaryProblem satisfier_;
  AncillaPlan plan_;
  std::shared_ptr<ChimeraGraph> graph_;
  std::shared_ptr<QgemLayout> layout_;  // embedded backend
};

struct CalibrationConfig {
  CodeSource code;
  std::vector<double> snr_db = {3.0, 6.0, 9.0};
  std::vector<double> w2_grid;
  int instances = 50;
  int n_a = 10;
  Backend backend = Backend::Sa;
  AnnealConfig anneal;
  double w1 = 1.0;
  double jferro = 8.0;
  int grid = 16;
  uint64_t seed = 1;
};

// Per SNR, the W2 with the lowest mean BER (lowest W2 wins ties).
std::map<double, double> calibrate_w2(const CalibrationConfig& cfg);
std::string w2_table_to_json(const std::map<double, double>& table);
std::map<double, double> w2_table_from_json(const std::string& text);

// Mean-BER argmin over the |J_F| grid using the embedded backend; ties
// resolve to the earliest grid entry.
double calibrate_jferro(const std::vector<double>& jf_grid, const CalibrationConfig& cfg);

struct ExperimentConfig {
  CodeSource code;
  std::vector<double> snr_db = {3.0, 6.0, 9.0};
  std::vector<double> trace_snr_db;  // non-empty switches the channel to trace mode
  double w1 = 1.0;
  std::map<double, double> w2_table;
  double w2_default = 1.0;
  double jferro = 8.0;
  Backend backend = Backend::Sa;
  int grid = 16;
  std::vector<int> n_a_grid = {1, 5, 10, 20, 50, 100};
  double t_a_us = 1.0;
  int reference_reads = 1000;  // reads used to build each distribution
  int sweeps = 1000;
  long long frame_bits = 0;  // N_F; 0 = one block per frame
  long long frame_budget = 100000;
  int instances = 150;
  uint64_t seed = 1;
  std::string out_dir = ".";

  void validate(int block_length) const;
};

struct BerRow {
  double snr_db = 0, w2 = 0;
  int n_a = 0;
  double t_c_us = 0, mean_ber = 0, ci95 = 0;
};
struct FerRow {
  double snr_db = 0;
  long long n_f_bits = 0;
  int n_a = 0;
  double fer = 0;
};

struct ExperimentResult {
  std::vector<BerRow> ber;
  std::vector<FerRow> fer;
  std::vector<std::vector<InstanceDistribution>> distributions;  // per SNR
  std::string ber_csv, fer_csv, instances_json, manifest_json;   // written paths
};

// Full methodology run: construct/load code, simulate channel, decode
// every instance, emit ber.csv / fer.csv / per-instance distributions /
// manifest. Deterministic per (config, seed): reruns are byte-identical.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace qbp
