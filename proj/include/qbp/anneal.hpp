#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbp/chimera.hpp"
#include "qbp/qubo.hpp"

namespace qbp {

struct AnnealConfig {
  int num_reads = 100;  // N_a
  int sweeps = 1000;
  double temp_start = 10.0;
  double temp_end = 0.1;  // geometric schedule between the two
  uint64_t seed = 0;
  double anneal_time_us = 1.0;  // T_a, reporting label only

  void validate() const;
};

struct SampleRecord {
  std::vector<int8_t> assignment;
  double energy = 0.0;
  int occurrences = 0;
};

// Aggregated by identical assignment, sorted by (energy, assignment).
struct SampleSet {
  Convention convention = Convention::Qubo;
  std::vector<SampleRecord> records;
  double anneal_time_us = 1.0;

  int total_reads() const;
  const SampleRecord& best() const;
};

// Metropolis single-flip annealing with geometric cooling; per-read RNG
// streams derived from (seed, read index); final energies recomputed
// from the problem definition.
SampleSet simulated_anneal(const QuadraticBinaryProblem& p, const AnnealConfig& cfg);

struct GroundSet {
  std::vector<std::vector<int8_t>> assignments;  // all co-minimal, sorted
  double energy = 0.0;
};

// Full enumeration; problems up to 26 variables.
GroundSet exhaustive_solve(const QuadraticBinaryProblem& p);

struct EmbeddedSampleResult {
  SampleSet logical;
  double broken_fraction = 0.0;  // broken chains / (reads * chains)
};

// Anneals the physical Ising problem and unembeds every read; logical
// energies come from the logical problem.
EmbeddedSampleResult sample_embedded(const HardwareProblem& hw, const ChimeraEmbedding& emb,
                                     const QuadraticBinaryProblem& logical,
                                     const AnnealConfig& cfg);

void export_for_external_sampler(const QuadraticBinaryProblem& p, const std::string& path);
// Parses a sampleset JSON and revalidates every energy against the
// problem; rejects assignments with missing variables or stale energies.
SampleSet import_sampleset(const std::string& path, const QuadraticBinaryProblem& p);

std::string sampleset_to_json(const SampleSet& s);
SampleSet sampleset_from_json(const std::string& text, const QuadraticBinaryProblem& p);
void save_sampleset(const SampleSet& s, const std::string& path);

}  // namespace qbp
