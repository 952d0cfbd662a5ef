#include "qbp/anneal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "json.hpp"
#include "qbp/rng.hpp"

namespace qbp {

namespace {

struct Adjacency {
  std::vector<std::vector<std::pair<int, double>>> nbr;
  explicit Adjacency(const QuadraticBinaryProblem& p) : nbr(p.num_vars) {
    for (const auto& [key, J] : p.quadratic) {
      nbr[key.first].emplace_back(key.second, J);
      nbr[key.second].emplace_back(key.first, J);
    }
  }
};

// energy change from flipping variable i in place
double flip_delta(const QuadraticBinaryProblem& p, const Adjacency& adj,
                  const std::vector<int8_t>& x, int i) {
  double field = p.linear[i];
  for (const auto& [j, J] : adj.nbr[i]) field += J * x[j];
  if (p.convention == Convention::Qubo) return (1 - 2 * x[i]) * field;
  return -2.0 * x[i] * field;
}

std::vector<std::vector<int8_t>> anneal_raw(const QuadraticBinaryProblem& p,
                                            const AnnealConfig& cfg) {
  cfg.validate();
  Adjacency adj(p);
  const int8_t lo = p.convention == Convention::Qubo ? 0 : -1;
  std::vector<std::vector<int8_t>> reads;
  reads.reserve(cfg.num_reads);
  const double ratio =
      cfg.sweeps > 1 ? std::pow(cfg.temp_end / cfg.temp_start, 1.0 / (cfg.sweeps - 1)) : 1.0;
  for (int r = 0; r < cfg.num_reads; ++r) {
    Rng rng(splitmix64(cfg.seed) ^ splitmix64(0x9d1c4f2b7a30e5d1ull + r));
    std::vector<int8_t> x(p.num_vars);
    for (auto& v : x) v = (rng.next() & 1) ? 1 : lo;
    double temp = cfg.sweeps > 1 ? cfg.temp_start : cfg.temp_end;
    for (int s = 0; s < cfg.sweeps; ++s) {
      for (int i = 0; i < p.num_vars; ++i) {
        double d = flip_delta(p, adj, x, i);
        if (d <= 0.0 || rng.uniform() < std::exp(-d / temp))
          x[i] = p.convention == Convention::Qubo ? static_cast<int8_t>(1 - x[i])
                                                  : static_cast<int8_t>(-x[i]);
      }
      temp *= ratio;
    }
    reads.push_back(std::move(x));
  }
  return reads;
}

SampleSet aggregate(std::vector<std::vector<int8_t>> reads, const QuadraticBinaryProblem& p,
                    const AnnealConfig& cfg) {
  std::map<std::vector<int8_t>, int> counts;
  for (auto& r : reads) ++counts[std::move(r)];
  SampleSet out;
  out.convention = p.convention;
  out.anneal_time_us = cfg.anneal_time_us;
  for (auto& [assignment, n] : counts) {
    SampleRecord rec;
    rec.energy = p.energy(assignment);
    rec.assignment = assignment;
    rec.occurrences = n;
    out.records.push_back(std::move(rec));
  }
  std::sort(out.records.begin(), out.records.end(), [](const auto& a, const auto& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.assignment < b.assignment;
  });
  return out;
}

}  // namespace

void AnnealConfig::validate() const {
  if (num_reads < 1) throw std::invalid_argument("num_reads must be >= 1");
  if (sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
  if (!(temp_start > 0) || !(temp_end > 0) || temp_end > temp_start)
    throw std::invalid_argument("temperatures must be positive and decreasing");
}

int SampleSet::total_reads() const {
  int n = 0;
  for (const auto& r : records) n += r.occurrences;
  return n;
}

const SampleRecord& SampleSet::best() const {
  if (records.empty()) throw std::logic_error("empty sample set");
  return records.front();
}

SampleSet simulated_anneal(const QuadraticBinaryProblem& p, const AnnealConfig& cfg) {
  return aggregate(anneal_raw(p, cfg), p, cfg);
}

GroundSet exhaustive_solve(const QuadraticBinaryProblem& p) {
  if (p.num_vars > 26) throw std::invalid_argument("exhaustive_solve limited to 26 variables");
  GroundSet out;
  if (p.num_vars == 0) {
    out.assignments.push_back({});
    out.energy = p.offset;
    return out;
  }
  Adjacency adj(p);
  const int8_t lo = p.convention == Convention::Qubo ? 0 : -1;
  std::vector<int8_t> x(p.num_vars, lo);
  double e = p.energy(x);
  double best = e;
  out.assignments.push_back(x);
  const uint64_t total = 1ull << p.num_vars;
  // Gray-code walk with incremental deltas; candidate minima are
  // re-evaluated exactly to keep drift out of the tie set.
  for (uint64_t k = 1; k < total; ++k) {
    int i = std::countr_zero(k);
    e += flip_delta(p, adj, x, i);
    x[i] = p.convention == Convention::Qubo ? static_cast<int8_t>(1 - x[i])
                                            : static_cast<int8_t>(-x[i]);
    if (e <= best + 1e-9) {
      double exact = p.energy(x);
      if (exact < best - 1e-12) {
        best = exact;
        out.assignments.clear();
        out.assignments.push_back(x);
      } else if (std::abs(exact - best) <= 1e-12) {
        out.assignments.push_back(x);
      }
      e = exact;
    }
  }
  out.energy = best;
  std::sort(out.assignments.begin(), out.assignments.end());
  out.assignments.erase(std::unique(out.assignments.begin(), out.assignments.end()),
                        out.assignments.end());
  return out;
}

EmbeddedSampleResult sample_embedded(const HardwareProblem& hw, const ChimeraEmbedding& emb,
                                     const QuadraticBinaryProblem& logical,
                                     const AnnealConfig& cfg) {
  auto reads = anneal_raw(hw.ising, cfg);
  long long broken = 0;
  std::vector<std::vector<int8_t>> logical_reads;
  logical_reads.reserve(reads.size());
  for (const auto& r : reads) {
    UnembedResult u = unembed(r, hw, emb, logical);
    broken += u.broken_chains;
    logical_reads.push_back(std::move(u.logical));
  }
  EmbeddedSampleResult out;
  out.logical = aggregate(std::move(logical_reads), logical, cfg);
  out.broken_fraction =
      static_cast<double>(broken) /
      (static_cast<double>(cfg.num_reads) * std::max(1, logical.num_vars));
  return out;
}

void export_for_external_sampler(const QuadraticBinaryProblem& p, const std::string& path) {
  save_problem(p, path);
}

std::string sampleset_to_json(const SampleSet& s) {
  nlohmann::json j;
  j["convention"] = s.convention == Convention::Qubo ? "qubo" : "ising";
  j["anneal_time_us"] = s.anneal_time_us;
  auto recs = nlohmann::json::array();
  for (const auto& r : s.records)
    recs.push_back({{"assignment", r.assignment},
                    {"energy", r.energy},
                    {"occurrences", r.occurrences}});
  j["records"] = recs;
  return j.dump(2);
}

SampleSet sampleset_from_json(const std::string& text, const QuadraticBinaryProblem& p) {
  nlohmann::json j = nlohmann::json::parse(text);
  SampleSet s;
  std::string conv = j.at("convention").get<std::string>();
  if (conv != "qubo" && conv != "ising") throw std::runtime_error("unknown convention");
  s.convention = conv == "qubo" ? Convention::Qubo : Convention::Ising;
  if (s.convention != p.convention)
    throw std::runtime_error("sampleset convention does not match the problem");
  s.anneal_time_us = j.value("anneal_time_us", 1.0);
  for (const auto& rec : j.at("records")) {
    SampleRecord r;
    r.assignment = rec.at("assignment").get<std::vector<int8_t>>();
    if (static_cast<int>(r.assignment.size()) != p.num_vars)
      throw std::runtime_error("sample is missing variables");
    for (int8_t v : r.assignment)
      if (!p.legal_value(v)) throw std::runtime_error("sample value outside the convention");
    r.occurrences = rec.at("occurrences").get<int>();
    if (r.occurrences < 1) throw std::runtime_error("non-positive occurrence count");
    r.energy = rec.at("energy").get<double>();
    double exact = p.energy(r.assignment);
    if (std::abs(r.energy - exact) > 1e-9)
      throw std::runtime_error("imported energy disagrees with the problem definition");
    r.energy = exact;
    s.records.push_back(std::move(r));
  }
  std::sort(s.records.begin(), s.records.end(), [](const auto& a, const auto& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.assignment < b.assignment;
  });
  return s;
}

SampleSet import_sampleset(const std::string& path, const QuadraticBinaryProblem& p) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sampleset_from_json(text, p);
}

void save_sampleset(const SampleSet& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << sampleset_to_json(s) << "\n";
}

}  // namespace qbp
