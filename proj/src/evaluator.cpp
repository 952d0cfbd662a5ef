#include "qbp/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qbp/alist.hpp"
#include "qbp/rng.hpp"

namespace qbp {

InstanceDistribution rank_solutions(const SampleSet& samples, const Bits& transmitted,
                                    const std::vector<int>& message_positions) {
  if (samples.records.empty()) throw std::invalid_argument("empty sample set");
  InstanceDistribution dist;
  dist.transmitted = transmitted;
  dist.total_reads = samples.total_reads();
  for (const auto& rec : samples.records) {
    RankedSolution r;
    r.assignment = rec.assignment;
    if (samples.convention == Convention::Ising)
      for (auto& v : r.assignment) v = static_cast<int8_t>((v + 1) / 2);
    r.energy = rec.energy;
    r.occurrences = rec.occurrences;
    for (int pos : message_positions) {
      if (pos < 0 || pos >= static_cast<int>(r.assignment.size()) ||
          pos >= static_cast<int>(transmitted.size()))
        throw std::invalid_argument("message position out of range");
      if (r.assignment[pos] != static_cast<int8_t>(transmitted[pos])) ++r.bit_errors;
    }
    for (size_t i = 0; i < transmitted.size(); ++i)
      if (r.assignment[i] != static_cast<int8_t>(transmitted[i])) ++r.codeword_errors;
    dist.ranks.push_back(std::move(r));
  }
  // don't trust the input ordering: sort by (energy, assignment) and merge
  // duplicate assignments so ranks are distinct
  std::sort(dist.ranks.begin(), dist.ranks.end(), [](const auto& a, const auto& b) {
    return a.energy != b.energy ? a.energy < b.energy : a.assignment < b.assignment;
  });
  std::vector<RankedSolution> merged;
  for (auto& r : dist.ranks) {
    if (!merged.empty() && merged.back().assignment == r.assignment)
      merged.back().occurrences += r.occurrences;
    else
      merged.push_back(std::move(r));
  }
  dist.ranks = std::move(merged);
  double cum = 0.0;
  for (auto& r : dist.ranks) {
    cum += static_cast<double>(r.occurrences) / dist.total_reads;
    r.cdf = cum;
  }
  dist.ranks.back().cdf = 1.0;  // guard accumulated rounding
  return dist;
}

double pr_rmin(int i, int n_a, const std::vector<double>& F) {
  if (i < 1 || i > static_cast<int>(F.size())) throw std::invalid_argument("rank out of range");
  if (n_a < 1) throw std::invalid_argument("n_a must be >= 1");
  double prev = i == 1 ? 0.0 : F[i - 2];
  return std::pow(1.0 - prev, n_a) - std::pow(1.0 - F[i - 1], n_a);
}

namespace {

std::vector<double> cdf_of(const InstanceDistribution& dist) {
  std::vector<double> F;
  F.reserve(dist.ranks.size());
  for (const auto& r : dist.ranks) F.push_back(r.cdf);
  return F;
}

}  // namespace

double expected_bit_errors(const InstanceDistribution& dist, int n_a) {
  std::vector<double> F = cdf_of(dist);
  double e = 0.0;
  for (size_t i = 0; i < dist.ranks.size(); ++i)
    e += pr_rmin(static_cast<int>(i) + 1, n_a, F) * dist.ranks[i].bit_errors;
  return e;
}

double ber(const InstanceDistribution& dist, int n_a, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  return expected_bit_errors(dist, n_a) / k;
}

double zero_error_mass(const InstanceDistribution& dist, int n_a) {
  std::vector<double> F = cdf_of(dist);
  double m = 0.0;
  for (size_t i = 0; i < dist.ranks.size(); ++i)
    if (dist.ranks[i].bit_errors == 0) m += pr_rmin(static_cast<int>(i) + 1, n_a, F);
  return m;
}

double frame_error_free_prob(const std::vector<InstanceDistribution>& blocks, int n_a) {
  double p = 1.0;
  for (const auto& b : blocks) p *= zero_error_mass(b, n_a);
  return p;
}

double fer(const std::vector<InstanceDistribution>& instances, long long n_f_bits, int n_b_bits,
           int n_a, long long budget, uint64_t seed) {
  if (n_b_bits < 1 || n_f_bits < 1) throw std::invalid_argument("invalid frame/block size");
  if (n_f_bits % n_b_bits != 0)
    throw std::invalid_argument("frame size must be a multiple of the block size");
  const int blocks = static_cast<int>(n_f_bits / n_b_bits);
  const int n_ins = static_cast<int>(instances.size());
  if (blocks > n_ins) throw std::invalid_argument("fewer instances than blocks per frame");

  std::vector<double> mass(n_ins);
  for (int i = 0; i < n_ins; ++i) mass[i] = zero_error_mass(instances[i], n_a);

  // C(n_ins, blocks), saturating beyond the budget
  long long combos = 1;
  for (int i = 0; i < blocks; ++i) {
    combos = combos * (n_ins - i) / (i + 1);
    if (combos > budget) {
      combos = budget + 1;
      break;
    }
  }

  double total = 0.0;
  long long frames = 0;
  if (combos <= budget) {
    std::vector<int> idx(blocks);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      double ef = 1.0;
      for (int i : idx) ef *= mass[i];
      total += 1.0 - ef;
      ++frames;
      int j = blocks - 1;
      while (j >= 0 && idx[j] == n_ins - blocks + j) --j;
      if (j < 0) break;
      ++idx[j];
      for (int t = j + 1; t < blocks; ++t) idx[t] = idx[t - 1] + 1;
    }
  } else {
    Rng rng(derive_seed(seed, 0xfe11ull));
    std::vector<int> pool(n_ins);
    for (long long f = 0; f < budget; ++f) {
      std::iota(pool.begin(), pool.end(), 0);
      double ef = 1.0;
      for (int i = 0; i < blocks; ++i) {
        int pick = static_cast<int>(rng.below(n_ins - i));
        std::swap(pool[pick], pool[n_ins - 1 - i]);
        ef *= mass[pool[n_ins - 1 - i]];
      }
      total += 1.0 - ef;
      ++frames;
    }
  }
  return total / frames;
}

double throughput(double n_k_bits, double t_c_seconds, double fer_value) {
  if (t_c_seconds <= 0) throw std::invalid_argument("t_c must be positive");
  return (1.0 - fer_value) * n_k_bits / t_c_seconds;
}

double fpga_throughput(double n_k_bits, double f_clk_hz, double n_iters, double n_clk_per_iter,
                       double fer_value) {
  if (n_iters <= 0 || n_clk_per_iter <= 0 || f_clk_hz <= 0)
    throw std::invalid_argument("invalid FPGA timing parameters");
  return (1.0 - fer_value) * n_k_bits * f_clk_hz / (n_iters * n_clk_per_iter);
}

ParityCheckMatrix load_code(const CodeSource& src) {
  if (!src.alist_path.empty()) return load_alist(src.alist_path);
  if (src.structured) return build_qgem_code(src.lx, src.ly, src.ensembles).H;
  if (src.spec.n > 0) return construct_regular_code(src.spec).H;
  throw std::invalid_argument("no code source configured");
}

QbpDecoder::QbpDecoder(const ParityCheckMatrix& H, Backend backend, double jferro, int grid)
    : h_(&H), backend_(backend), jferro_(jferro) {
  auto [sat, plan] = build_satisfier(H);
  satisfier_ = std::move(sat);
  plan_ = std::move(plan);
  if (backend_ == Backend::Exhaustive && satisfier_.num_vars > 26)
    throw std::invalid_argument("exhaustive backend limited to 26 variables");
  if (backend_ == Backend::Embedded) {
    graph_ = std::make_shared<ChimeraGraph>(grid);
    PlacementResult pl = place_checks(H, *graph_);
    if (!pl.ok) throw std::runtime_error("embedded backend: " + pl.diagnostic);
    layout_ = std::make_shared<QgemLayout>(std::move(pl.layout));
  }
}

QbpDecoder::Output QbpDecoder::decode(const std::vector<double>& p, ObjectiveWeights w,
                                      const AnnealConfig& cfg) const {
  QuadraticBinaryProblem obj = assemble_objective(satisfier_, build_distance(p), w);
  Output out;
  switch (backend_) {
    case Backend::Sa:
      out.samples = simulated_anneal(obj, cfg);
      break;
    case Backend::Exhaustive: {
      GroundSet gs = exhaustive_solve(obj);
      SampleRecord rec;
      rec.assignment = gs.assignments.front();  // lexicographic tie rule
      rec.energy = gs.energy;
      rec.occurrences = 1;
      out.samples.convention = obj.convention;
      out.samples.anneal_time_us = cfg.anneal_time_us;
      out.samples.records.push_back(std::move(rec));
      break;
    }
    case Backend::Embedded: {
      EmbedResult er = embed_with_layout(obj, plan_, *h_, *graph_, *layout_, jferro_);
      EmbeddedSampleResult sr = sample_embedded(er.hardware, er.embedding, obj, cfg);
      out.samples = std::move(sr.logical);
      out.broken_fraction = sr.broken_fraction;
      break;
    }
  }
  return out;
}

namespace {

double lookup_w2(const std::map<double, double>& table, double snr, double fallback) {
  if (table.empty()) return fallback;
  auto it = table.lower_bound(snr);
  if (it == table.end()) return std::prev(it)->second;
  if (it == table.begin()) return it->second;
  auto lo = std::prev(it);
  return (snr - lo->first) <= (it->first - snr) ? lo->second : it->second;
}

Bits random_message(int k, Rng& rng) {
  Bits u(k);
  for (auto& b : u) b = static_cast<uint8_t>(rng.next() & 1);
  return u;
}

struct DecodedBatch {
  std::vector<InstanceDistribution> dists;
};

DecodedBatch decode_batch(const QbpDecoder& dec, const GeneratorMatrix& G, double snr,
                          const std::vector<double>& trace, ObjectiveWeights w,
                          const AnnealConfig& base_cfg, int instances, uint64_t seed,
                          uint64_t stream) {
  DecodedBatch out;
  const std::vector<int> msg = G.message_positions();
  for (int inst = 0; inst < instances; ++inst) {
    Rng rng(derive_seed(seed, stream, 0x11d0ull, inst));
    Bits u = random_message(G.k, rng);
    Bits c = encode(u, G);
    ChannelConfig cc;
    if (trace.empty()) {
      cc.mode = ChannelConfig::Mode::Awgn;
      cc.snr_db = snr;
    } else {
      cc.mode = ChannelConfig::Mode::Trace;
      cc.trace_snr_db = trace;
      // trace SNRs are offsets around the sweep point
      for (auto& t : cc.trace_snr_db) t += snr;
    }
    cc.seed = rng.next();
    ReceivedVector rv = transmit(modulate_bpsk(c), cc);
    AnnealConfig cfg = base_cfg;
    cfg.seed = rng.next();
    QbpDecoder::Output res = dec.decode(posterior_probs(rv), w, cfg);
    InstanceDistribution dist = rank_solutions(res.samples, c, msg);
    dist.id = inst;
    out.dists.push_back(std::move(dist));
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::map<double, double> calibrate_w2(const CalibrationConfig& cfg) {
  if (cfg.w2_grid.empty()) throw std::invalid_argument("empty W2 grid");
  ParityCheckMatrix H = load_code(cfg.code);
  GeneratorMatrix G = generator(drop_dependent_rows(H).H);
  QbpDecoder dec(H, cfg.backend, cfg.jferro, cfg.grid);
  std::map<double, double> table;
  for (size_t si = 0; si < cfg.snr_db.size(); ++si) {
    double best_w2 = 0.0, best_ber = 0.0;
    bool first = true;
    for (double w2 : cfg.w2_grid) {
      // same per-instance seeds across the W2 grid: identical noise
      DecodedBatch batch = decode_batch(dec, G, cfg.snr_db[si], {}, {cfg.w1, w2}, cfg.anneal,
                                        cfg.instances, cfg.seed, si);
      double mean = 0.0;
      for (const auto& d : batch.dists) mean += ber(d, cfg.n_a, G.k);
      mean /= cfg.instances;
      if (first || mean < best_ber || (mean == best_ber && w2 < best_w2)) {
        best_ber = mean;
        best_w2 = w2;
        first = false;
      }
    }
    table[cfg.snr_db[si]] = best_w2;
  }
  return table;
}

std::string w2_table_to_json(const std::map<double, double>& table) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [snr, w2] : table) j.push_back({{"snr_db", snr}, {"w2", w2}});
  return j.dump(2);
}

std::map<double, double> w2_table_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::map<double, double> table;
  for (const auto& row : j)
    table[row.at("snr_db").get<double>()] = row.at("w2").get<double>();
  return table;
}

double calibrate_jferro(const std::vector<double>& jf_grid, const CalibrationConfig& cfg) {
  if (jf_grid.empty()) throw std::invalid_argument("empty |J_F| grid");
  ParityCheckMatrix H = load_code(cfg.code);
  GeneratorMatrix G = generator(drop_dependent_rows(H).H);
  double w2 = cfg.w2_grid.empty() ? 1.0 : cfg.w2_grid.front();
  double best_jf = jf_grid.front(), best_ber = 0.0;
  bool first = true;
  for (double jf : jf_grid) {
    QbpDecoder dec(H, Backend::Embedded, jf, cfg.grid);
    double mean = 0.0;
    for (size_t si = 0; si < cfg.snr_db.size(); ++si) {
      DecodedBatch batch = decode_batch(dec, G, cfg.snr_db[si], {}, {cfg.w1, w2}, cfg.anneal,
                                        cfg.instances, cfg.seed, si);
      for (const auto& d : batch.dists) mean += ber(d, cfg.n_a, G.k);
    }
    mean /= cfg.instances * cfg.snr_db.size();
    if (first || mean < best_ber) {
      best_ber = mean;
      best_jf = jf;
      first = false;
    }
  }
  return best_jf;
}

void ExperimentConfig::validate(int block_length) const {
  if (snr_db.empty()) throw std::invalid_argument("empty SNR grid");
  if (n_a_grid.empty()) throw std::invalid_argument("empty N_a grid");
  for (int n_a : n_a_grid)
    if (n_a < 1) throw std::invalid_argument("N_a must be >= 1");
  if (instances < 1) throw std::invalid_argument("instances must be >= 1");
  if (reference_reads < 1) throw std::invalid_argument("reference_reads must be >= 1");
  long long nf = frame_bits == 0 ? block_length : frame_bits;
  if (nf % block_length != 0)
    throw std::invalid_argument("frame size must be a multiple of the block length");
  if (nf / block_length > instances)
    throw std::invalid_argument("instances must cover at least one frame");
  if (t_a_us <= 0) throw std::invalid_argument("t_a must be positive");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ParityCheckMatrix H = load_code(cfg.code);
  cfg.validate(H.cols);
  GeneratorMatrix G = generator(drop_dependent_rows(H).H);
  QbpDecoder dec(H, cfg.backend, cfg.jferro, cfg.grid);

  const long long n_f = cfg.frame_bits == 0 ? H.cols : cfg.frame_bits;
  AnnealConfig base;
  base.num_reads = cfg.reference_reads;
  base.sweeps = cfg.sweeps;
  base.anneal_time_us = cfg.t_a_us;

  ExperimentResult result;
  nlohmann::json inst_json = nlohmann::json::array();
  for (size_t si = 0; si < cfg.snr_db.size(); ++si) {
    double snr = cfg.snr_db[si];
    double w2 = lookup_w2(cfg.w2_table, snr, cfg.w2_default);
    DecodedBatch batch = decode_batch(dec, G, snr, cfg.trace_snr_db, {cfg.w1, w2}, base,
                                      cfg.instances, cfg.seed, si);
    for (int n_a : cfg.n_a_grid) {
      std::vector<double> bers;
      for (const auto& d : batch.dists) bers.push_back(ber(d, n_a, G.k));
      double mean = std::accumulate(bers.begin(), bers.end(), 0.0) / bers.size();
      double var = 0.0;
      for (double b : bers) var += (b - mean) * (b - mean);
      var = bers.size() > 1 ? var / (bers.size() - 1) : 0.0;
      BerRow row;
      row.snr_db = snr;
      row.w2 = w2;
      row.n_a = n_a;
      row.t_c_us = n_a * cfg.t_a_us;
      row.mean_ber = mean;
      row.ci95 = 1.96 * std::sqrt(var / bers.size());
      result.ber.push_back(row);

      FerRow frow;
      frow.snr_db = snr;
      frow.n_f_bits = n_f;
      frow.n_a = n_a;
      frow.fer = fer(batch.dists, n_f, H.cols, n_a, cfg.frame_budget,
                     derive_seed(cfg.seed, 0xf3a2ull, si, n_a));
      result.fer.push_back(frow);
    }
    nlohmann::json snr_block;
    snr_block["snr_db"] = snr;
    snr_block["w2"] = w2;
    auto arr = nlohmann::json::array();
    for (const auto& d : batch.dists) {
      nlohmann::json jd;
      jd["id"] = d.id;
      jd["total_reads"] = d.total_reads;
      auto ranks = nlohmann::json::array();
      for (const auto& r : d.ranks)
        ranks.push_back({{"energy", r.energy},
                         {"bit_errors", r.bit_errors},
                         {"codeword_errors", r.codeword_errors},
                         {"occurrences", r.occurrences},
                         {"cdf", r.cdf}});
      jd["ranks"] = ranks;
      arr.push_back(std::move(jd));
    }
    snr_block["instances"] = arr;
    inst_json.push_back(std::move(snr_block));
    result.distributions.push_back(std::move(batch.dists));
  }

  std::filesystem::create_directories(cfg.out_dir);
  auto path = [&](const char* name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
  };
  result.ber_csv = path("ber.csv");
  {
    std::ofstream out(result.ber_csv);
    out << "snr_db,w2,n_a,t_c_us,mean_ber,ci95\n";
    for (const auto& r : result.ber)
      out << fmt(r.snr_db) << "," << fmt(r.w2) << "," << r.n_a << "," << fmt(r.t_c_us) << ","
          << fmt(r.mean_ber) << "," << fmt(r.ci95) << "\n";
  }
  result.fer_csv = path("fer.csv");
  {
    std::ofstream out(result.fer_csv);
    out << "snr_db,n_f_bits,n_a,fer\n";
    for (const auto& r : result.fer)
      out << fmt(r.snr_db) << "," << r.n_f_bits << "," << r.n_a << "," << fmt(r.fer) << "\n";
  }
  result.instances_json = path("instances.json");
  {
    std::ofstream out(result.instances_json);
    out << inst_json.dump(2) << "\n";
  }
  result.manifest_json = path("manifest.json");
  {
    nlohmann::json m;
    m["code"] = {{"alist", cfg.code.alist_path},
                 {"structured", cfg.code.structured},
                 {"lx", cfg.code.lx},
                 {"ly", cfg.code.ly},
                 {"ensembles", cfg.code.ensembles},
                 {"n", cfg.code.spec.n},
                 {"code_seed", cfg.code.spec.seed}};
    m["snr_db"] = cfg.snr_db;
    m["trace_snr_db"] = cfg.trace_snr_db;
    m["w1"] = cfg.w1;
    m["w2_default"] = cfg.w2_default;
    auto tbl = nlohmann::json::array();
    for (const auto& [s, w] : cfg.w2_table) tbl.push_back({{"snr_db", s}, {"w2", w}});
    m["w2_table"] = tbl;
    m["jferro"] = cfg.jferro;
    m["backend"] = cfg.backend == Backend::Sa          ? "sa"
                   : cfg.backend == Backend::Exhaustive ? "exhaustive"
                                                         : "embedded";
    m["grid"] = cfg.grid;
    m["n_a_grid"] = cfg.n_a_grid;
    m["t_a_us"] = cfg.t_a_us;
    m["reference_reads"] = cfg.reference_reads;
    m["sweeps"] = cfg.sweeps;
    m["frame_bits"] = n_f;
    m["frame_budget"] = cfg.frame_budget;
    m["instances"] = cfg.instances;
    m["seed"] = cfg.seed;
    std::ofstream out(result.manifest_json);
    out << m.dump(2) << "\n";
  }
  return result;
}

}  // namespace qbp
