// qbp: LDPC decoding toolkit driver.
//
// Subcommands cover the full pipeline: code construction, encoding,
// channel simulation, min-sum BP decoding, annealing-based (QBP)
// decoding, Chimera embedding, raw sampling, calibration sweeps and
// experiment runs. Exit codes: 0 ok, 2 config error, 3 runtime error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "qbp/alist.hpp"
#include "qbp/anneal.hpp"
#include "qbp/bp.hpp"
#include "qbp/channel.hpp"
#include "qbp/chimera.hpp"
#include "qbp/code.hpp"
#include "qbp/evaluator.hpp"
#include "qbp/qgem.hpp"
#include "qbp/qubo.hpp"
#include "qbp/rng.hpp"

namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config(const std::string& path, const std::vector<std::string>& allowed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError("unknown config key '" + it.key() + "'");
  return j;
}

qbp::Bits read_bits(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  qbp::Bits bits;
  char c;
  while (in.get(c)) {
    if (c == '0' || c == '1')
      bits.push_back(static_cast<uint8_t>(c - '0'));
    else if (!std::isspace(static_cast<unsigned char>(c)))
      throw ConfigError(path + ": unexpected character '" + std::string(1, c) + "'");
  }
  if (bits.empty()) throw ConfigError(path + ": no bits found");
  return bits;
}

void write_bits(const qbp::Bits& bits, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (uint8_t b : bits) out << int(b);
  out << "\n";
}

void write_manifest(const std::string& out_path, const json& echo) {
  json m;
  m["tool"] = "qbp";
  m["format_version"] = 1;
  m["config"] = echo;
  std::ofstream out(out_path + ".manifest.json");
  if (out) out << m.dump(2) << "\n";
}

qbp::Backend parse_backend(const std::string& s) {
  if (s == "sa") return qbp::Backend::Sa;
  if (s == "exhaustive") return qbp::Backend::Exhaustive;
  if (s == "embedded") return qbp::Backend::Embedded;
  throw ConfigError("unknown backend '" + s + "'");
}

// pull a scalar from config JSON unless the flag was given explicitly
template <typename T>
void cfg_override(const json& j, const char* key, const CLI::Option* opt, T& value) {
  if (j.contains(key) && (opt == nullptr || opt->count() == 0)) value = j.at(key).get<T>();
}

int run(int argc, char** argv) {
  CLI::App app{"QBP LDPC decoding toolkit"};
  app.require_subcommand(1);

  // ---- construct ----
  auto* c_con = app.add_subcommand("construct", "Build a parity check matrix");
  int con_n = 0, con_bd = 2, con_cd = 3, con_girth = 0, con_lx = 0, con_ly = 0, con_e = 0;
  uint64_t con_seed = 1;
  bool con_structured = false;
  std::string con_out = "code.alist";
  c_con->add_option("--n", con_n, "block length (random construction)");
  c_con->add_option("--bit-degree", con_bd);
  c_con->add_option("--check-degree", con_cd);
  c_con->add_option("--target-girth", con_girth);
  c_con->add_option("--seed", con_seed);
  c_con->add_flag("--structured", con_structured, "grid-aligned construction");
  c_con->add_option("--lx", con_lx);
  c_con->add_option("--ly", con_ly);
  c_con->add_option("--ensembles", con_e);
  c_con->add_option("--out", con_out);

  // ---- encode ----
  auto* c_enc = app.add_subcommand("encode", "Encode a message");
  std::string enc_alist, enc_message, enc_out = "codeword.txt";
  uint64_t enc_seed = 0;
  bool enc_random = false;
  c_enc->add_option("--alist", enc_alist)->required();
  c_enc->add_option("--message", enc_message, "message bit file");
  c_enc->add_flag("--random", enc_random, "draw a random message");
  c_enc->add_option("--seed", enc_seed);
  c_enc->add_option("--out", enc_out);

  // ---- transmit ----
  auto* c_tx = app.add_subcommand("transmit", "BPSK over AWGN or a trace channel");
  std::string tx_codeword, tx_trace, tx_out = "received.csv";
  double tx_snr = 3.0;
  uint64_t tx_seed = 0;
  c_tx->add_option("--codeword", tx_codeword)->required();
  c_tx->add_option("--snr", tx_snr, "SNR in dB");
  c_tx->add_option("--trace", tx_trace, "per-subcarrier SNR CSV");
  c_tx->add_option("--seed", tx_seed);
  c_tx->add_option("--out", tx_out);

  // ---- decode-bp ----
  auto* c_bp = app.add_subcommand("decode-bp", "Min-sum belief propagation");
  std::string bp_alist, bp_received, bp_out = "decoded.txt";
  int bp_iters = 10;
  c_bp->add_option("--alist", bp_alist)->required();
  c_bp->add_option("--received", bp_received)->required();
  c_bp->add_option("--max-iters", bp_iters);
  c_bp->add_option("--out", bp_out);

  // ---- decode-qbp ----
  auto* c_qbp = app.add_subcommand("decode-qbp", "Annealing decode via QUBO reduction");
  std::string q_alist, q_received, q_backend = "sa", q_out = "decoded.txt";
  double q_w1 = 1.0, q_w2 = 1.0, q_jferro = 8.0;
  int q_reads = 100, q_sweeps = 1000, q_grid = 16;
  uint64_t q_seed = 0;
  c_qbp->add_option("--alist", q_alist)->required();
  c_qbp->add_option("--received", q_received)->required();
  c_qbp->add_option("--w1", q_w1);
  c_qbp->add_option("--w2", q_w2);
  c_qbp->add_option("--backend", q_backend, "sa | exhaustive | embedded");
  c_qbp->add_option("--jferro", q_jferro);
  c_qbp->add_option("--grid", q_grid);
  c_qbp->add_option("--reads", q_reads);
  c_qbp->add_option("--sweeps", q_sweeps);
  c_qbp->add_option("--seed", q_seed);
  c_qbp->add_option("--out", q_out);

  // ---- embed ----
  auto* c_emb = app.add_subcommand("embed", "Embed a code's objective on Chimera");
  std::string e_alist, e_out = "embedding.json", e_hw;
  double e_jferro = 8.0;
  int e_grid = 16;
  c_emb->add_option("--alist", e_alist)->required();
  c_emb->add_option("--grid", e_grid);
  c_emb->add_option("--jferro", e_jferro);
  c_emb->add_option("--out", e_out);
  c_emb->add_option("--out-hardware", e_hw);

  // ---- sample ----
  auto* c_smp = app.add_subcommand("sample", "Simulated annealing on a problem JSON");
  std::string s_problem, s_out = "sampleset.json";
  int s_reads = 100, s_sweeps = 1000;
  uint64_t s_seed = 0;
  c_smp->add_option("--problem", s_problem)->required();
  c_smp->add_option("--reads", s_reads);
  c_smp->add_option("--sweeps", s_sweeps);
  c_smp->add_option("--seed", s_seed);
  c_smp->add_option("--out", s_out);

  // ---- calibrate ----
  auto* c_cal = app.add_subcommand("calibrate", "W2 / |J_F| sweeps");
  std::string cal_config, cal_out = "w2_table.json", cal_mode = "w2";
  c_cal->add_option("--config", cal_config)->required();
  c_cal->add_option("--mode", cal_mode, "w2 | jferro");
  c_cal->add_option("--out", cal_out);

  // ---- evaluate ----
  auto* c_ev = app.add_subcommand("evaluate", "Full experiment run");
  std::string ev_config, ev_outdir;
  uint64_t ev_seed = 0;
  auto* ev_cfg_opt = c_ev->add_option("--config", ev_config)->required();
  auto* ev_out_opt = c_ev->add_option("--out-dir", ev_outdir);
  auto* ev_seed_opt = c_ev->add_option("--seed", ev_seed);
  (void)ev_cfg_opt;

  CLI11_PARSE(app, argc, argv);

  if (c_con->parsed()) {
    if (con_structured) {
      qbp::QgemCode code = qbp::build_qgem_code(con_lx, con_ly, con_e);
      qbp::save_alist(code.H, con_out);
      std::cout << "structured code N=" << code.H.cols << " M=" << code.H.rows
                << " girth=" << qbp::girth(code.H) << " -> " << con_out << "\n";
    } else {
      qbp::CodeSpec spec;
      spec.n = con_n;
      spec.bit_degree = con_bd;
      spec.check_degree = con_cd;
      spec.seed = con_seed;
      spec.target_girth = con_girth;
      spec.validate();
      qbp::ConstructionResult res = qbp::construct_regular_code(spec);
      qbp::save_alist(res.H, con_out);
      std::cout << "code N=" << res.H.cols << " M=" << res.H.rows << " girth=" << res.girth
                << (res.girth_target_met ? "" : " (target girth unmet)") << " -> " << con_out
                << "\n";
    }
    write_manifest(con_out, json{{"cmd", "construct"},
                                 {"n", con_n},
                                 {"structured", con_structured},
                                 {"lx", con_lx},
                                 {"ly", con_ly},
                                 {"ensembles", con_e},
                                 {"seed", con_seed}});
  } else if (c_enc->parsed()) {
    qbp::ParityCheckMatrix H = qbp::load_alist(enc_alist);
    auto reduced = qbp::drop_dependent_rows(H);
    qbp::GeneratorMatrix G = qbp::generator(reduced.H);
    qbp::Bits u;
    if (enc_random) {
      qbp::Rng rng(qbp::derive_seed(enc_seed, 0xe2c0ull));
      u.resize(G.k);
      for (auto& b : u) b = static_cast<uint8_t>(rng.next() & 1);
    } else {
      if (enc_message.empty()) throw ConfigError("need --message or --random");
      u = read_bits(enc_message);
      if (static_cast<int>(u.size()) != G.k)
        throw ConfigError("message length " + std::to_string(u.size()) + " != K=" +
                          std::to_string(G.k));
    }
    write_bits(qbp::encode(u, G), enc_out);
    std::cout << "encoded K=" << G.k << " -> N=" << G.n << " (" << enc_out << ")\n";
    write_manifest(enc_out,
                   json{{"cmd", "encode"}, {"alist", enc_alist}, {"seed", enc_seed},
                        {"random", enc_random}});
  } else if (c_tx->parsed()) {
    qbp::Bits c = read_bits(tx_codeword);
    qbp::ChannelConfig cc;
    cc.seed = tx_seed;
    if (tx_trace.empty()) {
      cc.mode = qbp::ChannelConfig::Mode::Awgn;
      cc.snr_db = tx_snr;
    } else {
      cc.mode = qbp::ChannelConfig::Mode::Trace;
      cc.trace_snr_db = qbp::load_trace(tx_trace);
    }
    qbp::ReceivedVector rv = qbp::transmit(qbp::modulate_bpsk(c), cc);
    qbp::save_received(rv, tx_out);
    std::cout << "transmitted " << c.size() << " symbols -> " << tx_out << "\n";
    write_manifest(tx_out, json{{"cmd", "transmit"},
                                {"codeword", tx_codeword},
                                {"snr_db", tx_snr},
                                {"trace", tx_trace},
                                {"seed", tx_seed}});
  } else if (c_bp->parsed()) {
    qbp::ParityCheckMatrix H = qbp::load_alist(bp_alist);
    qbp::ReceivedVector rv = qbp::load_received(bp_received);
    if (static_cast<int>(rv.y.size()) != H.cols)
      throw ConfigError("received length != block length");
    // per-symbol sigma2 supported through the prior directly
    std::vector<double> prior(rv.y.size());
    for (size_t i = 0; i < prior.size(); ++i) prior[i] = -2.0 * rv.y[i] / rv.sigma2[i];
    qbp::LlrState state(H, prior);
    qbp::BpResult res;
    for (int it = 0; it < bp_iters; ++it) {
      qbp::check_update(state);
      res.decoded = qbp::decide(state);
      res.iterations = it + 1;
      qbp::Bits syn = qbp::syndrome(res.decoded, H);
      if (std::all_of(syn.begin(), syn.end(), [](uint8_t b) { return b == 0; })) {
        res.converged = true;
        break;
      }
      qbp::bit_update(state);
    }
    write_bits(res.decoded, bp_out);
    std::cout << (res.converged ? "converged" : "no convergence") << " after " << res.iterations
              << " iterations -> " << bp_out << "\n";
    write_manifest(bp_out, json{{"cmd", "decode-bp"},
                                {"alist", bp_alist},
                                {"received", bp_received},
                                {"max_iters", bp_iters}});
  } else if (c_qbp->parsed()) {
    qbp::ParityCheckMatrix H = qbp::load_alist(q_alist);
    qbp::ReceivedVector rv = qbp::load_received(q_received);
    if (static_cast<int>(rv.y.size()) != H.cols)
      throw ConfigError("received length != block length");
    qbp::QbpDecoder dec(H, parse_backend(q_backend), q_jferro, q_grid);
    qbp::AnnealConfig cfg;
    cfg.num_reads = q_reads;
    cfg.sweeps = q_sweeps;
    cfg.seed = q_seed;
    auto out = dec.decode(qbp::posterior_probs(rv), {q_w1, q_w2}, cfg);
    const auto& best = out.samples.best();
    qbp::Bits decoded(H.cols);
    for (int i = 0; i < H.cols; ++i) decoded[i] = static_cast<uint8_t>(best.assignment[i]);
    write_bits(decoded, q_out);
    qbp::Bits syn = qbp::syndrome(decoded, H);
    bool valid = std::all_of(syn.begin(), syn.end(), [](uint8_t b) { return b == 0; });
    std::cout << "best energy " << best.energy << (valid ? " (valid codeword)" : " (invalid)")
              << " -> " << q_out << "\n";
    write_manifest(q_out, json{{"cmd", "decode-qbp"},
                               {"alist", q_alist},
                               {"received", q_received},
                               {"w1", q_w1},
                               {"w2", q_w2},
                               {"backend", q_backend},
                               {"jferro", q_jferro},
                               {"reads", q_reads},
                               {"sweeps", q_sweeps},
                               {"seed", q_seed}});
  } else if (c_emb->parsed()) {
    qbp::ParityCheckMatrix H = qbp::load_alist(e_alist);
    qbp::ChimeraGraph g(e_grid);
    auto [sat, plan] = qbp::build_satisfier(H);
    qbp::EmbedResult res = qbp::embed_code(sat, plan, H, g, e_jferro);
    std::ofstream out(e_out);
    if (!out) throw std::runtime_error("cannot write " + e_out);
    out << qbp::embedding_to_json(res.embedding) << "\n";
    if (!e_hw.empty()) {
      std::ofstream hw(e_hw);
      if (!hw) throw std::runtime_error("cannot write " + e_hw);
      hw << qbp::hardware_to_json(res.hardware) << "\n";
    }
    std::cout << "embedded " << H.rows << " checks, " << res.embedding.qubits_used()
              << " qubits used -> " << e_out << "\n";
    write_manifest(e_out, json{{"cmd", "embed"},
                               {"alist", e_alist},
                               {"grid", e_grid},
                               {"jferro", e_jferro}});
  } else if (c_smp->parsed()) {
    qbp::QuadraticBinaryProblem p = qbp::load_problem(s_problem);
    qbp::AnnealConfig cfg;
    cfg.num_reads = s_reads;
    cfg.sweeps = s_sweeps;
    cfg.seed = s_seed;
    qbp::SampleSet set = qbp::simulated_anneal(p, cfg);
    qbp::save_sampleset(set, s_out);
    std::cout << set.records.size() << " distinct solutions, best energy "
              << set.best().energy << " -> " << s_out << "\n";
    write_manifest(s_out, json{{"cmd", "sample"},
                               {"problem", s_problem},
                               {"reads", s_reads},
                               {"sweeps", s_sweeps},
                               {"seed", s_seed}});
  } else if (c_cal->parsed()) {
    const std::vector<std::string> keys = {
        "alist",   "structured", "lx",      "ly",    "ensembles", "n",       "code_seed",
        "snr_db",  "w2_grid",    "jf_grid", "instances", "n_a",   "backend", "w1",
        "jferro",  "grid",       "reads",   "sweeps", "seed"};
    json j = load_config(cal_config, keys);
    qbp::CalibrationConfig cc;
    cc.code.alist_path = j.value("alist", std::string());
    cc.code.structured = j.value("structured", false);
    cc.code.lx = j.value("lx", 0);
    cc.code.ly = j.value("ly", 0);
    cc.code.ensembles = j.value("ensembles", 0);
    cc.code.spec.n = j.value("n", 0);
    cc.code.spec.seed = j.value("code_seed", 1u);
    if (j.contains("snr_db")) cc.snr_db = j.at("snr_db").get<std::vector<double>>();
    if (j.contains("w2_grid")) cc.w2_grid = j.at("w2_grid").get<std::vector<double>>();
    cc.instances = j.value("instances", 50);
    cc.n_a = j.value("n_a", 10);
    cc.backend = parse_backend(j.value("backend", std::string("sa")));
    cc.w1 = j.value("w1", 1.0);
    cc.jferro = j.value("jferro", 8.0);
    cc.grid = j.value("grid", 16);
    cc.anneal.num_reads = j.value("reads", 200);
    cc.anneal.sweeps = j.value("sweeps", 500);
    cc.seed = j.value("seed", 1u);
    if (cal_mode == "w2") {
      auto table = qbp::calibrate_w2(cc);
      std::ofstream out(cal_out);
      if (!out) throw std::runtime_error("cannot write " + cal_out);
      out << qbp::w2_table_to_json(table) << "\n";
      std::cout << "W2 table with " << table.size() << " entries -> " << cal_out << "\n";
    } else if (cal_mode == "jferro") {
      std::vector<double> grid = {2.0, 4.0, 6.0, 8.0, 10.0};
      if (j.contains("jf_grid")) grid = j.at("jf_grid").get<std::vector<double>>();
      double best = qbp::calibrate_jferro(grid, cc);
      std::ofstream out(cal_out);
      if (!out) throw std::runtime_error("cannot write " + cal_out);
      out << json{{"jferro", best}}.dump(2) << "\n";
      std::cout << "best |J_F| = " << best << " -> " << cal_out << "\n";
    } else {
      throw ConfigError("unknown calibrate mode '" + cal_mode + "'");
    }
    write_manifest(cal_out, json{{"cmd", "calibrate"}, {"mode", cal_mode}, {"config", cal_config}});
  } else if (c_ev->parsed()) {
    const std::vector<std::string> keys = {
        "alist",       "structured",      "lx",        "ly",           "ensembles",
        "n",           "code_seed",       "snr_db",    "trace_snr_db", "w1",
        "w2_table",    "w2_default",      "jferro",    "backend",      "grid",
        "n_a_grid",    "t_a_us",          "reference_reads", "sweeps", "frame_bits",
        "frame_budget", "instances",      "seed",      "out_dir"};
    json j = load_config(ev_config, keys);
    qbp::ExperimentConfig ec;
    ec.code.alist_path = j.value("alist", std::string());
    ec.code.structured = j.value("structured", false);
    ec.code.lx = j.value("lx", 0);
    ec.code.ly = j.value("ly", 0);
    ec.code.ensembles = j.value("ensembles", 0);
    ec.code.spec.n = j.value("n", 0);
    ec.code.spec.seed = j.value("code_seed", 1u);
    if (j.contains("snr_db")) ec.snr_db = j.at("snr_db").get<std::vector<double>>();
    if (j.contains("trace_snr_db"))
      ec.trace_snr_db = j.at("trace_snr_db").get<std::vector<double>>();
    ec.w1 = j.value("w1", 1.0);
    if (j.contains("w2_table"))
      ec.w2_table = qbp::w2_table_from_json(j.at("w2_table").dump());
    ec.w2_default = j.value("w2_default", 1.0);
    ec.jferro = j.value("jferro", 8.0);
    ec.backend = parse_backend(j.value("backend", std::string("sa")));
    ec.grid = j.value("grid", 16);
    if (j.contains("n_a_grid")) ec.n_a_grid = j.at("n_a_grid").get<std::vector<int>>();
    ec.t_a_us = j.value("t_a_us", 1.0);
    ec.reference_reads = j.value("reference_reads", 1000);
    ec.sweeps = j.value("sweeps", 1000);
    ec.frame_bits = j.value("frame_bits", 0ll);
    ec.frame_budget = j.value("frame_budget", 100000ll);
    ec.instances = j.value("instances", 150);
    if (!j.contains("seed") && ev_seed_opt->count() == 0)
      throw ConfigError("experiment seed is mandatory (config 'seed' or --seed)");
    ec.seed = j.value("seed", 0u);
    if (ev_seed_opt->count() > 0) ec.seed = ev_seed;
    ec.out_dir = j.value("out_dir", std::string("."));
    if (ev_out_opt->count() > 0) ec.out_dir = ev_outdir;
    if (const char* env = std::getenv("QBP_OUT_DIR"); env && ev_out_opt->count() == 0)
      ec.out_dir = env;
    qbp::ExperimentResult res = qbp::run_experiment(ec);
    std::cout << "wrote " << res.ber_csv << ", " << res.fer_csv << ", " << res.instances_json
              << ", " << res.manifest_json << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", "config"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", "config"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "runtime"}, {"message", e.what()}}.dump() << "\n";
    return 3;
  }
}
