#include "qbp/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qbp {

void QuadraticBinaryProblem::add_linear(int i, double v) {
  if (i < 0 || i >= num_vars) throw std::out_of_range("linear index out of range");
  linear[i] += v;
}

void QuadraticBinaryProblem::add_quadratic(int i, int j, double v) {
  if (i == j) throw std::invalid_argument("self-coupler not allowed");
  if (i < 0 || j < 0 || i >= num_vars || j >= num_vars)
    throw std::out_of_range("coupler index out of range");
  if (i > j) std::swap(i, j);
  quadratic[{i, j}] += v;
}

double QuadraticBinaryProblem::energy(std::span<const int8_t> a) const {
  if (static_cast<int>(a.size()) != num_vars)
    throw std::invalid_argument("assignment does not cover all variables");
  for (int8_t v : a)
    if (!legal_value(v)) throw std::invalid_argument("illegal value for convention");
  double e = offset;
  for (int i = 0; i < num_vars; ++i) e += linear[i] * a[i];
  for (const auto& [pair, j] : quadratic) e += j * a[pair.first] * a[pair.second];
  return e;
}

int AncillaPlan::total_ancillae() const {
  int t = 0;
  for (const auto& c : checks) t += c.count;
  return t;
}

int ancilla_count(int d) {
  if (d < 2) throw std::invalid_argument("check degree must be >= 2");
  const int target = d - (d % 2);
  int t = 0;
  while ((1 << (t + 1)) - 2 < target) ++t;
  return t;
}

std::pair<QuadraticBinaryProblem, AncillaPlan> build_satisfier(const ParityCheckMatrix& H) {
  AncillaPlan plan;
  plan.num_bits = H.cols;
  int next = H.cols;
  for (int m = 0; m < H.rows; ++m) {
    int d = static_cast<int>(H.row_bits[m].size());
    if (d < 2) throw std::invalid_argument("degenerate check (degree < 2) in satisfier");
    int t = ancilla_count(d);
    // representable even half-sums: [0, 2^t - 1] must cover floor(d/2)
    if (d / 2 > (1 << t) - 1) throw std::logic_error("ancilla range cannot hold half-sum");
    plan.checks.push_back({next, t});
    next += t;
  }

  QuadraticBinaryProblem q;
  q.convention = Convention::Qubo;
  q.num_vars = next;
  q.linear.assign(next, 0.0);
  for (int m = 0; m < H.rows; ++m) {
    const auto& bits = H.row_bits[m];
    const auto& blk = plan.checks[m];
    // terms of (sum bits - 2 * sum 2^{s-1} e_s)^2 with q^2 = q
    std::vector<std::pair<int, double>> terms;
    for (int b : bits) terms.emplace_back(b, 1.0);
    for (int s = 0; s < blk.count; ++s)
      terms.emplace_back(blk.first + s, -2.0 * double(1 << s));
    for (size_t a = 0; a < terms.size(); ++a) {
      q.linear[terms[a].first] += terms[a].second * terms[a].second;  // q^2 = q
      for (size_t b = a + 1; b < terms.size(); ++b)
        q.add_quadratic(terms[a].first, terms[b].first, 2.0 * terms[a].second * terms[b].second);
    }
  }
  return {std::move(q), std::move(plan)};
}

QuadraticBinaryProblem build_distance(const std::vector<double>& p) {
  QuadraticBinaryProblem q;
  q.convention = Convention::Qubo;
  q.num_vars = static_cast<int>(p.size());
  q.linear.assign(q.num_vars, 0.0);
  for (int i = 0; i < q.num_vars; ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0))
      throw std::invalid_argument("posterior probability outside [0,1]");
    q.linear[i] = 1.0 - 2.0 * p[i];
    q.offset += p[i] * p[i];
  }
  return q;
}

QuadraticBinaryProblem assemble_objective(const QuadraticBinaryProblem& satisfier,
                                          const QuadraticBinaryProblem& distance,
                                          ObjectiveWeights w) {
  // W2 = 0 (satisfier alone) is a legitimate diagnostic configuration;
  // W1 = 0 would drop the parity constraints entirely.
  if (!(w.w1 > 0.0) || w.w2 < 0.0)
    throw std::invalid_argument("W1 must be positive and W2 non-negative");
  if (satisfier.convention != Convention::Qubo || distance.convention != Convention::Qubo)
    throw std::invalid_argument("objective assembly expects QUBO convention");
  if (distance.num_vars > satisfier.num_vars)
    throw std::invalid_argument("distance variables collide with ancilla range");
  QuadraticBinaryProblem q;
  q.convention = Convention::Qubo;
  q.num_vars = satisfier.num_vars;
  q.linear.assign(q.num_vars, 0.0);
  for (int i = 0; i < satisfier.num_vars; ++i) q.linear[i] = w.w1 * satisfier.linear[i];
  for (const auto& [pair, j] : satisfier.quadratic) q.quadratic[pair] = w.w1 * j;
  for (int i = 0; i < distance.num_vars; ++i) q.linear[i] += w.w2 * distance.linear[i];
  for (const auto& [pair, j] : distance.quadratic) q.quadratic[pair] += w.w2 * j;
  q.offset = w.w1 * satisfier.offset + w.w2 * distance.offset;
  return q;
}

QuadraticBinaryProblem qubo_to_ising(const QuadraticBinaryProblem& p) {
  if (p.convention != Convention::Qubo) throw std::invalid_argument("problem is not QUBO");
  // q = (s + 1) / 2
  QuadraticBinaryProblem out;
  out.convention = Convention::Ising;
  out.num_vars = p.num_vars;
  out.linear.assign(p.num_vars, 0.0);
  out.offset = p.offset;
  for (int i = 0; i < p.num_vars; ++i) {
    out.linear[i] += p.linear[i] / 2.0;
    out.offset += p.linear[i] / 2.0;
  }
  for (const auto& [pair, j] : p.quadratic) {
    out.quadratic[pair] += j / 4.0;
    out.linear[pair.first] += j / 4.0;
    out.linear[pair.second] += j / 4.0;
    out.offset += j / 4.0;
  }
  return out;
}

QuadraticBinaryProblem ising_to_qubo(const QuadraticBinaryProblem& p) {
  if (p.convention != Convention::Ising) throw std::invalid_argument("problem is not Ising");
  // s = 2q - 1
  QuadraticBinaryProblem out;
  out.convention = Convention::Qubo;
  out.num_vars = p.num_vars;
  out.linear.assign(p.num_vars, 0.0);
  out.offset = p.offset;
  for (int i = 0; i < p.num_vars; ++i) {
    out.linear[i] += 2.0 * p.linear[i];
    out.offset -= p.linear[i];
  }
  for (const auto& [pair, j] : p.quadratic) {
    out.quadratic[pair] += 4.0 * j;
    out.linear[pair.first] -= 2.0 * j;
    out.linear[pair.second] -= 2.0 * j;
    out.offset += j;
  }
  return out;
}

QuadraticBinaryProblem ice_perturb(const QuadraticBinaryProblem& p, double delta_h,
                                   double delta_j, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  QuadraticBinaryProblem out = p;
  for (int i = 0; i < out.num_vars; ++i)
    if (delta_h != 0.0) out.linear[i] += delta_h * gauss(rng);
  for (auto& [pair, j] : out.quadratic)
    if (delta_j != 0.0) j += delta_j * gauss(rng);
  return out;
}

double ancilla_minimized_satisfier_energy(const ParityCheckMatrix& H,
                                          std::span<const uint8_t> bits) {
  if (static_cast<int>(bits.size()) != H.cols) throw std::invalid_argument("word length != N");
  double total = 0.0;
  for (int m = 0; m < H.rows; ++m) {
    int sum = 0;
    for (int b : H.row_bits[m]) sum += bits[b] & 1;
    int t = ancilla_count(static_cast<int>(H.row_bits[m].size()));
    double best = HUGE_VAL;
    for (int le = 0; le < (1 << t); ++le) {
      double diff = sum - 2.0 * le;
      best = std::min(best, diff * diff);
    }
    total += best;
  }
  return total;
}

EnergyBandReport energy_bands(const ParityCheckMatrix& H, const GeneratorMatrix& G,
                              const std::vector<double>& p, ObjectiveWeights w,
                              int sample_size, uint64_t seed, const Bits& transmitted) {
  if (sample_size < 2) throw std::invalid_argument("need at least 2 samples per class");
  std::mt19937_64 rng(seed);
  auto dist_energy = [&](const Bits& x) {
    double e = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
      double d = x[i] - p[i];
      e += d * d;
    }
    return e;
  };
  auto total_energy = [&](const Bits& x) {
    return w.w1 * ancilla_minimized_satisfier_energy(H, x) + w.w2 * dist_energy(x);
  };

  EnergyBandReport rep;
  rep.valid_min = rep.invalid_min = HUGE_VAL;
  rep.valid_max = rep.invalid_max = -HUGE_VAL;
  bool beaten = false;
  const double et = transmitted.empty() ? HUGE_VAL : total_energy(transmitted);
  for (int s = 0; s < sample_size; ++s) {
    Bits u(G.k);
    for (auto& b : u) b = rng() & 1;
    Bits c = encode(u, G);
    double e = total_energy(c);
    rep.valid_min = std::min(rep.valid_min, e);
    rep.valid_max = std::max(rep.valid_max, e);
    if (!transmitted.empty() && c != transmitted && e <= et) beaten = true;
    ++rep.valid_count;
  }
  while (rep.invalid_count < sample_size) {
    Bits x(H.cols);
    for (auto& b : x) b = rng() & 1;
    Bits syn = syndrome(x, H);
    if (std::all_of(syn.begin(), syn.end(), [](uint8_t v) { return v == 0; })) continue;
    double e = total_energy(x);
    rep.invalid_min = std::min(rep.invalid_min, e);
    rep.invalid_max = std::max(rep.invalid_max, e);
    ++rep.invalid_count;
  }
  rep.gap_between = rep.invalid_min - rep.valid_max;
  rep.spread_valid = rep.valid_max - rep.valid_min;
  rep.spread_invalid = rep.invalid_max - rep.invalid_min;
  if (!transmitted.empty())
    rep.transmitted_is_unique_minimum = !beaten && et <= rep.valid_min && et < rep.invalid_min;
  return rep;
}

namespace {

nlohmann::json problem_json(const QuadraticBinaryProblem& p, const AncillaPlan* plan) {
  nlohmann::json j;
  j["convention"] = p.convention == Convention::Qubo ? "qubo" : "ising";
  j["num_vars"] = p.num_vars;
  auto& lin = j["linear"] = nlohmann::json::array();
  for (int i = 0; i < p.num_vars; ++i)
    if (p.linear[i] != 0.0) lin.push_back({i, p.linear[i]});
  auto& quad = j["quadratic"] = nlohmann::json::array();
  for (const auto& [pair, v] : p.quadratic) quad.push_back({pair.first, pair.second, v});
  j["offset"] = p.offset;
  if (plan) {
    nlohmann::json pj;
    pj["num_bits"] = plan->num_bits;
    auto& cj = pj["checks"] = nlohmann::json::array();
    for (const auto& c : plan->checks) cj.push_back({c.first, c.count});
    j["ancilla_plan"] = pj;
  }
  return j;
}

}  // namespace

std::string problem_to_json(const QuadraticBinaryProblem& p, const AncillaPlan* plan) {
  return problem_json(p, plan).dump(2);
}

QuadraticBinaryProblem problem_from_json(const std::string& text, AncillaPlan* plan) {
  nlohmann::json j = nlohmann::json::parse(text);
  QuadraticBinaryProblem p;
  std::string conv = j.at("convention").get<std::string>();
  if (conv == "qubo")
    p.convention = Convention::Qubo;
  else if (conv == "ising")
    p.convention = Convention::Ising;
  else
    throw std::runtime_error("unknown convention: " + conv);
  p.num_vars = j.at("num_vars").get<int>();
  if (p.num_vars < 0) throw std::runtime_error("negative num_vars");
  p.linear.assign(p.num_vars, 0.0);
  for (const auto& e : j.at("linear")) p.add_linear(e.at(0).get<int>(), e.at(1).get<double>());
  for (const auto& e : j.at("quadratic"))
    p.add_quadratic(e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>());
  p.offset = j.at("offset").get<double>();
  if (plan && j.contains("ancilla_plan")) {
    plan->num_bits = j["ancilla_plan"].at("num_bits").get<int>();
    plan->checks.clear();
    for (const auto& c : j["ancilla_plan"].at("checks"))
      plan->checks.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
  }
  return p;
}

void save_problem(const QuadraticBinaryProblem& p, const std::string& path,
                  const AncillaPlan* plan) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write problem file: " + path);
  out << problem_to_json(p, plan) << '\n';
}

QuadraticBinaryProblem load_problem(const std::string& path, AncillaPlan* plan) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return problem_from_json(ss.str(), plan);
}

}  // namespace qbp
