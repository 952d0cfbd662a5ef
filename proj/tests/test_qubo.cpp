#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "qbp/channel.hpp"
#include "qbp/code.hpp"
#include "qbp/qubo.hpp"
#include "qbp/rng.hpp"

using namespace qbp;

namespace {

ParityCheckMatrix single_check3() {
  return ParityCheckMatrix::from_entries(1, 3, {{0, 0}, {0, 1}, {0, 2}});
}

// independent oracle: fix the code bits, enumerate every joint ancilla
// assignment through the problem's own energy()
double brute_force_min_over_ancillae(const QuadraticBinaryProblem& p, const AncillaPlan& plan,
                                     const Bits& bits) {
  const int t = p.num_vars - plan.num_bits;
  std::vector<int8_t> a(p.num_vars, 0);
  for (int i = 0; i < plan.num_bits; ++i) a[i] = static_cast<int8_t>(bits[i]);
  double best = 1e300;
  for (uint32_t mask = 0; mask < (uint32_t(1) << t); ++mask) {
    for (int s = 0; s < t; ++s) a[plan.num_bits + s] = static_cast<int8_t>((mask >> s) & 1);
    best = std::min(best, p.energy(a));
  }
  return best;
}

}  // namespace

TEST_CASE("ancilla_count reproduces Table 2") {
  CHECK(ancilla_count(2) == 1);
  CHECK(ancilla_count(3) == 1);
  for (int d = 4; d <= 7; ++d) CHECK(ancilla_count(d) == 2);
  for (int d = 8; d <= 15; ++d) CHECK(ancilla_count(d) == 3);
  for (int d = 16; d <= 31; ++d) CHECK(ancilla_count(d) == 4);
  // the defining minimization, evaluated directly
  for (int d = 3; d <= 31; ++d) {
    int need = d - (d % 2);
    int t = 0;
    while ((2 << t) - 2 < need) ++t;
    CHECK(ancilla_count(d) == t);
  }
  CHECK_THROWS_AS(ancilla_count(1), std::invalid_argument);
}

TEST_CASE("degree-3 satisfier expansion coefficients") {
  auto [p, plan] = build_satisfier(single_check3());
  REQUIRE(p.num_vars == 4);
  CHECK(plan.num_bits == 3);
  REQUIRE(plan.checks.size() == 1);
  CHECK(plan.checks[0].first == 3);
  CHECK(plan.checks[0].count == 1);
  CHECK(plan.total_ancillae() == 1);
  CHECK(p.offset == 0.0);
  for (int i = 0; i < 3; ++i) CHECK(p.linear[i] == doctest::Approx(1.0));
  CHECK(p.linear[3] == doctest::Approx(4.0));
  CHECK(p.quadratic.at({0, 1}) == doctest::Approx(2.0));
  CHECK(p.quadratic.at({0, 2}) == doctest::Approx(2.0));
  CHECK(p.quadratic.at({1, 2}) == doctest::Approx(2.0));
  for (int i = 0; i < 3; ++i) CHECK(p.quadratic.at({i, 3}) == doctest::Approx(-4.0));
}

TEST_CASE("satisfier hand energies") {
  auto [p, plan] = build_satisfier(single_check3());
  CHECK(p.energy(std::vector<int8_t>{1, 1, 0, 1}) == doctest::Approx(0.0));
  CHECK(brute_force_min_over_ancillae(p, plan, {1, 0, 0}) == doctest::Approx(1.0));
}

TEST_CASE("satisfier energy is 0 iff codeword, else >= violated checks") {
  CodeSpec spec;
  spec.n = 9;
  spec.seed = 21;
  auto H = construct_regular_code(spec).H;
  auto [p, plan] = build_satisfier(H);
  for (uint32_t word = 0; word < (1u << H.cols); ++word) {
    Bits x(H.cols);
    for (int i = 0; i < H.cols; ++i) x[i] = (word >> i) & 1;
    double e = ancilla_minimized_satisfier_energy(H, x);
    CHECK(e == doctest::Approx(brute_force_min_over_ancillae(p, plan, x)).epsilon(1e-12));
    Bits s = syndrome(x, H);
    int violated = 0;
    for (uint8_t b : s) violated += b;
    if (violated == 0)
      CHECK(e == doctest::Approx(0.0));
    else
      CHECK(e >= violated - 1e-9);
  }
}

TEST_CASE("distance expansion") {
  auto d = build_distance({0.5, 1.0, 0.8808});
  CHECK(d.quadratic.empty());
  CHECK(d.linear[0] == doctest::Approx(0.0));
  CHECK(d.linear[1] == doctest::Approx(-1.0));
  CHECK(d.linear[2] == doctest::Approx(-0.7616));
  CHECK(d.offset == doctest::Approx(0.25 + 1.0 + 0.7758).epsilon(1e-4));
  // Delta at q=0 is the offset share, at q=1 bias + offset share
  CHECK(d.energy(std::vector<int8_t>{0, 1, 1}) ==
        doctest::Approx(0.25 + 0.0 + (1 - 0.8808) * (1 - 0.8808)));
  CHECK_THROWS_AS(build_distance({1.2}), std::invalid_argument);
  CHECK_THROWS_AS(build_distance({-0.1}), std::invalid_argument);
}

TEST_CASE("distance prefers the likelier bit value") {
  Rng rng(40);
  for (int i = 0; i < 200; ++i) {
    double p = rng.uniform();
    if (p == 0.5) continue;
    auto d = build_distance({p});
    double e0 = d.energy(std::vector<int8_t>{0});
    double e1 = d.energy(std::vector<int8_t>{1});
    if (p > 0.5)
      CHECK(e1 < e0);
    else
      CHECK(e0 < e1);
  }
}

TEST_CASE("assemble_objective is the weighted sum") {
  CodeSpec spec;
  spec.n = 12;
  spec.seed = 31;
  auto H = construct_regular_code(spec).H;
  auto [sat, plan] = build_satisfier(H);
  Rng rng(77);
  std::vector<double> probs(H.cols);
  for (auto& p : probs) p = rng.uniform();
  auto dist = build_distance(probs);
  ObjectiveWeights w{1.0, 0.35};
  auto obj = assemble_objective(sat, dist, w);
  REQUIRE(obj.num_vars == sat.num_vars);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int8_t> a(obj.num_vars);
    for (auto& v : a) v = static_cast<int8_t>(rng.next() & 1);
    std::vector<int8_t> bits(a.begin(), a.begin() + H.cols);
    CHECK(obj.energy(a) ==
          doctest::Approx(w.w1 * sat.energy(a) + w.w2 * dist.energy(bits)).epsilon(1e-12));
  }
  // W2 = 0 reduces to the satisfier alone
  auto sat_only = assemble_objective(sat, dist, {1.0, 0.0});
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int8_t> a(obj.num_vars);
    for (auto& v : a) v = static_cast<int8_t>(rng.next() & 1);
    CHECK(sat_only.energy(a) == doctest::Approx(sat.energy(a)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(assemble_objective(sat, dist, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(assemble_objective(sat, dist, {1.0, -0.5}), std::invalid_argument);
}

TEST_CASE("energy hand cases") {
  QuadraticBinaryProblem ising;
  ising.convention = Convention::Ising;
  ising.num_vars = 2;
  ising.linear.assign(2, 0.0);
  ising.add_quadratic(0, 1, 1.0);
  CHECK(ising.energy(std::vector<int8_t>{-1, 1}) == doctest::Approx(-1.0));
  ising.quadratic[{0, 1}] = -1.0;
  CHECK(ising.energy(std::vector<int8_t>{-1, -1}) == doctest::Approx(-1.0));

  QuadraticBinaryProblem q;
  q.num_vars = 3;
  q.linear.assign(3, 2.0);
  q.offset = 1.25;
  CHECK(q.energy(std::vector<int8_t>{0, 0, 0}) == doctest::Approx(1.25));
  CHECK_THROWS(q.energy(std::vector<int8_t>{0, 0}));            // missing variable
  CHECK_THROWS(q.energy(std::vector<int8_t>{0, 0, -1}));        // illegal for QUBO
  CHECK_THROWS(ising.energy(std::vector<int8_t>{0, 1}));        // illegal for Ising
}

TEST_CASE("qubo/ising conversions agree pointwise") {
  Rng rng(505);
  for (int trial = 0; trial < 20; ++trial) {
    QuadraticBinaryProblem q;
    q.num_vars = 8;
    q.linear.assign(8, 0.0);
    for (auto& h : q.linear) h = rng.gaussian();
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j)
        if (rng.next() & 1) q.add_quadratic(i, j, rng.gaussian());
    q.offset = rng.gaussian();

    auto ising = qubo_to_ising(q);
    CHECK(ising.convention == Convention::Ising);
    auto back = ising_to_qubo(ising);
    for (int i = 0; i < 8; ++i) CHECK(back.linear[i] == doctest::Approx(q.linear[i]).epsilon(1e-12));
    for (const auto& [k, v] : q.quadratic)
      CHECK(back.quadratic.at(k) == doctest::Approx(v).epsilon(1e-12));
    CHECK(back.offset == doctest::Approx(q.offset).epsilon(1e-12));

    for (int a = 0; a < 50; ++a) {
      std::vector<int8_t> qa(8), sa(8);
      for (int i = 0; i < 8; ++i) {
        qa[i] = static_cast<int8_t>(rng.next() & 1);
        sa[i] = static_cast<int8_t>(2 * qa[i] - 1);
      }
      CHECK(q.energy(qa) == doctest::Approx(ising.energy(sa)).epsilon(1e-9));
    }
  }
  // zero problem maps to zero problem
  QuadraticBinaryProblem z;
  z.num_vars = 3;
  z.linear.assign(3, 0.0);
  auto zi = qubo_to_ising(z);
  for (double h : zi.linear) CHECK(h == 0.0);
  CHECK(zi.quadratic.empty());
  CHECK(zi.offset == 0.0);
}

TEST_CASE("ice_perturb") {
  auto [p, plan] = build_satisfier(single_check3());
  auto same = ice_perturb(p, 0.0, 0.0, 9);
  CHECK(same.linear == p.linear);
  CHECK(same.quadratic == p.quadratic);
  auto a = ice_perturb(p, 1e-2, 1e-2, 9);
  auto b = ice_perturb(p, 1e-2, 1e-2, 9);
  CHECK(a.linear == b.linear);
  CHECK(a.quadratic == b.quadratic);
  auto c = ice_perturb(p, 1e-2, 1e-2, 10);
  CHECK(a.linear != c.linear);
  // Gaussian tails: deviations bounded by 6 sigma over many draws
  QuadraticBinaryProblem big;
  big.num_vars = 500000;
  big.linear.assign(big.num_vars, 0.0);
  for (int i = 0; i + 1 < big.num_vars; i += 2) big.add_quadratic(i, i + 1, 0.0);
  auto noisy = ice_perturb(big, 1e-2, 1e-2, 4242);
  double max_h = 0, max_j = 0;
  for (double h : noisy.linear) max_h = std::max(max_h, std::abs(h));
  for (const auto& [k, v] : noisy.quadratic) max_j = std::max(max_j, std::abs(v));
  CHECK(max_h > 0);
  CHECK(max_h <= 6e-2);
  CHECK(max_j <= 6e-2);
}

TEST_CASE("bit-restricted minimizer equals the distance-minimal codeword") {
  // exhaustive N<=12 oracle with W1 dominating the distance spread
  CodeSpec spec;
  spec.n = 12;
  spec.seed = 13;
  auto H = construct_regular_code(spec).H;
  auto G = generator(drop_dependent_rows(H).H);
  auto words = all_codewords(G);
  Rng rng(808);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> probs(H.cols);
    for (auto& p : probs) p = rng.uniform();
    ObjectiveWeights w{1.0, 0.05};
    double best_obj = 1e300, best_dist = 1e300;
    Bits arg_obj, arg_dist;
    for (uint32_t word = 0; word < (1u << H.cols); ++word) {
      Bits x(H.cols);
      for (int i = 0; i < H.cols; ++i) x[i] = (word >> i) & 1;
      double dsum = 0;
      for (int i = 0; i < H.cols; ++i) dsum += (x[i] - probs[i]) * (x[i] - probs[i]);
      double e = w.w1 * ancilla_minimized_satisfier_energy(H, x) + w.w2 * dsum;
      if (e < best_obj - 1e-12) {
        best_obj = e;
        arg_obj = x;
      }
    }
    for (const auto& c : words) {
      double dsum = 0;
      for (int i = 0; i < H.cols; ++i) dsum += (c[i] - probs[i]) * (c[i] - probs[i]);
      if (dsum < best_dist - 1e-12) {
        best_dist = dsum;
        arg_dist = c;
      }
    }
    CHECK(arg_obj == arg_dist);
  }
}

TEST_CASE("energy bands separate valid and invalid words") {
  CodeSpec spec;
  spec.n = 15;
  spec.seed = 44;
  auto H = construct_regular_code(spec).H;
  auto G = generator(drop_dependent_rows(H).H);

  auto r0 = energy_bands(H, G, {}, {1.0, 0.0}, 20, 71);
  CHECK(r0.valid_count == 20);
  CHECK(r0.invalid_count == 20);
  CHECK(r0.valid_min == doctest::Approx(0.0));
  CHECK(r0.valid_max == doctest::Approx(0.0));
  CHECK(r0.invalid_min > 0.0);

  auto r2 = energy_bands(H, G, {}, {2.0, 0.0}, 20, 71);
  CHECK(r2.gap_between == doctest::Approx(2.0 * r0.gap_between).epsilon(1e-9));

  // zero noise: transmitted word is the unique band minimum
  Bits u(G.k, 0);
  u[0] = 1;
  Bits c = encode(u, G);
  std::vector<double> p(H.cols);
  for (int i = 0; i < H.cols; ++i) p[i] = c[i] ? 0.95 : 0.05;
  auto rt = energy_bands(H, G, p, {1.0, 0.1}, 20, 71, c);
  CHECK(rt.transmitted_is_unique_minimum);

  CHECK_THROWS_AS(energy_bands(H, G, {}, {1.0, 0.0}, 1, 71), std::invalid_argument);
}

TEST_CASE("problem JSON round trip") {
  CodeSpec spec;
  spec.n = 9;
  spec.seed = 3;
  auto H = construct_regular_code(spec).H;
  auto [p, plan] = build_satisfier(H);
  p.offset = 0.625;
  std::string text = problem_to_json(p, &plan);
  AncillaPlan plan2;
  auto q = problem_from_json(text, &plan2);
  CHECK(q.convention == p.convention);
  CHECK(q.num_vars == p.num_vars);
  CHECK(q.linear == p.linear);
  CHECK(q.quadratic == p.quadratic);
  CHECK(q.offset == p.offset);
  CHECK(plan2.num_bits == plan.num_bits);
  REQUIRE(plan2.checks.size() == plan.checks.size());
  for (size_t i = 0; i < plan.checks.size(); ++i) {
    CHECK(plan2.checks[i].first == plan.checks[i].first);
    CHECK(plan2.checks[i].count == plan.checks[i].count);
  }
  std::string path = "test_qubo_problem.json";
  save_problem(p, path, &plan);
  auto r = load_problem(path);
  CHECK(r.linear == p.linear);
  std::remove(path.c_str());
  CHECK_THROWS(problem_from_json("{not json"));
}
