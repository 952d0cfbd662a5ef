#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbp/code.hpp"

namespace qbp {

enum class Convention { Qubo, Ising };

// Quadratic binary problem: sum h_i q_i + sum_{i<j} J_ij q_i q_j + offset,
// with q in {0,1} (QUBO) or {-1,+1} (Ising).
struct QuadraticBinaryProblem {
  Convention convention = Convention::Qubo;
  int num_vars = 0;
  std::vector<double> linear;                       // dense, size num_vars
  std::map<std::pair<int, int>, double> quadratic;  // keys i < j
  double offset = 0.0;

  void add_linear(int i, double v);
  void add_quadratic(int i, int j, double v);  // order-agnostic; i != j
  double energy(std::span<const int8_t> assignment) const;
  bool legal_value(int8_t v) const {
    return convention == Convention::Qubo ? (v == 0 || v == 1) : (v == -1 || v == 1);
  }
};

// Per-check ancilla block: variables [first, first+count), weight 2^{s-1}
// on the s-th ancilla. Blocks of distinct checks are disjoint.
struct AncillaPlan {
  struct CheckBlock {
    int first = 0;
    int count = 0;
  };
  int num_bits = 0;  // ancilla ids start here
  std::vector<CheckBlock> checks;
  int total_ancillae() const;
};

struct ObjectiveWeights {
  double w1 = 1.0;
  double w2 = 1.0;
};

// t = min n with 2^{n+1} - 2 >= d - (d mod 2)
int ancilla_count(int check_degree);

// Sum over checks of (sum of participating bits - 2 * L_e)^2, expanded
// over binary variables with q^2 = q. Variables 0..N-1 are the code bits,
// ancillae follow per the returned plan.
std::pair<QuadraticBinaryProblem, AncillaPlan> build_satisfier(const ParityCheckMatrix& H);

// Per-bit (q_i - p_i)^2: bias (1 - 2 p_i), offset p_i^2. Biases only.
QuadraticBinaryProblem build_distance(const std::vector<double>& p);

QuadraticBinaryProblem assemble_objective(const QuadraticBinaryProblem& satisfier,
                                          const QuadraticBinaryProblem& distance,
                                          ObjectiveWeights w);

QuadraticBinaryProblem qubo_to_ising(const QuadraticBinaryProblem& p);
QuadraticBinaryProblem ising_to_qubo(const QuadraticBinaryProblem& p);

// Gaussian bias/coupler perturbation with the given scales; deterministic
// per seed. Models analog control error.
QuadraticBinaryProblem ice_perturb(const QuadraticBinaryProblem& p, double delta_h,
                                   double delta_j, uint64_t seed);

// Satisfier energy of a bit assignment minimized over the ancillae
// (separable per check).
double ancilla_minimized_satisfier_energy(const ParityCheckMatrix& H,
                                          std::span<const uint8_t> bits);

struct EnergyBandReport {
  int valid_count = 0;
  int invalid_count = 0;
  double valid_min = 0, valid_max = 0;
  double invalid_min = 0, invalid_max = 0;
  double gap_between = 0;   // invalid_min - valid_max
  double spread_valid = 0;  // valid_max - valid_min
  double spread_invalid = 0;
  bool transmitted_is_unique_minimum = false;
};

// Samples valid codewords through the encoder and random invalid words,
// ancilla-minimizes W1*satisfier + W2*distance for each, and reports the
// band statistics. `p` is the per-bit posterior used by the distance term
// (empty = satisfier only), `transmitted` may be empty.
EnergyBandReport energy_bands(const ParityCheckMatrix& H, const GeneratorMatrix& G,
                              const std::vector<double>& p, ObjectiveWeights w,
                              int sample_size, uint64_t seed,
                              const Bits& transmitted = {});

// JSON problem payload (the stand-in for a remote annealer submission):
// {convention, num_vars, linear:[[i,h]], quadratic:[[i,j,J]], offset,
//  ancilla_plan?}
std::string problem_to_json(const QuadraticBinaryProblem& p, const AncillaPlan* plan = nullptr);
QuadraticBinaryProblem problem_from_json(const std::string& text, AncillaPlan* plan = nullptr);
void save_problem(const QuadraticBinaryProblem& p, const std::string& path,
                  const AncillaPlan* plan = nullptr);
QuadraticBinaryProblem load_problem(const std::string& path, AncillaPlan* plan = nullptr);

}  // namespace qbp
