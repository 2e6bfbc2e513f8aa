#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pedebate/core_model.hpp"
#include "pedebate/rng.hpp"
#include "pedebate/strategies.hpp"

namespace pedebate {

struct ProtocolParams {
  double epsilon = 0.2;
  double rho = 0.5;
  int depth = 1;
  int width = 2;
  double reward_ratio = 0.0;    // r, always computed from epsilon and rho
  double soundness_slack = 0.0; // eta, informational
  std::uint64_t seed = 0;
  bool estimator_observes_direction = false;
  std::uint64_t branch_budget = 10'000'000;  // weighted branches for exact mode

  static ProtocolParams make(double epsilon, double rho, int depth, int width,
                             std::uint64_t seed = 0);
  double reward_pow(int k) const;  // r^k
};

struct RoundRecord {
  int level = 0;
  Query parent;
  double parent_prob = 0.0;  // p_k
  int direction = 0;         // A^k
  std::vector<Query> child_queries;
  std::vector<double> child_probs;  // conditionals at the sampled prefix
  std::vector<int> sampled_answers; // z^k
  int aggregator_value = 0;         // M_D(x, y^k, z^k)
  double reward = 0.0;              // r_k
  int recursion_index = 0;          // j, 0-based
};

struct TerminalRecord {
  Query leaf;
  std::vector<int> subset;  // S_i, 1-based
  Bits claimed_bits;        // u-tilde restricted to S_i
  int oracle_answer = 0;
  double p0 = 0.0;
  int direction = 0;  // A^0
  double reward = 0.0;
};

struct DebateRun {
  Bits input;
  std::uint64_t seed = 0;
  int initial_claim = 0;      // A(x)
  double initial_prob = 0.0;  // p_d
  int initial_sample = 0;     // z-hat
  double initial_reward = 0.0;
  std::vector<RoundRecord> rounds;  // levels d..1
  TerminalRecord terminal;
  double total_payoff = 0.0;  // R = r_init + sum_k r_k
  bool clamp_warning = false; // some estimator output was clamped to [0,1]
};

DebateRun run_debate(const ProblemWorld& world, const Decomposition& dec,
                     const ProverStrategy& A, const EstimatorStrategy& B, const Bits& x,
                     const ProtocolParams& params, CounterRng& rng);

// Exact expectation over the protocol's internal randomness, by weighted
// branch enumeration. Throws when the branch budget is exceeded.
double expected_payoff_x(const ProblemWorld& world, const Decomposition& dec,
                         const ProverStrategy& A, const EstimatorStrategy& B, const Bits& x,
                         const ProtocolParams& params);

double expected_payoff(const ProblemWorld& world, const Decomposition& dec,
                       const ProverStrategy& A, const EstimatorStrategy& B,
                       const ProtocolParams& params);

// Exact per-level reward expectations: init, rounds d..1, terminal.
struct PayoffBreakdown {
  double init = 0.0;
  std::vector<double> rounds;  // index 0 = level d, ..., back = level 1
  double terminal = 0.0;
  double total() const;
};

PayoffBreakdown expected_payoff_breakdown_x(const ProblemWorld& world, const Decomposition& dec,
                                            const ProverStrategy& A, const EstimatorStrategy& B,
                                            const Bits& x, const ProtocolParams& params);

PayoffBreakdown expected_payoff_breakdown(const ProblemWorld& world, const Decomposition& dec,
                                          const ProverStrategy& A, const EstimatorStrategy& B,
                                          const ProtocolParams& params);

struct MonteCarloSummary {
  std::size_t runs = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double half_width_3sigma = 0.0;
};

MonteCarloSummary monte_carlo_payoff(const ProblemWorld& world, const Decomposition& dec,
                                     const ProverStrategy& A, const EstimatorStrategy& B,
                                     const Bits& x, const ProtocolParams& params,
                                     std::size_t runs, std::uint64_t seed);

// Naive recursive debate: the selector picks a child per round, the leaf is
// checked against the judge directly.
using ChildSelector = std::function<int(const Bits& x, const Query& parent,
                                        const std::vector<Query>& children, int level)>;

struct NaiveOutcome {
  bool flaw_found = false;
  std::vector<Query> path;
};

NaiveOutcome run_naive_recursive_debate(const ProblemWorld& world, const Decomposition& dec,
                                        const ProverStrategy& A, const ChildSelector& select,
                                        const Bits& x);

ChildSelector uniform_random_selector(std::uint64_t seed);

// Exact flaw probability when the selector is uniform over children.
double naive_debate_flaw_probability(const ProblemWorld& world, const Decomposition& dec,
                                     const ProverStrategy& A, const Bits& x);

}  // namespace pedebate
