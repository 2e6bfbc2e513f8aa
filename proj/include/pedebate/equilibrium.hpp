#pragma once

#include <string>
#include <vector>

#include "pedebate/protocol.hpp"
#include "pedebate/strategies.hpp"

namespace pedebate {

struct PayoffMatrix {
  std::vector<std::string> provers;     // row labels (leader)
  std::vector<std::string> estimators;  // column labels (follower)
  std::vector<std::vector<double>> values;  // leader payoff E_mu[V]

  double at(std::size_t row, std::size_t col) const { return values[row][col]; }
};

// Exact leader payoffs for every (prover, estimator) pair. Entries are
// independent; computation parallelizes across them (PEDEBATE_THREADS caps
// the worker count).
PayoffMatrix payoff_matrix(const ProblemWorld& world, const Decomposition& dec,
                           const std::vector<ProverPtr>& provers,
                           const std::vector<EstimatorPtr>& estimators,
                           const ProtocolParams& params);

struct StackelbergResult {
  double alpha = 0.0;
  int leader_choice = -1;            // row index
  std::vector<int> follower_map;     // column per row
  double leader_value = 0.0;
  bool is_approximate_eq = true;
};

// Enumerates every (leader row, follower selection function) pair meeting
// both alpha conditions; the follower minimizes the leader payoff.
std::vector<StackelbergResult> stackelberg(const PayoffMatrix& matrix, double alpha);

struct AccuracyCheck {
  int leader = -1;
  std::string leader_label;
  double gamma = 0.0;  // Pr_mu[A(x) != L(x)]
  bool passes = false; // gamma < 4*epsilon
};

struct AccuracyReport {
  std::vector<AccuracyCheck> checks;
  bool all_pass = false;
  double threshold = 0.0;  // 4*epsilon
};

AccuracyReport verify_accuracy_bound(const std::vector<StackelbergResult>& results,
                                     const ProblemWorld& world,
                                     const std::vector<ProverPtr>& provers, double epsilon);

// Honest-row advantage under best response: the training-signal gap.
double reward_gap(const PayoffMatrix& matrix, std::size_t honest_row);

double prover_accuracy(const ProblemWorld& world, const ProverStrategy& A);  // Pr[A=L]

}  // namespace pedebate
