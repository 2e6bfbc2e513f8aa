#include "pedebate/equilibrium.hpp"

#include <algorithm>
#include <cstdlib>
#include <future>
#include <thread>

namespace pedebate {

PayoffMatrix payoff_matrix(const ProblemWorld& world, const Decomposition& dec,
                           const std::vector<ProverPtr>& provers,
                           const std::vector<EstimatorPtr>& estimators,
                           const ProtocolParams& params) {
  PayoffMatrix m;
  for (const auto& p : provers) m.provers.push_back(p->name());
  for (const auto& e : estimators) m.estimators.push_back(e->name());
  m.values.assign(provers.size(), std::vector<double>(estimators.size(), 0.0));

  struct Job {
    std::size_t row, col;
  };
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < provers.size(); ++r)
    for (std::size_t c = 0; c < estimators.size(); ++c) jobs.push_back({r, c});

  const unsigned workers = worker_count(jobs.size());
  std::atomic<std::size_t> cursor{0};
  auto run = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= jobs.size()) return;
      const auto [r, c] = jobs[i];
      m.values[r][c] = expected_payoff(world, dec, *provers[r], *estimators[c], params);
    }
  };
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  return m;
}

std::vector<StackelbergResult> stackelberg(const PayoffMatrix& matrix, double alpha) {
  require(alpha >= 0.0, "stackelberg: alpha must be >= 0");
  const std::size_t rows = matrix.provers.size();
  const std::size_t cols = matrix.estimators.size();
  require(rows > 0 && cols > 0, "stackelberg: empty matrix");

  // Follower best-response candidates per row: columns within alpha of the
  // row minimum (the follower's payoff is the negation of the leader's).
  std::vector<std::vector<int>> candidates(rows);
  std::vector<double> row_min(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double mn = matrix.at(r, 0);
    for (std::size_t c = 1; c < cols; ++c) mn = std::min(mn, matrix.at(r, c));
    row_min[r] = mn;
    for (std::size_t c = 0; c < cols; ++c)
      if (matrix.at(r, c) <= mn + alpha) candidates[r].push_back(static_cast<int>(c));
  }

  std::vector<StackelbergResult> results;
  std::vector<std::size_t> pick(rows, 0);
  for (;;) {
    std::vector<int> follower(rows);
    for (std::size_t r = 0; r < rows; ++r) follower[r] = candidates[r][pick[r]];
    double best = -1e300;
    for (std::size_t r = 0; r < rows; ++r)
      best = std::max(best, matrix.at(r, static_cast<std::size_t>(follower[r])));
    for (std::size_t r = 0; r < rows; ++r) {
      const double value = matrix.at(r, static_cast<std::size_t>(follower[r]));
      if (value >= best - alpha) {
        StackelbergResult res;
        res.alpha = alpha;
        res.leader_choice = static_cast<int>(r);
        res.follower_map = follower;
        res.leader_value = value;
        res.is_approximate_eq = true;
        results.push_back(std::move(res));
      }
    }
    // advance the selection-function counter
    std::size_t r = 0;
    while (r < rows && ++pick[r] == candidates[r].size()) {
      pick[r] = 0;
      ++r;
    }
    if (r == rows) break;
  }
  return results;
}

double prover_accuracy(const ProblemWorld& world, const ProverStrategy& A) {
  std::vector<double> terms;
  for (const Bits& x : world.inputs)
    if (A.claim(x) == world.label(x)) terms.push_back(world.mu(x));
  return terms.empty() ? 0.0 : pairwise_sum(terms);
}

AccuracyReport verify_accuracy_bound(const std::vector<StackelbergResult>& results,
                                     const ProblemWorld& world,
                                     const std::vector<ProverPtr>& provers, double epsilon) {
  AccuracyReport report;
  report.threshold = 4.0 * epsilon;
  report.all_pass = true;
  for (const auto& res : results) {
    AccuracyCheck check;
    check.leader = res.leader_choice;
    check.leader_label = provers[static_cast<std::size_t>(res.leader_choice)]->name();
    check.gamma =
        1.0 - prover_accuracy(world, *provers[static_cast<std::size_t>(res.leader_choice)]);
    check.passes = check.gamma < report.threshold;
    report.all_pass = report.all_pass && check.passes;
    report.checks.push_back(std::move(check));
  }
  if (results.empty()) report.all_pass = false;
  return report;
}

double reward_gap(const PayoffMatrix& matrix, std::size_t honest_row) {
  const std::size_t rows = matrix.provers.size();
  const std::size_t cols = matrix.estimators.size();
  require(honest_row < rows, "reward_gap: bad honest row");
  auto best_response_value = [&](std::size_t r) {
    double mn = matrix.at(r, 0);
    for (std::size_t c = 1; c < cols; ++c) mn = std::min(mn, matrix.at(r, c));
    return mn;
  };
  const double honest = best_response_value(honest_row);
  double best_other = -1e300;
  for (std::size_t r = 0; r < rows; ++r) {
    if (r == honest_row) continue;
    best_other = std::max(best_other, best_response_value(r));
  }
  if (rows == 1) return 0.0;
  return honest - best_other;
}

}  // namespace pedebate
