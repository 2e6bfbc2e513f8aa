#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pedebate/core_model.hpp"

namespace pedebate {

// Everything the prover observes when picking a direction. p_initial and
// initial_claim are public transcript data; the honest strategy's
// all-zero gate after an accurate initial estimate needs them.
struct RoundView {
  Bits x;
  Query parent;  // y-hat at this level
  int level = 0;
  double p = 0.0;          // p_k
  double p_initial = 0.0;  // p_d
  int initial_claim = 0;   // A(x)
  double epsilon = 0.0;
};

class ProverStrategy {
 public:
  virtual ~ProverStrategy() = default;
  virtual std::string name() const = 0;
  virtual int claim(const Bits& x) const = 0;
  // Def. 5.2: the prover's answer to any query in the decomposition.
  virtual int answer(const Bits& x, const Query& q) const = 0;
  virtual int direction(const RoundView& view) const = 0;  // {-1,0,+1}
  virtual std::vector<Query> decompose(const Bits& x, const Query& parent, int level) const = 0;
  // 0-based recursion index given emitted conditionals and sampled answers.
  virtual int choose_recursion(const Bits& x, const std::vector<Query>& children,
                               std::span<const double> child_probs,
                               std::span<const int> z) const = 0;
  // Context-free: a function of (x, leaf) only.
  virtual Bits proof_bits(const Bits& x, const Query& leaf) const = 0;
};

struct EstimatorView {
  Bits x;
  Query parent;
  std::vector<Query> children;
  std::vector<int> z_prefix;  // z_{<i}
  int index = 0;              // i, 0-based
  int level = 0;              // k
  double parent_p = 0.0;      // p_k
  double p_initial = 0.0;     // p_d (public transcript)
  std::optional<int> direction;  // A^k, only under the observe-direction ordering
};

class EstimatorStrategy {
 public:
  virtual ~EstimatorStrategy() = default;
  virtual std::string name() const = 0;
  virtual double initial(const Bits& x) const = 0;
  virtual double conditional(const EstimatorView& view) const = 0;
};

using ProverPtr = std::shared_ptr<const ProverStrategy>;
using EstimatorPtr = std::shared_ptr<const EstimatorStrategy>;

// Canonical strategies -------------------------------------------------

// Claims L(x), thresholds directions at epsilon, decomposes honestly,
// recurses on the most misestimated child, reports true proof bits.
ProverPtr honest_prover(std::shared_ptr<const Decomposition> dec,
                        std::shared_ptr<const ProblemWorld> world);

// Honest everywhere except the top-level claim, which is flipped.
ProverPtr flip_claim_prover(std::shared_ptr<const Decomposition> dec,
                            std::shared_ptr<const ProblemWorld> world);

// Honest claims/answers, uniformly random directions keyed by (x, query).
ProverPtr random_direction_prover(std::shared_ptr<const Decomposition> dec,
                                  std::shared_ptr<const ProblemWorld> world,
                                  std::uint64_t seed);

// Asserts every query true (claim = 1, answers = 1) over the honest
// decomposition; the interval obfuscator of the primality example.
ProverPtr asserting_prover(std::shared_ptr<const Decomposition> dec,
                           std::shared_ptr<const ProblemWorld> world);

// The truth g as a degenerate estimator.
EstimatorPtr truthful_estimator(std::shared_ptr<const Decomposition> dec,
                                std::shared_ptr<const ProblemWorld> world);
EstimatorPtr uniform_estimator();                       // p = 1/2 everywhere
EstimatorPtr anti_truth_estimator(std::shared_ptr<const Decomposition> dec,
                                  std::shared_ptr<const ProblemWorld> world);  // 1 - g
EstimatorPtr sticky_estimator();                        // repeats p_k
EstimatorPtr random_estimator(std::uint64_t seed);      // seeded probs

struct FixturePool {
  std::vector<ProverPtr> provers;
  std::vector<EstimatorPtr> estimators;
};

// Canonical adversarial pool for the acceptance suites: >=4 provers and
// >=5 estimators on the given world/decomposition.
FixturePool fixture_pool(std::shared_ptr<const Decomposition> dec,
                         std::shared_ptr<const ProblemWorld> world, std::uint64_t seed);

// Interval obfuscation fixture (primality testing). Decomposes
// "no factor of N in [2, ceil(sqrt(N))+1)" into q intervals per level.
struct IntervalFixture {
  std::shared_ptr<const ProblemWorld> world;
  std::shared_ptr<const Decomposition> dec;
  std::vector<std::uint64_t> numbers;  // N per input, aligned with world->inputs
};

IntervalFixture make_interval_fixture(const std::vector<std::uint64_t>& numbers,
                                      const std::vector<double>& mu, int width, int depth);

ProverPtr obfuscating_prover(const IntervalFixture& fixture);

bool trial_division_prime(std::uint64_t n);

}  // namespace pedebate
