#pragma once

#include <atomic>
#include <mutex>
#include <thread>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pedebate/core_model.hpp"
#include "pedebate/protocol.hpp"
#include "pedebate/strategies.hpp"

namespace pedebate {

// One element of a round distribution mu_k: everything that is public when
// the estimator commits its probabilities at level k. Init contexts carry
// only (x); the initial probability is what the model being built defines.
struct RoundContext {
  Bits x;
  Query parent;                 // y-hat^k (root at init)
  std::vector<Query> children;  // y^k (empty at init)
  double parent_p = 0.0;        // p_k
  double p_initial = 0.0;       // p_d
  int level = 0;                // k; depth+1 marks the init level
  bool is_init = false;
  int row_id = -1;  // index into the distribution support

  std::string key() const;
};

struct RoundDistribution {
  std::vector<RoundContext> support;  // row_id == position
  std::vector<double> weight;         // sums to 1 +- 1e-12
  void validate() const;
};

// h (or g): one probability vector over Z = {0,1}^q per context.
struct OutcomeModel {
  int outcome_width = 1;  // q
  std::vector<std::vector<double>> rows;
  std::unordered_map<std::string, int> index;  // context key -> row id

  std::size_t z_size() const { return static_cast<std::size_t>(1) << outcome_width; }
  std::span<const double> row(int row_id) const { return rows[static_cast<std::size_t>(row_id)]; }
  const std::vector<double>* find(const std::string& key) const;
  static OutcomeModel uniform(const RoundDistribution& mu, int q);
};

// z index <-> bits: child i is bit i of the index.
inline int z_bit(int zidx, int i) { return (zidx >> i) & 1; }

// Pr[z_i = 1 | z_{<i} = prefix of zidx] under `row`. Returns fallback on a
// zero-probability prefix and bumps *fallbacks when provided.
double conditional_from_row(std::span<const double> row, int q, int zidx, int i,
                            std::atomic<std::uint64_t>* fallbacks = nullptr);

struct TestFunction {
  std::string label;
  bool depends_on_dist = true;
  // Fills values f(ctx, z, dist) for every z at once.
  std::function<void(const RoundContext&, std::span<const double> dist, std::span<double> out)>
      fill;
};

double advantage(const TestFunction& f, const OutcomeModel& h, const OutcomeModel& g,
                 const RoundDistribution& mu);

struct OGDConfig {
  double delta = 0.05;
  double diameter = 2.0;       // D
  double grad_bound = 0.0;     // G; 0 = default 2*sqrt(|Z|)
  std::uint64_t max_iters = 0; // 0 = ceil(36*|Z|/delta^2)
  bool record_trace = true;
  std::size_t trace_cap = 1u << 22;

  double resolved_grad_bound(std::size_t z_size) const;
  std::uint64_t resolved_max_iters(std::size_t z_size) const;
};

struct TraceStep {
  std::uint64_t t = 0;
  int test = 0;  // index into the family
  double adv = 0.0;
  double eta = 0.0;
};

struct OgdResult {
  OutcomeModel h;
  std::uint64_t iterations = 0;
  std::vector<TraceStep> trace;
  bool trace_complete = true;
  double sum_abs_adv = 0.0;  // sum over steps of |Adv_t|, for regret checks
  std::uint64_t test_evaluations = 0;

  // Average replayed loss (1/T) * sum |Adv_t|; 0 when no steps ran.
  double average_loss() const;
};

// Euclidean projection onto the probability simplex (sort-based).
std::vector<double> project_to_simplex(std::span<const double> v);
void project_to_simplex_inplace(std::span<double> v, std::span<double> scratch);

// Thrown when the 36|Z|/delta^2 bound is exhausted; carries the partial
// run so the trace can be inspected.
struct ogd_bound_error : contract_error {
  explicit ogd_bound_error(const std::string& msg, OgdResult partial_run)
      : contract_error(msg), partial(std::move(partial_run)) {}
  OgdResult partial;
};

// Algorithm: start from uniform, step with the first test whose advantage
// reaches delta, project, stop when none does. Throws if the iteration
// bound 36*|Z|/delta^2 is exhausted (a regret-bound violation).
OgdResult ogd_build(const RoundDistribution& mu, const OutcomeModel& g,
                    const std::vector<TestFunction>& family, const OGDConfig& cfg);

// The soundness proof's test family for one level. Level depth+1 denotes
// the init family {r_init, consistency}; levels d..2 give {r_k, f_k}; level
// 1 additionally carries the terminal reward, whose data lives in the last
// sampled round.
std::vector<TestFunction> canonical_family(const ProverStrategy& A, const Decomposition& dec,
                                           const ProblemWorld& world,
                                           const ProtocolParams& params, int level);

struct OgdEstimatorAudit {
  std::vector<std::uint64_t> iterations_per_level;  // init, d, d-1, ..., 1
  std::uint64_t total_test_evaluations = 0;
  std::uint64_t conditional_fallbacks = 0;
  std::uint64_t context_misses = 0;
};

struct BuiltEstimator {
  EstimatorPtr estimator;
  std::shared_ptr<OgdEstimatorAudit> audit;
  std::vector<OgdResult> levels;  // init first, then d..1
};

// The canonical members state their bounds in mu-average, which lets mass
// cancel across contexts; the richer family adds per-context restrictions
// and truth-prefix margin tests (all small circuits querying A), closing
// that channel. Canonical-only mode keeps the bare proof family.
enum class FamilyMode { canonical, enriched };

// Per-context restrictions and per-child margin tests on top of the
// canonical members, sized to the given support.
std::vector<TestFunction> enriched_round_family(const ProverStrategy& A, const Decomposition& dec,
                                                const ProblemWorld& world,
                                                const ProtocolParams& params, int level,
                                                std::size_t rows);

// Lemma A.2 construction: per-level models built top-down on the exact
// round distributions induced by A and the already-built higher levels.
BuiltEstimator build_ogd_estimator(const ProblemWorld& world, const Decomposition& dec,
                                   const ProverPtr& A, const ProtocolParams& params, double delta,
                                   const OGDConfig& base_cfg = OGDConfig{},
                                   FamilyMode mode = FamilyMode::enriched);

// One estimator per prover; builds run in parallel (PEDEBATE_THREADS caps
// the worker count), results ordered like the input pool.
std::vector<BuiltEstimator> build_ogd_estimators(const ProblemWorld& world,
                                                 const Decomposition& dec,
                                                 const std::vector<ProverPtr>& provers,
                                                 const ProtocolParams& params, double delta,
                                                 const OGDConfig& base_cfg = OGDConfig{},
                                                 FamilyMode mode = FamilyMode::enriched);

}  // namespace pedebate
