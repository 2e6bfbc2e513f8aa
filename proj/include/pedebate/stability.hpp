#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pedebate/core_model.hpp"

namespace pedebate {

// Distribution over noisy judgement oracles: each base query gets s
// independent evidence queries, each flipped with probability flip_prob.
// With independent = false a single common-cause flip per base query is
// shared by all its evidence (negative control).
struct EvidenceModel {
  std::vector<std::string> base_queries;  // base query ids, one per original oracle query
  int support = 1;                        // s evidence queries per base query
  double flip_prob = 0.0;                 // e
  bool independent = true;

  // Noisy answer of evidence query (base b, copy j) under randomness seed r.
  int evidence_answer(int truth_bit, int base_index, int copy_index, std::uint64_t r) const;
  void validate() const;
  bool certified_regime(double epsilon, int n_bits) const;  // e <= eps/(4n)
};

struct CircuitGate {
  enum class Kind { Input, And, Or, Maj };
  Kind kind = Kind::Input;
  int layer = 0;
  std::vector<int> fan_in;  // gate ids
};

struct LayeredCircuit {
  std::vector<CircuitGate> gates;
  int output = -1;
  int depth = 0;  // rounds of (majority, logic) pairs

  int eval(std::span<const int> inputs) const;
  void validate() const;  // majority fan-in odd, DAG respects layer order
  std::size_t input_count() const;
};

struct StabilityReport {
  bool stable = false;
  double worst_gap = 0.0;
  double threshold = 0.0;          // rho * epsilon
  std::vector<double> witness;     // perturbed probabilities achieving worst_gap
  std::string method;              // extreme-points | grid | monte-carlo
  std::string aggregator;
};

using AggregatorFn = std::function<int(std::span<const int>)>;

struct StabilityOptions {
  bool monotone = false;     // enables the exact extreme-point method
  int grid_limit_q = 12;     // sign-pattern grid cutoff
  int monte_carlo = 512;     // extra random perturbations for the fallback
  std::uint64_t seed = 2024;
};

// Def. 5.3 check at reference probabilities p (prefix-independent). The
// worst gap is reported at perturbation radius exactly epsilon: the open
// ball's supremum equals the closed ball value by continuity.
StabilityReport check_stability(const AggregatorFn& aggregator, int q, std::span<const double> p,
                                double epsilon, double rho, const StabilityOptions& opts = {});

StabilityReport check_stability(const AggregatorSpec& spec, std::span<const double> p,
                                double epsilon, double rho);

// Smallest odd integer > 3 at or above 3*ln(2w/eps) / ln(1/(6*eps*(1-3*eps/2))).
int kappa_for(int w, double epsilon);

struct StableTransformConfig {
  double epsilon = 0.1;
  int poly_exponent = 1;  // c, informational
  int w = 1;              // logic-layer fan-in
  int kappa = 0;          // 0 = kappa_for(w, epsilon)
  int depth = 1;          // d
  int seeds_per_input = 1;
  std::uint64_t seed_base = 1;
  int input_bits = 16;    // n for the e <= eps/(4n) regime check
};

// Base world for the transform: each x carries one truth bit per base
// query; L(x) is the AND-tree of those bits (w-ary, depth d).
struct SupportedBaseWorld {
  std::vector<Bits> inputs;
  std::vector<std::vector<int>> base_truths;  // per x, w^d bits
  std::vector<double> mu;
};

struct StableTransform {
  std::shared_ptr<ProblemWorld> world_prime;      // instances (x, r)
  std::shared_ptr<Decomposition> dec_prime;       // q = w*kappa per round
  LayeredCircuit circuit;
  EvidenceModel evidence;
  StableTransformConfig config;
  SupportedBaseWorld base;
  std::vector<std::pair<int, std::uint64_t>> instances;  // (x index, r seed) per input

  // L'(x, r) evaluated directly, without registering a world instance.
  int transformed_label(int x_index, std::uint64_t r) const;
  // Original label from the base truths (the w-ary AND tree, no noise).
  int base_label(int x_index) const;
};

StableTransform stable_transform(const SupportedBaseWorld& base, const EvidenceModel& ev,
                                 const StableTransformConfig& cfg);

struct TransformCertificate {
  StabilityReport worst;                    // at evidence-induced probabilities
  StabilityReport worst_deterministic;      // at 0/1 reference probabilities
  std::vector<StabilityReport> per_round;
  bool stable = false;
};

// Runs check_stability on every distinct round aggregator of the
// transformed decomposition at the evidence-induced truth probabilities.
TransformCertificate certify_transformed_stability(const StableTransform& tr, double epsilon,
                                                   double rho = 0.5);

}  // namespace pedebate
