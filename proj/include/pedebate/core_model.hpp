#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pedebate/util.hpp"

namespace pedebate {

// A query in the recursion tree. Root is level d with empty path; a child
// index is appended per level going down. Payload carries fixture-specific
// content (interval bounds, wire ids, ...). The canonical encoding is the
// map key everywhere.
struct Query {
  int level = 0;
  std::vector<int> path;  // 0-based child indices from the root
  std::string payload;

  std::string encode() const;
  bool is_leaf() const { return level == 0; }
  bool operator==(const Query& o) const {
    return level == o.level && path == o.path && payload == o.payload;
  }
};

// Human-judgement oracle as a total lookup table. Unregistered keys are an
// error rather than a default answer.
class OracleTable {
 public:
  OracleTable() = default;
  explicit OracleTable(int query_width) : query_width_(query_width) {}

  void register_entry(const std::string& key, int answer);
  int lookup(const std::string& key) const;
  bool contains(const std::string& key) const { return entries_.count(key) > 0; }
  std::size_t size() const { return entries_.size(); }
  int query_width() const { return query_width_; }
  const std::map<std::string, int>& entries() const { return entries_; }

 private:
  std::map<std::string, int> entries_;  // ordered: stable serialization
  int query_width_ = 0;
};

// Canonical oracle key: the judged question names the input, the proof
// coordinates asked about, and the claimed proof content.
std::string oracle_key(const Bits& x, std::span<const int> subset, const Bits& claimed_bits);

struct ProblemWorld {
  std::vector<Bits> inputs;
  std::unordered_map<Bits, int> labels;           // L(x)
  std::unordered_map<Bits, Bits> implicit_proofs; // u per x, length m
  std::unordered_map<Bits, double> distribution;  // mu
  OracleTable oracle;

  int label(const Bits& x) const;
  const Bits& proof(const Bits& x) const;
  double mu(const Bits& x) const;
  void validate() const;  // mu sums to 1 +-1e-12, labels/proofs total
};

struct DecompositionSchedule {
  int depth = 1;          // d
  int width = 1;          // q
  int poly_exponent = 1;  // c, informational
  // leaf query encoding -> S_i, 1-based indices into the implicit proof
  std::unordered_map<std::string, std::vector<int>> base_subsets;
};

// Structural description of a round aggregator: an outer logic gate over
// `group_count` groups, each group a fan-in `group_size` majority
// (group_size == 1 means the wire passes through). Covers plain AND/OR
// trees and the gate-with-majorities rounds of the stable transform.
struct AggregatorSpec {
  enum class Gate { And, Or };
  Gate logic = Gate::And;
  int group_count = 1;  // w
  int group_size = 1;   // kappa
  int width() const { return group_count * group_size; }
  int eval(std::span<const int> z) const;
  std::string describe() const;
};

class Decomposition {
 public:
  using Aggregator =
      std::function<int(const Bits& x, const std::vector<Query>& y, std::span<const int> z)>;
  using QueryGen =
      std::function<std::vector<Query>(const Bits& x, const Query& parent, int level)>;
  using Truth = std::function<int(const Bits& x, const Query& q)>;

  Decomposition() = default;
  // memoize=false for truth functions that are already table lookups
  Decomposition(std::string name, DecompositionSchedule schedule, Aggregator aggregator,
                QueryGen query_gen, Truth truth,
                std::optional<AggregatorSpec> spec = std::nullopt, bool memoize = true);

  const std::string& name() const { return name_; }
  const DecompositionSchedule& schedule() const { return schedule_; }
  const std::optional<AggregatorSpec>& aggregator_spec() const { return spec_; }

  Query root(const Bits& x) const;
  std::vector<Query> children(const Bits& x, const Query& parent, int level) const;
  int eval_aggregator(const Bits& x, const std::vector<Query>& y, std::span<const int> z) const;
  int truth(const Bits& x, const Query& q) const;  // g, memoized
  const std::vector<int>& base_subset(const Query& leaf) const;

  // Walks the honest tree for every input and checks recursion, leaf and
  // top-level consistency against the world. Throws on violation.
  void check_consistency(const ProblemWorld& world) const;

 private:
  std::string name_;
  DecompositionSchedule schedule_;
  Aggregator aggregator_;
  QueryGen query_gen_;
  Truth truth_;
  std::optional<AggregatorSpec> spec_;
  bool memoize_ = true;
  // memo per (x, query); mutated under a lock behind the const interface
  mutable std::unordered_map<std::string, int> g_memo_;
  mutable std::shared_ptr<std::mutex> memo_lock_;
};

// The natural width-2 AND decomposition over a supplied transcript: the
// level-k query asserts that 2^k consecutive steps are correct.
Decomposition build_and_tree(const ProblemWorld& world, int transcript_len);

// Builds a world whose implicit proof per x is a supplied transcript and
// whose oracle checks each step against the reference transcript.
ProblemWorld make_transcript_world(const std::vector<Bits>& inputs,
                                   const std::vector<Bits>& supplied,
                                   const std::vector<Bits>& reference,
                                   const std::vector<double>& mu);

class ProverStrategy;  // strategies.hpp

struct ProvabilityReport {
  bool holds = true;
  double failure_prob = 0.0;
  std::vector<std::pair<Bits, std::string>> witnesses;  // (x, query encoding)
};

// Def. 5.2 check by full tree enumeration.
ProvabilityReport check_a_provable(const Decomposition& dec, const ProverStrategy& A,
                                   const ProblemWorld& world);

}  // namespace pedebate
