#include "pedebate/strategies.hpp"

#include <algorithm>
#include <cmath>

#include "pedebate/rng.hpp"

namespace pedebate {

namespace {

int threshold_direction(double g, double p, double epsilon) {
  const double diff = g - p;
  if (diff > epsilon) return 1;
  if (diff < -epsilon) return -1;
  return 0;
}

int argmax_error(std::span<const double> probs, const std::vector<double>& targets) {
  int best = 0;
  double best_err = -1.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double err = std::fabs(probs[i] - targets[i]);
    if (err > best_err + 1e-15) {  // lowest-index tie-break
      best_err = err;
      best = static_cast<int>(i);
    }
  }
  return best;
}

Bits true_proof_bits(const ProblemWorld& world, const Decomposition& dec, const Bits& x,
                     const Query& leaf) {
  const auto& subset = dec.base_subset(leaf);
  const Bits& u = world.proof(x);
  Bits out;
  out.reserve(subset.size());
  for (int j : subset) out += u[static_cast<std::size_t>(j - 1)];
  return out;
}

class HonestProver final : public ProverStrategy {
 public:
  HonestProver(std::shared_ptr<const Decomposition> dec, std::shared_ptr<const ProblemWorld> world,
               std::string name, bool flip_claim)
      : dec_(std::move(dec)), world_(std::move(world)), name_(std::move(name)),
        flip_claim_(flip_claim) {}

  std::string name() const override { return name_; }

  int claim(const Bits& x) const override {
    const int truth = dec_->truth(x, dec_->root(x));
    return flip_claim_ ? 1 - truth : truth;
  }

  int answer(const Bits& x, const Query& q) const override { return dec_->truth(x, q); }

  int direction(const RoundView& v) const override {
    // Lemma-style gate: after an initial estimate within epsilon of the
    // claim, every later direction stays 0.
    if (std::fabs(v.p_initial - v.initial_claim) <= v.epsilon) return 0;
    return threshold_direction(dec_->truth(v.x, v.parent), v.p, v.epsilon);
  }

  std::vector<Query> decompose(const Bits& x, const Query& parent, int level) const override {
    return dec_->children(x, parent, level);
  }

  int choose_recursion(const Bits& x, const std::vector<Query>& children,
                       std::span<const double> probs, std::span<const int>) const override {
    std::vector<double> targets(children.size());
    for (std::size_t i = 0; i < children.size(); ++i)
      targets[i] = static_cast<double>(dec_->truth(x, children[i]));
    return argmax_error(probs, targets);
  }

  Bits proof_bits(const Bits& x, const Query& leaf) const override {
    return true_proof_bits(*world_, *dec_, x, leaf);
  }

 private:
  std::shared_ptr<const Decomposition> dec_;
  std::shared_ptr<const ProblemWorld> world_;
  std::string name_;
  bool flip_claim_;
};

class RandomDirectionProver final : public ProverStrategy {
 public:
  RandomDirectionProver(std::shared_ptr<const Decomposition> dec,
                        std::shared_ptr<const ProblemWorld> world, std::uint64_t seed)
      : dec_(std::move(dec)), world_(std::move(world)), seed_(seed) {}

  std::string name() const override { return "random_direction"; }
  int claim(const Bits& x) const override { return dec_->truth(x, dec_->root(x)); }
  int answer(const Bits& x, const Query& q) const override { return dec_->truth(x, q); }

  int direction(const RoundView& v) const override {
    std::uint64_t h = hash_combine(seed_, static_cast<std::uint64_t>(v.level));
    h = hash_str(h, v.x.data(), v.x.size());
    const std::string pe = v.parent.encode();
    h = hash_str(h, pe.data(), pe.size());
    return static_cast<int>(CounterRng::mix(h) % 3) - 1;
  }

  std::vector<Query> decompose(const Bits& x, const Query& parent, int level) const override {
    return dec_->children(x, parent, level);
  }

  int choose_recursion(const Bits& x, const std::vector<Query>& children,
                       std::span<const double> probs, std::span<const int>) const override {
    std::vector<double> targets(children.size());
    for (std::size_t i = 0; i < children.size(); ++i)
      targets[i] = static_cast<double>(dec_->truth(x, children[i]));
    return argmax_error(probs, targets);
  }

  Bits proof_bits(const Bits& x, const Query& leaf) const override {
    return true_proof_bits(*world_, *dec_, x, leaf);
  }

 private:
  std::shared_ptr<const Decomposition> dec_;
  std::shared_ptr<const ProblemWorld> world_;
  std::uint64_t seed_;
};

// Claims the world is entirely true and defends that story in every round.
class AssertingProver final : public ProverStrategy {
 public:
  AssertingProver(std::shared_ptr<const Decomposition> dec,
                  std::shared_ptr<const ProblemWorld> world, std::string name)
      : dec_(std::move(dec)), world_(std::move(world)), name_(std::move(name)) {}

  std::string name() const override { return name_; }
  int claim(const Bits&) const override { return 1; }
  int answer(const Bits&, const Query&) const override { return 1; }

  int direction(const RoundView& v) const override {
    if (std::fabs(v.p_initial - v.initial_claim) <= v.epsilon) return 0;
    return threshold_direction(1.0, v.p, v.epsilon);
  }

  std::vector<Query> decompose(const Bits& x, const Query& parent, int level) const override {
    return dec_->children(x, parent, level);
  }

  int choose_recursion(const Bits&, const std::vector<Query>& children,
                       std::span<const double> probs, std::span<const int>) const override {
    std::vector<double> targets(children.size(), 1.0);
    return argmax_error(probs, targets);
  }

  Bits proof_bits(const Bits&, const Query& leaf) const override {
    return Bits(dec_->base_subset(leaf).size(), '1');
  }

 private:
  std::shared_ptr<const Decomposition> dec_;
  std::shared_ptr<const ProblemWorld> world_;
  std::string name_;
};

class TruthfulEstimator final : public EstimatorStrategy {
 public:
  TruthfulEstimator(std::shared_ptr<const Decomposition> dec,
                    std::shared_ptr<const ProblemWorld> world, bool anti)
      : dec_(std::move(dec)), world_(std::move(world)), anti_(anti) {}

  std::string name() const override { return anti_ ? "anti_truth" : "truthful"; }

  double initial(const Bits& x) const override {
    const double g = static_cast<double>(world_->label(x));
    return anti_ ? 1.0 - g : g;
  }

  double conditional(const EstimatorView& v) const override {
    const double g = static_cast<double>(dec_->truth(v.x, v.children[static_cast<std::size_t>(v.index)]));
    return anti_ ? 1.0 - g : g;
  }

 private:
  std::shared_ptr<const Decomposition> dec_;
  std::shared_ptr<const ProblemWorld> world_;
  bool anti_;
};

class UniformEstimator final : public EstimatorStrategy {
 public:
  std::string name() const override { return "uniform"; }
  double initial(const Bits&) const override { return 0.5; }
  double conditional(const EstimatorView&) const override { return 0.5; }
};

class StickyEstimator final : public EstimatorStrategy {
 public:
  std::string name() const override { return "sticky"; }
  double initial(const Bits&) const override { return 0.5; }
  double conditional(const EstimatorView& v) const override { return v.parent_p; }
};

class RandomEstimator final : public EstimatorStrategy {
 public:
  explicit RandomEstimator(std::uint64_t seed) : seed_(seed) {}
  std::string name() const override { return "random_seeded"; }

  double initial(const Bits& x) const override {
    std::uint64_t h = hash_combine(seed_, 0x1d);
    h = hash_str(h, x.data(), x.size());
    return unit_from_hash(h);
  }

  double conditional(const EstimatorView& v) const override {
    std::uint64_t h = hash_combine(seed_, static_cast<std::uint64_t>(v.level) * 64 +
                                              static_cast<std::uint64_t>(v.index));
    h = hash_str(h, v.x.data(), v.x.size());
    const std::string pe = v.parent.encode();
    h = hash_str(h, pe.data(), pe.size());
    for (int b : v.z_prefix) h = hash_combine(h, static_cast<std::uint64_t>(b + 7));
    return unit_from_hash(h);
  }

 private:
  std::uint64_t seed_;
};

}  // namespace

ProverPtr honest_prover(std::shared_ptr<const Decomposition> dec,
                        std::shared_ptr<const ProblemWorld> world) {
  return std::make_shared<HonestProver>(std::move(dec), std::move(world), "honest", false);
}

ProverPtr flip_claim_prover(std::shared_ptr<const Decomposition> dec,
                            std::shared_ptr<const ProblemWorld> world) {
  return std::make_shared<HonestProver>(std::move(dec), std::move(world), "flip_claim", true);
}

ProverPtr random_direction_prover(std::shared_ptr<const Decomposition> dec,
                                  std::shared_ptr<const ProblemWorld> world, std::uint64_t seed) {
  return std::make_shared<RandomDirectionProver>(std::move(dec), std::move(world), seed);
}

ProverPtr asserting_prover(std::shared_ptr<const Decomposition> dec,
                           std::shared_ptr<const ProblemWorld> world) {
  return std::make_shared<AssertingProver>(std::move(dec), std::move(world), "obfuscating");
}

EstimatorPtr truthful_estimator(std::shared_ptr<const Decomposition> dec,
                                std::shared_ptr<const ProblemWorld> world) {
  return std::make_shared<TruthfulEstimator>(std::move(dec), std::move(world), false);
}

EstimatorPtr anti_truth_estimator(std::shared_ptr<const Decomposition> dec,
                                  std::shared_ptr<const ProblemWorld> world) {
  return std::make_shared<TruthfulEstimator>(std::move(dec), std::move(world), true);
}

EstimatorPtr uniform_estimator() { return std::make_shared<UniformEstimator>(); }
EstimatorPtr sticky_estimator() { return std::make_shared<StickyEstimator>(); }
EstimatorPtr random_estimator(std::uint64_t seed) {
  return std::make_shared<RandomEstimator>(seed);
}

FixturePool fixture_pool(std::shared_ptr<const Decomposition> dec,
                         std::shared_ptr<const ProblemWorld> world, std::uint64_t seed) {
  FixturePool pool;
  pool.provers = {honest_prover(dec, world), flip_claim_prover(dec, world),
                  asserting_prover(dec, world), random_direction_prover(dec, world, seed)};
  pool.estimators = {truthful_estimator(dec, world), uniform_estimator(),
                     anti_truth_estimator(dec, world), sticky_estimator(),
                     random_estimator(seed + 1)};
  return pool;
}

bool trial_division_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t v = 2; v * v <= n; ++v)
    if (n % v == 0) return false;
  return true;
}

namespace {

bool proper_factor_in(std::uint64_t n, std::uint64_t lo, std::uint64_t hi) {
  for (std::uint64_t v = lo; v < hi; ++v)
    if (v > 1 && v < n && n % v == 0) return true;
  return false;
}

}  // namespace

IntervalFixture make_interval_fixture(const std::vector<std::uint64_t>& numbers,
                                      const std::vector<double>& mu, int width, int depth) {
  require(numbers.size() == mu.size(), "interval fixture: |numbers| != |mu|");
  require(width >= 2 && depth >= 1, "interval fixture: need q >= 2, d >= 1");
  std::uint64_t leaves = 1;
  for (int k = 0; k < depth; ++k) leaves *= static_cast<std::uint64_t>(width);
  const std::uint64_t range_lo = 2;
  const std::uint64_t range_hi = range_lo + leaves;

  const int xbits = 20;  // numbers stay <= 1e6 at desk scale
  auto world = std::make_shared<ProblemWorld>();
  std::vector<std::uint64_t> nums;
  for (std::size_t i = 0; i < numbers.size(); ++i) {
    const std::uint64_t n = numbers[i];
    require(n < (1u << xbits), "interval fixture: number too large");
    require(n >= range_hi, "interval fixture: number inside the factor range");
    const bool prime = trial_division_prime(n);
    require(prime || proper_factor_in(n, range_lo, range_hi),
            "interval fixture: composite with no factor in range");
    const Bits x = bits_from_u64(n, xbits);
    world->inputs.push_back(x);
    world->labels[x] = prime ? 1 : 0;
    world->distribution[x] = mu[i];
    Bits u;
    for (std::uint64_t v = range_lo; v < range_hi; ++v)
      u += (v < n && n % v == 0) ? '0' : '1';  // u_j = 1: v is not a proper factor
    world->implicit_proofs[x] = u;
    nums.push_back(n);
  }
  world->oracle = OracleTable(xbits + 64);
  for (std::size_t i = 0; i < world->inputs.size(); ++i) {
    const Bits& x = world->inputs[i];
    const Bits& u = world->implicit_proofs[x];
    for (std::size_t j = 0; j < u.size(); ++j) {
      const std::vector<int> subset{static_cast<int>(j) + 1};
      // The judge trial-divides; the answer ignores the claimed content.
      const int answer = u[j] == '1' ? 1 : 0;
      for (int b = 0; b <= 1; ++b)
        world->oracle.register_entry(oracle_key(x, subset, Bits(1, b ? '1' : '0')), answer);
    }
  }
  world->validate();

  DecompositionSchedule sched;
  sched.depth = depth;
  sched.width = width;
  sched.poly_exponent = 1;

  auto span_payload = [](std::uint64_t a, std::uint64_t b) {
    return std::to_string(a) + ":" + std::to_string(b);
  };
  auto parse_payload = [](const std::string& p) {
    const auto colon = p.find(':');
    require(colon != std::string::npos, "bad interval payload " + p);
    return std::pair<std::uint64_t, std::uint64_t>{std::stoull(p.substr(0, colon)),
                                                   std::stoull(p.substr(colon + 1))};
  };

  // leaf enumeration for base subsets: leaf j covers the single integer 2 + j
  {
    std::uint64_t idx = 0;
    std::vector<int> path(static_cast<std::size_t>(depth), 0);
    for (idx = 0; idx < leaves; ++idx) {
      std::uint64_t rem = idx;
      for (int k = depth - 1; k >= 0; --k) {
        std::uint64_t stride = 1;
        for (int t = 0; t < k; ++t) stride *= static_cast<std::uint64_t>(width);
        path[static_cast<std::size_t>(depth - 1 - k)] = static_cast<int>(rem / stride);
        rem %= stride;
      }
      Query leaf{0, path, span_payload(range_lo + idx, range_lo + idx + 1)};
      sched.base_subsets[leaf.encode()] = {static_cast<int>(idx) + 1};
    }
  }

  auto query_gen = [span_payload, parse_payload, range_lo, range_hi, depth, width](
                       const Bits&, const Query& parent, int level) {
    const auto [a, b] = parent.level == depth
                            ? std::pair<std::uint64_t, std::uint64_t>{range_lo, range_hi}
                            : parse_payload(parent.payload);
    require(level == parent.level, "interval query_gen called off-level");
    const std::uint64_t step = (b - a) / static_cast<std::uint64_t>(width);
    std::vector<Query> out;
    for (int i = 0; i < width; ++i) {
      Query child{parent.level - 1, parent.path,
                  span_payload(a + step * static_cast<std::uint64_t>(i),
                               a + step * static_cast<std::uint64_t>(i + 1))};
      child.path.push_back(i);
      out.push_back(std::move(child));
    }
    return out;
  };

  auto aggregator = [](const Bits&, const std::vector<Query>&, std::span<const int> z) {
    int acc = 1;
    for (int v : z) acc &= v;
    return acc;
  };

  auto truth = [parse_payload, range_lo, range_hi, depth, xbits](const Bits& x, const Query& q) {
    std::uint64_t n = 0;
    for (char c : x) n = (n << 1) | static_cast<std::uint64_t>(c == '1');
    const auto [a, b] = q.level == depth
                            ? std::pair<std::uint64_t, std::uint64_t>{range_lo, range_hi}
                            : parse_payload(q.payload);
    (void)xbits;
    return proper_factor_in(n, a, b) ? 0 : 1;
  };

  AggregatorSpec spec;
  spec.logic = AggregatorSpec::Gate::And;
  spec.group_count = width;
  spec.group_size = 1;

  auto dec = std::make_shared<Decomposition>("interval", std::move(sched), aggregator, query_gen,
                                             truth, spec);
  dec->check_consistency(*world);
  return IntervalFixture{world, dec, nums};
}

ProverPtr obfuscating_prover(const IntervalFixture& fixture) {
  return asserting_prover(fixture.dec, fixture.world);
}

}  // namespace pedebate
