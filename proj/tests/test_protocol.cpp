#include <cmath>

#include "doctest.h"
#include "pedebate/protocol.hpp"
#include "pedebate/serialize.hpp"

using namespace pedebate;

namespace {

struct AndTreeT2 {
  std::shared_ptr<ProblemWorld> world;
  std::shared_ptr<Decomposition> dec;
  ProtocolParams params;
};

AndTreeT2 make_t2(bool truthy = true) {
  AndTreeT2 f;
  f.world = std::make_shared<ProblemWorld>(
      make_transcript_world({"1"}, {truthy ? "10" : "11"}, {"10"}, {1.0}));
  f.dec = std::make_shared<Decomposition>(build_and_tree(*f.world, 2));
  f.params = ProtocolParams::make(0.2, 0.5, 1, 2, 9);
  return f;
}

}  // namespace

TEST_CASE("protocol params compute the reward ratio") {
  const auto p = ProtocolParams::make(0.2, 0.5, 1, 2);
  CHECK(p.reward_ratio == doctest::Approx(0.025).epsilon(1e-15));
  CHECK(p.reward_pow(2) == doctest::Approx(0.000625).epsilon(1e-12));
  CHECK_THROWS_AS(ProtocolParams::make(0.7, 0.5, 1, 2), contract_error);
  CHECK_THROWS_AS(ProtocolParams::make(0.2, 1.5, 1, 2), contract_error);
}

TEST_CASE("honest prover against the truthful estimator earns exactly r^{d+1}") {
  auto f = make_t2();
  auto honest = honest_prover(f.dec, f.world);
  auto truthful = truthful_estimator(f.dec, f.world);
  CounterRng rng(9);
  const auto run = run_debate(*f.world, *f.dec, *honest, *truthful, "1", f.params, rng);
  CHECK(run.initial_sample == run.initial_claim);  // z-hat ~ Bern(1)
  CHECK(run.total_payoff == doctest::Approx(0.000625).epsilon(1e-12));
  for (const auto& r : run.rounds) CHECK(r.reward == 0.0);
  CHECK(run.terminal.reward == 0.0);

  const double exact = expected_payoff_x(*f.world, *f.dec, *honest, *truthful, "1", f.params);
  CHECK(exact == doctest::Approx(0.000625).epsilon(1e-12));
}

TEST_CASE("degenerate initial estimate gives payoff exactly zero") {
  auto f = make_t2();
  // claims 1 with direction 0 everywhere; B answers 0 at the top
  class Stubborn final : public ProverStrategy {
   public:
    explicit Stubborn(std::shared_ptr<const Decomposition> dec) : dec_(std::move(dec)) {}
    std::string name() const override { return "stubborn"; }
    int claim(const Bits&) const override { return 1; }
    int answer(const Bits&, const Query&) const override { return 1; }
    int direction(const RoundView&) const override { return 0; }
    std::vector<Query> decompose(const Bits& x, const Query& p, int l) const override {
      return dec_->children(x, p, l);
    }
    int choose_recursion(const Bits&, const std::vector<Query>&, std::span<const double>,
                         std::span<const int>) const override {
      return 0;
    }
    Bits proof_bits(const Bits&, const Query& leaf) const override {
      return Bits(dec_->base_subset(leaf).size(), '1');
    }

   private:
    std::shared_ptr<const Decomposition> dec_;
  };
  class ZeroEstimator final : public EstimatorStrategy {
   public:
    std::string name() const override { return "zero"; }
    double initial(const Bits&) const override { return 0.0; }
    double conditional(const EstimatorView&) const override { return 0.0; }
  };
  Stubborn prover(f.dec);
  ZeroEstimator zero;
  const double exact = expected_payoff_x(*f.world, *f.dec, prover, zero, "1", f.params);
  CHECK(exact == 0.0);
}

TEST_CASE("branch budget enforces 2 * (2^q)^d per input") {
  auto f = make_t2();
  auto honest = honest_prover(f.dec, f.world);
  auto uniform = uniform_estimator();
  f.params.branch_budget = 7;  // needs exactly 8
  CHECK_THROWS_WITH_AS(
      (void)expected_payoff_x(*f.world, *f.dec, *honest, *uniform, "1", f.params),
      doctest::Contains("monte-carlo"), contract_error);
  f.params.branch_budget = 8;
  CHECK_NOTHROW((void)expected_payoff_x(*f.world, *f.dec, *honest, *uniform, "1", f.params));
}

TEST_CASE("monte carlo agrees with exact enumeration within 3 sigma") {
  auto f = make_t2();
  auto honest = honest_prover(f.dec, f.world);
  auto uniform = uniform_estimator();
  const double exact = expected_payoff_x(*f.world, *f.dec, *honest, *uniform, "1", f.params);
  const auto mc = monte_carlo_payoff(*f.world, *f.dec, *honest, *uniform, "1", f.params,
                                     100000, 1234);
  CHECK(std::fabs(mc.mean - exact) <= mc.half_width_3sigma);
  CHECK(mc.stddev > 0.0);
}

TEST_CASE("reward magnitudes stay within r^k and r^{d+1}") {
  auto f = make_t2(false);  // corrupted instance too
  auto pool = fixture_pool(f.dec, f.world, 3);
  for (const auto& prover : pool.provers) {
    for (const auto& estimator : pool.estimators) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CounterRng rng(seed);
        const auto run =
            run_debate(*f.world, *f.dec, *prover, *estimator, f.world->inputs[0], f.params, rng);
        CHECK(std::fabs(run.initial_reward) <= f.params.reward_pow(f.params.depth + 1) + 1e-15);
        for (const auto& r : run.rounds)
          CHECK(std::fabs(r.reward) <= f.params.reward_pow(r.level) + 1e-15);
        CHECK(std::fabs(run.terminal.reward) <= 1.0 + 1e-15);
        // total equals the component sum
        double total = run.initial_reward + run.terminal.reward;
        for (const auto& r : run.rounds) total += r.reward;
        CHECK(run.total_payoff == doctest::Approx(total).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("equal seeds give bit-identical runs") {
  auto f = make_t2();
  auto honest = honest_prover(f.dec, f.world);
  auto rnd = random_estimator(5);
  CounterRng rng1(77), rng2(77);
  const auto a = run_debate(*f.world, *f.dec, *honest, *rnd, "1", f.params, rng1);
  const auto b = run_debate(*f.world, *f.dec, *honest, *rnd, "1", f.params, rng2);
  CHECK(debate_run_to_json(a).dump() == debate_run_to_json(b).dump());
}

TEST_CASE("estimator clamping flags out-of-range probabilities") {
  auto f = make_t2();
  class Wild final : public EstimatorStrategy {
   public:
    std::string name() const override { return "wild"; }
    double initial(const Bits&) const override { return 1.7; }
    double conditional(const EstimatorView&) const override { return -0.3; }
  };
  auto honest = honest_prover(f.dec, f.world);
  Wild wild;
  CounterRng rng(5);
  const auto run = run_debate(*f.world, *f.dec, *honest, wild, "1", f.params, rng);
  CHECK(run.clamp_warning);
  CHECK(run.initial_prob == 1.0);
  for (const auto& r : run.rounds)
    for (double p : r.child_probs) CHECK(p == 0.0);
}

TEST_CASE("prover direction outside {-1,0,1} is a contract violation") {
  auto f = make_t2();
  class Broken final : public ProverStrategy {
   public:
    explicit Broken(std::shared_ptr<const Decomposition> dec) : dec_(std::move(dec)) {}
    std::string name() const override { return "broken"; }
    int claim(const Bits&) const override { return 1; }
    int answer(const Bits&, const Query&) const override { return 1; }
    int direction(const RoundView&) const override { return 2; }
    std::vector<Query> decompose(const Bits& x, const Query& p, int l) const override {
      return dec_->children(x, p, l);
    }
    int choose_recursion(const Bits&, const std::vector<Query>&, std::span<const double>,
                         std::span<const int>) const override {
      return 0;
    }
    Bits proof_bits(const Bits&, const Query& leaf) const override {
      return Bits(dec_->base_subset(leaf).size(), '1');
    }

   private:
    std::shared_ptr<const Decomposition> dec_;
  };
  Broken prover(f.dec);
  auto uniform = uniform_estimator();
  CounterRng rng(5);
  CHECK_THROWS_AS(run_debate(*f.world, *f.dec, prover, *uniform, "1", f.params, rng),
                  contract_error);
}

TEST_CASE("direction-observing ordering is exposed behind a switch") {
  auto f = make_t2();
  class Probe final : public EstimatorStrategy {
   public:
    std::string name() const override { return "probe"; }
    double initial(const Bits&) const override { return 0.5; }
    double conditional(const EstimatorView& v) const override {
      saw_direction = saw_direction || v.direction.has_value();
      return 0.5;
    }
    mutable bool saw_direction = false;
  };
  auto honest = honest_prover(f.dec, f.world);
  Probe probe;
  CounterRng rng(5);
  (void)run_debate(*f.world, *f.dec, *honest, probe, "1", f.params, rng);
  CHECK_FALSE(probe.saw_direction);

  f.params.estimator_observes_direction = true;
  CounterRng rng2(5);
  (void)run_debate(*f.world, *f.dec, *honest, probe, "1", f.params, rng2);
  CHECK(probe.saw_direction);
}

TEST_CASE("payoff breakdown components sum to the exact expectation") {
  auto f = make_t2(false);
  auto pool = fixture_pool(f.dec, f.world, 3);
  for (const auto& prover : pool.provers) {
    for (const auto& estimator : pool.estimators) {
      const double exact = expected_payoff(*f.world, *f.dec, *prover, *estimator, f.params);
      const auto breakdown =
          expected_payoff_breakdown(*f.world, *f.dec, *prover, *estimator, f.params);
      CHECK(breakdown.total() == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("naive recursive debate finds a planted flaw iff the path covers it") {
  auto fixture = make_interval_fixture({91}, {1.0}, 3, 2);
  auto obf = obfuscating_prover(fixture);
  const Bits x = fixture.world->inputs[0];

  const double p = naive_debate_flaw_probability(*fixture.world, *fixture.dec, *obf, x);
  CHECK(p == doctest::Approx(1.0 / 9.0).epsilon(1e-12));

  auto honest = honest_prover(fixture.dec, fixture.world);
  CHECK(naive_debate_flaw_probability(*fixture.world, *fixture.dec, *honest, x) == 0.0);

  ChildSelector first = [](const Bits&, const Query&, const std::vector<Query>&, int) {
    return 0;
  };
  const auto miss = run_naive_recursive_debate(*fixture.world, *fixture.dec, *obf, first, x);
  CHECK_FALSE(miss.flaw_found);

  ChildSelector to_seven = [](const Bits&, const Query&, const std::vector<Query>& children,
                              int) {
    for (std::size_t i = 0; i < children.size(); ++i) {
      const auto& p = children[i].payload;
      const auto colon = p.find(':');
      if (std::stoull(p.substr(0, colon)) <= 7 && 7 < std::stoull(p.substr(colon + 1)))
        return static_cast<int>(i);
    }
    return 0;
  };
  const auto hit = run_naive_recursive_debate(*fixture.world, *fixture.dec, *obf, to_seven, x);
  CHECK(hit.flaw_found);

  // empirical frequency sanity for the uniform selector
  std::size_t found = 0;
  const std::size_t runs = 2000;
  for (std::size_t i = 0; i < runs; ++i) {
    auto sel = uniform_random_selector(1000 + i);
    if (run_naive_recursive_debate(*fixture.world, *fixture.dec, *obf, sel, x).flaw_found)
      ++found;
  }
  const double freq = static_cast<double>(found) / runs;
  CHECK(std::fabs(freq - 1.0 / 9.0) < 0.03);
}
