#include "doctest.h"
#include "pedebate/core_model.hpp"
#include "pedebate/serialize.hpp"
#include "pedebate/strategies.hpp"

using namespace pedebate;

namespace {

ProblemWorld two_input_world() {
  // first transcript clean, second corrupted at step 3 (1-based)
  return make_transcript_world({"0001", "0010"}, {"1111", "1101"}, {"1111", "1111"},
                               {0.5, 0.5});
}

}  // namespace

TEST_CASE("oracle table is total on registered keys and errors otherwise") {
  OracleTable oracle(16);
  oracle.register_entry("x=0|S=1|u=1", 1);
  CHECK(oracle.lookup("x=0|S=1|u=1") == 1);
  CHECK_THROWS_AS(oracle.lookup("x=0|S=1|u=0"), contract_error);
  CHECK_THROWS_AS(oracle.register_entry(std::string(40, '0'), 1), contract_error);
}

TEST_CASE("problem world validates its distribution") {
  auto world = two_input_world();
  CHECK(world.label("0001") == 1);
  CHECK(world.label("0010") == 0);
  world.distribution["0001"] = 0.75;
  CHECK_THROWS_AS(world.validate(), contract_error);
}

TEST_CASE("aggregator evaluation: AND identities and gate-with-majorities") {
  auto world = two_input_world();
  auto dec = build_and_tree(world, 4);

  const Bits x = "0001";
  auto children = dec.children(x, dec.root(x), 2);
  std::vector<int> z{1, 1};
  CHECK(dec.eval_aggregator(x, children, z) == 1);
  z = {1, 0};
  CHECK(dec.eval_aggregator(x, children, z) == 0);
  std::vector<int> bad{1};
  CHECK_THROWS_AS(dec.eval_aggregator(x, children, bad), contract_error);

  // w=1 AND over one MAJ-3 group: z=(1,1,0) -> maj 1 -> 1
  AggregatorSpec spec{AggregatorSpec::Gate::And, 1, 3};
  std::vector<int> z3{1, 1, 0};
  CHECK(spec.eval(z3) == 1);
  z3 = {1, 0, 0};
  CHECK(spec.eval(z3) == 0);
}

TEST_CASE("eval_aggregator is pure") {
  auto world = two_input_world();
  auto dec = build_and_tree(world, 4);
  const Bits x = "0001";
  auto children = dec.children(x, dec.root(x), 2);
  std::vector<int> z{1, 0};
  const int first = dec.eval_aggregator(x, children, z);
  for (int i = 0; i < 10; ++i) CHECK(dec.eval_aggregator(x, children, z) == first);
}

TEST_CASE("and tree: all-correct transcript gives all-ones tree") {
  auto world = two_input_world();
  auto dec = build_and_tree(world, 4);
  dec.check_consistency(world);
  CHECK(dec.schedule().depth == 2);
  CHECK(dec.schedule().width == 2);

  const Bits x = "0001";
  CHECK(dec.truth(x, dec.root(x)) == 1);
  for (auto& c : dec.children(x, dec.root(x), 2)) {
    CHECK(dec.truth(x, c) == 1);
    for (auto& leaf : dec.children(x, c, 1)) CHECK(dec.truth(x, leaf) == 1);
  }
}

TEST_CASE("and tree: one corrupted step zeroes exactly the covering path") {
  auto world = two_input_world();
  auto dec = build_and_tree(world, 4);
  const Bits x = "0010";  // supplied 1101 vs reference 1111: step 3 wrong
  CHECK(dec.truth(x, dec.root(x)) == 0);
  auto level1 = dec.children(x, dec.root(x), 2);
  // step 3 sits in the right half [3,5)
  CHECK(dec.truth(x, level1[0]) == 1);
  CHECK(dec.truth(x, level1[1]) == 0);
  auto leaves_left = dec.children(x, level1[0], 1);
  CHECK(dec.truth(x, leaves_left[0]) == 1);
  CHECK(dec.truth(x, leaves_left[1]) == 1);
  auto leaves_right = dec.children(x, level1[1], 1);
  CHECK(dec.truth(x, leaves_right[0]) == 0);
  CHECK(dec.truth(x, leaves_right[1]) == 1);
}

TEST_CASE("and tree T=2: base subsets are singleton step indices") {
  auto world = make_transcript_world({"1"}, {"10"}, {"10"}, {1.0});
  auto dec = build_and_tree(world, 2);
  CHECK(dec.schedule().depth == 1);
  CHECK(dec.schedule().width == 2);
  auto leaves = dec.children("1", dec.root("1"), 1);
  CHECK(dec.base_subset(leaves[0]) == std::vector<int>{1});
  CHECK(dec.base_subset(leaves[1]) == std::vector<int>{2});
}

TEST_CASE("and tree rejects non-power-of-two transcripts") {
  auto world = two_input_world();
  CHECK_THROWS_AS(build_and_tree(world, 3), contract_error);
}

TEST_CASE("build_and_tree satisfies q^d = T and m = T") {
  auto world = two_input_world();
  auto dec = build_and_tree(world, 4);
  int qd = 1;
  for (int i = 0; i < dec.schedule().depth; ++i) qd *= dec.schedule().width;
  CHECK(qd == 4);
  CHECK(world.proof("0001").size() == 4);
}

TEST_CASE("a-provability: honest prover always passes") {
  auto world = std::make_shared<ProblemWorld>(two_input_world());
  auto dec = std::make_shared<Decomposition>(build_and_tree(*world, 4));
  auto honest = honest_prover(dec, world);
  const auto report = check_a_provable(*dec, *honest, *world);
  CHECK(report.holds);
  CHECK(report.failure_prob == 0.0);
}

TEST_CASE("a-provability: flipped claim on one input shows as its mu-mass") {
  auto world = std::make_shared<ProblemWorld>(
      make_transcript_world({"00", "01", "10", "11"}, {"1011", "1011", "1011", "1011"},
                            {"1011", "1011", "1011", "1011"}, {0.25, 0.25, 0.25, 0.25}));
  auto dec = std::make_shared<Decomposition>(build_and_tree(*world, 4));

  // wrong top-level claim on exactly one input
  class OneFlip final : public ProverStrategy {
   public:
    OneFlip(ProverPtr inner) : inner_(std::move(inner)) {}
    std::string name() const override { return "one_flip"; }
    int claim(const Bits& x) const override {
      return x == "10" ? 1 - inner_->claim(x) : inner_->claim(x);
    }
    int answer(const Bits& x, const Query& q) const override { return inner_->answer(x, q); }
    int direction(const RoundView& v) const override { return inner_->direction(v); }
    std::vector<Query> decompose(const Bits& x, const Query& p, int l) const override {
      return inner_->decompose(x, p, l);
    }
    int choose_recursion(const Bits& x, const std::vector<Query>& c, std::span<const double> pr,
                         std::span<const int> z) const override {
      return inner_->choose_recursion(x, c, pr, z);
    }
    Bits proof_bits(const Bits& x, const Query& leaf) const override {
      return inner_->proof_bits(x, leaf);
    }

   private:
    ProverPtr inner_;
  };

  OneFlip prover(honest_prover(dec, world));
  const auto report = check_a_provable(*dec, prover, *world);
  CHECK_FALSE(report.holds);
  CHECK(report.failure_prob == doctest::Approx(0.25).epsilon(1e-12));
  REQUIRE(report.witnesses.size() == 1);
  CHECK(report.witnesses[0].first == "10");
}

TEST_CASE("a-provability: wrong answer at one leaf is witnessed") {
  auto world = std::make_shared<ProblemWorld>(two_input_world());
  auto dec = std::make_shared<Decomposition>(build_and_tree(*world, 4));
  // asserts everything true: wrong at the corrupted leaf of input 0010
  auto asserter = asserting_prover(dec, world);
  const auto report = check_a_provable(*dec, *asserter, *world);
  CHECK_FALSE(report.holds);
  CHECK(report.failure_prob == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("registered decomposition kinds rebuild from JSON") {
  auto world = two_input_world();
  auto dec = build_and_tree(world, 4);
  const auto j = decomposition_to_json(dec);
  auto back = decomposition_from_json(j, world);
  CHECK(back.schedule().depth == dec.schedule().depth);
  CHECK(back.schedule().width == dec.schedule().width);
  for (const Bits& x : world.inputs)
    CHECK(back.truth(x, back.root(x)) == dec.truth(x, dec.root(x)));

  auto fixture = make_interval_fixture({91, 97}, {0.5, 0.5}, 3, 2);
  const auto ji = decomposition_to_json(*fixture.dec);
  auto backi = decomposition_from_json(ji, *fixture.world);
  const Bits composite = fixture.world->inputs[0];
  auto kids = backi.children(composite, backi.root(composite), 2);
  CHECK(backi.truth(composite, kids[1]) == 0);

  json unknown = j;
  unknown["name"] = "mystery";
  CHECK_THROWS_AS(decomposition_from_json(unknown, world), contract_error);
}

TEST_CASE("world JSON round-trip preserves every field") {
  auto world = two_input_world();
  const auto j = world_to_json(world);
  auto back = world_from_json(j);
  CHECK(back.inputs == world.inputs);
  for (const auto& x : world.inputs) {
    CHECK(back.label(x) == world.label(x));
    CHECK(back.proof(x) == world.proof(x));
    CHECK(back.mu(x) == world.mu(x));
  }
  CHECK(back.oracle.size() == world.oracle.size());
}
