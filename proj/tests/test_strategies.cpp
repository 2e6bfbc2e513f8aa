#include <cmath>

#include "doctest.h"
#include "pedebate/rng.hpp"
#include "pedebate/strategies.hpp"

using namespace pedebate;

namespace {

IntervalFixture fixture_91_97() { return make_interval_fixture({91, 97}, {0.5, 0.5}, 3, 2); }

RoundView view_for(const Bits& x, const Query& parent, double p, double p_init, int claim,
                   double eps) {
  RoundView v;
  v.x = x;
  v.parent = parent;
  v.level = parent.level;
  v.p = p;
  v.p_initial = p_init;
  v.initial_claim = claim;
  v.epsilon = eps;
  return v;
}

}  // namespace

TEST_CASE("honest direction thresholds at epsilon") {
  auto f = fixture_91_97();
  auto honest = honest_prover(f.dec, f.world);
  const Bits prime = f.world->inputs[1];  // 97: every claim true
  const Query root = f.dec->root(prime);

  // g = 1 against p = 0.5: overshoot upward
  CHECK(honest->direction(view_for(prime, root, 0.5, 0.5, 1, 0.2)) == 1);
  // g = 1 against p = 0.85: within epsilon
  CHECK(honest->direction(view_for(prime, root, 0.85, 0.5, 1, 0.2)) == 0);
  // gate: accurate initial estimate zeroes everything afterwards
  CHECK(honest->direction(view_for(prime, root, 0.5, 0.9, 1, 0.2)) == 0);
}

TEST_CASE("honest direction is the thresholded sign of g - p on a grid") {
  auto f = fixture_91_97();
  auto honest = honest_prover(f.dec, f.world);
  const Bits composite = f.world->inputs[0];
  const Query root = f.dec->root(composite);  // g = 0 for 91
  for (double eps : {0.05, 0.2, 0.4}) {
    for (double p = 0.0; p <= 1.0 + 1e-12; p += 0.01) {
      const int dir = honest->direction(view_for(composite, root, p, 1.0, 0, eps));
      const double diff = 0.0 - p;
      const int want = diff > eps ? 1 : (diff < -eps ? -1 : 0);
      CHECK(dir == want);
    }
  }
}

TEST_CASE("honest recursion picks the first maximal estimation error") {
  auto f = fixture_91_97();
  auto honest = honest_prover(f.dec, f.world);
  const Bits prime = f.world->inputs[1];
  const Query root = f.dec->root(prime);
  auto children = f.dec->children(prime, root, 2);  // all true for 97
  // errors: |0.95-1|=0.05, |0.7-1|=0.3, |0.7-1|=0.3 -> first maximizer is 1
  const std::vector<double> probs{0.95, 0.7, 0.7};
  const std::vector<int> z{1, 1, 1};
  CHECK(honest->choose_recursion(prime, children, probs, z) == 1);
}

TEST_CASE("truthful estimator emits exact zeros and ones, prefix-independent") {
  auto f = fixture_91_97();
  auto truthful = truthful_estimator(f.dec, f.world);
  const Bits prime = f.world->inputs[1];
  const Bits composite = f.world->inputs[0];
  CHECK(truthful->initial(prime) == 1.0);
  CHECK(truthful->initial(composite) == 0.0);

  EstimatorView v;
  v.x = composite;
  v.parent = f.dec->root(composite);
  v.children = f.dec->children(composite, v.parent, 2);
  v.level = 2;
  v.index = 1;  // [5,8): contains 7 -> false
  v.z_prefix = {0};
  const double with_zero = truthful->conditional(v);
  v.z_prefix = {1};
  const double with_one = truthful->conditional(v);
  CHECK(with_zero == 0.0);
  CHECK(with_one == with_zero);
}

TEST_CASE("interval fixture marks exactly the factor interval false") {
  auto f = fixture_91_97();
  const Bits composite = f.world->inputs[0];  // 91 = 7 * 13
  const Query root = f.dec->root(composite);
  auto intervals = f.dec->children(composite, root, 2);
  REQUIRE(intervals.size() == 3);
  CHECK(intervals[0].payload == "2:5");
  CHECK(intervals[1].payload == "5:8");
  CHECK(intervals[2].payload == "8:11");
  CHECK(f.dec->truth(composite, intervals[0]) == 1);
  CHECK(f.dec->truth(composite, intervals[1]) == 0);  // contains 7
  CHECK(f.dec->truth(composite, intervals[2]) == 1);

  // exactly one root-to-leaf path carries false claims
  int false_leaves = 0;
  for (auto& mid : intervals)
    for (auto& leaf : f.dec->children(composite, mid, 1))
      if (f.dec->truth(composite, leaf) == 0) ++false_leaves;
  CHECK(false_leaves == 1);
}

TEST_CASE("leaf oracle contradicts the obfuscator on a factor") {
  auto f = make_interval_fixture({35}, {1.0}, 3, 2);
  const Bits x = f.world->inputs[0];
  // leaf {5}: 5 divides 35
  Query leaf;
  bool found = false;
  auto root = f.dec->root(x);
  for (auto& mid : f.dec->children(x, root, 2)) {
    for (auto& l : f.dec->children(x, mid, 1)) {
      if (l.payload == "5:6") {
        leaf = l;
        found = true;
      }
    }
  }
  REQUIRE(found);
  CHECK(f.dec->truth(x, leaf) == 0);
  auto obf = obfuscating_prover(f);
  CHECK(obf->answer(x, leaf) == 1);
}

TEST_CASE("prime instance has all interval claims true") {
  auto f = make_interval_fixture({97}, {1.0}, 3, 2);
  const Bits x = f.world->inputs[0];
  auto root = f.dec->root(x);
  CHECK(f.world->label(x) == 1);
  for (auto& mid : f.dec->children(x, root, 2)) {
    CHECK(f.dec->truth(x, mid) == 1);
    for (auto& l : f.dec->children(x, mid, 1)) CHECK(f.dec->truth(x, l) == 1);
  }
}

TEST_CASE("fixture pool has the canonical membership") {
  auto f = fixture_91_97();
  auto pool = fixture_pool(f.dec, f.world, 7);
  CHECK(pool.provers.size() >= 4);
  CHECK(pool.estimators.size() >= 5);

  const Bits prime = f.world->inputs[1];
  for (auto& e : pool.estimators) {
    if (e->name() == "uniform") CHECK(e->initial(prime) == 0.5);
    if (e->name() == "anti_truth") CHECK(e->initial(prime) == 0.0);
  }
  bool has_obfuscating = false;
  for (auto& p : pool.provers)
    if (p->name() == "obfuscating") has_obfuscating = true;
  CHECK(has_obfuscating);
}

TEST_CASE("trial division agrees with known primality") {
  CHECK(trial_division_prime(97));
  CHECK_FALSE(trial_division_prime(91));
  CHECK_FALSE(trial_division_prime(1));
  CHECK(trial_division_prime(2));
}

TEST_CASE("random strategies are pure functions of their inputs") {
  auto f = fixture_91_97();
  auto rd = random_direction_prover(f.dec, f.world, 11);
  const Bits x = f.world->inputs[0];
  const Query root = f.dec->root(x);
  const auto v = view_for(x, root, 0.3, 0.9, 0, 0.2);
  CHECK(rd->direction(v) == rd->direction(v));

  auto re = random_estimator(13);
  EstimatorView ev;
  ev.x = x;
  ev.parent = root;
  ev.children = f.dec->children(x, root, 2);
  ev.level = 2;
  ev.index = 2;
  ev.z_prefix = {1, 0};
  const double p1 = re->conditional(ev);
  CHECK(p1 == re->conditional(ev));
  CHECK(p1 >= 0.0);
  CHECK(p1 <= 1.0);
}
