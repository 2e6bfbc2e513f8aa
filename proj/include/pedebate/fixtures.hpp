#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pedebate/protocol.hpp"
#include "pedebate/stability.hpp"
#include "pedebate/strategies.hpp"

namespace pedebate {

struct FixtureBundle {
  std::string name;
  std::shared_ptr<const ProblemWorld> world;
  std::shared_ptr<const Decomposition> dec;
  ProtocolParams params;
  FixturePool pool;
  std::optional<IntervalFixture> interval;
  std::optional<StableTransform> transform;
};

// Named desk-scale fixtures used by the CLI and the reproduction suites.
//   and_tree_t4     width-2 AND tree over 4-step transcripts (d=2)
//   interval_q3_d2  primality intervals, N in {91, 97} (one bad leaf)
//   certified_q3_d2 majority-transformed world, w=1 kappa=3 d=2
FixtureBundle make_fixture(const std::string& name, std::uint64_t seed);
std::vector<std::string> fixture_names();

// Base world + evidence for the kappa=5 transform used by the label
// preservation experiment (n=16, s=25).
StableTransform make_k5_transform(double epsilon, double flip_prob, std::uint64_t seed);

}  // namespace pedebate
