#include "pedebate/fixtures.hpp"

namespace pedebate {

namespace {

FixtureBundle make_and_tree_t4(std::uint64_t seed) {
  FixtureBundle f;
  f.name = "and_tree_t4";
  const std::vector<Bits> inputs{"0001", "0010"};
  const std::vector<Bits> reference{"1011", "0110"};
  // second input carries one corrupted transcript step
  const std::vector<Bits> supplied{"1011", "0100"};
  auto world = std::make_shared<ProblemWorld>(
      make_transcript_world(inputs, supplied, reference, {0.5, 0.5}));
  auto dec = std::make_shared<Decomposition>(build_and_tree(*world, 4));
  dec->check_consistency(*world);
  f.world = world;
  f.dec = dec;
  f.params = ProtocolParams::make(0.2, 0.5, 2, 2, seed);
  f.pool = fixture_pool(dec, world, seed);
  return f;
}

FixtureBundle make_interval_q3_d2(std::uint64_t seed) {
  FixtureBundle f;
  f.name = "interval_q3_d2";
  // 91 = 7*13: exactly one factor (7) inside [2, 11); 97 is prime.
  auto fixture = make_interval_fixture({91, 97}, {0.5, 0.5}, 3, 2);
  f.world = fixture.world;
  f.dec = fixture.dec;
  f.interval = fixture;
  f.params = ProtocolParams::make(0.2, 0.5, 2, 3, seed);
  f.pool = fixture_pool(fixture.dec, fixture.world, seed);
  return f;
}

SupportedBaseWorld make_base_world_16() {
  SupportedBaseWorld base;
  base.inputs = {bits_from_u64(0x5a31, 16), bits_from_u64(0xc3f0, 16)};
  base.base_truths = {{1}, {0}};  // w=1, d arbitrary: one base query per input
  base.mu = {0.5, 0.5};
  return base;
}

FixtureBundle make_certified_q3_d2(std::uint64_t seed) {
  FixtureBundle f;
  f.name = "certified_q3_d2";
  const double epsilon = 0.2;
  StableTransformConfig cfg;
  cfg.epsilon = epsilon;
  cfg.w = 1;
  cfg.kappa = 3;  // desk override of the kappa_for schedule
  cfg.depth = 2;
  cfg.seeds_per_input = 2;
  cfg.seed_base = seed + 17;
  cfg.input_bits = 16;

  EvidenceModel ev;
  ev.support = 9;  // kappa^d
  ev.flip_prob = epsilon / (4.0 * 16.0);
  ev.independent = true;
  for (int b = 0; b < 1; ++b) ev.base_queries.push_back("b" + std::to_string(b));

  auto tr = stable_transform(make_base_world_16(), ev, cfg);
  f.transform = tr;
  f.world = tr.world_prime;
  f.dec = tr.dec_prime;
  f.params = ProtocolParams::make(epsilon, 0.5, 2, 3, seed);
  f.pool = fixture_pool(tr.dec_prime, tr.world_prime, seed);
  return f;
}

}  // namespace

FixtureBundle make_fixture(const std::string& name, std::uint64_t seed) {
  if (name == "and_tree_t4") return make_and_tree_t4(seed);
  if (name == "interval_q3_d2") return make_interval_q3_d2(seed);
  if (name == "certified_q3_d2") return make_certified_q3_d2(seed);
  throw contract_error("unknown fixture '" + name + "'; available: and_tree_t4, interval_q3_d2, certified_q3_d2");
}

std::vector<std::string> fixture_names() {
  return {"and_tree_t4", "interval_q3_d2", "certified_q3_d2"};
}

StableTransform make_k5_transform(double epsilon, double flip_prob, std::uint64_t seed) {
  StableTransformConfig cfg;
  cfg.epsilon = epsilon;
  cfg.w = 1;
  cfg.kappa = 5;
  cfg.depth = 2;
  cfg.seeds_per_input = 1;
  cfg.seed_base = seed;
  cfg.input_bits = 16;

  EvidenceModel ev;
  ev.support = 25;
  ev.flip_prob = flip_prob;
  ev.independent = true;
  ev.base_queries = {"b0"};

  return stable_transform(make_base_world_16(), ev, cfg);
}

}  // namespace pedebate
